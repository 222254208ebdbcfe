#pragma once

#include <string>
#include <vector>

#include "kdf/matrix.hpp"

namespace kdf {

/// Parameter-list role in F(A; B, C; D; E, F).
enum class Role : int { A = 0, B, C, D, E, F };

const char* role_name(Role r);

/// Ordered list of same-dimension matrices playing one parameter role.
struct MatrixList {
    std::vector<ComplexMatrix> items;
    Role label = Role::A;

    int size() const { return static_cast<int>(items.size()); }
    bool empty() const { return items.empty(); }
};

/// Shifted factorial (X)_n = X (X+I) ... (X+(n-1)I), (X)_0 = I.
/// Factors accumulate left to right.
ComplexMatrix poch(const ComplexMatrix& x, int n);

/// ((X)_n)^{-1}, built from the inverses of the individual shifts so the
/// first singular one is identified. Throws SingularShift(k).
ComplexMatrix poch_inv(const ComplexMatrix& x, int n, const std::string& name = "X");

/// Bracket product over a list: [L]_n = prod_i (L_i)_n, or its inverse form
/// when `inverted`. Empty list gives I. Items multiply in list order.
ComplexMatrix list_poch(const MatrixList& l, int n, bool inverted);

/// Memoized (X)_n values extended by the recurrence
/// (X)_{n+1} = (X)_n (X + nI); never recomputed from scratch.
/// Tracks the first index at which the value becomes the exact zero matrix
/// (terminating factor X = -kI) so callers can short-circuit.
class PochTable {
public:
    explicit PochTable(ComplexMatrix base);
    const ComplexMatrix& at(int n);
    bool zero_at(int n);

private:
    ComplexMatrix base_;
    std::vector<ComplexMatrix> vals_;
    int first_zero_ = -1; // -1: none seen yet
};

/// Memoized ((X)_n)^{-1} via the recurrence
/// ((X)_{n+1})^{-1} = (X + nI)^{-1} ((X)_n)^{-1}.
class InvPochTable {
public:
    InvPochTable(ComplexMatrix base, std::string name);
    const ComplexMatrix& at(int n); // throws SingularShift

private:
    ComplexMatrix base_;
    std::string name_;
    std::vector<ComplexMatrix> vals_;
};

} // namespace kdf
