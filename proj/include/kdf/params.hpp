#pragma once

#include <array>
#include <vector>

#include "kdf/matrix.hpp"
#include "kdf/pochhammer.hpp"

namespace kdf {

/// The six parameter lists of F(A; B, C; D; E, F). The shape indices
/// (m1, n1, n1', m2, n2, n2') are the list lengths.
struct KdFParams {
    int dim = 1;
    MatrixList A{{}, Role::A};
    MatrixList B{{}, Role::B};
    MatrixList C{{}, Role::C};
    MatrixList D{{}, Role::D};
    MatrixList E{{}, Role::E};
    MatrixList F{{}, Role::F};

    std::array<int, 6> shape() const {
        return {A.size(), B.size(), C.size(), D.size(), E.size(), F.size()};
    }
    const MatrixList& role(Role r) const;
    MatrixList& role(Role r);

    /// Checks dimensions agree and labels match slots; throws std::invalid_argument.
    void validate() const;
};

struct SeriesControl {
    double tol = 1e-12;        // relative stop tolerance
    int max_diagonal = 400;    // cap on m+n
    int tail_window = 3;       // diagonals the tail estimate looks back over
    bool collect_diagnostics = false;

    void validate() const;     // tol >= 1e-13, max_diagonal >= 1, tail_window >= 1
};

struct SeriesResult {
    ComplexMatrix value;
    long terms_used = 0;
    double last_tail_norm = 0.0;
    bool converged = false;
    std::vector<double> diagonal_norms; // filled when collect_diagnostics
};

} // namespace kdf
