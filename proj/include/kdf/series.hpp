#pragma once

#include <algorithm>
#include <span>

#include "kdf/params.hpp"

namespace kdf {

/// Shared adaptive stop rule: the max single-term Frobenius norm over the
/// last `window` diagonals (or outer-sum terms), compared against
/// tol * (1 + ||partial sum||). A window survives an accidental zero term.
class TailRule {
public:
    TailRule(double tol, int window) : tol_(tol), window_(window) {}
    void push(double term_norm) {
        ring_.push_back(term_norm);
        if (static_cast<int>(ring_.size()) > window_) ring_.erase(ring_.begin());
    }
    double tail() const {
        double t = 0.0;
        for (double v : ring_) t = std::max(t, v);
        return t;
    }
    bool settled(double sum_norm) const {
        return static_cast<int>(ring_.size()) == window_ && tail() <= tol_ * (1.0 + sum_norm);
    }

private:
    double tol_;
    int window_;
    std::vector<double> ring_;
};

/// Gauss 2F1: sum_n (A)_n (B)_n (C)_n^{-1} x^n / n!.
/// Requires |x| < 1 (boundary points rejected); C + kI invertible as reached.
SeriesResult gauss_2f1(const ComplexMatrix& a, const ComplexMatrix& b,
                       const ComplexMatrix& c, cplx x, const SeriesControl& ctrl);

enum class AppellKind { F1, F2, F3, F4 };

const char* appell_name(AppellKind k);

/// Appell double series. Parameter order in `ms`:
///   F1: {A, B, B', C}     F2: {A, B, B', C, C'}
///   F3: {A, A', B, B', C} F4: {A, B, C, C'}
/// Convergence regions enforced: F1/F3 |x|<1 and |y|<1; F2 |x|+|y|<1;
/// F4 sqrt|x|+sqrt|y|<1.
SeriesResult appell(AppellKind kind, std::span<const ComplexMatrix> ms, cplx x, cplx y,
                    const SeriesControl& ctrl);

/// Kampe de Feriet double series, summed by diagonals d = m+n with the term
///   [A]_{m+n} [B]_m [C]_n [D]^{-1}_{m+n} [E]^{-1}_m [F]^{-1}_n x^m y^n/(m! n!)
/// assembled left to right. Stops when the max term norm over the last
/// `tail_window` diagonals drops below tol * (1 + ||partial||_F).
/// The caller owns the convergence-domain question; no region is enforced.
SeriesResult kdf_eval(const KdFParams& p, cplx x, cplx y, const SeriesControl& ctrl);

/// q-th y-derivative via the closed form
///   [A]_q [C]_q F(A+qI; B, C+qI; D+qI; E, F+qI) [D]^{-1}_q [F]^{-1}_q.
SeriesResult deriv_y(const KdFParams& p, cplx x, cplx y, int q, const SeriesControl& ctrl);

/// q-th y-derivative by direct term-wise differentiation of the double
/// series (index shift n -> n+q); independent of the closed form above.
SeriesResult kdf_eval_dy(const KdFParams& p, cplx x, cplx y, int q, const SeriesControl& ctrl);

/// 1F0(A; -; t) = (1 - t)^{-A} via the principal scalar-base power.
ComplexMatrix one_f0(const ComplexMatrix& a, cplx t);

} // namespace kdf
