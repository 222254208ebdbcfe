#pragma once

#include <vector>

#include "kdf/matrix.hpp"

namespace kdf {

/// Eigenvalue multiset of a square complex matrix.
struct Spectrum {
    std::vector<cplx> eigenvalues; // with multiplicity, |eigenvalues| == dim
};

/// All eigenvalues via Householder Hessenberg reduction followed by shifted
/// QR iteration (Wilkinson shift, Givens sweeps). Sized for r <= ~8.
/// Throws ConvergenceFailure when the sweep budget runs out.
Spectrum spectrum(const ComplexMatrix& m);

/// True iff Re(lambda) > 0 for every eigenvalue.
bool is_positive_stable(const ComplexMatrix& m);

/// min over the spectrum of |lambda - z0|; used by hypothesis checks to
/// test invertibility of X + kI and friends without forming inverses.
double min_eigen_distance(const Spectrum& s, cplx z0);

} // namespace kdf
