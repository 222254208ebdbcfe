#pragma once

#include "kdf/matrix.hpp"

namespace kdf {

/// exp(X) by scaling-and-squaring: X is halved until ||X||_1 <= 0.5, the
/// order-18 Taylor polynomial is evaluated by Horner, then squared back.
ComplexMatrix expm(const ComplexMatrix& x);

/// Principal scalar-base matrix power c^A = exp(ln(c) * A).
/// Throws BranchCut when c lies on the closed negative real axis.
ComplexMatrix scalar_power(cplx c, const ComplexMatrix& a);

} // namespace kdf
