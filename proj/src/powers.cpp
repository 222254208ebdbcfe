#include "kdf/powers.hpp"

#include <cmath>

#include "kdf/errors.hpp"

namespace kdf {

ComplexMatrix expm(const ComplexMatrix& x) {
    const int r = x.dim();
    const double nrm = x.one_norm();
    int squarings = 0;
    double scaled = nrm;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++squarings;
    }
    ComplexMatrix y = x;
    if (squarings > 0) y *= cplx{std::ldexp(1.0, -squarings), 0.0};

    constexpr int taylor_order = 18;
    // Horner: T = I + Y(I + Y/2 (I + Y/3 (...)))
    ComplexMatrix t = ComplexMatrix::identity(r);
    for (int j = taylor_order; j >= 1; --j) {
        t = y * (t * cplx{1.0 / j, 0.0});
        t.add_scaled_identity(1.0);
    }
    for (int k = 0; k < squarings; ++k) t = t * t;
    return t;
}

ComplexMatrix scalar_power(cplx c, const ComplexMatrix& a) {
    if (c.imag() == 0.0 && c.real() <= 0.0)
        throw BranchCut("scalar base on the closed negative real axis");
    const cplx logc = std::log(c); // principal branch
    return expm(a * logc);
}

} // namespace kdf
