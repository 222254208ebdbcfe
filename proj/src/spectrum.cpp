#include "kdf/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdf/errors.hpp"

namespace kdf {
namespace {

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(ComplexMatrix& h) {
    const int r = h.dim();
    for (int col = 0; col < r - 2; ++col) {
        // Zero h(col+2..r-1, col) with a reflector on rows col+1..r-1.
        double scale = 0.0;
        for (int i = col + 1; i < r; ++i) scale += std::norm(h(i, col));
        scale = std::sqrt(scale);
        if (scale == 0.0) continue;
        const cplx x0 = h(col + 1, col);
        const double ax0 = std::abs(x0);
        const cplx phase = (ax0 == 0.0) ? cplx{1.0, 0.0} : x0 / ax0;
        // v = x + phase*scale*e1
        std::vector<cplx> v(static_cast<size_t>(r - col - 1));
        for (int i = col + 1; i < r; ++i) v[static_cast<size_t>(i - col - 1)] = h(i, col);
        v[0] += phase * scale;
        double vnorm2 = 0.0;
        for (const auto& z : v) vnorm2 += std::norm(z);
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;
        // H := (I - beta v v^H) H
        for (int j = col; j < r; ++j) {
            cplx dot{};
            for (int i = col + 1; i < r; ++i) dot += std::conj(v[static_cast<size_t>(i - col - 1)]) * h(i, j);
            dot *= beta;
            for (int i = col + 1; i < r; ++i) h(i, j) -= v[static_cast<size_t>(i - col - 1)] * dot;
        }
        // H := H (I - beta v v^H)
        for (int i = 0; i < r; ++i) {
            cplx dot{};
            for (int j = col + 1; j < r; ++j) dot += h(i, j) * v[static_cast<size_t>(j - col - 1)];
            dot *= beta;
            for (int j = col + 1; j < r; ++j) h(i, j) -= dot * std::conj(v[static_cast<size_t>(j - col - 1)]);
        }
        for (int i = col + 2; i < r; ++i) h(i, col) = cplx{};
    }
}

// Eigenvalue of the trailing 2x2 block closest to its (1,1) entry.
cplx wilkinson_shift(const ComplexMatrix& h, int n) {
    const cplx a = h(n - 1, n - 1), b = h(n - 1, n), c = h(n, n - 1), d = h(n, n);
    const cplx tr = a + d;
    const cplx det = a * d - b * c;
    cplx disc = std::sqrt(tr * tr - 4.0 * det);
    cplx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

} // namespace

Spectrum spectrum(const ComplexMatrix& m) {
    const int r = m.dim();
    Spectrum out;
    out.eigenvalues.reserve(static_cast<size_t>(r));
    if (r == 1) {
        out.eigenvalues.push_back(m(0, 0));
        return out;
    }

    ComplexMatrix h = m;
    hessenberg(h);

    const double eps = std::numeric_limits<double>::epsilon();
    int hi = r - 1;
    int iters_this_eig = 0;
    const int iter_cap = 60;

    while (hi > 0) {
        // Deflate any negligible subdiagonal in the active block.
        int lo = hi;
        while (lo > 0) {
            const double off = std::abs(h(lo, lo - 1));
            const double cmp = eps * (std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo)));
            if (off <= cmp || off == 0.0) {
                h(lo, lo - 1) = cplx{};
                break;
            }
            --lo;
        }
        if (std::abs(h(hi, hi - 1)) == 0.0 || lo == hi) {
            out.eigenvalues.push_back(h(hi, hi));
            --hi;
            iters_this_eig = 0;
            continue;
        }

        if (++iters_this_eig > iter_cap)
            throw ConvergenceFailure("QR iteration budget exhausted");

        cplx sigma = wilkinson_shift(h, hi);
        if (iters_this_eig % 12 == 0) {
            // ad hoc shift to break rare cycling
            sigma = h(hi, hi) + cplx{std::abs(h(hi, hi - 1)), 0.0};
        }

        // Explicit shifted QR sweep on rows/cols lo..hi via Givens rotations.
        const int n = hi - lo + 1;
        std::vector<cplx> cs(static_cast<size_t>(n - 1)), sn(static_cast<size_t>(n - 1));
        for (int i = lo; i <= hi; ++i) h(i, i) -= sigma;
        for (int k = lo; k < hi; ++k) {
            const cplx a = h(k, k), b = h(k + 1, k);
            const double rho = std::sqrt(std::norm(a) + std::norm(b));
            cplx c{1.0, 0.0}, s{};
            if (rho > 0.0) { c = a / rho; s = b / rho; }
            cs[static_cast<size_t>(k - lo)] = c;
            sn[static_cast<size_t>(k - lo)] = s;
            for (int j = k; j <= hi; ++j) {
                const cplx t1 = h(k, j), t2 = h(k + 1, j);
                h(k, j) = std::conj(c) * t1 + std::conj(s) * t2;
                h(k + 1, j) = -s * t1 + c * t2;
            }
        }
        for (int k = lo; k < hi; ++k) {
            const cplx c = cs[static_cast<size_t>(k - lo)], s = sn[static_cast<size_t>(k - lo)];
            for (int i = lo; i <= std::min(hi, k + 1); ++i) {
                const cplx t1 = h(i, k), t2 = h(i, k + 1);
                h(i, k) = t1 * c + t2 * s;
                h(i, k + 1) = -t1 * std::conj(s) + t2 * std::conj(c);
            }
        }
        for (int i = lo; i <= hi; ++i) h(i, i) += sigma;
    }
    out.eigenvalues.push_back(h(0, 0));
    return out;
}

bool is_positive_stable(const ComplexMatrix& m) {
    const Spectrum s = spectrum(m);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& l : s.eigenvalues) worst = std::min(worst, l.real());
    return worst > 0.0;
}

double min_eigen_distance(const Spectrum& s, cplx z0) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : s.eigenvalues) best = std::min(best, std::abs(l - z0));
    return best;
}

} // namespace kdf
