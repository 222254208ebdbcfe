#include "kdf/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "kdf/errors.hpp"

namespace kdf {

ComplexMatrix::ComplexMatrix(int dim, std::vector<cplx> entries)
    : dim_(dim), a_(std::move(entries)) {
    if (a_.size() != static_cast<size_t>(dim) * dim)
        throw std::invalid_argument("ComplexMatrix: entries length must be dim^2");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    dim_ = static_cast<int>(rows.size());
    a_.reserve(static_cast<size_t>(dim_) * dim_);
    for (const auto& row : rows) {
        if (row.size() != static_cast<size_t>(dim_))
            throw std::invalid_argument("ComplexMatrix: ragged initializer");
        a_.insert(a_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx>& d) {
    ComplexMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m(i, i) = d[static_cast<size_t>(i)];
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

ComplexMatrix& ComplexMatrix::add_scaled_identity(cplx s) {
    for (int i = 0; i < dim_; ++i) (*this)(i, i) += s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int r = a.dim_;
    ComplexMatrix c(r);
    for (int i = 0; i < r; ++i) {
        for (int k = 0; k < r; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < r; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::one_norm() const {
    double best = 0.0;
    for (int j = 0; j < dim_; ++j) {
        double col = 0.0;
        for (int i = 0; i < dim_; ++i) col += std::abs((*this)(i, j));
        best = std::max(best, col);
    }
    return best;
}

double ComplexMatrix::max_abs() const {
    double best = 0.0;
    for (const auto& v : a_) best = std::max(best, std::abs(v));
    return best;
}

bool ComplexMatrix::is_zero() const {
    for (const auto& v : a_)
        if (v != cplx{}) return false;
    return true;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ComplexMatrix inverse(const ComplexMatrix& m) {
    const int r = m.dim();
    const double pivot_floor = 1e-12 * m.frobenius_norm();
    // Gauss-Jordan on [M | I] with partial pivoting.
    ComplexMatrix a = m;
    ComplexMatrix inv = ComplexMatrix::identity(r);
    for (int col = 0; col < r; ++col) {
        int piv = col;
        double best = std::abs(a(col, col));
        for (int i = col + 1; i < r; ++i) {
            const double v = std::abs(a(i, col));
            if (v > best) { best = v; piv = i; }
        }
        if (best < pivot_floor || best == 0.0)
            throw SingularMatrix("pivot " + std::to_string(best) + " below threshold at column " +
                                 std::to_string(col));
        if (piv != col) {
            for (int j = 0; j < r; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const cplx d = a(col, col);
        for (int j = 0; j < r; ++j) { a(col, j) /= d; inv(col, j) /= d; }
        for (int i = 0; i < r; ++i) {
            if (i == col) continue;
            const cplx f = a(i, col);
            if (f == cplx{}) continue;
            for (int j = 0; j < r; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

double relative_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).frobenius_norm() /
           (1.0 + std::max(a.frobenius_norm(), b.frobenius_norm()));
}

} // namespace kdf
