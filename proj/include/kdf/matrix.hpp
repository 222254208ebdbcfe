#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace kdf {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major, dimension r (intended r <= ~8).
/// Values are immutable in spirit: every operation returns a fresh matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}
    ComplexMatrix(int dim, std::vector<cplx> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(int dim);
    static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }
    static ComplexMatrix diagonal(const std::vector<cplx>& d);

    int dim() const { return dim_; }
    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const std::vector<cplx>& entries() const { return a_; }
    std::vector<cplx>& entries() { return a_; }

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);
    /// Adds s on the diagonal; realizes X + sI.
    ComplexMatrix& add_scaled_identity(cplx s);

    double frobenius_norm() const;
    double one_norm() const;      // max column sum
    double max_abs() const;
    bool is_zero() const;         // exact zero, every entry
    bool all_finite() const;

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
        return a.dim_ == b.dim_ && a.a_ == b.a_;
    }

private:
    int dim_ = 0;
    std::vector<cplx> a_;
};

/// X + sI as a value.
inline ComplexMatrix shifted(ComplexMatrix m, cplx s) {
    m.add_scaled_identity(s);
    return m;
}

/// Partial-pivot Gauss-Jordan inverse. Throws SingularMatrix when a pivot
/// falls below 1e-12 * ||M||_F.
ComplexMatrix inverse(const ComplexMatrix& m);

/// Distance between two matrices relative to 1 + max norm; the residual
/// metric used throughout the identity checks.
double relative_distance(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace kdf
