#include "kdf/series.hpp"

#include <cmath>
#include <stdexcept>

#include "kdf/errors.hpp"
#include "kdf/powers.hpp"

namespace kdf {

const MatrixList& KdFParams::role(Role r) const {
    switch (r) {
        case Role::A: return A;
        case Role::B: return B;
        case Role::C: return C;
        case Role::D: return D;
        case Role::E: return E;
        case Role::F: return F;
    }
    throw std::invalid_argument("bad role");
}

MatrixList& KdFParams::role(Role r) {
    return const_cast<MatrixList&>(static_cast<const KdFParams&>(*this).role(r));
}

void KdFParams::validate() const {
    for (Role r : {Role::A, Role::B, Role::C, Role::D, Role::E, Role::F}) {
        for (const auto& m : role(r).items) {
            if (m.dim() != dim)
                throw std::invalid_argument(std::string("KdFParams: item in list ") +
                                            role_name(r) + " has wrong dimension");
        }
    }
}

void SeriesControl::validate() const {
    if (tol < 1e-13) throw std::invalid_argument("SeriesControl: tol must be >= 1e-13");
    if (max_diagonal < 1) throw std::invalid_argument("SeriesControl: max_diagonal must be >= 1");
    if (tail_window < 1) throw std::invalid_argument("SeriesControl: tail_window must be >= 1");
}

const char* appell_name(AppellKind k) {
    switch (k) {
        case AppellKind::F1: return "F1";
        case AppellKind::F2: return "F2";
        case AppellKind::F3: return "F3";
        case AppellKind::F4: return "F4";
    }
    return "?";
}

namespace {

// Per-index bracket-product caches over one parameter list, extended lazily.
// prod(k) = (L_0)_k (L_1)_k ... in list order; identity for an empty list.
class ListProducts {
public:
    ListProducts(const MatrixList& l, int dim, bool inverted) : dim_(dim), inverted_(inverted) {
        tables_.reserve(static_cast<size_t>(l.size()));
        inv_tables_.reserve(static_cast<size_t>(l.size()));
        for (int i = 0; i < l.size(); ++i) {
            const auto& x = l.items[static_cast<size_t>(i)];
            if (inverted_) {
                inv_tables_.emplace_back(
                    x, std::string(role_name(l.label)) + "[" + std::to_string(i) + "]");
            } else {
                tables_.emplace_back(x);
            }
        }
    }

    const ComplexMatrix& prod(int k) {
        while (static_cast<int>(prods_.size()) <= k) {
            const int n = static_cast<int>(prods_.size());
            ComplexMatrix acc = ComplexMatrix::identity(dim_);
            bool zero = false;
            if (inverted_) {
                for (auto& t : inv_tables_) acc = acc * t.at(n);
            } else {
                for (auto& t : tables_) {
                    if (t.zero_at(n)) { zero = true; break; }
                    acc = acc * t.at(n);
                }
            }
            if (zero) acc = ComplexMatrix::zero(dim_);
            zero_.push_back(zero);
            prods_.push_back(std::move(acc));
        }
        return prods_[static_cast<size_t>(k)];
    }

    bool zero(int k) {
        prod(k);
        return zero_[static_cast<size_t>(k)] != 0;
    }

private:
    int dim_;
    bool inverted_;
    std::vector<PochTable> tables_;
    std::vector<InvPochTable> inv_tables_;
    std::vector<ComplexMatrix> prods_;
    std::vector<char> zero_;
};

// Scalar weights x^m / m!, extended lazily.
class PowerWeights {
public:
    explicit PowerWeights(cplx x) : x_(x) { w_.push_back(cplx{1.0, 0.0}); }
    cplx at(int m) {
        while (static_cast<int>(w_.size()) <= m) {
            const int k = static_cast<int>(w_.size());
            w_.push_back(w_.back() * x_ / static_cast<double>(k));
        }
        return w_[static_cast<size_t>(m)];
    }

private:
    cplx x_;
    std::vector<cplx> w_;
};

SeriesResult kdf_eval_core(const KdFParams& p, cplx x, cplx y, int q, const SeriesControl& ctrl) {
    ctrl.validate();
    p.validate();
    const int r = p.dim;

    ListProducts pa(p.A, r, false), pb(p.B, r, false), pc(p.C, r, false);
    ListProducts pd(p.D, r, true), pe(p.E, r, true), pf(p.F, r, true);
    PowerWeights xw(x), yw(y);

    SeriesResult res;
    res.value = ComplexMatrix::zero(r);
    TailRule tail(ctrl.tol, ctrl.tail_window);

    for (int d = 0; d <= ctrl.max_diagonal; ++d) {
        double diag_max = 0.0;
        for (int m = 0; m <= d; ++m) {
            const int n = d - m;
            if (pa.zero(d + q) || pb.zero(m) || pc.zero(n + q)) continue;
            ComplexMatrix t = pa.prod(d + q);
            t = t * pb.prod(m);
            t = t * pc.prod(n + q);
            t = t * pd.prod(d + q);
            t = t * pe.prod(m);
            t = t * pf.prod(n + q);
            t *= xw.at(m) * yw.at(n);
            res.value += t;
            ++res.terms_used;
            diag_max = std::max(diag_max, t.frobenius_norm());
        }
        tail.push(diag_max);
        if (ctrl.collect_diagnostics) res.diagonal_norms.push_back(diag_max);
        if (tail.settled(res.value.frobenius_norm())) {
            res.converged = true;
            break;
        }
    }
    res.last_tail_norm = tail.tail();
    return res;
}

} // namespace

SeriesResult kdf_eval(const KdFParams& p, cplx x, cplx y, const SeriesControl& ctrl) {
    return kdf_eval_core(p, x, y, 0, ctrl);
}

SeriesResult kdf_eval_dy(const KdFParams& p, cplx x, cplx y, int q, const SeriesControl& ctrl) {
    return kdf_eval_core(p, x, y, q, ctrl);
}

namespace {

MatrixList list_plus(const MatrixList& l, double k) {
    MatrixList out{{}, l.label};
    out.items.reserve(l.items.size());
    for (const auto& m : l.items) out.items.push_back(shifted(m, k));
    return out;
}

} // namespace

SeriesResult deriv_y(const KdFParams& p, cplx x, cplx y, int q, const SeriesControl& ctrl) {
    if (q == 0) return kdf_eval(p, x, y, ctrl);
    KdFParams sh = p;
    sh.A = list_plus(p.A, q);
    sh.C = list_plus(p.C, q);
    sh.D = list_plus(p.D, q);
    sh.F = list_plus(p.F, q);
    SeriesResult inner = kdf_eval(sh, x, y, ctrl);
    ComplexMatrix v = list_poch(p.A, q, false) * list_poch(p.C, q, false);
    v = v * inner.value;
    v = v * list_poch(p.D, q, true);
    v = v * list_poch(p.F, q, true);
    inner.value = std::move(v);
    return inner;
}

SeriesResult gauss_2f1(const ComplexMatrix& a, const ComplexMatrix& b,
                       const ComplexMatrix& c, cplx x, const SeriesControl& ctrl) {
    ctrl.validate();
    if (std::abs(x) >= 1.0)
        throw DomainViolation("gauss_2f1 requires |x| < 1 (boundary rejected)");
    const int r = a.dim();

    PochTable ta(a), tb(b);
    InvPochTable tc(c, "C");
    PowerWeights xw(x);

    SeriesResult res;
    res.value = ComplexMatrix::zero(r);
    TailRule tail(ctrl.tol, ctrl.tail_window);

    for (int n = 0; n <= ctrl.max_diagonal; ++n) {
        double tnorm = 0.0;
        if (!ta.zero_at(n) && !tb.zero_at(n)) {
            ComplexMatrix t = ta.at(n) * tb.at(n);
            t = t * tc.at(n);
            t *= xw.at(n);
            res.value += t;
            ++res.terms_used;
            tnorm = t.frobenius_norm();
        }
        tail.push(tnorm);
        if (ctrl.collect_diagnostics) res.diagonal_norms.push_back(tnorm);
        if (tail.settled(res.value.frobenius_norm())) {
            res.converged = true;
            break;
        }
    }
    res.last_tail_norm = tail.tail();
    return res;
}

SeriesResult appell(AppellKind kind, std::span<const ComplexMatrix> ms, cplx x, cplx y,
                    const SeriesControl& ctrl) {
    ctrl.validate();
    const size_t expected = (kind == AppellKind::F1)   ? 4
                            : (kind == AppellKind::F2) ? 5
                            : (kind == AppellKind::F3) ? 5
                                                       : 4;
    if (ms.size() != expected)
        throw std::invalid_argument(std::string("appell ") + appell_name(kind) + " expects " +
                                    std::to_string(expected) + " matrices");
    const double ax = std::abs(x), ay = std::abs(y);
    switch (kind) {
        case AppellKind::F1:
        case AppellKind::F3:
            if (ax >= 1.0 || ay >= 1.0)
                throw DomainViolation("F1/F3 require |x| < 1 and |y| < 1");
            break;
        case AppellKind::F2:
            if (ax + ay >= 1.0) throw DomainViolation("F2 requires |x| + |y| < 1");
            break;
        case AppellKind::F4:
            if (std::sqrt(ax) + std::sqrt(ay) >= 1.0)
                throw DomainViolation("F4 requires sqrt|x| + sqrt|y| < 1");
            break;
    }
    const int r = ms[0].dim();

    // Factor structure per kind: tables keyed m+n, m, or n, in printed order.
    struct Factor {
        enum class Coupling { MN, M, N } c;
        bool inverted;
        size_t idx;
    };
    std::vector<Factor> fs;
    using C = Factor::Coupling;
    switch (kind) {
        case AppellKind::F1:
            fs = {{C::MN, false, 0}, {C::M, false, 1}, {C::N, false, 2}, {C::MN, true, 3}};
            break;
        case AppellKind::F2:
            fs = {{C::MN, false, 0}, {C::M, false, 1}, {C::N, false, 2},
                  {C::M, true, 3},  {C::N, true, 4}};
            break;
        case AppellKind::F3:
            fs = {{C::M, false, 0}, {C::N, false, 1}, {C::M, false, 2},
                  {C::N, false, 3}, {C::MN, true, 4}};
            break;
        case AppellKind::F4:
            fs = {{C::MN, false, 0}, {C::MN, false, 1}, {C::M, true, 2}, {C::N, true, 3}};
            break;
    }
    std::vector<PochTable> direct;
    std::vector<InvPochTable> inv;
    std::vector<size_t> slot(fs.size());
    for (size_t k = 0; k < fs.size(); ++k) {
        if (fs[k].inverted) {
            slot[k] = inv.size();
            inv.emplace_back(ms[fs[k].idx], "appell parameter " + std::to_string(fs[k].idx));
        } else {
            slot[k] = direct.size();
            direct.emplace_back(ms[fs[k].idx]);
        }
    }
    PowerWeights xw(x), yw(y);

    SeriesResult res;
    res.value = ComplexMatrix::zero(r);
    TailRule tail(ctrl.tol, ctrl.tail_window);

    for (int d = 0; d <= ctrl.max_diagonal; ++d) {
        double diag_max = 0.0;
        for (int m = 0; m <= d; ++m) {
            const int n = d - m;
            ComplexMatrix t = ComplexMatrix::identity(r);
            bool zero = false;
            for (size_t k = 0; k < fs.size(); ++k) {
                const int key = fs[k].c == C::MN ? d : (fs[k].c == C::M ? m : n);
                if (fs[k].inverted) {
                    t = t * inv[slot[k]].at(key);
                } else {
                    if (direct[slot[k]].zero_at(key)) { zero = true; break; }
                    t = t * direct[slot[k]].at(key);
                }
            }
            if (zero) continue;
            t *= xw.at(m) * yw.at(n);
            res.value += t;
            ++res.terms_used;
            diag_max = std::max(diag_max, t.frobenius_norm());
        }
        tail.push(diag_max);
        if (ctrl.collect_diagnostics) res.diagonal_norms.push_back(diag_max);
        if (tail.settled(res.value.frobenius_norm())) {
            res.converged = true;
            break;
        }
    }
    res.last_tail_norm = tail.tail();
    return res;
}

ComplexMatrix one_f0(const ComplexMatrix& a, cplx t) {
    const cplx base = cplx{1.0, 0.0} - t;
    if (base.imag() == 0.0 && base.real() <= 0.0)
        throw BranchCut("one_f0: 1 - t on the closed negative real axis");
    return scalar_power(base, a * cplx{-1.0, 0.0});
}

} // namespace kdf
