#include "kdf/generator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kdf/errors.hpp"
#include "kdf/spectrum.hpp"

namespace kdf {

double GenSpec::offset_for(Role role, int index) const {
    double off = 0.0;
    for (const auto& [r, i, v] : re_offsets)
        if (r == role && i == index) off += v;
    return off;
}

const ValidationClause* ValidationReport::first_failure() const {
    for (const auto& c : clauses)
        if (!c.pass) return &c;
    return nullptr;
}

namespace {

cplx sample_eigenvalue(CounterRng& rng, const GenSpec& spec) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        const cplx lambda{rng.uniform(spec.re_lo, spec.re_hi),
                          rng.uniform(-spec.im_max, spec.im_max)};
        // Distance to the integer lattice on the real axis is attained at the
        // nearest integer to Re(lambda).
        const double nearest = std::round(lambda.real());
        if (std::abs(lambda - cplx{nearest, 0.0}) >= spec.integer_margin) return lambda;
    }
    throw GenerationFailure("eigenvalue sampling kept hitting the integer margin");
}

ComplexMatrix sample_basis(CounterRng& rng, const GenSpec& spec, ComplexMatrix& inv_out) {
    if (spec.r == 1) {
        inv_out = ComplexMatrix::identity(1);
        return ComplexMatrix::identity(1);
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        ComplexMatrix p(spec.r);
        for (auto& v : p.entries()) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        ComplexMatrix pinv;
        try {
            pinv = inverse(p);
        } catch (const SingularMatrix&) {
            continue;
        }
        if (p.frobenius_norm() * pinv.frobenius_norm() <= spec.condition_cap) {
            inv_out = std::move(pinv);
            return p;
        }
    }
    throw GenerationFailure("no basis within the condition cap after 100 attempts");
}

} // namespace

CommutingFamily gen_family(const GenSpec& spec) {
    if (spec.r < 1) throw std::invalid_argument("GenSpec: r must be >= 1");
    CounterRng rng(derive_seed(spec.seed, {0xFA31ull}));

    CommutingFamily fam;
    fam.basis = sample_basis(rng, spec, fam.basis_inv);
    fam.params.dim = spec.r;

    const Role roles[6] = {Role::A, Role::B, Role::C, Role::D, Role::E, Role::F};
    for (int j = 0; j < 6; ++j) {
        MatrixList list{{}, roles[j]};
        for (int i = 0; i < spec.shape[static_cast<size_t>(j)]; ++i) {
            std::vector<cplx> diag(static_cast<size_t>(spec.r));
            const double off = spec.offset_for(roles[j], i);
            for (auto& v : diag) v = sample_eigenvalue(rng, spec) + off;
            fam.eigenvalues[static_cast<size_t>(j)].push_back(diag);
            list.items.push_back(fam.basis * ComplexMatrix::diagonal(diag) * fam.basis_inv);
        }
        fam.params.role(roles[j]) = std::move(list);
    }
    return fam;
}

ValidationReport validate(const KdFParams& params, const HypothesisSet& needed) {
    ValidationReport rep;
    auto add = [&](std::string name, bool pass, double defect) {
        rep.clauses.push_back({std::move(name), pass, defect});
        rep.all_pass = rep.all_pass && pass;
    };
    auto member_name = [](Role role, int i) {
        return std::string(role_name(role)) + "[" + std::to_string(i) + "]";
    };

    const Role roles[6] = {Role::A, Role::B, Role::C, Role::D, Role::E, Role::F};

    if (needed.pairwise_commutation) {
        struct Member { Role role; int idx; const ComplexMatrix* m; };
        std::vector<Member> all;
        for (Role role : roles) {
            const auto& l = params.role(role);
            for (int i = 0; i < l.size(); ++i)
                all.push_back({role, i, &l.items[static_cast<size_t>(i)]});
        }
        for (size_t a = 0; a < all.size(); ++a) {
            for (size_t b = a + 1; b < all.size(); ++b) {
                const auto& X = *all[a].m;
                const auto& Y = *all[b].m;
                const double defect = (X * Y - Y * X).frobenius_norm();
                const double scale = std::max(X.frobenius_norm() * Y.frobenius_norm(), 1e-300);
                const double rel = defect / scale;
                add("commute: " + member_name(all[a].role, all[a].idx) + "*" +
                        member_name(all[b].role, all[b].idx),
                    rel <= 1e-10, rel);
            }
        }
    }

    if (needed.positive_stability) {
        for (Role role : roles) {
            const auto& l = params.role(role);
            for (int i = 0; i < l.size(); ++i) {
                const Spectrum s = spectrum(l.items[static_cast<size_t>(i)]);
                double min_re = std::numeric_limits<double>::infinity();
                for (const auto& ev : s.eigenvalues) min_re = std::min(min_re, ev.real());
                add("positive_stable: " + member_name(role, i), min_re > 0.0, -min_re);
            }
        }
    }

    if (needed.upward_shift_span > 0) {
        for (Role role : {Role::D, Role::E, Role::F}) {
            const auto& l = params.role(role);
            for (int i = 0; i < l.size(); ++i) {
                const Spectrum s = spectrum(l.items[static_cast<size_t>(i)]);
                bool ok = true;
                int bad_k = 0;
                double worst = std::numeric_limits<double>::infinity();
                for (int k = 0; k <= needed.upward_shift_span; ++k) {
                    const double dist = min_eigen_distance(s, cplx{-static_cast<double>(k), 0.0});
                    if (dist < worst) worst = dist;
                    if (dist < 1e-8 && ok) { ok = false; bad_k = k; }
                }
                add("invertible: " + member_name(role, i) +
                        (ok ? "+kI (k<=" + std::to_string(needed.upward_shift_span) + ")"
                            : "+" + std::to_string(bad_k) + "I"),
                    ok, worst);
            }
        }
    }

    for (const auto& [role, i, off] : needed.offset_invertibility) {
        const auto& l = params.role(role);
        if (i < 0 || i >= l.size()) {
            add("invertible: " + member_name(role, i) + " (missing item)", false, 0.0);
            continue;
        }
        const Spectrum s = spectrum(l.items[static_cast<size_t>(i)]);
        const double dist = min_eigen_distance(s, cplx{-off, 0.0});
        const int off_int = static_cast<int>(std::lround(off));
        add("invertible: " + member_name(role, i) +
                (off_int >= 0 ? "+" : "") + std::to_string(off_int) + "I",
            dist >= 1e-8, dist);
    }

    return rep;
}

std::pair<cplx, cplx> gen_point(CounterRng& rng, PointRegion region) {
    switch (region) {
        case PointRegion::KdfSafe: {
            const double rho = 0.45 * rng.uniform();
            const double f = rng.uniform();
            return {rho * f * rng.unit_phase(), rho * (1.0 - f) * rng.unit_phase()};
        }
        case PointRegion::AppellF1:
        case PointRegion::AppellF3:
            return {0.6 * rng.uniform() * rng.unit_phase(),
                    0.6 * rng.uniform() * rng.unit_phase()};
        case PointRegion::AppellF2: {
            const double rho = 0.6 * rng.uniform();
            const double f = rng.uniform();
            return {rho * f * rng.unit_phase(), rho * (1.0 - f) * rng.unit_phase()};
        }
        case PointRegion::AppellF4: {
            const double sigma = 0.9 * rng.uniform();
            const double f = rng.uniform();
            const double sx = sigma * f, sy = sigma * (1.0 - f);
            return {sx * sx * rng.unit_phase(), sy * sy * rng.unit_phase()};
        }
        case PointRegion::UnitDisc:
            return {0.6 * rng.uniform() * rng.unit_phase(), cplx{}};
        case PointRegion::TKnob:
            return {0.25 * rng.uniform() * rng.unit_phase(), cplx{}};
    }
    throw std::invalid_argument("bad point region");
}

} // namespace kdf
