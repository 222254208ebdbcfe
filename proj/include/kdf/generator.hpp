#pragma once

#include <array>
#include <string>
#include <tuple>
#include <vector>

#include "kdf/params.hpp"
#include "kdf/rng.hpp"

namespace kdf {

/// Recipe for a simultaneously diagonalized matrix family satisfying the
/// standing hypotheses: commutation (exact by shared eigenbasis), positive
/// stability (eigenvalue box in the right half-plane), and invertibility of
/// every integer shift (eigenvalues kept away from all integers).
struct GenSpec {
    int r = 2;
    std::array<int, 6> shape{1, 1, 1, 1, 1, 1}; // m1, n1, n1', m2, n2, n2'
    double re_lo = 0.6, re_hi = 2.5;            // eigenvalue box, Re
    double im_max = 0.5;                        //                 |Im|
    double integer_margin = 0.1;                // min |lambda - n| over integers n
    double condition_cap = 20.0;                // Frobenius condition bound on the basis
    uint64_t seed = 0;
    /// Integer offsets added to a member's sampled eigenvalues (role, index,
    /// offset). Downward-shift identity instances move their target member
    /// right by the shift so X_i - kI stays invertible and well conditioned.
    std::vector<std::tuple<Role, int, double>> re_offsets;

    double offset_for(Role role, int index) const;
};

struct CommutingFamily {
    ComplexMatrix basis;     // P
    ComplexMatrix basis_inv; // P^{-1}
    KdFParams params;        // members, each P diag(lambda) P^{-1}
    std::array<std::vector<std::vector<cplx>>, 6> eigenvalues; // generating diagonals
};

/// Deterministic in spec.seed (bitwise). Throws GenerationFailure after 100
/// rejected basis samples.
CommutingFamily gen_family(const GenSpec& spec);

struct ValidationClause {
    std::string name; // e.g. "commute: B[0]*C[1]" or "invertible: E[0]+1I"
    bool pass = true;
    double defect = 0.0;
};

struct ValidationReport {
    std::vector<ValidationClause> clauses;
    bool all_pass = true;
    const ValidationClause* first_failure() const;
};

/// Hypotheses a theorem instance needs of its parameter family.
struct HypothesisSet {
    bool pairwise_commutation = true; // all members of all lists, all pairs
    bool positive_stability = true;   // every member
    int upward_shift_span = 40;       // D,E,F members: X + kI invertible, 0 <= k <= span
    /// Extra invertibility clauses: X_{role}[index] + offset*I must be invertible.
    std::vector<std::tuple<Role, int, double>> offset_invertibility;
};

/// Per-clause report; never throws on failed clauses. Commutation defect is
/// measured relative to ||X||_F ||Y||_F with pass threshold 1e-10.
ValidationReport validate(const KdFParams& params, const HypothesisSet& needed);

enum class PointRegion {
    KdfSafe,  // |x| + |y| <= 0.45
    AppellF1, // |x|, |y| <= 0.6
    AppellF2, // |x| + |y| <= 0.6
    AppellF3, // |x|, |y| <= 0.6
    AppellF4, // sqrt|x| + sqrt|y| <= 0.9
    UnitDisc, // |x| <= 0.6, y = 0
    TKnob     // |t| <= 0.25, returned in first slot
};

/// Deterministic in the rng stream; strictly interior to the region.
std::pair<cplx, cplx> gen_point(CounterRng& rng, PointRegion region);

} // namespace kdf
