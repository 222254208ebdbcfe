#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kdf/generator.hpp"
#include "kdf/params.hpp"
#include "kdf/series.hpp"

namespace kdf {

/// The verified identity registry.
///
/// R1/R2    upward/downward recursion in one A-parameter via x- and
///          y-correction sums of contiguous evaluations
/// R3/R4    the same A-shifts as a single multinomial double sum
/// R5/R6    upward/downward recursion in one B-parameter (x-corrections only)
/// R7/R8    the same B-shifts as a binomial single sum
/// R9/R10   C-parameter images of R5/R7 under the B<->C, E<->F, x<->y swap
/// R11      downward recursion in one D-parameter with telescoping
///          (D_i-kI)^{-1}(D_i-(k-1)I)^{-1} factor chains
/// R12      downward recursion in one E-parameter (same telescoping form),
///          plus its F-image under the swap when the shape has one
/// R13/R14  the single-step (s = 1) contiguous relations behind R1/R2
/// S0       q-th y-derivative: closed form (shifted parameters with
///          [A]_q [C]_q ... [D]_q^{-1} [F]_q^{-1} prefactors) against direct
///          term-wise differentiation of the series
/// S1       Leibniz-type finite sum lifting one C-parameter by pI
/// S2       finite sum lowering one F-parameter by pI, with (F_i-pI)_k^{-1}
/// S3/S4    alternating finite sums moving one F-parameter down/up, against
///          prefactored fully shifted evaluations
/// I1/I2    infinite t-sums over a lifted A-/B-parameter against
///          (1-t)^{-X_i}-prefactored evaluations at scaled arguments
/// I3       Taylor shift x -> x+t as an infinite sum of shifted evaluations
/// I4/I5    terminating-numerator ((-kI)_m) infinite sums against
///          (1+t)^{-B_i} / ((1-x)/(1+t))^{B_i} prefactored evaluations
enum class IdentityId : int {
    R1, R2, R3, R4, R5, R6, R7, R8, R9, R10, R11, R12, R13, R14,
    S0, S1, S2, S3, S4,
    I1, I2, I3, I4, I5,
};

enum class KnobKind { None, Shift, Order, Scalar }; // s / p,q / t

struct IdentityInfo {
    IdentityId id;
    const char* name;
    const char* summary;
    KnobKind knob;
    Role target;                  // role carrying the index knob (valid iff has_index)
    bool has_index;
    std::array<int, 6> min_shape; // minimal list lengths the identity needs
};

const std::vector<IdentityInfo>& registry();
const IdentityInfo& info(IdentityId id);
std::optional<IdentityId> parse_identity(const std::string& name);
std::vector<IdentityId> all_identities();

struct IdentityInstance {
    IdentityId id = IdentityId::R1;
    KdFParams params;
    cplx x{}, y{};
    int index = 0; // i: which list item the identity acts on
    int shift = 0; // s / p / q, depending on the identity
    cplx t{};      // scalar knob of the infinite sums
    SeriesControl ctrl;
    double tolerance = 1e-7; // pass threshold on rel_residual
    uint64_t seed = 0;       // provenance, echoed into reports
};

struct IdentityReport {
    IdentityId id = IdentityId::R1;
    uint64_t seed = 0;
    int dim = 0;
    int index = 0;
    int shift = 0;
    cplx t{};
    ComplexMatrix lhs, rhs;
    double abs_residual = 0.0; // ||lhs - rhs||_F
    double rel_residual = 0.0; // abs / (1 + max side norm)
    bool pass = false;
    bool finding = false; // residual reproducible and stable under tol reduction
    long lhs_terms = 0, rhs_terms = 0;
};

/// B <-> C, E <-> F, x <-> y. Applying it twice restores the input exactly.
std::pair<KdFParams, std::pair<cplx, cplx>> swap_involution(const KdFParams& p, cplx x, cplx y);

/// Hypothesis pre-check for an instance: family-wide pairwise commutation,
/// positive stability, and the identity's shift-invertibility clauses.
/// Throws HypothesisViolation naming the first failed clause. Runs before
/// any series term is summed.
void require_hypotheses(const IdentityInstance& inst);

/// Residual checks. Both sides are evaluated through kdf_eval (the only
/// exceptions: the (1-t)^{-X} closed-form prefactors of I1/I2/I4/I5 and
/// S0's direct-differentiation route). Throw HypothesisViolation,
/// SingularShift, NotConverged, BranchCut as applicable.
IdentityReport check_recursion(const IdentityInstance& inst);    // R1..R14
IdentityReport check_finite_sum(const IdentityInstance& inst);   // S0..S4
IdentityReport check_infinite_sum(const IdentityInstance& inst); // I1..I5

/// Dispatches on the id group; on an R11 failure, reruns at reduced series
/// tolerance and marks the report `finding` when the residual is stable
/// (i.e. genuinely not a truncation artifact).
IdentityReport check_identity(const IdentityInstance& inst);

struct InstanceOptions {
    std::vector<int> dims{1, 2, 3};
    SeriesControl ctrl;
    double tolerance = 1e-7;
    int max_knob = 3; // s, p, q sampled from 0..max_knob
};

/// Deterministic instance synthesis: shape, commuting family, point, and
/// knobs are all derived from `seed` alone (given fixed options).
IdentityInstance make_instance(IdentityId id, uint64_t seed, const InstanceOptions& opts);

} // namespace kdf
