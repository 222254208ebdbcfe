#pragma once

#include <stdexcept>
#include <string>

namespace kdf {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Pivot below threshold while inverting; the matrix is singular for our purposes.
class SingularMatrix : public Error {
public:
    explicit SingularMatrix(const std::string& msg) : Error(msg) {}
};

// A shifted factorial needed (X + kI)^{-1} and hit a singular shift.
// Identifies the first offending k (and, when known, the list item).
class SingularShift : public Error {
public:
    SingularShift(int k, const std::string& what_matrix)
        : Error("singular shift at k=" + std::to_string(k) + " for " + what_matrix),
          shift(k), matrix_name(what_matrix) {}
    int shift;
    std::string matrix_name;
};

// Eigenvalue iteration ran out of budget.
class ConvergenceFailure : public Error {
public:
    explicit ConvergenceFailure(const std::string& msg) : Error(msg) {}
};

// Scalar base of a matrix power on the closed negative real axis.
class BranchCut : public Error {
public:
    explicit BranchCut(const std::string& msg) : Error(msg) {}
};

// A series hit its diagonal cap with the tail still above tolerance.
class NotConverged : public Error {
public:
    NotConverged(const std::string& msg, double tail) : Error(msg), last_tail_norm(tail) {}
    double last_tail_norm;
};

// Evaluation point outside the series' convergence region.
class DomainViolation : public Error {
public:
    explicit DomainViolation(const std::string& msg) : Error(msg) {}
};

// An identity's precondition failed; `clause` names the violated hypothesis,
// e.g. "commute: B[0]*C[1]" or "invertible: E[0]+1I".
class HypothesisViolation : public Error {
public:
    explicit HypothesisViolation(const std::string& violated_clause)
        : Error("hypothesis violated: " + violated_clause), clause(violated_clause) {}
    std::string clause;
};

// Random family synthesis exhausted its resampling attempts.
class GenerationFailure : public Error {
public:
    explicit GenerationFailure(const std::string& msg) : Error(msg) {}
};

} // namespace kdf
