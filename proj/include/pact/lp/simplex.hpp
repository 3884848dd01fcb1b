#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace pact::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Bound {
    double lower{0.0};
    double upper{kInfinity};
};

// minimize objective . x
//   s.t. a_eq x  = b_eq
//        a_ub x <= b_ub
//        bounds[j].lower <= x_j <= bounds[j].upper
// An empty `bounds` means x >= 0 for every variable.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    std::vector<Bound> bounds;

    std::size_t variable_count() const noexcept { return objective.size(); }

    void add_equality(std::vector<double> row, double rhs);
    void add_upper(std::vector<double> row, double rhs);

    // Throws std::invalid_argument on mismatched column counts or bad bounds.
    void validate() const;
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string to_string(Status status);

struct LpSolution {
    Status status{Status::kNumericalFailure};
    std::vector<double> x;  // populated iff status == kOptimal
    double objective_value{0.0};

    bool optimal() const noexcept { return status == Status::kOptimal; }
};

// Feasibility tolerance used to certify returned optima.
inline constexpr double kFeasibilityTolerance = 1e-7;

// Dense two-phase primal simplex. Deterministic; any optimal vertex may be
// returned for degenerate problems. A solution that fails the final
// feasibility check is reported as kNumericalFailure.
LpSolution solve_lp(const LinearProgram& program);

// Largest absolute constraint/bound violation of x.
double max_violation(const LinearProgram& program, const std::vector<double>& x);

}  // namespace pact::lp
