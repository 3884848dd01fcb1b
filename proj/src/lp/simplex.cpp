#include "pact/lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pact::lp {

void LinearProgram::add_equality(std::vector<double> row, double rhs) {
    a_eq.push_back(std::move(row));
    b_eq.push_back(rhs);
}

void LinearProgram::add_upper(std::vector<double> row, double rhs) {
    a_ub.push_back(std::move(row));
    b_ub.push_back(rhs);
}

void LinearProgram::validate() const {
    const std::size_t n = objective.size();
    if (n == 0) throw std::invalid_argument("lp: objective has no variables");
    if (a_eq.size() != b_eq.size()) throw std::invalid_argument("lp: a_eq/b_eq row mismatch");
    if (a_ub.size() != b_ub.size()) throw std::invalid_argument("lp: a_ub/b_ub row mismatch");
    for (const auto& row : a_eq)
        if (row.size() != n) throw std::invalid_argument("lp: a_eq column count mismatch");
    for (const auto& row : a_ub)
        if (row.size() != n) throw std::invalid_argument("lp: a_ub column count mismatch");
    if (!bounds.empty() && bounds.size() != n)
        throw std::invalid_argument("lp: bounds count mismatch");
    for (const auto& b : bounds)
        if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper ||
            b.lower == kInfinity || b.upper == -kInfinity)
            throw std::invalid_argument("lp: invalid variable bound");
}

std::string to_string(Status status) {
    switch (status) {
        case Status::kOptimal: return "optimal";
        case Status::kInfeasible: return "infeasible";
        case Status::kUnbounded: return "unbounded";
        case Status::kNumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

double max_violation(const LinearProgram& program, const std::vector<double>& x) {
    double worst = 0.0;
    auto row_value = [&](const std::vector<double>& row) {
        double v = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) v += row[j] * x[j];
        return v;
    };
    for (std::size_t i = 0; i < program.a_eq.size(); ++i)
        worst = std::max(worst, std::abs(row_value(program.a_eq[i]) - program.b_eq[i]));
    for (std::size_t i = 0; i < program.a_ub.size(); ++i)
        worst = std::max(worst, row_value(program.a_ub[i]) - program.b_ub[i]);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const Bound b = program.bounds.empty() ? Bound{} : program.bounds[j];
        worst = std::max({worst, b.lower - x[j], x[j] - b.upper});
    }
    return worst;
}

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-11;

// x_j = offset + sum over (column, coefficient) of the nonnegative tableau vars.
struct VariableMap {
    double offset{0.0};
    std::vector<std::pair<std::size_t, double>> terms;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    double rhs(std::size_t i) const { return at(i, cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c) {
        const double inv = 1.0 / at(r, c);
        for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            const double factor = at(i, c);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= factor * at(r, j);
            at(i, c) = 0.0;
        }
        basis_[r] = c;
    }

    void drop_row(std::size_t r) {
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

// Minimizes cost . y over the current tableau restricted to `eligible` columns.
PhaseResult run_phase(Tableau& t, const std::vector<double>& cost, const std::vector<bool>& eligible) {
    const std::size_t max_iterations = 50 * (t.rows() + t.cols()) + 1000;
    std::size_t degenerate_streak = 0;
    std::vector<double> reduced(t.cols());

    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            double d = cost[j];
            for (std::size_t i = 0; i < t.rows(); ++i) d -= cost[t.basis()[i]] * t.at(i, j);
            reduced[j] = d;
        }
        // Dantzig's rule, falling back to Bland's rule on long degenerate runs.
        const bool bland = degenerate_streak > 20;
        std::size_t entering = t.cols();
        double most_negative = -kCostEps;
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (!eligible[j] || reduced[j] >= -kCostEps) continue;
            if (bland) {
                entering = j;
                break;
            }
            if (reduced[j] < most_negative) {
                most_negative = reduced[j];
                entering = j;
            }
        }
        if (entering == t.cols()) return PhaseResult::kOptimal;

        std::size_t leaving = t.rows();
        double best_ratio = kInfinity;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, entering);
            if (a <= kPivotEps) continue;
            const double ratio = std::max(t.rhs(i), 0.0) / a;
            if (ratio < best_ratio - 1e-15 ||
                (ratio <= best_ratio + 1e-15 && leaving < t.rows() &&
                 t.basis()[i] < t.basis()[leaving])) {
                best_ratio = ratio;
                leaving = i;
            }
        }
        if (leaving == t.rows()) return PhaseResult::kUnbounded;
        degenerate_streak = best_ratio <= 1e-15 ? degenerate_streak + 1 : 0;
        t.pivot(leaving, entering);
    }
    return PhaseResult::kIterationLimit;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& program) {
    program.validate();
    const std::size_t n = program.variable_count();

    // Map each original variable onto nonnegative tableau columns.
    std::vector<VariableMap> maps(n);
    std::size_t y_count = 0;
    std::vector<std::pair<std::size_t, double>> column_caps;  // y_col <= cap
    for (std::size_t j = 0; j < n; ++j) {
        const Bound b = program.bounds.empty() ? Bound{} : program.bounds[j];
        const bool lo_finite = std::isfinite(b.lower);
        const bool hi_finite = std::isfinite(b.upper);
        if (lo_finite) {
            maps[j].offset = b.lower;
            maps[j].terms.push_back({y_count, 1.0});
            if (hi_finite) column_caps.push_back({y_count, b.upper - b.lower});
            ++y_count;
        } else if (hi_finite) {
            maps[j].offset = b.upper;
            maps[j].terms.push_back({y_count++, -1.0});
        } else {
            maps[j].terms.push_back({y_count++, 1.0});
            maps[j].terms.push_back({y_count++, -1.0});
        }
    }

    struct Row {
        std::vector<double> coef;  // over y columns
        double rhs;
        bool equality;
    };
    std::vector<Row> rows;
    auto add_row = [&](const std::vector<double>& a, double b, bool equality) {
        Row row{std::vector<double>(y_count, 0.0), b, equality};
        for (std::size_t j = 0; j < n; ++j) {
            if (a[j] == 0.0) continue;
            row.rhs -= a[j] * maps[j].offset;
            for (auto [col, sign] : maps[j].terms) row.coef[col] += a[j] * sign;
        }
        rows.push_back(std::move(row));
    };
    for (std::size_t i = 0; i < program.a_eq.size(); ++i) add_row(program.a_eq[i], program.b_eq[i], true);
    for (std::size_t i = 0; i < program.a_ub.size(); ++i) add_row(program.a_ub[i], program.b_ub[i], false);
    for (auto [col, cap] : column_caps) {
        Row row{std::vector<double>(y_count, 0.0), cap, false};
        row.coef[col] = 1.0;
        rows.push_back(std::move(row));
    }

    std::size_t slack_count = 0;
    for (const auto& r : rows) slack_count += r.equality ? 0 : 1;
    std::size_t art_count = 0;
    for (const auto& r : rows) art_count += (r.equality || r.rhs < 0.0) ? 1 : 0;

    const std::size_t m = rows.size();
    const std::size_t total_cols = y_count + slack_count + art_count;
    Tableau t(m, total_cols);
    std::size_t slack_col = y_count;
    std::size_t art_col = y_count + slack_count;
    double rhs_scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Row& r = rows[i];
        const double sign = r.rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < y_count; ++j) t.at(i, j) = sign * r.coef[j];
        t.rhs(i) = sign * r.rhs;
        rhs_scale = std::max(rhs_scale, std::abs(r.rhs));
        std::size_t basic = total_cols;
        if (!r.equality) {
            t.at(i, slack_col) = sign;
            if (sign > 0.0) basic = slack_col;
            ++slack_col;
        }
        if (basic == total_cols) {
            t.at(i, art_col) = 1.0;
            basic = art_col++;
        }
        t.basis()[i] = basic;
    }

    const std::size_t first_art = y_count + slack_count;
    std::vector<bool> eligible(total_cols, true);

    if (art_count > 0) {
        std::vector<double> phase1(total_cols, 0.0);
        for (std::size_t j = first_art; j < total_cols; ++j) phase1[j] = 1.0;
        const PhaseResult r1 = run_phase(t, phase1, eligible);
        if (r1 == PhaseResult::kIterationLimit) return {Status::kNumericalFailure, {}, 0.0};
        double infeasibility = 0.0;
        for (std::size_t i = 0; i < t.rows(); ++i)
            if (t.basis()[i] >= first_art) infeasibility += t.rhs(i);
        if (infeasibility > 1e-9 * rhs_scale) return {Status::kInfeasible, {}, 0.0};

        // Drive remaining (zero-valued) artificials out of the basis.
        for (std::size_t i = 0; i < t.rows();) {
            if (t.basis()[i] < first_art) {
                ++i;
                continue;
            }
            std::size_t col = first_art;
            double best = kPivotEps;
            for (std::size_t j = 0; j < first_art; ++j) {
                if (std::abs(t.at(i, j)) > best) {
                    best = std::abs(t.at(i, j));
                    col = j;
                }
            }
            if (col == first_art) {
                t.drop_row(i);  // redundant constraint
            } else {
                t.pivot(i, col);
                ++i;
            }
        }
        for (std::size_t j = first_art; j < total_cols; ++j) eligible[j] = false;
    }

    std::vector<double> phase2(total_cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (auto [col, sign] : maps[j].terms) phase2[col] += program.objective[j] * sign;
    }
    const PhaseResult r2 = run_phase(t, phase2, eligible);
    if (r2 == PhaseResult::kIterationLimit) return {Status::kNumericalFailure, {}, 0.0};
    if (r2 == PhaseResult::kUnbounded) return {Status::kUnbounded, {}, 0.0};

    std::vector<double> y(total_cols, 0.0);
    for (std::size_t i = 0; i < t.rows(); ++i) y[t.basis()[i]] = std::max(t.rhs(i), 0.0);

    LpSolution solution{Status::kOptimal, std::vector<double>(n, 0.0), 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        double v = maps[j].offset;
        for (auto [col, sign] : maps[j].terms) v += sign * y[col];
        const Bound b = program.bounds.empty() ? Bound{} : program.bounds[j];
        if (v < b.lower && v > b.lower - 1e-9) v = b.lower;
        if (v > b.upper && v < b.upper + 1e-9) v = b.upper;
        solution.x[j] = v;
    }
    for (std::size_t j = 0; j < n; ++j) solution.objective_value += program.objective[j] * solution.x[j];

    if (max_violation(program, solution.x) > kFeasibilityTolerance)
        return {Status::kNumericalFailure, {}, 0.0};
    return solution;
}

}  // namespace pact::lp
