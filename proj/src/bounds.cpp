#include "stosub/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "stosub/errors.hpp"
#include "stosub/policies.hpp"

namespace stosub {

namespace {

// Checks and clamps a marginal vector into [0,1]^n.
FractionalPoint clamp_marginals(const Instance& inst, const FractionalPoint& y) {
    if (static_cast<int>(y.size()) != inst.num_elements()) {
        throw InvalidInputError("marginal vector size does not match ground set size");
    }
    FractionalPoint clamped(y);
    for (double& v : clamped) {
        if (v < -1e-9 || v > 1.0 + 1e-9) {
            throw InvalidInputError("marginal coordinate " + std::to_string(v) +
                                    " outside [0, 1]");
        }
        v = std::clamp(v, 0.0, 1.0);
    }
    return clamped;
}

std::uint64_t checked_scenario_count(const Instance& inst, const EnumerationCaps& caps) {
    const std::uint64_t space = inst.realization_space_size();
    if (!inst.realization_space_fits() || space > caps.max_lp_scenarios) {
        throw CapExceededError("scenario space of " + std::to_string(space) +
                               " exceeds the LP cap of " + std::to_string(caps.max_lp_scenarios));
    }
    return space;
}

// f(s) for every scenario code, walked in code order with an odometer.
std::vector<double> all_scenario_values(const Instance& inst, std::uint64_t space) {
    const int n = inst.num_elements();
    std::vector<int> view(static_cast<std::size_t>(n), -1);
    std::vector<double> values;
    values.reserve(space);
    for (std::uint64_t code = 0;; ++code) {
        values.push_back(detail::eval_f_dense(inst, view));
        if (code + 1 == space) break;
        for (int i = 0; i < n; ++i) {
            int& digit = view[static_cast<std::size_t>(i)];
            if (digit + 2 <= inst.support_size(i)) {
                ++digit;
                break;
            }
            digit = -1;
        }
    }
    return values;
}

struct MarginalRowIndex {
    // Row of the (element, outcome) marginal constraint, or -1.
    std::vector<std::vector<int>> row_of;
    int num_rows = 0;
};

MarginalRowIndex index_marginal_rows(const Instance& inst, int first_row) {
    MarginalRowIndex index;
    index.row_of.resize(static_cast<std::size_t>(inst.num_elements()));
    int next = first_row;
    for (ElementId i = 0; i < inst.num_elements(); ++i) {
        index.row_of[static_cast<std::size_t>(i)].resize(
            static_cast<std::size_t>(inst.support_size(i)));
        for (int x = 0; x < inst.support_size(i); ++x) {
            index.row_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)] = next++;
        }
    }
    index.num_rows = next - first_row;
    return index;
}

// Fills the alpha-column entries: normalization row plus one marginal row
// per present digit of each scenario.
void fill_alpha_columns(const Instance& inst, std::uint64_t space, LpProblem& problem,
                        int normalization_row, const MarginalRowIndex& marginals) {
    const int n = inst.num_elements();
    std::vector<int> digits(static_cast<std::size_t>(n), -1);
    for (std::uint64_t code = 0;; ++code) {
        const std::size_t col = static_cast<std::size_t>(code);
        problem.rows[static_cast<std::size_t>(normalization_row)][col] = 1.0;
        for (int i = 0; i < n; ++i) {
            const int digit = digits[static_cast<std::size_t>(i)];
            if (digit >= 0) {
                const int row =
                    marginals.row_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(digit)];
                problem.rows[static_cast<std::size_t>(row)][col] = 1.0;
            }
        }
        if (code + 1 == space) break;
        for (int i = 0; i < n; ++i) {
            int& digit = digits[static_cast<std::size_t>(i)];
            if (digit + 2 <= inst.support_size(i)) {
                ++digit;
                break;
            }
            digit = -1;
        }
    }
}

}  // namespace

ScenarioLP build_scenario_lp(const Instance& inst, const FractionalPoint& y,
                             const EnumerationCaps& caps) {
    const FractionalPoint marginals = clamp_marginals(inst, y);
    const std::uint64_t space = checked_scenario_count(inst, caps);

    ScenarioLP lp;
    lp.num_scenarios = space;
    lp.scenario_values = all_scenario_values(inst, space);

    const int normalization_row = 0;
    const MarginalRowIndex index = index_marginal_rows(inst, 1);
    const int num_rows = 1 + index.num_rows;

    lp.problem.num_vars = static_cast<int>(space);
    lp.problem.objective = lp.scenario_values;
    lp.problem.rows.assign(static_cast<std::size_t>(num_rows),
                           std::vector<double>(static_cast<std::size_t>(space), 0.0));
    lp.problem.rhs.assign(static_cast<std::size_t>(num_rows), 0.0);
    lp.problem.rhs[static_cast<std::size_t>(normalization_row)] = 1.0;
    for (ElementId i = 0; i < inst.num_elements(); ++i) {
        for (int x = 0; x < inst.support_size(i); ++x) {
            const int row = index.row_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)];
            lp.problem.rhs[static_cast<std::size_t>(row)] =
                marginals[static_cast<std::size_t>(i)] * inst.dist(i).outcome(x).prob;
        }
    }
    fill_alpha_columns(inst, space, lp.problem, normalization_row, index);
    return lp;
}

double f_plus(const Instance& inst, const FractionalPoint& y, const EnumerationCaps& caps) {
    const ScenarioLP lp = build_scenario_lp(inst, y, caps);
    const LpSolution solution = solve_lp(lp.problem);
    if (solution.status != LpStatus::Optimal) {
        throw Error("scenario LP must be feasible and bounded for valid marginals");
    }
    return solution.objective_value;
}

AdaptiveBoundResult adaptive_upper_bound(const Instance& inst, const Matroid& m,
                                         const EnumerationCaps& caps) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    const std::vector<PolytopeGroup> groups = m.polytope_groups();
    const std::uint64_t space = checked_scenario_count(inst, caps);
    const int n = inst.num_elements();

    // Variables: alpha (space), then y (n), then box slacks u with
    // y_i + u_i = 1 (n).
    const int y_base = static_cast<int>(space);
    const int slack_base = y_base + n;
    const int num_vars = slack_base + n;

    const int normalization_row = 0;
    const MarginalRowIndex index = index_marginal_rows(inst, 1);
    const int group_base = 1 + index.num_rows;
    const int box_base = group_base + static_cast<int>(groups.size());
    const int num_rows = box_base + n;

    LpProblem problem;
    problem.num_vars = num_vars;
    problem.objective.assign(static_cast<std::size_t>(num_vars), 0.0);
    problem.rows.assign(static_cast<std::size_t>(num_rows),
                        std::vector<double>(static_cast<std::size_t>(num_vars), 0.0));
    problem.rhs.assign(static_cast<std::size_t>(num_rows), 0.0);

    const std::vector<double> values = all_scenario_values(inst, space);
    for (std::uint64_t code = 0; code < space; ++code) {
        problem.objective[static_cast<std::size_t>(code)] = values[static_cast<std::size_t>(code)];
    }

    problem.rhs[static_cast<std::size_t>(normalization_row)] = 1.0;
    fill_alpha_columns(inst, space, problem, normalization_row, index);

    // Marginal rows couple to y: sum_{s_i = x} alpha - g_i(x) y_i = 0.
    for (ElementId i = 0; i < n; ++i) {
        for (int x = 0; x < inst.support_size(i); ++x) {
            const int row = index.row_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)];
            problem.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(y_base + i)] =
                -inst.dist(i).outcome(x).prob;
        }
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const std::size_t row = static_cast<std::size_t>(group_base) + g;
        for (ElementId i : groups[g].members) {
            problem.rows[row][static_cast<std::size_t>(y_base + i)] = 1.0;
        }
        problem.rhs[row] = static_cast<double>(groups[g].quota);
    }
    for (ElementId i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(box_base + i);
        problem.rows[row][static_cast<std::size_t>(y_base + i)] = 1.0;
        problem.rows[row][static_cast<std::size_t>(slack_base + i)] = 1.0;
        problem.rhs[row] = 1.0;
    }

    const LpSolution solution = solve_lp(problem);
    if (solution.status != LpStatus::Optimal) {
        throw Error("adaptive-bound LP must be feasible and bounded");
    }
    AdaptiveBoundResult result;
    result.value = solution.objective_value;
    result.y_star.assign(static_cast<std::size_t>(n), 0.0);
    for (ElementId i = 0; i < n; ++i) {
        result.y_star[static_cast<std::size_t>(i)] =
            std::clamp(solution.x[static_cast<std::size_t>(y_base + i)], 0.0, 1.0);
    }
    return result;
}

GapChainCertificate verify_gap_chain(const Instance& inst, const Matroid& m,
                                     const EnumerationCaps& caps) {
    GapChainCertificate cert;
    cert.adaptive_value = optimal_adaptive_exact(inst, m, caps).value;
    const AdaptiveBoundResult bound = adaptive_upper_bound(inst, m, caps);
    cert.upper_bound = bound.value;
    cert.y_star = bound.y_star;
    cert.multilinear_at_y_star =
        multilinear_extension(inst, cert.y_star, ExtensionMode::Exact, 0, nullptr, caps);

    // The LP reports y* to pivot accuracy, so give the rounding pre-check
    // more room than the certificate inequalities themselves.
    PipageSettings pipage;
    pipage.kind = EvaluatorKind::Exact;
    pipage.caps = caps;
    pipage.tol = 1e-7;
    cert.rounded_set = pipage_round(inst, m, cert.y_star, pipage);
    cert.rounded_value = expected_value_exact(inst, cert.rounded_set, caps);
    cert.nonadaptive_value = optimal_nonadaptive_exact(inst, m, caps).value;

    const double tol = 1e-9;
    auto link = [&](const std::string& name, double lhs, double rhs, double slack) {
        cert.links.push_back(GapChainLink{name, lhs, rhs, lhs <= rhs + slack});
    };
    link("A <= U", cert.adaptive_value, cert.upper_bound, tol);
    link("U <= (e/(e-1)) M", cert.upper_bound, kAdaptivityGap * cert.multilinear_at_y_star, tol);
    link("M <= F(rounded)", cert.multilinear_at_y_star, cert.rounded_value, tol);
    link("F(rounded) <= N", cert.rounded_value, cert.nonadaptive_value, tol);
    link("A <= (e/(e-1)) N", cert.adaptive_value, kAdaptivityGap * cert.nonadaptive_value, 1e-8);
    cert.ok = std::all_of(cert.links.begin(), cert.links.end(),
                          [](const GapChainLink& l) { return l.ok; });
    return cert;
}

}  // namespace stosub
