#ifndef STOSUB_LP_HPP
#define STOSUB_LP_HPP

#include <vector>

namespace stosub {

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Equality-form linear program: maximize c.x subject to A x = b, x >= 0.
// Callers encode inequalities via explicit slack variables.
struct LpProblem {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
};

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    double objective_value = 0.0;
    std::vector<double> x;
};

// Dense two-phase tableau simplex.  Dantzig pricing with a Bland fallback
// for anti-cycling; suitable for the dense, well-scaled programs built by
// the bounds layer (tens of rows, up to ~1e5 columns).
LpSolution solve_lp(const LpProblem& problem);

}  // namespace stosub

#endif
