#include "stosub/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stosub/errors.hpp"

namespace stosub {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;

class Tableau {
  public:
    Tableau(const LpProblem& problem)
        : m_(static_cast<int>(problem.rows.size())),
          n_user_(problem.num_vars),
          n_total_(problem.num_vars + static_cast<int>(problem.rows.size())),
          rows_(problem.rows.size()),
          rhs_(problem.rhs),
          basis_(problem.rows.size()),
          banned_(static_cast<std::size_t>(problem.num_vars + static_cast<int>(problem.rows.size())),
                  false) {
        for (int i = 0; i < m_; ++i) {
            const std::vector<double>& src = problem.rows[static_cast<std::size_t>(i)];
            if (static_cast<int>(src.size()) != n_user_) {
                throw InvalidInputError("LP row " + std::to_string(i) + " has " +
                                        std::to_string(src.size()) + " coefficients, expected " +
                                        std::to_string(n_user_));
            }
            std::vector<double>& row = rows_[static_cast<std::size_t>(i)];
            row.assign(static_cast<std::size_t>(n_total_), 0.0);
            const double sign = rhs_[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
            for (int j = 0; j < n_user_; ++j) {
                row[static_cast<std::size_t>(j)] = sign * src[static_cast<std::size_t>(j)];
            }
            rhs_[static_cast<std::size_t>(i)] *= sign;
            row[static_cast<std::size_t>(n_user_ + i)] = 1.0;
            basis_[static_cast<std::size_t>(i)] = n_user_ + i;
        }
    }

    // Runs simplex iterations for the given full-length objective vector.
    // Returns false if the problem is unbounded in this objective.
    bool maximize(const std::vector<double>& cost) {
        const long max_iterations = 2000L + 50L * (m_ + n_total_);
        const long bland_after = 1000L + 10L * (m_ + n_total_);
        for (long iteration = 0;; ++iteration) {
            if (iteration > max_iterations) {
                throw Error("simplex iteration limit exceeded");
            }
            const bool bland = iteration >= bland_after;
            const int entering = pick_entering(cost, bland);
            if (entering < 0) return true;
            const int leaving = pick_leaving(entering);
            if (leaving < 0) return false;
            pivot(leaving, entering);
        }
    }

    double objective_value(const std::vector<double>& cost) const {
        double total = 0.0;
        for (int i = 0; i < m_; ++i) {
            total += cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] *
                     rhs_[static_cast<std::size_t>(i)];
        }
        return total;
    }

    // After phase 1: pivot artificial variables out of the basis where a
    // structural column is available; redundant rows keep their artificial
    // at value zero.  All artificial columns are then banned from entering.
    void retire_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_user_) continue;
            const std::vector<double>& row = rows_[static_cast<std::size_t>(i)];
            int replacement = -1;
            for (int j = 0; j < n_user_; ++j) {
                if (!in_basis(j) && std::abs(row[static_cast<std::size_t>(j)]) > kPivotTol) {
                    replacement = j;
                    break;
                }
            }
            if (replacement >= 0) pivot(i, replacement);
        }
        for (int j = n_user_; j < n_total_; ++j) banned_[static_cast<std::size_t>(j)] = true;
    }

    double phase1_infeasibility() const {
        double total = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= n_user_) {
                total += rhs_[static_cast<std::size_t>(i)];
            }
        }
        return total;
    }

    std::vector<double> extract_solution() const {
        std::vector<double> x(static_cast<std::size_t>(n_user_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const int var = basis_[static_cast<std::size_t>(i)];
            if (var < n_user_) {
                x[static_cast<std::size_t>(var)] = rhs_[static_cast<std::size_t>(i)];
            }
        }
        return x;
    }

    int num_total() const { return n_total_; }
    int num_user() const { return n_user_; }

  private:
    bool in_basis(int var) const {
        return std::find(basis_.begin(), basis_.end(), var) != basis_.end();
    }

    int pick_entering(const std::vector<double>& cost, bool bland) const {
        // Reduced cost r_j = c_j - c_B . column_j; basic columns are unit
        // vectors, so their reduced cost is zero and they never enter.
        std::vector<double> basic_cost(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) {
            basic_cost[static_cast<std::size_t>(i)] =
                cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
        }
        int best = -1;
        double best_value = kReducedCostTol;
        for (int j = 0; j < n_total_; ++j) {
            if (banned_[static_cast<std::size_t>(j)] || in_basis(j)) continue;
            double reduced = cost[static_cast<std::size_t>(j)];
            for (int i = 0; i < m_; ++i) {
                const double a = rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (a != 0.0) reduced -= basic_cost[static_cast<std::size_t>(i)] * a;
            }
            if (reduced > best_value) {
                best = j;
                best_value = reduced;
                if (bland) break;
            }
        }
        return best;
    }

    int pick_leaving(int entering) const {
        int best = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double a = rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(entering)];
            if (a <= kPivotTol) continue;
            const double ratio = rhs_[static_cast<std::size_t>(i)] / a;
            if (best < 0 || ratio < best_ratio - kPivotTol) {
                best = i;
                best_ratio = ratio;
            } else if (ratio < best_ratio + kPivotTol) {
                // Tie: prefer evicting an artificial, else the smallest
                // basic index (Bland-style, guards against cycling).
                const int cur = basis_[static_cast<std::size_t>(i)];
                const int prev = basis_[static_cast<std::size_t>(best)];
                const bool cur_art = cur >= n_user_;
                const bool prev_art = prev >= n_user_;
                if ((cur_art && !prev_art) || (cur_art == prev_art && cur < prev)) {
                    best = i;
                    best_ratio = ratio;
                }
            }
        }
        return best;
    }

    void pivot(int row, int col) {
        std::vector<double>& pivot_row = rows_[static_cast<std::size_t>(row)];
        const double p = pivot_row[static_cast<std::size_t>(col)];
        for (double& v : pivot_row) v /= p;
        rhs_[static_cast<std::size_t>(row)] /= p;
        pivot_row[static_cast<std::size_t>(col)] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            std::vector<double>& other = rows_[static_cast<std::size_t>(i)];
            const double factor = other[static_cast<std::size_t>(col)];
            if (factor == 0.0) continue;
            for (int j = 0; j < n_total_; ++j) {
                other[static_cast<std::size_t>(j)] -=
                    factor * pivot_row[static_cast<std::size_t>(j)];
            }
            other[static_cast<std::size_t>(col)] = 0.0;
            rhs_[static_cast<std::size_t>(i)] -= factor * rhs_[static_cast<std::size_t>(row)];
            if (rhs_[static_cast<std::size_t>(i)] < 0.0 &&
                rhs_[static_cast<std::size_t>(i)] > -1e-11) {
                rhs_[static_cast<std::size_t>(i)] = 0.0;
            }
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    int m_;
    int n_user_;
    int n_total_;
    std::vector<std::vector<double>> rows_;
    std::vector<double> rhs_;
    std::vector<int> basis_;
    std::vector<bool> banned_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    if (static_cast<int>(problem.objective.size()) != problem.num_vars) {
        throw InvalidInputError("LP objective size does not match variable count");
    }
    if (problem.rows.size() != problem.rhs.size()) {
        throw InvalidInputError("LP row and rhs counts differ");
    }
    Tableau tableau(problem);

    std::vector<double> phase1(static_cast<std::size_t>(tableau.num_total()), 0.0);
    for (int j = tableau.num_user(); j < tableau.num_total(); ++j) {
        phase1[static_cast<std::size_t>(j)] = -1.0;
    }
    tableau.maximize(phase1);  // bounded below by construction, never unbounded
    if (tableau.phase1_infeasibility() > kPhase1Tol) {
        return LpSolution{LpStatus::Infeasible, 0.0, {}};
    }
    tableau.retire_artificials();

    std::vector<double> phase2(static_cast<std::size_t>(tableau.num_total()), 0.0);
    for (int j = 0; j < tableau.num_user(); ++j) {
        phase2[static_cast<std::size_t>(j)] = problem.objective[static_cast<std::size_t>(j)];
    }
    if (!tableau.maximize(phase2)) {
        return LpSolution{LpStatus::Unbounded, 0.0, {}};
    }

    LpSolution solution;
    solution.status = LpStatus::Optimal;
    solution.x = tableau.extract_solution();
    solution.objective_value = 0.0;
    for (int j = 0; j < problem.num_vars; ++j) {
        solution.objective_value += problem.objective[static_cast<std::size_t>(j)] *
                                    solution.x[static_cast<std::size_t>(j)];
    }
    return solution;
}

}  // namespace stosub
