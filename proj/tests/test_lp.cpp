#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "stosub/lp.hpp"
#include "stosub/rng.hpp"

using namespace stosub;

namespace {

// Independent oracle: enumerate every basis (column subset of size m),
// solve the square system by Gaussian elimination, keep the best feasible
// basic solution. Exponential, so only for tiny programs.
struct BruteResult {
    bool feasible = false;
    bool unbounded_hint = false;  // not detected here; callers avoid such cases
    double best = -std::numeric_limits<double>::infinity();
};

bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& out) {
    const int m = static_cast<int>(b.size());
    for (int col = 0; col < m; ++col) {
        int pivot = -1;
        double best = 1e-9;
        for (int r = col; r < m; ++r) {
            if (std::fabs(a[r][col]) > best) {
                best = std::fabs(a[r][col]);
                pivot = r;
            }
        }
        if (pivot < 0) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (int c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    out.assign(b.begin(), b.end());
    for (int r = 0; r < m; ++r) out[r] = b[r] / a[r][r];
    return true;
}

BruteResult brute_force_lp(const LpProblem& p) {
    const int m = static_cast<int>(p.rows.size());
    const int n = p.num_vars;
    BruteResult result;
    std::vector<int> cols(m);
    // Enumerate size-m subsets of columns via bitmask.
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<int>(__builtin_popcount(mask)) != m) continue;
        int idx = 0;
        for (int c = 0; c < n; ++c) {
            if (mask & (1u << c)) cols[idx++] = c;
        }
        std::vector<std::vector<double>> a(m, std::vector<double>(m));
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) a[r][c] = p.rows[r][cols[c]];
        }
        std::vector<double> basic;
        if (!solve_square(a, p.rhs, basic)) continue;
        bool ok = true;
        for (double v : basic) {
            if (v < -1e-9) ok = false;
        }
        if (!ok) continue;
        result.feasible = true;
        double obj = 0.0;
        for (int c = 0; c < m; ++c) obj += p.objective[cols[c]] * basic[c];
        if (obj > result.best) result.best = obj;
    }
    return result;
}

LpProblem make_problem(std::vector<double> objective, std::vector<std::vector<double>> rows,
                       std::vector<double> rhs) {
    LpProblem p;
    p.num_vars = static_cast<int>(objective.size());
    p.objective = std::move(objective);
    p.rows = std::move(rows);
    p.rhs = std::move(rhs);
    return p;
}

}  // namespace

TEST_CASE("simplex solves a textbook program") {
    // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 (slacks s1..s3).
    LpProblem p = make_problem({3, 5, 0, 0, 0},
                               {{1, 0, 1, 0, 0}, {0, 2, 0, 1, 0}, {3, 2, 0, 0, 1}},
                               {4, 12, 18});
    LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(36.0).epsilon(1e-9));
    CHECK(s.x[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s.x[1] == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("simplex handles pure equality constraints") {
    // max x1 + 2x2 + 3x3 s.t. x1+x2+x3 = 1, x1 - x2 = 0.
    LpProblem p = make_problem({1, 2, 3}, {{1, 1, 1}, {1, -1, 0}}, {1, 0});
    LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.x[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("simplex detects infeasibility") {
    // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
    LpProblem p = make_problem({1, 1}, {{1, 1}, {1, 1}}, {1, 2});
    CHECK(solve_lp(p).status == LpStatus::Infeasible);

    // Nonnegative variables cannot give a negative sum.
    LpProblem q = make_problem({1}, {{-1}}, {1});
    CHECK(solve_lp(q).status == LpStatus::Infeasible);
}

TEST_CASE("simplex detects unboundedness") {
    // max x1 with x1 - x2 = 0: both can grow without limit.
    LpProblem p = make_problem({1, 0}, {{1, -1}}, {0});
    CHECK(solve_lp(p).status == LpStatus::Unbounded);
}

TEST_CASE("simplex survives a degenerate program") {
    // Multiple bases describe the same vertex (b has a zero).
    LpProblem p = make_problem({1, 1, 0, 0}, {{1, 0, 1, 0}, {1, 1, 0, 1}}, {0, 1});
    LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("simplex allows negative right-hand sides via row negation") {
    // -x1 - x2 = -3 with x1 <= 2 (slack): optimum picks x1 = 2, x2 = 1.
    LpProblem p = make_problem({5, 1, 0}, {{-1, -1, 0}, {1, 0, 1}}, {-3, 2});
    LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(11.0).epsilon(1e-9));
}

TEST_CASE("simplex agrees with basis enumeration on random programs") {
    RandomStream rng(20240817);
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 2 + static_cast<int>(rng.uniform_int(2));  // 2..3 rows
        const int n = m + 2 + static_cast<int>(rng.uniform_int(4));
        LpProblem p;
        p.num_vars = n;
        p.objective.resize(n);
        for (double& c : p.objective) c = rng.uniform01() * 4.0 - 1.0;
        p.rows.assign(m, std::vector<double>(n, 0.0));
        p.rhs.assign(m, 0.0);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < n; ++c) p.rows[r][c] = rng.uniform01() * 2.0 - 0.5;
            p.rhs[r] = rng.uniform01() * 2.0;
        }
        // Append one slack per row so every program is bounded and feasible
        // questions reduce to sign structure.
        for (int r = 0; r < m; ++r) {
            p.objective.push_back(0.0);
            for (int rr = 0; rr < m; ++rr) p.rows[rr].push_back(rr == r ? 1.0 : 0.0);
            ++p.num_vars;
        }
        // Cap every variable by a shared budget row to rule out unboundedness.
        p.objective.push_back(0.0);
        ++p.num_vars;
        for (int rr = 0; rr < m; ++rr) p.rows[rr].push_back(0.0);
        std::vector<double> budget(static_cast<std::size_t>(p.num_vars), 1.0);
        p.rows.push_back(budget);
        p.rhs.push_back(8.0);

        LpSolution s = solve_lp(p);
        BruteResult ref = brute_force_lp(p);
        if (!ref.feasible) {
            CHECK(s.status == LpStatus::Infeasible);
            continue;
        }
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.objective_value == doctest::Approx(ref.best).epsilon(1e-7));
        // The returned point satisfies the constraints.
        for (int r = 0; r < static_cast<int>(p.rows.size()); ++r) {
            double lhs = 0.0;
            for (int c = 0; c < p.num_vars; ++c) lhs += p.rows[r][c] * s.x[c];
            CHECK(lhs == doctest::Approx(p.rhs[r]).epsilon(1e-7));
        }
        for (double v : s.x) CHECK(v >= -1e-9);
        ++solved;
    }
    CHECK(solved >= 50);  // nearly all random programs are feasible
}
