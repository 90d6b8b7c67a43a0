#ifndef STOSUB_EXPERIMENTS_HPP
#define STOSUB_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stosub/evaluate.hpp"
#include "stosub/matroid.hpp"
#include "stosub/types.hpp"

namespace stosub {

enum class ObjectiveKind { Coverage, ConcaveSum, Table };

struct GeneratorConfig {
    int n = 4;
    int support_size = 2;
    ObjectiveKind objective = ObjectiveKind::Coverage;
    MatroidKind matroid = MatroidKind::Uniform;
    std::uint64_t seed = 0;
    int universe_size = 0;  ///< coverage item count; 0 means 2n.
    int max_rank = 3;       ///< generated matroids keep rank in [1, max_rank].
};

/// Seeded random instance plus a compatible matroid. Identical config
/// (including seed) reproduces the identical instance. Table objectives
/// tabulate a hidden weighted-coverage function, so every generated
/// objective is monotone submodular by construction.
std::pair<Instance, Matroid> gen_random_instance(const GeneratorConfig& config);

// ---------------------------------------------------------------------------
// The hard coverage family: n collections of n^2 identical elements, each
// covering item i of n with probability 1/n, under a budget of n^2 picks.
// Adaptive scanning approaches n while the best fixed set stays near
// (1 - 1/e) n, so the adaptive/non-adaptive ratio approaches e/(e-1).
// ---------------------------------------------------------------------------

/// Exact optimal non-adaptive value (1 - (1 - 1/n)^n) n; the balanced
/// allocation of n picks per collection is optimal by concavity.
double tight_nonadaptive_value(int n);

/// Exact E[min(n, Binomial(n^2, 1/n))]: the scanning policy's expected
/// number of covered collections, evaluated in log space.
double tight_adaptive_oracle(int n);

/// Simulates the scanning policy (draw copies of collection i until it
/// covers or its copies run out, then move on; n^2 total picks) on the
/// implicit representation. Requires replicates >= 30.
McEstimate run_tight_adaptive(int n, int replicates, std::uint64_t seed);

/// Materializes the family as a real instance (n^3 elements, uniform rank
/// n^2) for cross-checks against the generic machinery; n <= 6.
std::pair<Instance, Matroid> materialize_tight_example(int n);

/// Scanning-policy value on a fixed full realization of the materialized
/// instance (outcome_of as in run_myopic_adaptive).
double tight_scanning_value(int n, const std::vector<int>& outcome_of);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// One CSV row. Missing values (quiet NaN) serialize as empty cells.
struct ExperimentRow {
    std::string config_id;
    int n = 0;
    std::string policy;
    double analytic_value = 0.0;
    double mc_mean = 0.0;
    double mc_ci95 = 0.0;
    int replicates = 0;
    std::uint64_t seed = 0;
    double ratio = 0.0;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
};

/// Header plus one line per row, columns
/// (config_id, n, policy, analytic_value, mc_mean, mc_ci95, replicates,
/// seed, ratio), floats at 10 significant digits, LF endings; rows sorted
/// by (config_id, n, policy).
std::string report_to_csv(const ExperimentReport& report);

/// Missing-value marker for report cells.
double missing_value();

/// One row per n: analytic non-adaptive value, simulated adaptive mean
/// and CI, and their ratio, which increases toward e/(e-1).
ExperimentReport gap_experiment(const std::vector<int>& n_list, int replicates,
                                std::uint64_t seed);

struct ComparePolicyOptions {
    int cg_steps = 100;    ///< continuous-greedy step count T.
    int cg_samples = 200;  ///< samples per continuous-greedy weight estimate.
};

/// One row per policy name ("myopic" | "greedy" | "continuous"), evaluated
/// with common random numbers: every policy sees the same drawn realization
/// in each replicate. "continuous" runs continuous greedy plus pipage
/// rounding once (uniform/partition matroids only) and evaluates the
/// rounded set. analytic_value carries the exact expected value when it is
/// computable within caps.
ExperimentReport compare_policies(const Instance& inst, const Matroid& m,
                                  const std::vector<std::string>& policies, int replicates,
                                  std::uint64_t seed, const EnumerationCaps& caps = {},
                                  const ComparePolicyOptions& options = {});

}  // namespace stosub

#endif
