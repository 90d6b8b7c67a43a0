#ifndef STOSUB_POLICIES_HPP
#define STOSUB_POLICIES_HPP

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "stosub/evaluate.hpp"
#include "stosub/matroid.hpp"
#include "stosub/rng.hpp"
#include "stosub/types.hpp"

namespace stosub {

/// One considered element. Discarded steps are those whose addition would
/// have violated independence at consideration time; accepted steps record
/// the observed support index. conditional_marginal is the expected
/// marginal value at selection time (the quantity the argmax maximized).
struct PolicyStep {
    ElementId element = -1;
    bool accepted = false;
    int outcome_index = -1;
    double conditional_marginal = 0.0;
};

struct PolicyTrace {
    std::vector<PolicyStep> steps;
    std::vector<ElementId> chosen;    ///< S, in acceptance order.
    std::vector<ElementId> discarded; ///< U, sorted by id.
    PartialRealization observed;      ///< outcomes of the chosen elements.
    double final_value = 0.0;         ///< f(observed).
};

/// Myopic adaptive policy: repeatedly take the element of maximum
/// conditional expected marginal value among those not yet considered
/// (ties by lowest id); discard it if adding would break independence,
/// otherwise add it and observe its outcome. Stops once the chosen set is
/// a basis or every element has been considered.
PolicyTrace run_myopic_adaptive(const Instance& inst, const Matroid& m, RandomStream& rng);

/// Same policy with outcomes read from a fixed full realization
/// (outcome_of[i] = support index of element i). Enables common-random-
/// number comparisons and exact evaluation by path enumeration.
PolicyTrace run_myopic_adaptive(const Instance& inst, const Matroid& m,
                                const std::vector<int>& outcome_of);

struct MyopicExactReport {
    double value = 0.0;            ///< exact expected final value.
    std::uint64_t paths = 0;       ///< outcome paths enumerated.
    /// min over reachable states s_{j-1} of E[Delta_j - Delta_{j+1} | s_{j-1}],
    /// the expected one-step drop of the accepted marginal sequence
    /// (branches that stop contribute Delta_{j+1} = 0). Submodularity plus
    /// the argmax rule make this nonnegative; +inf when no state has two
    /// consecutive acceptances.
    double min_marginal_drop = std::numeric_limits<double>::infinity();
};

/// Exact expected value of the myopic policy by enumerating its outcome
/// tree (the policy is deterministic given observed outcomes). Throws
/// CapExceededError when the tree exceeds caps.max_scenarios paths.
MyopicExactReport evaluate_myopic_exact(const Instance& inst, const Matroid& m,
                                        const EnumerationCaps& caps = {});

enum class EvaluatorKind { Exact, ClosedForm, MonteCarlo };

struct EvalSettings {
    EvaluatorKind kind = EvaluatorKind::Exact;
    int samples = 1000;       ///< per estimate, MonteCarlo only.
    std::uint64_t seed = 0;   ///< substream root, MonteCarlo only.
    EnumerationCaps caps;
};

/// Non-adaptive greedy: iteratively add the feasible element maximizing
/// F(S + i) - F(S) under unconditioned expectations; ties by lowest id;
/// stops at a basis or when no feasible element remains.
std::vector<ElementId> greedy_nonadaptive(const Instance& inst, const Matroid& m,
                                          const EvalSettings& settings = {});

struct ContinuousGreedyResult {
    FractionalPoint y;            ///< y_i = step_counts[i] / steps.
    std::vector<int> step_counts; ///< times element i entered the chosen basis.
    int steps = 0;
};

/// Continuous greedy over the base polytope: T steps, each estimating
/// marginal weights w_i = E[F(Y + i) - F(Y)] with Y sampled from the
/// current point (samples per step), then stepping 1/T toward the
/// max-weight basis. Output coordinates are exact multiples of 1/T, so
/// the result lies in B(M) by rational arithmetic. Uniform and partition
/// matroids only.
ContinuousGreedyResult continuous_greedy(const Instance& inst, const Matroid& m, int steps,
                                         int samples, RandomStream& rng);

struct PipageSettings {
    EvaluatorKind kind = EvaluatorKind::Exact; ///< Exact or MonteCarlo.
    int samples = 2000;      ///< per endpoint comparison, MonteCarlo only.
    std::uint64_t seed = 0;  ///< substream root, MonteCarlo only.
    EnumerationCaps caps;
    double tol = 1e-9;       ///< polytope membership tolerance.
};

/// Pipage rounding: repeatedly pick two fractional coordinates in the same
/// equality group and move along e_i - e_j to the endpoint of larger
/// multilinear value (exact evaluation, or paired common-random-number
/// estimates). Returns the basis indicated by the final integral point;
/// never decreases the exact multilinear extension. Throws
/// InvalidPointError when y is outside B(M).
std::vector<ElementId> pipage_round(const Instance& inst, const Matroid& m, FractionalPoint y,
                                    const PipageSettings& settings = {});

/// Memoized optimal-continuation values keyed by the canonical
/// mixed-radix code of the partial realization; root_value is the optimal
/// adaptive expected value.
struct DecisionTreeValue {
    double root_value = 0.0;
    std::unordered_map<std::uint64_t, double> values;
};

struct AdaptiveExactResult {
    double value = 0.0;
    DecisionTreeValue tree;
};

/// Optimal adaptive policy by memoized recursion over partial
/// realizations: V(s) = max(f(s) when stopping is allowed, best expected
/// continuation over addable elements). With monotone f early stopping
/// never strictly helps; allow_early_stop=false restricts stopping to
/// states with no addable element, which must give the same value.
AdaptiveExactResult optimal_adaptive_exact(const Instance& inst, const Matroid& m,
                                           const EnumerationCaps& caps = {},
                                           bool allow_early_stop = true);

struct NonAdaptiveExactResult {
    double value = 0.0;
    std::vector<ElementId> best_set;
};

/// Optimal non-adaptive set by exhaustive scan of all independent sets
/// (first maximizer in lexicographic order). Also scans bases only and
/// asserts the two optima agree, which monotonicity guarantees.
NonAdaptiveExactResult optimal_nonadaptive_exact(const Instance& inst, const Matroid& m,
                                                 const EnumerationCaps& caps = {});

}  // namespace stosub

#endif
