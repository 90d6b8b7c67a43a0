#ifndef STOSUB_EVALUATE_HPP
#define STOSUB_EVALUATE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stosub/rng.hpp"
#include "stosub/types.hpp"

namespace stosub {

/// Limits for exact enumeration. Exceeding a cap raises CapExceededError;
/// there is never a silent fallback.
struct EnumerationCaps {
    std::uint64_t max_scenarios = 1'000'000;
    /// Scenario-LP column budget (the f+ machinery builds dense tableaus).
    std::uint64_t max_lp_scenarios = 100'000;
};

struct McEstimate {
    double estimate = 0.0;
    double ci_halfwidth_95 = 0.0;
};

/// Deterministic objective value of a partial realization.
double eval_f(const Instance& inst, const PartialRealization& r);

/// F(S): exact expectation of f over the product distribution on S.
double expected_value_exact(const Instance& inst, const std::vector<ElementId>& S,
                            const EnumerationCaps& caps = {});

/// Monte Carlo estimate of F(S) with a normal-approximation 95% CI.
McEstimate expected_value_mc(const Instance& inst, const std::vector<ElementId>& S,
                             int samples, RandomStream& rng);

/// F(S, t): coordinates of S realized in t are fixed, the rest of S is
/// integrated out, elements outside S are absent.
double conditional_expected_value(const Instance& inst, const std::vector<ElementId>& S,
                                  const PartialRealization& t,
                                  const EnumerationCaps& caps = {});

/// E[F(S_prev + X_i) | s_prev] - f(s_prev), one pass over i's support.
/// Requires dom(s_prev) == S_prev and i outside S_prev.
double marginal_conditional(const Instance& inst, const std::vector<ElementId>& S_prev,
                            const PartialRealization& s_prev, ElementId i);

enum class ExtensionMode { Exact, MonteCarlo };

/// Multilinear extension F(y) = E[F(Y)], Y including i independently with
/// probability y_i. Exact mode enumerates subsets of the fractional
/// support; Monte Carlo mode samples (Y, realization) pairs.
double multilinear_extension(const Instance& inst, const FractionalPoint& y,
                             ExtensionMode mode, int samples = 0, RandomStream* rng = nullptr,
                             const EnumerationCaps& caps = {});

/// Closed-form F(S) for coverage objectives:
///   sum_u w_u (1 - prod_{i in S} Pr[u not covered by X_i]).
double coverage_closed_form(const Instance& inst, const std::vector<ElementId>& S);

/// Closed-form multilinear extension for coverage objectives:
///   sum_u w_u (1 - prod_i (1 - y_i Pr[u in X_i])).
double coverage_closed_form(const Instance& inst, const FractionalPoint& y);

// ---------------------------------------------------------------------------
// Objective validation
// ---------------------------------------------------------------------------

struct ObjectiveViolation {
    std::string kind; // "monotonicity" or "submodularity"
    std::vector<ElementId> smaller_set; // S
    std::vector<ElementId> larger_set;  // T
    ElementId added_element = -1;       // j
    std::uint64_t realization_code = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string describe() const;
};

struct ValidationReport {
    bool valid = false;
    bool partial = false; // true when only a sampled spot-check ran
    std::uint64_t realizations_checked = 0;
    std::optional<ObjectiveViolation> violation;
    std::string message;
};

/// Checks monotonicity and diminishing returns of f over deterministic
/// restrictions of full realizations. Exhaustive when the realization
/// space fits under the cap, otherwise a seeded spot-check flagged as
/// partial validation.
ValidationReport validate_objective(const Instance& inst, const EnumerationCaps& caps = {},
                                    std::uint64_t spot_seed = 0, int spot_samples = 2000);

/// Throws InvalidInputError when a table objective fails validation.
/// Called from Instance construction.
void validate_table_objective_or_throw(const Instance& inst);

namespace detail {

/// Dense realization view: outcome_idx[i] in {-1} union [0, support_i),
/// -1 meaning absent. The hot path behind eval_f.
double eval_f_dense(const Instance& inst, std::span<const int> outcome_idx);

/// Work estimate for exact enumeration over the free elements of S.
std::uint64_t enumeration_size(const Instance& inst, const std::vector<ElementId>& free_elements);

} // namespace detail

} // namespace stosub

#endif
