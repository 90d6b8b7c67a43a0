#ifndef STOSUB_TYPES_HPP
#define STOSUB_TYPES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stosub/errors.hpp"

namespace stosub {

using ElementId = int;

/// Point y in [0,1]^n; used by the multilinear extension, continuous
/// greedy, and the scenario LP.
using FractionalPoint = std::vector<double>;

// ---------------------------------------------------------------------------
// Outcome payloads
// ---------------------------------------------------------------------------

/// Set of universe items covered when the outcome occurs. Items are kept
/// sorted and unique.
struct SubsetOutcome {
    std::vector<int> items;
};

/// Nonnegative scalar contribution (concave-of-sum objectives).
struct ScalarOutcome {
    double value = 0.0;
};

/// Opaque index payload for table objectives.
struct IndexOutcome {
    int index = 0;
};

using OutcomePayload = std::variant<SubsetOutcome, ScalarOutcome, IndexOutcome>;

bool payload_equal(const OutcomePayload& a, const OutcomePayload& b);

struct WeightedOutcome {
    OutcomePayload payload;
    double prob = 0.0;
};

/// Finite outcome distribution of one stochastic element.
/// Probabilities must be nonnegative and sum to 1 within 1e-12;
/// payloads must be pairwise distinct.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<WeightedOutcome> support);

    int size() const { return static_cast<int>(support_.size()); }
    const WeightedOutcome& outcome(int idx) const { return support_[static_cast<std::size_t>(idx)]; }
    const std::vector<WeightedOutcome>& support() const { return support_; }

private:
    std::vector<WeightedOutcome> support_;
};

struct StochasticElement {
    ElementId id = 0;
    DiscreteDistribution dist;
};

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

/// Expected weight of the union of realized item sets. Empty `weights`
/// means unit weight per item.
struct CoverageObjective {
    int universe_size = 0;
    std::vector<double> weights;

    double item_weight(int item) const {
        return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(item)];
    }
};

/// u(sum of realized scalars) for a piecewise-linear concave u with
/// u(0) = 0 and nonnegative, non-increasing slopes. `breakpoints` are
/// (x, u(x)) pairs with strictly increasing x > 0; the last slope
/// extends beyond the final breakpoint.
struct ConcaveOfSumObjective {
    std::vector<std::pair<double, double>> breakpoints;

    double value_at(double x) const;
};

/// Full value table indexed by the canonical mixed-radix realization code
/// (see Instance::encode). Intended for tests and tiny instances.
struct TableObjective {
    std::vector<double> values;
};

using ObjectiveSpec = std::variant<CoverageObjective, ConcaveOfSumObjective, TableObjective>;

// ---------------------------------------------------------------------------
// Partial realizations
// ---------------------------------------------------------------------------

/// Observed outcomes for a subset of the elements. Elements absent from
/// the assignment are "not chosen"; their coordinates contribute nothing.
class PartialRealization {
public:
    PartialRealization() = default;
    explicit PartialRealization(std::map<ElementId, int> assignment)
        : assignment_(std::move(assignment)) {}

    void assign(ElementId id, int support_index) { assignment_[id] = support_index; }
    void erase(ElementId id) { assignment_.erase(id); }
    bool has(ElementId id) const { return assignment_.count(id) != 0; }
    int outcome(ElementId id) const { return assignment_.at(id); }
    std::size_t size() const { return assignment_.size(); }
    bool empty() const { return assignment_.empty(); }
    const std::map<ElementId, int>& assignment() const { return assignment_; }

    std::vector<ElementId> domain() const;

private:
    std::map<ElementId, int> assignment_;
};

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

/// Immutable problem instance: stochastic elements with ids 0..n-1 plus an
/// objective consistent with every element's payload kind.
class Instance {
public:
    Instance(std::vector<StochasticElement> elements, ObjectiveSpec objective);

    /// Construction without the table-objective validity check; used by
    /// tests that exercise the validator on broken tables.
    static Instance unchecked(std::vector<StochasticElement> elements, ObjectiveSpec objective);

    int num_elements() const { return static_cast<int>(elements_.size()); }
    const StochasticElement& element(ElementId id) const;
    const DiscreteDistribution& dist(ElementId id) const { return element(id).dist; }
    const std::vector<StochasticElement>& elements() const { return elements_; }
    const ObjectiveSpec& objective() const { return objective_; }

    bool is_coverage() const { return std::holds_alternative<CoverageObjective>(objective_); }
    /// Universe size for coverage objectives, 0 otherwise.
    int universe_size() const;

    int support_size(ElementId id) const { return dist(id).size(); }

    /// Mixed-radix code of a partial realization: digit_i = 0 for absent,
    /// 1 + support index otherwise, radix_i = support_size(i) + 1, element 0
    /// least significant. Total code space is realization_space_size().
    std::uint64_t encode(const PartialRealization& r) const;
    PartialRealization decode(std::uint64_t code) const;

    /// Product of (support_size + 1) over all elements, saturating at 2^63.
    std::uint64_t realization_space_size() const { return realization_space_; }
    bool realization_space_fits() const { return realization_space_fits_; }

    // Fast-path data, precomputed at construction.
    /// Coverage: one bitmask word-vector per (element, support index).
    const std::vector<std::uint64_t>& coverage_mask(ElementId id, int support_index) const {
        return coverage_masks_[static_cast<std::size_t>(mask_offsets_[static_cast<std::size_t>(id)] + support_index)];
    }
    int coverage_words() const { return coverage_words_; }
    /// Scalar payload per (element, support index) for concave-of-sum.
    double scalar_payload(ElementId id, int support_index) const {
        return scalar_payloads_[static_cast<std::size_t>(mask_offsets_[static_cast<std::size_t>(id)] + support_index)];
    }
    /// Probability that item `u` is covered by element `id` when chosen.
    double coverage_prob(ElementId id, int item) const;

private:
    struct UncheckedTag {};
    Instance(std::vector<StochasticElement> elements, ObjectiveSpec objective, UncheckedTag);
    void init_common(bool check_table);

    std::vector<StochasticElement> elements_;
    ObjectiveSpec objective_;

    std::uint64_t realization_space_ = 1;
    bool realization_space_fits_ = true;
    std::vector<std::uint64_t> radix_prefix_;

    std::vector<int> mask_offsets_;
    std::vector<std::vector<std::uint64_t>> coverage_masks_;
    std::vector<double> scalar_payloads_;
    int coverage_words_ = 0;
};

} // namespace stosub

#endif
