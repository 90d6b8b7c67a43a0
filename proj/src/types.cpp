#include "stosub/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stosub/rng.hpp"

namespace stosub {

namespace {

constexpr double kProbTolerance = 1e-12;

std::string describe_payload_kind(const OutcomePayload& p) {
    if (std::holds_alternative<SubsetOutcome>(p)) return "subset";
    if (std::holds_alternative<ScalarOutcome>(p)) return "scalar";
    return "index";
}

} // namespace

bool payload_equal(const OutcomePayload& a, const OutcomePayload& b) {
    if (a.index() != b.index()) return false;
    if (const auto* sa = std::get_if<SubsetOutcome>(&a)) {
        return sa->items == std::get<SubsetOutcome>(b).items;
    }
    if (const auto* sc = std::get_if<ScalarOutcome>(&a)) {
        return sc->value == std::get<ScalarOutcome>(b).value;
    }
    return std::get<IndexOutcome>(a).index == std::get<IndexOutcome>(b).index;
}

DiscreteDistribution::DiscreteDistribution(std::vector<WeightedOutcome> support)
    : support_(std::move(support)) {
    if (support_.empty()) {
        throw InvalidInputError("distribution support must be non-empty");
    }
    double total = 0.0;
    for (const auto& wo : support_) {
        if (std::isnan(wo.prob) || wo.prob < 0.0) {
            throw InvalidInputError("outcome probabilities must be nonnegative");
        }
        total += wo.prob;
        if (const auto* sub = std::get_if<SubsetOutcome>(&wo.payload)) {
            if (!std::is_sorted(sub->items.begin(), sub->items.end()) ||
                std::adjacent_find(sub->items.begin(), sub->items.end()) != sub->items.end()) {
                throw InvalidInputError("subset payload items must be sorted and unique");
            }
        }
        if (const auto* sc = std::get_if<ScalarOutcome>(&wo.payload)) {
            if (std::isnan(sc->value) || sc->value < 0.0) {
                throw InvalidInputError("scalar payloads must be nonnegative");
            }
        }
    }
    if (std::abs(total - 1.0) > kProbTolerance) {
        std::ostringstream os;
        os << "outcome probabilities must sum to 1 (got " << total << ")";
        throw InvalidInputError(os.str());
    }
    for (std::size_t i = 0; i < support_.size(); ++i) {
        for (std::size_t j = i + 1; j < support_.size(); ++j) {
            if (payload_equal(support_[i].payload, support_[j].payload)) {
                throw InvalidInputError("payloads in a support must be pairwise distinct");
            }
        }
    }
}

int RandomStream::sample(const DiscreteDistribution& dist) {
    const double u = uniform01();
    double cum = 0.0;
    const int n = dist.size();
    for (int j = 0; j < n; ++j) {
        cum += dist.outcome(j).prob;
        if (u < cum) return j;
    }
    return n - 1; // u landed in the rounding slack past the last CDF step
}

double ConcaveOfSumObjective::value_at(double x) const {
    if (x <= 0.0) return 0.0;
    double prev_x = 0.0;
    double prev_y = 0.0;
    for (const auto& [bx, by] : breakpoints) {
        if (x <= bx) {
            return prev_y + (by - prev_y) * (x - prev_x) / (bx - prev_x);
        }
        prev_x = bx;
        prev_y = by;
    }
    if (breakpoints.empty()) return 0.0;
    // extend with the final slope
    double slope;
    if (breakpoints.size() == 1) {
        slope = prev_y / prev_x;
    } else {
        const auto& [ax, ay] = breakpoints[breakpoints.size() - 2];
        slope = (prev_y - ay) / (prev_x - ax);
    }
    return prev_y + slope * (x - prev_x);
}

std::vector<ElementId> PartialRealization::domain() const {
    std::vector<ElementId> ids;
    ids.reserve(assignment_.size());
    for (const auto& [id, _] : assignment_) ids.push_back(id);
    return ids;
}

namespace {

void validate_concave(const ConcaveOfSumObjective& obj) {
    double prev_x = 0.0;
    double prev_y = 0.0;
    double prev_slope = std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : obj.breakpoints) {
        if (!(x > prev_x)) {
            throw InvalidInputError("concave breakpoints must have strictly increasing x > 0");
        }
        if (std::isnan(y) || y < 0.0) {
            throw InvalidInputError("concave breakpoints must have nonnegative values");
        }
        const double slope = (y - prev_y) / (x - prev_x);
        if (slope < 0.0) {
            throw InvalidInputError("concave function must be nondecreasing (slope >= 0)");
        }
        if (slope > prev_slope + 1e-12) {
            throw InvalidInputError("concave breakpoints must have non-increasing slopes");
        }
        prev_slope = slope;
        prev_x = x;
        prev_y = y;
    }
}

} // namespace

Instance::Instance(std::vector<StochasticElement> elements, ObjectiveSpec objective)
    : elements_(std::move(elements)), objective_(std::move(objective)) {
    init_common(/*check_table=*/true);
}

Instance::Instance(std::vector<StochasticElement> elements, ObjectiveSpec objective, UncheckedTag)
    : elements_(std::move(elements)), objective_(std::move(objective)) {
    init_common(/*check_table=*/false);
}

Instance Instance::unchecked(std::vector<StochasticElement> elements, ObjectiveSpec objective) {
    return Instance(std::move(elements), std::move(objective), UncheckedTag{});
}

void Instance::init_common(bool check_table) {
    const int n = num_elements();
    for (int i = 0; i < n; ++i) {
        if (elements_[static_cast<std::size_t>(i)].id != i) {
            throw InvalidInputError("element ids must be dense 0..n-1 in order");
        }
    }

    // Payload kinds must match the objective kind.
    const std::size_t want_kind = objective_.index(); // coverage=0 -> subset=0, etc.
    for (const auto& el : elements_) {
        for (const auto& wo : el.dist.support()) {
            if (wo.payload.index() != want_kind) {
                throw InvalidInputError("payload kind '" + describe_payload_kind(wo.payload) +
                                        "' does not match the objective kind");
            }
        }
    }

    if (const auto* cov = std::get_if<CoverageObjective>(&objective_)) {
        if (cov->universe_size < 0) throw InvalidInputError("universe_size must be >= 0");
        if (!cov->weights.empty()) {
            if (static_cast<int>(cov->weights.size()) != cov->universe_size) {
                throw InvalidInputError("coverage weights must have universe_size entries");
            }
            for (double w : cov->weights) {
                if (std::isnan(w) || w < 0.0) {
                    throw InvalidInputError("coverage item weights must be nonnegative");
                }
            }
        }
        for (const auto& el : elements_) {
            for (const auto& wo : el.dist.support()) {
                for (int item : std::get<SubsetOutcome>(wo.payload).items) {
                    if (item < 0 || item >= cov->universe_size) {
                        throw InvalidInputError("subset payload item outside universe");
                    }
                }
            }
        }
    } else if (const auto* con = std::get_if<ConcaveOfSumObjective>(&objective_)) {
        validate_concave(*con);
    }

    // Mixed-radix layout over (support size + 1) digits.
    radix_prefix_.assign(static_cast<std::size_t>(n) + 1, 1);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t radix = static_cast<std::uint64_t>(support_size(i)) + 1;
        const std::uint64_t prev = radix_prefix_[static_cast<std::size_t>(i)];
        if (realization_space_fits_ && prev > (std::uint64_t{1} << 62) / radix) {
            realization_space_fits_ = false;
        }
        radix_prefix_[static_cast<std::size_t>(i) + 1] =
            realization_space_fits_ ? prev * radix : std::numeric_limits<std::uint64_t>::max();
    }
    realization_space_ = radix_prefix_[static_cast<std::size_t>(n)];

    if (const auto* table = std::get_if<TableObjective>(&objective_)) {
        if (!realization_space_fits_) {
            throw InvalidInputError("table objective requires a realization space that fits in 64 bits");
        }
        if (table->values.size() != realization_space_) {
            throw InvalidInputError("table objective must list one value per realization code");
        }
        for (double v : table->values) {
            if (std::isnan(v) || v < 0.0) {
                throw InvalidInputError("table values must be nonnegative");
            }
        }
        if (check_table) {
            // Forward-declared here to avoid a header cycle; defined in evaluate.cpp.
            extern void validate_table_objective_or_throw(const Instance&);
            validate_table_objective_or_throw(*this);
        }
    }

    // Precompute per-outcome fast-path data.
    mask_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) {
        mask_offsets_[static_cast<std::size_t>(i) + 1] =
            mask_offsets_[static_cast<std::size_t>(i)] + support_size(i);
    }
    const int total_outcomes = mask_offsets_[static_cast<std::size_t>(n)];
    if (is_coverage()) {
        coverage_words_ = (universe_size() + 63) / 64;
        coverage_masks_.assign(static_cast<std::size_t>(total_outcomes),
                               std::vector<std::uint64_t>(static_cast<std::size_t>(coverage_words_), 0));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < support_size(i); ++j) {
                auto& mask = coverage_masks_[static_cast<std::size_t>(mask_offsets_[static_cast<std::size_t>(i)] + j)];
                for (int item : std::get<SubsetOutcome>(dist(i).outcome(j).payload).items) {
                    mask[static_cast<std::size_t>(item / 64)] |= std::uint64_t{1} << (item % 64);
                }
            }
        }
    } else if (std::holds_alternative<ConcaveOfSumObjective>(objective_)) {
        scalar_payloads_.assign(static_cast<std::size_t>(total_outcomes), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < support_size(i); ++j) {
                scalar_payloads_[static_cast<std::size_t>(mask_offsets_[static_cast<std::size_t>(i)] + j)] =
                    std::get<ScalarOutcome>(dist(i).outcome(j).payload).value;
            }
        }
    }
}

const StochasticElement& Instance::element(ElementId id) const {
    if (id < 0 || id >= num_elements()) {
        throw InvalidInputError("unknown element id " + std::to_string(id));
    }
    return elements_[static_cast<std::size_t>(id)];
}

int Instance::universe_size() const {
    if (const auto* cov = std::get_if<CoverageObjective>(&objective_)) return cov->universe_size;
    return 0;
}

std::uint64_t Instance::encode(const PartialRealization& r) const {
    if (!realization_space_fits_) {
        throw InvalidInputError("realization space too large for 64-bit encoding");
    }
    std::uint64_t code = 0;
    for (const auto& [id, idx] : r.assignment()) {
        if (id < 0 || id >= num_elements()) {
            throw InvalidInputError("realization references unknown element id " + std::to_string(id));
        }
        if (idx < 0 || idx >= support_size(id)) {
            throw InvalidInputError("realization has out-of-range support index for element " +
                                    std::to_string(id));
        }
        code += radix_prefix_[static_cast<std::size_t>(id)] * static_cast<std::uint64_t>(idx + 1);
    }
    return code;
}

PartialRealization Instance::decode(std::uint64_t code) const {
    if (code >= realization_space_) {
        throw InvalidInputError("realization code out of range");
    }
    PartialRealization r;
    for (int i = 0; i < num_elements(); ++i) {
        const std::uint64_t radix = static_cast<std::uint64_t>(support_size(i)) + 1;
        const int digit = static_cast<int>(code % radix);
        code /= radix;
        if (digit > 0) r.assign(i, digit - 1);
    }
    return r;
}

double Instance::coverage_prob(ElementId id, int item) const {
    double p = 0.0;
    for (int j = 0; j < support_size(id); ++j) {
        const auto& mask = coverage_mask(id, j);
        if (mask[static_cast<std::size_t>(item / 64)] >> (item % 64) & 1) {
            p += dist(id).outcome(j).prob;
        }
    }
    return p;
}

} // namespace stosub
