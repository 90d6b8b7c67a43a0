#include "stosub/evaluate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace stosub {

namespace detail {

double eval_f_dense(const Instance& inst, std::span<const int> outcome_idx) {
    const int n = inst.num_elements();
    if (const auto* cov = std::get_if<CoverageObjective>(&inst.objective())) {
        const int words = inst.coverage_words();
        thread_local std::vector<std::uint64_t> acc;
        acc.assign(static_cast<std::size_t>(words), 0);
        for (int i = 0; i < n; ++i) {
            const int idx = outcome_idx[static_cast<std::size_t>(i)];
            if (idx < 0) continue;
            const auto& mask = inst.coverage_mask(i, idx);
            for (int w = 0; w < words; ++w) acc[static_cast<std::size_t>(w)] |= mask[static_cast<std::size_t>(w)];
        }
        if (cov->weights.empty()) {
            double covered = 0.0;
            for (int w = 0; w < words; ++w) covered += std::popcount(acc[static_cast<std::size_t>(w)]);
            return covered;
        }
        double total = 0.0;
        for (int w = 0; w < words; ++w) {
            std::uint64_t bits = acc[static_cast<std::size_t>(w)];
            while (bits) {
                const int b = std::countr_zero(bits);
                bits &= bits - 1;
                total += cov->weights[static_cast<std::size_t>(w * 64 + b)];
            }
        }
        return total;
    }
    if (const auto* con = std::get_if<ConcaveOfSumObjective>(&inst.objective())) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const int idx = outcome_idx[static_cast<std::size_t>(i)];
            if (idx >= 0) sum += inst.scalar_payload(i, idx);
        }
        return con->value_at(sum);
    }
    const auto& table = std::get<TableObjective>(inst.objective());
    std::uint64_t code = 0;
    std::uint64_t prefix = 1;
    for (int i = 0; i < n; ++i) {
        const int idx = outcome_idx[static_cast<std::size_t>(i)];
        if (idx >= 0) code += prefix * static_cast<std::uint64_t>(idx + 1);
        prefix *= static_cast<std::uint64_t>(inst.support_size(i)) + 1;
    }
    return table.values[static_cast<std::size_t>(code)];
}

std::uint64_t enumeration_size(const Instance& inst, const std::vector<ElementId>& free_elements) {
    std::uint64_t size = 1;
    for (ElementId i : free_elements) {
        const std::uint64_t s = static_cast<std::uint64_t>(inst.support_size(i));
        if (size > (std::uint64_t{1} << 62) / s) return std::numeric_limits<std::uint64_t>::max();
        size *= s;
    }
    return size;
}

namespace {

std::vector<int> to_dense(const Instance& inst, const PartialRealization& r) {
    std::vector<int> dense(static_cast<std::size_t>(inst.num_elements()), -1);
    for (const auto& [id, idx] : r.assignment()) {
        if (id < 0 || id >= inst.num_elements()) {
            throw InvalidInputError("invalid realization: unknown element id " + std::to_string(id));
        }
        if (idx < 0 || idx >= inst.support_size(id)) {
            throw InvalidInputError("invalid realization: out-of-range support index for element " +
                                    std::to_string(id));
        }
        dense[static_cast<std::size_t>(id)] = idx;
    }
    return dense;
}

void check_element_set(const Instance& inst, const std::vector<ElementId>& S) {
    for (ElementId i : S) {
        if (i < 0 || i >= inst.num_elements()) {
            throw InvalidInputError("unknown element id " + std::to_string(i));
        }
    }
}

void throw_cap_exceeded(std::uint64_t need, std::uint64_t cap) {
    std::ostringstream os;
    os << "exact enumeration needs " << need << " scenarios, above the cap of " << cap
       << "; use Monte Carlo evaluation (expected_value_mc / --samples) instead";
    throw CapExceededError(os.str());
}

/// Sum of weight(r) * f(r) over all joint outcomes of `free_elements`,
/// starting from the fixed assignment in `dense`.
double enumerate_expectation(const Instance& inst, std::vector<int>& dense,
                             const std::vector<ElementId>& free_elements) {
    if (free_elements.empty()) return detail::eval_f_dense(inst, dense);
    const std::size_t m = free_elements.size();
    std::vector<int> odo(m, 0);
    for (std::size_t k = 0; k < m; ++k) dense[static_cast<std::size_t>(free_elements[k])] = 0;
    double total = 0.0;
    for (;;) {
        double w = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            w *= inst.dist(free_elements[k]).outcome(odo[k]).prob;
        }
        if (w != 0.0) total += w * detail::eval_f_dense(inst, dense);
        // advance the odometer
        std::size_t k = 0;
        while (k < m) {
            const ElementId id = free_elements[k];
            if (++odo[k] < inst.support_size(id)) {
                dense[static_cast<std::size_t>(id)] = odo[k];
                break;
            }
            odo[k] = 0;
            dense[static_cast<std::size_t>(id)] = 0;
            ++k;
        }
        if (k == m) break;
    }
    for (std::size_t k = 0; k < m; ++k) dense[static_cast<std::size_t>(free_elements[k])] = -1;
    return total;
}

} // namespace

} // namespace detail

double eval_f(const Instance& inst, const PartialRealization& r) {
    const std::vector<int> dense = detail::to_dense(inst, r);
    return detail::eval_f_dense(inst, dense);
}

double expected_value_exact(const Instance& inst, const std::vector<ElementId>& S,
                            const EnumerationCaps& caps) {
    detail::check_element_set(inst, S);
    const std::uint64_t need = detail::enumeration_size(inst, S);
    if (need > caps.max_scenarios) detail::throw_cap_exceeded(need, caps.max_scenarios);
    std::vector<int> dense(static_cast<std::size_t>(inst.num_elements()), -1);
    return detail::enumerate_expectation(inst, dense, S);
}

McEstimate expected_value_mc(const Instance& inst, const std::vector<ElementId>& S,
                             int samples, RandomStream& rng) {
    detail::check_element_set(inst, S);
    if (samples < 2) throw InvalidInputError("expected_value_mc requires samples >= 2");
    std::vector<int> dense(static_cast<std::size_t>(inst.num_elements()), -1);
    double sum = 0.0;
    double sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
        for (ElementId i : S) dense[static_cast<std::size_t>(i)] = rng.sample(inst.dist(i));
        const double v = detail::eval_f_dense(inst, dense);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / samples;
    const double var = std::max(0.0, (sumsq - samples * mean * mean) / (samples - 1));
    return {mean, 1.96 * std::sqrt(var / samples)};
}

double conditional_expected_value(const Instance& inst, const std::vector<ElementId>& S,
                                  const PartialRealization& t, const EnumerationCaps& caps) {
    detail::check_element_set(inst, S);
    const std::vector<int> t_dense = detail::to_dense(inst, t);
    std::vector<int> dense(static_cast<std::size_t>(inst.num_elements()), -1);
    std::vector<ElementId> free_elements;
    for (ElementId i : S) {
        if (t_dense[static_cast<std::size_t>(i)] >= 0) {
            dense[static_cast<std::size_t>(i)] = t_dense[static_cast<std::size_t>(i)];
        } else {
            free_elements.push_back(i);
        }
    }
    const std::uint64_t need = detail::enumeration_size(inst, free_elements);
    if (need > caps.max_scenarios) detail::throw_cap_exceeded(need, caps.max_scenarios);
    return detail::enumerate_expectation(inst, dense, free_elements);
}

double marginal_conditional(const Instance& inst, const std::vector<ElementId>& S_prev,
                            const PartialRealization& s_prev, ElementId i) {
    if (i < 0 || i >= inst.num_elements()) {
        throw InvalidInputError("unknown element id " + std::to_string(i));
    }
    if (s_prev.has(i)) {
        throw InvalidInputError("element " + std::to_string(i) + " is already chosen");
    }
    if (s_prev.size() != S_prev.size()) {
        throw InvalidInputError("marginal_conditional requires dom(s_prev) == S_prev");
    }
    for (ElementId j : S_prev) {
        if (!s_prev.has(j)) {
            throw InvalidInputError("marginal_conditional requires dom(s_prev) == S_prev");
        }
    }
    std::vector<int> dense = detail::to_dense(inst, s_prev);
    const double base = detail::eval_f_dense(inst, dense);
    double expected = 0.0;
    for (int x = 0; x < inst.support_size(i); ++x) {
        const double p = inst.dist(i).outcome(x).prob;
        if (p == 0.0) continue;
        dense[static_cast<std::size_t>(i)] = x;
        expected += p * detail::eval_f_dense(inst, dense);
    }
    return expected - base;
}

double multilinear_extension(const Instance& inst, const FractionalPoint& y, ExtensionMode mode,
                             int samples, RandomStream* rng, const EnumerationCaps& caps) {
    const int n = inst.num_elements();
    if (static_cast<int>(y.size()) != n) {
        throw InvalidInputError("fractional point dimension does not match the instance");
    }
    for (double yi : y) {
        if (std::isnan(yi) || yi < -1e-12 || yi > 1.0 + 1e-12) {
            throw InvalidInputError("fractional point coordinates must lie in [0,1]");
        }
    }

    if (mode == ExtensionMode::MonteCarlo) {
        if (rng == nullptr || samples < 1) {
            throw InvalidInputError("Monte Carlo extension needs samples >= 1 and an RNG stream");
        }
        std::vector<int> dense(static_cast<std::size_t>(n), -1);
        double sum = 0.0;
        for (int s = 0; s < samples; ++s) {
            for (int i = 0; i < n; ++i) {
                const bool in = rng->uniform01() < y[static_cast<std::size_t>(i)];
                dense[static_cast<std::size_t>(i)] = in ? rng->sample(inst.dist(i)) : -1;
            }
            sum += detail::eval_f_dense(inst, dense);
        }
        return sum / samples;
    }

    // Exact mode: condition on the random set restricted to fractional
    // coordinates; coordinates at 1 are always in, at 0 never.
    std::vector<ElementId> always;
    std::vector<ElementId> fractional;
    for (int i = 0; i < n; ++i) {
        const double yi = y[static_cast<std::size_t>(i)];
        if (yi >= 1.0 - 1e-15) {
            always.push_back(i);
        } else if (yi > 1e-15) {
            fractional.push_back(i);
        }
    }
    if (fractional.size() >= 62) detail::throw_cap_exceeded(std::numeric_limits<std::uint64_t>::max(), caps.max_scenarios);
    // total work = prod_{always} s_i * prod_{fractional} (1 + s_i)
    std::uint64_t work = detail::enumeration_size(inst, always);
    for (ElementId i : fractional) {
        const std::uint64_t f = static_cast<std::uint64_t>(inst.support_size(i)) + 1;
        if (work > (std::uint64_t{1} << 62) / f) {
            work = std::numeric_limits<std::uint64_t>::max();
            break;
        }
        work *= f;
    }
    if (work > caps.max_scenarios) detail::throw_cap_exceeded(work, caps.max_scenarios);

    double total = 0.0;
    std::vector<ElementId> members = always;
    const std::uint64_t subsets = std::uint64_t{1} << fractional.size();
    for (std::uint64_t bits = 0; bits < subsets; ++bits) {
        double w = 1.0;
        members.resize(always.size());
        for (std::size_t k = 0; k < fractional.size(); ++k) {
            const double yk = y[static_cast<std::size_t>(fractional[k])];
            if (bits >> k & 1) {
                w *= yk;
                members.push_back(fractional[k]);
            } else {
                w *= 1.0 - yk;
            }
        }
        if (w != 0.0) total += w * expected_value_exact(inst, members, caps);
    }
    return total;
}

double coverage_closed_form(const Instance& inst, const std::vector<ElementId>& S) {
    const auto* cov = std::get_if<CoverageObjective>(&inst.objective());
    if (cov == nullptr) throw InvalidInputError("coverage_closed_form requires a coverage objective");
    detail::check_element_set(inst, S);
    double total = 0.0;
    for (int u = 0; u < cov->universe_size; ++u) {
        double miss = 1.0;
        for (ElementId i : S) miss *= 1.0 - inst.coverage_prob(i, u);
        total += cov->item_weight(u) * (1.0 - miss);
    }
    return total;
}

double coverage_closed_form(const Instance& inst, const FractionalPoint& y) {
    const auto* cov = std::get_if<CoverageObjective>(&inst.objective());
    if (cov == nullptr) throw InvalidInputError("coverage_closed_form requires a coverage objective");
    if (static_cast<int>(y.size()) != inst.num_elements()) {
        throw InvalidInputError("fractional point dimension does not match the instance");
    }
    double total = 0.0;
    for (int u = 0; u < cov->universe_size; ++u) {
        double miss = 1.0;
        for (int i = 0; i < inst.num_elements(); ++i) {
            miss *= 1.0 - y[static_cast<std::size_t>(i)] * inst.coverage_prob(i, u);
        }
        total += cov->item_weight(u) * (1.0 - miss);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::vector<ElementId> bitmask_to_set(std::uint32_t mask) {
    std::vector<ElementId> out;
    for (int i = 0; mask; ++i, mask >>= 1) {
        if (mask & 1) out.push_back(i);
    }
    return out;
}

/// f restricted to the subset `mask` of a full realization.
double restricted_value(const Instance& inst, const std::vector<int>& full, std::uint32_t mask,
                        std::vector<int>& scratch) {
    const int n = inst.num_elements();
    for (int i = 0; i < n; ++i) {
        scratch[static_cast<std::size_t>(i)] = (mask >> i & 1) ? full[static_cast<std::size_t>(i)] : -1;
    }
    return detail::eval_f_dense(inst, scratch);
}

/// Checks the pairwise diminishing-returns condition and monotonicity of
/// the restriction of `full` to element subsets. Returns a violation if
/// one exists. The pairwise condition
///   f(A+i+j) - f(A+j) <= f(A+i) - f(A)
/// is equivalent to submodularity over all S subseteq T.
std::optional<ObjectiveViolation> check_full_realization(const Instance& inst,
                                                         const std::vector<int>& full,
                                                         std::uint64_t code) {
    const int n = inst.num_elements();
    std::vector<int> scratch(static_cast<std::size_t>(n), -1);
    std::vector<double> value(std::size_t{1} << n, 0.0);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        value[mask] = restricted_value(inst, full, mask, scratch);
    }
    constexpr double tol = 1e-9;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        for (int j = 0; j < n; ++j) {
            if (mask >> j & 1) continue;
            const std::uint32_t with_j = mask | (std::uint32_t{1} << j);
            if (value[with_j] < value[mask] - tol) {
                return ObjectiveViolation{"monotonicity", bitmask_to_set(mask), bitmask_to_set(with_j),
                                          j, code, value[with_j], value[mask]};
            }
            for (int i = 0; i < n; ++i) {
                if (i == j || (mask >> i & 1)) continue;
                const std::uint32_t with_i = mask | (std::uint32_t{1} << i);
                const std::uint32_t with_both = with_i | with_j;
                const double lhs = value[with_both] - value[with_i];
                const double rhs = value[with_j] - value[mask];
                if (lhs > rhs + tol) {
                    return ObjectiveViolation{"submodularity", bitmask_to_set(mask),
                                              bitmask_to_set(with_i), j, code, lhs, rhs};
                }
            }
        }
    }
    return std::nullopt;
}

} // namespace

std::string ObjectiveViolation::describe() const {
    std::ostringstream os;
    os << kind << " violated at realization code " << realization_code << ": S={";
    for (std::size_t k = 0; k < smaller_set.size(); ++k) os << (k ? "," : "") << smaller_set[k];
    os << "} T={";
    for (std::size_t k = 0; k < larger_set.size(); ++k) os << (k ? "," : "") << larger_set[k];
    os << "} j=" << added_element << " lhs=" << lhs << " rhs=" << rhs;
    return os.str();
}

namespace {

/// One sampled monotonicity + diminishing-returns probe on the
/// restriction of `full`; used when exhaustive checking is capped out.
std::optional<ObjectiveViolation> spot_probe(const Instance& inst, const std::vector<int>& full,
                                             std::uint64_t code, RandomStream& rng,
                                             std::vector<int>& scratch) {
    const int n = inst.num_elements();
    if (n < 2) return std::nullopt;
    int i = rng.uniform_int(n);
    int j = rng.uniform_int(n);
    if (i == j) j = (j + 1) % n;
    std::vector<ElementId> base_set;
    std::fill(scratch.begin(), scratch.end(), -1);
    for (int e = 0; e < n; ++e) {
        if (e != i && e != j && rng.uniform01() < 0.5) {
            scratch[static_cast<std::size_t>(e)] = full[static_cast<std::size_t>(e)];
            base_set.push_back(e);
        }
    }
    const double v0 = detail::eval_f_dense(inst, scratch);
    scratch[static_cast<std::size_t>(i)] = full[static_cast<std::size_t>(i)];
    const double vi = detail::eval_f_dense(inst, scratch);
    scratch[static_cast<std::size_t>(j)] = full[static_cast<std::size_t>(j)];
    const double vij = detail::eval_f_dense(inst, scratch);
    scratch[static_cast<std::size_t>(i)] = -1;
    const double vj = detail::eval_f_dense(inst, scratch);
    scratch[static_cast<std::size_t>(j)] = -1;

    auto with = [&](ElementId e) {
        std::vector<ElementId> s = base_set;
        s.push_back(e);
        std::sort(s.begin(), s.end());
        return s;
    };
    constexpr double tol = 1e-9;
    if (vj < v0 - tol) {
        return ObjectiveViolation{"monotonicity", base_set, with(j), j, code, vj, v0};
    }
    if (vij - vi > vj - v0 + tol) {
        return ObjectiveViolation{"submodularity", base_set, with(i), j, code, vij - vi, vj - v0};
    }
    return std::nullopt;
}

} // namespace

ValidationReport validate_objective(const Instance& inst, const EnumerationCaps& caps,
                                    std::uint64_t spot_seed, int spot_samples) {
    const int n = inst.num_elements();
    std::vector<ElementId> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    const std::uint64_t space = detail::enumeration_size(inst, all);

    ValidationReport report;
    if (n <= 20 && space <= caps.max_scenarios &&
        (space << n) >> n == space && (space << n) <= caps.max_scenarios * 64) {
        // Exhaustive: every full realization via an odometer.
        std::vector<int> full(static_cast<std::size_t>(n), 0);
        std::uint64_t checked = 0;
        for (;;) {
            PartialRealization r;
            for (int i = 0; i < n; ++i) r.assign(i, full[static_cast<std::size_t>(i)]);
            auto violation = check_full_realization(inst, full, inst.encode(r));
            ++checked;
            if (violation) {
                report.valid = false;
                report.partial = false;
                report.realizations_checked = checked;
                report.message = violation->describe();
                report.violation = std::move(violation);
                return report;
            }
            int k = 0;
            while (k < n && ++full[static_cast<std::size_t>(k)] >= inst.support_size(k)) {
                full[static_cast<std::size_t>(k)] = 0;
                ++k;
            }
            if (k == n) break;
        }
        report.valid = true;
        report.partial = false;
        report.realizations_checked = checked;
        report.message = "objective is monotone submodular on all realizations";
        return report;
    }

    // Spot check: sampled realizations, one sampled probe per sample.
    RandomStream rng(derive_stream_seed(spot_seed, 0x76616c)); // "val"
    std::vector<int> full(static_cast<std::size_t>(n), 0);
    std::vector<int> scratch(static_cast<std::size_t>(n), -1);
    for (int s = 0; s < spot_samples; ++s) {
        std::uint64_t code = 0;
        std::uint64_t prefix = 1;
        for (int i = 0; i < n; ++i) {
            full[static_cast<std::size_t>(i)] = rng.sample(inst.dist(i));
            if (inst.realization_space_fits()) {
                code += prefix * static_cast<std::uint64_t>(full[static_cast<std::size_t>(i)] + 1);
                prefix *= static_cast<std::uint64_t>(inst.support_size(i)) + 1;
            }
        }
        auto violation = spot_probe(inst, full, code, rng, scratch);
        if (violation) {
            report.valid = false;
            report.partial = true;
            report.realizations_checked = static_cast<std::uint64_t>(s + 1);
            report.message = "partial validation: " + violation->describe();
            report.violation = std::move(violation);
            return report;
        }
    }
    report.valid = true;
    report.partial = true;
    report.realizations_checked = static_cast<std::uint64_t>(spot_samples);
    report.message = "partial validation: no violation found in sampled realizations";
    return report;
}

void validate_table_objective_or_throw(const Instance& inst) {
    const auto report = validate_objective(inst);
    if (!report.valid) {
        throw InvalidInputError("table objective is not monotone submodular: " + report.message);
    }
}

} // namespace stosub
