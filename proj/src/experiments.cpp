#include "stosub/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "stosub/errors.hpp"
#include "stosub/policies.hpp"
#include "stosub/rng.hpp"

namespace stosub {

namespace {

McEstimate estimate_from_values(const std::vector<double>& values) {
    const std::size_t r = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(r);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = r > 1 ? var / static_cast<double>(r - 1) : 0.0;
    if (var < 0.0) var = 0.0;
    McEstimate est;
    est.estimate = mean;
    est.ci_halfwidth_95 = 1.96 * std::sqrt(var / static_cast<double>(r));
    return est;
}

void require_replicates(int replicates) {
    if (replicates < 30) {
        throw InvalidInputError("confidence intervals need at least 30 replicates, got " +
                                std::to_string(replicates));
    }
}

std::vector<int> draw_coverage_subset(RandomStream& rng, int universe) {
    std::vector<int> items;
    for (int u = 0; u < universe; ++u) {
        if (rng.uniform01() < 0.35) items.push_back(u);
    }
    return items;
}

std::vector<double> draw_probabilities(RandomStream& rng, int support_size) {
    std::vector<double> probs(static_cast<std::size_t>(support_size));
    double total = 0.0;
    for (double& p : probs) {
        p = 0.05 + rng.uniform01();
        total += p;
    }
    double partial = 0.0;
    for (int i = 0; i + 1 < support_size; ++i) {
        probs[static_cast<std::size_t>(i)] /= total;
        partial += probs[static_cast<std::size_t>(i)];
    }
    probs[static_cast<std::size_t>(support_size) - 1] = 1.0 - partial;
    return probs;
}

std::vector<StochasticElement> draw_coverage_elements(RandomStream& rng, int n, int support_size,
                                                      int universe) {
    std::vector<StochasticElement> elements;
    elements.reserve(static_cast<std::size_t>(n));
    for (ElementId id = 0; id < n; ++id) {
        std::vector<WeightedOutcome> support;
        const std::vector<double> probs = draw_probabilities(rng, support_size);
        for (int x = 0; x < support_size; ++x) {
            std::vector<int> items = draw_coverage_subset(rng, universe);
            for (int attempt = 0; attempt < 64; ++attempt) {
                const bool duplicate = std::any_of(
                    support.begin(), support.end(), [&](const WeightedOutcome& w) {
                        return payload_equal(w.payload, OutcomePayload(SubsetOutcome{items}));
                    });
                if (!duplicate) break;
                // Nudge the subset by toggling one item, keeping it sorted.
                const int item = attempt % universe;
                const auto it = std::lower_bound(items.begin(), items.end(), item);
                if (it != items.end() && *it == item) {
                    items.erase(it);
                } else {
                    items.insert(it, item);
                }
            }
            support.push_back(
                WeightedOutcome{SubsetOutcome{std::move(items)}, probs[static_cast<std::size_t>(x)]});
        }
        elements.push_back(StochasticElement{id, DiscreteDistribution(std::move(support))});
    }
    return elements;
}

Matroid draw_matroid(RandomStream& rng, int n, MatroidKind kind, int max_rank) {
    const int rank_cap = std::max(1, std::min(max_rank, n));
    switch (kind) {
        case MatroidKind::Uniform:
            return Matroid::uniform(n, 1 + rng.uniform_int(rank_cap));
        case MatroidKind::Partition: {
            for (int attempt = 0; attempt < 50; ++attempt) {
                const int parts = 1 + rng.uniform_int(std::min(n, 4));
                std::vector<int> part_of(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) part_of[static_cast<std::size_t>(i)] = rng.uniform_int(parts);
                std::vector<int> capacities(static_cast<std::size_t>(parts));
                for (int p = 0; p < parts; ++p) capacities[static_cast<std::size_t>(p)] = 1 + rng.uniform_int(2);
                Matroid m = Matroid::partition(std::move(part_of), std::move(capacities));
                if (m.rank() >= 1 && m.rank() <= rank_cap) return m;
            }
            // Degenerate fallback: one part holding everything.
            return Matroid::partition(std::vector<int>(static_cast<std::size_t>(n), 0),
                                      std::vector<int>{rank_cap});
        }
        case MatroidKind::Explicit: {
            if (n > 16) {
                throw InvalidInputError("explicit matroid generation supports at most 16 elements");
            }
            const Matroid base = draw_matroid(
                rng, n, rng.uniform01() < 0.5 ? MatroidKind::Uniform : MatroidKind::Partition,
                max_rank);
            const int truncation = 1 + rng.uniform_int(rank_cap);
            std::vector<std::vector<ElementId>> sets;
            for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                std::vector<ElementId> set;
                for (int i = 0; i < n; ++i) {
                    if (mask & (1u << i)) set.push_back(i);
                }
                if (static_cast<int>(set.size()) > truncation) continue;
                if (base.is_independent(set)) sets.push_back(std::move(set));
            }
            return Matroid::explicit_family(n, sets);
        }
    }
    throw InvalidInputError("unknown matroid kind");
}

}  // namespace

std::pair<Instance, Matroid> gen_random_instance(const GeneratorConfig& config) {
    if (config.n < 1) throw InvalidInputError("instance needs at least one element");
    if (config.support_size < 1) throw InvalidInputError("support size must be positive");
    if (config.max_rank < 1) throw InvalidInputError("max rank must be positive");
    RandomStream rng = RandomStream::substream(config.seed, 0);
    const int n = config.n;

    switch (config.objective) {
        case ObjectiveKind::Coverage: {
            const int universe = config.universe_size > 0 ? config.universe_size : 2 * n;
            std::vector<StochasticElement> elements =
                draw_coverage_elements(rng, n, config.support_size, universe);
            CoverageObjective objective;
            objective.universe_size = universe;
            if (rng.uniform01() < 0.5) {
                objective.weights.resize(static_cast<std::size_t>(universe));
                for (double& w : objective.weights) w = 0.5 + rng.uniform01();
            }
            Matroid m = draw_matroid(rng, n, config.matroid, config.max_rank);
            return {Instance(std::move(elements), std::move(objective)), std::move(m)};
        }
        case ObjectiveKind::ConcaveSum: {
            std::vector<StochasticElement> elements;
            elements.reserve(static_cast<std::size_t>(n));
            for (ElementId id = 0; id < n; ++id) {
                const std::vector<double> probs = draw_probabilities(rng, config.support_size);
                std::vector<WeightedOutcome> support;
                for (int x = 0; x < config.support_size; ++x) {
                    double value = 0.1 + rng.uniform01();
                    const bool duplicate = std::any_of(
                        support.begin(), support.end(), [&](const WeightedOutcome& w) {
                            return payload_equal(w.payload, OutcomePayload(ScalarOutcome{value}));
                        });
                    if (duplicate) value += 1e-6;
                    support.push_back(
                        WeightedOutcome{ScalarOutcome{value}, probs[static_cast<std::size_t>(x)]});
                }
                elements.push_back(StochasticElement{id, DiscreteDistribution(std::move(support))});
            }
            // Concave piecewise-linear curve: decreasing positive slopes.
            const int segments = 2 + rng.uniform_int(2);
            std::vector<double> slopes(static_cast<std::size_t>(segments));
            for (double& s : slopes) s = 0.2 + rng.uniform01();
            std::sort(slopes.rbegin(), slopes.rend());
            ConcaveOfSumObjective objective;
            double x = 0.0;
            double u = 0.0;
            for (int seg = 0; seg < segments; ++seg) {
                const double gap = 0.3 + rng.uniform01();
                x += gap;
                u += slopes[static_cast<std::size_t>(seg)] * gap;
                objective.breakpoints.emplace_back(x, u);
            }
            Matroid m = draw_matroid(rng, n, config.matroid, config.max_rank);
            return {Instance(std::move(elements), std::move(objective)), std::move(m)};
        }
        case ObjectiveKind::Table: {
            // Tabulate a hidden weighted-coverage function, so the table is
            // monotone submodular by construction.
            const int universe = config.universe_size > 0 ? config.universe_size : 2 * n;
            std::vector<StochasticElement> hidden =
                draw_coverage_elements(rng, n, config.support_size, universe);
            std::vector<double> weights(static_cast<std::size_t>(universe));
            for (double& w : weights) w = 0.5 + rng.uniform01();

            std::uint64_t space = 1;
            for (int i = 0; i < n; ++i) {
                space *= static_cast<std::uint64_t>(config.support_size) + 1;
                if (space > 1'000'000) {
                    throw InvalidInputError("table objective would exceed 1e6 entries");
                }
            }
            Instance hidden_inst(std::move(hidden),
                                 CoverageObjective{universe, std::move(weights)});
            TableObjective table;
            table.values.reserve(space);
            std::vector<int> view(static_cast<std::size_t>(n), -1);
            for (std::uint64_t code = 0;; ++code) {
                table.values.push_back(detail::eval_f_dense(hidden_inst, view));
                if (code + 1 == space) break;
                for (int i = 0; i < n; ++i) {
                    int& digit = view[static_cast<std::size_t>(i)];
                    if (digit + 2 <= config.support_size) {
                        ++digit;
                        break;
                    }
                    digit = -1;
                }
            }
            std::vector<StochasticElement> elements;
            elements.reserve(static_cast<std::size_t>(n));
            for (ElementId id = 0; id < n; ++id) {
                std::vector<WeightedOutcome> support;
                for (int x = 0; x < config.support_size; ++x) {
                    support.push_back(WeightedOutcome{
                        IndexOutcome{x},
                        hidden_inst.dist(id).outcome(x).prob});
                }
                elements.push_back(StochasticElement{id, DiscreteDistribution(std::move(support))});
            }
            Matroid m = draw_matroid(rng, n, config.matroid, config.max_rank);
            return {Instance(std::move(elements), std::move(table)), std::move(m)};
        }
    }
    throw InvalidInputError("unknown objective kind");
}

double tight_nonadaptive_value(int n) {
    if (n < 2) throw InvalidInputError("the hard coverage family needs n >= 2");
    const double miss = std::pow(1.0 - 1.0 / n, n);
    return (1.0 - miss) * n;
}

double tight_adaptive_oracle(int n) {
    if (n < 2) throw InvalidInputError("the hard coverage family needs n >= 2");
    const int trials = n * n;
    const double p = 1.0 / n;
    const double logp = std::log(p);
    const double logq = std::log1p(-p);
    const double lg_trials = std::lgamma(static_cast<double>(trials) + 1.0);
    double total = 0.0;
    for (int y = 0; y <= trials; ++y) {
        const double logpmf = lg_trials - std::lgamma(static_cast<double>(y) + 1.0) -
                              std::lgamma(static_cast<double>(trials - y) + 1.0) +
                              y * logp + (trials - y) * logq;
        total += std::min(n, y) * std::exp(logpmf);
    }
    return total;
}

McEstimate run_tight_adaptive(int n, int replicates, std::uint64_t seed) {
    if (n < 2) throw InvalidInputError("the hard coverage family needs n >= 2");
    require_replicates(replicates);
    const double p = 1.0 / n;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
        RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(r));
        int budget = n * n;
        int covered = 0;
        for (int collection = 0; collection < n && budget > 0; ++collection) {
            for (int copy = 0; copy < n * n && budget > 0; ++copy) {
                --budget;
                if (rng.uniform01() < p) {
                    ++covered;
                    break;
                }
            }
        }
        values.push_back(static_cast<double>(covered));
    }
    return estimate_from_values(values);
}

std::pair<Instance, Matroid> materialize_tight_example(int n) {
    if (n < 2 || n > 6) {
        throw InvalidInputError(
            "materialized hard coverage family supports 2 <= n <= 6 (n^3 elements)");
    }
    const double p = 1.0 / n;
    std::vector<StochasticElement> elements;
    elements.reserve(static_cast<std::size_t>(n) * n * n);
    for (int collection = 0; collection < n; ++collection) {
        for (int copy = 0; copy < n * n; ++copy) {
            const ElementId id = collection * n * n + copy;
            std::vector<WeightedOutcome> support;
            support.push_back(WeightedOutcome{SubsetOutcome{{collection}}, p});
            support.push_back(WeightedOutcome{SubsetOutcome{{}}, 1.0 - p});
            elements.push_back(StochasticElement{id, DiscreteDistribution(std::move(support))});
        }
    }
    CoverageObjective objective;
    objective.universe_size = n;
    Instance inst(std::move(elements), std::move(objective));
    Matroid m = Matroid::uniform(n * n * n, n * n);
    return {std::move(inst), std::move(m)};
}

double tight_scanning_value(int n, const std::vector<int>& outcome_of) {
    if (static_cast<int>(outcome_of.size()) != n * n * n) {
        throw InvalidInputError("fixed realization must cover all n^3 elements");
    }
    int budget = n * n;
    int covered = 0;
    for (int collection = 0; collection < n && budget > 0; ++collection) {
        for (int copy = 0; copy < n * n && budget > 0; ++copy) {
            --budget;
            // Support index 0 is the success outcome covering `collection`.
            if (outcome_of[static_cast<std::size_t>(collection * n * n + copy)] == 0) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered);
}

double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

namespace {

std::string format_cell(double value) {
    if (std::isnan(value)) return "";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
    std::vector<ExperimentRow> rows = report.rows;
    std::sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
        if (a.config_id != b.config_id) return a.config_id < b.config_id;
        if (a.n != b.n) return a.n < b.n;
        return a.policy < b.policy;
    });
    std::string out = "config_id,n,policy,analytic_value,mc_mean,mc_ci95,replicates,seed,ratio\n";
    for (const ExperimentRow& row : rows) {
        out += row.config_id;
        out += ',';
        out += std::to_string(row.n);
        out += ',';
        out += row.policy;
        out += ',';
        out += format_cell(row.analytic_value);
        out += ',';
        out += format_cell(row.mc_mean);
        out += ',';
        out += format_cell(row.mc_ci95);
        out += ',';
        out += std::to_string(row.replicates);
        out += ',';
        out += std::to_string(row.seed);
        out += ',';
        out += format_cell(row.ratio);
        out += '\n';
    }
    return out;
}

ExperimentReport gap_experiment(const std::vector<int>& n_list, int replicates,
                                std::uint64_t seed) {
    require_replicates(replicates);
    ExperimentReport report;
    for (int n : n_list) {
        const double analytic = tight_nonadaptive_value(n);
        const McEstimate adaptive = run_tight_adaptive(n, replicates, seed);
        ExperimentRow row;
        row.config_id = "tight_gap";
        row.n = n;
        row.policy = "scanning_adaptive";
        row.analytic_value = analytic;
        row.mc_mean = adaptive.estimate;
        row.mc_ci95 = adaptive.ci_halfwidth_95;
        row.replicates = replicates;
        row.seed = seed;
        row.ratio = adaptive.estimate / analytic;
        report.rows.push_back(std::move(row));
    }
    return report;
}

ExperimentReport compare_policies(const Instance& inst, const Matroid& m,
                                  const std::vector<std::string>& policies, int replicates,
                                  std::uint64_t seed, const EnumerationCaps& caps,
                                  const ComparePolicyOptions& options) {
    require_replicates(replicates);
    const int n = inst.num_elements();
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
        const std::string& policy = policies[pi];
        if (policy != "myopic" && policy != "greedy" && policy != "continuous") {
            throw InvalidInputError("unsupported policy '" + policy +
                                    "' (expected myopic, greedy, or continuous)");
        }
        if (std::find(policies.begin(), policies.begin() + static_cast<std::ptrdiff_t>(pi),
                      policy) != policies.begin() + static_cast<std::ptrdiff_t>(pi)) {
            throw InvalidInputError("duplicate policy '" + policy + "'");
        }
    }

    const bool exact_ok =
        inst.realization_space_fits() && inst.realization_space_size() <= caps.max_scenarios;

    // Non-adaptive policies commit to their set once, before any replicate.
    std::vector<ElementId> greedy_set;
    if (std::find(policies.begin(), policies.end(), "greedy") != policies.end()) {
        EvalSettings settings;
        settings.caps = caps;
        if (exact_ok) {
            settings.kind = EvaluatorKind::Exact;
        } else if (inst.is_coverage()) {
            settings.kind = EvaluatorKind::ClosedForm;
        } else {
            settings.kind = EvaluatorKind::MonteCarlo;
            settings.samples = 2000;
            settings.seed = derive_stream_seed(seed, 0x67726565);  // greedy's own substream root
        }
        greedy_set = greedy_nonadaptive(inst, m, settings);
    }
    std::vector<ElementId> continuous_set;
    if (std::find(policies.begin(), policies.end(), "continuous") != policies.end()) {
        RandomStream cg_rng(derive_stream_seed(seed, 0x636F6E74));  // continuous substream root
        ContinuousGreedyResult cg =
            continuous_greedy(inst, m, options.cg_steps, options.cg_samples, cg_rng);
        PipageSettings rounding;
        rounding.caps = caps;
        if (exact_ok) {
            rounding.kind = EvaluatorKind::Exact;
        } else {
            rounding.kind = EvaluatorKind::MonteCarlo;
            rounding.samples = 2000;
            rounding.seed = derive_stream_seed(seed, 0x70697061);
        }
        continuous_set = pipage_round(inst, m, cg.y, rounding);
    }
    auto fixed_set_of = [&](const std::string& policy) -> const std::vector<ElementId>& {
        return policy == "greedy" ? greedy_set : continuous_set;
    };

    // Common random numbers: one drawn realization per replicate, shared
    // by every policy.
    std::vector<std::vector<double>> values(policies.size());
    std::vector<int> outcome_of(static_cast<std::size_t>(n), 0);
    std::vector<int> view(static_cast<std::size_t>(n), -1);
    for (int r = 0; r < replicates; ++r) {
        RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(r));
        for (ElementId i = 0; i < n; ++i) {
            outcome_of[static_cast<std::size_t>(i)] = rng.sample(inst.dist(i));
        }
        for (std::size_t pi = 0; pi < policies.size(); ++pi) {
            if (policies[pi] == "myopic") {
                values[pi].push_back(run_myopic_adaptive(inst, m, outcome_of).final_value);
            } else {
                std::fill(view.begin(), view.end(), -1);
                for (ElementId i : fixed_set_of(policies[pi])) {
                    view[static_cast<std::size_t>(i)] = outcome_of[static_cast<std::size_t>(i)];
                }
                values[pi].push_back(detail::eval_f_dense(inst, view));
            }
        }
    }

    ExperimentReport report;
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
        ExperimentRow row;
        row.config_id = "compare";
        row.n = n;
        row.policy = policies[pi];
        row.analytic_value = missing_value();
        if (policies[pi] == "myopic") {
            try {
                row.analytic_value = evaluate_myopic_exact(inst, m, caps).value;
            } catch (const CapExceededError&) {
            }
        } else {
            const std::vector<ElementId>& set = fixed_set_of(policies[pi]);
            if (exact_ok) {
                row.analytic_value = expected_value_exact(inst, set, caps);
            } else if (inst.is_coverage()) {
                row.analytic_value = coverage_closed_form(inst, set);
            }
        }
        const McEstimate est = estimate_from_values(values[pi]);
        row.mc_mean = est.estimate;
        row.mc_ci95 = est.ci_halfwidth_95;
        row.replicates = replicates;
        row.seed = seed;
        row.ratio = missing_value();
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace stosub
