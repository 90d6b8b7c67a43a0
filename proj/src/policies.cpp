#include "stosub/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "stosub/errors.hpp"

namespace stosub {

namespace {

// E[f(s + {i -> X_i})] - f(s) on the dense outcome view; restores the
// view before returning.
double dense_marginal(const Instance& inst, std::vector<int>& dense, double current_value,
                      ElementId i) {
    const DiscreteDistribution& dist = inst.dist(i);
    double expected = 0.0;
    for (int x = 0; x < dist.size(); ++x) {
        const double p = dist.outcome(x).prob;
        if (p == 0.0) continue;
        dense[static_cast<std::size_t>(i)] = x;
        expected += p * detail::eval_f_dense(inst, dense);
    }
    dense[static_cast<std::size_t>(i)] = -1;
    return expected - current_value;
}

// Pool elements ranked by (marginal desc, id asc) — the order in which the
// myopic argmax visits them while the observed state stays fixed.
std::vector<std::pair<double, ElementId>> ranked_marginals(const Instance& inst,
                                                           std::vector<int>& dense,
                                                           double current_value,
                                                           const std::vector<char>& in_S,
                                                           const std::vector<char>& in_U) {
    std::vector<std::pair<double, ElementId>> ranked;
    const int n = inst.num_elements();
    for (ElementId i = 0; i < n; ++i) {
        if (in_S[static_cast<std::size_t>(i)] || in_U[static_cast<std::size_t>(i)]) continue;
        ranked.emplace_back(dense_marginal(inst, dense, current_value, i), i);
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const std::pair<double, ElementId>& a, const std::pair<double, ElementId>& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
              });
    return ranked;
}

template <typename DrawOutcome>
PolicyTrace run_myopic_impl(const Instance& inst, const Matroid& m, DrawOutcome&& draw) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    const int n = inst.num_elements();
    PolicyTrace trace;
    std::vector<int> dense(static_cast<std::size_t>(n), -1);
    std::vector<char> in_S(static_cast<std::size_t>(n), 0);
    std::vector<char> in_U(static_cast<std::size_t>(n), 0);
    std::vector<ElementId> S_sorted;
    double current_value = detail::eval_f_dense(inst, dense);

    while (static_cast<int>(S_sorted.size()) < m.rank()) {
        const auto ranked = ranked_marginals(inst, dense, current_value, in_S, in_U);
        if (ranked.empty()) break;
        bool accepted = false;
        for (const auto& [delta, i] : ranked) {
            if (!m.can_add(S_sorted, i)) {
                in_U[static_cast<std::size_t>(i)] = 1;
                trace.steps.push_back(PolicyStep{i, false, -1, delta});
                continue;
            }
            const int x = draw(i);
            dense[static_cast<std::size_t>(i)] = x;
            in_S[static_cast<std::size_t>(i)] = 1;
            S_sorted.insert(std::upper_bound(S_sorted.begin(), S_sorted.end(), i), i);
            current_value = detail::eval_f_dense(inst, dense);
            trace.steps.push_back(PolicyStep{i, true, x, delta});
            trace.chosen.push_back(i);
            trace.observed.assign(i, x);
            accepted = true;
            break;
        }
        if (!accepted) break;  // nothing addable; all considered elements discarded
    }

    for (ElementId i = 0; i < n; ++i) {
        if (in_U[static_cast<std::size_t>(i)]) trace.discarded.push_back(i);
    }
    trace.final_value = current_value;
    return trace;
}

// Recursive outcome-tree walk of the myopic policy: at each observed state
// the selection (discards plus one acceptance) is deterministic, then the
// accepted element's outcome branches the tree.
class MyopicTreeWalker {
  public:
    MyopicTreeWalker(const Instance& inst, const Matroid& m, std::uint64_t path_cap)
        : inst_(inst),
          m_(m),
          path_cap_(path_cap),
          dense_(static_cast<std::size_t>(inst.num_elements()), -1),
          in_S_(static_cast<std::size_t>(inst.num_elements()), 0),
          in_U_(static_cast<std::size_t>(inst.num_elements()), 0) {}

    MyopicExactReport run() {
        MyopicExactReport report;
        const NodeResult root = walk(detail::eval_f_dense(inst_, dense_));
        report.value = root.expected;
        report.paths = paths_;
        report.min_marginal_drop = min_drop_;
        return report;
    }

  private:
    struct NodeResult {
        double expected = 0.0;
        double first_marginal = 0.0;  // Delta of the first acceptance, 0 at leaves
    };

    NodeResult walk(double current_value) {
        if (static_cast<int>(S_sorted_.size()) == m_.rank()) {
            count_path();
            return NodeResult{current_value, 0.0};
        }
        const auto ranked = ranked_marginals(inst_, dense_, current_value, in_S_, in_U_);
        ElementId accepted = -1;
        double accepted_delta = 0.0;
        std::vector<ElementId> discarded_here;
        for (const auto& [delta, i] : ranked) {
            if (m_.can_add(S_sorted_, i)) {
                accepted = i;
                accepted_delta = delta;
                break;
            }
            in_U_[static_cast<std::size_t>(i)] = 1;
            discarded_here.push_back(i);
        }
        NodeResult result;
        if (accepted < 0) {
            count_path();
            result = NodeResult{current_value, 0.0};
        } else {
            const DiscreteDistribution& dist = inst_.dist(accepted);
            in_S_[static_cast<std::size_t>(accepted)] = 1;
            S_sorted_.insert(std::upper_bound(S_sorted_.begin(), S_sorted_.end(), accepted),
                             accepted);
            double expected = 0.0;
            double expected_next_marginal = 0.0;
            for (int x = 0; x < dist.size(); ++x) {
                const double p = dist.outcome(x).prob;
                if (p == 0.0) continue;
                dense_[static_cast<std::size_t>(accepted)] = x;
                const NodeResult child = walk(detail::eval_f_dense(inst_, dense_));
                expected += p * child.expected;
                expected_next_marginal += p * child.first_marginal;
            }
            dense_[static_cast<std::size_t>(accepted)] = -1;
            in_S_[static_cast<std::size_t>(accepted)] = 0;
            S_sorted_.erase(std::lower_bound(S_sorted_.begin(), S_sorted_.end(), accepted));
            min_drop_ = std::min(min_drop_, accepted_delta - expected_next_marginal);
            result = NodeResult{expected, accepted_delta};
        }
        for (ElementId i : discarded_here) in_U_[static_cast<std::size_t>(i)] = 0;
        return result;
    }

    void count_path() {
        if (++paths_ > path_cap_) {
            throw CapExceededError(
                "myopic outcome tree exceeds " + std::to_string(path_cap_) +
                " paths; use Monte Carlo evaluation (run_myopic_adaptive over replicates)");
        }
    }

    const Instance& inst_;
    const Matroid& m_;
    std::uint64_t path_cap_;
    std::vector<int> dense_;
    std::vector<char> in_S_;
    std::vector<char> in_U_;
    std::vector<ElementId> S_sorted_;
    std::uint64_t paths_ = 0;
    double min_drop_ = std::numeric_limits<double>::infinity();
};

double evaluate_set(const Instance& inst, const std::vector<ElementId>& S,
                    const EvalSettings& settings, int step_index) {
    switch (settings.kind) {
        case EvaluatorKind::Exact:
            return expected_value_exact(inst, S, settings.caps);
        case EvaluatorKind::ClosedForm:
            return coverage_closed_form(inst, S);
        case EvaluatorKind::MonteCarlo: {
            RandomStream rng = RandomStream::substream(settings.seed, step_index);
            return expected_value_mc(inst, S, settings.samples, rng).estimate;
        }
    }
    throw Error("unknown evaluator kind");
}

}  // namespace

PolicyTrace run_myopic_adaptive(const Instance& inst, const Matroid& m, RandomStream& rng) {
    return run_myopic_impl(inst, m, [&](ElementId i) { return rng.sample(inst.dist(i)); });
}

PolicyTrace run_myopic_adaptive(const Instance& inst, const Matroid& m,
                                const std::vector<int>& outcome_of) {
    if (static_cast<int>(outcome_of.size()) != inst.num_elements()) {
        throw InvalidInputError("fixed realization must assign an outcome to every element");
    }
    for (ElementId i = 0; i < inst.num_elements(); ++i) {
        const int x = outcome_of[static_cast<std::size_t>(i)];
        if (x < 0 || x >= inst.support_size(i)) {
            throw InvalidInputError("fixed realization has out-of-range outcome for element " +
                                    std::to_string(i));
        }
    }
    return run_myopic_impl(inst, m,
                           [&](ElementId i) { return outcome_of[static_cast<std::size_t>(i)]; });
}

MyopicExactReport evaluate_myopic_exact(const Instance& inst, const Matroid& m,
                                        const EnumerationCaps& caps) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    MyopicTreeWalker walker(inst, m, caps.max_scenarios);
    return walker.run();
}

std::vector<ElementId> greedy_nonadaptive(const Instance& inst, const Matroid& m,
                                          const EvalSettings& settings) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    if (settings.kind == EvaluatorKind::ClosedForm && !inst.is_coverage()) {
        throw InvalidInputError("closed-form evaluation requires a coverage objective");
    }
    const int n = inst.num_elements();
    std::vector<ElementId> S;
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    int step = 0;
    while (static_cast<int>(S.size()) < m.rank()) {
        double current = evaluate_set(inst, S, settings, step);
        ElementId best = -1;
        double best_gain = 0.0;
        for (ElementId i = 0; i < n; ++i) {
            if (chosen[static_cast<std::size_t>(i)]) continue;
            if (!m.can_add(S, i)) continue;
            std::vector<ElementId> extended(S);
            extended.insert(std::upper_bound(extended.begin(), extended.end(), i), i);
            const double gain = evaluate_set(inst, extended, settings, step) - current;
            if (best < 0 || gain > best_gain) {
                best = i;
                best_gain = gain;
            }
        }
        if (best < 0) break;
        chosen[static_cast<std::size_t>(best)] = 1;
        S.insert(std::upper_bound(S.begin(), S.end(), best), best);
        ++step;
    }
    return S;
}

ContinuousGreedyResult continuous_greedy(const Instance& inst, const Matroid& m, int steps,
                                         int samples, RandomStream& rng) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    if (steps < 1) throw InvalidInputError("continuous greedy needs at least one step");
    if (samples < 1) throw InvalidInputError("continuous greedy needs at least one sample per step");
    m.polytope_groups();  // rejects matroid kinds without a polytope description
    const int n = inst.num_elements();

    ContinuousGreedyResult result;
    result.steps = steps;
    result.step_counts.assign(static_cast<std::size_t>(n), 0);
    result.y.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<int> realization(static_cast<std::size_t>(n), 0);
    std::vector<int> view(static_cast<std::size_t>(n), -1);
    std::vector<double> weights(static_cast<std::size_t>(n), 0.0);

    for (int t = 0; t < steps; ++t) {
        std::fill(weights.begin(), weights.end(), 0.0);
        for (int s = 0; s < samples; ++s) {
            for (ElementId i = 0; i < n; ++i) {
                realization[static_cast<std::size_t>(i)] = rng.sample(inst.dist(i));
            }
            for (ElementId i = 0; i < n; ++i) {
                const bool include = rng.uniform01() < result.y[static_cast<std::size_t>(i)];
                view[static_cast<std::size_t>(i)] =
                    include ? realization[static_cast<std::size_t>(i)] : -1;
            }
            const double base = detail::eval_f_dense(inst, view);
            for (ElementId i = 0; i < n; ++i) {
                if (view[static_cast<std::size_t>(i)] >= 0) continue;  // F(Y+i) = F(Y)
                view[static_cast<std::size_t>(i)] = realization[static_cast<std::size_t>(i)];
                weights[static_cast<std::size_t>(i)] +=
                    detail::eval_f_dense(inst, view) - base;
                view[static_cast<std::size_t>(i)] = -1;
            }
        }
        for (double& w : weights) w /= samples;
        for (ElementId i : m.max_weight_basis(weights)) {
            ++result.step_counts[static_cast<std::size_t>(i)];
        }
        for (ElementId i = 0; i < n; ++i) {
            result.y[static_cast<std::size_t>(i)] =
                static_cast<double>(result.step_counts[static_cast<std::size_t>(i)]) / steps;
        }
    }
    return result;
}

namespace {

// Paired Monte Carlo comparison of two fractional points: shared inclusion
// uniforms and realizations make the difference low-variance.
std::pair<double, double> paired_mc_values(const Instance& inst, const FractionalPoint& a,
                                           const FractionalPoint& b, int samples,
                                           RandomStream& rng) {
    const int n = inst.num_elements();
    std::vector<int> realization(static_cast<std::size_t>(n), 0);
    std::vector<int> view(static_cast<std::size_t>(n), -1);
    double total_a = 0.0;
    double total_b = 0.0;
    for (int s = 0; s < samples; ++s) {
        for (ElementId i = 0; i < n; ++i) {
            realization[static_cast<std::size_t>(i)] = rng.sample(inst.dist(i));
        }
        std::vector<double> u(static_cast<std::size_t>(n));
        for (ElementId i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = rng.uniform01();
        for (ElementId i = 0; i < n; ++i) {
            view[static_cast<std::size_t>(i)] =
                u[static_cast<std::size_t>(i)] < a[static_cast<std::size_t>(i)]
                    ? realization[static_cast<std::size_t>(i)]
                    : -1;
        }
        total_a += detail::eval_f_dense(inst, view);
        for (ElementId i = 0; i < n; ++i) {
            view[static_cast<std::size_t>(i)] =
                u[static_cast<std::size_t>(i)] < b[static_cast<std::size_t>(i)]
                    ? realization[static_cast<std::size_t>(i)]
                    : -1;
        }
        total_b += detail::eval_f_dense(inst, view);
    }
    return {total_a / samples, total_b / samples};
}

}  // namespace

std::vector<ElementId> pipage_round(const Instance& inst, const Matroid& m, FractionalPoint y,
                                    const PipageSettings& settings) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    const int n = inst.num_elements();
    if (static_cast<int>(y.size()) != n) {
        throw InvalidPointError("point dimension does not match ground set size");
    }
    if (!m.in_base_polytope(y, settings.tol)) {
        throw InvalidPointError("point is not in the base polytope within tolerance");
    }
    const std::vector<PolytopeGroup> groups = m.polytope_groups();

    const double frac_tol = settings.tol;
    int comparison = 0;
    for (const PolytopeGroup& group : groups) {
        for (;;) {
            ElementId i = -1;
            ElementId j = -1;
            for (ElementId e : group.members) {
                const double v = y[static_cast<std::size_t>(e)];
                if (v > frac_tol && v < 1.0 - frac_tol) {
                    if (i < 0) {
                        i = e;
                    } else {
                        j = e;
                        break;
                    }
                }
            }
            if (j < 0) break;

            // Endpoints of the segment y + t (e_i - e_j) within the box;
            // the saturating coordinate is written exactly.
            FractionalPoint up(y);
            if (1.0 - y[static_cast<std::size_t>(i)] <= y[static_cast<std::size_t>(j)]) {
                up[static_cast<std::size_t>(j)] =
                    y[static_cast<std::size_t>(j)] - (1.0 - y[static_cast<std::size_t>(i)]);
                up[static_cast<std::size_t>(i)] = 1.0;
            } else {
                up[static_cast<std::size_t>(i)] =
                    y[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(j)];
                up[static_cast<std::size_t>(j)] = 0.0;
            }
            FractionalPoint down(y);
            if (y[static_cast<std::size_t>(i)] <= 1.0 - y[static_cast<std::size_t>(j)]) {
                down[static_cast<std::size_t>(j)] =
                    y[static_cast<std::size_t>(j)] + y[static_cast<std::size_t>(i)];
                down[static_cast<std::size_t>(i)] = 0.0;
            } else {
                down[static_cast<std::size_t>(i)] =
                    y[static_cast<std::size_t>(i)] - (1.0 - y[static_cast<std::size_t>(j)]);
                down[static_cast<std::size_t>(j)] = 1.0;
            }

            double value_up = 0.0;
            double value_down = 0.0;
            if (settings.kind == EvaluatorKind::Exact) {
                value_up = multilinear_extension(inst, up, ExtensionMode::Exact, 0, nullptr,
                                                 settings.caps);
                value_down = multilinear_extension(inst, down, ExtensionMode::Exact, 0, nullptr,
                                                   settings.caps);
            } else if (settings.kind == EvaluatorKind::MonteCarlo) {
                RandomStream rng = RandomStream::substream(settings.seed, comparison);
                const auto [a, b] = paired_mc_values(inst, up, down, settings.samples, rng);
                value_up = a;
                value_down = b;
            } else {
                throw InvalidInputError("pipage rounding supports exact or Monte Carlo evaluation");
            }
            y = value_up >= value_down ? std::move(up) : std::move(down);
            ++comparison;
        }
    }

    std::vector<ElementId> S;
    for (ElementId i = 0; i < n; ++i) {
        const double v = y[static_cast<std::size_t>(i)];
        if (v > 1.0 - 1e-6) {
            S.push_back(i);
        } else if (v > 1e-6) {
            throw InvalidPointError(
                "pipage rounding left a fractional coordinate; group sums are not integral");
        }
    }
    if (!m.is_independent(S) || !m.is_basis(S)) {
        throw Error("pipage rounding produced a non-basis");
    }
    return S;
}

AdaptiveExactResult optimal_adaptive_exact(const Instance& inst, const Matroid& m,
                                           const EnumerationCaps& caps, bool allow_early_stop) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    if (!inst.realization_space_fits()) {
        throw CapExceededError("realization space exceeds the canonical 64-bit encoding");
    }
    const int n = inst.num_elements();

    // Digit weight of element i in the canonical mixed-radix code.
    std::vector<std::uint64_t> weight(static_cast<std::size_t>(n), 1);
    for (ElementId i = 1; i < n; ++i) {
        weight[static_cast<std::size_t>(i)] =
            weight[static_cast<std::size_t>(i - 1)] *
            (static_cast<std::uint64_t>(inst.support_size(i - 1)) + 1);
    }

    AdaptiveExactResult result;
    std::vector<int> dense(static_cast<std::size_t>(n), -1);
    std::vector<ElementId> S_sorted;

    struct Rec {
        const Instance& inst;
        const Matroid& m;
        const EnumerationCaps& caps;
        bool allow_early_stop;
        int n;
        std::vector<std::uint64_t>& weight;
        std::vector<int>& dense;
        std::vector<ElementId>& S_sorted;
        std::unordered_map<std::uint64_t, double>& memo;

        double visit(std::uint64_t code) {
            auto it = memo.find(code);
            if (it != memo.end()) return it->second;
            double best = -std::numeric_limits<double>::infinity();
            bool any_addable = false;
            for (ElementId i = 0; i < n; ++i) {
                if (dense[static_cast<std::size_t>(i)] >= 0) continue;  // already chosen
                if (!m.can_add(S_sorted, i)) continue;
                any_addable = true;
                const DiscreteDistribution& dist = inst.dist(i);
                S_sorted.insert(std::upper_bound(S_sorted.begin(), S_sorted.end(), i), i);
                double expected = 0.0;
                for (int x = 0; x < dist.size(); ++x) {
                    const double p = dist.outcome(x).prob;
                    if (p == 0.0) continue;
                    dense[static_cast<std::size_t>(i)] = x;
                    expected += p * visit(code + (static_cast<std::uint64_t>(x) + 1) *
                                                     weight[static_cast<std::size_t>(i)]);
                }
                dense[static_cast<std::size_t>(i)] = -1;
                S_sorted.erase(std::lower_bound(S_sorted.begin(), S_sorted.end(), i));
                best = std::max(best, expected);
            }
            if (allow_early_stop || !any_addable) {
                best = std::max(best, detail::eval_f_dense(inst, dense));
            }
            memo.emplace(code, best);
            if (memo.size() > caps.max_scenarios) {
                throw CapExceededError("optimal adaptive state space exceeds " +
                                       std::to_string(caps.max_scenarios) + " states");
            }
            return best;
        }
    };

    Rec rec{inst, m, caps, allow_early_stop, n, weight, dense, S_sorted, result.tree.values};
    result.value = rec.visit(0);
    result.tree.root_value = result.value;
    return result;
}

NonAdaptiveExactResult optimal_nonadaptive_exact(const Instance& inst, const Matroid& m,
                                                 const EnumerationCaps& caps) {
    if (inst.num_elements() != m.num_elements()) {
        throw InvalidInputError("instance and matroid ground sets differ in size");
    }
    const int n = inst.num_elements();
    NonAdaptiveExactResult result;
    result.value = -std::numeric_limits<double>::infinity();
    double best_basis_value = -std::numeric_limits<double>::infinity();
    bool saw_basis = false;
    std::uint64_t visited = 0;

    std::vector<ElementId> S;
    struct Rec {
        const Instance& inst;
        const Matroid& m;
        const EnumerationCaps& caps;
        int n;
        std::vector<ElementId>& S;
        NonAdaptiveExactResult& result;
        double& best_basis_value;
        bool& saw_basis;
        std::uint64_t& visited;

        void visit(ElementId last) {
            if (++visited > caps.max_scenarios) {
                throw CapExceededError("independent-set family exceeds " +
                                       std::to_string(caps.max_scenarios) + " sets");
            }
            const double value = expected_value_exact(inst, S, caps);
            if (value > result.value) {
                result.value = value;
                result.best_set = S;
            }
            if (static_cast<int>(S.size()) == m.rank()) {
                saw_basis = true;
                best_basis_value = std::max(best_basis_value, value);
            }
            for (ElementId i = last + 1; i < n; ++i) {
                if (!m.can_add(S, i)) continue;
                S.push_back(i);
                visit(i);
                S.pop_back();
            }
        }
    };

    Rec rec{inst, m, caps, n, S, result, best_basis_value, saw_basis, visited};
    rec.visit(-1);
    if (!saw_basis) {
        throw Error("independent-set scan found no basis");
    }
    if (std::abs(result.value - best_basis_value) > 1e-9) {
        throw Error("non-adaptive optimum over all independent sets (" +
                    std::to_string(result.value) + ") differs from the optimum over bases (" +
                    std::to_string(best_basis_value) + "); objective is not monotone");
    }
    return result;
}

}  // namespace stosub
