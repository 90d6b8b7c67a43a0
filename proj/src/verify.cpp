#include "stosub/verify.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "stosub/bounds.hpp"
#include "stosub/errors.hpp"
#include "stosub/policies.hpp"
#include "stosub/rng.hpp"

namespace stosub {

namespace {

const char* objective_name(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::Coverage: return "coverage";
        case ObjectiveKind::ConcaveSum: return "concave_sum";
        case ObjectiveKind::Table: return "table";
    }
    return "?";
}

const char* matroid_name(MatroidKind kind) {
    switch (kind) {
        case MatroidKind::Uniform: return "uniform";
        case MatroidKind::Partition: return "partition";
        case MatroidKind::Explicit: return "explicit";
    }
    return "?";
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::vector<GeneratorConfig> verification_grid(std::uint64_t seed) {
    std::vector<GeneratorConfig> grid;
    const int sizes[] = {2, 3, 4, 5, 6};
    const int supports[] = {2, 3};
    const ObjectiveKind objectives[] = {ObjectiveKind::Coverage, ObjectiveKind::ConcaveSum};
    const MatroidKind matroids[] = {MatroidKind::Uniform, MatroidKind::Partition,
                                    MatroidKind::Explicit};
    std::uint64_t index = 0;
    for (int n : sizes) {
        for (int support : supports) {
            for (ObjectiveKind objective : objectives) {
                for (MatroidKind matroid : matroids) {
                    for (int rep = 0; rep < 9; ++rep) {
                        GeneratorConfig config;
                        config.n = n;
                        config.support_size = support;
                        config.objective = objective;
                        config.matroid = matroid;
                        config.seed = derive_stream_seed(seed, index++);
                        grid.push_back(config);
                    }
                }
            }
        }
    }
    return grid;
}

std::string describe_config(const GeneratorConfig& config) {
    std::string out = "n=" + std::to_string(config.n);
    out += " support=" + std::to_string(config.support_size);
    out += " objective=";
    out += objective_name(config.objective);
    out += " matroid=";
    out += matroid_name(config.matroid);
    out += " seed=" + std::to_string(config.seed);
    return out;
}

VerifyReport run_verification_suite(const VerifyOptions& options) {
    VerifyReport report;
    for (const GeneratorConfig& config : verification_grid(options.seed)) {
        ++report.instances;
        const std::string where = describe_config(config);
        auto check = [&](bool ok, const char* name, std::string detail) {
            ++report.checks;
            if (!ok) report.violations.push_back({name, where, std::move(detail)});
        };
        try {
            auto [inst, m] = gen_random_instance(config);

            ValidationReport valid = validate_objective(inst, options.caps);
            check(valid.valid && !valid.partial, "objective-valid", valid.message);

            const double A = optimal_adaptive_exact(inst, m, options.caps).value;
            const double A_no_stop =
                optimal_adaptive_exact(inst, m, options.caps, /*allow_early_stop=*/false).value;
            check(std::fabs(A - A_no_stop) <= 1e-9, "early-stop-equal",
                  "A=" + num(A) + " forced-run=" + num(A_no_stop));

            MyopicExactReport myo = evaluate_myopic_exact(inst, m, options.caps);
            check(myo.value + 1e-9 >= 0.5 * A, "myopic-half",
                  "myopic=" + num(myo.value) + " A=" + num(A));
            check(myo.value <= A + 1e-9, "myopic-bounded",
                  "myopic=" + num(myo.value) + " A=" + num(A));
            check(myo.min_marginal_drop >= -1e-9, "marginal-monotone",
                  "min_drop=" + num(myo.min_marginal_drop));

            if (m.kind() == MatroidKind::Uniform) {
                const int k = m.rank();
                const double factor = 1.0 - std::pow(1.0 - 1.0 / k, k);
                check(myo.value + 1e-9 >= factor * A, "myopic-uniform-k",
                      "myopic=" + num(myo.value) + " bound=" + num(factor * A) +
                          " k=" + std::to_string(k));
            }

            NonAdaptiveExactResult nonadaptive = optimal_nonadaptive_exact(inst, m, options.caps);
            const double N = nonadaptive.value;
            check(N <= A + 1e-9, "nonadaptive-bounded", "N=" + num(N) + " A=" + num(A));
            check(A <= kAdaptivityGap * N + 1e-9, "adaptivity-gap",
                  "A=" + num(A) + " gap*N=" + num(kAdaptivityGap * N));

            EvalSettings exact_eval;
            exact_eval.kind = EvaluatorKind::Exact;
            exact_eval.caps = options.caps;
            std::vector<ElementId> greedy = greedy_nonadaptive(inst, m, exact_eval);
            const double greedy_value = expected_value_exact(inst, greedy, options.caps);
            check(greedy_value + 1e-9 >= 0.5 * N, "greedy-half",
                  "greedy=" + num(greedy_value) + " N=" + num(N));
            check(greedy_value <= N + 1e-9, "greedy-bounded",
                  "greedy=" + num(greedy_value) + " N=" + num(N));

            FractionalPoint indicator(static_cast<std::size_t>(inst.num_elements()), 0.0);
            for (ElementId id : greedy) indicator[static_cast<std::size_t>(id)] = 1.0;
            const double at_indicator = multilinear_extension(inst, indicator, ExtensionMode::Exact,
                                                              0, nullptr, options.caps);
            check(std::fabs(at_indicator - greedy_value) <= 1e-9, "multilinear-indicator",
                  "F(1_S)=" + num(at_indicator) + " F(S)=" + num(greedy_value));

            if (inst.is_coverage()) {
                const double closed = coverage_closed_form(inst, greedy);
                check(std::fabs(closed - greedy_value) <= 1e-9, "coverage-closed-form",
                      "closed=" + num(closed) + " exact=" + num(greedy_value));
            }

            if (options.gap_chain && m.kind() != MatroidKind::Explicit) {
                GapChainCertificate cert = verify_gap_chain(inst, m, options.caps);
                std::string failing;
                for (const GapChainLink& link : cert.links) {
                    if (!link.ok) {
                        failing += " " + link.name + "(" + num(link.lhs) + " vs " +
                                   num(link.rhs) + ")";
                    }
                }
                check(cert.ok, "gap-chain", failing.empty() ? "all links ok" : failing);
            }

            if (options.fplus_pairs) {
                RandomStream ys(derive_stream_seed(config.seed, 0xF1A5));
                FractionalPoint y(static_cast<std::size_t>(inst.num_elements()));
                for (double& v : y) v = ys.uniform01();
                const double M =
                    multilinear_extension(inst, y, ExtensionMode::Exact, 0, nullptr, options.caps);
                const double fp = f_plus(inst, y, options.caps);
                check(fp + 1e-9 >= M, "fplus-lower", "f+=" + num(fp) + " F(y)=" + num(M));
                check(fp <= kAdaptivityGap * M + 1e-9, "fplus-upper",
                      "f+=" + num(fp) + " gap*F(y)=" + num(kAdaptivityGap * M));
            }
        } catch (const Error& e) {
            ++report.checks;
            report.violations.push_back({"exception", where, e.what()});
        }
    }
    return report;
}

}  // namespace stosub
