// stosub: stochastic monotone submodular maximization over matroids.
//
// Subcommands: gen | run | exact | bound | gap | verify. Every command is
// deterministic given its full flag set; all randomness derives from
// --seed via documented substreams. Exit codes: 0 success, 1 usage or
// invalid input, 2 I/O failure, 3 verification failure, 4 enumeration cap
// exceeded.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stosub/bounds.hpp"
#include "stosub/errors.hpp"
#include "stosub/experiments.hpp"
#include "stosub/io.hpp"
#include "stosub/policies.hpp"
#include "stosub/verify.hpp"

namespace {

using namespace stosub;

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
    } else {
        write_text_file(out_path, content);
    }
}

// Every command echoes its effective configuration (defaults resolved) as
// one JSON line on stderr, keeping stdout purely CSV/JSON.
void echo_config(const nlohmann::ordered_json& config) {
    std::fputs((config.dump() + "\n").c_str(), stderr);
}

struct CommonFlags {
    std::string instance_path;
    std::string matroid_spec;  ///< inline JSON ("{...}") or a file path.
    std::string out_path;
    std::uint64_t seed = 0;
    std::uint64_t cap_scenarios = EnumerationCaps{}.max_scenarios;
    std::uint64_t cap_lp_scenarios = EnumerationCaps{}.max_lp_scenarios;

    EnumerationCaps caps() const {
        EnumerationCaps c;
        c.max_scenarios = cap_scenarios;
        c.max_lp_scenarios = cap_lp_scenarios;
        return c;
    }
};

void add_common(CLI::App* cmd, CommonFlags* flags, bool instance_required) {
    CLI::Option* inst =
        cmd->add_option("--instance", flags->instance_path, "Instance JSON file");
    if (instance_required) inst->required();
    cmd->add_option("--matroid", flags->matroid_spec,
                    "Matroid as inline JSON or a file path (default: the instance's "
                    "embedded matroid)");
    cmd->add_option("--out", flags->out_path, "Write output here instead of stdout");
    cmd->add_option("--seed", flags->seed, "Root seed (default 0)")->capture_default_str();
    cmd->add_option("--cap-scenarios", flags->cap_scenarios,
                    "Exact-enumeration budget (realizations/paths/memo states)")
        ->capture_default_str();
    cmd->add_option("--cap-lp-scenarios", flags->cap_lp_scenarios,
                    "Scenario-LP column budget")
        ->capture_default_str();
}

Matroid resolve_matroid(const CommonFlags& flags, const LoadedInstance& loaded) {
    if (!flags.matroid_spec.empty()) {
        nlohmann::json doc;
        if (flags.matroid_spec.front() == '{') {
            doc = nlohmann::json::parse(flags.matroid_spec);
        } else {
            doc = nlohmann::json::parse(read_text_file(flags.matroid_spec));
        }
        return matroid_from_json(doc, loaded.instance.num_elements());
    }
    if (loaded.matroid) return *loaded.matroid;
    throw InvalidInputError(
        "no matroid given: pass --matroid or embed one in the instance file");
}

// ---------------------------------------------------------------------------

struct GenFlags {
    std::string kind = "random";
    int n = 4;
    int support = 2;
    std::string objective = "coverage";
    std::string matroid_kind = "uniform";
    int universe = 0;
    int max_rank = 3;
    std::uint64_t seed = 0;
    std::string out_path;
};

int cmd_gen(const GenFlags& flags) {
    echo_config({{"subcommand", "gen"},
                 {"kind", flags.kind},
                 {"n", flags.n},
                 {"support", flags.support},
                 {"objective", flags.objective},
                 {"matroid_kind", flags.matroid_kind},
                 {"universe", flags.universe},
                 {"max_rank", flags.max_rank},
                 {"seed", flags.seed},
                 {"out", flags.out_path}});
    std::pair<Instance, Matroid> made = [&] {
        if (flags.kind == "tight") return materialize_tight_example(flags.n);
        if (flags.kind != "random") {
            throw InvalidInputError("unknown --kind '" + flags.kind +
                                    "' (expected random or tight)");
        }
        GeneratorConfig config;
        config.n = flags.n;
        config.support_size = flags.support;
        if (flags.objective == "coverage") {
            config.objective = ObjectiveKind::Coverage;
        } else if (flags.objective == "concave_sum") {
            config.objective = ObjectiveKind::ConcaveSum;
        } else if (flags.objective == "table") {
            config.objective = ObjectiveKind::Table;
        } else {
            throw InvalidInputError("unknown --objective '" + flags.objective + "'");
        }
        if (flags.matroid_kind == "uniform") {
            config.matroid = MatroidKind::Uniform;
        } else if (flags.matroid_kind == "partition") {
            config.matroid = MatroidKind::Partition;
        } else if (flags.matroid_kind == "explicit") {
            config.matroid = MatroidKind::Explicit;
        } else {
            throw InvalidInputError("unknown --matroid-kind '" + flags.matroid_kind + "'");
        }
        config.seed = flags.seed;
        config.universe_size = flags.universe;
        config.max_rank = flags.max_rank;
        return gen_random_instance(config);
    }();
    save_instance_file(flags.out_path, made.first, &made.second);
    return 0;
}

// ---------------------------------------------------------------------------

struct RunFlags {
    CommonFlags common;
    std::vector<std::string> policies;
    int replicates = 200;
    int steps = 100;
    int samples = 200;
    std::string trace_path;
};

int cmd_run(const RunFlags& flags) {
    std::vector<std::string> policies = flags.policies;
    if (policies.empty()) policies = {"myopic", "greedy"};
    echo_config({{"subcommand", "run"},
                 {"instance", flags.common.instance_path},
                 {"matroid", flags.common.matroid_spec},
                 {"policy", policies},
                 {"seed", flags.common.seed},
                 {"replicates", flags.replicates},
                 {"steps", flags.steps},
                 {"samples", flags.samples},
                 {"cap_scenarios", flags.common.cap_scenarios},
                 {"cap_lp_scenarios", flags.common.cap_lp_scenarios},
                 {"trace", flags.trace_path},
                 {"out", flags.common.out_path}});
    LoadedInstance loaded = load_instance_file(flags.common.instance_path);
    Matroid m = resolve_matroid(flags.common, loaded);
    ComparePolicyOptions options;
    options.cg_steps = flags.steps;
    options.cg_samples = flags.samples;
    ExperimentReport report = compare_policies(loaded.instance, m, policies, flags.replicates,
                                               flags.common.seed, flags.common.caps(), options);
    emit(flags.common.out_path, report_to_csv(report));
    if (!flags.trace_path.empty()) {
        RandomStream rng(flags.common.seed);
        PolicyTrace trace = run_myopic_adaptive(loaded.instance, m, rng);
        write_text_file(flags.trace_path, trace_to_json_lines(trace));
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_exact(const CommonFlags& flags) {
    echo_config({{"subcommand", "exact"},
                 {"instance", flags.instance_path},
                 {"matroid", flags.matroid_spec},
                 {"seed", flags.seed},
                 {"cap_scenarios", flags.cap_scenarios},
                 {"cap_lp_scenarios", flags.cap_lp_scenarios},
                 {"out", flags.out_path}});
    LoadedInstance loaded = load_instance_file(flags.instance_path);
    Matroid m = resolve_matroid(flags, loaded);
    const EnumerationCaps caps = flags.caps();

    AdaptiveExactResult adaptive = optimal_adaptive_exact(loaded.instance, m, caps);
    NonAdaptiveExactResult nonadaptive = optimal_nonadaptive_exact(loaded.instance, m, caps);
    MyopicExactReport myopic = evaluate_myopic_exact(loaded.instance, m, caps);
    EvalSettings settings;
    settings.caps = caps;
    std::vector<ElementId> greedy = greedy_nonadaptive(loaded.instance, m, settings);

    nlohmann::ordered_json out;
    out["adaptive_value"] = adaptive.value;
    out["nonadaptive_value"] = nonadaptive.value;
    out["nonadaptive_best_set"] = nonadaptive.best_set;
    out["myopic_value"] = myopic.value;
    out["myopic_paths"] = myopic.paths;
    if (std::isfinite(myopic.min_marginal_drop)) {
        out["myopic_min_marginal_drop"] = myopic.min_marginal_drop;
    } else {
        out["myopic_min_marginal_drop"] = nullptr;
    }
    out["greedy_set"] = greedy;
    out["greedy_value"] = expected_value_exact(loaded.instance, greedy, caps);
    emit(flags.out_path, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_bound(const CommonFlags& flags) {
    echo_config({{"subcommand", "bound"},
                 {"instance", flags.instance_path},
                 {"matroid", flags.matroid_spec},
                 {"seed", flags.seed},
                 {"cap_scenarios", flags.cap_scenarios},
                 {"cap_lp_scenarios", flags.cap_lp_scenarios},
                 {"out", flags.out_path}});
    LoadedInstance loaded = load_instance_file(flags.instance_path);
    Matroid m = resolve_matroid(flags, loaded);
    GapChainCertificate cert = verify_gap_chain(loaded.instance, m, flags.caps());
    emit(flags.out_path, certificate_to_json(cert).dump(2) + "\n");
    return cert.ok ? 0 : 3;
}

// ---------------------------------------------------------------------------

struct GapFlags {
    std::vector<int> n_list = {10, 30, 100};
    int replicates = 200;
    std::uint64_t seed = 0;
    std::string out_path;
};

int cmd_gap(const GapFlags& flags) {
    echo_config({{"subcommand", "gap"},
                 {"n", flags.n_list},
                 {"replicates", flags.replicates},
                 {"seed", flags.seed},
                 {"out", flags.out_path}});
    ExperimentReport report = gap_experiment(flags.n_list, flags.replicates, flags.seed);
    emit(flags.out_path, report_to_csv(report));
    return 0;
}

// ---------------------------------------------------------------------------

struct VerifyFlags {
    std::string suite = "small";
    std::uint64_t seed = 1;
    std::uint64_t cap_scenarios = EnumerationCaps{}.max_scenarios;
    std::uint64_t cap_lp_scenarios = EnumerationCaps{}.max_lp_scenarios;
    std::string out_path;
};

int cmd_verify(const VerifyFlags& flags) {
    echo_config({{"subcommand", "verify"},
                 {"suite", flags.suite},
                 {"seed", flags.seed},
                 {"cap_scenarios", flags.cap_scenarios},
                 {"cap_lp_scenarios", flags.cap_lp_scenarios},
                 {"out", flags.out_path}});
    if (flags.suite != "small") {
        throw InvalidInputError("unknown --suite '" + flags.suite + "' (expected small)");
    }
    VerifyOptions options;
    options.seed = flags.seed;
    options.caps.max_scenarios = flags.cap_scenarios;
    options.caps.max_lp_scenarios = flags.cap_lp_scenarios;
    VerifyReport report = run_verification_suite(options);

    std::string text = "verified " + std::to_string(report.instances) + " instances, " +
                       std::to_string(report.checks) + " checks, " +
                       std::to_string(report.violations.size()) + " violations\n";
    for (const VerifyViolation& v : report.violations) {
        text += "FAIL " + v.check + " [" + v.config + "] " + v.detail + "\n";
    }
    emit(flags.out_path, text);
    return report.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "stochastic monotone submodular maximization over matroids: instance "
        "generation, adaptive/non-adaptive policies, exact oracles, LP bound "
        "certificates, and experiments"};
    app.require_subcommand(1);

    GenFlags gen_flags;
    CLI::App* gen = app.add_subcommand("gen", "Generate an instance file");
    gen->add_option("--kind", gen_flags.kind, "random | tight")->capture_default_str();
    gen->add_option("--n", gen_flags.n, "Element count (tight: collection count)")
        ->capture_default_str();
    gen->add_option("--support", gen_flags.support, "Outcomes per element")
        ->capture_default_str();
    gen->add_option("--objective", gen_flags.objective, "coverage | concave_sum | table")
        ->capture_default_str();
    gen->add_option("--matroid-kind", gen_flags.matroid_kind,
                    "uniform | partition | explicit")
        ->capture_default_str();
    gen->add_option("--universe", gen_flags.universe, "Coverage universe size (0: 2n)")
        ->capture_default_str();
    gen->add_option("--max-rank", gen_flags.max_rank, "Generated matroid rank limit")
        ->capture_default_str();
    gen->add_option("--seed", gen_flags.seed, "Root seed (default 0)")->capture_default_str();
    gen->add_option("--out", gen_flags.out_path, "Output instance file")->required();

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Run policies with common random numbers");
    add_common(run, &run_flags.common, /*instance_required=*/true);
    run->add_option("--policy", run_flags.policies,
                    "myopic | greedy | continuous (repeatable; default: myopic greedy)");
    run->add_option("--replicates", run_flags.replicates, "Monte Carlo replicates (>= 30)")
        ->capture_default_str();
    run->add_option("--steps", run_flags.steps, "Continuous-greedy steps T")
        ->capture_default_str();
    run->add_option("--samples", run_flags.samples, "Continuous-greedy samples per step")
        ->capture_default_str();
    run->add_option("--trace", run_flags.trace_path,
                    "Also write one myopic trace as JSON lines to this file");

    CommonFlags exact_flags;
    CLI::App* exact = app.add_subcommand("exact", "Exact small-instance oracles");
    add_common(exact, &exact_flags, /*instance_required=*/true);

    CommonFlags bound_flags;
    CLI::App* bound = app.add_subcommand(
        "bound", "Adaptivity-gap bound-chain certificate (exit 3 if any link fails)");
    add_common(bound, &bound_flags, /*instance_required=*/true);

    GapFlags gap_flags;
    CLI::App* gap = app.add_subcommand("gap", "Adaptivity-gap experiment on the hard family");
    gap->add_option("--n", gap_flags.n_list, "Collection counts (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    gap->add_option("--replicates", gap_flags.replicates, "Replicates per n (>= 30)")
        ->capture_default_str();
    gap->add_option("--seed", gap_flags.seed, "Root seed (default 0)")->capture_default_str();
    gap->add_option("--out", gap_flags.out_path, "Write CSV here instead of stdout");

    VerifyFlags verify_flags;
    CLI::App* verify = app.add_subcommand(
        "verify", "Invariant suite over generated small instances (exit 3 on violation)");
    verify->add_option("--suite", verify_flags.suite, "Suite name (small)")
        ->capture_default_str();
    verify->add_option("--seed", verify_flags.seed, "Suite seed (default 1)")
        ->capture_default_str();
    verify->add_option("--cap-scenarios", verify_flags.cap_scenarios,
                       "Exact-enumeration budget")
        ->capture_default_str();
    verify->add_option("--cap-lp-scenarios", verify_flags.cap_lp_scenarios,
                       "Scenario-LP column budget")
        ->capture_default_str();
    verify->add_option("--out", verify_flags.out_path, "Write report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_flags);
        if (run->parsed()) return cmd_run(run_flags);
        if (exact->parsed()) return cmd_exact(exact_flags);
        if (bound->parsed()) return cmd_bound(bound_flags);
        if (gap->parsed()) return cmd_gap(gap_flags);
        if (verify->parsed()) return cmd_verify(verify_flags);
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const CapExceededError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
