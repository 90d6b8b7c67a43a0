// Acceptance gate: one check per shipped guarantee, each printing a single
// PASS/FAIL line. Usage: acceptance <path-to-cli-binary>. Exits nonzero if
// any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "stosub/bounds.hpp"
#include "stosub/errors.hpp"
#include "stosub/evaluate.hpp"
#include "stosub/experiments.hpp"
#include "stosub/io.hpp"
#include "stosub/policies.hpp"
#include "stosub/rng.hpp"
#include "stosub/verify.hpp"

using namespace stosub;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// Criteria 1-4 and the coherence half of 7 all quantify over the seeded
// small-instance suite; run it once and attribute violations by check name.
// ---------------------------------------------------------------------------

struct SuiteOutcome {
    VerifyReport report;
    double elapsed = 0.0;

    int count(const char* check) const {
        int c = 0;
        for (const VerifyViolation& v : report.violations) {
            if (v.check == check) ++c;
        }
        return c;
    }
    int exceptions() const { return count("exception"); }
};

SuiteOutcome run_suite() {
    SuiteOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    VerifyOptions options;
    options.seed = 1;
    outcome.report = run_verification_suite(options);
    outcome.elapsed = seconds_since(start);
    return outcome;
}

void criterion_1_myopic_half(const SuiteOutcome& suite) {
    const int bad = suite.count("myopic-half") + suite.exceptions();
    const bool ok = bad == 0 && suite.report.instances >= 500;
    report(1, ok,
           fmt("myopic >= 0.5*optimal_adaptive - 1e-9 on %d small instances, "
               "%d violations (%.1fs)",
               suite.report.instances, bad, suite.elapsed));
}

void criterion_2_uniform_guarantee(const SuiteOutcome& suite) {
    const int bad = suite.count("myopic-uniform-k") + suite.exceptions();
    report(2, bad == 0,
           fmt("myopic >= (1-(1-1/k)^k)*optimal_adaptive - 1e-9 on the uniform "
               "subset, %d violations",
               bad));
}

void criterion_3_adaptivity_gap(const SuiteOutcome& suite) {
    const int gap_bad = suite.count("adaptivity-gap");
    const int chain_bad = suite.count("gap-chain");
    const bool ok = gap_bad == 0 && chain_bad == 0 && suite.exceptions() == 0;
    report(3, ok,
           fmt("A <= (e/(e-1))*N + 1e-9 everywhere (%d violations) and every "
               "uniform/partition bound chain holds (%d failures)",
               gap_bad, chain_bad));
}

void criterion_4_fplus_sandwich(const SuiteOutcome& suite) {
    const int bad = suite.count("fplus-lower") + suite.count("fplus-upper");
    const bool ok = bad == 0 && suite.report.instances >= 200 && suite.exceptions() == 0;
    report(4, ok,
           fmt("F(y) - 1e-9 <= f+(y) <= (e/(e-1))*F(y) + 1e-9 on %d seeded "
               "(instance, y) pairs, %d violations",
               suite.report.instances, bad));
}

// ---------------------------------------------------------------------------

void criterion_5_tight_example() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep = gap_experiment({10, 30, 100}, 200, 1);
    const double elapsed = seconds_since(start);
    bool ok = rep.rows.size() == 3;
    std::string why;
    double prev_ratio = 0.0;
    for (const ExperimentRow& row : rep.rows) {
        const double analytic = tight_nonadaptive_value(row.n);
        if (std::fabs(row.analytic_value - analytic) > 1e-5) {
            ok = false;
            why += fmt(" analytic(n=%d) off;", row.n);
        }
        const double oracle = tight_adaptive_oracle(row.n);
        if (std::fabs(row.mc_mean - oracle) > row.mc_ci95) {
            ok = false;
            why += fmt(" mean(n=%d) outside CI of oracle;", row.n);
        }
        if (row.ratio + 1e-12 < prev_ratio) {
            ok = false;
            why += fmt(" ratio decreased at n=%d;", row.n);
        }
        prev_ratio = row.ratio;
    }
    const ExperimentRow& last = rep.rows.back();
    const double ratio_ci = last.mc_ci95 / last.analytic_value;
    if (last.ratio < 1.45 || last.ratio > 1.582 + 3.0 * ratio_ci) {
        ok = false;
        why += " n=100 ratio out of range;";
    }
    report(5, ok,
           fmt("tight family at n={10,30,100}: analytic values match the closed "
               "form, means within CI of the Binomial oracle, ratios "
               "%.3f/%.3f/%.3f nondecreasing, n=100 in [1.45, 1.582+3ci]%s "
               "(%.1fs)",
               rep.rows[0].ratio, rep.rows[1].ratio, last.ratio, why.c_str(), elapsed));
}

void criterion_6_continuous_greedy() {
    const int trials = 100;
    int hit_nonadaptive = 0;
    int hit_adaptive = 0;
    int monotone_violations = 0;
    const double vs_n = 1.0 - 1.0 / std::numbers::e - 0.05;
    const double vs_a = kOneMinusInvE * kOneMinusInvE - 0.08;
    for (int t = 0; t < trials; ++t) {
        GeneratorConfig config;
        config.n = 4 + t % 3;
        config.support_size = 2;
        config.objective = (t % 2 == 0) ? ObjectiveKind::Coverage : ObjectiveKind::ConcaveSum;
        config.matroid = (t / 2 % 2 == 0) ? MatroidKind::Uniform : MatroidKind::Partition;
        config.seed = derive_stream_seed(777, static_cast<std::uint64_t>(t));
        auto [inst, m] = gen_random_instance(config);

        RandomStream cg = RandomStream::substream(7100, static_cast<std::uint64_t>(t));
        ContinuousGreedyResult frac = continuous_greedy(inst, m, 100, 200, cg);
        const double at_y = multilinear_extension(inst, frac.y, ExtensionMode::Exact);
        std::vector<ElementId> rounded = pipage_round(inst, m, frac.y);
        const double value = expected_value_exact(inst, rounded);
        if (value < at_y - 1e-9) ++monotone_violations;

        const double N = optimal_nonadaptive_exact(inst, m).value;
        const double A = optimal_adaptive_exact(inst, m).value;
        if (value >= vs_n * N - 1e-9) ++hit_nonadaptive;
        if (value >= vs_a * A - 1e-9) ++hit_adaptive;
    }
    const bool ok = hit_nonadaptive >= 95 && hit_adaptive >= 95 && monotone_violations == 0;
    report(6, ok,
           fmt("continuous greedy (T=100, 200 samples) + pipage: >= (1-1/e-0.05)*N "
               "in %d/%d trials, >= ((e-1)/e)^2-0.08 of A in %d/%d; pipage "
               "decreased F in %d trials",
               hit_nonadaptive, trials, hit_adaptive, trials, monotone_violations));
}

void criterion_7_evaluators(const SuiteOutcome& suite) {
    const int coherence_bad =
        suite.count("coverage-closed-form") + suite.count("multilinear-indicator");

    const int trials = 200;
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
        GeneratorConfig config;
        config.n = 4 + t % 3;
        config.support_size = 2 + t % 2;
        config.objective = (t % 2 == 0) ? ObjectiveKind::Coverage : ObjectiveKind::ConcaveSum;
        config.matroid = MatroidKind::Uniform;
        config.seed = derive_stream_seed(31415, static_cast<std::uint64_t>(t));
        auto [inst, m] = gen_random_instance(config);
        std::vector<ElementId> S = greedy_nonadaptive(inst, m);
        const double exact = expected_value_exact(inst, S);
        RandomStream rng = RandomStream::substream(9001, static_cast<std::uint64_t>(t));
        McEstimate est = expected_value_mc(inst, S, 1000, rng);
        if (std::fabs(est.estimate - exact) <= est.ci_halfwidth_95 + 1e-12) ++covered;
    }
    const bool ok = coherence_bad == 0 && covered >= static_cast<int>(0.93 * trials);
    report(7, ok,
           fmt("exact/closed-form/multilinear agree within 1e-9 on all coverage "
               "instances (%d violations); Monte Carlo within its 95%% CI in "
               "%d/%d seeded trials",
               coherence_bad, covered, trials));
}

// ---------------------------------------------------------------------------

struct CliRun {
    int exit_code = -1;
    std::string output;  // stdout plus any --out file contents
};

std::string slurp(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return "<unreadable>";
    std::string data;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) data.append(buf, got);
    std::fclose(f);
    return data;
}

CliRun run_cli(const std::string& cli, const std::string& args,
               const std::vector<std::string>& artifacts) {
    const std::string capture = "/tmp/stosub_acceptance_stdout";
    const std::string cmd = cli + " " + args + " > " + capture + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    CliRun run;
    run.exit_code = (rc == -1) ? -1 : WEXITSTATUS(rc);
    run.output = slurp(capture);
    for (const std::string& path : artifacts) {
        run.output += "\n--- " + path + " ---\n";
        run.output += slurp(path);
    }
    return run;
}

void criterion_8_determinism(const std::string& cli) {
    const std::string inst = "/tmp/stosub_acceptance_inst.json";
    const std::string tight = "/tmp/stosub_acceptance_tight.json";
    struct Command {
        const char* name;
        std::string args;
        std::vector<std::string> artifacts;
    };
    const std::vector<Command> commands = {
        {"gen",
         "gen --kind random --n 5 --support 2 --objective coverage --matroid-kind "
         "uniform --seed 3 --out " + inst,
         {inst}},
        {"gen-tight", "gen --kind tight --n 3 --out " + tight, {tight}},
        {"run",
         "run --instance " + inst + " --seed 7 --replicates 60 --policy myopic "
         "--policy greedy --policy continuous",
         {}},
        {"exact", "exact --instance " + inst, {}},
        {"bound", "bound --instance " + inst, {}},
        {"gap", "gap --n 2,3 --replicates 60 --seed 2", {}},
        {"verify", "verify --suite small --seed 1", {}},
    };
    bool ok = true;
    std::string why;
    for (const Command& command : commands) {
        CliRun first = run_cli(cli, command.args, command.artifacts);
        CliRun second = run_cli(cli, command.args, command.artifacts);
        if (first.exit_code != 0 || second.exit_code != 0) {
            ok = false;
            why += fmt(" %s exited %d/%d;", command.name, first.exit_code,
                       second.exit_code);
        }
        if (first.output != second.output) {
            ok = false;
            why += fmt(" %s output differs between runs;", command.name);
        }
        if (first.output.empty()) {
            ok = false;
            why += fmt(" %s produced no output;", command.name);
        }
    }
    report(8, ok,
           fmt("every CLI subcommand byte-identical across two runs at fixed "
               "seeds (%zu commands)%s",
               commands.size(), why.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-cli-binary>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];

    try {
        SuiteOutcome suite = run_suite();
        criterion_1_myopic_half(suite);
        criterion_2_uniform_guarantee(suite);
        criterion_3_adaptivity_gap(suite);
        criterion_4_fplus_sandwich(suite);
        criterion_5_tight_example();
        criterion_6_continuous_greedy();
        criterion_7_evaluators(suite);
        criterion_8_determinism(cli);
    } catch (const Error& e) {
        std::printf("FAIL acceptance: unexpected error: %s\n", e.what());
        return 1;
    }

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", failures);
    return 1;
}
