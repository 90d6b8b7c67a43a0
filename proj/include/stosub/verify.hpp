#ifndef STOSUB_VERIFY_HPP
#define STOSUB_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stosub/evaluate.hpp"
#include "stosub/experiments.hpp"

namespace stosub {

/// Deterministic grid of small instances (n <= 6, support <= 3, rank <= 3)
/// crossing objective kinds, matroid kinds, and seeds; 540 entries.
std::vector<GeneratorConfig> verification_grid(std::uint64_t seed);

std::string describe_config(const GeneratorConfig& config);

struct VerifyViolation {
    std::string check;
    std::string config;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    EnumerationCaps caps;
    bool gap_chain = true;    ///< LP-backed bound certificate per instance.
    bool fplus_pairs = true;  ///< f+ sandwich at a random y per instance.
};

struct VerifyReport {
    int instances = 0;
    std::uint64_t checks = 0;
    std::vector<VerifyViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Exhaustive invariant battery over the grid: myopic 1/2 guarantee,
/// uniform-matroid finite-k guarantee, adaptivity-gap bound, greedy 1/2,
/// marginal-sequence monotonicity, early-stopping equivalence, evaluator
/// coherence on coverage instances, bound-chain certificates, and the
/// f+ sandwich.
VerifyReport run_verification_suite(const VerifyOptions& options = {});

}  // namespace stosub

#endif
