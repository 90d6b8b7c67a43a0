#include <cmath>
#include <vector>

#include "doctest.h"
#include "stosub/bounds.hpp"
#include "stosub/errors.hpp"
#include "stosub/evaluate.hpp"
#include "stosub/matroid.hpp"
#include "stosub/policies.hpp"
#include "stosub/rng.hpp"
#include "stosub/types.hpp"

using namespace stosub;

namespace {

WeightedOutcome cover(std::vector<int> items, double prob) {
    return {SubsetOutcome{std::move(items)}, prob};
}

Instance shared_item_pair() {
    std::vector<StochasticElement> elems;
    elems.push_back({0, DiscreteDistribution({cover({0}, 0.5), cover({}, 0.5)})});
    elems.push_back({1, DiscreteDistribution({cover({0}, 0.5), cover({}, 0.5)})});
    return Instance(std::move(elems), CoverageObjective{1, {}});
}

Instance adaptive_wins_instance() {
    std::vector<StochasticElement> elems;
    elems.push_back({0, DiscreteDistribution({cover({0}, 0.5), cover({}, 0.5)})});
    elems.push_back({1, DiscreteDistribution({cover({0}, 1.0)})});
    elems.push_back({2, DiscreteDistribution({cover({1}, 1.0)})});
    return Instance(std::move(elems), CoverageObjective{2, {1.0, 0.6}});
}

}  // namespace

TEST_CASE("gap constants") {
    CHECK(kAdaptivityGap == doctest::Approx(1.5819767068693265).epsilon(1e-15));
    CHECK(kOneMinusInvE == doctest::Approx(0.6321205588285577).epsilon(1e-15));
    CHECK(kAdaptivityGap * (1.0 - kOneMinusInvE) ==
          doctest::Approx(kAdaptivityGap - 1.0).epsilon(1e-12));
}

TEST_CASE("scenario LP shape and values") {
    Instance inst = shared_item_pair();
    ScenarioLP lp = build_scenario_lp(inst, {0.5, 0.5});
    CHECK(lp.num_scenarios == 9);
    // Normalization row plus one marginal row per (element, outcome).
    CHECK(lp.problem.rows.size() == 1 + 4);
    CHECK(lp.problem.num_vars == 9);
    REQUIRE(lp.scenario_values.size() == 9);
    for (std::uint64_t code = 0; code < 9; ++code) {
        CHECK(lp.scenario_values[code] ==
              doctest::Approx(eval_f(inst, inst.decode(code))).epsilon(1e-12));
    }
    // Normalization row: all ones equal to 1.
    for (double c : lp.problem.rows[0]) CHECK(c == doctest::Approx(1.0));
    CHECK(lp.problem.rhs[0] == doctest::Approx(1.0));
}

TEST_CASE("f-plus on the shared-item pair") {
    Instance inst = shared_item_pair();
    // Half inclusion each: the best correlation covers the item whenever
    // either element is present and successful, totalling 1/2.
    CHECK(f_plus(inst, {0.5, 0.5}) == doctest::Approx(0.5).epsilon(1e-9));
    // Full inclusion: anti-correlated successes cover the item surely,
    // strictly above F(1,1) = 3/4.
    CHECK(f_plus(inst, {1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f_plus(inst, {0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS((void)f_plus(inst, {0.5}), InvalidInputError);
    CHECK_THROWS_AS((void)f_plus(inst, {0.5, 1.5}), InvalidInputError);
}

TEST_CASE("f-plus sandwich against the multilinear extension") {
    RandomStream rng(606);
    Instance inst = shared_item_pair();
    for (int trial = 0; trial < 20; ++trial) {
        FractionalPoint y = {rng.uniform01(), rng.uniform01()};
        const double fp = f_plus(inst, y);
        const double M = multilinear_extension(inst, y, ExtensionMode::Exact);
        CHECK(fp >= M - 1e-9);
        CHECK(fp <= kAdaptivityGap * M + 1e-9);
    }
}

TEST_CASE("f-plus is concave along segments") {
    Instance inst = adaptive_wins_instance();
    RandomStream rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        FractionalPoint a = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        FractionalPoint b = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        FractionalPoint mid(3);
        for (int i = 0; i < 3; ++i) mid[static_cast<std::size_t>(i)] =
            0.5 * (a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)]);
        CHECK(f_plus(inst, mid) >= 0.5 * (f_plus(inst, a) + f_plus(inst, b)) - 1e-9);
    }
}

TEST_CASE("f-plus respects the scenario cap") {
    Instance inst = adaptive_wins_instance();
    EnumerationCaps caps;
    caps.max_lp_scenarios = 5;
    CHECK_THROWS_AS((void)f_plus(inst, {0.5, 0.5, 0.5}, caps), CapExceededError);
}

TEST_CASE("adaptive upper bound on hand instances") {
    SUBCASE("disjoint deterministic elements") {
        std::vector<StochasticElement> elems;
        elems.push_back({0, DiscreteDistribution({cover({0}, 1.0)})});
        elems.push_back({1, DiscreteDistribution({cover({1}, 1.0)})});
        Instance inst(std::move(elems), CoverageObjective{2, {2.0, 1.0}});
        Matroid m = Matroid::uniform(2, 1);
        AdaptiveBoundResult bound = adaptive_upper_bound(inst, m);
        CHECK(bound.value == doctest::Approx(2.0).epsilon(1e-7));
        CHECK(bound.y_star[0] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(m.in_base_polytope(bound.y_star, 1e-6));
    }
    SUBCASE("shared item, rank one") {
        Instance inst = shared_item_pair();
        Matroid m = Matroid::uniform(2, 1);
        AdaptiveBoundResult bound = adaptive_upper_bound(inst, m);
        // Any split of one inclusion gives coverage probability 1/2.
        CHECK(bound.value == doctest::Approx(0.5).epsilon(1e-7));
        const double A = optimal_adaptive_exact(inst, m).value;
        CHECK(A <= bound.value + 1e-9);
    }
    SUBCASE("explicit matroids are not supported") {
        Instance inst = shared_item_pair();
        Matroid e = Matroid::explicit_family(2, {{}, {0}, {1}});
        CHECK_THROWS_AS((void)adaptive_upper_bound(inst, e), UnsupportedMatroidError);
    }
}

TEST_CASE("upper bound dominates the exact adaptive optimum") {
    Instance inst = adaptive_wins_instance();
    Matroid m = Matroid::partition({0, 1, 1}, {1, 1});
    AdaptiveBoundResult bound = adaptive_upper_bound(inst, m);
    const double A = optimal_adaptive_exact(inst, m).value;
    CHECK(A == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(bound.value >= A - 1e-9);
    CHECK(m.in_base_polytope(bound.y_star, 1e-6));
}

TEST_CASE("gap chain certificate on the adaptivity showcase") {
    Instance inst = adaptive_wins_instance();
    Matroid m = Matroid::partition({0, 1, 1}, {1, 1});
    GapChainCertificate cert = verify_gap_chain(inst, m);
    CHECK(cert.ok);
    CHECK(cert.adaptive_value == doctest::Approx(1.3).epsilon(1e-9));
    CHECK(cert.nonadaptive_value == doctest::Approx(1.1).epsilon(1e-9));
    CHECK(cert.upper_bound >= cert.adaptive_value - 1e-9);
    CHECK(cert.multilinear_at_y_star <= cert.rounded_value + 1e-9);
    CHECK(cert.rounded_value <= cert.nonadaptive_value + 1e-9);
    REQUIRE(cert.links.size() == 5);
    CHECK(cert.links[0].name == "A <= U");
    CHECK(cert.links[4].name == "A <= (e/(e-1)) N");
    for (const GapChainLink& link : cert.links) CHECK(link.ok);
    CHECK(m.is_basis(cert.rounded_set));
}

TEST_CASE("gap chain collapses to equalities on deterministic instances") {
    std::vector<StochasticElement> elems;
    elems.push_back({0, DiscreteDistribution({cover({0}, 1.0)})});
    elems.push_back({1, DiscreteDistribution({cover({1}, 1.0)})});
    Instance inst(std::move(elems), CoverageObjective{2, {}});
    Matroid m = Matroid::uniform(2, 2);
    GapChainCertificate cert = verify_gap_chain(inst, m);
    CHECK(cert.ok);
    CHECK(cert.adaptive_value == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(cert.upper_bound == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(cert.multilinear_at_y_star == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(cert.rounded_value == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(cert.nonadaptive_value == doctest::Approx(2.0).epsilon(1e-7));
}
