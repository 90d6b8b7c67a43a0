#ifndef STOSUB_BOUNDS_HPP
#define STOSUB_BOUNDS_HPP

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "stosub/evaluate.hpp"
#include "stosub/lp.hpp"
#include "stosub/matroid.hpp"
#include "stosub/types.hpp"

namespace stosub {

/// e/(e-1), the adaptivity gap of stochastic monotone submodular
/// maximization over matroids (~1.58198).
inline constexpr double kAdaptivityGap = std::numbers::e / (std::numbers::e - 1.0);

/// 1 - 1/e (~0.63212), the limiting greedy/continuous-greedy ratio.
inline constexpr double kOneMinusInvE = 1.0 - 1.0 / std::numbers::e;

/// LP over the scenario space (every per-element choice of absent or a
/// support index; scenario id = canonical mixed-radix code): variables
/// alpha_s >= 0, objective f(s), constraints sum alpha = 1 and, for every
/// (element i, outcome x), sum of alpha over scenarios with s_i = x equal
/// to y_i g_i(x). The absent marginals 1 - y_i are implied.
struct ScenarioLP {
    std::uint64_t num_scenarios = 0;
    std::vector<double> scenario_values; ///< f(s) per scenario code.
    LpProblem problem;
};

/// Builds the f+ LP for a fixed marginal vector y.
ScenarioLP build_scenario_lp(const Instance& inst, const FractionalPoint& y,
                             const EnumerationCaps& caps = {});

/// f+(y): the maximum expected value over joint outcome distributions
/// whose per-element inclusion marginals are y. Always at least the
/// multilinear extension F(y) and at most (e/(e-1)) F(y).
double f_plus(const Instance& inst, const FractionalPoint& y, const EnumerationCaps& caps = {});

struct AdaptiveBoundResult {
    double value = 0.0;      ///< max over y in B(M) of f+(y).
    FractionalPoint y_star;  ///< the maximizing marginal vector.
};

/// Upper bound on every adaptive policy: one joint LP over (alpha, y)
/// coupling the scenario marginals with the base-polytope equalities.
/// Uniform and partition matroids only.
AdaptiveBoundResult adaptive_upper_bound(const Instance& inst, const Matroid& m,
                                         const EnumerationCaps& caps = {});

struct GapChainLink {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

/// Certificate for the bound chain
///   A <= U <= (e/(e-1)) M,  M <= F(rounded) <= N,
/// which together give A <= (e/(e-1)) N: the adaptivity gap on this
/// instance, exhibited constructively via pipage rounding of y*.
struct GapChainCertificate {
    double adaptive_value = 0.0;         ///< A: optimal adaptive.
    double upper_bound = 0.0;            ///< U: max f+ over B(M).
    double multilinear_at_y_star = 0.0;  ///< M: F(y*).
    double rounded_value = 0.0;          ///< F(pipage_round(y*)).
    double nonadaptive_value = 0.0;      ///< N: optimal non-adaptive.
    FractionalPoint y_star;
    std::vector<ElementId> rounded_set;
    std::vector<GapChainLink> links;
    bool ok = false;
};

GapChainCertificate verify_gap_chain(const Instance& inst, const Matroid& m,
                                     const EnumerationCaps& caps = {});

}  // namespace stosub

#endif
