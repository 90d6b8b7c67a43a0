#ifndef STOSUB_MATROID_HPP
#define STOSUB_MATROID_HPP

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "stosub/types.hpp"

namespace stosub {

enum class MatroidKind { Uniform, Partition, Explicit };

// One group of coordinates sharing an equality constraint of the base
// polytope: sum over members of y_i == quota.  Uniform matroids have a
// single group (all elements); partition matroids one group per part.
struct PolytopeGroup {
    std::vector<ElementId> members;
    int quota = 0;
};

enum class Relation { Equal, AtMost, AtLeast };

struct LinearConstraintRow {
    std::vector<double> coefficients;
    Relation relation = Relation::Equal;
    double rhs = 0.0;
};

// Linear description of the base polytope: the per-group equalities plus the
// [0, 1] box on every coordinate.  Every vertex is a basis indicator.
struct BasePolytopeDescription {
    int num_elements = 0;
    std::vector<PolytopeGroup> groups;
    std::vector<LinearConstraintRow> rows;

    bool contains(const FractionalPoint& y, double tol = 1e-9) const;
};

// Immutable independence system.  Uniform and Partition kinds scale to
// arbitrary ground sets; Explicit stores the full family of independent
// sets for ground sets of at most 20 elements and is validated against the
// matroid axioms (downward closure + exchange) at construction.
class Matroid {
  public:
    static Matroid uniform(int num_elements, int k);
    // part_of[i] = part index of element i; capacities[p] = max picks from
    // part p.  Capacities above the part size are allowed; the effective
    // capacity is min(capacity, part size).
    static Matroid partition(std::vector<int> part_of, std::vector<int> capacities);
    static Matroid explicit_family(int num_elements,
                                   const std::vector<std::vector<ElementId>>& independent_sets);

    MatroidKind kind() const { return kind_; }
    int num_elements() const { return n_; }
    // Common size of every basis.
    int rank() const { return rank_; }

    bool is_independent(const std::vector<ElementId>& set) const;
    // Requires `set` independent; true iff set + {i} stays independent.
    bool can_add(const std::vector<ElementId>& set, ElementId i) const;
    // Requires `set` independent; true iff it is a maximal independent set.
    bool is_basis(const std::vector<ElementId>& set) const;

    // Matroid greedy: scan elements by descending weight (ties by lowest
    // id) and keep those that preserve independence.  Always returns a
    // basis, even under negative weights.
    std::vector<ElementId> max_weight_basis(const std::vector<double>& weights) const;

    // Equality-group view of B(M); throws UnsupportedMatroidError for
    // Explicit matroids, whose base polytope has no compact description.
    std::vector<PolytopeGroup> polytope_groups() const;
    BasePolytopeDescription base_polytope() const;
    bool in_base_polytope(const FractionalPoint& y, double tol = 1e-9) const;

    // Partition accessors (InvalidInputError for other kinds).
    const std::vector<int>& part_assignment() const;
    const std::vector<int>& capacities() const;

    int uniform_k() const;

    // Explicit accessor: all independent sets as bitmasks over element ids.
    const std::vector<std::uint32_t>& independent_masks() const;

  private:
    Matroid() = default;

    void check_ids(const std::vector<ElementId>& set) const;
    std::uint32_t mask_of(const std::vector<ElementId>& set) const;

    MatroidKind kind_ = MatroidKind::Uniform;
    int n_ = 0;
    int rank_ = 0;
    int k_ = 0;
    std::vector<int> part_of_;
    std::vector<int> capacities_;
    std::vector<int> part_sizes_;
    std::vector<std::uint32_t> masks_;
    std::unordered_set<std::uint32_t> mask_lookup_;
};

}  // namespace stosub

#endif
