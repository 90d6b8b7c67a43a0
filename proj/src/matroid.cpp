#include "stosub/matroid.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "stosub/errors.hpp"

namespace stosub {

namespace {

constexpr int kExplicitMaxElements = 20;

}  // namespace

bool BasePolytopeDescription::contains(const FractionalPoint& y, double tol) const {
    if (static_cast<int>(y.size()) != num_elements) {
        throw InvalidInputError("point dimension " + std::to_string(y.size()) +
                                " does not match ground set size " + std::to_string(num_elements));
    }
    for (const LinearConstraintRow& row : rows) {
        double lhs = 0.0;
        for (int i = 0; i < num_elements; ++i) {
            lhs += row.coefficients[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        }
        switch (row.relation) {
            case Relation::Equal:
                if (std::abs(lhs - row.rhs) > tol) return false;
                break;
            case Relation::AtMost:
                if (lhs > row.rhs + tol) return false;
                break;
            case Relation::AtLeast:
                if (lhs < row.rhs - tol) return false;
                break;
        }
    }
    return true;
}

Matroid Matroid::uniform(int num_elements, int k) {
    if (num_elements < 0) throw InvalidInputError("ground set size must be nonnegative");
    if (k < 0 || k > num_elements) {
        throw InvalidInputError("uniform matroid rank " + std::to_string(k) +
                                " outside [0, " + std::to_string(num_elements) + "]");
    }
    Matroid m;
    m.kind_ = MatroidKind::Uniform;
    m.n_ = num_elements;
    m.k_ = k;
    m.rank_ = k;
    return m;
}

Matroid Matroid::partition(std::vector<int> part_of, std::vector<int> capacities) {
    Matroid m;
    m.kind_ = MatroidKind::Partition;
    m.n_ = static_cast<int>(part_of.size());
    const int parts = static_cast<int>(capacities.size());
    m.part_sizes_.assign(static_cast<std::size_t>(parts), 0);
    for (int i = 0; i < m.n_; ++i) {
        const int p = part_of[static_cast<std::size_t>(i)];
        if (p < 0 || p >= parts) {
            throw InvalidInputError("element " + std::to_string(i) + " assigned to part " +
                                    std::to_string(p) + " but there are " + std::to_string(parts) +
                                    " parts");
        }
        ++m.part_sizes_[static_cast<std::size_t>(p)];
    }
    for (int p = 0; p < parts; ++p) {
        if (capacities[static_cast<std::size_t>(p)] < 0) {
            throw InvalidInputError("part " + std::to_string(p) + " has negative capacity");
        }
    }
    m.part_of_ = std::move(part_of);
    m.capacities_ = std::move(capacities);
    m.rank_ = 0;
    for (int p = 0; p < parts; ++p) {
        m.rank_ += std::min(m.capacities_[static_cast<std::size_t>(p)],
                            m.part_sizes_[static_cast<std::size_t>(p)]);
    }
    return m;
}

Matroid Matroid::explicit_family(int num_elements,
                                 const std::vector<std::vector<ElementId>>& independent_sets) {
    if (num_elements < 0 || num_elements > kExplicitMaxElements) {
        throw InvalidInputError("explicit matroids support 0 to " +
                                std::to_string(kExplicitMaxElements) + " elements, got " +
                                std::to_string(num_elements));
    }
    Matroid m;
    m.kind_ = MatroidKind::Explicit;
    m.n_ = num_elements;
    for (const std::vector<ElementId>& set : independent_sets) {
        std::uint32_t mask = 0;
        for (ElementId e : set) {
            if (e < 0 || e >= num_elements) {
                throw InvalidInputError("independent set references unknown element id " +
                                        std::to_string(e));
            }
            const std::uint32_t bit = 1u << e;
            if (mask & bit) {
                throw InvalidInputError("independent set lists element id " + std::to_string(e) +
                                        " twice");
            }
            mask |= bit;
        }
        if (m.mask_lookup_.insert(mask).second) {
            m.masks_.push_back(mask);
        }
    }
    if (!m.mask_lookup_.count(0u)) {
        throw InvalidInputError("independent-set family must contain the empty set");
    }

    // Downward closure: removing any single element keeps the set in the
    // family; inductively this covers all subsets.
    for (std::uint32_t mask : m.masks_) {
        std::uint32_t rest = mask;
        while (rest) {
            const std::uint32_t bit = rest & (~rest + 1u);
            rest ^= bit;
            if (!m.mask_lookup_.count(mask ^ bit)) {
                throw InvalidInputError(
                    "independent-set family is not downward closed: a listed set has an "
                    "unlisted subset");
            }
        }
    }

    // Exchange axiom.  With downward closure in hand it suffices to check
    // pairs |B| = |A| + 1: for any larger B, any (|A|+1)-subset of B is in
    // the family and already supplies the witness.
    std::vector<std::vector<std::uint32_t>> by_size(
        static_cast<std::size_t>(num_elements) + 1);
    for (std::uint32_t mask : m.masks_) {
        by_size[static_cast<std::size_t>(std::popcount(mask))].push_back(mask);
    }
    for (std::size_t size = 0; size + 1 < by_size.size(); ++size) {
        for (std::uint32_t a : by_size[size]) {
            for (std::uint32_t b : by_size[size + 1]) {
                std::uint32_t candidates = b & ~a;
                bool found = false;
                while (candidates) {
                    const std::uint32_t bit = candidates & (~candidates + 1u);
                    candidates ^= bit;
                    if (m.mask_lookup_.count(a | bit)) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    throw InvalidInputError(
                        "independent-set family violates the exchange axiom");
                }
            }
        }
    }

    m.rank_ = 0;
    for (std::uint32_t mask : m.masks_) {
        m.rank_ = std::max(m.rank_, std::popcount(mask));
    }
    std::sort(m.masks_.begin(), m.masks_.end());
    return m;
}

void Matroid::check_ids(const std::vector<ElementId>& set) const {
    for (ElementId e : set) {
        if (e < 0 || e >= n_) {
            throw InvalidInputError("unknown element id " + std::to_string(e));
        }
    }
}

std::uint32_t Matroid::mask_of(const std::vector<ElementId>& set) const {
    std::uint32_t mask = 0;
    for (ElementId e : set) mask |= 1u << e;
    return mask;
}

bool Matroid::is_independent(const std::vector<ElementId>& set) const {
    check_ids(set);
    switch (kind_) {
        case MatroidKind::Uniform: {
            std::vector<ElementId> sorted(set);
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            return static_cast<int>(sorted.size()) <= k_;
        }
        case MatroidKind::Partition: {
            std::vector<int> used(capacities_.size(), 0);
            std::vector<ElementId> sorted(set);
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (ElementId e : sorted) {
                const int p = part_of_[static_cast<std::size_t>(e)];
                if (++used[static_cast<std::size_t>(p)] > capacities_[static_cast<std::size_t>(p)]) {
                    return false;
                }
            }
            return true;
        }
        case MatroidKind::Explicit:
            return mask_lookup_.count(mask_of(set)) > 0;
    }
    return false;
}

bool Matroid::can_add(const std::vector<ElementId>& set, ElementId i) const {
    if (!is_independent(set)) {
        throw InvalidInputError("can_add requires an independent base set");
    }
    if (i < 0 || i >= n_) {
        throw InvalidInputError("unknown element id " + std::to_string(i));
    }
    std::vector<ElementId> extended(set);
    extended.push_back(i);
    return is_independent(extended);
}

bool Matroid::is_basis(const std::vector<ElementId>& set) const {
    if (!is_independent(set)) {
        throw InvalidInputError("is_basis requires an independent set");
    }
    std::vector<ElementId> sorted(set);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return static_cast<int>(sorted.size()) == rank_;
}

std::vector<ElementId> Matroid::max_weight_basis(const std::vector<double>& weights) const {
    if (static_cast<int>(weights.size()) != n_) {
        throw InvalidInputError("weight vector size " + std::to_string(weights.size()) +
                                " does not match ground set size " + std::to_string(n_));
    }
    std::vector<ElementId> order(static_cast<std::size_t>(n_));
    std::iota(order.begin(), order.end(), 0);
    // Stable sort on an id-ascending sequence: ties keep the lowest id first.
    std::stable_sort(order.begin(), order.end(), [&](ElementId a, ElementId b) {
        return weights[static_cast<std::size_t>(a)] > weights[static_cast<std::size_t>(b)];
    });
    std::vector<ElementId> basis;
    basis.reserve(static_cast<std::size_t>(rank_));
    for (ElementId e : order) {
        if (static_cast<int>(basis.size()) == rank_) break;
        if (can_add(basis, e)) basis.push_back(e);
    }
    std::sort(basis.begin(), basis.end());
    return basis;
}

std::vector<PolytopeGroup> Matroid::polytope_groups() const {
    switch (kind_) {
        case MatroidKind::Uniform: {
            PolytopeGroup group;
            group.members.resize(static_cast<std::size_t>(n_));
            std::iota(group.members.begin(), group.members.end(), 0);
            group.quota = k_;
            return {group};
        }
        case MatroidKind::Partition: {
            std::vector<PolytopeGroup> groups(capacities_.size());
            for (std::size_t p = 0; p < capacities_.size(); ++p) {
                groups[p].quota = std::min(capacities_[p], part_sizes_[p]);
            }
            for (int i = 0; i < n_; ++i) {
                groups[static_cast<std::size_t>(part_of_[static_cast<std::size_t>(i)])]
                    .members.push_back(i);
            }
            return groups;
        }
        case MatroidKind::Explicit:
            throw UnsupportedMatroidError(
                "explicit matroids have no compact base-polytope description");
    }
    return {};
}

BasePolytopeDescription Matroid::base_polytope() const {
    BasePolytopeDescription desc;
    desc.num_elements = n_;
    desc.groups = polytope_groups();
    for (const PolytopeGroup& group : desc.groups) {
        LinearConstraintRow row;
        row.coefficients.assign(static_cast<std::size_t>(n_), 0.0);
        for (ElementId e : group.members) row.coefficients[static_cast<std::size_t>(e)] = 1.0;
        row.relation = Relation::Equal;
        row.rhs = static_cast<double>(group.quota);
        desc.rows.push_back(std::move(row));
    }
    for (int i = 0; i < n_; ++i) {
        LinearConstraintRow lower;
        lower.coefficients.assign(static_cast<std::size_t>(n_), 0.0);
        lower.coefficients[static_cast<std::size_t>(i)] = 1.0;
        lower.relation = Relation::AtLeast;
        lower.rhs = 0.0;
        desc.rows.push_back(std::move(lower));
        LinearConstraintRow upper;
        upper.coefficients.assign(static_cast<std::size_t>(n_), 0.0);
        upper.coefficients[static_cast<std::size_t>(i)] = 1.0;
        upper.relation = Relation::AtMost;
        upper.rhs = 1.0;
        desc.rows.push_back(std::move(upper));
    }
    return desc;
}

bool Matroid::in_base_polytope(const FractionalPoint& y, double tol) const {
    return base_polytope().contains(y, tol);
}

const std::vector<int>& Matroid::part_assignment() const {
    if (kind_ != MatroidKind::Partition) {
        throw InvalidInputError("part_assignment is only defined for partition matroids");
    }
    return part_of_;
}

const std::vector<int>& Matroid::capacities() const {
    if (kind_ != MatroidKind::Partition) {
        throw InvalidInputError("capacities are only defined for partition matroids");
    }
    return capacities_;
}

int Matroid::uniform_k() const {
    if (kind_ != MatroidKind::Uniform) {
        throw InvalidInputError("uniform_k is only defined for uniform matroids");
    }
    return k_;
}

const std::vector<std::uint32_t>& Matroid::independent_masks() const {
    if (kind_ != MatroidKind::Explicit) {
        throw InvalidInputError("independent_masks is only defined for explicit matroids");
    }
    return masks_;
}

}  // namespace stosub
