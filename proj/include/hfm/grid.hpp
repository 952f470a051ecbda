#pragma once

// Finite emulation of the hyperfinite grid {0, 1/n, ..., 1} and run-length
// encoded subsets of it. Index i stands for the point i/n.

#include <cstdint>
#include <span>
#include <vector>

namespace hfm {

using Index = std::int64_t;

/// floor(x), except that values within rounding distance of an integer count
/// as that integer: 0.3 * 10 lands on 3 and (1/9 + 1/81) * 81 on 10.
Index snapped_floor(long double x);
Index snapped_ceil(long double x);

class GridScale {
public:
    explicit GridScale(Index n);

    Index n() const noexcept { return n_; }
    Index last_index() const noexcept { return n_; }
    Index point_count() const noexcept { return n_ + 1; }
    double point(Index i) const noexcept;

    friend bool operator==(GridScale, GridScale) = default;

private:
    Index n_;
};

struct IndexRun {
    Index start = 0;
    Index length = 0;

    Index last() const noexcept { return start + length - 1; }
    friend bool operator==(const IndexRun&, const IndexRun&) = default;
};

/// Subset of the grid stored as sorted, disjoint, non-adjacent runs.
/// Immutable once built; every constructor canonicalizes.
class GridSet {
public:
    explicit GridSet(GridScale scale) : scale_(scale) {}

    /// Builds the canonical form of the union of `runs`. Zero-length runs are
    /// ignored; overlapping or touching runs are merged.
    static GridSet from_runs(std::span<const IndexRun> runs, GridScale scale);
    static GridSet from_runs(std::initializer_list<IndexRun> runs, GridScale scale);
    static GridSet full(GridScale scale);
    /// Bit i of `mask` selects index i; requires n < 64.
    static GridSet from_mask(std::uint64_t mask, GridScale scale);

    GridScale scale() const noexcept { return scale_; }
    const std::vector<IndexRun>& runs() const noexcept { return runs_; }
    bool empty() const noexcept { return runs_.empty(); }
    Index cardinality() const noexcept { return cardinality_; }
    bool contains(Index i) const noexcept;
    bool is_subset_of(const GridSet& other) const;

    friend bool operator==(const GridSet& a, const GridSet& b) {
        return a.scale_ == b.scale_ && a.runs_ == b.runs_;
    }

private:
    GridSet(GridScale scale, std::vector<IndexRun> canonical_runs);

    GridScale scale_;
    std::vector<IndexRun> runs_;
    Index cardinality_ = 0;
};

GridSet make_gridset(std::span<const IndexRun> runs, GridScale scale);

Index cardinality(const GridSet& set);

/// card(B) / (n + 1).
double discrete_lebesgue(const GridSet& set);

/// All indices within distance k of the set, clipped to [0, n].
GridSet dilate(const GridSet& set, Index k);

/// Indices whose clipped k-neighbourhood lies inside the set.
GridSet erode(const GridSet& set, Index k);

GridSet set_union(const GridSet& a, const GridSet& b);
GridSet intersect(const GridSet& a, const GridSet& b);
GridSet complement(const GridSet& set);

/// Contiguous block of grid indices; its diameter is point_count / n.
struct DeltaInterval {
    Index start = 0;
    Index point_count = 0;

    Index last() const noexcept { return start + point_count - 1; }
    double diameter(GridScale scale) const noexcept;
    friend bool operator==(const DeltaInterval&, const DeltaInterval&) = default;
};

/// (point_count / n)^s. Shared by every evaluator so that sums agree bitwise.
double piece_cost(Index point_count, Index n, double s) noexcept;

struct Partition {
    std::vector<DeltaInterval> pieces;
    double cost = 0.0;
    double s = 1.0;
    double delta = 1.0;
    GridScale scale{1};

    /// Sum of piece_cost over the pieces, left to right.
    double recompute_cost() const noexcept;
    /// True when the pieces are sorted, pairwise disjoint and cover exactly `set`.
    bool is_partition_of(const GridSet& set) const;
    Index max_piece_points() const noexcept;
};

}  // namespace hfm
