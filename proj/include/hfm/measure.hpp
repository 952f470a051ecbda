#pragma once

// Discrete s-dimensional measure h_delta^s on grid sets, its brute-force
// verifier, and the constructions that relate it to classical covers.

#include <cstdint>
#include <utility>
#include <vector>

#include "hfm/grid.hpp"
#include "hfm/real_interval.hpp"

namespace hfm {

struct MeasureParams {
    double s = 1.0;
    double delta = 1.0;
    GridScale scale{1};

    /// floor(delta * n): the most grid points a delta-interval may hold.
    Index max_piece_points() const;
    /// Throws InvalidS for s outside (0, 1] and InvalidInput for delta <= 0.
    void validate() const;
};

struct DiscreteMeasure {
    double value = 0.0;
    Partition partition;
};

/// Minimum of sum (diam V)^s over partitions of `set` into delta-intervals.
///
/// Within a maximal run of k points the optimum is q - 1 full pieces of
/// m = floor(delta * n) points followed by the k - (q - 1) m remainder, where
/// q = ceil(k / m): the vector (m, ..., m, r, 0, ...) majorizes every other
/// admissible composition and t -> t^s is concave. Pieces are summed left to
/// right; the witness partition lists them in the same order.
DiscreteMeasure h_delta_s(const GridSet& set, const MeasureParams& params);

/// Same value as h_delta_s, bit for bit, without materializing the witness.
/// Second member is the piece count.
std::pair<double, Index> h_delta_s_value(const GridSet& set, const MeasureParams& params);

inline constexpr Index kOracleMaxPoints = 10'000;

/// Dynamic program over every composition of each run into pieces of at most
/// m points. Independent of the closed form; only the final summation order
/// (pieces of a run in non-increasing size) is shared so results compare
/// exactly. Throws TooLarge above kOracleMaxPoints points.
double h_delta_s_oracle(const GridSet& set, const MeasureParams& params);

/// Greedy left-to-right merge: a growing interval absorbs the next piece while
/// they touch and its own diameter is still below eta. Output pieces have
/// diameter < eta + delta and, by subadditivity of t^s, the cost cannot grow.
Partition coarsen_partition(const Partition& part, double eta);

/// Real interval [start/n, (start + count - 1)/n] per piece. Pieces shorter
/// than `min_length` are dropped.
RealCover standard_cover(const Partition& part, double min_length = 0.0);

struct FattenedCover {
    GridSet set{GridScale{1}};
    std::vector<DeltaInterval> pieces;  // rendering of each widened interval
    double input_cost = 0.0;            // sum diam(U_i)^s
    double rendered_cost = 0.0;         // sum (count_i / n)^s
    double discretization_allowance = 0.0;

    double surplus() const noexcept { return rendered_cost - input_cost; }
    /// rendered_cost <= input_cost + eps + discretization_allowance.
    double guaranteed_bound(double eps) const noexcept {
        return input_cost + eps + discretization_allowance;
    }
};

/// Widens the i-th interval (1-based) by (eps/2)^(1/s) 2^(-i/s) on each side,
/// clips to [0, 1] and renders every widened interval on the grid.
FattenedCover fattened_cover_superset(const RealCover& cover, double eps, double s,
                                      GridScale scale);

/// Upper approximation of the Hausdorff delta-measure of the union of
/// `intervals`, minimizing over covers by intervals whose endpoints lie on the
/// breakpoint grid {i / resolution} plus the input endpoints.
double classical_cover_measure(const RealCover& intervals, double delta, double s,
                               Index resolution);

struct BoxCount {
    double dimension = 0.0;
    std::vector<std::pair<Index, Index>> counts;  // (box size, boxes hit)
};

/// Boxes are index blocks [j b, (j + 1) b); dimension is the least-squares
/// slope of log N(b) against log(n / b).
BoxCount box_count_estimate(const GridSet& set, const std::vector<Index>& box_sizes);

}  // namespace hfm
