#include "hfm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hfm/error.hpp"
#include "hfm/regression.hpp"

namespace hfm {

namespace {

void validate_s(double s) {
    if (!(s > 0.0 && s <= 1.0))
        throw MeasureError(ErrorCode::InvalidS, "s = " + std::to_string(s) + " not in (0, 1]");
}

Index checked_piece_points(const GridSet& set, const MeasureParams& params) {
    params.validate();
    if (!(set.scale() == params.scale))
        throw MeasureError(ErrorCode::ScaleMismatch, "set and parameters use different grids");
    const Index m = params.max_piece_points();
    if (m < 1 && !set.empty())
        throw MeasureError(ErrorCode::GridTooCoarse,
                           "floor(delta * n) = 0 for delta = " + std::to_string(params.delta) +
                               ", n = " + std::to_string(params.scale.n()));
    return m;
}

// Visits the optimal pieces in order and returns their summed cost.
template <class Sink>
double closed_form(const GridSet& set, Index m, double s, Sink&& sink) {
    const Index n = set.scale().n();
    const double full_cost = piece_cost(m, n, s);
    double total = 0.0;
    for (const auto& run : set.runs()) {
        const Index q = (run.length + m - 1) / m;
        for (Index j = 0; j + 1 < q; ++j) {
            total += full_cost;
            sink(run.start + j * m, m);
        }
        const Index rest = run.length - (q - 1) * m;
        total += piece_cost(rest, n, s);
        sink(run.start + (q - 1) * m, rest);
    }
    return total;
}

}  // namespace

Index MeasureParams::max_piece_points() const {
    return snapped_floor(static_cast<long double>(delta) * scale.n());
}

void MeasureParams::validate() const {
    validate_s(s);
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw MeasureError(ErrorCode::InvalidInput, "delta must be a positive finite number");
}

DiscreteMeasure h_delta_s(const GridSet& set, const MeasureParams& params) {
    const Index m = checked_piece_points(set, params);
    DiscreteMeasure out;
    out.partition.s = params.s;
    out.partition.delta = params.delta;
    out.partition.scale = params.scale;
    if (set.empty()) return out;
    auto& pieces = out.partition.pieces;
    out.value = closed_form(set, m, params.s,
                            [&](Index start, Index count) { pieces.push_back({start, count}); });
    out.partition.cost = out.value;
    return out;
}

std::pair<double, Index> h_delta_s_value(const GridSet& set, const MeasureParams& params) {
    const Index m = checked_piece_points(set, params);
    if (set.empty()) return {0.0, 0};
    Index count = 0;
    const double value = closed_form(set, m, params.s, [&](Index, Index) { ++count; });
    return {value, count};
}

double h_delta_s_oracle(const GridSet& set, const MeasureParams& params) {
    const Index m = checked_piece_points(set, params);
    if (set.cardinality() > kOracleMaxPoints)
        throw MeasureError(ErrorCode::TooLarge,
                           std::to_string(set.cardinality()) + " points exceed the oracle bound");
    if (set.empty()) return 0.0;

    const Index n = params.scale.n();
    const Index widest = std::min(m, set.cardinality());
    std::vector<double> cost_of(static_cast<std::size_t>(widest) + 1, 0.0);
    for (Index t = 1; t <= widest; ++t) cost_of[t] = piece_cost(t, n, params.s);

    // Relative slack under which two candidate sums are treated as tied; ties
    // go to the larger last piece.
    constexpr double kTie = 1e-12;

    double total = 0.0;
    std::vector<double> best;
    std::vector<Index> last_piece;
    std::vector<Index> sizes;
    for (const auto& run : set.runs()) {
        const Index k = run.length;
        best.assign(static_cast<std::size_t>(k) + 1, 0.0);
        last_piece.assign(static_cast<std::size_t>(k) + 1, 0);
        for (Index j = 1; j <= k; ++j) {
            double b = std::numeric_limits<double>::infinity();
            Index choice = 0;
            for (Index t = std::min(m, j); t >= 1; --t) {
                const double cand = best[j - t] + cost_of[t];
                if (choice == 0 || cand < b - kTie * b) {
                    b = cand;
                    choice = t;
                }
            }
            best[j] = b;
            last_piece[j] = choice;
        }
        sizes.clear();
        for (Index j = k; j > 0; j -= last_piece[j]) sizes.push_back(last_piece[j]);
        std::sort(sizes.begin(), sizes.end(), std::greater<>());
        for (Index t : sizes) total += cost_of[t];
    }
    return total;
}

Partition coarsen_partition(const Partition& part, double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw MeasureError(ErrorCode::InvalidEta, "eta must be a positive finite number");
    const long double eta_points = static_cast<long double>(eta) * part.scale.n();

    Partition out;
    out.s = part.s;
    out.delta = eta + part.delta;
    out.scale = part.scale;
    const auto& in = part.pieces;
    for (std::size_t i = 0; i < in.size();) {
        DeltaInterval current = in[i++];
        while (i < in.size() && in[i].start == current.last() + 1 &&
               static_cast<long double>(current.point_count) < eta_points) {
            current.point_count += in[i++].point_count;
        }
        out.pieces.push_back(current);
    }
    out.cost = out.recompute_cost();
    return out;
}

RealCover standard_cover(const Partition& part, double min_length) {
    RealCover cover;
    cover.reserve(part.pieces.size());
    for (const auto& p : part.pieces) {
        RealInterval iv{part.scale.point(p.start), part.scale.point(p.last())};
        if (iv.length() < min_length) continue;
        cover.push_back(iv);
    }
    return cover;
}

FattenedCover fattened_cover_superset(const RealCover& cover, double eps, double s,
                                      GridScale scale) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw MeasureError(ErrorCode::InvalidEps, "eps must be a positive finite number");
    validate_s(s);

    const Index n = scale.n();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double base = std::pow(eps / 2.0, 1.0 / s);
    FattenedCover out;
    std::vector<IndexRun> runs;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        const auto& u = cover[i];
        if (!(u.lo <= u.hi))
            throw MeasureError(ErrorCode::InvalidInput, "cover interval with lo > hi");
        out.input_cost += std::pow(u.length(), s);

        const double widen = base * std::pow(2.0, -static_cast<double>(i + 1) / s);
        const double lo = std::max(0.0, u.lo - widen);
        const double hi = std::min(1.0, u.hi + widen);
        if (lo > hi) continue;
        out.discretization_allowance += std::pow(hi - lo + inv_n, s) - std::pow(hi - lo, s);

        const Index first = static_cast<Index>(std::ceil(static_cast<long double>(lo) * n));
        const Index last = static_cast<Index>(std::floor(static_cast<long double>(hi) * n));
        if (first > last) continue;
        out.pieces.push_back({first, last - first + 1});
        out.rendered_cost += piece_cost(last - first + 1, n, s);
        runs.push_back({first, last - first + 1});
    }
    out.set = GridSet::from_runs(runs, scale);
    return out;
}

double classical_cover_measure(const RealCover& intervals, double delta, double s,
                               Index resolution) {
    validate_s(s);
    if (!(delta > 0.0)) throw MeasureError(ErrorCode::InvalidInput, "delta must be positive");
    if (resolution < 1) throw MeasureError(ErrorCode::InvalidInput, "resolution must be >= 1");
    for (const auto& iv : intervals) {
        if (!(iv.lo >= 0.0 && iv.hi <= 1.0 && iv.lo <= iv.hi))
            throw MeasureError(ErrorCode::InvalidInput, "interval outside [0, 1]");
    }
    if (intervals.empty()) return 0.0;

    std::vector<RealInterval> merged = intervals;
    std::sort(merged.begin(), merged.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    {
        std::vector<RealInterval> tmp;
        for (const auto& iv : merged) {
            if (!tmp.empty() && iv.lo <= tmp.back().hi)
                tmp.back().hi = std::max(tmp.back().hi, iv.hi);
            else
                tmp.push_back(iv);
        }
        merged.swap(tmp);
    }

    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(resolution) + 1 + 2 * merged.size());
    for (Index i = 0; i <= resolution; ++i)
        points.push_back(static_cast<double>(i) / static_cast<double>(resolution));
    for (const auto& iv : merged) {
        points.push_back(iv.lo);
        points.push_back(iv.hi);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    // cell_full[i]: the open cell (points[i], points[i+1]) lies inside the union.
    const std::size_t count = points.size();
    std::vector<char> cell_full(count, 0);
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i + 1 < count; ++i) {
            const double mid = 0.5 * (points[i] + points[i + 1]);
            while (k < merged.size() && merged[k].hi < mid) ++k;
            cell_full[i] = (k < merged.size() && merged[k].lo <= mid) ? 1 : 0;
        }
    }

    // covered[i + 1]: cheapest cover of the union restricted to [0, points[i]].
    const double reach = delta * (1.0 + 1e-12);
    std::vector<double> covered(count + 1, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        double best = std::numeric_limits<double>::infinity();
        const bool incoming_full = i > 0 && cell_full[i - 1];
        // A point of the union not inside a full cell is covered at cost 0^s = 0.
        if (!incoming_full) best = covered[i];
        for (std::size_t a = i; a-- > 0;) {
            const double width = points[i] - points[a];
            if (width > reach) break;
            const double left = (a > 0 && cell_full[a - 1]) ? covered[a + 1] : covered[a];
            best = std::min(best, left + std::pow(width, s));
        }
        covered[i + 1] = best;
    }
    return covered[count];
}

BoxCount box_count_estimate(const GridSet& set, const std::vector<Index>& box_sizes) {
    if (box_sizes.size() < 2)
        throw MeasureError(ErrorCode::DegenerateFit, "need at least two box sizes");
    if (set.empty()) throw MeasureError(ErrorCode::DegenerateFit, "empty set has no boxes");
    const double n = static_cast<double>(set.scale().n());

    BoxCount out;
    std::vector<double> xs, ys;
    for (Index b : box_sizes) {
        if (b < 1) throw MeasureError(ErrorCode::InvalidInput, "box size must be >= 1");
        Index hit = 0;
        Index last_box = -1;
        for (const auto& run : set.runs()) {
            const Index first = std::max(run.start / b, last_box + 1);
            const Index last = run.last() / b;
            if (last >= first) hit += last - first + 1;
            last_box = std::max(last_box, last);
        }
        out.counts.emplace_back(b, hit);
        xs.push_back(std::log(n / static_cast<double>(b)));
        ys.push_back(std::log(static_cast<double>(hit)));
    }
    out.dimension = least_squares(xs, ys).slope;
    return out;
}

}  // namespace hfm
