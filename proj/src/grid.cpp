#include "hfm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hfm/error.hpp"

namespace hfm {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::ScaleMismatch: return "ScaleMismatch";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::InvalidS: return "InvalidS";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::InvalidEta: return "InvalidEta";
        case ErrorCode::InvalidEps: return "InvalidEps";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::StageTooLarge: return "StageTooLarge";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::NoBracket: return "NoBracket";
    }
    return "Unknown";
}

namespace {

long double snap_tolerance(long double x) {
    return std::max(1e-9L, std::fabs(x) * 4.0L * std::numeric_limits<double>::epsilon());
}

}  // namespace

Index snapped_floor(long double x) {
    const long double r = std::nearbyint(x);
    if (std::fabs(x - r) <= snap_tolerance(x)) return static_cast<Index>(r);
    return static_cast<Index>(std::floor(x));
}

Index snapped_ceil(long double x) {
    const long double r = std::nearbyint(x);
    if (std::fabs(x - r) <= snap_tolerance(x)) return static_cast<Index>(r);
    return static_cast<Index>(std::ceil(x));
}

GridScale::GridScale(Index n) : n_(n) {
    if (n < 1) throw MeasureError(ErrorCode::InvalidInput, "grid scale must be >= 1");
    if (n == std::numeric_limits<Index>::max())
        throw MeasureError(ErrorCode::Overflow, "n + 1 grid points do not fit in 64 bits");
}

double GridScale::point(Index i) const noexcept {
    return static_cast<double>(static_cast<long double>(i) / static_cast<long double>(n_));
}

namespace {

void require_same_scale(const GridSet& a, const GridSet& b) {
    if (!(a.scale() == b.scale()))
        throw MeasureError(ErrorCode::ScaleMismatch,
                           "scales " + std::to_string(a.scale().n()) + " and " +
                               std::to_string(b.scale().n()));
}

// Sorts and merges overlapping or adjacent runs in place.
std::vector<IndexRun> canonicalize(std::vector<IndexRun> runs) {
    std::sort(runs.begin(), runs.end(),
              [](const IndexRun& a, const IndexRun& b) { return a.start < b.start; });
    std::vector<IndexRun> out;
    out.reserve(runs.size());
    for (const auto& r : runs) {
        if (!out.empty() && r.start <= out.back().last() + 1) {
            auto& back = out.back();
            back.length = std::max(back.last(), r.last()) - back.start + 1;
        } else {
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace

GridSet::GridSet(GridScale scale, std::vector<IndexRun> canonical_runs)
    : scale_(scale), runs_(std::move(canonical_runs)) {
    for (const auto& r : runs_) cardinality_ += r.length;
}

GridSet GridSet::from_runs(std::span<const IndexRun> runs, GridScale scale) {
    std::vector<IndexRun> kept;
    kept.reserve(runs.size());
    for (const auto& r : runs) {
        if (r.length < 0)
            throw MeasureError(ErrorCode::InvalidInput, "negative run length");
        if (r.length == 0) continue;
        if (r.start < 0 || r.start > scale.n())
            throw MeasureError(ErrorCode::IndexOutOfRange,
                               "run start " + std::to_string(r.start));
        if (r.length - 1 > std::numeric_limits<Index>::max() - r.start)
            throw MeasureError(ErrorCode::Overflow, "run end exceeds 64-bit range");
        if (r.last() > scale.n())
            throw MeasureError(ErrorCode::IndexOutOfRange,
                               "run end " + std::to_string(r.last()) + " > n = " +
                                   std::to_string(scale.n()));
        kept.push_back(r);
    }
    return GridSet(scale, canonicalize(std::move(kept)));
}

GridSet GridSet::from_runs(std::initializer_list<IndexRun> runs, GridScale scale) {
    return from_runs(std::span<const IndexRun>(runs.begin(), runs.size()), scale);
}

GridSet GridSet::full(GridScale scale) {
    return GridSet(scale, {IndexRun{0, scale.point_count()}});
}

GridSet GridSet::from_mask(std::uint64_t mask, GridScale scale) {
    if (scale.n() >= 64) throw MeasureError(ErrorCode::TooLarge, "mask needs n < 64");
    std::vector<IndexRun> runs;
    for (Index i = 0; i <= scale.n(); ++i) {
        if (!((mask >> i) & 1u)) continue;
        if (!runs.empty() && runs.back().last() + 1 == i)
            ++runs.back().length;
        else
            runs.push_back({i, 1});
    }
    return GridSet(scale, std::move(runs));
}

bool GridSet::contains(Index i) const noexcept {
    auto it = std::upper_bound(runs_.begin(), runs_.end(), i,
                               [](Index v, const IndexRun& r) { return v < r.start; });
    if (it == runs_.begin()) return false;
    --it;
    return i <= it->last();
}

bool GridSet::is_subset_of(const GridSet& other) const {
    require_same_scale(*this, other);
    auto it = other.runs_.begin();
    for (const auto& r : runs_) {
        while (it != other.runs_.end() && it->last() < r.start) ++it;
        if (it == other.runs_.end() || it->start > r.start || it->last() < r.last())
            return false;
    }
    return true;
}

GridSet make_gridset(std::span<const IndexRun> runs, GridScale scale) {
    return GridSet::from_runs(runs, scale);
}

Index cardinality(const GridSet& set) { return set.cardinality(); }

double discrete_lebesgue(const GridSet& set) {
    return static_cast<double>(static_cast<long double>(set.cardinality()) /
                               static_cast<long double>(set.scale().point_count()));
}

GridSet dilate(const GridSet& set, Index k) {
    if (k < 0) throw MeasureError(ErrorCode::InvalidInput, "negative dilation radius");
    if (k == 0) return set;
    const Index n = set.scale().n();
    k = std::min(k, n);
    std::vector<IndexRun> grown;
    grown.reserve(set.runs().size());
    for (const auto& r : set.runs()) {
        const Index lo = std::max<Index>(0, r.start - k);
        const Index hi = r.last() > n - k ? n : r.last() + k;
        grown.push_back({lo, hi - lo + 1});
    }
    return GridSet::from_runs(grown, set.scale());
}

GridSet erode(const GridSet& set, Index k) {
    if (k < 0) throw MeasureError(ErrorCode::InvalidInput, "negative erosion radius");
    if (k == 0) return set;
    const Index n = set.scale().n();
    k = std::min(k, n + 1);
    std::vector<IndexRun> shrunk;
    for (const auto& r : set.runs()) {
        // Clipping at the grid boundary: a run touching 0 or n keeps that end.
        const Index lo = r.start == 0 ? 0 : r.start + k;
        const Index hi = r.last() == n ? n : r.last() - k;
        if (lo <= hi) shrunk.push_back({lo, hi - lo + 1});
    }
    return GridSet::from_runs(shrunk, set.scale());
}

GridSet set_union(const GridSet& a, const GridSet& b) {
    require_same_scale(a, b);
    std::vector<IndexRun> all(a.runs());
    all.insert(all.end(), b.runs().begin(), b.runs().end());
    return GridSet::from_runs(all, a.scale());
}

GridSet intersect(const GridSet& a, const GridSet& b) {
    require_same_scale(a, b);
    std::vector<IndexRun> out;
    auto ia = a.runs().begin();
    auto ib = b.runs().begin();
    while (ia != a.runs().end() && ib != b.runs().end()) {
        const Index lo = std::max(ia->start, ib->start);
        const Index hi = std::min(ia->last(), ib->last());
        if (lo <= hi) out.push_back({lo, hi - lo + 1});
        if (ia->last() < ib->last())
            ++ia;
        else
            ++ib;
    }
    return GridSet::from_runs(out, a.scale());
}

GridSet complement(const GridSet& set) {
    std::vector<IndexRun> gaps;
    Index next = 0;
    for (const auto& r : set.runs()) {
        if (r.start > next) gaps.push_back({next, r.start - next});
        next = r.last() + 1;
    }
    if (next <= set.scale().n()) gaps.push_back({next, set.scale().n() - next + 1});
    return GridSet::from_runs(gaps, set.scale());
}

double DeltaInterval::diameter(GridScale scale) const noexcept {
    return piece_cost(point_count, scale.n(), 1.0);
}

double piece_cost(Index point_count, Index n, double s) noexcept {
    if (s == 1.0) return static_cast<double>(point_count) / static_cast<double>(n);
    return std::exp(s * (std::log(static_cast<double>(point_count)) -
                         std::log(static_cast<double>(n))));
}

double Partition::recompute_cost() const noexcept {
    double total = 0.0;
    for (const auto& p : pieces) total += piece_cost(p.point_count, scale.n(), s);
    return total;
}

bool Partition::is_partition_of(const GridSet& set) const {
    if (!(set.scale() == scale)) return false;
    std::vector<IndexRun> runs;
    runs.reserve(pieces.size());
    Index prev_last = -1;
    for (const auto& p : pieces) {
        if (p.point_count <= 0 || p.start <= prev_last) return false;
        if (p.start < 0 || p.last() > scale.n()) return false;
        prev_last = p.last();
        runs.push_back({p.start, p.point_count});
    }
    return GridSet::from_runs(runs, scale) == set;
}

Index Partition::max_piece_points() const noexcept {
    Index best = 0;
    for (const auto& p : pieces) best = std::max(best, p.point_count);
    return best;
}

}  // namespace hfm
