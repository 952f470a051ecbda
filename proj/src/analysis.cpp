#include "hfm/analysis.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <variant>

#include "hfm/error.hpp"
#include "hfm/regression.hpp"

namespace hfm {

Index ceil_sqrt(Index n) {
    if (n <= 0) return 0;
    auto r = static_cast<Index>(std::sqrt(static_cast<long double>(n)));
    while (static_cast<__int128>(r) * r > n) --r;
    while (static_cast<__int128>(r + 1) * (r + 1) <= n) ++r;
    return static_cast<__int128>(r) * r == n ? r : r + 1;
}

Index HaloRule::radius(GridScale scale) const {
    return kind == Kind::SqrtN ? ceil_sqrt(scale.n()) : fixed;
}

HaloRule HaloRule::parse(std::string_view text) {
    if (text == "sqrt_n") return {};
    constexpr std::string_view prefix = "fixed:";
    if (text.substr(0, prefix.size()) == prefix) {
        const auto digits = text.substr(prefix.size());
        Index k = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && k >= 1)
            return {Kind::Fixed, k};
    }
    throw MeasureError(ErrorCode::InvalidInput,
                       "halo rule must be sqrt_n or fixed:K, got " + std::string(text));
}

std::string HaloRule::to_string() const {
    return kind == Kind::SqrtN ? "sqrt_n" : "fixed:" + std::to_string(fixed);
}

MeasureReport theorem_rhs(const SetSpec& spec, const MeasureParams& params, Index halo) {
    if (halo < 1) throw MeasureError(ErrorCode::InvalidInput, "halo must be >= 1");
    const GridSet superset = dilate(render(spec, params.scale), halo);
    const auto [value, pieces] = h_delta_s_value(superset, params);
    MeasureReport r;
    r.spec_id = spec.id;
    r.n = params.scale.n();
    r.delta = params.delta;
    r.s = params.s;
    r.halo = halo;
    r.kind = ReportKind::DiscreteH;
    r.value = value;
    r.piece_count = pieces;
    if (value > kDivergingValue) r.status = "diverging";
    return r;
}

LebesgueBounds lebesgue_bounds(const SetSpec& spec, GridScale scale, Index halo) {
    if (halo < 1) throw MeasureError(ErrorCode::InvalidInput, "halo must be >= 1");
    const GridSet shadow = render(spec, scale);
    return {discrete_lebesgue(erode(shadow, halo)), discrete_lebesgue(dilate(shadow, halo))};
}

namespace {

RealCover standard_intervals(const SetSpec& spec) {
    if (const auto* u = std::get_if<IntervalUnion>(&spec.shape)) return u->intervals;
    if (const auto* c = std::get_if<CantorSet>(&spec.shape))
        return cantor_intervals(c->lambda, c->stage);
    if (const auto* p = std::get_if<PointFamily>(&spec.shape)) {
        RealCover points{{0.0, 0.0}};
        for (Index k = 1; k <= p->count; ++k) {
            const double x = 1.0 / static_cast<double>(k);
            points.push_back({x, x});
        }
        return points;
    }
    if (std::holds_alternative<FullSet>(spec.shape)) return {{0.0, 1.0}};
    return {};
}

// Evaluates every schedule step for a candidate exponent. Renderings do not
// depend on s and are built once.
class ScheduleEvaluator {
public:
    ScheduleEvaluator(const SetSpec& spec, const std::vector<ScheduleStep>& schedule,
                      const DimensionOptions& options)
        : schedule_(schedule), options_(options) {
        for (const auto& step : schedule) {
            const SetSpec staged = with_stage(spec, step.stage);
            if (options.method == DimensionMethod::DiscreteMeasure) {
                const GridScale scale(step.n);
                sets_.push_back(dilate(render(staged, scale), options.halo.radius(scale)));
            } else {
                covers_.push_back(standard_intervals(staged));
            }
        }
    }

    SlopeProbe probe(double s) const {
        SlopeProbe out;
        out.s = s;
        std::vector<double> xs, ys;
        bool vanished = false;
        for (std::size_t j = 0; j < schedule_.size(); ++j) {
            const auto& step = schedule_[j];
            double v = 0.0;
            if (options_.method == DimensionMethod::DiscreteMeasure) {
                v = h_delta_s_value(sets_[j], {s, step.delta, GridScale(step.n)}).first;
            } else {
                v = classical_cover_measure(covers_[j], step.delta, s, options_.resolution);
            }
            out.values.push_back(v);
            if (!(v > 0.0) || !std::isfinite(v)) {
                vanished = true;
                continue;
            }
            xs.push_back(-std::log(step.delta));
            ys.push_back(std::log(v));
        }
        const double last = out.values.back();
        if (vanished || last < options_.vanish_below)
            out.slope = -std::numeric_limits<double>::infinity();
        else if (last > options_.diverge_above)
            out.slope = std::numeric_limits<double>::infinity();
        else
            out.slope = least_squares(xs, ys).slope;
        return out;
    }

private:
    const std::vector<ScheduleStep>& schedule_;
    const DimensionOptions& options_;
    std::vector<GridSet> sets_;
    std::vector<RealCover> covers_;
};

void validate_schedule(const std::vector<ScheduleStep>& schedule) {
    if (schedule.size() < 3)
        throw MeasureError(ErrorCode::InvalidInput, "schedule needs at least three steps");
    for (std::size_t j = 0; j < schedule.size(); ++j) {
        if (schedule[j].n < 1 || !(schedule[j].delta > 0.0))
            throw MeasureError(ErrorCode::InvalidInput, "schedule step with bad n or delta");
        if (j > 0 && (schedule[j].n < schedule[j - 1].n ||
                      !(schedule[j].delta < schedule[j - 1].delta)))
            throw MeasureError(ErrorCode::InvalidInput,
                               "schedule must have non-decreasing n and decreasing delta");
    }
}

}  // namespace

DimensionResult dimension_estimate(const SetSpec& spec, const std::vector<ScheduleStep>& schedule,
                                   const DimensionOptions& options) {
    validate_schedule(schedule);
    const ScheduleEvaluator eval(spec, schedule, options);
    DimensionResult result;
    auto probe = [&](double s) {
        result.probes.push_back(eval.probe(s));
        return result.probes.back().slope;
    };

    const double band = options.slope_band;
    const double at_one = probe(1.0);
    if (at_one > band)
        throw MeasureError(ErrorCode::NoBracket, "values still grow as delta shrinks at s = 1");
    if (at_one >= -band) {
        result.dimension = 1.0;
        return result;
    }

    double lo = 1e-6;
    const double at_lo = probe(lo);
    if (at_lo < -band)
        throw MeasureError(ErrorCode::NoBracket, "values vanish as delta shrinks for every s");
    if (at_lo < 0.0) {
        result.dimension = lo;
        return result;
    }

    double hi = 1.0;
    while (hi - lo > options.s_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) < 0.0)
            hi = mid;
        else
            lo = mid;
    }
    result.dimension = 0.5 * (lo + hi);
    return result;
}

std::vector<ScheduleStep> default_schedule(const SetSpec& spec, const HaloRule& halo, int steps) {
    if (steps < 3) throw MeasureError(ErrorCode::InvalidInput, "schedule needs at least three steps");
    constexpr __int128 kCap = static_cast<__int128>(1) << 62;
    std::vector<ScheduleStep> out;

    if (const auto* c = std::get_if<CantorSet>(&spec.shape)) {
        // n = D^4 with D the stage denominator: the halo sqrt(n) = D^2 is a
        // vanishing fraction of the stage width n r^k, and delta holds exactly
        // one dilated stage interval.
        const Ratio r = cantor_child_ratio(c->lambda);
        int top = 0;
        __int128 d = 1;
        for (int k = 1; k <= kMaxCantorStage; ++k) {
            d *= r.den;
            if (d * d * d * d > kCap) break;
            top = k;
        }
        if (top + 1 < steps)
            throw MeasureError(ErrorCode::InvalidInput,
                               "Cantor ratio too fine for a " + std::to_string(steps) +
                                   "-step schedule in 64-bit grids");
        for (int k = top - steps + 1; k <= top; ++k) {
            __int128 den = 1, num = 1;
            for (int i = 0; i < k; ++i) {
                den *= r.den;
                num *= r.num;
            }
            const auto n = static_cast<Index>(den * den * den * den);
            const auto width = static_cast<Index>(num * den * den * den);
            const Index h = halo.radius(GridScale(n));
            const Index points = width + 2 * h + 1;
            out.push_back({n, static_cast<double>(static_cast<long double>(points) / n), k});
        }
        return out;
    }

    if (const auto* p = std::get_if<PointFamily>(&spec.shape)) {
        // Grid fine enough that halos around the two closest points (1/c and
        // 1/(c+1)) stay apart: 2 sqrt(n) / n < 1 / (2 c (c + 1)).
        const __int128 c = std::max<Index>(p->count, 1);
        const __int128 gap = 4 * c * (c + 1);
        __int128 n = std::min(gap * gap, kCap);
        for (int j = 0; j < steps; ++j) {
            const auto nn = static_cast<Index>(n);
            out.push_back({nn, std::pow(static_cast<double>(nn), -0.25), 0});
            n = std::min(n * 4, kCap);
            if (j + 1 < steps && static_cast<Index>(n) == nn)
                throw MeasureError(ErrorCode::InvalidInput,
                                   "point family too dense for a 64-bit schedule");
        }
        return out;
    }

    // Interval unions and the full set: delta = 10^-j with n = 100 / delta^4.
    __int128 n = 1;
    for (int j = 1; j <= steps; ++j) {
        n *= 10'000;
        const __int128 nn = std::min(n * 100, kCap);
        out.push_back({static_cast<Index>(nn), std::pow(10.0, -j), 0});
    }
    return out;
}

}  // namespace hfm
