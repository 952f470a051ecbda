#include "hfm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hfm/error.hpp"

namespace hfm {

namespace {

using Wide = __int128;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::int64_t checked_pow(std::int64_t base, int exp) {
    std::int64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (__builtin_mul_overflow(out, base, &out))
            throw MeasureError(ErrorCode::StageTooLarge,
                               "Cantor endpoints overflow 64-bit denominators at stage " +
                                   std::to_string(exp));
    }
    return out;
}

Index floor_div(Wide num, Wide den) {
    Wide q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return static_cast<Index>(q);
}

Index ceil_div(Wide num, Wide den) { return -floor_div(-num, den); }

void validate_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw MeasureError(ErrorCode::InvalidInput, "Cantor lambda must lie in (0, 1)");
}

GridSet render_points(std::vector<Index> indices, GridScale scale) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    std::vector<IndexRun> runs;
    for (Index i : indices) {
        if (!runs.empty() && runs.back().last() + 1 == i)
            ++runs.back().length;
        else
            runs.push_back({i, 1});
    }
    return GridSet::from_runs(runs, scale);
}

// Nearest index to n/k, ties toward 0.
Index nearest_reciprocal_index(Index n, Index k) {
    const Index q = n / k;
    const Index rem = n % k;
    return (static_cast<Wide>(rem) * 2 > k) ? q + 1 : q;
}

}  // namespace

Ratio approximate_ratio(double x, std::int64_t max_den) {
    // Convergents h/k of the continued fraction of x.
    std::int64_t h_prev = 0, h = 1;
    std::int64_t k_prev = 1, k = 0;
    long double rest = x;
    for (int iter = 0; iter < 64; ++iter) {
        const auto a = static_cast<std::int64_t>(std::floor(rest));
        const std::int64_t k_next = a * k + k_prev;
        if (k_next > max_den) break;
        const std::int64_t h_next = a * h + h_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        const long double frac = rest - static_cast<long double>(a);
        if (std::fabs(static_cast<long double>(h) / k - x) < 1e-15L || frac < 1e-18L) break;
        rest = 1.0L / frac;
    }
    const std::int64_t g = std::gcd(h, k);
    return {h / g, k / g};
}

Ratio cantor_child_ratio(double lambda) {
    validate_lambda(lambda);
    const Ratio lam = approximate_ratio(lambda);
    std::int64_t num = lam.den - lam.num;
    std::int64_t den = 2 * lam.den;
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

std::vector<RationalInterval> cantor_rational_intervals(double lambda, int stage) {
    if (stage < 0) throw MeasureError(ErrorCode::InvalidInput, "negative Cantor stage");
    if (stage > kMaxCantorStage)
        throw MeasureError(ErrorCode::StageTooLarge,
                           "2^" + std::to_string(stage) + " intervals exceed capacity");
    const Ratio r = cantor_child_ratio(lambda);
    const std::int64_t den = checked_pow(r.den, stage);
    checked_pow(r.num, stage);

    std::vector<RationalInterval> cur{{0, den, den}};
    cur.reserve(std::size_t{1} << stage);
    for (int level = 1; level <= stage; ++level) {
        // Child length at this level is num^level * den_r^(stage-level) over den.
        const std::int64_t child = checked_pow(r.num, level) * checked_pow(r.den, stage - level);
        std::vector<RationalInterval> next;
        next.reserve(cur.size() * 2);
        for (const auto& iv : cur) {
            next.push_back({iv.lo, iv.lo + child, den});
            next.push_back({iv.hi - child, iv.hi, den});
        }
        cur = std::move(next);
    }
    return cur;
}

std::vector<RealInterval> cantor_intervals(double lambda, int stage) {
    const auto exact = cantor_rational_intervals(lambda, stage);
    std::vector<RealInterval> out;
    out.reserve(exact.size());
    for (const auto& iv : exact) {
        const auto d = static_cast<long double>(iv.den);
        out.push_back({static_cast<double>(iv.lo / d), static_cast<double>(iv.hi / d)});
    }
    return out;
}

GridSet render(const SetSpec& spec, GridScale scale) {
    const Index n = scale.n();
    return std::visit(
        Overloaded{
            [&](const IntervalUnion& u) {
                std::vector<IndexRun> runs;
                for (const auto& iv : u.intervals) {
                    if (!(iv.lo >= 0.0 && iv.hi <= 1.0 && iv.lo <= iv.hi))
                        throw MeasureError(ErrorCode::InvalidInput,
                                           "interval outside [0, 1] in spec " + spec.id);
                    const Index lo = snapped_ceil(static_cast<long double>(iv.lo) * n);
                    const Index hi = snapped_floor(static_cast<long double>(iv.hi) * n);
                    if (lo <= hi) runs.push_back({lo, hi - lo + 1});
                }
                return GridSet::from_runs(runs, scale);
            },
            [&](const CantorSet& c) {
                std::vector<IndexRun> runs;
                for (const auto& iv : cantor_rational_intervals(c.lambda, c.stage)) {
                    const Index lo = ceil_div(static_cast<Wide>(iv.lo) * n, iv.den);
                    const Index hi = floor_div(static_cast<Wide>(iv.hi) * n, iv.den);
                    if (lo <= hi) runs.push_back({lo, hi - lo + 1});
                }
                return GridSet::from_runs(runs, scale);
            },
            [&](const PointFamily& p) {
                if (p.count < 0)
                    throw MeasureError(ErrorCode::InvalidInput, "negative point count");
                std::vector<Index> idx;
                idx.reserve(static_cast<std::size_t>(p.count) + 1);
                idx.push_back(0);
                for (Index k = 1; k <= p.count; ++k) idx.push_back(nearest_reciprocal_index(n, k));
                return render_points(std::move(idx), scale);
            },
            [&](const FullSet&) { return GridSet::full(scale); },
            [&](const EmptySet&) { return GridSet(scale); },
        },
        spec.shape);
}

SetSpec with_stage(const SetSpec& spec, int stage) {
    SetSpec out = spec;
    if (auto* c = std::get_if<CantorSet>(&out.shape)) c->stage = stage;
    return out;
}

std::optional<AnalyticReference> analytic_reference(const SetSpec& spec) {
    return std::visit(
        Overloaded{
            [](const IntervalUnion& u) -> std::optional<AnalyticReference> {
                std::vector<RealInterval> sorted = u.intervals;
                std::sort(sorted.begin(), sorted.end(),
                          [](auto& a, auto& b) { return a.lo < b.lo; });
                double total = 0.0;
                double reach = -1.0;
                for (const auto& iv : sorted) {
                    const double lo = std::max(iv.lo, reach);
                    if (iv.hi > lo) total += iv.hi - lo;
                    reach = std::max(reach, iv.hi);
                }
                if (total <= 0.0) return std::nullopt;
                return AnalyticReference{1.0, total};
            },
            [](const CantorSet& c) -> std::optional<AnalyticReference> {
                validate_lambda(c.lambda);
                AnalyticReference ref;
                ref.dimension = std::log(2.0) / std::log(2.0 / (1.0 - c.lambda));
                const Ratio r = cantor_child_ratio(c.lambda);
                if (r.num == 1 && r.den == 3) ref.measure_at_dimension = 1.0;
                return ref;
            },
            [](const PointFamily&) -> std::optional<AnalyticReference> {
                return AnalyticReference{0.0, std::nullopt};
            },
            [](const FullSet&) -> std::optional<AnalyticReference> {
                return AnalyticReference{1.0, 1.0};
            },
            [](const EmptySet&) -> std::optional<AnalyticReference> { return std::nullopt; },
        },
        spec.shape);
}

SetSpec parse_set_spec(const nlohmann::json& j) {
    if (!j.is_object()) throw MeasureError(ErrorCode::InvalidInput, "set spec must be an object");
    if (!j.contains("id") || !j["id"].is_string())
        throw MeasureError(ErrorCode::InvalidInput, "set spec needs a string \"id\"");
    if (!j.contains("variant") || !j["variant"].is_string())
        throw MeasureError(ErrorCode::InvalidInput, "set spec needs a string \"variant\"");

    SetSpec spec;
    spec.id = j["id"].get<std::string>();
    const auto variant = j["variant"].get<std::string>();
    try {
        if (variant == "interval_union") {
            IntervalUnion u;
            for (const auto& pair : j.at("intervals")) {
                if (!pair.is_array() || pair.size() != 2)
                    throw MeasureError(ErrorCode::InvalidInput, "intervals must be [a, b] pairs");
                RealInterval iv{pair[0].get<double>(), pair[1].get<double>()};
                if (!(iv.lo >= 0.0 && iv.hi <= 1.0 && iv.lo <= iv.hi))
                    throw MeasureError(ErrorCode::InvalidInput,
                                       "interval endpoints must satisfy 0 <= a <= b <= 1");
                u.intervals.push_back(iv);
            }
            spec.shape = std::move(u);
        } else if (variant == "cantor") {
            CantorSet c;
            c.lambda = j.value("lambda", 1.0 / 3.0);
            c.stage = j.value("stage", 0);
            validate_lambda(c.lambda);
            if (c.stage < 0) throw MeasureError(ErrorCode::InvalidInput, "negative stage");
            spec.shape = c;
        } else if (variant == "point_family") {
            PointFamily p;
            const auto kind = j.value("kind", std::string("reciprocals"));
            if (kind != "reciprocals")
                throw MeasureError(ErrorCode::InvalidInput, "unknown point family " + kind);
            p.count = j.value("count", p.count);
            if (p.count < 0) throw MeasureError(ErrorCode::InvalidInput, "negative count");
            spec.shape = p;
        } else if (variant == "full") {
            spec.shape = FullSet{};
        } else if (variant == "empty") {
            spec.shape = EmptySet{};
        } else {
            throw MeasureError(ErrorCode::InvalidInput, "unknown variant " + variant);
        }
    } catch (const nlohmann::json::exception& e) {
        throw MeasureError(ErrorCode::InvalidInput, std::string("set spec: ") + e.what());
    }
    return spec;
}

nlohmann::json to_json(const SetSpec& spec) {
    nlohmann::json j;
    j["id"] = spec.id;
    std::visit(Overloaded{
                   [&](const IntervalUnion& u) {
                       j["variant"] = "interval_union";
                       j["intervals"] = nlohmann::json::array();
                       for (const auto& iv : u.intervals) j["intervals"].push_back({iv.lo, iv.hi});
                   },
                   [&](const CantorSet& c) {
                       j["variant"] = "cantor";
                       j["lambda"] = c.lambda;
                       j["stage"] = c.stage;
                   },
                   [&](const PointFamily& p) {
                       j["variant"] = "point_family";
                       j["kind"] = "reciprocals";
                       j["count"] = p.count;
                   },
                   [&](const FullSet&) { j["variant"] = "full"; },
                   [&](const EmptySet&) { j["variant"] = "empty"; },
               },
               spec.shape);
    return j;
}

SetSpec load_set_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeasureError(ErrorCode::InvalidInput, "cannot open spec file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MeasureError(ErrorCode::InvalidInput, path + ": " + e.what());
    }
    return parse_set_spec(j);
}

}  // namespace hfm
