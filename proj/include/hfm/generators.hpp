#pragma once

// Declarative descriptions of standard sets A in [0, 1], their grid shadows,
// and the handful of analytic values known for them.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hfm/grid.hpp"
#include "hfm/real_interval.hpp"
#include "json.hpp"

namespace hfm {

struct IntervalUnion {
    std::vector<RealInterval> intervals;
};

/// Middle-lambda Cantor construction, stopped after `stage` steps.
struct CantorSet {
    double lambda = 1.0 / 3.0;
    int stage = 0;
};

enum class PointKind { Reciprocals };

/// {0} together with 1/k for k = 1 .. count.
struct PointFamily {
    PointKind kind = PointKind::Reciprocals;
    Index count = 10'000;
};

struct FullSet {};
struct EmptySet {};

using SetShape = std::variant<IntervalUnion, CantorSet, PointFamily, FullSet, EmptySet>;

struct SetSpec {
    std::string id;
    SetShape shape;
};

SetSpec parse_set_spec(const nlohmann::json& j);
nlohmann::json to_json(const SetSpec& spec);
SetSpec load_set_spec(const std::string& path);

/// Reduced fraction num/den with 0 < num < den.
struct Ratio {
    std::int64_t num = 1;
    std::int64_t den = 3;
    friend bool operator==(Ratio, Ratio) = default;
};

/// Best rational approximation with denominator <= max_den (continued fractions).
Ratio approximate_ratio(double x, std::int64_t max_den = 1'000'000);

/// Scale factor (1 - lambda) / 2 of each child interval, as an exact ratio.
Ratio cantor_child_ratio(double lambda);

/// Interval [lo/den, hi/den] with a shared denominator.
struct RationalInterval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::int64_t den = 1;
};

inline constexpr int kMaxCantorStage = 24;

std::vector<RationalInterval> cantor_rational_intervals(double lambda, int stage);
std::vector<RealInterval> cantor_intervals(double lambda, int stage);

/// Grid indices i with i/n inside the closed set described by `spec`.
GridSet render(const SetSpec& spec, GridScale scale);

/// Copy of `spec` with its Cantor stage replaced; other shapes pass through.
SetSpec with_stage(const SetSpec& spec, int stage);

struct AnalyticReference {
    double dimension = 0.0;
    std::optional<double> measure_at_dimension;
};

std::optional<AnalyticReference> analytic_reference(const SetSpec& spec);

}  // namespace hfm
