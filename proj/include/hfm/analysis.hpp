#pragma once

// Finite-scale stand-ins for the limit statements: thinnest-superset
// evaluation, Lebesgue bounds from eroded/dilated shadows, and the critical
// exponent search.

#include <string>
#include <string_view>
#include <vector>

#include "hfm/generators.hpp"
#include "hfm/measure.hpp"
#include "hfm/report.hpp"

namespace hfm {

/// ceil(sqrt(n)) computed in integers.
Index ceil_sqrt(Index n);

/// Radius of the halo that stands in for the monad of each point.
struct HaloRule {
    enum class Kind { SqrtN, Fixed };
    Kind kind = Kind::SqrtN;
    Index fixed = 1;

    Index radius(GridScale scale) const;
    /// "sqrt_n" or "fixed:K".
    static HaloRule parse(std::string_view text);
    std::string to_string() const;
};

/// Reports above this value carry status "diverging".
inline constexpr double kDivergingValue = 1e6;

/// h_delta^s of dilate(render(spec), halo).
MeasureReport theorem_rhs(const SetSpec& spec, const MeasureParams& params, Index halo);

struct LebesgueBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Discrete measure of the eroded and of the dilated rendering.
LebesgueBounds lebesgue_bounds(const SetSpec& spec, GridScale scale, Index halo);

struct ScheduleStep {
    Index n = 1;
    double delta = 1.0;
    int stage = 0;  // Cantor stage rendered at this step; ignored otherwise
};

enum class DimensionMethod { DiscreteMeasure, ClassicalCover };

struct DimensionOptions {
    DimensionMethod method = DimensionMethod::DiscreteMeasure;
    HaloRule halo;
    double diverge_above = 1e6;
    double vanish_below = 1e-6;
    double s_tolerance = 1e-3;
    /// Fitted slopes within this band of zero count as flat.
    double slope_band = 1e-3;
    Index resolution = 4096;  // breakpoint grid of the classical comparator
};

struct SlopeProbe {
    double s = 0.0;
    double slope = 0.0;
    std::vector<double> values;
};

struct DimensionResult {
    double dimension = 0.0;
    std::vector<SlopeProbe> probes;  // in evaluation order
};

/// Default schedule of `steps` entries with decreasing delta. Grids are
/// chosen so the halo is a vanishing fraction of the set's feature scale.
std::vector<ScheduleStep> default_schedule(const SetSpec& spec, const HaloRule& halo = {},
                                           int steps = 4);

/// Bisects s over (0, 1] for the exponent at which the fitted slope of
/// log value against log(1/delta) changes sign. Throws NoBracket when it
/// does not.
DimensionResult dimension_estimate(const SetSpec& spec, const std::vector<ScheduleStep>& schedule,
                                   const DimensionOptions& options = {});

}  // namespace hfm
