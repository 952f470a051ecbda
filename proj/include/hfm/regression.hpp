#pragma once

#include <span>

namespace hfm {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
/// Throws DegenerateFit for fewer than two points or constant x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace hfm
