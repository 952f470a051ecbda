#pragma once

#include <vector>

namespace hfm {

/// Closed interval [lo, hi] of the real line.
struct RealInterval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    friend bool operator==(const RealInterval&, const RealInterval&) = default;
};

using RealCover = std::vector<RealInterval>;

}  // namespace hfm
