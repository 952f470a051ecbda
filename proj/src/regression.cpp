#include "hfm/regression.hpp"

#include "hfm/error.hpp"

namespace hfm {

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw MeasureError(ErrorCode::InvalidInput, "x and y lengths differ");
    if (x.size() < 2) throw MeasureError(ErrorCode::DegenerateFit, "need at least two points");
    const double count = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw MeasureError(ErrorCode::DegenerateFit, "abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace hfm
