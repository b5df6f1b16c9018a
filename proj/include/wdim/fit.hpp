#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wdim {

/// Ordinary least-squares line through (log scale, log quantity) points.
/// Residuals are kept so callers can gate on fit quality instead of trusting
/// the slope blindly.
struct ScalingFit {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

inline ScalingFit fit_line(std::vector<std::pair<double, double>> points) {
    if (points.size() < 3)
        throw std::invalid_argument("fit_line: at least 3 points required");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0 || !std::isfinite(denom))
        throw std::domain_error("fit_line: degenerate abscissae");
    ScalingFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    if (!std::isfinite(fit.slope) || !std::isfinite(fit.intercept))
        throw std::domain_error("fit_line: non-finite fit");
    for (const auto& [x, y] : points)
        fit.max_residual = std::max(fit.max_residual, std::abs(y - (fit.intercept + fit.slope * x)));
    fit.points = std::move(points);
    return fit;
}

}  // namespace wdim
