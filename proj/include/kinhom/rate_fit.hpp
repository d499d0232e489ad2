#pragma once

#include <kinhom/errors.hpp>

#include <cmath>
#include <span>
#include <string>
#include <utility>

namespace kinhom {

/// Least-squares slope of log(error) against log(eps).
inline double fit_rate(std::span<const std::pair<double, double>> samples) {
    require(samples.size() >= 3, "fit_rate needs at least three (eps, error) pairs");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [eps, err] : samples) {
        require(eps > 0.0, "fit_rate needs positive eps values");
        if (!(err > 0.0)) throw InvalidArgument("fit_rate needs positive error values, got " + std::to_string(err));
        const double x = std::log(eps), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(samples.size());
    const double denom = n * sxx - sx * sx;
    require(denom > 0.0, "fit_rate needs at least two distinct eps values");
    return (n * sxy - sx * sy) / denom;
}

} // namespace kinhom
