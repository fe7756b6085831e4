#pragma once

#include <utility>
#include <vector>

namespace starscat {

/// Least-squares slope of log10(y) against log10(x).  Values are clamped away
/// from zero so an exact-zero deviation cannot poison the fit.
double fit_loglog_slope(const std::vector<std::pair<double, double>>& xy);

}  // namespace starscat
