#include "starscat/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace starscat {

double fit_loglog_slope(const std::vector<std::pair<double, double>>& xy) {
  if (xy.size() < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(xy.size());
  for (const auto& [x, y] : xy) {
    const double lx = std::log10(std::max(x, 1e-300));
    const double ly = std::log10(std::max(y, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace starscat
