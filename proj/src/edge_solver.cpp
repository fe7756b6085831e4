#include "starscat/edge_solver.hpp"

#include <algorithm>
#include <cmath>

namespace starscat {

namespace {

// Below this value of |mu|*L^2 the trig/hyperbolic forms lose digits to
// cancellation; a 4-term series keeps the relative error under 1e-12 with no
// branch discontinuity.
constexpr double kSeriesThreshold = 1e-6;

TransferMatrix constant_transfer(double mu, double length) {
  const double z = mu * length * length;
  double c, s;  // c = cosh-like value, s = sinh-like value / sqrt(mu)
  if (std::abs(z) < kSeriesThreshold) {
    c = 1.0 + z * (0.5 + z * (1.0 / 24.0 + z * (1.0 / 720.0)));
    s = length * (1.0 + z * (1.0 / 6.0 + z * (1.0 / 120.0 + z * (1.0 / 5040.0))));
  } else if (mu > 0.0) {
    const double w = std::sqrt(mu);
    c = std::cosh(w * length);
    s = std::sinh(w * length) / w;
  } else {
    const double w = std::sqrt(-mu);
    c = std::cos(w * length);
    s = std::sin(w * length) / w;
  }
  TransferMatrix t;
  t.m << c, s, mu * s, c;
  return t;
}

// Fundamental-matrix RK4 for y'' = mu(s) y with sampled mu.  The step honours
// both the fixed bound (1e-3 of the segment) and an accumulated error target:
// summed local truncation L * mu^{5/2} h^4 / 5! kept near 1e-11.
TransferMatrix sampled_transfer(const Segment& seg, double alpha, double kappa) {
  const double kappa2 = kappa * kappa;
  double mu_max = 1.0;  // piecewise-linear Q attains its extremes at nodes
  for (const auto& node : seg.samples)
    mu_max = std::max(mu_max, std::abs(alpha * node[1] - kappa2));
  const double h_err =
      std::pow(1.2e-9 / (seg.length * std::pow(mu_max, 2.5)), 0.25);
  const int n = std::clamp(static_cast<int>(std::ceil(seg.length / h_err)), 1000, 2000000);
  const double h = seg.length / n;

  const auto mu_at = [&](double s) { return alpha * seg.value_at(s) - kappa2; };
  const auto rhs = [](double mu, const Eigen::Matrix2d& m) {
    Eigen::Matrix2d k;
    k.row(0) = m.row(1);
    k.row(1) = mu * m.row(0);
    return k;
  };

  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  for (int i = 0; i < n; ++i) {
    const double s = i * h;
    const double mu0 = mu_at(s);
    const double mu1 = mu_at(s + 0.5 * h);
    const double mu2 = mu_at(s + h);
    const Eigen::Matrix2d k1 = rhs(mu0, m);
    const Eigen::Matrix2d k2 = rhs(mu1, m + 0.5 * h * k1);
    const Eigen::Matrix2d k3 = rhs(mu1, m + 0.5 * h * k2);
    const Eigen::Matrix2d k4 = rhs(mu2, m + h * k3);
    m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return TransferMatrix{m};
}

}  // namespace

TransferMatrix segment_transfer(const Segment& segment, double alpha, double kappa) {
  if (segment.is_constant())
    return constant_transfer(alpha * segment.const_value - kappa * kappa, segment.length);
  return sampled_transfer(segment, alpha, kappa);
}

TransferMatrix edge_transfer(const EdgePotential& edge, double alpha, double kappa) {
  TransferMatrix total;
  for (const auto& seg : edge.segments) total = total.then(segment_transfer(seg, alpha, kappa));
  return total;
}

BasisBoundaryData basis_boundary_data(const PotentialProfile& profile,
                                      double alpha, double kappa) {
  // Center data of the three basis solutions: values (0, 0, 1) and outgoing
  // slopes per edge chosen Kirchhoff-compatible (slopes sum to zero).
  static const double center_value[3] = {0.0, 0.0, 1.0};
  static const double center_slope[3][3] = {
      {0.0, 1.0, 0.0},    // edge 1
      {1.0, 0.0, 0.0},    // edge 2
      {-1.0, -1.0, 0.0},  // edge 3
  };

  BasisBoundaryData data;
  data.alpha = alpha;
  data.kappa = kappa;
  for (int j = 0; j < 3; ++j) {
    const TransferMatrix t = edge_transfer(profile.edges[j], alpha, kappa);
    data.edge_scale(j) = t.m.norm();
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d tip = t.apply(center_value[i], center_slope[j][i]);
      data.values(j, i) = tip(0);
      data.derivs(j, i) = tip(1);
    }
  }
  return data;
}

double lagrange_defect(const BasisBoundaryData& data) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double sum = data.derivs.col(i).dot(data.values.col(j)) -
                         data.values.col(i).dot(data.derivs.col(j));
      worst = std::max(worst, std::abs(sum));
    }
  }
  return worst;
}

double lagrange_scale(const BasisBoundaryData& data) {
  const double v = data.values.cwiseAbs().maxCoeff();
  const double d = data.derivs.cwiseAbs().maxCoeff();
  return std::max(v * d, 1e-300);
}

}  // namespace starscat
