#include "starscat/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "detail/rootfind.hpp"
#include "starscat/scattering.hpp"

namespace starscat {

namespace {

// Acceptance thresholds for refined roots; candidacy for touched-zero minima
// is judged more loosely (see scan_candidates) so that a half-step sample
// distance cannot hide a genuine double root.
constexpr double kResidualTol = 1e-10;      // |h1| <= tol * scale at a root
constexpr double kExactZeroTol = 1e-13;     // grid value counts as a root outright
constexpr double kCandidateTol = 1e-3;      // |h1|/scale to consider a minimum
constexpr double kSigmaRatioDouble = 1e-8;  // sigma_2/sigma_1 below => rank 1
constexpr double kH0SmallTol = 1e-6;        // |H0| <= tol * scale on doubles

// determinant and its noise-model scale from a single propagation
std::pair<double, double> h1_and_scale(const PotentialProfile& profile, double alpha) {
  const BasisBoundaryData data = basis_boundary_data(profile, alpha, 0.0);
  return {data.derivs.determinant(), h1_scale(data)};
}

double refinement_xtol(double alpha) { return 1e-12 * std::max(1.0, std::abs(alpha)); }

struct DetFn {
  const PotentialProfile& profile;
  double operator()(double alpha) const { return characteristic_determinant(profile, alpha); }
};

// sigma_2/sigma_1 of the tip-derivative matrix; the V-shaped objective used to
// polish double roots to machine precision.
double sigma_ratio_at(const PotentialProfile& profile, double alpha) {
  const BasisBoundaryData data = basis_boundary_data(profile, alpha, 0.0);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(data.derivs);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0) return 0.0;
  return s(1) / s(0);
}

// Documented minimum gap between adjacent roots for the builtin shapes, used
// only to warn about too-coarse scan grids.
double builtin_min_gap(const std::string& name) {
  if (name == "paper-rect") return 8.81;      // 0 to the first positive root
  if (name == "symmetric-rect") return 1.8e-3;  // simple/double pair near 8.81
  return 0.0;
}

}  // namespace

CouplingDirection canonical_direction(const Eigen::Vector3d& raw) {
  Eigen::Vector3d t = raw.normalized();
  for (int i = 2; i >= 0; --i) {
    if (std::abs(t(i)) > 1e-12) {
      if (t(i) < 0.0) t = -t;
      break;
    }
  }
  return CouplingDirection{t};
}

double characteristic_determinant(const PotentialProfile& profile, double alpha) {
  return basis_boundary_data(profile, alpha, 0.0).derivs.determinant();
}

double characteristic_scale(const PotentialProfile& profile, double alpha) {
  return h1_scale(basis_boundary_data(profile, alpha, 0.0));
}

MultiplicityInfo classify_multiplicity(const PotentialProfile& profile, double alpha) {
  const BasisBoundaryData data = basis_boundary_data(profile, alpha, 0.0);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(data.derivs, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();

  MultiplicityInfo info;
  info.sigma_ratio = sigma(0) > 0.0 ? sigma(1) / sigma(0) : 0.0;
  const bool rank_says_double = info.sigma_ratio < kSigmaRatioDouble;

  const DeterminantSet ds = determinant_set_from(data);
  info.H0 = ds.H0;
  info.H0_scale = H0_scale(data);
  const bool h0_says_double = std::abs(ds.H0) < kH0SmallTol * info.H0_scale;

  if (rank_says_double != h0_says_double) {
    std::ostringstream os;
    os << "multiplicity tests disagree at alpha = " << alpha
       << ": sigma_2/sigma_1 = " << info.sigma_ratio << " (rank threshold "
       << kSigmaRatioDouble << "), |H0| = " << std::abs(ds.H0) << " against scale "
       << info.H0_scale << " (threshold " << kH0SmallTol << " * scale)";
    throw InconsistentClassification(os.str());
  }

  info.multiplicity = rank_says_double ? 2 : 1;
  info.null_basis.resize(3, info.multiplicity);
  for (int c = 0; c < info.multiplicity; ++c)
    info.null_basis.col(c) = svd.matrixV().col(2 - c);
  return info;
}

CouplingDirection coupling_direction(const PotentialProfile& profile, double alpha,
                                     const MultiplicityInfo& info) {
  const BasisBoundaryData data = basis_boundary_data(profile, alpha, 0.0);
  const double scale = std::max(data.values.norm(), 1e-300);
  if (info.multiplicity == 1) {
    const Eigen::Vector3d tips = data.values * info.null_basis.col(0);
    if (tips.norm() < 1e-10 * scale) {
      std::ostringstream os;
      os << "eigenfunction at alpha = " << alpha << " has tip-value norm "
         << tips.norm() << " below 1e-10 * " << scale;
      throw DegenerateCoupling(os.str());
    }
    return canonical_direction(tips);
  }
  const Eigen::Vector3d t1 = data.values * info.null_basis.col(0);
  const Eigen::Vector3d t2 = data.values * info.null_basis.col(1);
  const Eigen::Vector3d cross = t1.cross(t2);
  if (cross.norm() < 1e-10 * std::max(t1.norm() * t2.norm(), 1e-300)) {
    std::ostringstream os;
    os << "double resonance at alpha = " << alpha
       << " has (numerically) parallel tip-value vectors";
    throw DegenerateCoupling(os.str());
  }
  return canonical_direction(cross);
}

namespace {

struct RawRoot {
  double alpha;
  double window_lo;
  double window_hi;
};

// Scan machinery shared by find_resonances and refine_nearest_resonance.
std::vector<RawRoot> scan_for_roots(const PotentialProfile& profile, double lo,
                                    double hi, double step) {
  const DetFn h1{profile};

  std::vector<double> grid;
  for (double a = lo; a < hi; a += step) grid.push_back(a);
  grid.push_back(hi);

  std::vector<double> value(grid.size()), scale(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    std::tie(value[i], scale[i]) = h1_and_scale(profile, grid[i]);

  std::vector<RawRoot> roots;
  const auto add_root = [&](double alpha, double wlo, double whi) {
    roots.push_back(RawRoot{alpha, wlo, whi});
  };

  std::vector<bool> consumed(grid.size(), false);
  // grid values that already sit on a root (exact zeros such as alpha = 0)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(value[i]) <= kExactZeroTol * scale[i]) {
      const double w = step;
      add_root(grid[i], grid[i] - w, grid[i] + w);
      consumed[i] = true;
    }
  }

  // sign-change brackets
  std::vector<bool> cell_has_crossing(grid.size(), false);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (consumed[i] || consumed[i + 1]) continue;
    if (value[i] * value[i + 1] < 0.0) {
      cell_has_crossing[i] = true;
      const double root = detail::brent_root(h1, grid[i], grid[i + 1], value[i],
                                             value[i + 1],
                                             refinement_xtol(0.5 * (grid[i] + grid[i + 1])));
      add_root(root, grid[i], grid[i + 1]);
    }
  }

  // touched-zero candidates: local minima of |h1|/scale without a sign change
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (consumed[i - 1] || consumed[i] || consumed[i + 1]) continue;
    if (cell_has_crossing[i - 1] || cell_has_crossing[i]) continue;
    const double fi = std::abs(value[i]) / scale[i];
    const double fl = std::abs(value[i - 1]) / scale[i - 1];
    const double fr = std::abs(value[i + 1]) / scale[i + 1];
    if (!(fi < fl && fi <= fr && fi < kCandidateTol)) continue;

    const double a = grid[i - 1], b = grid[i + 1];
    const double amin = detail::golden_min([&](double x) { return std::abs(h1(x)); }, a,
                                           b, refinement_xtol(grid[i]));
    const double fmin = h1(amin);
    if (fmin * value[i - 1] < 0.0) {
      // the minimum crossed zero after all: a close pair of simple roots
      const double r1 = detail::brent_root(h1, a, amin, value[i - 1], fmin,
                                           refinement_xtol(amin));
      const double r2 = detail::brent_root(h1, amin, b, fmin, value[i + 1],
                                           refinement_xtol(amin));
      add_root(r1, a, amin);
      add_root(r2, amin, b);
      continue;
    }
    // polish against the singular-value ratio, which is V-shaped and does not
    // suffer the quadratic flattening of |h1| at a double root
    const double polished = detail::golden_min(
        [&](double x) { return sigma_ratio_at(profile, x); }, amin - 0.5 * step,
        amin + 0.5 * step, 1e-13 * std::max(1.0, std::abs(amin)));
    const double scale_here = characteristic_scale(profile, polished);
    const bool is_root = std::abs(h1(polished)) <= kResidualTol * scale_here &&
                         sigma_ratio_at(profile, polished) < kSigmaRatioDouble;
    if (is_root) add_root(polished, a, b);
  }

  std::sort(roots.begin(), roots.end(),
            [](const RawRoot& x, const RawRoot& y) { return x.alpha < y.alpha; });
  // merge refinement duplicates
  std::vector<RawRoot> unique;
  for (const auto& r : roots) {
    if (!unique.empty() &&
        std::abs(r.alpha - unique.back().alpha) < 1e-9 * std::max(1.0, std::abs(r.alpha)))
      continue;
    unique.push_back(r);
  }
  return unique;
}

SpectralPoint make_point(const PotentialProfile& profile, const RawRoot& root) {
  const MultiplicityInfo info = classify_multiplicity(profile, root.alpha);
  SpectralPoint p;
  p.alpha = root.alpha;
  p.multiplicity = info.multiplicity;
  p.theta = coupling_direction(profile, root.alpha, info);
  p.h1_residual = std::abs(characteristic_determinant(profile, root.alpha));
  p.window_lo = root.window_lo;
  p.window_hi = root.window_hi;
  return p;
}

}  // namespace

std::vector<SpectralPoint> find_resonances(const PotentialProfile& profile,
                                           double alpha_lo, double alpha_hi,
                                           double grid_step,
                                           std::vector<std::string>* warnings) {
  if (!(alpha_lo < alpha_hi))
    throw InvalidRange("resonance scan needs alpha_lo < alpha_hi");
  if (!(grid_step > 0.0)) throw InvalidRange("resonance scan needs a positive grid step");

  if (warnings) {
    const double gap = builtin_min_gap(profile.name);
    if (gap > 0.0 && grid_step > 0.5 * gap) {
      std::ostringstream os;
      os << "grid step " << grid_step << " is coarser than half the documented minimum "
         << "root gap " << gap << " of profile \"" << profile.name
         << "\"; close roots may be merged or missed";
      warnings->push_back(os.str());
    }
  }

  std::vector<SpectralPoint> points;
  for (const auto& root : scan_for_roots(profile, alpha_lo, alpha_hi, grid_step))
    points.push_back(make_point(profile, root));
  return points;
}

std::optional<SpectralPoint> refine_nearest_resonance(const PotentialProfile& profile,
                                                      double alpha_guess,
                                                      double halfwidth) {
  const double lo = alpha_guess - halfwidth;
  const double hi = alpha_guess + halfwidth;
  const double step = halfwidth / 50.0;
  const auto roots = scan_for_roots(profile, lo, hi, step);
  if (roots.empty()) return std::nullopt;
  const auto nearest = std::min_element(
      roots.begin(), roots.end(), [&](const RawRoot& x, const RawRoot& y) {
        return std::abs(x.alpha - alpha_guess) < std::abs(y.alpha - alpha_guess);
      });
  return make_point(profile, *nearest);
}

}  // namespace starscat
