// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Expected values are frozen from the published tables and from the
// transcendental oracles computed in oracles.hpp.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "starscat/numerics.hpp"
#include "starscat/profile.hpp"
#include "starscat/resonance.hpp"
#include "starscat/scattering.hpp"
#include "starscat/verify.hpp"

using namespace starscat;

namespace {

int g_failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, title.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const double kPrintedAlphas[3] = {8.8104, 28.5513, 59.5701};

const Eigen::Vector3d kPrintedThetas[3] = {
    {-0.9992, 0.0279, 0.0279},
    {0.9999, 0.0012, 0.0012},
    {-0.9999, 0.997e-4, 0.997e-4},
};

Eigen::Matrix3d printed_smatrix(int index) {
  Eigen::Matrix3d t;
  switch (index) {
    case 0:
      t << 0.9968, -0.0558, -0.0558,
          -0.0558, -0.9984, 0.0016,
          -0.0558, 0.0016, -0.9984;
      break;
    case 1:
      t << 0.9996, 0.0024, 0.0024,
          0.0024, -0.9999, 0.288e-5,
          0.0024, 0.288e-5, -0.9999;
      break;
    default:
      t << 0.9996, -0.0002, -0.0002,
          -0.0002, -0.9999, 0.199e-7,
          -0.0002, 0.199e-7, -0.9999;
      break;
  }
  return t;
}

double theta_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

}  // namespace

int main() {
  std::printf("acceptance suite: star-graph vertex-barrier scattering\n");

  const PotentialProfile rect = builtin_profile("paper-rect");
  const PotentialProfile sym = builtin_profile("symmetric-rect");

  std::vector<SpectralPoint> points;

  // 1. resonant intensities over (0.5, 70): printed values and the oracle
  {
    points = find_resonances(rect, 0.5, 70.0, 0.01);
    const auto xs = oracles::neumann_neumann_roots(3);
    bool pass = points.size() == 3;
    double worst_printed = 0.0, worst_oracle = 0.0;
    if (pass) {
      for (int i = 0; i < 3; ++i) {
        const double oracle = oracles::rectangle_intensity(xs[i]);
        worst_printed = std::max(worst_printed, std::abs(points[i].alpha - kPrintedAlphas[i]));
        worst_oracle =
            std::max(worst_oracle, std::abs(points[i].alpha - oracle) / oracle);
      }
      pass = worst_printed <= 5e-3 && worst_oracle <= 1e-6;
    }
    report(1, "resonant intensities", pass,
           "roots found = " + std::to_string(points.size()) +
               ", max |alpha - printed| = " + fmt(worst_printed) +
               " (tol 5e-3), max oracle rel err = " + fmt(worst_oracle) + " (tol 1e-6)");
    if (points.size() != 3) return 1;  // everything downstream needs the roots
  }

  // 2. coupling function against the printed table, up to a global sign
  {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, theta_distance(points[i].theta.theta, kPrintedThetas[i]));
    report(2, "coupling function", worst <= 1e-3,
           "max componentwise deviation = " + fmt(worst) + " (tol 1e-3)");
  }

  // 3. limiting scattering matrices against the printed tables
  {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const ScatteringMatrix s = limit_smatrix(points[i].theta, points[i].multiplicity);
      worst = std::max(worst,
                       (s.entries.real() - printed_smatrix(i)).cwiseAbs().maxCoeff());
    }
    report(3, "limit scattering matrices", worst <= 5e-4,
           "max entrywise deviation = " + fmt(worst) + " (tol 5e-4)");
  }

  // 4. transmission-probability sweep: floor, spike localization, peak height
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> grid;
    grid.reserve(7000);
    for (int i = 0; i < 7000; ++i) grid.push_back(0.5 + (70.0 - 0.5) * i / 6999.0);

    const auto sweep4 = transmission_sweep(rect, grid, 1e-4, 3, 1);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto distance_to_roots = [&](double a) {
      double d = 1e300;
      for (const auto& p : points) d = std::min(d, std::abs(a - p.alpha));
      return d;
    };

    bool rows_ok = true;
    double floor4 = 0.0;
    for (const auto& r : sweep4) {
      rows_ok = rows_ok && r.ok;
      if (distance_to_roots(r.alpha) > 0.5) floor4 = std::max(floor4, r.probability);
    }

    double worst_spike_offset = 0.0;
    for (const auto& p : points) {
      double best = -1.0, best_alpha = 0.0;
      for (const auto& r : sweep4) {
        if (std::abs(r.alpha - p.alpha) <= 0.5 && r.probability > best) {
          best = r.probability;
          best_alpha = r.alpha;
        }
      }
      worst_spike_offset = std::max(worst_spike_offset, std::abs(best_alpha - p.alpha));
    }

    const double peak =
        std::norm(eps_smatrix(rect, points[0].alpha, 1e-4).entries(2, 0));
    const bool peak_ok = peak >= 3.1e-3 / 2.0 && peak <= 3.1e-3 * 2.0;

    const auto sweep2 = transmission_sweep(rect, grid, 1e-2, 3, 1);
    double floor2 = 0.0;
    for (const auto& r : sweep2)
      if (r.ok && distance_to_roots(r.alpha) > 0.5) floor2 = std::max(floor2, r.probability);
    const double decades = std::log10(floor2 / std::max(floor4, 1e-300));

    const bool pass = rows_ok && floor4 <= 1e-6 && worst_spike_offset <= 0.05 && peak_ok &&
                      decades >= 3.0 && decades <= 5.0 && elapsed < 30.0;
    report(4, "transmission sweep", pass,
           "floor(kappa=1e-4) = " + fmt(floor4) + " (tol 1e-6), spike offset = " +
               fmt(worst_spike_offset) + " (tol 0.05), refined peak = " + fmt(peak) +
               " (3.1e-3 within factor 2), floor lift = " + fmt(decades) +
               " decades (band [3, 5]), sweep time = " + fmt(elapsed) + " s (< 30)");
  }

  // 5. first-order convergence of the regularized matrices
  {
    const std::vector<double> epsilons{1e-2, 1e-3, 1e-4, 1e-5};
    const ConvergenceTable resonant = convergence_table(rect, points[0].alpha, 1.0, epsilons);
    const ConvergenceTable generic = convergence_table(rect, 15.0, 1.0, epsilons);
    const bool pass = resonant.resonant && !generic.resonant &&
                      resonant.slope >= 0.8 && resonant.slope <= 1.2 &&
                      generic.slope >= 0.8 && generic.slope <= 1.2;
    report(5, "zero-range convergence", pass,
           "resonant slope = " + fmt(resonant.slope) + ", non-resonant slope = " +
               fmt(generic.slope) + " (band [0.8, 1.2])");
  }

  // 6. invariant suite
  {
    const VerifyReport report6 = run_verification(rect, 7);
    std::string failing;
    for (const auto& c : report6.checks)
      if (!c.pass) failing += " " + c.name;
    report(6, "property suite", report6.all_pass(),
           report6.all_pass()
               ? std::to_string(report6.checks.size()) + " checks passed (seed 7)"
               : "failing checks:" + failing);
  }

  // 7. double-resonance path on the symmetric profile
  {
    const auto doubles = find_resonances(sym, 0.3, 0.7, 0.005);
    bool pass = false;
    std::string detail = "no multiplicity-2 point found in (0.3, 0.7)";
    for (const auto& p : doubles) {
      if (p.multiplicity != 2) continue;
      const double oracle =
          oracles::rectangle_intensity(oracles::dirichlet_neumann_roots(1)[0]);
      const double rel = std::abs(p.alpha - oracle) / oracle;

      const BasisBoundaryData data = basis_boundary_data(sym, p.alpha, 0.0);
      const DeterminantSet ds = determinant_set_from(data);
      const double h0_ratio = std::abs(ds.H0) / H0_scale(data);
      const double h1_ratio = std::abs(ds.H1) / H1_scale(data);

      const Eigen::Vector3d uniform = Eigen::Vector3d::Ones() / std::sqrt(3.0);
      const double theta_err = (p.theta.theta - uniform).cwiseAbs().maxCoeff();

      const Eigen::Matrix3cd reference = limit_smatrix(p.theta, 2).entries;
      std::vector<std::pair<double, double>> devs;
      for (const double kappa : {1e-3, 3.16e-4, 1e-4}) {
        const ScatteringMatrix s = eps_smatrix(sym, p.alpha, kappa);
        devs.emplace_back(kappa, (s.entries - reference).cwiseAbs().maxCoeff());
      }
      const double slope = fit_loglog_slope(devs);

      pass = rel <= 1e-6 && h0_ratio <= 1e-6 && h1_ratio >= 1e-3 && theta_err <= 1e-8 &&
             slope >= 0.8 && slope <= 1.2 && devs.back().second <= 1e-2;
      detail = "alpha = " + fmt(p.alpha) + ", oracle rel err = " + fmt(rel) +
               " (tol 1e-6), |H0|/scale = " + fmt(h0_ratio) +
               " (tol 1e-6), |H1|/scale = " + fmt(h1_ratio) +
               " (>= 1e-3), |theta - uniform| = " + fmt(theta_err) +
               " (tol 1e-8), limit slope = " + fmt(slope) + " (band [0.8, 1.2])";
      break;
    }
    report(7, "double resonance", pass, detail);
  }

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
