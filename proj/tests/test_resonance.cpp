#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "starscat/resonance.hpp"
#include "starscat/scattering.hpp"

using namespace starscat;

TEST_CASE("characteristic determinant: constant mode, table root, spectral gap") {
  const auto profile = builtin_profile("paper-rect");

  // the constant function solves the problem at alpha = 0
  CHECK(characteristic_determinant(profile, 0.0) == 0.0);

  const double scale_at_root = characteristic_scale(profile, 8.8104);
  CHECK(std::abs(characteristic_determinant(profile, 8.8104)) <= 1e-4 * scale_at_root);
  // sign change across the root
  CHECK(characteristic_determinant(profile, 8.80) *
            characteristic_determinant(profile, 8.82) <
        0.0);

  // no root between the first two table values
  CHECK(std::abs(characteristic_determinant(profile, 15.0)) >
        1e-3 * characteristic_scale(profile, 15.0));
}

TEST_CASE("rectangle resonances match the transcendental oracle") {
  const auto profile = builtin_profile("paper-rect");
  const auto points = find_resonances(profile, 0.5, 70.0, 0.01);
  REQUIRE(points.size() == 3);

  const auto xs = oracles::neumann_neumann_roots(3);
  for (int i = 0; i < 3; ++i) {
    const double expected = oracles::rectangle_intensity(xs[i]);
    CHECK(std::abs(points[i].alpha - expected) <= 1e-6 * expected);
    CHECK(points[i].multiplicity == 1);
    CHECK(points[i].h1_residual <=
          1e-10 * characteristic_scale(profile, points[i].alpha));
    CHECK(points[i].window_lo < points[i].alpha);
    CHECK(points[i].alpha < points[i].window_hi);
  }
}

TEST_CASE("negative-range resonances mirror the positive ones") {
  const auto profile = builtin_profile("paper-rect");
  const auto negatives = find_resonances(profile, -70.0, -0.5, 0.01);
  const auto positives = find_resonances(profile, 0.5, 70.0, 0.01);
  REQUIRE(negatives.size() == positives.size());
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const double mirrored = -negatives[negatives.size() - 1 - i].alpha;
    CHECK(std::abs(mirrored - positives[i].alpha) <= 1e-6 * positives[i].alpha);
  }
}

TEST_CASE("symmetric profile: double resonance below one, simple near nine") {
  const auto profile = builtin_profile("symmetric-rect");
  const auto points = find_resonances(profile, 0.1, 10.0, 0.005);

  const double x_double = oracles::dirichlet_neumann_roots(1)[0];
  const double alpha_double = oracles::rectangle_intensity(x_double);
  const double x_simple = oracles::neumann_neumann_roots(1)[0];
  const double alpha_simple = oracles::rectangle_intensity(x_simple);

  bool found_double = false, found_simple = false;
  for (const auto& p : points) {
    if (std::abs(p.alpha - alpha_double) <= 1e-6 * alpha_double) {
      found_double = true;
      CHECK(p.multiplicity == 2);
      const Eigen::Vector3d uniform = Eigen::Vector3d::Ones() / std::sqrt(3.0);
      CHECK((p.theta.theta - uniform).cwiseAbs().maxCoeff() <= 1e-8);
    }
    if (std::abs(p.alpha - alpha_simple) <= 1e-6 * alpha_simple) {
      found_simple = true;
      CHECK(p.multiplicity == 1);
    }
  }
  CHECK(found_double);
  CHECK(found_simple);
}

TEST_CASE("grid warning when the step cannot separate the documented gap") {
  const auto profile = builtin_profile("symmetric-rect");
  std::vector<std::string> warnings;
  find_resonances(profile, 0.3, 0.7, 0.01, &warnings);
  CHECK(!warnings.empty());

  warnings.clear();
  find_resonances(builtin_profile("paper-rect"), 0.5, 70.0, 0.01, &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("scan argument validation") {
  const auto profile = builtin_profile("paper-rect");
  CHECK_THROWS_AS(find_resonances(profile, 5.0, 1.0, 0.01), InvalidRange);
  CHECK_THROWS_AS(find_resonances(profile, 1.0, 5.0, -0.1), InvalidRange);
  CHECK_THROWS_AS(find_resonances(profile, 1.0, 5.0, 0.0), InvalidRange);
}

TEST_CASE("multiplicity classification and tests agree") {
  const auto rect = builtin_profile("paper-rect");

  const auto zero_info = classify_multiplicity(rect, 0.0);
  CHECK(zero_info.multiplicity == 1);
  CHECK(zero_info.H0 == doctest::Approx(-3.0).epsilon(1e-12));

  const auto root = refine_nearest_resonance(rect, 8.8104);
  REQUIRE(root.has_value());
  const auto info = classify_multiplicity(rect, root->alpha);
  CHECK(info.multiplicity == 1);
  CHECK(info.sigma_ratio > 1e-4);

  const auto sym = builtin_profile("symmetric-rect");
  const auto dpoint = refine_nearest_resonance(sym, 0.5);
  REQUIRE(dpoint.has_value());
  CHECK(dpoint->multiplicity == 2);
  const auto dinfo = classify_multiplicity(sym, dpoint->alpha);
  CHECK(dinfo.multiplicity == 2);
  CHECK(dinfo.sigma_ratio < 1e-8);
  CHECK(std::abs(dinfo.H0) <= 1e-6 * dinfo.H0_scale);
}

TEST_CASE("coupling direction against the closed-form eigenfunction") {
  const auto profile = builtin_profile("paper-rect");

  // alpha = 0: the constant eigenfunction has equal tip values
  const auto zero_info = classify_multiplicity(profile, 0.0);
  const CouplingDirection at_zero = coupling_direction(profile, 0.0, zero_info);
  const Eigen::Vector3d uniform = Eigen::Vector3d::Ones() / std::sqrt(3.0);
  CHECK((at_zero.theta - uniform).cwiseAbs().maxCoeff() <= 1e-12);

  // first three roots: theta is (cosh x / cos x, 1, 1) normalized
  const auto xs = oracles::neumann_neumann_roots(3);
  const Eigen::Vector3d table1(-0.9992, 0.0279, 0.0279);
  for (int i = 0; i < 3; ++i) {
    const double alpha = oracles::rectangle_intensity(xs[i]);
    const auto point = refine_nearest_resonance(profile, alpha, 0.2);
    REQUIRE(point.has_value());
    Eigen::Vector3d expected(std::cosh(xs[i]) / std::cos(xs[i]), 1.0, 1.0);
    expected.normalize();
    if (expected(2) < 0.0) expected = -expected;
    // the null direction degrades slowly with the root's conditioning
    CHECK((point->theta.theta - expected).cwiseAbs().maxCoeff() <= 1e-7);
    if (i == 0)
      CHECK((point->theta.theta - table1).cwiseAbs().maxCoeff() <= 1e-3);
  }
}

TEST_CASE("canonical sign rule") {
  const CouplingDirection a = canonical_direction(Eigen::Vector3d(0.0, 0.0, -2.0));
  CHECK(a.theta(2) == 1.0);
  const CouplingDirection b = canonical_direction(Eigen::Vector3d(-3.0, 4.0, 0.0));
  CHECK(b.theta(1) > 0.0);
  CHECK(b.theta(0) < 0.0);
  CHECK(b.theta.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("nearest-root refinement reports nothing away from the spectrum") {
  const auto profile = builtin_profile("paper-rect");
  CHECK(!refine_nearest_resonance(profile, 15.0, 0.5).has_value());
  const auto near = refine_nearest_resonance(profile, 8.81, 0.5);
  REQUIRE(near.has_value());
  const double expected =
      oracles::rectangle_intensity(oracles::neumann_neumann_roots(1)[0]);
  CHECK(std::abs(near->alpha - expected) <= 1e-9 * expected);
}
