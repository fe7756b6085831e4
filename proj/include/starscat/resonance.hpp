#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "starscat/edge_solver.hpp"
#include "starscat/profile.hpp"

namespace starscat {

/// Unit 3-vector of tip values (projective class representative) attached to a
/// resonant intensity.  Canonical sign: the last nonzero component is
/// positive.  Everything downstream is quadratic in theta, so the
/// representative choice carries no physics.
struct CouplingDirection {
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
};

/// Normalizes and applies the canonical sign rule.
CouplingDirection canonical_direction(const Eigen::Vector3d& raw);

/// A located resonance.
struct SpectralPoint {
  double alpha = 0.0;
  int multiplicity = 1;
  CouplingDirection theta;
  double h1_residual = 0.0;  // |characteristic determinant| after refinement
  double window_lo = 0.0;    // bracketing interval used by the refinement
  double window_hi = 0.0;
};

/// Characteristic determinant of the resonance problem: determinant of the
/// tip-derivative matrix of the Kirchhoff basis at kappa = 0.  Its root set is
/// the resonant set; its overall sign depends on the derivative convention.
double characteristic_determinant(const PotentialProfile& profile, double alpha);

/// Hadamard bound of the tip-derivative matrix; the natural local scale for
/// judging smallness of the characteristic determinant.
double characteristic_scale(const PotentialProfile& profile, double alpha);

/// Outcome of the multiplicity decision at a refined root.
struct MultiplicityInfo {
  int multiplicity = 1;
  /// Coefficient vectors (in the Kirchhoff basis) of the eigenfunctions,
  /// one column per multiplicity.
  Eigen::Matrix<double, 3, Eigen::Dynamic> null_basis;
  double sigma_ratio = 0.0;  // sigma_2 / sigma_1 of the tip-derivative matrix
  double H0 = 0.0;           // consistency-check determinant value
  double H0_scale = 0.0;
};

/// Rank (singular value) test with the determinant-family consistency check.
/// Throws InconsistentClassification when the two disagree.
MultiplicityInfo classify_multiplicity(const PotentialProfile& profile, double alpha);

/// Coupling direction of a classified resonance: normalized tip values of the
/// eigenfunction (simple), or the normalized cross product of the two
/// eigenfunctions' tip-value vectors (double).  Throws DegenerateCoupling when
/// the unnormalized vector is numerically zero.
CouplingDirection coupling_direction(const PotentialProfile& profile, double alpha,
                                     const MultiplicityInfo& info);

/// Scans [alpha_lo, alpha_hi] with the given grid step, refines every
/// sign-change bracket and every touched-zero candidate, classifies each root
/// and attaches its coupling direction.  Results are sorted by alpha.
/// Appends human-readable notes to *warnings (if non-null), e.g. when the grid
/// step is too coarse for the documented minimum root gap of a builtin shape.
std::vector<SpectralPoint> find_resonances(const PotentialProfile& profile,
                                           double alpha_lo, double alpha_hi,
                                           double grid_step,
                                           std::vector<std::string>* warnings = nullptr);

/// Refines the resonance closest to a user-supplied guess, scanning
/// [guess - halfwidth, guess + halfwidth].  Returns nothing when the window
/// contains no root.
std::optional<SpectralPoint> refine_nearest_resonance(const PotentialProfile& profile,
                                                      double alpha_guess,
                                                      double halfwidth = 0.5);

}  // namespace starscat
