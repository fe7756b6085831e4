#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "starscat/profile.hpp"

namespace starscat {

/// 2x2 map taking (value, slope) at a segment start to (value, slope) at the
/// segment end.  Wronskian constancy forces det = 1.
struct TransferMatrix {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();

  double det() const { return m.determinant(); }

  /// |det - 1| relative to the Hadamard bound of the matrix.  In floating
  /// point the unit determinant only survives relative to the row magnitudes
  /// once the entries grow hyperbolically.
  double unit_det_defect() const {
    const double scale = m.row(0).norm() * m.row(1).norm();
    return std::abs(det() - 1.0) / std::max(1.0, scale);
  }

  TransferMatrix then(const TransferMatrix& next) const {
    return TransferMatrix{next.m * m};
  }

  Eigen::Vector2d apply(double value, double slope) const {
    return m * Eigen::Vector2d(value, slope);
  }
};

/// Propagator of -g'' + alpha*Q*g = kappa^2 g across one segment.  Constant
/// segments use the closed form (trig/hyperbolic, with a series branch near
/// the degenerate case); sampled segments use fixed-step RK4 on the
/// fundamental matrix.
TransferMatrix segment_transfer(const Segment& segment, double alpha, double kappa);

/// Ordered product of segment propagators from the center to the tip.
TransferMatrix edge_transfer(const EdgePotential& edge, double alpha, double kappa);

/// Boundary data at the three tips of the Kirchhoff-compatible basis
/// solutions.  Columns are the basis solutions, fixed by their data at the
/// center: column 0 has value 0 and outgoing slopes (0, 1, -1), column 1 has
/// value 0 and slopes (1, 0, -1), column 2 has value 1 and zero slopes.
///
/// values(j, i) is the value at tip j of basis solution i; derivs(j, i) is
/// d/ds at s = 1 on edge j, taken in the center-to-tip direction.
struct BasisBoundaryData {
  double alpha = 0.0;
  double kappa = 0.0;
  Eigen::Matrix3d values = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d derivs = Eigen::Matrix3d::Zero();
  /// Frobenius norms of the three edge propagators; the magnitudes the rows
  /// were assembled from, and hence the honest noise floor for determinants
  /// of this data (row norms alone can collapse at near-degenerate roots).
  Eigen::Vector3d edge_scale = Eigen::Vector3d::Ones();
};

BasisBoundaryData basis_boundary_data(const PotentialProfile& profile,
                                      double alpha, double kappa);

/// Largest pairwise Lagrange-identity defect
///   max_{i<j} | sum_k derivs(k,i) values(k,j) - values(k,i) derivs(k,j) |,
/// which vanishes identically for exact solutions.
double lagrange_defect(const BasisBoundaryData& data);

/// Natural magnitude for comparing Lagrange sums against: the largest
/// |value|*|derivative| product scale of the data.
double lagrange_scale(const BasisBoundaryData& data);

}  // namespace starscat
