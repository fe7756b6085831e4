#pragma once

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "starscat/edge_solver.hpp"
#include "starscat/profile.hpp"
#include "starscat/resonance.hpp"

namespace starscat {

using Complex = std::complex<double>;
using Matrix6cd = Eigen::Matrix<Complex, 6, 6>;

/// Sign convention for the tip-derivative rows entering determinants and the
/// boundary-matching system.  CenterOutgoing is d/ds in the center-to-tip
/// direction; TipOutgoing negates it.  CenterOutgoing is the convention under
/// which the matching system yields unitary scattering matrices, and is the
/// default everywhere.
enum class DerivConvention { CenterOutgoing, TipOutgoing };

inline constexpr DerivConvention kDefaultConvention = DerivConvention::CenterOutgoing;

inline double convention_sign(DerivConvention c) {
  return c == DerivConvention::CenterOutgoing ? 1.0 : -1.0;
}

/// 3x3 scattering matrix.  entries(n, m) is the amplitude on edge m for a unit
/// monochromatic wave incoming on edge n; the diagonal holds reflection
/// coefficients.
struct ScatteringMatrix {
  enum class Kind { Limit, Epsilon };

  Eigen::Matrix3cd entries = Eigen::Matrix3cd::Zero();
  Kind kind = Kind::Limit;
  double kappa = 0.0;  // meaningful for Epsilon only

  double unitarity_defect() const;  // max entry of |S* S - I|
  double symmetry_defect() const;   // max entry of |S - S^T|
  double involution_defect() const; // max entry of |S^2 - I|
};

/// Zero-range-limit scattering matrix at a resonance with coupling direction
/// theta: S = (2 theta theta^T - I) for simple resonances (branch 1), negated
/// for double resonances (branch 2).  Independent of the sign of theta.
ScatteringMatrix limit_smatrix(const CouplingDirection& theta, int branch);

/// Vertex-condition matrices A, B with A psi(a) + B psi'(a) = 0 describing the
/// limiting coupling; branch 2 swaps the two.
struct InterfaceMatrices {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
};

InterfaceMatrices interface_matrices(const CouplingDirection& theta, int branch);

/// The 6x6 boundary-matching matrix at the data's (alpha, kappa): value and
/// slope continuity at the three junctions, unknowns
/// (T_n1, T_n2, T_n3, A, B, C).  The matrix is independent of the incoming
/// edge; only the right-hand side changes.
Matrix6cd matching_matrix(const BasisBoundaryData& data, double kappa,
                          DerivConvention convention = kDefaultConvention);

/// Scattering matrix of the regularized problem at wavenumber parameter
/// kappa = eps*k > 0: solves the matching system once (single factorization,
/// three right-hand sides) and validates unitarity and symmetry.
/// Throws SingularSystem when the system is numerically singular and
/// UnitarityViolation when the result misses its tolerance.
ScatteringMatrix eps_smatrix(const PotentialProfile& profile, double alpha, double kappa);

/// Same solve with an explicit derivative convention and optional validation.
ScatteringMatrix eps_smatrix_with_convention(const PotentialProfile& profile,
                                             double alpha, double kappa,
                                             DerivConvention convention,
                                             bool validate);

/// Full solution of the matching system: amplitudes plus the interior
/// coefficients (column n holds the basis coefficients of the interior
/// solution driven from edge n).
struct MatchingSolution {
  Eigen::Matrix3cd entries = Eigen::Matrix3cd::Zero();
  Eigen::Matrix3cd interior = Eigen::Matrix3cd::Zero();
  double condition = 0.0;
};

MatchingSolution solve_matching(const PotentialProfile& profile, double alpha,
                                double kappa, DerivConvention convention);

/// Largest violation of physical slope continuity by a matching solution:
/// the interior d/ds at each tip (center-to-tip direction, independent of any
/// assembly convention) against the exterior wave's derivative, relative to
/// the matched magnitude.  Near zero for the consistent convention; order one
/// for the flipped one, whose solutions reverse the derivative at every
/// junction (they stay unitary, since the flux reversal cancels across the
/// three junctions, so unitarity cannot arbitrate).
double slope_continuity_defect(const BasisBoundaryData& data,
                               const MatchingSolution& solution, double kappa);

/// The determinant family of the boundary data: h0 = det(values),
/// h1 = det(sign * derivs), h0m / h1m by single-row replacement between the
/// two, and the sums H0, H1.
struct DeterminantSet {
  double h0 = 0.0;
  double h1 = 0.0;
  std::array<double, 3> h0m{};  // h1-determinant with row m from the value rows
  std::array<double, 3> h1m{};  // h0-determinant with row m from the derivative rows
  double H0 = 0.0;
  double H1 = 0.0;
  DerivConvention convention = kDefaultConvention;
};

DeterminantSet determinant_set_from(const BasisBoundaryData& data,
                                    DerivConvention convention = kDefaultConvention);

/// Determinant family at kappa = 0 (the resonance-side quantities).
DeterminantSet determinant_set(const PotentialProfile& profile, double alpha,
                               DerivConvention convention = kDefaultConvention);

/// Hadamard-bound scales for judging smallness of the family members.
double h1_scale(const BasisBoundaryData& data);
double H0_scale(const BasisBoundaryData& data);
double H1_scale(const BasisBoundaryData& data);

/// For each kappa: |det M(kappa) - E(kappa)| where E is the second-order
/// expansion of the matching determinant in kappa built from the determinant
/// family (evaluated at the same kappa).  The residual decays like kappa^3.
std::vector<std::pair<double, double>> expansion_residual(
    const PotentialProfile& profile, double alpha, const std::vector<double>& kappas);

/// One row of a transmission sweep.
struct SweepRow {
  double alpha = 0.0;
  double probability = 0.0;  // |T_nm|^2
  double phase = 0.0;        // arg T_nm
  bool ok = true;
  std::string message;       // set when ok == false
};

/// |T_nm|^2 and arg T_nm over an alpha grid at fixed kappa; edges are 1-based.
/// Singular rows are flagged, not fatal.  threads > 1 parallelizes the solves;
/// output order always follows the input grid.
std::vector<SweepRow> transmission_sweep(const PotentialProfile& profile,
                                         const std::vector<double>& alphas,
                                         double kappa, int from_edge, int to_edge,
                                         int threads = 1);

struct ConvergenceRow {
  double epsilon = 0.0;
  double deviation = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // ordered by epsilon descending
  bool resonant = false;
  double slope = 0.0;  // fitted log-log slope of deviation vs epsilon
};

/// Deviation of the regularized scattering matrix from its limit:
/// max-entry distance to the limit matrix at a resonant alpha (alpha must be
/// refined beforehand), or to -I (total reflection) otherwise.
ConvergenceTable convergence_table(const PotentialProfile& profile, double alpha,
                                   double k, std::vector<double> epsilons);

}  // namespace starscat
