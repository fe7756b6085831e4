#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starscat/profile.hpp"

namespace starscat {

/// One invariant check with its measured margin.
struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool measured_must_exceed = false;  // direction of the comparison
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Runs the full invariant suite on a profile: randomized unitarity/symmetry,
/// transfer-matrix determinants, Lagrange identities, closed-form versus
/// integrator agreement, the determinant-expansion slope, the free-vertex
/// matrix at alpha = 0, limit-matrix algebra, the derivative-convention gate,
/// and the per-resonance residual checks.  Deterministic for a fixed seed.
VerifyReport run_verification(const PotentialProfile& profile, std::uint64_t seed);

}  // namespace starscat
