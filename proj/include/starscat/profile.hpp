#pragma once

#include <array>
#include <string>
#include <vector>

#include "starscat/errors.hpp"

namespace starscat {

/// One piece of a piecewise-defined potential on an edge.  A segment is either
/// constant or sampled; sampled segments are interpolated linearly between the
/// (s, value) nodes, with s measured from the segment start.
struct Segment {
  double length = 1.0;
  double const_value = 0.0;
  std::vector<std::array<double, 2>> samples;  // empty for constant segments

  bool is_constant() const { return samples.empty(); }

  /// Potential value at arclength s from the segment start, s in [0, length].
  double value_at(double s) const;

  /// Exact integral over the segment (trapezoid on nodes for sampled data,
  /// which is exact under the linear interpolation convention).
  double integral() const;

  /// Throws InvalidProfile if a structural invariant fails.
  void validate(int edge_index, int segment_index) const;

  bool operator==(const Segment&) const = default;
};

/// Potential on one edge of the unit star, parametrized by s in [0,1] with
/// s = 0 at the center and s = 1 at the tip.
struct EdgePotential {
  std::vector<Segment> segments;

  double total_length() const;
  double value_at(double s) const;
  double integral() const;
  void validate(int edge_index) const;

  bool operator==(const EdgePotential&) const = default;
};

/// Potential shape on the whole unit star (three edges of length 1).
struct PotentialProfile {
  std::array<EdgePotential, 3> edges;
  bool zero_mean_enforced = true;
  std::string name;  // builtin tag, empty for file-loaded profiles

  /// Checks all structural invariants and, when enforcement is on, the
  /// zero-mean condition.  Throws InvalidProfile / NonZeroMean.
  void validate() const;

  bool has_sampled_segments() const;

  /// Content equality; the builtin name tag does not participate.
  bool operator==(const PotentialProfile& other) const {
    return edges == other.edges && zero_mean_enforced == other.zero_mean_enforced;
  }
};

/// Parses the JSON profile schema.  Throws MalformedConfig on syntax/type
/// problems and InvalidProfile / NonZeroMean on invariant violations.
PotentialProfile parse_profile(const std::string& config_text);

/// Emits the JSON schema accepted by parse_profile; round-trips exactly.
std::string serialize_profile(const PotentialProfile& profile);

/// Builtin shapes: "paper-rect" (+7/-7 rectangle on edge 1, zero elsewhere)
/// and "symmetric-rect" (the same rectangle on all three edges).
/// Throws UnknownProfile for any other name.
PotentialProfile builtin_profile(const std::string& name);

/// Integral of the potential over the whole star.
double integrate_potential(const PotentialProfile& profile);

}  // namespace starscat
