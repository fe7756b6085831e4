#pragma once

#include <stdexcept>
#include <string>

namespace starscat {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- configuration errors ---------------------------------------------------

/// Config text is not syntactically valid (bad JSON, wrong types, missing keys).
class MalformedConfig : public Error {
 public:
  using Error::Error;
};

/// A structural invariant of the potential profile is violated; the message
/// names the failing invariant.
class InvalidProfile : public Error {
 public:
  using Error::Error;
};

/// Zero-mean enforcement is on and the profile integrates to a nonzero value.
class NonZeroMean : public InvalidProfile {
 public:
  using InvalidProfile::InvalidProfile;
};

/// Requested builtin profile name does not exist.
class UnknownProfile : public Error {
 public:
  using Error::Error;
};

// --- domain errors -----------------------------------------------------------

/// Scan range or grid step is unusable.
class InvalidRange : public Error {
 public:
  using Error::Error;
};

/// The boundary-matching system is numerically singular at the requested point.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// A limiting scattering matrix was requested at an intensity that is not in
/// the resonant set; the message names the nearest resonance when one exists.
class NonResonantIntensity : public Error {
 public:
  using Error::Error;
};

/// A resonant eigenfunction has (numerically) vanishing tip values, so no
/// coupling direction can be assigned.
class DegenerateCoupling : public Error {
 public:
  using Error::Error;
};

/// The rank test and the determinant test disagree about the multiplicity of a
/// resonance; both measured values are reported in the message.
class InconsistentClassification : public Error {
 public:
  using Error::Error;
};

/// A computed scattering matrix misses its unitarity/symmetry tolerance.
class UnitarityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace starscat
