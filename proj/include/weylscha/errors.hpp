#ifndef WEYLSCHA_ERRORS_HPP
#define WEYLSCHA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace weylscha {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |gamma| >= omega0: the single-mode Hamiltonian is not bounded from below.
struct UnstableMode : Error {
  using Error::Error;
};

/// A matrix required to be positive definite has an eigenvalue at or below
/// the instability threshold.  Carries the offending eigenvalue.
struct NotPositiveDefinite : Error {
  NotPositiveDefinite(const std::string& what, double eig)
      : Error(what), eigenvalue(eig) {}
  double eigenvalue;
};

/// A structural precondition (e.g. X*A2 symmetric) does not hold.
struct ConstraintViolated : Error {
  using Error::Error;
};

/// A squared mode frequency fell below the instability threshold.
struct UnstableSpectrum : Error {
  using Error::Error;
};

/// A correlator sum hit a (near-)singular grid point.
struct DivergentCorrelator : Error {
  using Error::Error;
};

/// Self-consistent iteration drove the spectral gap to zero.
struct GapClosed : Error {
  GapClosed(const std::string& what, double g) : Error(what), gap(g) {}
  double gap;
};

struct NoConvergence : Error {
  using Error::Error;
};

/// The requested (N, mu) admits no positive-definite field interval.
struct NoStableWindow : Error {
  using Error::Error;
};

/// Fock-space truncation is too small for the requested evaluation.
struct TruncationWarning : Error {
  TruncationWarning(const std::string& what, double w) : Error(what), weight(w) {}
  double weight;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace weylscha

#endif
