#ifndef WEYLSCHA_TYPES_HPP
#define WEYLSCHA_TYPES_HPP

#include <complex>
#include <limits>

#include <Eigen/Core>

namespace weylscha {

// Dense row-major real matrices throughout; no sparse path.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using ComplexMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Complex = std::complex<double>;

/// beta = infinity selects the ground state (T = 0).
inline constexpr double kBetaInfinity = std::numeric_limits<double>::infinity();

/// Relative positive-definiteness threshold: eigenvalues below
/// kPdRatio * (largest eigenvalue) count as an instability signal.
inline constexpr double kPdRatio = 1e-12;

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-12) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace weylscha

#endif
