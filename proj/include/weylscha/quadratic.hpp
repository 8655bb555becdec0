#ifndef WEYLSCHA_QUADRATIC_HPP
#define WEYLSCHA_QUADRATIC_HPP

#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "weylscha/errors.hpp"
#include "weylscha/types.hpp"

namespace weylscha {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// H = w + 1/2 [ (p-p0)^t A2 (p-p0) + 2 (p-p0)^t X (q-q0) + (q-q0)^t B2 (q-q0) ]
///
/// hbar_eff is the effective Planck constant of the phase-space pair (q, p);
/// spin applications use hbar_eff = 1/S_tilde.
struct QuadraticHamiltonian {
  Matrix A2;  // momentum block
  Matrix B2;  // coordinate block
  Matrix X;   // cross block (zero for all SCHA trial Hamiltonians here)
  Vector p0;
  Vector q0;
  double w = 0.0;
  double hbar_eff = 1.0;

  int n_dof() const { return static_cast<int>(A2.rows()); }

  static QuadraticHamiltonian standard(Matrix a2, Matrix b2, double hbar = 1.0) {
    const int n = static_cast<int>(a2.rows());
    QuadraticHamiltonian h;
    h.A2 = std::move(a2);
    h.B2 = std::move(b2);
    h.X = Matrix::Zero(n, n);
    h.p0 = Vector::Zero(n);
    h.q0 = Vector::Zero(n);
    h.hbar_eff = hbar;
    return h;
  }

  bool has_cross_block() const { return X.size() > 0 && X.cwiseAbs().maxCoeff() > 0.0; }
};

/// Output of the normal-form reduction.  F^{-1} = G^t = O*A, so q = G q~ and
/// p = F p~ - X^t F q~ map the independent modes back to the original pair.
struct NormalModeBasis {
  Matrix V;       // rows diagonalize A2: V A2 V^t = Lambda^2
  Vector Lambda;  // positive square roots of the eigenvalues of A2
  Matrix O;       // rows diagonalize A (B2 - X^t A^{-2} X) A
  Vector Omega;   // mode frequencies, ascending
  Matrix F;
  Matrix G;
  Vector E;  // mode signs; identity except for the chain's A*H*A route
};

struct CorrelatorSet {
  Matrix Cqq;
  Matrix Cpp;
  Matrix Cpq;   // <p q^t>
  Vector alpha; // per-mode (hbar/2) coth(beta hbar omega / 2)
  double beta = kBetaInfinity;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// omega0/2 (p^2 + q^2) + gamma/2 (q^2 - p^2) -> sqrt(omega0^2 - gamma^2).
inline double single_mode_bogoliubov(double omega0, double gamma) {
  if (!(std::abs(gamma) < omega0)) {
    throw UnstableMode(
        "single-mode Hamiltonian unbounded from below: requires |gamma| < omega0");
  }
  return std::sqrt(omega0 * omega0 - gamma * gamma);
}

namespace detail {

// Fix each eigenvector's overall sign so its first nonzero component is
// positive, for reproducible output under degeneracy.
inline void fix_eigenvector_signs(Matrix& cols) {
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    const double scale = cols.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < cols.rows(); ++r) {
      if (std::abs(cols(r, c)) > 1e-12 * scale) {
        if (cols(r, c) < 0.0) cols.col(c) = -cols.col(c);
        break;
      }
    }
  }
}

struct SymmetricEigen {
  Vector values;  // ascending
  Matrix vectors; // columns
};

inline SymmetricEigen eigh(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.transpose()) / 2.0);
  SymmetricEigen out{es.eigenvalues(), es.eigenvectors()};
  fix_eigenvector_signs(out.vectors);
  return out;
}

}  // namespace detail

/// Positive square root of a symmetric positive-definite matrix, with inverse.
inline std::pair<Matrix, Matrix> psd_sqrt(const Matrix& a2) {
  if (!is_symmetric(a2)) throw ConstraintViolated("psd_sqrt: matrix not symmetric");
  auto eig = detail::eigh(a2);
  const double eps_pd = kPdRatio * eig.values.maxCoeff();
  if (eig.values.minCoeff() <= eps_pd) {
    throw NotPositiveDefinite("psd_sqrt: eigenvalue at or below instability threshold",
                              eig.values.minCoeff());
  }
  const Vector lam = eig.values.cwiseSqrt();
  Matrix a = eig.vectors * lam.asDiagonal() * eig.vectors.transpose();
  Matrix a_inv = eig.vectors * lam.cwiseInverse().asDiagonal() * eig.vectors.transpose();
  return {std::move(a), std::move(a_inv)};
}

/// Reduce a quadratic Hamiltonian to independent harmonic oscillators.
inline NormalModeBasis normal_form(const QuadraticHamiltonian& h) {
  if (!is_symmetric(h.A2)) throw ConstraintViolated("normal_form: A2 not symmetric");
  if (!is_symmetric(h.B2)) throw ConstraintViolated("normal_form: B2 not symmetric");

  auto eig_a = detail::eigh(h.A2);
  const double eps_pd = kPdRatio * eig_a.values.maxCoeff();
  if (eig_a.values.minCoeff() <= eps_pd) {
    throw NotPositiveDefinite("normal_form: A2 not positive definite",
                              eig_a.values.minCoeff());
  }

  NormalModeBasis basis;
  basis.V = eig_a.vectors.transpose();
  basis.Lambda = eig_a.values.cwiseSqrt();
  const Matrix a = eig_a.vectors * basis.Lambda.asDiagonal() * eig_a.vectors.transpose();
  const Matrix a_inv =
      eig_a.vectors * basis.Lambda.cwiseInverse().asDiagonal() * eig_a.vectors.transpose();

  Matrix reduced = h.B2;
  if (h.has_cross_block()) {
    const Matrix xa2 = h.X * h.A2;
    const double scale = std::max(1.0, xa2.cwiseAbs().maxCoeff());
    if ((xa2 - xa2.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw ConstraintViolated(
          "normal_form: X*A2 is not symmetric; the transformation is not canonical. "
          "Consider exchanging the role of coordinates and momenta (requires B2*X "
          "symmetric) and reducing the exchanged form instead.");
    }
    reduced -= h.X.transpose() * a_inv * a_inv * h.X;
  }

  auto eig_s = detail::eigh(a * reduced * a);
  const double spectral_scale = eig_s.values.cwiseAbs().maxCoeff();
  if (eig_s.values.minCoeff() < -kPdRatio * spectral_scale) {
    throw UnstableSpectrum("normal_form: negative squared frequency " +
                           std::to_string(eig_s.values.minCoeff()));
  }
  basis.O = eig_s.vectors.transpose();
  basis.Omega = eig_s.values.cwiseMax(0.0).cwiseSqrt();
  basis.G = a * eig_s.vectors;      // A O^t
  basis.F = a_inv * eig_s.vectors;  // A^{-1} O^t
  basis.E = Vector::Ones(h.n_dof());
  return basis;
}

/// alpha_k = (hbar/2) coth(beta hbar omega_k / 2); hbar/2 in the ground state.
inline Vector thermal_factors(const Vector& omega, double beta, double hbar_eff) {
  Vector alpha(omega.size());
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    if (!(omega[k] > 0.0)) {
      throw UnstableSpectrum("thermal_factors: nonpositive mode frequency");
    }
    alpha[k] = std::isinf(beta)
                   ? hbar_eff / 2.0
                   : hbar_eff / 2.0 / std::tanh(beta * hbar_eff * omega[k] / 2.0);
  }
  return alpha;
}

/// Equilibrium second moments of the original (p, q) variables.
inline CorrelatorSet correlators(const QuadraticHamiltonian& h, const NormalModeBasis& basis,
                                 double beta) {
  CorrelatorSet c;
  c.beta = beta;
  c.alpha = thermal_factors(basis.Omega, beta, h.hbar_eff);
  const Vector aw = c.alpha.cwiseProduct(basis.Omega);            // alpha_k omega_k
  const Vector aow = c.alpha.cwiseQuotient(basis.Omega);          // alpha_k / omega_k
  c.Cqq = basis.G * aow.asDiagonal() * basis.G.transpose();
  c.Cpp = basis.F * aw.asDiagonal() * basis.F.transpose();
  if (h.has_cross_block()) {
    const Matrix faf = basis.F * aow.asDiagonal() * basis.F.transpose();
    c.Cpp += h.X.transpose() * faf * h.X;
    c.Cpq = -h.X.transpose() * basis.F * aow.asDiagonal() * basis.G.transpose();
  } else {
    c.Cpq = Matrix::Zero(h.n_dof(), h.n_dof());
  }
  return c;
}

}  // namespace weylscha

#endif
