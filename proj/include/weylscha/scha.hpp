#ifndef WEYLSCHA_SCHA_HPP
#define WEYLSCHA_SCHA_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "weylscha/errors.hpp"
#include "weylscha/quadratic.hpp"
#include "weylscha/types.hpp"

namespace weylscha {

// ---------------------------------------------------------------------------
// Wick decoupling
// ---------------------------------------------------------------------------

enum class PhaseVar { P, Q };

/// Gaussian average of a zero-mean monomial, as a sum over pairings of second
/// moments.  Odd total degree averages to zero by contract.
/// Example: <p^2 q^4> = 3 <p^2><q^2>^2 + 12 <pq>^2 <q^2>.
inline double wick_average_quartic(const CorrelatorSet& c,
                                   const std::vector<std::pair<PhaseVar, int>>& monomial) {
  if (monomial.size() % 2 != 0) return 0.0;
  auto cov = [&c](const std::pair<PhaseVar, int>& a, const std::pair<PhaseVar, int>& b) {
    if (a.first == PhaseVar::P && b.first == PhaseVar::P) return c.Cpp(a.second, b.second);
    if (a.first == PhaseVar::Q && b.first == PhaseVar::Q) return c.Cqq(a.second, b.second);
    if (a.first == PhaseVar::P) return c.Cpq(a.second, b.second);
    return c.Cpq(b.second, a.second);
  };
  std::function<double(std::vector<std::pair<PhaseVar, int>>)> pair_up =
      [&](std::vector<std::pair<PhaseVar, int>> vars) -> double {
    if (vars.empty()) return 1.0;
    const auto first = vars.front();
    double total = 0.0;
    for (std::size_t j = 1; j < vars.size(); ++j) {
      std::vector<std::pair<PhaseVar, int>> rest;
      rest.reserve(vars.size() - 2);
      for (std::size_t k = 1; k < vars.size(); ++k) {
        if (k != j) rest.push_back(vars[k]);
      }
      total += cov(first, vars[j]) * pair_up(std::move(rest));
    }
    return total;
  };
  return pair_up(monomial);
}

// ---------------------------------------------------------------------------
// Generic engine
// ---------------------------------------------------------------------------

/// A nonlinear model the engine can fit with a trial quadratic Hamiltonian.
/// Models must have vanishing averaged first derivatives at p0 = q0 = 0
/// (both applications here do, by parity); shift solving is not supported.
class RenormalizableModel {
 public:
  virtual ~RenormalizableModel() = default;

  virtual QuadraticHamiltonian bare() const = 0;

  /// Wick-averaged second derivatives of the interaction:
  /// (dA2, dB2) with dA2_ij = <H^int_{p_i p_j}>_0 and dB2_ij = <H^int_{q_i q_j}>_0.
  virtual std::pair<Matrix, Matrix> delta_second_derivatives(
      const CorrelatorSet& c) const = 0;

  /// <H^int>_0, used for the constant w of the trial Hamiltonian.
  virtual double energy_offset(const CorrelatorSet& c) const = 0;
};

struct SchaConfig {
  double tol = 1e-10;  // fixed-point residual on the Cqq max-norm
  int max_iter = 500;
  double mixing = 0.5;  // linear mixing on (dA2, dB2)
};

struct SchaState {
  QuadraticHamiltonian effective;
  NormalModeBasis basis;
  CorrelatorSet correlators;
  double gap = 0.0;  // smallest mode frequency
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

/// Iterate C -> correlators(bare + delta(C)) to a fixed point with linear
/// mixing on the matrix updates.  Aborts with GapClosed once the gap falls
/// below 1e-6 of the spectral scale; the last stable state, if any, is left
/// in *last_state.
inline SchaState scha_iterate(const RenormalizableModel& model, double beta,
                              const SchaConfig& config = {},
                              SchaState* last_state = nullptr) {
  const QuadraticHamiltonian bare = model.bare();
  const int n = bare.n_dof();
  Matrix da2 = Matrix::Zero(n, n);
  Matrix db2 = Matrix::Zero(n, n);

  SchaState state;
  state.effective = bare;
  Matrix cqq_prev;
  for (int it = 0; it < config.max_iter; ++it) {
    QuadraticHamiltonian eff = bare;
    eff.A2 += da2;
    eff.B2 += db2;
    NormalModeBasis basis;
    try {
      basis = normal_form(eff);
    } catch (const NotPositiveDefinite& e) {
      if (last_state && it > 0) *last_state = state;
      throw GapClosed("scha_iterate: trial Hamiltonian lost positive definiteness "
                      "(eigenvalue " + std::to_string(e.eigenvalue) + ")",
                      0.0);
    } catch (const UnstableSpectrum&) {
      if (last_state && it > 0) *last_state = state;
      throw GapClosed("scha_iterate: squared frequency driven negative", 0.0);
    }
    const double gap = basis.Omega.minCoeff();
    if (gap < 1e-6 * basis.Omega.maxCoeff()) {
      if (last_state && it > 0) *last_state = state;
      throw GapClosed("scha_iterate: spectral gap closed during iteration", gap);
    }
    CorrelatorSet c = correlators(eff, basis, beta);

    state.effective = std::move(eff);
    state.basis = std::move(basis);
    state.gap = gap;
    state.iterations = it + 1;

    if (cqq_prev.size() > 0) {
      const double residual = (c.Cqq - cqq_prev).cwiseAbs().maxCoeff();
      state.residual_history.push_back(residual);
      if (residual <= config.tol) {
        state.converged = true;
        state.correlators = std::move(c);
        break;
      }
    }
    cqq_prev = c.Cqq;

    auto [da2_new, db2_new] = model.delta_second_derivatives(c);
    const double update_norm = (da2_new - da2).cwiseAbs().maxCoeff() +
                               (db2_new - db2).cwiseAbs().maxCoeff();
    da2 = (1.0 - config.mixing) * da2 + config.mixing * da2_new;
    db2 = (1.0 - config.mixing) * db2 + config.mixing * db2_new;
    state.correlators = std::move(c);
    if (update_norm == 0.0) {  // e.g. a purely harmonic model: done in one pass
      state.converged = true;
      break;
    }
  }
  if (!state.converged) {
    throw NoConvergence("scha_iterate: no fixed point after " +
                        std::to_string(config.max_iter) + " iterations");
  }
  // w from <H>_0 matching: the quadratic part contributes its own average.
  state.effective.w = bare.w + model.energy_offset(state.correlators) -
                      0.5 * (da2.cwiseProduct(state.correlators.Cpp).sum() +
                             db2.cwiseProduct(state.correlators.Cqq).sum());
  return state;
}

// ---------------------------------------------------------------------------
// One degree of freedom
// ---------------------------------------------------------------------------

struct Potential1d {
  std::function<double(double)> v;
  std::function<double(double)> dv;
  std::function<double(double)> d2v;
};

struct Scha1dResult {
  double omega2;
  double q0;
  double w;
  int iterations;
};

struct Scha1dOptions {
  double q_init = 0.0;  // starting guess for the potential minimum
  double tol = 1e-13;
  int max_iter = 2000;
  double mixing = 0.5;
};

namespace detail {

// Gauss-Hermite nodes/weights for integral e^{-x^2} f(x) dx (Golub-Welsch).
struct GaussHermite {
  Vector nodes;
  Vector weights;
  explicit GaussHermite(int n) {
    Matrix j = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = std::sqrt(k / 2.0);
      j(k, k - 1) = b;
      j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(j);
    nodes = es.eigenvalues();
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
      const double v0 = es.eigenvectors()(0, k);
      weights[k] = std::sqrt(M_PI) * v0 * v0;
    }
  }
};

}  // namespace detail

/// Self-consistent harmonic fit of a 1-d potential: <V''>_0 = omega^2,
/// <V'>_0 = 0, and w from <V>_0 matching, with
/// <(q - q0)^2>_0 = (hbar / 2 omega) coth(beta hbar omega / 2).
inline Scha1dResult scha_1d(const Potential1d& pot, double beta, double hbar_eff,
                            const Scha1dOptions& opt = {}) {
  static const detail::GaussHermite gh(48);
  auto gauss_avg = [&](const std::function<double(double)>& f, double q0, double d) {
    double acc = 0.0;
    const double s = std::sqrt(2.0 * d);
    for (Eigen::Index k = 0; k < gh.nodes.size(); ++k) {
      acc += gh.weights[k] * f(q0 + s * gh.nodes[k]);
    }
    return acc / std::sqrt(M_PI);
  };
  auto spread = [&](double omega) {
    return std::isinf(beta) ? hbar_eff / (2.0 * omega)
                            : hbar_eff / (2.0 * omega * std::tanh(beta * hbar_eff * omega / 2.0));
  };

  double q0 = opt.q_init;
  double omega2 = pot.d2v(q0);
  if (!(omega2 > 0.0)) {
    throw GapClosed("scha_1d: V'' at the starting point is not positive", omega2);
  }
  int it = 0;
  for (it = 0; it < opt.max_iter; ++it) {
    const double d = spread(std::sqrt(omega2));
    // Solve <V'(q)>_0 = 0 for the center by Newton steps.
    for (int k = 0; k < 60; ++k) {
      const double g = gauss_avg(pot.dv, q0, d);
      const double gp = gauss_avg(pot.d2v, q0, d);
      if (!(gp > 0.0)) break;
      const double step = g / gp;
      q0 -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double omega2_new = gauss_avg(pot.d2v, q0, d);
    if (omega2_new <= kPdRatio) {
      throw GapClosed("scha_1d: renormalized frequency vanished; the trial potential "
                      "cannot fit V",
                      omega2_new);
    }
    const double residual = std::abs(omega2_new - omega2);
    omega2 = (1.0 - opt.mixing) * omega2 + opt.mixing * omega2_new;
    if (residual <= opt.tol * std::max(1.0, omega2)) break;
  }
  if (it == opt.max_iter) throw NoConvergence("scha_1d: no fixed point");
  const double d = spread(std::sqrt(omega2));
  const double w = gauss_avg(pot.v, q0, d) - 0.5 * omega2 * d;
  return {omega2, q0, w, it + 1};
}

}  // namespace weylscha

#endif
