#ifndef WEYLSCHA_FOCK_HPP
#define WEYLSCHA_FOCK_HPP

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "weylscha/errors.hpp"
#include "weylscha/types.hpp"

// Truncated-Fock-space utilities.  These back the independent oracles the
// test suites compare against: symbols via the matrix-element integral, and
// exact ground states via dense diagonalization.

namespace weylscha::fock {

inline ComplexMatrix annihilation(int dim) {
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline ComplexMatrix position(int dim) {
  const ComplexMatrix a = annihilation(dim);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

inline ComplexMatrix momentum(int dim) {
  const ComplexMatrix a = annihilation(dim);
  return Complex{0.0, 1.0} * (a.adjoint() - a) / std::sqrt(2.0);
}

inline ComplexMatrix number_operator(int dim) {
  const ComplexMatrix a = annihilation(dim);
  return a.adjoint() * a;
}

/// Diagonal matrix of exp(-beta omega (n + 1/2)).
inline ComplexMatrix thermal_ho_density(int dim, double beta, double omega) {
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) rho(n, n) = std::exp(-beta * omega * (n + 0.5));
  return rho;
}

/// H = p^2/2 + q^2/2 + lambda q^4.
inline ComplexMatrix quartic_oscillator(int dim, double lambda) {
  const ComplexMatrix q = position(dim);
  const ComplexMatrix p = momentum(dim);
  const ComplexMatrix q2 = q * q;
  return p * p / 2.0 + q2 / 2.0 + lambda * q2 * q2;
}

inline double ground_state_energy(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((h + h.adjoint()) / 2.0);
  return es.eigenvalues()(0);
}

/// Harmonic-oscillator eigenfunctions psi_0..psi_{nmax-1} at x, by the stable
/// three-term recurrence.
inline std::vector<double> hermite_functions(double x, int nmax) {
  std::vector<double> psi(nmax);
  psi[0] = std::pow(M_PI, -0.25) * std::exp(-x * x / 2.0);
  if (nmax > 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 2; n < nmax; ++n) {
    psi[n] = std::sqrt(2.0 / n) * x * psi[n - 1] - std::sqrt((n - 1.0) / n) * psi[n - 2];
  }
  return psi;
}

struct PhaseGrid {
  Vector p;
  Vector q;
};

struct OracleOptions {
  double x_max = 8.0;       // position window; r runs over [-2 x_max, 2 x_max]
  int n_r = 1024;           // trapezoid intervals for the r-integral
  double filter_cut = 0.5;  // smooth spectral filter scale, in units of dim
  double filter_power = 8.0;
  bool strict = false;      // throw TruncationWarning instead of reporting
};

struct SymbolSamples {
  ComplexMatrix values;    // values(i, j) = O(p_i, q_j)
  double boundary_weight;  // sensitivity of the result to the truncation edge
  bool truncated;          // boundary_weight > 1e-8
};

namespace detail {

inline ComplexMatrix filtered(const ComplexMatrix& op, double cut, double power) {
  const int dim = static_cast<int>(op.rows());
  Vector sigma(dim);
  for (int n = 0; n < dim; ++n) sigma[n] = std::exp(-std::pow(n / (cut * dim), power));
  return sigma.asDiagonal() * op * sigma.asDiagonal();
}

// O(p, q) = integral dr <q + r/2| Op |q - r/2> e^{-i r p}, trapezoid in r.
// The e^{-irp} kernel together with <q+r/2|.|q-r/2> reproduces symbol(p) = p
// for the momentum operator in the p = -i d/dq convention.
inline ComplexMatrix symbol_on_grid(const ComplexMatrix& op, const PhaseGrid& grid,
                                    const OracleOptions& opt) {
  const int dim = static_cast<int>(op.rows());
  const int nr = opt.n_r;
  const double r_max = 2.0 * opt.x_max;
  const double dr = 2.0 * r_max / nr;
  ComplexMatrix out(grid.p.size(), grid.q.size());
  Eigen::VectorXcd u(dim), v(dim);
  for (Eigen::Index jq = 0; jq < grid.q.size(); ++jq) {
    const double q = grid.q[jq];
    Eigen::VectorXcd kernel(nr + 1);
    for (int ir = 0; ir <= nr; ++ir) {
      const double r = -r_max + ir * dr;
      const auto up = hermite_functions(q + r / 2.0, dim);
      const auto vp = hermite_functions(q - r / 2.0, dim);
      for (int n = 0; n < dim; ++n) {
        u[n] = up[n];
        v[n] = vp[n];
      }
      kernel[ir] = u.dot(op * v);  // u^dag op v; u real, so this is u^t op v
    }
    for (Eigen::Index ip = 0; ip < grid.p.size(); ++ip) {
      Complex acc{0.0, 0.0};
      for (int ir = 0; ir <= nr; ++ir) {
        const double r = -r_max + ir * dr;
        const double wgt = (ir == 0 || ir == nr) ? 0.5 : 1.0;
        acc += wgt * kernel[ir] * std::exp(Complex{0.0, -r * grid.p[ip]});
      }
      out(ip, jq) = acc * dr;
    }
  }
  return out;
}

}  // namespace detail

/// Sample the Weyl symbol of a truncated-Fock-space operator on a phase-space
/// grid.  A smooth spectral filter suppresses the hard-truncation Gibbs tail;
/// boundary_weight reports the discrepancy against a narrower filter, an
/// estimate of how much the result depends on the truncation edge.
inline SymbolSamples fock_oracle_weyl(const ComplexMatrix& op, const PhaseGrid& grid,
                                      const OracleOptions& opt = {}) {
  if (op.rows() < 20) throw Error("fock_oracle_weyl: truncation dimension must be >= 20");
  const ComplexMatrix main =
      detail::symbol_on_grid(detail::filtered(op, opt.filter_cut, opt.filter_power), grid, opt);
  const ComplexMatrix alt = detail::symbol_on_grid(
      detail::filtered(op, 0.9 * opt.filter_cut, opt.filter_power), grid, opt);
  const double scale = std::max(1.0, main.cwiseAbs().maxCoeff());
  const double weight = (main - alt).cwiseAbs().maxCoeff() / scale;
  if (opt.strict && weight > 1e-8) {
    throw TruncationWarning(
        "fock_oracle_weyl: boundary Fock weight exceeds 1e-8; enlarge the truncation",
        weight);
  }
  return {main, weight, weight > 1e-8};
}

}  // namespace weylscha::fock

#endif
