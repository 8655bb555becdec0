#ifndef WEYLSCHA_AFM_BULK_HPP
#define WEYLSCHA_AFM_BULK_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "weylscha/errors.hpp"
#include "weylscha/quadratic.hpp"
#include "weylscha/scha.hpp"
#include "weylscha/types.hpp"

// Easy-axis antiferromagnet on a hypercubic bipartite lattice (z = 2d) in a
// longitudinal field.  Reduced units: energy J S_tilde^2 = 1, field
// h = H / (J S_tilde), effective Planck constant 1 / S_tilde.

namespace weylscha {

struct BulkLattice {
  int dim = 1;       // hypercubic, z = 2 dim
  int grid = 1024;   // Brillouin-zone points per axis; must be even
  double mu = 1.0;   // easy-axis exchange anisotropy (mu > 1)
  double h = 0.0;    // reduced field
  double S_tilde = 1.0;

  int z() const { return 2 * dim; }
};

struct BulkState {
  double theta = 1.0;    // hopping dressing
  double mu_eff = 1.0;   // anisotropy dressing
  double D = 0.0;        // on-site <q^2>
  double D_prime = 0.0;  // nearest-neighbor <q q>
  bool converged = false;
  int iterations = 0;
};

/// gamma_k = (1/z) sum_d cos(k . d); gamma_{k+pi} = -gamma_k.
inline double gamma_k(const std::vector<double>& k) {
  double acc = 0.0;
  for (double kx : k) acc += std::cos(kx);
  return acc / static_cast<double>(k.size());
}

namespace detail {

/// Flattened gamma_k over the d-dimensional mesh.  Midpoint sampling
/// (k = 2 pi (j + 1/2) / L) keeps the integrable square-root singularity of
/// the isotropic correlator sums off-grid; plain sampling (k = 2 pi j / L)
/// contains the k = 0 and k = pi points and is used for spectra.
inline std::vector<double> gamma_mesh(const BulkLattice& lat, bool midpoint) {
  const int L = lat.grid;
  const double shift = midpoint ? 0.5 : 0.0;
  std::vector<double> axis(L);
  for (int j = 0; j < L; ++j) axis[j] = std::cos(2.0 * M_PI * (j + shift) / L);
  std::size_t total = 1;
  for (int a = 0; a < lat.dim; ++a) total *= L;
  std::vector<double> out(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double acc = 0.0;
    for (int a = 0; a < lat.dim; ++a) {
      acc += axis[rem % L];
      rem /= L;
    }
    out[idx] = acc / lat.dim;
  }
  return out;
}

}  // namespace detail

struct BareSpectrum {
  std::vector<double> gamma;        // per grid point (plain mesh)
  std::vector<double> omega_plus;   // z sqrt(mu^2 - gamma^2) + h
  std::vector<double> omega_minus;  // z sqrt(mu^2 - gamma^2) - h
};

/// Harmonic spectrum; negative omega_minus values signal h > h_SF.
inline BareSpectrum bare_spectrum(const BulkLattice& lat) {
  BareSpectrum s;
  s.gamma = detail::gamma_mesh(lat, /*midpoint=*/false);
  s.omega_plus.reserve(s.gamma.size());
  s.omega_minus.reserve(s.gamma.size());
  for (double g : s.gamma) {
    const double base = lat.z() * std::sqrt(lat.mu * lat.mu - g * g);
    s.omega_plus.push_back(base + lat.h);
    s.omega_minus.push_back(base - lat.h);
  }
  return s;
}

/// On-site and nearest-neighbor coordinate correlators
///   D  = (1 / 2 S~ N) sum_k sqrt((mu~ + theta gamma_k) / (mu~ - theta gamma_k))
///   D' = same with an extra gamma_k factor.
/// Independent of h.  Throws DivergentCorrelator at a (near-)singular point.
inline std::pair<double, double> correlators_DDprime(double mu_eff, double theta,
                                                     const BulkLattice& lat) {
  if (lat.grid % 2 != 0) throw Error("correlators_DDprime: grid must be even");
  const auto gam = detail::gamma_mesh(lat, /*midpoint=*/true);
  double d = 0.0;
  double dp = 0.0;
  for (double g : gam) {
    const double den = mu_eff - theta * g;
    if (den <= kPdRatio * std::abs(mu_eff)) {
      throw DivergentCorrelator("correlators_DDprime: mu_eff - theta*gamma_k vanished");
    }
    const double ratio = std::sqrt((mu_eff + theta * g) / den);
    d += ratio;
    dp += g * ratio;
  }
  const double norm = 2.0 * lat.S_tilde * static_cast<double>(gam.size());
  return {d / norm, dp / norm};
}

/// D and D' evaluated through the explicit (k, k+pi) 2x2 blocks and the
/// generic normal-form machinery, at the lattice's field and any beta.
/// Sublattice-averaged; at T = 0 it reproduces correlators_DDprime and its
/// h-independence.
inline std::pair<double, double> correlators_via_blocks(double mu_eff, double theta,
                                                        const BulkLattice& lat,
                                                        double beta = kBetaInfinity) {
  const auto gam = detail::gamma_mesh(lat, /*midpoint=*/true);
  const double z = lat.z();
  const double hbar = 1.0 / lat.S_tilde;
  const double h_bar_field = lat.h / z;
  double d = 0.0;
  double dp = 0.0;
  std::size_t used = 0;
  for (double g : gam) {
    if (g < 0.0) continue;  // half zone; the block covers (k, k+pi)
    Matrix a2(2, 2), b2(2, 2);
    a2 << mu_eff + theta * g, -h_bar_field, -h_bar_field, mu_eff - theta * g;
    b2 << mu_eff - theta * g, -h_bar_field, -h_bar_field, mu_eff + theta * g;
    QuadraticHamiltonian block = QuadraticHamiltonian::standard(z * a2, z * b2, hbar);
    NormalModeBasis basis;
    try {
      basis = normal_form(block);
    } catch (const NotPositiveDefinite&) {
      throw DivergentCorrelator("correlators_via_blocks: block not positive definite");
    }
    const CorrelatorSet c = correlators(block, basis, beta);
    d += c.Cqq(0, 0) + c.Cqq(1, 1);
    dp += g * (c.Cqq(0, 0) - c.Cqq(1, 1));
    used += 2;
  }
  return {d / static_cast<double>(used), dp / static_cast<double>(used)};
}

/// Fixed point of (theta, mu~) -> (D, D') -> (theta, mu~) with
/// theta = 1 - D + mu D' and mu~ = mu (1 - D) + D' (Jacobi update, mixed).
/// Finite beta switches the correlator sums to the block route.
inline BulkState scha_bulk(const BulkLattice& lat, const SchaConfig& config = {},
                           double beta = kBetaInfinity) {
  auto sums = [&](double mu_eff, double theta) {
    return std::isinf(beta) ? correlators_DDprime(mu_eff, theta, lat)
                            : correlators_via_blocks(mu_eff, theta, lat, beta);
  };
  BulkState st;
  st.theta = 1.0;
  st.mu_eff = lat.mu;
  for (int it = 0; it < config.max_iter; ++it) {
    double d = 0.0;
    double dp = 0.0;
    try {
      std::tie(d, dp) = sums(st.mu_eff, st.theta);
    } catch (const DivergentCorrelator&) {
      throw GapClosed("scha_bulk: dressed spectrum gap closed at mu = " +
                          std::to_string(lat.mu) + ", S~ = " + std::to_string(lat.S_tilde),
                      st.mu_eff - st.theta);
    }
    const double theta_new = 1.0 - d + lat.mu * dp;
    const double mu_eff_new = lat.mu * (1.0 - d) + dp;
    const double residual =
        std::max(std::abs(theta_new - st.theta), std::abs(mu_eff_new - st.mu_eff));
    st.theta = (1.0 - config.mixing) * st.theta + config.mixing * theta_new;
    st.mu_eff = (1.0 - config.mixing) * st.mu_eff + config.mixing * mu_eff_new;
    st.D = d;
    st.D_prime = dp;
    st.iterations = it + 1;
    if (residual <= config.tol) {
      st.converged = true;
      std::tie(st.D, st.D_prime) = sums(st.mu_eff, st.theta);
      return st;
    }
  }
  throw NoConvergence("scha_bulk: no fixed point after " +
                      std::to_string(config.max_iter) + " iterations");
}

struct SpinFlopFields {
  double h_classical;    // z sqrt(mu^2 - 1)
  double h_scha;         // z sqrt(mu~^2 - theta^2)
  double h_first_order;  // h_classical (1 - D)
};

inline SpinFlopFields h_sf(const BulkState& st, const BulkLattice& lat) {
  const double z = lat.z();
  const double h_cl = z * std::sqrt(std::max(lat.mu * lat.mu - 1.0, 0.0));
  const double h_q =
      z * std::sqrt(std::max(st.mu_eff * st.mu_eff - st.theta * st.theta, 0.0));
  return {h_cl, h_q, h_cl * (1.0 - st.D)};
}

/// m = S~ (1 - D).  Throws once fluctuations destroy the order parameter
/// (D >= 1), the lattice-sum counterpart of the divergent isotropic 1d case.
inline double staggered_magnetization(const BulkState& st, double S_tilde) {
  if (st.D >= 1.0) {
    throw DivergentCorrelator(
        "staggered_magnetization: <q^2> fluctuations exceed the ordered moment");
  }
  return S_tilde * (1.0 - st.D);
}

// ---------------------------------------------------------------------------
// Finite-ring realization for the generic engine
// ---------------------------------------------------------------------------

/// One-dimensional ring of L sites at h = 0 with an antiperiodic seam, the
/// real-space counterpart of the midpoint Fourier mesh (the plain periodic
/// ring is singular at mu = 1).  Cross-validates scha_bulk through
/// scha_iterate: the dressed matrices must reproduce (theta, mu~).
class BulkRingModel : public RenormalizableModel {
 public:
  BulkRingModel(int sites, double mu, double S_tilde)
      : sites_(sites), mu_(mu), S_tilde_(S_tilde) {
    if (sites_ % 2 != 0) throw Error("BulkRingModel: even number of sites required");
  }

  /// +1 on interior bonds (i, i+1), -1 across the seam (L-1, 0).
  double bond_sign(int i) const { return i == sites_ - 1 ? -1.0 : 1.0; }

  QuadraticHamiltonian bare() const override {
    Matrix k = Matrix::Zero(sites_, sites_);
    for (int i = 0; i < sites_; ++i) {
      const int j = (i + 1) % sites_;
      k(i, j) = bond_sign(i);
      k(j, i) = bond_sign(i);
    }
    Matrix a2 = 2.0 * mu_ * Matrix::Identity(sites_, sites_) + k;
    Matrix b2 = 2.0 * mu_ * Matrix::Identity(sites_, sites_) - k;
    return QuadraticHamiltonian::standard(std::move(a2), std::move(b2), 1.0 / S_tilde_);
  }

  std::pair<Matrix, Matrix> delta_second_derivatives(const CorrelatorSet& c) const override {
    Matrix db2 = Matrix::Zero(sites_, sites_);
    Matrix da2 = Matrix::Zero(sites_, sites_);
    for (int i = 0; i < sites_; ++i) {
      double diag = 0.0;
      for (int dir : {-1, +1}) {
        const int j = (i + dir + sites_) % sites_;
        const double s = bond_sign(dir > 0 ? i : j);
        diag += s * c.Cqq(i, j) - mu_ * c.Cqq(j, j);
      }
      db2(i, i) = diag;
      da2(i, i) = diag;
    }
    for (int i = 0; i < sites_; ++i) {
      const int j = (i + 1) % sites_;
      const double s = bond_sign(i);
      const double off = s * 0.5 * (c.Cqq(i, i) + c.Cqq(j, j)) - mu_ * c.Cqq(i, j);
      db2(i, j) = off;
      db2(j, i) = off;
      da2(i, j) = -off;
      da2(j, i) = -off;
    }
    return {std::move(da2), std::move(db2)};
  }

  double energy_offset(const CorrelatorSet& c) const override {
    // <H^(4)>_0 per bond: 1/2 s (r_i + r_j)(q_i q_j - p_i p_j) - 4 mu r_i r_j.
    double acc = 0.0;
    for (int i = 0; i < sites_; ++i) {
      const int j = (i + 1) % sites_;
      const double s = bond_sign(i);
      acc += 0.5 * s * quartic_bond_exchange(c, i, j) - 4.0 * mu_ * r_pair(c, i, j);
    }
    return acc;
  }

  int sites() const { return sites_; }

 private:
  static double quartic_bond_exchange(const CorrelatorSet& c, int i, int j) {
    using V = std::pair<PhaseVar, int>;
    const V pi{PhaseVar::P, i}, pj{PhaseVar::P, j}, qi{PhaseVar::Q, i}, qj{PhaseVar::Q, j};
    double acc = 0.0;
    for (const V& r_site : {pi, qi, pj, qj}) {
      // (r_i + r_j) expanded as (p_i^2 + q_i^2 + p_j^2 + q_j^2) / 4
      acc += 0.25 * (wick_average_quartic(c, {r_site, r_site, qi, qj}) -
                     wick_average_quartic(c, {r_site, r_site, pi, pj}));
    }
    return acc;
  }

  static double r_pair(const CorrelatorSet& c, int i, int j) {
    using V = std::pair<PhaseVar, int>;
    const V pi{PhaseVar::P, i}, pj{PhaseVar::P, j}, qi{PhaseVar::Q, i}, qj{PhaseVar::Q, j};
    double acc = 0.0;
    for (const V& u : {pi, qi}) {
      for (const V& v : {pj, qj}) {
        acc += wick_average_quartic(c, {u, u, v, v});
      }
    }
    return acc / 16.0;
  }

  int sites_;
  double mu_;
  double S_tilde_;
};

}  // namespace weylscha

#endif
