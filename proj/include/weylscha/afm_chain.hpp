#ifndef WEYLSCHA_AFM_CHAIN_HPP
#define WEYLSCHA_AFM_CHAIN_HPP

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "weylscha/errors.hpp"
#include "weylscha/quadratic.hpp"
#include "weylscha/scha.hpp"
#include "weylscha/types.hpp"

// Open antiferromagnetic chain with an odd number of spins.  The staggered
// structure matrix H makes B2 = H A2 H, so A B2 A = (A H A)^2 and one signed
// eigenproblem per field suffices; eigenvalues are linear in h and the
// zero-T correlators are field-independent.

namespace weylscha {

struct ChainModel {
  int N = 3;  // odd
  double mu = 1.0;
  double h = 0.0;
  double S_tilde = 1.0;
};

/// Structure matrices M (site multiplicity), H (sublattice signs), K (bonds),
/// plus the h-independent bases of A2(h) = baseA + h H and B2(h) = baseB + h H.
/// SCHA dressing modifies baseA/baseB (site diagonal and bond off-diagonal)
/// but never the field term.
struct ChainMatrices {
  Matrix M, H, K;
  Matrix baseA, baseB;
  double mu = 1.0;

  int size() const { return static_cast<int>(H.rows()); }
  Matrix A2(double h) const { return baseA + h * H; }
  Matrix B2(double h) const { return baseB + h * H; }
};

inline ChainMatrices build_matrices(const ChainModel& model) {
  const int n = model.N;
  if (n < 3 || n % 2 == 0) throw Error("build_matrices: N must be odd and >= 3");
  ChainMatrices m;
  m.mu = model.mu;
  m.M = Matrix::Zero(n, n);
  m.H = Matrix::Zero(n, n);
  m.K = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m.M(i, i) = (i == 0 || i == n - 1) ? 1.0 : 2.0;
    m.H(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
    if (i + 1 < n) {
      m.K(i, i + 1) = 1.0;
      m.K(i + 1, i) = 1.0;
    }
  }
  m.baseA = model.mu * m.M + m.K;
  m.baseB = model.mu * m.M - m.K;
  return m;
}

/// Signed spectrum of A H A at the evaluation field, with the h-independent
/// eigenvector data R (R E R^t = H, R^t H R = E).
struct ChainSpectrum {
  Vector omega_tilde_0;  // signed eigenvalues shifted to h = 0, ascending
  Vector epsilon;        // signs at the evaluation field
  Matrix R;
  double h_eval = 0.0;

  Vector omega_tilde(double h) const { return omega_tilde_0.array() + h; }
};

inline ChainSpectrum spectrum_AHA(const ChainMatrices& mats, double h) {
  const Matrix a2 = mats.A2(h);
  auto [a, a_inv] = psd_sqrt(a2);  // throws NotPositiveDefinite outside the window
  const Matrix t = a * mats.H * a;
  auto eig = detail::eigh(t);

  ChainSpectrum spec;
  spec.h_eval = h;
  spec.omega_tilde_0 = eig.values.array() - h;
  spec.epsilon = eig.values.array().sign();
  const Vector omega_abs = eig.values.cwiseAbs();
  // R = G Omega^{-1/2} with G = A O^t.
  spec.R = a * eig.vectors * omega_abs.cwiseSqrt().cwiseInverse().asDiagonal();
  return spec;
}

/// Zero-T correlators 2 S~ <q q^t> = R R^t, <p p^t> = H <q q^t> H; independent
/// of the field by construction.
inline CorrelatorSet correlators_chain(const ChainSpectrum& spec, const ChainMatrices& mats,
                                       double S_tilde) {
  CorrelatorSet c;
  c.beta = kBetaInfinity;
  c.Cqq = spec.R * spec.R.transpose() / (2.0 * S_tilde);
  c.Cpp = mats.H * c.Cqq * mats.H;
  c.Cpq = Matrix::Zero(mats.size(), mats.size());
  c.alpha = Vector::Constant(mats.size(), 1.0 / (2.0 * S_tilde));
  return c;
}

/// M^z = S~ [1 - Tr(H <q q^t>)] = S~ - 1/2, quantized through Tr E = 1.
inline double magnetization(const ChainSpectrum& spec, const ChainMatrices& mats,
                            double S_tilde) {
  const Matrix cqq = spec.R * spec.R.transpose() / (2.0 * S_tilde);
  return S_tilde * (1.0 - (mats.H * cqq).trace());
}

struct ChainWindow {
  double h_minus;
  double h_plus;
  double h_ref;  // midpoint reference field used to build A
};

namespace detail {

inline bool chain_pd(const ChainMatrices& mats, double h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mats.A2(h));
  return es.eigenvalues().minCoeff() > kPdRatio * es.eigenvalues().maxCoeff();
}

/// Coarse 64-point scan of (0, 2 mu) for positive definiteness, bisection
/// refinement of the bracket edges, midpoint as reference field.
inline ChainWindow find_reference_field(const ChainMatrices& mats) {
  const double h_hi = 2.0 * mats.mu;
  const int scan = 64;
  int first = -1, last = -1;
  std::vector<double> hs(scan);
  for (int i = 0; i < scan; ++i) {
    hs[i] = h_hi * (i + 0.5) / scan;
    if (chain_pd(mats, hs[i])) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) {
    throw NoStableWindow("afm_chain: no positive-definite field interval");
  }
  double lo_a = (first == 0) ? 0.0 : hs[first - 1];
  double lo_b = hs[first];
  while (lo_b - lo_a > 1e-12) {
    const double mid = 0.5 * (lo_a + lo_b);
    (chain_pd(mats, mid) ? lo_b : lo_a) = mid;
  }
  double hi_a = hs[last];
  double hi_b = (last == scan - 1) ? h_hi : hs[last + 1];
  while (hi_b - hi_a > 1e-12) {
    const double mid = 0.5 * (hi_a + hi_b);
    (chain_pd(mats, mid) ? hi_a : hi_b) = mid;
  }
  ChainWindow w;
  w.h_minus = 0.5 * (lo_a + lo_b);
  w.h_plus = 0.5 * (hi_a + hi_b);
  w.h_ref = 0.5 * (w.h_minus + w.h_plus);
  return w;
}

/// Window edges from the signed spectrum at its evaluation field: the first
/// mode crossings above and below h_eval; h_minus clamps at zero for mu >= 1.
inline ChainWindow window_from_spectrum(const ChainSpectrum& spec, double mu) {
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < spec.omega_tilde_0.size(); ++k) {
    const double crossing = -spec.omega_tilde_0[k];
    if (spec.epsilon[k] < 0.0) {
      upper = std::min(upper, crossing);  // largest negative eigenvalue
    } else {
      lower = std::max(lower, crossing);  // smallest positive eigenvalue
    }
  }
  ChainWindow w;
  w.h_plus = upper;
  w.h_minus = (mu >= 1.0) ? std::max(lower, 0.0) : lower;
  w.h_minus = std::max(w.h_minus, 0.0);
  w.h_ref = spec.h_eval;
  if (!(w.h_minus < w.h_plus)) {
    throw NoStableWindow("afm_chain: empty stability window");
  }
  return w;
}

}  // namespace detail

/// Harmonic-approximation critical fields (h_minus, h_plus) of the AP phase.
inline ChainWindow critical_fields_HA(const ChainMatrices& mats) {
  const ChainWindow coarse = detail::find_reference_field(mats);
  const ChainSpectrum spec = spectrum_AHA(mats, coarse.h_ref);
  ChainWindow w = detail::window_from_spectrum(spec, mats.mu);
  w.h_ref = coarse.h_ref;
  return w;
}

/// Wick-averaged second derivatives of the quartic interaction, tridiagonal
/// with the momentum block equal on the diagonal and opposite on the second
/// diagonals.  Boundary sites simply miss their absent neighbor's terms.
inline std::pair<Matrix, Matrix> scha_second_derivatives(const CorrelatorSet& c, double mu) {
  const int n = static_cast<int>(c.Cqq.rows());
  Vector site(n);
  Vector bond(n - 1);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    if (i + 1 < n) acc += c.Cqq(i, i + 1) - mu * c.Cqq(i + 1, i + 1);
    if (i - 1 >= 0) acc += c.Cqq(i, i - 1) - mu * c.Cqq(i - 1, i - 1);
    site[i] = acc;
  }
  for (int i = 0; i + 1 < n; ++i) {
    bond[i] = 0.5 * c.Cqq(i, i) + 0.5 * c.Cqq(i + 1, i + 1) - mu * c.Cqq(i, i + 1);
  }
  Matrix db2 = Matrix::Zero(n, n);
  Matrix da2 = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    db2(i, i) = site[i];
    da2(i, i) = site[i];
  }
  for (int i = 0; i + 1 < n; ++i) {
    db2(i, i + 1) = bond[i];
    db2(i + 1, i) = bond[i];
    da2(i, i + 1) = -bond[i];
    da2(i + 1, i) = -bond[i];
  }
  return {std::move(da2), std::move(db2)};
}

/// RenormalizableModel for the chain at a fixed reference field.
class ChainSchaModel : public RenormalizableModel {
 public:
  ChainSchaModel(const ChainModel& model, double h_ref)
      : model_(model), mats_(build_matrices(model)), h_ref_(h_ref) {}

  QuadraticHamiltonian bare() const override {
    QuadraticHamiltonian h = QuadraticHamiltonian::standard(
        mats_.A2(h_ref_), mats_.B2(h_ref_), 1.0 / model_.S_tilde);
    h.w = -(model_.N - 1) * model_.mu - model_.h;
    return h;
  }

  std::pair<Matrix, Matrix> delta_second_derivatives(const CorrelatorSet& c) const override {
    return scha_second_derivatives(c, model_.mu);
  }

  double energy_offset(const CorrelatorSet& c) const override {
    // <H^(4)>_0 per bond: 1/2 (r_i + r_j)(q_i q_j - p_i p_j) - 4 mu r_i r_j.
    using V = std::pair<PhaseVar, int>;
    double acc = 0.0;
    for (int i = 0; i + 1 < model_.N; ++i) {
      const V pi{PhaseVar::P, i}, pj{PhaseVar::P, i + 1};
      const V qi{PhaseVar::Q, i}, qj{PhaseVar::Q, i + 1};
      for (const V& r_site : {pi, qi, pj, qj}) {
        acc += 0.125 * (wick_average_quartic(c, {r_site, r_site, qi, qj}) -
                        wick_average_quartic(c, {r_site, r_site, pi, pj}));
      }
      for (const V& u : {pi, qi}) {
        for (const V& v : {pj, qj}) {
          acc -= 4.0 * model_.mu / 16.0 * wick_average_quartic(c, {u, u, v, v});
        }
      }
    }
    return acc;
  }

  const ChainMatrices& matrices() const { return mats_; }
  double h_ref() const { return h_ref_; }

 private:
  ChainModel model_;
  ChainMatrices mats_;
  double h_ref_;
};

struct ChainSchaResult {
  ChainWindow ha;      // harmonic window and reference field
  double h_minus_q;    // SCHA-renormalized lower critical field
  double h_plus_q;     // SCHA-renormalized upper critical field
  SchaState state;
  ChainMatrices dressed;  // baseA/baseB include the converged dressing
};

/// Solve the SCHA at the window midpoint (the dressing is field-independent,
/// so one solve per (N, mu, S) suffices) and read the renormalized critical
/// fields from the dressed signed spectrum.
inline ChainSchaResult scha_chain(const ChainModel& model, const SchaConfig& config = {}) {
  ChainSchaResult out;
  const ChainMatrices bare = build_matrices(model);
  out.ha = critical_fields_HA(bare);

  ChainSchaModel renorm(model, out.ha.h_ref);
  out.state = scha_iterate(renorm, kBetaInfinity, config);

  out.dressed = bare;
  out.dressed.baseA = out.state.effective.A2 - out.ha.h_ref * bare.H;
  out.dressed.baseB = out.state.effective.B2 - out.ha.h_ref * bare.H;
  const ChainSpectrum dressed_spec = spectrum_AHA(out.dressed, out.ha.h_ref);
  const ChainWindow q = detail::window_from_spectrum(dressed_spec, model.mu);
  out.h_minus_q = q.h_minus;
  out.h_plus_q = q.h_plus;
  return out;
}

}  // namespace weylscha

#endif
