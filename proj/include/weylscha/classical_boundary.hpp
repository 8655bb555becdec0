#ifndef WEYLSCHA_CLASSICAL_BOUNDARY_HPP
#define WEYLSCHA_CLASSICAL_BOUNDARY_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "weylscha/errors.hpp"
#include "weylscha/types.hpp"

// Analytic classical phase diagram of the odd-N open chain: the determinant
// of A2 = mu M + h H + K in closed form through Chebyshev polynomials, the
// critical size N_c(h, mu), and root-finding for the stability window h+-.

namespace weylscha {

struct BoundaryParams {
  double a, b, c;  // a = mu + h, b = 2 mu - h, c = 2 mu + h
  double x;        // (b c - 2) / 2, Chebyshev argument
  double z2;       // 4 / (b c) - 1
  double r;        // 1 + 2 h / ((2 mu - h)(1 - mu^2)); infinite at mu = 1

  static BoundaryParams from(double mu, double h) {
    BoundaryParams p{};
    p.a = mu + h;
    p.b = 2.0 * mu - h;
    p.c = 2.0 * mu + h;
    const double bc = p.b * p.c;
    p.x = (bc - 2.0) / 2.0;
    p.z2 = 4.0 / bc - 1.0;
    p.r = (mu == 1.0) ? std::numeric_limits<double>::infinity()
                      : 1.0 + 2.0 * h / (p.b * (1.0 - mu * mu));
    return p;
  }
};

/// Determinant of the N x N tridiagonal with unit off-diagonals and diagonal
/// (a, b, c, b, ..., b, a) by the three-term recurrence, rescaled against
/// overflow at large N.
inline double determinant_direct(int n, double mu, double h) {
  if (n < 1 || n % 2 == 0) throw Error("determinant_direct: N must be odd and positive");
  const auto p = BoundaryParams::from(mu, h);
  auto diag = [&](int i) {  // 1-based
    if (i == 1 || i == n) return p.a;
    return (i % 2 == 0) ? p.b : p.c;
  };
  double dprev = 1.0;  // D_0
  double d = diag(1);  // D_1
  int rescale = 0;
  for (int i = 2; i <= n; ++i) {
    const double next = diag(i) * d - dprev;
    dprev = d;
    d = next;
    while (std::abs(d) > 1e150) {
      d = std::ldexp(d, -64);
      dprev = std::ldexp(dprev, -64);
      rescale += 64;
    }
  }
  return std::ldexp(d, rescale);
}

namespace detail {

// X_M from the recursion X_{M+1} + X_{M-1} = 2x X_M, X_0 = 1, X_1 = 2x + 1:
// sin((M + 1/2) k) / sin(k/2) for x = cos k, continued hyperbolically for
// |x| > 1.
inline double chebyshev_x(int m, double x) {
  if (std::abs(x) <= 1.0) {
    const double k = std::acos(x);
    if (k < 1e-12) return 2.0 * m + 1.0;
    if (M_PI - k < 1e-12) return (m % 2 == 0) ? 1.0 : -1.0;
    return std::sin((m + 0.5) * k) / std::sin(k / 2.0);
  }
  if (x > 1.0) {
    const double kappa = std::acosh(x);
    return std::sinh((m + 0.5) * kappa) / std::sinh(kappa / 2.0);
  }
  const double kappa = std::acosh(-x);
  const double val = std::cosh((m + 0.5) * kappa) / std::cosh(kappa / 2.0);
  return (m % 2 == 0) ? val : -val;
}

}  // namespace detail

/// Closed-form evaluation of the same determinant via
/// bc D_{2M+1} = a^2 b (X_M + X_{M-1}) - 2 a b c X_{M-1} + c (X_{M-1} + X_{M-2}).
inline double determinant_closed(int n, double mu, double h) {
  if (n < 1 || n % 2 == 0) throw Error("determinant_closed: N must be odd and positive");
  const auto p = BoundaryParams::from(mu, h);
  if (n == 1) return p.a;
  const int m = (n - 1) / 2;
  const double xm = detail::chebyshev_x(m, p.x);
  const double xm1 = detail::chebyshev_x(m - 1, p.x);
  const double xm2 = detail::chebyshev_x(m - 2, p.x);  // X_{-1} = -1 in every branch
  const double bc = p.b * p.c;
  return (p.a * p.a * p.b * (xm + xm1) - 2.0 * p.a * bc * xm1 + p.c * (xm1 + xm2)) / bc;
}

/// Real-valued critical chain size: the determinant D_N(h, mu) vanishes when
/// N equals an odd integer N_c = atan(r z) / atan(z) (principal zero; the
/// arctangent is lifted into (0, pi) when r z < 0).  Returns infinity when
/// z^2 <= 0, i.e. for mu >= 1 at small field where the AP phase survives at
/// every size.
inline double n_critical(double h, double mu) {
  const auto p = BoundaryParams::from(mu, h);
  if (p.b * p.c <= 0.0) throw Error("n_critical: requires h < 2 mu");
  if (p.z2 <= 0.0) return std::numeric_limits<double>::infinity();
  const double z = std::sqrt(p.z2);
  double numerator;
  if (std::isinf(p.r)) {
    numerator = M_PI / 2.0;  // mu -> 1 limit of atan(r z)
  } else {
    numerator = std::atan(p.r * z);
    if (p.r * z < 0.0) numerator += M_PI;
  }
  return numerator / std::atan(z);
}

struct StabilityWindow {
  double h_minus;
  double h_plus;
};

namespace detail {

// Count of negative eigenvalues of the tridiagonal A2(h) from the sign
// changes of its leading principal minors (Sturm sequence).
inline bool positive_definite_sturm(int n, double mu, double h) {
  const auto p = BoundaryParams::from(mu, h);
  auto diag = [&](int i) {
    if (i == 1 || i == n) return p.a;
    return (i % 2 == 0) ? p.b : p.c;
  };
  double dprev = 1.0;
  double d = diag(1);
  if (d <= 0.0) return false;
  for (int i = 2; i <= n; ++i) {
    double next = diag(i) * d - dprev;
    if (next <= 0.0) return false;
    dprev = d;
    d = next;
    while (std::abs(d) > 1e150) {
      d = std::ldexp(d, -64);
      dprev = std::ldexp(dprev, -64);
    }
  }
  return true;
}

}  // namespace detail

/// Innermost stability window of the AP phase: brackets the sign structure of
/// the determinant over h in (0, 2 mu) with a 256-point scan and refines the
/// positive-definite interval edges by bisection to 1e-12.
inline StabilityWindow solve_h_pm(int n, double mu) {
  if (n < 3 || n % 2 == 0) throw Error("solve_h_pm: N must be odd and >= 3");
  const int scan = 256;
  const double h_lo = 0.0;
  const double h_hi = 2.0 * mu;
  std::vector<int> stable;
  std::vector<double> hs(scan);
  for (int i = 0; i < scan; ++i) {
    hs[i] = h_lo + (h_hi - h_lo) * (i + 0.5) / scan;
    if (detail::positive_definite_sturm(n, mu, hs[i])) stable.push_back(i);
  }
  if (stable.empty()) {
    throw NoStableWindow("solve_h_pm: no positive-definite field interval for N = " +
                         std::to_string(n) + ", mu = " + std::to_string(mu));
  }
  // Innermost contiguous block around the first stable sample.
  int lo = stable.front();
  int hi = lo;
  while (hi + 1 < scan && detail::positive_definite_sturm(n, mu, hs[hi + 1])) ++hi;

  double h_minus = 0.0;
  if (lo == 0 && detail::positive_definite_sturm(n, mu, 1e-15)) {
    h_minus = 0.0;  // window extends to h -> 0 (mu >= 1 behavior)
  } else {
    double a = (lo == 0) ? h_lo : hs[lo - 1];
    double b = hs[lo];
    while (b - a > 1e-12) {
      const double mid = 0.5 * (a + b);
      (detail::positive_definite_sturm(n, mu, mid) ? b : a) = mid;
    }
    h_minus = 0.5 * (a + b);
  }
  double a = hs[hi];
  double b = (hi == scan - 1) ? h_hi : hs[hi + 1];
  while (b - a > 1e-12) {
    const double mid = 0.5 * (a + b);
    (detail::positive_definite_sturm(n, mu, mid) ? a : b) = mid;
  }
  const double h_plus = 0.5 * (a + b);
  if (!(h_minus < h_plus)) {
    throw NoStableWindow("solve_h_pm: degenerate stability window");
  }
  return {h_minus, h_plus};
}

}  // namespace weylscha

#endif
