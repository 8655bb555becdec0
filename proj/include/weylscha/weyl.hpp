#ifndef WEYLSCHA_WEYL_HPP
#define WEYLSCHA_WEYL_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <utility>

#include "weylscha/errors.hpp"
#include "weylscha/types.hpp"

namespace weylscha {

enum class Ordering { Normal, Weyl };

/// Finite polynomial sum c_{mn} (a*)^m a^n with an ordering tag.
/// Canonical form: no stored zero coefficients.
class HolomorphicPolynomial {
 public:
  using Key = std::pair<int, int>;  // (m, n) = (a* power, a power)
  using Terms = std::map<Key, Complex>;

  explicit HolomorphicPolynomial(Ordering tag = Ordering::Normal) : tag_(tag) {}

  HolomorphicPolynomial(std::initializer_list<std::pair<Key, Complex>> init,
                        Ordering tag = Ordering::Normal)
      : tag_(tag) {
    for (const auto& [key, coeff] : init) add(key.first, key.second, coeff);
  }

  Ordering ordering() const { return tag_; }
  void set_ordering(Ordering tag) { tag_ = tag; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(int m, int n, Complex coeff) {
    auto it = terms_.find({m, n});
    if (it == terms_.end()) {
      if (coeff != 0.0) terms_.emplace(Key{m, n}, coeff);
      return;
    }
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }

  Complex coeff(int m, int n) const {
    auto it = terms_.find({m, n});
    return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
  }

  int total_degree() const {
    int deg = 0;
    for (const auto& [key, c] : terms_) deg = std::max(deg, key.first + key.second);
    return deg;
  }

  Complex evaluate(Complex a_star, Complex a) const {
    Complex out{0.0, 0.0};
    for (const auto& [key, c] : terms_) {
      out += c * std::pow(a_star, key.first) * std::pow(a, key.second);
    }
    return out;
  }

  bool is_hermitian(double tol = 1e-12) const {
    for (const auto& [key, c] : terms_) {
      if (std::abs(c - std::conj(coeff(key.second, key.first))) > tol) return false;
    }
    return true;
  }

  bool almost_equal(const HolomorphicPolynomial& other, double tol) const {
    for (const auto& [key, c] : terms_) {
      if (std::abs(c - other.coeff(key.first, key.second)) > tol) return false;
    }
    for (const auto& [key, c] : other.terms_) {
      if (std::abs(c - coeff(key.first, key.second)) > tol) return false;
    }
    return true;
  }

 private:
  Terms terms_;
  Ordering tag_;
};

namespace detail {

inline double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= static_cast<double>(n - i) / (i + 1);
  return out;
}

inline double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// exp(s * d_{a*} d_a) applied term by term; terminates for polynomials.
inline HolomorphicPolynomial apply_exp_dd(const HolomorphicPolynomial& p, double s,
                                          Ordering out_tag) {
  HolomorphicPolynomial out(out_tag);
  for (const auto& [key, c] : p.terms()) {
    const auto [m, n] = key;
    double factor = 1.0;
    for (int j = 0; j <= std::min(m, n); ++j) {
      if (j > 0) factor *= s * (m - j + 1) * (n - j + 1) / j;
      out.add(m - j, n - j, c * factor);
    }
  }
  return out;
}

}  // namespace detail

/// O = exp(-1/2 d_{a*} d_a) O_N.
inline HolomorphicPolynomial normal_to_weyl(const HolomorphicPolynomial& p) {
  return detail::apply_exp_dd(p, -0.5, Ordering::Weyl);
}

/// Inverse of normal_to_weyl (exponent +1/2).
inline HolomorphicPolynomial weyl_to_normal(const HolomorphicPolynomial& p) {
  return detail::apply_exp_dd(p, +0.5, Ordering::Normal);
}

/// O(a*, a) = << O_N(a* + xi*, a - xi) >>_1 by binomial expansion and the
/// Gaussian moments <xi* xi> = 1/2, <xi^2> = <xi*^2> = 0.  Independent route
/// that must agree with normal_to_weyl.
inline HolomorphicPolynomial gaussian_smoothing_weyl(const HolomorphicPolynomial& p) {
  HolomorphicPolynomial out(Ordering::Weyl);
  for (const auto& [key, c] : p.terms()) {
    const auto [m, n] = key;
    for (int i = 0; i <= std::min(m, n); ++i) {
      // <(xi*)^i (-xi)^i>_1 = (-1)^i i! (1/2)^i; mixed powers vanish.
      const double moment =
          ((i % 2 == 0) ? 1.0 : -1.0) * detail::factorial(i) * std::pow(0.5, i);
      out.add(m - i, n - i, c * detail::binomial(m, i) * detail::binomial(n, i) * moment);
    }
  }
  return out;
}

/// Weyl symbol of exp(-beta H) for H = omega(a^dag a + 1/2):
/// rho(p, q) = exp(-(p^2+q^2) tanh f) / cosh f with f = beta omega / 2.
struct ThermalHOWeyl {
  double f;
  double prefactor;       // 1 / cosh f
  double exponent_coeff;  // tanh f

  double evaluate(double p, double q) const {
    return prefactor * std::exp(-(p * p + q * q) * exponent_coeff);
  }
  /// Z = integral dp dq / (2 pi) of the symbol = 1 / (2 sinh f).
  double partition_function() const { return 1.0 / (2.0 * std::sinh(f)); }
};

inline ThermalHOWeyl thermal_ho_weyl(double beta, double omega) {
  const double f = beta * omega / 2.0;
  return {f, 1.0 / std::cosh(f), std::tanh(f)};
}

/// Smooth-approximation Weyl symbol of f(a^dag a) a^m, evaluated at a point:
/// F_m ~= f(a* a - (1+m)/2) a^m.
inline Complex fn_times_a_weyl(const std::function<Complex(double)>& f, int m,
                               Complex a_star, Complex a) {
  const double n_eff = (a_star * a).real() - 0.5 * (1 + m);
  return f(n_eff) * std::pow(a, m);
}

}  // namespace weylscha

#endif
