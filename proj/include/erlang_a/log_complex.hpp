#ifndef ERLANG_A_LOG_COMPLEX_HPP
#define ERLANG_A_LOG_COMPLEX_HPP

/**
 * @file log_complex.hpp
 * @brief Overflow-safe complex scalars and the complex gamma function.
 *
 * Transient-queue transforms multiply factors like rho^(n+theta), e^(rho/eta)
 * and ratios of gamma functions that individually overflow double precision
 * long before their product does.  LogComplex keeps a complex mantissa and a
 * separately tracked base-e exponent so such products stay representable.
 */

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace erlang_a {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when an adaptive numerical routine cannot reach its target
/// accuracy; carries the best value found and the residual estimate.
class accuracy_error : public std::runtime_error {
 public:
  accuracy_error(const std::string& what, cplx best, double residual)
      : std::runtime_error(what), best_value(best), residual_estimate(residual) {}
  cplx best_value;
  double residual_estimate;
};

/// Thrown when the gamma function is evaluated at a nonpositive integer.
class pole_error : public std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown when a queue has no steady state (eta = 0 with rho >= m).
class unstable_error : public std::domain_error {
  using std::domain_error::domain_error;
};

/**
 * Complex value stored as mantissa * exp(log_scale).
 *
 * The mantissa is renormalized to unit magnitude so that products and
 * quotients never overflow; the represented dynamic range is that of the
 * double exponent field of log_scale (~1e308 in the log).
 */
struct LogComplex {
  cplx mant{0.0, 0.0};
  double log_scale{0.0};

  LogComplex() = default;
  LogComplex(cplx m, double s) : mant(m), log_scale(s) { normalize(); }

  static LogComplex zero() { return LogComplex(); }
  static LogComplex one() { return LogComplex(cplx(1.0, 0.0), 0.0); }

  static LogComplex from(cplx v) { return LogComplex(v, 0.0); }
  static LogComplex from(double v) { return LogComplex(cplx(v, 0.0), 0.0); }

  /// Builds exp(w) for complex w without overflow.
  static LogComplex from_log(cplx w) {
    return LogComplex(std::polar(1.0, w.imag()), w.real());
  }

  bool is_zero() const { return mant == cplx(0.0, 0.0); }

  void normalize() {
    double a = std::abs(mant);
    if (a == 0.0 || !std::isfinite(a)) return;
    if (a < 1e-2 || a > 1e2) {
      mant /= a;
      log_scale += std::log(a);
    }
  }

  /// log of the represented value; log of zero is -inf.
  cplx log() const {
    if (is_zero()) return cplx(-std::numeric_limits<double>::infinity(), 0.0);
    return cplx(log_scale + std::log(std::abs(mant)), std::arg(mant));
  }

  /// log|value|
  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return log_scale + std::log(std::abs(mant));
  }

  cplx to_complex() const {
    if (is_zero()) return cplx(0.0, 0.0);
    return mant * std::exp(log_scale);
  }

  LogComplex operator-() const { return LogComplex(-mant, log_scale); }

  LogComplex& operator*=(const LogComplex& o) {
    mant *= o.mant;
    log_scale += o.log_scale;
    normalize();
    return *this;
  }
  LogComplex& operator*=(cplx c) {
    mant *= c;
    normalize();
    return *this;
  }
  LogComplex& operator*=(double c) {
    mant *= c;
    normalize();
    return *this;
  }
  LogComplex& operator/=(const LogComplex& o) {
    mant /= o.mant;
    log_scale -= o.log_scale;
    normalize();
    return *this;
  }
  LogComplex& operator/=(cplx c) {
    mant /= c;
    normalize();
    return *this;
  }
  LogComplex& operator/=(double c) {
    mant /= c;
    normalize();
    return *this;
  }

  LogComplex& operator+=(const LogComplex& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      *this = o;
      return *this;
    }
    double d = o.log_scale - log_scale;
    if (d > 0.0) {
      // other dominates the scale; rebase on it
      mant = o.mant + mant * std::exp(-d);
      log_scale = o.log_scale;
    } else if (d > -745.0) {
      mant += o.mant * std::exp(d);
    }  // else: other is negligible
    normalize();
    return *this;
  }
  LogComplex& operator-=(const LogComplex& o) { return *this += (-o); }
};

inline LogComplex operator*(LogComplex a, const LogComplex& b) { return a *= b; }
inline LogComplex operator*(LogComplex a, cplx b) { return a *= b; }
inline LogComplex operator*(LogComplex a, double b) { return a *= b; }
inline LogComplex operator*(double b, LogComplex a) { return a *= b; }
inline LogComplex operator/(LogComplex a, const LogComplex& b) { return a /= b; }
inline LogComplex operator/(LogComplex a, cplx b) { return a /= b; }
inline LogComplex operator/(LogComplex a, double b) { return a /= b; }
inline LogComplex operator+(LogComplex a, const LogComplex& b) { return a += b; }
inline LogComplex operator-(LogComplex a, const LogComplex& b) { return a -= b; }

/// |a - b| / max(|a|, |b|), computed in log space so huge/tiny scales work.
inline double rel_diff(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  LogComplex d = a - b;
  double ref = std::max(a.log_abs(), b.log_abs());
  if (d.is_zero()) return 0.0;
  return std::exp(d.log_abs() - ref);
}

inline double rel_diff(cplx a, cplx b) {
  double ref = std::max(std::abs(a), std::abs(b));
  if (ref == 0.0) return 0.0;
  return std::abs(a - b) / ref;
}

namespace detail {

// Lanczos g = 7, n = 9 coefficient set (relative accuracy ~1e-14 on the
// right half-plane).
inline constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// log(sin(pi z)) valid for large |Im z| (up to a multiple of 2*pi*i, which
// is irrelevant once exponentiated).
inline cplx log_sin_pi(cplx z) {
  const cplx i(0.0, 1.0);
  cplx w = kPi * z;
  if (w.imag() > 0.0) {
    return -i * w + std::log((std::exp(2.0 * i * w) - 1.0) / (2.0 * i));
  }
  return i * w + std::log((1.0 - std::exp(-2.0 * i * w)) * 0.5 / i);
}

}  // namespace detail

/**
 * Principal-style log-gamma for complex arguments.
 *
 * exp(lgamma_c(z)) == Gamma(z) exactly (any 2*pi*i ambiguity drops out on
 * exponentiation).  Real positive arguments route through std::lgamma.
 */
inline cplx lgamma_c(cplx z) {
  if (z.imag() == 0.0 && z.real() > 0.0) {
    return cplx(std::lgamma(z.real()), 0.0);
  }
  if (z.real() < 0.5) {
    // reflection through Gamma(z)Gamma(1-z) = pi / sin(pi z)
    if (z.imag() == 0.0 && z.real() == std::floor(z.real())) {
      throw pole_error("lgamma_c: pole at nonpositive integer");
    }
    return std::log(cplx(kPi, 0.0)) - detail::log_sin_pi(z) - lgamma_c(1.0 - z);
  }
  cplx x(detail::kLanczos[0], 0.0);
  for (int k = 1; k < 9; ++k) x += detail::kLanczos[k] / (z - 1.0 + static_cast<double>(k));
  cplx t = z + 6.5;  // g + 0.5
  return 0.91893853320467274178 /* log sqrt(2 pi) */
         + (z - 0.5) * std::log(t) - t + std::log(x);
}

/// Gamma(z) as an overflow-safe scalar; throws pole_error at 0, -1, -2, ...
inline LogComplex gamma_lc(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw pole_error("gamma: pole at nonpositive integer");
  }
  return LogComplex::from_log(lgamma_c(z));
}

/// Real log-gamma, defined for x > 0.
inline double lgamma_r(double x) { return std::lgamma(x); }

/// x^y = exp(y log x) for x > 0, overflow-safe.
inline LogComplex pow_lc(double x, cplx y) {
  return LogComplex::from_log(y * std::log(x));
}

}  // namespace erlang_a

#endif  // ERLANG_A_LOG_COMPLEX_HPP
