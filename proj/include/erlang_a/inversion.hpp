#ifndef ERLANG_A_INVERSION_HPP
#define ERLANG_A_INVERSION_HPP

/**
 * @file inversion.hpp
 * @brief Numerical Laplace inversion on the right half-plane.
 *
 * Two methods, both of which only ever evaluate the transform at Re theta > 0
 * (the transforms here have gamma-function poles and branch cuts in the left
 * half-plane, so left-wrapping contours are off the table):
 *
 *  - euler: Bromwich discretization on the line Re theta = A/(2t) with Euler
 *    (binomial) summation of the alternating tail.  Workhorse.
 *  - gaver: Gaver-Stehfest, real nodes only.  Cross-check; every branch
 *    choice is trivially unambiguous on the real axis.
 */

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "erlang_a/log_complex.hpp"

namespace erlang_a {

/// A Laplace transform ready for numerical work: an evaluator on the right
/// half-plane plus bookkeeping about where it is valid and what built it.
struct TransformHandle {
  std::function<cplx(cplx)> eval;
  double min_abscissa = 0.0;  ///< evaluator valid for Re theta > min_abscissa
  std::string provenance;

  cplx operator()(cplx theta) const { return eval(theta); }
};

struct InversionConfig {
  enum class Method { euler, gaver };
  Method method = Method::euler;

  /// Bromwich line parameter; discretization error ~ e^{-A}.  The default
  /// balances that against the e^{A/2} roundoff amplification in doubles
  /// (the prefactor multiplies the absolute noise of every transform
  /// evaluation, so pushing A higher trades exactness for noise).
  double A = 25.3284;
  int euler_smoothing = 12;  ///< binomial averaging order M
  int euler_terms = 40;      ///< plain terms N before smoothing starts
  int max_terms = 168;       ///< adaptive growth limit for N
  int gaver_stages = 7;      ///< Gaver-Stehfest M (2M evaluations)
  double target_abs = 1e-8;  ///< requested absolute accuracy
  bool throw_on_nonconverged = true;

  /// Subtract the initial value f(0+) = lim theta*F(theta) analytically
  /// before inverting.  The Bromwich tail of a transform with f(0+) != 0
  /// decays only like f(0+)/theta, which caps Euler summation near 1e-7 at
  /// small t; peeling the limit off restores fast convergence.
  bool subtract_initial = true;
  double initial_probe = 1e8;  ///< real abscissa for the f(0+) probe
};

/// An inverted value with its a-posteriori error estimate.
struct Inverted {
  double value = 0.0;
  double err_est = 0.0;
};

namespace detail {

inline double binom(int n, int k) {
  return std::exp(lgamma_r(n + 1.0) - lgamma_r(k + 1.0) - lgamma_r(n - k + 1.0));
}

/// Euler-smoothed Bromwich sum using terms a_0..a_{upto}.
inline double euler_smooth(const std::vector<double>& terms, int n_plain, int m_smooth) {
  // partial sums s_j = sum_{i<=j} terms[i]
  // result = 2^{-M} sum_k C(M,k) s_{N+k}
  double s = 0.0;
  for (int j = 0; j <= n_plain + m_smooth; ++j) s += terms[j];
  // walk back down accumulating the binomial average
  double acc = 0.0;
  double sj = s;
  for (int k = m_smooth; k >= 0; --k) {
    acc += binom(m_smooth, k) * sj;
    sj -= terms[n_plain + k];
  }
  return std::ldexp(acc, -m_smooth);
}

inline Inverted invert_euler(const TransformHandle& f, double t, const InversionConfig& cfg) {
  const double A = cfg.A;
  const double re = A / (2.0 * t);
  double c0 = 0.0;
  const double shift = 1.0 / t;
  if (cfg.subtract_initial) {
    c0 = (cfg.initial_probe * f(cplx(cfg.initial_probe, 0.0))).real();
    if (!std::isfinite(c0) || std::abs(c0) < 1e-13) c0 = 0.0;
  }
  std::vector<double> terms;
  auto ensure_terms = [&](int count) {
    const int start = static_cast<int>(terms.size());
    for (int k = start; k < count; ++k) {
      const cplx theta(re, k * kPi / t);
      const double v = (f(theta) - c0 / (theta + shift)).real();
      terms.push_back(k == 0 ? v / 2.0 : ((k % 2 == 0) ? v : -v));
    }
  };

  int n = cfg.euler_terms;
  const int m = cfg.euler_smoothing;
  double best = 0.0, est = std::numeric_limits<double>::infinity();
  const double scale = std::exp(A / 2.0) / t;
  for (;;) {
    ensure_terms(n + m + 1);
    best = scale * euler_smooth(terms, n, m);
    const double half = scale * euler_smooth(terms, n / 2, m);
    est = std::abs(best - half);
    if (est <= cfg.target_abs) break;
    if (n >= cfg.max_terms) {
      if (cfg.throw_on_nonconverged) {
        throw accuracy_error("euler inversion did not reach target at t=" + std::to_string(t),
                             cplx(best + c0 * std::exp(-1.0), 0.0), est);
      }
      break;
    }
    n = std::min(2 * n, cfg.max_terms);
  }
  return {best + c0 * std::exp(-shift * t), est};
}

/// Gaver-Stehfest weights for M stages (2M terms), exact small integers in
/// double precision for M <= 9.
inline std::vector<double> gaver_weights(int M) {
  std::vector<double> zeta(2 * M + 1, 0.0);
  for (int k = 1; k <= 2 * M; ++k) {
    double s = 0.0;
    for (int j = (k + 1) / 2; j <= std::min(k, M); ++j) {
      double term = std::pow(static_cast<double>(j), M + 1) / std::tgamma(M + 1.0);
      term *= binom(M, j) * binom(2 * j, j) * binom(j, k - j);
      s += term;
    }
    zeta[k] = ((M + k) % 2 == 0 ? 1.0 : -1.0) * s;
  }
  return zeta;
}

inline Inverted invert_gaver(const TransformHandle& f, double t, const InversionConfig& cfg) {
  const int M = cfg.gaver_stages;
  const double ln2t = std::log(2.0) / t;
  double c0 = 0.0;
  const double shift = 1.0 / t;
  if (cfg.subtract_initial) {
    c0 = (cfg.initial_probe * f(cplx(cfg.initial_probe, 0.0))).real();
    if (!std::isfinite(c0) || std::abs(c0) < 1e-13) c0 = 0.0;
  }
  std::vector<double> fv(2 * M + 1);
  for (int k = 1; k <= 2 * M; ++k) {
    const cplx theta(k * ln2t, 0.0);
    fv[k] = (f(theta) - c0 / (theta + shift)).real();
  }

  auto stage = [&](int mm) {
    auto z = gaver_weights(mm);
    double s = 0.0;
    for (int k = 1; k <= 2 * mm; ++k) s += z[k] * fv[k];
    return ln2t * s;
  };
  const double back = c0 * std::exp(-shift * t);
  const double vM = stage(M) + back;
  const double vMm1 = stage(M - 1) + back;
  return {vM, std::abs(vM - vMm1)};
}

}  // namespace detail

/// Inverts the transform at a single time t > 0.
inline Inverted invert_point(const TransformHandle& f, double t, const InversionConfig& cfg = {}) {
  if (!(t > 0.0)) throw std::invalid_argument("invert_point: t > 0 required");
  return cfg.method == InversionConfig::Method::euler ? detail::invert_euler(f, t, cfg)
                                                      : detail::invert_gaver(f, t, cfg);
}

/// Inverts on a time grid.
inline std::vector<Inverted> invert(const TransformHandle& f, const std::vector<double>& t_grid,
                                    const InversionConfig& cfg = {}) {
  std::vector<Inverted> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(invert_point(f, t, cfg));
  return out;
}

/**
 * Inverts a whole vector-valued transform (for example a distribution
 * column) at one time point, sharing every transform evaluation across the
 * components.  Euler method only; the adaptive term count is driven by the
 * worst component.
 */
template <class ColumnFn>
std::vector<Inverted> invert_column(ColumnFn&& column, int count, double t,
                                    const InversionConfig& cfg = {}) {
  if (!(t > 0.0)) throw std::invalid_argument("invert_column: t > 0 required");
  const double A = cfg.A;
  const double re = A / (2.0 * t);
  const double shift = 1.0 / t;

  std::vector<double> c0(count, 0.0);
  if (cfg.subtract_initial) {
    auto probe = column(cplx(cfg.initial_probe, 0.0));
    for (int i = 0; i < count; ++i) {
      double v = (cfg.initial_probe * probe[i]).real();
      c0[i] = (std::isfinite(v) && std::abs(v) >= 1e-13) ? v : 0.0;
    }
  }

  std::vector<std::vector<double>> terms;  // terms[k][i]
  auto ensure_terms = [&](int want) {
    const int start = static_cast<int>(terms.size());
    for (int k = start; k < want; ++k) {
      const cplx theta(re, k * kPi / t);
      auto col = column(theta);
      std::vector<double> row(count);
      for (int i = 0; i < count; ++i) {
        const double v = (col[i] - c0[i] / (theta + shift)).real();
        row[i] = (k == 0) ? v / 2.0 : ((k % 2 == 0) ? v : -v);
      }
      terms.push_back(std::move(row));
    }
  };

  const int m = cfg.euler_smoothing;
  int n = cfg.euler_terms;
  const double scale = std::exp(A / 2.0) / t;
  std::vector<Inverted> out(count);
  std::vector<double> comp(0);
  for (;;) {
    ensure_terms(n + m + 1);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      comp.resize(terms.size());
      for (std::size_t k = 0; k < terms.size(); ++k) comp[k] = terms[k][i];
      const double best = scale * detail::euler_smooth(comp, n, m);
      const double half = scale * detail::euler_smooth(comp, n / 2, m);
      out[i].value = best + c0[i] * std::exp(-shift * t);
      out[i].err_est = std::abs(best - half);
      worst = std::max(worst, out[i].err_est);
    }
    if (worst <= cfg.target_abs || n >= cfg.max_terms) {
      if (worst > cfg.target_abs && cfg.throw_on_nonconverged) {
        throw accuracy_error("column inversion did not reach target at t=" + std::to_string(t),
                             cplx(out[0].value, 0.0), worst);
      }
      return out;
    }
    n = std::min(2 * n, cfg.max_terms);
  }
}

/**
 * First moment -f'(0) by Richardson-extrapolated central differences on the
 * real axis (steps 1e-4 and 5e-5).  Requires the transform to be analytic in
 * a real neighborhood of 0.
 */
inline Inverted invert_mean(const TransformHandle& f, double h = 1e-4) {
  auto central = [&](double step) {
    return (f(cplx(-step, 0.0)).real() - f(cplx(step, 0.0)).real()) / (2.0 * step);
  };
  const double d1 = central(h);
  const double d2 = central(h / 2.0);
  const double rich = (4.0 * d2 - d1) / 3.0;
  const double est = std::abs(d2 - d1) / 3.0;
  if (est > 1e-3 * (std::abs(rich) + 1e-30)) {
    throw accuracy_error("invert_mean: derivative extrapolation unstable", cplx(rich, 0.0), est);
  }
  return {rich, est};
}

}  // namespace erlang_a

#endif  // ERLANG_A_INVERSION_HPP
