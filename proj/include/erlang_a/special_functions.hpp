#ifndef ERLANG_A_SPECIAL_FUNCTIONS_HPP
#define ERLANG_A_SPECIAL_FUNCTIONS_HPP

/**
 * @file special_functions.hpp
 * @brief The four fundamental solutions of the queue's transform recurrences.
 *
 * The transformed birth-death equations are three-term recurrences in the
 * state index with linear coefficients.  Their solutions are represented by
 * Hankel-type contour integrals with integrand e^{cz} (z-1)^{-b} z^{-a}:
 *
 *   sol_F  - entire finite-sum solution, regular at the empty-queue boundary
 *   sol_G  - second solution below the server threshold (loop around z = 1)
 *   sol_H  - super-exponentially decaying solution above the threshold
 *   sol_I  - algebraically behaved second solution above the threshold
 *
 * Two evaluation routes are provided: trapezoidal quadrature on a parabolic
 * contour wrapping the branch cut (default), and an exact convergent
 * Kummer-type series obtained by expanding (1 - 1/z)^{-b} on a dilated
 * contour.  The series doubles as the large-index evaluator, where it reduces
 * to the known asymptotics plus corrections, and as an independent
 * cross-check of the quadrature.  sol_I admits no such series and is
 * quadrature-only.
 */

#include <algorithm>
#include <cmath>
#include <vector>

#include "erlang_a/log_complex.hpp"
#include "erlang_a/model.hpp"

namespace erlang_a {

/// Controls the contour quadrature and route selection.
struct ContourConfig {
  int nodes = 400;        ///< starting node count
  int max_nodes = 3200;   ///< doubling limit before an accuracy error
  double rel_tol = 1e-12; ///< successive-refinement agreement target
  double clearance = 0.25;///< minimum crossing distance beyond z = 1

  enum class Mode { automatic, quadrature, series };
  Mode mode = Mode::automatic;
};

namespace detail {

struct QuadEval {
  LogComplex value;
  double end_slack;  // log-magnitude drop from peak to the worst endpoint
};

/**
 * One trapezoidal pass over the parabolic contour z(u) = x0 (1 + iu)^2,
 * u in [-U, U].  around_one selects the (z-1)^{-b} branch layout (C1-type)
 * versus (1-z)^{-b} (C2-type).
 */
inline QuadEval hankel_pass(double c, double a, cplx b, double x0, bool around_one,
                            double U, int K) {
  const double h = 2.0 * U / K;
  std::vector<cplx> logs(K + 1);
  double lmax = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= K; ++j) {
    const double u = -U + j * h;
    const cplx w(1.0, u);
    const cplx z = x0 * w * w;
    cplx L = c * z - a * std::log(z) + std::log(w);
    L -= around_one ? b * std::log(z - 1.0) : b * std::log(1.0 - z);
    logs[j] = L;
    lmax = std::max(lmax, L.real());
  }
  cplx s(0.0, 0.0);
  for (int j = 0; j <= K; ++j) {
    const double w = (j == 0 || j == K) ? 0.5 : 1.0;
    const cplx d = logs[j] - lmax;
    if (d.real() > -745.0) s += w * std::exp(d);
  }
  const double end_re = std::max(logs.front().real(), logs.back().real());
  QuadEval out;
  out.value = LogComplex(s * (h * x0 / kPi), lmax);
  out.end_slack = lmax - end_re;
  return out;
}

/// Crossing point of the contour with the real axis, matched to the
/// real-part saddle of the integrand.
inline double hankel_crossing(double c, double a, cplx b, bool around_one,
                              double clearance) {
  const double bp = std::max(b.real(), 0.0);
  const double s = c + a + bp;
  const double disc = std::max(s * s - 4.0 * a * c, 0.0);
  const double sq = std::sqrt(disc);
  if (around_one) {
    const double zp = (s + sq) / (2.0 * c);
    return std::max(zp, 1.0 + clearance);
  }
  const double zm = (s - sq) / (2.0 * c);
  const double hi = 1.0 - std::max(0.004, 0.35 / std::sqrt(4.0 + std::max(a, 0.0)));
  return std::clamp(zm, 0.02, hi);
}

/**
 * Adaptive Hankel-loop quadrature of
 *   (1/2 pi i) Int e^{cz} (z -+ 1)^{-b} z^{-a} dz
 * over a contour wrapping the left branch cut.  Doubles nodes until two
 * passes agree to cfg.rel_tol; widens the truncation when the endpoints are
 * not yet negligible.
 */
inline LogComplex hankel_integral(double c, double a, cplx b, bool around_one,
                                  const ContourConfig& cfg) {
  if (!(c > 0.0)) throw std::invalid_argument("hankel_integral: c must be > 0");
  const double x0 = hankel_crossing(c, a, b, around_one, cfg.clearance);
  const double bp = std::max(b.real(), 0.0);

  // truncation half-width: balance e^{c x0 (1-u^2)} decay (plus algebraic
  // decay from z^{-a} and the branch factor) against the oscillation budget
  const double needed = 45.0 + kPi * std::abs(b.imag());
  double U = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double logz = std::log(2.0 + x0 * (1.0 + U * U));
    const double grow = (std::max(-b.real(), 0.0) + std::max(-a, 0.0)) * logz;
    const double avail = c * x0 * U * U + std::max(a, 0.0) * std::log1p(U * U);
    if (avail >= needed + grow) break;
    U *= 1.25;
  }

  // node budget: resolve both the oscillation and the saddle width
  const double cycles = (4.0 * c * x0 * U + 6.3 * (std::abs(a) + std::abs(b)) +
                         2.0 * std::abs(b.imag()) * std::log1p(U * U)) /
                        (2.0 * kPi);
  int K = std::max({cfg.nodes, static_cast<int>(cycles * 10.0) + 50,
                    static_cast<int>(8.0 * U * std::sqrt(2.0 * (c * x0 + std::abs(a) + bp) + 1.0))});

  K = std::min(K, cfg.max_nodes);
  LogComplex prev;
  bool have_prev = false;
  double prev_rd = std::numeric_limits<double>::infinity();
  int widenings = 0;
  for (;;) {
    QuadEval r = hankel_pass(c, a, b, x0, around_one, U, K);
    if (r.end_slack < 40.0) {
      if (++widenings > 60) {
        throw accuracy_error("hankel quadrature: truncation did not close", r.value.mant, 1.0);
      }
      U *= 1.4;
      K = std::min(static_cast<int>(K * 1.4), cfg.max_nodes);
      have_prev = false;
      prev_rd = std::numeric_limits<double>::infinity();
      continue;
    }
    if (have_prev) {
      const double rd = rel_diff(r.value, prev);
      if (rd <= cfg.rel_tol) return r.value;
      // refinement stalled at the summation noise floor: accept if the floor
      // is still comfortably tight, otherwise report the residual honestly
      if (rd > 0.25 * prev_rd && rd <= 200.0 * cfg.rel_tol) return r.value;
      if (K >= cfg.max_nodes) {
        if (rd <= 200.0 * cfg.rel_tol) return r.value;
        throw accuracy_error("hankel quadrature: node budget exhausted", r.value.mant, rd);
      }
      prev_rd = rd;
    } else if (K >= cfg.max_nodes) {
      QuadEval half = hankel_pass(c, a, b, x0, around_one, U, K / 2);
      const double rd = rel_diff(r.value, half.value);
      if (rd <= 200.0 * cfg.rel_tol) return r.value;
      throw accuracy_error("hankel quadrature: node budget exhausted", r.value.mant, rd);
    }
    prev = r.value;
    have_prev = true;
    K = std::min(2 * K, cfg.max_nodes);
  }
}

/**
 * Exact series for the C1-type integral, from the absolutely convergent
 * expansion (1 - 1/z)^{-b} = sum_k (b)_k z^{-k} / k! on |z| > 1:
 *
 *   sum_k [(b)_k / k!] c^{a+b+k-1} / Gamma(a+b+k).
 *
 * Converges in O(c) terms for any b in the right half-plane; the k = 0 term
 * is the standard large-a asymptotic form.
 */
inline LogComplex kummer_c1(double c, double a, cplx b, double rel_tol = 1e-15,
                            int max_terms = -1) {
  const cplx nu = a + b;
  LogComplex term = LogComplex::from_log((nu - 1.0) * std::log(c) - lgamma_c(nu));
  LogComplex sum = term;
  int calm = 0;
  if (max_terms < 0) max_terms = 2000 + static_cast<int>(40.0 * c);
  for (int k = 1; k <= max_terms; ++k) {
    term *= (b + (k - 1.0)) * (c / (static_cast<double>(k) * (nu + (k - 1.0))));
    sum += term;
    if (term.log_abs() < sum.log_abs() + std::log(rel_tol) && k > c) {
      if (++calm >= 3) return sum;
    } else {
      calm = 0;
    }
  }
  throw accuracy_error("kummer series did not converge", sum.mant, 1.0);
}

inline bool prefer_series(double c, double a, cplx b) {
  if (std::abs(b.imag()) > 15.0) return true;
  if (b.real() > 80.0) return true;
  if (a > std::max(60.0, 3.0 * (c + std::abs(b)))) return true;
  return false;
}

inline LogComplex c1_integral(double c, double a, cplx b, const ContourConfig& cfg) {
  switch (cfg.mode) {
    case ContourConfig::Mode::quadrature:
      return hankel_integral(c, a, b, true, cfg);
    case ContourConfig::Mode::series:
      return kummer_c1(c, a, b, std::min(cfg.rel_tol, 1e-14));
    case ContourConfig::Mode::automatic:
    default:
      if (prefer_series(c, a, b)) return kummer_c1(c, a, b, std::min(cfg.rel_tol, 1e-14));
      return hankel_integral(c, a, b, true, cfg);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fundamental solutions
// ---------------------------------------------------------------------------

/**
 * Entire solution regular at the empty-queue boundary:
 *   sol_F(n) = sum_{l=0}^{n} rho^{n-l}/(n-l)! * (theta)_l / l!
 * with sol_F(-1) = 0, sol_F(0) = 1.
 */
inline LogComplex sol_F(int n, cplx theta, double rho) {
  if (n < -1) throw std::invalid_argument("sol_F: n >= -1 required");
  if (n == -1) return LogComplex::zero();
  LogComplex term = LogComplex::from_log(cplx(n * std::log(rho) - lgamma_r(n + 1.0), 0.0));
  LogComplex sum = term;
  for (int l = 1; l <= n; ++l) {
    term *= (theta + (l - 1.0)) * ((n - l + 1.0) / (rho * l));
    sum += term;
  }
  return sum;
}

/// Second solution below the server threshold (contour through the cut at 1).
inline LogComplex sol_G(int n, cplx theta, double rho,
                        const ContourConfig& cfg = ContourConfig{}) {
  return detail::c1_integral(rho, n + 1.0, theta, cfg);
}

/// Decaying solution above the server threshold; requires eta > 0.
inline LogComplex sol_H(int n, cplx theta, const ModelParams& p,
                        const ContourConfig& cfg = ContourConfig{}) {
  const double eta = p.eta_n();
  if (!(eta > 0.0)) throw std::invalid_argument("sol_H: eta > 0 required");
  return detail::c1_integral(p.rho() / eta, n + 1.0 - p.m + p.m / eta, theta / eta, cfg);
}

/// Algebraically behaved solution above the threshold; quadrature only.
inline LogComplex sol_I(int n, cplx theta, const ModelParams& p,
                        const ContourConfig& cfg = ContourConfig{}) {
  const double eta = p.eta_n();
  if (!(eta > 0.0)) throw std::invalid_argument("sol_I: eta > 0 required");
  return detail::hankel_integral(p.rho() / eta, n + 1.0 - p.m + p.m / eta, theta / eta,
                                 false, cfg);
}

/// Leading large-n form of sol_H (first term of the exact series).
inline LogComplex sol_H_asymptotic(int n, cplx theta, const ModelParams& p) {
  const double eta = p.eta_n();
  const cplx nu = n + 1.0 - p.m + p.m / eta + theta / eta;
  return LogComplex::from_log((nu - 1.0) * std::log(p.rho() / eta) - lgamma_c(nu));
}

/// Leading large-n form of sol_I: n^{theta/eta - 1} e^{rho/eta} / Gamma(theta/eta).
inline LogComplex sol_I_asymptotic(int n, cplx theta, const ModelParams& p) {
  const double eta = p.eta_n();
  return LogComplex::from_log((theta / eta - 1.0) * std::log(static_cast<double>(n)) +
                              p.rho() / eta - lgamma_c(theta / eta));
}

// ---------------------------------------------------------------------------
// Wronskians
// ---------------------------------------------------------------------------

/**
 * Discrete Wronskian of the above-threshold pair,
 *   W_n = sol_H(n) sol_I(n+1) - sol_H(n+1) sol_I(n),
 * in closed form.
 */
inline LogComplex wronskian_above(int n, cplx theta, const ModelParams& p) {
  const double eta = p.eta_n();
  const cplx expo = p.rho() / eta +
                    (static_cast<double>(n - p.m) + (theta + static_cast<double>(p.m)) / eta) *
                        std::log(p.rho() / eta) -
                    lgamma_c(theta / eta) - lgamma_r(n - p.m + 2.0 + p.m / eta);
  return LogComplex::from_log(expo);
}

/// Gamma(theta/eta) * wronskian_above: entire in theta, nonzero at theta = 0.
inline LogComplex wronskian_above_scaled(int n, cplx theta, const ModelParams& p) {
  const double eta = p.eta_n();
  const cplx expo = p.rho() / eta +
                    (static_cast<double>(n - p.m) + (theta + static_cast<double>(p.m)) / eta) *
                        std::log(p.rho() / eta) -
                    lgamma_r(n - p.m + 2.0 + p.m / eta);
  return LogComplex::from_log(expo);
}

/**
 * Discrete Wronskian of the below-threshold pair,
 *   Wt_n = sol_G(n) sol_F(n+1) - sol_G(n+1) sol_F(n)
 *        = e^rho rho^{n+theta} / (Gamma(theta) (n+1)!).
 */
inline LogComplex wronskian_below(int n, cplx theta, double rho) {
  return LogComplex::from_log(rho + (static_cast<double>(n) + theta) * std::log(rho) - lgamma_c(theta) -
                              lgamma_r(n + 2.0));
}

// ---------------------------------------------------------------------------
// whole-column evaluation (shared work for the transform assembly)
// ---------------------------------------------------------------------------

/// sol_F(0..n_max) by the stable forward recurrence
/// (n+1) F_{n+1} = (rho + theta + n) F_n - rho F_{n-1}.
inline std::vector<LogComplex> f_column(int n_max, cplx theta, double rho) {
  std::vector<LogComplex> f(n_max + 1);
  f[0] = LogComplex::one();
  if (n_max >= 1) f[1] = LogComplex::from(rho + theta);
  for (int n = 1; n < n_max; ++n) {
    f[n + 1] = (f[n] * (rho + theta + static_cast<double>(n)) - f[n - 1] * rho) *
               (1.0 / (n + 1.0));
  }
  return f;
}

/**
 * sol_H(n) for n in [m-1, n_max], seeded by the series at the top and run
 * downward (the decaying solution dominates in that direction, so the
 * recurrence is stable).  Entries below m-1 are zero placeholders.
 */
inline std::vector<LogComplex> h_column(int n_max, cplx theta, const ModelParams& p,
                                        const ContourConfig& cfg = ContourConfig{}) {
  const double eta = p.eta_n();
  const double rho = p.rho();
  const int m = p.m;
  std::vector<LogComplex> h(n_max + 3);
  auto series = [&](int n) {
    return detail::kummer_c1(rho / eta, n + 1.0 - m + m / eta, theta / eta,
                             std::min(cfg.rel_tol, 1e-14));
  };
  h[n_max + 2] = series(n_max + 2);
  h[n_max + 1] = series(n_max + 1);
  for (int n = n_max + 1; n >= m; --n) {
    const cplx coef = theta + (rho + m + (n - m) * eta);
    const double up = m + (n - m + 1) * eta;
    h[n - 1] = (h[n] * coef - h[n + 1] * up) * (1.0 / rho);
  }
  h.resize(n_max + 1);
  return h;
}

/// sol_I(n) for n in [m-1, n_max] by the forward recurrence seeded with two
/// quadrature values (the algebraic solution dominates going up).
inline std::vector<LogComplex> i_column(int n_max, cplx theta, const ModelParams& p,
                                        const ContourConfig& cfg = ContourConfig{}) {
  const double eta = p.eta_n();
  const double rho = p.rho();
  const int m = p.m;
  std::vector<LogComplex> iv(n_max + 1);
  iv[m - 1] = sol_I(m - 1, theta, p, cfg);
  if (n_max >= m) iv[m] = sol_I(m, theta, p, cfg);
  for (int n = m; n < n_max; ++n) {
    const cplx coef = theta + (rho + m + (n - m) * eta);
    const double up = m + (n - m + 1) * eta;
    iv[n + 1] = (iv[n] * coef - iv[n - 1] * rho) * (1.0 / up);
  }
  return iv;
}

/**
 * Scaled generalized Wronskian column
 *   chi_j(k) = Gamma(theta/eta) [sol_H(j) sol_I(k) - sol_I(j) sol_H(k)]
 * for k in [j, k_max], built entirely from the closed-form Wronskian seed and
 * the three-term recurrence in k.  The 1/Gamma(theta/eta) factor common to
 * every generalized Wronskian is removed analytically, so the column is
 * perfectly conditioned at theta -> 0 where sol_H and sol_I coalesce.
 */
inline std::vector<LogComplex> cross_wronskian_column(int j, int k_max, cplx theta,
                                                      const ModelParams& p) {
  const double eta = p.eta_n();
  const double rho = p.rho();
  const int m = p.m;
  if (j < m - 1) throw std::invalid_argument("cross_wronskian_column: j >= m-1 required");
  std::vector<LogComplex> chi(k_max + 1);
  if (j > k_max) return chi;
  chi[j] = LogComplex::zero();
  if (j + 1 <= k_max) chi[j + 1] = wronskian_above_scaled(j, theta, p);
  for (int k = j + 1; k < k_max; ++k) {
    const cplx coef = theta + (rho + m + (k - m) * eta);
    const double up = m + (k - m + 1) * eta;
    chi[k + 1] = (chi[k] * coef - chi[k - 1] * rho) * (1.0 / up);
  }
  return chi;
}

/// sol_H(n; theta = 0) in closed form (real, returned as a log).
inline double log_h_at_zero(int n, const ModelParams& p) {
  const double eta = p.eta_n();
  return (n - p.m + p.m / eta) * std::log(p.rho() / eta) -
         lgamma_r(n - p.m + 1.0 + p.m / eta);
}

}  // namespace erlang_a

#endif  // ERLANG_A_SPECIAL_FUNCTIONS_HPP
