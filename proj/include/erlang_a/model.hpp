#ifndef ERLANG_A_MODEL_HPP
#define ERLANG_A_MODEL_HPP

/**
 * @file model.hpp
 * @brief Erlang A (M/M/m+M) model parameters, birth-death rates, state-space
 *        truncation and the exact stationary distribution.
 *
 * Internally every computation uses the time unit 1/mu (mu normalized to 1);
 * rates and times are rescaled at the API boundary.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "erlang_a/log_complex.hpp"

namespace erlang_a {

/// Arrival/service/abandonment rates of the M/M/m+M queue.
struct ModelParams {
  double lambda;  ///< arrival rate (1/time)
  double mu;      ///< per-server service rate (1/time)
  int m;          ///< server count
  double eta;     ///< abandonment rate (1/time), >= 0

  ModelParams(double lambda_, double mu_, int m_, double eta_)
      : lambda(lambda_), mu(mu_), m(m_), eta(eta_) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  }

  /// Offered load lambda/mu (dimensionless).
  double rho() const { return lambda / mu; }
  /// Abandonment rate in service-rate units.
  double eta_n() const { return eta / mu; }

  /// Convenience constructor in normalized units (mu = 1).
  static ModelParams normalized(double rho, int m, double eta_n) {
    return ModelParams(rho, 1.0, m, eta_n);
  }
};

/// Probability mass over queue lengths 0..N with the truncated tail recorded.
struct Pmf {
  std::vector<double> values;
  double tail_mass = 0.0;

  int n_max() const { return static_cast<int>(values.size()) - 1; }
  double total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

/// Birth rate in state n, normalized units (constant rho).
inline double birth_rate(const ModelParams& p, int n) {
  if (n < 0) throw std::invalid_argument("state index must be >= 0");
  return p.rho();
}

/// Death rate in state n, normalized units: n below m, m + (n-m)*eta_n above.
inline double death_rate(const ModelParams& p, int n) {
  if (n < 0) throw std::invalid_argument("state index must be >= 0");
  if (n <= p.m) return static_cast<double>(n);
  return static_cast<double>(p.m) + (n - p.m) * p.eta_n();
}

namespace detail {

/// log of the unnormalized stationary weight u_n (u_0 = 1).
inline double log_stationary_weight(const ModelParams& p, int n) {
  const double rho = p.rho();
  const double eta = p.eta_n();
  const int m = p.m;
  if (n <= m) return n * std::log(rho) - lgamma_r(n + 1.0);
  if (eta > 0.0) {
    // rho^m/m! * (rho/eta)^(n-m) * Gamma(1+m/eta)/Gamma(n-m+1+m/eta)
    return m * std::log(rho) - lgamma_r(m + 1.0) + (n - m) * std::log(rho / eta) +
           lgamma_r(1.0 + m / eta) - lgamma_r(n - m + 1.0 + m / eta);
  }
  // eta = 0: geometric M/M/m tail
  return m * std::log(rho) - lgamma_r(m + 1.0) + (n - m) * std::log(rho / m);
}

/// Remainder of sum_{k>n} u_k bounded by a geometric ratio (requires the
/// weight ratio at n+1 to be < 1).
inline double log_stationary_tail_bound(const ModelParams& p, int n) {
  double ratio = p.rho() / death_rate(p, n + 1);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return log_stationary_weight(p, n + 1) - std::log1p(-ratio);
}

}  // namespace detail

/**
 * Default truncation level: smallest N with relative stationary tail below
 * tail_tol that also leaves headroom above the initial state.
 */
inline int default_truncation(const ModelParams& p, int n0, double tail_tol = 1e-12) {
  const int floor_n =
      std::max({p.m + 2, n0 + static_cast<int>(std::ceil(10.0 * std::sqrt(n0 + 1.0))), 10});
  if (p.eta_n() == 0.0 && p.rho() >= p.m) {
    throw unstable_error("eta = 0 with rho >= m: no steady state; pass an explicit truncation");
  }
  // scale of the distribution body, for a relative tail criterion
  double log_body = 0.0;
  for (int n = 1; n <= p.m; ++n)
    log_body = std::max(log_body, detail::log_stationary_weight(p, n));
  int n = floor_n;
  while (detail::log_stationary_tail_bound(p, n) - log_body > std::log(tail_tol)) {
    ++n;
    if (n > 2000000) throw std::runtime_error("truncation search failed to converge");
  }
  return n;
}

/**
 * Exact stationary distribution (normalized units are irrelevant here: the
 * stationary law depends only on rho, m, eta/mu).
 *
 * Throws unstable_error when eta = 0 and rho >= m.
 */
inline Pmf steady_state(const ModelParams& p, int n_max = -1) {
  if (p.eta_n() == 0.0 && p.rho() >= p.m) {
    throw unstable_error("eta = 0 with rho >= m: no steady state");
  }
  if (n_max < 0) n_max = default_truncation(p, 0);

  std::vector<double> logs(n_max + 1);
  double log_max = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= n_max; ++n) {
    logs[n] = detail::log_stationary_weight(p, n);
    log_max = std::max(log_max, logs[n]);
  }
  // full normalizer includes the analytic tail beyond n_max
  double body = 0.0;
  for (int n = 0; n <= n_max; ++n) body += std::exp(logs[n] - log_max);
  double tail = 0.0;
  {
    // sum the tail directly until negligible; the ratio is eventually
    // geometric so this terminates
    double lw = detail::log_stationary_weight(p, n_max + 1);
    int n = n_max + 1;
    while (true) {
      double t = std::exp(lw - log_max);
      tail += t;
      if (t < 1e-18 * (body + tail)) break;
      ++n;
      lw += std::log(p.rho() / death_rate(p, n));
      if (n > n_max + 10000000) throw std::runtime_error("stationary tail sum diverged");
    }
  }
  const double norm = body + tail;
  Pmf out;
  out.values.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out.values[n] = std::exp(logs[n] - log_max) / norm;
  out.tail_mass = tail / norm;
  return out;
}

}  // namespace erlang_a

#endif  // ERLANG_A_MODEL_HPP
