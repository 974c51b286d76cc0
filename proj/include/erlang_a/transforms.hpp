#ifndef ERLANG_A_TRANSFORMS_HPP
#define ERLANG_A_TRANSFORMS_HPP

/**
 * @file transforms.hpp
 * @brief Laplace transforms of the transient queue-length distribution.
 *
 * The general Erlang A transform is assembled from the fundamental solutions
 * per initial condition:
 *
 *   n0 <  m : sol_F below the start, sol_F/sol_G between start and threshold,
 *             sol_H above (three-piece Green's function)
 *   n0 == m : two-piece simplification
 *   n0 >  m : sol_F below the threshold, generalized-Wronskian combination
 *             between threshold and start, sol_H above
 *
 * For n0 > m the combinations of sol_I with the denominator Wronskian are
 * built from the closed-form-seeded cross-Wronskian recurrence, which removes
 * the 1/Gamma(theta/eta) factor analytically; the assembled transform is then
 * stable arbitrarily close to theta = 0.
 *
 * Limiting models: eta = mu (explicit product form), eta -> 0 (multi-server
 * queue without abandonment, via the quadratic-root pair), eta -> infinity
 * (loss system, with three equivalent blocking-probability forms plus an
 * integral cross-check).
 *
 * All public handles work in user time units; internally mu is normalized
 * to 1 and theta is rescaled at the boundary.
 */

#include <memory>
#include <vector>

#include "erlang_a/inversion.hpp"
#include "erlang_a/model.hpp"
#include "erlang_a/special_functions.hpp"

namespace erlang_a {

namespace detail {

/**
 * Gamma(theta) rho^{-theta} sol_G(n, theta), fused into one series:
 *
 *   sum_k rho^{n+k} / (k! * prod_{j=k}^{k+n} (theta + j)).
 *
 * The transform prefactors carry Gamma(theta) rho^{-theta} against sol_G's
 * internal 1/Gamma(n+1+theta+k); multiplying log-scale representations of
 * the two loses ~|theta| log|theta| * eps absolute accuracy in the exponent,
 * which the Bromwich prefactor then amplifies.  Fusing them keeps every
 * factor small, so inversion nodes with |Im theta| in the thousands stay
 * accurate to near machine precision.
 */
inline LogComplex g_scaled_series(int n, cplx theta, double rho, double rel_tol = 1e-15) {
  LogComplex term = LogComplex::from(std::pow(rho, n));
  if (n >= 20) term = LogComplex::from_log(cplx(n * std::log(rho), 0.0));
  for (int j = 0; j <= n; ++j) term /= (theta + static_cast<double>(j));
  LogComplex sum = term;
  int calm = 0;
  const int max_terms = 2000 + static_cast<int>(40.0 * rho);
  for (int k = 1; k <= max_terms; ++k) {
    term *= (theta + (k - 1.0)) * (rho / (static_cast<double>(k) * (theta + static_cast<double>(k + n))));
    sum += term;
    if (term.log_abs() < sum.log_abs() + std::log(rel_tol) && k > rho) {
      if (++calm >= 3) return sum;
    } else {
      calm = 0;
    }
  }
  throw accuracy_error("scaled series did not converge", sum.mant, 1.0);
}

}  // namespace detail

/**
 * Column evaluator for the general (eta > 0) transient transform.
 * Shares all theta-dependent subexpressions across the whole state column.
 */
class TransientSolver {
 public:
  TransientSolver(const ModelParams& p, int n0, int n_max = -1,
                  ContourConfig cfg = ContourConfig{})
      : p_(p), n0_(n0), cfg_(cfg) {
    if (!(p.eta_n() > 0.0))
      throw std::invalid_argument("TransientSolver requires eta > 0; use the eta = 0 solver");
    if (n0 < 0) throw std::invalid_argument("n0 >= 0 required");
    n_max_ = n_max > 0 ? n_max : default_truncation(p, n0);
    if (n0 > n_max_) throw std::invalid_argument("n0 beyond truncation");
  }

  int n_max() const { return n_max_; }
  const ModelParams& params() const { return p_; }

  /// Whole transform column at normalized theta (mu = 1 units).
  std::vector<LogComplex> column_normalized(cplx th) const {
    const double rho = p_.rho();
    const double eta = p_.eta_n();
    const int m = p_.m;
    const int n0 = n0_;
    std::vector<LogComplex> out(n_max_ + 1);

    auto F = f_column(std::max(n_max_, m + 1), th, rho);
    auto H = h_column(std::max(n_max_, std::max(n0, m) + 1), th, p_, cfg_);
    LogComplex den = F[m] * H[m - 1] - H[m] * F[m - 1];

    if (n0 < m) {
      // G enters only multiplied by Gamma(theta) rho^{-theta}; use the fused
      // series so those big factors never appear separately
      std::vector<LogComplex> G(m + 1);
      for (int n = 0; n <= m; ++n) G[n] = detail::g_scaled_series(n, th, rho);
      LogComplex rat = (H[m] * G[m - 1] - G[m] * H[m - 1]) / den;
      LogComplex pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - rho - n0 * std::log(rho), 0.0));
      LogComplex upper_pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - lgamma_r(m + 1.0) + (m - n0 - 1) * std::log(rho), 0.0));
      for (int n = 0; n <= n_max_; ++n) {
        if (n >= m) {
          out[n] = upper_pre * F[n0] * H[n] / den;
        } else if (n >= n0) {
          out[n] = pre * F[n0] * (G[n] + rat * F[n]);
        } else {
          out[n] = pre * F[n] * (G[n0] + rat * F[n0]);
        }
      }
    } else if (n0 == m) {
      LogComplex inv_rho_den = LogComplex::from(1.0 / rho) / den;
      for (int n = 0; n <= n_max_; ++n) {
        out[n] = (n >= m) ? inv_rho_den * F[m] * H[n] : inv_rho_den * H[m] * F[n];
      }
    } else {
      // start above the threshold: cross-Wronskian combination, with the
      // common 1/Gamma(theta/eta) removed analytically
      auto chi_lo = cross_wronskian_column(m - 1, n0, th, p_);
      auto chi_hi = cross_wronskian_column(m, n0, th, p_);
      auto bracket = [&](int k) { return F[m] * chi_lo[k] - F[m - 1] * chi_hi[k]; };
      LogComplex pre2 = LogComplex::from_log(
          -std::log(rho) - rho / eta +
          (n0 - m - 1.0 + (th + static_cast<double>(m)) / eta) * std::log(eta / rho) +
          lgamma_r(n0 - m + 1.0 + m / eta));
      LogComplex low_pre = LogComplex::from_log(
          cplx(-std::log(rho) + (m - n0) * std::log(rho / eta) +
                   lgamma_r(n0 - m + 1.0 + m / eta) - lgamma_r(1.0 + m / eta),
               0.0));
      LogComplex bracket_n0 = bracket(n0);
      for (int n = 0; n <= n_max_; ++n) {
        if (n < m) {
          out[n] = low_pre * H[n0] * F[n] / den;
        } else if (n <= n0) {
          out[n] = pre2 * bracket(n) * H[n0] / den;
        } else {
          out[n] = pre2 * bracket_n0 * H[n] / den;
        }
      }
    }
    return out;
  }

  /// Column in user units at user theta.
  std::vector<cplx> column(cplx theta_user) const {
    auto col = column_normalized(theta_user / p_.mu);
    std::vector<cplx> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i].to_complex() / p_.mu;
    return out;
  }

  cplx at(int n, cplx theta_user) const {
    if (n < 0 || n > n_max_) throw std::invalid_argument("state outside truncation");
    return column(theta_user)[n];
  }

  /// Geometric bound on the neglected transform tail beyond n_max, from the
  /// super-exponential decay rate of the top column entry.
  double column_tail_bound(cplx theta_user) const {
    auto col = column_normalized(theta_user / p_.mu);
    const double eta = p_.eta_n();
    double r = (p_.rho() / eta) / (n_max_ + 2.0 - p_.m + p_.m / eta);
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return std::exp(col[n_max_].log_abs()) / p_.mu * r / (1.0 - r);
  }

 private:
  ModelParams p_;
  int n0_;
  int n_max_;
  ContourConfig cfg_;
};

// ---------------------------------------------------------------------------
// eta = 0: multi-server queue without abandonment
// ---------------------------------------------------------------------------

/// Both roots of rho Z^2 - (rho + theta + m) Z + m = 0, as the reciprocal
/// pair A = 1/Z_+, B = 1/Z_- used by the transform formulas.
struct QuadraticRoots {
  cplx A, B, sqrt_disc;
};

inline QuadraticRoots mmm_roots(double rho, int m, cplx th) {
  const cplx s = static_cast<double>(m) + rho + th;
  const cplx disc = s * s - 4.0 * m * rho;
  if (disc.imag() == 0.0 && disc.real() < 0.0) {
    throw std::domain_error("mmm transform: branch ambiguity, discriminant on the cut");
  }
  const cplx sq = std::sqrt(disc);
  return {(s - sq) / (2.0 * m), (s + sq) / (2.0 * m), sq};
}

/// Column evaluator for the eta = 0 transform.
class MmmSolver {
 public:
  MmmSolver(const ModelParams& p, int n0, int n_max = -1) : p_(p), n0_(n0) {
    if (p.eta_n() != 0.0) throw std::invalid_argument("MmmSolver requires eta = 0");
    n_max_ = n_max > 0 ? n_max
                       : std::max({p.m + 25, n0 + 25,
                                   static_cast<int>(std::ceil(3.0 * p.rho())) + p.m + 25});
    if (n0 > n_max_) throw std::invalid_argument("n0 beyond truncation");
  }

  int n_max() const { return n_max_; }

  std::vector<LogComplex> column_normalized(cplx th) const {
    const double rho = p_.rho();
    const int m = p_.m;
    const int n0 = n0_;
    auto [A, B, sq] = mmm_roots(rho, m, th);
    auto F = f_column(std::max(m + 1, n_max_), th, rho);
    LogComplex d3 = F[m + 1] * (m + 1.0) - F[m] * (A * static_cast<double>(m));
    const cplx logA = std::log(A), logB = std::log(B);
    std::vector<LogComplex> out(n_max_ + 1);

    if (n0 <= m) {
      std::vector<LogComplex> G(m + 2);
      for (int n = 0; n <= m + 1; ++n) G[n] = detail::g_scaled_series(n, th, rho);
      LogComplex omega = (G[m] * (A * static_cast<double>(m)) - G[m + 1] * (m + 1.0)) / d3;
      LogComplex pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - rho - n0 * std::log(rho), 0.0));
      LogComplex upper_pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - lgamma_r(m + 1.0) + (m - n0) * std::log(rho), 0.0));
      for (int n = 0; n <= n_max_; ++n) {
        if (n >= m) {
          out[n] = upper_pre * F[n0] * LogComplex::from_log(static_cast<double>(n - m) * logA) / d3;
        } else if (n >= n0) {
          out[n] = pre * F[n0] * (G[n] + omega * F[n]);
        } else {
          out[n] = pre * F[n] * (G[n0] + omega * F[n0]);
        }
      }
    } else {
      LogComplex ratio = (F[m + 1] * (m + 1.0) - F[m] * (B * static_cast<double>(m))) /
                         (F[m] * (A * static_cast<double>(m)) - F[m + 1] * (m + 1.0));
      for (int n = 0; n <= n_max_; ++n) {
        if (n < m) {
          out[n] = LogComplex::from_log(static_cast<double>(m - n0) * logB) * F[n] / d3;
        } else if (n <= n0) {
          LogComplex t1 = LogComplex::from_log(static_cast<double>(n - n0) * logB);
          LogComplex t2 = LogComplex::from_log(static_cast<double>(n - m) * logA + static_cast<double>(m - n0) * logB) * ratio;
          out[n] = (t1 + t2) / sq;
        } else {
          LogComplex t1 = LogComplex::from_log(static_cast<double>(n - n0) * logA);
          LogComplex t2 = LogComplex::from_log(static_cast<double>(m - n0) * logB + static_cast<double>(n - m) * logA) * ratio;
          out[n] = (t1 + t2) / sq;
        }
      }
    }
    return out;
  }

  std::vector<cplx> column(cplx theta_user) const {
    auto col = column_normalized(theta_user / p_.mu);
    std::vector<cplx> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i].to_complex() / p_.mu;
    return out;
  }

 private:
  ModelParams p_;
  int n0_;
  int n_max_;
};

// ---------------------------------------------------------------------------
// eta = mu: explicit product-form transform and closed-form inverses
// ---------------------------------------------------------------------------

/// Transform of p_n(t) for the infinite-server-like case eta = mu,
/// Gamma(theta) n0! e^{-rho} rho^{-n0-theta} * F/G product (normalized units).
inline LogComplex phat_mm_inf_normalized(double rho, int n0, int n, cplx th) {
  LogComplex pre =
      LogComplex::from_log(cplx(lgamma_r(n0 + 1.0) - rho - n0 * std::log(rho), 0.0));
  if (n >= n0) return pre * sol_F(n0, th, rho) * detail::g_scaled_series(n, th, rho);
  return pre * detail::g_scaled_series(n0, th, rho) * sol_F(n, th, rho);
}

inline TransformHandle phat_mm_inf(double rho, int n0, int n, double mu = 1.0) {
  TransformHandle h;
  h.min_abscissa = 0.0;
  h.provenance = "eta=mu product form";
  h.eval = [rho, n0, n, mu](cplx th) {
    return phat_mm_inf_normalized(rho, n0, n, th / mu).to_complex() / mu;
  };
  return h;
}

/// Closed-form p_n(t) for eta = mu (normalized t = mu * user time):
/// binomial sum against the shifted-exponential kernel.
inline double p_mm_inf_closed(double rho, int n0, int n, double t) {
  if (t < 0.0) throw std::invalid_argument("t >= 0 required");
  if (t == 0.0) return n == n0 ? 1.0 : 0.0;
  const double w = -std::expm1(-t);  // 1 - e^{-t}
  double sum = 0.0;
  const int jmax = std::min(n, n0);
  for (int j = 0; j <= jmax; ++j) {
    double logterm = lgamma_r(n0 + 1.0) - lgamma_r(j + 1.0) - lgamma_r(n0 - j + 1.0) -
                     j * std::log(rho) - j * t + (n0 - 2.0 * j) * std::log(w) -
                     lgamma_r(n - j + 1.0);
    sum += std::exp(logterm);
  }
  return std::exp(n * std::log(rho) + n * std::log(w) - rho * w) * sum;
}

/// Spectral-series route for the same quantity: sum over the discrete
/// spectrum with weights given by finite binomial sums (long double
/// accumulation; the alternating sums cancel heavily).
inline double p_mm_inf_spectral(double rho, int n0, int n, double t, double term_tol = 1e-16) {
  auto f_neg = [&](int nn, int k) -> long double {
    long double s = 0.0L;
    long double c = 1.0L;  // C(k, j), exact for the sizes used here
    for (int j = 0; j <= std::min(k, nn); ++j) {
      if (j > 0) c = c * (k - j + 1) / j;
      long double term = c * std::exp((long double)((nn - j) * std::log(rho) -
                                                    lgamma_r(nn - j + 1.0)));
      s += (j % 2 == 0) ? term : -term;
    }
    return s;
  };
  long double acc = 0.0L;
  long double scale = std::exp((long double)(lgamma_r(n0 + 1.0) - rho - n0 * std::log(rho)));
  int calm = 0;
  for (int k = 0; k < 400; ++k) {
    long double w = std::exp((long double)(k * std::log(rho) - lgamma_r(k + 1.0) - k * t));
    long double term = w * f_neg(n0, k) * f_neg(n, k);
    acc += term;
    if (std::abs((double)term) < term_tol * std::max(1.0, std::abs((double)acc)) && k > rho) {
      if (++calm >= 3) break;
    } else {
      calm = 0;
    }
  }
  return static_cast<double>(scale * acc);
}

// ---------------------------------------------------------------------------
// eta -> infinity: loss system
// ---------------------------------------------------------------------------

/// Column evaluator for the loss-system limit (states 0..m only).
class LossSolver {
 public:
  LossSolver(const ModelParams& p, int n0) : p_(p), n0_(n0) {
    if (n0 < 0 || n0 > p.m) throw std::domain_error("loss system: n0 in [0, m] required");
  }

  std::vector<LogComplex> column_normalized(cplx th) const {
    const double rho = p_.rho();
    const int m = p_.m;
    const int n0 = n0_;
    auto F = f_column(m + 1, th, rho);
    std::vector<LogComplex> G(m + 2);
    for (int n = 0; n <= m + 1; ++n) G[n] = detail::g_scaled_series(n, th, rho);
    LogComplex omega =
        (G[m + 1] * (m + 1.0) - G[m] * rho) / (F[m] * rho - F[m + 1] * (m + 1.0));
    LogComplex pre =
        LogComplex::from_log(cplx(lgamma_r(n0 + 1.0) - rho - n0 * std::log(rho), 0.0));
    std::vector<LogComplex> out(m + 1);
    for (int n = 0; n <= m; ++n) {
      out[n] = (n >= n0) ? pre * F[n0] * (G[n] + omega * F[n])
                         : pre * F[n] * (G[n0] + omega * F[n0]);
    }
    return out;
  }

  std::vector<cplx> column(cplx theta_user) const {
    auto col = column_normalized(theta_user / p_.mu);
    std::vector<cplx> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i].to_complex() / p_.mu;
    return out;
  }

 private:
  ModelParams p_;
  int n0_;
};

/// All-servers-occupied transform for the loss system, three algebraically
/// equivalent forms plus an independent integral representation.
enum class BlockingRoute { wronskian_reduced, contiguous, gamma_sums, integral };

inline LogComplex blocking_loss_normalized(double rho, int m, int n0, cplx th,
                                           BlockingRoute route) {
  if (n0 < 0 || n0 > m) throw std::domain_error("loss system: n0 in [0, m] required");
  switch (route) {
    case BlockingRoute::wronskian_reduced: {
      auto F = f_column(m + 1, th, rho);
      LogComplex pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - lgamma_r(m + 1.0) + (m - n0) * std::log(rho), 0.0));
      return pre * F[n0] / (F[m + 1] * (m + 1.0) - F[m] * rho);
    }
    case BlockingRoute::contiguous: {
      LogComplex pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - lgamma_r(m + 1.0) + (m - n0) * std::log(rho), 0.0));
      return pre * sol_F(n0, th, rho) / (sol_F(m, th + 1.0, rho) * th);
    }
    case BlockingRoute::gamma_sums: {
      auto gsum = [&](int top, double extra) {
        LogComplex s = LogComplex::zero();
        for (int l = 0; l <= top; ++l) {
          s += LogComplex::from_log(lgamma_r(top + 1.0) - lgamma_r(l + 1.0) -
                                    lgamma_r(top - l + 1.0) - l * std::log(rho) +
                                    lgamma_c(th + (l + extra)));
        }
        return s;
      };
      return gsum(n0, 0.0) / gsum(m, 1.0);
    }
    case BlockingRoute::integral: {
      if (n0 != 0)
        throw std::domain_error("integral blocking form is defined for an empty start");
      // Gamma(theta) / Int_0^inf e^{-xi} xi^theta (1 + xi/rho)^m dxi.
      // Substituting xi = u^4 removes the algebraic endpoint at 0, after
      // which composite Simpson converges at full order.
      auto integrand_log = [&](double u) {
        const double xi = u * u * u * u;
        return -xi + th * std::log(xi) + static_cast<double>(m) * std::log1p(xi / rho) +
               std::log(4.0 * u * u * u);
      };
      double X = 3.0 * (std::abs(th.real()) + m + 20.0) + 50.0;
      const double peak = integrand_log(std::pow(std::max(1.0, th.real()), 0.25)).real();
      while (integrand_log(std::pow(X, 0.25)).real() - peak > -60.0) X *= 1.5;
      const double U = std::pow(X, 0.25);
      cplx integral(0.0, 0.0);
      int K = 2000;
      cplx prev(0.0, 0.0);
      for (int pass = 0; pass < 8; ++pass) {
        const double h = U / K;
        cplx s(0.0, 0.0);
        for (int j = 1; j < K; ++j) {
          const double w = (j % 2 == 1) ? 4.0 : 2.0;
          s += w * std::exp(integrand_log(j * h));
        }
        s += std::exp(integrand_log(U));
        integral = s * (h / 3.0);
        if (pass > 0 && std::abs(integral - prev) <= 1e-13 * std::abs(integral)) break;
        prev = integral;
        K *= 2;
      }
      return gamma_lc(th) / LogComplex::from(integral);
    }
  }
  throw std::logic_error("unreachable");
}

inline TransformHandle phat_loss_blocking(const ModelParams& p, int n0,
                                          BlockingRoute route = BlockingRoute::contiguous) {
  TransformHandle h;
  h.provenance = "loss-system blocking transform";
  const double rho = p.rho();
  const int m = p.m;
  const double mu = p.mu;
  h.eval = [rho, m, n0, mu, route](cplx th) {
    return blocking_loss_normalized(rho, m, n0, th / mu, route).to_complex() / mu;
  };
  return h;
}

// ---------------------------------------------------------------------------
// all-servers-busy probability transform
// ---------------------------------------------------------------------------

/**
 * Laplace transform of P[N(t) >= m], built on the index-shift identity for
 * tail sums of sol_H / sol_I (the whole tail collapses to one evaluation at
 * theta + eta).
 */
inline LogComplex busy_normalized(const ModelParams& p, int n0, cplx th,
                                  const ContourConfig& cfg = ContourConfig{}) {
  const double rho = p.rho();
  const double eta = p.eta_n();
  const int m = p.m;
  if (!(eta > 0.0)) throw std::invalid_argument("busy transform requires eta > 0");
  auto F = f_column(m + 1, th, rho);
  auto H = h_column(std::max(m, n0) + 1, th, p, cfg);
  LogComplex den = F[m] * H[m - 1] - H[m] * F[m - 1];
  if (n0 <= m) {
    LogComplex pre = LogComplex::from_log(
        cplx(lgamma_r(n0 + 1.0) - lgamma_r(m + 1.0) + (m - n0 - 1) * std::log(rho), 0.0));
    LogComplex h_shift = detail::kummer_c1(rho / eta, m / eta, (th + eta) / eta, 1e-14);
    return pre * F[n0] * h_shift / den;
  }
  // start above the threshold
  ContourConfig icfg = cfg;
  icfg.max_nodes = std::max(cfg.max_nodes, 40000);
  auto I = i_column(n0 + 1, th, p, icfg);
  auto Hs = h_column(n0 + 1, th + eta, p, cfg);
  auto Is = i_column(n0 + 1, th + eta, p, icfg);
  LogComplex rat2 = (I[m] * F[m - 1] - I[m - 1] * F[m]) / den;
  LogComplex pre2 = LogComplex::from_log(
      -std::log(rho) - rho / eta +
      (n0 - m - 1.0 + (th + static_cast<double>(m)) / eta) * std::log(eta / rho) +
      lgamma_c(th / eta) + lgamma_r(n0 - m + 1.0 + m / eta));
  LogComplex brace = H[n0] * (Is[n0 - 1] - Is[m - 1]) + I[n0] * Hs[n0 - 1] +
                     rat2 * H[n0] * Hs[m - 1];
  return pre2 * brace;
}

inline TransformHandle busy_transform(const ModelParams& p, int n0,
                                      ContourConfig cfg = ContourConfig{}) {
  TransformHandle h;
  if (n0 <= p.m) {
    h.provenance = "busy probability (start below threshold, shift identity)";
    h.eval = [p, n0, cfg](cplx th) {
      return busy_normalized(p, n0, th / p.mu, cfg).to_complex() / p.mu;
    };
    return h;
  }
  // Start above the threshold: the literal one-evaluation form needs the
  // algebraic solution at arbitrary inversion nodes, where its quadrature is
  // the fragile piece of the toolbox.  The handle evaluates the equivalent
  // truncated tail sum of the distribution column instead (superexponential
  // column decay makes the truncation analytic); the literal form is kept
  // above and cross-checked against this sum in the test suite.
  auto solver = std::make_shared<TransientSolver>(p, n0, -1, cfg);
  h.provenance = "busy probability (start above threshold, tail sum)";
  const int m = p.m;
  h.eval = [solver, m](cplx th) {
    auto col = solver->column(th);
    cplx sum(0.0, 0.0);
    for (int n = m; n < static_cast<int>(col.size()); ++n) sum += col[n];
    return sum;
  };
  return h;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Transform of p_n(t) for the eta = 0 model, one target state.
inline TransformHandle phat_mmm(const ModelParams& p, int n0, int n, int n_max = -1) {
  auto solver = std::make_shared<MmmSolver>(p, n0, n_max);
  if (n > solver->n_max()) throw std::invalid_argument("target state beyond truncation");
  TransformHandle h;
  h.provenance = "no-abandonment transform";
  h.eval = [solver, n](cplx th) { return solver->column(th)[n]; };
  return h;
}

/// Transform of p_n(t) for the loss-system limit, one target state.
inline TransformHandle phat_loss(const ModelParams& p, int n0, int n) {
  if (n < 0 || n > p.m) throw std::domain_error("loss system: n in [0, m] required");
  auto solver = std::make_shared<LossSolver>(p, n0);
  TransformHandle h;
  h.provenance = "loss-system transform";
  h.eval = [solver, n](cplx th) { return solver->column(th)[n]; };
  return h;
}

/**
 * Transform of p_n(t) for one target state, dispatching on the abandonment
 * rate: eta > 0 uses the general solver, eta = 0 the no-abandonment solver.
 */
inline TransformHandle phat(const ModelParams& p, int n0, int n, int n_max = -1,
                            ContourConfig cfg = ContourConfig{}) {
  if (p.eta_n() == 0.0) return phat_mmm(p, n0, n, n_max);
  auto solver = std::make_shared<TransientSolver>(p, n0, n_max, cfg);
  if (n > solver->n_max()) throw std::invalid_argument("target state beyond truncation");
  TransformHandle h;
  h.provenance = "general abandonment transform";
  h.eval = [solver, n](cplx th) { return solver->column(th)[n]; };
  return h;
}

}  // namespace erlang_a

#endif  // ERLANG_A_TRANSFORMS_HPP
