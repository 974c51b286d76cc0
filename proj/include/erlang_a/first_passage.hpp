#ifndef ERLANG_A_FIRST_PASSAGE_HPP
#define ERLANG_A_FIRST_PASSAGE_HPP

/**
 * @file first_passage.hpp
 * @brief First-passage-time transforms to an upper level and closed-form
 *        mean first-passage times.
 *
 * The transform of the passage time to n_star > m is a ratio of
 * generalized-Wronskian combinations of the above-threshold solutions.  Both
 * numerator and denominator carry a common 1/Gamma(theta/eta) factor that
 * vanishes at theta = 0; building them from the closed-form-seeded
 * cross-Wronskian recurrence removes that factor analytically, so the
 * evaluation is exact at the origin (where the transform must equal 1) and
 * stable for the tiny steps used by numerical differentiation.
 */

#include <memory>
#include <vector>

#include "erlang_a/inversion.hpp"
#include "erlang_a/model.hpp"
#include "erlang_a/special_functions.hpp"

namespace erlang_a {

/// A first-passage problem: start state and target level n_star > m.
struct FptSpec {
  int start;
  int n_star;
};

inline void validate(const FptSpec& spec, const ModelParams& p) {
  if (spec.n_star <= p.m)
    throw std::domain_error("first passage: n_star > m required");
  if (spec.start < 0 || spec.start > spec.n_star)
    throw std::domain_error("first passage: start in [0, n_star] required");
}

/**
 * Column evaluator for E[e^{-theta tau(n_star)} | N(0) = n], all start
 * states at once.  Requires eta > 0.
 */
class FptSolver {
 public:
  FptSolver(const ModelParams& p, int n_star) : p_(p), n_star_(n_star) {
    if (!(p.eta_n() > 0.0))
      throw std::invalid_argument("FptSolver requires eta > 0; use the eta = 0 form");
    if (n_star <= p.m) throw std::domain_error("first passage: n_star > m required");
  }

  int n_star() const { return n_star_; }

  /// Q-hat_n(theta) for n = 0..n_star, normalized units.
  std::vector<LogComplex> column_normalized(cplx th) const {
    const double rho = p_.rho();
    const double eta = p_.eta_n();
    const int m = p_.m;
    const int ns = n_star_;

    auto F = f_column(m + 1, th, rho);
    auto chi_lo = cross_wronskian_column(m, ns, th, p_);      // chi_m(k)
    auto chi_hi = cross_wronskian_column(m + 1, ns, th, p_);  // chi_{m+1}(k)
    // scaled numerator N_n = (m+1) F_{m+1} chi_m(n) - (m+eta) F_m chi_{m+1}(n);
    // chi_{m+1}(m) = -chi_m(m+1) by antisymmetry of the pair difference
    auto bracket = [&](int n) {
      LogComplex lo = chi_lo[n];
      LogComplex hi = (n == m) ? -wronskian_above_scaled(m, th, p_) : chi_hi[n];
      return F[m + 1] * (m + 1.0) * lo - F[m] * (m + eta) * hi;
    };
    LogComplex nstar_bracket = bracket(ns);

    std::vector<LogComplex> out(ns + 1);
    out[ns] = LogComplex::one();
    for (int n = m; n < ns; ++n) {
      // (rho/eta)^{ns-n} Gamma(n-m+1+m/eta)/Gamma(ns-m+1+m/eta) * N_n/N_ns
      LogComplex pref = LogComplex::from_log(
          cplx((ns - n) * std::log(rho / eta) + lgamma_r(n - m + 1.0 + m / eta) -
                   lgamma_r(ns - m + 1.0 + m / eta),
               0.0));
      out[n] = pref * bracket(n) / nstar_bracket;
    }
    for (int n = 0; n < m; ++n) {
      // rho^{ns-n} (n!/m!) eta^{m-ns+1} (rho/eta)^{(m+theta)/eta} e^{rho/eta}
      //   * F_n / (Gamma(ns-m+1+m/eta) N_ns)
      LogComplex pref = LogComplex::from_log(
          (ns - n) * std::log(rho) + lgamma_r(n + 1.0) - lgamma_r(m + 1.0) +
          (m - ns + 1.0) * std::log(eta) +
          ((static_cast<double>(m) + th) / eta) * std::log(rho / eta) + rho / eta -
          lgamma_r(ns - m + 1.0 + m / eta));
      out[n] = pref * F[n] / nstar_bracket;
    }
    return out;
  }

  std::vector<cplx> column(cplx theta_user) const {
    auto col = column_normalized(theta_user / p_.mu);
    std::vector<cplx> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i].to_complex();
    return out;
  }

 private:
  ModelParams p_;
  int n_star_;
};

inline TransformHandle qhat_mmm(const ModelParams& p, const FptSpec& spec);

/// Transform handle for one start state (user time units; the transform of a
/// stopping-time law is dimensionless, so only theta rescales).  eta = 0
/// routes to the no-abandonment form.
inline TransformHandle qhat(const ModelParams& p, const FptSpec& spec) {
  validate(spec, p);
  if (p.eta_n() == 0.0) return qhat_mmm(p, spec);
  auto solver = std::make_shared<FptSolver>(p, spec.n_star);
  TransformHandle h;
  h.provenance = "first-passage transform";
  const int n = spec.start;
  h.eval = [solver, n](cplx th) { return solver->column(th)[n]; };
  return h;
}

/// Infinite-server reduction (eta = mu): Q-hat = (n!/n_star!) rho^{n_star-n}
/// F_n / F_{n_star}.
inline LogComplex qhat_mm_inf_normalized(double rho, int n, int n_star, cplx th) {
  if (n == n_star) return LogComplex::one();
  LogComplex pref = LogComplex::from_log(
      cplx(lgamma_r(n + 1.0) - lgamma_r(n_star + 1.0) + (n_star - n) * std::log(rho), 0.0));
  return pref * sol_F(n, th, rho) / sol_F(n_star, th, rho);
}

inline TransformHandle qhat_mm_inf(double rho, int n, int n_star, double mu = 1.0) {
  if (n > n_star) throw std::domain_error("first passage: start <= n_star required");
  TransformHandle h;
  h.provenance = "first-passage transform, eta = mu";
  h.eval = [rho, n, n_star, mu](cplx th) {
    return qhat_mm_inf_normalized(rho, n, n_star, th / mu).to_complex();
  };
  return h;
}

/// eta = 0 first-passage transform via the quadratic-root pair Z+-.
inline LogComplex qhat_mmm_normalized(double rho, int m, int n, int n_star, cplx th) {
  if (n == n_star) return LogComplex::one();
  const cplx s = rho + th + static_cast<double>(m);
  const cplx disc = s * s - 4.0 * m * rho;
  if (disc.imag() == 0.0 && disc.real() < 0.0) {
    throw std::domain_error("first passage: branch ambiguity, discriminant on the cut");
  }
  const cplx sq = std::sqrt(disc);
  const cplx zp = (s + sq) / (2.0 * rho), zm = (s - sq) / (2.0 * rho);
  const cplx lzp = std::log(zp), lzm = std::log(zm);
  auto F = f_column(m + 1, th, rho);

  auto combo = [&](int k) {
    // rho F_m (Z+ Z-^k - Z- Z+^k) + (m+1) F_{m+1} (Z+^k - Z-^k)
    LogComplex t1 = LogComplex::from_log(lzp + static_cast<double>(k) * lzm) -
                    LogComplex::from_log(lzm + static_cast<double>(k) * lzp);
    LogComplex t2 = LogComplex::from_log(static_cast<double>(k) * lzp) -
                    LogComplex::from_log(static_cast<double>(k) * lzm);
    return F[m] * rho * t1 + F[m + 1] * (m + 1.0) * t2;
  };
  LogComplex den = combo(n_star - m);
  if (n >= m) return combo(n - m) / den;
  LogComplex pref = LogComplex::from_log(cplx((m - n) * std::log(rho) + lgamma_r(n + 1.0) -
                                                  lgamma_r(m + 1.0),
                                              0.0));
  return pref * LogComplex::from(sq) * sol_F(n, th, rho) / den;
}

inline TransformHandle qhat_mmm(const ModelParams& p, const FptSpec& spec) {
  validate(spec, p);
  TransformHandle h;
  h.provenance = "first-passage transform, eta = 0";
  const double rho = p.rho();
  const int m = p.m, n = spec.start, ns = spec.n_star;
  const double mu = p.mu;
  h.eval = [rho, m, n, ns, mu](cplx th) {
    return qhat_mmm_normalized(rho, m, n, ns, th / mu).to_complex();
  };
  return h;
}

// ---------------------------------------------------------------------------
// mean first-passage times
// ---------------------------------------------------------------------------

/**
 * Closed-form conditional mean passage times for every start state
 * (user time units).  Above the threshold the terms are ratios of the
 * theta = 0 decaying solution; below it they are the explicit
 * factorial-power sums.  Requires eta > 0.
 */
inline std::vector<double> mean_fpt(const ModelParams& p, const FptSpec& spec) {
  validate(spec, p);
  const double eta = p.eta_n();
  if (!(eta > 0.0))
    throw std::invalid_argument("mean_fpt closed form requires eta > 0; use the recurrence");
  const double rho = p.rho();
  const int m = p.m, ns = spec.n_star;

  auto log_h0 = [&](int k) { return log_h_at_zero(k, p); };
  // E_m = sum_{l=0}^m (m!/l!) rho^{l-m}
  double e_m = 0.0;
  for (int l = 0; l <= m; ++l)
    e_m += std::exp(lgamma_r(m + 1.0) - lgamma_r(l + 1.0) + (l - m) * std::log(rho));

  std::vector<double> q(ns + 1, 0.0);
  // T(J) = [sum_{l=m+1}^{J} h0(l) + h0(m) E_m] / (rho h0(J)), accumulated as
  // a suffix sum so every start state comes out of one sweep
  std::vector<double> t_of_j(ns, 0.0);
  for (int J = m; J < ns; ++J) {
    double s = 0.0;
    const double lhJ = log_h0(J);
    for (int l = m + 1; l <= J; ++l) s += std::exp(log_h0(l) - lhJ);
    s += std::exp(log_h0(m) - lhJ) * e_m;
    t_of_j[J] = s / rho;
  }
  for (int n = ns - 1; n >= m; --n) q[n] = q[n + 1] + t_of_j[n];
  // below the threshold: q_n = q_m + sum_{j=n}^{m-1} j! rho^{-j} sum_l rho^{l-1}/l!
  for (int n = m - 1; n >= 0; --n) {
    double inner = 0.0;
    const int j = n;
    for (int l = 0; l <= j; ++l)
      inner += std::exp((l - 1.0) * std::log(rho) - lgamma_r(l + 1.0));
    q[n] = q[n + 1] + std::exp(lgamma_r(j + 1.0) - j * std::log(rho)) * inner;
  }
  for (double& v : q) v /= p.mu;
  return q;
}

/**
 * Mean passage times from the defining recurrence
 *   rho (q_{n+1} - q_n) + d(n) (q_{n-1} - q_n) = -1,  q_{n_star} = 0,
 * solved exactly by forward elimination of the increments (the n = 0
 * equation supplies the reflecting boundary).  Valid for any eta >= 0.
 */
inline std::vector<double> mean_fpt_recurrence(const ModelParams& p, const FptSpec& spec) {
  validate(spec, p);
  const double rho = p.rho();
  const int ns = spec.n_star;
  std::vector<double> d(ns, 0.0);  // d[j] = q_j - q_{j+1}
  d[0] = 1.0 / rho;
  for (int j = 1; j < ns; ++j) d[j] = (1.0 + death_rate(p, j) * d[j - 1]) / rho;
  std::vector<double> q(ns + 1, 0.0);
  for (int n = ns - 1; n >= 0; --n) q[n] = q[n + 1] + d[n];
  for (double& v : q) v /= p.mu;
  return q;
}

}  // namespace erlang_a

#endif  // ERLANG_A_FIRST_PASSAGE_HPP
