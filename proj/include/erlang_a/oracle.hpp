#ifndef ERLANG_A_ORACLE_HPP
#define ERLANG_A_ORACLE_HPP

/**
 * @file oracle.hpp
 * @brief Independent ground-truth engines for the queue: uniformization and
 *        Runge-Kutta transient solvers, an absorbing-chain first-passage
 *        solver, and an event-driven Monte Carlo simulator.
 *
 * These never touch the transform machinery, so they can arbitrate it.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "erlang_a/model.hpp"

namespace erlang_a {

struct OracleConfig {
  int n_max = -1;              ///< truncation; -1 = automatic
  double poisson_tol = 1e-13;  ///< uniformization series remainder
  double rk_tol = 1e-10;       ///< adaptive RK step tolerance
  std::uint64_t seed = 12345;
  int replications = 100000;
};

namespace detail {

/// One application of the uniformized transition operator P = I + Q/Lambda
/// (row-vector convention), with absorbing states kept in place.
inline void apply_uniformized(const std::vector<double>& birth, const std::vector<double>& death,
                              double lam, const std::vector<double>& v, std::vector<double>& out) {
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    double stay = 1.0 - (birth[i] + death[i]) / lam;
    double acc = v[i] * stay;
    if (i > 0) acc += v[i - 1] * (birth[i - 1] / lam);
    if (i + 1 < n) acc += v[i + 1] * (death[i + 1] / lam);
    out[i] = acc;
  }
}

inline std::vector<double> birth_vector(const ModelParams& p, int n_max, bool absorb_top) {
  std::vector<double> b(n_max + 1);
  for (int i = 0; i <= n_max; ++i) b[i] = birth_rate(p, i);
  b[n_max] = 0.0;  // reflecting truncation (or absorbing target)
  (void)absorb_top;
  return b;
}

inline std::vector<double> death_vector(const ModelParams& p, int n_max, bool absorb_top) {
  std::vector<double> d(n_max + 1);
  for (int i = 0; i <= n_max; ++i) d[i] = death_rate(p, i);
  if (absorb_top) d[n_max] = 0.0;
  return d;
}

/**
 * exp(Q t) applied to an arbitrary start vector by uniformization: the
 * Poisson-weighted average of powers of P.  Weights are evaluated in log
 * space so horizons with Lambda*t in the thousands do not underflow.
 */
inline std::vector<double> uniformized_evolve(const std::vector<double>& birth,
                                              const std::vector<double>& death,
                                              std::vector<double> v, double t, double tol) {
  const int n = static_cast<int>(birth.size());
  double lam = 0.0;
  for (int i = 0; i < n; ++i) lam = std::max(lam, birth[i] + death[i]);
  lam = std::max(lam * 1.05, 1e-9);

  const double lt = lam * t;
  if (lt == 0.0) return v;

  std::vector<double> tmp(n), acc(n, 0.0);
  double cum = 0.0;
  const double log_lt = std::log(lt);
  for (int k = 0;; ++k) {
    const double logw = k * log_lt - lt - lgamma_r(k + 1.0);
    const double w = std::exp(logw);
    if (w > 0.0) {
      for (int i = 0; i < n; ++i) acc[i] += w * v[i];
      cum += w;
    }
    if (cum >= 1.0 - tol && k > lt) break;
    if (k > 10.0 * (lt + 50.0) + 1e6) break;  // safety
    apply_uniformized(birth, death, lam, v, tmp);
    v.swap(tmp);
  }
  return acc;
}

/// exp(Q t) applied to the delta at n0.
inline std::vector<double> uniformized_pmf(const std::vector<double>& birth,
                                           const std::vector<double>& death, int n0, double t,
                                           double tol) {
  std::vector<double> v(birth.size(), 0.0);
  v[n0] = 1.0;
  return uniformized_evolve(birth, death, std::move(v), t, tol);
}

}  // namespace detail

/**
 * Transient distribution p_n(t) of the truncated queue by uniformization.
 * Works in user time units (t is multiplied by mu internally).
 */
inline Pmf transient_oracle(const ModelParams& p, int n0, double t,
                            const OracleConfig& cfg = OracleConfig{}) {
  if (t < 0.0) throw std::invalid_argument("transient_oracle: t >= 0 required");
  int n_max = cfg.n_max > 0 ? cfg.n_max : default_truncation(p, n0);
  if (n0 > n_max) throw std::invalid_argument("transient_oracle: n0 beyond truncation");
  auto birth = detail::birth_vector(p, n_max, false);
  auto death = detail::death_vector(p, n_max, false);
  Pmf out;
  out.values = detail::uniformized_pmf(birth, death, n0, t * p.mu, cfg.poisson_tol);
  double s = out.total();
  out.tail_mass = std::max(0.0, 1.0 - s);
  return out;
}

/**
 * Same distribution by an embedded Runge-Kutta-Fehlberg 4(5) integration of
 * the forward equations; second, structurally different route.
 */
inline Pmf transient_oracle_rk(const ModelParams& p, int n0, double t,
                               const OracleConfig& cfg = OracleConfig{}) {
  int n_max = cfg.n_max > 0 ? cfg.n_max : default_truncation(p, n0);
  auto birth = detail::birth_vector(p, n_max, false);
  auto death = detail::death_vector(p, n_max, false);
  const int n = n_max + 1;
  auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
    for (int i = 0; i < n; ++i) {
      double acc = -(birth[i] + death[i]) * y[i];
      if (i > 0) acc += birth[i - 1] * y[i - 1];
      if (i + 1 < n) acc += death[i + 1] * y[i + 1];
      dy[i] = acc;
    }
  };

  std::vector<double> y(n, 0.0);
  y[n0] = 1.0;
  double tau = t * p.mu;
  double x = 0.0;
  double h = std::min(0.1, tau > 0 ? tau : 0.1);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), yt(n), y4(n), y5(n);

  while (x < tau) {
    h = std::min(h, tau - x);
    // Cash-Karp coefficients
    deriv(y, k1);
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * 0.2 * k1[i];
    deriv(yt, k2);
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (0.075 * k1[i] + 0.225 * k2[i]);
    deriv(yt, k3);
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (0.3 * k1[i] - 0.9 * k2[i] + 1.2 * k3[i]);
    deriv(yt, k4);
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (-11.0 / 54.0 * k1[i] + 2.5 * k2[i] - 70.0 / 27.0 * k3[i] +
                          35.0 / 27.0 * k4[i]);
    deriv(yt, k5);
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (1631.0 / 55296.0 * k1[i] + 175.0 / 512.0 * k2[i] +
                          575.0 / 13824.0 * k3[i] + 44275.0 / 110592.0 * k4[i] +
                          253.0 / 4096.0 * k5[i]);
    deriv(yt, k6);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      y5[i] = y[i] + h * (37.0 / 378.0 * k1[i] + 250.0 / 621.0 * k3[i] +
                          125.0 / 594.0 * k4[i] + 512.0 / 1771.0 * k6[i]);
      y4[i] = y[i] + h * (2825.0 / 27648.0 * k1[i] + 18575.0 / 48384.0 * k3[i] +
                          13525.0 / 55296.0 * k4[i] + 277.0 / 14336.0 * k5[i] + 0.25 * k6[i]);
      err = std::max(err, std::abs(y5[i] - y4[i]));
    }
    if (err <= cfg.rk_tol || h < 1e-12) {
      x += h;
      y.swap(y5);
    }
    double scale = err > 0.0 ? 0.9 * std::pow(cfg.rk_tol / err, 0.2) : 2.0;
    h *= std::clamp(scale, 0.2, 2.0);
  }
  Pmf out;
  out.values = std::move(y);
  out.tail_mass = std::max(0.0, 1.0 - out.total());
  return out;
}

/// First-passage law to the level n_star, from the absorbing chain.
struct FptCurve {
  std::vector<double> t;        ///< user time units
  std::vector<double> density;  ///< Q_n(t)
  std::vector<double> cdf;      ///< P[tau <= t]
};

/**
 * Absorbing-chain first-passage oracle: makes n_star absorbing, evolves the
 * chain by uniformization from start state n, and reads the density off the
 * killing flux rho * p_{n_star-1}(t).
 */
inline FptCurve fpt_oracle(const ModelParams& p, int start, int n_star,
                           const std::vector<double>& t_grid,
                           const OracleConfig& cfg = OracleConfig{}) {
  if (n_star <= p.m) throw std::invalid_argument("fpt_oracle: n_star > m required");
  if (start > n_star) throw std::invalid_argument("fpt_oracle: start <= n_star required");
  auto birth = detail::birth_vector(p, n_star, true);
  auto death = detail::death_vector(p, n_star, true);
  // absorbing top: no outflow from n_star
  birth[n_star] = 0.0;
  death[n_star] = 0.0;

  FptCurve out;
  out.t = t_grid;
  out.density.resize(t_grid.size());
  out.cdf.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (start == n_star) {
      out.cdf[i] = 1.0;
      out.density[i] = 0.0;  // delta at 0 not representable on a grid
      continue;
    }
    auto v = detail::uniformized_pmf(birth, death, start, t_grid[i] * p.mu, cfg.poisson_tol);
    out.cdf[i] = v[n_star];
    out.density[i] = p.mu * birth_rate(p, n_star - 1) * v[n_star - 1];
  }
  return out;
}

/// Mean first-passage time from the numerically integrated survival function.
inline double fpt_oracle_mean(const ModelParams& p, int start, int n_star,
                              const OracleConfig& cfg = OracleConfig{}) {
  if (start == n_star) return 0.0;
  auto birth = detail::birth_vector(p, n_star, true);
  auto death = detail::death_vector(p, n_star, true);
  birth[n_star] = 0.0;
  death[n_star] = 0.0;

  // integrate S(t) = 1 - CDF(t) with Simpson on an expanding grid, evolving
  // the distribution incrementally between nodes
  std::vector<double> v(n_star + 1, 0.0);
  v[start] = 1.0;
  double mean = 0.0;
  double s_prev = 1.0, s_prev2 = 1.0;
  double block = 4.0;
  const double h0 = block / 64.0;
  for (int blocks = 0; blocks < 100000; ++blocks) {
    const int steps = blocks < 2 ? 256 : 64;  // finer early, where S bends fastest
    const double h = block / steps;
    std::vector<double> s(steps + 1);
    s[0] = s_prev;
    for (int j = 1; j <= steps; ++j) {
      v = detail::uniformized_evolve(birth, death, std::move(v), h * p.mu, cfg.poisson_tol);
      s[j] = 1.0 - v[n_star];
    }
    double block_int = 0.0;
    for (int j = 0; j + 2 <= steps; j += 2)
      block_int += h / 3.0 * (s[j] + 4.0 * s[j + 1] + s[j + 2]);
    mean += block_int;
    s_prev2 = s[steps - 1];
    s_prev = s[steps];
    if (s_prev < 1e-9) {
      // exponential tail estimate from the last two points
      double rate = std::log(std::max(s_prev2, 1e-300) / std::max(s_prev, 1e-300)) / h;
      if (rate > 0.0) mean += s_prev / rate;
      break;
    }
  }
  (void)h0;
  return mean;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

namespace detail {

/// xoshiro256++ with splitmix64 seeding; deterministic across platforms.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }
  std::uint64_t next() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }
  double uniform01() {  // in (0, 1]
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  std::uint64_t s_[4];
};

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t rep) {
  return seed ^ (0x9e3779b97f4a7c15ULL * (rep + 1));
}

}  // namespace detail

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

/// Monte Carlo pmf estimate at a single horizon (user time units).
inline std::vector<McEstimate> mc_pmf(const ModelParams& p, int n0, double t, int n_max,
                                      const OracleConfig& cfg = OracleConfig{}) {
  if (cfg.replications < 100)
    throw std::invalid_argument("mc_pmf: at least 100 replications required");
  std::vector<long> counts(n_max + 1, 0);
  const double tau = t * p.mu;
  for (int rep = 0; rep < cfg.replications; ++rep) {
    detail::Xoshiro256pp rng(detail::substream_seed(cfg.seed, rep));
    int n = n0;
    double clock = 0.0;
    for (;;) {
      double rb = birth_rate(p, n);
      double rd = death_rate(p, n);
      double total = rb + rd;
      clock += rng.exponential(total);
      if (clock > tau) break;
      n += (rng.uniform01() * total <= rb) ? 1 : -1;
    }
    if (n <= n_max) ++counts[n];
  }
  std::vector<McEstimate> out(n_max + 1);
  const double r = static_cast<double>(cfg.replications);
  for (int i = 0; i <= n_max; ++i) {
    double ph = counts[i] / r;
    out[i] = {ph, std::sqrt(std::max(ph * (1.0 - ph), 1e-300) / r),
              static_cast<long>(cfg.replications)};
  }
  return out;
}

/// Monte Carlo mean first-passage time to n_star (user time units).
inline McEstimate mc_fpt_mean(const ModelParams& p, int start, int n_star,
                              const OracleConfig& cfg = OracleConfig{}) {
  if (cfg.replications < 100)
    throw std::invalid_argument("mc_fpt_mean: at least 100 replications required");
  double sum = 0.0, sum2 = 0.0;
  for (int rep = 0; rep < cfg.replications; ++rep) {
    detail::Xoshiro256pp rng(detail::substream_seed(cfg.seed, rep));
    int n = start;
    double clock = 0.0;
    while (n != n_star) {
      double rb = birth_rate(p, n);
      double rd = death_rate(p, n);
      clock += rng.exponential(rb + rd);
      n += (rng.uniform01() * (rb + rd) <= rb) ? 1 : -1;
    }
    double v = clock / p.mu;
    sum += v;
    sum2 += v * v;
  }
  const double r = static_cast<double>(cfg.replications);
  McEstimate e;
  e.mean = sum / r;
  e.std_error = std::sqrt(std::max(sum2 / r - e.mean * e.mean, 0.0) / r);
  e.samples = cfg.replications;
  return e;
}

}  // namespace erlang_a

#endif  // ERLANG_A_ORACLE_HPP
