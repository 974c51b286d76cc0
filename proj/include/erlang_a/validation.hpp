#ifndef ERLANG_A_VALIDATION_HPP
#define ERLANG_A_VALIDATION_HPP

/**
 * @file validation.hpp
 * @brief Self-contained identity suite: every structural identity the
 *        library relies on, runnable from the command line.
 *
 * Each check reports a scalar metric against its tolerance so failures are
 * diagnosable from the run output alone.
 */

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "erlang_a/diffusion.hpp"
#include "erlang_a/first_passage.hpp"
#include "erlang_a/oracle.hpp"
#include "erlang_a/transforms.hpp"

namespace erlang_a {

struct CheckResult {
  std::string name;
  bool pass;
  double metric;  ///< worst observed deviation
  double tol;
};

struct ValidationConfig {
  std::uint64_t seed = 20240601;
  int draws = 40;        ///< random draws per property
  bool full = false;     ///< include the slower cross-checks
};

namespace detail {

class ValidationRun {
 public:
  explicit ValidationRun(const ValidationConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  std::vector<CheckResult> run() {
    special_functions();
    model_core();
    transient();
    limits();
    first_passage_checks();
    inversion_checks();
    diffusion_checks();
    return results_;
  }

 private:
  ValidationConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<CheckResult> results_;

  double u01() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  void record(const std::string& name, double metric, double tol) {
    results_.push_back({name, metric < tol, metric, tol});
  }

  ContourConfig quad() {
    ContourConfig c;
    c.mode = ContourConfig::Mode::quadrature;
    return c;
  }

  struct Draw {
    double rho, eta;
    int m, n;
    cplx th;
  };
  Draw draw() {
    Draw d;
    d.rho = 0.1 + 9.9 * u01();
    d.eta = 0.2 + 4.8 * u01();
    d.m = 1 + static_cast<int>(5.0 * u01());
    d.n = d.m - 1 + static_cast<int>(12.0 * u01());
    d.th = cplx(0.1 + 4.9 * u01(), -5.0 + 10.0 * u01());
    return d;
  }

  static double resid3(const LogComplex& lo, const LogComplex& mid, const LogComplex& hi,
                       double rho, cplx coef, double up) {
    LogComplex t1 = hi * up, t2 = lo * rho, t3 = mid * coef;
    LogComplex r = t1 + t2 - t3;
    if (r.is_zero()) return 0.0;
    return std::exp(r.log_abs() - std::max({t1.log_abs(), t2.log_abs(), t3.log_abs()}));
  }

  void special_functions() {
    double w_above = 0, w_below = 0, w_thresh = 0, rec_fg = 0, rec_hi = 0;
    for (int i = 0; i < cfg_.draws; ++i) {
      Draw d = draw();
      ModelParams p = ModelParams::normalized(d.rho, d.m, d.eta);
      auto cfg = quad();
      LogComplex hn = sol_H(d.n, d.th, p, cfg), hn1 = sol_H(d.n + 1, d.th, p, cfg);
      LogComplex in = sol_I(d.n, d.th, p, cfg), in1 = sol_I(d.n + 1, d.th, p, cfg);
      w_above = std::max(w_above, rel_diff(hn * in1 - hn1 * in, wronskian_above(d.n, d.th, p)));
      LogComplex fn = sol_F(d.n, d.th, d.rho), fn1 = sol_F(d.n + 1, d.th, d.rho);
      LogComplex gn = sol_G(d.n, d.th, d.rho, cfg), gn1 = sol_G(d.n + 1, d.th, d.rho, cfg);
      w_below = std::max(w_below, rel_diff(gn * fn1 - gn1 * fn, wronskian_below(d.n, d.th, d.rho)));
      LogComplex th_comb = sol_I(d.m, d.th, p, cfg) * sol_H(d.m - 1, d.th, p, cfg) -
                           sol_I(d.m - 1, d.th, p, cfg) * sol_H(d.m, d.th, p, cfg);
      w_thresh = std::max(w_thresh, rel_diff(th_comb, wronskian_above(d.m - 1, d.th, p)));

      int nf = std::max(1, d.n);
      rec_fg = std::max({rec_fg,
                         resid3(sol_F(nf - 1, d.th, d.rho), sol_F(nf, d.th, d.rho),
                                sol_F(nf + 1, d.th, d.rho), d.rho, d.th + (d.rho + nf),
                                nf + 1.0),
                         resid3(sol_G(nf - 1, d.th, d.rho, cfg), sol_G(nf, d.th, d.rho, cfg),
                                sol_G(nf + 1, d.th, d.rho, cfg), d.rho, d.th + (d.rho + nf),
                                nf + 1.0)});
      int nh = std::max(d.m, d.n);
      cplx coef = d.th + (d.rho + d.m + (nh - d.m) * d.eta);
      double up = d.m + (nh - d.m + 1) * d.eta;
      rec_hi = std::max({rec_hi,
                         resid3(sol_H(nh - 1, d.th, p, cfg), sol_H(nh, d.th, p, cfg),
                                sol_H(nh + 1, d.th, p, cfg), d.rho, coef, up),
                         resid3(sol_I(nh - 1, d.th, p, cfg), sol_I(nh, d.th, p, cfg),
                                sol_I(nh + 1, d.th, p, cfg), d.rho, coef, up)});
    }
    record("wronskian: decaying/algebraic pair closed form", w_above, 1e-9);
    record("wronskian: regular/loop pair closed form", w_below, 1e-9);
    record("wronskian: threshold special case", w_thresh, 1e-9);
    record("recurrence residuals: regular pair", rec_fg, 1e-9);
    record("recurrence residuals: threshold pair", rec_hi, 1e-9);

    // boundary identities at the empty queue
    double bndf = 0, bndg = 0, shift = 0, fsum_h = 0, fsum_i = 0, contig = 0;
    for (int i = 0; i < 8; ++i) {
      Draw d = draw();
      ModelParams p = ModelParams::normalized(d.rho, d.m, d.eta);
      auto cfg = quad();
      LogComplex fb = sol_F(1, d.th, d.rho) - sol_F(0, d.th, d.rho) * (d.rho + d.th);
      bndf = std::max(bndf, fb.is_zero() ? 0.0
                                         : std::exp(fb.log_abs()) / std::abs(d.rho + d.th));
      LogComplex gb = sol_G(1, d.th, d.rho, cfg) - sol_G(0, d.th, d.rho, cfg) * (d.rho + d.th);
      LogComplex expect =
          -LogComplex::from_log(d.rho + d.th * std::log(d.rho) - lgamma_c(d.th));
      bndg = std::max(bndg, rel_diff(gb, expect));

      // tail-sum shift identity
      LogComplex sum = LogComplex::zero();
      ContourConfig scfg;
      scfg.mode = ContourConfig::Mode::series;
      for (int n = p.m;; ++n) {
        LogComplex h = sol_H(n, d.th, p, scfg);
        sum += h;
        if (h.log_abs() < sum.log_abs() - 40.0 || n > p.m + 4000) break;
      }
      shift = std::max(shift, rel_diff(sum, sol_H(p.m - 1, d.th + d.eta, p, cfg)));

      // finite partial sums collapse to shifted endpoint evaluations
      int M = p.m + 1 + static_cast<int>(10.0 * u01());
      LogComplex hsum = LogComplex::zero(), isum = LogComplex::zero();
      for (int n = p.m; n < M; ++n) {
        hsum += sol_H(n, d.th, p, cfg);
        isum += sol_I(n, d.th, p, cfg);
      }
      cplx sh = d.th + d.eta;
      fsum_h = std::max(fsum_h, rel_diff(hsum, sol_H(p.m - 1, sh, p, cfg) -
                                                   sol_H(M - 1, sh, p, cfg)));
      fsum_i = std::max(fsum_i, rel_diff(isum, sol_I(M - 1, sh, p, cfg) -
                                                   sol_I(p.m - 1, sh, p, cfg)));

      LogComplex lhs = sol_F(d.m, d.th + 1.0, d.rho) * d.th;
      LogComplex rhs =
          sol_F(d.m + 1, d.th, d.rho) * (d.m + 1.0) - sol_F(d.m, d.th, d.rho) * d.rho;
      contig = std::max(contig, rel_diff(lhs, rhs));
    }
    record("boundary identity: regular solution", bndf, 1e-13);
    record("boundary identity: loop solution", bndg, 1e-9);
    record("tail-sum shift identity", shift, 1e-8);
    record("finite sum shift: decaying solution", fsum_h, 1e-8);
    record("finite sum shift: algebraic solution", fsum_i, 1e-8);
    record("contiguous relation theta F_m(theta+1)", contig, 1e-10);
  }

  void model_core() {
    double db = 0, pois = 0;
    for (auto [rho, m, eta] : {std::tuple{0.8, 2, 0.5}, {5.0, 3, 2.0}, {1.5, 1, 0.25}}) {
      ModelParams p = ModelParams::normalized(rho, m, eta);
      Pmf pmf = steady_state(p);
      for (int n = 0; n < pmf.n_max(); ++n) {
        double lhs = rho * pmf.values[n];
        double rhs = death_rate(p, n + 1) * pmf.values[n + 1];
        if (lhs > 1e-300) db = std::max(db, std::abs(lhs - rhs) / lhs);
      }
    }
    record("stationary detailed balance", db, 1e-12);
    {
      ModelParams p = ModelParams::normalized(3.2, 4, 1.0);
      Pmf pmf = steady_state(p);
      for (int n = 0; n <= pmf.n_max(); ++n) {
        double poisson = std::exp(-3.2 + n * std::log(3.2) - lgamma_r(n + 1.0));
        pois = std::max(pois, std::abs(pmf.values[n] - poisson));
      }
      record("stationary law is Poisson at eta = mu", pois, 1e-12);
    }
  }

  void transient() {
    // total probability, initial-condition recovery, defining equations
    ModelParams p = ModelParams::normalized(0.8, 2, 0.5);
    TransientSolver solver(p, 0, default_truncation(p, 0) + 20);
    cplx th(1.0, 0.0);
    auto col = solver.column(th);
    cplx sum(0.0, 0.0);
    for (cplx v : col) sum += v;
    record("transform column sums to 1/theta", std::abs(sum - 1.0 / th), 1e-8);

    double delta_dev = 0;
    for (int n0 : {0, 2, 5}) {
      TransientSolver s2(p, n0, 14);
      auto c2 = s2.column(cplx(1e4, 0.0));
      for (int n = 0; n <= 10; ++n) {
        delta_dev = std::max(delta_dev,
                             std::abs(1e4 * c2[n].real() - (n == n0 ? 1.0 : 0.0)));
      }
    }
    record("initial condition recovered at large theta", delta_dev, 1e-3);

    double resid = 0;
    for (int n0 : {0, 2, 6}) {
      TransientSolver s3(p, n0, 20);
      cplx t3(1.2, 0.9);
      auto c3 = s3.column_normalized(t3);
      for (int n : {0, 1, 2, 3, 5, n0 > 0 ? n0 : 1, n0 + 1}) {
        if (n > 19 || n < 0) continue;
        cplx coef;
        double up;
        if (n == 0) {
          LogComplex r = c3[1] - c3[0] * (p.rho() + t3);
          cplx rhs = (n0 == 0) ? cplx(-1.0, 0.0) : cplx(0.0, 0.0);
          resid = std::max(resid, std::abs(r.to_complex() - rhs) /
                                      std::max(std::abs(c3[1].to_complex()), 1.0));
          continue;
        }
        if (n < p.m) {
          coef = t3 + (p.rho() + n);
          up = n + 1.0;
        } else {
          coef = t3 + (p.rho() + p.m + (n - p.m) * p.eta_n());
          up = p.m + (n - p.m + 1) * p.eta_n();
        }
        LogComplex r = c3[n + 1] * up + c3[n - 1] * p.rho() - c3[n] * coef;
        cplx rhs = (n == n0) ? cplx(-1.0, 0.0) : cplx(0.0, 0.0);
        double scale = std::max(std::exp(c3[n].log_abs()) * std::abs(coef), 1.0);
        resid = std::max(resid, std::abs(r.to_complex() - rhs) / scale);
      }
    }
    record("transformed forward equations with delta source", resid, 1e-8);

    // stationary limit at theta = 1e-6 (absolute; the Abelian remainder is
    // O(theta) pointwise)
    double stat_dev = 0;
    for (auto [rho, m, eta, n0] : {std::tuple{0.8, 2, 0.5, 0}, {2.4, 2, 2.0, 6}}) {
      ModelParams q = ModelParams::normalized(rho, m, eta);
      int nm = default_truncation(q, n0);
      TransientSolver s4(q, n0, nm);
      Pmf stat = steady_state(q, nm);
      auto c4 = s4.column(cplx(1e-6, 0.0));
      for (int n = 0; n <= nm; ++n)
        stat_dev = std::max(stat_dev, std::abs(1e-6 * c4[n].real() - stat.values[n]));
    }
    record("stationary limit of theta * transform", stat_dev, 1e-5);

    // case-boundary agreement through the independent literal assembly
    double overlap = 0;
    for (int i = 0; i < 4; ++i) {
      double rho = 0.4 + 4.0 * u01();
      double eta = 0.3 + 2.0 * u01();
      int m = 2 + static_cast<int>(3.0 * u01());
      cplx t5(0.2 + 3.0 * u01(), -2.0 + 4.0 * u01());
      ModelParams q = ModelParams::normalized(rho, m, eta);
      auto cfg = quad();
      LogComplex den = sol_F(m, t5, rho) * sol_H(m - 1, t5, q, cfg) -
                       sol_H(m, t5, q, cfg) * sol_F(m - 1, t5, rho);
      // start below: middle and upper pieces at the threshold state
      int n0 = 1;
      LogComplex rat = (sol_H(m, t5, q, cfg) * detail_g(m - 1, t5, rho) -
                        detail_g(m, t5, rho) * sol_H(m - 1, t5, q, cfg)) /
                       den;
      LogComplex pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - rho - n0 * std::log(rho), 0.0));
      LogComplex mid_at_m =
          pre * sol_F(n0, t5, rho) * (detail_g(m, t5, rho) + rat * sol_F(m, t5, rho));
      LogComplex up_pre = LogComplex::from_log(
          cplx(lgamma_r(n0 + 1.0) - lgamma_r(m + 1.0) + (m - n0 - 1) * std::log(rho), 0.0));
      LogComplex up_at_m = up_pre * sol_F(n0, t5, rho) * sol_H(m, t5, q, cfg) / den;
      overlap = std::max(overlap, rel_diff(mid_at_m, up_at_m));
    }
    record("piecewise transform agreement at shared states", overlap, 1e-9);
  }

  static LogComplex detail_g(int n, cplx th, double rho) {
    return erlang_a::detail::g_scaled_series(n, th, rho);
  }

  void limits() {
    // eta = mu product form against the general solver
    double red = 0;
    {
      double rho = 1.3;
      ModelParams p = ModelParams::normalized(rho, 2, 1.0);
      for (int n0 : {0, 3}) {
        TransientSolver solver(p, n0, 14);
        cplx th(0.2 + 3.0 * u01(), -2.0 + 4.0 * u01());
        auto col = solver.column_normalized(th);
        for (int n : {0, 2, 5})
          red = std::max(red, rel_diff(col[n], phat_mm_inf_normalized(rho, n0, n, th)));
      }
    }
    record("eta = mu reduction of the general transform", red, 1e-9);

    // spectral series vs closed form
    double spec = 0;
    for (int n0 : {0, 3})
      for (int n : {0, 2, 5})
        for (double t : {0.4, 1.0, 2.5})
          spec = std::max(spec, std::abs(p_mm_inf_spectral(1.0, n0, n, t) -
                                         p_mm_inf_closed(1.0, n0, n, t)));
    record("spectral series vs closed form at eta = mu", spec, 1e-10);

    // small-eta limit vs the eta = 0 transform
    double mmm_dev = 0;
    {
      MmmSolver limit(ModelParams::normalized(1.5, 2, 0.0), 0, 40);
      TransientSolver general(ModelParams::normalized(1.5, 2, 1e-4), 0, 40);
      cplx th(1.0, 0.0);
      auto a = limit.column_normalized(th);
      auto b = general.column_normalized(th);
      for (int n : {0, 1, 3, 8})
        mmm_dev = std::max(mmm_dev, std::abs(a[n].to_complex() - b[n].to_complex()));
    }
    record("eta -> 0 limit consistency", mmm_dev, 1e-3);

    // large-eta trend toward the loss system
    {
      LossSolver loss(ModelParams::normalized(1.2, 3, 1.0), 1);
      cplx th(1.0, 0.5);
      auto lim = loss.column_normalized(th);
      double prev = std::numeric_limits<double>::infinity();
      bool shrinking = true;
      for (double eta : {1e2, 1e3, 1e4}) {
        TransientSolver gen(ModelParams::normalized(1.2, 3, eta), 1, 33);
        auto c = gen.column_normalized(th);
        double diff = 0;
        for (int n = 0; n <= 3; ++n)
          diff = std::max(diff, std::abs(c[n].to_complex() - lim[n].to_complex()));
        if (diff > prev * 0.2) shrinking = false;
        prev = diff;
      }
      record("eta -> infinity trend toward the loss system", shrinking ? 0.0 : 1.0, 0.5);
    }

    // blocking-transform equivalences
    double blk = 0, jag = 0;
    for (double rho : {0.5, 2.0}) {
      for (int m : {2, 5}) {
        cplx th(1.0, 0.0);
        auto w = blocking_loss_normalized(rho, m, 1, th, BlockingRoute::wronskian_reduced);
        auto c = blocking_loss_normalized(rho, m, 1, th, BlockingRoute::contiguous);
        auto g = blocking_loss_normalized(rho, m, 1, th, BlockingRoute::gamma_sums);
        blk = std::max({blk, rel_diff(w, c), rel_diff(w, g)});
        auto w0 = blocking_loss_normalized(rho, m, 0, th, BlockingRoute::wronskian_reduced);
        auto j0 = blocking_loss_normalized(rho, m, 0, th, BlockingRoute::integral);
        jag = std::max(jag, rel_diff(w0, j0));
      }
    }
    record("blocking transform equivalences", blk, 1e-10);
    record("blocking transform integral cross-check", jag, 1e-10);

    // busy-probability transform identities
    {
      ModelParams p = ModelParams::normalized(1.6, 2, 0.7);
      cplx th(1.0, 0.0);
      double busy_dev = 0;
      for (int n0 : {0, 2, 5}) {
        TransientSolver solver(p, n0, default_truncation(p, n0) + 10);
        auto col = solver.column_normalized(th);
        LogComplex tail = LogComplex::zero();
        for (int n = p.m; n <= solver.n_max(); ++n) tail += col[n];
        busy_dev = std::max(busy_dev, rel_diff(tail, busy_normalized(p, n0, th)));
      }
      record("busy transform equals the tail sum", busy_dev, 1e-8);
    }
  }

  void first_passage_checks() {
    ModelParams p = ModelParams::normalized(1.8, 2, 0.5);
    FptSolver solver(p, 5);
    auto col0 = solver.column(cplx(1e-8, 0.0));
    double q0 = 0;
    for (int n = 0; n <= 5; ++n) q0 = std::max(q0, std::abs(col0[n] - 1.0));
    record("passage transform -> 1 at theta -> 0", q0, 1e-6);

    auto closed = mean_fpt(p, {0, 5});
    auto recur = mean_fpt_recurrence(p, {0, 5});
    double trip = 0;
    for (std::size_t n = 0; n < closed.size(); ++n)
      trip = std::max(trip, std::abs(closed[n] - recur[n]) / std::max(1.0, recur[n]));
    record("mean passage: closed form vs recurrence", trip, 1e-12);

    double dmean = 0;
    for (int n : {0, 2, 4}) {
      TransformHandle h = qhat(p, {n, 5});
      dmean = std::max(dmean, std::abs(invert_mean(h).value - closed[n]) / closed[n]);
    }
    record("mean passage: transform derivative route", dmean, 1e-5);

    if (cfg_.full) {
      OracleConfig mc;
      mc.replications = 100000;
      auto est = mc_fpt_mean(p, 0, 5, mc);
      double sig = std::abs(est.mean - closed[0]) / est.std_error;
      record("mean passage: Monte Carlo within 3 sigma", sig, 3.0);
    }

    // density vs absorbing-chain oracle
    {
      ModelParams q = ModelParams::normalized(1.0, 2, 1.5);
      TransformHandle h = qhat(q, {0, 6});
      std::vector<double> grid{0.5, 1.0, 2.0};
      auto oracle = fpt_oracle(q, 0, 6, grid);
      double dev = 0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        dev = std::max(dev, std::abs(invert_point(h, grid[i]).value - oracle.density[i]));
      record("passage density vs absorbing-chain oracle", dev, 1e-6);
    }

    // base identity of the stationary-solution family at theta = 0
    {
      ModelParams q = ModelParams::normalized(1.2, 2, 0.7);
      int ns = 6;
      auto h0 = [&](int k) { return std::exp(log_h_at_zero(k, q)); };
      double tail = 0.0;
      for (int k = ns; k < 100000; ++k) {
        double t = h0(k);
        tail += t;
        if (t < 1e-18 * tail) break;
      }
      double lhs = (q.eta_n() / q.rho()) * tail / h0(ns - 1);
      double rhs = 1.0 / (ns - q.m + q.m / q.eta_n());
      for (int J = 1; J < 100000; ++J) {
        double term = (h0(ns - 1 + J) / h0(ns - 1) - h0(ns + J) / h0(ns)) / J;
        rhs += term;
        if (std::abs(term) < 1e-18 * std::abs(rhs) && J > 5) break;
      }
      record("stationary-solution base identity", std::abs(lhs - rhs) / std::abs(rhs), 1e-9);
    }
  }

  void inversion_checks() {
    // known pairs
    double pair_dev = 0;
    {
      TransformHandle h1{[](cplx s) { return 1.0 / (s + 1.0); }, 0.0, "exp"};
      TransformHandle h2{[](cplx s) { return 1.0 / (s * s); }, 0.0, "ramp"};
      TransformHandle h3{[](cplx s) { return 1.0 / std::pow(s + 1.0, 3); }, 0.0, "erlang"};
      for (double t : {0.3, 1.0, 3.0}) {
        pair_dev = std::max(pair_dev, std::abs(invert_point(h1, t).value - std::exp(-t)));
        pair_dev = std::max(pair_dev, std::abs(invert_point(h2, t).value - t));
        pair_dev = std::max(pair_dev,
                            std::abs(invert_point(h3, t).value - t * t * std::exp(-t) / 2.0));
      }
    }
    record("analytic inversion pairs", pair_dev, 1e-9);

    // euler and gaver agree on a queueing transform
    {
      TransformHandle h = phat_mm_inf(1.0, 0, 1);
      InversionConfig gv;
      gv.method = InversionConfig::Method::gaver;
      double cross = 0;
      for (double t : {0.5, 1.5}) {
        auto e = invert_point(h, t);
        auto g = invert_point(h, t, gv);
        cross = std::max(cross,
                         std::abs(e.value - g.value) /
                             (10.0 * std::max({e.err_est, g.err_est, 1e-12})));
      }
      record("euler/gaver cross agreement", cross, 1.0);
    }

    // positivity after inversion on a transient column
    {
      ModelParams p = ModelParams::normalized(1.0, 2, 2.0);
      TransientSolver solver(p, 4, default_truncation(p, 4));
      double worst = 0;
      for (double t : {0.5, 2.0}) {
        for (int n : {0, 2, 4, 7}) {
          TransformHandle h;
          h.eval = [&, n](cplx th) { return solver.column(th)[n]; };
          double v = invert_point(h, t).value;
          worst = std::max({worst, -v, v - 1.0});
        }
      }
      record("inverted probabilities within [0, 1]", worst, 1e-7);
    }
  }

  void diffusion_checks() {
    double wron = 0, rec = 0;
    for (int i = 0; i < 6; ++i) {
      cplx a(0.2 + 3.0 * u01(), -1.5 + 3.0 * u01());
      double y = -4.0 + 8.0 * u01();
      LogComplex lhs =
          -(pcf_d(-a, y) * pcf_d_deriv(-a, -y)) - pcf_d(-a, -y) * pcf_d_deriv(-a, y);
      LogComplex rhs = LogComplex::from_log(0.5 * std::log(2.0 * kPi) - lgamma_c(a));
      wron = std::max(wron, rel_diff(lhs, rhs));

      cplx p(-3.0 + 5.0 * u01(), -2.0 + 4.0 * u01());
      double z = -6.0 + 12.0 * u01();
      LogComplex lo = pcf_d(p - 1.0, z), mi = pcf_d(p, z), hi = pcf_d(p + 1.0, z);
      LogComplex r = hi - mi * z + lo * p;
      double scale = std::max({hi.log_abs(), mi.log_abs(), lo.log_abs()});
      rec = std::max(rec, std::exp(r.log_abs() - scale));
    }
    record("cylinder-function Wronskian", wron, 1e-9);
    record("cylinder-function recurrence", rec, 1e-9);

    double iface = 0;
    PcfConfig pcfg;
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
      HwScaling sc{-2.0 + 4.0 * u01(), 0.5 + 2.5 * u01()};
      double eta = 0.3 + 2.0 * u01();
      cplx theta(0.2 + 2.8 * u01(), -1.0 + 2.0 * u01());
      iface = std::max(iface,
                       std::abs(erlang_a::detail::hw_erlang_a_lower(sc, eta, 0.0, theta, pcfg) -
                                erlang_a::detail::hw_erlang_a_upper(sc, eta, 0.0, theta, pcfg)));
      cplx d_lo = (erlang_a::detail::hw_erlang_a_lower(sc, eta, h, theta, pcfg) -
                   erlang_a::detail::hw_erlang_a_lower(sc, eta, -h, theta, pcfg)) /
                  (2.0 * h);
      cplx d_hi = (erlang_a::detail::hw_erlang_a_upper(sc, eta, h, theta, pcfg) -
                   erlang_a::detail::hw_erlang_a_upper(sc, eta, -h, theta, pcfg)) /
                  (2.0 * h);
      iface = std::max(iface, std::abs(d_lo - d_hi));
    }
    record("diffusion interface continuity (value and slope)", iface, 1e-8);

    if (cfg_.full) {
      HwScaling sc{0.5, 2.0};
      cplx theta(1.0, 0.0);
      double prev = -1.0;
      bool shrinking = true;
      for (int m : {100, 400}) {
        double rho = sc.rho_of(m);
        int ns = sc.state_of(m, sc.b);
        int n = sc.state_of(m, -0.5);
        cplx exact = qhat_mmm_normalized(rho, m, n, ns, theta).to_complex();
        cplx lim = hw_fpt_mmm(HwScaling{sc.beta, sc.x_of(m, ns)}, sc.x_of(m, n), theta);
        double err = std::abs(exact - lim);
        if (prev > 0.0 && err > prev / 1.35) shrinking = false;
        prev = err;
      }
      record("exact-to-limit convergence trend", shrinking ? 0.0 : 1.0, 0.5);
    }
  }
};

}  // namespace detail

/// Runs the whole identity suite; returns one result per check.
inline std::vector<CheckResult> run_validation(const ValidationConfig& cfg = {}) {
  return detail::ValidationRun(cfg).run();
}

}  // namespace erlang_a

#endif  // ERLANG_A_VALIDATION_HPP
