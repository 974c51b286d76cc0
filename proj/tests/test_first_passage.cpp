#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "erlang_a/first_passage.hpp"
#include "erlang_a/oracle.hpp"

using namespace erlang_a;

namespace {

ContourConfig quad_cfg() {
  ContourConfig c;
  c.mode = ContourConfig::Mode::quadrature;
  return c;
}

// literal transform ratio from quadrature evaluations of the fundamental
// solutions, independent of the solver's recurrence path
struct LiteralFpt {
  ModelParams p;
  int ns;
  cplx th;
  LogComplex num_ns, den_all;

  LiteralFpt(const ModelParams& p_, int ns_, cplx th_) : p(p_), ns(ns_), th(th_) {
    num_ns = combo(ns);
  }
  LogComplex combo(int n) const {
    auto cfg = quad_cfg();
    const double rho = p.rho(), eta = p.eta_n();
    const int m = p.m;
    LogComplex hn = sol_H(n, th, p, cfg), in = sol_I(n, th, p, cfg);
    LogComplex hm = sol_H(m, th, p, cfg), im = sol_I(m, th, p, cfg);
    LogComplex hm1 = sol_H(m + 1, th, p, cfg), im1 = sol_I(m + 1, th, p, cfg);
    LogComplex fm = sol_F(m, th, rho), fm1 = sol_F(m + 1, th, rho);
    return fm * (m + eta) * (hn * im1 - in * hm1) + fm1 * (m + 1.0) * (hm * in - hn * im);
  }
  // upper piece, valid m-1 <= n <= ns
  LogComplex upper(int n) const {
    const double rho = p.rho(), eta = p.eta_n();
    const int m = p.m;
    LogComplex pref = LogComplex::from_log(
        cplx((ns - n) * std::log(rho) + (n - ns) * std::log(eta) +
                 lgamma_r(n - m + 1.0 + m / eta) - lgamma_r(ns - m + 1.0 + m / eta),
             0.0));
    return pref * combo(n) / num_ns;
  }
  // lower piece, valid 0 <= n <= m+1
  LogComplex lower(int n) const {
    const double rho = p.rho(), eta = p.eta_n();
    const int m = p.m;
    LogComplex pref = LogComplex::from_log(
        (ns - n) * std::log(rho) + lgamma_r(n + 1.0) - lgamma_r(m + 1.0) +
        (m - ns + 1.0) * std::log(eta) +
        ((static_cast<double>(m) + th) / eta) * std::log(rho / eta) + rho / eta -
        lgamma_c(th / eta) - lgamma_r(ns - m + 1.0 + m / eta));
    return pref * sol_F(n, th, p.rho()) / num_ns;
  }
};

}  // namespace

TEST_CASE("solver equals the literal quadrature assembly; overlap consistency") {
  ModelParams p = ModelParams::normalized(1.3, 2, 0.8);
  int ns = 7;
  FptSolver solver(p, ns);
  for (cplx th : {cplx(0.9, 0.0), cplx(0.5, 1.2)}) {
    auto col = solver.column_normalized(th);
    LiteralFpt lit(p, ns, th);
    for (int n = 0; n <= ns; ++n) {
      LogComplex expect = (n >= p.m) ? lit.upper(n) : lit.lower(n);
      CHECK(rel_diff(col[n], expect) < 1e-8);
    }
    // the lower form extends one state above the threshold and the upper
    // form one below; they agree there
    CHECK(rel_diff(lit.lower(p.m + 1), lit.upper(p.m + 1)) < 1e-9);
    CHECK(rel_diff(lit.upper(p.m - 1), lit.lower(p.m - 1)) < 1e-9);
  }
}

TEST_CASE("transform is exactly 1 at the target and 1 at theta -> 0") {
  ModelParams p = ModelParams::normalized(1.8, 2, 0.5);
  FptSolver solver(p, 5);
  auto col = solver.column(cplx(0.7, 0.3));
  CHECK(col[5] == cplx(1.0, 0.0));  // identically
  auto near0 = solver.column(cplx(1e-8, 0.0));
  for (int n = 0; n <= 5; ++n) {
    CHECK(std::abs(near0[n] - 1.0) < 1e-6);
  }
  // near 0 the deviation from 1 is exactly theta times the mean: the
  // cross-Wronskian assembly stays accurate at arbitrarily small theta
  ModelParams slow = ModelParams::normalized(1.0, 2, 1.5);
  FptSolver ssol(slow, 6);
  auto means = mean_fpt(slow, {0, 6});
  auto tiny = ssol.column(cplx(1e-8, 0.0));
  for (int n = 0; n <= 6; ++n) {
    CHECK(std::abs(tiny[n] - (1.0 - 1e-8 * means[n])) < 1e-9);
  }
}

TEST_CASE("domain validation") {
  ModelParams p = ModelParams::normalized(1.0, 3, 1.0);
  CHECK_THROWS_AS(qhat(p, {0, 3}), std::domain_error);   // n_star <= m
  CHECK_THROWS_AS(qhat(p, {9, 5}), std::domain_error);   // start above target
  CHECK_THROWS_AS(qhat_mmm(ModelParams::normalized(1.0, 3, 0.0), {0, 2}), std::domain_error);
}

TEST_CASE("eta = mu reduction") {
  double rho = 1.4;
  ModelParams p = ModelParams::normalized(rho, 2, 1.0);
  int ns = 6;
  FptSolver solver(p, ns);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    cplx th(0.2 + 3.0 * u01(rng), -2.0 + 4.0 * u01(rng));
    auto col = solver.column_normalized(th);
    for (int n = 0; n <= ns; ++n) {
      CHECK(rel_diff(col[n], qhat_mm_inf_normalized(rho, n, ns, th)) < 1e-9);
    }
  }
  // n = n_star is identically one
  CHECK(qhat_mm_inf_normalized(rho, ns, ns, cplx(2.2, 1.0)).to_complex() == cplx(1.0, 0.0));
}

TEST_CASE("eta = 0 form: normalization via the explicit roots at theta = 0") {
  double rho = 1.8;
  int m = 2, ns = 7;
  for (int n : {0, 1, 2, 4, 6}) {
    LogComplex v = qhat_mmm_normalized(rho, m, n, ns, cplx(0.0, 0.0));
    CHECK(std::abs(v.to_complex() - 1.0) < 1e-12);
  }
  // small-abandonment limit approaches the eta = 0 transform
  ModelParams pe = ModelParams::normalized(rho, m, 1e-4);
  FptSolver general(pe, ns);
  for (cplx th : {cplx(1.0, 0.0), cplx(0.4, 0.9)}) {
    auto col = general.column_normalized(th);
    for (int n : {0, 2, 4, 6}) {
      CHECK(std::abs(col[n].to_complex() -
                     qhat_mmm_normalized(rho, m, n, ns, th).to_complex()) < 1e-3);
    }
  }
}

TEST_CASE("inverted first-passage density matches the absorbing-chain oracle") {
  ModelParams p = ModelParams::normalized(1.0, 2, 1.5);
  FptSpec spec{0, 6};
  TransformHandle h = qhat(p, spec);
  std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
  auto oracle = fpt_oracle(p, spec.start, spec.n_star, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto r = invert_point(h, grid[i]);
    CHECK(std::abs(r.value - oracle.density[i]) < 1e-6);
    CHECK(r.value > -1e-7);
  }
  // CDF: invert Q-hat/theta, total mass reaches 1 at a horizon set from the
  // transform's own residual-mass indicator
  auto means = mean_fpt(p, spec);
  double T = means[spec.start] / 5e-7;
  CHECK(std::abs(1.0 - h(cplx(1.0 / T, 0.0)).real()) < 1e-6);
  TransformHandle cdf;
  cdf.eval = [&](cplx th) { return h(th) / th; };
  CHECK(std::abs(invert_point(cdf, T).value - 1.0) < 1e-5);
}

TEST_CASE("eta = 0 density matches its absorbing-chain oracle") {
  ModelParams p = ModelParams::normalized(1.8, 2, 0.0);
  FptSpec spec{0, 7};
  TransformHandle h = qhat_mmm(p, spec);
  std::vector<double> grid{0.5, 1.5, 3.0};
  auto oracle = fpt_oracle(p, spec.start, spec.n_star, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto r = invert_point(h, grid[i]);
    CHECK(std::abs(r.value - oracle.density[i]) < 1e-6);
  }
  // dispatch: eta = 0 routes through the same closed form
  TransformHandle via_dispatch = qhat(p, spec);
  CHECK(std::abs(via_dispatch(cplx(1.1, 0.4)) - h(cplx(1.1, 0.4))) < 1e-14);
}

TEST_CASE("mean first passage: closed form, recurrence, transform, simulation") {
  ModelParams p = ModelParams::normalized(1.0, 2, 0.5);
  FptSpec spec{0, 6};
  auto closed = mean_fpt(p, spec);
  auto recur = mean_fpt_recurrence(p, spec);
  REQUIRE(closed.size() == recur.size());
  CHECK(closed[spec.n_star] == 0.0);
  for (std::size_t n = 0; n < closed.size(); ++n) {
    CHECK(std::abs(closed[n] - recur[n]) <= 1e-12 * std::max(1.0, recur[n]));
  }
  // strictly decreasing toward the target
  for (int n = 0; n < spec.n_star; ++n) CHECK(closed[n] > closed[n + 1]);

  // -Q'(0) by extrapolated central differences
  for (int n : {0, 2, 4}) {
    TransformHandle h = qhat(p, {n, spec.n_star});
    auto d = invert_mean(h);
    CHECK(std::abs(d.value - closed[n]) / closed[n] < 1e-5);
  }

  // Monte Carlo within 3 standard errors
  OracleConfig mc;
  mc.replications = 30000;
  auto est = mc_fpt_mean(p, 0, spec.n_star, mc);
  CHECK(std::abs(est.mean - closed[0]) < 3.0 * est.std_error);
}

TEST_CASE("mean first passage against the classical sum and a dense solve") {
  // infinite-server structure (m = 1, eta = mu): classical birth-death
  // hitting-time sums with Poisson weights
  ModelParams p = ModelParams::normalized(1.7, 1, 1.0);
  FptSpec spec{0, 5};
  auto closed = mean_fpt(p, spec);
  const double rho = 1.7;
  for (int n = 0; n <= 4; ++n) {
    double q = 0.0;
    for (int j = n; j < 5; ++j) {
      double pi_j = std::exp(j * std::log(rho) - lgamma_r(j + 1.0));
      double acc = 0.0;
      for (int l = 0; l <= j; ++l) acc += std::exp(l * std::log(rho) - lgamma_r(l + 1.0));
      q += acc / (rho * pi_j);
    }
    CHECK(std::abs(closed[n] - q) < 1e-12 * q);
  }

  // Thomas-algorithm tridiagonal solve of the defining linear system
  ModelParams pa = ModelParams::normalized(2.2, 3, 0.7);
  FptSpec sa{0, 9};
  auto rec = mean_fpt_recurrence(pa, sa);
  const int ns = sa.n_star;
  std::vector<double> diag(ns), upper(ns), lower(ns), rhs(ns, -1.0);
  for (int n = 0; n < ns; ++n) {
    double dn = death_rate(pa, n);
    diag[n] = -(pa.rho() + dn);
    upper[n] = pa.rho();
    lower[n] = dn;
  }
  for (int n = 1; n < ns; ++n) {
    double w = lower[n] / diag[n - 1];
    diag[n] -= w * upper[n - 1];
    rhs[n] -= w * rhs[n - 1];
  }
  std::vector<double> q(ns + 1, 0.0);
  for (int n = ns - 1; n >= 0; --n) {
    double next = (n + 1 <= ns - 1) ? q[n + 1] : 0.0;
    q[n] = (rhs[n] - upper[n] * next) / diag[n];
  }
  for (int n = 0; n < ns; ++n) CHECK(std::abs(q[n] - rec[n]) < 1e-11 * rec[n]);
}

TEST_CASE("mean via transform matches across random draws") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    double rho = 0.6 + 2.0 * u01(rng);
    double eta = 0.4 + 1.6 * u01(rng);
    int m = 1 + static_cast<int>(3.0 * u01(rng));
    int ns = m + 2 + static_cast<int>(4.0 * u01(rng));
    int n = static_cast<int>(u01(rng) * ns);
    ModelParams p = ModelParams::normalized(rho, m, eta);
    auto q = mean_fpt(p, {n, ns});
    TransformHandle h = qhat(p, {n, ns});
    auto d = invert_mean(h);
    CHECK(std::abs(d.value - q[n]) / std::max(q[n], 1e-2) < 1e-5);
  }
}

TEST_CASE("substitution consistency: rescaled transform solves the homogeneous recurrences") {
  ModelParams p = ModelParams::normalized(1.5, 3, 0.9);
  int ns = 8;
  FptSolver solver(p, ns);
  cplx th(0.8, 0.6);
  auto q = solver.column_normalized(th);
  const double rho = p.rho(), eta = p.eta_n();
  const int m = p.m;
  // R_n = rho^n (m!/n!) Q_n below the threshold,
  // R_n = rho^n eta^{m-n} Gamma(1+m/eta)/Gamma(n-m+1+m/eta) Q_n above
  std::vector<LogComplex> R(ns + 1);
  for (int n = 0; n <= ns; ++n) {
    double lg = (n <= m) ? n * std::log(rho) + lgamma_r(m + 1.0) - lgamma_r(n + 1.0)
                         : n * std::log(rho) + (m - n) * std::log(eta) +
                               lgamma_r(1.0 + m / eta) - lgamma_r(n - m + 1.0 + m / eta);
    R[n] = q[n] * LogComplex::from_log(cplx(lg, 0.0));
  }
  // boundary row
  LogComplex b = R[1] - R[0] * (rho + th);
  CHECK(std::exp(b.log_abs() - R[1].log_abs()) < 1e-8);
  for (int n = 1; n + 1 <= ns; ++n) {
    cplx coef;
    double up;
    if (n < m) {
      coef = th + (rho + n);
      up = n + 1.0;
    } else {
      coef = th + (rho + m + (n - m) * eta);
      up = m + (n - m + 1) * eta;
    }
    LogComplex r = R[n + 1] * up + R[n - 1] * rho - R[n] * coef;
    double scale = std::max(R[n + 1].log_abs(), R[n].log_abs());
    CHECK(std::exp(r.log_abs() - scale) < 1e-8);
  }
}

TEST_CASE("stationary-solution identity at the base induction level") {
  // (eta/rho) (1/h0(ns-1)) sum_{p>=ns} h0(p)
  //   = 1/(ns-m+m/eta) + sum_J (1/J)[h0(ns-1+J)/h0(ns-1) - h0(ns+J)/h0(ns)]
  for (auto [rho, m, eta, ns] : {std::tuple{1.2, 2, 0.7, 6}, {2.5, 3, 1.4, 9}}) {
    ModelParams p = ModelParams::normalized(rho, m, eta);
    auto h0 = [&](int k) { return std::exp(log_h_at_zero(k, p)); };
    double tail = 0.0;
    for (int k = ns;; ++k) {
      double t = h0(k);
      tail += t;
      if (t < 1e-18 * tail) break;
      REQUIRE(k < 100000);
    }
    double lhs = (eta / rho) * tail / h0(ns - 1);
    double rhs = 1.0 / (ns - m + m / eta);
    for (int J = 1; J < 100000; ++J) {
      double term = (h0(ns - 1 + J) / h0(ns - 1) - h0(ns + J) / h0(ns)) / J;
      rhs += term;
      if (std::abs(term) < 1e-18 * std::abs(rhs) && J > 5) break;
    }
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-9);
  }
}
