#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "erlang_a/oracle.hpp"
#include "erlang_a/transforms.hpp"

using namespace erlang_a;

namespace {

ContourConfig quad_cfg() {
  ContourConfig c;
  c.mode = ContourConfig::Mode::quadrature;
  return c;
}

// literal three-piece assembly for n0 <= m, built from pointwise quadrature
// evaluations (independent of the solver's column path)
struct LiteralBelow {
  ModelParams p;
  int n0;
  cplx th;
  LogComplex den, rat, pre;

  LiteralBelow(const ModelParams& p_, int n0_, cplx th_) : p(p_), n0(n0_), th(th_) {
    auto cfg = quad_cfg();
    const int m = p.m;
    const double rho = p.rho();
    den = sol_F(m, th, rho) * sol_H(m - 1, th, p, cfg) -
          sol_H(m, th, p, cfg) * sol_F(m - 1, th, rho);
    rat = (sol_H(m, th, p, cfg) * sol_G(m - 1, th, rho, cfg) -
           sol_G(m, th, rho, cfg) * sol_H(m - 1, th, p, cfg)) /
          den;
    pre = LogComplex::from_log(lgamma_r(n0 + 1.0) + lgamma_c(th) - rho -
                               (static_cast<double>(n0) + th) * std::log(rho));
  }
  LogComplex upper(int n) const {  // n >= m
    LogComplex up = LogComplex::from_log(
        cplx(lgamma_r(n0 + 1.0) - lgamma_r(p.m + 1.0) + (p.m - n0 - 1) * std::log(p.rho()), 0.0));
    return up * sol_F(n0, th, p.rho()) * sol_H(n, th, p, quad_cfg()) / den;
  }
  LogComplex middle(int n) const {  // n0 <= n <= m
    return pre * sol_F(n0, th, p.rho()) *
           (sol_G(n, th, p.rho(), quad_cfg()) + rat * sol_F(n, th, p.rho()));
  }
  LogComplex lower(int n) const {  // n <= n0
    return pre * sol_F(n, th, p.rho()) *
           (sol_G(n0, th, p.rho(), quad_cfg()) + rat * sol_F(n0, th, p.rho()));
  }
};

// literal assembly for n0 >= m with the algebraic second solution
struct LiteralAbove {
  ModelParams p;
  int n0;
  cplx th;
  LogComplex den, rat2, pre, low_pre;

  LiteralAbove(const ModelParams& p_, int n0_, cplx th_) : p(p_), n0(n0_), th(th_) {
    auto cfg = quad_cfg();
    const int m = p.m;
    const double rho = p.rho();
    const double eta = p.eta_n();
    den = sol_F(m, th, rho) * sol_H(m - 1, th, p, cfg) -
          sol_H(m, th, p, cfg) * sol_F(m - 1, th, rho);
    rat2 = (sol_I(m, th, p, cfg) * sol_F(m - 1, th, rho) -
            sol_I(m - 1, th, p, cfg) * sol_F(m, th, rho)) /
           den;
    pre = LogComplex::from_log(-std::log(rho) - rho / eta +
                               (n0 - m - 1.0 + (th + static_cast<double>(m)) / eta) *
                                   std::log(eta / rho) +
                               lgamma_c(th / eta) + lgamma_r(n0 - m + 1.0 + m / eta));
    low_pre = LogComplex::from_log(cplx(-std::log(rho) + (m - n0) * std::log(rho / eta) +
                                            lgamma_r(n0 - m + 1.0 + m / eta) -
                                            lgamma_r(1.0 + m / eta),
                                        0.0));
  }
  LogComplex upper(int n) const {  // n >= n0
    auto cfg = quad_cfg();
    return pre *
           (sol_I(n0, th, p, cfg) + rat2 * sol_H(n0, th, p, cfg)) *
           sol_H(n, th, p, cfg);
  }
  LogComplex middle(int n) const {  // m <= n <= n0
    auto cfg = quad_cfg();
    return pre * (sol_I(n, th, p, cfg) + rat2 * sol_H(n, th, p, cfg)) *
           sol_H(n0, th, p, cfg);
  }
  LogComplex lower(int n) const {  // n <= m
    return low_pre * sol_H(n0, th, p, quad_cfg()) * sol_F(n, th, p.rho()) / den;
  }
};

}  // namespace

TEST_CASE("solver column matches the literal quadrature assembly, start below") {
  ModelParams p = ModelParams::normalized(1.7, 3, 0.8);
  int n0 = 1;
  TransientSolver solver(p, n0, 20);
  for (cplx th : {cplx(1.0, 0.0), cplx(0.6, 1.7)}) {
    auto col = solver.column_normalized(th);
    LiteralBelow lit(p, n0, th);
    for (int n : {0, 1, 2, 3, 5, 9, 17}) {
      LogComplex expect = n >= p.m ? lit.upper(n) : (n >= n0 ? lit.middle(n) : lit.lower(n));
      CHECK(rel_diff(col[n], expect) < 1e-8);
    }
  }
}

TEST_CASE("solver column matches the literal quadrature assembly, start above") {
  ModelParams p = ModelParams::normalized(2.1, 2, 0.6);
  int n0 = 6;
  TransientSolver solver(p, n0, 18);
  for (cplx th : {cplx(1.3, 0.0), cplx(0.8, -1.1)}) {
    auto col = solver.column_normalized(th);
    LiteralAbove lit(p, n0, th);
    for (int n : {0, 1, 3, 4, 6, 9, 15}) {
      LogComplex expect = n > n0 ? lit.upper(n) : (n >= p.m ? lit.middle(n) : lit.lower(n));
      CHECK(rel_diff(col[n], expect) < 1e-8);
    }
  }
}

TEST_CASE("piecewise formulas agree at shared states") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    double rho = 0.4 + 4.0 * u01(rng);
    double eta = 0.3 + 2.0 * u01(rng);
    int m = 2 + static_cast<int>(3.0 * u01(rng));
    cplx th(0.2 + 3.0 * u01(rng), -2.0 + 4.0 * u01(rng));
    ModelParams p = ModelParams::normalized(rho, m, eta);

    int n0b = static_cast<int>(u01(rng) * (m - 1)) + 1;  // strictly below m
    LiteralBelow lb(p, n0b, th);
    CHECK(rel_diff(lb.middle(n0b), lb.lower(n0b)) < 1e-9);
    CHECK(rel_diff(lb.upper(m), lb.middle(m)) < 1e-9);

    int n0a = m + 2 + static_cast<int>(4.0 * u01(rng));
    LiteralAbove la(p, n0a, th);
    CHECK(rel_diff(la.upper(n0a), la.middle(n0a)) < 1e-9);
    CHECK(rel_diff(la.middle(m), la.lower(m)) < 1e-9);
  }
}

TEST_CASE("start at the threshold: the two-piece form matches both general forms") {
  ModelParams p = ModelParams::normalized(1.4, 2, 0.9);
  cplx th(0.9, 0.7);
  TransientSolver solver(p, p.m, 16);
  auto col = solver.column_normalized(th);
  LiteralBelow lb(p, p.m, th);
  LiteralAbove la(p, p.m, th);
  for (int n : {0, 1, 2, 5, 10}) {
    // n0 = m, so every n < m sits in the lowest piece of both forms
    LogComplex below = n >= p.m ? lb.upper(n) : lb.lower(n);
    LogComplex above = n > p.m ? la.upper(n) : la.lower(n);
    CHECK(rel_diff(col[n], below) < 1e-8);
    CHECK(rel_diff(col[n], above) < 1e-8);
  }
}

TEST_CASE("total probability: the column sums to 1/theta") {
  ModelParams p = ModelParams::normalized(0.8, 2, 0.5);
  TransientSolver solver(p, 0, default_truncation(p, 0) + 20);
  cplx th(1.0, 0.0);
  auto col = solver.column(th);
  cplx sum(0.0, 0.0);
  for (cplx v : col) sum += v;
  CHECK(std::abs(sum - 1.0 / th) < 1e-8);
  CHECK(solver.column_tail_bound(th) < 1e-12);
}

TEST_CASE("initial condition recovered as Re theta -> infinity") {
  ModelParams p = ModelParams::normalized(1.1, 2, 0.7);
  for (int n0 : {0, 2, 5}) {
    TransientSolver solver(p, n0, 14);
    auto col = solver.column(cplx(1e4, 0.0));
    for (int n = 0; n <= 10; ++n) {
      double expect = (n == n0) ? 1.0 : 0.0;
      CHECK(std::abs(1e4 * col[n] - expect) < 1e-3);
    }
  }
}

TEST_CASE("stationary limit: theta * column at theta = 1e-6 matches the steady state") {
  // theta * P-hat(theta) = p(inf) + theta * Int (p(t) - p(inf)) dt + O(theta^2),
  // so the deviation at theta = 1e-6 is O(theta) absolute; per-state relative
  // error can only be expected where the state carries appreciable mass.
  for (auto [rho, m, eta, n0] : {std::tuple{0.8, 2, 0.5, 0}, {2.4, 2, 2.0, 6}, {5.0, 5, 1.0, 5}}) {
    ModelParams p = ModelParams::normalized(rho, m, eta);
    int n_max = default_truncation(p, n0);
    TransientSolver solver(p, n0, n_max);
    Pmf stat = steady_state(p, n_max);
    auto col = solver.column(cplx(1e-6, 0.0));
    for (int n = 0; n <= n_max; ++n) {
      double dev = std::abs(1e-6 * col[n].real() - stat.values[n]);
      CHECK(dev < 2e-6);
      if (stat.values[n] > 0.2) CHECK(dev / stat.values[n] < 1e-5);
    }
  }
}

TEST_CASE("transformed forward equations hold with the delta source") {
  ModelParams p = ModelParams::normalized(1.5, 3, 0.8);
  for (int n0 : {0, 2, 3, 7}) {
    TransientSolver solver(p, n0, 20);
    cplx th(1.2, 0.9);
    auto col = solver.column_normalized(th);
    const double rho = p.rho();
    auto residual = [&](int n) {
      LogComplex up, mid, lo;
      cplx coef;
      double upc;
      if (n == 0) {
        // boundary row: P_1 - (rho+theta) P_0 = -delta(0, n0)
        LogComplex r = col[1] - col[0] * (rho + th);
        cplx rhs = (n0 == 0) ? cplx(-1.0, 0.0) : cplx(0.0, 0.0);
        return std::abs(r.to_complex() - rhs) /
               std::max({std::abs(col[1].to_complex()), 1.0});
      }
      if (n < p.m) {
        coef = th + (rho + n);
        upc = n + 1.0;
      } else {
        coef = th + (rho + p.m + (n - p.m) * p.eta_n());
        upc = p.m + (n - p.m + 1) * p.eta_n();
      }
      up = col[n + 1] * upc;
      lo = col[n - 1] * rho;
      mid = col[n] * coef;
      LogComplex r = up + lo - mid;
      cplx rhs = (n == n0) ? cplx(-1.0, 0.0) : cplx(0.0, 0.0);
      double scale = std::max({std::exp(up.log_abs()), std::exp(mid.log_abs()), 1.0});
      return std::abs(r.to_complex() - rhs) / scale;
    };
    for (int n : {0, 1, 2, 3, 4, std::max(0, n0 - 1), n0, n0 + 1}) {
      if (n > 19) continue;
      CHECK(residual(n) < 1e-8);
    }
  }
}

TEST_CASE("inverted transform matches the uniformization oracle") {
  // start above the threshold exercises the cross-Wronskian path
  ModelParams p = ModelParams::normalized(1.0, 2, 2.0);
  int n0 = 4;
  TransientSolver solver(p, n0, default_truncation(p, n0));
  OracleConfig ocfg;
  ocfg.n_max = solver.n_max();
  for (double t : {0.5, 1.0, 2.0}) {
    Pmf oracle = transient_oracle(p, n0, t, ocfg);
    for (int n : {0, 1, 2, 3, 4, 6, 9}) {
      TransformHandle h;
      h.eval = [&, n](cplx th) { return solver.column(th)[n]; };
      auto r = invert_point(h, t);
      CHECK(std::abs(r.value - oracle.values[n]) < 1e-6);
      CHECK(r.value > -1e-7);
      CHECK(r.value < 1.0 + 1e-7);
    }
  }
}

TEST_CASE("eta = mu: general solver reduces to the product form") {
  double rho = 1.3;
  ModelParams p = ModelParams::normalized(rho, 2, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int n0 : {0, 1, 3, 6}) {
    TransientSolver solver(p, n0, 14);
    for (int trial = 0; trial < 3; ++trial) {
      cplx th(0.2 + 3.0 * u01(rng), -2.0 + 4.0 * u01(rng));
      auto col = solver.column_normalized(th);
      for (int n : {0, 1, 2, 4, 8}) {
        CHECK(rel_diff(col[n], phat_mm_inf_normalized(rho, n0, n, th)) < 1e-9);
      }
    }
  }
}

TEST_CASE("eta = mu closed form: boundary cases and a sample value") {
  CHECK(p_mm_inf_closed(1.0, 3, 3, 0.0) == doctest::Approx(1.0));
  CHECK(p_mm_inf_closed(1.0, 3, 2, 0.0) == doctest::Approx(0.0));
  // long horizon: Poisson(rho)
  for (int n : {0, 1, 4}) {
    double expect = std::exp(-2.5 + n * std::log(2.5) - lgamma_r(n + 1.0));
    CHECK(p_mm_inf_closed(2.5, 1, n, 60.0) == doctest::Approx(expect).epsilon(1e-12));
  }
  // direct evaluation at rho=1, n0=0, n=0, t=1
  double w = 1.0 - std::exp(-1.0);
  CHECK(p_mm_inf_closed(1.0, 0, 0, 1.0) == doctest::Approx(std::exp(-w)));
}

TEST_CASE("eta = mu: inversion, spectral series and closed form all agree") {
  double rho = 1.0;
  for (int n0 : {0, 3}) {
    for (int n : {0, 1, 2, 5}) {
      TransformHandle h = phat_mm_inf(rho, n0, n);
      for (double t : {0.4, 1.0, 2.5}) {
        double closed = p_mm_inf_closed(rho, n0, n, t);
        auto inv = invert_point(h, t);
        CHECK(std::abs(inv.value - closed) < 1e-8);
        CHECK(std::abs(p_mm_inf_spectral(rho, n0, n, t) - closed) < 1e-10);
      }
    }
  }
}

TEST_CASE("theta * product-form transform -> Poisson as theta -> 0") {
  double rho = 1.8;
  for (int n : {0, 2, 4}) {
    TransformHandle h = phat_mm_inf(rho, 1, n);
    double expect = std::exp(-rho + n * std::log(rho) - lgamma_r(n + 1.0));
    CHECK(std::abs(1e-7 * h(cplx(1e-7, 0.0)).real() - expect) < 1e-5);
  }
}

TEST_CASE("no-abandonment roots satisfy the quadratic symmetric functions") {
  cplx th(0.8, 1.5);
  for (auto [rho, m] : {std::pair{1.5, 2}, {0.7, 4}}) {
    auto r = mmm_roots(rho, m, th);
    CHECK(std::abs(r.A * r.B - rho / static_cast<double>(m)) < 1e-13);
    CHECK(std::abs(r.A + r.B - (static_cast<double>(m) + rho + th) / static_cast<double>(m)) <
          1e-13);
  }
}

TEST_CASE("no-abandonment roots flag the branch-cut ambiguity") {
  // (m + rho + theta)^2 - 4 m rho negative real puts the square root on its cut
  CHECK_THROWS_AS(mmm_roots(2.0, 2, cplx(-1.0, 0.0)), std::domain_error);
  CHECK_NOTHROW(mmm_roots(2.0, 2, cplx(-1.0, 0.3)));
}

TEST_CASE("no-abandonment transform inverts to the oracle") {
  ModelParams p = ModelParams::normalized(1.5, 2, 0.0);
  for (int n0 : {0, 5}) {
    MmmSolver solver(p, n0);
    OracleConfig ocfg;
    ocfg.n_max = solver.n_max();
    Pmf oracle = transient_oracle(p, n0, 1.0, ocfg);
    for (int n : {0, 1, 2, 3, 5, 8}) {
      TransformHandle h;
      h.eval = [&, n](cplx th) { return solver.column(th)[n]; };
      auto r = invert_point(h, 1.0);
      CHECK(std::abs(r.value - oracle.values[n]) < 1e-6);
    }
  }
}

TEST_CASE("small-abandonment limit approaches the no-abandonment transform") {
  ModelParams p0 = ModelParams::normalized(1.5, 2, 0.0);
  ModelParams pe = ModelParams::normalized(1.5, 2, 1e-4);
  for (int n0 : {0, 4}) {
    MmmSolver limit(p0, n0, 40);
    TransientSolver general(pe, n0, 40);
    for (cplx th : {cplx(1.0, 0.0), cplx(0.5, 2.0)}) {
      auto a = limit.column_normalized(th);
      auto b = general.column_normalized(th);
      for (int n : {0, 1, 2, 3, 6, 10}) {
        CHECK(std::abs(a[n].to_complex() - b[n].to_complex()) < 1e-3);
      }
    }
  }
}

TEST_CASE("loss limit: large abandonment approaches the loss-system transform") {
  const double rho = 1.2;
  const int m = 3, n0 = 1;
  LossSolver loss(ModelParams::normalized(rho, m, 1.0), n0);
  cplx th(1.0, 0.5);
  auto limit_col = loss.column_normalized(th);
  double prev_diff = std::numeric_limits<double>::infinity();
  for (double eta : {1e2, 1e3, 1e4}) {
    TransientSolver general(ModelParams::normalized(rho, m, eta), n0, m + 30);
    auto col = general.column_normalized(th);
    double diff = 0.0;
    for (int n = 0; n <= m; ++n)
      diff = std::max(diff, std::abs(col[n].to_complex() - limit_col[n].to_complex()));
    CHECK(diff < prev_diff * 0.2);  // shrinking like 1/eta
    prev_diff = diff;
  }
}

TEST_CASE("blocking transforms: all algebraic forms agree, and match the integral") {
  for (double rho : {0.5, 2.0, 8.0}) {
    for (int m : {2, 5, 10}) {
      for (double thr : {0.3, 1.0, 3.0}) {
        cplx th(thr, 0.0);
        auto w = blocking_loss_normalized(rho, m, 1 % (m + 1), th, BlockingRoute::wronskian_reduced);
        auto c = blocking_loss_normalized(rho, m, 1 % (m + 1), th, BlockingRoute::contiguous);
        auto g = blocking_loss_normalized(rho, m, 1 % (m + 1), th, BlockingRoute::gamma_sums);
        CHECK(rel_diff(w, c) < 1e-10);
        CHECK(rel_diff(w, g) < 1e-10);
        auto w0 = blocking_loss_normalized(rho, m, 0, th, BlockingRoute::wronskian_reduced);
        auto j0 = blocking_loss_normalized(rho, m, 0, th, BlockingRoute::integral);
        CHECK(rel_diff(w0, j0) < 1e-10);
      }
    }
  }
}

TEST_CASE("blocking transform recovers the stationary loss formula as theta -> 0") {
  const double rho = 2.0;
  const int m = 4;
  // brute-force stationary law of the loss chain
  std::vector<double> w(m + 1);
  double z = 0.0;
  for (int n = 0; n <= m; ++n) z += w[n] = std::exp(n * std::log(rho) - lgamma_r(n + 1.0));
  const double erlang_b = w[m] / z;
  auto v = blocking_loss_normalized(rho, m, 2, cplx(1e-7, 0.0), BlockingRoute::gamma_sums);
  CHECK(std::abs(1e-7 * v.to_complex().real() - erlang_b) < 1e-5);
}

TEST_CASE("loss-system distribution: domain errors and oracle agreement") {
  ModelParams p = ModelParams::normalized(1.5, 3, 1.0);
  CHECK_THROWS_AS(LossSolver(p, 4), std::domain_error);
  // compare with a large-eta chain oracle
  LossSolver loss(p, 1);
  ModelParams big = ModelParams::normalized(1.5, 3, 1e5);
  OracleConfig ocfg;
  ocfg.n_max = 3 + 40;
  Pmf oracle = transient_oracle(big, 1, 0.8, ocfg);
  for (int n = 0; n <= 3; ++n) {
    TransformHandle h;
    h.eval = [&, n](cplx th) { return loss.column(th)[n]; };
    auto r = invert_point(h, 0.8);
    CHECK(std::abs(r.value - oracle.values[n]) < 1e-4);  // O(1/eta) model gap
  }
}

TEST_CASE("busy-probability transform: shift identity consistency") {
  ModelParams p = ModelParams::normalized(1.6, 2, 0.7);
  cplx th(1.0, 0.0);

  // the two initial-condition forms agree where both apply (n0 = m)
  LogComplex below = busy_normalized(p, p.m, th);
  // literal start-above form at n0 = m
  ModelParams pp = p;
  LogComplex above = [&]() {
    // reuse the generic path by nudging through the n0 > m branch at n0 = m:
    // evaluate the brace directly
    auto cfg = quad_cfg();
    const double rho = p.rho(), eta = p.eta_n();
    const int m = p.m, n0 = p.m;
    auto F = f_column(m + 1, th, rho);
    auto H = h_column(n0 + 1, th, p, cfg);
    auto I = i_column(n0 + 1, th, p, cfg);
    auto Hs = h_column(n0 + 1, th + eta, p, cfg);
    auto Is = i_column(n0 + 1, th + eta, p, cfg);
    LogComplex den = F[m] * H[m - 1] - H[m] * F[m - 1];
    LogComplex rat2 = (I[m] * F[m - 1] - I[m - 1] * F[m]) / den;
    LogComplex pre2 = LogComplex::from_log(
        -std::log(rho) - rho / eta +
        (n0 - m - 1.0 + (th + static_cast<double>(m)) / eta) * std::log(eta / rho) +
        lgamma_c(th / eta) + lgamma_r(n0 - m + 1.0 + m / eta));
    LogComplex brace = H[n0] * (Is[n0 - 1] - Is[m - 1]) + I[n0] * Hs[n0 - 1] +
                       rat2 * H[n0] * Hs[m - 1];
    return pre2 * brace;
  }();
  (void)pp;
  CHECK(rel_diff(below, above) < 1e-9);

  // equals the termwise tail sum of the distribution transform
  for (int n0 : {0, 2, 5}) {
    TransientSolver solver(p, n0, default_truncation(p, n0) + 10);
    auto col = solver.column_normalized(th);
    LogComplex tail = LogComplex::zero();
    for (int n = p.m; n <= solver.n_max(); ++n) tail += col[n];
    LogComplex busy = busy_normalized(p, n0, th);
    CHECK(rel_diff(tail, busy) < 1e-8);
  }

  // theta -> 0 recovers the stationary busy probability
  Pmf stat = steady_state(p);
  double busy_stat = 0.0;
  for (int n = p.m; n <= stat.n_max(); ++n) busy_stat += stat.values[n];
  for (int n0 : {1, 4}) {
    LogComplex b = busy_normalized(p, n0, cplx(1e-6, 0.0));
    CHECK(std::abs(1e-6 * b.to_complex().real() - busy_stat) / busy_stat < 1e-5);
  }
}

TEST_CASE("busy handles invert to the oracle tail for both start regimes") {
  ModelParams p = ModelParams::normalized(1.6, 2, 0.7);
  for (int n0 : {1, 5}) {
    TransformHandle h = busy_transform(p, n0);
    for (double t : {1.0, 2.0}) {
      Pmf pmf = transient_oracle(p, n0, t);
      double tail = 0.0;
      for (int n = p.m; n <= pmf.n_max(); ++n) tail += pmf.values[n];
      CHECK(std::abs(invert_point(h, t).value - tail) < 1e-7);
    }
  }
}

TEST_CASE("one-state transform handles dispatch correctly") {
  // general dispatch routes eta = 0 to the no-abandonment solver
  ModelParams p0 = ModelParams::normalized(1.5, 2, 0.0);
  TransformHandle a = phat(p0, 0, 3);
  TransformHandle b = phat_mmm(p0, 0, 3);
  cplx th(1.1, 0.7);
  CHECK(std::abs(a(th) - b(th)) < 1e-14);

  ModelParams pe = ModelParams::normalized(1.5, 2, 0.8);
  TransientSolver solver(pe, 0, 20);
  TransformHandle c = phat(pe, 0, 3, 20);
  CHECK(std::abs(c(th) - solver.column(th)[3]) < 1e-14);

  // loss handle matches its solver and enforces the domain
  ModelParams pl = ModelParams::normalized(1.2, 3, 1.0);
  LossSolver ls(pl, 1);
  TransformHandle d = phat_loss(pl, 1, 2);
  CHECK(std::abs(d(th) - ls.column(th)[2]) < 1e-14);
  CHECK_THROWS_AS(phat_loss(pl, 1, 4), std::domain_error);
}

TEST_CASE("user-unit scaling of the transform handles") {
  // mu = 2: P-hat_user(theta) = P-hat_norm(theta/mu)/mu
  ModelParams scaled(2.6, 2.0, 2, 1.6);
  ModelParams norm = ModelParams::normalized(1.3, 2, 0.8);
  TransientSolver a(scaled, 1, 16), b(norm, 1, 16);
  cplx th(0.9, 0.4);
  auto ca = a.column(th);
  auto cb = b.column(th / 2.0);
  for (int n : {0, 1, 2, 5}) {
    CHECK(std::abs(ca[n] - cb[n] / 2.0) < 1e-12);
  }
  // and the inverted functions relate by time rescaling
  OracleConfig ocfg;
  ocfg.n_max = a.n_max();
  Pmf oracle = transient_oracle(scaled, 1, 0.7, ocfg);
  TransformHandle h;
  h.eval = [&](cplx theta) { return a.column(theta)[3]; };
  CHECK(std::abs(invert_point(h, 0.7).value - oracle.values[3]) < 1e-6);
}
