#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "erlang_a/log_complex.hpp"

using namespace erlang_a;

TEST_CASE("log-scaled arithmetic round trips") {
  LogComplex a = LogComplex::from(cplx(3.0, -4.0));
  CHECK(std::abs(a.to_complex() - cplx(3.0, -4.0)) < 1e-15);

  LogComplex huge = LogComplex::from_log(cplx(800.0, 1.0));
  LogComplex tiny = LogComplex::from_log(cplx(-790.0, 0.3));
  LogComplex prod = huge * tiny;
  CHECK(std::abs(prod.log().real() - 10.0) < 1e-12);
  CHECK(std::abs(prod.log().imag() - 1.3) < 1e-12);

  // addition across scales keeps the dominant part
  LogComplex s = huge + tiny;
  CHECK(rel_diff(s, huge) < 1e-15);

  LogComplex d = a - a;
  CHECK(d.is_zero());
}

TEST_CASE("addition with comparable scales") {
  LogComplex x = LogComplex::from(2.0) * LogComplex::from_log(cplx(100.0, 0.0));
  LogComplex y = LogComplex::from(3.0) * LogComplex::from_log(cplx(100.0, 0.0));
  LogComplex s = x + y;
  CHECK(std::abs(s.log().real() - (std::log(5.0) + 100.0)) < 1e-12);
}

TEST_CASE("gamma basics") {
  CHECK(std::abs(gamma_lc(cplx(1.0, 0.0)).to_complex() - 1.0) < 1e-13);
  CHECK(std::abs(gamma_lc(cplx(5.0, 0.0)).to_complex() - 24.0) < 1e-12);
  CHECK(std::abs(gamma_lc(cplx(0.5, 0.0)).to_complex() - std::sqrt(kPi)) < 1e-13);
  CHECK_THROWS_AS(gamma_lc(cplx(0.0, 0.0)), pole_error);
  CHECK_THROWS_AS(gamma_lc(cplx(-3.0, 0.0)), pole_error);
}

TEST_CASE("gamma functional equation on complex arguments") {
  // Gamma(z+1) = z Gamma(z) across the plane, including the left half
  const cplx zs[] = {{2.5, 3.0}, {-1.3, 0.7}, {0.2, -5.0}, {-7.6, 12.0}, {30.0, 40.0},
                     {150.0, 80.0}, {-0.4, 0.01}, {1e-4, 0.0}};
  for (cplx z : zs) {
    LogComplex lhs = gamma_lc(z + 1.0);
    LogComplex rhs = gamma_lc(z) * z;
    CHECK(rel_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("gamma reflection against known values") {
  // |Gamma(i)|^2 = pi / sinh(pi)
  LogComplex g = gamma_lc(cplx(0.0, 1.0));
  double mag2 = std::exp(2.0 * g.log_abs());
  CHECK(std::abs(mag2 - kPi / std::sinh(kPi)) < 1e-14);

  // duplication: Gamma(2z) = 2^{2z-1}/sqrt(pi) Gamma(z) Gamma(z+1/2)
  cplx z(3.7, -2.2);
  LogComplex lhs = gamma_lc(2.0 * z);
  LogComplex rhs = LogComplex::from_log((2.0 * z - 1.0) * std::log(2.0)) *
                   (1.0 / std::sqrt(kPi)) * gamma_lc(z) * gamma_lc(z + 0.5);
  CHECK(rel_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("gamma accuracy for |z| up to 200") {
  // spot check against the recursion from a moderate argument
  cplx z(180.0, 60.0);
  LogComplex g = gamma_lc(z);
  LogComplex back = g;
  for (int k = 0; k < 30; ++k) back /= (z - (k + 1.0));
  CHECK(rel_diff(back, gamma_lc(z - 30.0)) < 1e-11);
}
