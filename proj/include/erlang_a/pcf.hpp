#ifndef ERLANG_A_PCF_HPP
#define ERLANG_A_PCF_HPP

/**
 * @file pcf.hpp
 * @brief Parabolic cylinder function D_p(z) by vertical-line quadrature.
 *
 * Representation (valid for every complex index p, z real here):
 *
 *   D_p(z) = sqrt(2 pi) e^{z^2/4} (1/2 pi i)
 *            Int_{sigma - i inf}^{sigma + i inf} xi^p e^{xi^2/2 - z xi} dxi,
 *
 * with xi^p principal on Re xi > 0.  The integrand decays like a Gaussian in
 * Im xi, so the trapezoid rule is spectrally accurate; the abscissa sigma is
 * placed at the real-part saddle.  Values are returned log-scaled because
 * D_p(z) itself reaches e^{z^2/4} magnitudes for negative arguments.
 */

#include <cmath>

#include "erlang_a/log_complex.hpp"

namespace erlang_a {

struct PcfConfig {
  int nodes = 400;
  int max_nodes = 12800;
  double rel_tol = 1e-13;
};

/// D_p(z) for complex index p and real argument z.
inline LogComplex pcf_d(cplx p, double z, const PcfConfig& cfg = PcfConfig{}) {
  const double q = std::max(-p.real(), 0.25);
  const double sigma = std::max(0.1, (z + std::sqrt(z * z + 4.0 * q)) / 2.0);

  // outer factor sqrt(2 pi) e^{z^2/4}
  const double outer = 0.5 * std::log(2.0 * kPi) + z * z / 4.0;

  double peak_log = -std::numeric_limits<double>::infinity();
  auto pass = [&](double Y, int K) {
    const double h = 2.0 * Y / K;
    double lmax = -std::numeric_limits<double>::infinity();
    std::vector<cplx> logs(K + 1);
    for (int j = 0; j <= K; ++j) {
      const double y = -Y + j * h;
      const cplx xi(sigma, y);
      cplx L = p * std::log(xi) + xi * xi * 0.5 - z * xi;
      logs[j] = L;
      lmax = std::max(lmax, L.real());
    }
    cplx s(0.0, 0.0);
    for (int j = 0; j <= K; ++j) {
      const double w = (j == 0 || j == K) ? 0.5 : 1.0;
      const cplx d = logs[j] - lmax;
      if (d.real() > -745.0) s += w * std::exp(d);
    }
    peak_log = lmax + outer;  // natural absolute scale of the integral
    // (1/2 pi i) * i dy = dy / (2 pi)
    return LogComplex(s * (h / (2.0 * kPi)), lmax + outer);
  };

  // truncation: e^{(sigma^2 - y^2)/2} decay against |xi|^{Re p} growth and
  // the e^{|Im p| pi/2} phase budget
  double Y = sigma + 2.0;
  for (int it = 0; it < 100; ++it) {
    const double avail = 0.5 * (Y * Y - sigma * sigma) -
                         std::max(p.real(), 0.0) * std::log(2.0 + Y / sigma);
    if (avail >= 45.0 + 0.5 * kPi * std::abs(p.imag())) break;
    Y *= 1.3;
  }

  int K = std::max(cfg.nodes,
                   static_cast<int>(10.0 * (std::abs(z) * Y + std::abs(p) + Y * Y) / kPi) + 50);
  K = std::min(K, cfg.max_nodes);
  LogComplex prev;
  bool have_prev = false;
  double prev_rd = std::numeric_limits<double>::infinity();
  for (;;) {
    LogComplex v = pass(Y, K);
    if (have_prev) {
      // cancellation can make the value vanish (integer-index zeros), so
      // measure agreement against the integrand's own scale as well
      LogComplex diff = v - prev;
      const double rd = rel_diff(v, prev);
      const bool abs_ok = diff.is_zero() || diff.log_abs() <= peak_log + std::log(cfg.rel_tol);
      if (rd <= cfg.rel_tol || abs_ok) return v;
      if (rd > 0.25 * prev_rd && rd <= 200.0 * cfg.rel_tol) return v;
      if (K >= cfg.max_nodes) {
        if (rd <= 200.0 * cfg.rel_tol) return v;
        throw accuracy_error("pcf quadrature: node budget exhausted", v.mant, rd);
      }
      prev_rd = rd;
    }
    prev = v;
    have_prev = true;
    K = std::min(2 * K, cfg.max_nodes);
  }
}

/// d/dz D_p(z) via the contiguous relation D_p'(z) = (z/2) D_p(z) - D_{p+1}(z).
inline LogComplex pcf_d_deriv(cplx p, double z, const PcfConfig& cfg = PcfConfig{}) {
  return pcf_d(p, z, cfg) * (z / 2.0) - pcf_d(p + 1.0, z, cfg);
}

}  // namespace erlang_a

#endif  // ERLANG_A_PCF_HPP
