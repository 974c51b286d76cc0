#ifndef ERLANG_A_DIFFUSION_HPP
#define ERLANG_A_DIFFUSION_HPP

/**
 * @file diffusion.hpp
 * @brief Heavy-traffic (square-root staffing) limits of the first-passage
 *        transforms, built from parabolic cylinder functions.
 *
 * Scaling: rho = m - sqrt(m) beta, states x = (n - m)/sqrt(m), exit level
 * b = (n_star - m)/sqrt(m).  The limit transform solves
 *
 *   theta P = P_xx - (beta + x) P_x        on x < 0  (free servers)
 *   theta P = P_xx - (beta + eta x) P_x    on 0 < x < b  (abandonment)
 *
 * with P(b) = 1 and value/slope continuity at 0.  For eta = 0 the upper
 * piece degenerates to constant drift and the solution is a cosh/sinh
 * combination against a single cylinder-function pair.
 */

#include "erlang_a/log_complex.hpp"
#include "erlang_a/pcf.hpp"

namespace erlang_a {

/// Square-root staffing scale map between integer states and diffusion
/// coordinates.
struct HwScaling {
  double beta;  ///< slack: rho = m - sqrt(m) beta
  double b;     ///< scaled exit level, 0 < b

  double rho_of(int m) const { return m - std::sqrt(static_cast<double>(m)) * beta; }
  int state_of(int m, double x) const {
    return static_cast<int>(std::lround(m + std::sqrt(static_cast<double>(m)) * x));
  }
  double x_of(int m, int n) const {
    return (n - m) / std::sqrt(static_cast<double>(m));
  }
};

namespace detail {

/// Lambda(theta; x, beta) = s cosh(sx/2) D_{-theta}(-beta)
///   + sinh(sx/2) [2 D_{1-theta}(-beta) + beta D_{-theta}(-beta)],  s^2 = beta^2 + 4 theta
inline LogComplex hw_lambda(cplx theta, double x, double beta, const PcfConfig& cfg) {
  const cplx s = std::sqrt(beta * beta + 4.0 * theta);
  LogComplex d0 = pcf_d(-theta, -beta, cfg);
  LogComplex d1 = pcf_d(1.0 - theta, -beta, cfg);
  const cplx arg = s * (x / 2.0);
  LogComplex ch = (LogComplex::from_log(arg) + LogComplex::from_log(-arg)) * 0.5;
  LogComplex sh = (LogComplex::from_log(arg) - LogComplex::from_log(-arg)) * 0.5;
  return d0 * s * ch + (d1 * 2.0 + d0 * beta) * sh;
}

}  // namespace detail

namespace detail {

/// Lower (x <= 0) piece of the no-abandonment limit, analytic in x.
inline cplx hw_mmm_lower(const HwScaling& sc, double x, cplx theta, const PcfConfig& cfg) {
  const double beta = sc.beta, b = sc.b;
  const cplx s = std::sqrt(beta * beta + 4.0 * theta);
  LogComplex num = pcf_d(-theta, -beta - x, cfg) * s *
                   LogComplex::from_log(cplx(x * beta / 2.0 + x * x / 4.0 - beta * b / 2.0, 0.0));
  return (num / hw_lambda(theta, b, beta, cfg)).to_complex();
}

/// Upper (0 <= x <= b) piece of the no-abandonment limit, analytic in x.
inline cplx hw_mmm_upper(const HwScaling& sc, double x, cplx theta, const PcfConfig& cfg) {
  const double beta = sc.beta, b = sc.b;
  LogComplex num = hw_lambda(theta, x, beta, cfg) *
                   LogComplex::from_log(cplx(beta * (x - b) / 2.0, 0.0));
  return (num / hw_lambda(theta, b, beta, cfg)).to_complex();
}

}  // namespace detail

/**
 * First-passage limit transform for the no-abandonment model.
 * Piecewise: cylinder function below 0, drift-diffusion combination above.
 */
inline cplx hw_fpt_mmm(const HwScaling& sc, double x, cplx theta,
                       const PcfConfig& cfg = PcfConfig{}) {
  if (x > sc.b) throw std::domain_error("hw_fpt_mmm: x <= b required");
  return x <= 0.0 ? detail::hw_mmm_lower(sc, x, theta, cfg)
                  : detail::hw_mmm_upper(sc, x, theta, cfg);
}

namespace detail {

struct HwErlangAParts {
  LogComplex lam1, lam2, den;
  double sq_eta;
  cplx a;  // upper-piece index
};

inline HwErlangAParts hw_erlang_a_parts(const HwScaling& sc, double eta, cplx theta,
                                        const PcfConfig& cfg) {
  HwErlangAParts parts;
  const double beta = sc.beta;
  parts.sq_eta = std::sqrt(eta);
  parts.a = -theta / eta;
  LogComplex d_beta = pcf_d(-theta, -beta, cfg);
  LogComplex dp_beta = pcf_d_deriv(-theta, -beta, cfg);
  LogComplex u_minus = pcf_d(parts.a, -beta / parts.sq_eta, cfg);
  LogComplex up_minus = pcf_d_deriv(parts.a, -beta / parts.sq_eta, cfg);
  LogComplex u_plus = pcf_d(parts.a, beta / parts.sq_eta, cfg);
  LogComplex up_plus = pcf_d_deriv(parts.a, beta / parts.sq_eta, cfg);
  parts.lam1 = -(up_minus * parts.sq_eta * d_beta) + u_minus * dp_beta;
  parts.lam2 = -(up_plus * parts.sq_eta * d_beta) - u_plus * dp_beta;
  parts.den = pcf_d(parts.a, (beta + eta * sc.b) / parts.sq_eta, cfg) * parts.lam1 +
              pcf_d(parts.a, (-beta - eta * sc.b) / parts.sq_eta, cfg) * parts.lam2;
  return parts;
}

/// Lower (x <= 0) piece: sqrt(2 pi eta) D_{-theta}(-beta - x) over
/// Gamma(theta/eta) times the interface combination, with the
/// boundary-matching exponential factors.  Analytic in x.
inline cplx hw_erlang_a_lower(const HwScaling& sc, double eta, double x, cplx theta,
                              const PcfConfig& cfg) {
  auto parts = hw_erlang_a_parts(sc, eta, theta, cfg);
  const double beta = sc.beta, b = sc.b;
  LogComplex num =
      pcf_d(-theta, -beta - x, cfg) *
      LogComplex::from_log(cplx(0.5 * std::log(2.0 * kPi * eta) + beta * (x - b) / 2.0 +
                                    (x * x - eta * b * b) / 4.0,
                                0.0) -
                           lgamma_c(theta / eta));
  return (num / parts.den).to_complex();
}

/// Upper (0 <= x < b) piece, analytic in x.
inline cplx hw_erlang_a_upper(const HwScaling& sc, double eta, double x, cplx theta,
                              const PcfConfig& cfg) {
  auto parts = hw_erlang_a_parts(sc, eta, theta, cfg);
  const double beta = sc.beta, b = sc.b;
  LogComplex num = (pcf_d(parts.a, (beta + eta * x) / parts.sq_eta, cfg) * parts.lam1 +
                    pcf_d(parts.a, (-beta - eta * x) / parts.sq_eta, cfg) * parts.lam2) *
                   LogComplex::from_log(
                       cplx(beta * (x - b) / 2.0 + eta * (x * x - b * b) / 4.0, 0.0));
  return (num / parts.den).to_complex();
}

}  // namespace detail

/**
 * First-passage limit transform for the abandonment model (eta > 0), from
 * the interface-matched cylinder-function pair.
 */
inline cplx hw_fpt_erlang_a(const HwScaling& sc, double eta, double x, cplx theta,
                            const PcfConfig& cfg = PcfConfig{}) {
  if (!(eta > 0.0)) throw std::invalid_argument("hw_fpt_erlang_a: eta > 0 required");
  if (x > sc.b) throw std::domain_error("hw_fpt_erlang_a: x <= b required");
  return x <= 0.0 ? detail::hw_erlang_a_lower(sc, eta, x, theta, cfg)
                  : detail::hw_erlang_a_upper(sc, eta, x, theta, cfg);
}

}  // namespace erlang_a

#endif  // ERLANG_A_DIFFUSION_HPP
