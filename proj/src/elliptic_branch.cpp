#include <cmath>
#include <sstream>

#include "affsphere/branch_solver.hpp"
#include "affsphere/errors.hpp"
#include "affsphere/power_ode.hpp"

namespace affsphere {

namespace detail {

/// Integrand data shared by alpha_of_c and EllipticBranch.
struct Kernel {
  PowerParams pp;
  double c, m, k;
  CubicRoots r;
  double s0, d12, d13;

  Kernel(const PowerParams& params, double c_) : pp(params), c(c_), m(params.m()), k(params.k()) {
    if (!(c > -2 * m && c < 0)) {
      std::ostringstream os;
      os << "elliptic branch needs -2(p+q) < c < 0, got c = " << c;
      fail(ErrorKind::Domain, os.str());
    }
    r = cubic_roots(pp, c);
    s0 = std::sqrt(r.one_minus_xi1);
    d12 = r.xi1 - r.xi2;
    d13 = r.xi1 - r.xi3;
  }

  double G(double z) const {
    const double z2 = z * z;
    const double xi = z2 + r.xi1;
    const double sq = std::sqrt(m * (z2 + d12) * (z2 + d13));
    const double A = 3 * xi + 2 * k;
    if (z >= 0) return 2 * m * A / (sq * (2 * z * sq - c));
    return A * (2 * z * sq + c) / (2 * sq * (z - s0) * (z + s0) * (xi + pp.p()) * (xi + pp.q()));
  }

  /// G - 1/(zeta + s0) in a form free of cancellation at the pole:
  /// 2 s0^2 m (zeta^2 + s0^2 + d12 + d13) / ((2 s0 sqrt(Q) - c) sqrt(Q))
  ///   - (1/(p(xi+p)) + 1/(q(xi+q))) (zeta + c/(2 sqrt(Q))).
  double H(double z) const {
    const double z2 = z * z;
    const double xi = z2 + r.xi1;
    const double sq = std::sqrt(m * (z2 + d12) * (z2 + d13));
    const double s02 = r.one_minus_xi1;
    const double pole_part = 2 * s02 * m * (z2 + s02 + d12 + d13) / ((2 * s0 * sq - c) * sq);
    return pole_part - (1 / (pp.p() * (xi + pp.p())) + 1 / (pp.q() * (xi + pp.q()))) * (z + c / (2 * sq));
  }

  /// g = G (zeta + s0), analytic with g(-s0) = 1.
  double g(double z) const {
    const double u = z + s0;
    return std::abs(u) < 1 ? 1 + u * H(z) : G(z) * u;
  }

  double tail_right(double v) const {
    const double z = -s0 + 1 / v;
    return G(z) / (v * v);
  }
  double tail_left(double v) const {
    const double z = -s0 - 1 / v;
    return G(z) / (v * v);
  }
};

}  // namespace detail

using detail::Kernel;

AlphaResult alpha_of_c(const PowerParams& pp, double c, double rel_tol) {
  const Kernel K(pp, c);
  numerics::QuadOptions qo;
  qo.abs_tol = 1e-16;
  qo.rel_tol = rel_tol;
  const double a = 1 - K.s0, b = -K.s0 - 1;
  const numerics::QuadResult parts[] = {
      numerics::integrate([&](double v) { return K.tail_right(v); }, 0, 1, qo),
      numerics::integrate([&](double v) { return K.tail_left(v); }, 0, 1, qo),
      numerics::integrate([&](double z) { return K.H(z); }, b, -K.s0, qo),
      numerics::integrate([&](double z) { return K.H(z); }, -K.s0, 0, qo),
      numerics::integrate([&](double z) { return K.H(z); }, 0, a, qo),
  };
  AlphaResult res;
  for (const auto& q : parts) {
    res.log_alpha -= q.value;
    res.log_error += q.error;
  }
  res.alpha = std::exp(res.log_alpha);
  res.error = res.alpha * res.log_error;
  return res;
}

EllipticBranch::EllipticBranch(const PowerParams& pp, double c, const EllipticOptions& opts) : pp_(pp), c_(c) {
  auto kern = std::make_shared<const Kernel>(pp, c);
  roots_ = kern->r;
  s0_ = kern->s0;
  const double a = 1 - s0_, b = -s0_ - 1;
  right_tail_ = numerics::CumulativeIntegral([kern](double v) { return kern->tail_right(v); }, 0, 1, opts.cell_tol);
  left_tail_ = numerics::CumulativeIntegral([kern](double v) { return kern->tail_left(v); }, 0, 1, opts.cell_tol);
  right_core_ = numerics::CumulativeIntegral([kern](double z) { return kern->H(z); }, {-s0_, 0.0, a}, opts.cell_tol);
  left_core_ = numerics::CumulativeIntegral([kern](double z) { return kern->H(z); }, {b, -s0_}, opts.cell_tol);
  log_alpha_ = -(right_tail_.total() + left_tail_.total() + right_core_.total() + left_core_.total());
  error_ = right_tail_.error_estimate() + left_tail_.error_estimate() + right_core_.error_estimate() +
           left_core_.error_estimate();
  kernel_ = kern;
}

double EllipticBranch::G(double zeta) const { return kernel_->G(zeta); }
double EllipticBranch::g(double zeta) const { return kernel_->g(zeta); }

double EllipticBranch::log_E(double zeta) const {
  const double u = zeta + s0_;
  if (u >= 1) return -right_tail_(1 / u) - std::log(u);
  if (u >= 0) return -right_tail_.total() - (right_core_.total() - right_core_(zeta));
  if (u > -1) return log_alpha_ + left_tail_.total() + left_core_(zeta);
  return log_alpha_ + left_tail_(-1 / u) - std::log(-u);
}

CurvePoint EllipticBranch::point(double zeta) const {
  if (!std::isfinite(zeta)) fail(ErrorKind::Domain, "elliptic_curve: zeta must be finite");
  const Kernel& K = *kernel_;
  const double u = zeta + s0_;
  const double logE = log_E(zeta);
  const double E = std::exp(logE);
  CurvePoint cp;
  cp.param = zeta;
  cp.t = u >= 1 ? std::exp(-right_tail_(1 / u)) : u * E;
  const double z2 = zeta * zeta;
  const double xi = z2 + roots_.xi1;
  const double sq = std::sqrt(K.m * (z2 + K.d12) * (z2 + K.d13));
  cp.xi = xi;
  cp.phi_dot = (zeta - s0_) / E;
  if (zeta >= 0)
    cp.phi = std::log((-c_ + 2 * zeta * sq) / (2 * K.m * cp.t));
  else
    cp.phi = std::log(2 * (zeta - s0_) * (xi + pp_.p()) * (xi + pp_.q()) / (2 * zeta * sq + c_)) - logE;
  cp.phi_ddot = phi_ddot_from_ode(pp_, cp.t, cp.phi, cp.phi_dot);
  cp.dt_dparam = E * K.g(zeta);
  return cp;
}

CurveSample EllipticBranch::operator()(double zeta) const {
  const CurvePoint cp = point(zeta);
  return {cp.t, cp.phi};
}

CurveSample elliptic_curve(const EllipticBranch& branch, double zeta) { return branch(zeta); }

}  // namespace affsphere
