#include "affsphere/branch_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "affsphere/errors.hpp"
#include "affsphere/numerics/roots.hpp"
#include "affsphere/power_ode.hpp"

namespace affsphere {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

CubicRoots cubic_roots(const PowerParams& pp, double c) {
  const double m = pp.m(), k = pp.k();
  if (!std::isfinite(c) || std::abs(c) > 2 * m) fail(ErrorKind::Domain, "cubic_roots: need |c| <= 2(p+q), got c = " + num(c));
  // c^2 + 4m P(xi) = 4m (xi^2 (xi + k) - eps)
  const double eps = (2 * m + c) * (2 * m - c) / (4 * m);
  if (eps == 0.0) return {0.0, 0.0, -k, 1.0};
  auto fd = [&](double x) { return std::pair{x * x * (x + k) - eps, x * (3 * x + 2 * k)}; };
  CubicRoots r;
  // f(0) = -eps < 0 and f(1) = m - eps >= 0; rounding can make f(1) <= 0 when
  // c is tiny, and then xi1 = 1 to working precision before the refinement below.
  const double g1 = std::sqrt(eps / k);
  r.xi1 = fd(1.0).first <= 0.0 ? 1.0 : numerics::newton_bracketed(fd, 0.0, 1.0, {}, g1);
  r.one_minus_xi1 = 1.0 - r.xi1;
  if (r.one_minus_xi1 < 0.5) {
    // In delta = 1 - xi: c^2/(4m) - (3 + 2k) delta + (3 + k) delta^2 - delta^3 = 0.
    const double c2 = c * c / (4 * m);
    auto gd = [&](double d) {
      return std::pair{c2 - d * ((3 + 2 * k) - d * ((3 + k) - d)), -(3 + 2 * k) + d * (2 * (3 + k) - 3 * d)};
    };
    r.one_minus_xi1 = c2 == 0.0 ? 0.0 : numerics::newton_bracketed(gd, 0.0, 0.75, {}, c2 / (3 + 2 * k));
    r.xi1 = 1.0 - r.one_minus_xi1;
  }
  // Deflate: x^3 + k x^2 - eps = (x - xi1)(x^2 + b x + xi1 b), b = k + xi1.
  const double b = k + r.xi1;
  const double disc = std::max(0.0, b * (k - 3 * r.xi1));
  r.xi3 = -0.5 * (b + std::sqrt(disc));
  r.xi2 = r.xi3 == 0.0 ? 0.0 : r.xi1 * b / r.xi3;
  for (double* x : {&r.xi2, &r.xi3})
    for (int it = 0; it < 3; ++it) {
      const auto [f, df] = fd(*x);
      if (df == 0.0) break;
      const double nx = *x - f / df;
      if (!(std::abs(fd(nx).first) < std::abs(f))) break;
      *x = nx;
    }
  r.xi2 = std::clamp(r.xi2, -pp.q(), 0.0);
  r.xi3 = std::min(r.xi3, -pp.p());
  if (r.xi2 < r.xi3) std::swap(r.xi2, r.xi3);
  return r;
}

CurvePoint c0_point(const PowerParams& pp, double zeta) {
  const double p = pp.p(), q = pp.q();
  const double z2 = zeta * zeta;
  const double lp = std::log(z2 + p + 1), lq = std::log(z2 + q + 1);
  // W = t / zeta
  const double W = std::exp(-lp / (2 * p) - lq / (2 * q));
  CurvePoint c;
  c.param = zeta;
  c.t = zeta * W;
  c.phi = -0.5 * std::log(pp.m()) + (p + 1) / (2 * p) * lp + (q + 1) / (2 * q) * lq;
  c.xi = 1 + z2;
  c.phi_dot = zeta / W;
  c.phi_ddot = phi_ddot_from_ode(pp, c.t, c.phi, c.phi_dot);
  c.dt_dparam = W * (1 - z2 / (p * (z2 + p + 1)) - z2 / (q * (z2 + q + 1)));
  return c;
}

CurveSample c0_curve(const PowerParams& pp, double zeta) {
  const CurvePoint c = c0_point(pp, zeta);
  return {c.t, c.phi};
}

CurvePoint extreme_point_beta1(const PowerParams& pp, double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) fail(ErrorKind::Domain, "extreme_curve_beta1: need xi > 0, got " + num(xi));
  const double p = pp.p(), q = pp.q(), m = pp.m(), k = pp.k();
  const double r = std::sqrt(xi + k);
  const double sm = std::sqrt(m), sk = std::sqrt(k);
  const double log_t = std::log(r + sm) + std::sqrt(k / m) * (std::log(xi) - 2 * std::log(r + sk)) +
                       (std::log(r + std::sqrt(q - 1)) - std::log(xi + p)) / p +
                       (std::log(r + std::sqrt(p - 1)) - std::log(xi + q)) / q;
  CurvePoint c;
  c.param = xi;
  c.xi = xi;
  c.t = std::exp(log_t);
  c.phi = std::log1p(xi * r / sm) - log_t;
  c.phi_dot = (xi - 1) / c.t;
  c.phi_ddot = phi_ddot_from_ode(pp, c.t, c.phi, c.phi_dot);
  c.dt_dparam = c.t * (3 * xi + 2 * k) / (2 * xi * r * (xi * r + sm));
  return c;
}

CurveSample extreme_curve_beta1(const PowerParams& pp, double xi) {
  const CurvePoint c = extreme_point_beta1(pp, xi);
  return {c.t, c.phi};
}

CurvePoint extreme_point_betainf(const PowerParams& pp, double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) fail(ErrorKind::Domain, "extreme_curve_betainf: need xi > 0, got " + num(xi));
  const double p = pp.p(), q = pp.q(), m = pp.m(), k = pp.k();
  const double r = std::sqrt(xi + k);
  const double sm = std::sqrt(m), sk = std::sqrt(k);
  // t = (1 - xi) D, with (r + sk)/(r - sk) = (r + sk)^2 / xi.
  const double log_D = -std::log(r + sm) + std::sqrt(k / m) * (2 * std::log(r + sk) - std::log(xi)) -
                       std::log(r + std::sqrt(q - 1)) / p - std::log(r + std::sqrt(p - 1)) / q;
  const double D = std::exp(log_D);
  const double N = (1 + xi + xi * xi / m) / (1 + xi * r / sm);
  CurvePoint c;
  c.param = xi;
  c.xi = xi;
  c.t = (1 - xi) * D;
  c.phi = std::log(N) - log_D;
  c.phi_dot = -1 / D;
  c.phi_ddot = phi_ddot_from_ode(pp, c.t, c.phi, c.phi_dot);
  c.dt_dparam = -D * (3 * xi + 2 * k) * (xi * r + sm) / (2 * xi * r * (xi + p) * (xi + q));
  return c;
}

CurveSample extreme_curve_betainf(const PowerParams& pp, double xi) {
  const CurvePoint c = extreme_point_betainf(pp, xi);
  return {c.t, c.phi};
}

CofAlphaResult c_of_alpha_detail(const PowerParams& pp, double alpha) {
  const double m = pp.m();
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::Domain, "c_of_alpha: need alpha in [0, 1], got " + num(alpha));
  CofAlphaResult res;
  if (alpha == 1.0) return res;
  if (alpha == 0.0) {
    res.c = -2 * m;
    return res;
  }
  // Scan fractions f of -2m; alpha(0) = 1 and alpha(-2m) = 0 by continuity.
  const double fr[] = {0.0,  1e-4, 1e-2, 0.05, 0.1, 0.2, 0.3,  0.4,   0.5,    0.6,
                       0.7,  0.8,  0.9,  0.95, 0.99, 0.999, 0.9999, 0.99999, 1.0};
  for (double f : fr) {
    const double c = -2 * m * f;
    double a = f == 0.0 ? 1.0 : (f == 1.0 ? 0.0 : alpha_of_c(pp, c).alpha);
    res.scan.emplace_back(c, a);
  }
  int bracket = -1;
  for (std::size_t i = 0; i + 1 < res.scan.size(); ++i) {
    const double a0 = res.scan[i].second - alpha, a1 = res.scan[i + 1].second - alpha;
    if ((a0 > 0) != (a1 > 0) || a1 == 0.0) {
      ++res.crossings;
      if (bracket < 0) bracket = static_cast<int>(i);
    }
  }
  if (bracket < 0 || res.crossings != 1) {
    std::ostringstream os;
    os << "c_of_alpha: " << res.crossings << " sign changes in scan for alpha = " << alpha << ":";
    for (auto& [c, a] : res.scan) os << " (" << c << ", " << a << ")";
    fail(ErrorKind::Convergence, os.str());
  }
  double lo = res.scan[bracket + 1].first, hi = res.scan[bracket].first;
  // Keep strictly inside the open interval for the endpoint cells.
  if (lo <= -2 * m) lo = -2 * m * (1 - 1e-12);
  if (hi >= 0.0) hi = -2 * m * 1e-12;
  auto f = [&](double c) { return alpha_of_c(pp, c).alpha - alpha; };
  res.c = numerics::solve_bracketed(f, lo, hi, 1e-14 * m);
  res.alpha_error = std::abs(f(res.c));
  return res;
}

double c_of_alpha(const PowerParams& pp, double alpha) { return c_of_alpha_detail(pp, alpha).c; }

}  // namespace affsphere
