#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "affsphere/errors.hpp"

namespace affsphere::numerics {

struct RootOptions {
  double rel_tol = 4.0 * std::numeric_limits<double>::epsilon();
  double abs_tol = 1e-300;
  int max_iter = 200;
};

/// Safeguarded Newton on a sign-changing bracket [lo, hi]. `fd` returns (f, f').
/// `x0`, when inside the bracket, seeds the iteration.
/// Falls back to bisection whenever the Newton step leaves the bracket or stalls.
template <class FD>
double newton_bracketed(FD&& fd, double lo, double hi, const RootOptions& opts = {},
                        double x0 = std::numeric_limits<double>::quiet_NaN()) {
  auto [flo, dlo] = fd(lo);
  auto [fhi, dhi] = fd(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) fail(ErrorKind::Convergence, "newton_bracketed: no sign change on bracket");
  const bool increasing = fhi > 0;
  double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
  double prev_step = hi - lo;
  for (int it = 0; it < opts.max_iter; ++it) {
    auto [f, d] = fd(x);
    if (f == 0.0) return x;
    if ((f > 0) == increasing) hi = x; else lo = x;
    double step = (d != 0.0 && std::isfinite(d)) ? f / d : 0.0;
    double nx = x - step;
    const bool inside = d != 0.0 && std::isfinite(nx) && nx >= lo && nx <= hi;
    if (inside && std::abs(step) <= opts.rel_tol * std::abs(nx) + opts.abs_tol) return nx;
    if (!inside || std::abs(step) > 0.5 * std::abs(prev_step)) {
      nx = 0.5 * (lo + hi);
      step = x - nx;
      if (hi - lo <= opts.rel_tol * std::abs(nx) + opts.abs_tol) return nx;
    }
    prev_step = step;
    x = nx;
  }
  fail(ErrorKind::Convergence, "newton_bracketed: iteration budget exhausted");
}

/// Derivative-free bracketed solver (Illinois variant of regula falsi with
/// bisection safeguard).
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double x_tol, int max_iter = 300) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) fail(ErrorKind::Convergence, "solve_bracketed: no sign change on bracket");
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi) || it % 4 == 3) x = 0.5 * (lo + hi);
    double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= x_tol) return 0.5 * (lo + hi);
  }
  fail(ErrorKind::Convergence, "solve_bracketed: iteration budget exhausted");
}

}  // namespace affsphere::numerics
