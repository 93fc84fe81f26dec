#include <algorithm>
#include <cmath>
#include <sstream>

#include "affsphere/errors.hpp"
#include "affsphere/numerics/roots.hpp"
#include "affsphere/power_ode.hpp"

namespace affsphere {

namespace {

using numerics::DenseStep;
using numerics::State;

// P written in d = xi - 1 so that tiny d keeps full relative precision.
double P_of_d(const PowerParams& pp, double d) { return d * (d + 1 + pp.p()) * (d + 1 + pp.q()); }

double dP_of_d(const PowerParams& pp, double d) {
  const double a = d + 1 + pp.p(), b = d + 1 + pp.q();
  return a * b + d * (a + b);
}

/// e = s - c for s = sigma sqrt(R), written without cancellation.
double e_from(const PowerParams& pp, double c, double s, double d) {
  if (s * c > 0) return 4 * pp.m() * P_of_d(pp, d) / (s + c);
  return s - c;
}

[[noreturn]] void left_region(double tau, double xi, double e) {
  std::ostringstream os;
  os.precision(17);
  os << "trajectory left the admissible region at tau = " << tau << " (xi = " << xi << ", e = " << e << ")";
  fail(ErrorKind::LeftAdmissibleRegion, os.str());
}

/// Pull (d, e) back onto e^2 + 2 c e = 4 m P(1 + d) along the better-conditioned
/// coordinate. Skipped near the singular point of the c = -2m manifold.
void project(const PowerParams& pp, double c, State<2>& y) {
  double& d = y[0];
  double& e = y[1];
  const double h = e * e + 2 * c * e - 4 * pp.m() * P_of_d(pp, d);
  const double he = 2 * (e + c);
  const double hd = -4 * pp.m() * dP_of_d(pp, d);
  const double scale = std::max({1.0, std::abs(e), std::abs(d)});
  if (std::max(std::abs(he), std::abs(hd)) < 1e-6 * scale) return;
  if (std::abs(hd) * std::max(1.0, std::abs(d)) >= std::abs(he) * std::max(1.0, std::abs(e))) {
    const double step = h / hd;
    if (std::abs(step) <= 1e-6 * std::max(1.0, std::abs(d))) d -= step;
  } else {
    const double step = h / he;
    if (std::abs(step) <= 1e-6 * std::max(1e-300, std::abs(e))) e -= step;
  }
}

}  // namespace

XiState xi_state_from(const PowerParams& pp, double c, double tau, double d, double e) {
  XiState s;
  s.tau = tau;
  s.xi = 1.0 + d;
  s.sigma = e + c >= 0 ? 1 : -1;
  s.c = c;
  s.t = std::exp(tau);
  s.phi = std::log(e / (2 * pp.m())) - tau;
  return s;
}

XiState XiTrajectory::at(double tau) const {
  if (segments.empty()) return states.front();
  const bool forward = segments.front().h > 0;
  // Segments are contiguous and ordered in the integration direction.
  auto it = std::lower_bound(segments.begin(), segments.end(), tau, [forward](const DenseStep<2>& s, double v) {
    return forward ? s.t1() < v : s.t1() > v;
  });
  if (it == segments.end()) --it;
  const State<2> y = (*it)(tau);
  return xi_state_from(params, c, tau, y[0], y[1]);
}

XiTrajectory integrate_xi(const PowerParams& pp, double c, int sigma0, double xi0, double tau0, double tau_end,
                          const XiOptions& opts) {
  return integrate_xi_d(pp, c, sigma0, xi0 - 1.0, tau0, tau_end, opts);
}

XiTrajectory integrate_xi_d(const PowerParams& pp, double c, int sigma0, double d0, double tau0, double tau_end,
                            const XiOptions& opts) {
  const double m = pp.m(), k = pp.k();
  const double xi0 = 1.0 + d0;
  double R0 = c * c + 4 * m * P_of_d(pp, d0);
  if (R0 < 0 && R0 > -1e-13 * std::max(1.0, c * c)) R0 = 0;
  if (R0 < 0 || !(3 * xi0 + 2 * k > 0)) left_region(tau0, xi0, std::nan(""));
  const double s0 = (sigma0 >= 0 ? 1.0 : -1.0) * std::sqrt(R0);
  const double e0 = e_from(pp, c, s0, d0);
  if (!(e0 > 0)) left_region(tau0, xi0, e0);

  XiTrajectory traj;
  traj.params = pp;
  traj.c = c;
  {
    XiState st = xi_state_from(pp, c, tau0, d0, e0);
    st.sigma = sigma0 >= 0 ? 1 : -1;
    traj.states.push_back(st);
  }

  auto rhs = [&](double, const State<2>& y, State<2>& dy) {
    const double xi = 1 + y[0];
    dy[0] = (y[1] + c) * y[1] / (2 * m * (3 * xi + 2 * k));
    dy[1] = xi * y[1];
  };
  numerics::OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  oo.max_steps = opts.max_steps;
  numerics::Dopri5<2> solver(rhs, oo);

  int sigma = traj.states.front().sigma;
  auto observer = [&](const DenseStep<2>& seg, State<2>& y) {
    if (opts.project) project(pp, c, y);
    const double xi = 1 + y[0];
    if (!(3 * xi + 2 * k > 0) || !(y[1] > 0) || !std::isfinite(y[0])) left_region(seg.t1(), xi, y[1]);
    traj.segments.push_back(seg);
    const double sc = y[1] + c;
    const int new_sigma = sc > 0 ? 1 : (sc < 0 ? -1 : sigma);
    if (new_sigma != sigma) {
      auto g = [&](double tau) { return seg(tau)[1] + c; };
      const double a = seg.t0, b = seg.t1();
      double ts = b;
      if ((g(a) > 0) != (g(b) > 0)) ts = numerics::solve_bracketed(g, std::min(a, b), std::max(a, b), 1e-15 * std::max(1.0, std::abs(b)));
      const State<2> ys = seg(ts);
      XiState st = xi_state_from(pp, c, ts, ys[0], -c);
      st.sigma = new_sigma;
      traj.states.push_back(st);
      traj.switch_taus.push_back(ts);
      sigma = new_sigma;
    }
    XiState st = xi_state_from(pp, c, seg.t1(), y[0], y[1]);
    st.sigma = sigma;
    traj.states.push_back(st);
    if (xi > opts.blowup_xi) {
      traj.termination = XiTermination::BlowUp;
      traj.tau_star = seg.t1() + 1.5 / xi - k / (4 * xi * xi);
      return numerics::StepAction::Stop;
    }
    return numerics::StepAction::Continue;
  };
  solver.integrate(tau0, {d0, e0}, tau_end, observer);

  if (traj.termination == XiTermination::BlowUp && opts.blowup_is_error) {
    std::ostringstream os;
    os.precision(17);
    os << "xi escapes to infinity at tau* = " << traj.tau_star;
    fail(ErrorKind::BlowUp, os.str(), traj.tau_star);
  }
  return traj;
}

}  // namespace affsphere
