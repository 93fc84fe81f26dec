#include "affsphere/phi_solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "affsphere/errors.hpp"
#include "affsphere/exp_sphere.hpp"
#include "affsphere/numerics/roots.hpp"
#include "affsphere/power_ode.hpp"

namespace affsphere {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Curve { Orthant, Exp, Even, Elliptic, Beta1, BetaInfReflected };
enum class ParamMap { Identity, Sinh, Exp };

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

struct PhiSolution::Impl {
  ConeSpec spec;
  BranchData branch;
  Curve curve = Curve::Orthant;
  ParamMap map = ParamMap::Identity;
  std::optional<EllipticBranch> elliptic;
  double lower = 0, upper = kInf;
  double p_lower = 0, p_upper = kInf;
  // inversion table over u
  std::vector<double> u_nodes, t_nodes;
  double u_min = -700, u_max = 700;  // hard limits of the parameter map

  explicit Impl(const ConeSpec& s) : spec(s) {}

  double param_of_u(double u) const { return map == ParamMap::Sinh ? std::sinh(u) : std::exp(u); }
  double dparam_du(double u) const { return map == ParamMap::Sinh ? std::cosh(u) : std::exp(u); }
  double u_of_param(double v) const { return map == ParamMap::Sinh ? std::asinh(v) : std::log(v); }

  CurvePoint eval(double param) const {
    const PowerParams& pp = spec.params();
    switch (curve) {
      case Curve::Orthant: {
        if (!(param > 0)) fail(ErrorKind::Domain, "orthant: t must be positive, got " + num(param));
        CurvePoint c;
        c.param = c.t = param;
        c.phi = -std::log(param);
        c.phi_dot = -1 / param;
        c.phi_ddot = 1 / (param * param);
        c.xi = 0.0;
        c.dt_dparam = 1.0;
        return c;
      }
      case Curve::Exp: {
        const ExpCurvePoint e = exp_curve(param);
        CurvePoint c;
        c.param = param;
        c.t = e.t;
        c.phi = e.phi;
        c.phi_dot = e.phi_dot;
        c.phi_ddot = e.phi_ddot;
        c.xi = 1 + e.t * e.phi_dot;
        c.dt_dparam = exp_dt_dkappa(param);
        return c;
      }
      case Curve::Even: return c0_point(pp, param);
      case Curve::Elliptic: return elliptic->point(param);
      case Curve::Beta1: return extreme_point_beta1(pp, param);
      case Curve::BetaInfReflected: {
        CurvePoint c = extreme_point_betainf(pp, param);
        c.t = -c.t;
        c.phi_dot = -c.phi_dot;
        c.dt_dparam = -c.dt_dparam;
        return c;
      }
    }
    return {};
  }

  void build_table(int n, double u_lo, double u_hi) {
    u_nodes.resize(n);
    t_nodes.resize(n);
    for (int i = 0; i < n; ++i) {
      u_nodes[i] = u_lo + (u_hi - u_lo) * i / (n - 1);
      t_nodes[i] = eval(param_of_u(u_nodes[i])).t;
    }
    // t saturates at finite endpoints once the parameter is large; keep the
    // strictly increasing core around the middle node.
    int a = n / 2, b = n / 2;
    while (a > 0 && t_nodes[a - 1] < t_nodes[a]) --a;
    while (b + 1 < n && t_nodes[b + 1] > t_nodes[b]) ++b;
    if (b - a < n / 2)
      fail(ErrorKind::Convergence, "inversion table is not monotone near u = " + num(u_nodes[a > 0 ? a - 1 : b + 1]));
    u_nodes = std::vector<double>(u_nodes.begin() + a, u_nodes.begin() + b + 1);
    t_nodes = std::vector<double>(t_nodes.begin() + a, t_nodes.begin() + b + 1);
  }

  double param_of_t(double t) const {
    if (!(t > lower && t < upper))
      fail(ErrorKind::Domain, spec.name() + ": t = " + num(t) + " outside (" + num(lower) + ", " + num(upper) + ")");
    if (curve == Curve::Orthant) return t;
    if (curve == Curve::Exp) return exp_kappa_of_t(t);
    double lo, hi, x0;
    auto it = std::lower_bound(t_nodes.begin(), t_nodes.end(), t);
    if (it != t_nodes.end() && *it == t) return param_of_u(u_nodes[it - t_nodes.begin()]);
    if (it == t_nodes.begin()) {
      hi = u_nodes.front();
      double step = u_nodes[1] - u_nodes[0];
      lo = hi - step;
      while (!(eval(param_of_u(lo)).t < t)) {
        hi = lo;
        step *= 2;
        lo = std::max(hi - step, u_min);
        if (hi <= u_min) fail(ErrorKind::Convergence, spec.name() + ": cannot bracket t = " + num(t));
      }
      x0 = 0.5 * (lo + hi);
    } else if (it == t_nodes.end()) {
      lo = u_nodes.back();
      double step = u_nodes[1] - u_nodes[0];
      hi = lo + step;
      while (!(eval(param_of_u(hi)).t > t)) {
        lo = hi;
        step *= 2;
        hi = std::min(lo + step, u_max);
        if (lo >= u_max) fail(ErrorKind::Convergence, spec.name() + ": cannot bracket t = " + num(t));
      }
      x0 = 0.5 * (lo + hi);
    } else {
      const std::size_t i = static_cast<std::size_t>(it - t_nodes.begin());
      lo = u_nodes[i - 1];
      hi = u_nodes[i];
      const double w = (t - t_nodes[i - 1]) / (t_nodes[i] - t_nodes[i - 1]);
      x0 = lo + w * (hi - lo);
    }
    auto fd = [&](double u) {
      const CurvePoint c = eval(param_of_u(u));
      return std::pair{c.t - t, c.dt_dparam * dparam_du(u)};
    };
    numerics::RootOptions ro;
    ro.rel_tol = 2 * std::numeric_limits<double>::epsilon();
    ro.abs_tol = 1e-300;
    const double u = numerics::newton_bracketed(fd, lo, hi, ro, x0);
    return param_of_u(u);
  }
};

PhiSolution::PhiSolution(const ConeSpec& spec, const SolverOptions& opts) {
  auto impl = std::make_shared<Impl>(spec);
  Impl& I = *impl;
  const PowerParams& pp = spec.params();
  const double m = pp.m();
  BranchData& b = I.branch;
  b.params = pp;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (spec.kind()) {
    case ConeKind::Orthant:
      I.curve = Curve::Orthant;
      I.map = ParamMap::Identity;
      b.c = -2 * m;
      b.roots = cubic_roots(pp, b.c);
      b.alpha = 0;
      b.beta = kInf;
      b.t_star = nan;
      b.schedule = "xi = 0 (equilibrium)";
      I.lower = 0;
      I.upper = kInf;
      I.p_lower = 0;
      I.p_upper = kInf;
      break;
    case ConeKind::ExpCone:
      I.curve = Curve::Exp;
      I.map = ParamMap::Exp;
      b.c = 0;
      b.roots = {nan, nan, nan, nan};
      b.alpha = 0;
      b.beta = kInf;
      b.t_star = nan;
      b.schedule = "kappa in (0, inf)";
      I.lower = 0;
      I.upper = kInf;
      I.p_lower = 0;
      I.p_upper = kInf;
      break;
    case ConeKind::Family4:
      b.beta = 1;
      b.t_star = 1;
      I.map = ParamMap::Sinh;
      I.p_lower = -kInf;
      I.p_upper = kInf;
      I.upper = 1;
      if (spec.family_alpha() == 1.0) {
        I.curve = Curve::Even;
        b.c = 0;
        b.roots = cubic_roots(pp, 0);
        b.alpha = 1;
        b.schedule = "sigma = +1, xi in (1, inf) on both sides of t = 0";
      } else {
        I.curve = Curve::Elliptic;
        b.c = c_of_alpha(pp, spec.family_alpha());
        I.elliptic.emplace(pp, b.c, opts.elliptic);
        b.roots = I.elliptic->roots();
        b.alpha = I.elliptic->alpha();
        b.schedule = "t > 0: sigma = -1 down to xi1, then +1; t < 0: sigma = +1 with c -> -c";
      }
      I.lower = -b.alpha;
      break;
    case ConeKind::Family5:
      I.curve = Curve::Beta1;
      I.map = ParamMap::Exp;
      b.c = -2 * m;
      b.roots = cubic_roots(pp, b.c);
      b.alpha = 0;
      b.beta = 1;
      b.t_star = 1;
      b.schedule = "sigma = +1, xi in (0, inf)";
      I.lower = 0;
      I.upper = 1;
      I.p_lower = 0;
      I.p_upper = kInf;
      break;
    case ConeKind::Family3:
      I.curve = Curve::BetaInfReflected;
      I.map = ParamMap::Exp;
      b.c = 2 * m;  // the reflected solution phi(-t) carries -c
      b.roots = cubic_roots(pp, b.c);
      b.alpha = kInf;
      b.beta = 1;
      b.t_star = 1;
      b.reflected = true;
      b.schedule = "reflected c = -2m curve, xi in (0, inf), xi = 1 at t = 0";
      I.lower = -kInf;
      I.upper = 1;
      I.p_lower = 0;
      I.p_upper = kInf;
      break;
  }
  if (I.curve == Curve::Even || I.curve == Curve::Elliptic) I.build_table(opts.table_nodes, -20, 20);
  if (I.curve == Curve::Beta1 || I.curve == Curve::BetaInfReflected) I.build_table(opts.table_nodes, -40, 40);
  impl_ = std::move(impl);
}

const ConeSpec& PhiSolution::spec() const { return impl_->spec; }
const BranchData& PhiSolution::branch() const { return impl_->branch; }
double PhiSolution::lower() const { return impl_->lower; }
double PhiSolution::upper() const { return impl_->upper; }
double PhiSolution::param_lower() const { return impl_->p_lower; }
double PhiSolution::param_upper() const { return impl_->p_upper; }
const EllipticBranch* PhiSolution::elliptic() const { return impl_->elliptic ? &*impl_->elliptic : nullptr; }

std::string PhiSolution::param_name() const {
  switch (impl_->curve) {
    case Curve::Orthant: return "t";
    case Curve::Exp: return "kappa";
    case Curve::Even:
    case Curve::Elliptic: return "zeta";
    default: return "xi";
  }
}

CurvePoint PhiSolution::point(double param) const {
  if (!(param > impl_->p_lower && param < impl_->p_upper))
    fail(ErrorKind::Domain, spec().name() + ": parameter " + num(param) + " outside its domain");
  return impl_->eval(param);
}

double PhiSolution::param_of_t(double t) const { return impl_->param_of_t(t); }

PhiJet PhiSolution::at(double t) const {
  const Impl& I = *impl_;
  if (I.curve == Curve::Orthant) {
    if (!(t > 0)) fail(ErrorKind::Domain, "orthant: t must be positive, got " + num(t));
    return {t, -std::log(t), -1 / t, 1 / (t * t)};
  }
  if (I.curve == Curve::Exp) return exp_phi_at(t);
  const CurvePoint c = I.eval(I.param_of_t(t));
  PhiJet j;
  j.t = t;
  j.phi = c.phi;
  j.phi_dot = c.phi_dot;
  j.phi_ddot = phi_ddot_from_ode(spec().params(), t, c.phi, c.phi_dot);
  return j;
}

PhiSolution phi_solution(const ConeSpec& spec, const SolverOptions& opts) { return PhiSolution(spec, opts); }

}  // namespace affsphere
