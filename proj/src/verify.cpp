#include "affsphere/verify.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>

#include "affsphere/errors.hpp"
#include "affsphere/exp_sphere.hpp"
#include "affsphere/numerics/dopri5.hpp"
#include "affsphere/sphere_builder.hpp"
#include "json.hpp"

namespace affsphere {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Axis {
  double lo, hi;
  bool log;
  double at(double u) const { return log ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))) : lo + u * (hi - lo); }
};

Axis param_axis(const ConeSpec& s) {
  switch (s.kind()) {
    case ConeKind::Orthant: return {0.1, 10.0, true};
    case ConeKind::ExpCone: return {0.05, 20.0, true};
    case ConeKind::Family4: return {-5.0, 5.0, false};
    case ConeKind::Family5:
    case ConeKind::Family3: return {0.01, 50.0, true};
  }
  return {0, 1, false};
}

Axis mu_axis(const ConeSpec& s) {
  if (s.kind() == ConeKind::ExpCone) return {0.5, 2.0, true};
  return {-2.0, 2.0, false};
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Rough Euclidean distance to the cone boundary, used only to size steps.
double boundary_distance(const ConeSpec& spec, const Vec3& v) {
  if (spec.kind() == ConeKind::ExpCone) {
    const double ex = std::exp(v.x() / v.z());
    const double f = v.y() - v.z() * ex;
    const double gn = std::sqrt(ex * ex + 1 + ex * ex * (1 - v.x() / v.z()) * (1 - v.x() / v.z()));
    return std::min(v.z(), f / gn);
  }
  const PowerParams& pp = spec.params();
  double d = std::min(v.x(), v.y());
  const double g = std::pow(v.x(), 1 / pp.p()) * std::pow(v.y(), 1 / pp.q());
  const double gx = g / (pp.p() * v.x()), gy = g / (pp.q() * v.y());
  for (double b : {spec.chart_beta(), spec.chart_alpha()}) {
    if (!std::isfinite(b)) continue;
    const double f = b == spec.chart_beta() ? b * g - v.z() : v.z() + b * g;
    d = std::min(d, f / std::sqrt(1 + b * b * (gx * gx + gy * gy)));
  }
  return d;
}

template <class G>
Mat3 hessian4(const G& f, double h) {
  Mat3 H;
  const double f0 = f(Vec3::Zero());
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i) * h;
    H(i, i) = (-f(2 * e) + 16 * f(e) - 30 * f0 + 16 * f(-e) - f(-2 * e)) / (12 * h * h);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Vec3 ei = Vec3::Unit(i) * h, ej = Vec3::Unit(j) * h;
      auto F = [&](int a, int b) { return f(a * ei + b * ej); };
      const double s = 8 * (F(1, -2) + F(2, -1) + F(-2, 1) + F(-1, 2)) - 8 * (F(-1, -2) + F(-2, -1) + F(1, 2) + F(2, 1)) -
                       (F(2, -2) + F(-2, 2) - F(-2, -2) - F(2, 2)) + 64 * (F(-1, -1) + F(1, 1) - F(1, -1) - F(-1, 1));
      H(i, j) = H(j, i) = s / (144 * h * h);
    }
  return H;
}

template <class G>
Mat3 hessian2(const G& f, double h) {
  Mat3 H;
  const double f0 = f(Vec3::Zero());
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i) * h;
    H(i, i) = (f(e) - 2 * f0 + f(-e)) / (h * h);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Vec3 ei = Vec3::Unit(i) * h, ej = Vec3::Unit(j) * h;
      H(i, j) = H(j, i) = (f(ei + ej) - f(ei - ej) - f(ej - ei) + f(-ei - ej)) / (4 * h * h);
    }
  return H;
}

/// Whitening transform U with U^T H U = I. Eigenvalues at or below `floor`
/// (indefinite or noise-dominated directions) are replaced by `floor`.
bool whitening(const Mat3& H, double floor, Mat3& U, Mat3& U_inv) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(H);
  if (es.info() != Eigen::Success || !es.eigenvalues().allFinite()) return false;
  Vec3 s = es.eigenvalues();
  for (int i = 0; i < 3; ++i) s[i] = std::sqrt(s[i] > floor ? s[i] : floor);
  U = es.eigenvectors() * s.cwiseInverse().asDiagonal();
  U_inv = s.asDiagonal() * es.eigenvectors().transpose();
  return true;
}

double relative_first_integral(const PhiSolution& phi, const PhiJet& j) {
  if (phi.spec().kind() == ConeKind::ExpCone) return std::abs(exp_first_integral_residual(j));
  const PowerParams& pp = phi.spec().params();
  const double c = phi.branch().c;
  const double r = first_integral_residual(pp, c, j.t, j.phi, j.phi_dot);
  const double tp = j.t * j.phi_dot;
  const double scale = std::abs(c) + pp.m() * std::abs(j.t) * std::exp(j.phi) +
                       std::exp(-j.phi) * std::abs(j.phi_dot * (tp + pp.p() + 1) * (tp + pp.q() + 1));
  return std::abs(r) / scale;
}

bool jet_convex(const ConeSpec& spec, const PhiJet& j) {
  if (spec.kind() == ConeKind::ExpCone) return exp_convexity_check(j.phi_dot, j.phi_ddot);
  return convexity_check(spec.params(), j.t, j.phi_dot, j.phi_ddot);
}

double defect(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

OracleReport exp_oracle(const OracleOptions& opts) {
  OracleReport rep;
  const ExpCurvePoint p0 = exp_curve(1.0);
  // (phi, psi = t phi') as functions of tau = log t
  auto rhs = [](double tau, const numerics::State<2>& y, numerics::State<2>& dy) {
    const double t = std::exp(tau), psi = y[1];
    const double pd = psi / t;
    const double pdd = (std::exp(2 * y[0]) + pd * pd - pd * pd * pd) / (2 - 3 * pd);
    dy[0] = psi;
    dy[1] = psi + t * t * pdd;
  };
  numerics::OdeOptions oo;
  oo.rtol = opts.xi.rtol;
  oo.atol = opts.xi.atol;
  numerics::Dopri5<2> solver(rhs, oo);
  const double tau0 = std::log(p0.t);
  for (double dir : {1.0, -1.0}) {
    ++rep.trajectories;
    auto obs = [&](const numerics::DenseStep<2>& seg, numerics::State<2>& y) {
      const PhiJet j = exp_phi_at(std::exp(seg.t1()));
      rep.defect = std::max({rep.defect, defect(y[0], j.phi), defect(y[1], j.t * j.phi_dot)});
      ++rep.compared;
      return numerics::StepAction::Continue;
    };
    solver.integrate(tau0, {p0.phi, p0.t * p0.phi_dot}, tau0 + dir * 0.5 * opts.span, obs);
  }
  return rep;
}

/// Curve parameter with the given xi on one side of t = 0, if the family's
/// parametrization allows recovering it from xi and sigma.
bool param_from_xi(const PhiSolution& phi, int side, int sigma, double xi, double& param) {
  const ConeSpec& s = phi.spec();
  switch (s.kind()) {
    case ConeKind::Orthant:
    case ConeKind::ExpCone: return false;
    case ConeKind::Family5:
    case ConeKind::Family3:
      param = xi;
      return xi > 0;
    case ConeKind::Family4: {
      const double x1 = phi.branch().roots.xi1;
      if (!(xi >= x1)) return false;
      const double r = std::sqrt(xi - x1);
      if (phi.elliptic() == nullptr) param = side * r;
      else param = side > 0 ? sigma * r : -r;
      return true;
    }
  }
  return false;
}

OracleReport power_oracle(const PhiSolution& phi, const OracleOptions& opts) {
  OracleReport rep;
  const PowerParams& pp = phi.spec().params();
  const double m = pp.m();
  for (int side : {1, -1}) {
    const double end = side > 0 ? phi.upper() : -phi.lower();
    if (!(end > 0)) continue;
    const double cs = side > 0 ? phi.branch().c : -phi.branch().c;
    const double starts[2] = {std::isfinite(end) ? 0.3 * end : 0.5, std::isfinite(end) ? 0.8 * end : 3.0};
    for (double ta : starts) {
      const PhiJet j0 = phi.at(side * ta);
      const double tau0 = std::log(ta);
      const double d0 = j0.t * j0.phi_dot;
      const double e0 = 2 * m * ta * std::exp(j0.phi);
      const int sigma0 = e0 + cs >= 0 ? 1 : -1;
      for (double dir : {1.0, -1.0}) {
        const XiTrajectory tr = integrate_xi_d(pp, cs, sigma0, d0, tau0, tau0 + dir * opts.span, opts.xi);
        ++rep.trajectories;
        for (const XiState& st : tr.states) {
          if (std::abs(st.xi) > 1e6) continue;
          const double t = side * std::exp(st.tau);
          if (!phi.contains(t)) continue;
          const PhiJet j = phi.at(t);
          double err = defect(st.xi, 1 + j.t * j.phi_dot);
          double param;
          if (param_from_xi(phi, side, st.sigma, st.xi, param)) {
            const CurvePoint cp = phi.point(param);
            if (cp.t * side > 0) err = std::min(err, std::abs(st.tau - std::log(std::abs(cp.t))));
          }
          rep.defect = std::max(rep.defect, err);
          ++rep.compared;
        }
        if (dir > 0) {
          const bool blew = tr.termination == XiTermination::BlowUp;
          if (blew != std::isfinite(end)) rep.tau_star_defect = std::numeric_limits<double>::infinity();
          else if (blew) rep.tau_star_defect = std::max(rep.tau_star_defect, std::abs(tr.tau_star - std::log(end)));
        }
      }
    }
  }
  return rep;
}

}  // namespace

Mat3 fd_hessian(const CanonicalPotential& F, const Vec3& v) {
  const double scale = std::min(v.cwiseAbs().maxCoeff(), boundary_distance(F.spec(), v));
  if (!(scale > 0)) fail(ErrorKind::OutsideCone, "fd_hessian: point is not interior");
  // Coarse second-order estimate, used only to whiten the coordinates. Near the
  // boundary it can be indefinite along flat directions; those start at the
  // boundary-distance scale and are refined below.
  const double floor = 1 / (scale * scale);
  Mat3 H0 = hessian2([&](const Vec3& w) { return F.value(v + w); }, 1e-4 * scale);
  Mat3 U, U_inv;
  if (!whitening(H0, floor, U, U_inv)) {
    U = Mat3::Identity() * scale;
    U_inv = Mat3::Identity() / scale;
  }
  // Once whitened the Hessian is near the identity and the unit ball lies inside
  // the cone, so one step size fits every direction.
  const double h = std::pow(kEps, 1.0 / 6.0);
  Mat3 H = Mat3::Identity();
  for (int pass = 0; pass < 8; ++pass) {
    const Mat3 Hw = hessian4([&](const Vec3& w) { return F.value(v + U * w); }, h);
    H = U_inv.transpose() * Hw * U_inv;
    if ((Hw - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-3) break;
    Mat3 U2, U2_inv;
    if (!whitening(Hw, 1e-2, U2, U2_inv)) break;
    U = U * U2;
    U_inv = U2_inv * U_inv;
  }
  return H;
}

OracleReport ode_oracle(const PhiSolution& phi, const OracleOptions& opts) {
  if (phi.spec().kind() == ConeKind::ExpCone) return exp_oracle(opts);
  return power_oracle(phi, opts);
}

double alpha_by_shooting(const PowerParams& pp, double c) {
  if (!(c > -2 * pp.m() && c < 0)) fail(ErrorKind::Domain, "shooting needs -2(p+q) < c < 0");
  XiOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-300;
  // Start at xi = 2 (sigma = +1 there): the first integral is well conditioned,
  // unlike at the turning point xi1 where e is a square root of rounding noise.
  const XiTrajectory up = integrate_xi(pp, c, 1, 2.0, 0.0, 60.0, o);
  if (up.termination != XiTermination::BlowUp) fail(ErrorKind::Convergence, "shooting: no escape on the t > 0 side");
  const double tau_lo = -40.0;
  const XiTrajectory down = integrate_xi(pp, c, 1, 2.0, 0.0, tau_lo, o);
  const auto& seg = down.segments.back();
  const double d_end = seg(seg.t1())[0];
  // t = exp(tau - tau*) so that the escape point sits at t = 1.
  const double phi_dot0 = d_end * std::exp(up.tau_star - seg.t1());
  const XiTrajectory neg = integrate_xi_d(pp, -c, 1, -std::exp(tau_lo) * phi_dot0, tau_lo, 60.0, o);
  if (neg.termination != XiTermination::BlowUp) fail(ErrorKind::Convergence, "shooting: no escape on the t < 0 side");
  return std::exp(neg.tau_star);
}

VerifyReport verify(const ConeSpec& spec, int n_samples, std::uint64_t seed, const VerifyTolerances& tol,
                    const VerifyOptions& opts) {
  VerifyReport r;
  r.spec = spec;
  r.samples = n_samples;
  r.seed = seed;
  auto record = [&](const std::exception& e) {
    if (r.evaluation_errors++ == 0) r.first_error = e.what();
  };
  try {
    if (n_samples < 1) fail(ErrorKind::Domain, "verify needs at least one sample");
    const CanonicalPotential F(spec, opts.solver);
    std::mt19937_64 rng(seed);
    const double shift[4] = {unit_from_bits(rng()), unit_from_bits(rng()), unit_from_bits(rng()), unit_from_bits(rng())};
    const Axis pa = param_axis(spec), ma = mu_axis(spec);
    const Axis la{0.5, 2.0, true};
    double ma_sum = 0, fd_sum = 0;
    int fd_count = 0;
    for (int i = 0; i < n_samples; ++i) {
      try {
        const auto idx = static_cast<std::uint64_t>(i) + 1;
        const double u0 = std::fmod(radical_inverse(idx, 2) + shift[0], 1.0);
        const double u1 = std::fmod(radical_inverse(idx, 3) + shift[1], 1.0);
        const double u2 = std::fmod(radical_inverse(idx, 5) + shift[2], 1.0);
        const Vec3 v0 = F.immersion(pa.at(u0), ma.at(u1));
        const double lambda = la.at(u2);
        const Vec3 v = lambda * v0;

        PhiJet pj;
        const PotentialJet jet = F.jet(v, pj);
        ++r.jets;
        if (!jet_convex(spec, pj)) ++r.convexity_violations;
        const double ma_res = std::abs(ma_residual(jet));
        r.ma_residual.max = std::max(r.ma_residual.max, ma_res);
        ma_sum += ma_res;
        r.first_integral = std::max(r.first_integral, relative_first_integral(F.phi(), pj));

        for (double l2 : {0.5, 2.0})
          r.log_homogeneity = std::max(r.log_homogeneity, std::abs(F.value(l2 * v) - jet.F + 3 * std::log(l2)));
        for (double s : {-1.0, -0.5, 0.5, 1.0})
          r.automorphism = std::max(r.automorphism, std::abs(F.value(F.automorphism(v, s)) - jet.F));
        r.level_set = std::max(r.level_set, std::abs(F.value(v0)));

        if (opts.finite_differences) {
          const Mat3 H = fd_hessian(F, v);
          const double fd = std::abs(H.determinant() / std::exp(2 * F.value(v)) - 1);
          r.ma_residual_fd.max = std::max(r.ma_residual_fd.max, fd);
          fd_sum += fd;
          ++fd_count;
        }
      } catch (const std::exception& e) {
        record(e);
      }
    }
    r.ma_residual.mean = ma_sum / n_samples;
    r.ma_residual_fd.mean = fd_count > 0 ? fd_sum / fd_count : 0.0;

    try {
      const SurfaceMesh mesh = immerse(F, default_param_range(spec), default_mu_range(spec), opts.mesh_n, opts.mesh_n);
      r.level_set = std::max(r.level_set, level_set_defect(F, mesh));
    } catch (const std::exception& e) {
      record(e);
    }
    if (opts.oracle) {
      try {
        const OracleReport o = ode_oracle(F.phi());
        r.oracle = std::max(o.defect, o.tau_star_defect);
      } catch (const std::exception& e) {
        record(e);
      }
    }
  } catch (const std::exception& e) {
    record(e);
  }

  auto add = [&](const char* name, double value, double t) { r.criteria.push_back({name, value, t, value <= t}); };
  add("ma_residual", r.ma_residual.max, tol.ma_closed);
  if (opts.finite_differences) add("ma_residual_fd", r.ma_residual_fd.max, tol.ma_fd);
  add("log_homogeneity", r.log_homogeneity, tol.homogeneity);
  add("automorphism", r.automorphism, tol.automorphism);
  add("level_set", r.level_set, tol.level_set);
  if (opts.oracle) add("oracle", r.oracle, tol.oracle);
  add("first_integral", r.first_integral, tol.first_integral);
  add("convexity_violations", r.convexity_violations, 0.0);
  add("evaluation_errors", r.evaluation_errors, 0.0);
  r.pass = true;
  for (const Criterion& c : r.criteria) r.pass = r.pass && c.pass;
  return r;
}

std::string VerifyReport::to_json(int indent) const {
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
  };
  ordered_json sp;
  sp["family"] = spec.family();
  sp["name"] = spec.name();
  if (spec.kind() == ConeKind::ExpCone || spec.kind() == ConeKind::Orthant) sp["p"] = nullptr;
  else sp["p"] = spec.params().p();
  if (spec.kind() == ConeKind::Family4) sp["alpha"] = spec.family_alpha();
  else sp["alpha"] = nullptr;
  ordered_json j;
  j["spec"] = sp;
  j["samples"] = samples;
  j["seed"] = seed;
  j["ma_residual"] = {{"max", num(ma_residual.max)}, {"mean", num(ma_residual.mean)}};
  j["ma_residual_fd"] = {{"max", num(ma_residual_fd.max)}, {"mean", num(ma_residual_fd.mean)}};
  j["log_homogeneity"] = num(log_homogeneity);
  j["automorphism"] = num(automorphism);
  j["level_set"] = num(level_set);
  j["oracle"] = num(oracle);
  j["first_integral"] = num(first_integral);
  j["jets"] = jets;
  j["convexity_violations"] = convexity_violations;
  j["evaluation_errors"] = evaluation_errors;
  if (!first_error.empty()) j["first_error"] = first_error;
  ordered_json cs = ordered_json::array();
  for (const Criterion& c : criteria)
    cs.push_back({{"name", c.name}, {"value", num(c.value)}, {"tolerance", num(c.tolerance)}, {"pass", c.pass}});
  j["criteria"] = cs;
  j["pass"] = pass;
  return j.dump(indent);
}

}  // namespace affsphere
