#include "affsphere/exp_sphere.hpp"

#include <cmath>
#include <sstream>

#include "affsphere/cone_model.hpp"
#include "affsphere/errors.hpp"
#include "affsphere/numerics/roots.hpp"

namespace affsphere {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << v;
    fail(ErrorKind::Domain, os.str());
  }
}

}  // namespace

ExpCurvePoint exp_curve(double kappa) {
  require_positive(kappa, "exp_curve: kappa");
  const double l1p = std::log1p(kappa);
  ExpCurvePoint c;
  c.kappa = kappa;
  c.t = 0.5 * l1p + kappa;
  c.phi = 0.5 * (l1p - 3.0 * std::log(kappa));
  c.phi_dot = -1.0 / kappa;
  c.phi_ddot = 2.0 * (1.0 + kappa) / (kappa * kappa * (2.0 * kappa + 3.0));
  return c;
}

double exp_dt_dkappa(double kappa) { return 1.0 + 0.5 / (1.0 + kappa); }

double exp_kappa_of_t(double t) {
  require_positive(t, "exp_phi_at: t");
  double lo = 2.0 * t / 3.0, hi = t;
  auto fd = [t](double k) { return std::pair{0.5 * std::log1p(k) + k - t, exp_dt_dkappa(k)}; };
  // Closed bracket: t(2t/3) <= t <= t(t).
  if (fd(lo).first >= 0) return lo;
  if (fd(hi).first <= 0) return hi;
  return numerics::newton_bracketed(fd, lo, hi);
}

PhiJet exp_phi_at(double t) {
  const ExpCurvePoint c = exp_curve(exp_kappa_of_t(t));
  return {t, c.phi, c.phi_dot, c.phi_ddot};
}

double exp_ode_residual(const PhiJet& j) {
  const double e2 = std::exp(2.0 * j.phi);
  const double lhs = 2 * j.phi_ddot - j.phi_dot * j.phi_dot - 3 * j.phi_dot * j.phi_ddot +
                     j.phi_dot * j.phi_dot * j.phi_dot;
  return (lhs - e2) / e2;
}

double exp_first_integral_residual(const PhiJet& j) {
  const double P = j.phi_dot * j.phi_dot * (j.phi_dot - 1.0);
  return std::exp(-2.0 * j.phi) * P + 1.0;
}

bool exp_convexity_check(double pd, double pdd) {
  if (!(pd < 2.0 / 3.0)) return false;
  return pdd > pd * pd * (1.0 - pd) / (2.0 - 3.0 * pd);
}

double exp_t_of(const Vec3& v) { return std::log(v.y() / v.z()) - v.x() / v.z(); }

PotentialJet exp_potential(const Vec3& v) {
  if (membership(ConeSpec::exp_cone(), v) != Region::Interior) fail(ErrorKind::OutsideCone, "exp_potential: point not interior");
  return exp_potential(v, exp_phi_at(exp_t_of(v)));
}

PotentialJet exp_potential(const Vec3& v, const PhiJet& j) {
  const double x = v.x(), y = v.y(), z = v.z();
  const double pd = j.phi_dot, pdd = j.phi_ddot;
  PotentialJet r;
  r.F = -std::log(y) - 2.0 * std::log(z) + j.phi;
  const Vec3 dt(-1.0 / z, 1.0 / y, (x / z - 1.0) / z);
  r.grad = Vec3(0.0, -1.0 / y, -2.0 / z) + pd * dt;
  Mat3 ddt = Mat3::Zero();
  ddt(0, 2) = ddt(2, 0) = 1.0 / (z * z);
  ddt(1, 1) = -1.0 / (y * y);
  ddt(2, 2) = (1.0 - 2.0 * x / z) / (z * z);
  r.hess = pdd * dt * dt.transpose() + pd * ddt;
  r.hess(1, 1) += 1.0 / (y * y);
  r.hess(2, 2) += 2.0 / (z * z);
  return r;
}

double exp_det_formula(const Vec3& v, const PhiJet& j) {
  const double pd = j.phi_dot, pdd = j.phi_ddot;
  const double y = v.y(), z = v.z();
  return (2 * pdd - pd * pd - 3 * pd * pdd + pd * pd * pd) / (y * y * z * z * z * z);
}

Vec3 exp_immersion(double kappa, double z) {
  require_positive(kappa, "exp_immersion: kappa");
  require_positive(z, "exp_immersion: z");
  return Vec3(-z * (3.0 * std::log(z) + 1.5 * std::log(kappa) + kappa),
              std::sqrt(1.0 + kappa) / (z * z * kappa * std::sqrt(kappa)), z);
}

Vec3 exp_automorphism(const Vec3& v, double s) {
  return std::exp(-s / 3.0) * Vec3(v.x() + s * v.z(), v.y() * std::exp(s), v.z());
}

}  // namespace affsphere
