#include "affsphere/power_ode.hpp"

#include <cmath>
#include <sstream>

#include "affsphere/errors.hpp"

namespace affsphere {

double ansatz_t(const PowerParams& pp, const Vec3& v) {
  return v.z() * std::exp(-std::log(v.x()) / pp.p() - std::log(v.y()) / pp.q());
}

PotentialJet potential_jet(const PowerParams& pp, const PhiJet& j, const Vec3& v) {
  const double x = v.x(), y = v.y(), z = v.z();
  if (!(x > 0.0 && y > 0.0) || !v.allFinite()) fail(ErrorKind::OutsideCone, "potential_jet: need x > 0 and y > 0");
  const double p = pp.p(), q = pp.q();
  const double w = std::exp(-std::log(x) / p - std::log(y) / q);
  const double t = w * z;
  if (std::abs(t - j.t) > 1e-12 * std::max(1.0, std::abs(t))) {
    std::ostringstream os;
    os.precision(17);
    os << "potential_jet: jet.t = " << j.t << " but the point has t = " << t;
    fail(ErrorKind::InconsistentJet, os.str());
  }
  const double pd = j.phi_dot, pdd = j.phi_ddot;
  const double tpd = t * pd;
  const double t2pdd = t * t * pdd;
  PotentialJet r;
  r.F = -((p + 1) / p) * std::log(x) - ((q + 1) / q) * std::log(y) + j.phi;
  r.grad = Vec3(-(p + 1 + tpd) / (p * x), -(q + 1 + tpd) / (q * y), pd * w);
  const double mix = pd + t * pdd;
  Mat3& H = r.hess;
  H(0, 0) = ((p + 1) * (p + tpd) + t2pdd) / (p * p * x * x);
  H(0, 1) = H(1, 0) = (tpd + t2pdd) / (p * q * x * y);
  H(0, 2) = H(2, 0) = -mix * w / (p * x);
  H(1, 1) = ((q + 1) * (q + tpd) + t2pdd) / (q * q * y * y);
  H(1, 2) = H(2, 1) = -mix * w / (q * y);
  H(2, 2) = pdd * w * w;
  return r;
}

double power_det_formula(const PowerParams& pp, const PhiJet& j, const Vec3& v) {
  const double x = v.x(), y = v.y();
  const double w = std::exp(-std::log(x) / pp.p() - std::log(y) / pp.q());
  const double tpd = j.t * j.phi_dot;
  const double bracket = j.phi_ddot * (2 * pp.m() + 1 + 3 * tpd) - j.phi_dot * j.phi_dot * (pp.k() + tpd);
  return w * w / (pp.p() * pp.q() * x * x * y * y) * bracket;
}

double ma_residual(const PotentialJet& jet) {
  const double e2 = std::exp(2.0 * jet.F);
  return (jet.hess.determinant() - e2) / e2;
}

bool convexity_check(const PowerParams& pp, double t, double pd, double pdd) {
  const double tpd = t * pd;
  const double den = 2 * pp.m() + 1 + 3 * tpd;
  if (!(den > 0.0)) return false;
  return pdd > pd * pd * (pp.k() + tpd) / den;
}

double first_integral_residual(const PowerParams& pp, double c, double t, double phi, double pd) {
  const double tpd = t * pd;
  return std::exp(-phi) * pd * (tpd + pp.p() + 1) * (tpd + pp.q() + 1) - pp.m() * t * std::exp(phi) - c;
}

double phi_ddot_from_ode(const PowerParams& pp, double t, double phi, double pd) {
  const double tpd = t * pd;
  return (pp.m() * std::exp(2 * phi) + pd * pd * (pp.k() + tpd)) / (2 * pp.m() + 1 + 3 * tpd);
}

double cubic_P(const PowerParams& pp, double xi) { return (xi - 1) * (xi + pp.p()) * (xi + pp.q()); }

double xi_rhs(const PowerParams& pp, double c, int sigma, double xi) {
  const double R = c * c + 4 * pp.m() * cubic_P(pp, xi);
  const double den = 2 * pp.m() * (3 * xi + 2 * pp.k());
  if (R < 0.0) {
    std::ostringstream os;
    os << "xi_rhs: negative radicand " << R << " at xi = " << xi;
    fail(ErrorKind::Domain, os.str());
  }
  if (den == 0.0) fail(ErrorKind::Domain, "xi_rhs: 3 xi + 2(p+q-1) vanishes");
  const double s = (sigma >= 0 ? 1.0 : -1.0) * std::sqrt(R);
  return s * (s - c) / den;
}

Vec3 diagonal_automorphism(const PowerParams& pp, const Vec3& v, double s) {
  const double nu = (pp.p() - 2.0) / (2.0 * pp.p() - 1.0);
  return Vec3(std::exp(s) * v.x(), std::exp((nu - 1.0) * s) * v.y(), std::exp(-nu * s) * v.z());
}

}  // namespace affsphere
