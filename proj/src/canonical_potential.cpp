#include "affsphere/canonical_potential.hpp"

#include <cmath>

#include "affsphere/errors.hpp"
#include "affsphere/exp_sphere.hpp"
#include "affsphere/power_ode.hpp"

namespace affsphere {

CanonicalPotential::CanonicalPotential(const ConeSpec& spec, const SolverOptions& opts) : phi_(spec, opts) {}

CanonicalPotential::CanonicalPotential(PhiSolution phi) : phi_(std::move(phi)) {}

double CanonicalPotential::t_of(const Vec3& v) const {
  if (spec().kind() == ConeKind::ExpCone) return exp_t_of(v);
  return ansatz_t(spec().params(), v);
}

PotentialJet CanonicalPotential::jet(const Vec3& v) const {
  PhiJet pj;
  return jet(v, pj);
}

PotentialJet CanonicalPotential::jet(const Vec3& v, PhiJet& pj) const {
  if (membership(spec(), v) != Region::Interior) fail(ErrorKind::OutsideCone, spec().name() + ": point is not interior");
  pj = phi_.at(t_of(v));
  if (spec().kind() == ConeKind::ExpCone) return exp_potential(v, pj);
  return potential_jet(spec().params(), pj, v);
}

double CanonicalPotential::value(const Vec3& v) const {
  if (membership(spec(), v) != Region::Interior) fail(ErrorKind::OutsideCone, spec().name() + ": point is not interior");
  const double phi = phi_.value(t_of(v));
  if (spec().kind() == ConeKind::ExpCone) return -std::log(v.y()) - 2 * std::log(v.z()) + phi;
  const PowerParams& pp = spec().params();
  return -((pp.p() + 1) / pp.p()) * std::log(v.x()) - ((pp.q() + 1) / pp.q()) * std::log(v.y()) + phi;
}

Vec3 CanonicalPotential::automorphism(const Vec3& v, double s) const {
  if (spec().kind() == ConeKind::ExpCone) return exp_automorphism(v, s);
  return diagonal_automorphism(spec().params(), v, s);
}

Vec3 CanonicalPotential::immersion(double param, double mu) const {
  if (spec().kind() == ConeKind::ExpCone) return exp_immersion(param, mu);
  const PowerParams& pp = spec().params();
  const double p = pp.p(), q = pp.q();
  if (spec().kind() == ConeKind::Family4 && spec().family_alpha() == 1.0) {
    // Closed-form immersion of the even (c = 0) solution.
    const double z2 = param * param;
    const double lp = std::log(z2 + p + 1), lq = std::log(z2 + q + 1);
    const double pre = std::exp(-std::log(pp.m()) / 6);
    const double xy = std::exp((p + 1) / (6 * p) * lp + (q + 1) / (6 * q) * lq);
    return pre * Vec3(xy * std::exp((q + 1) / (3 * q) * mu), xy * std::exp(-(p + 1) / (3 * p) * mu),
                      std::exp((p - 2) / (6 * p) * lp + (q - 2) / (6 * q) * lq) * param *
                          std::exp(-(p - q) / (3 * (p + q)) * mu));
  }
  const CurvePoint c = phi_.point(param);
  const double e = std::exp(c.phi / 3);
  return e * Vec3(std::exp((q + 1) / (3 * q) * mu), std::exp(-(p + 1) / (3 * p) * mu),
                  std::exp(-mu * (p - q) / (3 * (p + q))) * c.t);
}

}  // namespace affsphere
