#pragma once

#include "affsphere/types.hpp"

namespace affsphere {

/// Point on the parametric solution curve of the exponential-cone ODE.
struct ExpCurvePoint {
  double kappa = 0.0;
  double t = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;
  double phi_ddot = 0.0;
};

/// t = (log(1+k) + 2k)/2, phi = (log(1+k) - 3 log k)/2, phi' = -1/k.
ExpCurvePoint exp_curve(double kappa);

/// dt/dkappa = 1 + 1/(2(1 + kappa)).
double exp_dt_dkappa(double kappa);

/// Inverse of t(kappa); t(kappa) is increasing and kappa lies in [2t/3, t].
double exp_kappa_of_t(double t);

PhiJet exp_phi_at(double t);

/// (2 phi'' - phi'^2 - 3 phi' phi'' + phi'^3 - e^{2 phi}) / e^{2 phi}.
double exp_ode_residual(const PhiJet& jet);

/// (e^{-phi} phi'^2 (phi' - 1) + e^{phi}) / e^{phi}; zero on the c = 0 solution.
double exp_first_integral_residual(const PhiJet& jet);

/// phi' < 2/3 and phi'' > phi'^2 (1 - phi') / (2 - 3 phi').
bool exp_convexity_check(double phi_dot, double phi_ddot);

/// t = log(y/z) - x/z. Does not check membership.
double exp_t_of(const Vec3& point);

/// F = -log y - 2 log z + phi(t) with closed-form gradient and Hessian.
PotentialJet exp_potential(const Vec3& point);
/// Same, reusing an already evaluated phi jet (jet.t must match the point).
PotentialJet exp_potential(const Vec3& point, const PhiJet& jet);

/// Closed-form det F'' = (2 phi'' - phi'^2 - 3 phi' phi'' + phi'^3) / (y^2 z^4).
double exp_det_formula(const Vec3& point, const PhiJet& jet);

/// Level set F = 0: (-z(3 log z + 1.5 log k + k), z^-2 k^-1.5 sqrt(1+k), z).
Vec3 exp_immersion(double kappa, double z);

/// Unimodular flow e^{-s/3} (x + s z, y e^s, z); leaves F unchanged.
Vec3 exp_automorphism(const Vec3& point, double s);

}  // namespace affsphere
