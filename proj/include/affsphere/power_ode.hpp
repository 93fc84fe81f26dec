#pragma once

#include <limits>
#include <vector>

#include "affsphere/cone_model.hpp"
#include "affsphere/numerics/dopri5.hpp"
#include "affsphere/types.hpp"

namespace affsphere {

/// t = x^{-1/p} y^{-1/q} z.
double ansatz_t(const PowerParams& pp, const Vec3& point);

/// F = -((p+1)/p) log x - ((q+1)/q) log y + phi(t) with closed-form F', F''.
/// Throws OutsideCone unless x, y > 0 and InconsistentJet if jet.t does not
/// match the point.
PotentialJet potential_jet(const PowerParams& pp, const PhiJet& jet, const Vec3& point);

/// det F'' from the reduced formula
/// w^2/(pq x^2 y^2) (phi''(2m+1+3t phi') - phi'^2 (k + t phi')), w = t/z.
double power_det_formula(const PowerParams& pp, const PhiJet& jet, const Vec3& point);

/// (det hess - e^{2F}) / e^{2F}.
double ma_residual(const PotentialJet& jet);

/// t phi' > -(2m+1)/3 and phi'' > phi'^2 (k + t phi') / (2m + 1 + 3 t phi').
bool convexity_check(const PowerParams& pp, double t, double phi_dot, double phi_ddot);

/// e^{-phi} phi' (t phi' + p + 1)(t phi' + q + 1) - m t e^{phi} - c.
double first_integral_residual(const PowerParams& pp, double c, double t, double phi, double phi_dot);

/// phi'' solved from the reduced ODE given (t, phi, phi').
double phi_ddot_from_ode(const PowerParams& pp, double t, double phi, double phi_dot);

/// P(xi) = (xi - 1)(xi + p)(xi + q).
double cubic_P(const PowerParams& pp, double xi);

/// d xi / d tau = (-c sigma sqrt(R) + R) / (2m (3 xi + 2k)), R = c^2 + 4 m P(xi).
double xi_rhs(const PowerParams& pp, double c, int sigma, double xi);

/// Diagonal unimodular flow (e^s x, e^{(nu-1)s} y, e^{-nu s} z), nu = (p-2)/(2p-1),
/// which leaves t and F unchanged.
Vec3 diagonal_automorphism(const PowerParams& pp, const Vec3& point, double s);

struct XiState {
  double tau = 0.0;
  double xi = 0.0;
  int sigma = 1;
  double c = 0.0;
  double t = 0.0;
  double phi = 0.0;
};

struct XiOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double blowup_xi = 1e8;
  bool blowup_is_error = false;
  bool project = true;
  int max_steps = 500000;
};

enum class XiTermination { Reached, BlowUp };

/// Result of integrate_xi. The integrated state is (d, e) = (xi - 1, 2m e^{phi + tau});
/// sigma is the sign of e + c and flips where e + c crosses zero.
struct XiTrajectory {
  PowerParams params;
  double c = 0.0;
  std::vector<XiState> states;      // accepted steps, including sigma switches
  std::vector<double> switch_taus;
  XiTermination termination = XiTermination::Reached;
  double tau_star = std::numeric_limits<double>::quiet_NaN();
  std::vector<numerics::DenseStep<2>> segments;

  double tau_begin() const { return states.front().tau; }
  double tau_end() const { return states.back().tau; }
  /// Dense evaluation inside the integrated span.
  XiState at(double tau) const;
};

XiState xi_state_from(const PowerParams& pp, double c, double tau, double d, double e);

/// Integrates the reduced xi(tau) equation from (tau0, xi0) with initial sign
/// sigma0 towards tau_end. Throws LeftAdmissibleRegion, or BlowUp when
/// requested; otherwise blow-up ends the trajectory with tau_star estimated.
XiTrajectory integrate_xi(const PowerParams& pp, double c, int sigma0, double xi0, double tau0, double tau_end,
                          const XiOptions& opts = {});
/// Same, with the start given as d0 = xi0 - 1 so that xi0 near 1 keeps its digits.
XiTrajectory integrate_xi_d(const PowerParams& pp, double c, int sigma0, double d0, double tau0, double tau_end,
                            const XiOptions& opts = {});

}  // namespace affsphere
