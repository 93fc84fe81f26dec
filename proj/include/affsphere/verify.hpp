#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affsphere/canonical_potential.hpp"
#include "affsphere/power_ode.hpp"

namespace affsphere {

struct VerifyTolerances {
  double ma_closed = 1e-8;
  double ma_fd = 1e-6;
  double homogeneity = 1e-9;
  double automorphism = 1e-9;
  double level_set = 1e-8;
  double oracle = 1e-6;
  double first_integral = 1e-9;
};

struct VerifyOptions {
  int mesh_n = 32;  // level-set mesh is mesh_n x mesh_n over the default ranges
  bool finite_differences = true;
  bool oracle = true;
  SolverOptions solver;
};

struct Criterion {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SampleStat {
  double max = 0.0;
  double mean = 0.0;
};

struct VerifyReport {
  ConeSpec spec = ConeSpec::orthant();
  int samples = 0;
  std::uint64_t seed = 0;
  SampleStat ma_residual;     // closed-form Hessian
  SampleStat ma_residual_fd;  // fourth-order finite differences of F
  double log_homogeneity = 0.0;
  double automorphism = 0.0;
  double level_set = 0.0;
  double oracle = 0.0;
  double first_integral = 0.0;
  int jets = 0;
  int convexity_violations = 0;
  int evaluation_errors = 0;
  std::string first_error;
  std::vector<Criterion> criteria;
  bool pass = false;

  std::string to_json(int indent = 2) const;
};

/// Samples points lambda * immersion(param, mu) from a seeded, shifted Halton
/// sequence and measures every defect. Failures are reported, never thrown.
VerifyReport verify(const ConeSpec& spec, int n_samples, std::uint64_t seed, const VerifyTolerances& tol = {},
                    const VerifyOptions& opts = {});

/// Finite-difference Hessian of F (fourth order); step shrinks until every
/// stencil point is interior.
Mat3 fd_hessian(const CanonicalPotential& F, const Vec3& point);

struct OracleOptions {
  double span = 12.0;  // tau distance integrated away from each start
  XiOptions xi{1e-12, 1e-14};
};

struct OracleReport {
  double defect = 0.0;           // max over states of min(|dxi|/max(1,|xi|), |dtau|)
  double tau_star_defect = 0.0;  // escape time vs. log of the finite endpoint
  int trajectories = 0;
  int compared = 0;
};

/// Compares the constructed phi(t) with independent Runge-Kutta integration:
/// the reduced xi(tau) equation for power families, the second-order phi ODE
/// for the exponential cone.
OracleReport ode_oracle(const PhiSolution& phi, const OracleOptions& opts = {});

/// alpha(c) by shooting: integrate the t > 0 solution forward to blow-up and
/// back through the turning point towards t = 0, carry phi'(0) across to the
/// c -> -c equation and integrate to its escape time log(alpha).
double alpha_by_shooting(const PowerParams& pp, double c);

}  // namespace affsphere
