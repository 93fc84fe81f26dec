#pragma once

#include <memory>
#include <string>
#include <vector>

#include "affsphere/cone_model.hpp"
#include "affsphere/numerics/quadrature.hpp"

namespace affsphere {

/// Roots of c^2 + 4m P(xi), ordered xi1 >= xi2 >= xi3.
struct CubicRoots {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double xi3 = 0.0;
  double one_minus_xi1 = 1.0;  // 1 - xi1 without cancellation
};

CubicRoots cubic_roots(const PowerParams& pp, double c);

/// Plain (t, phi) sample of a parametric solution curve.
struct CurveSample {
  double t = 0.0;
  double phi = 0.0;
};

/// Full curve point: t, phi and derivatives, xi = 1 + t phi', and dt/dparam.
struct CurvePoint {
  double param = 0.0;
  double t = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;
  double phi_ddot = 0.0;
  double xi = 0.0;
  double dt_dparam = 0.0;
};

/// Even solution (c = 0) on t in (-1, 1), parameter zeta in R.
CurveSample c0_curve(const PowerParams& pp, double zeta);
CurvePoint c0_point(const PowerParams& pp, double zeta);

/// c = -2m, beta = 1: t in (0, 1) for xi in (0, inf).
CurveSample extreme_curve_beta1(const PowerParams& pp, double xi);
CurvePoint extreme_point_beta1(const PowerParams& pp, double xi);

/// c = -2m, beta = inf: t in (-1, inf), decreasing in xi; xi = 1 is t = 0.
CurveSample extreme_curve_betainf(const PowerParams& pp, double xi);
CurvePoint extreme_point_betainf(const PowerParams& pp, double xi);

struct AlphaResult {
  double alpha = 0.0;
  double error = 0.0;  // absolute, on alpha
  double log_alpha = 0.0;
  double log_error = 0.0;
};

/// alpha(c) for -2m < c < 0 from the pole-cancelled integral.
AlphaResult alpha_of_c(const PowerParams& pp, double c, double rel_tol = 1e-13);

struct CofAlphaResult {
  double c = 0.0;
  double alpha_error = 0.0;  // |alpha_of_c(c) - alpha|
  int crossings = 0;         // sign changes seen in the coarse scan
  std::vector<std::pair<double, double>> scan;  // (c, alpha) samples
};

/// Inverse of alpha_of_c by coarse scan plus bracketed solve. alpha = 1 gives
/// c = 0 and alpha = 0 gives c = -2m.
CofAlphaResult c_of_alpha_detail(const PowerParams& pp, double alpha);
double c_of_alpha(const PowerParams& pp, double alpha);

struct EllipticOptions {
  double cell_tol = 1e-13;  // absolute tolerance for each cumulative table
};

/// Solution for -2m < c < 0 on t in (-alpha, 1), parameter zeta in R with
/// t = 0 at zeta = -s0, s0 = sqrt(1 - xi1). t is stored as (zeta + s0) E(zeta).
namespace detail {
struct Kernel;
}

class EllipticBranch {
 public:
  EllipticBranch(const PowerParams& pp, double c, const EllipticOptions& opts = {});

  const PowerParams& params() const { return pp_; }
  double c() const { return c_; }
  const CubicRoots& roots() const { return roots_; }
  double s0() const { return s0_; }
  double alpha() const { return std::exp(log_alpha_); }
  double log_alpha() const { return log_alpha_; }
  /// Summed quadrature error estimate of log|t|.
  double log_t_error() const { return error_; }

  /// Integrand G(zeta) in pole-free form.
  double G(double zeta) const;
  /// g = G (zeta + s0), analytic with g(-s0) = 1.
  double g(double zeta) const;

  CurveSample operator()(double zeta) const;
  CurvePoint point(double zeta) const;

 private:
  double log_E(double zeta) const;

  PowerParams pp_;
  double c_;
  CubicRoots roots_;
  double s0_;
  double log_alpha_ = 0.0;
  double error_ = 0.0;
  numerics::CumulativeIntegral right_tail_;  // I(v), v = 1/(zeta + s0)
  numerics::CumulativeIntegral left_tail_;   // K(v), v = -1/(zeta + s0)
  numerics::CumulativeIntegral right_core_;  // int_{-s0}^{zeta} H
  numerics::CumulativeIntegral left_core_;   // int_{-s0-1}^{zeta} H
  std::shared_ptr<const detail::Kernel> kernel_;
};

CurveSample elliptic_curve(const EllipticBranch& branch, double zeta);

/// Branch bookkeeping for one family.
struct BranchData {
  PowerParams params;
  double c = 0.0;
  CubicRoots roots;
  double alpha = 0.0;   // chart alpha (t-domain lower end is -alpha)
  double beta = 0.0;    // chart beta
  double t_star = 0.0;  // normalization point (beta when finite)
  bool reflected = false;  // solved for z -> -z and reflected back
  std::string schedule;    // human-readable sigma schedule
};

}  // namespace affsphere
