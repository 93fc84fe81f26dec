#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "affsphere/branch_solver.hpp"
#include "affsphere/errors.hpp"
#include "affsphere/power_ode.hpp"
#include "affsphere/verify.hpp"

using namespace affsphere;

namespace {

double cubic(const PowerParams& pp, double c, double xi) { return c * c + 4 * pp.m() * cubic_P(pp, xi); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an affsphere::Error");
  return ErrorKind::Domain;
}

// Regression baseline: alpha for p = 2, c = -4 (agrees with shooting, see below).
constexpr double kAlphaP2Cm4 = 0.37018777254315405;

}  // namespace

TEST_SUITE("branch_solver") {
  TEST_CASE("cubic roots at the ends of the c interval") {
    for (double p : {2.0, 2.5, 4.0, 12.0}) {
      const PowerParams pp(p);
      const CubicRoots r0 = cubic_roots(pp, 0);
      CHECK(r0.xi1 == doctest::Approx(1).epsilon(1e-14));
      CHECK(r0.xi2 == doctest::Approx(-pp.q()).epsilon(1e-14));
      CHECK(r0.xi3 == doctest::Approx(-p).epsilon(1e-14));
      const CubicRoots re = cubic_roots(pp, -2 * pp.m());
      CHECK(std::abs(re.xi1) < 1e-7);
      CHECK(std::abs(re.xi2) < 1e-7);
      CHECK(re.xi3 == doctest::Approx(-pp.k()).epsilon(1e-14));
      CHECK(re.one_minus_xi1 == doctest::Approx(1.0).epsilon(1e-7));
    }
  }

  TEST_CASE("cubic roots for p = 2, c = -4 against the trigonometric form") {
    // xi^3 + 3 xi^2 - 3 = 0: xi = 2 cos(theta) - 1 with cos(3 theta) = 1/2.
    const double pi = std::numbers::pi;
    const CubicRoots r = cubic_roots(PowerParams(2), -4);
    CHECK(r.xi1 == doctest::Approx(2 * std::cos(pi / 9) - 1).epsilon(1e-14));
    CHECK(r.xi2 == doctest::Approx(2 * std::cos(5 * pi / 9) - 1).epsilon(1e-14));
    CHECK(r.xi3 == doctest::Approx(2 * std::cos(7 * pi / 9) - 1).epsilon(1e-14));
    CHECK(r.xi1 + r.xi2 + r.xi3 == doctest::Approx(-3).epsilon(1e-14));
    CHECK(r.one_minus_xi1 == doctest::Approx(1 - r.xi1).epsilon(1e-14));
  }

  TEST_CASE("cubic roots: brackets, residuals and Vieta") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0, 1);
    for (int n = 0; n < 500; ++n) {
      const PowerParams pp(2 + 10 * U(rng));
      const double m = pp.m();
      const double c = -2 * m * U(rng) * (U(rng) < 0.5 ? 1 : -1);
      const CubicRoots r = cubic_roots(pp, c);
      CHECK(r.xi1 >= r.xi2);
      CHECK(r.xi2 >= r.xi3);
      CHECK(-pp.q() <= r.xi2 + 1e-12);
      CHECK(r.xi2 <= 1e-12);
      CHECK(r.xi1 >= -1e-12);
      CHECK(r.xi1 <= 1 + 1e-12);
      CHECK(r.xi3 <= -pp.p() + 1e-12);
      for (double x : {r.xi1, r.xi2, r.xi3}) CHECK(std::abs(cubic(pp, c, x)) <= 1e-12 * (1 + c * c) * m);
      CHECK(r.xi1 + r.xi2 + r.xi3 == doctest::Approx(-pp.k()).epsilon(1e-10));
      // monic cubic xi^3 + k xi^2 + (c^2/(4m) - m): product of roots is m - c^2/(4m)
      CHECK(r.xi1 * r.xi2 * r.xi3 == doctest::Approx((4 * m * m - c * c) / (4 * m)).epsilon(1e-10).scale(m));
      CHECK(r.xi1 * r.xi2 + r.xi1 * r.xi3 + r.xi2 * r.xi3 == doctest::Approx(0).scale(m * m).epsilon(1e-10));
    }
    CHECK(kind_of([] { cubic_roots(PowerParams(2), -8.0001); }) == ErrorKind::Domain);
    CHECK(kind_of([] { cubic_roots(PowerParams(2), 9); }) == ErrorKind::Domain);
  }

  TEST_CASE("even solution") {
    const PowerParams p2(2);
    const CurveSample a = c0_curve(p2, 0);
    CHECK(a.t == 0);
    CHECK(a.phi == doctest::Approx(1.5 * std::log(3.0) - std::log(2.0)).epsilon(1e-15));
    const CurveSample b = c0_curve(p2, 1);
    CHECK(b.t == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b.phi == doctest::Approx(2 * std::log(2.0)).epsilon(1e-15));
    for (double p : {2.0, 3.0, 6.0}) {
      const PowerParams pp(p);
      double prev = -1;
      for (double z = -1e3; z <= 1e3; z *= (z < 0 ? 0.97 : 1.03)) {
        if (z > -1e-3 && z < 0) z = 1e-3;
        const CurvePoint c = c0_point(pp, z);
        CHECK(c.t > prev);
        prev = c.t;
        CHECK(c0_curve(pp, -z).phi == c.phi);
        CHECK(std::abs(first_integral_residual(pp, 0, c.t, c.phi, c.phi_dot)) <= 1e-10 * std::exp(c.phi));
        CHECK(convexity_check(pp, c.t, c.phi_dot, c.phi_ddot));
      }
      CHECK(c0_curve(pp, 1e8).t == doctest::Approx(1).epsilon(1e-12));
      CHECK(c0_curve(pp, -1e8).t == doctest::Approx(-1).epsilon(1e-12));
    }
  }

  TEST_CASE("alpha(c) regression value and shooting oracle") {
    const PowerParams p2(2);
    const AlphaResult a = alpha_of_c(p2, -4);
    CHECK(a.alpha == doctest::Approx(kAlphaP2Cm4).epsilon(1e-12));
    CHECK(a.error <= 1e-10);
    CHECK(std::abs(alpha_by_shooting(p2, -4) - a.alpha) <= 1e-6);
    for (double p : {2.5, 4.0})
      for (double cr : {-0.1, -0.5, -0.9}) {
        const PowerParams pp(p);
        const double c = cr * 2 * pp.m();
        CHECK(std::abs(alpha_by_shooting(pp, c) - alpha_of_c(pp, c).alpha) <= 1e-6);
      }
  }

  TEST_CASE("alpha(c) range and limits") {
    for (double p : {2.0, 3.0, 8.0}) {
      const PowerParams pp(p);
      const double m = pp.m();
      double prev = 0;
      for (double f = 0.999; f >= 0.001; f -= 0.0499) {
        const AlphaResult a = alpha_of_c(pp, -2 * m * f);
        CHECK(a.alpha > 0);
        CHECK(a.alpha < 1);
        CHECK(a.error <= 1e-10);
        CHECK(a.alpha > prev);
        prev = a.alpha;
      }
      CHECK(alpha_of_c(pp, -1e-6).alpha > 1 - 1e-3);
      CHECK(alpha_of_c(pp, -2 * m * (1 - 1e-6)).alpha < 1e-2);
      CHECK(kind_of([&] { alpha_of_c(pp, 0); }) == ErrorKind::Domain);
      CHECK(kind_of([&] { alpha_of_c(pp, -2 * m); }) == ErrorKind::Domain);
    }
  }

  TEST_CASE("quadrature self-consistency under tolerance halving") {
    const PowerParams p2(2);
    const AlphaResult a = alpha_of_c(p2, -4, 1e-10);
    const AlphaResult b = alpha_of_c(p2, -4, 5e-11);
    CHECK(std::abs(a.log_alpha - b.log_alpha) <= std::max(a.log_error, 1e-15));
    EllipticOptions o1, o2;
    o1.cell_tol = 1e-10;
    o2.cell_tol = 5e-11;
    const EllipticBranch e1(p2, -4, o1), e2(p2, -4, o2);
    for (double z : {-30.0, -3.0, -1.2, -0.5, 0.0, 0.7, 4.0, 50.0}) {
      const double l1 = std::log(std::abs(e1(z).t)), l2 = std::log(std::abs(e2(z).t));
      CHECK(std::abs(l1 - l2) <= std::max(e1.log_t_error(), 1e-15));
    }
  }

  TEST_CASE("c_of_alpha") {
    const PowerParams p2(2);
    CHECK(c_of_alpha(p2, 1) == 0);
    CHECK(c_of_alpha(p2, 0) == -8);
    const CofAlphaResult r = c_of_alpha_detail(p2, kAlphaP2Cm4);
    CHECK(r.c == doctest::Approx(-4).epsilon(1e-7));
    CHECK(r.alpha_error <= 1e-8);
    CHECK(r.crossings == 1);
    CHECK(!r.scan.empty());
    for (double p : {2.5, 5.0})
      for (double al : {0.05, 0.3, 0.6, 0.95}) {
        const PowerParams pp(p);
        const double c = c_of_alpha(pp, al);
        CHECK(c < 0);
        CHECK(c > -2 * pp.m());
        CHECK(std::abs(alpha_of_c(pp, c).alpha - al) <= 1e-8);
      }
    CHECK(kind_of([&] { c_of_alpha(p2, 1.5); }) == ErrorKind::Domain);
  }

  TEST_CASE("elliptic curve") {
    for (double p : {2.0, 3.5})
      for (double cr : {-0.2, -0.5, -0.8}) {
        const PowerParams pp(p);
        const double c = cr * 2 * pp.m();
        const EllipticBranch br(pp, c);
        const double s0 = br.s0();
        CHECK(s0 == doctest::Approx(std::sqrt(br.roots().one_minus_xi1)).epsilon(1e-14));
        // t = 0 at -s0, with phi and phi' continuous across it
        const CurvePoint z = br.point(-s0);
        CHECK(std::abs(z.t) < 1e-15);
        CHECK(std::isfinite(z.phi));
        const CurvePoint l = br.point(-s0 - 1e-6), r = br.point(-s0 + 1e-6);
        CHECK(l.t < 0);
        CHECK(r.t > 0);
        CHECK(std::abs(l.phi - z.phi) < 1e-5);
        CHECK(std::abs(r.phi - z.phi) < 1e-5);
        CHECK(std::abs(l.phi_dot - z.phi_dot) < 1e-4 * std::max(1.0, std::abs(z.phi_dot)));
        CHECK(std::abs(r.phi_dot - z.phi_dot) < 1e-4 * std::max(1.0, std::abs(z.phi_dot)));
        // endpoints
        CHECK(br(1e7).t == doctest::Approx(1).epsilon(1e-9));
        CHECK(br(1e7).phi > 15);
        CHECK(br(-1e7).t == doctest::Approx(-br.alpha()).epsilon(1e-9));
        CHECK(br(-1e7).phi > 15);
        // first integral on 100 parameters; strictly increasing t
        double prev = -2;
        for (int i = 0; i < 100; ++i) {
          const double zeta = -s0 + std::sinh(-8 + 16.0 * i / 99);
          const CurvePoint c1 = br.point(zeta);
          CHECK(c1.t > prev);
          prev = c1.t;
          CHECK(std::abs(first_integral_residual(pp, c, c1.t, c1.phi, c1.phi_dot)) <= 1e-8 * std::max(1.0, std::exp(c1.phi)));
          CHECK(convexity_check(pp, c1.t, c1.phi_dot, c1.phi_ddot));
          CHECK(elliptic_curve(br, zeta).t == c1.t);
        }
      }
  }

  TEST_CASE("beta = 1 curve") {
    const PowerParams p2(2);
    const double s3 = std::sqrt(3.0);
    const CurveSample one = extreme_curve_beta1(p2, 1);
    CHECK(one.t == doctest::Approx(4 * std::pow(2 + s3, -s3)).epsilon(1e-14));
    CHECK(one.t == doctest::Approx(0.40871236770618119).epsilon(1e-14));
    CHECK(one.phi == doctest::Approx(std::log(1 + 1.0) - std::log(one.t)).epsilon(1e-14));
    for (double p : {2.0, 3.0, 7.0}) {
      const PowerParams pp(p);
      const double c = -2 * pp.m();
      double prev = 0;
      for (double lx = -8; lx <= 8; lx += 0.05) {
        const CurvePoint cp = extreme_point_beta1(pp, std::pow(10.0, lx));
        CHECK(cp.t > prev);
        CHECK(cp.t < 1);
        prev = cp.t;
        CHECK(std::abs(first_integral_residual(pp, c, cp.t, cp.phi, cp.phi_dot)) <= 1e-8 * std::max(1.0, std::exp(cp.phi)));
        CHECK(convexity_check(pp, cp.t, cp.phi_dot, cp.phi_ddot));
      }
      const CurveSample lo = extreme_curve_beta1(pp, 1e-10);
      CHECK(std::abs(lo.phi + std::log(lo.t)) < 1e-6);
      CHECK(extreme_curve_beta1(pp, 1e10).phi > 20);
      CHECK(kind_of([&] { extreme_curve_beta1(pp, 0); }) == ErrorKind::Domain);
      CHECK(kind_of([&] { extreme_curve_beta1(pp, -1); }) == ErrorKind::Domain);
    }
  }

  TEST_CASE("beta = infinity curve") {
    for (double p : {2.0, 3.0, 7.0}) {
      const PowerParams pp(p);
      const double c = -2 * pp.m();
      const CurvePoint at1 = extreme_point_betainf(pp, 1);
      CHECK(at1.t == 0);
      CHECK(std::isfinite(at1.phi));
      // smooth across xi = 1
      for (double h : {1e-4, 1e-6, 1e-8}) {
        const CurvePoint a = extreme_point_betainf(pp, 1 - h), b = extreme_point_betainf(pp, 1 + h);
        CHECK(a.t > 0);
        CHECK(b.t < 0);
        CHECK(std::abs(a.phi - at1.phi) < 10 * h);
        CHECK(std::abs(b.phi - at1.phi) < 10 * h);
        CHECK(std::abs(a.phi_dot - at1.phi_dot) < 100 * h);
        CHECK(std::abs(b.phi_dot - at1.phi_dot) < 100 * h);
      }
      double prev = std::numeric_limits<double>::infinity();
      for (double lx = -8; lx <= 8; lx += 0.05) {
        const CurvePoint cp = extreme_point_betainf(pp, std::pow(10.0, lx));
        CHECK(cp.t < prev);
        CHECK(cp.t > -1);
        prev = cp.t;
        CHECK(std::abs(first_integral_residual(pp, c, cp.t, cp.phi, cp.phi_dot)) <= 1e-8 * std::max(1.0, std::exp(cp.phi)));
      }
      CHECK(extreme_curve_betainf(pp, 1e10).t == doctest::Approx(-1).epsilon(1e-8));
      CHECK(extreme_curve_betainf(pp, 1e10).phi > 20);
      // xi -> 0: t -> inf with phi + log t settling to a constant
      const CurveSample s1 = extreme_curve_betainf(pp, 1e-8), s2 = extreme_curve_betainf(pp, 1e-12);
      CHECK(s2.t > 1e3 * s1.t);
      CHECK(std::abs((s1.phi + std::log(s1.t)) - (s2.phi + std::log(s2.t))) < 1e-6);
      CHECK(kind_of([&] { extreme_curve_betainf(pp, 0); }) == ErrorKind::Domain);
    }
  }
}
