#include <doctest.h>

#include <cmath>

#include "affsphere/errors.hpp"
#include "affsphere/numerics/dopri5.hpp"
#include "affsphere/numerics/quadrature.hpp"
#include "affsphere/numerics/roots.hpp"

using namespace affsphere;
using namespace affsphere::numerics;

TEST_SUITE("numerics") {
  TEST_CASE("single Kronrod panel is exact for polynomials of degree 30") {
    const QuadResult r = gauss_kronrod21([](double x) { return std::pow(x, 30); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0 / 31).epsilon(1e-15));
  }

  TEST_CASE("adaptive integration handles an integrable endpoint singularity") {
    const QuadResult r = integrate([](double x) { return std::log(x); }, 0.0, 1.0);
    CHECK(std::abs(r.value + 1.0) < 1e-12);
    CHECK(r.error < 1e-11);
  }

  TEST_CASE("halving the tolerance moves the result by less than the error estimate") {
    auto f = [](double x) { return 1.0 / (1.0 + 25 * x * x); };
    QuadOptions loose;
    loose.rel_tol = 1e-8;
    loose.abs_tol = 1e-8;
    QuadOptions tight = loose;
    tight.rel_tol /= 2;
    tight.abs_tol /= 2;
    const QuadResult a = integrate(f, -1, 1, loose), b = integrate(f, -1, 1, tight);
    CHECK(std::abs(a.value - b.value) <= a.error + 1e-15);
    CHECK(std::abs(b.value - 2 * std::atan(5.0) / 5) < 1e-12);
  }

  TEST_CASE("exhausted interval budget raises QuadratureFailure") {
    QuadOptions o;
    o.max_intervals = 5;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-15;
    try {
      integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, o);
      FAIL("expected a QuadratureFailure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Quadrature);
    }
  }

  TEST_CASE("cumulative integral reproduces an antiderivative") {
    CumulativeIntegral I([](double x) { return std::cos(x); }, 0.0, 10.0, 1e-14);
    for (double x : {0.0, 0.1, 1.7, 3.14159, 6.5, 9.99, 10.0}) CHECK(std::abs(I(x) - std::sin(x)) < 1e-13);
    CHECK(std::abs(I.total() - std::sin(10.0)) < 1e-13);
  }

  TEST_CASE("safeguarded Newton and Illinois find bracketed roots") {
    const double r = newton_bracketed([](double x) { return std::pair{std::cos(x) - x, -std::sin(x) - 1}; }, 0.0, 1.0);
    CHECK(std::abs(r - 0.73908513321516067) < 1e-15);
    const double s = solve_bracketed([](double x) { return x * x * x - 2; }, 0.0, 2.0, 1e-15);
    CHECK(std::abs(s - std::cbrt(2.0)) < 1e-14);
  }

  TEST_CASE("Dormand-Prince integrates forward and backward with dense output") {
    Dopri5<1> exp_solver([](double, const State<1>& y, State<1>& dy) { dy[0] = y[0]; });
    const auto fwd = exp_solver.integrate(0.0, {1.0}, 1.0);
    CHECK(std::abs(fwd.y[0] - std::exp(1.0)) < 1e-10);
    const auto bwd = exp_solver.integrate(1.0, {std::exp(1.0)}, -2.0);
    CHECK(std::abs(bwd.y[0] - std::exp(-2.0)) < 1e-11);
    double worst = 0;
    exp_solver.integrate(0.0, {1.0}, 3.0, [&](const DenseStep<1>& seg, State<1>&) {
      const double mid = seg.t0 + 0.37 * seg.h;
      worst = std::max(worst, std::abs(seg(mid)[0] - std::exp(mid)) / std::exp(mid));
      return StepAction::Continue;
    });
    CHECK(worst < 1e-9);
  }

  TEST_CASE("observer can stop the integration") {
    Dopri5<1> s([](double, const State<1>&, State<1>& dy) { dy[0] = 1; });
    const auto r = s.integrate(0.0, {0.0}, 100.0, [](const DenseStep<1>& seg, State<1>&) {
      return seg.t1() > 5 ? StepAction::Stop : StepAction::Continue;
    });
    CHECK(r.stopped);
    CHECK(r.t < 100);
  }
}
