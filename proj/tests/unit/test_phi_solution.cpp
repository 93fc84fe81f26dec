#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "affsphere/errors.hpp"
#include "affsphere/phi_solution.hpp"
#include "affsphere/power_ode.hpp"

using namespace affsphere;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ConeSpec> power_specs() {
  return {ConeSpec::orthant(),         ConeSpec::family4(2, 1),   ConeSpec::family4(3, 1),
          ConeSpec::family4(2, 0.5),   ConeSpec::family4(2.5, 0.8), ConeSpec::family4(4, 0.2),
          ConeSpec::family5(2),        ConeSpec::family5(3.5),    ConeSpec::family3(2),
          ConeSpec::family3(4)};
}

// Parameter drawn uniformly in the log/asinh scale of the family's map.
double sample_param(const PhiSolution& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1, 1);
  const std::string n = s.param_name();
  if (n == "zeta") return std::sinh(12 * U(rng));
  return std::exp(25 * U(rng));
}

}  // namespace

TEST_SUITE("phi_solution") {
  TEST_CASE("t-domains and branch data") {
    const PhiSolution o(ConeSpec::orthant());
    CHECK(o.lower() == 0);
    CHECK(o.upper() == kInf);
    const PhiSolution e(ConeSpec::exp_cone());
    CHECK(e.lower() == 0);
    CHECK(e.upper() == kInf);
    CHECK(e.param_name() == "kappa");
    const PhiSolution f4(ConeSpec::family4(2, 0.5));
    CHECK(f4.lower() == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(f4.upper() == 1);
    CHECK(f4.elliptic() != nullptr);
    CHECK(f4.branch().c < 0);
    CHECK(f4.branch().c > -8);
    CHECK(f4.branch().beta == 1);
    const PhiSolution f41(ConeSpec::family4(2, 1));
    CHECK(f41.lower() == -1);
    CHECK(f41.branch().c == 0);
    CHECK(f41.elliptic() == nullptr);
    const PhiSolution f5(ConeSpec::family5(2));
    CHECK(f5.lower() == 0);
    CHECK(f5.upper() == 1);
    CHECK(f5.branch().alpha == 0);
    CHECK(f5.branch().c == -8);
    const PhiSolution f3(ConeSpec::family3(2));
    CHECK(f3.lower() == -kInf);
    CHECK(f3.upper() == 1);
    CHECK(f3.branch().reflected);
    for (const ConeSpec& s : power_specs()) {
      const BranchData& b = PhiSolution(s).branch();
      CHECK(b.roots.xi1 >= b.roots.xi2);
      CHECK(b.roots.xi2 >= b.roots.xi3);
      CHECK(!b.schedule.empty());
    }
  }

  TEST_CASE("closed-form examples") {
    const PhiSolution o(ConeSpec::orthant());
    for (double t : {1e-3, 0.5, 1.0, 40.0}) {
      const PhiJet j = o.at(t);
      CHECK(j.phi == doctest::Approx(-std::log(t)).epsilon(1e-15));
      CHECK(j.phi_dot == doctest::Approx(-1 / t).epsilon(1e-15));
      CHECK(j.phi_ddot == doctest::Approx(1 / (t * t)).epsilon(1e-15));
    }
    const PhiSolution q(ConeSpec::family4(2, 1));
    CHECK(q.value(0) == doctest::Approx(0.95477125244221928).epsilon(1e-14));
    CHECK(q.value(0.5) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-13));
    CHECK(q.value(-0.5) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-13));
    for (double t : {-0.9, -0.3, 0.1, 0.77}) {
      const double u = 1 - t * t;
      CHECK(q.value(t) == doctest::Approx(-1.5 * std::log(u) + 1.5 * std::log(3.0) - std::log(2.0)).epsilon(1e-13));
      CHECK(q.derivative(t) == doctest::Approx(3 * t / u).epsilon(1e-12));
      CHECK(q.second_derivative(t) == doctest::Approx(3 * (1 + t * t) / (u * u)).epsilon(1e-12));
    }
    const PhiSolution f5(ConeSpec::family5(2));
    CHECK(std::abs(f5.value(1e-9) + std::log(1e-9)) < 1e-6);
    CHECK(f5.value(1 - 1e-9) > 10);
  }

  TEST_CASE("round trip through the inversion table") {
    std::mt19937_64 rng(77);
    std::vector<ConeSpec> specs = power_specs();
    specs.push_back(ConeSpec::exp_cone());
    for (const ConeSpec& s : specs) {
      const PhiSolution sol(s);
      for (int n = 0; n < 1000; ++n) {
        const double prm = sample_param(sol, rng);
        const CurvePoint c = sol.point(prm);
        if (!sol.contains(c.t)) continue;  // t rounded onto an endpoint
        const PhiJet j = sol.at(c.t);
        // Near t = 1 many parameters share one double t; phi is then only
        // determined up to |phi'| times the evaluation error of t.
        const double cond = 64 * std::numeric_limits<double>::epsilon() * std::abs(c.t * c.phi_dot);
        CHECK(std::abs(j.phi - c.phi) <= 1e-11 * std::max(1.0, std::abs(c.phi)) + cond);
      }
    }
  }

  TEST_CASE("first integral and convexity at evaluated jets") {
    for (const ConeSpec& s : power_specs()) {
      const PhiSolution sol(s);
      const PowerParams& pp = s.params();
      const double lo = std::max(sol.lower(), -1e3), hi = std::min(sol.upper(), 1e3);
      for (int i = 1; i < 200; ++i) {
        const double t = lo + (hi - lo) * i / 200.0;
        if (t == 0 && s.kind() == ConeKind::Orthant) continue;
        const PhiJet j = sol.at(t);
        CHECK(convexity_check(pp, t, j.phi_dot, j.phi_ddot));
        const double r = first_integral_residual(pp, sol.branch().c, t, j.phi, j.phi_dot);
        CHECK(std::abs(r) <= 1e-9 * std::max({1.0, std::exp(j.phi), std::abs(sol.branch().c)}));
      }
    }
  }

  TEST_CASE("phi blows up at finite endpoints") {
    for (const ConeSpec& s : power_specs()) {
      const PhiSolution sol(s);
      for (double end : {sol.lower(), sol.upper()}) {
        if (!std::isfinite(end)) continue;
        if (end == 0 && s.kind() == ConeKind::Orthant) continue;
        const double inward = end == sol.upper() ? -1 : 1;
        for (double M : {5.0, 10.0, 15.0, 20.0}) {
          // shrink delta until phi(end + inward delta) >= M, then check closer points
          double delta = 0.5 * (sol.upper() - std::max(sol.lower(), -1.0));
          while (sol.value(end + inward * delta) < M) delta *= 0.5;
          for (double f : {1.0, 0.5, 0.1, 1e-2}) CHECK(sol.value(end + inward * f * delta) >= M);
        }
      }
    }
  }

  TEST_CASE("domain errors") {
    auto kind_of = [](const std::function<void()>& f) {
      try {
        f();
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::Convergence;
    };
    const PhiSolution f4(ConeSpec::family4(2, 0.5));
    CHECK(kind_of([&] { f4.at(1.0); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { f4.at(-0.6); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { f4.at(std::nan("")); }) == ErrorKind::Domain);
    const PhiSolution o(ConeSpec::orthant());
    CHECK(kind_of([&] { o.at(0); }) == ErrorKind::Domain);
    const PhiSolution f3(ConeSpec::family3(3));
    CHECK(kind_of([&] { f3.at(1.5); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { PhiSolution(ConeSpec::family5(2)).point(-1); }) == ErrorKind::Domain);
  }

  TEST_CASE("copies share state and agree") {
    const PhiSolution a(ConeSpec::family4(3, 0.4));
    const PhiSolution b = a;
    CHECK(&a.spec() == &b.spec());
    CHECK(a.value(0.3) == b.value(0.3));
  }
}
