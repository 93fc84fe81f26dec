#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "affsphere/errors.hpp"
#include "affsphere/sphere_builder.hpp"

using namespace affsphere;

namespace {

std::vector<ConeSpec> all_specs() {
  return {ConeSpec::orthant(),       ConeSpec::exp_cone(),   ConeSpec::family4(2, 1), ConeSpec::family4(2.5, 0.5),
          ConeSpec::family4(4, 0.2), ConeSpec::family5(2),   ConeSpec::family5(3),    ConeSpec::family3(2),
          ConeSpec::family3(3.5)};
}

int count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

// Smallest distance to a boundary face of a power-family cone, over |v|.
double normalized_margin(const ConeSpec& s, const Vec3& v) {
  const PowerParams& pp = s.params();
  const double g = std::pow(v.x(), 1 / pp.p()) * std::pow(v.y(), 1 / pp.q());
  double m = std::min(v.x(), v.y());
  if (std::isfinite(s.chart_beta())) m = std::min(m, s.chart_beta() * g - v.z());
  if (std::isfinite(s.chart_alpha())) m = std::min(m, v.z() + s.chart_alpha() * g);
  return m / v.norm();
}

}  // namespace

TEST_SUITE("sphere_builder") {
  TEST_CASE("immersion examples") {
    const CanonicalPotential q(ConeSpec::family4(2, 1));
    const Vec3 v = immersion_point(q, 0, 0);
    const double s = std::cbrt(1.5 * std::sqrt(3.0));
    CHECK(s == doctest::Approx(1.3747296369986028).epsilon(1e-15));
    CHECK((v - s * Vec3(1, 1, 0)).norm() < 1e-14);
    const CanonicalPotential e(ConeSpec::exp_cone());
    CHECK((immersion_point(e, 1, 1) - Vec3(-1, std::sqrt(2.0), 1)).norm() < 1e-14);
  }

  TEST_CASE("every vertex lies on the level set F = 0") {
    for (const ConeSpec& s : all_specs()) {
      const CanonicalPotential F(s);
      const SurfaceMesh m = immerse(F, default_param_range(s), default_mu_range(s), 24, 12);
      CHECK(m.vertices.size() == 24u * 12u);
      CHECK(m.faces.size() == 2u * 23u * 11u);
      CHECK(level_set_defect(F, m) <= 1e-8);
      for (const Vec3& v : m.vertices) CHECK(membership(s, v) == Region::Interior);
    }
  }

  TEST_CASE("homothety moves the level set to F = -3 log lambda") {
    for (const ConeSpec& s : all_specs()) {
      const CanonicalPotential F(s);
      const SurfaceMesh m = immerse(F, default_param_range(s), default_mu_range(s), 8, 5);
      for (double lam : {0.1, 2.0, 50.0})
        for (const Vec3& v : m.vertices) CHECK(std::abs(F.value(lam * v) + 3 * std::log(lam)) < 1e-9);
    }
  }

  TEST_CASE("quadric invariant on the p = 2, alpha = 1 mesh") {
    const SurfaceMesh m = immerse(ConeSpec::family4(2, 1), {-5, 5}, {-2, 2}, 20, 20);
    const double expect = std::pow(1.5 * std::sqrt(3.0), 2.0 / 3.0);
    for (const Vec3& v : m.vertices) CHECK(v.x() * v.y() - v.z() * v.z() == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("vertices approach boundary rays at the parameter ends") {
    struct Case {
      ConeSpec spec;
      double param;
    };
    const Case cases[] = {{ConeSpec::family4(2, 1), 1e4},   {ConeSpec::family4(2, 1), -1e4},
                          {ConeSpec::family4(3, 0.5), 1e4}, {ConeSpec::family4(3, 0.5), -1e4},
                          {ConeSpec::family5(2), 1e-12},    {ConeSpec::family5(2), 1e12},
                          {ConeSpec::family3(3), 1e12},     {ConeSpec::orthant(), 1e-8},
                          {ConeSpec::orthant(), 1e8}};
    for (const Case& c : cases) {
      const CanonicalPotential F(c.spec);
      for (double mu : {-1.0, 0.0, 1.0}) {
        const Vec3 v = immersion_point(F, c.param, mu);
        CHECK(normalized_margin(c.spec, v) <= 1e-3);
        CHECK(normalized_margin(c.spec, immersion_point(F, c.spec.kind() == ConeKind::Family4 ? 0.0 : 0.5, mu)) > 1e-3);
      }
    }
  }

  TEST_CASE("OBJ for a 2 x 2 grid") {
    const SurfaceMesh m = immerse(ConeSpec::family5(2), {0.5, 2}, {-1, 1}, 2, 2);
    const std::string obj = export_mesh(m, MeshFormat::Obj);
    CHECK(count_prefix(obj, "v ") == 4);
    CHECK(count_prefix(obj, "f ") == 2);
    CHECK(obj.find("f 1 3 4") != std::string::npos);
    CHECK(obj.find("f 1 4 2") != std::string::npos);
    std::istringstream in(obj);
    std::string tag;
    double x, y, z;
    in >> tag >> x >> y >> z;
    CHECK(tag == "v");
    CHECK(Vec3(x, y, z) == m.vertices[0]);
  }

  TEST_CASE("CSV row count and exact round trip") {
    const SurfaceMesh m = immerse(ConeSpec::family4(3, 0.5), {-3, 3}, {-2, 2}, 7, 5);
    const std::string csv = export_mesh(m, MeshFormat::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7 * 5 + 1);
    CHECK(csv.rfind("param,mu,x,y,z\n", 0) == 0);
    const std::vector<MeshCsvRow> rows = parse_mesh_csv(csv);
    REQUIRE(rows.size() == 35u);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 5; ++j) {
        const MeshCsvRow& r = rows[static_cast<std::size_t>(i * 5 + j)];
        CHECK(r.param == m.params[i]);
        CHECK(r.mu == m.mus[j]);
        CHECK(r.point == m.vertex(i, j));
      }
    CHECK_THROWS_AS(parse_mesh_csv("x,y\n1,2\n"), Error);
  }

  TEST_CASE("errors and clamping") {
    auto kind_of = [](const std::function<void()>& f) {
      try {
        f();
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::Convergence;
    };
    SurfaceMesh m = immerse(ConeSpec::orthant(), {0.5, 2}, {-1, 1}, 2, 2);
    m.vertices.clear();
    CHECK(kind_of([&] { export_mesh(m, MeshFormat::Obj); }) == ErrorKind::EmptyMesh);
    CHECK(kind_of([&] { immerse(ConeSpec::orthant(), {0.5, 2}, {-1, 1}, 1, 4); }) == ErrorKind::Domain);
    CHECK(mesh_format_from_path("a/b.obj") == MeshFormat::Obj);
    CHECK(mesh_format_from_path("x.csv") == MeshFormat::Csv);
    CHECK(kind_of([&] { mesh_format_from_path("x.ply"); }) == ErrorKind::Domain);

    const PhiSolution f5(ConeSpec::family5(2));
    const ParamRange r = clamp_param_range(f5, {0, 10});
    CHECK(r.lo > 0);
    CHECK(r.hi == 10);
    CHECK(kind_of([&] { clamp_param_range(f5, {-3, -1}); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { clamp_param_range(f5, {2, 1}); }) == ErrorKind::Domain);
    const ParamRange z = clamp_mu_range(ConeSpec::exp_cone(), {-1, 2});
    CHECK(z.lo > 0);
    CHECK(z.hi == 2);
    const ParamRange w = clamp_mu_range(ConeSpec::family3(2), {-1, 2});
    CHECK(w.lo == -1);
    CHECK(w.hi == 2);
    // a clamped range still produces a finite mesh on the level set
    const CanonicalPotential F(ConeSpec::family5(2));
    const SurfaceMesh c = immerse(F, {0, 1}, {-1, 1}, 5, 3);
    CHECK(c.param_range.lo > 0);
    CHECK(level_set_defect(F, c) <= 1e-8);
  }
}
