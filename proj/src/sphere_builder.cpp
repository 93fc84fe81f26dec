#include "affsphere/sphere_builder.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "affsphere/errors.hpp"

namespace affsphere {

namespace {

constexpr double kMargin = 1e-6;

bool finite_range(ParamRange r) { return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo < r.hi; }

double clamp_into(double v, double lo, double hi) {
  if (std::isfinite(lo)) v = std::max(v, lo + kMargin * std::max(1.0, std::abs(lo)));
  if (std::isfinite(hi)) v = std::min(v, hi - kMargin * std::max(1.0, std::abs(hi)));
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) fail(ErrorKind::Domain, "mesh csv: bad number '" + s + "'");
  return v;
}

}  // namespace

ParamRange default_param_range(const ConeSpec& spec) {
  switch (spec.kind()) {
    case ConeKind::Orthant: return {0.05, 20.0};
    case ConeKind::ExpCone: return {0.05, 20.0};
    case ConeKind::Family4: return {-5.0, 5.0};
    case ConeKind::Family5:
    case ConeKind::Family3: return {0.01, 20.0};
  }
  return {};
}

ParamRange default_mu_range(const ConeSpec& spec) {
  if (spec.kind() == ConeKind::ExpCone) return {0.25, 4.0};
  return {-2.0, 2.0};
}

ParamRange clamp_param_range(const PhiSolution& phi, ParamRange r) {
  if (!finite_range(r)) fail(ErrorKind::Domain, "parameter range must be finite with lo < hi");
  const double a = phi.param_lower(), b = phi.param_upper();
  if (r.hi <= a || r.lo >= b) fail(ErrorKind::Domain, "parameter range lies outside the " + phi.param_name() + " domain");
  ParamRange out{clamp_into(r.lo, a, b), clamp_into(r.hi, a, b)};
  if (!(out.lo < out.hi)) fail(ErrorKind::Domain, "parameter range is empty after clamping");
  return out;
}

ParamRange clamp_mu_range(const ConeSpec& spec, ParamRange r) {
  if (!finite_range(r)) fail(ErrorKind::Domain, "mu range must be finite with lo < hi");
  if (spec.kind() != ConeKind::ExpCone) return r;
  if (r.hi <= 0) fail(ErrorKind::Domain, "exponential cone needs z > 0");
  return {clamp_into(r.lo, 0.0, INFINITY), r.hi};
}

Vec3 immersion_point(const CanonicalPotential& F, double param, double mu) { return F.immersion(param, mu); }

SurfaceMesh immerse(const CanonicalPotential& F, ParamRange param, ParamRange mu, int n_param, int n_mu) {
  if (n_param < 2 || n_mu < 2) fail(ErrorKind::Domain, "grid needs at least 2 x 2 nodes");
  SurfaceMesh mesh{F.spec(), F.phi().param_name(), clamp_param_range(F.phi(), param), clamp_mu_range(F.spec(), mu),
                   n_param, n_mu, {}, {}, {}, {}};
  mesh.params.resize(static_cast<std::size_t>(n_param));
  mesh.mus.resize(static_cast<std::size_t>(n_mu));
  for (int i = 0; i < n_param; ++i)
    mesh.params[i] = mesh.param_range.lo + (mesh.param_range.hi - mesh.param_range.lo) * i / (n_param - 1);
  for (int j = 0; j < n_mu; ++j)
    mesh.mus[j] = mesh.mu_range.lo + (mesh.mu_range.hi - mesh.mu_range.lo) * j / (n_mu - 1);
  mesh.vertices.reserve(static_cast<std::size_t>(n_param) * n_mu);
  for (int i = 0; i < n_param; ++i)
    for (int j = 0; j < n_mu; ++j) mesh.vertices.push_back(F.immersion(mesh.params[i], mesh.mus[j]));
  mesh.faces.reserve(2 * static_cast<std::size_t>(n_param - 1) * (n_mu - 1));
  for (int i = 0; i + 1 < n_param; ++i)
    for (int j = 0; j + 1 < n_mu; ++j) {
      const int v00 = i * n_mu + j, v01 = v00 + 1, v10 = v00 + n_mu, v11 = v10 + 1;
      mesh.faces.push_back({v00, v10, v11});
      mesh.faces.push_back({v00, v11, v01});
    }
  return mesh;
}

SurfaceMesh immerse(const ConeSpec& spec, ParamRange param, ParamRange mu, int n_param, int n_mu) {
  return immerse(CanonicalPotential(spec), param, mu, n_param, n_mu);
}

double level_set_defect(const CanonicalPotential& F, const SurfaceMesh& mesh) {
  double worst = 0.0;
  for (const Vec3& v : mesh.vertices) worst = std::max(worst, std::abs(F.value(v)));
  return worst;
}

MeshFormat mesh_format_from_path(const std::string& path) {
  auto ends = [&](const char* ext) {
    const std::string e(ext);
    return path.size() >= e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0;
  };
  if (ends(".obj")) return MeshFormat::Obj;
  if (ends(".csv")) return MeshFormat::Csv;
  fail(ErrorKind::Domain, "output file must end in .obj or .csv: " + path);
}

std::string export_mesh(const SurfaceMesh& mesh, MeshFormat format) {
  if (mesh.vertices.empty()) fail(ErrorKind::EmptyMesh, "mesh has no vertices");
  std::string out;
  out.reserve(mesh.vertices.size() * 80);
  if (format == MeshFormat::Obj) {
    for (const Vec3& v : mesh.vertices) {
      out += "v ";
      append_number(out, v.x());
      out += ' ';
      append_number(out, v.y());
      out += ' ';
      append_number(out, v.z());
      out += '\n';
    }
    for (const auto& f : mesh.faces)
      out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
    return out;
  }
  out += "param,mu,x,y,z\n";
  for (int i = 0; i < mesh.n_param; ++i)
    for (int j = 0; j < mesh.n_mu; ++j) {
      const Vec3& v = mesh.vertex(i, j);
      for (double x : {mesh.params[i], mesh.mus[j], v.x(), v.y()}) {
        append_number(out, x);
        out += ',';
      }
      append_number(out, v.z());
      out += '\n';
    }
  return out;
}

std::vector<MeshCsvRow> parse_mesh_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "param,mu,x,y,z") fail(ErrorKind::Domain, "mesh csv: missing header");
  std::vector<MeshCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double f[5];
    std::size_t pos = 0;
    for (int k = 0; k < 5; ++k) {
      const std::size_t next = k < 4 ? line.find(',', pos) : line.size();
      if (next == std::string::npos) fail(ErrorKind::Domain, "mesh csv: expected 5 fields in '" + line + "'");
      f[k] = parse_number(line.substr(pos, next - pos));
      pos = next + 1;
    }
    rows.push_back({f[0], f[1], Vec3(f[2], f[3], f[4])});
  }
  return rows;
}

}  // namespace affsphere
