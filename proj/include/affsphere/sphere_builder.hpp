#pragma once

#include <array>
#include <string>
#include <vector>

#include "affsphere/canonical_potential.hpp"
#include "affsphere/cone_model.hpp"
#include "affsphere/types.hpp"

namespace affsphere {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Grid-sampled immersion with triangle connectivity. Vertex (i, j) sits at
/// index i * n_mu + j; each grid quad is split into two triangles.
struct SurfaceMesh {
  ConeSpec spec;
  std::string param_name;
  ParamRange param_range, mu_range;  // after clamping
  int n_param = 0;
  int n_mu = 0;
  std::vector<double> params;  // n_param values
  std::vector<double> mus;     // n_mu values
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based

  const Vec3& vertex(int i, int j) const { return vertices[static_cast<std::size_t>(i) * n_mu + j]; }
};

ParamRange default_param_range(const ConeSpec& spec);
/// mu is the second immersion coordinate; for the exponential cone it is z > 0.
ParamRange default_mu_range(const ConeSpec& spec);

/// Pulls the range into the open parameter domain with relative margin 1e-6.
ParamRange clamp_param_range(const PhiSolution& phi, ParamRange r);
ParamRange clamp_mu_range(const ConeSpec& spec, ParamRange r);

Vec3 immersion_point(const CanonicalPotential& F, double param, double mu);

SurfaceMesh immerse(const CanonicalPotential& F, ParamRange param, ParamRange mu, int n_param, int n_mu);
SurfaceMesh immerse(const ConeSpec& spec, ParamRange param, ParamRange mu, int n_param, int n_mu);

/// max |F(vertex)| over the mesh; throws OutsideCone on a non-interior vertex.
double level_set_defect(const CanonicalPotential& F, const SurfaceMesh& mesh);

enum class MeshFormat { Obj, Csv };

MeshFormat mesh_format_from_path(const std::string& path);
std::string export_mesh(const SurfaceMesh& mesh, MeshFormat format);

struct MeshCsvRow {
  double param = 0.0;
  double mu = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Reads the CSV written by export_mesh.
std::vector<MeshCsvRow> parse_mesh_csv(const std::string& text);

}  // namespace affsphere
