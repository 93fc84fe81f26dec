#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "affsphere/branch_solver.hpp"
#include "affsphere/cli.hpp"
#include "affsphere/errors.hpp"
#include "affsphere/exp_sphere.hpp"
#include "affsphere/power_ode.hpp"
#include "affsphere/sphere_builder.hpp"
#include "json.hpp"

namespace affsphere::cli {

namespace {

using nlohmann::ordered_json;

std::vector<double> parse_list(const std::string& flag, const std::string& text, std::size_t expected) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string item = text.substr(pos, next - pos);
    double v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size() || !std::isfinite(v))
      throw UsageError(flag + ": not a finite number: '" + item + "'");
    out.push_back(v);
    pos = next + 1;
  }
  if (out.size() != expected)
    throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated values, got " +
                     std::to_string(out.size()));
  return out;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ScalarMatrix:
    case ErrorKind::Degenerate: return kClassification;
    case ErrorKind::Domain:
    case ErrorKind::OutsideCone:
    case ErrorKind::InconsistentJet: return kDomain;
    default: return kNumeric;
  }
}

/// Rounds to the configured number of significant digits.
struct Fmt {
  int precision = 17;
  double operator()(double v) const {
    if (!std::isfinite(v) || precision >= 17) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return std::strtod(buf, nullptr);
  }
  ordered_json json(double v) const {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return (*this)(v);
  }
  ordered_json vec(const Vec3& v) const { return {json(v.x()), json(v.y()), json(v.z())}; }
  ordered_json mat(const Mat3& m) const {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(vec(m.row(i).transpose()));
    return rows;
  }
  std::string text(double v) const {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
  }
};

struct FamilyFlags {
  std::string family;
  std::optional<double> p;
  std::optional<double> alpha;

  void add(CLI::App* cmd) {
    cmd->add_option("--family", family, "exp | orthant | family3 | family4 | power | family5")->required();
    cmd->add_option("--p", p, "exponent p >= 2 (power families)");
    cmd->add_option("--alpha", alpha, "family4 lower opening alpha in (0, 1], default 1");
  }

  ConeSpec spec() const {
    const bool power = family == "family3" || family == "family4" || family == "power" || family == "family5";
    if (!power && family != "exp" && family != "orthant") throw UsageError("--family: unknown family '" + family + "'");
    if (alpha && family != "family4" && family != "power") throw UsageError("--alpha applies to family4 only");
    if (p && !power) throw UsageError("--p does not apply to " + family);
    const double pv = p.value_or(2.0);
    if (family == "exp") return ConeSpec::exp_cone();
    if (family == "orthant") return ConeSpec::orthant();
    if (family == "family3") return ConeSpec::family3(pv);
    if (family == "family5") return ConeSpec::family5(pv);
    return ConeSpec::family4(pv, alpha.value_or(1.0));
  }
};

ordered_json spec_json(const ConeSpec& s, const Fmt& f) {
  ordered_json j;
  j["family"] = s.family();
  j["name"] = s.name();
  if (s.kind() == ConeKind::ExpCone || s.kind() == ConeKind::Orthant) j["p"] = nullptr;
  else {
    j["p"] = f.json(s.params().p());
    j["q"] = f.json(s.params().q());
  }
  if (s.kind() != ConeKind::ExpCone) j["chart"] = {{"alpha", f.json(s.chart_alpha())}, {"beta", f.json(s.chart_beta())}};
  return j;
}

SolverOptions solver_options(const CliConfig& cfg) {
  SolverOptions so;
  so.table_nodes = cfg.table_nodes;
  so.elliptic.cell_tol = cfg.cell_tol;
  return so;
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

int cmd_classify(const std::string& matrix, const Fmt& f, std::ostream& out) {
  const std::vector<double> a = parse_list("--matrix", matrix, 9);
  Mat3 A;
  for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = a[i];
  const CanonicalForm cf = canonicalize_generator(A);
  ordered_json j;
  j["case"] = case_number(cf.kind);
  j["label"] = to_string(cf.kind);
  if (cf.kind == CanonicalCase::Diagonal || cf.kind == CanonicalCase::Rotational) j["mu"] = f.json(cf.mu);
  else j["mu"] = nullptr;
  j["scale"] = f.json(cf.scale);
  j["shift"] = f.json(cf.shift);
  j["basis"] = f.mat(cf.basis);
  j["canonical"] = f.mat(cf.canonical);
  const Mat3 recon = cf.basis.inverse() * (cf.scale * A + cf.shift * Mat3::Identity()) * cf.basis;
  j["reconstruction_error"] = f.json((recon - cf.canonical).cwiseAbs().maxCoeff());
  emit(out, j);
  return kOk;
}

int cmd_potential(const FamilyFlags& fam, const std::string& point, const std::string& chart, const CliConfig& cfg,
                  const Fmt& f, std::ostream& out) {
  const ConeSpec spec = fam.spec();
  const std::vector<double> pv = parse_list("--point", point, 3);
  Vec3 v(pv[0], pv[1], pv[2]);
  if (chart == "theorem") {
    if (!spec.is_power()) throw UsageError("--chart theorem applies to power families only");
    v = spec.from_theorem_chart(v);
  } else if (chart != "working") {
    throw UsageError("--chart must be 'working' or 'theorem'");
  }
  const Region region = membership(spec, v);
  if (region != Region::Interior)
    fail(ErrorKind::OutsideCone, spec.name() + ": point is " + std::string(to_string(region)) + ", not interior");
  const CanonicalPotential F(spec, solver_options(cfg));
  PhiJet pj;
  const PotentialJet jet = F.jet(v, pj);
  const double det = jet.hess.determinant(), e2F = std::exp(2 * jet.F);
  ordered_json j;
  j["spec"] = spec_json(spec, f);
  j["point"] = f.vec(v);
  if (spec.is_power()) j["theorem_chart_point"] = f.vec(spec.to_theorem_chart(v));
  j["region"] = to_string(region);
  j["t"] = f.json(pj.t);
  j["phi"] = {{"value", f.json(pj.phi)}, {"derivative", f.json(pj.phi_dot)}, {"second_derivative", f.json(pj.phi_ddot)}};
  j["F"] = f.json(jet.F);
  j["gradient"] = f.vec(jet.grad);
  j["hessian"] = f.mat(jet.hess);
  j["det_hessian"] = f.json(det);
  j["exp_2F"] = f.json(e2F);
  j["residual"] = f.json(ma_residual(jet));
  emit(out, j);
  return kOk;
}

int cmd_sphere(const FamilyFlags& fam, const std::optional<std::string>& grid, const std::string& path,
               const std::optional<std::string>& prange, const std::optional<std::string>& mrange, const CliConfig& cfg,
               const Fmt& f, std::ostream& out) {
  const ConeSpec spec = fam.spec();
  int n = cfg.grid_param, m = cfg.grid_mu;
  if (grid) {
    const std::vector<double> g = parse_list("--grid", *grid, 2);
    if (g[0] != std::floor(g[0]) || g[1] != std::floor(g[1])) throw UsageError("--grid: sizes must be integers");
    n = static_cast<int>(g[0]);
    m = static_cast<int>(g[1]);
  }
  if (n < 2 || m < 2) throw UsageError("--grid: need at least 2 x 2 nodes");
  MeshFormat format;
  try {
    format = mesh_format_from_path(path);
  } catch (const Error&) {
    throw UsageError("--out must end in .obj or .csv");
  }
  ParamRange pr = default_param_range(spec), mr = default_mu_range(spec);
  if (prange) {
    const auto r = parse_list("--param-range", *prange, 2);
    pr = {r[0], r[1]};
  }
  if (mrange) {
    const auto r = parse_list("--mu-range", *mrange, 2);
    mr = {r[0], r[1]};
  }
  const CanonicalPotential F(spec, solver_options(cfg));
  const SurfaceMesh mesh = immerse(F, pr, mr, n, m);
  const double defect = level_set_defect(F, mesh);
  const std::string data = export_mesh(mesh, format);
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << data) || !file.flush()) throw UsageError("cannot write " + path);

  ordered_json j;
  j["spec"] = spec_json(spec, f);
  j["file"] = path;
  j["format"] = format == MeshFormat::Obj ? "obj" : "csv";
  j["param"] = mesh.param_name;
  j["param_range"] = {f.json(mesh.param_range.lo), f.json(mesh.param_range.hi)};
  j["mu_range"] = {f.json(mesh.mu_range.lo), f.json(mesh.mu_range.hi)};
  j["grid"] = {n, m};
  j["vertices"] = mesh.vertices.size();
  j["faces"] = mesh.faces.size();
  j["level_set_defect"] = f.json(defect);
  if (spec.kind() == ConeKind::Family4 && spec.family_alpha() == 1.0 && spec.params().p() == 2.0) {
    // F = -(3/2) log(xy - z^2) + const, so xy - z^2 is constant on the level set.
    double lo = INFINITY, hi = -INFINITY;
    for (const Vec3& v : mesh.vertices) {
      const double qv = v.x() * v.y() - v.z() * v.z();
      lo = std::min(lo, qv);
      hi = std::max(hi, qv);
    }
    j["quadric_invariant"] = {{"min", f.json(lo)}, {"max", f.json(hi)}, {"relative_spread", f.json((hi - lo) / hi)}};
  }
  emit(out, j);
  return kOk;
}

int cmd_alpha(double p, const std::optional<double>& c, const std::optional<double>& alpha, const CliConfig& cfg,
              const Fmt& f, std::ostream& out) {
  if (c.has_value() == alpha.has_value()) throw UsageError("give exactly one of --c and --alpha");
  const PowerParams pp(p);
  ordered_json j;
  j["p"] = f.json(pp.p());
  j["q"] = f.json(pp.q());
  if (c) {
    const AlphaResult r = alpha_of_c(pp, *c, cfg.alpha_rel_tol);
    j["direction"] = "alpha_of_c";
    j["c"] = f.json(*c);
    j["alpha"] = f.json(r.alpha);
    j["error"] = f.json(r.error);
  } else {
    const CofAlphaResult r = c_of_alpha_detail(pp, *alpha);
    j["direction"] = "c_of_alpha";
    j["alpha"] = f.json(*alpha);
    j["c"] = f.json(r.c);
    j["error"] = f.json(r.alpha_error);
    j["crossings"] = r.crossings;
  }
  emit(out, j);
  return kOk;
}

int cmd_solve_ode(double p, double c, int sigma, double xi0, const std::string& span, const CliConfig& cfg,
                  const Fmt& f, std::ostream& out, std::ostream& err) {
  if (sigma != 1 && sigma != -1) throw UsageError("--sigma must be 1 or -1");
  const std::vector<double> s = parse_list("--tau-span", span, 2);
  XiOptions o;
  o.rtol = cfg.rk_rtol;
  o.atol = cfg.rk_atol;
  const XiTrajectory tr = integrate_xi(PowerParams(p), c, sigma, xi0, s[0], s[1], o);
  std::string csv = "tau,xi,sigma,t,phi\n";
  for (const XiState& st : tr.states)
    csv += f.text(st.tau) + ',' + f.text(st.xi) + ',' + std::to_string(st.sigma) + ',' + f.text(st.t) + ',' +
           f.text(st.phi) + '\n';
  out << csv;
  if (tr.termination == XiTermination::BlowUp) err << "blow-up: xi escapes at tau* = " << f.text(tr.tau_star) << '\n';
  for (double ts : tr.switch_taus) err << "sigma switch at tau = " << f.text(ts) << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Canonical potentials and complete hyperbolic affine spheres of 3D semi-homogeneous cones", "affsphere"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<int> precision;
  app.add_option("--config", config_path, "key=value config file ('#' comments)");
  app.add_option("--set", sets, "override one config key, key=value (repeatable)");
  app.add_option("--precision", precision, "significant digits in output, 6..17");

  auto* classify = app.add_subcommand("classify", "normal form of a cone-automorphism generator");
  std::string matrix;
  classify->add_option("--matrix", matrix, "a11,a12,...,a33 (row-major)")->required();

  auto* potential = app.add_subcommand("potential", "value, gradient and Hessian of the canonical potential");
  FamilyFlags pot_fam;
  pot_fam.add(potential);
  std::string point, chart = "working";
  potential->add_option("--point", point, "x,y,z")->required();
  potential->add_option("--chart", chart, "working (default) or theorem coordinates for power families");

  auto* sphere = app.add_subcommand("sphere", "sample the affine sphere F = 0 and write a mesh");
  FamilyFlags sph_fam;
  sph_fam.add(sphere);
  std::optional<std::string> grid, prange, mrange;
  std::string out_path;
  sphere->add_option("--grid", grid, "N,M grid nodes");
  sphere->add_option("--out", out_path, "output file, .obj or .csv")->required();
  sphere->add_option("--param-range", prange, "lo,hi of the curve parameter");
  sphere->add_option("--mu-range", mrange, "lo,hi of mu (z for the exponential cone)");

  auto* alpha = app.add_subcommand("alpha", "convert between c and alpha for family4");
  double alpha_p = 2.0;
  std::optional<double> alpha_c, alpha_alpha;
  alpha->add_option("--p", alpha_p, "exponent p >= 2");
  alpha->add_option("--c", alpha_c, "integration constant in (-2(p+q), 0)");
  alpha->add_option("--alpha", alpha_alpha, "alpha in [0, 1]");

  auto* verify_cmd = app.add_subcommand("verify", "run the verification sweep; exit 0 iff every criterion passes");
  FamilyFlags ver_fam;
  ver_fam.add(verify_cmd);
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  verify_cmd->add_option("--samples", samples, "number of interior samples");
  verify_cmd->add_option("--seed", seed, "sampling seed");

  auto* ode = app.add_subcommand("solve-ode", "integrate the reduced xi(tau) equation, CSV to stdout");
  double ode_p = 2.0, ode_c = 0.0, ode_xi0 = 0.0;
  int ode_sigma = 1;
  std::string ode_span;
  ode->add_option("--p", ode_p, "exponent p >= 2");
  ode->add_option("--c", ode_c, "integration constant")->required();
  ode->add_option("--sigma", ode_sigma, "initial sign, 1 or -1");
  ode->add_option("--xi0", ode_xi0, "initial xi")->required();
  ode->add_option("--tau-span", ode_span, "tau0,tau_end (use --tau-span=a,b when a is negative)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    CliConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("cannot read config file " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      apply_config_text(cfg, ss.str());
    }
    for (const std::string& s : sets) apply_assignment(cfg, s);
    if (precision) cfg.precision = *precision;
    if (samples) cfg.samples = *samples;
    if (seed) cfg.seed = *seed;
    validate(cfg);
    const Fmt f{cfg.precision};

    if (*classify) return cmd_classify(matrix, f, out);
    if (*potential) return cmd_potential(pot_fam, point, chart, cfg, f, out);
    if (*sphere) return cmd_sphere(sph_fam, grid, out_path, prange, mrange, cfg, f, out);
    if (*alpha) return cmd_alpha(alpha_p, alpha_c, alpha_alpha, cfg, f, out);
    if (*verify_cmd) {
      VerifyOptions vo;
      vo.solver = solver_options(cfg);
      const VerifyReport r = verify(ver_fam.spec(), cfg.samples, cfg.seed, cfg.verify, vo);
      out << r.to_json(2) << '\n';
      return r.pass ? kOk : kVerifyFailed;
    }
    if (*ode) return cmd_solve_ode(ode_p, ode_c, ode_sigma, ode_xi0, ode_span, cfg, f, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}

}  // namespace affsphere::cli
