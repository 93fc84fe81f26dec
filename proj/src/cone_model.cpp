#include "affsphere/cone_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "affsphere/errors.hpp"

namespace affsphere {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

PowerParams::PowerParams(double p) : p_(p), q_(p / (p - 1.0)) {
  if (!(std::isfinite(p) && p >= 2.0)) fail(ErrorKind::Domain, "PowerParams: p must lie in [2, inf), got " + fmt_num(p));
}

ConeSpec::ConeSpec(ConeKind kind, PowerParams params, double family_alpha, double chart_alpha, double chart_beta)
    : kind_(kind), params_(params), family_alpha_(family_alpha), chart_alpha_(chart_alpha), chart_beta_(chart_beta) {}

ConeSpec ConeSpec::exp_cone() { return ConeSpec(ConeKind::ExpCone, PowerParams(2.0), 1.0, 0.0, kInf); }
ConeSpec ConeSpec::orthant() { return ConeSpec(ConeKind::Orthant, PowerParams(2.0), 1.0, 0.0, kInf); }
ConeSpec ConeSpec::family3(double p) { return ConeSpec(ConeKind::Family3, PowerParams(p), 1.0, kInf, 1.0); }
ConeSpec ConeSpec::family5(double p) { return ConeSpec(ConeKind::Family5, PowerParams(p), 1.0, 0.0, 1.0); }

ConeSpec ConeSpec::family4(double p, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Domain, "family4: alpha must lie in (0, 1], got " + fmt_num(alpha));
  return ConeSpec(ConeKind::Family4, PowerParams(p), alpha, alpha, 1.0);
}

Vec3 ConeSpec::to_theorem_chart(const Vec3& v) const {
  if (kind_ == ConeKind::ExpCone) return v;
  return Vec3(v.x(), v.z(), v.y());
}

Vec3 ConeSpec::from_theorem_chart(const Vec3& v) const {
  if (kind_ == ConeKind::ExpCone) return v;
  return Vec3(v.x(), v.z(), v.y());
}

std::string ConeSpec::family() const {
  switch (kind_) {
    case ConeKind::ExpCone: return "exp";
    case ConeKind::Orthant: return "orthant";
    case ConeKind::Family3: return "family3";
    case ConeKind::Family4: return "family4";
    case ConeKind::Family5: return "family5";
  }
  return "";
}

std::string ConeSpec::name() const {
  switch (kind_) {
    case ConeKind::ExpCone:
    case ConeKind::Orthant: return family();
    case ConeKind::Family4:
      return family() + "(p=" + fmt_num(params_.p()) + ",alpha=" + fmt_num(family_alpha_) + ")";
    default: return family() + "(p=" + fmt_num(params_.p()) + ")";
  }
}

const char* to_string(Region r) {
  switch (r) {
    case Region::Interior: return "interior";
    case Region::Boundary: return "boundary";
    case Region::Outside: return "outside";
  }
  return "";
}

Region membership(const ConeSpec& spec, const Vec3& v, double tol) {
  if (!v.allFinite()) return Region::Outside;
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Region::Boundary;
  const double eps = tol * scale;
  const double x = v.x(), y = v.y(), z = v.z();

  if (spec.kind() == ConeKind::ExpCone) {
    if (z < -eps) return Region::Outside;
    if (z <= eps) return (x <= eps && y >= -eps) ? Region::Boundary : Region::Outside;
    const double margin = y - z * std::exp(x / z);
    if (margin > eps) return Region::Interior;
    return margin >= -eps ? Region::Boundary : Region::Outside;
  }

  const PowerParams& pp = spec.params();
  std::array<double, 4> margins = {x, y, kInf, kInf};
  const double g = std::pow(std::max(x, 0.0), 1.0 / pp.p()) * std::pow(std::max(y, 0.0), 1.0 / pp.q());
  if (std::isfinite(spec.chart_beta())) margins[2] = spec.chart_beta() * g - z;
  if (std::isfinite(spec.chart_alpha())) margins[3] = z + spec.chart_alpha() * g;
  const double worst = *std::min_element(margins.begin(), margins.end());
  if (worst > eps) return Region::Interior;
  return worst >= -eps ? Region::Boundary : Region::Outside;
}

const char* to_string(CanonicalCase c) {
  switch (c) {
    case CanonicalCase::Nilpotent3: return "Nilpotent3";
    case CanonicalCase::Nilpotent2: return "Nilpotent2";
    case CanonicalCase::MixedJordan: return "MixedJordan";
    case CanonicalCase::Diagonal: return "Diagonal";
    case CanonicalCase::Rotational: return "Rotational";
  }
  return "";
}

int case_number(CanonicalCase c) { return static_cast<int>(c) + 1; }

Mat3 canonical_matrix(CanonicalCase kind, double mu) {
  Mat3 m = Mat3::Zero();
  switch (kind) {
    case CanonicalCase::Nilpotent3: m(0, 1) = 1; m(1, 2) = 1; break;
    case CanonicalCase::Nilpotent2: m(0, 1) = 1; break;
    case CanonicalCase::MixedJordan: m(0, 0) = 1; m(0, 1) = 1; m(1, 1) = 1; break;
    case CanonicalCase::Diagonal: m(0, 0) = 1; m(1, 1) = -mu; m(2, 2) = mu - 1; break;
    case CanonicalCase::Rotational: m(0, 0) = mu; m(0, 1) = 1; m(1, 0) = -1; m(1, 1) = mu; break;
  }
  return m;
}

namespace {

/// Column of M with the largest Euclidean norm.
Vec3 best_column(const Mat3& M) {
  Eigen::Index j = 0;
  M.colwise().norm().maxCoeff(&j);
  return M.col(j);
}

/// Unit kernel vector of a rank-2 matrix via the best cross product of rows.
Vec3 kernel_vector(const Mat3& M) {
  Vec3 best = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    Vec3 c = M.row(i).transpose().cross(M.row((i + 1) % 3).transpose());
    if (c.norm() > best.norm()) best = c;
  }
  return best.normalized();
}

/// Among candidate columns, pick the one with the largest component orthogonal to `u`.
Vec3 column_independent_of(const Mat3& M, const Vec3& u) {
  const Vec3 un = u.normalized();
  Vec3 best = Vec3::Zero();
  double best_norm = -1;
  for (int j = 0; j < 3; ++j) {
    Vec3 c = M.col(j);
    const double r = (c - un * un.dot(c)).norm();
    if (r > best_norm) {
      best_norm = r;
      best = c;
    }
  }
  return best;
}

CanonicalForm finish(CanonicalForm f) {
  f.canonical = canonical_matrix(f.kind, f.mu);
  return f;
}

}  // namespace

CanonicalForm canonicalize_generator(const Mat3& A, const CanonicalizeOptions& opts) {
  if (!A.allFinite()) fail(ErrorKind::Domain, "canonicalize_generator: non-finite entry");
  const double norm = A.cwiseAbs().maxCoeff();
  const double tr3 = A.trace() / 3.0;
  const Mat3 I = Mat3::Identity();
  const Mat3 B = A - tr3 * I;
  if (norm == 0.0 || B.cwiseAbs().maxCoeff() <= opts.scalar_tol * norm)
    fail(ErrorKind::ScalarMatrix, "generator is a multiple of the identity");

  const double s = B.norm();
  const double a = -0.5 * (B * B).trace();
  const double b = -B.determinant();

  CanonicalForm f;

  // Triple eigenvalue: nilpotent cases.
  if (std::abs(a) <= opts.repeated_tol * s * s && std::abs(b) <= opts.repeated_tol * s * s * s) {
    f.shift = -tr3;
    f.scale = 1.0;
    const Mat3 N = B;
    const Mat3 N2 = N * N;
    if (N2.norm() <= std::sqrt(opts.repeated_tol) * s * s) {
      f.kind = CanonicalCase::Nilpotent2;
      Eigen::Index j = 0;
      N.colwise().norm().maxCoeff(&j);
      const Vec3 v = I.col(j);
      const Vec3 nv = N * v;
      Eigen::Index i = 0;
      N.rowwise().norm().maxCoeff(&i);
      const Vec3 r = N.row(i).transpose();
      f.basis.col(0) = nv;
      f.basis.col(1) = v;
      f.basis.col(2) = r.cross(nv).normalized() * nv.norm();
    } else {
      f.kind = CanonicalCase::Nilpotent3;
      Eigen::Index j = 0;
      N2.colwise().norm().maxCoeff(&j);
      const Vec3 v = I.col(j);
      f.basis.col(0) = N2 * v;
      f.basis.col(1) = N * v;
      f.basis.col(2) = v;
    }
    return finish(f);
  }

  const double num = -4.0 * a * a * a - 27.0 * b * b;
  const double den = 4.0 * std::abs(a * a * a) + 27.0 * b * b;
  const double delta = num / den;
  if (std::abs(delta) > opts.repeated_tol && std::abs(delta) <= opts.ambiguous_tol) {
    std::ostringstream os;
    os << "eigenvalue clustering is ambiguous: normalized discriminant " << delta;
    fail(ErrorKind::Degenerate, os.str(), delta);
  }

  if (std::abs(delta) <= opts.repeated_tol) {
    // Double root r and simple root -2r of the traceless matrix.
    const double r = -1.5 * b / a;
    const double sr = -2.0 * r;
    const Mat3 P = (B - r * I) * (B - sr * I);
    if (P.norm() <= std::sqrt(opts.repeated_tol) * s * s) {
      // Diagonalizable with eigenvalues (r, r, -2r): Diagonal with mu = 1/2.
      f.kind = CanonicalCase::Diagonal;
      f.mu = 0.5;
      const double lmax = sr;  // |-2r| > |r|
      f.scale = 1.0 / lmax;
      f.shift = -tr3 / lmax;
      const Mat3 Er = B - sr * I;  // columns span the r-eigenspace
      const Vec3 vs = best_column(B - r * I);
      const Vec3 v1 = best_column(Er);
      const Vec3 v2 = column_independent_of(Er, v1);
      f.basis.col(0) = vs;
      f.basis.col(1) = v1;
      f.basis.col(2) = v2;
      return finish(f);
    }
    f.kind = CanonicalCase::MixedJordan;
    // Single eigenvalue to 0, double to 1.
    const double lam_s = sr + tr3, lam_d = r + tr3;
    f.scale = 1.0 / (lam_d - lam_s);
    f.shift = -lam_s * f.scale;
    // The eigenvalue error leaks into the off-block entries amplified by the
    // basis conditioning, so re-read both eigenvalues from the block form.
    for (int pass = 0; pass < 3; ++pass) {
      const Mat3 M = f.scale * A + f.shift * I;
      const Mat3 MI = M - I;
      Vec3 v = M.col(0);
      double best = -1;
      for (int j = 0; j < 3; ++j) {
        const double n = (MI * M.col(j)).norm();
        if (n > best) {
          best = n;
          v = M.col(j);
        }
      }
      f.basis.col(0) = MI * v;
      f.basis.col(1) = v;
      f.basis.col(2) = kernel_vector(M);
      const Mat3 R = f.basis.inverse() * M * f.basis;
      const double ls = R(2, 2), ld = 0.5 * (R(0, 0) + R(1, 1));
      if (pass == 2 || !(std::abs(ls) + std::abs(ld - 1) > 0) || !(ld != ls)) break;
      f.shift = (f.shift - ls) / (ld - ls);
      f.scale /= (ld - ls);
    }
    return finish(f);
  }

  if (delta > 0) {
    // Three distinct real eigenvalues (trigonometric form).
    const double rr = 2.0 * std::sqrt(-a / 3.0);
    const double arg = std::clamp(1.5 * b / a * std::sqrt(-3.0 / a), -1.0, 1.0);
    const double th = std::acos(arg) / 3.0;
    std::array<double, 3> lam;
    for (int i = 0; i < 3; ++i) lam[i] = rr * std::cos(th - 2.0 * M_PI * i / 3.0);
    // Newton polish on the cubic.
    for (double& l : lam)
      for (int it = 0; it < 3; ++it) {
        const double d = 3 * l * l + a;
        if (d != 0) l -= (l * l * l + a * l + b) / d;
      }
    double lmax = lam[0];
    for (double l : lam)
      if (std::abs(l) > std::abs(lmax)) lmax = l;
    f.kind = CanonicalCase::Diagonal;
    f.scale = 1.0 / lmax;
    f.shift = -tr3 / lmax;
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return lam[i] / lmax > lam[j] / lmax; });
    f.mu = -lam[order[1]] / lmax;
    for (int c = 0; c < 3; ++c) {
      const int i = order[c];
      Mat3 prod = I;
      for (int j = 0; j < 3; ++j)
        if (j != i) prod = prod * (B - lam[j] * I);
      f.basis.col(c) = best_column(prod);
    }
    f.mu = std::clamp(f.mu, 0.0, 0.5);
    return finish(f);
  }

  // One real eigenvalue and a complex pair (Cardano).
  const double D = 0.25 * b * b + a * a * a / 27.0;
  const double sq = std::sqrt(D);
  const double lam_s = std::cbrt(-0.5 * b + sq) + std::cbrt(-0.5 * b - sq);
  const double rho = -0.5 * lam_s;
  const double omega = std::sqrt(std::max(0.75 * lam_s * lam_s + a, 0.0));
  const double sgn = rho - lam_s >= 0 ? 1.0 : -1.0;
  f.kind = CanonicalCase::Rotational;
  f.scale = sgn / omega;
  f.shift = -(lam_s + tr3) * f.scale;
  f.mu = std::abs(rho - lam_s) / omega;
  const Mat3 M = f.scale * A + f.shift * I;
  using C = std::complex<double>;
  const Eigen::Matrix3cd Cm = M.cast<C>() - C(f.mu, 1.0) * Eigen::Matrix3cd::Identity();
  Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3cd c = Cm.row(i).transpose().cross(Cm.row((i + 1) % 3).transpose());
    if (c.norm() > v.norm()) v = c;
  }
  // M a = mu a - b must hold for v = a + i b; the row cross product can land on
  // the conjugate eigenvector instead.
  Vec3 re = v.real(), im = v.imag();
  if ((M * re - f.mu * re + im).norm() > (M * re - f.mu * re - im).norm()) im = -im;
  f.basis.col(0) = re;
  f.basis.col(1) = im;
  f.basis.col(2) = kernel_vector(M);
  return finish(f);
}

}  // namespace affsphere
