#pragma once

#include <string>

#include "affsphere/types.hpp"

namespace affsphere {

/// Conjugate exponents 1/p + 1/q = 1 with p >= 2. q is always derived from p.
class PowerParams {
 public:
  explicit PowerParams(double p = 2.0);

  double p() const { return p_; }
  double q() const { return q_; }
  /// p + q, which equals p q.
  double m() const { return p_ + q_; }
  /// p + q - 1.
  double k() const { return p_ + q_ - 1.0; }

 private:
  double p_;
  double q_;
};

enum class ConeKind { ExpCone, Orthant, Family3, Family4, Family5 };

/// One of the five semi-homogeneous cone families. Power families are stored
/// in the working chart (x, y, z) with cone
///   -alpha g < z < beta g,  g = x^{1/p} y^{1/q};
/// the classification chart is (x1, x2, x3) = (x, z, y).
class ConeSpec {
 public:
  static ConeSpec exp_cone();
  static ConeSpec orthant();
  static ConeSpec family3(double p);
  static ConeSpec family4(double p, double alpha);
  static ConeSpec family5(double p);

  ConeKind kind() const { return kind_; }
  bool is_power() const { return kind_ != ConeKind::ExpCone; }
  /// Exponents; the orthant carries p = 2, which it does not depend on.
  const PowerParams& params() const { return params_; }
  /// Family4's alpha as given by the caller (1 for the other families).
  double family_alpha() const { return family_alpha_; }
  /// Chart bounds: the cone is -chart_alpha g < z < chart_beta g.
  double chart_alpha() const { return chart_alpha_; }
  double chart_beta() const { return chart_beta_; }

  Vec3 to_theorem_chart(const Vec3& v) const;
  Vec3 from_theorem_chart(const Vec3& v) const;

  /// Short label such as "family4(p=2,alpha=0.5)".
  std::string name() const;
  /// Family keyword: exp, orthant, family3, family4, family5.
  std::string family() const;

 private:
  ConeSpec(ConeKind kind, PowerParams params, double family_alpha, double chart_alpha, double chart_beta);

  ConeKind kind_;
  PowerParams params_;
  double family_alpha_;
  double chart_alpha_;
  double chart_beta_;
};

enum class Region { Interior, Boundary, Outside };

const char* to_string(Region r);

/// Classifies `point` against the closed cone. `tol` is relative to the largest
/// coordinate magnitude.
Region membership(const ConeSpec& spec, const Vec3& point, double tol = 1e-12);

enum class CanonicalCase { Nilpotent3, Nilpotent2, MixedJordan, Diagonal, Rotational };

const char* to_string(CanonicalCase c);
int case_number(CanonicalCase c);

/// Normal form of a generator: canonical = S^{-1} (scale A + shift I) S.
struct CanonicalForm {
  CanonicalCase kind = CanonicalCase::Nilpotent3;
  double mu = 0.0;  // Diagonal and Rotational only
  double scale = 1.0;
  double shift = 0.0;
  Mat3 basis = Mat3::Identity();
  Mat3 canonical = Mat3::Zero();
};

/// The canonical matrix for a case, e.g. diag(1, -mu, mu - 1) for Diagonal.
Mat3 canonical_matrix(CanonicalCase kind, double mu = 0.0);

struct CanonicalizeOptions {
  double scalar_tol = 1e-10;      // relative distance to the nearest multiple of I
  double repeated_tol = 1e-8;     // normalized discriminant below this: repeated eigenvalue
  double ambiguous_tol = 1e-6;    // between repeated_tol and this: Degenerate
};

/// Reduces a 3x3 generator to one of five normal forms.
/// Throws ScalarMatrix or Degenerate (detail() holds the offending gap).
CanonicalForm canonicalize_generator(const Mat3& A, const CanonicalizeOptions& opts = {});

}  // namespace affsphere
