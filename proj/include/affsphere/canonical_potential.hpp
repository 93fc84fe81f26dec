#pragma once

#include "affsphere/cone_model.hpp"
#include "affsphere/phi_solution.hpp"
#include "affsphere/types.hpp"

namespace affsphere {

/// The canonical potential F of one cone, evaluated from its phi(t) solution.
class CanonicalPotential {
 public:
  explicit CanonicalPotential(const ConeSpec& spec, const SolverOptions& opts = {});
  explicit CanonicalPotential(PhiSolution phi);

  const ConeSpec& spec() const { return phi_.spec(); }
  const PhiSolution& phi() const { return phi_; }

  /// Reduced variable t of a point (no membership check).
  double t_of(const Vec3& point) const;
  /// Throws OutsideCone unless the point is interior.
  PotentialJet jet(const Vec3& point) const;
  PotentialJet jet(const Vec3& point, PhiJet& phi_jet) const;
  double value(const Vec3& point) const;

  /// One-parameter unimodular automorphism group preserving F.
  Vec3 automorphism(const Vec3& point, double s) const;

  /// Point of the level set F = 0 at curve parameter `param` and second
  /// coordinate `mu` (the z-coordinate for the exponential cone).
  Vec3 immersion(double param, double mu) const;

 private:
  PhiSolution phi_;
};

}  // namespace affsphere
