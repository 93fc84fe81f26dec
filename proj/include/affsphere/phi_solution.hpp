#pragma once

#include <memory>
#include <string>

#include "affsphere/branch_solver.hpp"
#include "affsphere/cone_model.hpp"
#include "affsphere/types.hpp"

namespace affsphere {

struct SolverOptions {
  int table_nodes = 2048;
  EllipticOptions elliptic;
};

/// phi(t) on the family's open t-interval, backed by a parametric curve and a
/// monotone inversion table. Immutable after construction; copies share state.
class PhiSolution {
 public:
  explicit PhiSolution(const ConeSpec& spec, const SolverOptions& opts = {});

  const ConeSpec& spec() const;
  const BranchData& branch() const;
  /// Open t-domain (lower may be -inf, upper may be +inf).
  double lower() const;
  double upper() const;
  bool contains(double t) const { return t > lower() && t < upper(); }

  PhiJet at(double t) const;
  double value(double t) const { return at(t).phi; }
  double derivative(double t) const { return at(t).phi_dot; }
  double second_derivative(double t) const { return at(t).phi_ddot; }

  /// Curve parameter: zeta (c = 0 and elliptic), xi (extreme curves),
  /// kappa (exponential cone) or t itself (orthant).
  std::string param_name() const;
  double param_lower() const;
  double param_upper() const;
  CurvePoint point(double param) const;
  double param_of_t(double t) const;

  /// Non-null for Family4 with alpha < 1.
  const EllipticBranch* elliptic() const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

PhiSolution phi_solution(const ConeSpec& spec, const SolverOptions& opts = {});

}  // namespace affsphere
