#pragma once

#include <Eigen/Dense>

namespace affsphere {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// phi and its first two derivatives at t.
struct PhiJet {
  double t = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;
  double phi_ddot = 0.0;
};

/// Value, gradient and Hessian of a potential at one point.
struct PotentialJet {
  double F = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

}  // namespace affsphere
