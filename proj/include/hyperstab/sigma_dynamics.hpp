#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hyperstab/controller.hpp"

namespace hyperstab {

/// Closed loop in sigma coordinates: sigma' = M(psi) sigma + L(psi) d.
struct SigmaSystem {
  int n = 0;
  std::vector<double> lambda;
  int m = 0;
  GainSchedule schedule = GainSchedule::affine();
  /// Upper bidiagonal: -lambda_i psi^i (last: -lambda_n psi^m), ones above.
  PolyMatrix M;
  /// Unit lower triangular disturbance gains.
  PolyMatrix L;

  Eigen::MatrixXd M_at(double t) const { return M.eval(schedule.value(t)); }
  Eigen::MatrixXd L_at(double t) const { return L.eval(schedule.value(t)); }
};

/// Largest residual coefficient tolerated by the build-time self check.
inline constexpr double kSigmaResidualTol = 1e-9;

SigmaSystem build_sigma_system(const SynthesizedController& c);
SigmaSystem build_sigma_system(const ControllerSpec& spec, SynthesisOptions options = {});

Eigen::VectorXd sigma_rhs(const SigmaSystem& sys, double t, const Eigen::VectorXd& sigma,
                          const Eigen::VectorXd& d);

}  // namespace hyperstab
