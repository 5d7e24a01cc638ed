#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hyperstab/controller.hpp"
#include "hyperstab/disturbance.hpp"
#include "hyperstab/sigma_dynamics.hpp"
#include "hyperstab/trajectory.hpp"

namespace hyperstab {

/// Implicit Euler closed loop in sigma coordinates, solved through the closed-form resolvent.
class DtSystem {
 public:
  /// Requires m == n and h > 0.
  DtSystem(const ControllerSpec& spec, double h, SynthesisOptions options = {});

  const ControllerSpec& spec() const { return ctrl_.spec; }
  const SynthesizedController& controller() const { return ctrl_; }
  const SigmaSystem& sigma_system() const { return sys_; }
  int n() const { return ctrl_.n(); }
  double h() const { return h_; }
  double time(long long k) const { return h_ * static_cast<double>(k); }

  /// rho_i = 1 + h lambda_i psi^i at the effective gain.
  Eigen::VectorXd rho(double t) const;
  /// (I - h M(t))^{-1}; Z_ij = h^{j-i} / (rho_i ... rho_j) for j >= i.
  Eigen::MatrixXd resolvent(double t) const;
  Eigen::MatrixXd S_at(double t) const;
  Eigen::MatrixXd L_at(double t) const;

  /// zeta_{k+1} = Z(t_{k+1}) (zeta_k + h L(t_{k+1}) d_{k+1}).
  Eigen::VectorXd sigma_step(const Eigen::VectorXd& zeta, long long k, const Eigen::VectorXd& d_next) const;
  /// xi_{k+1} = S^{-1} Z (S xi_k + h L d_{k+1}), all at t_{k+1}.
  Eigen::VectorXd state_step(const Eigen::VectorXd& xi, long long k, const Eigen::VectorXd& d_next) const;

 private:
  SynthesizedController ctrl_;
  SigmaSystem sys_;
  double h_;
};

/// Records every step k = 0..round(t_final / h); u is the synthesized law at (t_k, xi_k).
Trajectory simulate_dt(const DtSystem& sys, const DisturbanceSpec& dist, const Eigen::VectorXd& x0, double t_final);

/// Per-step ratios ||zeta_{k+1}|| / ||zeta_k|| for the disturbance-free sigma recursion.
/// The iterate is renormalized every step so the ratios survive underflow of zeta itself.
std::vector<double> dt_contraction_ratios(const DtSystem& sys, const Eigen::VectorXd& zeta0, long long steps);

struct LimitReport {
  Eigen::MatrixXd SZS;  // S^{-1} Z S
  Eigen::MatrixXd SZL;  // S^{-1} Z L
  Eigen::MatrixXd N;    // nilpotent limit
  double dev_SZS = 0.0;
  double dev_SZL = 0.0;
};

/// -(1/h^{n-1}) times the strictly lower Toeplitz matrix with subdiagonals h^{n-2}, ..., h, 1.
Eigen::MatrixXd nilpotent_limit(int n, double h);
/// Entrywise |P - N| / |N| on the support of N, |P| / max|N| elsewhere (|P| when N = 0).
double limit_deviation(const Eigen::MatrixXd& P, const Eigen::MatrixXd& N);
LimitReport limit_matrices(const DtSystem& sys, double t_probe = 1e4);

struct ScalarDtResult {
  std::vector<double> x;      // x_0..x_K
  std::vector<double> bound;  // bound at k = 0..K (k = 0 entry is |x0|)
  double d_norm = 0.0;
  double max_violation = 0.0;
};

/// x_{k+1} = (x_k + d_k) / (1 + k) against |x0|/k! + (||d||/k) sum_{i=1..k} 2^{-(i-2)}.
ScalarDtResult scalar_dt_demo(double x0, const std::vector<double>& d, int K);

}  // namespace hyperstab
