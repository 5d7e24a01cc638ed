#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperstab/analysis.hpp"
#include "hyperstab/config.hpp"
#include "hyperstab/controller.hpp"
#include "hyperstab/ct_sim.hpp"
#include "hyperstab/dt_sim.hpp"
#include "hyperstab/trajectory.hpp"

namespace hyperstab {

inline constexpr const char* kVersion = "0.1.0";

/// Tail-window [t_final - 2, t_final] residual tolerances of the canonical run: 1.05x a reference
/// run at h = 5e-4 over [8, 10].
inline constexpr std::array<double, 3> kCanonicalResidualTol{0.11159, 0.56038, 2.9112};

/// Third-order dt run with unit gains, h = 1e-3, x0 = (1, 1, 1), t in [0, 10] and
/// d = (sin 5t, sin 7t, cos 3t - rnd).
ExperimentConfig canonical_dt_config(std::uint64_t seed = 42);

/// Simulates cfg in its configured mode. Without force, gains must pass validate_gains.
Trajectory simulate(const ExperimentConfig& cfg, bool force = false);

/// 64-bit FNV-1a, used to fingerprint config text in manifests.
std::string fingerprint(const std::string& text);

/// Sup norms over the whole run and over each half of the horizon.
struct BoundednessReport {
  double sup_x = 0.0;
  double sup_u = 0.0;
  double sup_x_first_half = 0.0;
  double sup_x_second_half = 0.0;
  double tail_x1 = 0.0;  // sup |x1| over the last fifth of the horizon
  bool finite = true;
  /// Running max of ||x|| did not grow over the final half (relative slack rel_tol).
  bool stabilized(double rel_tol) const { return finite && sup_x_second_half <= sup_x_first_half * (1.0 + rel_tol); }
};
BoundednessReport boundedness(const Trajectory& traj);

struct RunResult {
  Trajectory traj;
  GainReport gains;
  std::vector<double> tail_residuals;
  std::pair<double, double> tail_window;
  bool passed = false;
  std::string manifest;  // JSON text
};

/// Writes trajectory.csv, manifest.json and diagnostics.csv under out_dir.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool force = false);

struct FigureData {
  Trajectory traj;
  DisturbanceSpec dist;
};
/// Runs the canonical dt experiment and writes fig1.csv / fig2.csv. log10 columns are clamped at -16.
FigureData reproduce_figures(const std::string& out_dir, std::uint64_t seed = 42, double t_final = 10.0);
inline constexpr const char* kFig1Header = "t,xi1,xi2,minus_d1,xi3,minus_d2_minus_d1dot";
inline constexpr const char* kFig2Header = "t,log10_abs_xi1,log10_abs_xi2_plus_d1,log10_abs_xi3_plus_d2_plus_d1dot";

/// Max over the dt grid of ||xi_k - x(t_k)||_inf against an RK4 reference on the same grid.
double ct_dt_error(const ControllerSpec& spec, const DisturbanceSpec& dist, const Eigen::VectorXd& x0, double h,
                   double t_final);

struct SweepCell {
  int index = 0;
  std::vector<double> lambda;
  std::optional<double> cap;
  double h = 0.0;
  std::string status;  // ok, flagged, error
  std::string gain_summary;
  BoundednessReport bounds;
  std::vector<double> residuals;
  double ct_dt_error = 0.0;      // only for sweep.h cells
  double error_ratio = 0.0;      // error / error of the previous h cell, 0 when undefined
  std::string message;
};

inline constexpr const char* kSweepHeader =
    "cell,lambda,cap,h,status,gain_check,sup_x,sup_u,tail_x1,stabilized,residuals,ct_dt_error,error_ratio,message";

/// Runs the grid spanned by sweep.lambda_ratio x sweep.cap x sweep.h on a pool of workers.
/// Each cell writes into out_dir/cell_NNN; failures are recorded and the sweep continues.
std::vector<SweepCell> sweep(const ExperimentConfig& cfg, const std::string& out_dir, int workers = 1);

struct VerifyOutcome {
  std::string name;
  bool passed = false;
  std::string report;  // JSON text
};

std::vector<std::pair<double, double>> lemma1_pairs(std::uint64_t seed, int count);
VerifyOutcome verify_lemma1(const std::string& out_dir, std::uint64_t seed = 7);

/// One randomized comparison of a simulated third-order run against the closed-form bounds.
struct DominationInstance {
  Eigen::VectorXd x0;
  std::array<double, 3> amp{};
  double worst_x1 = 0.0;  // max over grid of |x1| - bound
  double worst_x2 = 0.0;
  bool skipped = false;
};
struct DominationResult {
  Theorem2Constants constants;
  std::vector<DominationInstance> instances;
  bool skipped = false;
  bool passed = false;
};
/// psi = 1 + t, m = 4, x0 uniform in [-1, 1]^3 and d_i = A_i sin(w_i t + phi_i) with |A_i| <= 1.
DominationResult theorem2_domination(const std::array<double, 3>& lambda, int instances, std::uint64_t seed,
                                     double t_final = 8.0, double record_dt = 0.01);
VerifyOutcome verify_bounds(const std::string& out_dir, const std::array<double, 3>& lambda,
                            std::uint64_t seed = 11, int instances = 10);

VerifyOutcome verify_residuals(const ExperimentConfig& cfg, const std::string& out_dir, bool force = false);
VerifyOutcome verify_limits(const ExperimentConfig& cfg, const std::string& out_dir, bool force = false);

}  // namespace hyperstab
