#include "hyperstab/ct_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hyperstab {

namespace {

std::string stiffness_message(double t, double h) {
  std::ostringstream os;
  os << "step size " << h << " below floor at t = " << t << "; the gain is too large for explicit stepping";
  return os.str();
}

// Record grid k * record_dt, plus t_final when it is off the grid.
std::vector<double> record_grid(double t_final, double record_dt) {
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  if (!(record_dt > 0.0)) throw std::invalid_argument("record_dt must be positive");
  std::vector<double> g;
  const auto k_max = static_cast<long long>(std::floor(t_final / record_dt + 1e-9));
  for (long long k = 0; k <= k_max; ++k) g.push_back(std::min(static_cast<double>(k) * record_dt, t_final));
  if (t_final - g.back() > 1e-9 * record_dt) g.push_back(t_final);
  return g;
}

// Drives one RK4 integration across a record grid; rhs(t, x, out) fills x'.
template <class Rhs, class StepLaw, class Record>
void integrate(Eigen::VectorXd x, const std::vector<double>& grid, Rhs&& rhs, StepLaw&& step_law, Record&& record,
               const CtOptions& opt, TrajectoryMeta& meta) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = grid.front();
  record(t, x);
  meta.min_step = std::numeric_limits<double>::infinity();
  meta.max_step = 0.0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double target = grid[g];
    while (t < target) {
      double h = step_law(t);
      if (!(h >= opt.h_min)) throw StiffnessError(t, h);
      if (meta.steps >= opt.max_steps) {
        std::ostringstream os;
        os << "step budget of " << opt.max_steps << " exhausted at t = " << t << " (step " << h << ")";
        throw SimulationError(os.str());
      }
      bool lands = false;
      if (t + h >= target - 1e-12 * std::max(1.0, std::abs(target))) {
        h = target - t;
        lands = true;
      }
      rhs(t, x, k1);
      tmp = x + 0.5 * h * k1;
      rhs(t + 0.5 * h, tmp, k2);
      tmp = x + 0.5 * h * k2;
      rhs(t + 0.5 * h, tmp, k3);
      tmp = x + h * k3;
      rhs(t + h, tmp, k4);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = lands ? target : t + h;
      meta.steps += 1;
      meta.rhs_evals += 4;
      meta.min_step = std::min(meta.min_step, h);
      meta.max_step = std::max(meta.max_step, h);
      if (!x.allFinite()) {
        std::ostringstream os;
        os << "non-finite state at t = " << t;
        throw SimulationError(os.str());
      }
    }
    record(t, x);
  }
  if (meta.steps == 0) meta.min_step = 0.0;
}

}  // namespace

StiffnessError::StiffnessError(double t, double h) : std::runtime_error(stiffness_message(t, h)), t_(t), h_(h) {}

double ct_step_size(const ControllerSpec& spec, double t, const CtOptions& opt) {
  const double stiff = spec.lambda.back() * std::pow(spec.schedule.value(t), spec.m);
  return std::min(opt.h_max, opt.c_stab / stiff);
}

Trajectory simulate_ct(const SynthesizedController& c, const DisturbanceSpec& dist, const Eigen::VectorXd& x0,
                       double t_final, double record_dt, const CtOptions& opt) {
  const int n = c.n();
  if (x0.size() != n) throw std::invalid_argument("x0 has wrong dimension");
  if (dist.dim() != n) throw std::invalid_argument("disturbance has wrong number of channels");
  const std::vector<double> grid = record_grid(t_final, record_dt);

  Trajectory traj;
  traj.n = n;
  traj.reserve(grid.size());
  traj.meta.mode = "ct";
  traj.meta.seed = dist.seed;
  traj.meta.U = dist.U;
  traj.meta.disturbance_free = dist.is_zero();

  auto rhs = [&](double t, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    for (int i = 0; i + 1 < n; ++i) out(i) = x(i + 1);
    out(n - 1) = c.eval_control(t, x);
    out += dist.value(t);
  };
  auto step_law = [&](double t) { return ct_step_size(c.spec, t, opt); };
  auto record = [&](double t, const Eigen::VectorXd& x) {
    traj.push(t, x, c.eval_control(t, x), c.sigma_values(t, x), dist.value(t));
  };
  integrate(x0, grid, rhs, step_law, record, opt, traj.meta);
  return traj;
}

Trajectory simulate_ct(const ControllerSpec& spec, const DisturbanceSpec& dist, const Eigen::VectorXd& x0,
                       double t_final, double record_dt, bool force, const CtOptions& opt) {
  if (!force) {
    const GainReport r = validate_gains(spec);
    if (!r.passed()) throw GainConditionError("gain check failed: " + r.summary());
  }
  const SynthesizedController c = synthesize(spec, force ? SynthesisOptions::forced() : SynthesisOptions{});
  return simulate_ct(c, dist, x0, t_final, record_dt, opt);
}

ScalarDemoResult scalar_ct_demo(double x0, const ChannelSignal& d, double t_final, double record_dt,
                                std::uint64_t seed) {
  DisturbanceSpec dist;
  dist.channels = {d};
  dist.reseed(seed);
  const std::vector<double> grid = record_grid(t_final, record_dt);

  ScalarDemoResult res;
  res.d_norm = d.sup_bound();
  res.traj.n = 1;
  res.traj.meta.mode = "ct";
  res.traj.meta.seed = seed;
  res.traj.meta.U = dist.U;
  res.traj.meta.disturbance_free = d.is_zero();
  res.max_violation = -std::numeric_limits<double>::infinity();

  const CtOptions opt;
  auto rhs = [&](double t, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out(0) = -(1.0 + t) * x(0) + d.value(t, dist.U);
  };
  auto step_law = [&](double t) { return std::min(opt.h_max, opt.c_stab / (1.0 + t)); };
  auto record = [&](double t, const Eigen::VectorXd& x) {
    const double q = t * t / 2.0 + t;
    const double b = std::exp(-q) * std::abs(x0) + 2.0 * res.d_norm / (1.0 + q);
    Eigen::VectorXd dv(1);
    dv(0) = d.value(t, dist.U);
    res.traj.push(t, x, 0.0, x, dv);
    res.bound.push_back(b);
    res.max_violation = std::max(res.max_violation, std::abs(x(0)) - b);
  };
  Eigen::VectorXd x(1);
  x(0) = x0;
  integrate(x, grid, rhs, step_law, record, opt, res.traj.meta);
  return res;
}

}  // namespace hyperstab
