#include "hyperstab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace hyperstab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

std::string join_doubles(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + format_double(v[i]);
  return s;
}

std::pair<double, double> tail_window(const Trajectory& traj) {
  const double t0 = traj.times.front(), t1 = traj.times.back();
  return {std::max(t0, t1 - 2.0), t1};
}

ordered_json stats_json(const Trajectory& traj) {
  ordered_json s;
  s["records"] = traj.size();
  s["steps"] = traj.meta.steps;
  s["rhs_evals"] = traj.meta.rhs_evals;
  s["min_step"] = traj.meta.min_step;
  s["max_step"] = traj.meta.max_step;
  return s;
}

SynthesisOptions options_for(bool force) { return force ? SynthesisOptions::forced() : SynthesisOptions{}; }

}  // namespace

ExperimentConfig canonical_dt_config(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.mode = SimMode::Dt;
  cfg.controller.n = 3;
  cfg.controller.lambda = {1.0, 1.0, 1.0};
  cfg.controller.m = 3;
  cfg.controller.schedule = GainSchedule::affine();
  cfg.disturbance = DisturbanceSpec::zero(3);
  cfg.disturbance.channels[0] = parse_channel("sin(5*t)");
  cfg.disturbance.channels[1] = parse_channel("sin(7*t)");
  cfg.disturbance.channels[2] = parse_channel("cos(3*t) - rnd");
  cfg.disturbance.reseed(seed);
  cfg.h = 1e-3;
  cfg.t_final = 10.0;
  cfg.x0 = Eigen::Vector3d(1.0, 1.0, 1.0);
  cfg.output_dir = "out";
  cfg.verify_tol.assign(kCanonicalResidualTol.begin(), kCanonicalResidualTol.end());
  return cfg;
}

Trajectory simulate(const ExperimentConfig& cfg, bool force) {
  cfg.validate();
  if (!force) {
    const GainReport r = validate_gains(cfg.controller);
    if (!r.passed()) throw GainConditionError("gain check failed: " + r.summary() + " (use --force to override)");
  }
  if (cfg.mode == SimMode::Dt) {
    const DtSystem sys(cfg.controller, cfg.h, options_for(force));
    return simulate_dt(sys, cfg.disturbance, cfg.x0, cfg.t_final);
  }
  const SynthesizedController c = synthesize(cfg.controller, options_for(force));
  return simulate_ct(c, cfg.disturbance, cfg.x0, cfg.t_final, cfg.record_dt);
}

std::string fingerprint(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BoundednessReport boundedness(const Trajectory& traj) {
  BoundednessReport b;
  if (traj.empty()) return b;
  const double t0 = traj.times.front(), t1 = traj.times.back();
  const double mid = 0.5 * (t0 + t1);
  const double tail = t1 - 0.2 * (t1 - t0);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double nx = traj.states[k].cwiseAbs().maxCoeff();
    const double nu = std::abs(traj.controls[k]);
    if (!std::isfinite(nx) || !std::isfinite(nu)) b.finite = false;
    b.sup_x = std::max(b.sup_x, nx);
    b.sup_u = std::max(b.sup_u, nu);
    if (traj.times[k] <= mid)
      b.sup_x_first_half = std::max(b.sup_x_first_half, nx);
    else
      b.sup_x_second_half = std::max(b.sup_x_second_half, nx);
    if (traj.times[k] >= tail) b.tail_x1 = std::max(b.tail_x1, std::abs(traj.states[k](0)));
  }
  return b;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool force) {
  RunResult res;
  res.gains = validate_gains(cfg.controller);
  res.traj = simulate(cfg, force);
  const std::string config_text = to_config_text(cfg);
  res.traj.meta.spec_hash = fingerprint(config_text);

  res.tail_window = tail_window(res.traj);
  res.tail_residuals = steady_state_residuals(res.traj, cfg.disturbance, res.tail_window);
  const BoundednessReport b = boundedness(res.traj);
  res.passed = b.finite;
  for (std::size_t i = 0; i < cfg.verify_tol.size() && i < res.tail_residuals.size(); ++i)
    if (!(res.tail_residuals[i] <= cfg.verify_tol[i])) res.passed = false;

  fs::create_directories(out_dir);
  write_csv((fs::path(out_dir) / "trajectory.csv").string(), res.traj);

  std::ostringstream diag;
  diag << "quantity,window_start,window_end,value\n";
  const std::string w0 = format_double(res.tail_window.first), w1 = format_double(res.tail_window.second);
  for (std::size_t i = 0; i < res.tail_residuals.size(); ++i)
    diag << "residual" << i + 1 << ',' << w0 << ',' << w1 << ',' << format_double(res.tail_residuals[i]) << '\n';
  const std::string r0 = format_double(res.traj.times.front());
  diag << "sup_norm_x," << r0 << ',' << w1 << ',' << format_double(b.sup_x) << '\n';
  diag << "sup_abs_u," << r0 << ',' << w1 << ',' << format_double(b.sup_u) << '\n';
  if (res.traj.meta.disturbance_free && cfg.controller.schedule.kind() == GainSchedule::Kind::AffineTime &&
      res.traj.times.back() > 1.0) {
    const double l1 = cfg.controller.lambda.front();
    const EnvelopeReport e = envelope_check(res.traj, 0, EnvelopeSpec{l1, l1 / 2.0, 1.0}, 1.0);
    diag << "envelope_margin_x1,1," << w1 << ',' << format_double(e.margin) << '\n';
  }
  write_text(fs::path(out_dir) / "diagnostics.csv", diag.str());

  ordered_json m;
  m["tool"] = "hyperstab";
  m["version"] = kVersion;
  m["mode"] = to_string(cfg.mode);
  m["config"] = config_text;
  m["config_fingerprint"] = res.traj.meta.spec_hash;
  m["seed"] = cfg.disturbance.seed;
  m["uniform_draw"] = cfg.disturbance.U;
  m["forced"] = force;
  m["gain_check"] = res.gains.summary();
  m["stats"] = stats_json(res.traj);
  m["files"] = {"trajectory.csv", "diagnostics.csv"};
  m["passed"] = res.passed;
  res.manifest = m.dump(2) + "\n";
  write_text(fs::path(out_dir) / "manifest.json", res.manifest);
  return res;
}

FigureData reproduce_figures(const std::string& out_dir, std::uint64_t seed, double t_final) {
  ExperimentConfig cfg = canonical_dt_config(seed);
  cfg.t_final = t_final;
  FigureData fd{simulate(cfg, true), cfg.disturbance};
  fs::create_directories(out_dir);

  std::ostringstream f1, f2;
  f1 << kFig1Header << '\n';
  f2 << kFig2Header << '\n';
  auto lg = [](double v) { return std::max(-16.0, std::log10(std::max(std::abs(v), 1e-300))); };
  for (std::size_t k = 0; k < fd.traj.size(); ++k) {
    const double t = fd.traj.times[k];
    const Eigen::VectorXd& x = fd.traj.states[k];
    const double d1 = fd.dist.derivative(0, 0, t), d1dot = fd.dist.derivative(0, 1, t);
    const double d2 = fd.dist.derivative(1, 0, t);
    f1 << format_double(t) << ',' << format_double(x(0)) << ',' << format_double(x(1)) << ',' << format_double(-d1)
       << ',' << format_double(x(2)) << ',' << format_double(-d2 - d1dot) << '\n';
    f2 << format_double(t) << ',' << format_double(lg(x(0))) << ',' << format_double(lg(x(1) + d1)) << ','
       << format_double(lg(x(2) + d2 + d1dot)) << '\n';
  }
  write_text(fs::path(out_dir) / "fig1.csv", f1.str());
  write_text(fs::path(out_dir) / "fig2.csv", f2.str());
  return fd;
}

double ct_dt_error(const ControllerSpec& spec, const DisturbanceSpec& dist, const Eigen::VectorXd& x0, double h,
                   double t_final) {
  const DtSystem sys(spec, h, SynthesisOptions::forced());
  const Trajectory dt = simulate_dt(sys, dist, x0, t_final);
  const SynthesizedController c = synthesize(spec, SynthesisOptions::forced());
  const Trajectory ct = simulate_ct(c, dist, x0, dt.times.back(), h);
  if (ct.size() != dt.size()) throw std::logic_error("ct and dt grids differ");
  double err = 0.0;
  for (std::size_t k = 0; k < dt.size(); ++k) {
    if (std::abs(ct.times[k] - dt.times[k]) > 1e-9 * std::max(1.0, dt.times[k]))
      throw std::logic_error("ct and dt grids differ");
    err = std::max(err, (dt.states[k] - ct.states[k]).cwiseAbs().maxCoeff());
  }
  return err;
}

std::vector<SweepCell> sweep(const ExperimentConfig& cfg, const std::string& out_dir, int workers) {
  cfg.validate();
  std::vector<std::vector<double>> lambdas;
  if (cfg.sweep_lambda_ratio.empty()) {
    lambdas.push_back(cfg.controller.lambda);
  } else {
    for (double r : cfg.sweep_lambda_ratio) {
      std::vector<double> l{cfg.controller.lambda.front()};
      for (int i = 1; i < cfg.controller.n; ++i) l.push_back(l.back() * r);
      lambdas.push_back(l);
    }
  }
  std::vector<std::optional<double>> caps = cfg.sweep_cap;
  if (caps.empty()) caps.push_back(cfg.controller.schedule.cap());
  std::vector<double> hs = cfg.sweep_h;
  const bool consistency = !hs.empty();
  if (hs.empty()) hs.push_back(cfg.h);

  std::vector<SweepCell> cells;
  for (const auto& l : lambdas)
    for (const auto& cap : caps)
      for (double h : hs) {
        SweepCell c;
        c.index = static_cast<int>(cells.size());
        c.lambda = l;
        c.cap = cap;
        c.h = h;
        cells.push_back(c);
      }

  fs::create_directories(out_dir);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& c = cells[i];
      ExperimentConfig cc = cfg;
      cc.controller.lambda = c.lambda;
      cc.controller.schedule = c.cap ? cfg.controller.schedule.with_cap(*c.cap) : cfg.controller.schedule.without_cap();
      cc.h = c.h;
      cc.sweep_lambda_ratio.clear();
      cc.sweep_cap.clear();
      cc.sweep_h.clear();
      char name[32];
      std::snprintf(name, sizeof name, "cell_%03d", c.index);
      cc.output_dir = (fs::path(out_dir) / name).string();
      try {
        const RunResult r = run_experiment(cc, cc.output_dir, true);
        c.gain_summary = r.gains.summary();
        c.bounds = boundedness(r.traj);
        c.residuals = r.tail_residuals;
        if (consistency) c.ct_dt_error = ct_dt_error(cc.controller, cc.disturbance, cc.x0, c.h, cc.t_final);
        c.status = r.gains.passed() ? "ok" : "flagged";
        if (!r.passed) c.status = "error";
      } catch (const std::exception& e) {
        c.status = "error";
        c.message = e.what();
      }
    }
  };
  const int nw = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Ratios between successive h cells of the same (lambda, cap).
  if (consistency)
    for (std::size_t i = 1; i < cells.size(); ++i)
      if (i % hs.size() != 0 && cells[i - 1].ct_dt_error > 0.0)
        cells[i].error_ratio = cells[i].ct_dt_error / cells[i - 1].ct_dt_error;

  std::ostringstream os;
  os << kSweepHeader << '\n';
  for (const auto& c : cells) {
    std::string msg = c.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::string gs = c.gain_summary;
    std::replace(gs.begin(), gs.end(), ',', ' ');
    os << c.index << ',' << join_doubles(c.lambda, ';') << ',' << (c.cap ? format_double(*c.cap) : "none") << ','
       << format_double(c.h) << ',' << c.status << ',' << gs << ',' << format_double(c.bounds.sup_x) << ','
       << format_double(c.bounds.sup_u) << ',' << format_double(c.bounds.tail_x1) << ','
       << (c.bounds.stabilized(0.05) ? "yes" : "no") << ',' << join_doubles(c.residuals, ';') << ','
       << format_double(c.ct_dt_error) << ',' << format_double(c.error_ratio) << ',' << msg << '\n';
  }
  write_text(fs::path(out_dir) / "summary.csv", os.str());
  return cells;
}

std::vector<std::pair<double, double>> lemma1_pairs(std::uint64_t seed, int count) {
  std::mt19937_64 gen(seed);
  auto unif = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53); };
  std::vector<std::pair<double, double>> out;
  while (static_cast<int>(out.size()) < count) {
    const double a = unif(0.2, 8.0), alpha = unif(0.1, 4.0);
    if (a * alpha > 1.0 + 1e-3) out.emplace_back(a, alpha);
  }
  return out;
}

VerifyOutcome verify_lemma1(const std::string& out_dir, std::uint64_t seed) {
  VerifyOutcome v{"lemma1", true, {}};
  std::vector<double> grid;
  for (int i = 0; i < 500; ++i) grid.push_back(50.0 * i / 499.0);
  std::ostringstream csv;
  csv << "a,alpha,r,max_violation,worst_tau,pass\n";
  ordered_json j;
  j["check"] = "lemma1";
  j["tolerance"] = 1e-9;
  j["cases"] = ordered_json::array();
  for (const auto& [a, alpha] : lemma1_pairs(seed, 20)) {
    const Lemma1Check c = lemma1_check(a, alpha, grid);
    const bool ok = c.max_violation <= 1e-9;
    v.passed = v.passed && ok;
    csv << format_double(a) << ',' << format_double(alpha) << ',' << format_double(c.r) << ','
        << format_double(c.max_violation) << ',' << format_double(c.worst_tau) << ',' << (ok ? "yes" : "no") << '\n';
    j["cases"].push_back({{"a", a}, {"alpha", alpha}, {"r", c.r}, {"max_violation", c.max_violation}, {"pass", ok}});
  }
  j["passed"] = v.passed;
  v.report = j.dump(2) + "\n";
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "verify_lemma1.json", v.report);
  write_text(fs::path(out_dir) / "verify_lemma1_margins.csv", csv.str());
  return v;
}

DominationResult theorem2_domination(const std::array<double, 3>& lambda, int instances, std::uint64_t seed,
                                     double t_final, double record_dt) {
  DominationResult res;
  res.constants = theorem2_constants(lambda);
  res.skipped = res.constants.advisory;
  ControllerSpec spec;
  spec.n = 3;
  spec.lambda = {lambda[0], lambda[1], lambda[2]};
  spec.m = 4;
  spec.schedule = GainSchedule::affine();
  const SynthesizedController ctrl = synthesize(spec, SynthesisOptions::forced());

  std::mt19937_64 gen(seed);
  auto unif = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53); };
  res.passed = !res.skipped;
  for (int k = 0; k < instances; ++k) {
    DominationInstance inst;
    inst.x0 = Eigen::Vector3d(unif(-1, 1), unif(-1, 1), unif(-1, 1));
    DisturbanceSpec dist = DisturbanceSpec::zero(3);
    for (int i = 0; i < 3; ++i) {
      inst.amp[static_cast<std::size_t>(i)] = unif(-1, 1);
      dist.channels[static_cast<std::size_t>(i)].terms.push_back(
          SinusoidTerm{inst.amp[static_cast<std::size_t>(i)], unif(0.1, 10.0), unif(0.0, 6.283185307179586), false});
    }
    if (res.skipped) {
      inst.skipped = true;
      res.instances.push_back(inst);
      continue;
    }
    const Trajectory traj = simulate_ct(ctrl, dist, inst.x0, t_final, record_dt);
    const Eigen::VectorXd s0 = ctrl.sigma_values(0.0, inst.x0);
    Theorem2Inputs in{inst.x0(0), s0(1), s0(2), {std::abs(inst.amp[0]), std::abs(inst.amp[1]), std::abs(inst.amp[2])}};
    inst.worst_x1 = inst.worst_x2 = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < traj.size(); ++p) {
      const double t = traj.times[p];
      inst.worst_x1 = std::max(inst.worst_x1, std::abs(traj.states[p](0)) - theorem2_x1_bound(res.constants, t, in));
      inst.worst_x2 = std::max(inst.worst_x2, std::abs(traj.states[p](1)) - theorem2_x2_bound(res.constants, t, in));
    }
    if (inst.worst_x1 > 0.0 || inst.worst_x2 > 0.0) res.passed = false;
    res.instances.push_back(inst);
  }
  return res;
}

VerifyOutcome verify_bounds(const std::string& out_dir, const std::array<double, 3>& lambda, std::uint64_t seed,
                            int instances) {
  const DominationResult d = theorem2_domination(lambda, instances, seed);
  VerifyOutcome v{"bounds", d.passed, {}};
  ordered_json j;
  j["check"] = "bounds";
  j["lambda"] = lambda;
  j["skipped"] = d.skipped;
  j["inadmissible_constants"] = d.constants.inadmissible();
  ordered_json rc = ordered_json::array();
  for (const auto& c : d.constants.r)
    rc.push_back({{"label", c.label}, {"a", c.a}, {"alpha", c.alpha}, {"value", c.value}, {"admissible", c.admissible}});
  j["r_constants"] = rc;
  std::ostringstream csv;
  csv << "instance,x1_0,x2_0,x3_0,amp1,amp2,amp3,worst_x1_margin,worst_x2_margin,status\n";
  for (std::size_t k = 0; k < d.instances.size(); ++k) {
    const auto& in = d.instances[k];
    const char* status = in.skipped ? "skipped" : (in.worst_x1 <= 0.0 && in.worst_x2 <= 0.0 ? "pass" : "fail");
    csv << k << ',' << format_double(in.x0(0)) << ',' << format_double(in.x0(1)) << ',' << format_double(in.x0(2)) << ','
        << format_double(in.amp[0]) << ',' << format_double(in.amp[1]) << ',' << format_double(in.amp[2]) << ','
        << format_double(in.worst_x1) << ',' << format_double(in.worst_x2) << ',' << status << '\n';
  }
  j["passed"] = d.passed;
  v.report = j.dump(2) + "\n";
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "verify_bounds.json", v.report);
  write_text(fs::path(out_dir) / "verify_bounds_margins.csv", csv.str());
  return v;
}

VerifyOutcome verify_residuals(const ExperimentConfig& cfg, const std::string& out_dir, bool force) {
  const Trajectory traj = simulate(cfg, force);
  const double t1 = traj.times.back();
  VerifyOutcome v{"residuals", true, {}};
  ordered_json j;
  j["check"] = "residuals";
  j["config_fingerprint"] = fingerprint(to_config_text(cfg));
  j["windows"] = ordered_json::array();
  std::ostringstream csv;
  csv << "window_start,window_end";
  for (int i = 1; i <= traj.n; ++i) csv << ",residual" << i;
  csv << '\n';
  // Consecutive two-second windows; the last one is checked against verify.tol when given.
  std::vector<double> last;
  for (double ta = 0.0; ta + 2.0 <= t1 + 1e-9; ta += 2.0) {
    const double tb = std::min(ta + 2.0, t1);
    last = steady_state_residuals(traj, cfg.disturbance, {ta, tb});
    csv << format_double(ta) << ',' << format_double(tb) << ',' << join_doubles(last, ',') << '\n';
    j["windows"].push_back({{"start", ta}, {"end", tb}, {"residuals", last}});
  }
  if (last.empty()) {
    last = steady_state_residuals(traj, cfg.disturbance, {traj.times.front(), t1});
    csv << format_double(traj.times.front()) << ',' << format_double(t1) << ',' << join_doubles(last, ',') << '\n';
  }
  for (double r : last)
    if (!std::isfinite(r)) v.passed = false;
  for (std::size_t i = 0; i < cfg.verify_tol.size() && i < last.size(); ++i)
    if (!(last[i] <= cfg.verify_tol[i])) v.passed = false;
  j["tolerances"] = cfg.verify_tol;
  j["passed"] = v.passed;
  v.report = j.dump(2) + "\n";
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "verify_residuals.json", v.report);
  write_text(fs::path(out_dir) / "verify_residuals_margins.csv", csv.str());
  return v;
}

VerifyOutcome verify_limits(const ExperimentConfig& cfg, const std::string& out_dir, bool force) {
  ControllerSpec spec = cfg.controller;
  spec.m = spec.n;
  const DtSystem sys(spec, cfg.h, options_for(force));
  const LimitReport r = limit_matrices(sys, cfg.verify_t_probe);
  VerifyOutcome v{"limits", r.dev_SZS < 1e-3 && r.dev_SZL < 1e-3, {}};
  std::ostringstream csv;
  auto block = [&](const char* name, const Eigen::MatrixXd& m) {
    csv << "# " << name << '\n';
    for (int i = 0; i < m.rows(); ++i) {
      for (int k = 0; k < m.cols(); ++k) csv << (k ? "," : "") << format_double(m(i, k));
      csv << '\n';
    }
  };
  block("S^-1 Z S", r.SZS);
  block("S^-1 Z L", r.SZL);
  block("limit", r.N);
  ordered_json j;
  j["check"] = "limits";
  j["n"] = spec.n;
  j["h"] = cfg.h;
  j["t_probe"] = cfg.verify_t_probe;
  j["tolerance"] = 1e-3;
  j["deviation_SZS"] = r.dev_SZS;
  j["deviation_SZL"] = r.dev_SZL;
  j["passed"] = v.passed;
  v.report = j.dump(2) + "\n";
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "verify_limits.json", v.report);
  write_text(fs::path(out_dir) / "verify_limits.csv", csv.str());
  return v;
}

}  // namespace hyperstab
