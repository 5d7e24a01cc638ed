#include "hyperstab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "hyperstab/trajectory.hpp"

namespace hyperstab {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct Entry {
  int line;
  std::string value;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : e_(std::move(entries)) {}

  bool has(const std::string& key) const { return e_.count(key) != 0; }
  const Entry& at(const std::string& key) const { return e_.at(key); }

  std::string str(const std::string& key) const { return at(key).value; }

  double number(const std::string& key) const { return to_double(key, at(key).line, at(key).value); }

  std::int64_t integer(const std::string& key) const {
    const Entry& en = at(key);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(en.value.data(), en.value.data() + en.value.size(), v);
    if (ec != std::errc() || p != en.value.data() + en.value.size())
      throw ConfigError(en.line, key, "expected an integer, got '" + en.value + "'");
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key) const {
    const Entry& en = at(key);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(en.value.data(), en.value.data() + en.value.size(), v);
    if (ec != std::errc() || p != en.value.data() + en.value.size())
      throw ConfigError(en.line, key, "expected a nonnegative integer, got '" + en.value + "'");
    return v;
  }

  std::vector<std::string> items(const std::string& key) const {
    const Entry& en = at(key);
    const std::string& v = en.value;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
      throw ConfigError(en.line, key, "expected an array like [a, b]");
    std::vector<std::string> out;
    const std::string body = trim(std::string_view(v).substr(1, v.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : items(key)) out.push_back(to_double(key, at(key).line, s));
    return out;
  }

  static double to_double(const std::string& key, int line, const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ConfigError(line, key, "expected a number, got '" + s + "'");
    return v;
  }

 private:
  std::map<std::string, Entry> e_;
};

const char* const kKnownKeys[] = {
    "mode",        "controller.n", "controller.lambda", "controller.m",       "gain.kind",  "gain.a",
    "gain.alpha",  "gain.cap",     "disturbance.seed",  "sim.h",              "sim.record_dt", "sim.t_final",
    "sim.x0",      "output.dir",   "sweep.lambda_ratio", "sweep.cap",         "sweep.h",    "verify.tol",
    "verify.t_probe",
};

bool known_key(const std::string& k) {
  for (const char* kk : kKnownKeys)
    if (k == kk) return true;
  if (k.rfind("disturbance.d", 0) == 0 && k.size() > 13) {
    for (std::size_t i = 13; i < k.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(k[i]))) return false;
    return true;
  }
  return false;
}

std::string join(const std::vector<std::string>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s + "]";
}

std::string join_numbers(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(format_double(x));
  return join(s);
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? "" : field + ": ") + what),
      line_(line),
      field_(std::move(field)),
      detail_(what) {}

std::string to_string(SimMode m) { return m == SimMode::Ct ? "ct" : "dt"; }

void ExperimentConfig::validate() const {
  const int n = controller.n;
  if (n < 1) throw ConfigError(0, "controller.n", "must be >= 1");
  if (static_cast<int>(controller.lambda.size()) != n)
    throw ConfigError(0, "controller.lambda", "expected " + std::to_string(n) + " gains");
  if (x0.size() != n) throw ConfigError(0, "sim.x0", "expected " + std::to_string(n) + " entries");
  if (disturbance.dim() != n) throw ConfigError(0, "disturbance", "channel count does not match controller.n");
  if (!(t_final > 0.0)) throw ConfigError(0, "sim.t_final", "must be positive");
  if (!(h > 0.0)) throw ConfigError(0, "sim.h", "must be positive");
  if (!(record_dt > 0.0)) throw ConfigError(0, "sim.record_dt", "must be positive");
  if (mode == SimMode::Dt && controller.m != n) throw ConfigError(0, "controller.m", "dt mode requires m == n");
  for (double r : sweep_lambda_ratio)
    if (!(r > 0.0)) throw ConfigError(0, "sweep.lambda_ratio", "ratios must be positive");
  for (double v : sweep_h)
    if (!(v > 0.0)) throw ConfigError(0, "sweep.h", "steps must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!known_key(key)) throw ConfigError(line_no, key, "unknown key");
    if (value.empty()) throw ConfigError(line_no, key, "missing value");
    if (!entries.emplace(key, Entry{line_no, value}).second) throw ConfigError(line_no, key, "duplicate key");
  }
  const Reader r(std::move(entries));

  ExperimentConfig cfg;
  if (r.has("mode")) {
    const std::string m = r.str("mode");
    if (m == "ct")
      cfg.mode = SimMode::Ct;
    else if (m == "dt")
      cfg.mode = SimMode::Dt;
    else
      throw ConfigError(r.at("mode").line, "mode", "expected ct or dt");
  }
  if (r.has("controller.n")) cfg.controller.n = static_cast<int>(r.integer("controller.n"));
  const int n = cfg.controller.n;
  if (n < 1) throw ConfigError(r.at("controller.n").line, "controller.n", "must be >= 1");
  cfg.controller.lambda = r.has("controller.lambda") ? r.numbers("controller.lambda")
                                                     : std::vector<double>(static_cast<std::size_t>(n), 1.0);
  if (static_cast<int>(cfg.controller.lambda.size()) != n)
    throw ConfigError(r.has("controller.lambda") ? r.at("controller.lambda").line : 0, "controller.lambda",
                      "expected " + std::to_string(n) + " gains");
  cfg.controller.m = r.has("controller.m") ? static_cast<int>(r.integer("controller.m")) : n;

  GainSchedule g = GainSchedule::affine();
  if (r.has("gain.kind")) {
    const std::string k = r.str("gain.kind");
    if (k == "exp" || k == "exponential") {
      if (!r.has("gain.a") || !r.has("gain.alpha"))
        throw ConfigError(r.at("gain.kind").line, "gain.kind", "exponential gain needs gain.a and gain.alpha");
      try {
        g = GainSchedule::exponential(r.number("gain.a"), r.number("gain.alpha"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(r.at("gain.a").line, "gain.a", e.what());
      }
    } else if (k != "affine") {
      throw ConfigError(r.at("gain.kind").line, "gain.kind", "expected affine or exp");
    }
  }
  if (r.has("gain.cap") && r.str("gain.cap") != "none") {
    const double cap = r.number("gain.cap");
    if (!(cap > 0.0)) throw ConfigError(r.at("gain.cap").line, "gain.cap", "must be positive");
    g = g.with_cap(cap);
  }
  cfg.controller.schedule = g;

  cfg.disturbance = DisturbanceSpec::zero(n);
  for (int i = 1; i <= n; ++i) {
    const std::string key = "disturbance.d" + std::to_string(i);
    if (!r.has(key)) continue;
    try {
      cfg.disturbance.channels[static_cast<std::size_t>(i) - 1] = parse_channel(r.str(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.at(key).line, key, e.what());
    }
  }
  for (int i = n + 1; i <= n + 64; ++i) {
    const std::string key = "disturbance.d" + std::to_string(i);
    if (r.has(key)) throw ConfigError(r.at(key).line, key, "channel beyond controller.n");
  }
  cfg.disturbance.reseed(r.has("disturbance.seed") ? r.unsigned_integer("disturbance.seed") : 0);

  if (r.has("sim.h")) cfg.h = r.number("sim.h");
  if (r.has("sim.record_dt")) cfg.record_dt = r.number("sim.record_dt");
  if (r.has("sim.t_final")) cfg.t_final = r.number("sim.t_final");
  if (r.has("sim.x0")) {
    const auto v = r.numbers("sim.x0");
    if (static_cast<int>(v.size()) != n)
      throw ConfigError(r.at("sim.x0").line, "sim.x0", "expected " + std::to_string(n) + " entries");
    cfg.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  } else {
    cfg.x0 = Eigen::VectorXd::Zero(n);
  }
  if (r.has("output.dir")) cfg.output_dir = r.str("output.dir");

  if (r.has("sweep.lambda_ratio")) cfg.sweep_lambda_ratio = r.numbers("sweep.lambda_ratio");
  if (r.has("sweep.cap"))
    for (const auto& s : r.items("sweep.cap"))
      cfg.sweep_cap.push_back(s == "none" ? std::nullopt
                                          : std::optional<double>(Reader::to_double("sweep.cap", r.at("sweep.cap").line, s)));
  if (r.has("sweep.h")) cfg.sweep_h = r.numbers("sweep.h");
  if (r.has("verify.tol")) cfg.verify_tol = r.numbers("verify.tol");
  if (r.has("verify.t_probe")) cfg.verify_t_probe = r.number("verify.t_probe");

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const std::string f = e.field();
    const int line = (f.rfind("disturbance", 0) != 0 && r.has(f)) ? r.at(f).line : 0;
    throw ConfigError(line, f, e.detail());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "", "cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const ControllerSpec& c = cfg.controller;
  os << "mode = " << to_string(cfg.mode) << '\n';
  os << "controller.n = " << c.n << '\n';
  os << "controller.lambda = " << join_numbers(c.lambda) << '\n';
  os << "controller.m = " << c.m << '\n';
  if (c.schedule.kind() == GainSchedule::Kind::AffineTime) {
    os << "gain.kind = affine\n";
  } else {
    os << "gain.kind = exp\n";
    os << "gain.a = " << format_double(c.schedule.a()) << '\n';
    os << "gain.alpha = " << format_double(c.schedule.alpha()) << '\n';
  }
  os << "gain.cap = " << (c.schedule.cap() ? format_double(*c.schedule.cap()) : "none") << '\n';
  os << "disturbance.seed = " << cfg.disturbance.seed << '\n';
  for (int i = 0; i < cfg.disturbance.dim(); ++i)
    os << "disturbance.d" << i + 1 << " = " << to_string(cfg.disturbance.channels[static_cast<std::size_t>(i)])
       << '\n';
  os << "sim.h = " << format_double(cfg.h) << '\n';
  os << "sim.record_dt = " << format_double(cfg.record_dt) << '\n';
  os << "sim.t_final = " << format_double(cfg.t_final) << '\n';
  os << "sim.x0 = " << join_numbers(std::vector<double>(cfg.x0.data(), cfg.x0.data() + cfg.x0.size())) << '\n';
  os << "output.dir = " << cfg.output_dir << '\n';
  if (!cfg.sweep_lambda_ratio.empty()) os << "sweep.lambda_ratio = " << join_numbers(cfg.sweep_lambda_ratio) << '\n';
  if (!cfg.sweep_cap.empty()) {
    std::vector<std::string> s;
    for (const auto& v : cfg.sweep_cap) s.push_back(v ? format_double(*v) : "none");
    os << "sweep.cap = " << join(s) << '\n';
  }
  if (!cfg.sweep_h.empty()) os << "sweep.h = " << join_numbers(cfg.sweep_h) << '\n';
  if (!cfg.verify_tol.empty()) os << "verify.tol = " << join_numbers(cfg.verify_tol) << '\n';
  os << "verify.t_probe = " << format_double(cfg.verify_t_probe) << '\n';
  return os.str();
}

}  // namespace hyperstab
