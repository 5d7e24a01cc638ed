#include "hyperstab/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hyperstab {

void Trajectory::reserve(std::size_t k) {
  times.reserve(k);
  states.reserve(k);
  controls.reserve(k);
  sigmas.reserve(k);
  dists.reserve(k);
}

void Trajectory::push(double t, const Eigen::VectorXd& x, double u, const Eigen::VectorXd& sigma,
                      const Eigen::VectorXd& d) {
  times.push_back(t);
  states.push_back(x);
  controls.push_back(u);
  sigmas.push_back(sigma);
  dists.push_back(d);
}

std::size_t Trajectory::nearest(double t) const {
  if (times.empty()) throw std::out_of_range("empty trajectory");
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return times.size() - 1;
  std::size_t i = static_cast<std::size_t>(it - times.begin());
  if (i > 0 && t - times[i - 1] < *it - t) --i;
  return i;
}

void Trajectory::validate() const {
  const std::size_t k = times.size();
  if (states.size() != k || controls.size() != k || sigmas.size() != k || dists.size() != k)
    throw std::logic_error("trajectory columns have different lengths");
  for (std::size_t i = 0; i < k; ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) throw std::logic_error("trajectory times not strictly increasing");
    if (states[i].size() != n || sigmas[i].size() != n || dists[i].size() != n)
      throw std::logic_error("trajectory record has wrong dimension");
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header(int n) {
  std::string h = "t";
  for (int i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
  h += ",u";
  for (int i = 1; i <= n; ++i) h += ",sigma" + std::to_string(i);
  for (int i = 1; i <= n; ++i) h += ",d" + std::to_string(i);
  return h;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << csv_header(traj.n) << '\n';
  std::string line;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    line = format_double(traj.times[k]);
    for (int i = 0; i < traj.n; ++i) line += ',' + format_double(traj.states[k](i));
    line += ',' + format_double(traj.controls[k]);
    for (int i = 0; i < traj.n; ++i) line += ',' + format_double(traj.sigmas[k](i));
    for (int i = 0; i < traj.n; ++i) line += ',' + format_double(traj.dists[k](i));
    os << line << '\n';
  }
}

void write_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(f, traj);
}

Trajectory read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": missing header");
  const auto cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if ((cols - 2) % 3 != 0) throw std::runtime_error(path + ": unexpected column count");
  Trajectory traj;
  traj.n = (cols - 2) / 3;
  if (line != csv_header(traj.n)) throw std::runtime_error(path + ": header mismatch");
  std::vector<double> row(static_cast<std::size_t>(cols));
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    for (int c = 0; c < cols; ++c) {
      auto [q, ec] = std::from_chars(p, end, row[static_cast<std::size_t>(c)]);
      if (ec != std::errc()) throw std::runtime_error(path + ": bad number in row " + std::to_string(traj.size() + 1));
      p = (q < end) ? q + 1 : q;
    }
    const int n = traj.n;
    Eigen::Map<const Eigen::VectorXd> x(row.data() + 1, n);
    Eigen::Map<const Eigen::VectorXd> s(row.data() + 2 + n, n);
    Eigen::Map<const Eigen::VectorXd> d(row.data() + 2 + 2 * n, n);
    traj.push(row[0], x, row[static_cast<std::size_t>(n) + 1], s, d);
  }
  return traj;
}

}  // namespace hyperstab
