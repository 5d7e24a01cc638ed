#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hyperstab {

/// amp * sin(freq t + phase), or amp * cos(...) when cosine is set.
struct SinusoidTerm {
  double amp = 0.0;
  double freq = 0.0;
  double phase = 0.0;
  bool cosine = false;

  friend bool operator==(const SinusoidTerm&, const SinusoidTerm&) = default;
};

/// One disturbance channel: sum of sinusoids + constant + uniform_coeff * U.
struct ChannelSignal {
  std::vector<SinusoidTerm> terms;
  double constant = 0.0;
  double uniform_coeff = 0.0;

  bool is_zero() const;
  /// k-th time derivative at t, with U the per-run uniform draw.
  double derivative(int k, double t, double U) const;
  double value(double t, double U) const { return derivative(0, t, U); }
  /// sum |amp| + |constant| + |uniform_coeff|; U lies in [0, 1).
  double sup_bound() const;

  friend bool operator==(const ChannelSignal&, const ChannelSignal&) = default;
};

struct DisturbanceValue {
  Eigen::VectorXd d;
  Eigen::VectorXd d_dot;
};

/// Per-channel disturbance with a single seeded uniform draw per run.
struct DisturbanceSpec {
  std::vector<ChannelSignal> channels;
  std::uint64_t seed = 0;
  double U = 0.0;

  static DisturbanceSpec zero(int n);
  /// Sets the seed and redraws U from it.
  void reseed(std::uint64_t s);

  int dim() const { return static_cast<int>(channels.size()); }
  bool is_zero() const;
  DisturbanceValue eval(double t) const;
  Eigen::VectorXd value(double t) const;
  /// k-th derivative of channel i (0-based).
  double derivative(int channel, int k, double t) const;
  double sup_bound(int channel) const;
  double sup_norm() const;

  friend bool operator==(const DisturbanceSpec&, const DisturbanceSpec&) = default;
};

/// Uniform [0, 1) draw: top 53 bits of the first mt19937_64 output.
double draw_uniform(std::uint64_t seed);

/// Parses a channel expression such as "0.5*sin(5*t + 1) - cos(3*t) + 0.2 - rnd".
/// Throws std::invalid_argument with the column of the first bad token.
ChannelSignal parse_channel(std::string_view text);
std::string to_string(const ChannelSignal& c);

}  // namespace hyperstab
