#include "hyperstab/disturbance.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hyperstab/psi_algebra.hpp"

namespace hyperstab {

bool ChannelSignal::is_zero() const {
  if (constant != 0.0 || uniform_coeff != 0.0) return false;
  for (const auto& s : terms)
    if (s.amp != 0.0) return false;
  return true;
}

double ChannelSignal::derivative(int k, double t, double U) const {
  double v = 0.0;
  if (k == 0) v = constant + uniform_coeff * U;
  const double shift = k * std::numbers::pi / 2.0;
  for (const auto& s : terms) {
    const double arg = s.freq * t + s.phase + shift;
    v += s.amp * std::pow(s.freq, k) * (s.cosine ? std::cos(arg) : std::sin(arg));
  }
  return v;
}

double ChannelSignal::sup_bound() const {
  double b = std::abs(constant) + std::abs(uniform_coeff);
  for (const auto& s : terms) b += std::abs(s.amp);
  return b;
}

DisturbanceSpec DisturbanceSpec::zero(int n) {
  DisturbanceSpec d;
  d.channels.resize(static_cast<std::size_t>(n));
  return d;
}

void DisturbanceSpec::reseed(std::uint64_t s) {
  seed = s;
  U = draw_uniform(s);
}

bool DisturbanceSpec::is_zero() const {
  for (const auto& c : channels)
    if (!c.is_zero()) return false;
  return true;
}

DisturbanceValue DisturbanceSpec::eval(double t) const {
  DisturbanceValue out{Eigen::VectorXd(dim()), Eigen::VectorXd(dim())};
  for (int i = 0; i < dim(); ++i) {
    out.d(i) = channels[static_cast<std::size_t>(i)].derivative(0, t, U);
    out.d_dot(i) = channels[static_cast<std::size_t>(i)].derivative(1, t, U);
  }
  return out;
}

Eigen::VectorXd DisturbanceSpec::value(double t) const {
  Eigen::VectorXd d(dim());
  for (int i = 0; i < dim(); ++i) d(i) = channels[static_cast<std::size_t>(i)].value(t, U);
  return d;
}

double DisturbanceSpec::derivative(int channel, int k, double t) const {
  return channels.at(static_cast<std::size_t>(channel)).derivative(k, t, U);
}

double DisturbanceSpec::sup_bound(int channel) const {
  return channels.at(static_cast<std::size_t>(channel)).sup_bound();
}

double DisturbanceSpec::sup_norm() const {
  double b = 0.0;
  for (const auto& c : channels) b = std::max(b, c.sup_bound());
  return b;
}

double draw_uniform(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

namespace {

class ChannelParser {
 public:
  explicit ChannelParser(std::string_view s) : s_(s) {}

  ChannelSignal parse() {
    ChannelSignal out;
    skip();
    if (pos_ == s_.size()) fail("empty expression");
    bool first = true;
    while (pos_ < s_.size()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = (peek() == '-') ? -1.0 : 1.0;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      term(sign, out);
      first = false;
      skip();
    }
    return out;
  }

 private:
  void term(double sign, ChannelSignal& out) {
    double coeff = sign;
    bool have_number = false;
    if (starts_number()) {
      coeff *= number();
      have_number = true;
      skip();
      if (peek() != '*') {
        out.constant += coeff;
        return;
      }
      ++pos_;
      skip();
    }
    if (accept_word("sin") || accept_word("cos")) {
      const bool cosine = s_.substr(pos_ - 3, 3) == "cos";
      skip();
      expect('(');
      SinusoidTerm st;
      st.amp = coeff;
      st.cosine = cosine;
      argument(st);
      expect(')');
      out.terms.push_back(st);
    } else if (accept_word("rnd")) {
      skip();
      if (peek() == '(') {
        ++pos_;
        skip();
        if (!starts_number() || number() != 1.0) fail("only rnd(1) is supported");
        skip();
        expect(')');
      }
      out.uniform_coeff += coeff;
    } else {
      fail(have_number ? "expected sin, cos or rnd after '*'" : "expected a number, sin, cos or rnd");
    }
  }

  // [w *] t [(+|-) phase]
  void argument(SinusoidTerm& st) {
    skip();
    st.freq = 1.0;
    if (starts_number()) {
      st.freq = number();
      skip();
      expect('*');
    }
    skip();
    if (!accept_word("t")) fail("expected 't' in sinusoid argument");
    skip();
    if (peek() == '+' || peek() == '-') {
      const double sg = (peek() == '-') ? -1.0 : 1.0;
      ++pos_;
      skip();
      if (!starts_number()) fail("expected phase constant");
      st.phase = sg * number();
      skip();
    }
  }

  bool starts_number() const {
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }

  double number() {
    double v = 0.0;
    const char* b = s_.data() + pos_;
    auto [p, ec] = std::from_chars(b, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("bad number");
    pos_ += static_cast<std::size_t>(p - b);
    return v;
  }

  bool accept_word(std::string_view w) {
    if (s_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
    skip();
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(what + " at column " + std::to_string(pos_ + 1) + " in \"" + std::string(s_) + "\"");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void append_signed(std::string& out, double c, const std::string& body) {
  const bool neg = std::signbit(c);
  const double a = std::abs(c);
  if (out.empty())
    out += neg ? "-" : "";
  else
    out += neg ? " - " : " + ";
  if (body.empty()) {
    out += format_coeff(a);
  } else {
    if (a != 1.0) out += format_coeff(a) + "*";
    out += body;
  }
}

}  // namespace

ChannelSignal parse_channel(std::string_view text) { return ChannelParser(text).parse(); }

std::string to_string(const ChannelSignal& c) {
  std::string out;
  for (const auto& s : c.terms) {
    std::string arg = (s.freq == 1.0 ? "" : format_coeff(s.freq) + "*") + "t";
    if (s.phase != 0.0) arg += (s.phase < 0 ? " - " : " + ") + format_coeff(std::abs(s.phase));
    append_signed(out, s.amp, std::string(s.cosine ? "cos(" : "sin(") + arg + ")");
  }
  if (c.constant != 0.0) append_signed(out, c.constant, "");
  if (c.uniform_coeff != 0.0) append_signed(out, c.uniform_coeff, "rnd");
  return out.empty() ? "0" : out;
}

}  // namespace hyperstab
