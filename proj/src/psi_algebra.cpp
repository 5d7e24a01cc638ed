#include "hyperstab/psi_algebra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hyperstab {

// PsiPoly

PsiPoly::PsiPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

PsiPoly PsiPoly::constant(double c) { return PsiPoly(std::vector<double>{c}); }

PsiPoly PsiPoly::monomial(double c, int degree) {
  if (degree < 0) throw std::invalid_argument("negative monomial degree");
  std::vector<double> v(static_cast<std::size_t>(degree) + 1, 0.0);
  v.back() = c;
  return PsiPoly(std::move(v));
}

void PsiPoly::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double PsiPoly::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return 0.0;
  return c_[static_cast<std::size_t>(k)];
}

double PsiPoly::operator()(double psi) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * psi + *it;
  return acc;
}

long double PsiPoly::eval_long(long double psi) const {
  long double acc = 0.0L;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * psi + static_cast<long double>(*it);
  return acc;
}

PsiPoly PsiPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return PsiPoly(std::move(d));
}

double PsiPoly::max_abs_coeff() const {
  double m = 0.0;
  for (double c : c_) m = std::max(m, std::abs(c));
  return m;
}

PsiPoly& PsiPoly::operator+=(const PsiPoly& q) {
  if (q.c_.size() > c_.size()) c_.resize(q.c_.size(), 0.0);
  for (std::size_t k = 0; k < q.c_.size(); ++k) c_[k] += q.c_[k];
  trim();
  return *this;
}

PsiPoly& PsiPoly::operator-=(const PsiPoly& q) {
  if (q.c_.size() > c_.size()) c_.resize(q.c_.size(), 0.0);
  for (std::size_t k = 0; k < q.c_.size(); ++k) c_[k] -= q.c_[k];
  trim();
  return *this;
}

PsiPoly& PsiPoly::operator*=(double s) {
  for (double& c : c_) c *= s;
  trim();
  return *this;
}

PsiPoly operator*(const PsiPoly& p, const PsiPoly& q) {
  if (p.is_zero() || q.is_zero()) return {};
  std::vector<double> r(p.c_.size() + q.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.c_.size(); ++i)
    for (std::size_t j = 0; j < q.c_.size(); ++j) r[i + j] += p.c_[i] * q.c_[j];
  return PsiPoly(std::move(r));
}

PsiPoly poly_arith(PolyOp op, const PsiPoly& p, const PsiPoly& q) {
  switch (op) {
    case PolyOp::Add: return p + q;
    case PolyOp::Sub: return p - q;
    case PolyOp::Mul: return p * q;
  }
  throw std::invalid_argument("unknown polynomial operation");
}

PsiPoly poly_scale(const PsiPoly& p, double s) { return p * s; }
double poly_eval(const PsiPoly& p, double psi) { return p(psi); }

// StateLinearForm

StateLinearForm::StateLinearForm(int n) {
  if (n < 1) throw std::invalid_argument("form dimension must be >= 1");
  terms_.resize(static_cast<std::size_t>(n));
}

StateLinearForm StateLinearForm::state(int n, int j) {
  StateLinearForm f(n);
  f.coeff(j) = PsiPoly::constant(1.0);
  return f;
}

bool StateLinearForm::is_zero() const {
  return constant_.is_zero() &&
         std::all_of(terms_.begin(), terms_.end(), [](const PsiPoly& p) { return p.is_zero(); });
}

double StateLinearForm::max_abs_coeff() const {
  double m = constant_.max_abs_coeff();
  for (const auto& p : terms_) m = std::max(m, p.max_abs_coeff());
  return m;
}

double StateLinearForm::eval(double psi, std::span<const double> x) const {
  if (x.size() != terms_.size()) throw std::invalid_argument("state dimension mismatch in form evaluation");
  double acc = constant_(psi);
  for (std::size_t j = 0; j < terms_.size(); ++j)
    if (!terms_[j].is_zero()) acc += terms_[j](psi) * x[j];
  return acc;
}

void StateLinearForm::check_dim(const StateLinearForm& g) const {
  if (g.dim() != dim()) throw std::invalid_argument("form dimension mismatch");
}

StateLinearForm& StateLinearForm::operator+=(const StateLinearForm& g) {
  check_dim(g);
  for (std::size_t j = 0; j < terms_.size(); ++j) terms_[j] += g.terms_[j];
  constant_ += g.constant_;
  return *this;
}

StateLinearForm& StateLinearForm::operator-=(const StateLinearForm& g) {
  check_dim(g);
  for (std::size_t j = 0; j < terms_.size(); ++j) terms_[j] -= g.terms_[j];
  constant_ -= g.constant_;
  return *this;
}

StateLinearForm& StateLinearForm::operator*=(const PsiPoly& p) {
  for (auto& t : terms_) t = t * p;
  constant_ = constant_ * p;
  return *this;
}

StateLinearForm& StateLinearForm::operator*=(double s) {
  for (auto& t : terms_) t *= s;
  constant_ *= s;
  return *this;
}

FormDerivative form_nominal_derivative(const StateLinearForm& f, DerivativeClosure closure) {
  const int n = f.dim();
  const PsiPoly psi_dot{closure.c0, closure.c1};
  FormDerivative out{StateLinearForm(n), PsiPoly{}, std::vector<PsiPoly>(static_cast<std::size_t>(n))};
  for (int j = 0; j < n; ++j) {
    const PsiPoly& p = f.coeff(j);
    if (p.is_zero()) continue;
    out.drift.coeff(j) += p.derivative() * psi_dot;
    if (j + 1 < n)
      out.drift.coeff(j + 1) += p;
    else
      out.input_coeff = p;
    out.disturbance[static_cast<std::size_t>(j)] = p;
  }
  out.drift.constant() = f.constant().derivative() * psi_dot;
  return out;
}

// PolyMatrix

PolyMatrix::PolyMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
  if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
}

std::size_t PolyMatrix::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("poly matrix index");
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
}

PolyMatrix PolyMatrix::identity(int n) {
  PolyMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = PsiPoly::constant(1.0);
  return m;
}

PolyMatrix PolyMatrix::from_rows(std::span<const StateLinearForm> forms) {
  const int n = static_cast<int>(forms.size());
  PolyMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (forms[static_cast<std::size_t>(i)].dim() != n)
      throw std::invalid_argument("form dimension does not match row count");
    for (int j = 0; j < n; ++j) m(i, j) = forms[static_cast<std::size_t>(i)].coeff(j);
  }
  return m;
}

bool PolyMatrix::is_unit_lower_triangular() const {
  for (int i = 0; i < n_; ++i) {
    if (!(*this)(i, i).is_one()) return false;
    for (int j = i + 1; j < n_; ++j)
      if (!(*this)(i, j).is_zero()) return false;
  }
  return true;
}

bool PolyMatrix::is_identity() const { return *this == identity(n_); }

double PolyMatrix::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& p : e_) m = std::max(m, p.max_abs_coeff());
  return m;
}

Eigen::MatrixXd PolyMatrix::eval(double psi) const {
  Eigen::MatrixXd out(n_, n_);
  eval_into(psi, out);
  return out;
}

void PolyMatrix::eval_into(double psi, Eigen::MatrixXd& out) const {
  out.resize(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j)(psi);
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("poly matrix dimension mismatch");
  PolyMatrix c(a.n_);
  for (int i = 0; i < a.n_; ++i)
    for (int j = 0; j < a.n_; ++j) {
      PsiPoly acc;
      for (int k = 0; k < a.n_; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = std::move(acc);
    }
  return c;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("poly matrix dimension mismatch");
  PolyMatrix c(a.n_);
  for (std::size_t k = 0; k < a.e_.size(); ++k) c.e_[k] = a.e_[k] - b.e_[k];
  return c;
}

PolyMatrix polymatrix_inverse_unitriangular(const PolyMatrix& a) {
  if (!a.is_unit_lower_triangular())
    throw std::invalid_argument("matrix is not unit lower triangular");
  const int n = a.dim();
  PolyMatrix inv = PolyMatrix::identity(n);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      PsiPoly acc;
      for (int k = j; k < i; ++k) acc += a(i, k) * inv(k, j);
      inv(i, j) = -acc;
    }
  return inv;
}

// Printing

std::string format_coeff(double c) {
  if (std::isfinite(c) && c == std::round(c) && std::abs(c) < 1e15) {
    return std::to_string(static_cast<long long>(c));
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, c);
  return std::string(buf, res.ptr);
}

namespace {

std::string psi_power(int k) {
  if (k == 0) return "";
  if (k == 1) return "psi";
  return "psi^" + std::to_string(k);
}

// Nonzero monomials from highest degree down, as (coeff, degree).
std::vector<std::pair<double, int>> monomials(const PsiPoly& p) {
  std::vector<std::pair<double, int>> out;
  for (int k = p.degree(); k >= 0; --k)
    if (p.coeff(k) != 0.0) out.emplace_back(p.coeff(k), k);
  return out;
}

// |c| * psi^k with no sign.
std::string unsigned_monomial(double c, int k) {
  const double a = std::abs(c);
  if (k == 0) return format_coeff(a);
  if (a == 1.0) return psi_power(k);
  return format_coeff(a) + "*" + psi_power(k);
}

std::string join_signed(const std::vector<std::pair<bool, std::string>>& parts) {
  if (parts.empty()) return "0";
  std::string s = parts.front().first ? "-" + parts.front().second : parts.front().second;
  for (std::size_t i = 1; i < parts.size(); ++i)
    s += (parts[i].first ? " - " : " + ") + parts[i].second;
  return s;
}

}  // namespace

std::string to_string(const PsiPoly& p) {
  std::vector<std::pair<bool, std::string>> parts;
  for (auto [c, k] : monomials(p)) parts.emplace_back(c < 0.0, unsigned_monomial(c, k));
  return join_signed(parts);
}

std::string to_string(const StateLinearForm& f) {
  std::vector<std::pair<bool, std::string>> parts;
  for (int j = f.dim() - 1; j >= 0; --j) {
    const PsiPoly& p = f.coeff(j);
    if (p.is_zero()) continue;
    const std::string var = "x" + std::to_string(j + 1);
    const auto mons = monomials(p);
    if (mons.size() == 1) {
      auto [c, k] = mons.front();
      const bool unit = std::abs(c) == 1.0;
      std::string body;
      if (k == 0)
        body = unit ? var : format_coeff(std::abs(c)) + "*" + var;
      else
        body = unsigned_monomial(c, k) + "*" + var;
      parts.emplace_back(c < 0.0, body);
    } else {
      parts.emplace_back(false, "(" + to_string(p) + ")*" + var);
    }
  }
  if (!f.constant().is_zero()) {
    const auto mons = monomials(f.constant());
    if (mons.size() == 1)
      parts.emplace_back(mons.front().first < 0.0, unsigned_monomial(mons.front().first, mons.front().second));
    else
      parts.emplace_back(false, "(" + to_string(f.constant()) + ")");
  }
  return join_signed(parts);
}

std::string to_string(const PolyMatrix& m) {
  std::ostringstream os;
  for (int i = 0; i < m.dim(); ++i) {
    os << "[";
    for (int j = 0; j < m.dim(); ++j) os << (j ? ", " : "") << to_string(m(i, j));
    os << "]\n";
  }
  return os.str();
}

}  // namespace hyperstab
