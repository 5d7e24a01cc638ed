#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperstab/gain_schedule.hpp"

namespace hyperstab {

/// Univariate polynomial in the gain symbol psi, ascending coefficients.
///
/// Always canonical: the highest stored coefficient is nonzero, and the zero
/// polynomial has no coefficients at all.
class PsiPoly {
 public:
  PsiPoly() = default;
  explicit PsiPoly(std::vector<double> coeffs);
  PsiPoly(std::initializer_list<double> coeffs) : PsiPoly(std::vector<double>(coeffs)) {}

  static PsiPoly constant(double c);
  static PsiPoly monomial(double c, int degree);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1.0; }
  std::span<const double> coeffs() const { return c_; }
  double coeff(int k) const;

  /// Horner evaluation.
  double operator()(double psi) const;
  long double eval_long(long double psi) const;

  PsiPoly derivative() const;
  /// Largest absolute coefficient, 0 for the zero polynomial.
  double max_abs_coeff() const;

  PsiPoly& operator+=(const PsiPoly& q);
  PsiPoly& operator-=(const PsiPoly& q);
  PsiPoly& operator*=(double s);

  friend PsiPoly operator+(PsiPoly p, const PsiPoly& q) { return p += q; }
  friend PsiPoly operator-(PsiPoly p, const PsiPoly& q) { return p -= q; }
  friend PsiPoly operator-(PsiPoly p) { return p *= -1.0; }
  friend PsiPoly operator*(PsiPoly p, double s) { return p *= s; }
  friend PsiPoly operator*(double s, PsiPoly p) { return p *= s; }
  friend PsiPoly operator*(const PsiPoly& p, const PsiPoly& q);
  friend bool operator==(const PsiPoly&, const PsiPoly&) = default;

 private:
  void trim();
  std::vector<double> c_;
};

enum class PolyOp { Add, Sub, Mul };
PsiPoly poly_arith(PolyOp op, const PsiPoly& p, const PsiPoly& q);
PsiPoly poly_scale(const PsiPoly& p, double s);
double poly_eval(const PsiPoly& p, double psi);

/// Sum_j p_j(psi) x_j over an n-dimensional state, plus a pure-psi constant.
///
/// States are indexed from 0 in code and printed as x1..xn.
class StateLinearForm {
 public:
  StateLinearForm() = default;
  explicit StateLinearForm(int n);

  static StateLinearForm zero(int n) { return StateLinearForm(n); }
  /// The form "x_{j+1}".
  static StateLinearForm state(int n, int j);

  int dim() const { return static_cast<int>(terms_.size()); }
  const PsiPoly& coeff(int j) const { return terms_.at(static_cast<std::size_t>(j)); }
  PsiPoly& coeff(int j) { return terms_.at(static_cast<std::size_t>(j)); }
  const PsiPoly& constant() const { return constant_; }
  PsiPoly& constant() { return constant_; }
  bool is_zero() const;
  double max_abs_coeff() const;

  double eval(double psi, std::span<const double> x) const;
  double eval(double psi, const Eigen::VectorXd& x) const {
    return eval(psi, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  StateLinearForm& operator+=(const StateLinearForm& g);
  StateLinearForm& operator-=(const StateLinearForm& g);
  StateLinearForm& operator*=(const PsiPoly& p);
  StateLinearForm& operator*=(double s);

  friend StateLinearForm operator+(StateLinearForm f, const StateLinearForm& g) { return f += g; }
  friend StateLinearForm operator-(StateLinearForm f, const StateLinearForm& g) { return f -= g; }
  friend StateLinearForm operator-(StateLinearForm f) { return f *= -1.0; }
  friend StateLinearForm operator*(StateLinearForm f, const PsiPoly& p) { return f *= p; }
  friend StateLinearForm operator*(const PsiPoly& p, StateLinearForm f) { return f *= p; }
  friend StateLinearForm operator*(StateLinearForm f, double s) { return f *= s; }
  friend StateLinearForm operator*(double s, StateLinearForm f) { return f *= s; }
  friend bool operator==(const StateLinearForm&, const StateLinearForm&) = default;

 private:
  void check_dim(const StateLinearForm& g) const;
  std::vector<PsiPoly> terms_;
  PsiPoly constant_;
};

/// Time derivative of a form along x_j' = x_{j+1} + d_j with psi' = c0 + c1 psi.
struct FormDerivative {
  /// Known part: p_j'(psi)(c0 + c1 psi) x_j + p_j(psi) x_{j+1} for j < n.
  StateLinearForm drift;
  /// Multiplier of x_n' (the channel where the input enters).
  PsiPoly input_coeff;
  /// Multiplier of each disturbance channel d_j.
  std::vector<PsiPoly> disturbance;
};

FormDerivative form_nominal_derivative(const StateLinearForm& f, DerivativeClosure closure);

/// Square matrix of PsiPoly, row-major.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  explicit PolyMatrix(int n);

  static PolyMatrix identity(int n);
  /// Row i holds the state coefficients of forms[i].
  static PolyMatrix from_rows(std::span<const StateLinearForm> forms);

  int dim() const { return n_; }
  const PsiPoly& operator()(int i, int j) const { return e_.at(index(i, j)); }
  PsiPoly& operator()(int i, int j) { return e_.at(index(i, j)); }

  bool is_unit_lower_triangular() const;
  bool is_identity() const;
  double max_abs_coeff() const;

  Eigen::MatrixXd eval(double psi) const;
  void eval_into(double psi, Eigen::MatrixXd& out) const;

  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
  friend bool operator==(const PolyMatrix&, const PolyMatrix&) = default;

 private:
  std::size_t index(int i, int j) const;
  int n_ = 0;
  std::vector<PsiPoly> e_;
};

/// Exact inverse of a unit lower triangular polynomial matrix by forward substitution.
PolyMatrix polymatrix_inverse_unitriangular(const PolyMatrix& a);

std::string format_coeff(double c);
std::string to_string(const PsiPoly& p);
std::string to_string(const StateLinearForm& f);
std::string to_string(const PolyMatrix& m);

}  // namespace hyperstab
