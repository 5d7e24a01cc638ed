#pragma once

// Printed closed forms of the worked examples, transcribed unexpanded and
// evaluated with the oracle algebra. The library output is compared against these.

#include <vector>

#include "oracle/form_oracle.hpp"

namespace fixtures {

using oracle::Form;
using oracle::Poly;
using oracle::x;

inline const Poly psi{0, 1};
inline Poly k(double c) { return Poly{c}; }

struct SecondOrder {
  Form sigma2, u;
};
/// sigma2 = x2 + l1 psi x1; u = -l1 (psi x2 + x1) - l2 psi^2 sigma2.
inline SecondOrder second_order(double l1, double l2) {
  SecondOrder s;
  s.sigma2 = x(2, 2) + Poly{0, l1} * x(2, 1);
  s.u = -(k(l1) * (psi * x(2, 2) + x(2, 1))) - Poly{0, 0, l2} * s.sigma2;
  return s;
}

struct ThirdOrderM4 {
  Form sigma2, sigma3_nested, sigma3_expanded, u;
};
/// General gains with m = 4.
inline ThirdOrderM4 third_order_m4(double l1, double l2, double l3) {
  ThirdOrderM4 s;
  s.sigma2 = x(3, 2) + Poly{0, l1} * x(3, 1);
  s.sigma3_nested = x(3, 3) + k(l1) * (psi * x(3, 2) + x(3, 1)) + Poly{0, 0, l2} * s.sigma2;
  s.sigma3_expanded = x(3, 3) + oracle::pmul(Poly{l1, l2}, psi) * x(3, 2) + Poly{l1, 0, 0, l1 * l2} * x(3, 1);
  s.u = -(Poly{0, 0, 0, 0, l3} * s.sigma3_expanded) - Poly{2 * l1, 2 * l2, 0, l1 * l2} * x(3, 2) -
        Poly{0, 0, 3 * l2 * l1} * x(3, 1) - oracle::pmul(psi, Poly{l1, l2}) * x(3, 3);
  return s;
}

struct ThirdOrderUnit {
  Form sigma2, sigma3, u;
  std::vector<std::vector<Poly>> S, S_inv, L;
};
/// Unit gains, m = 3.
inline ThirdOrderUnit third_order_unit() {
  ThirdOrderUnit s;
  s.sigma2 = x(3, 2) + psi * x(3, 1);
  s.sigma3 = x(3, 3) + psi * x(3, 2) + x(3, 1) + Poly{0, 0, 1} * s.sigma2;
  s.u = -(Poly{0, 0, 0, 1} * s.sigma3) - psi * (x(3, 3) + k(2) * s.sigma2) - k(2) * x(3, 2) +
        Poly{0, 0, 1} * (Poly{0, 0, 1} * s.sigma2 - s.sigma3);
  s.S = {{{1}, {}, {}}, {{0, 1}, {1}, {}}, {{1, 0, 0, 1}, {0, 1, 1}, {1}}};
  s.S_inv = {{{1}, {}, {}}, {{0, -1}, {1}, {}}, {{-1, 0, 1}, {0, -1, -1}, {1}}};
  s.L = s.S;
  return s;
}

/// The expanded law quoted as equivalent: -psi^3 sigma3 - (psi + psi^2) x3 - (2 + 2psi + psi^3) x2 - 3 psi^2 x1.
inline Form third_order_unit_expanded_u() {
  const ThirdOrderUnit s = third_order_unit();
  return -(Poly{0, 0, 0, 1} * s.sigma3) - Poly{0, 1, 1} * x(3, 3) - Poly{2, 2, 0, 1} * x(3, 2) -
         Poly{0, 0, 3} * x(3, 1);
}

struct FourthOrderUnit {
  Form sigma4, u_printed;
  std::vector<std::vector<Poly>> S, S_inv, L;
};
inline FourthOrderUnit fourth_order_unit() {
  FourthOrderUnit s;
  const Form s2 = x(4, 2) + psi * x(4, 1);
  const Form s3 = x(4, 3) + psi * x(4, 2) + x(4, 1) + Poly{0, 0, 1} * s2;
  s.sigma4 = x(4, 4) + Poly{0, 1, 1} * x(4, 3) + Poly{2, 0, 0, 1} * x(4, 2) + Poly{0, 0, 1} * x(4, 1) +
             Poly{0, 2} * s2 + Poly{0, 0, 0, 1} * s3;
  s.u_printed = -(Poly{0, 0, 0, 0, 1} * s.sigma4) - Poly{0, 1, 1, 1} * x(4, 4) - Poly{3, 4, 0, 1, 1, 1} * x(4, 3) -
                Poly{0, 0, 1, 2, 0, 0, 1} * x(4, 2) - Poly{0, 0, 3} * s3 - Poly{0, 4, 0, 0, 0, 1} * x(4, 1) -
                Poly{2, 0, 0, 0, 2} * s2;
  s.S = {{{1}, {}, {}, {}},
         {{0, 1}, {1}, {}, {}},
         {{1, 0, 0, 1}, {0, 1, 1}, {1}, {}},
         {{0, 0, 3, 1, 0, 0, 1}, {2, 2, 0, 1, 1, 1}, {0, 1, 1, 1}, {1}}};
  s.S_inv = {{{1}, {}, {}, {}},
             {{0, -1}, {1}, {}, {}},
             {{-1, 0, 1}, {0, -1, -1}, {1}, {}},
             {{0, 3, 0, -1}, {-2, -2, 1, 1, 1}, {0, -1, -1, -1}, {1}}};
  s.L = s.S;
  return s;
}

}  // namespace fixtures
