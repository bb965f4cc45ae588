#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

using M3 = std::array<std::array<double, 3>, 3>;
using V3 = std::array<double, 3>;

inline M3 identity() {
  M3 m{};
  for (int i = 0; i < 3; ++i) m[i][i] = 1.0;
  return m;
}

inline M3 mul(const M3& a, const M3& b) {
  M3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline M3 transpose(const M3& a) {
  M3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

inline double ddot(const M3& a, const M3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a[i][j] * b[i][j];
  return s;
}

struct Inv {
  double I1, I2, I4, I5;
};

// Invariants of C = F^t F with structural tensor n (x) n.
inline Inv invariants(const M3& F, const V3& n) {
  const M3 C = mul(transpose(F), F);
  const M3 C2 = mul(C, C);
  M3 N{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) N[i][j] = n[i] * n[j];
  double trC = C[0][0] + C[1][1] + C[2][2];
  return {trC, 0.5 * (trC * trC - ddot(C, C)), ddot(C, N), ddot(C2, N)};
}

inline M3 uniaxial(double lambda) {
  M3 F{};
  F[0][0] = lambda;
  F[1][1] = F[2][2] = 1.0 / std::sqrt(lambda);
  return F;
}

inline M3 shear(double gamma) {
  M3 F = identity();
  F[0][1] = gamma;
  return F;
}

inline V3 fiber(bool in_plane) { return in_plane ? V3{1, 0, 0} : V3{0, 1, 0}; }

// Central difference with step h.
inline double central(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double t_density(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  return c * std::pow(1.0 + t * t / df, -(df + 1) / 2);
}

// Two-tailed p by trapezoid integration of the t density over [0, |t|].
inline double t_two_tailed_trapezoid(double t, double df, int n = 200000) {
  const double a = std::fabs(t);
  const double h = a / n;
  double s = 0.5 * (t_density(0, df) + t_density(a, df));
  for (int i = 1; i < n; ++i) s += t_density(i * h, df);
  return 1.0 - 2.0 * s * h;
}

// exp(x) - 1 by Taylor series; accurate for |x| < 1.
inline double expm1_series(double x) {
  double term = x, sum = 0.0;
  for (int n = 1; n < 60; ++n) {
    sum += term;
    term *= x / (n + 1);
  }
  return sum;
}

}  // namespace oracle
