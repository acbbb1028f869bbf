#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pottslab/model.hpp"

namespace pottslab {

// The ratio maps
//
//   g_m(x) = (B + (m-1+p)(x-1)) / (B + m(x-1)),   f_m = g_m^d,
//
// their two-step compositions and derivatives, and the auxiliary functions
// H_m, K_m, G_m that control the slope of f_m o f_m. f = f_1 is the pure
// boundary map r_{n+1} = f(r_n).
//
// Near x = 1 every quantity is evaluated in deviation coordinates t = x - 1
// using a^d - b^d = (a - b) * sum_i a^i b^(d-1-i), where a - b = (p-1)t is
// exact. `kDeviationBand` is the |x - 1| below which the public evaluators
// switch from the direct formula to the deviation formula.

inline constexpr double kDeviationBand = 1e-2;

/// Model parameters plus the multiplicity m of colours set to r.
class MapParams {
 public:
  /// Throws ValidationError("m", ...) unless 1 <= m <= q-1.
  MapParams(const ModelParams& base, int m);

  const ModelParams& base() const noexcept { return base_; }
  int m() const noexcept { return m_; }
  /// C_m = 2m - 1 + p.
  double C() const noexcept { return C_; }
  /// m - 1 + p, the numerator slope of g_m.
  double numerator_slope() const noexcept { return m_ - 1 + base_.p(); }

 private:
  ModelParams base_;
  int m_;
  double C_;
};

/// f_m(x). Throws DomainError when B + m(x-1) <= 0.
double f_m_eval(const MapParams& mp, double x);

/// f_m(1 + eps) - 1 without cancellation; exactly 0 at eps = 0.
double f_m_deviation(const MapParams& mp, double eps);

/// (f_m(1 + eps) - 1) / eps, continuous through eps = 0 where it equals -A/B.
/// Strictly negative wherever defined.
double f_m_slope(const MapParams& mp, double eps);

double f_m_prime(const MapParams& mp, double x);
double f_m_second(const MapParams& mp, double x);
double f_m_third(const MapParams& mp, double x);

/// (f_m o f_m)(x) and its chain-rule derivative f_m'(f_m(x)) f_m'(x).
double two_step_eval(const MapParams& mp, double x);
double two_step_deviation(const MapParams& mp, double eps);
double two_step_prime(const MapParams& mp, double x);

/// Slope as the product form (A/B)^2 * G_m(x); agrees with two_step_prime.
double two_step_prime_product(const MapParams& mp, double x);

double H_m_eval(const MapParams& mp, double x);
double K_m_eval(const MapParams& mp, double x);
double H_m_prime(const MapParams& mp, double x);
double K_m_prime(const MapParams& mp, double x);
/// Closed forms m g^(d-2) (B+m(x-1))^-4 (gamma_H + beta_H (x-1)) and the K analogue.
double H_m_second(const MapParams& mp, double x);
double K_m_second(const MapParams& mp, double x);

struct SecondDerivativeCoeffs {
  double beta_H;
  double gamma_H;
  double beta_K;
  double gamma_K;
};

SecondDerivativeCoeffs second_derivative_coeffs(const MapParams& mp);

/// (1 - H/(B^2+H))^2 (1 - K/(B^2+H))^(d-1); <= 1 on [1, inf) when A <= B.
double G_m_eval(const MapParams& mp, double x);

/// Derivatives of f o f at the fixed point 1.
struct TaylorCoeffs {
  double c1;
  double c2;
  double c3;
};

/// Third-order chain rule at x = 1 using the closed-form f'(1), f''(1),
/// f'''(1). Throws ValidationError unless regime(params) is Critical and d >= 2.
TaylorCoeffs taylor_c123(const ModelParams& params);

/// ((f o f)(x) - 1)^-2 - (x - 1)^-2 for x > 1 at criticality; tends to -c3/3.
double telescoping_increment(const ModelParams& params, double x);

/// Numerical differentiation used to audit the closed forms.
namespace fd {
/// Central difference with one Richardson level: (4 D(h/2) - D(h)) / 3.
template <class F>
double first(F&& f, double x, double h) {
  const auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2 * step); };
  return (4 * central(h / 2) - central(h)) / 3;
}
template <class F>
double second(F&& f, double x, double h) {
  const double fx = f(x);
  const auto central = [&](double step) { return (f(x + step) - 2 * fx + f(x - step)) / (step * step); };
  return (4 * central(h / 2) - central(h)) / 3;
}
}  // namespace fd

struct GridSpec {
  double x_min = 1.0;
  double x_max = 1e4;
  std::size_t points = 10'000;
};

/// Log-spaced points x_min * (x_max/x_min)^(i/(points-1)); first point is x_min exactly.
std::vector<double> log_grid(const GridSpec& grid);

struct AuditViolation {
  std::string check;
  double x;
  double value;
  double bound;
};

struct MultiplicityAudit {
  int m = 0;
  double sup_derivative = 0.0;  ///< max over the grid of (f_m o f_m)'
  double argsup = 0.0;
  double sup_G = 0.0;
  double min_HK_combination = 0.0;  ///< min over x > 1 of (d-1)K_m' + 2H_m'
  std::size_t points = 0;
  std::vector<AuditViolation> violations;
};

struct AuditReport {
  int d = 0;
  int q = 0;
  double p = 0.0;
  double bound = 0.0;  ///< (A/B)^2
  GridSpec grid;
  std::vector<MultiplicityAudit> per_m;

  bool ok() const noexcept;
};

/// Tolerance added to the slope and G_m bounds in audits.
inline constexpr double kAuditSlack = 1e-12;

/// Grid audit of the two-step slope bound for every m in 1..q-1:
/// 0 < (f_m o f_m)' <= (A/B)^2 + 1e-12, G_m <= 1 + 1e-12, and
/// (d-1)K_m' + 2H_m' > 0 for x > 1. Violations are recorded, never thrown.
AuditReport audit_two_step(const ModelParams& params, const GridSpec& grid, unsigned workers = 0);

}  // namespace pottslab
