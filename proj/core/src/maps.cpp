#include "pottslab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pottslab/errors.hpp"
#include "pottslab/parallel.hpp"

namespace pottslab {

namespace {

double powi(double base, int exp) {
  if (exp < 0) return 1.0 / powi(base, -exp);
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

/// Denominator B + m t, checked.
double denominator(const MapParams& mp, double t) {
  const double b = mp.base().B() + mp.m() * t;
  if (!(b > 0.0)) {
    throw DomainError("f_m undefined: B + m(x-1) = " + std::to_string(b) + " <= 0 at x = " + std::to_string(1.0 + t));
  }
  return b;
}

struct GDerivs {
  double g, g1, g2, g3;
};

GDerivs g_derivs(const MapParams& mp, double t) {
  const double B = mp.base().B();
  const double p = mp.base().p();
  const double m = mp.m();
  const double b = denominator(mp, t);
  return {(B + mp.numerator_slope() * t) / b, B * (p - 1) / (b * b), 2 * m * B * (1 - p) / (b * b * b),
          -6 * m * m * B * (1 - p) / (b * b * b * b)};
}

struct FDerivs {
  double f1, f2, f3;
};

/// Derivatives of g^d by the chain rule; terms with a zero integer
/// coefficient are skipped so d = 1, 2 never touch negative powers of g.
FDerivs f_derivs(int d, const GDerivs& g) {
  FDerivs out{};
  out.f1 = d * powi(g.g, d - 1) * g.g1;
  out.f2 = d * powi(g.g, d - 1) * g.g2;
  if (d >= 2) out.f2 += d * (d - 1) * powi(g.g, d - 2) * g.g1 * g.g1;
  out.f3 = d * powi(g.g, d - 1) * g.g3;
  if (d >= 2) out.f3 += 3.0 * d * (d - 1) * powi(g.g, d - 2) * g.g1 * g.g2;
  if (d >= 3) out.f3 += static_cast<double>(d) * (d - 1) * (d - 2) * powi(g.g, d - 3) * g.g1 * g.g1 * g.g1;
  return out;
}

}  // namespace

MapParams::MapParams(const ModelParams& base, int m) : base_(base), m_(m), C_(2.0 * m - 1.0 + base.p()) {
  if (m < 1 || m > base.q() - 1) {
    throw ValidationError("m", "multiplicity must lie in [1, q-1] = [1, " + std::to_string(base.q() - 1) + "], got " +
                                   std::to_string(m));
  }
}

double f_m_slope(const MapParams& mp, double eps) {
  const double b = denominator(mp, eps);
  const double a = mp.base().B() + mp.numerator_slope() * eps;
  const double rho = a / b;
  double sum = 0.0;
  for (int i = mp.base().d() - 1; i >= 0; --i) sum = sum * rho + 1.0;
  return (mp.base().p() - 1.0) / b * sum;
}

double f_m_deviation(const MapParams& mp, double eps) {
  if (eps == 0.0) return 0.0;
  return f_m_slope(mp, eps) * eps;
}

double f_m_eval(const MapParams& mp, double x) {
  const double t = x - 1.0;
  if (std::abs(t) < kDeviationBand) return 1.0 + f_m_deviation(mp, t);
  const double b = denominator(mp, t);
  return powi((mp.base().B() + mp.numerator_slope() * t) / b, mp.base().d());
}

double f_m_prime(const MapParams& mp, double x) { return f_derivs(mp.base().d(), g_derivs(mp, x - 1.0)).f1; }
double f_m_second(const MapParams& mp, double x) { return f_derivs(mp.base().d(), g_derivs(mp, x - 1.0)).f2; }
double f_m_third(const MapParams& mp, double x) { return f_derivs(mp.base().d(), g_derivs(mp, x - 1.0)).f3; }

double two_step_deviation(const MapParams& mp, double eps) { return f_m_deviation(mp, f_m_deviation(mp, eps)); }

double two_step_eval(const MapParams& mp, double x) {
  const double t = x - 1.0;
  if (std::abs(t) < kDeviationBand) return 1.0 + two_step_deviation(mp, t);
  return f_m_eval(mp, f_m_eval(mp, x));
}

double two_step_prime(const MapParams& mp, double x) {
  const double inner = 1.0 + f_m_deviation(mp, x - 1.0);
  return f_m_prime(mp, inner) * f_m_prime(mp, x);
}

double two_step_prime_product(const MapParams& mp, double x) {
  const double ab = mp.base().A() / mp.base().B();
  return ab * ab * G_m_eval(mp, x);
}

double H_m_eval(const MapParams& mp, double x) {
  const double t = x - 1.0;
  const double s = f_m_deviation(mp, t);
  const double m = mp.m();
  return m * mp.base().B() * (t + s) + m * m * t * s;
}

double K_m_eval(const MapParams& mp, double x) {
  const double t = x - 1.0;
  const double s = f_m_deviation(mp, t);
  return (1.0 - mp.base().p()) * (mp.base().B() * (t + s) + mp.C() * t * s);
}

double H_m_prime(const MapParams& mp, double x) {
  const double t = x - 1.0;
  const double s = f_m_deviation(mp, t);
  const double B = mp.base().B();
  const double m = mp.m();
  return m * ((B + m * s) + f_m_prime(mp, x) * (B + m * t));
}

double K_m_prime(const MapParams& mp, double x) {
  const double t = x - 1.0;
  const double s = f_m_deviation(mp, t);
  const double B = mp.base().B();
  const double C = mp.C();
  return (1.0 - mp.base().p()) * (f_m_prime(mp, x) * (B + C * t) + (B + C * s));
}

SecondDerivativeCoeffs second_derivative_coeffs(const MapParams& mp) {
  const double A = mp.base().A();
  const double B = mp.base().B();
  const double C = mp.C();
  const double m = mp.m();
  const double shrink = 1.0 - 1.0 / mp.base().d();
  return {shrink * m * A * A * B * B, shrink * A * A * B * B * B, A * B * B * (-2 * (C - m) * (C - m) + shrink * A * C),
          A * B * B * B * (A - C)};
}

double H_m_second(const MapParams& mp, double x) {
  const double t = x - 1.0;
  const auto k = second_derivative_coeffs(mp);
  const double b = denominator(mp, t);
  const double g = (mp.base().B() + mp.numerator_slope() * t) / b;
  return mp.m() * powi(g, mp.base().d() - 2) * powi(b, -4) * (k.gamma_H + k.beta_H * t);
}

double K_m_second(const MapParams& mp, double x) {
  const double t = x - 1.0;
  const auto k = second_derivative_coeffs(mp);
  const double b = denominator(mp, t);
  const double g = (mp.base().B() + mp.numerator_slope() * t) / b;
  return (1.0 - mp.base().p()) * powi(g, mp.base().d() - 2) * powi(b, -4) * (k.gamma_K + k.beta_K * t);
}

double G_m_eval(const MapParams& mp, double x) {
  const double B2 = mp.base().B() * mp.base().B();
  const double H = H_m_eval(mp, x);
  const double K = K_m_eval(mp, x);
  const double first = 1.0 - H / (B2 + H);
  const double second = 1.0 - K / (B2 + H);
  return first * first * powi(second, mp.base().d() - 1);
}

TaylorCoeffs taylor_c123(const ModelParams& params) {
  if (params.d() < 2) throw ValidationError("d", "the cubic coefficient only governs a power law for d >= 2");
  if (regime(params) != Regime::Critical) {
    throw ValidationError("p", "Taylor coefficients of f o f are defined here at criticality only, p_c = " +
                                   std::to_string(critical_p(params.d(), params.q())));
  }
  const MapParams mp(params, 1);
  const auto f = f_derivs(params.d(), g_derivs(mp, 0.0));
  // (f o f)' = f'(f) f',  (f o f)'' = f''(f) f'^2 + f'(f) f'',
  // (f o f)''' = f'''(f) f'^3 + 3 f''(f) f' f'' + f'(f) f''', all at f(1) = 1.
  return {f.f1 * f.f1, f.f2 * f.f1 * f.f1 + f.f1 * f.f2,
          f.f3 * f.f1 * f.f1 * f.f1 + 3 * f.f2 * f.f1 * f.f2 + f.f1 * f.f3};
}

double telescoping_increment(const ModelParams& params, double x) {
  if (regime(params) != Regime::Critical) throw ValidationError("p", "telescoping increment needs critical params");
  if (!(x > 1.0)) throw ValidationError("x", "telescoping increment needs x > 1");
  // 1 - rho is O(y^2), so any error in rho, including the rounding of p_c
  // itself, is amplified by 1/y^2. Work at p_c formed in extended precision.
  using ld = long double;
  const ld pc = 1.0L - static_cast<ld>(params.q()) / (params.d() + 1);
  const ld B = pc + params.q() - 1;
  const ld pm1 = pc - 1.0L;
  const auto slope = [&](ld eps) {
    const ld b = B + eps;
    const ld rho = (B + pc * eps) / b;
    ld sum = 0.0L;
    for (int i = params.d() - 1; i >= 0; --i) sum = sum * rho + 1.0L;
    return pm1 / b * sum;
  };
  const ld y = static_cast<ld>(x) - 1.0L;
  const ld s1 = slope(y);
  const ld rho = s1 * slope(s1 * y);  // ((f o f)(x) - 1) / (x - 1)
  return static_cast<double>((1.0L - rho) * (1.0L + rho) / (rho * rho * y * y));
}

std::vector<double> log_grid(const GridSpec& grid) {
  if (grid.points < 2 || !(grid.x_min > 0.0) || !(grid.x_max > grid.x_min)) {
    throw ValidationError("grid", "need points >= 2 and 0 < x_min < x_max");
  }
  std::vector<double> xs(grid.points);
  const double span = std::log(grid.x_max / grid.x_min);
  for (std::size_t i = 0; i < grid.points; ++i) {
    xs[i] = grid.x_min * std::exp(span * static_cast<double>(i) / static_cast<double>(grid.points - 1));
  }
  xs.front() = grid.x_min;
  xs.back() = grid.x_max;
  return xs;
}

bool AuditReport::ok() const noexcept {
  return std::all_of(per_m.begin(), per_m.end(), [](const auto& a) { return a.violations.empty(); });
}

AuditReport audit_two_step(const ModelParams& params, const GridSpec& grid, unsigned workers) {
  const auto xs = log_grid(grid);
  AuditReport report;
  report.d = params.d();
  report.q = params.q();
  report.p = params.p();
  report.grid = grid;
  const double ab = params.A() / params.B();
  report.bound = ab * ab;

  for (int m = 1; m <= params.q() - 1; ++m) {
    const MapParams mp(params, m);
    std::vector<double> slope(xs.size()), G(xs.size()), hk(xs.size());
    parallel_chunks(xs.size(), 64, workers, [&](std::size_t, std::uint64_t begin, std::uint64_t end) {
      for (std::uint64_t i = begin; i < end; ++i) {
        slope[i] = two_step_prime(mp, xs[i]);
        G[i] = G_m_eval(mp, xs[i]);
        hk[i] = (params.d() - 1) * K_m_prime(mp, xs[i]) + 2 * H_m_prime(mp, xs[i]);
      }
    });

    MultiplicityAudit audit;
    audit.m = m;
    audit.points = xs.size();
    audit.sup_derivative = -std::numeric_limits<double>::infinity();
    audit.sup_G = -std::numeric_limits<double>::infinity();
    audit.min_HK_combination = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (slope[i] > audit.sup_derivative) {
        audit.sup_derivative = slope[i];
        audit.argsup = xs[i];
      }
      audit.sup_G = std::max(audit.sup_G, G[i]);
      if (!(slope[i] > 0.0)) audit.violations.push_back({"slope_positive", xs[i], slope[i], 0.0});
      if (slope[i] > report.bound + kAuditSlack) {
        audit.violations.push_back({"slope_bound", xs[i], slope[i], report.bound + kAuditSlack});
      }
      if (G[i] > 1.0 + kAuditSlack) audit.violations.push_back({"G_bound", xs[i], G[i], 1.0 + kAuditSlack});
      if (xs[i] > 1.0) {
        audit.min_HK_combination = std::min(audit.min_HK_combination, hk[i]);
        if (!(hk[i] > 0.0)) audit.violations.push_back({"HK_positive", xs[i], hk[i], 0.0});
      }
    }
    report.per_m.push_back(std::move(audit));
  }
  return report;
}

}  // namespace pottslab
