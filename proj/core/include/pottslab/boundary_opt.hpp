#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pottslab/exact_oracle.hpp"
#include "pottslab/model.hpp"

namespace pottslab {

/// A vertex of the reduced domain A(r): x^u_1 = 1 and x^u_k = 1 + (r-1) theta^u_k
/// for u in 1..d, k in 2..q. Bits are packed row-major (u-major, k-minor),
/// bit u*(q-1) + (k-2) counting from the least significant end.
class AdmissiblePoint {
 public:
  AdmissiblePoint(int d, int q, std::uint64_t bits);

  /// theta^u_2 = 1 for every u, all other bits 0.
  static AdmissiblePoint expansion_maximizer(int d, int q);

  int d() const noexcept { return d_; }
  int q() const noexcept { return q_; }
  std::uint64_t bits() const noexcept { return bits_; }
  /// 1-based u in [1,d], k in [2,q].
  bool theta(int u, int k) const;
  /// Number of free bits, d(q-1).
  int width() const noexcept { return d_ * (q_ - 1); }

  /// Reorders the rows: row u of the result is row perm[u-1] of this point.
  AdmissiblePoint permute_rows(std::span<const int> perm) const;

  /// d rows of q-1 digits, rows separated by '|', e.g. "10|10|10".
  std::string pattern() const;

  friend bool operator==(const AdmissiblePoint&, const AdmissiblePoint&) = default;

 private:
  int d_;
  int q_;
  std::uint64_t bits_;
};

struct HValue {
  double U = 1.0;
  std::vector<double> V;  ///< V[j-1] = V_j, V_1 = 1
  double value = 1.0;     ///< U^d
  double deviation = 0.0; ///< value - 1, exact-form when r - 1 is small
};

/// h(x) = U^d at the point of A(r) encoded by `point`; r >= 1. For
/// r - 1 < kDeviationBand every factor is carried as (factor - 1).
HValue h_eval(const ModelParams& params, const AdmissiblePoint& point, double r);

struct HMaxResult {
  double max_value = 0.0;
  double max_deviation = 0.0;
  std::vector<AdmissiblePoint> argmax;  ///< h - 1 within 1e-12 relative of the best, ascending bits
  std::uint64_t points = 0;
};

/// Cap on d(q-1) for exhaustive search over A(r).
inline constexpr int kMaxAdmissibleBits = 24;

HMaxResult h_max_admissible(const ModelParams& params, double r, unsigned workers = 0);

struct ExpansionCheck {
  double r = 1.0;
  double max_value = 0.0;
  double ff_value = 0.0;
  double relative_gap = 0.0;  ///< |max - (f o f)(r)| / (f o f)(r), from deviations
  bool unique_expected_argmax = false;
  bool holds = false;
  std::vector<std::string> argmax_patterns;
};

inline constexpr double kExpansionTolerance = 1e-12;

ExpansionCheck expansion_check(const ModelParams& params, double r, unsigned workers = 0);

/// True iff max over A(r) of h equals (f o f)(r) within 1e-12 relative and
/// the unique maximiser is theta^u_2 = 1, theta^u_{k>2} = 0.
bool verify_expansion(const ModelParams& params, double r, unsigned workers = 0);

/// Walks an increasing list of r values and returns the first at which the
/// expansion check fails, or nullopt if it holds everywhere on the list.
std::optional<double> expansion_failure_radius(const ModelParams& params, std::span<const double> rs,
                                               unsigned workers = 0);

/// General two-step function on d^2 vectors of q positive reals, vector
/// index v*d + u (both 0-based). Each vector is normalised to first entry 1
/// by construction of the callers; the formula itself is scale-invariant.
double hhat_eval(const ModelParams& params, std::span<const std::vector<double>> vectors);

/// Alias kept for the consistency checks: evaluates hhat on the given vectors.
double hhat_consistency(const ModelParams& params, std::span<const std::vector<double>> subtree_ratio_vectors);

struct TwoStepBoundReport {
  int n = 0;
  double r_n = 0.0;        ///< r*_n by exhaustive search
  double r_n2 = 0.0;       ///< r*_{n+2} by exhaustive search
  double h_bound = 0.0;    ///< max over A(r*_n) of h
  double ff_value = 0.0;   ///< (f o f)(r*_n)
  std::vector<std::string> argmax_patterns;
  bool h_bound_holds = false;  ///< r*_{n+2} <= h_bound
  bool ff_bound_holds = false;  ///< r*_{n+2} <= (f o f)(r*_n), recorded only
};

/// Relative slack allowed on both inequalities for floating-point rounding.
inline constexpr double kBoundSlack = 1e-12;

TwoStepBoundReport two_step_bound_check(const ModelParams& params, int n, const OracleOptions& options = {});

}  // namespace pottslab
