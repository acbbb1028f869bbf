#pragma once

#include <string_view>

namespace pottslab {

enum class Regime { Supercritical, Critical, Subcritical };

std::string_view to_string(Regime regime) noexcept;

/// Absolute tolerance on p - p_c used to classify a parameter set as critical.
inline constexpr double kCriticalTolerance = 1e-12;

/// Antiferromagnetic Potts parameters on the d-ary tree.
///
/// `p` is the weight of one monochromatic edge, so 0 < p < 1. The derived
/// constants A = d(1-p) and B = p+q-1 are fixed at construction so every
/// module sees identical values; A/B is the linear contraction rate of the
/// ratio map at its fixed point.
class ModelParams {
 public:
  /// Throws ValidationError naming the offending field.
  ModelParams(int d, int q, double p);

  int d() const noexcept { return d_; }
  int q() const noexcept { return q_; }
  double p() const noexcept { return p_; }
  double A() const noexcept { return A_; }
  double B() const noexcept { return B_; }

  /// A / B, the modulus of f'(1).
  double contraction() const noexcept { return A_ / B_; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  int d_;
  int q_;
  double p_;
  double A_;
  double B_;
};

ModelParams new_params(int d, int q, double p);

/// 1 - q/(d+1). Can be <= 0, in which case every p in (0,1) is at or above it.
double critical_p(int d, int q);

Regime regime(const ModelParams& params);

/// Parameters at p = critical_p(d, q). Throws ValidationError when p_c <= 0
/// (q >= d+1; q = d+1 is the zero-temperature colouring case).
ModelParams critical_params(int d, int q);

}  // namespace pottslab
