#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pottslab/boundary.hpp"
#include "pottslab/marginal.hpp"
#include "pottslab/model.hpp"

namespace pottslab {

struct RecursionOptions {
  std::uint64_t size_cap = 100'000'000;  ///< cap on n * d^n for explicit boundaries
  unsigned workers = 0;
};

/// Root marginals by one bottom-up sweep. Each vertex passes its parent a
/// weight vector w (normalised so max w = 1); the parent multiplies, over its
/// children, the factors sum(w) + (p-1) w[i] for every colour i. A pure
/// boundary collapses every level to a single vector.
MarginalVector root_marginals_recursive(const ModelParams& params, int n, const BoundarySpec& xi,
                                        const RecursionOptions& options = {});

/// mu^xi[root = 2] / mu^xi[root = 1].
double ratio_of(const ModelParams& params, int n, const BoundarySpec& xi, const RecursionOptions& options = {});

/// Unnormalised root weight vector with max entry 1, the quantity the sweep
/// carries. Ratios of entries equal ratios of root marginals.
std::vector<double> root_message(const ModelParams& params, int n, const BoundarySpec& xi,
                                 const RecursionOptions& options = {});

/// A ratio r held as eps = r - 1. `log_abs` = log|eps| and `sign` keep the
/// magnitude meaningful after eps itself underflows, which happens for
/// subcritical parameters after a few hundred steps.
struct Deviation {
  double eps = 0.0;
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static Deviation from_eps(double eps);
  double ratio() const noexcept { return 1.0 + eps; }
};

/// One application of f in deviation coordinates.
Deviation step(const ModelParams& params, const Deviation& current);

/// eps_1..eps_N for the pure colour-2 boundary, starting from r_1 = p^d
/// (the one-level value, equal to lim_{x->inf} f(x)). Element k-1 is eps_k.
std::vector<Deviation> pure_deviation_sequence(const ModelParams& params, std::int64_t N);

/// mu^c_n for the pure colour-c boundary: r/(r+q-1) at c, 1/(r+q-1) elsewhere.
MarginalVector pure_marginal(const ModelParams& params, int n, int color);

/// Same, from a precomputed deviation.
MarginalVector pure_marginal_from(const ModelParams& params, const Deviation& dev, int color);

/// mu^c_n[root = c] - 1/q = (q-1) eps / (q (q + eps)), as value and log|.|.
double marginal_deviation(const ModelParams& params, double eps);
double log_abs_marginal_deviation(const ModelParams& params, const Deviation& dev);

}  // namespace pottslab
