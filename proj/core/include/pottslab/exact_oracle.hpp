#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pottslab/boundary.hpp"
#include "pottslab/marginal.hpp"
#include "pottslab/model.hpp"

namespace pottslab {

// Ground truth by brute force. Every interior spin configuration of T^d_n is
// visited; the number of monochromatic edges (leaf edges included) is tallied
// per root colour in an integer histogram, and weights are formed afterwards
// as sum_e count[e] * p^e. Integer partial histograms combine exactly, so the
// result does not depend on how the index range was split across workers.

struct OracleOptions {
  std::uint64_t config_budget = 100'000'000;   ///< q^(interior) per weight computation
  std::uint64_t boundary_budget = 10'000'000;  ///< q^(d^n) boundaries for searches
  unsigned workers = 0;                        ///< 0 = hardware concurrency
};

struct RootWeights {
  std::vector<double> w;  ///< w[c-1]: summed weight of configurations with root colour c
  double Z = 0.0;

  MarginalVector normalized() const;
};

RootWeights root_weights_exact(const ModelParams& params, int n, const BoundarySpec& xi, const OracleOptions& options = {});

MarginalVector root_marginals_exact(const ModelParams& params, int n, const BoundarySpec& xi,
                                    const OracleOptions& options = {});

struct MaxRatioResult {
  double r_star = 0.0;
  /// Every boundary whose ratio is within 1e-12 * r_star of the maximum, in
  /// lexicographic boundary order.
  std::vector<BoundarySpec> witnesses;
  std::uint64_t boundaries_scanned = 0;
};

/// Relative tolerance used to collect argmax ties.
inline constexpr double kArgmaxTieTolerance = 1e-12;

/// max over all boundaries xi of mu^xi[root = 2] / mu^xi[root = 1].
MaxRatioResult max_ratio_exact(const ModelParams& params, int n, const OracleOptions& options = {});

struct DominatingBoundary {
  BoundarySpec boundary;
  double marginal = 0.0;       ///< mu^boundary[root = 1]
  double pure_marginal = 0.0;  ///< mu^Pure(1)[root = 1]
  double margin = 0.0;         ///< marginal - pure_marginal, > 0
};

/// Searches every boundary for one whose root marginal of colour 1 strictly
/// exceeds that of the pure colour-1 boundary. Returns the best such boundary
/// (lowest lexicographic index on ties), or nullopt if none dominates.
std::optional<DominatingBoundary> find_dominating_boundary(const ModelParams& params, int n,
                                                           const OracleOptions& options = {});

/// Decodes a boundary index in [0, q^(d^n)) to leaf colours, first leaf as the
/// most significant base-q digit, so index order is lexicographic order.
std::vector<int> boundary_from_index(std::uint64_t index, int q, std::uint64_t leaves);

}  // namespace pottslab
