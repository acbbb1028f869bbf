#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pottslab/model.hpp"
#include "pottslab/recursion.hpp"

namespace pottslab {

struct RateEstimate {
  double estimator_value = 0.0;
  double target = 0.0;
  std::int64_t n_used = 0;
  double relative_error = 0.0;  ///< |estimator_value - target| / |target|

  static RateEstimate make(double value, double target, std::int64_t n);
};

/// Closed-form limits at criticality.
double ratio_power_law_target(int d);                 // (d^2 - 1) / (6 d^2)
double probability_power_law_target(int d, int q);    // ratio target * (q^2/(q-1))^2

/// Limit of the subcritical decay rate, log(A/B).
double exponential_rate_target(const ModelParams& params);

struct PowerLawReport {
  RateEstimate ratio_level;               ///< (1/N) |eps_N|^-2
  RateEstimate probability_level;         ///< (1/N) |mu_N[1] - 1/q|^-2
  RateEstimate ratio_level_adjacent;      ///< same at N-1, the other parity
  RateEstimate probability_level_adjacent;
  double fitted_exponent = 0.0;           ///< least-squares slope of log|eps_n| vs log n, diagnostic only
};

/// Runs the pure-boundary iteration to N at critical params (N >= 1000).
/// Throws ValidationError for non-critical params or small N.
PowerLawReport power_law_constant(const ModelParams& params, std::int64_t N);

struct ExponentialRateReport {
  /// Even-index increment (log|delta_Ne| - log|delta_{Ne-2}|) / 2 with
  /// delta_n = mu_n[1] - 1/q and Ne the largest even index <= N.
  RateEstimate increment;
  /// (1/Ne) log|delta_Ne|; carries an O(1/N) offset from the prefactor.
  RateEstimate cesaro;
};

/// Subcritical params only (p > p_c), N >= 50.
ExponentialRateReport exponential_rate(const ModelParams& params, std::int64_t N);

/// (eps_{2k+2})^-2 - (eps_{2k})^-2 for k = 1..N/2. At criticality the terms
/// approach (d^2-1)/(3d^2).
std::vector<double> telescoping_series(const ModelParams& params, std::int64_t N);

double cesaro_mean(std::span<const double> values);

/// Least-squares slope of log|eps_n| against log n over n in [n_min, size].
double regression_exponent(std::span<const Deviation> seq, std::int64_t n_min);

// Reports.

struct NamedEstimate {
  std::string name;
  RateEstimate estimate;
};

struct AnalysisResults {
  std::optional<ModelParams> params;
  std::vector<NamedEstimate> estimates;
};

/// Version string baked in at configure time (git describe when available).
std::string tool_version();

/// Short statement of the iteration seed used by every sequence.
std::string seed_convention();

/// JSON report: {"tool_version", "seed_convention", "params"?, "estimates": [...]}.
/// Throws std::runtime_error naming the path on IO failure.
void emit_report(const AnalysisResults& results, const std::filesystem::path& json_path);

struct SequenceRow {
  std::int64_t n;
  double eps;
  double marginal_dev;
};

/// CSV with header `n,eps,marginal_dev`, 17 significant digits.
void write_sequence_csv(std::ostream& out, const ModelParams& params, std::span<const Deviation> seq);
void write_sequence_csv(const std::filesystem::path& path, const ModelParams& params, std::span<const Deviation> seq);
std::vector<SequenceRow> read_sequence_csv(std::istream& in);

}  // namespace pottslab
