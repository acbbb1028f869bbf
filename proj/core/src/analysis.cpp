#include "pottslab/analysis.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pottslab/errors.hpp"
#include "pottslab/report.hpp"
#include "pottslab/version.hpp"

namespace pottslab {

RateEstimate RateEstimate::make(double value, double target, std::int64_t n) {
  return {value, target, n, std::abs(value - target) / std::abs(target)};
}

double ratio_power_law_target(int d) { return (static_cast<double>(d) * d - 1.0) / (6.0 * d * d); }

double probability_power_law_target(int d, int q) {
  const double amp = static_cast<double>(q) * q / (q - 1.0);
  return ratio_power_law_target(d) * amp * amp;
}

double exponential_rate_target(const ModelParams& params) { return std::log(params.A() / params.B()); }

namespace {

double inverse_square_rate(double value, std::int64_t n) { return 1.0 / (static_cast<double>(n) * value * value); }

}  // namespace

PowerLawReport power_law_constant(const ModelParams& params, std::int64_t N) {
  if (regime(params) != Regime::Critical) throw ValidationError("p", "power-law constant needs critical params");
  if (params.d() < 2) throw ValidationError("d", "power law needs d >= 2");
  if (N < 1000) throw ValidationError("N", "power-law estimator needs N >= 1000");
  const auto seq = pure_deviation_sequence(params, N);
  const double ratio_target = ratio_power_law_target(params.d());
  const double prob_target = probability_power_law_target(params.d(), params.q());

  const auto at = [&](std::int64_t n) { return seq[static_cast<std::size_t>(n - 1)].eps; };
  PowerLawReport out;
  out.ratio_level = RateEstimate::make(inverse_square_rate(at(N), N), ratio_target, N);
  out.probability_level = RateEstimate::make(inverse_square_rate(marginal_deviation(params, at(N)), N), prob_target, N);
  out.ratio_level_adjacent = RateEstimate::make(inverse_square_rate(at(N - 1), N - 1), ratio_target, N - 1);
  out.probability_level_adjacent =
      RateEstimate::make(inverse_square_rate(marginal_deviation(params, at(N - 1)), N - 1), prob_target, N - 1);
  out.fitted_exponent = regression_exponent(seq, std::max<std::int64_t>(N / 100, 1));
  return out;
}

ExponentialRateReport exponential_rate(const ModelParams& params, std::int64_t N) {
  if (regime(params) != Regime::Subcritical) {
    throw ValidationError("p", "exponential rate needs p > p_c (at p_c the decay is a power law)");
  }
  if (N < 50) throw ValidationError("N", "exponential-rate estimator needs N >= 50");
  const std::int64_t even = N % 2 == 0 ? N : N - 1;
  const auto seq = pure_deviation_sequence(params, even);
  const double target = exponential_rate_target(params);
  const double last = log_abs_marginal_deviation(params, seq[static_cast<std::size_t>(even - 1)]);
  const double prev = log_abs_marginal_deviation(params, seq[static_cast<std::size_t>(even - 3)]);
  return {RateEstimate::make((last - prev) / 2.0, target, even),
          RateEstimate::make(last / static_cast<double>(even), target, even)};
}

std::vector<double> telescoping_series(const ModelParams& params, std::int64_t N) {
  if (N < 2) throw ValidationError("N", "telescoping series needs N >= 2");
  const std::int64_t terms = N / 2;
  const auto seq = pure_deviation_sequence(params, 2 * terms + 2);
  const auto inv_sq = [&](std::int64_t n) {
    const double e = seq[static_cast<std::size_t>(n - 1)].eps;
    return 1.0 / (e * e);
  };
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(terms));
  for (std::int64_t k = 1; k <= terms; ++k) out.push_back(inv_sq(2 * k + 2) - inv_sq(2 * k));
  return out;
}

double cesaro_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double regression_exponent(std::span<const Deviation> seq, std::int64_t n_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::int64_t count = 0;
  for (std::int64_t n = std::max<std::int64_t>(n_min, 1); n <= static_cast<std::int64_t>(seq.size()); ++n) {
    const double lx = std::log(static_cast<double>(n));
    const double ly = seq[static_cast<std::size_t>(n - 1)].log_abs;
    if (!std::isfinite(ly)) continue;
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) return 0.0;
  const double c = static_cast<double>(count);
  return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

std::string tool_version() { return POTTSLAB_VERSION_STRING; }

std::string seed_convention() {
  return "pure colour-2 boundary, r_1 = p^d (one-level tree); eps_n = r_n - 1 for n >= 1, r_0 undefined";
}

void emit_report(const AnalysisResults& results, const std::filesystem::path& json_path) {
  nlohmann::json doc = to_json(results);
  std::ofstream out(json_path);
  if (!out) {
    throw std::runtime_error("cannot open report " + json_path.string() + ": " + std::strerror(errno));
  }
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing report " + json_path.string());
}

void write_sequence_csv(std::ostream& out, const ModelParams& params, std::span<const Deviation> seq) {
  out << "n,eps,marginal_dev\n";
  char line[128];
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i + 1, seq[i].eps, marginal_deviation(params, seq[i].eps));
    out << line;
  }
}

void write_sequence_csv(const std::filesystem::path& path, const ModelParams& params, std::span<const Deviation> seq) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open CSV " + path.string() + ": " + std::strerror(errno));
  write_sequence_csv(out, params, seq);
  if (!out) throw std::runtime_error("failed writing CSV " + path.string());
}

std::vector<SequenceRow> read_sequence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,eps,marginal_dev", 0) != 0) {
    throw ValidationError("csv", "missing header n,eps,marginal_dev");
  }
  std::vector<SequenceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    SequenceRow row{};
    char* cursor = nullptr;
    row.n = std::strtoll(line.c_str(), &cursor, 10);
    bool ok = *cursor == ',';
    if (ok) {
      row.eps = std::strtod(cursor + 1, &cursor);
      ok = *cursor == ',';
    }
    if (ok) {
      row.marginal_dev = std::strtod(cursor + 1, &cursor);
      ok = *cursor == '\0' || *cursor == '\r';
    }
    if (!ok) throw ValidationError("csv", "malformed row at line " + std::to_string(lineno));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pottslab
