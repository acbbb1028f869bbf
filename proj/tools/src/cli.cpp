#include "pottslab_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pottslab/analysis.hpp"
#include "pottslab/boundary_opt.hpp"
#include "pottslab/errors.hpp"
#include "pottslab/exact_oracle.hpp"
#include "pottslab/maps.hpp"
#include "pottslab/model.hpp"
#include "pottslab/recursion.hpp"
#include "pottslab/report.hpp"

namespace pottslab::cli {
namespace {

using nlohmann::json;

// Raised for argument problems found after CLI11 has finished parsing.
struct UsageError {
  std::string flag;
  std::string message;
};

struct Config {
  int d = 0;
  int q = 0;
  std::optional<double> p;
  bool critical = false;
  int n = 0;
  std::int64_t N = 0;
  unsigned workers = 0;
  std::string out_path;
  std::string csv_path;
  bool json = false;
  std::optional<std::uint64_t> config_budget;
  std::optional<std::uint64_t> boundary_budget;

  // Subcommand-specific knobs.
  double x_min = 1.0;
  double x_max = 1e4;
  std::size_t points = 10'000;
  double x = 1.0 + 1e-5;
  double tol = 0.0;
  std::vector<double> rs;
  double sweep_max = 0.0;
  std::size_t sweep_points = 40;
  std::uint64_t samples = 200;
  std::uint64_t exhaustive_limit = 10'000;
  std::uint64_t seed = 1;
  bool expect_found = false;
};

struct Check {
  std::string name;
  double value;
  double bound;
  bool passed;
};

struct Outcome {
  json data = json::object();
  std::vector<Check> checks;
  std::vector<std::string> lines;

  void check(std::string name, double value, double bound, bool passed) {
    checks.push_back({std::move(name), value, bound, passed});
  }
  bool ok() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::optional<std::uint64_t> env_budget(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(raw, &end);
  if (errno != 0 || *end != '\0' || !(v >= 1) || v > 1.8e19) {
    throw UsageError{name, std::string("expected a positive integer, got '") + raw + "'"};
  }
  return static_cast<std::uint64_t>(v);
}

OracleOptions oracle_options(const Config& cfg) {
  OracleOptions opt;
  opt.workers = cfg.workers;
  if (auto v = env_budget("POTTSLAB_BUDGET_CONFIGS")) opt.config_budget = *v;
  if (auto v = env_budget("POTTSLAB_BUDGET_BOUNDARIES")) opt.boundary_budget = *v;
  if (cfg.config_budget) opt.config_budget = *cfg.config_budget;
  if (cfg.boundary_budget) opt.boundary_budget = *cfg.boundary_budget;
  return opt;
}

ModelParams make_params(const Config& cfg) {
  if (cfg.critical) {
    if (critical_p(cfg.d, cfg.q) <= 0.0) {
      throw UsageError{"--critical", "p_c = 1 - q/(d+1) <= 0 for d=" + std::to_string(cfg.d) +
                                         ", q=" + std::to_string(cfg.q) +
                                         "; every p in (0,1) is at or above criticality "
                                         "(q = d+1 is the zero-temperature colouring case)"};
    }
    return critical_params(cfg.d, cfg.q);
  }
  if (!cfg.p) throw UsageError{"--p", "one of --p or --critical is required"};
  return ModelParams(cfg.d, cfg.q, *cfg.p);
}

std::vector<int> random_boundary(int q, std::uint64_t leaves, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(1, q);
  std::vector<int> colors(leaves);
  for (auto& c : colors) c = pick(rng);
  return colors;
}

// Subcommands.

Outcome oracle_check(const Config& cfg, const ModelParams& params) {
  if (cfg.n < 1) throw UsageError{"--n", "needs n >= 1"};
  const auto opts = oracle_options(cfg);
  const std::uint64_t leaves = leaf_count(params.d(), cfg.n);
  const long double total = std::pow(static_cast<long double>(params.q()), static_cast<long double>(leaves));
  const bool exhaustive = total <= static_cast<long double>(cfg.exhaustive_limit);
  const std::uint64_t count = exhaustive ? static_cast<std::uint64_t>(total) : cfg.samples;

  RecursionOptions ropts;
  ropts.workers = cfg.workers;
  std::mt19937_64 rng(cfg.seed);
  double worst = 0.0;
  std::uint64_t worst_index = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto colors = exhaustive ? boundary_from_index(i, params.q(), leaves) : random_boundary(params.q(), leaves, rng);
    const auto xi = BoundarySpec::explicit_colors(colors);
    const auto exact = root_marginals_exact(params, cfg.n, xi, opts);
    const auto rec = root_marginals_recursive(params, cfg.n, xi, ropts);
    for (int c = 1; c <= params.q(); ++c) {
      const double diff = std::abs(exact.color(c) - rec.color(c));
      if (diff > worst) {
        worst = diff;
        worst_index = i;
      }
    }
  }
  Outcome o;
  o.data = {{"n", cfg.n},
            {"mode", exhaustive ? "exhaustive" : "sampled"},
            {"boundaries", count},
            {"seed", exhaustive ? json(nullptr) : json(cfg.seed)},
            {"max_abs_diff", worst},
            {"worst_boundary_index", worst_index}};
  o.lines.push_back(std::string(exhaustive ? "exhaustive" : "sampled") + " over " + std::to_string(count) +
                    " boundaries, max |recursive - exact| = " + fmt(worst));
  o.check("max_abs_diff", worst, 1e-10, worst <= 1e-10);
  return o;
}

Outcome iterate(const Config& cfg, const ModelParams& params) {
  if (cfg.N < 1) throw UsageError{"--N", "needs N >= 1"};
  const auto seq = pure_deviation_sequence(params, cfg.N);
  if (!cfg.csv_path.empty()) write_sequence_csv(std::filesystem::path(cfg.csv_path), params, seq);
  std::int64_t sign_violations = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const bool even = (i + 1) % 2 == 0;
    if (even ? seq[i].sign < 0 : seq[i].sign > 0) ++sign_violations;
  }
  const auto& last = seq.back();
  Outcome o;
  o.data = {{"N", cfg.N},
            {"seed_convention", seed_convention()},
            {"eps_N", last.eps},
            {"log_abs_eps_N", last.log_abs},
            {"marginal_dev_N", marginal_deviation(params, last.eps)},
            {"sign_violations", sign_violations}};
  if (!cfg.csv_path.empty()) o.data["csv"] = cfg.csv_path;
  o.lines.push_back("eps_" + std::to_string(cfg.N) + " = " + fmt(last.eps) + " (log|eps| = " + fmt(last.log_abs) + ")");
  o.check("sign_alternation_violations", static_cast<double>(sign_violations), 0.0, sign_violations == 0);
  return o;
}

Outcome exponent(const Config& cfg, const ModelParams& params) {
  const double tol = cfg.tol > 0 ? cfg.tol : 0.02;
  const auto report = power_law_constant(params, cfg.N);
  const auto tele = telescoping_series(params, cfg.N);
  const double tele_mean = cesaro_mean(tele);
  const double tele_target = 2.0 * ratio_power_law_target(params.d());
  const double parity_gap = std::abs(report.ratio_level.estimator_value - report.ratio_level_adjacent.estimator_value) /
                            report.ratio_level.estimator_value;
  if (!cfg.csv_path.empty()) {
    write_sequence_csv(std::filesystem::path(cfg.csv_path), params, pure_deviation_sequence(params, cfg.N));
  }
  Outcome o;
  o.data = to_json(report);
  o.data["telescoping_cesaro_mean"] = {{"value", tele_mean}, {"target", tele_target}};
  o.data["parity_gap"] = parity_gap;
  o.lines.push_back("probability level: " + fmt(report.probability_level.estimator_value) + " (target " +
                    fmt(report.probability_level.target) + ")");
  o.lines.push_back("ratio level:       " + fmt(report.ratio_level.estimator_value) + " (target " +
                    fmt(report.ratio_level.target) + ")");
  o.lines.push_back("fitted exponent:   " + fmt(report.fitted_exponent));
  o.check("probability_level_rel_err", report.probability_level.relative_error, tol,
          report.probability_level.relative_error <= tol);
  o.check("ratio_level_rel_err", report.ratio_level.relative_error, tol, report.ratio_level.relative_error <= tol);
  o.check("ratio_level_adjacent_rel_err", report.ratio_level_adjacent.relative_error, tol,
          report.ratio_level_adjacent.relative_error <= tol);
  o.check("parity_gap", parity_gap, tol, parity_gap <= tol);
  return o;
}

Outcome rate(const Config& cfg, const ModelParams& params) {
  const double tol = cfg.tol > 0 ? cfg.tol : 1e-3;
  const auto report = exponential_rate(params, cfg.N);
  const double err = std::abs(report.increment.estimator_value - report.increment.target);
  Outcome o;
  o.data = to_json(report);
  o.lines.push_back("increment estimate: " + fmt(report.increment.estimator_value) + " (target " +
                    fmt(report.increment.target) + ")");
  o.lines.push_back("cesaro estimate:    " + fmt(report.cesaro.estimator_value) + " (diagnostic)");
  o.check("increment_abs_err", err, tol, err <= tol);
  return o;
}

Outcome maps_audit(const Config& cfg, const ModelParams& params) {
  const GridSpec grid{cfg.x_min, cfg.x_max, cfg.points};
  const auto report = audit_two_step(params, grid, cfg.workers);
  Outcome o;
  o.data = to_json(report);
  for (const auto& a : report.per_m) {
    o.lines.push_back("m=" + std::to_string(a.m) + ": sup (f_m o f_m)' = " + fmt(a.sup_derivative) + " at x=" +
                      fmt(a.argsup) + ", sup G_m = " + fmt(a.sup_G) + ", violations " +
                      std::to_string(a.violations.size()));
    o.check("violations_m" + std::to_string(a.m), static_cast<double>(a.violations.size()), 0.0, a.violations.empty());
  }
  return o;
}

Outcome taylor(const Config& cfg, const ModelParams& params) {
  const auto c = taylor_c123(params);
  const double d2 = static_cast<double>(params.d()) * params.d();
  const double c3_target = -(d2 - 1.0) / d2;
  const double tele = telescoping_increment(params, cfg.x);
  const double tele_target = (d2 - 1.0) / (3.0 * d2);
  Outcome o;
  o.data = to_json(c);
  o.data["c3_target"] = c3_target;
  o.data["telescoping_increment"] = {{"x", cfg.x}, {"value", tele}, {"target", tele_target}};
  o.lines.push_back("c1 = " + fmt(c.c1) + ", c2 = " + fmt(c.c2) + ", c3 = " + fmt(c.c3) + " (target " + fmt(c3_target) +
                    ")");
  o.lines.push_back("telescoping increment at x = " + fmt(cfg.x) + ": " + fmt(tele) + " (target " + fmt(tele_target) +
                    ")");
  o.check("c1_abs_err", std::abs(c.c1 - 1.0), 1e-9, std::abs(c.c1 - 1.0) <= 1e-9);
  o.check("c2_abs", std::abs(c.c2), 1e-9, std::abs(c.c2) <= 1e-9);
  o.check("c3_abs_err", std::abs(c.c3 - c3_target), 1e-9, std::abs(c.c3 - c3_target) <= 1e-9);
  o.check("telescoping_abs_err", std::abs(tele - tele_target), 1e-4, std::abs(tele - tele_target) <= 1e-4);
  return o;
}

Outcome h_max(const Config& cfg, const ModelParams& params) {
  if (cfg.rs.size() != 1) throw UsageError{"--r", "h-max takes exactly one --r"};
  const auto result = h_max_admissible(params, cfg.rs.front(), cfg.workers);
  Outcome o;
  o.data = to_json(result);
  o.data["r"] = cfg.rs.front();
  o.lines.push_back("max h over A(r) = " + fmt(result.max_value) + " over " + std::to_string(result.points) + " points");
  for (const auto& pt : result.argmax) o.lines.push_back("  argmax " + pt.pattern());
  return o;
}

Outcome expansion_probe(const Config& cfg, const ModelParams& params) {
  std::vector<double> rs = cfg.rs.empty() ? std::vector<double>{1.0 + 1e-4, 1.0 + 1e-3} : cfg.rs;
  Outcome o;
  json checks = json::array();
  for (double r : rs) {
    const auto ec = expansion_check(params, r, cfg.workers);
    checks.push_back(to_json(ec));
    o.lines.push_back("r = 1 + " + fmt(r - 1.0) + ": max h = " + fmt(ec.max_value) + ", (f o f)(r) = " +
                      fmt(ec.ff_value) + ", gap " + fmt(ec.relative_gap) +
                      (ec.unique_expected_argmax ? ", unique expected argmax" : ", argmax differs"));
    o.check("expansion_r=" + fmt(r), ec.relative_gap, kExpansionTolerance, ec.holds);
  }
  o.data["points"] = checks;
  if (cfg.sweep_max > 1.0) {
    std::vector<double> sweep;
    const double lo = std::log10(1e-4);
    const double hi = std::log10(cfg.sweep_max - 1.0);
    const std::size_t k = std::max<std::size_t>(cfg.sweep_points, 2);
    for (std::size_t i = 0; i < k; ++i) {
      sweep.push_back(1.0 + std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1)));
    }
    const auto radius = expansion_failure_radius(params, sweep, cfg.workers);
    o.data["sweep"] = {{"r_min", sweep.front()},
                       {"r_max", sweep.back()},
                       {"points", k},
                       {"first_failure", radius ? json(*radius) : json(nullptr)}};
    o.lines.push_back(radius ? "sweep: expansion first fails at r = " + fmt(*radius)
                             : "sweep: expansion holds at every probed r");
  }
  return o;
}

Outcome two_step_bound(const Config& cfg, const ModelParams& params) {
  if (cfg.n < 1) throw UsageError{"--n", "needs n >= 1"};
  const auto report = two_step_bound_check(params, cfg.n, oracle_options(cfg));
  Outcome o;
  o.data = to_json(report);
  o.lines.push_back("r*_" + std::to_string(cfg.n) + " = " + fmt(report.r_n) + ", r*_" + std::to_string(cfg.n + 2) +
                    " = " + fmt(report.r_n2));
  o.lines.push_back("max over A(r*) of h = " + fmt(report.h_bound) + ", (f o f)(r*) = " + fmt(report.ff_value) +
                    (report.ff_bound_holds ? " (holds, recorded)" : " (exceeded, recorded)"));
  o.check("r_n2_le_h_bound", report.r_n2, report.h_bound, report.h_bound_holds);
  return o;
}

Outcome frozen_search(const Config& cfg, const ModelParams& params) {
  if (cfg.n < 1) throw UsageError{"--n", "needs n >= 1"};
  const auto found = find_dominating_boundary(params, cfg.n, oracle_options(cfg));
  Outcome o;
  o.data = {{"n", cfg.n}, {"found", found.has_value()}};
  if (found) {
    o.data["result"] = to_json(*found);
    o.lines.push_back("dominating boundary found, mu[1] = " + fmt(found->marginal) + " vs pure " +
                      fmt(found->pure_marginal) + " (margin " + fmt(found->margin) + ")");
  } else {
    o.lines.push_back("no boundary beats the pure colour-1 boundary at the root");
  }
  if (cfg.expect_found) o.check("dominating_boundary_found", found ? found->margin : 0.0, 0.0, found.has_value());
  return o;
}

std::string flag_for_field(const std::string& field) {
  if (field == "boundary" || field == "csv") return field;
  return "--" + field;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Antiferromagnetic Potts model on d-ary trees: exact marginals, ratio maps, rate estimates", "pottslab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  // One Config per subcommand: CLI11 writes defaults into the bound variables
  // at registration time, so a shared struct would leak defaults across them.
  using Handler = std::function<Outcome(const Config&, const ModelParams&)>;
  std::deque<Config> configs;
  std::map<CLI::App*, std::pair<Handler, Config*>> handlers;

  const auto add = [&](const std::string& name, const std::string& desc, Handler handler) {
    auto* sub = app.add_subcommand(name, desc);
    Config& cfg = configs.emplace_back();
    sub->add_option("--d", cfg.d, "branching factor (children per vertex)")->required()->check(CLI::Range(1, 64));
    sub->add_option("--q", cfg.q, "number of colours")->required()->check(CLI::Range(2, 64));
    auto* p = sub->add_option("--p", cfg.p, "monochromatic edge weight in (0,1)");
    auto* crit = sub->add_flag("--critical", cfg.critical, "use p = 1 - q/(d+1)");
    p->excludes(crit);
    crit->excludes(p);
    sub->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
    sub->add_option("--out", cfg.out_path, "write the JSON report here");
    sub->add_flag("--json", cfg.json, "print the JSON report instead of a summary");
    handlers[sub] = {std::move(handler), &cfg};
    return std::pair<CLI::App*, Config&>{sub, cfg};
  };
  const auto add_budgets = [&](CLI::App* sub, Config& cfg) {
    sub->add_option("--config-budget", cfg.config_budget, "max interior configurations per weight computation");
    sub->add_option("--boundary-budget", cfg.boundary_budget, "max boundaries per search");
  };

  {
    auto [s, cfg] = add("oracle-check", "compare recursive marginals against exhaustive enumeration", oracle_check);
    s->add_option("--n", cfg.n, "tree height")->default_val(2);
    s->add_option("--samples", cfg.samples, "random boundaries when exhaustive is too large")->default_val(200);
    s->add_option("--exhaustive-limit", cfg.exhaustive_limit, "enumerate all boundaries up to this count")
        ->default_val(10'000);
    s->add_option("--seed", cfg.seed, "RNG seed for sampled boundaries")->default_val(1);
    add_budgets(s, cfg);
  }
  {
    auto [s, cfg] = add("iterate", "dump the pure-boundary deviation sequence", iterate);
    s->add_option("--N", cfg.N, "number of iterates")->default_val(1000);
    s->add_option("--csv", cfg.csv_path, "write n,eps,marginal_dev rows here");
  }
  {
    auto [s, cfg] = add("exponent", "critical power-law constant", exponent);
    s->add_option("--N", cfg.N, "iteration depth")->default_val(1'000'000);
    s->add_option("--tol", cfg.tol, "relative tolerance (default 0.02)");
    s->add_option("--csv", cfg.csv_path, "write the sequence as CSV");
  }
  {
    auto [s, cfg] = add("rate", "subcritical exponential decay rate", rate);
    s->add_option("--N", cfg.N, "iteration depth")->default_val(400);
    s->add_option("--tol", cfg.tol, "absolute tolerance (default 1e-3)");
  }
  {
    auto [s, cfg] = add("maps-audit", "grid audit of the two-step slope bound for every m", maps_audit);
    s->add_option("--xmin", cfg.x_min, "grid start")->default_val(1.0);
    s->add_option("--xmax", cfg.x_max, "grid end")->default_val(1e4);
    s->add_option("--points", cfg.points, "log-spaced grid points")->default_val(10'000);
  }
  {
    auto [s, cfg] = add("taylor", "derivatives of f o f at the fixed point (critical params)", taylor);
    s->add_option("--x", cfg.x, "point for the telescoping increment")->default_val(1.0 + 1e-5);
  }
  {
    auto [s, cfg] = add("h-max", "exhaustive maximum of h over A(r)", h_max);
    s->add_option("--r", cfg.rs, "ratio r >= 1")->required();
  }
  {
    auto [s, cfg] = add("expansion-probe", "check that (f o f)(r) is the max of h over A(r) near r = 1", expansion_probe);
    s->add_option("--r", cfg.rs, "ratios to check (default 1+1e-4 and 1+1e-3)");
    s->add_option("--sweep-max", cfg.sweep_max, "also sweep r up to this value and record the first failure");
    s->add_option("--sweep-points", cfg.sweep_points, "points in the sweep")->default_val(40);
  }
  {
    auto [s, cfg] = add("two-step-bound", "brute-force r*_{n+2} against max over A(r*_n) of h", two_step_bound);
    s->add_option("--n", cfg.n, "tree height")->default_val(1);
    add_budgets(s, cfg);
  }
  {
    auto [s, cfg] = add("frozen-search", "look for a boundary beating the pure one at the root", frozen_search);
    s->add_option("--n", cfg.n, "tree height")->default_val(2);
    s->add_flag("--expect-found", cfg.expect_found, "fail unless a dominating boundary exists");
    add_budgets(s, cfg);
  }

  std::vector<const char*> argv{"pottslab"};
  for (const auto& a : args) argv.push_back(a.c_str());

  const auto synopsis = [&](std::ostream& os) {
    const auto subs = app.get_subcommands();
    os << (subs.empty() ? app.help() : subs.front()->help());
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    synopsis(out);
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    synopsis(err);
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto& [handler, chosen_cfg] = handlers.at(chosen);
  const Config& cfg = *chosen_cfg;
  try {
    const ModelParams params = make_params(cfg);
    Outcome o = handler(cfg, params);

    json doc = {{"subcommand", chosen->get_name()},
                {"tool_version", tool_version()},
                {"seed_convention", seed_convention()},
                {"params", to_json(params)},
                {"result", o.data}};
    json checks = json::array();
    for (const auto& c : o.checks) {
      checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
    }
    doc["checks"] = checks;
    doc["ok"] = o.ok();
    const std::string text = doc.dump(2) + "\n";
    if (!cfg.out_path.empty()) write_text(cfg.out_path, text);

    if (cfg.json) {
      out << text;
    } else {
      out << chosen->get_name() << ": d=" << params.d() << " q=" << params.q() << " p=" << fmt(params.p()) << " ("
          << to_string(regime(params)) << ")\n";
      for (const auto& line : o.lines) out << "  " << line << '\n';
      for (const auto& c : o.checks) {
        out << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name << " = " << fmt(c.value) << " (bound "
            << fmt(c.bound) << ")\n";
      }
    }
    return o.ok() ? kExitOk : kExitCheckFailed;
  } catch (const UsageError& e) {
    err << "error: " << e.flag << ": " << e.message << "\n\n";
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    if (msg.rfind(e.field() + ": ", 0) == 0) msg.erase(0, e.field().size() + 2);
    err << "error: " << flag_for_field(e.field()) << ": " << msg << "\n\n";
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << " (raise --config-budget/--boundary-budget or the POTTSLAB_BUDGET_* variables)\n\n";
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  synopsis(err);
  return kExitUsage;
}

}  // namespace pottslab::cli
