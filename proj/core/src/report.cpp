#include "pottslab/report.hpp"

namespace pottslab {

using nlohmann::json;

json to_json(const ModelParams& params) {
  return {{"d", params.d()},
          {"q", params.q()},
          {"p", params.p()},
          {"A", params.A()},
          {"B", params.B()},
          {"p_c", critical_p(params.d(), params.q())},
          {"regime", std::string(to_string(regime(params)))}};
}

json to_json(const MarginalVector& mu) { return mu.probs; }

json to_json(const BoundarySpec& xi) {
  if (xi.is_pure()) return {{"pure", xi.pure_color()}};
  return {{"explicit", xi.leaf_colors()}};
}

json to_json(const RateEstimate& est) {
  return {{"estimator_value", est.estimator_value},
          {"target", est.target},
          {"n_used", est.n_used},
          {"relative_error", est.relative_error}};
}

json to_json(const PowerLawReport& report) {
  return {{"ratio_level", to_json(report.ratio_level)},
          {"probability_level", to_json(report.probability_level)},
          {"ratio_level_adjacent", to_json(report.ratio_level_adjacent)},
          {"probability_level_adjacent", to_json(report.probability_level_adjacent)},
          {"fitted_exponent", report.fitted_exponent}};
}

json to_json(const ExponentialRateReport& report) {
  return {{"increment", to_json(report.increment)}, {"cesaro", to_json(report.cesaro)}};
}

json to_json(const TaylorCoeffs& coeffs) { return {{"c1", coeffs.c1}, {"c2", coeffs.c2}, {"c3", coeffs.c3}}; }

json to_json(const AuditReport& report) {
  json per_m = json::array();
  for (const auto& a : report.per_m) {
    json violations = json::array();
    for (const auto& v : a.violations) {
      violations.push_back({{"check", v.check}, {"x", v.x}, {"value", v.value}, {"bound", v.bound}});
    }
    per_m.push_back({{"m", a.m},
                     {"sup_derivative", a.sup_derivative},
                     {"argsup", a.argsup},
                     {"sup_G", a.sup_G},
                     {"min_HK_combination", a.min_HK_combination},
                     {"points", a.points},
                     {"violations", violations}});
  }
  return {{"d", report.d},
          {"q", report.q},
          {"p", report.p},
          {"bound", report.bound},
          {"grid", {{"x_min", report.grid.x_min}, {"x_max", report.grid.x_max}, {"points", report.grid.points}}},
          {"ok", report.ok()},
          {"per_m", per_m}};
}

json to_json(const MaxRatioResult& result) {
  json witnesses = json::array();
  for (const auto& w : result.witnesses) witnesses.push_back(to_json(w));
  return {{"r_star", result.r_star}, {"witnesses", witnesses}, {"boundaries_scanned", result.boundaries_scanned}};
}

json to_json(const DominatingBoundary& result) {
  return {{"boundary", to_json(result.boundary)},
          {"marginal", result.marginal},
          {"pure_marginal", result.pure_marginal},
          {"margin", result.margin}};
}

json to_json(const HMaxResult& result) {
  json argmax = json::array();
  for (const auto& pt : result.argmax) argmax.push_back(pt.pattern());
  return {{"max_value", result.max_value},
          {"max_deviation", result.max_deviation},
          {"argmax", argmax},
          {"points", result.points}};
}

json to_json(const ExpansionCheck& check) {
  return {{"r", check.r},
          {"max_value", check.max_value},
          {"ff_value", check.ff_value},
          {"relative_gap", check.relative_gap},
          {"unique_expected_argmax", check.unique_expected_argmax},
          {"holds", check.holds},
          {"argmax_patterns", check.argmax_patterns}};
}

json to_json(const TwoStepBoundReport& report) {
  return {{"n", report.n},
          {"r_n", report.r_n},
          {"r_n2", report.r_n2},
          {"h_bound", report.h_bound},
          {"ff_value", report.ff_value},
          {"argmax_patterns", report.argmax_patterns},
          {"h_bound_holds", report.h_bound_holds},
          {"ff_bound_holds", report.ff_bound_holds}};
}

json to_json(const AnalysisResults& results) {
  json doc = {{"tool_version", tool_version()}, {"seed_convention", seed_convention()}};
  if (results.params) doc["params"] = to_json(*results.params);
  json estimates = json::array();
  for (const auto& e : results.estimates) {
    json entry = to_json(e.estimate);
    entry["name"] = e.name;
    estimates.push_back(entry);
  }
  doc["estimates"] = estimates;
  return doc;
}

}  // namespace pottslab
