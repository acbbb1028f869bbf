#pragma once

// JSON encodings of the result types, shared by the CLI and emit_report.

#include <nlohmann/json.hpp>

#include "pottslab/analysis.hpp"
#include "pottslab/boundary_opt.hpp"
#include "pottslab/exact_oracle.hpp"
#include "pottslab/maps.hpp"
#include "pottslab/model.hpp"

namespace pottslab {

nlohmann::json to_json(const ModelParams& params);
nlohmann::json to_json(const MarginalVector& mu);
nlohmann::json to_json(const BoundarySpec& xi);
nlohmann::json to_json(const RateEstimate& est);
nlohmann::json to_json(const PowerLawReport& report);
nlohmann::json to_json(const ExponentialRateReport& report);
nlohmann::json to_json(const TaylorCoeffs& coeffs);
nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const MaxRatioResult& result);
nlohmann::json to_json(const DominatingBoundary& result);
nlohmann::json to_json(const HMaxResult& result);
nlohmann::json to_json(const ExpansionCheck& check);
nlohmann::json to_json(const TwoStepBoundReport& report);
nlohmann::json to_json(const AnalysisResults& results);

}  // namespace pottslab
