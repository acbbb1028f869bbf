#include "pottslab/model.hpp"

#include <cmath>
#include <string>

#include "pottslab/errors.hpp"

namespace pottslab {

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Supercritical:
      return "supercritical";
    case Regime::Critical:
      return "critical";
    case Regime::Subcritical:
      return "subcritical";
  }
  return "unknown";
}

ModelParams::ModelParams(int d, int q, double p) : d_(d), q_(q), p_(p) {
  if (d < 1) throw ValidationError("d", "branching factor must be >= 1, got " + std::to_string(d));
  if (q < 2) throw ValidationError("q", "colour count must be >= 2, got " + std::to_string(q));
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("p", "weight must lie in the open interval (0,1), got " + std::to_string(p));
  A_ = d * (1.0 - p);
  B_ = p + q - 1.0;
}

ModelParams new_params(int d, int q, double p) { return ModelParams(d, q, p); }

double critical_p(int d, int q) { return 1.0 - static_cast<double>(q) / (d + 1); }

Regime regime(const ModelParams& params) {
  const double pc = critical_p(params.d(), params.q());
  const double gap = params.p() - pc;
  if (std::abs(gap) <= kCriticalTolerance) return Regime::Critical;
  return gap > 0 ? Regime::Subcritical : Regime::Supercritical;
}

ModelParams critical_params(int d, int q) {
  const double pc = critical_p(d, q);
  if (!(pc > 0.0)) {
    throw ValidationError("q", "critical weight 1 - q/(d+1) is not positive for d=" + std::to_string(d) +
                                   ", q=" + std::to_string(q) +
                                   " (q = d+1 is the zero-temperature proper-colouring case)");
  }
  return ModelParams(d, q, pc);
}

}  // namespace pottslab
