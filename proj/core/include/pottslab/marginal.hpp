#pragma once

#include <vector>

namespace pottslab {

/// Root-spin distribution. probs[c-1] is the probability of colour c.
struct MarginalVector {
  std::vector<double> probs;

  double color(int c) const { return probs.at(static_cast<std::size_t>(c - 1)); }
  int q() const noexcept { return static_cast<int>(probs.size()); }
};

}  // namespace pottslab
