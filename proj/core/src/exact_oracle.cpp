#include "pottslab/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pottslab/errors.hpp"
#include "pottslab/parallel.hpp"

namespace pottslab {

namespace {

constexpr std::size_t kChunks = 256;

long double ipow(long double base, std::uint64_t exp) {
  long double out = 1.0L;
  for (std::uint64_t i = 0; i < exp; ++i) out *= base;
  return out;
}

/// Interior vertices in breadth-first order; the last `bottom` of them are the
/// parents of the leaves.
struct TreeLayout {
  int d;
  int q;
  int n;
  std::uint64_t interior;
  std::uint64_t leaves;
  std::uint64_t bottom;          ///< vertices at depth n-1
  std::uint64_t bottom_offset;   ///< index of the first depth-(n-1) vertex
  std::vector<std::int64_t> parent;
  std::uint64_t edges;

  TreeLayout(const ModelParams& params, int height)
      : d(params.d()), q(params.q()), n(height), interior(interior_count(d, n)), leaves(leaf_count(d, n)) {
    if (n < 1) throw ValidationError("n", "tree height must be >= 1");
    bottom = leaf_count(d, n - 1);
    bottom_offset = interior - bottom;
    parent.assign(interior, -1);
    std::uint64_t offset = 0;
    std::uint64_t width = 1;
    for (int level = 1; level < n; ++level) {
      const std::uint64_t next = offset + width;
      for (std::uint64_t j = 0; j < width * static_cast<std::uint64_t>(d); ++j) {
        parent[next + j] = static_cast<std::int64_t>(offset + j / static_cast<std::uint64_t>(d));
      }
      offset = next;
      width *= static_cast<std::uint64_t>(d);
    }
    edges = interior + leaves - 1;
  }

  /// match[j * q + c] = number of leaves below bottom vertex j with colour c+1.
  std::vector<std::uint32_t> leaf_matches(const std::vector<int>& leaf_colors) const {
    std::vector<std::uint32_t> match(bottom * static_cast<std::uint64_t>(q), 0);
    for (std::uint64_t leaf = 0; leaf < leaves; ++leaf) {
      const std::uint64_t j = leaf / static_cast<std::uint64_t>(d);
      ++match[j * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(leaf_colors[leaf] - 1)];
    }
    return match;
  }
};

std::uint64_t checked_configs(const TreeLayout& layout, const OracleOptions& options) {
  const long double required = ipow(layout.q, layout.interior);
  if (required > static_cast<long double>(options.config_budget)) {
    throw BudgetExceeded("interior configuration enumeration", required, options.config_budget);
  }
  return static_cast<std::uint64_t>(required);
}

std::uint64_t checked_boundaries(const TreeLayout& layout, const OracleOptions& options) {
  const long double required = ipow(layout.q, layout.leaves);
  if (required > static_cast<long double>(options.boundary_budget)) {
    throw BudgetExceeded("boundary enumeration", required, options.boundary_budget);
  }
  return static_cast<std::uint64_t>(required);
}

std::vector<double> powers(double p, std::uint64_t max_exp) {
  std::vector<double> out(max_exp + 1);
  for (std::uint64_t e = 0; e <= max_exp; ++e) out[e] = std::pow(p, static_cast<double>(e));
  return out;
}

/// hist[c * (edges+1) + e] -> weights, summing exponents in ascending order.
std::vector<double> weights_from_histogram(const std::vector<std::uint64_t>& hist, int q, std::uint64_t edges,
                                           const std::vector<double>& pow_table) {
  std::vector<double> w(static_cast<std::size_t>(q), 0.0);
  const std::uint64_t stride = edges + 1;
  for (int c = 0; c < q; ++c) {
    double acc = 0.0;
    for (std::uint64_t e = 0; e <= edges; ++e) {
      const std::uint64_t count = hist[static_cast<std::uint64_t>(c) * stride + e];
      if (count != 0) acc += static_cast<double>(count) * pow_table[e];
    }
    w[static_cast<std::size_t>(c)] = acc;
  }
  return w;
}

/// Direct odometer walk over [begin, end) of the configuration index space,
/// root as the most significant digit.
void enumerate_range(const TreeLayout& layout, const std::vector<std::uint32_t>& match, std::uint64_t begin,
                     std::uint64_t end, std::vector<std::uint64_t>& hist) {
  const auto q = static_cast<std::uint64_t>(layout.q);
  const std::uint64_t stride = layout.edges + 1;
  std::vector<int> col(layout.interior);
  std::uint64_t rest = begin;
  for (std::uint64_t v = layout.interior; v-- > 0;) {
    col[v] = static_cast<int>(rest % q);
    rest /= q;
  }
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    std::uint64_t mono = 0;
    for (std::uint64_t v = 1; v < layout.interior; ++v) {
      mono += col[v] == col[static_cast<std::uint64_t>(layout.parent[v])] ? 1 : 0;
    }
    for (std::uint64_t j = 0; j < layout.bottom; ++j) {
      mono += match[j * q + static_cast<std::uint64_t>(col[layout.bottom_offset + j])];
    }
    ++hist[static_cast<std::uint64_t>(col[0]) * stride + mono];
    for (std::uint64_t v = layout.interior; v-- > 0;) {
      if (++col[v] < layout.q) break;
      col[v] = 0;
    }
  }
}

/// Every interior configuration grouped by (root colour, colours of the
/// depth-(n-1) vertices) with a histogram of interior monochromatic edges.
/// Leaf edges only see the depth-(n-1) colours, so one boundary is scored by
/// walking q * q^bottom groups instead of all q^interior configurations.
class ConfigDigest {
 public:
  ConfigDigest(const TreeLayout& layout, std::uint64_t configs, unsigned workers) : layout_(layout) {
    const auto q = static_cast<std::uint64_t>(layout.q);
    tuples_ = static_cast<std::uint64_t>(ipow(layout.q, layout.bottom));
    width_ = layout.interior;  // interior edge count is interior - 1
    counts_.assign(q * tuples_ * width_, 0);

    std::vector<std::vector<std::uint64_t>> partial(kChunks);
    parallel_chunks(configs, kChunks, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
      auto& local = partial[chunk];
      local.assign(counts_.size(), 0);
      std::vector<int> col(layout.interior);
      std::uint64_t rest = begin;
      for (std::uint64_t v = layout.interior; v-- > 0;) {
        col[v] = static_cast<int>(rest % q);
        rest /= q;
      }
      for (std::uint64_t idx = begin; idx < end; ++idx) {
        std::uint64_t mono = 0;
        for (std::uint64_t v = 1; v < layout.interior; ++v) {
          mono += col[v] == col[static_cast<std::uint64_t>(layout.parent[v])] ? 1 : 0;
        }
        std::uint64_t tuple = 0;
        for (std::uint64_t j = 0; j < layout.bottom; ++j) {
          tuple = tuple * q + static_cast<std::uint64_t>(col[layout.bottom_offset + j]);
        }
        ++local[(static_cast<std::uint64_t>(col[0]) * tuples_ + tuple) * width_ + mono];
        for (std::uint64_t v = layout.interior; v-- > 0;) {
          if (++col[v] < layout.q) break;
          col[v] = 0;
        }
      }
    });
    for (const auto& local : partial) {
      if (local.empty()) continue;
      for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += local[i];
    }
  }

  std::vector<std::uint64_t> histogram(const std::vector<std::uint32_t>& match) const {
    const auto q = static_cast<std::uint64_t>(layout_.q);
    const std::uint64_t stride = layout_.edges + 1;
    std::vector<std::uint64_t> hist(q * stride, 0);
    std::vector<std::uint64_t> digits(layout_.bottom, 0);
    for (std::uint64_t tuple = 0; tuple < tuples_; ++tuple) {
      std::uint64_t leaf_mono = 0;
      for (std::uint64_t j = 0; j < layout_.bottom; ++j) leaf_mono += match[j * q + digits[j]];
      for (std::uint64_t root = 0; root < q; ++root) {
        const std::uint64_t* row = &counts_[(root * tuples_ + tuple) * width_];
        for (std::uint64_t e = 0; e < width_; ++e) {
          if (row[e] != 0) hist[root * stride + e + leaf_mono] += row[e];
        }
      }
      for (std::uint64_t j = layout_.bottom; j-- > 0;) {
        if (++digits[j] < q) break;
        digits[j] = 0;
      }
    }
    return hist;
  }

 private:
  const TreeLayout& layout_;
  std::uint64_t tuples_ = 0;
  std::uint64_t width_ = 0;
  std::vector<std::uint64_t> counts_;
};

template <class Score>
struct Candidate {
  Score score;
  std::uint64_t index;
};

}  // namespace

MarginalVector RootWeights::normalized() const {
  MarginalVector out;
  out.probs.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out.probs[i] = w[i] / Z;
  return out;
}

std::vector<int> boundary_from_index(std::uint64_t index, int q, std::uint64_t leaves) {
  std::vector<int> colors(leaves);
  for (std::uint64_t leaf = leaves; leaf-- > 0;) {
    colors[leaf] = static_cast<int>(index % static_cast<std::uint64_t>(q)) + 1;
    index /= static_cast<std::uint64_t>(q);
  }
  return colors;
}

RootWeights root_weights_exact(const ModelParams& params, int n, const BoundarySpec& xi, const OracleOptions& options) {
  xi.validate(params, n);
  const TreeLayout layout(params, n);
  const std::uint64_t configs = checked_configs(layout, options);
  const auto match = layout.leaf_matches(xi.materialize(params.d(), n));

  const std::uint64_t stride = layout.edges + 1;
  const std::size_t hist_size = static_cast<std::size_t>(params.q()) * stride;
  std::vector<std::vector<std::uint64_t>> partial(kChunks);
  parallel_chunks(configs, kChunks, options.workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    partial[chunk].assign(hist_size, 0);
    enumerate_range(layout, match, begin, end, partial[chunk]);
  });
  std::vector<std::uint64_t> hist(hist_size, 0);
  for (const auto& local : partial) {
    if (local.empty()) continue;
    for (std::size_t i = 0; i < hist_size; ++i) hist[i] += local[i];
  }

  RootWeights out;
  out.w = weights_from_histogram(hist, params.q(), layout.edges, powers(params.p(), layout.edges));
  out.Z = 0.0;
  for (double wi : out.w) out.Z += wi;
  return out;
}

MarginalVector root_marginals_exact(const ModelParams& params, int n, const BoundarySpec& xi,
                                    const OracleOptions& options) {
  return root_weights_exact(params, n, xi, options).normalized();
}

MaxRatioResult max_ratio_exact(const ModelParams& params, int n, const OracleOptions& options) {
  const TreeLayout layout(params, n);
  const std::uint64_t boundaries = checked_boundaries(layout, options);
  const std::uint64_t configs = checked_configs(layout, options);
  const ConfigDigest digest(layout, configs, options.workers);
  const auto pow_table = powers(params.p(), layout.edges);

  struct Partial {
    double best = -1.0;
    std::vector<Candidate<double>> near;
  };
  std::vector<Partial> partial(kChunks);
  parallel_chunks(boundaries, kChunks, options.workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    auto& local = partial[chunk];
    for (std::uint64_t b = begin; b < end; ++b) {
      const auto colors = boundary_from_index(b, params.q(), layout.leaves);
      const auto w = weights_from_histogram(digest.histogram(layout.leaf_matches(colors)), params.q(), layout.edges, pow_table);
      const double ratio = w[1] / w[0];
      if (ratio > local.best) {
        local.best = ratio;
        std::erase_if(local.near, [&](const auto& c) { return c.score < local.best * (1.0 - kArgmaxTieTolerance); });
      }
      if (ratio >= local.best * (1.0 - kArgmaxTieTolerance)) local.near.push_back({ratio, b});
    }
  });

  MaxRatioResult out;
  out.boundaries_scanned = boundaries;
  for (const auto& local : partial) out.r_star = std::max(out.r_star, local.best);
  const double floor = out.r_star * (1.0 - kArgmaxTieTolerance);
  for (const auto& local : partial) {
    for (const auto& c : local.near) {
      if (c.score >= floor) {
        out.witnesses.push_back(BoundarySpec::explicit_colors(boundary_from_index(c.index, params.q(), layout.leaves)));
      }
    }
  }
  return out;
}

std::optional<DominatingBoundary> find_dominating_boundary(const ModelParams& params, int n,
                                                           const OracleOptions& options) {
  const TreeLayout layout(params, n);
  const std::uint64_t boundaries = checked_boundaries(layout, options);
  const std::uint64_t configs = checked_configs(layout, options);
  const ConfigDigest digest(layout, configs, options.workers);
  const auto pow_table = powers(params.p(), layout.edges);

  const auto marginal_of_one = [&](const std::vector<int>& colors) {
    const auto w = weights_from_histogram(digest.histogram(layout.leaf_matches(colors)), params.q(), layout.edges, pow_table);
    return w[0] / std::accumulate(w.begin(), w.end(), 0.0);
  };

  std::vector<Candidate<double>> best(kChunks, Candidate<double>{-1.0, 0});
  parallel_chunks(boundaries, kChunks, options.workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t b = begin; b < end; ++b) {
      const double mu = marginal_of_one(boundary_from_index(b, params.q(), layout.leaves));
      if (mu > best[chunk].score) best[chunk] = {mu, b};
    }
  });
  Candidate<double> winner{-1.0, 0};
  for (const auto& c : best) {
    if (c.score > winner.score) winner = c;
  }

  const double pure = marginal_of_one(std::vector<int>(layout.leaves, 1));
  if (!(winner.score > pure)) return std::nullopt;
  return DominatingBoundary{BoundarySpec::explicit_colors(boundary_from_index(winner.index, params.q(), layout.leaves)),
                            winner.score, pure, winner.score - pure};
}

}  // namespace pottslab
