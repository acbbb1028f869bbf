#include "pottslab/recursion.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "pottslab/errors.hpp"
#include "pottslab/maps.hpp"
#include "pottslab/parallel.hpp"

namespace pottslab {

namespace {

void normalize_max(double* w, int q) {
  const double top = *std::max_element(w, w + q);
  for (int i = 0; i < q; ++i) w[i] /= top;
}

/// Parent weight vector from the messages of its d children.
void combine(const double* children, int d, int q, double pm1, double* out) {
  std::fill(out, out + q, 1.0);
  for (int c = 0; c < d; ++c) {
    const double* child = children + static_cast<std::ptrdiff_t>(c) * q;
    double total = 0.0;
    for (int i = 0; i < q; ++i) total += child[i];
    for (int i = 0; i < q; ++i) out[i] *= total + pm1 * child[i];
  }
  normalize_max(out, q);
}

std::vector<double> pure_message(const ModelParams& params, int n, int color) {
  const int q = params.q();
  const int d = params.d();
  const double pm1 = params.p() - 1.0;
  std::vector<double> message(static_cast<std::size_t>(q), 0.0);
  message[static_cast<std::size_t>(color - 1)] = 1.0;
  std::vector<double> children(static_cast<std::size_t>(q) * static_cast<std::size_t>(d));
  std::vector<double> next(static_cast<std::size_t>(q));
  for (int level = 0; level < n; ++level) {
    for (int c = 0; c < d; ++c) std::copy(message.begin(), message.end(), children.begin() + c * q);
    combine(children.data(), d, q, pm1, next.data());
    message.swap(next);
  }
  return message;
}

std::vector<double> explicit_message(const ModelParams& params, int n, const std::vector<int>& leaf_colors,
                                     const RecursionOptions& options) {
  const int q = params.q();
  const auto d = static_cast<std::uint64_t>(params.d());
  const double pm1 = params.p() - 1.0;
  const std::uint64_t leaves = leaf_count(params.d(), n);
  if (static_cast<long double>(n) * static_cast<long double>(leaves) > static_cast<long double>(options.size_cap)) {
    throw BudgetExceeded("recursive sweep (n * d^n)", static_cast<long double>(n) * leaves, options.size_cap);
  }

  // Depth n-1: a parent of leaves gets p^(number of children with colour i).
  std::uint64_t width = leaves / d;
  std::vector<double> level(width * static_cast<std::uint64_t>(q));
  parallel_chunks(width, 64, options.workers, [&](std::size_t, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t j = begin; j < end; ++j) {
      double* w = &level[j * static_cast<std::uint64_t>(q)];
      std::fill(w, w + q, 1.0);
      for (std::uint64_t c = 0; c < d; ++c) w[leaf_colors[j * d + c] - 1] *= params.p();
      normalize_max(w, q);
    }
  });

  for (int depth = n - 1; depth > 0; --depth) {
    const std::uint64_t parents = width / d;
    std::vector<double> up(parents * static_cast<std::uint64_t>(q));
    parallel_chunks(parents, 64, options.workers, [&](std::size_t, std::uint64_t begin, std::uint64_t end) {
      for (std::uint64_t j = begin; j < end; ++j) {
        combine(&level[j * d * static_cast<std::uint64_t>(q)], params.d(), q, pm1, &up[j * static_cast<std::uint64_t>(q)]);
      }
    });
    level.swap(up);
    width = parents;
  }
  return level;
}

}  // namespace

std::vector<double> root_message(const ModelParams& params, int n, const BoundarySpec& xi,
                                 const RecursionOptions& options) {
  if (n < 1) throw ValidationError("n", "tree height must be >= 1");
  xi.validate(params, n);
  if (xi.is_pure()) return pure_message(params, n, xi.pure_color());
  return explicit_message(params, n, xi.leaf_colors(), options);
}

MarginalVector root_marginals_recursive(const ModelParams& params, int n, const BoundarySpec& xi,
                                        const RecursionOptions& options) {
  auto w = root_message(params, n, xi, options);
  double total = 0.0;
  for (double wi : w) total += wi;
  for (double& wi : w) wi /= total;
  return MarginalVector{std::move(w)};
}

double ratio_of(const ModelParams& params, int n, const BoundarySpec& xi, const RecursionOptions& options) {
  const auto w = root_message(params, n, xi, options);
  return w[1] / w[0];
}

Deviation Deviation::from_eps(double eps) {
  Deviation out;
  out.eps = eps;
  out.sign = eps > 0 ? 1 : (eps < 0 ? -1 : 0);
  out.log_abs = eps == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(eps));
  return out;
}

Deviation step(const ModelParams& params, const Deviation& current) {
  if (current.sign == 0) return current;
  const MapParams mp(params, 1);
  const double slope = f_m_slope(mp, current.eps);
  Deviation next;
  next.eps = slope * current.eps;
  next.sign = -current.sign;
  if (std::abs(next.eps) >= DBL_MIN) {
    next.log_abs = std::log(std::abs(next.eps));
  } else {
    next.log_abs = current.log_abs + std::log(std::abs(slope));
  }
  return next;
}

std::vector<Deviation> pure_deviation_sequence(const ModelParams& params, std::int64_t N) {
  if (N < 1) throw ValidationError("N", "sequence length must be >= 1");
  std::vector<Deviation> seq;
  seq.reserve(static_cast<std::size_t>(N));
  seq.push_back(Deviation::from_eps(std::pow(params.p(), params.d()) - 1.0));
  for (std::int64_t k = 1; k < N; ++k) seq.push_back(step(params, seq.back()));
  return seq;
}

MarginalVector pure_marginal_from(const ModelParams& params, const Deviation& dev, int color) {
  const int q = params.q();
  if (color < 1 || color > q) throw ValidationError("color", "colour outside [1, q]");
  const double denom = q + dev.eps;
  MarginalVector out;
  out.probs.assign(static_cast<std::size_t>(q), 1.0 / denom);
  out.probs[static_cast<std::size_t>(color - 1)] = (1.0 + dev.eps) / denom;
  return out;
}

MarginalVector pure_marginal(const ModelParams& params, int n, int color) {
  if (n < 1) throw ValidationError("n", "tree height must be >= 1");
  return pure_marginal_from(params, pure_deviation_sequence(params, n).back(), color);
}

double marginal_deviation(const ModelParams& params, double eps) {
  const double q = params.q();
  return (q - 1.0) * eps / (q * (q + eps));
}

double log_abs_marginal_deviation(const ModelParams& params, const Deviation& dev) {
  const double q = params.q();
  return dev.log_abs + std::log((q - 1.0) / (q * (q + dev.eps)));
}

}  // namespace pottslab
