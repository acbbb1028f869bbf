#include "pottslab/boundary_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pottslab/errors.hpp"
#include "pottslab/maps.hpp"
#include "pottslab/parallel.hpp"

namespace pottslab {

AdmissiblePoint::AdmissiblePoint(int d, int q, std::uint64_t bits) : d_(d), q_(q), bits_(bits) {
  if (d < 1 || q < 2) throw ValidationError("point", "need d >= 1 and q >= 2");
  if (width() > 63 || (width() < 64 && (bits >> width()) != 0)) {
    throw ValidationError("point", "bit pattern wider than d(q-1) = " + std::to_string(width()));
  }
}

AdmissiblePoint AdmissiblePoint::expansion_maximizer(int d, int q) {
  std::uint64_t bits = 0;
  for (int u = 0; u < d; ++u) bits |= std::uint64_t{1} << (u * (q - 1));
  return AdmissiblePoint(d, q, bits);
}

bool AdmissiblePoint::theta(int u, int k) const {
  return ((bits_ >> ((u - 1) * (q_ - 1) + (k - 2))) & 1u) != 0;
}

AdmissiblePoint AdmissiblePoint::permute_rows(std::span<const int> perm) const {
  std::uint64_t out = 0;
  for (int u = 1; u <= d_; ++u) {
    const int src = perm[static_cast<std::size_t>(u - 1)];
    for (int k = 2; k <= q_; ++k) {
      if (theta(src, k)) out |= std::uint64_t{1} << ((u - 1) * (q_ - 1) + (k - 2));
    }
  }
  return AdmissiblePoint(d_, q_, out);
}

std::string AdmissiblePoint::pattern() const {
  std::string out;
  for (int u = 1; u <= d_; ++u) {
    if (u > 1) out += '|';
    for (int k = 2; k <= q_; ++k) out += theta(u, k) ? '1' : '0';
  }
  return out;
}

namespace {

HValue h_direct(const ModelParams& params, const AdmissiblePoint& point, double r) {
  const int d = params.d();
  const int q = params.q();
  const double pm1 = params.p() - 1.0;
  HValue out;
  out.V.assign(static_cast<std::size_t>(q), 1.0);
  std::vector<double> x(static_cast<std::size_t>(q));
  for (int u = 1; u <= d; ++u) {
    x[0] = 1.0;
    double S = 1.0;
    for (int k = 2; k <= q; ++k) {
      x[static_cast<std::size_t>(k - 1)] = point.theta(u, k) ? r : 1.0;
      S += x[static_cast<std::size_t>(k - 1)];
    }
    const double base = S + pm1 * x[0];
    for (int j = 1; j <= q; ++j) out.V[static_cast<std::size_t>(j - 1)] *= (S + pm1 * x[static_cast<std::size_t>(j - 1)]) / base;
  }
  double sumV = 0.0;
  for (double v : out.V) sumV += v;
  out.U = (sumV + pm1 * out.V[1]) / (sumV + pm1 * out.V[0]);
  out.value = std::pow(out.U, d);
  out.deviation = out.value - 1.0;
  return out;
}

/// Same quantities with every V, U carried as (. - 1):
///   V^u_j - 1 = (p-1)(r-1) theta^u_j / (B + (r-1) T_u),  T_u = sum_k theta^u_k,
///   U - 1     = (p-1) W_2 / (B + sum_j W_j),             W_j = V_j - 1.
HValue h_deviation(const ModelParams& params, const AdmissiblePoint& point, double r) {
  const int d = params.d();
  const int q = params.q();
  const double pm1 = params.p() - 1.0;
  const double eps = r - 1.0;
  std::vector<double> W(static_cast<std::size_t>(q), 0.0);
  for (int u = 1; u <= d; ++u) {
    int T = 0;
    for (int k = 2; k <= q; ++k) T += point.theta(u, k) ? 1 : 0;
    const double v = pm1 * eps / (params.B() + eps * T);
    for (int j = 2; j <= q; ++j) {
      if (!point.theta(u, j)) continue;
      double& w = W[static_cast<std::size_t>(j - 1)];
      w = w + v + w * v;
    }
  }
  double sumW = 0.0;
  for (double w : W) sumW += w;
  const double u = pm1 * W[1] / (params.B() + sumW);
  double geometric = 0.0;
  for (int i = d - 1; i >= 0; --i) geometric = geometric * (1.0 + u) + 1.0;

  HValue out;
  out.V.resize(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) out.V[static_cast<std::size_t>(j)] = 1.0 + W[static_cast<std::size_t>(j)];
  out.U = 1.0 + u;
  out.deviation = u * geometric;
  out.value = 1.0 + out.deviation;
  return out;
}

}  // namespace

HValue h_eval(const ModelParams& params, const AdmissiblePoint& point, double r) {
  if (!(r >= 1.0)) throw ValidationError("r", "admissible domain needs r >= 1");
  if (point.d() != params.d() || point.q() != params.q()) throw ValidationError("point", "shape does not match (d, q)");
  if (r - 1.0 < kDeviationBand) return h_deviation(params, point, r);
  return h_direct(params, point, r);
}

HMaxResult h_max_admissible(const ModelParams& params, double r, unsigned workers) {
  const int width = params.d() * (params.q() - 1);
  if (width > kMaxAdmissibleBits) {
    throw BudgetExceeded("admissible-domain enumeration", std::ldexp(1.0L, width), std::uint64_t{1} << kMaxAdmissibleBits);
  }
  const std::uint64_t points = std::uint64_t{1} << width;

  struct Partial {
    double best = -std::numeric_limits<double>::infinity();
    double best_value = 0.0;
    std::vector<std::pair<double, std::uint64_t>> near;
  };
  std::vector<Partial> partial(64);
  parallel_chunks(points, partial.size(), workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    auto& local = partial[chunk];
    for (std::uint64_t bits = begin; bits < end; ++bits) {
      const auto h = h_eval(params, AdmissiblePoint(params.d(), params.q(), bits), r);
      if (h.deviation > local.best) {
        local.best = h.deviation;
        local.best_value = h.value;
        const double floor = local.best - kArgmaxTieTolerance * std::abs(local.best);
        std::erase_if(local.near, [&](const auto& c) { return c.first < floor; });
      }
      if (h.deviation >= local.best - kArgmaxTieTolerance * std::abs(local.best)) local.near.emplace_back(h.deviation, bits);
    }
  });

  HMaxResult out;
  out.points = points;
  out.max_deviation = -std::numeric_limits<double>::infinity();
  for (const auto& local : partial) {
    if (local.best > out.max_deviation) {
      out.max_deviation = local.best;
      out.max_value = local.best_value;
    }
  }
  // Ties are judged on h - 1, which the deviation form resolves far below 1e-12.
  const double floor = out.max_deviation - kArgmaxTieTolerance * std::abs(out.max_deviation);
  for (const auto& local : partial) {
    for (const auto& [dev, bits] : local.near) {
      if (dev >= floor) out.argmax.emplace_back(params.d(), params.q(), bits);
    }
  }
  return out;
}

ExpansionCheck expansion_check(const ModelParams& params, double r, unsigned workers) {
  const auto best = h_max_admissible(params, r, workers);
  const MapParams mp(params, 1);
  const double eps = r - 1.0;
  const double ff_dev = eps < kDeviationBand ? two_step_deviation(mp, eps) : two_step_eval(mp, r) - 1.0;

  ExpansionCheck out;
  out.r = r;
  out.max_value = best.max_value;
  out.ff_value = 1.0 + ff_dev;
  out.relative_gap = std::abs(best.max_deviation - ff_dev) / out.ff_value;
  out.unique_expected_argmax =
      best.argmax.size() == 1 && best.argmax.front() == AdmissiblePoint::expansion_maximizer(params.d(), params.q());
  for (const auto& pt : best.argmax) out.argmax_patterns.push_back(pt.pattern());
  out.holds = out.unique_expected_argmax && out.relative_gap <= kExpansionTolerance;
  return out;
}

bool verify_expansion(const ModelParams& params, double r, unsigned workers) {
  return expansion_check(params, r, workers).holds;
}

std::optional<double> expansion_failure_radius(const ModelParams& params, std::span<const double> rs, unsigned workers) {
  for (double r : rs) {
    if (!expansion_check(params, r, workers).holds) return r;
  }
  return std::nullopt;
}

double hhat_eval(const ModelParams& params, std::span<const std::vector<double>> vectors) {
  const int d = params.d();
  const int q = params.q();
  const double pm1 = params.p() - 1.0;
  if (vectors.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
    throw ValidationError("vectors", "need d^2 = " + std::to_string(d * d) + " vectors");
  }
  double out = 1.0;
  std::vector<double> V(static_cast<std::size_t>(q));
  for (int v = 0; v < d; ++v) {
    std::fill(V.begin(), V.end(), 1.0);
    for (int u = 0; u < d; ++u) {
      const auto& x = vectors[static_cast<std::size_t>(v * d + u)];
      if (x.size() != static_cast<std::size_t>(q)) throw ValidationError("vectors", "each vector needs q entries");
      double S = 0.0;
      for (double xk : x) S += xk;
      const double base = S + pm1 * x[0];
      for (int j = 0; j < q; ++j) V[static_cast<std::size_t>(j)] *= (S + pm1 * x[static_cast<std::size_t>(j)]) / base;
    }
    double sumV = 0.0;
    for (double vj : V) sumV += vj;
    out *= (sumV + pm1 * V[1]) / (sumV + pm1 * V[0]);
  }
  return out;
}

double hhat_consistency(const ModelParams& params, std::span<const std::vector<double>> subtree_ratio_vectors) {
  return hhat_eval(params, subtree_ratio_vectors);
}

TwoStepBoundReport two_step_bound_check(const ModelParams& params, int n, const OracleOptions& options) {
  TwoStepBoundReport out;
  out.n = n;
  out.r_n = max_ratio_exact(params, n, options).r_star;
  out.r_n2 = max_ratio_exact(params, n + 2, options).r_star;
  const auto best = h_max_admissible(params, out.r_n, options.workers);
  out.h_bound = best.max_value;
  for (const auto& pt : best.argmax) out.argmax_patterns.push_back(pt.pattern());
  out.ff_value = two_step_eval(MapParams(params, 1), out.r_n);
  out.h_bound_holds = out.r_n2 <= out.h_bound * (1.0 + kBoundSlack);
  out.ff_bound_holds = out.r_n2 <= out.ff_value * (1.0 + kBoundSlack);
  return out;
}

}  // namespace pottslab
