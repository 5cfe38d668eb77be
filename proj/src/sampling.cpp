#include "qhlab/sampling.hpp"

#include <cmath>

#include "qhlab/error.hpp"
#include "qhlab/metric_graph.hpp"

namespace qhlab {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr int kMaxAttempts = 1 << 16;

Vec2 random_box_point(const BoundingBox& box, Rng& rng) {
  return {rng.uniform(box.x_min, box.x_max), rng.uniform(box.y_min, box.y_max)};
}

}  // namespace

uint64_t derive_seed(uint64_t seed, uint64_t stream, uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidParameter, "empty range");
  // Rejection keeps the result unbiased.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

Vec2 uniform_point(const Domain& domain, uint64_t seed, SampleStream stream, uint64_t index) {
  Rng rng(derive_seed(seed, static_cast<uint64_t>(stream), index));
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Vec2 p = random_box_point(domain.bounding_box(), rng);
    if (domain.contains(p)) return p;
  }
  throw Error(ErrorCode::kInternal, "rejection sampling failed to hit the domain");
}

Vec2 stratified_point(const Domain& domain, uint64_t seed, SampleStream stream, uint64_t index,
                      const StratifiedOptions& options) {
  if (options.bands < 1 || !(options.floor_fraction > 0.0) || options.floor_fraction >= 1.0) {
    throw Error(ErrorCode::kInvalidParameter, "invalid stratification options");
  }
  Rng rng(derive_seed(seed, static_cast<uint64_t>(stream), index));
  const double top = domain.max_delta_estimate();
  const double ratio = std::pow(options.floor_fraction, 1.0 / options.bands);
  const int band = static_cast<int>(rng.below(options.bands));
  const double hi = top * std::pow(ratio, band);
  const double lo = hi * ratio;
  Vec2 fallback{};
  bool have_fallback = false;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Vec2 p = random_box_point(domain.bounding_box(), rng);
    if (!domain.contains(p)) continue;
    const double delta = domain.boundary_distance(p);
    if (delta >= lo && delta <= hi) return p;
    if (!have_fallback && delta >= lo) {
      fallback = p;
      have_fallback = true;
    }
  }
  if (have_fallback) return fallback;
  throw Error(ErrorCode::kInternal, "stratified sampling failed to hit the domain");
}

std::vector<int> stratified_nodes(const MetricGraph& graph, int n, uint64_t seed, SampleStream stream,
                                  uint64_t first_index, const StratifiedOptions& options) {
  std::vector<int> nodes;
  nodes.reserve(n > 0 ? n : 0);
  for (int i = 0; i < n; ++i) {
    nodes.push_back(graph.snap(stratified_point(graph.domain(), seed, stream, first_index + i, options)));
  }
  return nodes;
}

}  // namespace qhlab
