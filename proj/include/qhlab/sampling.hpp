#pragma once

// Seeded sampling. Item i of a sample set draws from its own stream derived
// from (seed, stream, i), so a set of n samples is a prefix of the set of
// n + 1 samples and results do not depend on evaluation order.

#include <cstdint>
#include <random>
#include <vector>

#include "qhlab/domain.hpp"

namespace qhlab {

class MetricGraph;

uint64_t derive_seed(uint64_t seed, uint64_t stream, uint64_t index);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Stream identifiers, one per kind of sample set.
enum class SampleStream : uint64_t {
  kPoints = 1,
  kPairs = 2,
  kTriangles = 3,
  kBoundary = 4,
  kJitter = 5,
  kModels = 6,
};

struct StratifiedOptions {
  /// Number of geometric delta bands between the domain's max delta and the floor.
  int bands = 6;
  /// Smallest delta sampled, as a fraction of the max delta.
  double floor_fraction = 0.05;
};

/// Points in the domain whose delta-level (band) is chosen uniformly, so
/// thin shells near the boundary get as many samples as the bulk. Depends
/// only on the domain, the seed, the stream and the index.
Vec2 stratified_point(const Domain& domain, uint64_t seed, SampleStream stream, uint64_t index,
                      const StratifiedOptions& options = {});

/// Snapped stratified samples; item i is the node nearest stratified_point(i).
std::vector<int> stratified_nodes(const MetricGraph& graph, int n, uint64_t seed, SampleStream stream,
                                  uint64_t first_index = 0, const StratifiedOptions& options = {});

/// Uniformly distributed points of the domain.
Vec2 uniform_point(const Domain& domain, uint64_t seed, SampleStream stream, uint64_t index);

}  // namespace qhlab
