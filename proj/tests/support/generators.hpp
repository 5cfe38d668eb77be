#pragma once

// Hand-rolled generators for property tests. Each property draws from its own
// fixed-seed engine so failures reproduce; set QHLAB_PROPERTY_SEED to explore.

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "qhlab/domain.hpp"

namespace gen {

inline uint64_t base_seed(uint64_t fallback) {
  if (const char* env = std::getenv("QHLAB_PROPERTY_SEED"); env && *env) return std::stoull(env);
  return fallback;
}

class Source {
 public:
  explicit Source(uint64_t seed) : engine_(base_seed(seed)) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool coin() { return integer(0, 1) == 1; }

  // Rejection sampling in the bounding box, kept a margin away from the boundary.
  qhlab::Vec2 point(const qhlab::Domain& domain, double margin = 0.0) {
    const auto& box = domain.bounding_box();
    for (;;) {
      const qhlab::Vec2 p{uniform(box.x_min, box.x_max), uniform(box.y_min, box.y_max)};
      if (domain.contains(p) && domain.boundary_distance(p) > margin) return p;
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct NamedDomain {
  std::string name;
  qhlab::Domain domain;
};

inline std::vector<NamedDomain> test_domains() {
  return {{"disk", qhlab::Domain::disk({0.0, 0.0}, 1.0)},
          {"rectangle", qhlab::Domain::rectangle(0.0, 1.0, 0.0, 1.0)},
          {"comb3", qhlab::Domain::comb(3)}};
}

}  // namespace gen
