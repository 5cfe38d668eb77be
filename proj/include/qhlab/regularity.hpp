#pragma once

// Growth of k against the delta-ratio delta(x0)/delta(x), growth-function
// fits, the integral and summation convergence tests for 1/phi^-1, and the
// Gehring-Hayman and quasiconvexity constants.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhlab/metric_graph.hpp"

namespace qhlab {

enum class GrowthFamily { kLogAffine, kPower, kCustom };
std::string to_string(GrowthFamily family);

/// phi(t) = a * g(scale * t) + b with g(u) = log(1 + u) (log-affine),
/// u^c (power), or an arbitrary increasing function (custom).
struct GrowthModel {
  GrowthFamily family = GrowthFamily::kLogAffine;
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;
  double scale = 1.0;
  std::function<double(double)> custom;
  /// Max of k - phi(ratio) over the fitted samples (<= 0 for a certified fit).
  double envelope_margin = 0.0;

  static GrowthModel log_affine(double a, double b, double scale = 1.0);
  static GrowthModel power(double a, double c, double b = 0.0);
  static GrowthModel from_function(std::function<double(double)> phi);

  double operator()(double t) const;
  /// phi^-1(s) for s > phi(0); bisection for custom models.
  double inverse(double s) const;
  /// log(phi^-1(s)), finite even when phi^-1(s) overflows a double.
  double log_inverse(double s) const;
  void validate() const;
};

struct EnvelopeSample {
  double ratio = 1.0;
  double k = 0.0;
  int node = -1;
};

/// (delta(x0)/delta(x), k(x0, x)) with x0 first, then n delta-stratified samples.
std::vector<EnvelopeSample> growth_envelope(const MetricGraph& graph, int x0, int n_samples, uint64_t seed);

struct FitOptions {
  /// Exponent for the power family.
  double power_exponent = 0.5;
  /// Slopes beyond this count as failing to dominate the samples.
  double max_slope = 100.0;
};

/// Smallest slope a (then smallest offset b >= 0) such that every sample has
/// k <= phi(ratio). The offset is anchored by the samples with ratio <= 1.
/// no-fit when the required slope exceeds max_slope.
GrowthModel fit_growth_function(const std::vector<EnvelopeSample>& envelope, GrowthFamily family,
                                const FitOptions& options = {});
double envelope_margin(const GrowthModel& model, const std::vector<EnvelopeSample>& envelope);

struct IntegralResult {
  bool converges = false;
  double lower_limit = 1.0;  // max(1, phi(1))
  double head = 0.0;         // numeric integral on [lower_limit, 1000]
  double tail_bound = 0.0;   // analytic tail beyond 1000 (inf if divergent)
  /// Whether the integral from phi(0) is finite at its lower end; unset when
  /// phi(0) > 0 and phi^-1 is undefined below it.
  std::optional<bool> from_zero_finite;
};

struct SummationResult {
  bool converges = false;
  double partial_sum = 0.0;     // sum over j = 1..1000 where phi^-1(j) is defined
  double decay_exponent = 0.0;  // p in 1/phi^-1(j) ~ j^-p far out
};

IntegralResult integral_test_detail(const GrowthModel& model);
SummationResult summation_test_detail(const GrowthModel& model);
bool integral_test(const GrowthModel& model);
bool summation_test(const GrowthModel& model);

/// phi(t) = varphi(diam * t / delta0).
GrowthModel phi_uniform_transform(const GrowthModel& varphi, double diam, double delta0);

struct PairWitness {
  int x = -1;
  int y = -1;
  double ratio = 0.0;
};

struct RegularityReport {
  double constant = 1.0;
  int sample_count = 0;
  double resolution = 0.0;
  double tau = 0.0;  // slack at the worst pair
  PairWitness worst;
  std::vector<PairWitness> pairs;
};

/// max over pairs of l_d(k-geodesic) / inner distance.
RegularityReport gehring_hayman_constant(const MetricGraph& graph, int n_pairs, uint64_t seed);
/// max over pairs of inner distance / Euclidean distance; exactly 1 when the
/// ambient metric is the inner one. Extra pairs are evaluated in addition
/// to the sampled ones.
RegularityReport quasiconvexity_constant(const MetricGraph& graph, int n_pairs, uint64_t seed,
                                         const std::vector<std::pair<Vec2, Vec2>>& extra_pairs = {});
double quasiconvexity_ratio(const MetricGraph& graph, Vec2 x, Vec2 y);

}  // namespace qhlab
