#pragma once

#include <cstdint>
#include <span>

#include "nstest/region.hpp"
#include "nstest/rng.hpp"

namespace nstest {

enum class SemigroupKind { kHeatTorus, kOrnsteinUhlenbeck };

// One of the two concrete stationary diffusions: the heat semigroup on T^n
// (curvature 0) or the Ornstein-Uhlenbeck semigroup on R^n (curvature 1).
class NoiseModel {
 public:
  static NoiseModel heat_torus(int dim);
  static NoiseModel ornstein_uhlenbeck(int dim);

  SemigroupKind kind() const { return kind_; }
  int dim() const { return dim_; }
  Space space() const;
  double curvature() const;

  // Draws a stationary pair (X, X_t): X uniform on T^n with
  // Y = X + sqrt(2t) Z mod 1, or X ~ gamma_n with
  // Y = e^{-t} X + sqrt(1 - e^{-2t}) Z'. Writes dim coordinates into each of
  // x and y. The marginals of X and Y coincide.
  void sample_pair(double t, RandomStream& rng, std::span<double> x,
                   std::span<double> y) const;

 private:
  NoiseModel(SemigroupKind kind, int dim) : kind_(kind), dim_(dim) {}
  SemigroupKind kind_;
  int dim_;
};

struct NsEstimate {
  double mean;       // fraction of pairs with 1_A(X) != 1_A(Y)
  double std_error;  // Bernoulli: sqrt(mean (1 - mean) / m)
  std::int64_t m;
  double t;
};

// Monte Carlo estimate of the noise sensitivity NS_t(region). Sample i draws
// from stream (seed, stream_base + i), so the result is independent of how
// the m samples are sharded; `threads` changes wall time only.
NsEstimate ns_estimate(const NoiseModel& model, const Region& region, double t,
                       std::int64_t m, std::uint64_t seed,
                       std::uint64_t stream_base = 0, int threads = 1);

}  // namespace nstest
