#include "nstest/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace nstest {

NoiseModel NoiseModel::heat_torus(int dim) {
  if (dim < 1) throw std::invalid_argument("heat_torus: dim must be >= 1");
  return NoiseModel(SemigroupKind::kHeatTorus, dim);
}

NoiseModel NoiseModel::ornstein_uhlenbeck(int dim) {
  if (dim < 1) throw std::invalid_argument("ornstein_uhlenbeck: dim must be >= 1");
  return NoiseModel(SemigroupKind::kOrnsteinUhlenbeck, dim);
}

Space NoiseModel::space() const {
  return {kind_ == SemigroupKind::kHeatTorus ? SpaceKind::kTorus : SpaceKind::kEuclidean,
          dim_};
}

double NoiseModel::curvature() const {
  return kind_ == SemigroupKind::kHeatTorus ? 0.0 : 1.0;
}

void NoiseModel::sample_pair(double t, RandomStream& rng, std::span<double> x,
                             std::span<double> y) const {
  if (!(t > 0.0)) throw std::domain_error("sample_pair: t must be positive");
  if (kind_ == SemigroupKind::kHeatTorus) {
    const double sigma = std::sqrt(2.0 * t);
    for (int j = 0; j < dim_; ++j) {
      x[j] = rng.next_uniform();
      double v = x[j] + sigma * rng.next_normal();
      v -= std::floor(v);
      y[j] = (v < 1.0) ? v : 0.0;
    }
  } else {
    const double rho = std::exp(-t);
    const double spread = std::sqrt(-std::expm1(-2.0 * t));
    for (int j = 0; j < dim_; ++j) {
      x[j] = rng.next_normal();
      y[j] = rho * x[j] + spread * rng.next_normal();
    }
  }
}

NsEstimate ns_estimate(const NoiseModel& model, const Region& region, double t,
                       std::int64_t m, std::uint64_t seed,
                       std::uint64_t stream_base, int threads) {
  if (m < 1) throw std::domain_error("ns_estimate: m must be >= 1");
  if (!(region.space() == model.space())) {
    throw std::invalid_argument("ns_estimate: region space does not match the model");
  }
  const int dim = model.dim();

  auto count_range = [&](std::int64_t lo, std::int64_t hi) -> std::int64_t {
    std::vector<double> x(dim), y(dim);
    std::int64_t disagreements = 0;
    for (std::int64_t i = lo; i < hi; ++i) {
      RandomStream rng(seed, stream_base + static_cast<std::uint64_t>(i));
      model.sample_pair(t, rng, x, y);
      const bool in_x = region.contains_unchecked(x);
      const bool in_y = region.contains_unchecked(y);
      disagreements += (in_x != in_y) ? 1 : 0;
    }
    return disagreements;
  };

  std::int64_t disagreements = 0;
  const int workers = std::min<std::int64_t>(std::max(threads, 1), m);
  if (workers <= 1) {
    disagreements = count_range(0, m);
  } else {
    std::vector<std::int64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = m * w / workers;
      const std::int64_t hi = m * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi] { partial[w] = count_range(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (std::int64_t c : partial) disagreements += c;
  }

  NsEstimate est;
  est.m = m;
  est.t = t;
  est.mean = static_cast<double>(disagreements) / static_cast<double>(m);
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(m));
  return est;
}

}  // namespace nstest
