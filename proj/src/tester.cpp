#include "nstest/tester.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace nstest {

namespace {

const double kTwoOverSqrtPi = 2.0 / std::sqrt(std::numbers::pi);

void validate(const TesterParams& p) {
  if (!(p.surface_budget > 0.0)) throw std::domain_error("tester: S must be positive");
  if (!(p.eta > 0.0)) throw std::domain_error("tester: eta must be positive");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) {
    throw std::domain_error("tester: epsilon must lie in (0,1)");
  }
}

}  // namespace

DerivedParams derive_params(const TesterParams& p) {
  validate(p);
  const double S = p.surface_budget;
  DerivedParams d;
  d.t = std::pow(p.epsilon * p.eta / S, 2.0);
  const double m_real = 7.0 * S * S / (p.eta * p.eta * p.eta * p.epsilon);
  // Round up; values within one part in 1e12 of an integer are that integer
  // (the formula is exact arithmetic in the paper, not a float artifact).
  d.m = static_cast<std::int64_t>(std::ceil(m_real - 1e-12 * std::max(m_real, 1.0)));
  d.threshold = kTwoOverSqrtPi * std::sqrt(d.t) *
                (S + std::pow(static_cast<double>(d.m), -0.5) * std::pow(d.t, -0.25) *
                         std::sqrt(S));
  d.wrap_warning = std::sqrt(2.0 * d.t) > 0.25;
  return d;
}

TestVerdict run_test(const TesterParams& p, const NoiseModel& model,
                     const Region& region, std::uint64_t seed, int threads) {
  const DerivedParams d = derive_params(p);
  const NsEstimate est = ns_estimate(model, region, d.t, d.m, seed,
                                     /*stream_base=*/0, threads);
  TestVerdict v;
  v.derived = d;
  v.ns_fraction = est.mean;
  v.threshold = d.threshold;
  v.accepted = est.mean <= d.threshold;
  return v;
}

AcceptProbability accept_probability(const TesterParams& p, const NoiseModel& model,
                                     const Region& region, int trials,
                                     std::uint64_t seed, int threads) {
  if (trials < 1) throw std::domain_error("accept_probability: trials must be >= 1");
  validate(p);

  auto run_range = [&](int lo, int hi) -> int {
    int accepted = 0;
    for (int k = lo; k < hi; ++k) {
      if (run_test(p, model, region, derive_seed(seed, k)).accepted) ++accepted;
    }
    return accepted;
  };

  int accepted = 0;
  const int workers = std::min(std::max(threads, 1), trials);
  if (workers <= 1) {
    accepted = run_range(0, trials);
  } else {
    std::vector<int> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const int lo = trials * w / workers;
      const int hi = trials * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi] { partial[w] = run_range(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (int c : partial) accepted += c;
  }

  AcceptProbability out;
  out.trials = trials;
  out.rate = static_cast<double>(accepted) / trials;
  out.std_error = std::sqrt(out.rate * (1.0 - out.rate) / trials);
  return out;
}

double crofton_bound(double surface_area, double t) {
  if (!(t > 0.0)) throw std::domain_error("crofton_bound: t must be positive");
  if (!(surface_area >= 0.0)) throw std::domain_error("crofton_bound: S must be >= 0");
  return kTwoOverSqrtPi * std::sqrt(t) * surface_area;
}

}  // namespace nstest
