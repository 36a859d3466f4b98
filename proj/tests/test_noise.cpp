#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nstest/gaussian.hpp"
#include "nstest/noise.hpp"
#include "nstest/region.hpp"
#include "nstest/tester.hpp"

using namespace nstest;

namespace {

// One-sample Kolmogorov-Smirnov statistic against a cdf.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// KS critical value at significance 1e-3.
double ks_critical(int n) {
  return std::sqrt(std::log(2.0 / 1e-3) / 2.0) / std::sqrt(static_cast<double>(n));
}

double wrapped_displacement(double x, double y) {
  double d = y - x;
  d -= std::round(d);
  return d;
}

}  // namespace

TEST_CASE("curvature is fixed by the semigroup kind, not the dimension") {
  CHECK(NoiseModel::heat_torus(3).curvature() == 0.0);
  CHECK(NoiseModel::ornstein_uhlenbeck(1).curvature() == 1.0);
  for (int n : {1, 2, 5}) {
    CHECK(NoiseModel::heat_torus(n).curvature() == 0.0);
    CHECK(NoiseModel::ornstein_uhlenbeck(n).curvature() == 1.0);
  }
  CHECK(NoiseModel::heat_torus(2).space() == torus(2));
  CHECK(NoiseModel::ornstein_uhlenbeck(2).space() == euclidean(2));
}

TEST_CASE("sample_pair displacement scales") {
  const NoiseModel heat = NoiseModel::heat_torus(1);

  SUBCASE("t -> 0: per-coordinate displacement sd is sqrt(2t)") {
    const double t = 1e-12;
    double sum2 = 0.0;
    const int m = 10000;
    std::vector<double> x(1), y(1);
    for (int i = 0; i < m; ++i) {
      RandomStream rng(42, i);
      heat.sample_pair(t, rng, x, y);
      const double d = wrapped_displacement(x[0], y[0]);
      sum2 += d * d;
    }
    const double sd = std::sqrt(sum2 / m);
    CHECK(sd == doctest::Approx(std::sqrt(2.0 * t)).epsilon(0.05));
  }

  SUBCASE("t = 0.02: wrapped displacement sd over 1e5 pairs is 0.2 +- 0.005") {
    const double t = 0.02;
    double sum2 = 0.0;
    const int m = 100000;
    std::vector<double> x(1), y(1);
    for (int i = 0; i < m; ++i) {
      RandomStream rng(7, i);
      heat.sample_pair(t, rng, x, y);
      const double d = wrapped_displacement(x[0], y[0]);
      sum2 += d * d;
    }
    CHECK(std::abs(std::sqrt(sum2 / m) - 0.2) <= 0.005);
  }

  SUBCASE("OU at t = 50: X and Y are uncorrelated to sampling precision") {
    const NoiseModel ou = NoiseModel::ornstein_uhlenbeck(1);
    const int m = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::vector<double> x(1), y(1);
    for (int i = 0; i < m; ++i) {
      RandomStream rng(13, i);
      ou.sample_pair(50.0, rng, x, y);
      sx += x[0];
      sy += y[0];
      sxx += x[0] * x[0];
      syy += y[0] * y[0];
      sxy += x[0] * y[0];
    }
    const double corr = (sxy / m - sx / m * sy / m) /
                        std::sqrt((sxx / m - sx / m * sx / m) * (syy / m - sy / m * sy / m));
    CHECK(std::abs(corr) <= 0.01);
  }
}

TEST_CASE("stationarity: Y is marginally uniform (torus) / standard normal (OU)") {
  const int m = 100000;
  std::vector<double> x(1), y(1);

  const NoiseModel heat = NoiseModel::heat_torus(1);
  std::vector<double> ys;
  ys.reserve(m);
  for (int i = 0; i < m; ++i) {
    RandomStream rng(1001, i);
    heat.sample_pair(0.013, rng, x, y);
    ys.push_back(y[0]);
  }
  CHECK(ks_statistic(ys, [](double v) { return v; }) < ks_critical(m));

  const NoiseModel ou = NoiseModel::ornstein_uhlenbeck(1);
  ys.clear();
  for (int i = 0; i < m; ++i) {
    RandomStream rng(1002, i);
    ou.sample_pair(0.4, rng, x, y);
    ys.push_back(y[0]);
  }
  CHECK(ks_statistic(ys, [](double v) { return std_normal_cdf(v); }) < ks_critical(m));
}

TEST_CASE("ns_estimate basics") {
  const NoiseModel heat = NoiseModel::heat_torus(1);
  const Region empty = Region::empty(torus(1));
  const Region full = Region::full(torus(1));
  CHECK(ns_estimate(heat, empty, 0.01, 1000, 5).mean == 0.0);
  CHECK(ns_estimate(heat, full, 0.01, 1000, 5).mean == 0.0);

  const Region half = preset_region("interval-half", torus(1));
  const NsEstimate est = ns_estimate(heat, half, 1e-4, 1000000, 99);
  const double closed_form = 0.022567583341910251;  // 4 sqrt(t/pi)
  CHECK(std::abs(est.mean - closed_form) <= 3.0 * est.std_error);
  CHECK(est.std_error ==
        doctest::Approx(std::sqrt(est.mean * (1.0 - est.mean) / 1e6)).epsilon(1e-12));

  const Region wrong_space = Region::half_space(1, {1.0}, 0.0);
  CHECK_THROWS_AS(ns_estimate(heat, wrong_space, 0.01, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(ns_estimate(heat, half, 0.01, 0, 1), std::domain_error);
}

TEST_CASE("ns_estimate determinism and thread-count invariance") {
  const NoiseModel heat = NoiseModel::heat_torus(1);
  const Region half = preset_region("interval-half", torus(1));
  const NsEstimate a = ns_estimate(heat, half, 1e-3, 40000, 2718);
  const NsEstimate b = ns_estimate(heat, half, 1e-3, 40000, 2718);
  const NsEstimate c = ns_estimate(heat, half, 1e-3, 40000, 2718, 0, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.mean == c.mean);
  const NsEstimate d = ns_estimate(heat, half, 1e-3, 40000, 2719);
  CHECK(a.mean != d.mean);  // different seed, different draw
}

TEST_CASE("reversibility: straddle counts agree in both directions") {
  const NoiseModel heat = NoiseModel::heat_torus(1);
  const Region half = preset_region("interval-half", torus(1));
  const int m = 200000;
  std::vector<double> x(1), y(1);
  int xin_yout = 0, yin_xout = 0;
  for (int i = 0; i < m; ++i) {
    RandomStream rng(31, i);
    heat.sample_pair(2e-4, rng, x, y);
    const bool in_x = half.contains_unchecked(x);
    const bool in_y = half.contains_unchecked(y);
    xin_yout += (in_x && !in_y) ? 1 : 0;
    yin_xout += (!in_x && in_y) ? 1 : 0;
  }
  const double p01 = static_cast<double>(xin_yout) / m;
  const double p10 = static_cast<double>(yin_xout) / m;
  const double se = std::sqrt((p01 + p10) / m);
  CHECK(std::abs(p01 - p10) <= 3.0 * se);
}

TEST_CASE("noise sensitivity grows (up to noise) when t quadruples") {
  const NoiseModel heat = NoiseModel::heat_torus(1);
  const Region half = preset_region("interval-half", torus(1));
  for (double t : {1e-5, 1e-4, 1e-3}) {
    const NsEstimate small = ns_estimate(heat, half, t, 200000, 404);
    const NsEstimate big = ns_estimate(heat, half, 4.0 * t, 200000, 405);
    CHECK(small.mean <= big.mean + 3.0 * (small.std_error + big.std_error));
  }
}

TEST_CASE("Crofton bound holds for every metadata fixture") {
  struct Fixture {
    NoiseModel model;
    Region region;
  };
  const std::vector<Fixture> fixtures = {
      {NoiseModel::heat_torus(1), preset_region("interval-half", torus(1))},
      {NoiseModel::heat_torus(1), Region::dashed_line(0.01)},
      {NoiseModel::heat_torus(2), preset_region("disk(0.25)", torus(2))},
      {NoiseModel::ornstein_uhlenbeck(1), preset_region("gaussian-halfspace", euclidean(1))},
  };
  for (const Fixture& f : fixtures) {
    const double perimeter = f.region.exact_perimeter().value();
    for (double t : {1e-4, 1e-3}) {
      const NsEstimate est = ns_estimate(f.model, f.region, t, 200000, 777);
      CHECK(est.mean - 3.0 * est.std_error <= crofton_bound(perimeter, t));
    }
  }
}

TEST_CASE("OU noise sensitivity matches the arccos closed form") {
  const NoiseModel ou = NoiseModel::ornstein_uhlenbeck(1);
  const Region half = preset_region("gaussian-halfspace", euclidean(1));
  for (double t : {0.1, 0.5}) {
    const NsEstimate est = ns_estimate(ou, half, t, 400000, 2025);
    const double exact = std::acos(std::exp(-t)) / std::numbers::pi;
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error);
  }
}
