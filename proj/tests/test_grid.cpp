#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "nstest/gaussian.hpp"
#include "nstest/grid.hpp"
#include "nstest/noise.hpp"
#include "nstest/region.hpp"
#include "nstest/rng.hpp"

using namespace nstest;

namespace {

double max_abs_diff(const GridField& a, const GridField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  }
  return d;
}

GridField random_unit_field(int n, std::uint64_t seed) {
  GridField f;
  f.dim = 1;
  f.resolution = n;
  f.space = SpaceKind::kTorus;
  f.values.resize(n);
  RandomStream rng(seed, 0);
  for (double& v : f.values) v = rng.next_uniform();
  return f;
}

}  // namespace

TEST_CASE("rasterize cell-center semantics") {
  const Region mid = Region::interval_union({{0.25, 0.75}});
  const GridField f = rasterize(mid, 4);
  CHECK(f.values == std::vector<double>{0.0, 1.0, 1.0, 0.0});

  const GridField zeros = rasterize(Region::empty(torus(1)), 64);
  CHECK(std::all_of(zeros.values.begin(), zeros.values.end(),
                    [](double v) { return v == 0.0; }));

  const GridField dashed = rasterize(Region::dashed_line(0.01), 10000);
  double ones = 0.0;
  for (double v : dashed.values) ones += v;
  CHECK(ones == 5000.0);
}

TEST_CASE("apply_heat preserves constants, mass, and the unit range") {
  GridField c;
  c.dim = 1;
  c.resolution = 256;
  c.space = SpaceKind::kTorus;
  c.values.assign(256, 0.375);
  const GridField out = apply_heat(c, 0.01);
  CHECK(max_abs_diff(out, c) < 1e-13);

  const GridField f = random_unit_field(512, 99);
  const GridField g = apply_heat(f, 0.005);
  double mean_in = 0.0, mean_out = 0.0;
  for (int i = 0; i < 512; ++i) {
    mean_in += f.values[i];
    mean_out += g.values[i];
    CHECK(g.values[i] >= -1e-12);
    CHECK(g.values[i] <= 1.0 + 1e-12);
  }
  CHECK(std::abs(mean_in - mean_out) / 512 < 1e-12);
}

TEST_CASE("apply_heat satisfies the semigroup law") {
  const GridField f = rasterize(preset_region("interval-half", torus(1)), 4096);
  const double t = 5e-4;
  const GridField twice = apply_heat(apply_heat(f, t), t);
  const GridField once = apply_heat(f, 2.0 * t);
  CHECK(max_abs_diff(twice, once) < 1e-10);

  // 2-D as well, along with mass conservation and the unit range.
  const GridField disk = rasterize(preset_region("disk(0.25)", torus(2)), 256);
  const GridField d2 = apply_heat(apply_heat(disk, 2e-3), 2e-3);
  const GridField d1 = apply_heat(disk, 4e-3);
  CHECK(max_abs_diff(d2, d1) < 1e-10);
  double mass_in = 0.0, mass_out = 0.0;
  for (std::size_t i = 0; i < disk.values.size(); ++i) {
    mass_in += disk.values[i];
    mass_out += d1.values[i];
    CHECK(d1.values[i] >= -1e-12);
    CHECK(d1.values[i] <= 1.0 + 1e-12);
  }
  CHECK(std::abs(mass_in - mass_out) / disk.values.size() < 1e-12);
}

TEST_CASE("apply_heat is safe to call from concurrent threads") {
  const GridField f = rasterize(preset_region("interval-half", torus(1)), 2048);
  const GridField expected = apply_heat(f, 1e-3);
  std::vector<GridField> results(4);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w) {
    pool.emplace_back([&, w] { results[w] = apply_heat(f, 1e-3); });
  }
  for (auto& th : pool) th.join();
  for (const GridField& r : results) {
    CHECK(max_abs_diff(r, expected) == 0.0);
  }
}

TEST_CASE("apply_heat reproduces the half-line profile near a flat boundary") {
  const int n = 1 << 14;
  const double t = 1e-4;
  const double sigma = std::sqrt(2.0 * t);
  const GridField g = apply_heat(rasterize(preset_region("interval-half", torus(1)), n), t);
  for (int i = 0; i < 200; ++i) {
    const double x = g.center(i);  // just inside the boundary at 0
    CHECK(std::abs(g.values[i] - std_normal_cdf(x / sigma)) < 1e-4);
  }
  for (int i = n - 200; i < n; ++i) {
    const double x = g.center(i) - 1.0;  // just outside, approaching 0 from below
    CHECK(std::abs(g.values[i] - std_normal_cdf(x / sigma)) < 1e-4);
  }
}

TEST_CASE("apply_heat rejects under-resolved grids and names the needed N") {
  const GridField f = rasterize(preset_region("interval-half", torus(1)), 128);
  try {
    apply_heat(f, 1e-6);  // sqrt(2e-6) ~ 0.0014 << 10/128
    FAIL("expected a resolution error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("N >= 7072") != std::string::npos);
  }
}

TEST_CASE("apply_ou_1d: constants, symmetry point, half-line closed form") {
  GridField c;
  c.dim = 1;
  c.resolution = 256;
  c.space = SpaceKind::kEuclidean;
  c.window = 6.0;
  c.values.assign(256, 0.7);
  CHECK(max_abs_diff(apply_ou_1d(c, 0.3), c) < 1e-13);

  const Region half = preset_region("gaussian-halfspace", euclidean(1));
  const int n = 1 << 13;
  for (double t : {0.1, 0.5}) {
    const GridField g = apply_ou_1d(rasterize(half, n), t);
    const double rho = std::exp(-t);
    const double spread = std::sqrt(-std::expm1(-2.0 * t));
    // The jump sits exactly between the two middle cells.
    CHECK(g.values[n / 2 - 1] + g.values[n / 2] == doctest::Approx(1.0).epsilon(1e-12));
    double worst = 0.0;
    for (int i = 0; i < n; i += 7) {
      const double x = g.center(i);
      worst = std::max(worst, std::abs(g.values[i] - std_normal_cdf(rho * x / spread)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("apply_ou_1d satisfies the semigroup law") {
  const Region half = preset_region("gaussian-halfspace", euclidean(1));
  const GridField f = rasterize(half, 4096);
  const double t = 0.3;
  const GridField twice = apply_ou_1d(apply_ou_1d(f, t), t);
  const GridField once = apply_ou_1d(f, 2.0 * t);
  CHECK(max_abs_diff(twice, once) < 1e-6);
}

TEST_CASE("Gauss-Hermite rule integrates Gaussian moments") {
  const auto [x, w] = gauss_hermite_nodes(64);
  double w_sum = 0.0, second = 0.0, fourth = 0.0;
  for (int i = 0; i < 64; ++i) {
    w_sum += w[i];
    second += w[i] * x[i] * x[i];
    fourth += w[i] * std::pow(x[i], 4);
  }
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  CHECK(w_sum == doctest::Approx(sqrt_pi).epsilon(1e-12));
  CHECK(second == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-12));
  CHECK(fourth == doctest::Approx(0.75 * sqrt_pi).epsilon(1e-12));
}

TEST_CASE("the Gauss-Hermite path agrees with the exact path on smooth fields") {
  const Region half = preset_region("gaussian-halfspace", euclidean(1));
  const GridField smooth = apply_ou_1d(rasterize(half, 4096), 0.3);
  const GridField exact = apply_ou_1d(smooth, 0.2);
  const GridField gh = apply_ou_1d_gh(smooth, 0.2, 64);
  CHECK(max_abs_diff(exact, gh) < 1e-5);
  CHECK_THROWS_AS(apply_ou_1d_gh(smooth, 0.2, 16), std::domain_error);
}

TEST_CASE("gradient_magnitude") {
  GridField c;
  c.dim = 1;
  c.resolution = 128;
  c.space = SpaceKind::kTorus;
  c.values.assign(128, 0.25);
  const GridField zero = gradient_magnitude(c);
  CHECK(std::all_of(zero.values.begin(), zero.values.end(),
                    [](double v) { return v == 0.0; }));

  GridField wave;
  wave.dim = 1;
  wave.resolution = 4096;
  wave.space = SpaceKind::kTorus;
  wave.values.resize(4096);
  for (int i = 0; i < 4096; ++i) {
    wave.values[i] = std::sin(2.0 * std::numbers::pi * wave.center(i));
  }
  const GridField mag = gradient_magnitude(wave);
  const double peak = *std::max_element(mag.values.begin(), mag.values.end());
  CHECK(peak == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-4));

  GridField ramp;
  ramp.dim = 1;
  ramp.resolution = 128;
  ramp.space = SpaceKind::kEuclidean;
  ramp.window = 6.0;
  ramp.values.resize(128);
  for (int i = 0; i < 128; ++i) ramp.values[i] = 0.03 * ramp.center(i);
  const GridField slope = gradient_magnitude(ramp);
  for (double v : slope.values) CHECK(v == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("discrete_ns: closed forms and bounds") {
  CHECK(discrete_ns(Region::empty(torus(1)), 1e-4, 4096, SemigroupKind::kHeatTorus) == 0.0);

  const Region half = preset_region("interval-half", torus(1));
  const double ns = discrete_ns(half, 1e-4, 1 << 16, SemigroupKind::kHeatTorus);
  const double closed = 0.022567583341910251;  // 4 sqrt(t/pi)
  CHECK(std::abs(ns - closed) / closed < 1e-3);

  // The fully-blurred dashed pattern: the smoothed field collapses to the
  // overall measure 1/2, so NS is 2 mu (1 - mu) ~ 1/2.
  const double dashed_ns =
      discrete_ns(Region::dashed_line(0.01), 0.01, 12800, SemigroupKind::kHeatTorus);
  CHECK(dashed_ns >= 0.2);
  CHECK(dashed_ns <= 1.0);
  CHECK(dashed_ns == doctest::Approx(0.5).epsilon(2e-4));

  const Region ghalf = preset_region("gaussian-halfspace", euclidean(1));
  const double ou_ns = discrete_ns(ghalf, 0.1, 1 << 13, SemigroupKind::kOrnsteinUhlenbeck);
  const double arccos_form = std::acos(std::exp(-0.1)) / std::numbers::pi;
  CHECK(std::abs(ou_ns - arccos_form) < 5e-5);
}

TEST_CASE("discrete_ns is stable under grid refinement") {
  const Region half = preset_region("interval-half", torus(1));
  const double coarse = discrete_ns(half, 1e-4, 1 << 13, SemigroupKind::kHeatTorus);
  const double fine = discrete_ns(half, 1e-4, 1 << 14, SemigroupKind::kHeatTorus);
  CHECK(std::abs(fine - coarse) / fine < 0.01);

  const Region ghalf = preset_region("gaussian-halfspace", euclidean(1));
  const double c2 = discrete_ns(ghalf, 0.1, 1 << 12, SemigroupKind::kOrnsteinUhlenbeck);
  const double f2 = discrete_ns(ghalf, 0.1, 1 << 13, SemigroupKind::kOrnsteinUhlenbeck);
  CHECK(std::abs(f2 - c2) / f2 < 0.01);
}

TEST_CASE("discrete_ns cross-validates the Monte Carlo estimator") {
  struct Case {
    Region region;
    NoiseModel model;
    SemigroupKind kind;
    double t;
    int n;
  };
  const std::vector<Case> cases = {
      {preset_region("interval-half", torus(1)), NoiseModel::heat_torus(1),
       SemigroupKind::kHeatTorus, 1e-4, 1 << 14},
      {Region::dashed_line(0.01), NoiseModel::heat_torus(1), SemigroupKind::kHeatTorus,
       0.01, 12800},
      {preset_region("gaussian-halfspace", euclidean(1)), NoiseModel::ornstein_uhlenbeck(1),
       SemigroupKind::kOrnsteinUhlenbeck, 0.1, 1 << 13},
  };
  for (const Case& c : cases) {
    const double grid_ns = discrete_ns(c.region, c.t, c.n, c.kind);
    const NsEstimate mc = ns_estimate(c.model, c.region, c.t, 400000, 31337);
    CHECK(std::abs(mc.mean - grid_ns) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("superlevel_set basics and duality") {
  const GridField raster = rasterize(preset_region("interval-half", torus(1)), 128);
  CHECK(max_abs_diff(superlevel_set(raster, 0.5), raster) == 0.0);

  const GridField f = random_unit_field(128, 5);
  const double above_max = 0.9999999;
  const GridField empty = superlevel_set(f, above_max);
  // All values strictly below 1 almost surely, so this is empty.
  CHECK(std::all_of(empty.values.begin(), empty.values.end(),
                    [](double v) { return v == 0.0; }));

  GridField flipped = f;
  for (double& v : flipped.values) v = 1.0 - v;
  const GridField a = superlevel_set(f, 0.3);
  const GridField b = superlevel_set(flipped, 0.7 + 1e-9);  // complement up to ties
  for (int i = 0; i < 128; ++i) {
    CHECK(a.values[i] == 1.0 - b.values[i]);
  }
  CHECK_THROWS_AS(superlevel_set(f, 0.0), std::domain_error);
}

TEST_CASE("perimeter_1d counts crossings; OU version weighs them by phi") {
  const GridField interval = rasterize(preset_region("interval-half", torus(1)), 256);
  CHECK(perimeter_1d(interval, 0.5) == 2.0);

  const GridField dashed = rasterize(Region::dashed_line(0.01), 10000);
  CHECK(perimeter_1d(dashed, 0.5) == 100.0);

  // Smooth bump crossing the level once up, once down.
  GridField bump;
  bump.dim = 1;
  bump.resolution = 512;
  bump.space = SpaceKind::kTorus;
  bump.values.resize(512);
  for (int i = 0; i < 512; ++i) {
    const double x = bump.center(i);
    bump.values[i] = std::exp(-50.0 * (x - 0.5) * (x - 0.5));
  }
  CHECK(perimeter_1d(bump, 0.3) == 2.0);

  // A level tying a grid value gets perturbed, keeping >= cells inside.
  GridField steps;
  steps.dim = 1;
  steps.resolution = 128;
  steps.space = SpaceKind::kTorus;
  steps.values.assign(128, 0.2);
  for (int i = 40; i < 60; ++i) steps.values[i] = 0.5;
  CHECK(perimeter_1d(steps, 0.5) == 2.0);

  // Gaussian-weighted crossings: half-space raster crosses once at 0.
  const GridField ghalf = rasterize(preset_region("gaussian-halfspace", euclidean(1)), 8192);
  CHECK(perimeter_1d(ghalf, 0.5) ==
        doctest::Approx(std_normal_pdf(0.0)).epsilon(1e-4));
}

TEST_CASE("perimeter_2d: bands, disks, empty levels") {
  // Axis-aligned band of width 1/2, slightly smoothed: two straight lines.
  const Region band = Region::box(torus(2), {0.0, 0.0}, {0.5, 1.0});
  const GridField smooth_band = apply_heat(rasterize(band, 512), 2e-4);
  CHECK(perimeter_2d(smooth_band, 0.5) == doctest::Approx(2.0).epsilon(0.02));

  // Disk of radius 1/4 under light smoothing: circumference 2 pi r.
  const GridField smooth_disk =
      apply_heat(rasterize(preset_region("disk(0.25)", torus(2)), 4096), 1e-5);
  CHECK(perimeter_2d(smooth_disk, 0.5) ==
        doctest::Approx(2.0 * std::numbers::pi * 0.25).epsilon(0.02));

  // A level above the field maximum has no contour.
  GridField low = smooth_band;
  for (double& v : low.values) v *= 0.25;
  CHECK(perimeter_2d(low, 0.9) == 0.0);
}

TEST_CASE("symmetric_difference_measure") {
  const GridField a = rasterize(preset_region("interval-half", torus(1)), 1000);
  CHECK(symmetric_difference_measure(a, a) == 0.0);

  GridField nota = a;
  for (double& v : nota.values) v = 1.0 - v;
  CHECK(symmetric_difference_measure(a, nota) == 1.0);

  const GridField shifted = rasterize(Region::interval_union({{0.1, 0.6}}), 1000);
  CHECK(symmetric_difference_measure(a, shifted) == doctest::Approx(0.2).epsilon(1e-9));

  const GridField other = rasterize(preset_region("interval-half", torus(1)), 500);
  CHECK_THROWS_AS(symmetric_difference_measure(a, other), std::invalid_argument);
}
