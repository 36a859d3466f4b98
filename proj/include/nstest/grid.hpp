#pragma once

#include <utility>
#include <vector>

#include "nstest/noise.hpp"
#include "nstest/region.hpp"

namespace nstest {

// Discretized function on a periodic grid over [0,1)^dim (torus) or on a
// symmetric truncation window [-W, W] (1-D Euclidean, constant-extended
// outside). Values live at cell centers; 2-D storage is row-major with
// values[iy * N + ix].
struct GridField {
  int dim{1};
  int resolution{0};  // N cells per axis
  SpaceKind space{SpaceKind::kTorus};
  double window{0.0};  // half-width W; Euclidean only
  std::vector<double> values;

  double spacing() const {
    return space == SpaceKind::kTorus ? 1.0 / resolution : 2.0 * window / resolution;
  }
  // Cell-center coordinate along one axis.
  double center(int i) const {
    return space == SpaceKind::kTorus ? (i + 0.5) * spacing() : -window + (i + 0.5) * spacing();
  }
  double at(int ix) const { return values[ix]; }
  double at(int iy, int ix) const { return values[static_cast<std::size_t>(iy) * resolution + ix]; }
  bool same_grid(const GridField& o) const {
    return dim == o.dim && resolution == o.resolution && space == o.space && window == o.window;
  }
};

// Cell value = 1 iff the cell center lies in the region. Supports T^1, T^2
// and 1-D Euclidean regions; requires resolution >= 64.
GridField rasterize(const Region& region, int resolution, double window = 6.0);

// Heat semigroup P_t on the torus: circular convolution with the sampled
// wrapped-Gaussian kernel of per-axis standard deviation sqrt(2t), computed
// spectrally. The kernel is normalized to unit mass, so constants, the mean,
// and the [0,1] range are preserved to round-off. Requires
// sqrt(2t) >= 10 h (throws naming the needed resolution otherwise).
GridField apply_heat(const GridField& f, double t);

// Ornstein-Uhlenbeck semigroup on the 1-D window: per output point the
// defining integral of the piecewise-linear interpolant of f against the
// N(e^{-t} x, 1 - e^{-2t}) transition kernel, integrated in closed form
// (exact for the interpolant). Values clamped to [min f, max f].
// Requires window >= 6.
GridField apply_ou_1d(const GridField& f, double t);

// Gauss-Hermite variant of the above (>= 64-node rule by default), used as an
// independent cross-check on smooth fields; the node-threshold error on raw
// indicator fields makes it unsuitable as the primary path.
GridField apply_ou_1d_gh(const GridField& f, double t, int nodes = 64);

// Physicists' Gauss-Hermite rule (weight e^{-x^2}): nodes and weights.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite_nodes(int n);

// Central differences per axis (wrapped on the torus, one-sided at window
// ends), Euclidean norm across axes.
GridField gradient_magnitude(const GridField& f);

// mu-weighted integral of |g - h| over the grid: uniform cell weights on the
// torus, phi(x) h weights on the OU window.
double weighted_abs_diff(const GridField& a, const GridField& b);

// Rasterize, smooth with the semigroup for `kind`, and return the field
// P_t 1_A.
GridField smooth_indicator(const Region& region, double t, int resolution,
                           SemigroupKind kind, double window = 6.0);

// NS_t(A) on the grid: weighted mean of |P_t 1_A - 1_A|.
double discrete_ns(const Region& region, double t, int resolution, SemigroupKind kind,
                   double window = 6.0);

// Cellwise indicator of f >= level; level must lie in (0,1).
GridField superlevel_set(const GridField& f, double level);

// Number of level crossings around the circle (torus) or, on the OU window,
// the sum of phi(x*) over linear-interpolation crossing locations x*.
// A level equal to a grid value is perturbed by 1e-12 (ties stay inside).
double perimeter_1d(const GridField& f, double level);

// Marching-squares contour length on the 2-D torus with linear edge
// interpolation and periodic closure; saddle cells resolved by the
// cell-center average. Same 1e-12 tie perturbation.
double perimeter_2d(const GridField& f, double level);

// mu-weighted measure of the cellwise symmetric difference of two binary
// fields on the same grid.
double symmetric_difference_measure(const GridField& a, const GridField& b);

}  // namespace nstest
