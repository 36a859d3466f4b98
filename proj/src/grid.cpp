#include "nstest/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nstest/gaussian.hpp"

namespace nstest {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// FFTW's planner mutates global state; executing distinct plans is safe but
// creating/destroying them is not. Serialize the plan lifecycle so grid
// operations stay callable from concurrent threads.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan fwd;
  fftw_plan bwd;
};

PlanPair make_r2c_c2r_1d(int n, double* real, fftw_complex* freq) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  return {fftw_plan_dft_r2c_1d(n, real, freq, FFTW_ESTIMATE),
          fftw_plan_dft_c2r_1d(n, freq, real, FFTW_ESTIMATE)};
}

PlanPair make_r2c_c2r_2d(int n, double* real, fftw_complex* freq) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  return {fftw_plan_dft_r2c_2d(n, n, real, freq, FFTW_ESTIMATE),
          fftw_plan_dft_c2r_2d(n, n, freq, real, FFTW_ESTIMATE)};
}

void destroy_plans(PlanPair plans) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans.fwd);
  fftw_destroy_plan(plans.bwd);
}

// Sampled wrapped Gaussian on N cells, normalized to unit mass.
std::vector<double> wrapped_gaussian_kernel(int n, double sigma) {
  std::vector<double> k(n, 0.0);
  const double h = 1.0 / n;
  const int wraps = static_cast<int>(std::ceil(9.0 * sigma)) + 1;
  for (int i = 0; i < n; ++i) {
    const double d = std::min(i, n - i) * h;  // symmetric displacement
    double v = 0.0;
    for (int w = -wraps; w <= wraps; ++w) {
      const double u = (d + w) / sigma;
      v += std::exp(-0.5 * u * u);
    }
    k[i] = v;
  }
  double sum = 0.0;
  for (double v : k) sum += v;
  for (double& v : k) v /= sum;
  return k;
}

// Real, even DFT of a symmetric kernel, returned for all N frequencies.
std::vector<double> kernel_symbol(const std::vector<double>& kernel) {
  const int n = static_cast<int>(kernel.size());
  std::vector<double> in(kernel);
  std::vector<double> symbol(n);
  fftw_complex* out =
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
  PlanPair plans = make_r2c_c2r_1d(n, in.data(), out);
  fftw_execute(plans.fwd);
  for (int m = 0; m <= n / 2; ++m) symbol[m] = out[m][0];
  for (int m = n / 2 + 1; m < n; ++m) symbol[m] = symbol[n - m];
  destroy_plans(plans);
  fftw_free(out);
  return symbol;
}

void spectral_convolve_1d(std::vector<double>& values, const std::vector<double>& symbol) {
  const int n = static_cast<int>(values.size());
  fftw_complex* freq =
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
  PlanPair plans = make_r2c_c2r_1d(n, values.data(), freq);
  fftw_execute(plans.fwd);
  for (int m = 0; m <= n / 2; ++m) {
    freq[m][0] *= symbol[m];
    freq[m][1] *= symbol[m];
  }
  fftw_execute(plans.bwd);
  const double scale = 1.0 / n;
  for (double& v : values) v *= scale;
  destroy_plans(plans);
  fftw_free(freq);
}

void spectral_convolve_2d(std::vector<double>& values, int n,
                          const std::vector<double>& symbol) {
  const int nc = n / 2 + 1;
  fftw_complex* freq =
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * nc));
  PlanPair plans = make_r2c_c2r_2d(n, values.data(), freq);
  fftw_execute(plans.fwd);
  for (int my = 0; my < n; ++my) {
    const double sy = symbol[my];
    for (int mx = 0; mx < nc; ++mx) {
      const double s = sy * symbol[mx];
      fftw_complex& c = freq[static_cast<std::size_t>(my) * nc + mx];
      c[0] *= s;
      c[1] *= s;
    }
  }
  fftw_execute(plans.bwd);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (double& v : values) v *= scale;
  destroy_plans(plans);
  fftw_free(freq);
}

// Antiderivative of Phi: Psi'(z) = Phi(z), Psi(-inf) = 0.
double big_psi(double z) {
  if (z >= 39.0) return z;
  if (z <= -39.0) return 0.0;
  return z * std_normal_cdf(z) + std_normal_pdf(z);
}

}  // namespace

GridField rasterize(const Region& region, int resolution, double window) {
  if (resolution < 2) throw std::domain_error("rasterize: resolution must be >= 2");
  const Space sp = region.space();
  GridField f;
  f.resolution = resolution;
  if (sp.kind == SpaceKind::kTorus) {
    require(sp.dim == 1 || sp.dim == 2, "rasterize: torus grids support dim 1 and 2");
    f.dim = sp.dim;
    f.space = SpaceKind::kTorus;
    const double h = 1.0 / resolution;
    if (sp.dim == 1) {
      f.values.resize(resolution);
      double x[1];
      for (int i = 0; i < resolution; ++i) {
        x[0] = (i + 0.5) * h;
        f.values[i] = region.contains_unchecked(x) ? 1.0 : 0.0;
      }
    } else {
      f.values.resize(static_cast<std::size_t>(resolution) * resolution);
      double x[2];
      for (int iy = 0; iy < resolution; ++iy) {
        x[1] = (iy + 0.5) * h;
        for (int ix = 0; ix < resolution; ++ix) {
          x[0] = (ix + 0.5) * h;
          f.values[static_cast<std::size_t>(iy) * resolution + ix] =
              region.contains_unchecked(x) ? 1.0 : 0.0;
        }
      }
    }
  } else {
    require(sp.dim == 1, "rasterize: Euclidean grids support dim 1 only");
    require(window > 0.0, "rasterize: window must be positive");
    f.dim = 1;
    f.space = SpaceKind::kEuclidean;
    f.window = window;
    f.values.resize(resolution);
    const double h = 2.0 * window / resolution;
    double x[1];
    for (int i = 0; i < resolution; ++i) {
      x[0] = -window + (i + 0.5) * h;
      f.values[i] = region.contains_unchecked(x) ? 1.0 : 0.0;
    }
  }
  return f;
}

GridField apply_heat(const GridField& f, double t) {
  require(f.space == SpaceKind::kTorus, "apply_heat: torus fields only");
  if (!(t > 0.0)) throw std::domain_error("apply_heat: t must be positive");
  const double sigma = std::sqrt(2.0 * t);
  const double h = f.spacing();
  if (sigma < 10.0 * h) {
    const int needed = static_cast<int>(std::ceil(10.0 / sigma));
    throw std::invalid_argument(
        "apply_heat: sqrt(2t) = " + std::to_string(sigma) +
        " under-resolves the grid; need resolution N >= " + std::to_string(needed) +
        " (got " + std::to_string(f.resolution) + ")");
  }
  GridField out = f;
  const std::vector<double> kernel = wrapped_gaussian_kernel(f.resolution, sigma);
  const std::vector<double> symbol = kernel_symbol(kernel);
  if (f.dim == 1) {
    spectral_convolve_1d(out.values, symbol);
  } else {
    spectral_convolve_2d(out.values, f.resolution, symbol);
  }
  return out;
}

GridField apply_ou_1d(const GridField& f, double t) {
  require(f.space == SpaceKind::kEuclidean && f.dim == 1,
          "apply_ou_1d: 1-D Euclidean window fields only");
  if (!(t > 0.0)) throw std::domain_error("apply_ou_1d: t must be positive");
  if (!(f.window >= 6.0)) throw std::domain_error("apply_ou_1d: window must be >= 6");

  const int n = f.resolution;
  const double h = f.spacing();
  const double rho = std::exp(-t);
  const double spread = std::sqrt(-std::expm1(-2.0 * t));

  // The interpolant changes only across "kink" edges [x_j, x_{j+1}] with
  // f_{j+1} != f_j. Integration by parts against the transition kernel gives
  //   P(mu) = f_last - sum_j (df_j / h) * spread * [Psi(z_{j+1}) - Psi(z_j)]
  // with z = (x - mu)/spread. Edges far above mu have Psi(z) ~ z and
  // telescope to plain df_j; edges far below mu contribute nothing.
  struct Kink {
    double x0, x1, df;
  };
  std::vector<Kink> kinks;
  std::vector<double> prefix_df(1, 0.0);
  for (int j = 0; j + 1 < n; ++j) {
    const double df = f.values[j + 1] - f.values[j];
    if (df != 0.0) {
      kinks.push_back({f.center(j), f.center(j + 1), df});
      prefix_df.push_back(prefix_df.back() + df);
    }
  }
  const std::size_t kink_count = kinks.size();

  double lo = f.values[0], hi = f.values[0];
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  GridField out = f;
  const double reach = 9.0 * spread;
  for (int i = 0; i < n; ++i) {
    const double mu = rho * f.center(i);
    // [first, last) brackets the kinks whose z-range meets [-9, 9].
    std::size_t first = 0;
    while (first < kink_count && kinks[first].x1 <= mu - reach) ++first;
    std::size_t last = first;
    while (last < kink_count && kinks[last].x0 < mu + reach) ++last;
    // Kinks at or beyond mu + reach telescope to their jumps.
    double acc = f.values[n - 1] - (prefix_df[kink_count] - prefix_df[last]);
    for (std::size_t j = first; j < last; ++j) {
      const double z0 = (kinks[j].x0 - mu) / spread;
      const double z1 = (kinks[j].x1 - mu) / spread;
      acc -= (kinks[j].df / h) * spread * (big_psi(z1) - big_psi(z0));
    }
    out.values[i] = std::clamp(acc, lo, hi);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite_nodes(int n) {
  if (n < 1) throw std::domain_error("gauss_hermite_nodes: n must be >= 1");
  // Newton iteration on the (normalized) Hermite recurrence, standard
  // largest-root-first initial guesses.
  std::vector<double> x(n), w(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int mid = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < mid; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-14) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  return {std::move(x), std::move(w)};
}

GridField apply_ou_1d_gh(const GridField& f, double t, int nodes) {
  require(f.space == SpaceKind::kEuclidean && f.dim == 1,
          "apply_ou_1d_gh: 1-D Euclidean window fields only");
  if (!(t > 0.0)) throw std::domain_error("apply_ou_1d_gh: t must be positive");
  if (!(f.window >= 6.0)) throw std::domain_error("apply_ou_1d_gh: window must be >= 6");
  if (nodes < 64) throw std::domain_error("apply_ou_1d_gh: need at least 64 nodes");

  const auto [u, w] = gauss_hermite_nodes(nodes);
  double wsum = 0.0;
  for (double v : w) wsum += v;

  const int n = f.resolution;
  const double h = f.spacing();
  const double rho = std::exp(-t);
  const double spread = std::sqrt(-std::expm1(-2.0 * t));
  const double x0 = f.center(0);
  const double xn = f.center(n - 1);

  auto interp = [&](double q) -> double {
    if (q <= x0) return f.values[0];
    if (q >= xn) return f.values[n - 1];
    const double s = (q - x0) / h;
    const int j = static_cast<int>(s);
    const double frac = s - j;
    return f.values[j] * (1.0 - frac) + f.values[j + 1] * frac;
  };

  double lo = f.values[0], hi = f.values[0];
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  GridField out = f;
  const double root2 = std::numbers::sqrt2;
  for (int i = 0; i < n; ++i) {
    const double mu = rho * f.center(i);
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
      acc += w[k] * interp(mu + spread * root2 * u[k]);
    }
    out.values[i] = std::clamp(acc / wsum, lo, hi);
  }
  return out;
}

GridField gradient_magnitude(const GridField& f) {
  GridField out = f;
  const int n = f.resolution;
  const double inv2h = 1.0 / (2.0 * f.spacing());
  if (f.dim == 1) {
    if (f.space == SpaceKind::kTorus) {
      for (int i = 0; i < n; ++i) {
        const double d = f.values[(i + 1) % n] - f.values[(i + n - 1) % n];
        out.values[i] = std::abs(d) * inv2h;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        if (i == 0) {
          out.values[i] = std::abs(f.values[1] - f.values[0]) * 2.0 * inv2h;
        } else if (i == n - 1) {
          out.values[i] = std::abs(f.values[n - 1] - f.values[n - 2]) * 2.0 * inv2h;
        } else {
          out.values[i] = std::abs(f.values[i + 1] - f.values[i - 1]) * inv2h;
        }
      }
    }
  } else {
    for (int iy = 0; iy < n; ++iy) {
      const int up = (iy + 1) % n;
      const int dn = (iy + n - 1) % n;
      for (int ix = 0; ix < n; ++ix) {
        const int rt = (ix + 1) % n;
        const int lf = (ix + n - 1) % n;
        const double gx = (f.at(iy, rt) - f.at(iy, lf)) * inv2h;
        const double gy = (f.at(up, ix) - f.at(dn, ix)) * inv2h;
        out.values[static_cast<std::size_t>(iy) * n + ix] = std::hypot(gx, gy);
      }
    }
  }
  return out;
}

namespace {

double cell_weight(const GridField& f, int i) {
  if (f.space == SpaceKind::kTorus) {
    return f.dim == 1 ? 1.0 / f.resolution
                      : 1.0 / (static_cast<double>(f.resolution) * f.resolution);
  }
  return std_normal_pdf(f.center(i)) * f.spacing();
}

}  // namespace

double weighted_abs_diff(const GridField& a, const GridField& b) {
  require(a.same_grid(b), "weighted_abs_diff: fields live on different grids");
  double total = 0.0;
  if (a.space == SpaceKind::kTorus) {
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      total += std::abs(a.values[i] - b.values[i]);
    }
    return total / static_cast<double>(a.values.size());
  }
  for (int i = 0; i < a.resolution; ++i) {
    total += std::abs(a.values[i] - b.values[i]) * cell_weight(a, i);
  }
  return total;
}

GridField smooth_indicator(const Region& region, double t, int resolution,
                           SemigroupKind kind, double window) {
  const GridField raster = rasterize(region, resolution, window);
  return kind == SemigroupKind::kHeatTorus ? apply_heat(raster, t)
                                           : apply_ou_1d(raster, t);
}

double discrete_ns(const Region& region, double t, int resolution, SemigroupKind kind,
                   double window) {
  const GridField raster = rasterize(region, resolution, window);
  const GridField smooth =
      kind == SemigroupKind::kHeatTorus ? apply_heat(raster, t) : apply_ou_1d(raster, t);
  return weighted_abs_diff(smooth, raster);
}

GridField superlevel_set(const GridField& f, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("superlevel_set: level must lie in (0,1)");
  }
  GridField out = f;
  for (double& v : out.values) v = (v >= level) ? 1.0 : 0.0;
  return out;
}

namespace {

// Ties between the level and grid values are broken by nudging the level
// down 1e-12, which keeps ">= level" cells inside.
double untie_level(const GridField& f, double level) {
  for (double v : f.values) {
    if (v == level) return level - 1e-12;
  }
  return level;
}

}  // namespace

double perimeter_1d(const GridField& f, double level) {
  require(f.dim == 1, "perimeter_1d: 1-D fields only");
  const double s = untie_level(f, level);
  const int n = f.resolution;
  if (f.space == SpaceKind::kTorus) {
    int crossings = 0;
    for (int i = 0; i < n; ++i) {
      const bool a = f.values[i] >= s;
      const bool b = f.values[(i + 1) % n] >= s;
      crossings += (a != b) ? 1 : 0;
    }
    return crossings;
  }
  double total = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const bool a = f.values[i] >= s;
    const bool b = f.values[i + 1] >= s;
    if (a != b) {
      const double frac = (s - f.values[i]) / (f.values[i + 1] - f.values[i]);
      total += std_normal_pdf(f.center(i) + frac * f.spacing());
    }
  }
  return total;
}

double perimeter_2d(const GridField& f, double level) {
  require(f.dim == 2 && f.space == SpaceKind::kTorus,
          "perimeter_2d: 2-D torus fields only");
  const double s = untie_level(f, level);
  const int n = f.resolution;
  const double h = f.spacing();

  double length = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const int iy1 = (iy + 1) % n;
    for (int ix = 0; ix < n; ++ix) {
      const int ix1 = (ix + 1) % n;
      const double va = f.at(iy, ix);    // (0,0)
      const double vb = f.at(iy, ix1);   // (1,0)
      const double vc = f.at(iy1, ix);   // (0,1)
      const double vd = f.at(iy1, ix1);  // (1,1)
      const int config = (va >= s ? 1 : 0) | (vb >= s ? 2 : 0) | (vc >= s ? 4 : 0) |
                         (vd >= s ? 8 : 0);
      if (config == 0 || config == 15) continue;

      // Edge crossing offsets (valid only when the edge straddles s).
      const double left = (s - va) / (vc - va);
      const double right = (s - vb) / (vd - vb);
      const double bottom = (s - va) / (vb - va);
      const double top = (s - vc) / (vd - vc);

      const auto seg = [&](double ax, double ay, double bx, double by) {
        length += std::hypot(bx - ax, by - ay);
      };
      // Endpoints in cell units: L=(0,left) R=(1,right) B=(bottom,0) T=(top,1).
      switch (config) {
        case 1:
        case 14:
          seg(0.0, left, bottom, 0.0);
          break;
        case 2:
        case 13:
          seg(bottom, 0.0, 1.0, right);
          break;
        case 3:
        case 12:
          seg(0.0, left, 1.0, right);
          break;
        case 4:
        case 11:
          seg(0.0, left, top, 1.0);
          break;
        case 5:
        case 10:
          seg(bottom, 0.0, top, 1.0);
          break;
        case 7:
        case 8:
          seg(top, 1.0, 1.0, right);
          break;
        case 6: {  // b and c inside: connect through the center iff it is inside
          const double centre = 0.25 * (va + vb + vc + vd);
          if (centre >= s) {
            seg(0.0, left, bottom, 0.0);
            seg(top, 1.0, 1.0, right);
          } else {
            seg(0.0, left, top, 1.0);
            seg(bottom, 0.0, 1.0, right);
          }
          break;
        }
        case 9: {  // a and d inside
          const double centre = 0.25 * (va + vb + vc + vd);
          if (centre >= s) {
            seg(0.0, left, top, 1.0);
            seg(bottom, 0.0, 1.0, right);
          } else {
            seg(0.0, left, bottom, 0.0);
            seg(top, 1.0, 1.0, right);
          }
          break;
        }
        default:
          break;
      }
    }
  }
  return length * h;
}

double symmetric_difference_measure(const GridField& a, const GridField& b) {
  require(a.same_grid(b), "symmetric_difference_measure: fields live on different grids");
  double total = 0.0;
  if (a.space == SpaceKind::kTorus) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      count += ((a.values[i] >= 0.5) != (b.values[i] >= 0.5)) ? 1 : 0;
    }
    return static_cast<double>(count) / static_cast<double>(a.values.size());
  }
  for (int i = 0; i < a.resolution; ++i) {
    if ((a.values[i] >= 0.5) != (b.values[i] >= 0.5)) total += cell_weight(a, i);
  }
  return total;
}

}  // namespace nstest
