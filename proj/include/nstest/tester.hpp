#pragma once

#include <cstdint>

#include "nstest/noise.hpp"
#include "nstest/region.hpp"

namespace nstest {

// Inputs of the surface-area tester: budget S, relative slack eta, and
// perturbation budget epsilon.
struct TesterParams {
  double surface_budget;  // S > 0
  double eta;             // > 0
  double epsilon;         // in (0,1)
};

// Parameters computed from TesterParams:
//   t = (eps eta / S)^2
//   m = ceil(7 eta^-3 eps^-1 S^2)
//   threshold = (2 sqrt(t) / sqrt(pi)) (S + m^{-1/2} t^{-1/4} S^{1/2})
struct DerivedParams {
  double t;
  std::int64_t m;
  double threshold;
  // sqrt(2t) > 1/4: the wrapped-Gaussian displacement no longer looks like a
  // small perturbation on the torus. A flag, not an error.
  bool wrap_warning;
};

struct TestVerdict {
  bool accepted;  // ns_fraction <= threshold
  double ns_fraction;
  double threshold;
  DerivedParams derived;
};

struct AcceptProbability {
  double rate;
  double std_error;
  int trials;
};

// Throws std::domain_error when TesterParams are out of range.
DerivedParams derive_params(const TesterParams& p);

// One run of the tester: draws exactly m stationary pairs at the derived t
// (no early exit) and accepts iff the disagreement fraction is at or below
// the threshold. Deterministic in (params, region, seed).
TestVerdict run_test(const TesterParams& p, const NoiseModel& model,
                     const Region& region, std::uint64_t seed, int threads = 1);

// Fraction of `trials` independent runs that accept, with Bernoulli standard
// error. Trial k uses the derived sub-seed derive_seed(seed, k).
AcceptProbability accept_probability(const TesterParams& p, const NoiseModel& model,
                                     const Region& region, int trials,
                                     std::uint64_t seed, int threads = 1);

// (2 sqrt(t) / sqrt(pi)) * S: the Crofton-type upper bound on NS_t of a set
// with surface area S.
double crofton_bound(double surface_area, double t);

}  // namespace nstest
