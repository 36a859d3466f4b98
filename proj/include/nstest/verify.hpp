#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "nstest/grid.hpp"
#include "nstest/region.hpp"

namespace nstest {

// One inequality check: pass <=> lhs <= rhs * (1 + tolerance) + floor.
struct CheckResult {
  std::string name;
  double lhs;
  double rhs;
  double tolerance;
  double floor;
  double slack;  // rhs * (1 + tolerance) + floor - lhs
  bool pass;
};

CheckResult make_check(std::string name, double lhs, double rhs, double tolerance,
                       double floor);

struct VerificationReport {
  std::string name;
  std::vector<CheckResult> checks;
  // Extra named quantities (ns, max gradient, ...) for reporting.
  std::map<std::string, double> stats;

  bool pass() const;
  const CheckResult& check(const std::string& check_name) const;
};

nlohmann::json report_to_json(const VerificationReport& report);

// A region plus the lab parameters it is verified at.
struct GridScenario {
  std::string name;
  Region region;
  SemigroupKind kind;
  double t;
  int resolution;
  double window = 6.0;
};

// Global numerical slack budget: the verified inequalities are exact in the
// continuum; tolerances cover discretization only.
struct Tolerances {
  double coarea_identity = 0.03;  // relative, both directions
  double lemma = 0.02;            // relative, one-sided
  double smoothness = 0.02;       // fraction of max |grad|
  double certificate = 0.03;      // relative, certificate inequalities
  double floor = 1e-9;
};

// Number of levels used for threshold scans and the s-integration of the
// coarea identity.
inline constexpr int kLevelGridSize = 512;

// Checks, on one grid scenario,
//   (i)  the coarea identity: the level integral of psi(s) mu+(g^{>= s})
//        equals the grid sum E psi(g) |grad g| within the identity tolerance,
//   (ii) E psi(g) |grad g| <= c_R(t) NS_t(A) within the lemma tolerance.
VerificationReport coarea_check(const GridScenario& scenario, const Tolerances& tol = {});

// Pointwise bound |grad P_t 1_A| <= c_R(t) I(P_t 1_A): the largest violation
// must not exceed smoothness * max |grad| + floor.
VerificationReport smoothness_check(const GridScenario& scenario,
                                    const Tolerances& tol = {});

// Level-set certificate: the level s* in [eta, 1-eta] minimizing the
// perimeter of (P_t 1_A)^{>= s}, its symmetric difference from A, and the
// bound c_R(t) NS_t(A) / psi_integral(eta, 1-eta) it is checked against.
struct LevelSetCertificate {
  std::string name;
  double eta;
  double t;
  double level;      // s*
  double perimeter;  // mu+((P_t 1_A)^{>= s*})
  double sym_diff;   // mu((P_t 1_A)^{>= s*} Delta A)
  double ns;         // discrete NS_t(A) on the same grid
  double bound_rhs;  // c_R(t) ns / psi_integral(eta, 1-eta)
  bool perimeter_ok;
  bool sym_diff_ok;
  // The scanned curve, for CSV dumps: level, perimeter, sym_diff triples.
  std::vector<double> levels;
  std::vector<double> perimeters;
  std::vector<double> sym_diffs;

  bool pass() const { return perimeter_ok && sym_diff_ok; }
};

LevelSetCertificate threshold_search(const GridScenario& scenario, double eta,
                                     const Tolerances& tol = {});

nlohmann::json certificate_to_json(const LevelSetCertificate& cert);

// The default verification suite shared by the CLI and the acceptance tests.
std::vector<GridScenario> standard_fixtures();

}  // namespace nstest
