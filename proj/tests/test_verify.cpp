#include <cmath>
#include <vector>

#include "doctest.h"
#include "nstest/gaussian.hpp"
#include "nstest/verify.hpp"

using namespace nstest;

namespace {

GridScenario fixture(const std::string& name) {
  for (const GridScenario& s : standard_fixtures()) {
    if (s.name == name) return s;
  }
  FAIL("unknown fixture ", name);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("check arithmetic matches the report invariant") {
  const CheckResult ok = make_check("x", 1.0, 1.0, 0.03, 1e-9);
  CHECK(ok.pass);
  CHECK(ok.slack == doctest::Approx(0.03 + 1e-9));
  const CheckResult bad = make_check("y", 1.04, 1.0, 0.03, 1e-9);
  CHECK(!bad.pass);
}

TEST_CASE("coarea_check passes on the whole fixture suite") {
  for (const GridScenario& s : standard_fixtures()) {
    const VerificationReport r = coarea_check(s);
    INFO("fixture ", s.name);
    CHECK(r.pass());
  }
}

TEST_CASE("coarea identity routes agree on the interval fixture") {
  const VerificationReport r = coarea_check(fixture("interval-half"));
  const double level = r.stats.at("level_integral");
  const double grid = r.stats.at("grid_integral");
  CHECK(std::abs(level - grid) / grid < 0.03);
  // Equality case: both routes equal c_0(t) NS up to discretization.
  const double rhs = r.stats.at("c_r") * r.stats.at("ns");
  CHECK(grid == doctest::Approx(rhs).epsilon(0.01));
}

TEST_CASE("coarea_check on the empty fixture is trivially green") {
  const VerificationReport r = coarea_check(fixture("empty"));
  CHECK(r.pass());
  CHECK(r.stats.at("ns") == 0.0);
  CHECK(r.stats.at("level_integral") == 0.0);
  CHECK(r.stats.at("grid_integral") == 0.0);
}

TEST_CASE("zero numerical slack makes the exact identities fail") {
  Tolerances exact;
  exact.coarea_identity = 0.0;
  exact.lemma = 0.0;
  exact.smoothness = 0.0;
  exact.certificate = 0.0;
  exact.floor = 0.0;
  const VerificationReport r = coarea_check(fixture("interval-half"), exact);
  CHECK(!r.pass());
}

TEST_CASE("smoothness_check passes everywhere; near-equality on the interval") {
  for (const GridScenario& s : standard_fixtures()) {
    const VerificationReport r = smoothness_check(s);
    INFO("fixture ", s.name);
    CHECK(r.pass());
  }
  // Flat boundaries attain the bound: the measured violation is far below
  // the 2% budget (and below 0.5% of the peak gradient).
  const VerificationReport r = smoothness_check(fixture("interval-half"));
  CHECK(r.stats.at("max_violation") <= 0.005 * r.stats.at("max_gradient"));
}

TEST_CASE("threshold_search certificates on the fixture suite") {
  for (const GridScenario& s : standard_fixtures()) {
    for (double eta : {0.1, 0.2}) {
      const LevelSetCertificate cert = threshold_search(s, eta);
      INFO("fixture ", s.name, " eta ", eta);
      CHECK(cert.pass());
      CHECK(cert.level >= eta);
      CHECK(cert.level <= 1.0 - eta);
      CHECK(cert.perimeter <= cert.bound_rhs * 1.03 + 1e-9);
      CHECK(cert.sym_diff <= cert.ns / eta * 1.03 + 1e-9);
    }
  }
}

TEST_CASE("threshold_search returns a set close to the interval fixture") {
  const LevelSetCertificate cert = threshold_search(fixture("interval-half"), 0.2);
  // B nearly coincides with A: boundary shift is a few smoothing lengths.
  CHECK(cert.sym_diff < 0.05);
  CHECK(cert.perimeter == 2.0);
}

TEST_CASE("the dashed-line fixture collapses under its own scale") {
  const GridScenario dashed = fixture("dashed-0.01");
  const LevelSetCertificate cert = threshold_search(dashed, 0.2);
  // Smoothing merges the dashes: the certificate perimeter sits far below
  // the raw perimeter 2 floor(5/sqrt(t)) = 100.
  CHECK(cert.perimeter < 1.0);
  CHECK(cert.pass());
}

TEST_CASE("threshold_search on the empty fixture") {
  const LevelSetCertificate cert = threshold_search(fixture("empty"), 0.1);
  CHECK(cert.perimeter == 0.0);
  CHECK(cert.sym_diff == 0.0);
  CHECK(cert.pass());
}

TEST_CASE("threshold_search validates eta") {
  CHECK_THROWS_AS(threshold_search(fixture("empty"), 0.0), std::domain_error);
  CHECK_THROWS_AS(threshold_search(fixture("empty"), 0.5), std::domain_error);
}

TEST_CASE("reports and certificates serialize deterministically") {
  const GridScenario s = fixture("interval-half");
  const auto a = report_to_json(coarea_check(s)).dump();
  const auto b = report_to_json(coarea_check(s)).dump();
  CHECK(a == b);
  const auto ca = certificate_to_json(threshold_search(s, 0.2)).dump();
  const auto cb = certificate_to_json(threshold_search(s, 0.2)).dump();
  CHECK(ca == cb);
}
