#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tucb/audit.hpp"

using namespace tucb;

TEST_CASE("hand trace: one region, three co-binned points") {
  // t=1: empty (n0=0, n=1); t=2: one prior point; t=3: two prior points.
  const std::vector<AuditRecord> records{
      {1, 1, 1, 0}, {2, 1, 1, 1}, {3, 1, 2, 2}};
  const std::vector<double> alphas{0.5};
  const AuditReport report = audit(records, alphas);

  CHECK(report.sum1 == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(std::abs(report.sum2 - 11.0 / 6.0) <= 1e-12);
  CHECK(report.bound1 == doctest::Approx(4.939769533234644).epsilon(1e-12));
  CHECK(report.bound2 == doctest::Approx(2.09861228866811).epsilon(1e-12));
  CHECK(report.pass);
  REQUIRE(report.alpha_terms.size() == 1);
  CHECK(report.alpha_terms[0].sum ==
        doctest::Approx(1.0 + std::sqrt(0.5) + std::sqrt(1.0 / 3.0)));
  CHECK(report.alpha_terms[0].bound == doctest::Approx(2.0 * std::sqrt(3.0)));
}

TEST_CASE("single-round trace") {
  const std::vector<AuditRecord> records{{1, 1, 1, 0}};
  const AuditReport report = audit(records, std::vector<double>{0.5});
  CHECK(report.sum1 == doctest::Approx(1.0));
  CHECK(report.bound1 == doctest::Approx(std::numbers::e).epsilon(1e-12));
  CHECK(report.pass);
}

TEST_CASE("degenerate case: every point in its own region") {
  // With |P_T| = T, bound2 = T and sum2 <= T trivially.
  std::vector<AuditRecord> records;
  const std::int64_t T = 40;
  for (std::int64_t t = 1; t <= T; ++t) {
    records.push_back(AuditRecord{t, t, 1, 0});
  }
  const AuditReport report = audit(records, std::vector<double>{0.5});
  CHECK(report.bound2 == doctest::Approx(static_cast<double>(T)));
  CHECK(report.sum2 <= report.bound2);
  CHECK(report.pass);
}

TEST_CASE("auditor rejects inconsistent or malformed records") {
  std::vector<AuditRecord> bad{{1, 1, 2, 0}};  // n != max(1, n0)
  CHECK_THROWS_WITH_AS(audit(bad, std::vector<double>{0.5}),
                       doctest::Contains("t=1"), DataError);

  std::vector<AuditRecord> gap{{1, 1, 1, 0}, {3, 1, 1, 1}};
  CHECK_THROWS_AS(audit(gap, std::vector<double>{0.5}), DataError);

  std::vector<AuditRecord> shrink{{1, 4, 1, 0}, {2, 2, 1, 0}};
  CHECK_THROWS_AS(audit(shrink, std::vector<double>{0.5}), DataError);

  std::vector<AuditRecord> fine{{1, 1, 1, 0}};
  CHECK_THROWS_AS(audit(fine, std::vector<double>{1.0}), DataError);
  CHECK_THROWS_AS(audit(fine, std::vector<double>{0.0}), DataError);
}

TEST_CASE("record_from_log counts against the current partition") {
  Domain domain(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  Partition whole(domain);
  ObservationLog log;
  Eigen::VectorXd a(1);
  a << 0.3;

  // first round: nothing logged yet
  AuditRecord r1 = record_from_log(whole, log, a);
  CHECK(r1.n0_pre == 0);
  CHECK(r1.n_pre == 1);
  log.append(a, 0.5);

  // second point lands in the same (single) region
  Eigen::VectorXd b(1);
  b << 0.7;
  AuditRecord r2 = record_from_log(whole, log, b);
  CHECK(r2.n0_pre == 1);

  // a refinement that separates the prior point from the next point: counts
  // are re-binned against the refined partition
  Partition halves = split_region(whole, 0, 0, 0.5);
  AuditRecord r3 = record_from_log(halves, log, b);
  CHECK(r3.n0_pre == 0);
  CHECK(r3.n_pre == 1);
}

TEST_CASE("adversarial nested traces satisfy all three inequalities (sample)") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto trace = oracles::adversarial_trace(seed, 1500, seed % 2 == 0 ? 1 : 2, 32);
    const AuditReport report =
        audit(trace.records, std::vector<double>{0.3, 0.5, 0.9});
    CHECK(report.pass);
  }
}
