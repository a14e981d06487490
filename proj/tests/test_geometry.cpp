#include <doctest.h>

#include <random>

#include "tucb/geometry.hpp"

using namespace tucb;

namespace {

Domain unit_domain(int dims) {
  return Domain(Eigen::VectorXd::Zero(dims), Eigen::VectorXd::Ones(dims));
}

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("region_of on the trivial cover") {
  Partition p(unit_domain(2));
  CHECK(region_of(p, Eigen::Vector2d(0.5, 0.5)).id == 0);
}

TEST_CASE("region_of honours the half-open boundary convention") {
  Partition p = split_region(Partition(unit_domain(1)), 0, 0, 0.5);
  // children of region 0 are ids 1 ([0,0.5)) and 2 ([0.5,1])
  CHECK(region_of(p, vec1(0.5)).id == 2);
  CHECK(region_of(p, vec1(0.49999)).id == 1);
  CHECK(region_of(p, vec1(1.0)).id == 2);  // domain top face is closed
  CHECK(region_of(p, vec1(0.0)).id == 1);
}

TEST_CASE("region_of rejects points outside the domain, naming the dimension") {
  Partition p(unit_domain(2));
  try {
    region_of(p, Eigen::Vector2d(0.5, 1.5));
    FAIL("expected DomainViolation");
  } catch (const DomainViolation& err) {
    CHECK(err.dimension() == 1);
    CHECK(std::string(err.what()).find("dimension 1") != std::string::npos);
  }
}

TEST_CASE("diameter under both metrics") {
  Region unit{0, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
  CHECK(diameter(unit, Metric::Linf) == doctest::Approx(1.0));
  CHECK(diameter(unit, Metric::L2) == doctest::Approx(std::sqrt(2.0)));
  Region box{1, Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.25)};
  CHECK(diameter(box, Metric::Linf) == doctest::Approx(0.5));
}

TEST_CASE("verify_nested detects straddles and accepts refinements") {
  Partition whole(unit_domain(1));
  Partition halves = split_region(whole, 0, 0, 0.5);
  CHECK(verify_nested(whole, whole).nested);       // P_t nested in itself
  CHECK(verify_nested(whole, halves).nested);      // halving refines the whole
  CHECK_FALSE(verify_nested(halves, whole).nested);

  Partition sixty = split_region(whole, 0, 0, 0.6);
  const NestedResult bad = verify_nested(halves, sixty);
  CHECK_FALSE(bad.nested);
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness->fine.lo[0] == doctest::Approx(0.0));
  CHECK(bad.witness->fine.hi[0] == doctest::Approx(0.6));
}

TEST_CASE("verify_nested requires matching domains") {
  Partition a(unit_domain(1));
  Partition b(Domain(vec1(0.0), vec1(2.0)));
  CHECK_THROWS_AS(verify_nested(a, b), DataError);
}

TEST_CASE("split_region locality and degenerate thresholds") {
  Partition two = split_region(Partition(unit_domain(1)), 0, 0, 0.5);
  const std::int64_t untouched = two.regions()[0].id;
  Partition three = split_region(two, two.regions()[1].id, 0, 0.75);
  CHECK(three.size() == 3);
  CHECK(three.has_region(untouched));
  CHECK(verify_nested(two, three).nested);

  CHECK_THROWS_AS(split_region(two, untouched, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(split_region(two, untouched, 0, 0.5), std::invalid_argument);
}

TEST_CASE("random refinements keep the disjoint-cover and monotone diameters") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Partition p(unit_domain(2));
  for (int s = 0; s < 40; ++s) {
    const auto& regions = p.regions();
    std::uniform_int_distribution<std::size_t> pick(0, regions.size() - 1);
    const Region target = regions[pick(rng)];
    const int dim = static_cast<int>(unit(rng) * 2);
    const double thr =
        target.lo[dim] + (0.2 + 0.6 * unit(rng)) * (target.hi[dim] - target.lo[dim]);
    Partition next = split_region(p, target.id, dim, thr);
    CHECK(verify_nested(p, next).nested);
    // children diameters never exceed the parent's
    for (Metric metric : {Metric::Linf, Metric::L2}) {
      const double parent_diam = diameter(target, metric);
      CHECK(diameter(next.regions()[next.size() - 2], metric) <= parent_diam);
      CHECK(diameter(next.regions()[next.size() - 1], metric) <= parent_diam);
    }
    p = std::move(next);
  }

  // Exactly one region claims each sampled point, and region_of is stable.
  for (int i = 0; i < 100000; ++i) {
    Eigen::Vector2d x(unit(rng), unit(rng));
    int hits = 0;
    std::int64_t hit_id = -1;
    for (const Region& r : p.regions()) {
      if (r.contains(x, p.domain())) {
        ++hits;
        hit_id = r.id;
      }
    }
    REQUIRE(hits == 1);
    REQUIRE(region_of(p, x).id == hit_id);
    REQUIRE(region_of(p, x).id == region_of(p, x).id);
  }
}

TEST_CASE("partition JSON round trip") {
  Partition p = split_region(Partition(unit_domain(2)), 0, 1, 0.3125);
  const nlohmann::json j = to_json(p);
  const Partition back = partition_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.size() == p.size());
  CHECK(verify_nested(p, back).nested);

  // validating constructor rejects overlapping regions
  nlohmann::json bad = j;
  bad["regions"][0]["hi"][1] = 0.4;
  CHECK_THROWS_AS(partition_from_json(bad), std::invalid_argument);
}

TEST_CASE("uniform_slabs covers the domain with ordered cells") {
  Partition p = uniform_slabs(unit_domain(2), 4);
  CHECK(p.size() == 4);
  CHECK(region_of(p, Eigen::Vector2d(0.1, 0.9)).id == 0);
  CHECK(region_of(p, Eigen::Vector2d(0.9, 0.1)).id == 3);
  CHECK(region_of(p, Eigen::Vector2d(0.25, 0.5)).id == 1);  // boundary goes right
}
