#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "tucb/kernels.hpp"

using namespace tucb;

namespace {

Domain unit_domain(int dims) {
  return Domain(Eigen::VectorXd::Zero(dims), Eigen::VectorXd::Ones(dims));
}

Eigen::MatrixXd rows1(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

}  // namespace

TEST_CASE("hard gram blocks") {
  Partition halves = split_region(Partition(unit_domain(1)), 0, 0, 0.5);
  const HardBoxKernel hard(halves);

  const Eigen::MatrixXd same = gram(hard, rows1({0.1, 0.2}));
  CHECK(same(0, 1) == 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(same);
  CHECK(eig.eigenvalues()[0] == doctest::Approx(0.0));
  CHECK(eig.eigenvalues()[1] == doctest::Approx(2.0));

  const Eigen::MatrixXd apart = gram(hard, rows1({0.1, 0.9}));
  CHECK(apart.isApprox(Eigen::MatrixXd::Identity(2, 2)));

  // two co-binned + one apart: v'Kv = (v1+v2)^2 + v3^2
  const Eigen::MatrixXd K = gram(hard, rows1({0.1, 0.2, 0.9}));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d v(u(rng), u(rng), u(rng));
    const double quad = v.transpose() * K * v;
    const double block = (v[0] + v[1]) * (v[0] + v[1]) + v[2] * v[2];
    REQUIRE(quad == doctest::Approx(block).epsilon(1e-12));
    REQUIRE(quad >= 0.0);
  }
}

TEST_CASE("psd_check") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 1.5, 1.5, 1.0;
  const PsdCheck b = psd_check(bad, 1e-8);
  CHECK_FALSE(b.psd);
  CHECK(b.min_eigenvalue == doctest::Approx(-0.5));

  CHECK(psd_check(Eigen::MatrixXd::Identity(3, 3), 1e-8).psd);
  CHECK(psd_check(Eigen::MatrixXd::Identity(3, 3), 1e-8).min_eigenvalue ==
        doctest::Approx(1.0));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(psd_check(asym, 1e-8), std::invalid_argument);
}

TEST_CASE("gp posterior closed forms on the hard kernel") {
  Partition halves = split_region(Partition(unit_domain(1)), 0, 0, 0.5);
  const HardBoxKernel hard(halves);

  // one training point, query in the same region, sigma^2 = 1 -> mean 1/2
  {
    const auto post = gp_posterior(hard, rows1({0.2}), Eigen::VectorXd::Ones(1), 1.0,
                                   rows1({0.3}));
    CHECK(post.mean[0] == doctest::Approx(0.5).epsilon(1e-12));
  }

  // query in an empty region -> the prior
  {
    const auto post = gp_posterior(hard, rows1({0.2}), Eigen::VectorXd::Ones(1), 1.0,
                                   rows1({0.9}));
    CHECK(post.mean[0] == doctest::Approx(0.0));
    CHECK(post.variance[0] == doctest::Approx(1.0));
  }

  // n co-binned points: mean = sum(y) / (n + sigma^2), checked against a
  // dense-solve oracle that avoids the library's Cholesky path
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {1, 5, 50}) {
    for (double s2 : {1e-2, 1.0, 10.0}) {
      Eigen::MatrixXd X(n, 1);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; ++i) {
        X(i, 0) = 0.5 * u(rng);  // all in the left region
        y[i] = u(rng);
      }
      const auto post = gp_posterior(hard, X, y, s2, rows1({0.25}));
      const double closed = y.sum() / (static_cast<double>(n) + s2);
      CHECK(post.mean[0] == doctest::Approx(closed).epsilon(1e-9));

      Eigen::MatrixXd K = gram(hard, X);
      K.diagonal().array() += s2;
      Eigen::VectorXd kstar = Eigen::VectorXd::Ones(n);
      const double dense = kstar.dot(K.fullPivLu().solve(y));
      CHECK(post.mean[0] == doctest::Approx(dense).epsilon(1e-9));
    }
  }
}

TEST_CASE("noiseless limit recovers the region average") {
  Partition halves = split_region(Partition(unit_domain(1)), 0, 0, 0.5);
  const HardBoxKernel hard(halves);
  Eigen::MatrixXd X = rows1({0.1, 0.2, 0.3, 0.4});
  Eigen::VectorXd y(4);
  y << 0.2, 0.6, 0.4, 0.8;
  const double region_mean = y.mean();
  double prev_gap = 1e300;
  for (double s2 : {1e-2, 1e-4, 1e-6}) {
    const auto post = gp_posterior(hard, X, y, s2, rows1({0.25}));
    const double gap = std::abs(post.mean[0] - region_mean);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 1e-6);
}

TEST_CASE("soft kernel: self-similarity, saturation, symmetry") {
  Partition halves = split_region(Partition(unit_domain(1)), 0, 0, 0.5);
  const SoftBoxKernel soft(halves, 1000.0);

  Eigen::VectorXd x(1), y(1);
  x << 0.25;
  CHECK(soft(x, x) == 1.0);

  y << 0.26;  // co-binned, both far from every boundary
  CHECK(soft(x, y) >= 0.999);

  y << 0.75;  // different regions, far from the shared boundary
  CHECK(soft(x, y) <= 0.001);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    x << u(rng);
    y << u(rng);
    const double a = soft(x, y);
    REQUIRE(a == soft(y, x));
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0 + 1e-12);
  }
}

TEST_CASE("soft kernel converges to the hard kernel") {
  Partition p = split_region(Partition(unit_domain(1)), 0, 0, 0.4);
  p = split_region(p, p.regions()[1].id, 0, 0.7);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs;
  while (xs.size() < 12) {
    const double x = u(rng);
    bool interior = true;  // at least 0.01 away from every region boundary
    for (const Region& r : p.regions()) {
      if (std::abs(x - r.lo[0]) < 0.01 || std::abs(x - r.hi[0]) < 0.01) {
        interior = false;
      }
    }
    if (interior) xs.push_back(x);
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) X(static_cast<Eigen::Index>(i), 0) = xs[i];

  const Eigen::MatrixXd hard = gram(HardBoxKernel(p), X);
  const Eigen::MatrixXd soft = gram(SoftBoxKernel(p, 1e6), X);
  CHECK((hard - soft).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("demo curves smooth monotonically as alpha falls") {
  // fixed uneven partition of [0,1] and a step-like data set
  Partition p = split_region(Partition(unit_domain(1)), 0, 0, 0.35);
  p = split_region(p, p.regions()[1].id, 0, 0.6);
  p = split_region(p, p.regions()[2].id, 0, 0.85);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 60;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double x = u(rng);
    X(i, 0) = x;
    y[i] = (x < 0.35 ? 0.2 : x < 0.6 ? 0.9 : x < 0.85 ? 0.4 : 0.7) +
           0.05 * (u(rng) - 0.5);
  }

  const std::vector<double> alphas{1000, 500, 100, 50, 10};
  const DemoCurves curves = demo_curves(p, X, y, 0.01, 256, alphas);
  double prev_tv = total_variation(curves.gp_hard) + 1e-6;
  for (Eigen::Index a = 0; a < curves.gp_soft.cols(); ++a) {
    const double tv = total_variation(curves.gp_soft.col(a));
    CHECK(tv <= prev_tv + 1e-6);
    prev_tv = tv;
  }
}

TEST_CASE("signed boundary distance") {
  Region box{0, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.5)};
  CHECK(signed_boundary_distance(box, Eigen::Vector2d(0.5, 0.25)) ==
        doctest::Approx(0.25));
  CHECK(signed_boundary_distance(box, Eigen::Vector2d(0.1, 0.25)) ==
        doctest::Approx(0.1));
  CHECK(signed_boundary_distance(box, Eigen::Vector2d(1.2, 0.25)) ==
        doctest::Approx(-0.2));
  CHECK(signed_boundary_distance(box, Eigen::Vector2d(0.0, 0.25)) ==
        doctest::Approx(0.0));
}
