#include <doctest.h>

#include <random>

#include "tucb/objectives.hpp"
#include "tucb/rng.hpp"

using namespace tucb;

TEST_CASE("raw benchmark values") {
  CHECK(himmelblau_raw(3.0, 2.0) == 0.0);
  CHECK(himmelblau_raw(0.0, 0.0) == doctest::Approx(-170.0));
  CHECK(himmelblau_raw(5.0, 5.0) == doctest::Approx(-890.0));

  CHECK(goldstein_raw(0.0, -1.0) == doctest::Approx(-3.0));
  CHECK(goldstein_raw(0.0, 0.0) == doctest::Approx(-600.0));
}

TEST_CASE("negated goldstein never exceeds its analytic maximum") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const double g = goldstein_raw(u(rng), u(rng));
    REQUIRE(std::isfinite(g));
    REQUIRE(g <= -3.0 + 1e-9);
  }
}

TEST_CASE("rescaled objectives peak at exactly 1") {
  const Objective him = Objective::rescaled("himmelblau", 512);
  CHECK(him.value(Eigen::Vector2d(0.3, 0.2)) == doctest::Approx(1.0).epsilon(1e-6));
  const Objective gold = Objective::rescaled("goldstein", 512);
  CHECK(gold.value(Eigen::Vector2d(0.0, -0.25)) == doctest::Approx(1.0).epsilon(1e-3));

  // spot values stay in [0,1] on a coarse grid at the oracle's own resolution
  const int n = 256;
  const Objective him256 = Objective::rescaled("himmelblau", n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = -0.5 + static_cast<double>(i) / (n - 1);
      const double b = -0.5 + static_cast<double>(j) / (n - 1);
      const double v = him256.value(Eigen::Vector2d(a, b));
      REQUIRE(v >= -1e-12);
      REQUIRE(v <= 1.0 + 1e-12);
    }
  }
  CHECK_THROWS_AS(Objective::rescaled("rosenbrock", 512), ConfigError);
  CHECK_THROWS_AS(Objective::rescaled("himmelblau", 16), ConfigError);
}

TEST_CASE("noise: exactness at sigma zero, mean-zero uniform, clipped gaussian") {
  const Objective him = Objective::rescaled("himmelblau", 512);
  auto value = [&](const Eigen::VectorXd& x) { return him.value(x); };

  NoisyEvaluator none(value, NoiseSpec::parse("none"), 0);
  NoisyEvaluator zero(value, NoiseSpec::parse("uniform:0"), 0);
  const Eigen::Vector2d x(0.11, -0.2);
  CHECK(none(x) == him.value(x));
  CHECK(zero(x) == him.value(x));

  NoisyEvaluator uni(value, NoiseSpec::parse("uniform:0.1"), 7);
  double mean = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) mean += uni(x) - him.value(x);
  mean /= draws;
  CHECK(std::abs(mean) <= 0.002);  // 3 sigma / sqrt(n) bound

  const NoiseSpec tg = NoiseSpec::parse("tgauss:0.1");
  CHECK(tg.clip == doctest::Approx(0.3));
  NoisyEvaluator gauss(value, tg, 7);
  for (int i = 0; i < 100000; ++i) {
    REQUIRE(std::abs(gauss(x) - him.value(x)) <= 0.3 + 1e-15);
  }
}

TEST_CASE("contextual wrapper: oracle accuracy and seeding") {
  const ContextualObjective ctx = contextual_wrap(Objective::rescaled("himmelblau", 512));
  const ContextualObjective fine(Objective::rescaled("himmelblau", 512), 65536);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uz(-0.5, 0.5);
  for (int i = 0; i < 100; ++i) {
    const double z = uz(rng);
    REQUIRE(std::abs(ctx.optimum_for(z) - fine.optimum_for(z)) <= 1e-3);
  }

  // per-round regret against the oracle is never meaningfully negative
  std::uniform_real_distribution<double> ua(-0.5, 0.5);
  for (int i = 0; i < 20000; ++i) {
    const double z = uz(rng);
    const double a = ua(rng);
    REQUIRE(ctx.optimum_for(z) - ctx.value(z, a) >= -1e-6);
  }

  // identical context seeds give identical context sequences
  auto s1 = seeded_stream(11, stream_tag::kContext);
  auto s2 = seeded_stream(11, stream_tag::kContext);
  for (int i = 0; i < 100; ++i) {
    CHECK(ctx.draw_context(s1)[0] == ctx.draw_context(s2)[0]);
  }
}

TEST_CASE("regret accumulation: optimal play, arithmetic, noise independence") {
  const Objective him = Objective::rescaled("himmelblau", 512);

  std::vector<Decision> optimal(3);
  for (int i = 0; i < 3; ++i) {
    optimal[i].t = i + 1;
    optimal[i].arm = him.optimum_arm();
    optimal[i].reward = 123.456;  // rewards must not matter
  }
  const auto rows = regret_accumulate(optimal, him);
  CHECK(rows.back().cum == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rows.back().best_so_far == doctest::Approx(1.0).epsilon(1e-9));

  // cumulative/average bookkeeping is consistent with the instantaneous series
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Decision> random_play(50);
  for (int i = 0; i < 50; ++i) {
    random_play[i].t = i + 1;
    random_play[i].arm = Eigen::Vector2d(u(rng), u(rng));
  }
  auto rr = regret_accumulate(random_play, him);
  double cum = 0.0, best = -1e300;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    cum += rr[i].inst;
    best = std::max(best, him.value(random_play[i].arm));
    REQUIRE(rr[i].inst >= -1e-9);
    REQUIRE(rr[i].cum == doctest::Approx(cum).epsilon(1e-12));
    REQUIRE(rr[i].avg == doctest::Approx(cum / (i + 1.0)).epsilon(1e-12));
    REQUIRE(rr[i].best_so_far == doctest::Approx(best).epsilon(1e-12));
  }

  // regret is over expected payoff: scrambling rewards changes nothing
  auto scrambled = random_play;
  for (auto& d : scrambled) d.reward += 10.0;
  const auto rr2 = regret_accumulate(scrambled, him);
  for (std::size_t i = 0; i < rr.size(); ++i) {
    CHECK(rr[i].inst == rr2[i].inst);
  }
}

TEST_CASE("uniform play's average regret matches the grid mean") {
  const Objective him = Objective::rescaled("himmelblau", 1024);
  // grid-mean oracle for E[f]
  const int n = 512;
  double grid_mean = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = -0.5 + static_cast<double>(i) / (n - 1);
      const double b = -0.5 + static_cast<double>(j) / (n - 1);
      grid_mean += him.value(Eigen::Vector2d(a, b));
    }
  }
  grid_mean /= static_cast<double>(n) * n;

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Decision> play(1000);
  for (int i = 0; i < 1000; ++i) {
    play[i].t = i + 1;
    play[i].arm = Eigen::Vector2d(u(rng), u(rng));
  }
  const auto rows = regret_accumulate(play, him);
  CHECK(rows.back().avg == doctest::Approx(1.0 - grid_mean).epsilon(0.03));
}
