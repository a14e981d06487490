#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tucb/engine.hpp"
#include "tucb/geometry.hpp"

namespace tucb {

/// Negated Himmelblau on [-5,5]^2; global maximum 0 (e.g. at (3,2)).
double himmelblau_raw(double x1, double x2);

/// Negated Goldstein-Price on [-2,2]^2; global maximum -3 at (0,-1).
double goldstein_raw(double x1, double x2);

/// A synthetic benchmark with its domain rescaled to [-0.5,0.5]^2 and its
/// range min-max normalized into [0,1]. The maximum is analytic, so the
/// rescaled optimum is exactly 1.0; the minimum comes from a grid scan.
class Objective {
 public:
  static Objective rescaled(const std::string& name, int grid_n = 1024);

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  /// Noiseless rescaled value.
  double value(const Eigen::VectorXd& x) const;
  double optimum() const { return 1.0; }
  const Eigen::VectorXd& optimum_arm() const { return optimum_arm_; }
  double range_min() const { return f_min_; }
  double range_max() const { return f_max_; }

 private:
  Objective() : domain_(Eigen::VectorXd::Constant(2, -0.5), Eigen::VectorXd::Constant(2, 0.5)) {}

  std::string name_;
  Domain domain_;
  double native_scale_ = 1.0;  // native coords = native_scale_ * rescaled
  double f_min_ = 0.0;
  double f_max_ = 0.0;
  double (*raw_)(double, double) = nullptr;
  Eigen::VectorXd optimum_arm_;
};

/// Convenience alias matching the spec's operation name.
inline Objective make_rescaled(const std::string& name, int grid_n = 1024) {
  return Objective::rescaled(name, grid_n);
}

enum class NoiseKind { None, Uniform, TruncatedGaussian };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Uniform;
  double sigma = 0.05;
  double clip = 0.15;

  /// Accepts "none", "uniform:SIGMA", "tgauss:SIGMA[:CLIP]" (clip defaults
  /// to 3*sigma).
  static NoiseSpec parse(const std::string& text);
  std::string str() const;
};

/// Bounded mean-zero noise on top of a noiseless evaluator. Owns its own RNG
/// stream, separate from the engine's draws.
class NoisyEvaluator {
 public:
  NoisyEvaluator(std::function<double(const Eigen::VectorXd&)> f, NoiseSpec spec,
                 std::uint64_t noise_seed);
  double operator()(const Eigen::VectorXd& x);

 private:
  std::function<double(const Eigen::VectorXd&)> f_;
  NoiseSpec spec_;
  std::mt19937_64 rng_;
};

/// Contextual task built from a 2-D objective: the first coordinate becomes
/// an i.i.d. uniform context, the second the 1-D arm. The per-context
/// optimum is a grid oracle evaluated at the exact context.
class ContextualObjective {
 public:
  explicit ContextualObjective(Objective base, int opt_grid = 4096);

  const Objective& base() const { return base_; }
  const Domain& joint_domain() const { return base_.domain(); }
  Eigen::Index context_dims() const { return 1; }

  double value(const Eigen::VectorXd& joint) const { return base_.value(joint); }
  double value(double z, double a) const;
  /// max_a f(z, a) over an opt_grid-point arm grid at the exact z.
  double optimum_for(double z) const;
  /// One uniform context draw on the context interval.
  Eigen::VectorXd draw_context(std::mt19937_64& rng) const;

 private:
  Objective base_;
  int opt_grid_;
};

inline ContextualObjective contextual_wrap(Objective base, int opt_grid = 4096) {
  return ContextualObjective(std::move(base), opt_grid);
}

struct RegretRow {
  std::int64_t t = 0;
  double inst = 0.0;
  double cum = 0.0;
  double avg = 0.0;
  double best_so_far = 0.0;
};

/// Regret over expected payoff: the noiseless objective is used, never the
/// observed rewards.
std::vector<RegretRow> regret_accumulate(std::span<const Decision> decisions,
                                         const Objective& objective);
std::vector<RegretRow> regret_accumulate(std::span<const Decision> decisions,
                                         const ContextualObjective& objective);
/// Discrete-arm runs: the optimum is the best arm of the given set.
std::vector<RegretRow> regret_accumulate(std::span<const Decision> decisions,
                                         const Objective& objective,
                                         std::span<const Eigen::VectorXd> arms);

}  // namespace tucb
