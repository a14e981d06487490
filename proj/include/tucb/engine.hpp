#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tucb/geometry.hpp"
#include "tucb/observation.hpp"
#include "tucb/tree_fit.hpp"

namespace tucb {

enum class Variant { Tucb, Ctucb, UniformMesh, Ucb1 };
enum class RefinementRule { Tree, Mesh, Zooming, Fixed };

/// Which confidence bonus enters the index.
///   PaperForm:          C * sqrt(4 log t / n)
///   VSchedule:          v * sqrt(log t / n)
///   ContextualSchedule: (v1 * sqrt(log t) + v2 * |z|^v3) / sqrt(n)
///   Ucb1Horizon:        sqrt(2 log T / n)   (T = fixed horizon)
enum class ExplorationForm { PaperForm, VSchedule, ContextualSchedule, Ucb1Horizon };

struct ExplorationConfig {
  ExplorationForm form = ExplorationForm::PaperForm;
  double v = 1.0;
  double v1 = 1.0;
  double v2 = 0.0;
  double v3 = 1.0;
};

struct EngineConfig {
  Variant variant = Variant::Tucb;
  double concentration = 0.1;     // C, scales the Hoeffding bonus
  double lipschitz_scale = 0.01;  // M, scales the diameter slack
  ExplorationConfig exploration;
  std::int64_t horizon = 0;  // T; required by Ucb1, Zooming and Ucb1Horizon
  RefinementRule refinement = RefinementRule::Tree;
  FitConfig fit;
  /// Per-round leaf cap floor(m^gamma) with m = observations fitted on;
  /// keeps |P_t| <= t^gamma. Set <= 0 to disable the schedule.
  double leaf_cap_exponent = 0.75;
  Metric metric = Metric::Linf;
  Eigen::Index context_dims = 0;   // > 0 for Ctucb; context coords come first
  std::int64_t discrete_arms = 0;  // > 0 for Ucb1
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-region corrected statistics: n = max(1, n0) and the optimistic
/// empty-region mean of 1.
struct RegionStats {
  std::int64_t region_id = 0;
  std::int64_t raw_count = 0;        // n0
  std::int64_t corrected_count = 1;  // n
  double corrected_mean = 1.0;       // m
};

/// From-scratch statistics for the current partition over the whole log;
/// every point is re-binned. Ascending region id.
std::vector<RegionStats> corrected_stats(const Partition& partition,
                                         const ObservationLog& log);

double ucb_index(const RegionStats& stats, double diameter, std::int64_t t,
                 const EngineConfig& config, double context_mag = 0.0);

/// Argmax over (id, index) pairs sorted by id; exact ties are broken
/// uniformly at random. No epsilon tolerance.
std::int64_t select_region(std::span<const std::pair<std::int64_t, double>> indices,
                           std::mt19937_64& rng);

/// Coordinate-wise uniform draw inside the region's box.
Eigen::VectorXd sample_arm(const Region& region, std::mt19937_64& rng);

/// Uniform-mesh refinement: starting from a 2^(d*h) hypercube grid, halve
/// every cell (2^d children) while the halved edge would still be at least
/// t^(-1/(d+2)). Guarantees |P_t| <= t^(d/(d+2)).
Partition mesh_refine(const Partition& partition, std::int64_t t);

/// Zooming rule: bisect (longest edge, lowest dim on ties) every region with
/// D > sqrt(8 log T / n), repeating until no region violates the rule.
Partition zooming_refine(const Partition& partition, const ObservationLog& log,
                         const EngineConfig& config);

struct Decision {
  std::int64_t t = 0;
  std::int64_t region_id = 0;
  Eigen::VectorXd arm;
  std::optional<Eigen::VectorXd> context;
  double reward = 0.0;
  double ucb = 0.0;
  double m = 0.0;
  std::int64_t n = 1;
  std::int64_t n0 = 0;
  double diameter = 0.0;
  std::optional<double> regret;
  std::int64_t partition_size = 1;  // |P_{t-1}|, the partition used to select
};

/// The sequential loop: refine -> corrected stats -> UCB indices -> select
/// region -> sample arm -> observe -> log. One instance per run; not
/// thread-safe, but independent instances may run concurrently.
class Engine {
 public:
  Engine(Partition initial, EngineConfig config);
  static Engine make(const Domain& domain, const EngineConfig& config);

  /// One non-contextual round. `observe` failures propagate and leave the
  /// observable state unchanged (RNG streams are rolled back; any refinement
  /// already applied is a deterministic function of the log, so a retry
  /// behaves identically).
  Decision step(const std::function<double(const Eigen::VectorXd&)>& observe);

  /// One contextual round: candidates are the regions whose box meets the
  /// slice {z} x A (closed interval test on the context coordinates); the
  /// arm coordinates are sampled inside the chosen region, the context
  /// coordinates are pinned to z. `observe` receives the joint point.
  Decision step_with_context(
      const Eigen::VectorXd& context,
      const std::function<double(const Eigen::VectorXd&)>& observe);

  const Partition& partition() const { return store_.partition(); }
  const ObservationLog& log() const { return log_; }
  std::int64_t round() const { return t_; }
  const EngineConfig& config() const { return config_; }
  /// Cached per-region statistics (ascending id), identical to
  /// corrected_stats(partition(), log()).
  std::vector<RegionStats> stats() const;
  const std::vector<Eigen::VectorXd>& discrete_arm_points() const { return arms_; }

 private:
  Decision do_step(const std::optional<Eigen::VectorXd>& context,
                   const std::function<double(const Eigen::VectorXd&)>& observe);
  void refine();

  EngineConfig config_;
  ObservationLog log_;
  LeafStore store_;
  std::vector<Eigen::VectorXd> arms_;  // Ucb1 only: one point per region
  std::mt19937_64 tie_rng_;
  std::mt19937_64 arm_rng_;
  std::int64_t t_ = 1;
};

}  // namespace tucb
