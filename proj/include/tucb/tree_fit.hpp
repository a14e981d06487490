#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tucb/geometry.hpp"
#include "tucb/observation.hpp"

namespace tucb {

enum class FeaturePolicy { AllFeatures, RoundRobin };

struct FitConfig {
  /// Minimum MAE reduction for a split to happen.
  double eta = 1e-3;
  /// Hard cap on the number of leaves; the engine additionally applies the
  /// floor(t^0.75) schedule on top of this.
  std::int64_t max_leaves = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_depth = std::numeric_limits<std::int64_t>::max();
  /// Splits whose children would fall below this Linf diameter are skipped.
  double min_leaf_diameter = 0.0;
  /// RoundRobin admits only feature (depth mod dims) at each node, a
  /// deterministic rotation standing in for random feature subsampling.
  FeaturePolicy feature_policy = FeaturePolicy::AllFeatures;

  void validate() const;
};

struct SplitDecision {
  Eigen::Index dim = 0;
  double threshold = 0.0;
  double reduction = 0.0;
};

/// Mean absolute deviation from the arithmetic mean. Throws on empty input.
double node_mae(std::span<const double> rewards);

/// Best (dim, midpoint-threshold) split by MAE reduction over the samples.
/// Candidates are midpoints of consecutive distinct coordinate values; ties
/// go to the lowest dim, then the lowest threshold. Returns nullopt when the
/// best reduction is below eta, there are fewer than two samples, or every
/// candidate violates min_leaf_diameter.
std::optional<SplitDecision> best_split(std::span<const Observation> samples,
                                        const Region& region,
                                        const FitConfig& config, int depth = 0);

/// Engine-grade partition workspace: keeps per-leaf observation lists,
/// reward sums and memoized split decisions so that the per-round refit only
/// re-examines leaves whose samples changed. All results are bit-identical
/// to a from-scratch refit over the same inputs.
class LeafStore {
 public:
  LeafStore(Partition partition, const ObservationLog& log);

  const Partition& partition() const { return partition_; }

  /// Bins one new observation (call right after appending to the log).
  void insert(std::int32_t obs_index, const ObservationLog& log);

  /// Splits a leaf and re-bins its points; children inherit depth+1.
  void split(std::int64_t region_id, Eigen::Index dim, double threshold,
             const ObservationLog& log);

  /// Greedy MAE-reduction pass: processes leaves in ascending-id order,
  /// splitting while reductions clear eta and the caps allow. Returns true
  /// if the partition changed.
  bool refit_tree(const ObservationLog& log, const FitConfig& config);

  std::int64_t raw_count(std::int64_t region_id) const;
  double reward_sum(std::int64_t region_id) const;
  std::int64_t depth(std::int64_t region_id) const;
  const std::vector<std::int32_t>& obs_indices(std::int64_t region_id) const;

 private:
  struct Leaf {
    std::vector<std::int32_t> obs;
    double reward_sum = 0.0;
    std::int64_t depth = 0;
    bool memo_valid = false;
    std::optional<SplitDecision> memo;
  };

  Leaf& leaf(std::int64_t id);
  const Leaf& leaf(std::int64_t id) const;

  Partition partition_;
  std::unordered_map<std::int64_t, Leaf> leaves_;
};

/// Pure batch refit: refines `previous` by recursive best_split until no
/// admissible split remains or the caps are reached. Deterministic in its
/// arguments; the output is always nested in `previous`. Input leaves are
/// treated as depth 0.
Partition refit(const Partition& previous, const ObservationLog& log,
                const FitConfig& config);

}  // namespace tucb
