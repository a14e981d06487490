#include "tucb/tree_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace tucb {

void FitConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("FitConfig: eta must be > 0");
  if (max_leaves < 1) throw ConfigError("FitConfig: max_leaves must be >= 1");
  if (max_depth < 1) throw ConfigError("FitConfig: max_depth must be >= 1");
  if (min_leaf_diameter < 0.0) {
    throw ConfigError("FitConfig: min_leaf_diameter must be >= 0");
  }
}

double node_mae(std::span<const double> rewards) {
  if (rewards.empty()) {
    throw std::invalid_argument("node_mae: empty reward list");
  }
  const double n = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double y : rewards) sum += y;
  const double mean = sum / n;
  double dev = 0.0;
  for (double y : rewards) dev += std::abs(y - mean);
  return dev / n;
}

namespace {

double mae_of(const std::vector<double>& y, std::size_t begin, std::size_t end) {
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += y[i];
  const double mean = sum / static_cast<double>(end - begin);
  double dev = 0.0;
  for (std::size_t i = begin; i < end; ++i) dev += std::abs(y[i] - mean);
  return dev / static_cast<double>(end - begin);
}

std::optional<SplitDecision> best_split_impl(
    std::size_t n, const std::function<const Observation&(std::size_t)>& sample,
    const Region& region, const FitConfig& config, int depth) {
  if (n < 2) return std::nullopt;

  std::vector<double> rewards(n);
  for (std::size_t i = 0; i < n; ++i) rewards[i] = sample(i).reward;
  const double parent_mae = node_mae(rewards);
  if (parent_mae == 0.0) return std::nullopt;  // nothing to reduce, eta > 0

  const Eigen::Index dims = region.lo.size();
  std::vector<Eigen::Index> features;
  if (config.feature_policy == FeaturePolicy::RoundRobin) {
    features.push_back(static_cast<Eigen::Index>(depth % dims));
  } else {
    for (Eigen::Index d = 0; d < dims; ++d) features.push_back(d);
  }

  std::optional<SplitDecision> best;
  std::vector<std::size_t> order(n);
  std::vector<double> coord(n), y_sorted(n);
  for (Eigen::Index dim : features) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return sample(a).point[dim] < sample(b).point[dim];
    });
    for (std::size_t i = 0; i < n; ++i) {
      coord[i] = sample(order[i]).point[dim];
      y_sorted[i] = sample(order[i]).reward;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!(coord[i] < coord[i + 1])) continue;
      const double thr = coord[i] + 0.5 * (coord[i + 1] - coord[i]);
      // Degenerate rounding (threshold collapsing onto a sample or an edge)
      // would produce an empty side or an empty child box.
      if (!(thr > coord[i] && thr <= coord[i + 1])) continue;
      if (!(thr > region.lo[dim] && thr < region.hi[dim])) continue;
      if (config.min_leaf_diameter > 0.0) {
        Region low = region, high = region;
        low.hi[dim] = thr;
        high.lo[dim] = thr;
        if (std::min(diameter(low, Metric::Linf), diameter(high, Metric::Linf)) <
            config.min_leaf_diameter) {
          continue;
        }
      }
      const std::size_t n_left = i + 1;
      const double mae_left = mae_of(y_sorted, 0, n_left);
      const double mae_right = mae_of(y_sorted, n_left, n);
      const double reduction =
          parent_mae - (static_cast<double>(n_left) / static_cast<double>(n) * mae_left +
                        static_cast<double>(n - n_left) / static_cast<double>(n) * mae_right);
      // Strict ">" keeps the first best over (dim asc, threshold asc), which
      // is exactly the lowest-dim-then-lowest-threshold tie rule.
      if (!best || reduction > best->reduction) {
        best = SplitDecision{dim, thr, reduction};
      }
    }
  }
  if (!best || best->reduction < config.eta) return std::nullopt;
  return best;
}

}  // namespace

std::optional<SplitDecision> best_split(std::span<const Observation> samples,
                                        const Region& region,
                                        const FitConfig& config, int depth) {
  config.validate();
  return best_split_impl(
      samples.size(),
      [&](std::size_t i) -> const Observation& { return samples[i]; }, region,
      config, depth);
}

LeafStore::LeafStore(Partition partition, const ObservationLog& log)
    : partition_(std::move(partition)) {
  for (const Region& r : partition_.regions()) leaves_.emplace(r.id, Leaf{});
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(log.size()); ++i) {
    insert(i, log);
  }
}

LeafStore::Leaf& LeafStore::leaf(std::int64_t id) {
  auto it = leaves_.find(id);
  if (it == leaves_.end()) {
    throw std::out_of_range("LeafStore: unknown region id " + std::to_string(id));
  }
  return it->second;
}

const LeafStore::Leaf& LeafStore::leaf(std::int64_t id) const {
  auto it = leaves_.find(id);
  if (it == leaves_.end()) {
    throw std::out_of_range("LeafStore: unknown region id " + std::to_string(id));
  }
  return it->second;
}

void LeafStore::insert(std::int32_t obs_index, const ObservationLog& log) {
  const Observation& obs = log.entries()[static_cast<std::size_t>(obs_index)];
  const Region& r = region_of(partition_, obs.point);
  Leaf& L = leaf(r.id);
  L.obs.push_back(obs_index);
  L.reward_sum += obs.reward;
  L.memo_valid = false;
}

void LeafStore::split(std::int64_t region_id, Eigen::Index dim, double threshold,
                      const ObservationLog& log) {
  Partition next = split_region(partition_, region_id, dim, threshold);
  const std::int64_t low_id = next.regions()[next.size() - 2].id;
  const std::int64_t high_id = next.regions()[next.size() - 1].id;

  Leaf parent = std::move(leaf(region_id));
  leaves_.erase(region_id);
  Leaf low, high;
  low.depth = high.depth = parent.depth + 1;
  for (std::int32_t idx : parent.obs) {
    const Observation& obs = log.entries()[static_cast<std::size_t>(idx)];
    Leaf& child = obs.point[dim] < threshold ? low : high;
    child.obs.push_back(idx);
    child.reward_sum += obs.reward;
  }
  leaves_.emplace(low_id, std::move(low));
  leaves_.emplace(high_id, std::move(high));
  partition_ = std::move(next);
}

bool LeafStore::refit_tree(const ObservationLog& log, const FitConfig& config) {
  config.validate();
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> queue;
  for (const Region& r : partition_.regions()) queue.push(r.id);

  bool changed = false;
  while (!queue.empty()) {
    if (static_cast<std::int64_t>(partition_.size()) >= config.max_leaves) break;
    const std::int64_t id = queue.top();
    queue.pop();
    Leaf& L = leaf(id);
    if (L.depth >= config.max_depth) continue;
    if (L.obs.size() < 2) continue;
    if (!L.memo_valid) {
      const Region& region = partition_.region(id);
      L.memo = best_split_impl(
          L.obs.size(),
          [&](std::size_t i) -> const Observation& {
            return log.entries()[static_cast<std::size_t>(L.obs[i])];
          },
          region, config, static_cast<int>(L.depth));
      L.memo_valid = true;
    }
    if (!L.memo) continue;
    const SplitDecision dec = *L.memo;
    split(id, dec.dim, dec.threshold, log);
    changed = true;
    queue.push(partition_.regions()[partition_.size() - 2].id);
    queue.push(partition_.regions()[partition_.size() - 1].id);
  }
  return changed;
}

std::int64_t LeafStore::raw_count(std::int64_t region_id) const {
  return static_cast<std::int64_t>(leaf(region_id).obs.size());
}

double LeafStore::reward_sum(std::int64_t region_id) const {
  return leaf(region_id).reward_sum;
}

std::int64_t LeafStore::depth(std::int64_t region_id) const {
  return leaf(region_id).depth;
}

const std::vector<std::int32_t>& LeafStore::obs_indices(std::int64_t region_id) const {
  return leaf(region_id).obs;
}

Partition refit(const Partition& previous, const ObservationLog& log,
                const FitConfig& config) {
  LeafStore store(previous, log);
  store.refit_tree(log, config);
  return store.partition();
}

}  // namespace tucb
