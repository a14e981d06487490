#include "tucb/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tucb/rng.hpp"

namespace tucb {

void EngineConfig::validate() const {
  if (concentration < 0.0) throw ConfigError("EngineConfig: C must be >= 0");
  if (lipschitz_scale < 0.0) throw ConfigError("EngineConfig: M must be >= 0");
  if (refinement == RefinementRule::Tree) fit.validate();
  const bool needs_horizon = variant == Variant::Ucb1 ||
                             refinement == RefinementRule::Zooming ||
                             exploration.form == ExplorationForm::Ucb1Horizon;
  if (needs_horizon && horizon < 1) {
    throw ConfigError("EngineConfig: this configuration needs a horizon T >= 1");
  }
  if (variant == Variant::Ucb1) {
    if (discrete_arms < 1) {
      throw ConfigError("EngineConfig: ucb1 needs a discrete arm set (discrete_arms >= 1)");
    }
    if (refinement != RefinementRule::Fixed) {
      throw ConfigError("EngineConfig: ucb1 never refines; refinement must be fixed");
    }
  }
  if (variant == Variant::Ctucb && context_dims < 1) {
    throw ConfigError("EngineConfig: ctucb needs context_dims >= 1");
  }
  if (variant != Variant::Ctucb && context_dims > 0) {
    throw ConfigError("EngineConfig: context_dims is only meaningful for ctucb");
  }
  if (variant == Variant::UniformMesh && refinement != RefinementRule::Mesh) {
    throw ConfigError("EngineConfig: uniformmesh requires mesh refinement");
  }
}

std::vector<RegionStats> corrected_stats(const Partition& partition,
                                         const ObservationLog& log) {
  std::map<std::int64_t, std::pair<std::int64_t, double>> acc;  // id -> (n0, sum)
  for (const Region& r : partition.regions()) acc.emplace(r.id, std::make_pair(0, 0.0));
  for (const Observation& obs : log.entries()) {
    auto& slot = acc.at(region_of(partition, obs.point).id);
    slot.first += 1;
    slot.second += obs.reward;
  }
  std::vector<RegionStats> out;
  out.reserve(partition.size());
  for (const Region& r : partition.regions()) {
    const auto& [n0, sum] = acc.at(r.id);
    RegionStats s;
    s.region_id = r.id;
    s.raw_count = n0;
    s.corrected_count = std::max<std::int64_t>(1, n0);
    s.corrected_mean = n0 > 0 ? sum / static_cast<double>(n0) : 1.0;
    out.push_back(s);
  }
  return out;
}

double ucb_index(const RegionStats& stats, double diameter, std::int64_t t,
                 const EngineConfig& config, double context_mag) {
  const double n = static_cast<double>(stats.corrected_count);
  const double log_t = std::log(static_cast<double>(t));
  double bonus = 0.0;
  switch (config.exploration.form) {
    case ExplorationForm::PaperForm:
      bonus = config.concentration * std::sqrt(4.0 * log_t / n);
      break;
    case ExplorationForm::VSchedule:
      bonus = config.exploration.v * std::sqrt(log_t / n);
      break;
    case ExplorationForm::ContextualSchedule: {
      // v2 * |z|^v3 models the local Lipschitz scale of the context.
      const double beta = config.exploration.v1 * std::sqrt(log_t) +
                          config.exploration.v2 *
                              std::pow(std::abs(context_mag), config.exploration.v3);
      bonus = beta / std::sqrt(n);
      break;
    }
    case ExplorationForm::Ucb1Horizon:
      bonus = std::sqrt(2.0 * std::log(static_cast<double>(config.horizon)) / n);
      break;
  }
  return stats.corrected_mean + bonus + config.lipschitz_scale * diameter;
}

std::int64_t select_region(std::span<const std::pair<std::int64_t, double>> indices,
                           std::mt19937_64& rng) {
  if (indices.empty()) {
    throw std::invalid_argument("select_region: empty index map");
  }
  double best = indices.front().second;
  for (const auto& [id, value] : indices) {
    if (value > best) best = value;
  }
  std::vector<std::int64_t> tied;
  for (const auto& [id, value] : indices) {
    if (value == best) tied.push_back(id);
  }
  if (tied.size() == 1) return tied.front();
  std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
  return tied[pick(rng)];
}

Eigen::VectorXd sample_arm(const Region& region, std::mt19937_64& rng) {
  Eigen::VectorXd x(region.lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::uniform_real_distribution<double> coord(region.lo[i], region.hi[i]);
    x[i] = coord(rng);
  }
  return x;
}

namespace {

// Mesh level h(t) = max{h : 2^(h(d+2)) <= t}: refine only while the halved
// edge stays at or above t^(-1/(d+2)). Then |P_t| = 2^(dh) <= t^(d/(d+2)).
int mesh_target_level(std::int64_t t, Eigen::Index d) {
  int h = 0;
  while ((h + 1) * (d + 2) < 62 &&
         (std::int64_t{1} << ((h + 1) * (d + 2))) <= t) {
    ++h;
  }
  return h;
}

int mesh_current_level(const Partition& partition) {
  const Eigen::Index d = partition.domain().dims();
  const auto k = static_cast<std::int64_t>(partition.size());
  int h = 0;
  while ((std::int64_t{1} << (h * d)) < k) ++h;
  if ((std::int64_t{1} << (h * d)) != k) {
    throw ConfigError("mesh refinement requires a uniform 2^(d*h)-cell mesh");
  }
  return h;
}

// One halving pass: every cell is split once along every dimension.
void mesh_split_all(LeafStore& store, const ObservationLog& log) {
  const Eigen::Index d = store.partition().domain().dims();
  std::vector<std::int64_t> ids;
  for (const Region& r : store.partition().regions()) ids.push_back(r.id);
  for (std::int64_t id : ids) {
    std::vector<std::int64_t> frontier{id};
    for (Eigen::Index dim = 0; dim < d; ++dim) {
      std::vector<std::int64_t> next;
      for (std::int64_t cell : frontier) {
        const Region& r = store.partition().region(cell);
        const double mid = r.lo[dim] + 0.5 * (r.hi[dim] - r.lo[dim]);
        store.split(cell, dim, mid, log);
        next.push_back(store.partition().regions()[store.partition().size() - 2].id);
        next.push_back(store.partition().regions()[store.partition().size() - 1].id);
      }
      frontier = std::move(next);
    }
  }
}

void mesh_step(LeafStore& store, std::int64_t t, const ObservationLog& log) {
  const Eigen::Index d = store.partition().domain().dims();
  const int target = mesh_target_level(t, d);
  for (int h = mesh_current_level(store.partition()); h < target; ++h) {
    mesh_split_all(store, log);
  }
}

void zooming_step(LeafStore& store, const ObservationLog& log,
                  const EngineConfig& config) {
  if (config.horizon < 1) {
    throw ConfigError("zooming refinement needs a horizon T >= 1");
  }
  const double log_T = std::log(static_cast<double>(config.horizon));
  bool any = true;
  while (any) {
    any = false;
    std::vector<std::int64_t> violators;
    for (const Region& r : store.partition().regions()) {
      const double n = static_cast<double>(
          std::max<std::int64_t>(1, store.raw_count(r.id)));
      if (diameter(r, config.metric) > std::sqrt(8.0 * log_T / n)) {
        violators.push_back(r.id);
      }
    }
    for (std::int64_t id : violators) {
      const Region& r = store.partition().region(id);
      // Longest edge, lowest dim on ties.
      Eigen::Index dim = 0;
      double best_edge = r.hi[0] - r.lo[0];
      for (Eigen::Index k = 1; k < r.lo.size(); ++k) {
        const double edge = r.hi[k] - r.lo[k];
        if (edge > best_edge) {
          best_edge = edge;
          dim = k;
        }
      }
      store.split(id, dim, r.lo[dim] + 0.5 * best_edge, log);
      any = true;
    }
  }
}

}  // namespace

Partition mesh_refine(const Partition& partition, std::int64_t t) {
  ObservationLog empty;
  LeafStore store(partition, empty);
  mesh_step(store, t, empty);
  return store.partition();
}

Partition zooming_refine(const Partition& partition, const ObservationLog& log,
                         const EngineConfig& config) {
  LeafStore store(partition, log);
  zooming_step(store, log, config);
  return store.partition();
}

Engine::Engine(Partition initial, EngineConfig config)
    : config_(std::move(config)),
      log_(config_.context_dims),
      store_(std::move(initial), log_),
      tie_rng_(seeded_stream(config_.seed, stream_tag::kTie)),
      arm_rng_(seeded_stream(config_.seed, stream_tag::kArm)) {
  config_.validate();
  if (config_.variant == Variant::Ucb1) {
    if (static_cast<std::int64_t>(store_.partition().size()) != config_.discrete_arms) {
      throw ConfigError("Engine: ucb1 partition must have one region per arm");
    }
    // The classic index: the horizon bonus, nothing else.
    config_.exploration.form = ExplorationForm::Ucb1Horizon;
    for (const Region& r : store_.partition().regions()) {
      arms_.push_back(r.center());
    }
  }
}

Engine Engine::make(const Domain& domain, const EngineConfig& config) {
  if (config.variant == Variant::Ucb1) {
    return Engine(uniform_slabs(domain, config.discrete_arms), config);
  }
  return Engine(Partition(domain), config);
}

std::vector<RegionStats> Engine::stats() const {
  std::vector<RegionStats> out;
  out.reserve(partition().size());
  for (const Region& r : partition().regions()) {
    RegionStats s;
    s.region_id = r.id;
    s.raw_count = store_.raw_count(r.id);
    s.corrected_count = std::max<std::int64_t>(1, s.raw_count);
    s.corrected_mean = s.raw_count > 0
                           ? store_.reward_sum(r.id) / static_cast<double>(s.raw_count)
                           : 1.0;
    out.push_back(s);
  }
  return out;
}

void Engine::refine() {
  switch (config_.refinement) {
    case RefinementRule::Tree: {
      FitConfig eff = config_.fit;
      if (config_.leaf_cap_exponent > 0.0) {
        const auto m = static_cast<double>(log_.size());
        const std::int64_t cap =
            m < 1.0 ? 1
                    : std::max<std::int64_t>(
                          1, static_cast<std::int64_t>(
                                 std::floor(std::pow(m, config_.leaf_cap_exponent))));
        eff.max_leaves = std::min(eff.max_leaves, cap);
      }
      store_.refit_tree(log_, eff);
      break;
    }
    case RefinementRule::Mesh:
      mesh_step(store_, t_, log_);
      break;
    case RefinementRule::Zooming:
      zooming_step(store_, log_, config_);
      break;
    case RefinementRule::Fixed:
      break;
  }
}

Decision Engine::do_step(const std::optional<Eigen::VectorXd>& context,
                         const std::function<double(const Eigen::VectorXd&)>& observe) {
  const std::mt19937_64 tie_snapshot = tie_rng_;
  const std::mt19937_64 arm_snapshot = arm_rng_;
  try {
    refine();

    const std::vector<RegionStats> stats_now = stats();
    const auto& regions = partition().regions();
    const double context_mag = context ? std::abs((*context)[0]) : 0.0;

    std::vector<std::pair<std::int64_t, double>> indices;
    std::vector<std::size_t> slot_of;  // position in `regions` per candidate
    indices.reserve(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (context) {
        bool meets_slice = true;
        for (Eigen::Index k = 0; k < config_.context_dims; ++k) {
          if ((*context)[k] < regions[i].lo[k] || (*context)[k] > regions[i].hi[k]) {
            meets_slice = false;
            break;
          }
        }
        if (!meets_slice) continue;
      }
      const double diam = config_.variant == Variant::Ucb1
                              ? 0.0  // discrete 0-1 metric: singletons
                              : diameter(regions[i], config_.metric);
      indices.emplace_back(regions[i].id,
                           ucb_index(stats_now[i], diam, t_, config_, context_mag));
      slot_of.push_back(i);
    }
    if (indices.empty()) {
      throw DataError("Engine: no region intersects the context slice (broken cover)");
    }

    const std::int64_t chosen = select_region(indices, tie_rng_);
    std::size_t slot = 0;
    for (std::size_t c = 0; c < indices.size(); ++c) {
      if (indices[c].first == chosen) {
        slot = slot_of[c];
        break;
      }
    }
    const Region& region = regions[slot];

    Eigen::VectorXd point;
    if (config_.variant == Variant::Ucb1) {
      point = arms_[slot];
    } else if (context) {
      point.resize(region.lo.size());
      point.head(config_.context_dims) = *context;
      for (Eigen::Index i = config_.context_dims; i < point.size(); ++i) {
        std::uniform_real_distribution<double> coord(region.lo[i], region.hi[i]);
        point[i] = coord(arm_rng_);
      }
    } else {
      point = sample_arm(region, arm_rng_);
    }

    Decision d;
    d.t = t_;
    d.region_id = chosen;
    d.partition_size = static_cast<std::int64_t>(regions.size());
    d.m = stats_now[slot].corrected_mean;
    d.n = stats_now[slot].corrected_count;
    d.n0 = stats_now[slot].raw_count;
    d.diameter = config_.variant == Variant::Ucb1 ? 0.0
                                                  : diameter(region, config_.metric);
    for (const auto& [id, value] : indices) {
      if (id == chosen) d.ucb = value;
    }
    if (context) {
      d.context = *context;
      d.arm = point.tail(point.size() - config_.context_dims);
    } else {
      d.arm = point;
    }

    d.reward = observe(point);

    log_.append(point, d.reward);
    store_.insert(static_cast<std::int32_t>(log_.size() - 1), log_);
    ++t_;
    return d;
  } catch (...) {
    // Leave the run replayable: the RNG streams are restored; refinement is a
    // deterministic function of the unchanged log, so a retry is identical.
    tie_rng_ = tie_snapshot;
    arm_rng_ = arm_snapshot;
    throw;
  }
}

Decision Engine::step(const std::function<double(const Eigen::VectorXd&)>& observe) {
  return do_step(std::nullopt, observe);
}

Decision Engine::step_with_context(
    const Eigen::VectorXd& context,
    const std::function<double(const Eigen::VectorXd&)>& observe) {
  if (config_.variant != Variant::Ctucb) {
    throw ConfigError("Engine: contextual steps need the ctucb variant");
  }
  if (context.size() != config_.context_dims) {
    throw ConfigError("Engine: context dimensionality mismatch");
  }
  for (Eigen::Index k = 0; k < config_.context_dims; ++k) {
    if (context[k] < partition().domain().lower()[k] ||
        context[k] > partition().domain().upper()[k]) {
      throw DomainViolation("context outside its declared range in dimension " +
                                std::to_string(k),
                            static_cast<int>(k));
    }
  }
  return do_step(context, observe);
}

}  // namespace tucb
