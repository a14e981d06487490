#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tucb/errors.hpp"

namespace tucb {

enum class Metric { Linf, L2 };

/// Bitwise coordinate equality.
inline bool exact_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

/// Axis-aligned box [lo, hi] that hosts the arm space (or the joint
/// context x arm space). Bounds are closed on both faces.
class Domain {
 public:
  Domain(Eigen::VectorXd lo, Eigen::VectorXd hi);

  Eigen::Index dims() const { return lo_.size(); }
  const Eigen::VectorXd& lower() const { return lo_; }
  const Eigen::VectorXd& upper() const { return hi_; }

  bool contains(const Eigen::VectorXd& x) const;
  /// Throws DomainViolation naming the first offending dimension.
  void require_inside(const Eigen::VectorXd& x) const;

  friend bool operator==(const Domain& a, const Domain& b) {
    return exact_equal(a.lo_, b.lo_) && exact_equal(a.hi_, b.hi_);
  }

 private:
  Eigen::VectorXd lo_, hi_;
};

/// One cell of a partition. Intervals are half-open [lo, hi) except along
/// faces that coincide with the domain's upper face, which are closed, so
/// that membership is total and single-valued over the domain.
struct Region {
  std::int64_t id = 0;
  Eigen::VectorXd lo, hi;

  bool contains(const Eigen::VectorXd& x, const Domain& domain) const;
  /// Pure box inclusion: this box is a subset of `other`'s box.
  bool box_subset_of(const Region& other) const {
    return (lo.array() >= other.lo.array()).all() &&
           (hi.array() <= other.hi.array()).all();
  }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
};

/// Linf: longest edge. L2: Euclidean diagonal.
double diameter(const Region& region, Metric metric = Metric::Linf);

/// A finite set of pairwise-disjoint regions covering the domain exactly.
/// Regions are kept in ascending-id order; fresh ids from splits are always
/// the largest so far, so the order is stable across refinement.
class Partition {
 public:
  explicit Partition(Domain domain);
  /// Validating constructor for deserialized partitions: checks box bounds,
  /// id uniqueness, pairwise disjointness and (by volume) exact cover.
  Partition(Domain domain, std::vector<Region> regions);

  const Domain& domain() const { return domain_; }
  const std::vector<Region>& regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }
  std::int64_t generation() const { return generation_; }

  const Region& region(std::int64_t id) const;
  bool has_region(std::int64_t id) const;

 private:
  friend Partition split_region(const Partition&, std::int64_t, Eigen::Index,
                                double);
  Domain domain_;
  std::vector<Region> regions_;
  std::int64_t next_id_ = 1;
  std::int64_t generation_ = 0;
};

/// The region selection function: unique region containing `x` under the
/// half-open boundary convention. Throws DomainViolation outside the domain.
const Region& region_of(const Partition& partition, const Eigen::VectorXd& x);

struct NestedWitness {
  Region fine;    // region of the finer partition that straddles
  Region coarse;  // the coarse region containing its center
};

struct NestedResult {
  bool nested = false;
  std::optional<NestedWitness> witness;
  explicit operator bool() const { return nested; }
};

/// True iff every region of `fine` is contained in some region of `coarse`.
/// Throws DataError when the partitions cover different domains.
NestedResult verify_nested(const Partition& coarse, const Partition& fine);

/// Replaces the named region by [lo, t) and [t, hi) along `dim`. Untouched
/// regions keep their ids; children get max_id+1 (lower) and max_id+2.
/// Throws std::invalid_argument when the threshold is not strictly inside.
Partition split_region(const Partition& partition, std::int64_t region_id,
                       Eigen::Index dim, double threshold);

nlohmann::json to_json(const Partition& partition);
Partition partition_from_json(const nlohmann::json& j);

/// Uniform split of the domain into `count` slabs along dimension 0.
/// Ids are 0..count-1 in geometric order.
Partition uniform_slabs(const Domain& domain, std::int64_t count);

}  // namespace tucb
