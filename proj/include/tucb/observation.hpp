#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace tucb {

/// One logged round. For contextual runs `point` is the joint vector with
/// the context coordinates first; `context_dims` on the log says how many.
struct Observation {
  Eigen::VectorXd point;
  double reward = 0.0;
};

/// Ordered observation history; round indices are 1..size() with no gaps.
class ObservationLog {
 public:
  ObservationLog() = default;
  explicit ObservationLog(Eigen::Index context_dims)
      : context_dims_(context_dims) {}

  void append(Eigen::VectorXd point, double reward) {
    entries_.push_back(Observation{std::move(point), reward});
  }

  const std::vector<Observation>& entries() const { return entries_; }
  const Observation& at_round(std::int64_t t) const {
    return entries_.at(static_cast<std::size_t>(t - 1));
  }
  std::int64_t size() const { return static_cast<std::int64_t>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  Eigen::Index context_dims() const { return context_dims_; }

 private:
  std::vector<Observation> entries_;
  Eigen::Index context_dims_ = 0;
};

}  // namespace tucb
