#pragma once

#include <vector>

#include <Eigen/Core>

#include "tucb/geometry.hpp"

namespace tucb {

/// Signed Linf distance from `y` to the boundary of the region's box:
/// positive inside, negative outside, zero on the boundary.
double signed_boundary_distance(const Region& region, const Eigen::VectorXd& y);

/// k(x,x') = 1 iff both points share a region, else 0. The Gram matrix is a
/// permutation of a block-diagonal all-ones matrix, hence PSD.
class HardBoxKernel {
 public:
  explicit HardBoxKernel(Partition partition) : partition_(std::move(partition)) {}
  const Partition& partition() const { return partition_; }
  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

 private:
  Partition partition_;
};

/// Smoothed box kernel with sharpness alpha. Each point gets a soft region
/// membership built from signed boundary distances,
///
///   phi_r(x) = exp(alpha * s_r(x)) / sum_r' exp(alpha * s_r'(x)),
///
/// and k(x,y) is the cosine similarity of the membership vectors, so the
/// kernel is an inner product of explicit features: every Gram matrix is PSD
/// by construction, k(x,x) = 1 exactly, 0 <= k <= 1, and as alpha grows the
/// memberships sharpen to one-hot region indicators, recovering the hard box
/// kernel (for points off the region boundaries).
class SoftBoxKernel {
 public:
  SoftBoxKernel(Partition partition, double alpha);
  const Partition& partition() const { return partition_; }
  double alpha() const { return alpha_; }
  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// Normalized soft-membership feature vector (one weight per region, in
  /// ascending-id order, scaled to unit Euclidean norm).
  Eigen::VectorXd features(const Eigen::VectorXd& x) const;

 private:
  Partition partition_;
  double alpha_;
};

inline double soft_kernel_eval(const SoftBoxKernel& kernel, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
  return kernel(x, y);
}

/// Pairwise kernel evaluations; points are matrix rows. Symmetric with unit
/// diagonal for the kernels above.
template <typename Kernel>
Eigen::MatrixXd gram(const Kernel& kernel, const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel(points.row(i).transpose(), points.row(j).transpose());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// Min-eigenvalue test; throws on asymmetric input (tolerance 1e-12).
PsdCheck psd_check(const Eigen::MatrixXd& gram, double tol);

struct GpPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Zero-mean GP regression: mean = k*' (K + s2 I)^-1 y and
/// variance = k** - k*' (K + s2 I)^-1 k*, via an LLT factorization (with a
/// 1e-10 diagonal jitter retry should the factorization fail).
template <typename Kernel>
GpPosterior gp_posterior(const Kernel& kernel, const Eigen::MatrixXd& train_points,
                         const Eigen::VectorXd& train_y, double noise_var,
                         const Eigen::MatrixXd& query_points);

/// Data behind the hard-to-soft smoothing figure: per grid point the
/// piecewise-constant region average, the hard-kernel GP mean and one soft
/// GP mean per alpha.
struct DemoCurves {
  Eigen::VectorXd x;
  Eigen::VectorXd tree_mean;
  Eigen::VectorXd gp_hard;
  Eigen::MatrixXd gp_soft;  // one column per alpha
  std::vector<double> alphas;
};

DemoCurves demo_curves(const Partition& partition, const Eigen::MatrixXd& train_points,
                       const Eigen::VectorXd& train_y, double noise_var, int grid_n,
                       const std::vector<double>& alphas);

/// Total variation of a sampled curve; the smoothing diagnostic.
double total_variation(const Eigen::VectorXd& curve);

}  // namespace tucb
