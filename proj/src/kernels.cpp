#include "tucb/kernels.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace tucb {

double signed_boundary_distance(const Region& region, const Eigen::VectorXd& y) {
  // max_i max(lo_i - y_i, y_i - hi_i) is negative inside (minus the margin)
  // and equals the Linf distance to the box outside.
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    worst = std::max(worst, std::max(region.lo[i] - y[i], y[i] - region.hi[i]));
  }
  return -worst;
}

double HardBoxKernel::operator()(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) const {
  return region_of(partition_, x).id == region_of(partition_, y).id ? 1.0 : 0.0;
}

SoftBoxKernel::SoftBoxKernel(Partition partition, double alpha)
    : partition_(std::move(partition)), alpha_(alpha) {
  if (!(alpha_ > 0.0)) throw std::invalid_argument("SoftBoxKernel: alpha must be > 0");
}

Eigen::VectorXd SoftBoxKernel::features(const Eigen::VectorXd& x) const {
  partition_.domain().require_inside(x);
  const auto& regions = partition_.regions();
  Eigen::VectorXd score(static_cast<Eigen::Index>(regions.size()));
  for (std::size_t r = 0; r < regions.size(); ++r) {
    score[static_cast<Eigen::Index>(r)] =
        alpha_ * signed_boundary_distance(regions[r], x);
  }
  // Softmax with the usual max shift; only the home region has a
  // nonnegative score, so everything exponentiated is <= 0.
  const Eigen::ArrayXd weights = (score.array() - score.maxCoeff()).exp();
  return (weights / std::sqrt((weights * weights).sum())).matrix();
}

double SoftBoxKernel::operator()(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) const {
  if (exact_equal(x, y)) return 1.0;
  return features(x).dot(features(y));
}

PsdCheck psd_check(const Eigen::MatrixXd& gram, double tol) {
  if (gram.rows() != gram.cols()) {
    throw std::invalid_argument("psd_check: matrix must be square");
  }
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("psd_check: matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram,
                                                        Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  return PsdCheck{min_eig >= -tol, min_eig};
}

template <typename Kernel>
GpPosterior gp_posterior(const Kernel& kernel, const Eigen::MatrixXd& train_points,
                         const Eigen::VectorXd& train_y, double noise_var,
                         const Eigen::MatrixXd& query_points) {
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("gp_posterior: noise variance must be > 0");
  }
  const Eigen::Index n = train_points.rows();
  const Eigen::Index q = query_points.rows();
  GpPosterior out;
  if (n == 0) {
    out.mean = Eigen::VectorXd::Zero(q);
    out.variance = Eigen::VectorXd::Ones(q);
    return out;
  }

  Eigen::MatrixXd K = gram(kernel, train_points);
  K.diagonal().array() += noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    K.diagonal().array() += 1e-10;  // jitter fallback
    llt.compute(K);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("gp_posterior: Cholesky factorization failed");
    }
  }
  const Eigen::VectorXd alpha = llt.solve(train_y);

  out.mean.resize(q);
  out.variance.resize(q);
  Eigen::VectorXd k_star(n);
  for (Eigen::Index j = 0; j < q; ++j) {
    const Eigen::VectorXd x = query_points.row(j).transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      k_star[i] = kernel(train_points.row(i).transpose(), x);
    }
    out.mean[j] = k_star.dot(alpha);
    out.variance[j] = kernel(x, x) - k_star.dot(llt.solve(k_star));
  }
  return out;
}

template GpPosterior gp_posterior<HardBoxKernel>(const HardBoxKernel&,
                                                 const Eigen::MatrixXd&,
                                                 const Eigen::VectorXd&, double,
                                                 const Eigen::MatrixXd&);
template GpPosterior gp_posterior<SoftBoxKernel>(const SoftBoxKernel&,
                                                 const Eigen::MatrixXd&,
                                                 const Eigen::VectorXd&, double,
                                                 const Eigen::MatrixXd&);

DemoCurves demo_curves(const Partition& partition, const Eigen::MatrixXd& train_points,
                       const Eigen::VectorXd& train_y, double noise_var, int grid_n,
                       const std::vector<double>& alphas) {
  if (partition.domain().dims() != 1) {
    throw std::invalid_argument("demo_curves: needs a 1-D partition");
  }
  if (grid_n < 2) throw std::invalid_argument("demo_curves: grid must have >= 2 points");

  DemoCurves out;
  out.alphas = alphas;
  out.x.resize(grid_n);
  const double lo = partition.domain().lower()[0];
  const double hi = partition.domain().upper()[0];
  for (int i = 0; i < grid_n; ++i) {
    out.x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
  }
  Eigen::MatrixXd grid(grid_n, 1);
  grid.col(0) = out.x;

  // Piecewise-constant region averages (0 where a region has no data, the
  // GP prior mean).
  std::map<std::int64_t, std::pair<std::int64_t, double>> acc;
  for (Eigen::Index i = 0; i < train_points.rows(); ++i) {
    const auto id = region_of(partition, train_points.row(i).transpose()).id;
    acc[id].first += 1;
    acc[id].second += train_y[i];
  }
  out.tree_mean.resize(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    const auto id = region_of(partition, grid.row(i).transpose()).id;
    const auto it = acc.find(id);
    out.tree_mean[i] = (it == acc.end() || it->second.first == 0)
                           ? 0.0
                           : it->second.second / static_cast<double>(it->second.first);
  }

  out.gp_hard =
      gp_posterior(HardBoxKernel(partition), train_points, train_y, noise_var, grid)
          .mean;
  out.gp_soft.resize(grid_n, static_cast<Eigen::Index>(alphas.size()));
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    out.gp_soft.col(static_cast<Eigen::Index>(a)) =
        gp_posterior(SoftBoxKernel(partition, alphas[a]), train_points, train_y,
                     noise_var, grid)
            .mean;
  }
  return out;
}

double total_variation(const Eigen::VectorXd& curve) {
  double tv = 0.0;
  for (Eigen::Index i = 1; i < curve.size(); ++i) {
    tv += std::abs(curve[i] - curve[i - 1]);
  }
  return tv;
}

}  // namespace tucb
