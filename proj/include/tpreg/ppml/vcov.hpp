#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "tpreg/ppml/fit.hpp"

namespace tpreg::ppml {

struct ClusterVcov {
  Eigen::MatrixXd corrected;    // G/(G-1) * (N-1)/(N-K) * uncorrected
  Eigen::MatrixXd uncorrected;  // H^-1 M H^-1
  std::size_t n_clusters = 0;
};

/// Sandwich with bread H = sum_i mu_i x_i x_i' over the absorbed regressors
/// and meat M = sum_g s_g s_g', s_g = sum_{i in g} x_i (y_i - mu_i). Throws
/// DataError if H is singular or fewer than two clusters are present.
ClusterVcov cluster_vcov(const Eigen::MatrixXd& absorbed_x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& mu, const std::vector<int>& cluster);

/// Recomputes the cluster covariance of a fit with other cluster ids, given
/// for every design row (the fit's retained rows are picked out).
ClusterVcov cluster_vcov(const FitResult& fit, const std::vector<int>& design_cluster_ids);

}  // namespace tpreg::ppml
