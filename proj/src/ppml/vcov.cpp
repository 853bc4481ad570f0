#include "tpreg/ppml/vcov.hpp"

#include <map>

#include "tpreg/errors.hpp"

namespace tpreg::ppml {

ClusterVcov cluster_vcov(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& mu, const std::vector<int>& cluster) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (y.size() != n || mu.size() != n || static_cast<Eigen::Index>(cluster.size()) != n) {
    throw DataError("cluster_vcov: inputs differ in length");
  }
  const Eigen::MatrixXd bread = x.transpose() * mu.asDiagonal() * x;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(bread);
  const double scale = bread.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-14 * scale) {
    throw DataError("cluster_vcov: singular bread matrix");
  }

  std::map<int, Eigen::VectorXd> scores;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, fresh] = scores.try_emplace(cluster[i], Eigen::VectorXd::Zero(k));
    it->second.noalias() += x.row(i).transpose() * (y[i] - mu[i]);
  }
  const std::size_t g = scores.size();
  if (g < 2) throw DataError("cluster_vcov: need at least two clusters");
  if (n <= k) throw DataError("cluster_vcov: fewer observations than regressors");

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [id, s] : scores) meat.noalias() += s * s.transpose();

  const Eigen::MatrixXd bread_inv = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  ClusterVcov out;
  out.n_clusters = g;
  out.uncorrected = bread_inv * meat * bread_inv;
  out.uncorrected = 0.5 * (out.uncorrected + out.uncorrected.transpose()).eval();
  const double gd = static_cast<double>(g);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  out.corrected = out.uncorrected * (gd / (gd - 1.0) * (nd - 1.0) / (nd - kd));
  return out;
}

ClusterVcov cluster_vcov(const FitResult& fit, const std::vector<int>& design_cluster_ids) {
  std::vector<int> cluster;
  cluster.reserve(fit.rows.size());
  for (std::size_t r : fit.rows) {
    if (r >= design_cluster_ids.size()) throw DataError("cluster_vcov: cluster ids too short");
    cluster.push_back(design_cluster_ids[r]);
  }
  return cluster_vcov(fit.absorbed_x, fit.y, fit.fitted_mean, cluster);
}

}  // namespace tpreg::ppml
