#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tpreg/ppml/absorb.hpp"

namespace tpreg::ppml {

/// Estimation input: outcome, materialized regressors, the fixed-effect
/// dimensions to absorb and the clustering variable, all row-aligned.
struct Design {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::vector<std::string> names;              // one per column of x
  std::vector<std::vector<int>> absorb;        // raw keys per dimension
  std::vector<std::string> absorb_names;
  std::vector<int> cluster;                    // raw cluster ids

  std::size_t rows() const { return static_cast<std::size_t>(y.size()); }
  /// Throws DataError on shape mismatches, negative or non-finite outcomes,
  /// or non-finite regressors.
  void validate() const;
  /// The same design restricted to `rows` (in that order).
  Design subset(const std::vector<std::size_t>& rows) const;
};

struct FitOptions {
  double deviance_tolerance = 1e-9;   // relative deviance change
  double step_tolerance = 1e-8;       // max |beta_k - beta_{k-1}|
  int max_iterations = 100;
  double collinearity_tolerance = 1e-10;
  double start_offset = 0.1;          // warm start from ln(y + offset)
  AbsorbOptions absorb;
};

struct FitResult {
  std::vector<std::string> names;  // retained regressors in design order
  std::vector<std::string> dropped_collinear;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd vcov_cluster;              // G/(G-1) (N-1)/(N-K) corrected
  Eigen::MatrixXd vcov_cluster_uncorrected;

  std::vector<std::size_t> rows;             // retained design rows
  Eigen::VectorXd linear_index;              // X beta + absorbed effects
  Eigen::VectorXd fitted_mean;
  /// Per absorbed dimension, raw key -> effect. Dimensions after the first
  /// have their first level normalized to zero.
  std::vector<std::map<int, double>> fixed_effects;

  double deviance = 0.0;
  double max_score = 0.0;  // largest |score| over regressors and FE groups, / sum(y)
  std::size_t n_obs = 0;
  std::size_t n_clusters = 0;
  std::size_t n_dropped_separated = 0;
  std::size_t n_dropped_collinear = 0;
  bool converged = false;
  int iterations = 0;
  int max_absorb_sweeps = 0;

  // Sandwich ingredients on the retained rows at the final weights.
  Eigen::MatrixXd absorbed_x;
  Eigen::VectorXd y;
  std::vector<int> cluster;

  std::optional<std::size_t> index_of(const std::string& name) const;
  /// Throws DataError naming the regressor if it is absent or was dropped.
  double coef(const std::string& name) const;
  double se(const std::string& name) const;
  double cov(const std::string& a, const std::string& b) const;
};

/// Poisson pseudo-maximum likelihood with absorbed fixed effects (IRLS with
/// weighted alternating-projection demeaning). Returns converged = false
/// instead of throwing when the iteration limit is hit. Throws DataError when
/// separation removes every row or no regressor survives the collinearity
/// check, and ConvergenceError when demeaning fails.
FitResult fit(const Design& design, const FitOptions& options = {});

}  // namespace tpreg::ppml
