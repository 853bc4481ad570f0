#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tpreg::ppml {

/// Fixed-effect dimensions recoded to dense group codes 0..groups-1. Codes
/// follow the ascending order of the raw keys.
class FixedEffects {
 public:
  FixedEffects() = default;
  /// keys[d][i] is the raw group key of row i in dimension d.
  explicit FixedEffects(const std::vector<std::vector<int>>& keys);

  std::size_t dims() const { return codes_.size(); }
  std::size_t rows() const { return rows_; }
  std::size_t groups(std::size_t d) const { return levels_[d].size(); }
  const std::vector<int>& codes(std::size_t d) const { return codes_[d]; }
  /// Raw key of each code in dimension d.
  const std::vector<int>& levels(std::size_t d) const { return levels_[d]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<int>> codes_;
  std::vector<std::vector<int>> levels_;
};

struct AbsorbOptions {
  double tolerance = 1e-13;  // sweep change relative to the column's sup norm
  int max_sweeps = 10000;
  bool accelerate = true;  // Irons-Tuck extrapolation every two sweeps
};

/// Weighted within-transformation by alternating projections. Weights are
/// fixed at construction; group weight totals are cached.
class Absorber {
 public:
  Absorber(const FixedEffects& fe, const Eigen::VectorXd& weights, AbsorbOptions options = {});

  /// Removes the weighted projection on the fixed-effect dummies. Returns the
  /// number of sweeps used. Throws ConvergenceError after max_sweeps.
  int absorb_in_place(Eigen::Ref<Eigen::VectorXd> column) const;

  Eigen::MatrixXd absorb(const Eigen::MatrixXd& columns) const;

  /// Largest sweep count over the columns absorbed so far.
  int max_sweeps_used() const { return max_used_; }

 private:
  void sweep(Eigen::Ref<Eigen::VectorXd> x) const;
  double weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  const FixedEffects& fe_;
  Eigen::VectorXd w_;
  AbsorbOptions opt_;
  std::vector<std::vector<double>> group_weight_;
  mutable std::vector<double> buffer_;
  mutable int max_used_ = 0;
};

/// One-shot convenience wrapper around Absorber.
Eigen::MatrixXd absorb(const Eigen::MatrixXd& columns, const Eigen::VectorXd& weights,
                       const FixedEffects& fe, const AbsorbOptions& options = {});

/// Splits a vector that lies in the span of the fixed-effect dummies into
/// per-dimension effects (indexed by code). Dimensions after the first are
/// normalized so that their first level is zero.
std::vector<std::vector<double>> decompose_effects(const Eigen::VectorXd& total,
                                                   const FixedEffects& fe,
                                                   const AbsorbOptions& options = {});

}  // namespace tpreg::ppml
