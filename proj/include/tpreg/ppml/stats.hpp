#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tpreg::ppml {

/// 2 * (1 - Phi(|z|)).
double normal_two_sided_p(double z);
/// P(chi2_df > x).
double chi_squared_upper(double x, double df);
/// P(F_{d1,d2} > x).
double f_upper(double x, double d1, double d2);

/// Cluster-robust Wald test of H0: b[idx] = 0. The chi-squared p-value is
/// the textbook one; with few clusters the F(q, G - 1) reference on W / q is
/// the better-calibrated one and is what rejects() uses.
struct WaldTest {
  double statistic = 0.0;  // W
  int df = 0;              // q
  double p_value = 1.0;    // chi-squared(q)
  double df_denominator = 0.0;  // G - 1
  double p_value_f = 1.0;       // F(q, G - 1) at W / q

  bool rejects(double alpha) const { return p_value_f < alpha; }
};

/// Throws DataError if the covariance sub-block is singular.
WaldTest wald_test(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& vcov,
                   const std::vector<std::size_t>& indices, std::size_t n_clusters);

}  // namespace tpreg::ppml
