#include "tpreg/ppml/stats.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include "tpreg/errors.hpp"

namespace tpreg::ppml {

double normal_two_sided_p(double z) {
  if (std::isnan(z)) return std::nan("");
  if (std::isinf(z)) return 0.0;
  const boost::math::normal_distribution<double> n;
  return 2.0 * boost::math::cdf(boost::math::complement(n, std::abs(z)));
}

double chi_squared_upper(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

double f_upper(double x, double d1, double d2) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<double>(d1, d2), x));
}

WaldTest wald_test(const Eigen::VectorXd& b, const Eigen::MatrixXd& v,
                   const std::vector<std::size_t>& idx, std::size_t n_clusters) {
  const Eigen::Index q = static_cast<Eigen::Index>(idx.size());
  if (q == 0) throw DataError("wald_test: no coefficients to test");
  Eigen::VectorXd sub_b(q);
  Eigen::MatrixXd sub_v(q, q);
  for (Eigen::Index a = 0; a < q; ++a) {
    sub_b[a] = b[static_cast<Eigen::Index>(idx[a])];
    for (Eigen::Index c = 0; c < q; ++c) {
      sub_v(a, c) = v(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[c]));
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sub_v);
  const double scale = sub_v.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      ldlt.vectorD().minCoeff() <= 1e-14 * scale) {
    throw DataError("wald_test: covariance block is singular");
  }
  WaldTest t;
  t.df = static_cast<int>(q);
  t.statistic = sub_b.dot(ldlt.solve(sub_b));
  t.p_value = chi_squared_upper(t.statistic, t.df);
  t.df_denominator = n_clusters > 1 ? static_cast<double>(n_clusters - 1) : 1.0;
  t.p_value_f = f_upper(t.statistic / t.df, t.df, t.df_denominator);
  return t;
}

}  // namespace tpreg::ppml
