#include "tpreg/ppml/score.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tpreg/errors.hpp"

namespace tpreg::ppml {

ScoreTestResult score_test(const Design& design, const std::vector<std::string>& tested,
                           const FitOptions& options) {
  design.validate();
  if (tested.empty()) throw DataError("score_test: nothing to test");
  std::vector<Eigen::Index> test_cols;
  std::vector<Eigen::Index> keep_cols;
  for (const auto& name : tested) {
    const auto it = std::find(design.names.begin(), design.names.end(), name);
    if (it == design.names.end()) throw DataError("score_test: no regressor named \"" + name + "\"");
    test_cols.push_back(static_cast<Eigen::Index>(it - design.names.begin()));
  }
  for (Eigen::Index j = 0; j < design.x.cols(); ++j) {
    if (std::find(test_cols.begin(), test_cols.end(), j) == test_cols.end()) keep_cols.push_back(j);
  }

  Design restricted = design;
  restricted.x = design.x(Eigen::all, keep_cols);
  restricted.names.clear();
  for (Eigen::Index j : keep_cols) restricted.names.push_back(design.names[j]);

  ScoreTestResult out;
  out.restricted = fit(restricted, options);
  const FitResult& r = out.restricted;
  if (!r.converged) throw ConvergenceError("score_test: restricted fit did not converge");

  const Eigen::Index n = static_cast<Eigen::Index>(r.rows.size());
  const Eigen::Index q = static_cast<Eigen::Index>(test_cols.size());
  std::vector<std::vector<int>> keys(design.absorb.size(), std::vector<int>(r.rows.size()));
  Eigen::MatrixXd x2(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t row = r.rows[static_cast<std::size_t>(i)];
    for (std::size_t d = 0; d < design.absorb.size(); ++d) keys[d][i] = design.absorb[d][row];
    for (Eigen::Index c = 0; c < q; ++c) x2(i, c) = design.x(static_cast<Eigen::Index>(row), test_cols[c]);
  }
  const FixedEffects fe(keys);
  const Eigen::VectorXd& mu = r.fitted_mean;
  Eigen::MatrixXd x2t = absorb(x2, mu, fe, options.absorb);
  const Eigen::MatrixXd& x1t = r.absorbed_x;
  if (x1t.cols() > 0) {
    const Eigen::MatrixXd gram = x1t.transpose() * mu.asDiagonal() * x1t;
    const Eigen::MatrixXd cross = x1t.transpose() * mu.asDiagonal() * x2t;
    x2t -= x1t * gram.ldlt().solve(cross);
  }
  for (Eigen::Index c = 0; c < q; ++c) {
    const double before = std::sqrt((x2.col(c).array().square() * mu.array()).sum());
    const double after = std::sqrt((x2t.col(c).array().square() * mu.array()).sum());
    if (!(after > 1e-7 * before)) {
      throw DataError("score_test: " + tested[static_cast<std::size_t>(c)] +
                      " is collinear with the fixed effects or regressors");
    }
  }

  const Eigen::VectorXd resid = r.y - mu;
  std::map<int, Eigen::VectorXd> sums;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, fresh] = sums.try_emplace(r.cluster[static_cast<std::size_t>(i)], Eigen::VectorXd::Zero(q));
    it->second.noalias() += x2t.row(i).transpose() * resid[i];
  }
  const double g = static_cast<double>(sums.size());
  if (sums.size() < 2) throw DataError("score_test: need at least two clusters");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(q);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(q, q);
  for (const auto& [id, s] : sums) {
    total += s;
    meat.noalias() += s * s.transpose();
  }
  meat *= g / (g - 1.0);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(meat);
  const double scale = meat.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-12 * scale) {
    throw DataError("score_test: tested columns are collinear with the fixed effects or regressors");
  }
  WaldTest& t = out.test;
  t.statistic = total.dot(ldlt.solve(total));
  t.df = static_cast<int>(q);
  t.p_value = chi_squared_upper(t.statistic, t.df);
  t.df_denominator = g - 1.0;
  t.p_value_f = f_upper(t.statistic / t.df, t.df, t.df_denominator);
  return out;
}

}  // namespace tpreg::ppml
