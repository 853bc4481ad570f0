#include "tpreg/ppml/reset.hpp"

#include "tpreg/errors.hpp"

namespace tpreg::ppml {

namespace {
const char* const kSquaredIndex = "reset_index_sq";
}

ResetResult reset_test(const Design& design, const FitOptions& options) {
  ResetResult out;
  out.base = fit(design, options);
  if (!out.base.converged) throw ConvergenceError("reset_test: base fit did not converge");

  Design augmented = design.subset(out.base.rows);
  const Eigen::Index n = augmented.x.rows();
  augmented.x.conservativeResize(n, augmented.x.cols() + 1);
  augmented.x.col(augmented.x.cols() - 1) = out.base.linear_index.array().square().matrix();
  augmented.names.push_back(kSquaredIndex);

  const FitResult wide = fit(augmented, options);
  if (!wide.converged) throw ConvergenceError("reset_test: augmented fit did not converge");
  const auto idx = wide.index_of(kSquaredIndex);
  if (!idx) {
    out.collinear = true;
    out.test.df = 1;
    out.test.df_denominator = static_cast<double>(wide.n_clusters) - 1.0;
    return out;
  }
  out.coefficient = wide.coefficients[static_cast<Eigen::Index>(*idx)];
  out.test = wald_test(wide.coefficients, wide.vcov_cluster, {*idx}, wide.n_clusters);
  return out;
}

}  // namespace tpreg::ppml
