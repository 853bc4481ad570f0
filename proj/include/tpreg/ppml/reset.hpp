#pragma once

#include "tpreg/ppml/fit.hpp"
#include "tpreg/ppml/stats.hpp"

namespace tpreg::ppml {

struct ResetResult {
  WaldTest test;              // df = 1
  double coefficient = 0.0;   // on the squared index
  bool collinear = false;     // squared index absorbed; statistic 0, p-values 1
  FitResult base;
};

/// RESET: refit with the squared fitted linear index (fixed effects
/// included) as an extra regressor and Wald-test its coefficient with the
/// cluster-robust covariance. Throws ConvergenceError if either fit fails to
/// converge.
ResetResult reset_test(const Design& design, const FitOptions& options = {});

}  // namespace tpreg::ppml
