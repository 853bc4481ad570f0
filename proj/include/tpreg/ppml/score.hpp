#pragma once

#include <string>
#include <vector>

#include "tpreg/ppml/fit.hpp"
#include "tpreg/ppml/stats.hpp"

namespace tpreg::ppml {

struct ScoreTestResult {
  /// Cluster-robust LM statistic in the WaldTest layout (chi-squared and
  /// F(q, G - 1) p-values).
  WaldTest test;
  FitResult restricted;  // fit without the tested columns
};

/// Cluster-robust score (LM) test of H0: the coefficients of `tested` are
/// zero. Only the restricted model is fitted; the tested columns are
/// partialled out of the fixed effects and the remaining regressors with the
/// restricted PPML weights, and their cluster score sums give
///   LM = S' (c * sum_g s_g s_g')^-1 S,   c = G / (G - 1).
/// Null-imposed scores keep their size with few effective clusters, where
/// the Wald form over-rejects. Throws DataError for unknown names or when
/// the tested columns are collinear with the rest.
ScoreTestResult score_test(const Design& design, const std::vector<std::string>& tested,
                           const FitOptions& options = {});

}  // namespace tpreg::ppml
