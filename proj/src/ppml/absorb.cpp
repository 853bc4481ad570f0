#include "tpreg/ppml/absorb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "tpreg/errors.hpp"

namespace tpreg::ppml {

FixedEffects::FixedEffects(const std::vector<std::vector<int>>& keys) {
  rows_ = keys.empty() ? 0 : keys.front().size();
  for (const auto& dim : keys) {
    if (dim.size() != rows_) throw DataError("fixed-effect key columns differ in length");
    std::map<int, int> code_of;
    for (int k : dim) code_of.emplace(k, 0);
    std::vector<int> levels;
    levels.reserve(code_of.size());
    int next = 0;
    for (auto& [key, code] : code_of) {
      code = next++;
      levels.push_back(key);
    }
    std::vector<int> codes(rows_);
    for (std::size_t i = 0; i < rows_; ++i) codes[i] = code_of[dim[i]];
    codes_.push_back(std::move(codes));
    levels_.push_back(std::move(levels));
  }
}

Absorber::Absorber(const FixedEffects& fe, const Eigen::VectorXd& weights, AbsorbOptions options)
    : fe_(fe), w_(weights), opt_(options) {
  if (static_cast<std::size_t>(w_.size()) != fe.rows()) {
    throw DataError("absorb: weights and fixed effects differ in length");
  }
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (!(w_[i] > 0.0) || !std::isfinite(w_[i])) throw DomainError("absorb: weights must be > 0");
  }
  std::size_t largest = 0;
  for (std::size_t d = 0; d < fe.dims(); ++d) {
    std::vector<double> totals(fe.groups(d), 0.0);
    const auto& codes = fe.codes(d);
    for (std::size_t i = 0; i < fe.rows(); ++i) totals[codes[i]] += w_[i];
    group_weight_.push_back(std::move(totals));
    largest = std::max(largest, fe.groups(d));
  }
  buffer_.resize(largest);
}

void Absorber::sweep(Eigen::Ref<Eigen::VectorXd> x) const {
  const std::size_t n = fe_.rows();
  for (std::size_t d = 0; d < fe_.dims(); ++d) {
    const auto& codes = fe_.codes(d);
    const auto& gw = group_weight_[d];
    std::fill(buffer_.begin(), buffer_.begin() + gw.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) buffer_[codes[i]] += w_[i] * x[i];
    for (std::size_t g = 0; g < gw.size(); ++g) buffer_[g] /= gw[g];
    for (std::size_t i = 0; i < n; ++i) x[i] -= buffer_[codes[i]];
  }
}

double Absorber::weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return (w_.array() * a.array() * b.array()).sum();
}

int Absorber::absorb_in_place(Eigen::Ref<Eigen::VectorXd> x) const {
  if (fe_.dims() == 0) return 0;
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  if (fe_.dims() == 1) {
    sweep(x);
    max_used_ = std::max(max_used_, 1);
    return 1;
  }
  const double limit = opt_.tolerance * scale;
  Eigen::VectorXd x0 = x;
  Eigen::VectorXd x1, x2;
  int sweeps = 0;
  while (sweeps < opt_.max_sweeps) {
    x1 = x0;
    sweep(x1);
    ++sweeps;
    if ((x1 - x0).cwiseAbs().maxCoeff() <= limit) {
      x = x1;
      max_used_ = std::max(max_used_, sweeps);
      return sweeps;
    }
    x2 = x1;
    sweep(x2);
    ++sweeps;
    const Eigen::VectorXd step = x2 - x1;
    if (step.cwiseAbs().maxCoeff() <= limit) {
      x = x2;
      max_used_ = std::max(max_used_, sweeps);
      return sweeps;
    }
    if (opt_.accelerate) {
      const Eigen::VectorXd curvature = x2 - 2.0 * x1 + x0;
      const double denom = weighted_dot(curvature, curvature);
      if (denom > 0.0) {
        const double coef = weighted_dot(step, curvature) / denom;
        x0 = x2 - coef * step;
        continue;
      }
    }
    x0 = x2;
  }
  std::ostringstream msg;
  msg << "absorb: demeaning did not reach tolerance " << opt_.tolerance << " in "
      << opt_.max_sweeps << " sweeps";
  throw ConvergenceError(msg.str(), {{"sweeps", static_cast<double>(sweeps)}});
}

Eigen::MatrixXd Absorber::absorb(const Eigen::MatrixXd& columns) const {
  if (static_cast<std::size_t>(columns.rows()) != fe_.rows()) {
    throw DataError("absorb: column length differs from the fixed effects");
  }
  Eigen::MatrixXd out = columns;
  for (Eigen::Index c = 0; c < out.cols(); ++c) absorb_in_place(out.col(c));
  return out;
}

Eigen::MatrixXd absorb(const Eigen::MatrixXd& columns, const Eigen::VectorXd& weights,
                       const FixedEffects& fe, const AbsorbOptions& options) {
  return Absorber(fe, weights, options).absorb(columns);
}

std::vector<std::vector<double>> decompose_effects(const Eigen::VectorXd& total,
                                                   const FixedEffects& fe,
                                                   const AbsorbOptions& options) {
  const std::size_t n = fe.rows();
  std::vector<std::vector<double>> effects(fe.dims());
  for (std::size_t d = 0; d < fe.dims(); ++d) effects[d].assign(fe.groups(d), 0.0);
  if (fe.dims() == 0) return effects;

  Eigen::VectorXd rest = total;
  const double scale = std::max(total.cwiseAbs().maxCoeff(), 1.0);
  std::vector<std::vector<double>> counts(fe.dims());
  for (std::size_t d = 0; d < fe.dims(); ++d) {
    counts[d].assign(fe.groups(d), 0.0);
    for (std::size_t i = 0; i < n; ++i) counts[d][fe.codes(d)[i]] += 1.0;
  }
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double largest = 0.0;
    for (std::size_t d = 0; d < fe.dims(); ++d) {
      std::vector<double> mean(fe.groups(d), 0.0);
      const auto& codes = fe.codes(d);
      for (std::size_t i = 0; i < n; ++i) mean[codes[i]] += rest[i];
      for (std::size_t g = 0; g < mean.size(); ++g) {
        mean[g] /= counts[d][g];
        effects[d][g] += mean[g];
        largest = std::max(largest, std::abs(mean[g]));
      }
      for (std::size_t i = 0; i < n; ++i) rest[i] -= mean[codes[i]];
    }
    if (largest <= options.tolerance * scale) break;
  }
  for (std::size_t d = 1; d < fe.dims(); ++d) {
    const double shift = effects[d][0];
    for (double& v : effects[d]) v -= shift;
    for (double& v : effects[0]) v += shift;
  }
  return effects;
}

}  // namespace tpreg::ppml
