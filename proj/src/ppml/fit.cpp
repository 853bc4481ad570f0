#include "tpreg/ppml/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tpreg/errors.hpp"
#include "tpreg/ppml/separation.hpp"
#include "tpreg/ppml/vcov.hpp"

namespace tpreg::ppml {

namespace {

double poisson_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double term = y[i] > 0.0 ? y[i] * std::log(y[i] / mu[i]) : 0.0;
    dev += term - (y[i] - mu[i]);
  }
  return 2.0 * dev;
}

/// In-order Cholesky on the Gram matrix of the absorbed columns, each scaled
/// by its norm before absorption. A column whose remaining pivot falls below
/// `tol` is collinear with the fixed effects and the columns kept before it.
std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd& raw,
                                              const Eigen::MatrixXd& absorbed, double tol) {
  const Eigen::Index k = raw.cols();
  Eigen::MatrixXd scaled(absorbed.rows(), k);
  std::vector<bool> usable(k, true);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double norm = raw.col(j).norm();
    usable[j] = norm > 0.0 && std::isfinite(norm);
    scaled.col(j) = usable[j] ? Eigen::VectorXd(absorbed.col(j) / norm)
                              : Eigen::VectorXd::Zero(absorbed.rows());
  }
  const Eigen::MatrixXd gram = scaled.transpose() * scaled;

  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd chol(k, k);
  chol.setZero();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!usable[j]) continue;
    const Eigen::Index m = static_cast<Eigen::Index>(kept.size());
    Eigen::VectorXd w(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      double v = gram(kept[a], j);
      for (Eigen::Index b = 0; b < a; ++b) v -= chol(a, b) * w[b];
      w[a] = v / chol(a, a);
    }
    const double pivot = gram(j, j) - w.squaredNorm();
    if (pivot < tol) continue;
    for (Eigen::Index a = 0; a < m; ++a) chol(m, a) = w[a];
    chol(m, m) = std::sqrt(pivot);
    kept.push_back(j);
  }
  return kept;
}

Eigen::VectorXd weighted_ls(const Eigen::MatrixXd& x, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& z) {
  const Eigen::MatrixXd gram = x.transpose() * w.asDiagonal() * x;
  const Eigen::VectorXd rhs = x.transpose() * (w.array() * z.array()).matrix();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("fit: weighted normal equations failed");
  return ldlt.solve(rhs);
}

}  // namespace

void Design::validate() const {
  const std::size_t n = rows();
  if (n == 0) throw DataError("design has no rows");
  if (static_cast<std::size_t>(x.rows()) != n) throw DataError("design: x and y differ in rows");
  if (names.size() != static_cast<std::size_t>(x.cols())) {
    throw DataError("design: one name per regressor column is required");
  }
  if (absorb_names.size() != absorb.size()) {
    throw DataError("design: one name per absorbed dimension is required");
  }
  for (const auto& keys : absorb) {
    if (keys.size() != n) throw DataError("design: fixed-effect keys differ in length");
  }
  if (cluster.size() != n) throw DataError("design: cluster ids differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] >= 0.0) || !std::isfinite(y[i])) {
      throw DataError("design: outcome must be finite and >= 0 (row " + std::to_string(i) + ")");
    }
  }
  if (!x.allFinite()) throw DataError("design: regressors must be finite");
}

Design Design::subset(const std::vector<std::size_t>& rows_in) const {
  Design out;
  const Eigen::Index m = static_cast<Eigen::Index>(rows_in.size());
  out.y.resize(m);
  out.x.resize(m, x.cols());
  out.names = names;
  out.absorb_names = absorb_names;
  out.absorb.assign(absorb.size(), std::vector<int>(rows_in.size()));
  out.cluster.resize(rows_in.size());
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t i = rows_in[r];
    out.y[r] = y[i];
    out.x.row(r) = x.row(i);
    for (std::size_t d = 0; d < absorb.size(); ++d) out.absorb[d][r] = absorb[d][i];
    out.cluster[r] = cluster[i];
  }
  return out;
}

std::optional<std::size_t> FitResult::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

namespace {
std::size_t require_index(const FitResult& f, const std::string& name) {
  const auto idx = f.index_of(name);
  if (!idx) {
    const bool dropped = std::find(f.dropped_collinear.begin(), f.dropped_collinear.end(), name) !=
                         f.dropped_collinear.end();
    throw DataError("coefficient \"" + name + "\" " +
                    (dropped ? "was dropped as collinear" : "is not in the fit"));
  }
  return *idx;
}
}  // namespace

double FitResult::coef(const std::string& name) const {
  return coefficients[require_index(*this, name)];
}

double FitResult::se(const std::string& name) const {
  const std::size_t i = require_index(*this, name);
  return std::sqrt(vcov_cluster(i, i));
}

double FitResult::cov(const std::string& a, const std::string& b) const {
  return vcov_cluster(require_index(*this, a), require_index(*this, b));
}

FitResult fit(const Design& design_in, const FitOptions& opt) {
  design_in.validate();
  const SeparationResult sep = drop_separated(design_in);
  if (sep.kept.empty()) throw DataError("fit: every observation is separated (all-zero cells)");
  const Design d = sep.dropped.empty() ? design_in : design_in.subset(sep.kept);
  const Eigen::Index n = static_cast<Eigen::Index>(d.rows());
  const FixedEffects fe(d.absorb);

  FitResult out;
  out.rows = sep.kept;
  out.n_dropped_separated = sep.dropped.size();
  out.n_obs = d.rows();

  // Collinearity on the unit-weight within transformation.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Absorber unit(fe, ones, opt.absorb);
  const Eigen::MatrixXd x_unit = unit.absorb(d.x);
  const std::vector<Eigen::Index> keep = independent_columns(d.x, x_unit, opt.collinearity_tolerance);
  if (keep.empty()) throw DataError("fit: no regressor survives the collinearity check");
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(keep.size()));
  {
    std::size_t next = 0;
    for (Eigen::Index j = 0; j < d.x.cols(); ++j) {
      if (next < keep.size() && keep[next] == j) {
        x.col(static_cast<Eigen::Index>(next)) = d.x.col(j);
        out.names.push_back(d.names[j]);
        ++next;
      } else {
        out.dropped_collinear.push_back(d.names[j]);
      }
    }
  }
  out.n_dropped_collinear = out.dropped_collinear.size();
  const Eigen::Index k = x.cols();

  // Warm start: least squares of ln(y + offset) on X and the fixed effects.
  Eigen::VectorXd eta(n);
  Eigen::VectorXd beta(k);
  {
    const Eigen::VectorXd z0 = (d.y.array() + opt.start_offset).log().matrix();
    Eigen::VectorXd z0_t = z0;
    unit.absorb_in_place(z0_t);
    Eigen::MatrixXd xt(n, k);
    for (Eigen::Index c = 0; c < k; ++c) xt.col(c) = x_unit.col(keep[c]);
    beta = weighted_ls(xt, ones, z0_t);
    eta = z0 - (z0_t - xt * beta);
  }
  Eigen::VectorXd mu = eta.array().exp().matrix();
  double dev = poisson_deviance(d.y, mu);
  int max_sweeps = unit.max_sweeps_used();

  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    out.iterations = iter;
    const Eigen::VectorXd z = eta + ((d.y - mu).array() / mu.array()).matrix();
    const Absorber absorber(fe, mu, opt.absorb);
    Eigen::VectorXd zt = z;
    absorber.absorb_in_place(zt);
    const Eigen::MatrixXd xt = absorber.absorb(x);
    max_sweeps = std::max(max_sweeps, absorber.max_sweeps_used());

    Eigen::VectorXd beta_new = weighted_ls(xt, mu, zt);
    Eigen::VectorXd eta_new = z - (zt - xt * beta_new);
    Eigen::VectorXd mu_new = eta_new.array().exp().matrix();
    double dev_new = poisson_deviance(d.y, mu_new);

    // Step halving when the full IRLS step overshoots.
    for (int halving = 0; halving < 30 && (!std::isfinite(dev_new) || dev_new > dev * (1.0 + 1e-12) + 1e-12);
         ++halving) {
      eta_new = 0.5 * (eta + eta_new);
      beta_new = 0.5 * (beta + beta_new);
      mu_new = eta_new.array().exp().matrix();
      dev_new = poisson_deviance(d.y, mu_new);
    }
    if (!std::isfinite(dev_new)) throw ConvergenceError("fit: deviance is not finite");

    const double step = (beta_new - beta).cwiseAbs().maxCoeff();
    const double dev_change = std::abs(dev_new - dev) / std::max(std::abs(dev_new), 0.1);
    beta = beta_new;
    eta = eta_new;
    mu = mu_new;
    dev = dev_new;
    if (dev_change < opt.deviance_tolerance && step < opt.step_tolerance) {
      out.converged = true;
      break;
    }
  }

  out.coefficients = beta;
  out.linear_index = eta;
  out.fitted_mean = mu;
  out.deviance = dev;
  out.y = d.y;
  out.cluster = d.cluster;

  const Absorber final_absorber(fe, mu, opt.absorb);
  out.absorbed_x = final_absorber.absorb(x);
  out.max_absorb_sweeps = std::max(max_sweeps, final_absorber.max_sweeps_used());

  const ClusterVcov v = cluster_vcov(out.absorbed_x, d.y, mu, d.cluster);
  out.vcov_cluster = v.corrected;
  out.vcov_cluster_uncorrected = v.uncorrected;
  out.n_clusters = v.n_clusters;

  const Eigen::VectorXd resid = d.y - mu;
  const double total_y = std::max(d.y.sum(), std::numeric_limits<double>::min());
  double score = (x.transpose() * resid).cwiseAbs().maxCoeff();
  for (std::size_t dim = 0; dim < fe.dims(); ++dim) {
    std::vector<double> sums(fe.groups(dim), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) sums[fe.codes(dim)[i]] += resid[i];
    for (double s : sums) score = std::max(score, std::abs(s));
  }
  out.max_score = score / total_y;

  const Eigen::VectorXd fe_total = eta - x * beta;
  const auto effects = decompose_effects(fe_total, fe, opt.absorb);
  out.fixed_effects.resize(fe.dims());
  for (std::size_t dim = 0; dim < fe.dims(); ++dim) {
    for (std::size_t g = 0; g < fe.groups(dim); ++g) {
      out.fixed_effects[dim][fe.levels(dim)[g]] = effects[dim][g];
    }
  }
  return out;
}

}  // namespace tpreg::ppml
