#include "tpreg/causal/effects.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tpreg/causal/design.hpp"
#include "tpreg/errors.hpp"
#include "tpreg/ppml/stats.hpp"

namespace tpreg::causal {

namespace {

double gradient_se(double g2, double g1, const TypeCoefficients& c) {
  const double var = g2 * g2 * c.var2 + 2.0 * g2 * g1 * c.cov21 + g1 * g1 * c.var1;
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace

Estimate make_estimate(double value, double se) {
  Estimate e;
  e.value = value;
  e.se = se;
  const double inf = std::numeric_limits<double>::infinity();
  e.z = se > 0.0 ? value / se : (value == 0.0 ? 0.0 : std::copysign(inf, value));
  e.p = se > 0.0 ? ppml::normal_two_sided_p(e.z) : (value == 0.0 ? 1.0 : 0.0);
  e.ci_low = value - kZ95 * se;
  e.ci_high = value + kZ95 * se;
  return e;
}

TypeCoefficients type_coefficients(const ppml::FitResult& fit, const std::string& type) {
  const std::string b2 = treat_post_column(type);
  const std::string b1 = triple_column(type);
  TypeCoefficients c;
  c.beta2 = fit.coef(b2);
  c.beta1 = fit.coef(b1);
  c.var2 = fit.cov(b2, b2);
  c.var1 = fit.cov(b1, b1);
  c.cov21 = fit.cov(b2, b1);
  return c;
}

Estimate att_at(const TypeCoefficients& c, double b) {
  const double e = std::exp(c.beta2 + c.beta1 * b);
  return make_estimate(e - 1.0, gradient_se(e, b * e, c));
}

Estimate att_at(const ppml::FitResult& fit, const std::string& type, double b) {
  return att_at(type_coefficients(fit, type), b);
}

AcrtEstimates acrt(const TypeCoefficients& c, double b) {
  const double e = std::exp(c.beta2 + c.beta1 * b);
  AcrtEstimates out;
  out.derivative = make_estimate(c.beta1 * e, gradient_se(c.beta1 * e, e + c.beta1 * b * e, c));
  out.raw = make_estimate(c.beta1, std::sqrt(std::max(c.var1, 0.0)));
  return out;
}

AcrtEstimates acrt(const ppml::FitResult& fit, const std::string& type, double b) {
  return acrt(type_coefficients(fit, type), b);
}

double att_percent(double beta2) { return std::exp(beta2) - 1.0; }

double att_percent(const ppml::FitResult& fit, const std::string& type) {
  return att_percent(fit.coef(treat_post_column(type)));
}

double taylor_gap(const TypeCoefficients& c) {
  return att_at(c, 1.0).value - att_at(c, 0.0).value - acrt(c, 0.0).derivative.value;
}

TypeCoefficients back_out(double att_b0, double att_b1, double b0, double b1) {
  if (!(att_b0 > -1.0 && att_b1 > -1.0)) throw DomainError("back_out: ATT must exceed -1");
  if (b0 == b1) throw DomainError("back_out: broadband levels must differ");
  const double l0 = std::log1p(att_b0);
  const double l1 = std::log1p(att_b1);
  TypeCoefficients c;
  c.beta1 = (l1 - l0) / (b1 - b0);
  c.beta2 = l0 - c.beta1 * b0;
  return c;
}

}  // namespace tpreg::causal
