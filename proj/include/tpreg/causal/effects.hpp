#pragma once

#include <string>
#include <vector>

#include "tpreg/ppml/fit.hpp"

namespace tpreg::causal {

inline constexpr double kZ95 = 1.959964;

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// z = value / se, two-sided normal p, value -/+ 1.959964 se.
Estimate make_estimate(double value, double se);

/// (beta2_k, beta1_k) and their covariance block for one treatment type.
struct TypeCoefficients {
  double beta2 = 0.0;  // treat x post
  double beta1 = 0.0;  // treat x post x broadband
  double var2 = 0.0;
  double var1 = 0.0;
  double cov21 = 0.0;
};

/// Reads the coefficients of `type` from a fit with the triple design.
/// Throws DataError if either coefficient is missing or was dropped.
TypeCoefficients type_coefficients(const ppml::FitResult& fit, const std::string& type);

/// ATT(B) = exp(beta2 + beta1 B) - 1, delta-method gradient (e, B e).
Estimate att_at(const TypeCoefficients& c, double broadband);
Estimate att_at(const ppml::FitResult& fit, const std::string& type, double broadband);

struct AcrtEstimates {
  Estimate derivative;  // beta1 exp(beta2 + beta1 B)
  Estimate raw;         // beta1
};

AcrtEstimates acrt(const TypeCoefficients& c, double broadband);
AcrtEstimates acrt(const ppml::FitResult& fit, const std::string& type, double broadband);

/// exp(beta2) - 1; needs only the treat x post coefficient.
double att_percent(double beta2);
double att_percent(const ppml::FitResult& fit, const std::string& type);

/// ATT(1) - ATT(0) - ACRT_derivative(0).
double taylor_gap(const TypeCoefficients& c);

/// (beta2, beta1) reproducing two ATT values at B = b0 and B = b1.
TypeCoefficients back_out(double att_b0, double att_b1, double b0 = 0.0, double b1 = 1.0);

}  // namespace tpreg::causal
