#include "tpreg/causal/tables.hpp"

#include <cstdio>
#include <ostream>

#include "tpreg/synth/panel_csv.hpp"

namespace tpreg::causal {

namespace {

void write_row(std::ostream& out, const std::string& type, const std::string& metric,
               const Estimate& e) {
  using synth::format_real;
  out << type << ',' << metric << ',' << format_real(e.value) << ',' << format_real(e.se) << ','
      << format_real(e.z) << ',' << format_real(e.p) << ',' << format_real(e.ci_low) << ','
      << format_real(e.ci_high) << '\n';
}

const char* const kHeader = "policy_type,metric,coefficient,std_error,z,p,ci_low,ci_high\n";

}  // namespace

std::string format_level(double b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", b);
  return buf;
}

CausalSummary att_table(const TypeCoefficients& c, const std::string& type,
                        const std::vector<double>& levels, double acrt_at) {
  CausalSummary s;
  s.policy_type = type;
  for (double b : levels) s.levels.push_back({b, att_at(c, b)});
  s.acrt_at = acrt_at;
  s.acrt = acrt(c, acrt_at);
  s.taylor_gap = taylor_gap(c);
  s.att_percent = att_percent(c.beta2);
  return s;
}

CausalSummary att_table(const ppml::FitResult& fit, const std::string& type,
                        const std::vector<double>& levels, double acrt_at) {
  return att_table(type_coefficients(fit, type), type, levels, acrt_at);
}

void write_att_table_csv(std::ostream& out, const std::vector<CausalSummary>& summaries) {
  out << kHeader;
  for (const auto& s : summaries) {
    for (const auto& l : s.levels) {
      write_row(out, s.policy_type, "ATT(B=" + format_level(l.broadband) + ")", l.att);
    }
    write_row(out, s.policy_type, "ACRT(B=" + format_level(s.acrt_at) + ")", s.acrt.derivative);
  }
}

void write_event_study_csv(std::ostream& out, const std::string& policy_type,
                           const EventStudyResult& result) {
  out << kHeader;
  for (const auto& c : result.coefficients) {
    write_row(out, policy_type, event_column(c.rel_time), c.level);
  }
  for (const auto& c : result.coefficients) {
    if (c.broadband_slope) write_row(out, policy_type, event_bb_column(c.rel_time), *c.broadband_slope);
  }
}

}  // namespace tpreg::causal
