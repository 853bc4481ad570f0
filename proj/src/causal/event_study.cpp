#include "tpreg/causal/event_study.hpp"

#include <algorithm>
#include <cmath>

#include "tpreg/errors.hpp"
#include "tpreg/ppml/score.hpp"

namespace tpreg::causal {

std::string event_column(int r) { return "rel(" + std::to_string(r) + ")"; }
std::string event_bb_column(int r) { return "rel(" + std::to_string(r) + "):bb"; }

namespace {

synth::PanelDataset restrict_to_type(const synth::PanelDataset& data, const std::string& type) {
  if (type.empty()) return data;
  const auto k = data.type_index(type);
  if (!k) throw DataError("event study: treatment type \"" + type + "\" is not in the panel");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data.treated(i) || data.type_flags[*k][i] == 1.0) rows.push_back(i);
  }
  return data.select(rows);
}

}  // namespace

EventStudyResult event_study(const synth::PanelDataset& data_in, const EventStudyOptions& o) {
  if (o.window_pre < 2 || o.window_post < 0) {
    throw DataError("event study: need window_pre >= 2 and window_post >= 0");
  }
  const synth::PanelDataset data = restrict_to_type(data_in, o.type);
  const std::size_t n = data.size();

  std::vector<int> bins;
  for (int r = -o.window_pre; r <= o.window_post; ++r) {
    if (r != -1) bins.push_back(r);
  }
  ColumnSet set;
  std::vector<double> treated_bb(n, 0.0);
  bool any_treated = false;
  std::vector<std::vector<double>> indicator(bins.size(), std::vector<double>(n, 0.0));
  std::vector<std::size_t> count(bins.size(), 0);
  std::size_t base_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto rel = data.rel_time(i);
    if (!rel) continue;
    any_treated = true;
    treated_bb[i] = data.broadband_z[i];
    const int r = std::clamp(*rel, -o.window_pre, o.window_post);
    if (r == -1) {
      ++base_count;
      continue;
    }
    const auto pos = static_cast<std::size_t>(std::find(bins.begin(), bins.end(), r) - bins.begin());
    indicator[pos][i] = 1.0;
    ++count[pos];
  }
  if (!any_treated) throw DataError("event study: the panel has no treated states");
  if (base_count == 0) throw DataError("event study: base period -1 has no observations");
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (count[b] == 0) {
      throw DataError("event study: relative-time bin " + std::to_string(bins[b]) +
                      " has no observations");
    }
  }

  for (std::size_t b = 0; b < bins.size(); ++b) set.add(event_column(bins[b]), indicator[b]);
  if (o.broadband_interactions) {
    for (std::size_t b = 0; b < bins.size(); ++b) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = indicator[b][i] * data.broadband_z[i];
      set.add(event_bb_column(bins[b]), std::move(v));
    }
    set.add("treated:bb", treated_bb);
  }
  add_controls(data, o.controls, set);

  EventStudyResult out;
  const ppml::Design design = make_design(data, set);
  out.fit = ppml::fit(design, o.fit);
  if (!out.fit.converged) throw ConvergenceError("event study: PPML fit did not converge");

  std::vector<std::size_t> pre_idx;
  std::vector<std::string> pre_names;
  for (int r = -o.window_pre; r <= o.window_post; ++r) {
    EventCoefficient c;
    c.rel_time = r;
    if (r == -1) {
      c.base = true;
      c.level = make_estimate(0.0, 0.0);
      out.coefficients.push_back(c);
      continue;
    }
    const auto idx = out.fit.index_of(event_column(r));
    if (!idx) throw DataError("event study: indicator for bin " + std::to_string(r) + " was dropped");
    c.level = make_estimate(out.fit.coefficients[static_cast<Eigen::Index>(*idx)],
                            std::sqrt(out.fit.vcov_cluster(*idx, *idx)));
    if (r < -1) {
      pre_idx.push_back(*idx);
      pre_names.push_back(event_column(r));
    }
    if (o.broadband_interactions) {
      if (const auto bb = out.fit.index_of(event_bb_column(r))) {
        c.broadband_slope = make_estimate(out.fit.coefficients[static_cast<Eigen::Index>(*bb)],
                                          std::sqrt(out.fit.vcov_cluster(*bb, *bb)));
      }
    }
    out.coefficients.push_back(c);
  }
  out.pre_wald = ppml::wald_test(out.fit.coefficients, out.fit.vcov_cluster, pre_idx,
                                 out.fit.n_clusters);
  out.pre_test = ppml::score_test(design, pre_names, o.fit).test;
  if (o.individual_score_tests) {
    for (auto& c : out.coefficients) {
      if (c.rel_time < -1) c.score_p = ppml::score_test(design, {event_column(c.rel_time)}, o.fit).test.p_value_f;
    }
  }
  return out;
}

}  // namespace tpreg::causal
