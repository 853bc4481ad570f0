#include "tpreg/causal/placebo.hpp"

#include <cmath>

#include "tpreg/errors.hpp"

namespace tpreg::causal {

PlaceboResult placebo_test(const synth::PanelDataset& data, const PlaceboOptions& o) {
  bool any_treated = false;
  for (std::size_t i = 0; i < data.size() && !any_treated; ++i) any_treated = data.treated(i);
  if (!any_treated) throw DataError("placebo test: the panel has no treated states");

  const synth::PanelDataset pre = synth::make_placebo(data, o.shift_years);
  const std::size_t n = pre.size();
  std::vector<double> fake_post(n, 0.0);
  std::vector<double> trend(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!pre.treated(i)) continue;
    fake_post[i] = pre.post[i];
    trend[i] = pre.year[i] - pre.cohort[i];
  }
  ColumnSet set;
  set.add(kPlaceboTreated, fake_post);
  set.add(kPlaceboTrend, trend);
  add_controls(pre, o.controls, set);

  PlaceboResult out;
  out.rows = n;
  out.fit = ppml::fit(make_design(pre, set), o.fit);
  if (!out.fit.converged) throw ConvergenceError("placebo test: PPML fit did not converge");
  out.treated = make_estimate(out.fit.coef(kPlaceboTreated), out.fit.se(kPlaceboTreated));
  out.interaction = make_estimate(out.fit.coef(kPlaceboTrend), out.fit.se(kPlaceboTrend));
  return out;
}

}  // namespace tpreg::causal
