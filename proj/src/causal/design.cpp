#include "tpreg/causal/design.hpp"

#include "tpreg/errors.hpp"

namespace tpreg::causal {

std::string triple_column(const std::string& type) { return type + ":post:bb"; }
std::string treat_post_column(const std::string& type) { return type + ":post"; }
std::string treat_bb_column(const std::string& type) { return type + ":bb"; }

void ColumnSet::add(std::string name, std::vector<double> values) {
  columns.emplace_back(std::move(name), std::move(values));
}

std::vector<std::string> resolve_types(const synth::PanelDataset& data,
                                       const std::vector<std::string>& requested) {
  if (requested.empty()) return data.type_names;
  for (const auto& t : requested) {
    if (!data.type_index(t)) throw DataError("treatment type \"" + t + "\" is not in the panel");
  }
  return requested;
}

ppml::Design make_design(const synth::PanelDataset& data, const ColumnSet& set) {
  const std::size_t n = data.size();
  ppml::Design d;
  d.y = Eigen::Map<const Eigen::VectorXd>(data.outcome.data(), static_cast<Eigen::Index>(n));
  d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(set.columns.size()));
  for (std::size_t c = 0; c < set.columns.size(); ++c) {
    const auto& [name, values] = set.columns[c];
    if (values.size() != n) throw DataError("design column " + name + " has the wrong length");
    d.names.push_back(name);
    d.x.col(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(n));
  }
  d.absorb = {data.county_id, data.year};
  d.absorb_names = {"county", "year"};
  d.cluster = data.state_id;
  return d;
}

void add_controls(const synth::PanelDataset& data, const DesignOptions& options, ColumnSet& out) {
  if (options.broadband_control) out.add(kBroadband, data.broadband_z);
  if (options.include_controls) {
    for (std::size_t c = 0; c < data.controls.size(); ++c) {
      out.add(data.control_names[c], data.controls[c]);
    }
  }
}

ppml::Design build_design(const synth::PanelDataset& data, const DesignOptions& options) {
  const std::vector<std::string> types = resolve_types(data, options.types);
  const std::size_t n = data.size();
  auto product = [&](const std::vector<double>& m, bool with_post, bool with_bb) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = m[i] * (with_post ? data.post[i] : 1.0) * (with_bb ? data.broadband_z[i] : 1.0);
    }
    return v;
  };
  ColumnSet set;
  if (options.include_triple) {
    for (const auto& t : types) {
      set.add(triple_column(t), product(data.type_flags[*data.type_index(t)], true, true));
    }
  }
  for (const auto& t : types) {
    set.add(treat_post_column(t), product(data.type_flags[*data.type_index(t)], true, false));
  }
  if (options.include_triple) {
    for (const auto& t : types) {
      set.add(treat_bb_column(t), product(data.type_flags[*data.type_index(t)], false, true));
    }
    set.add(kPostBroadband, product(std::vector<double>(n, 1.0), true, true));
  }
  add_controls(data, options, set);
  return make_design(data, set);
}

}  // namespace tpreg::causal
