#include "tpreg/pipeline/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "tpreg/causal/design.hpp"
#include "tpreg/causal/effects.hpp"
#include "tpreg/causal/event_study.hpp"
#include "tpreg/causal/placebo.hpp"
#include "tpreg/causal/tables.hpp"
#include "tpreg/equilibrium/config.hpp"
#include "tpreg/errors.hpp"
#include "tpreg/json_util.hpp"
#include "tpreg/pipeline/assemble.hpp"
#include "tpreg/pipeline/csv.hpp"
#include "tpreg/pipeline/studies.hpp"
#include "tpreg/ppml/reset.hpp"
#include "tpreg/synth/config.hpp"
#include "tpreg/synth/panel_csv.hpp"

namespace tpreg::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using json_util::read;
using json_util::reject_unknown;

Mode parse_mode(const std::string& name) {
  if (name == "simulate" || name == "simulate-equilibrium") return Mode::simulate;
  if (name == "generate" || name == "generate-panel") return Mode::generate;
  if (name == "fit") return Mode::fit;
  if (name == "analyze") return Mode::analyze;
  if (name == "ingest" || name == "ingest-broadband") return Mode::ingest;
  if (name == "montecarlo") return Mode::montecarlo;
  throw ConfigError("unknown mode \"" + name + "\"");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::generate: return "generate";
    case Mode::fit: return "fit";
    case Mode::analyze: return "analyze";
    case Mode::ingest: return "ingest";
    case Mode::montecarlo: return "montecarlo";
  }
  return "simulate";
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    config.params = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!config.params.is_object()) throw ConfigError("config file " + path + ": expected a JSON object");
  config.base_dir = fs::path(path).parent_path().string();
  if (config.base_dir.empty()) config.base_dir = ".";
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size() || !std::isfinite(v)) throw ConfigError("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--levels: \"" + item + "\" is not a number");
    }
  }
  if (out.empty()) throw ConfigError("--levels: empty list");
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const AssumptionViolation*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) {
    return 4;
  }
  return 1;
}

namespace {

const char* error_kind(int code) {
  switch (code) {
    case 2: return "config_error";
    case 3: return "convergence_error";
    case 4: return "data_error";
    default: return "internal_error";
  }
}

class Context {
 public:
  explicit Context(const RunConfig& c) : config_(c) {}

  const json& params() const { return config_.params; }

  std::string input_path(const json& section, const char* key, const char* where) const {
    const auto it = section.find(key);
    if (it == section.end() || !it->is_string()) {
      throw ConfigError(std::string(where) + "." + key + ": a path string is required");
    }
    fs::path p(it->get<std::string>());
    if (p.is_relative()) p = fs::path(config_.base_dir) / p;
    if (!fs::exists(p)) throw ConfigError(std::string(where) + "." + key + ": " + p.string() + " does not exist");
    return p.string();
  }

  std::string output(const std::string& name, const std::function<void(std::ostream&)>& writer) {
    const std::string path = (fs::path(config_.out_dir) / name).string();
    write_atomically(path, writer);
    outputs_.push_back(path);
    return path;
  }

  const json& outputs() {
    outputs_json_ = outputs_;
    return outputs_json_;
  }

  const RunConfig& config() const { return config_; }

 private:
  const RunConfig& config_;
  std::vector<std::string> outputs_;
  json outputs_json_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

json estimate_json(const causal::Estimate& e) {
  return {{"value", e.value}, {"se", e.se}, {"z", e.z}, {"p", e.p}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
}

json wald_json(const ppml::WaldTest& t) {
  return {{"statistic", t.statistic}, {"df", t.df}, {"p_value_chi2", t.p_value},
          {"df_denominator", t.df_denominator}, {"p_value_f", t.p_value_f}};
}

causal::DesignOptions design_options(const json& j, const char* where) {
  causal::DesignOptions o;
  read(j, "types", o.types, where);
  read(j, "include_triple", o.include_triple, where);
  read(j, "broadband_control", o.broadband_control, where);
  read(j, "include_controls", o.include_controls, where);
  return o;
}

synth::PanelDataset load_panel(const Context& ctx, const json& j, const char* where) {
  auto panel = synth::read_panel_csv_file(ctx.input_path(j, "input", where));
  if (j.contains("sample_window")) {
    std::vector<int> w;
    read(j, "sample_window", w, where);
    if (w.size() != 2) throw ConfigError(std::string(where) + ".sample_window: expected [first, last]");
    panel = synth::apply_sample_window(panel, w[0], w[1]);
  }
  return panel;
}

void write_coefficients_csv(std::ostream& out, const ppml::FitResult& fit) {
  using synth::format_real;
  out << "name,coefficient,std_error,z,p,ci_low,ci_high\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const auto e = causal::make_estimate(fit.coefficients[static_cast<Eigen::Index>(i)],
                                         std::sqrt(fit.vcov_cluster(static_cast<Eigen::Index>(i),
                                                                    static_cast<Eigen::Index>(i))));
    out << fit.names[i] << ',' << format_real(e.value) << ',' << format_real(e.se) << ','
        << format_real(e.z) << ',' << format_real(e.p) << ',' << format_real(e.ci_low) << ','
        << format_real(e.ci_high) << '\n';
  }
}

json fit_json(const ppml::FitResult& fit) {
  return {{"n_obs", fit.n_obs},
          {"n_clusters", fit.n_clusters},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"deviance", fit.deviance},
          {"dropped_separated", fit.n_dropped_separated},
          {"dropped_collinear", fit.dropped_collinear}};
}

// ---------------------------------------------------------------- modes

json run_simulate(Context& ctx) {
  const json& j = ctx.params();
  const auto spec = equilibrium::sweep_from_json(j);
  equilibrium::SolverOptions solver;
  if (j.contains("solver")) solver = equilibrium::solver_options_from_json(j["solver"]);
  const auto rows = equilibrium::run_sweep(spec, solver);
  ctx.output("sweep.csv", [&](std::ostream& out) { equilibrium::write_sweep_csv(out, rows); });
  std::size_t sign_ok = 0;
  for (const auto& r : rows) sign_ok += r.sign_ok;
  return {{"rows", rows.size()}, {"sign_ok", sign_ok}};
}

json run_generate(Context& ctx) {
  const json& j = ctx.params();
  reject_unknown(j, "config", {"panel", "truth", "write_raw"});
  synth::PanelConfig config = synth::panel_config_from_json(j.value("panel", json::object()));
  if (ctx.config().seed) config.seed = *ctx.config().seed;
  config.validate();
  const auto truth = synth::true_parameters_from_json(j.value("truth", json::object()), config);
  const auto panel = synth::simulate_panel(config, truth);
  ctx.output("panel.csv", [&](std::ostream& out) { synth::write_panel_csv(out, panel); });
  bool raw = false;
  read(j, "write_raw", raw, "config");
  if (raw) {
    const RawTables t = to_raw_tables(panel);
    ctx.output("outcomes.csv", [&](std::ostream& out) { write_outcomes_csv(out, t.outcomes); });
    ctx.output("controls.csv", [&](std::ostream& out) { write_controls_csv(out, t.controls); });
    ctx.output("laws.csv", [&](std::ostream& out) { write_laws_csv(out, t.laws); });
    ctx.output("broadband_column.csv", [&](std::ostream& out) { write_broadband_csv(out, t.broadband); });
  }
  std::set<int> states, treated;
  for (std::size_t i = 0; i < panel.size(); ++i) {
    states.insert(panel.state_id[i]);
    if (panel.treated(i)) treated.insert(panel.state_id[i]);
  }
  return {{"rows", panel.size()}, {"states", states.size()}, {"treated_states", treated.size()},
          {"seed", config.seed}};
}

json run_fit(Context& ctx) {
  const json& j = ctx.params();
  reject_unknown(j, "config", {"input", "sample_window", "types", "include_triple",
                               "broadband_control", "include_controls"});
  const auto panel = load_panel(ctx, j, "config");
  const auto fit = ppml::fit(causal::build_design(panel, design_options(j, "config")));
  if (!fit.converged) throw ConvergenceError("fit: PPML did not converge");
  ctx.output("coefficients.csv", [&](std::ostream& out) { write_coefficients_csv(out, fit); });
  return fit_json(fit);
}

json run_analyze(Context& ctx) {
  const json& j = ctx.params();
  reject_unknown(j, "config", {"input", "sample_window", "types", "include_triple", "broadband_control",
                               "include_controls", "levels", "acrt_at", "event_study", "placebo", "reset"});
  const auto panel = load_panel(ctx, j, "config");
  const auto options = design_options(j, "config");
  std::vector<double> levels = causal::kDefaultLevels;
  read(j, "levels", levels, "config");
  if (ctx.config().levels) levels = *ctx.config().levels;
  double acrt_at = 0.0;
  read(j, "acrt_at", acrt_at, "config");

  const auto fit = ppml::fit(causal::build_design(panel, options));
  if (!fit.converged) throw ConvergenceError("analyze: PPML did not converge");
  json summary = fit_json(fit);
  std::vector<causal::CausalSummary> tables;
  json effects = json::array();
  for (const auto& type : causal::resolve_types(panel, options.types)) {
    tables.push_back(causal::att_table(fit, type, levels, acrt_at));
    const auto& t = tables.back();
    effects.push_back({{"type", type},
                       {"att_percent", t.att_percent},
                       {"acrt_derivative", estimate_json(t.acrt.derivative)},
                       {"taylor_gap", t.taylor_gap}});
  }
  ctx.output("coefficients.csv", [&](std::ostream& out) { write_coefficients_csv(out, fit); });
  ctx.output("att_table.csv", [&](std::ostream& out) { causal::write_att_table_csv(out, tables); });
  summary["effects"] = effects;

  json diagnostics = json::object();
  std::ostringstream diag;
  diag << "test,statistic,df,p_value_chi2,p_value_f\n";
  auto diag_row = [&](const std::string& name, const ppml::WaldTest& t) {
    using synth::format_real;
    diag << name << ',' << format_real(t.statistic) << ',' << t.df << ',' << format_real(t.p_value)
         << ',' << format_real(t.p_value_f) << '\n';
    diagnostics[name] = wald_json(t);
  };

  bool do_reset = true;
  read(j, "reset", do_reset, "config");
  if (do_reset) {
    const auto r = ppml::reset_test(causal::build_design(panel, options));
    diag_row("reset", r.test);
  }

  const json es_cfg = j.value("event_study", json::object());
  bool es_enabled = true;
  if (!es_cfg.is_null()) {
    reject_unknown(es_cfg, "event_study", {"enabled", "window_pre", "window_post", "type", "broadband_interactions"});
    read(es_cfg, "enabled", es_enabled, "event_study");
  }
  if (es_enabled) {
    causal::EventStudyOptions eo;
    read(es_cfg, "window_pre", eo.window_pre, "event_study");
    read(es_cfg, "window_post", eo.window_post, "event_study");
    read(es_cfg, "type", eo.type, "event_study");
    read(es_cfg, "broadband_interactions", eo.broadband_interactions, "event_study");
    eo.controls = options;
    const auto es = causal::event_study(panel, eo);
    const std::string label = eo.type.empty() ? "all" : eo.type;
    ctx.output("event_study.csv", [&](std::ostream& out) { causal::write_event_study_csv(out, label, es); });
    diag_row("event_study_pre_score", es.pre_test);
    diag_row("event_study_pre_wald", es.pre_wald);
  }

  const json pl_cfg = j.value("placebo", json::object());
  bool pl_enabled = true;
  if (!pl_cfg.is_null()) {
    reject_unknown(pl_cfg, "placebo", {"enabled", "shift_years"});
    read(pl_cfg, "enabled", pl_enabled, "placebo");
  }
  if (pl_enabled) {
    causal::PlaceboOptions po;
    read(pl_cfg, "shift_years", po.shift_years, "placebo");
    po.controls = options;
    const auto pl = causal::placebo_test(panel, po);
    diagnostics["placebo"] = {{"treated", estimate_json(pl.treated)},
                              {"interaction", estimate_json(pl.interaction)},
                              {"rows", pl.rows}};
    using synth::format_real;
    diag << "placebo_interaction," << format_real(pl.interaction.z * pl.interaction.z) << ",1,"
         << format_real(pl.interaction.p) << ",NA\n";
  }
  const std::string diag_text = diag.str();
  ctx.output("diagnostics.csv", [&](std::ostream& out) { out << diag_text; });
  summary["diagnostics"] = diagnostics;
  return summary;
}

json run_ingest(Context& ctx) {
  const json& j = ctx.params();
  reject_unknown(j, "config", {"records", "transform", "per_year", "assemble"});
  BroadbandOptions options;
  std::string transform = "zscore";
  read(j, "transform", transform, "config");
  options.transform = parse_transform(transform);
  if (ctx.config().transform) options.transform = *ctx.config().transform;
  read(j, "per_year", options.per_year, "config");
  if (options.per_year && options.transform != Transform::zscore) {
    throw ConfigError("config.per_year applies to the zscore transform only");
  }

  auto in = open_input(ctx.input_path(j, "records", "config"));
  const auto column = ingest_broadband(read_broadband_csv(in), options);
  ctx.output("broadband.csv", [&](std::ostream& out) { write_broadband_csv(out, column); });
  const json meta = {{"transform", transform_name(column.transform)},
                     {"per_year", column.per_year},
                     {"rows", column.size()},
                     {"weighted_mean", column.mean},
                     {"weighted_sd", column.sd},
                     {"weighted_min", column.min},
                     {"weighted_max", column.max},
                     {"log_minmax_delta", column.delta}};
  ctx.output("broadband_meta.json", [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
  json summary = meta;

  if (j.contains("assemble")) {
    const json& a = j["assemble"];
    reject_unknown(a, "assemble", {"outcomes", "controls", "laws"});
    auto out_in = open_input(ctx.input_path(a, "outcomes", "assemble"));
    const auto outcomes = read_outcomes_csv(out_in);
    ControlTable controls;
    if (a.contains("controls")) {
      auto c_in = open_input(ctx.input_path(a, "controls", "assemble"));
      controls = read_controls_csv(c_in);
    }
    std::vector<LawRecord> laws;
    if (a.contains("laws")) {
      auto l_in = open_input(ctx.input_path(a, "laws", "assemble"));
      laws = read_laws_csv(l_in);
    }
    const auto assembled = assemble_panel(column, outcomes, controls, laws);
    ctx.output("panel.csv", [&](std::ostream& out) { synth::write_panel_csv(out, assembled.panel); });
    const auto& r = assembled.report;
    summary["assembly"] = {{"rows", r.rows},
                           {"dropped_missing_outcome", r.dropped_missing_outcome},
                           {"outcome_without_broadband", r.outcome_without_broadband},
                           {"outcome_without_controls", r.outcome_without_controls},
                           {"broadband_without_outcome", r.broadband_without_outcome},
                           {"law_states_without_rows", r.law_states_without_rows},
                           {"types", assembled.panel.type_names}};
  }
  return summary;
}

json run_montecarlo(Context& ctx) {
  const json& j = ctx.params();
  reject_unknown(j, "config", {"study", "replications", "threads", "alpha", "type", "panel", "truth",
                               "equilibrium"});
  std::string study;
  read(j, "study", study, "config");
  if (study.empty()) throw ConfigError("config.study is required (recovery, reset, placebo, event_study, consistency)");
  StudyOptions options;
  std::int64_t reps = static_cast<std::int64_t>(options.replications);
  read(j, "replications", reps, "config");
  if (reps <= 0) throw ConfigError("config.replications must be positive");
  options.replications = static_cast<std::size_t>(reps);
  read(j, "threads", options.threads, "config");
  read(j, "alpha", options.alpha, "config");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ConfigError("config.alpha must lie in (0, 1)");

  synth::PanelConfig panel = synth::panel_config_from_json(j.value("panel", json::object()));
  if (ctx.config().seed) panel.seed = *ctx.config().seed;
  panel.validate();
  json summary = {{"study", study}, {"seed", panel.seed}, {"replications", options.replications}};

  if (study == "consistency") {
    ConsistencySpec spec;
    spec.panel = panel;
    read(j, "type", spec.type, "config");
    if (j.contains("equilibrium")) {
      const json& e = j["equilibrium"];
      reject_unknown(e, "equilibrium", {"primitives", "broadband_link", "floor_markup", "solver"});
      if (e.contains("primitives")) spec.base = equilibrium::primitives_from_json(e["primitives"]);
      if (e.contains("broadband_link")) spec.link = equilibrium::broadband_link_from_json(e["broadband_link"]);
      if (e.contains("solver")) spec.solver = equilibrium::solver_options_from_json(e["solver"]);
      read(e, "floor_markup", spec.floor_markup, "equilibrium");
    }
    const auto result = consistency_study(spec, options);
    ctx.output("replicates.csv", [&](std::ostream& out) { write_consistency_csv(out, result.summary, result.rows); });
    summary["levels"] = result.summary.levels;
    summary["true_log_effects"] = result.summary.true_log_effects;
    summary["passes"] = result.summary.passes;
    summary["pass_rate"] = result.summary.pass_rate;
  } else {
    const auto truth = synth::true_parameters_from_json(j.value("truth", json::object()), panel);
    if (study == "recovery") {
      std::string type = panel.type_names.empty() ? std::string() : panel.type_names.front();
      read(j, "type", type, "config");
      const auto result = recovery_study(panel, truth, type, options);
      ctx.output("replicates.csv", [&](std::ostream& out) { write_recovery_csv(out, result.rows); });
      const auto& s = result.summary;
      summary["type"] = type;
      summary["beta1"] = {{"true", s.true_beta1}, {"mean", s.mean_beta1}, {"sd", s.sd_beta1},
                          {"mean_se", s.mean_se1}, {"bias_in_se", s.bias1_in_se}, {"coverage", s.coverage1}};
      summary["beta2"] = {{"true", s.true_beta2}, {"mean", s.mean_beta2}, {"sd", s.sd_beta2},
                          {"mean_se", s.mean_se2}, {"bias_in_se", s.bias2_in_se}, {"coverage", s.coverage2}};
    } else {
      const auto result = size_study(parse_diagnostic(study), panel, truth, options);
      ctx.output("replicates.csv", [&](std::ostream& out) { write_rejection_csv(out, result.rows); });
      summary["alpha"] = result.summary.alpha;
      summary["rejections"] = result.summary.rejections;
      summary["rejection_rate"] = result.summary.rate;
    }
  }
  const json file_summary = summary;
  ctx.output("summary.json", [&](std::ostream& out) { out << file_summary.dump(2) << '\n'; });
  return summary;
}

}  // namespace

RunResult run(const RunConfig& config, std::ostream& summary_out) {
  RunResult result;
  Context ctx(config);
  try {
    json body;
    switch (config.mode) {
      case Mode::simulate: body = run_simulate(ctx); break;
      case Mode::generate: body = run_generate(ctx); break;
      case Mode::fit: body = run_fit(ctx); break;
      case Mode::analyze: body = run_analyze(ctx); break;
      case Mode::ingest: body = run_ingest(ctx); break;
      case Mode::montecarlo: body = run_montecarlo(ctx); break;
    }
    result.summary = {{"status", "ok"}, {"mode", mode_name(config.mode)}};
    result.summary["result"] = std::move(body);
    result.summary["outputs"] = ctx.outputs();
  } catch (const std::exception& e) {
    result.exit_code = exit_code_for(e);
    result.summary = {{"status", "error"},
                      {"mode", mode_name(config.mode)},
                      {"kind", error_kind(result.exit_code)},
                      {"exit_code", result.exit_code},
                      {"message", e.what()}};
    if (const auto* c = dynamic_cast<const ConvergenceError*>(&e); c && !c->residuals().empty()) {
      json res = json::object();
      for (const auto& [name, value] : c->residuals()) res[name] = value;
      result.summary["residuals"] = res;
    }
  }
  summary_out << result.summary.dump() << '\n';
  return result;
}

}  // namespace tpreg::pipeline
