#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tpreg/equilibrium/comparative.hpp"
#include "tpreg/equilibrium/primitives.hpp"
#include "tpreg/synth/dgp.hpp"

namespace tpreg::pipeline {

/// Runs body(0) .. body(reps - 1) on `threads` workers (0: hardware
/// concurrency) and returns the results in replicate order. Every replicate
/// draws from its own seeded streams, so the output does not depend on the
/// thread count. The first exception thrown by a replicate is rethrown.
template <typename Row>
std::vector<Row> run_replications(std::size_t reps, unsigned threads,
                                  const std::function<Row(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(reps, 1)));
  std::vector<std::optional<Row>> slots(reps);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < reps && !failed; r = next++) {
      try {
        slots[r] = body(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<Row> out;
  out.reserve(reps);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct StudyOptions {
  std::size_t replications = 200;
  unsigned threads = 0;
  double alpha = 0.05;
};

// Parameter recovery for one treatment type.

struct RecoveryRow {
  std::size_t replicate = 0;
  double beta1 = 0.0, se1 = 0.0;
  double beta2 = 0.0, se2 = 0.0;
};

struct RecoverySummary {
  std::size_t replications = 0;
  double true_beta1 = 0.0, true_beta2 = 0.0;
  double mean_beta1 = 0.0, mean_beta2 = 0.0;
  double sd_beta1 = 0.0, sd_beta2 = 0.0;  // across replicates
  double mean_se1 = 0.0, mean_se2 = 0.0;  // average reported standard error
  /// |mean estimate - truth| / mean reported SE.
  double bias1_in_se = 0.0, bias2_in_se = 0.0;
  /// Share of 95% intervals containing the truth.
  double coverage1 = 0.0, coverage2 = 0.0;
};

struct RecoveryStudy {
  std::vector<RecoveryRow> rows;
  RecoverySummary summary;
};

/// Simulates the panel per replicate, fits the interaction model and
/// compares (beta1, beta2) of `type` with the truth.
RecoveryStudy recovery_study(const synth::PanelConfig& config, const synth::TrueParameters& truth,
                             const std::string& type, const StudyOptions& options);

// Size of a diagnostic test under a null data-generating process.

enum class Diagnostic { reset, placebo, event_study };
Diagnostic parse_diagnostic(const std::string& name);
std::string diagnostic_name(Diagnostic d);

struct RejectionRow {
  std::size_t replicate = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

struct RejectionSummary {
  std::string test;
  std::size_t replications = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double alpha = 0.05;
};

struct RejectionStudy {
  std::vector<RejectionRow> rows;
  RejectionSummary summary;
};

/// reset: RESET on the interaction model (chi-squared reference). placebo: the
/// treated x relative-years interaction (normal reference). event_study:
/// the joint pre-period test.
RejectionStudy size_study(Diagnostic test, const synth::PanelConfig& config,
                          const synth::TrueParameters& truth, const StudyOptions& options);

// Structural-to-reduced-form consistency: treatment effects generated by the
// equilibrium model under a price floor.

struct ConsistencySpec {
  equilibrium::MarketPrimitives base;
  equilibrium::BroadbandLink link{0.2};
  /// The floor rho is this multiple of the unregulated telehealth unit
  /// revenue at broadband 0.
  double floor_markup = 1.2;
  std::string type = "price_floor";
  synth::PanelConfig panel;  // broadband.levels gives the B grid
  equilibrium::SolverOptions solver;
};

/// Log output effect ln(Y_floor / Y_unreg) at broadband level b.
double equilibrium_log_effect(const ConsistencySpec& spec, double b);

/// Index hook adding equilibrium_log_effect(B) to treated post rows of the
/// configured type. Effects are computed once per distinct broadband level.
synth::IndexHook equilibrium_hook(const ConsistencySpec& spec);

struct ConsistencyRow {
  std::size_t replicate = 0;
  double beta1 = 0.0, beta2 = 0.0;
  std::vector<double> att;  // fitted ATT per level
  bool increasing = false;
  bool positive_from_one = false;
  bool pass = false;
};

struct ConsistencySummary {
  std::size_t replications = 0;
  std::vector<double> levels;
  std::vector<double> true_log_effects;
  std::size_t passes = 0;
  double pass_rate = 0.0;
};

struct ConsistencyStudy {
  std::vector<ConsistencyRow> rows;
  ConsistencySummary summary;
};

/// ConfigError when the market parameters do not give ε_T > ε_I at every
/// level or the panel has no broadband levels.
ConsistencyStudy consistency_study(const ConsistencySpec& spec, const StudyOptions& options);

void write_recovery_csv(std::ostream& out, const std::vector<RecoveryRow>& rows);
void write_rejection_csv(std::ostream& out, const std::vector<RejectionRow>& rows);
void write_consistency_csv(std::ostream& out, const ConsistencySummary& summary,
                           const std::vector<ConsistencyRow>& rows);

}  // namespace tpreg::pipeline
