#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bivamp/model.hpp"
#include "bivamp/solver.hpp"
#include "bivamp/state_evolution.hpp"

namespace bivamp {

enum class SolverKind { kBigVamp, kBiVamp, kBaselineAmp };

std::string to_string(SolverKind s);
SolverKind parse_solver(const std::string& name);

struct ExperimentConfig {
  std::string preset = "custom";
  bool paper_scale = false;
  ProblemDims dims;
  PriorSpec prior_u;
  PriorSpec prior_v;
  ChannelSpec channel;
  SnrMode snr_mode = SnrMode::kRealized;
  std::vector<double> snr_grid_db{0.0, 10.0, 20.0, 30.0, 40.0};
  std::vector<int> rank_grid;
  int n_trials = 10;
  RunConfig run;
  std::vector<SolverKind> solvers{SolverKind::kBigVamp};
  bool se_overlay = false;
  SEOptions se;
  int jobs = 1;
  std::string output_path;

  // Throws std::invalid_argument listing the first violated constraint.
  void validate() const;
};

// Names accepted by preset_config.
std::vector<std::string> preset_names();

// Defaults of a named experiment family. Desk scale unless paper_scale.
ExperimentConfig preset_config(const std::string& name, bool paper_scale = false);

// Applies one `key = value` setting. Lists carry several values. Throws
// std::invalid_argument on unknown keys or malformed values.
void apply_setting(ExperimentConfig& config, const std::string& key,
                   const std::vector<std::string>& values);

// Resolved configuration as flat TOML. Feeding it back through apply_setting
// on top of preset_config(preset, paper_scale) reproduces the configuration.
std::string echo_config(const ExperimentConfig& config);

// Parses "gaussian(mean,var)", "bg(prob,var)" or "binary".
PriorSpec parse_prior(const std::string& text);

struct SweepRow {
  std::string preset;
  std::string solver;
  double snr_db = 0.0;
  int rank = 0;
  int trial_count = 0;
  double nrmse_mean = 0.0;
  double nrmse_std = 0.0;
  double se_nrmse = 0.0;
  bool has_se = false;
  double mean_iterations = 0.0;
  int failure_count = 0;
  std::uint64_t seed_base = 0;
};

struct TrialRecord {
  std::string solver;
  double snr_db = 0.0;
  int rank = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double nrmse = 0.0;
  int iterations = 0;
  int attempts = 0;
  Termination termination = Termination::kIterationCap;
  std::string message;
};

// One row per (solver, snr), sorted by solver name then snr. Failed trials
// (numerical failure or a thrown error) are counted and left out of the
// NRMSE statistics.
std::vector<SweepRow> run_snr_sweep(const ExperimentConfig& config,
                                    std::vector<TrialRecord>* trials = nullptr);

// One BiG-VAMP row per (snr, rank), sorted by snr then rank.
std::vector<SweepRow> run_phase_grid(const ExperimentConfig& config,
                                     std::vector<TrialRecord>* trials = nullptr);

// SE prediction for one grid point of the configuration.
double se_overlay_nrmse(const ExperimentConfig& config, SolverKind solver, double snr_db,
                        int rank);

std::string csv_header();
std::string format_csv(const std::vector<SweepRow>& rows);
void write_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> parse_csv(const std::string& text);
std::vector<SweepRow> read_csv(const std::string& path);

std::string format_trial_log(const std::vector<TrialRecord>& trials);

}  // namespace bivamp
