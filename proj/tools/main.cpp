#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bivamp/experiments.hpp"
#include "bivamp/state_evolution.hpp"
#include "config_file.hpp"

namespace fs = std::filesystem;

namespace bivamp::cli {
namespace {

// Flags shared by the experiment subcommands.
struct CommonFlags {
  std::string preset;
  std::string config_path;
  std::vector<std::string> snr;
  std::vector<std::string> ranks;
  std::optional<int> n_trials;
  std::vector<std::string> solvers;
  bool se_overlay = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out = "results";
  bool paper_scale = false;
  std::vector<std::string> sets;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--preset", f.preset, "Experiment preset")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_option("--config", f.config_path, "Flat TOML configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--snr", f.snr, "SNR grid in dB")->delimiter(',');
  cmd->add_option("--ranks", f.ranks, "Rank grid")->delimiter(',');
  cmd->add_option("--n-trials", f.n_trials, "Monte-Carlo trials per grid point");
  cmd->add_option("--solvers", f.solvers, "bigvamp, bivamp, baseline_amp")->delimiter(',');
  cmd->add_flag("--se-overlay", f.se_overlay, "Attach state-evolution predictions");
  cmd->add_option("--seed", f.seed, "Base seed; trial t uses seed + t");
  cmd->add_option("--jobs", f.jobs, "Concurrent trials");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_flag("--paper-scale", f.paper_scale, "Use the full problem sizes");
  cmd->add_option("--set", f.sets, "Any configuration key as key=value (repeatable)");
}

std::vector<Setting> cli_settings(const CommonFlags& f) {
  std::vector<Setting> s;
  if (!f.preset.empty()) s.push_back({"preset", {f.preset}});
  if (f.paper_scale) s.push_back({"paper_scale", {"true"}});
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("config error: --set expects key=value, got '" + kv + "'");
    }
    s.push_back({kv.substr(0, eq), {kv.substr(eq + 1)}});
  }
  if (!f.snr.empty()) s.push_back({"snr_grid", f.snr});
  if (!f.ranks.empty()) s.push_back({"rank_grid", f.ranks});
  if (f.n_trials) s.push_back({"n_trials", {std::to_string(*f.n_trials)}});
  if (!f.solvers.empty()) s.push_back({"solvers", f.solvers});
  if (f.se_overlay) s.push_back({"se_overlay", {"true"}});
  if (f.seed) s.push_back({"seed", {std::to_string(*f.seed)}});
  if (f.jobs) s.push_back({"jobs", {std::to_string(*f.jobs)}});
  return s;
}

ExperimentConfig load(const CommonFlags& f) {
  const std::vector<Setting> file =
      f.config_path.empty() ? std::vector<Setting>{} : read_config_file(f.config_path);
  ExperimentConfig config = resolve_config(file, cli_settings(f));
  config.output_path = f.out;
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("io error: cannot open '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("io error: cannot write '" + path.string() + "'");
}

fs::path prepare_out(const ExperimentConfig& config) {
  const fs::path dir(config.output_path);
  fs::create_directories(dir);
  write_text(dir / "resolved_config.toml", echo_config(config));
  return dir;
}

void print_rows(const std::vector<SweepRow>& rows) {
  std::printf("%-14s %8s %5s %14s %12s %12s %9s %6s\n", "solver", "snr_db", "rank",
              "nrmse_mean", "nrmse_std", "se_nrmse", "mean_it", "fails");
  for (const SweepRow& r : rows) {
    char se[32] = "-";
    if (r.has_se) std::snprintf(se, sizeof(se), "%.5g", r.se_nrmse);
    std::printf("%-14s %8g %5d %14.6g %12.4g %12s %9.1f %3d/%d\n", r.solver.c_str(), r.snr_db,
                r.rank, r.nrmse_mean, r.nrmse_std, se, r.mean_iterations, r.failure_count,
                r.trial_count);
  }
}

void finish_sweep(const ExperimentConfig& config, const std::vector<SweepRow>& rows,
                  const std::vector<TrialRecord>& trials) {
  const fs::path dir = prepare_out(config);
  write_csv(rows, (dir / "results.csv").string());
  write_text(dir / "run_log.csv", format_trial_log(trials));
  print_rows(rows);
  std::printf("wrote %s\n", (dir / "results.csv").string().c_str());
}

int cmd_sweep(const CommonFlags& f) {
  const ExperimentConfig config = load(f);
  std::vector<TrialRecord> trials;
  const std::vector<SweepRow> rows = run_snr_sweep(config, &trials);
  finish_sweep(config, rows, trials);
  return 0;
}

int cmd_compare(const CommonFlags& f) {
  ExperimentConfig config = load(f);
  if (f.solvers.empty()) {
    const bool full_mask = config.channel.kind == ChannelSpec::Kind::kAwgn;
    const bool gaussian = config.prior_u.kind == PriorSpec::Kind::kGaussian &&
                          config.prior_v.kind == PriorSpec::Kind::kGaussian;
    config.solvers = {SolverKind::kBigVamp};
    if (full_mask) config.solvers.push_back(SolverKind::kBiVamp);
    if (full_mask && gaussian) config.solvers.push_back(SolverKind::kBaselineAmp);
  }
  std::vector<TrialRecord> trials;
  const std::vector<SweepRow> rows = run_snr_sweep(config, &trials);
  finish_sweep(config, rows, trials);
  return 0;
}

int cmd_phase(const CommonFlags& f) {
  const ExperimentConfig config = load(f);
  std::vector<TrialRecord> trials;
  const std::vector<SweepRow> rows = run_phase_grid(config, &trials);
  finish_sweep(config, rows, trials);
  return 0;
}

int cmd_se(const CommonFlags& f) {
  const ExperimentConfig config = load(f);
  const fs::path dir = prepare_out(config);
  std::ostringstream csv;
  csv.precision(17);
  csv << "mode,snr_db,rank,iteration,gamma_u_post_plus,gamma_v_post_plus,"
         "gamma_z_post_plus,predicted_nrmse\n";
  const std::vector<int> ranks =
      config.rank_grid.empty() || f.ranks.empty() ? std::vector<int>{config.dims.rank}
                                                  : config.rank_grid;
  std::map<SeMode, bool> modes;
  for (SolverKind s : config.solvers) modes[s == SolverKind::kBigVamp ? SeMode::kBigVamp
                                                                     : SeMode::kBiVamp] = true;
  std::printf("%-7s %8s %5s %6s %10s %14s\n", "mode", "snr_db", "rank", "iters", "converged",
              "predicted");
  for (const auto& [mode, unused] : modes) {
    const char* name = mode == SeMode::kBigVamp ? "bigvamp" : "bivamp";
    for (int rank : ranks) {
      const ProblemDims dims = ProblemDims::make(config.dims.n, config.dims.m, rank);
      for (double snr : config.snr_grid_db) {
        const SEParams params =
            make_se_params(dims, config.prior_u, config.prior_v, config.channel, snr);
        SEOptions options = config.se;
        options.bilmmse_form = config.run.bilmmse_form;
        const SETrajectory traj = run_se(params, mode, options);
        double last = 0.0;
        for (std::size_t t = 0; t < traj.states.size(); ++t) {
          const SEState& s = traj.states[t];
          last = se_predicted_nrmse(s, params, mode);
          csv << name << "," << snr << "," << rank << "," << t + 1 << ","
              << s.gamma_u_post_plus << "," << s.gamma_v_post_plus << ","
              << s.gamma_z_post_plus << "," << last << "\n";
        }
        std::printf("%-7s %8g %5d %6zu %10s %14.6g\n", name, snr, rank, traj.states.size(),
                    traj.converged ? "yes" : "no", last);
      }
    }
  }
  write_text(dir / "se_trajectory.csv", csv.str());
  std::printf("wrote %s\n", (dir / "se_trajectory.csv").string().c_str());
  return 0;
}

// Gnuplot data blocks: one block per (solver, rank), separated by two blank
// lines so that `index` selects a curve.
int cmd_table(const std::string& in, const std::string& out) {
  const std::vector<SweepRow> rows = read_csv(in);
  std::map<std::pair<std::string, int>, std::vector<const SweepRow*>> blocks;
  for (const SweepRow& r : rows) blocks[{r.solver, r.rank}].push_back(&r);
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const auto& [key, members] : blocks) {
    if (!first) os << "\n\n";
    first = false;
    os << "# solver=" << key.first << " rank=" << key.second << "\n"
       << "# snr_db nrmse_mean nrmse_std se_nrmse\n";
    for (const SweepRow* r : members) {
      os << r->snr_db << " " << r->nrmse_mean << " " << r->nrmse_std << " ";
      if (r->has_se) {
        os << r->se_nrmse;
      } else {
        os << "NaN";
      }
      os << "\n";
    }
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    write_text(out, os.str());
  }
  return 0;
}

}  // namespace
}  // namespace bivamp::cli

int main(int argc, char** argv) {
  using namespace bivamp::cli;
  CLI::App app{"Bilinear VAMP experiment harness"};
  app.require_subcommand(1);

  CommonFlags sweep_f, compare_f, phase_f, se_f;
  CLI::App* sweep = app.add_subcommand("sweep", "SNR sweep for the configured solvers");
  CLI::App* compare = app.add_subcommand("compare", "SNR sweep over all applicable solvers");
  CLI::App* phase = app.add_subcommand("phase", "SNR x rank grid for BiG-VAMP");
  CLI::App* se = app.add_subcommand("se", "State-evolution trajectories only");
  add_common_flags(sweep, sweep_f);
  add_common_flags(compare, compare_f);
  add_common_flags(phase, phase_f);
  add_common_flags(se, se_f);

  std::string table_in;
  std::string table_out;
  CLI::App* table = app.add_subcommand("table", "Gnuplot column layout of a results CSV");
  table->add_option("input", table_in, "results.csv")->required()->check(CLI::ExistingFile);
  table->add_option("-o,--output", table_out, "Output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sweep->parsed()) return cmd_sweep(sweep_f);
    if (compare->parsed()) return cmd_compare(compare_f);
    if (phase->parsed()) return cmd_phase(phase_f);
    if (se->parsed()) return cmd_se(se_f);
    if (table->parsed()) return cmd_table(table_in, table_out);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
