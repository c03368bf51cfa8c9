#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "bivamp/experiments.hpp"
#include "config_file.hpp"

namespace bivamp {
namespace {

TEST(Presets, FullScaleDimensions) {
  const ExperimentConfig dl = preset_config("dictionary_learning", true);
  EXPECT_EQ(dl.dims.n, 1000);
  EXPECT_EQ(dl.dims.m, 1000);
  EXPECT_EQ(dl.dims.rank, 20);
  EXPECT_EQ(dl.prior_u.kind, PriorSpec::Kind::kGaussian);
  EXPECT_EQ(dl.prior_v.kind, PriorSpec::Kind::kBernoulliGaussian);
  EXPECT_DOUBLE_EQ(dl.prior_v.nonzero_prob, 0.05);
  const ExperimentConfig mf = preset_config("matrix_factorization", true);
  EXPECT_EQ(mf.dims.n, 1000);
  EXPECT_EQ(mf.dims.m, 200);
  EXPECT_EQ(mf.dims.rank, 30);
  EXPECT_EQ(mf.prior_u.kind, PriorSpec::Kind::kBinary);
  EXPECT_EQ(mf.prior_v.kind, PriorSpec::Kind::kGaussian);
  const ExperimentConfig mc = preset_config("matrix_completion", true);
  EXPECT_EQ(mc.channel.kind, ChannelSpec::Kind::kSelection);
  EXPECT_DOUBLE_EQ(mc.channel.selection_rate, 0.2);
  EXPECT_EQ(mc.rank_grid.front(), 1);
  EXPECT_EQ(mc.rank_grid.back(), 100);
}

TEST(Presets, AllValidateAndUnknownThrows) {
  for (const std::string& name : preset_names()) {
    EXPECT_NO_THROW(preset_config(name).validate()) << name;
    EXPECT_NO_THROW(preset_config(name, true).validate()) << name;
  }
  EXPECT_THROW(preset_config("nope"), std::invalid_argument);
}

TEST(ApplySetting, OverridesAndRejectsUnknownKeys) {
  ExperimentConfig c = preset_config("matrix_factorization");
  apply_setting(c, "n_trials", {"3"});
  EXPECT_EQ(c.n_trials, 3);
  apply_setting(c, "snr_grid", {"[1, 2.5]"});
  EXPECT_EQ(c.snr_grid_db, (std::vector<double>{1.0, 2.5}));
  apply_setting(c, "prior_v", {"bg(0.1,2)"});
  EXPECT_EQ(c.prior_v.kind, PriorSpec::Kind::kBernoulliGaussian);
  EXPECT_THROW(apply_setting(c, "bogus", {"1"}), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "n_trials", {"abc"}), std::invalid_argument);
}

TEST(Validate, ReportsConflicts) {
  ExperimentConfig c = preset_config("matrix_completion");
  apply_setting(c, "channel", {"awgn"});
  EXPECT_THROW(c.validate(), std::invalid_argument);
  ExperimentConfig d = preset_config("matrix_factorization");
  apply_setting(d, "solvers", {"baseline_amp"});
  EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(EchoConfig, RoundTripsThroughSettings) {
  ExperimentConfig c = preset_config("dictionary_learning_binary_small");
  apply_setting(c, "seed", {"42"});
  apply_setting(c, "xi", {"3e-7"});
  apply_setting(c, "solvers", {"bigvamp,bivamp"});
  const std::string text = echo_config(c);
  const auto path = std::filesystem::temp_directory_path() / "bivamp_echo_test.toml";
  std::ofstream(path) << text;
  const ExperimentConfig back =
      cli::resolve_config(cli::read_config_file(path.string()), {});
  EXPECT_EQ(echo_config(back), text);
  std::filesystem::remove(path);
}

TEST(ResolveConfig, CliOverridesFileOverridesPreset) {
  const std::vector<cli::Setting> file = {{"preset", {"matrix_factorization"}},
                                          {"n_trials", {"7"}},
                                          {"seed", {"5"}}};
  const std::vector<cli::Setting> flags = {{"n_trials", {"3"}}};
  const ExperimentConfig c = cli::resolve_config(file, flags);
  EXPECT_EQ(c.preset, "matrix_factorization");
  EXPECT_EQ(c.n_trials, 3);
  EXPECT_EQ(c.run.seed, 5u);
  EXPECT_EQ(c.dims.n, preset_config("matrix_factorization").dims.n);
}

SweepRow sample_row() {
  SweepRow r;
  r.preset = "custom";
  r.solver = "bigvamp";
  r.snr_db = 12.5;
  r.rank = 3;
  r.trial_count = 4;
  r.nrmse_mean = 0.1234567890123456789;
  r.nrmse_std = 1.0 / 3.0;
  r.se_nrmse = 2.0 / 7.0;
  r.has_se = true;
  r.mean_iterations = 17.25;
  r.failure_count = 1;
  r.seed_base = 99;
  return r;
}

TEST(Csv, EmptyRowsGiveHeaderOnly) {
  EXPECT_EQ(format_csv({}), csv_header() + "\n");
}

TEST(Csv, RoundTripIsExact) {
  SweepRow a = sample_row();
  SweepRow b = sample_row();
  b.has_se = false;
  b.se_nrmse = 0.0;
  const std::string text = format_csv({a, b});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const std::vector<SweepRow> back = parse_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].nrmse_mean, a.nrmse_mean);
  EXPECT_EQ(back[0].nrmse_std, a.nrmse_std);
  EXPECT_EQ(back[0].se_nrmse, a.se_nrmse);
  EXPECT_FALSE(back[1].has_se);
  EXPECT_EQ(format_csv(back), text);
}

TEST(Csv, WriteReportsPath) {
  EXPECT_THROW(write_csv({}, "/nonexistent_dir/x.csv"), std::runtime_error);
}

TEST(Sweep, PhaseGridCardinalityAndOrder) {
  ExperimentConfig c = preset_config("matrix_completion");
  c.dims = ProblemDims{60, 40, 2};
  c.snr_grid_db = {20.0, 10.0};
  c.rank_grid = {2, 1};
  c.n_trials = 1;
  const std::vector<SweepRow> rows = run_phase_grid(c);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].snr_db, 10.0);
  EXPECT_EQ(rows[0].rank, 1);
  EXPECT_EQ(rows[3].snr_db, 20.0);
  EXPECT_EQ(rows[3].rank, 2);
}

TEST(Sweep, DeterministicAndParallelSafe) {
  ExperimentConfig c = preset_config("custom");
  c.dims = ProblemDims{50, 40, 2};
  c.snr_grid_db = {10.0, 20.0};
  c.n_trials = 3;
  c.solvers = {SolverKind::kBiVamp, SolverKind::kBigVamp};
  const std::string a = format_csv(run_snr_sweep(c));
  c.jobs = 3;
  const std::string b = format_csv(run_snr_sweep(c));
  EXPECT_EQ(a, b);
  const std::vector<SweepRow> rows = parse_csv(a);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].solver, "bigvamp");
  EXPECT_LT(rows[1].nrmse_mean, rows[0].nrmse_mean);
}

TEST(Sweep, SeOverlayAttached) {
  ExperimentConfig c = preset_config("custom");
  c.dims = ProblemDims{50, 40, 2};
  c.snr_grid_db = {10.0};
  c.n_trials = 1;
  c.se_overlay = true;
  const std::vector<SweepRow> rows = run_snr_sweep(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].has_se);
  EXPECT_GT(rows[0].se_nrmse, 0.0);
}

}  // namespace
}  // namespace bivamp
