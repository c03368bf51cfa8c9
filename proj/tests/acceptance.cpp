// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Usage:
//   bivamp_acceptance <path-to-bivamp_cli> [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "bivamp/denoisers.hpp"
#include "bivamp/experiments.hpp"
#include "bivamp/messages.hpp"
#include "bivamp/rng.hpp"
#include "bivamp/state_evolution.hpp"

namespace fs = std::filesystem;

namespace bivamp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Five-point central difference.
double derivative(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

Outcome criterion1() {
  const std::vector<PriorSpec> priors = {PriorSpec::gaussian(0.0, 1.0), PriorSpec::binary(),
                                         PriorSpec::bernoulli_gaussian(0.05, 1.0)};
  const std::vector<ChannelSpec> channels = {ChannelSpec::awgn(4.0),
                                             ChannelSpec::selection(0.2, 4.0)};
  Engine eng = make_engine(101, Stream::kSolverInit);
  boost::random::uniform_real_distribution<double> ur(-4.0, 4.0);
  boost::random::uniform_real_distribution<double> ut(-2.0, 1.0);
  boost::random::uniform_01<double> u01;
  double worst = 0.0;
  int points = 0;
  for (const PriorSpec& p : priors) {
    for (const ChannelSpec& ch : channels) {
      for (int i = 0; i < 1000; ++i) {
        const double r = ur(eng);
        const double tau = std::pow(10.0, ut(eng));
        const double h = 1e-3 * std::sqrt(tau);
        const double fd_prior =
            derivative([&](double x) { return denoise_prior(p, x, tau).mean; }, r, h);
        worst = std::max(worst, rel_err(denoise_prior(p, r, tau).divergence, fd_prior));
        const double y = ur(eng);
        const bool observed =
            ch.kind == ChannelSpec::Kind::kAwgn || u01(eng) < ch.selection_rate;
        const double fd_out = derivative(
            [&](double x) { return denoise_output(ch, y, observed, x, tau).mean; }, r, h);
        worst = std::max(worst,
                         rel_err(denoise_output(ch, y, observed, r, tau).divergence, fd_out));
        ++points;
      }
    }
  }
  return {worst <= 1e-5, std::to_string(points) + " points per denoiser, max relative error " +
                             fmt("%.3g", worst)};
}

Outcome criterion2() {
  const int r = 500;
  const int draws = 10;
  double worst = 0.0;
  for (double z : {0.2, 0.5, 1.0}) {
    const int n = static_cast<int>(std::lround(r / z));
    std::vector<Eigen::VectorXd> spectra;
    for (int d = 0; d < draws; ++d) {
      Engine eng = make_engine(200 + d, Stream::kSolverInit, static_cast<std::uint64_t>(n));
      boost::random::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(n));
      Mat h(n, r);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < r; ++k) h(i, k) = normal(eng);
      }
      const Mat g = h.transpose() * h;
      spectra.push_back(Eigen::SelfAdjointEigenSolver<Mat>(g, Eigen::EigenvaluesOnly)
                            .eigenvalues());
    }
    for (double x : {0.1, 1.0, 10.0}) {
      double mc = 0.0;
      for (const Eigen::VectorXd& lam : spectra) {
        mc += (1.0 / (1.0 + x * lam.array())).sum() / r;
      }
      mc /= draws;
      const double closed = 1.0 - f_rmt(x, z) / (4.0 * z * x);
      worst = std::max(worst, std::abs(mc - closed) / closed);
    }
  }
  return {worst <= 0.01, "9 grid points, max relative deviation " + fmt("%.3g", worst)};
}

Outcome criterion3() {
  Engine eng = make_engine(301, Stream::kSolverInit);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  boost::random::uniform_real_distribution<double> up(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Mat a(3, 2), b(3, 2);
    for (int k = 0; k < 6; ++k) {
      a(k / 2, k % 2) = normal(eng);
      b(k / 2, k % 2) = normal(eng);
    }
    const double pa = std::pow(10.0, up(eng));
    const double pb = std::pow(10.0, up(eng));
    const Extrinsic post = gaussian_combine(a, pa, b, pb);
    const Extrinsic back_a = extrinsic_subtract(post.mean, post.precision, b, pb, 0.0);
    const Extrinsic back_b = extrinsic_subtract(post.mean, post.precision, a, pa, 0.0);
    worst = std::max({worst, (back_a.mean - a).norm() / a.norm(),
                      (back_b.mean - b).norm() / b.norm(), std::abs(back_a.precision - pa) / pa,
                      std::abs(back_b.precision - pb) / pb});
  }
  return {worst <= 1e-12, "10000 pairs, max relative error " + fmt("%.3g", worst)};
}

Outcome criterion4() {
  int runs = 0;
  int converged = 0;
  double worst = 0.0;
  double slowest = 0.0;
  for (const std::string& name : preset_names()) {
    const ExperimentConfig c = preset_config(name);
    for (double snr : {0.0, 10.0, 20.0, 30.0, 40.0}) {
      for (SeMode mode : {SeMode::kBiVamp, SeMode::kBigVamp}) {
        if (mode == SeMode::kBiVamp && c.channel.kind == ChannelSpec::Kind::kSelection) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const SEParams p = make_se_params(c.dims, c.prior_u, c.prior_v, c.channel, snr);
        const SETrajectory t = run_se(p, mode, c.se);
        slowest = std::max(slowest, std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - t0).count());
        ++runs;
        if (!t.converged) continue;
        ++converged;
        const SEState& s = t.states.back();
        worst = std::max(worst, std::abs(s.gamma_u_post_plus - s.gamma_u_post_minus) /
                                    s.gamma_u_post_plus);
        worst = std::max(worst, std::abs(s.gamma_v_post_plus - s.gamma_v_post_minus) /
                                    s.gamma_v_post_plus);
        if (mode == SeMode::kBigVamp) {
          worst = std::max(worst, std::abs(s.gamma_z_post_plus - s.gamma_z_post_minus) /
                                      s.gamma_z_post_plus);
        }
      }
    }
  }
  return {converged > 0 && worst <= 1e-6 && slowest < 1.0,
          std::to_string(converged) + "/" + std::to_string(runs) +
              " runs converged, max identity gap " + fmt("%.3g", worst) + ", slowest run " +
              fmt("%.3f", slowest) + " s"};
}

Outcome criterion5() {
  ExperimentConfig c = preset_config("dictionary_learning_binary_large");
  c.dims = ProblemDims{400, 400, 20};
  c.snr_grid_db = {10.0, 20.0, 30.0};
  c.n_trials = 10;
  c.se_overlay = true;
  c.solvers = {SolverKind::kBigVamp};
  const std::vector<SweepRow> rows = run_snr_sweep(c);
  bool pass = rows.size() == 3;
  std::string detail;
  for (const SweepRow& r : rows) {
    const double dev = std::abs(r.nrmse_mean - r.se_nrmse) / r.se_nrmse;
    pass = pass && r.has_se && dev <= 0.15;
    detail += fmt("%g dB: ", r.snr_db) + fmt("%.4g", r.nrmse_mean) + " vs SE " +
              fmt("%.4g", r.se_nrmse) + " (" + fmt("%.1f", 100 * dev) + "%); ";
  }
  return {pass, detail};
}

Outcome criterion6() {
  ExperimentConfig c = preset_config("custom");
  c.dims = ProblemDims{200, 100, 10};
  c.prior_u = PriorSpec::gaussian(0.0, 1.0);
  c.prior_v = PriorSpec::gaussian(0.0, 1.0);
  c.snr_grid_db = {30.0};
  c.n_trials = 10;
  c.solvers = {SolverKind::kBiVamp, SolverKind::kBaselineAmp};
  const std::vector<SweepRow> rows = run_snr_sweep(c);
  if (rows.size() != 2) return {false, "unexpected row count"};
  const double a = rows[0].nrmse_mean;
  const double b = rows[1].nrmse_mean;
  const double dev = std::abs(a - b) / std::min(a, b);
  return {dev <= 0.05 && rows[0].failure_count == 0 && rows[1].failure_count == 0,
          rows[0].solver + " " + fmt("%.5g", a) + ", " + rows[1].solver + " " + fmt("%.5g", b) +
              ", relative gap " + fmt("%.2f", 100 * dev) + "%"};
}

Outcome criterion7() {
  ExperimentConfig c = preset_config("matrix_completion");
  c.dims = ProblemDims{300, 150, 5};
  c.snr_grid_db = {30.0};
  c.n_trials = 10;
  c.se_overlay = true;
  c.solvers = {SolverKind::kBigVamp};
  std::vector<TrialRecord> trials;
  const std::vector<SweepRow> rows = run_snr_sweep(c, &trials);
  if (rows.size() != 1) return {false, "unexpected row count"};
  const SweepRow& r = rows[0];
  const int converged = static_cast<int>(std::count_if(
      trials.begin(), trials.end(),
      [](const TrialRecord& t) { return t.termination == Termination::kConverged; }));
  const double dev = std::abs(r.nrmse_mean - r.se_nrmse) / r.se_nrmse;
  return {r.nrmse_mean <= 0.1 && dev <= 0.2 && converged >= 9,
          "mean " + fmt("%.4g", r.nrmse_mean) + " vs SE " + fmt("%.4g", r.se_nrmse) + " (" +
              fmt("%.1f", 100 * dev) + "%), " + std::to_string(converged) +
              "/10 converged"};
}

Outcome criterion8() {
  bool pass = true;
  std::string detail;
  for (const std::string& name : preset_names()) {
    ExperimentConfig c = preset_config(name);
    c.snr_grid_db = {0.0, 10.0, 20.0, 30.0, 40.0};
    c.n_trials = 10;
    c.solvers = {SolverKind::kBigVamp};
    const std::vector<SweepRow> rows = run_snr_sweep(c);
    bool mono = rows.size() == 5;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      mono = mono && rows[i].nrmse_mean <= rows[i - 1].nrmse_mean;
    }
    pass = pass && mono;
    detail += name + (mono ? " ok" : " NOT monotone") + "; ";
  }
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome criterion9(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "bivamp_acceptance_c9";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string base = "\"" + cli + "\" sweep --preset matrix_factorization --snr 10,30 " +
                           "--n-trials 2 --seed 7 --se-overlay";
  auto run = [&](const std::string& args, const std::string& dir) {
    const std::string cmd = args + " --out \"" + (root / dir).string() + "\" > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  if (!run(base, "a") || !run(base, "b")) return {false, "cli invocation failed"};
  const std::string a = slurp(root / "a" / "results.csv");
  const std::string b = slurp(root / "b" / "results.csv");
  const std::string echo = (root / "a" / "resolved_config.toml").string();
  if (!run("\"" + cli + "\" sweep --config \"" + echo + "\"", "c")) {
    return {false, "re-run from echo failed"};
  }
  const std::string c = slurp(root / "c" / "results.csv");
  const bool same = !a.empty() && a == b;
  const bool echoed = a == c;
  fs::remove_all(root);
  return {same && echoed, std::string("repeat ") + (same ? "identical" : "DIFFERS") +
                              ", echo re-run " + (echoed ? "identical" : "DIFFERS") + " (" +
                              std::to_string(a.size()) + " bytes)"};
}

Outcome criterion10() {
  ExperimentConfig c = preset_config("matrix_completion");
  c.dims = ProblemDims{300, 150, 5};
  c.snr_grid_db = {0.0, 10.0, 20.0, 30.0};
  c.rank_grid = {1, 2, 5, 10, 20};
  c.n_trials = 3;
  const std::vector<SweepRow> rows = run_phase_grid(c);
  if (rows.size() != 20) return {false, "expected 20 cells"};
  double worst = 0.0;
  for (const SweepRow& r : rows) {
    worst = std::max(worst, static_cast<double>(r.failure_count) / r.trial_count);
  }
  const SweepRow& easy = rows[15];  // 30 dB, rank 1
  const SweepRow& hard = rows[4];   // 0 dB, rank 20
  const bool ordered = easy.nrmse_mean < hard.nrmse_mean;
  return {worst <= 0.2 && ordered,
          "max failure ratio " + fmt("%.2f", worst) + ", nrmse(30 dB, r=1) " +
              fmt("%.4g", easy.nrmse_mean) + " vs nrmse(0 dB, r=20) " +
              fmt("%.4g", hard.nrmse_mean)};
}

}  // namespace
}  // namespace bivamp

int main(int argc, char** argv) {
  using namespace bivamp;
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <bivamp_cli> [criterion ...]\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  struct Criterion {
    int id;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, 5, criterion1},
      {2, 60, criterion2},
      {3, 1, criterion3},
      {4, 60, criterion4},
      {5, 600, criterion5},
      {6, 120, criterion6},
      {7, 300, criterion7},
      {8, 900, criterion8},
      {9, 60, [&] { return criterion9(cli); }},
      {10, 1200, criterion10},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && only.count(c.id) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %2d: %s  %s [%.1f s, limit %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
