#include "bivamp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bivamp {

namespace {

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"'");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n\"'");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(trim(v), &pos);
    if (pos != trim(v).size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config error: " + key + " expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) {
    throw std::invalid_argument("config error: " + key + " expects an integer, got '" + v + "'");
  }
  return static_cast<long long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "on") return true;
  if (t == "false" || t == "0" || t == "off") return false;
  throw std::invalid_argument("config error: " + key + " expects true/false, got '" + v + "'");
}

const std::string& single(const std::string& key, const std::vector<std::string>& values) {
  if (values.size() != 1) {
    throw std::invalid_argument("config error: " + key + " expects one value");
  }
  return values.front();
}

// Splits "a,b , c" (also accepts a single bracketed TOML list string).
std::vector<std::string> split_list(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const std::string& raw : values) {
    std::string s = raw;
    s.erase(std::remove(s.begin(), s.end(), '['), s.end());
    s.erase(std::remove(s.begin(), s.end(), ']'), s.end());
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

std::string prior_text(const PriorSpec& p) { return p.describe(); }

std::string join_doubles(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt17(v[i]);
  return s + "]";
}

std::string join_ints(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

// Runs task(i) for i in [0, count) on up to `jobs` threads. Each index writes
// only its own slot, so results do not depend on scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct Cell {
  SolverKind solver;
  double snr_db;
  int rank;
};

TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, int trial) {
  TrialRecord rec;
  rec.solver = to_string(cell.solver);
  rec.snr_db = cell.snr_db;
  rec.rank = cell.rank;
  rec.trial = trial;
  rec.seed = config.run.seed + static_cast<std::uint64_t>(trial);
  try {
    ProblemDims dims = ProblemDims::make(config.dims.n, config.dims.m, cell.rank);
    const Instance inst = generate_instance(dims, config.prior_u, config.prior_v,
                                            config.channel, cell.snr_db, rec.seed,
                                            config.snr_mode);
    RunConfig rc = config.run;
    rc.seed = rec.seed;
    const Observation obs = observe(inst);
    RunResult res;
    switch (cell.solver) {
      case SolverKind::kBigVamp:
        res = run_bigvamp(obs, config.prior_u, config.prior_v, rc);
        break;
      case SolverKind::kBiVamp:
        res = run_bivamp(obs, config.prior_u, config.prior_v, rc);
        break;
      case SolverKind::kBaselineAmp:
        res = run_baseline_amp(obs, config.prior_u, config.prior_v, rc);
        break;
    }
    rec.nrmse = nrmse(res.z_hat, inst.z_true);
    rec.iterations = res.iterations_run;
    rec.attempts = res.attempts;
    rec.termination = res.termination;
    rec.message = res.failure_message;
  } catch (const std::exception& e) {
    rec.termination = Termination::kNumericalFailure;
    rec.nrmse = std::numeric_limits<double>::quiet_NaN();
    rec.message = e.what();
  }
  return rec;
}

bool failed(const TrialRecord& t) {
  return t.termination == Termination::kNumericalFailure || !std::isfinite(t.nrmse);
}

std::vector<SweepRow> run_cells(const ExperimentConfig& config, const std::vector<Cell>& cells,
                                std::vector<TrialRecord>* trials) {
  config.validate();
  const int per = config.n_trials;
  const int total = static_cast<int>(cells.size()) * per;
  std::vector<TrialRecord> records(total);
  parallel_for(total, config.jobs, [&](int i) {
    records[i] = run_trial(config, cells[i / per], i % per);
  });

  std::vector<SweepRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepRow row;
    row.preset = config.preset;
    row.solver = to_string(cells[c].solver);
    row.snr_db = cells[c].snr_db;
    row.rank = cells[c].rank;
    row.trial_count = per;
    row.seed_base = config.run.seed;
    double sum = 0.0;
    double iters = 0.0;
    int ok = 0;
    for (int t = 0; t < per; ++t) {
      const TrialRecord& r = records[c * per + t];
      iters += r.iterations;
      if (failed(r)) {
        ++row.failure_count;
      } else {
        sum += r.nrmse;
        ++ok;
      }
    }
    row.mean_iterations = iters / per;
    row.nrmse_mean = ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (int t = 0; t < per; ++t) {
      const TrialRecord& r = records[c * per + t];
      if (!failed(r)) ss += (r.nrmse - row.nrmse_mean) * (r.nrmse - row.nrmse_mean);
    }
    row.nrmse_std = ok > 1 ? std::sqrt(ss / (ok - 1)) : 0.0;
    if (config.se_overlay) {
      row.has_se = true;
      try {
        row.se_nrmse = se_overlay_nrmse(config, cells[c].solver, cells[c].snr_db, cells[c].rank);
      } catch (const std::exception&) {
        row.se_nrmse = std::numeric_limits<double>::quiet_NaN();
      }
    }
    rows.push_back(row);
  }
  if (trials != nullptr) *trials = std::move(records);
  return rows;
}

}  // namespace

std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::kBigVamp:
      return "bigvamp";
    case SolverKind::kBiVamp:
      return "bivamp";
    case SolverKind::kBaselineAmp:
      return "baseline_amp";
  }
  return "unknown";
}

SolverKind parse_solver(const std::string& name) {
  const std::string t = trim(name);
  if (t == "bigvamp") return SolverKind::kBigVamp;
  if (t == "bivamp") return SolverKind::kBiVamp;
  if (t == "baseline_amp") return SolverKind::kBaselineAmp;
  throw std::invalid_argument("config error: unknown solver '" + name + "'");
}

PriorSpec parse_prior(const std::string& text) {
  std::string t = trim(text);
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  if (t == "binary") return PriorSpec::binary();
  const auto open = t.find('(');
  const auto close = t.rfind(')');
  if (open == std::string::npos || close != t.size() - 1) {
    throw std::invalid_argument("config error: cannot parse prior '" + text + "'");
  }
  const std::string name = t.substr(0, open);
  const std::vector<std::string> args = split_list({t.substr(open + 1, close - open - 1)});
  if (args.size() != 2) {
    throw std::invalid_argument("config error: prior '" + text + "' needs two parameters");
  }
  const double a = to_double("prior", args[0]);
  const double b = to_double("prior", args[1]);
  if (name == "gaussian") return PriorSpec::gaussian(a, b);
  if (name == "bg") return PriorSpec::bernoulli_gaussian(a, b);
  throw std::invalid_argument("config error: unknown prior '" + name + "'");
}

void ExperimentConfig::validate() const {
  ProblemDims::make(dims.n, dims.m, dims.rank);
  prior_u.validate();
  prior_v.validate();
  channel.validate();
  run.validate();
  if (n_trials < 1) throw std::invalid_argument("config error: n_trials must be >= 1");
  if (snr_grid_db.empty()) throw std::invalid_argument("config error: snr grid is empty");
  if (solvers.empty()) throw std::invalid_argument("config error: no solver selected");
  if (jobs < 1) throw std::invalid_argument("config error: jobs must be >= 1");
  for (int r : rank_grid) {
    ProblemDims::make(dims.n, dims.m, r);
  }
  const bool selection = channel.kind == ChannelSpec::Kind::kSelection;
  if (preset == "matrix_completion" && !selection) {
    throw std::invalid_argument(
        "config error: preset=matrix_completion conflicts with channel=awgn");
  }
  if (preset != "matrix_completion" && preset != "custom" && selection) {
    throw std::invalid_argument("config error: preset=" + preset +
                                " conflicts with channel=selection");
  }
  for (SolverKind s : solvers) {
    if (s != SolverKind::kBigVamp && selection) {
      throw std::invalid_argument("config error: solver " + to_string(s) +
                                  " conflicts with channel=selection");
    }
    if (s == SolverKind::kBaselineAmp && (prior_u.kind != PriorSpec::Kind::kGaussian ||
                                          prior_v.kind != PriorSpec::Kind::kGaussian)) {
      throw std::invalid_argument(
          "config error: solver baseline_amp conflicts with a non-Gaussian prior");
    }
  }
}

std::vector<std::string> preset_names() {
  return {"dictionary_learning", "dictionary_learning_binary_small",
          "dictionary_learning_binary_large", "matrix_factorization", "matrix_completion",
          "custom"};
}

ExperimentConfig preset_config(const std::string& name, bool paper_scale) {
  ExperimentConfig c;
  c.preset = name;
  c.paper_scale = paper_scale;
  c.channel = ChannelSpec::awgn(1.0, true);
  const PriorSpec sparse = PriorSpec::bernoulli_gaussian(0.05, 1.0);
  const PriorSpec gauss = PriorSpec::gaussian(0.0, 1.0);
  if (name == "dictionary_learning") {
    c.dims = paper_scale ? ProblemDims{1000, 1000, 20} : ProblemDims{200, 200, 10};
    c.prior_u = gauss;
    c.prior_v = sparse;
  } else if (name == "dictionary_learning_binary_small") {
    c.dims = ProblemDims{100, 100, 5};
    c.prior_u = PriorSpec::binary();
    c.prior_v = sparse;
  } else if (name == "dictionary_learning_binary_large") {
    c.dims = paper_scale ? ProblemDims{500, 500, 25} : ProblemDims{400, 400, 20};
    c.prior_u = PriorSpec::binary();
    c.prior_v = sparse;
  } else if (name == "matrix_factorization") {
    c.dims = paper_scale ? ProblemDims{1000, 200, 30} : ProblemDims{200, 100, 10};
    c.prior_u = PriorSpec::binary();
    c.prior_v = gauss;
  } else if (name == "matrix_completion") {
    c.dims = paper_scale ? ProblemDims{1000, 500, 30} : ProblemDims{300, 150, 5};
    c.prior_u = PriorSpec::binary();
    c.prior_v = gauss;
    c.channel = ChannelSpec::selection(0.2, 1.0, true);
    c.rank_grid = paper_scale ? std::vector<int>{1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100}
                              : std::vector<int>{1, 2, 5, 10, 20};
  } else if (name == "custom") {
    c.dims = ProblemDims{200, 100, 10};
    c.prior_u = gauss;
    c.prior_v = gauss;
  } else {
    throw std::invalid_argument("config error: unknown preset '" + name + "'");
  }
  if (paper_scale) c.n_trials = 100;
  return c;
}

void apply_setting(ExperimentConfig& c, const std::string& key,
                   const std::vector<std::string>& values) {
  auto one = [&]() -> const std::string& { return single(key, values); };
  if (key == "preset") {
    if (trim(one()) != c.preset) {
      throw std::invalid_argument("config error: preset must be applied through preset_config");
    }
  } else if (key == "paper_scale") {
    if (to_bool(key, one()) != c.paper_scale) {
      throw std::invalid_argument(
          "config error: paper_scale must be applied through preset_config");
    }
  } else if (key == "n") {
    c.dims.n = static_cast<int>(to_int(key, one()));
  } else if (key == "m") {
    c.dims.m = static_cast<int>(to_int(key, one()));
  } else if (key == "rank") {
    c.dims.rank = static_cast<int>(to_int(key, one()));
  } else if (key == "prior_u") {
    c.prior_u = parse_prior(one());
  } else if (key == "prior_v") {
    c.prior_v = parse_prior(one());
  } else if (key == "channel") {
    const std::string v = trim(one());
    if (v == "awgn") {
      c.channel.kind = ChannelSpec::Kind::kAwgn;
      c.channel.selection_rate = 1.0;
    } else if (v == "selection") {
      c.channel.kind = ChannelSpec::Kind::kSelection;
    } else {
      throw std::invalid_argument("config error: unknown channel '" + v + "'");
    }
  } else if (key == "selection_rate") {
    c.channel.selection_rate = to_double(key, one());
  } else if (key == "se_scaling") {
    c.channel.se_scaling = to_bool(key, one());
  } else if (key == "snr_mode") {
    const std::string v = trim(one());
    if (v == "realized") {
      c.snr_mode = SnrMode::kRealized;
    } else if (v == "expected") {
      c.snr_mode = SnrMode::kExpected;
    } else {
      throw std::invalid_argument("config error: unknown snr_mode '" + v + "'");
    }
  } else if (key == "snr_grid") {
    c.snr_grid_db.clear();
    for (const auto& s : split_list(values)) c.snr_grid_db.push_back(to_double(key, s));
  } else if (key == "rank_grid") {
    c.rank_grid.clear();
    for (const auto& s : split_list(values)) {
      c.rank_grid.push_back(static_cast<int>(to_int(key, s)));
    }
  } else if (key == "n_trials") {
    c.n_trials = static_cast<int>(to_int(key, one()));
  } else if (key == "solvers") {
    c.solvers.clear();
    for (const auto& s : split_list(values)) c.solvers.push_back(parse_solver(s));
  } else if (key == "se_overlay") {
    c.se_overlay = to_bool(key, one());
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(to_int(key, one()));
  } else if (key == "seed") {
    c.run.seed = static_cast<std::uint64_t>(to_int(key, one()));
  } else if (key == "t_max") {
    c.run.t_max = static_cast<int>(to_int(key, one()));
  } else if (key == "xi") {
    c.run.xi = to_double(key, one());
  } else if (key == "damping_rho") {
    c.run.damping_rho = to_double(key, one());
  } else if (key == "gamma_min") {
    c.run.gamma_min = to_double(key, one());
  } else if (key == "gamma_max") {
    c.run.gamma_max = to_double(key, one());
  } else if (key == "beta_temp") {
    c.run.beta_temp = to_double(key, one());
  } else if (key == "bilmmse_form") {
    const std::string v = trim(one());
    if (v == "literal") {
      c.run.bilmmse_form = BilmmseForm::kLiteral;
    } else if (v == "noise_inflated") {
      c.run.bilmmse_form = BilmmseForm::kNoiseInflated;
    } else {
      throw std::invalid_argument("config error: unknown bilmmse_form '" + v + "'");
    }
  } else if (key == "z_extrinsic_form") {
    const std::string v = trim(one());
    if (v == "literal") {
      c.run.z_extrinsic_form = ZExtrinsicForm::kLiteral;
    } else if (v == "product") {
      c.run.z_extrinsic_form = ZExtrinsicForm::kProduct;
    } else {
      throw std::invalid_argument("config error: unknown z_extrinsic_form '" + v + "'");
    }
  } else if (key == "z_averaging") {
    const std::string v = trim(one());
    if (v == "arithmetic") {
      c.run.z_averaging = PrecisionAveraging::kArithmetic;
    } else if (v == "harmonic") {
      c.run.z_averaging = PrecisionAveraging::kHarmonic;
    } else {
      throw std::invalid_argument("config error: unknown z_averaging '" + v + "'");
    }
  } else if (key == "hold_on_clip") {
    c.run.hold_on_clip = to_bool(key, one());
  } else if (key == "init") {
    const std::string v = trim(one());
    if (v == "random") {
      c.run.init = InitKind::kRandom;
    } else if (v == "warm_start") {
      c.run.init = InitKind::kWarmStart;
    } else {
      throw std::invalid_argument("config error: unknown init '" + v + "'");
    }
  } else if (key == "init_scale") {
    c.run.init_scale = to_double(key, one());
  } else if (key == "zero_init") {
    c.run.zero_init = to_bool(key, one());
  } else if (key == "init_precision") {
    c.run.init_precision = to_double(key, one());
  } else if (key == "convergence_patience") {
    c.run.convergence_patience = static_cast<int>(to_int(key, one()));
  } else if (key == "max_attempts") {
    c.run.max_attempts = static_cast<int>(to_int(key, one()));
  } else if (key == "restart_residual_ratio") {
    c.run.restart_residual_ratio = to_double(key, one());
  } else if (key == "baseline_printed_onsager") {
    c.run.baseline_printed_onsager = to_bool(key, one());
  } else if (key == "se_t_max") {
    c.se.t_max = static_cast<int>(to_int(key, one()));
  } else if (key == "se_init_ext") {
    c.se.init_ext = to_double(key, one());
  } else if (key == "se_init_post") {
    c.se.init_post = to_double(key, one());
  } else {
    throw std::invalid_argument("config error: unknown key '" + key + "'");
  }
}

std::string echo_config(const ExperimentConfig& c) {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  auto q = [](const std::string& s) { return "\"" + s + "\""; };
  std::vector<std::string> solvers;
  for (SolverKind s : c.solvers) solvers.push_back(q(to_string(s)));
  std::string solver_list = "[";
  for (std::size_t i = 0; i < solvers.size(); ++i) solver_list += (i ? ", " : "") + solvers[i];
  solver_list += "]";
  const auto& r = c.run;
  std::ostringstream os;
  os << "preset = " << q(c.preset) << "\n"
     << "paper_scale = " << b(c.paper_scale) << "\n"
     << "n = " << c.dims.n << "\n"
     << "m = " << c.dims.m << "\n"
     << "rank = " << c.dims.rank << "\n"
     << "prior_u = " << q(prior_text(c.prior_u)) << "\n"
     << "prior_v = " << q(prior_text(c.prior_v)) << "\n"
     << "channel = "
     << q(c.channel.kind == ChannelSpec::Kind::kAwgn ? "awgn" : "selection") << "\n"
     << "selection_rate = " << fmt17(c.channel.selection_rate) << "\n"
     << "se_scaling = " << b(c.channel.se_scaling) << "\n"
     << "snr_mode = " << q(c.snr_mode == SnrMode::kRealized ? "realized" : "expected") << "\n"
     << "snr_grid = " << join_doubles(c.snr_grid_db) << "\n"
     << "rank_grid = " << join_ints(c.rank_grid) << "\n"
     << "n_trials = " << c.n_trials << "\n"
     << "solvers = " << solver_list << "\n"
     << "se_overlay = " << b(c.se_overlay) << "\n"
     << "seed = " << r.seed << "\n"
     << "t_max = " << r.t_max << "\n"
     << "xi = " << fmt17(r.xi) << "\n"
     << "damping_rho = " << fmt17(r.damping_rho) << "\n"
     << "gamma_min = " << fmt17(r.gamma_min) << "\n"
     << "gamma_max = " << fmt17(r.gamma_max) << "\n"
     << "beta_temp = " << fmt17(r.beta_temp) << "\n"
     << "bilmmse_form = "
     << q(r.bilmmse_form == BilmmseForm::kLiteral ? "literal" : "noise_inflated") << "\n"
     << "z_extrinsic_form = "
     << q(r.z_extrinsic_form == ZExtrinsicForm::kLiteral ? "literal" : "product") << "\n"
     << "z_averaging = "
     << q(r.z_averaging == PrecisionAveraging::kArithmetic ? "arithmetic" : "harmonic")
     << "\n"
     << "hold_on_clip = " << b(r.hold_on_clip) << "\n"
     << "init = " << q(r.init == InitKind::kRandom ? "random" : "warm_start") << "\n"
     << "init_scale = " << fmt17(r.init_scale) << "\n"
     << "zero_init = " << b(r.zero_init) << "\n"
     << "init_precision = " << fmt17(r.init_precision) << "\n"
     << "convergence_patience = " << r.convergence_patience << "\n"
     << "max_attempts = " << r.max_attempts << "\n"
     << "restart_residual_ratio = " << fmt17(r.restart_residual_ratio) << "\n"
     << "baseline_printed_onsager = " << b(r.baseline_printed_onsager) << "\n"
     << "se_t_max = " << c.se.t_max << "\n"
     << "se_init_ext = " << fmt17(c.se.init_ext) << "\n"
     << "se_init_post = " << fmt17(c.se.init_post) << "\n";
  return os.str();
}

double se_overlay_nrmse(const ExperimentConfig& config, SolverKind solver, double snr_db,
                        int rank) {
  const ProblemDims dims = ProblemDims::make(config.dims.n, config.dims.m, rank);
  const SEParams params =
      make_se_params(dims, config.prior_u, config.prior_v, config.channel, snr_db);
  const SeMode mode = solver == SolverKind::kBigVamp ? SeMode::kBigVamp : SeMode::kBiVamp;
  SEOptions options = config.se;
  options.bilmmse_form = config.run.bilmmse_form;
  const SETrajectory traj = run_se(params, mode, options);
  if (traj.states.empty()) return std::numeric_limits<double>::quiet_NaN();
  return se_predicted_nrmse(traj.states.back(), params, mode);
}

std::vector<SweepRow> run_snr_sweep(const ExperimentConfig& config,
                                    std::vector<TrialRecord>* trials) {
  std::vector<SolverKind> solvers = config.solvers;
  std::sort(solvers.begin(), solvers.end(),
            [](SolverKind a, SolverKind b) { return to_string(a) < to_string(b); });
  solvers.erase(std::unique(solvers.begin(), solvers.end()), solvers.end());
  std::vector<double> snrs = config.snr_grid_db;
  std::sort(snrs.begin(), snrs.end());
  std::vector<Cell> cells;
  for (SolverKind s : solvers) {
    for (double snr : snrs) cells.push_back({s, snr, config.dims.rank});
  }
  return run_cells(config, cells, trials);
}

std::vector<SweepRow> run_phase_grid(const ExperimentConfig& config,
                                     std::vector<TrialRecord>* trials) {
  if (config.rank_grid.empty()) {
    throw std::invalid_argument("config error: phase grid needs a non-empty rank grid");
  }
  std::vector<double> snrs = config.snr_grid_db;
  std::sort(snrs.begin(), snrs.end());
  std::vector<int> ranks = config.rank_grid;
  std::sort(ranks.begin(), ranks.end());
  std::vector<Cell> cells;
  for (double snr : snrs) {
    for (int r : ranks) cells.push_back({SolverKind::kBigVamp, snr, r});
  }
  return run_cells(config, cells, trials);
}

std::string csv_header() {
  return "preset,solver,snr_db,rank,trial_count,nrmse_mean,nrmse_std,se_nrmse,"
         "mean_iterations,failure_count,seed_base";
}

std::string format_csv(const std::vector<SweepRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const SweepRow& r : rows) {
    out += r.preset + "," + r.solver + "," + fmt17(r.snr_db) + "," + std::to_string(r.rank) +
           "," + std::to_string(r.trial_count) + "," + fmt17(r.nrmse_mean) + "," +
           fmt17(r.nrmse_std) + "," + (r.has_se ? fmt17(r.se_nrmse) : std::string()) + "," +
           fmt17(r.mean_iterations) + "," + std::to_string(r.failure_count) + "," +
           std::to_string(r.seed_base) + "\n";
  }
  return out;
}

void write_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("I/O error: cannot open '" + path + "' for writing");
  f << format_csv(rows);
  if (!f) throw std::runtime_error("I/O error: failed writing '" + path + "'");
}

std::vector<SweepRow> parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != csv_header()) {
    throw std::invalid_argument("csv error: unexpected header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.push_back("");
    if (f.size() != 11) throw std::invalid_argument("csv error: expected 11 fields");
    SweepRow r;
    r.preset = f[0];
    r.solver = f[1];
    r.snr_db = std::stod(f[2]);
    r.rank = std::stoi(f[3]);
    r.trial_count = std::stoi(f[4]);
    r.nrmse_mean = std::stod(f[5]);
    r.nrmse_std = std::stod(f[6]);
    r.has_se = !f[7].empty();
    r.se_nrmse = r.has_se ? std::stod(f[7]) : 0.0;
    r.mean_iterations = std::stod(f[8]);
    r.failure_count = std::stoi(f[9]);
    r.seed_base = std::stoull(f[10]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("I/O error: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

std::string format_trial_log(const std::vector<TrialRecord>& trials) {
  std::string out = "solver,snr_db,rank,trial,seed,termination,iterations,attempts,nrmse,message\n";
  for (const TrialRecord& t : trials) {
    std::string msg = t.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    out += t.solver + "," + fmt17(t.snr_db) + "," + std::to_string(t.rank) + "," +
           std::to_string(t.trial) + "," + std::to_string(t.seed) + "," +
           to_string(t.termination) + "," + std::to_string(t.iterations) + "," +
           std::to_string(t.attempts) + "," + fmt17(t.nrmse) + "," + msg + "\n";
  }
  return out;
}

}  // namespace bivamp
