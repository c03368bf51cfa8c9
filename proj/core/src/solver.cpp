#include "bivamp/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "bivamp/denoisers.hpp"
#include "bivamp/errors.hpp"
#include "bivamp/rng.hpp"

namespace bivamp {

void RunConfig::validate() const {
  if (t_max < 1) throw std::invalid_argument("parameter error: t_max must be >= 1");
  if (!(xi > 0.0)) throw std::invalid_argument("parameter error: xi must be positive");
  if (!(damping_rho > 0.0 && damping_rho <= 1.0)) {
    throw std::invalid_argument("parameter error: damping_rho must lie in (0, 1]");
  }
  if (!(gamma_min >= 0.0)) {
    throw std::invalid_argument("parameter error: gamma_min must be >= 0");
  }
  if (!(gamma_max > gamma_min)) {
    throw std::invalid_argument("parameter error: gamma_max must exceed gamma_min");
  }
  if (!(beta_temp > 0.0)) {
    throw std::invalid_argument("parameter error: beta_temp must be positive");
  }
  if (!(init_precision > 0.0)) {
    throw std::invalid_argument("parameter error: init_precision must be positive");
  }
  if (convergence_patience < 1) {
    throw std::invalid_argument("parameter error: convergence_patience must be >= 1");
  }
  if (max_attempts < 1) {
    throw std::invalid_argument("parameter error: max_attempts must be >= 1");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "Converged";
    case Termination::kIterationCap:
      return "IterationCap";
    case Termination::kNumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

Observation observe(const Instance& instance) {
  Observation obs;
  obs.dims = instance.dims;
  obs.y_obs = instance.y_obs;
  obs.mask = instance.mask;
  obs.channel = instance.channel;
  obs.z_reference = instance.z_true;
  return obs;
}

double residual_ratio(const Observation& obs, const Mat& z_hat) {
  const double count = obs.mask.sum();
  if (!(count > 0.0)) return std::numeric_limits<double>::infinity();
  const double sq = (obs.y_obs - z_hat).cwiseProduct(obs.mask).squaredNorm();
  const double ratio = sq / count * obs.channel.noise_precision;
  return std::isfinite(ratio) ? ratio : std::numeric_limits<double>::infinity();
}

namespace {

enum class Solver { kBigVamp, kBiVamp, kBaseline };

void check_observation(const Observation& obs) {
  ProblemDims::make(obs.dims.n, obs.dims.m, obs.dims.rank);
  obs.channel.validate();
  if (obs.y_obs.rows() != obs.dims.n || obs.y_obs.cols() != obs.dims.m ||
      obs.mask.rows() != obs.dims.n || obs.mask.cols() != obs.dims.m) {
    throw std::invalid_argument("dimension error: observation shape does not match dims");
  }
}

double reference_nrmse(const Observation& obs, const Mat& z_hat) {
  if (obs.z_reference.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return nrmse(z_hat, obs.z_reference);
}

Mat random_init(const PriorSpec& prior, int rows, int cols, const RunConfig& config,
                Engine& engine) {
  if (config.zero_init) return Mat::Zero(rows, cols);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double scale = config.init_scale * std::sqrt(prior.second_moment());
  Mat x(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) x(i, k) = scale * normal(engine);
  }
  return x;
}

// Plus-side of one factor: denoise the extrinsic message and send back the
// new extrinsic, honouring the precision cap and the hold-on-clip rule.
struct FactorStep {
  Mat ext_minus;
  double gamma_ext_minus = 1.0;
  Mat post_plus;
  double gamma_post_plus = 1.0;
  Mat ext_plus;
  double gamma_ext_plus = 1.0;
};

void factor_step(const PriorSpec& prior, const Mat& post_minus, const Mat& cov,
                 const RunConfig& config, bool first, FactorStep& f, int& clips) {
  const double g_post = scalarize_covariance(cov);
  if (!config.hold_on_clip || first || g_post - f.gamma_ext_plus > config.gamma_min) {
    const Extrinsic e = extrinsic_subtract(post_minus, g_post, f.ext_plus,
                                           f.gamma_ext_plus, config.gamma_min);
    f.ext_minus = e.mean;
    f.gamma_ext_minus = e.precision;
    clips += e.clipped ? 1 : 0;
  } else {
    ++clips;
  }

  const RowDenoise d = denoise_rows(prior, f.ext_minus, 1.0 / f.gamma_ext_minus);
  double g_plus = config.gamma_max;
  if (d.mean_divergence > 0.0) {
    g_plus = std::min(f.gamma_ext_minus / d.mean_divergence, config.gamma_max);
  }
  f.post_plus = d.means;
  f.gamma_post_plus = g_plus;

  Mat next_mean = f.ext_plus;
  double next_prec = f.gamma_ext_plus;
  if (config.hold_on_clip && g_plus - f.gamma_ext_minus <= config.gamma_min) {
    ++clips;
  } else {
    const Extrinsic e = extrinsic_subtract(d.means, g_plus, f.ext_minus,
                                           f.gamma_ext_minus, config.gamma_min);
    next_mean = e.mean;
    next_prec = e.precision;
    clips += e.clipped ? 1 : 0;
  }
  f.ext_plus = damp(next_mean, f.ext_plus, config.damping_rho);
  f.gamma_ext_plus = damp(next_prec, f.gamma_ext_plus, config.damping_rho);
}

// Everything one VAMP iteration reads and writes.
struct VampState {
  FactorStep fu;
  FactorStep fv;
  UvState s;
  ZState z;
  BilmmseMessages msgs;
  bool have_msgs = false;
  bool first = true;
};

// Observation in the solver scale.
struct ScaledProblem {
  const Observation* obs = nullptr;
  double c = 1.0;
  Mat y;
  double gw = 1.0;
  ChannelSpec channel;
  bool output_step = true;
};

ScaledProblem scale_problem(const Observation& obs, bool output_step) {
  ScaledProblem p;
  p.obs = &obs;
  p.c = obs.channel.z_scale(obs.dims);
  p.y = obs.y_obs / p.c;
  p.gw = obs.channel.noise_precision * p.c * p.c;
  p.channel = obs.channel;
  p.channel.noise_precision = p.gw;
  p.output_step = output_step;
  return p;
}

VampState initial_state(const ScaledProblem& p, const PriorSpec& prior_u,
                        const PriorSpec& prior_v, const RunConfig& config, Engine& engine) {
  const int n = p.obs->dims.n;
  const int m = p.obs->dims.m;
  const int r = p.obs->dims.rank;
  VampState st;
  st.fu.ext_plus = random_init(prior_u, n, r, config, engine);
  st.fv.ext_plus = random_init(prior_v, m, r, config, engine);
  st.fu.gamma_ext_plus = config.init_precision;
  st.fv.gamma_ext_plus = config.init_precision;
  st.fu.post_plus = st.fu.ext_plus;
  st.fv.post_plus = st.fv.ext_plus;
  st.fu.ext_minus = st.fu.ext_plus;
  st.fv.ext_minus = st.fv.ext_plus;
  st.s.u_post_minus = st.fu.ext_plus;
  st.s.v_post_minus = st.fv.ext_plus;
  st.s.u_post_minus_prev = Mat::Zero(n, r);
  st.s.v_post_minus_prev = Mat::Zero(m, r);
  st.s.r_u_post_minus = Mat::Identity(r, r) / config.init_precision;
  st.s.r_v_post_minus = Mat::Identity(r, r) / config.init_precision;
  st.z.z_ext_plus = p.y;
  st.z.gamma_z_ext_plus = p.gw;
  return st;
}

// Runs up to `budget` iterations from `st`, appending to `res`.
void iterate(VampState& st, const ScaledProblem& p, const PriorSpec& prior_u,
             const PriorSpec& prior_v, const RunConfig& config, int budget, RunResult& res) {
  const Observation& obs = *p.obs;
  const ProblemDims& dims = obs.dims;
  const int n = dims.n;
  const int m = dims.m;
  int streak = 0;
  res.termination = Termination::kIterationCap;
  for (int t = 1; t <= budget; ++t) {
    IterationRecord rec;
    try {
      FactorStep& fu = st.fu;
      FactorStep& fv = st.fv;
      UvState& s = st.s;
      ZState& z = st.z;
      const Mat& z_in = p.output_step ? z.z_ext_plus : p.y;
      const double g_in = p.output_step ? z.gamma_z_ext_plus : p.gw;
      s.u_ext_plus = fu.ext_plus;
      s.v_ext_plus = fv.ext_plus;
      s.gamma_u_ext_plus = fu.gamma_ext_plus;
      s.gamma_v_ext_plus = fv.gamma_ext_plus;
      BilmmseMessages next =
          bilmmse_messages(z_in, g_in, s, dims, config.beta_temp, config.bilmmse_form);
      if (st.have_msgs) {
        next.b_u = damp(next.b_u, st.msgs.b_u, config.damping_rho);
        next.lambda_u = damp(next.lambda_u, st.msgs.lambda_u, config.damping_rho);
        next.b_v = damp(next.b_v, st.msgs.b_v, config.damping_rho);
        next.lambda_v = damp(next.lambda_v, st.msgs.lambda_v, config.damping_rho);
      }
      st.msgs = std::move(next);
      st.have_msgs = true;

      const GaussianRows pu = bilmmse_posterior(st.msgs.b_u, st.msgs.lambda_u, fu.ext_plus,
                                                fu.gamma_ext_plus);
      const GaussianRows pv = bilmmse_posterior(st.msgs.b_v, st.msgs.lambda_v, fv.ext_plus,
                                                fv.gamma_ext_plus);
      s.u_post_minus_prev = s.u_post_minus;
      s.v_post_minus_prev = s.v_post_minus;
      s.u_post_minus = pu.mean;
      s.v_post_minus = pv.mean;
      s.r_u_post_minus = pu.cov;
      s.r_v_post_minus = pv.cov;
      rec.gamma_u_post_minus = scalarize_covariance(pu.cov);
      rec.gamma_v_post_minus = scalarize_covariance(pv.cov);

      const Mat u_plus_old = fu.post_plus;
      const Mat v_plus_old = fv.post_plus;
      factor_step(prior_u, pu.mean, pu.cov, config, st.first, fu, rec.clips);
      factor_step(prior_v, pv.mean, pv.cov, config, st.first, fv, rec.clips);
      s.u_ext_minus = fu.ext_minus;
      s.v_ext_minus = fv.ext_minus;
      s.gamma_u_ext_minus = fu.gamma_ext_minus;
      s.gamma_v_ext_minus = fv.gamma_ext_minus;
      s.u_post_plus = fu.post_plus;
      s.v_post_plus = fv.post_plus;
      s.gamma_u_post_plus = fu.gamma_post_plus;
      s.gamma_v_post_plus = fv.gamma_post_plus;
      st.first = false;

      if (p.output_step) {
        if (config.z_extrinsic_form == ZExtrinsicForm::kProduct) {
          z.z_ext_minus = s.u_post_minus * s.v_post_minus.transpose();
          z.gamma_z_ext_minus = product_precision(s, dims);
          z.gamma_z_post_minus = z.gamma_z_ext_plus + z.gamma_z_ext_minus;
          z.z_post_minus = (z.gamma_z_ext_plus * z.z_ext_plus +
                            z.gamma_z_ext_minus * z.z_ext_minus) /
                           z.gamma_z_post_minus;
        } else {
          const ZPosterior zp = output_posterior_z(s, z.z_ext_plus, z.gamma_z_ext_plus,
                                                   dims, config.beta_temp);
          z.z_post_minus = zp.mean;
          z.gamma_z_post_minus = zp.precision;
          const Extrinsic e = extrinsic_subtract(zp.mean, zp.precision, z.z_ext_plus,
                                                 z.gamma_z_ext_plus, config.gamma_min);
          z.z_ext_minus = e.mean;
          z.gamma_z_ext_minus = e.precision;
          rec.clips += e.clipped ? 1 : 0;
        }
        rec.gamma_z_post_minus = z.gamma_z_post_minus;

        const double tau = 1.0 / z.gamma_z_ext_minus;
        z.z_post_plus.resize(n, m);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < m; ++j) {
            const DenoiseResult d = denoise_output(p.channel, p.y(i, j), obs.mask(i, j) != 0.0,
                                                   z.z_ext_minus(i, j), tau);
            z.z_post_plus(i, j) = d.mean;
            if (config.z_averaging == PrecisionAveraging::kHarmonic) {
              acc += tau * d.divergence;
            } else {
              acc += 1.0 / (tau * d.divergence);
            }
          }
        }
        const double count = static_cast<double>(n) * m;
        z.gamma_z_post_plus = config.z_averaging == PrecisionAveraging::kHarmonic
                                  ? count / acc
                                  : acc / count;
        const Extrinsic e = extrinsic_subtract(z.z_post_plus, z.gamma_z_post_plus,
                                               z.z_ext_minus, z.gamma_z_ext_minus,
                                               config.gamma_min);
        rec.clips += e.clipped ? 1 : 0;
        z.z_ext_plus = damp(e.mean, z.z_ext_plus, config.damping_rho);
        z.gamma_z_ext_plus = damp(e.precision, z.gamma_z_ext_plus, config.damping_rho);
      }

      const double change = (fu.post_plus - u_plus_old).squaredNorm() +
                            (fv.post_plus - v_plus_old).squaredNorm();
      const double scale = u_plus_old.squaredNorm() + v_plus_old.squaredNorm();
      const Mat z_hat = p.c * (fu.post_plus * fv.post_plus.transpose());
      if (!z_hat.allFinite() || !std::isfinite(fu.gamma_ext_plus) ||
          !std::isfinite(fv.gamma_ext_plus) ||
          (p.output_step && !std::isfinite(z.gamma_z_ext_plus))) {
        throw NumericalError("numerical error: non-finite iterate");
      }
      res.u_hat = fu.post_plus;
      res.v_hat = fv.post_plus;
      res.z_hat = z_hat;
      res.final_change =
          scale > 0.0 ? change / scale : std::numeric_limits<double>::infinity();
      rec.nrmse_z = reference_nrmse(obs, z_hat);
      res.history.push_back(rec);
      ++res.iterations_run;
      const bool small = res.iterations_run > 1 && change <= config.xi * scale;
      streak = small ? streak + 1 : 0;
      if (streak >= config.convergence_patience) {
        res.termination = Termination::kConverged;
        return;
      }
    } catch (const NumericalError& e) {
      res.termination = Termination::kNumericalFailure;
      res.failure_message = e.what();
      return;
    }
  }
}

// Zero-mean Gaussian with the same second moment.
PriorSpec gaussian_stand_in(const PriorSpec& prior) {
  if (prior.kind == PriorSpec::Kind::kGaussian) return prior;
  return PriorSpec::gaussian(0.0, prior.second_moment());
}

// Re-expresses the state in the basis U T, V T^-T, which leaves U V^T and
// the output-step messages unchanged.
void transform_state(VampState& st, const Mat& t) {
  const Mat t_inv = t.inverse();
  const Mat t_inv_t = t_inv.transpose();
  for (Mat* x : {&st.fu.ext_plus, &st.fu.ext_minus, &st.fu.post_plus, &st.s.u_post_minus,
                 &st.s.u_post_minus_prev}) {
    *x = *x * t;
  }
  for (Mat* x : {&st.fv.ext_plus, &st.fv.ext_minus, &st.fv.post_plus, &st.s.v_post_minus,
                 &st.s.v_post_minus_prev}) {
    *x = *x * t_inv_t;
  }
  st.s.r_u_post_minus = t.transpose() * st.s.r_u_post_minus * t;
  st.s.r_v_post_minus = t_inv * st.s.r_v_post_minus * t_inv_t;
  st.have_msgs = false;
  st.first = true;
}

// True when t is finite with condition number at most 1e6.
bool well_conditioned(const Mat& t) {
  if (!t.allFinite()) return false;
  const Eigen::JacobiSVD<Mat> svd(t);
  const Eigen::VectorXd& sv = svd.singularValues();
  return sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) <= 1e6;
}

RunResult vamp_attempt(const Observation& obs, const PriorSpec& prior_u,
                       const PriorSpec& prior_v, const RunConfig& config,
                       bool output_step, std::uint64_t index) {
  const ScaledProblem p = scale_problem(obs, output_step);
  Engine engine = make_engine(config.seed, Stream::kSolverInit, index);
  VampState st = initial_state(p, prior_u, prior_v, config, engine);

  RunResult res;
  res.u_hat = st.fu.post_plus;
  res.v_hat = st.fv.post_plus;
  res.z_hat = p.c * (res.u_hat * res.v_hat.transpose());

  const bool u_gauss = prior_u.kind == PriorSpec::Kind::kGaussian;
  const bool v_gauss = prior_v.kind == PriorSpec::Kind::kGaussian;
  if (config.init == InitKind::kWarmStart && !(u_gauss && v_gauss)) {
    iterate(st, p, gaussian_stand_in(prior_u), gaussian_stand_in(prior_v), config,
            config.t_max, res);
    if (res.termination == Termination::kNumericalFailure) return res;
    const int left = config.t_max - res.iterations_run;
    if (left <= 0) return res;
    const Mat& basis = u_gauss ? st.fv.post_plus : st.fu.post_plus;
    Mat t = fastica_rotation(basis, engine);
    if (!well_conditioned(t)) t = Mat::Identity(t.rows(), t.cols());
    transform_state(st, u_gauss ? Mat(t.inverse().transpose()) : t);
    iterate(st, p, prior_u, prior_v, config, left, res);
    return res;
  }
  iterate(st, p, prior_u, prior_v, config, config.t_max, res);
  return res;
}

RunResult baseline_attempt(const Observation& obs, const PriorSpec& prior_u,
                           const PriorSpec& prior_v, const RunConfig& config,
                           std::uint64_t index) {
  const ProblemDims& dims = obs.dims;
  const int n = dims.n;
  const int m = dims.m;
  const int r = dims.rank;
  const double c = obs.channel.z_scale(dims);
  const Mat y = obs.y_obs / c;
  const double gw = obs.channel.noise_precision * c * c;
  const double k = config.baseline_printed_onsager ? gw : 1.0;
  const double cov_term = 1.0 / config.beta_temp - 1.0;
  const double rho = config.damping_rho;

  Engine engine = make_engine(config.seed, Stream::kSolverInit, index);
  Mat u = random_init(prior_u, n, r, config, engine);
  Mat v = random_init(prior_v, m, r, config, engine);
  Mat u_prev = Mat::Zero(n, r);
  Mat v_prev = Mat::Zero(m, r);
  Mat ru = Mat::Identity(r, r);
  Mat rv = Mat::Identity(r, r);
  const Mat prior_u_term = Mat::Constant(n, r, prior_u.mean / prior_u.variance);
  const Mat prior_v_term = Mat::Constant(m, r, prior_v.mean / prior_v.variance);

  RunResult res;
  res.u_hat = u;
  res.v_hat = v;
  res.z_hat = c * (u * v.transpose());
  int streak = 0;
  for (int t = 1; t <= config.t_max; ++t) {
    IterationRecord rec;
    try {
      const Mat b_u = gw * (y * v - k * m * u_prev * rv);
      Mat l_u = gw * (v.transpose() * v + cov_term * m * rv);
      const Mat b_v = gw * (y.transpose() * u - k * n * v_prev * ru);
      Mat l_v = gw * (u.transpose() * u + cov_term * n * ru);
      l_u = 0.5 * (l_u + l_u.transpose()).eval();
      l_v = 0.5 * (l_v + l_v.transpose()).eval();
      GaussianRows pu = bilmmse_posterior(b_u, l_u, prior_u_term * prior_u.variance,
                                          1.0 / prior_u.variance);
      GaussianRows pv = bilmmse_posterior(b_v, l_v, prior_v_term * prior_v.variance,
                                          1.0 / prior_v.variance);
      const double change = (pu.mean - u).squaredNorm() + (pv.mean - v).squaredNorm();
      const double scale = u.squaredNorm() + v.squaredNorm();
      u_prev = u;
      v_prev = v;
      if (t > 1) {
        pu.mean = damp(pu.mean, u, rho);
        pv.mean = damp(pv.mean, v, rho);
        pu.cov = damp(pu.cov, ru, rho);
        pv.cov = damp(pv.cov, rv, rho);
      }
      u = pu.mean;
      v = pv.mean;
      ru = pu.cov;
      rv = pv.cov;
      rec.gamma_u_post_minus = scalarize_covariance(ru);
      rec.gamma_v_post_minus = scalarize_covariance(rv);
      const Mat z_hat = c * (u * v.transpose());
      if (!z_hat.allFinite()) throw NumericalError("numerical error: non-finite iterate");
      res.u_hat = u;
      res.v_hat = v;
      res.z_hat = z_hat;
      res.final_change = scale > 0.0 ? change / scale : std::numeric_limits<double>::infinity();
      rec.nrmse_z = reference_nrmse(obs, z_hat);
      res.history.push_back(rec);
      res.iterations_run = t;
      streak = t > 1 && change <= config.xi * scale ? streak + 1 : 0;
      if (streak >= config.convergence_patience) {
        res.termination = Termination::kConverged;
        return res;
      }
    } catch (const NumericalError& e) {
      res.termination = Termination::kNumericalFailure;
      res.failure_message = e.what();
      return res;
    }
  }
  res.termination = Termination::kIterationCap;
  return res;
}

RunResult run_with_restarts(const Observation& obs, const PriorSpec& prior_u,
                            const PriorSpec& prior_v, const RunConfig& config,
                            Solver solver) {
  config.validate();
  check_observation(obs);
  prior_u.validate();
  prior_v.validate();
  RunResult best;
  bool have_best = false;
  for (int a = 0; a < config.max_attempts; ++a) {
    RunResult res;
    switch (solver) {
      case Solver::kBigVamp:
        res = vamp_attempt(obs, prior_u, prior_v, config, true, a);
        break;
      case Solver::kBiVamp:
        res = vamp_attempt(obs, prior_u, prior_v, config, false, a);
        break;
      case Solver::kBaseline:
        res = baseline_attempt(obs, prior_u, prior_v, config, a);
        break;
    }
    res.residual_ratio = residual_ratio(obs, res.z_hat);
    res.attempts = a + 1;
    const bool better =
        !have_best ||
        (res.termination != Termination::kNumericalFailure &&
         best.termination == Termination::kNumericalFailure) ||
        ((res.termination == Termination::kNumericalFailure) ==
             (best.termination == Termination::kNumericalFailure) &&
         res.residual_ratio < best.residual_ratio);
    if (better) {
      best = std::move(res);
      have_best = true;
    }
    best.attempts = a + 1;
    if (best.termination != Termination::kNumericalFailure &&
        best.residual_ratio <= config.restart_residual_ratio) {
      break;
    }
  }
  return best;
}

}  // namespace

Mat fastica_rotation(const Mat& x, Engine& engine, int max_iter, double tol) {
  const Eigen::Index n = x.rows();
  const Eigen::Index r = x.cols();
  auto inv_sqrt = [](const Mat& a) {
    const Eigen::SelfAdjointEigenSolver<Mat> eig(a);
    const Eigen::VectorXd w = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    return Mat(eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().transpose());
  };
  auto sym_orth = [&](const Mat& w) { return Mat(w * inv_sqrt(w.transpose() * w)); };

  const Mat whiten = inv_sqrt(x.transpose() * x / static_cast<double>(n));
  const Mat xw = x * whiten;
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Mat w(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < r; ++k) w(i, k) = normal(engine);
  }
  w = sym_orth(w);
  for (int it = 0; it < max_iter; ++it) {
    const Mat proj = xw * w;
    const Mat g = proj.array().cube().matrix();
    const Eigen::RowVectorXd second = proj.array().square().colwise().mean();
    Mat next = xw.transpose() * g / static_cast<double>(n) -
               3.0 * (w.array().rowwise() * second.array()).matrix();
    next = sym_orth(next);
    if (!next.allFinite()) break;
    const double delta =
        ((next.transpose() * w).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = next;
    if (delta < tol) break;
  }
  return whiten * w;
}

RunResult run_bigvamp(const Observation& obs, const PriorSpec& prior_u,
                      const PriorSpec& prior_v, const RunConfig& config) {
  return run_with_restarts(obs, prior_u, prior_v, config, Solver::kBigVamp);
}

RunResult run_bivamp(const Observation& obs, const PriorSpec& prior_u,
                     const PriorSpec& prior_v, const RunConfig& config) {
  if (obs.mask.size() > 0 && obs.mask.minCoeff() < 1.0) {
    throw std::invalid_argument("parameter error: Bi-VAMP requires a fully observed matrix");
  }
  return run_with_restarts(obs, prior_u, prior_v, config, Solver::kBiVamp);
}

RunResult run_baseline_amp(const Observation& obs, const PriorSpec& prior_u,
                           const PriorSpec& prior_v, const RunConfig& config) {
  if (prior_u.kind != PriorSpec::Kind::kGaussian ||
      prior_v.kind != PriorSpec::Kind::kGaussian) {
    throw std::invalid_argument("unsupported prior: the AMP baseline needs Gaussian priors");
  }
  if (obs.mask.size() > 0 && obs.mask.minCoeff() < 1.0) {
    throw std::invalid_argument("parameter error: the AMP baseline requires a full mask");
  }
  return run_with_restarts(obs, prior_u, prior_v, config, Solver::kBaseline);
}

}  // namespace bivamp
