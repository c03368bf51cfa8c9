#include "bivamp/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bivamp/denoisers.hpp"
#include "bivamp/errors.hpp"

namespace bivamp {

namespace {

constexpr double kAlphaFloor = 1e-12;
constexpr double kQuadTol = 1e-10;
constexpr double kQuadAccept = 1e-6;

double std_normal_pdf(double x) {
  static const double kInvSqrt2Pi = 0.3989422804014327;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_pdf(double x, double var) {
  return std_normal_pdf(x / std::sqrt(var)) / std::sqrt(var);
}

// Integrates f over [lo, hi] split at the interior breakpoints.
template <class F>
double integrate_pieces(F f, double lo, double hi, std::vector<double> breaks) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  double total_err = 0.0;
  double total_abs = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::max(lo, breaks[i]);
    const double b = std::min(hi, breaks[i + 1]);
    if (!(b > a)) continue;
    double err = 0.0;
    double l1 = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, 20, kQuadTol, &err, &l1);
    total_err += err;
    total_abs += l1;
  }
  if (!(total_err <= kQuadAccept * std::max(total_abs, 1e-300)) &&
      total_err > 1e-300) {
    std::ostringstream os;
    os << "accuracy error: quadrature error estimate " << total_err
       << " exceeds tolerance for integral " << total;
    throw AccuracyError(os.str());
  }
  return total;
}

}  // namespace

double SEParams::z_variance() const {
  return std::sqrt(beta_u * beta_v) * sigma2_u() * sigma2_v();
}

void SEParams::validate() const {
  if (!(beta_u > 0.0 && beta_u <= 1.0 && beta_v > 0.0 && beta_v <= 1.0)) {
    throw std::invalid_argument("parameter error: aspect ratios must lie in (0, 1]");
  }
  prior_u.validate();
  prior_v.validate();
  channel.validate();
}

SEParams make_se_params(const ProblemDims& dims, const PriorSpec& prior_u,
                        const PriorSpec& prior_v, const ChannelSpec& channel,
                        double snr_db) {
  SEParams p;
  p.beta_u = dims.beta_u();
  p.beta_v = dims.beta_v();
  p.prior_u = prior_u;
  p.prior_v = prior_v;
  p.channel = channel;
  p.channel.noise_precision = std::pow(10.0, snr_db / 10.0) / p.z_variance();
  p.validate();
  return p;
}

double f_rmt(double x, double z) {
  const double sz = std::sqrt(z);
  const double a = std::sqrt(x * (1.0 + sz) * (1.0 + sz) + 1.0);
  const double b = std::sqrt(x * (1.0 - sz) * (1.0 - sz) + 1.0);
  return (a - b) * (a - b);
}

EffectiveGammas se_effective_gammas(const SEState& s, const SEParams& p,
                                    double gamma_noise) {
  const double g = gamma_noise;
  const double k = std::sqrt(p.beta_u * p.beta_v) * p.sigma2_u() * p.sigma2_v() * g + 1.0;
  const double ruv = std::sqrt(p.beta_u / p.beta_v);
  const double rvu = std::sqrt(p.beta_v / p.beta_u);
  EffectiveGammas out;
  out.gamma_tilde_u = s.gamma_u_ext_plus + (1.0 / p.beta_temp) * ruv * g / s.gamma_v_post_minus -
                      ruv * g / s.gamma_v_post_minus * k;
  out.gamma_tilde_v = s.gamma_v_ext_plus + (1.0 / p.beta_temp) * rvu * g / s.gamma_u_post_minus -
                      rvu * g / s.gamma_u_post_minus * k;
  return out;
}

double se_mse_bilmmse(double gamma_tilde, double alpha, double beta_ratio) {
  const double a = std::max(alpha, kAlphaFloor);
  return (1.0 - f_rmt(a, beta_ratio) / (4.0 * beta_ratio * a)) / gamma_tilde;
}

double se_mse_denoiser(const PriorSpec& prior, double gamma_ext) {
  if (!(gamma_ext > 0.0)) {
    throw std::invalid_argument("parameter error: gamma_ext must be positive");
  }
  const double tau = 1.0 / gamma_ext;
  switch (prior.kind) {
    case PriorSpec::Kind::kGaussian:
      return 1.0 / (gamma_ext + 1.0 / prior.variance);
    case PriorSpec::Kind::kBinary: {
      // By symmetry u = +1; r = 1 + sqrt(tau) n with n ~ N(0, 1).
      const double st = std::sqrt(tau);
      auto f = [&](double x) {
        return std_normal_pdf(x) * denoise_prior(prior, 1.0 + st * x, tau).divergence;
      };
      std::vector<double> breaks;
      if (-1.0 / st > -12.0) breaks.push_back(-1.0 / st);
      return tau * integrate_pieces(f, -12.0, 12.0, breaks);
    }
    case PriorSpec::Kind::kBernoulliGaussian: {
      const double rho = prior.nonzero_prob;
      const double s2 = prior.variance;
      auto f = [&](double x) {
        const double density = rho * normal_pdf(x, s2 + tau) + (1.0 - rho) * normal_pdf(x, tau);
        return density * denoise_prior(prior, x, tau).divergence;
      };
      const double lim = 12.0 * std::sqrt(s2 + tau);
      const double st = std::sqrt(tau);
      std::vector<double> breaks;
      for (double b : {-10.0 * st, -st, 0.0, st, 10.0 * st}) {
        if (b > -lim && b < lim) breaks.push_back(b);
      }
      return tau * integrate_pieces(f, -lim, lim, breaks);
    }
  }
  return 0.0;
}

double se_mse_output_z(const SEState& s, const SEParams& p) {
  const double eu = 1.0 / s.gamma_u_post_minus;
  const double ev = 1.0 / s.gamma_v_post_minus;
  double bracket = (1.0 / p.beta_temp) * eu * ev + (p.sigma2_v() - ev) * eu +
                   (p.sigma2_u() - eu) * ev;
  bracket = std::max(bracket, 1e-300);
  return 1.0 / (s.gamma_z_ext_plus + (1.0 / std::sqrt(p.beta_u * p.beta_v)) / bracket);
}

double se_mse_denoiser_z(const ChannelSpec& channel, double gamma_z_ext_minus,
                         double /*sigma2_z*/) {
  const double g = gamma_z_ext_minus;
  const double awgn = 1.0 / (g + channel.noise_precision);
  if (channel.kind == ChannelSpec::Kind::kAwgn) return awgn;
  const double s = channel.selection_rate;
  return s * awgn + (1.0 - s) / g;
}

SETrajectory run_se(const SEParams& params, SeMode mode, const SEOptions& options) {
  params.validate();
  const bool big = mode == SeMode::kBigVamp;
  const double gw = params.channel.noise_precision;
  const double gmin = options.gamma_min;
  const double gmax = options.gamma_max;
  const double su = params.sigma2_u();
  const double sv = params.sigma2_v();

  SEState s;
  s.gamma_u_ext_plus = options.init_ext;
  s.gamma_v_ext_plus = options.init_ext;
  s.gamma_u_post_minus = options.init_post;
  s.gamma_v_post_minus = options.init_post;
  s.gamma_z_ext_plus = gw;

  SETrajectory traj;
  for (int t = 0; t < options.t_max; ++t) {
    const SEState prev = s;
    const double g = big ? s.gamma_z_ext_plus : gw;
    double gt_u = 0.0;
    double gt_v = 0.0;
    double alpha_u = 0.0;
    double alpha_v = 0.0;
    const double e_u = 1.0 / s.gamma_u_post_minus;
    const double e_v = 1.0 / s.gamma_v_post_minus;
    if (options.bilmmse_form == BilmmseForm::kLiteral) {
      const EffectiveGammas eg = se_effective_gammas(s, params, g);
      gt_u = std::max(eg.gamma_tilde_u, gmin);
      gt_v = std::max(eg.gamma_tilde_v, gmin);
      s.gamma_tilde_u = eg.gamma_tilde_u;
      s.gamma_tilde_v = eg.gamma_tilde_v;
      // alpha_u drives the V estimate and alpha_v the U estimate.
      alpha_u = std::sqrt(params.beta_v / params.beta_u) * g * (su - e_u) / gt_v;
      alpha_v = std::sqrt(params.beta_u / params.beta_v) * g * (sv - e_v) / gt_u;
    } else {
      // The partner factor's error acts as extra output noise, and the
      // incoming extrinsic message is the Gaussian prior of the linear step.
      const double rt = std::sqrt(params.beta_u * params.beta_v);
      const double infl_u = 1.0 + g * rt * e_v * su;
      const double infl_v = 1.0 + g * rt * e_u * sv;
      gt_u = s.gamma_u_ext_plus;
      gt_v = s.gamma_v_ext_plus;
      s.gamma_tilde_u = gt_u;
      s.gamma_tilde_v = gt_v;
      alpha_u = std::sqrt(params.beta_v / params.beta_u) * g * std::max(su - e_u, 0.0) /
                (gt_v * infl_v);
      alpha_v = std::sqrt(params.beta_u / params.beta_v) * g * std::max(sv - e_v, 0.0) /
                (gt_u * infl_u);
    }
    traj.alpha_clamps += (alpha_u <= kAlphaFloor) + (alpha_v <= kAlphaFloor);

    const double gup = std::min(1.0 / se_mse_bilmmse(gt_u, alpha_v, params.beta_v), gmax);
    const double gvp = std::min(1.0 / se_mse_bilmmse(gt_v, alpha_u, params.beta_u), gmax);
    s.gamma_u_post_minus = gup;
    s.gamma_v_post_minus = gvp;
    s.gamma_u_ext_minus = std::max(gup - s.gamma_u_ext_plus, gmin);
    s.gamma_v_ext_minus = std::max(gvp - s.gamma_v_ext_plus, gmin);

    if (big) {
      const double ez = se_mse_output_z(s, params);
      s.gamma_z_post_minus = 1.0 / ez;
      s.gamma_z_ext_minus = std::max(s.gamma_z_post_minus - s.gamma_z_ext_plus, gmin);
    }

    s.gamma_u_post_plus =
        std::min(1.0 / std::max(se_mse_denoiser(params.prior_u, s.gamma_u_ext_minus), 1e-300), gmax);
    s.gamma_v_post_plus =
        std::min(1.0 / std::max(se_mse_denoiser(params.prior_v, s.gamma_v_ext_minus), 1e-300), gmax);
    s.gamma_u_ext_plus = std::max(s.gamma_u_post_plus - s.gamma_u_ext_minus, gmin);
    s.gamma_v_ext_plus = std::max(s.gamma_v_post_plus - s.gamma_v_ext_minus, gmin);

    if (big) {
      const double ez = se_mse_denoiser_z(params.channel, s.gamma_z_ext_minus, params.z_variance());
      s.gamma_z_post_plus = 1.0 / ez;
      s.gamma_z_ext_plus = std::max(s.gamma_z_post_plus - s.gamma_z_ext_minus, gmin);
    }

    const double tracked[] = {s.gamma_u_ext_plus, s.gamma_v_ext_plus, s.gamma_u_post_minus,
                              s.gamma_v_post_minus, s.gamma_u_post_plus, s.gamma_v_post_plus,
                              s.gamma_z_ext_plus, s.gamma_z_post_plus};
    bool finite = true;
    for (double x : tracked) finite = finite && std::isfinite(x);
    if (!finite) {
      traj.truncated = true;
      break;
    }
    traj.states.push_back(s);

    if (t > 0) {
      const double before[] = {prev.gamma_u_ext_plus, prev.gamma_v_ext_plus,
                               prev.gamma_u_post_minus, prev.gamma_v_post_minus,
                               prev.gamma_u_post_plus, prev.gamma_v_post_plus,
                               prev.gamma_z_ext_plus, prev.gamma_z_post_plus};
      double change = 0.0;
      for (int i = 0; i < 8; ++i) {
        change = std::max(change, std::abs(tracked[i] - before[i]) /
                                      std::max(std::abs(tracked[i]), 1e-300));
      }
      if (change < options.tol) {
        traj.converged = true;
        break;
      }
    }
  }
  return traj;
}

double se_predicted_nrmse(const SEState& s, const SEParams& p, SeMode mode) {
  const double var = p.z_variance();
  double ez = 0.0;
  if (mode == SeMode::kBigVamp) {
    ez = 1.0 / s.gamma_z_post_plus;
  } else {
    const double eu = 1.0 / s.gamma_u_post_plus;
    const double ev = 1.0 / s.gamma_v_post_plus;
    ez = std::sqrt(p.beta_u * p.beta_v) *
         (eu * ev + (p.sigma2_v() - ev) * eu + (p.sigma2_u() - eu) * ev);
  }
  return std::sqrt(std::max(ez, 0.0) / var);
}

}  // namespace bivamp
