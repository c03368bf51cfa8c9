#pragma once

#include <vector>

#include "bivamp/messages.hpp"
#include "bivamp/model.hpp"

namespace bivamp {

enum class SeMode { kBiVamp, kBigVamp };

struct SEParams {
  double beta_u = 1.0;
  double beta_v = 1.0;
  PriorSpec prior_u;
  PriorSpec prior_v;
  ChannelSpec channel;  // noise_precision is gamma_w in the scaled convention
  double beta_temp = 1.0;

  double sigma2_u() const { return prior_u.second_moment(); }
  double sigma2_v() const { return prior_v.second_moment(); }
  // Variance of one entry of the scaled Z, sqrt(beta_u beta_v) s_u^2 s_v^2.
  double z_variance() const;
  void validate() const;
};

// SE parameters for an instance of the given sizes. gamma_w is expressed in
// the scaled convention from the SNR: 10^(snr / 10) / z_variance().
SEParams make_se_params(const ProblemDims& dims, const PriorSpec& prior_u,
                        const PriorSpec& prior_v, const ChannelSpec& channel,
                        double snr_db);

struct SEState {
  double gamma_u_ext_plus = 1.0;
  double gamma_v_ext_plus = 1.0;
  double gamma_u_post_minus = 1.0;
  double gamma_v_post_minus = 1.0;
  double gamma_u_ext_minus = 1.0;
  double gamma_v_ext_minus = 1.0;
  double gamma_u_post_plus = 1.0;
  double gamma_v_post_plus = 1.0;
  double gamma_z_ext_plus = 1.0;
  double gamma_z_post_minus = 1.0;
  double gamma_z_ext_minus = 1.0;
  double gamma_z_post_plus = 1.0;
  double gamma_tilde_u = 0.0;
  double gamma_tilde_v = 0.0;
};

// (sqrt(x (1 + sqrt z)^2 + 1) - sqrt(x (1 - sqrt z)^2 + 1))^2.
double f_rmt(double x, double z);

struct EffectiveGammas {
  double gamma_tilde_u = 0.0;
  double gamma_tilde_v = 0.0;
};

EffectiveGammas se_effective_gammas(const SEState& state, const SEParams& params,
                                    double gamma_noise);

// gamma_tilde^-1 (1 - F(alpha, beta_ratio) / (4 beta_ratio alpha)); alpha is
// floored at 1e-12.
double se_mse_bilmmse(double gamma_tilde, double alpha, double beta_ratio);

// gamma^-1 E[g'] for x ~ prior observed through N(0, 1/gamma), i.e. the MMSE
// of the scalar channel. Throws AccuracyError when the adaptive quadrature
// misses its tolerance.
double se_mse_denoiser(const PriorSpec& prior, double gamma_ext);

// (gamma_Z+e + (1 / sqrt(beta_u beta_v)) [bracket]^-1)^-1 with
// bracket = (1/beta) E_U E_V + (s_v^2 - E_V) E_U + (s_u^2 - E_U) E_V, where
// E_X = 1 / gamma_X-p. The bracket is floored at 1e-300.
double se_mse_output_z(const SEState& state, const SEParams& params);

// s / (gamma + gamma_w) + (1 - s) / gamma for the Selection channel, and
// 1 / (gamma + gamma_w) for Awgn.
double se_mse_denoiser_z(const ChannelSpec& channel, double gamma_z_ext_minus,
                         double sigma2_z);

struct SEOptions {
  int t_max = 500;
  double gamma_min = 1e-11;
  double gamma_max = 1e11;
  // Initial extrinsic precisions gamma_U+e, gamma_V+e.
  double init_ext = 1.0;
  // Initial posterior precisions gamma_U-p, gamma_V-p used by the first
  // effective-gamma evaluation. The default encodes confident factors; 1
  // reproduces the uninformative start.
  double init_post = 1e6;
  // Stop once every tracked precision changes by less than this, relatively.
  double tol = 1e-9;
  // Linear-step recursion matching the solver's Bi-LMMSE form. kLiteral uses
  // the effective precisions of se_effective_gammas; kNoiseInflated keeps the
  // extrinsic precision as prior precision and divides the channel precision
  // by 1 + g sqrt(beta_u beta_v) E_partner s_own^2.
  BilmmseForm bilmmse_form = BilmmseForm::kNoiseInflated;
};

struct SETrajectory {
  std::vector<SEState> states;
  bool converged = false;
  bool truncated = false;  // a non-finite state was produced
  int alpha_clamps = 0;
};

SETrajectory run_se(const SEParams& params, SeMode mode, const SEOptions& options = {});

// sqrt(E_Z / Var(z)). BiG-VAMP uses E_Z = 1 / gamma_Z+p. Bi-VAMP uses
// E_Z = sqrt(beta_u beta_v) [E_u E_v + (s_v^2 - E_v) E_u + (s_u^2 - E_u) E_v]
// with E_X = 1 / gamma_X+p.
double se_predicted_nrmse(const SEState& state, const SEParams& params, SeMode mode);

}  // namespace bivamp
