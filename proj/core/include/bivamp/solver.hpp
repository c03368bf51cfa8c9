#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bivamp/messages.hpp"
#include "bivamp/model.hpp"
#include "bivamp/rng.hpp"

namespace bivamp {

// Starting point of the iteration.
enum class InitKind {
  // Extrinsic means init_scale * sqrt(second moment) * N(0, 1).
  kRandom,
  // A first pass from kRandom with zero-mean Gaussian stand-ins for the
  // non-Gaussian priors, then a FastICA rotation of the non-Gaussian factor
  // applied to the whole message state, then the run with the true priors.
  // Both passes share t_max. An ill-conditioned rotation is replaced by the
  // identity. Identical to kRandom when both priors are Gaussian.
  kWarmStart,
};

struct RunConfig {
  int t_max = 1000;
  double xi = 1e-6;
  // Consecutive iterations on which the stopping inequality must hold.
  int convergence_patience = 10;
  double damping_rho = 0.5;
  double gamma_min = 1e-11;
  // Cap on the denoiser posterior precisions.
  double gamma_max = 1e11;
  std::uint64_t seed = 0;
  double beta_temp = 1.0;

  BilmmseForm bilmmse_form = BilmmseForm::kNoiseInflated;
  ZExtrinsicForm z_extrinsic_form = ZExtrinsicForm::kProduct;
  PrecisionAveraging z_averaging = PrecisionAveraging::kHarmonic;
  // Keep the previous extrinsic message when a precision difference falls
  // to gamma_min instead of emitting the floored one.
  bool hold_on_clip = true;

  InitKind init = InitKind::kWarmStart;
  double init_scale = 1e-2;
  // All-zero extrinsic means (stalls at tanh(0) = 0 for odd denoisers).
  bool zero_init = false;
  double init_precision = 1.0;

  // Number of runs from independent initializations. The kept attempt has the
  // smallest observed residual ratio gamma_w <(Y - Z_hat)^2>, and attempts
  // stop once that ratio is at most restart_residual_ratio.
  int max_attempts = 4;
  double restart_residual_ratio = 1.5;

  // Baseline only: the Onsager term as printed, with an extra gamma_w factor.
  bool baseline_printed_onsager = false;

  void validate() const;
};

enum class Termination { kConverged, kIterationCap, kNumericalFailure };

std::string to_string(Termination t);

struct IterationRecord {
  double nrmse_z = 0.0;  // NaN when no reference is supplied
  double gamma_u_post_minus = 0.0;
  double gamma_v_post_minus = 0.0;
  double gamma_z_post_minus = 0.0;  // 0 for solvers without an output step
  int clips = 0;
};

struct RunResult {
  Mat u_hat;
  Mat v_hat;
  Mat z_hat;
  int iterations_run = 0;
  Termination termination = Termination::kIterationCap;
  std::vector<IterationRecord> history;
  int attempts = 1;
  double residual_ratio = 0.0;
  // Final relative change of (U+, V+), compared against xi.
  double final_change = 0.0;
  std::string failure_message;
};

// What a solver may see of an instance. z_reference is optional and used only
// to fill the nrmse history.
struct Observation {
  ProblemDims dims;
  Mat y_obs;
  Mat mask;
  ChannelSpec channel;
  Mat z_reference;
};

Observation observe(const Instance& instance);

// Generalized output step enabled; supports Awgn and Selection.
RunResult run_bigvamp(const Observation& obs, const PriorSpec& prior_u,
                      const PriorSpec& prior_v, const RunConfig& config);

// Output step frozen to Z+e = Y, gamma_Z+e = gamma_w. Requires a full mask.
RunResult run_bivamp(const Observation& obs, const PriorSpec& prior_u,
                     const PriorSpec& prior_v, const RunConfig& config);

// AMP baseline for Gaussian priors with the low-SNR message form. Throws
// std::invalid_argument for non-Gaussian priors.
RunResult run_baseline_amp(const Observation& obs, const PriorSpec& prior_u,
                           const PriorSpec& prior_v, const RunConfig& config);

// Symmetric FastICA with the cubic contrast on the whitened columns of x.
// Returns T such that the columns of x T are decorrelated, unit-variance
// and maximally non-Gaussian. The starting rotation is drawn from engine.
Mat fastica_rotation(const Mat& x, Engine& engine, int max_iter = 300, double tol = 1e-10);

// gamma_w <(Y - Z_hat)^2> over observed entries, in the stored scale.
double residual_ratio(const Observation& obs, const Mat& z_hat);

}  // namespace bivamp
