#pragma once

#include "bivamp/model.hpp"

namespace bivamp {

// Posterior mean of a scalar variable and its derivative with respect to the
// pseudo-observation.
struct DenoiseResult {
  double mean = 0.0;
  double divergence = 0.0;
};

// MMSE denoiser for x ~ prior observed as r_hat = x + N(0, tau).
//
// Bernoulli-Gaussian derivation. With a = s2 / (s2 + tau) and the two
// component log-evidences
//   l1 = log(rho) - log(s2 + tau) / 2 - r^2 / (2 (s2 + tau)),
//   l0 = log(1 - rho) - log(tau) / 2 - r^2 / (2 tau),
// the nonzero responsibility is pi = 1 / (1 + exp(l0 - l1)), the mean is
// pi a r, and since d pi / d r = pi (1 - pi) (r / tau - r / (s2 + tau)) the
// divergence is a pi + a r pi (1 - pi) (r / tau - r / (s2 + tau)).
DenoiseResult denoise_prior(const PriorSpec& prior, double r_hat, double tau);

// Output-channel denoiser for z observed as y = z + N(0, 1/gamma_w), with the
// pseudo-prior z ~ N(z_hat, tau). Unobserved entries pass z_hat through.
DenoiseResult denoise_output(const ChannelSpec& channel, double y, bool observed,
                             double z_hat, double tau);

struct RowDenoise {
  Mat means;
  double mean_divergence = 0.0;
};

// Entrywise denoise_prior; mean_divergence averages the N r derivatives.
RowDenoise denoise_rows(const PriorSpec& prior, const Mat& means, double tau);

}  // namespace bivamp
