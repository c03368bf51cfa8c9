#include "bivamp/denoisers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bivamp {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("parameter error: tau must be positive and finite");
  }
}

// 1 - tanh(x)^2 without cancellation for large |x|.
double sech2(double x) {
  const double e = std::exp(-2.0 * std::abs(x));
  const double d = 1.0 + e;
  return 4.0 * e / (d * d);
}

}  // namespace

DenoiseResult denoise_prior(const PriorSpec& prior, double r_hat, double tau) {
  check_tau(tau);
  if (!std::isfinite(r_hat)) {
    throw std::invalid_argument("parameter error: r_hat must be finite");
  }
  DenoiseResult out;
  switch (prior.kind) {
    case PriorSpec::Kind::kGaussian: {
      const double a = prior.variance / (prior.variance + tau);
      out.mean = prior.mean + a * (r_hat - prior.mean);
      out.divergence = a;
      break;
    }
    case PriorSpec::Kind::kBinary: {
      const double x = r_hat / tau;
      out.mean = std::tanh(x);
      out.divergence = sech2(x) / tau;
      break;
    }
    case PriorSpec::Kind::kBernoulliGaussian: {
      const double s2 = prior.variance;
      const double v1 = s2 + tau;
      const double a = s2 / v1;
      double pi = 1.0;
      if (prior.nonzero_prob < 1.0) {
        const double l1 = std::log(prior.nonzero_prob) - 0.5 * std::log(v1) -
                          0.5 * r_hat * r_hat / v1;
        const double l0 = std::log1p(-prior.nonzero_prob) - 0.5 * std::log(tau) -
                          0.5 * r_hat * r_hat / tau;
        const double d = l0 - l1;
        pi = d > 0.0 ? std::exp(-d) / (1.0 + std::exp(-d)) : 1.0 / (1.0 + std::exp(d));
      }
      const double dpi = pi * (1.0 - pi) * (r_hat / tau - r_hat / v1);
      out.mean = pi * a * r_hat;
      out.divergence = a * pi + a * r_hat * dpi;
      break;
    }
  }
  return out;
}

DenoiseResult denoise_output(const ChannelSpec& channel, double y, bool observed,
                             double z_hat, double tau) {
  check_tau(tau);
  DenoiseResult out;
  if (!observed) {
    out.mean = z_hat;
    out.divergence = 1.0;
    return out;
  }
  const double p = 1.0 / tau;
  const double gw = channel.noise_precision;
  out.mean = (p * z_hat + gw * y) / (p + gw);
  out.divergence = p / (p + gw);
  return out;
}

RowDenoise denoise_rows(const PriorSpec& prior, const Mat& means, double tau) {
  check_tau(tau);
  RowDenoise out;
  out.means.resize(means.rows(), means.cols());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < means.rows(); ++i) {
    for (Eigen::Index k = 0; k < means.cols(); ++k) {
      const DenoiseResult d = denoise_prior(prior, means(i, k), tau);
      out.means(i, k) = d.mean;
      sum += d.divergence;
    }
  }
  const double count = static_cast<double>(means.size());
  out.mean_divergence = count > 0.0 ? sum / count : 0.0;
  return out;
}

}  // namespace bivamp
