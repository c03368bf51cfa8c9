#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace bivamp {

// Dense row-major storage is used for every matrix in the library.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Problem sizes: U is N x r, V is M x r, Z = U V^T is N x M.
struct ProblemDims {
  int n = 1;
  int m = 1;
  int rank = 1;

  // Throws std::invalid_argument unless N, M >= 1 and 1 <= r <= min(N, M).
  static ProblemDims make(int n, int m, int rank);

  double beta_u() const { return static_cast<double>(rank) / n; }
  double beta_v() const { return static_cast<double>(rank) / m; }
};

// Entrywise prior on the factors.
struct PriorSpec {
  enum class Kind { kGaussian, kBernoulliGaussian, kBinary };

  Kind kind = Kind::kGaussian;
  double mean = 0.0;           // Gaussian only
  double variance = 1.0;       // Gaussian and Bernoulli-Gaussian
  double nonzero_prob = 1.0;   // Bernoulli-Gaussian only

  static PriorSpec gaussian(double mean, double variance);
  static PriorSpec bernoulli_gaussian(double nonzero_prob, double variance);
  static PriorSpec binary();

  // E[x^2] under the prior.
  double second_moment() const;
  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
  std::string describe() const;
};

// Output likelihood p(y | z).
struct ChannelSpec {
  enum class Kind { kAwgn, kSelection };

  Kind kind = Kind::kAwgn;
  double noise_precision = 1.0;  // gamma_w of the stored z_true scale
  double selection_rate = 1.0;   // fraction of observed entries (Selection)
  // When set, Z = U V^T (MN)^{-1/4}, the convention of the state evolution.
  bool se_scaling = false;

  static ChannelSpec awgn(double noise_precision, bool se_scaling = false);
  static ChannelSpec selection(double rate, double noise_precision,
                               bool se_scaling = false);

  void validate() const;
  // Multiplier c in Z = c U V^T for the given sizes.
  double z_scale(const ProblemDims& dims) const;
};

// How gamma_w is derived from a requested SNR.
enum class SnrMode {
  kRealized,  // gamma_w = N M / ||Z||_F^2 * 10^(snr/10) for the drawn Z
  kExpected,  // gamma_w = 10^(snr/10) / E[z^2] from the prior moments
};

struct Instance {
  ProblemDims dims;
  Mat u_true;
  Mat v_true;
  Mat z_true;
  Mat y_obs;
  Mat mask;  // 1 = observed, 0 = missing; all ones for Awgn
  ChannelSpec channel;
  std::uint64_t seed = 0;
};

// Draws U, V, the mask and the noise from independent streams of `seed`.
Instance generate_instance(const ProblemDims& dims, const PriorSpec& prior_u,
                           const PriorSpec& prior_v, const ChannelSpec& channel,
                           double snr_db, std::uint64_t seed,
                           SnrMode snr_mode = SnrMode::kRealized);

// ||z_true - z_hat||_F / ||z_true||_F. Throws std::domain_error when
// z_true is zero.
double nrmse(const Mat& z_hat, const Mat& z_true);

// 10 log10(||z||^2 / ||w||^2); +infinity when w is zero.
double snr_db_of(const Mat& z, const Mat& w);

}  // namespace bivamp
