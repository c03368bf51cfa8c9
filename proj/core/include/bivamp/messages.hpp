#pragma once

#include "bivamp/model.hpp"

namespace bivamp {

// Form of the Bi-LMMSE messages B and Lambda.
enum class BilmmseForm {
  // gamma (Z V - M gamma <Z.Z> U_prev R_V) and
  // gamma (V^T V + (M / beta) R_V - M gamma <Z.Z> R_V).
  kLiteral,
  // The partner factor's uncertainty is folded into an effective noise
  // precision gamma_eff = 1 / (1 / gamma + Tr(R_V (U^T U / N + R_U))), giving
  // gamma_eff (Z V - M U_prev R_V) and gamma_eff V^T V.
  kNoiseInflated,
};

// Extrinsic message sent from the Bi-LMMSE block to the output block.
enum class ZExtrinsicForm {
  // Gaussian division of the Z- posterior by the incoming Z+ message.
  kLiteral,
  // Mean U V^T with the precision of the product of the two row posteriors,
  // 1 / [Tr(R_U R_V) + Tr(R_U V^T V) / M + Tr(R_V U^T U) / N].
  kProduct,
};

// Reduction of per-entry posterior precisions of Z to one scalar.
enum class PrecisionAveraging { kArithmetic, kHarmonic };

// Row messages of U and V. Precisions are scalars; the posterior covariances
// of the Bi-LMMSE block are r x r.
struct UvState {
  Mat u_ext_plus;
  double gamma_u_ext_plus = 1.0;
  Mat v_ext_plus;
  double gamma_v_ext_plus = 1.0;

  Mat u_post_minus;
  Mat r_u_post_minus;
  Mat v_post_minus;
  Mat r_v_post_minus;
  Mat u_post_minus_prev;
  Mat v_post_minus_prev;

  Mat u_ext_minus;
  double gamma_u_ext_minus = 1.0;
  Mat v_ext_minus;
  double gamma_v_ext_minus = 1.0;

  Mat u_post_plus;
  double gamma_u_post_plus = 1.0;
  Mat v_post_plus;
  double gamma_v_post_plus = 1.0;
};

struct ZState {
  Mat z_ext_plus;
  double gamma_z_ext_plus = 1.0;
  Mat z_post_minus;
  double gamma_z_post_minus = 1.0;
  Mat z_ext_minus;
  double gamma_z_ext_minus = 1.0;
  Mat z_post_plus;
  double gamma_z_post_plus = 1.0;
};

struct BilmmseMessages {
  Mat b_u;
  Mat lambda_u;
  Mat b_v;
  Mat lambda_v;
  // Largest |L - L^T| entry before symmetrization.
  double asymmetry = 0.0;
};

BilmmseMessages bilmmse_messages(const Mat& z_ext_plus, double gamma_z_ext_plus,
                                 const UvState& state, const ProblemDims& dims,
                                 double beta_temp = 1.0,
                                 BilmmseForm form = BilmmseForm::kLiteral);

struct GaussianRows {
  Mat mean;
  Mat cov;
  // max |cov (ext_prec I + Lambda) - I|.
  double residual = 0.0;
};

// cov = (ext_prec I + Lambda)^-1 and mean = (B + ext_prec ext_mean) cov.
// Throws NumericalError when the matrix is not positive definite.
GaussianRows bilmmse_posterior(const Mat& b, const Mat& lambda, const Mat& ext_mean,
                               double ext_prec);

struct Extrinsic {
  Mat mean;
  double precision = 0.0;
  bool clipped = false;
};

// Gaussian division: precision post - in, floored at gamma_min, and mean
// (post_prec post_mean - in_prec in_mean) / precision.
Extrinsic extrinsic_subtract(const Mat& post_mean, double post_prec,
                             const Mat& in_ext_mean, double in_ext_prec,
                             double gamma_min);

// Gaussian product of two messages; the inverse of extrinsic_subtract.
Extrinsic gaussian_combine(const Mat& mean_a, double prec_a, const Mat& mean_b,
                           double prec_b);

// r / Tr(cov). Throws NumericalError for a nonpositive trace.
double scalarize_covariance(const Mat& cov);

struct ZPosterior {
  Mat mean;
  double precision = 0.0;
};

// Z- posterior of the output step:
//   mean = U V^T + (gamma / beta) Z+e Tr(R_U R_V^T),
//   prec = gamma + M N / Tr((M N / beta) R_U R_V^T + N R_U V^T V + M R_V U^T U).
ZPosterior output_posterior_z(const UvState& state, const Mat& z_ext_plus,
                              double gamma_z_ext_plus, const ProblemDims& dims,
                              double beta_temp = 1.0);

// Precision of U V^T under the row posteriors,
// 1 / [Tr(R_U R_V) + Tr(R_U V^T V) / M + Tr(R_V U^T U) / N].
double product_precision(const UvState& state, const ProblemDims& dims);

// rho new + (1 - rho) old.
Mat damp(const Mat& next, const Mat& old, double rho);
double damp(double next, double old, double rho);

}  // namespace bivamp
