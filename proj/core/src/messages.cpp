#include "bivamp/messages.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bivamp/errors.hpp"

namespace bivamp {

namespace {

void require_shape(const Mat& a, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (a.rows() != rows || a.cols() != cols) {
    std::ostringstream os;
    os << "dimension error: " << name << " is " << a.rows() << "x" << a.cols()
       << ", expected " << rows << "x" << cols;
    throw std::invalid_argument(os.str());
  }
}

double symmetrize(Mat& a) {
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  a = 0.5 * (a + a.transpose()).eval();
  return asym;
}

}  // namespace

BilmmseMessages bilmmse_messages(const Mat& z_ext_plus, double gamma_z_ext_plus,
                                 const UvState& state, const ProblemDims& dims,
                                 double beta_temp, BilmmseForm form) {
  const int n = dims.n;
  const int m = dims.m;
  const int r = dims.rank;
  require_shape(z_ext_plus, n, m, "z_ext_plus");
  require_shape(state.u_post_minus, n, r, "u_post_minus");
  require_shape(state.v_post_minus, m, r, "v_post_minus");
  require_shape(state.u_post_minus_prev, n, r, "u_post_minus_prev");
  require_shape(state.v_post_minus_prev, m, r, "v_post_minus_prev");
  require_shape(state.r_u_post_minus, r, r, "r_u_post_minus");
  require_shape(state.r_v_post_minus, r, r, "r_v_post_minus");

  const Mat& u = state.u_post_minus;
  const Mat& v = state.v_post_minus;
  const Mat& ru = state.r_u_post_minus;
  const Mat& rv = state.r_v_post_minus;
  const Mat gram_u = u.transpose() * u;
  const Mat gram_v = v.transpose() * v;

  BilmmseMessages out;
  if (form == BilmmseForm::kLiteral) {
    const double g = gamma_z_ext_plus;
    const double z2 = z_ext_plus.squaredNorm() / (static_cast<double>(n) * m);
    out.b_u = g * (z_ext_plus * v - (m * g * z2) * state.u_post_minus_prev * rv);
    out.lambda_u = g * (gram_v + (m / beta_temp) * rv - (m * g * z2) * rv);
    out.b_v = g * (z_ext_plus.transpose() * u -
                   (n * g * z2) * state.v_post_minus_prev * ru);
    out.lambda_v = g * (gram_u + (n / beta_temp) * ru - (n * g * z2) * ru);
  } else {
    const double s_u = (rv * (gram_u / n + ru)).trace();
    const double s_v = (ru * (gram_v / m + rv)).trace();
    const double g_u = 1.0 / (1.0 / gamma_z_ext_plus + s_u);
    const double g_v = 1.0 / (1.0 / gamma_z_ext_plus + s_v);
    out.b_u = g_u * (z_ext_plus * v - m * state.u_post_minus_prev * rv);
    out.lambda_u = g_u * gram_v;
    out.b_v = g_v * (z_ext_plus.transpose() * u - n * state.v_post_minus_prev * ru);
    out.lambda_v = g_v * gram_u;
  }
  out.asymmetry = std::max(symmetrize(out.lambda_u), symmetrize(out.lambda_v));
  return out;
}

GaussianRows bilmmse_posterior(const Mat& b, const Mat& lambda, const Mat& ext_mean,
                               double ext_prec) {
  const Eigen::Index r = lambda.rows();
  require_shape(lambda, r, r, "lambda");
  require_shape(ext_mean, b.rows(), r, "ext_mean");
  require_shape(b, ext_mean.rows(), r, "b");
  if (!(ext_prec > 0.0) || !std::isfinite(ext_prec)) {
    throw NumericalError("numerical error: extrinsic precision must be positive");
  }
  Mat a = lambda;
  a.diagonal().array() += ext_prec;
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) {
    const Eigen::SelfAdjointEigenSolver<Mat> eig(a, Eigen::EigenvaluesOnly);
    std::ostringstream os;
    os << "numerical error: (gamma I + Lambda) is not positive definite, eigenvalues in ["
       << eig.eigenvalues().minCoeff() << ", " << eig.eigenvalues().maxCoeff() << "]";
    throw NumericalError(os.str());
  }
  GaussianRows out;
  out.cov = llt.solve(Mat::Identity(r, r));
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.mean = (b + ext_prec * ext_mean) * out.cov;
  out.residual = (out.cov * a - Mat::Identity(r, r)).cwiseAbs().maxCoeff();
  if (!out.cov.allFinite() || !out.mean.allFinite()) {
    throw NumericalError("numerical error: non-finite Bi-LMMSE posterior");
  }
  return out;
}

Extrinsic extrinsic_subtract(const Mat& post_mean, double post_prec,
                             const Mat& in_ext_mean, double in_ext_prec,
                             double gamma_min) {
  if (!(post_prec > 0.0)) {
    throw NumericalError("numerical error: posterior precision must be positive");
  }
  require_shape(in_ext_mean, post_mean.rows(), post_mean.cols(), "in_ext_mean");
  Extrinsic out;
  double prec = post_prec - in_ext_prec;
  if (prec < gamma_min || prec <= 0.0) {
    prec = std::max(gamma_min, std::numeric_limits<double>::min());
    out.clipped = true;
  }
  out.precision = prec;
  if (in_ext_prec == 0.0) {
    out.mean = post_mean * (post_prec / prec);
  } else {
    out.mean = (post_prec * post_mean - in_ext_prec * in_ext_mean) / prec;
  }
  return out;
}

Extrinsic gaussian_combine(const Mat& mean_a, double prec_a, const Mat& mean_b,
                           double prec_b) {
  require_shape(mean_b, mean_a.rows(), mean_a.cols(), "mean_b");
  Extrinsic out;
  out.precision = prec_a + prec_b;
  if (!(out.precision > 0.0)) {
    throw NumericalError("numerical error: combined precision must be positive");
  }
  out.mean = (prec_a * mean_a + prec_b * mean_b) / out.precision;
  return out;
}

double scalarize_covariance(const Mat& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw std::invalid_argument("dimension error: covariance must be square");
  }
  const double tr = cov.trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw NumericalError("numerical error: covariance trace must be positive");
  }
  return static_cast<double>(cov.rows()) / tr;
}

ZPosterior output_posterior_z(const UvState& state, const Mat& z_ext_plus,
                              double gamma_z_ext_plus, const ProblemDims& dims,
                              double beta_temp) {
  const double n = dims.n;
  const double m = dims.m;
  require_shape(z_ext_plus, dims.n, dims.m, "z_ext_plus");
  const Mat& u = state.u_post_minus;
  const Mat& v = state.v_post_minus;
  const Mat& ru = state.r_u_post_minus;
  const Mat& rv = state.r_v_post_minus;
  const double tr_uv = (ru * rv.transpose()).trace();
  const double denom = ((m * n / beta_temp) * ru * rv.transpose() +
                        n * ru * (v.transpose() * v) + m * rv * (u.transpose() * u))
                           .trace();
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw NumericalError("numerical error: output-step trace must be positive");
  }
  ZPosterior out;
  out.mean = u * v.transpose() + (gamma_z_ext_plus / beta_temp * tr_uv) * z_ext_plus;
  out.precision = gamma_z_ext_plus + m * n / denom;
  return out;
}

double product_precision(const UvState& state, const ProblemDims& dims) {
  const Mat& u = state.u_post_minus;
  const Mat& v = state.v_post_minus;
  const Mat& ru = state.r_u_post_minus;
  const Mat& rv = state.r_v_post_minus;
  const double var = (ru * rv).trace() + (ru * (v.transpose() * v)).trace() / dims.m +
                     (rv * (u.transpose() * u)).trace() / dims.n;
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw NumericalError("numerical error: product variance must be positive");
  }
  return 1.0 / var;
}

Mat damp(const Mat& next, const Mat& old, double rho) {
  if (rho == 1.0) return next;
  return rho * next + (1.0 - rho) * old;
}

double damp(double next, double old, double rho) {
  if (rho == 1.0) return next;
  return rho * next + (1.0 - rho) * old;
}

}  // namespace bivamp
