#include <cmath>

#include <boost/random/normal_distribution.hpp>
#include <gtest/gtest.h>

#include "bivamp/errors.hpp"
#include "bivamp/messages.hpp"
#include "bivamp/rng.hpp"

namespace bivamp {
namespace {

Mat random_mat(int r, int c, Engine& eng, double scale = 1.0) {
  boost::random::normal_distribution<double> n(0.0, scale);
  Mat x(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) x(i, j) = n(eng);
  }
  return x;
}

Mat random_spd(int r, Engine& eng) {
  const Mat a = random_mat(r, r, eng);
  return a * a.transpose() + Mat::Identity(r, r);
}

TEST(Extrinsic, CombineThenSubtractRecoversFactor) {
  Engine eng = make_engine(1, Stream::kSolverInit);
  const Mat a = random_mat(5, 3, eng);
  const Mat b = random_mat(5, 3, eng);
  const Extrinsic post = gaussian_combine(a, 2.0, b, 0.5);
  EXPECT_NEAR(post.precision, 2.5, 1e-15);
  const Extrinsic back = extrinsic_subtract(post.mean, post.precision, b, 0.5, 1e-11);
  EXPECT_FALSE(back.clipped);
  EXPECT_NEAR(back.precision, 2.0, 1e-14);
  EXPECT_LT((back.mean - a).norm() / a.norm(), 1e-13);
}

TEST(Extrinsic, SubtractClipsAtFloor) {
  const Mat m = Mat::Ones(2, 2);
  const Extrinsic e = extrinsic_subtract(m, 1.0, m, 2.0, 1e-3);
  EXPECT_TRUE(e.clipped);
  EXPECT_EQ(e.precision, 1e-3);
  EXPECT_TRUE(e.mean.allFinite());
}

TEST(BilmmsePosterior, MatchesDirectSolve) {
  Engine eng = make_engine(2, Stream::kSolverInit);
  const Mat lambda = random_spd(4, eng);
  const Mat b = random_mat(6, 4, eng);
  const Mat ext = random_mat(6, 4, eng);
  const GaussianRows g = bilmmse_posterior(b, lambda, ext, 0.7);
  const Mat a = 0.7 * Mat::Identity(4, 4) + lambda;
  const Mat cov = a.inverse();
  EXPECT_LT((g.cov - cov).norm(), 1e-12);
  EXPECT_LT((g.mean - (b + 0.7 * ext) * cov).norm(), 1e-12);
  EXPECT_LT(g.residual, 1e-12);
  EXPECT_LT((g.cov - g.cov.transpose()).norm(), 1e-14);
}

TEST(BilmmsePosterior, RejectsIndefiniteMatrix) {
  Mat lambda = Mat::Identity(2, 2);
  lambda(1, 1) = -5.0;
  EXPECT_THROW(bilmmse_posterior(Mat::Zero(1, 2), lambda, Mat::Zero(1, 2), 1.0),
               NumericalError);
}

TEST(ScalarizeCovariance, IsRankOverTrace) {
  Mat c = Mat::Zero(3, 3);
  c.diagonal() << 1.0, 2.0, 3.0;
  EXPECT_NEAR(scalarize_covariance(c), 3.0 / 6.0, 1e-15);
  EXPECT_THROW(scalarize_covariance(-c), NumericalError);
}

TEST(Damp, InterpolatesAndIsIdentityAtOne) {
  Mat a = Mat::Ones(2, 2);
  Mat b = Mat::Zero(2, 2);
  EXPECT_TRUE(damp(a, b, 1.0).isApprox(a));
  EXPECT_TRUE(damp(a, b, 0.25).isApprox(0.25 * a));
  EXPECT_DOUBLE_EQ(damp(4.0, 2.0, 0.5), 3.0);
}

UvState random_state(int n, int m, int r, Engine& eng) {
  UvState s;
  s.u_ext_plus = random_mat(n, r, eng);
  s.v_ext_plus = random_mat(m, r, eng);
  s.u_post_minus = random_mat(n, r, eng);
  s.v_post_minus = random_mat(m, r, eng);
  s.u_post_minus_prev = random_mat(n, r, eng);
  s.v_post_minus_prev = random_mat(m, r, eng);
  s.r_u_post_minus = 0.1 * random_spd(r, eng);
  s.r_v_post_minus = 0.1 * random_spd(r, eng);
  return s;
}

TEST(BilmmseMessages, NoiseInflatedFormMatchesDefinition) {
  Engine eng = make_engine(3, Stream::kSolverInit);
  const int n = 7, m = 5, r = 2;
  const UvState s = random_state(n, m, r, eng);
  const Mat z = random_mat(n, m, eng);
  const double gamma = 3.0;
  const ProblemDims dims{n, m, r};
  const BilmmseMessages msg =
      bilmmse_messages(z, gamma, s, dims, 1.0, BilmmseForm::kNoiseInflated);
  const Mat& u = s.u_post_minus;
  const Mat& v = s.v_post_minus;
  const double gu =
      1.0 / (1.0 / gamma +
             (s.r_v_post_minus * (u.transpose() * u / n + s.r_u_post_minus)).trace());
  const double gv =
      1.0 / (1.0 / gamma +
             (s.r_u_post_minus * (v.transpose() * v / m + s.r_v_post_minus)).trace());
  EXPECT_LT((msg.b_u - gu * (z * v - m * s.u_post_minus_prev * s.r_v_post_minus)).norm(),
            1e-10);
  EXPECT_LT((msg.lambda_u - gu * v.transpose() * v).norm(), 1e-10);
  EXPECT_LT((msg.b_v - gv * (z.transpose() * u - n * s.v_post_minus_prev * s.r_u_post_minus))
                .norm(),
            1e-10);
  EXPECT_LT((msg.lambda_v - gv * u.transpose() * u).norm(), 1e-10);
}

TEST(BilmmseMessages, LambdaIsSymmetric) {
  Engine eng = make_engine(4, Stream::kSolverInit);
  const UvState s = random_state(6, 8, 3, eng);
  const Mat z = random_mat(6, 8, eng);
  for (BilmmseForm f : {BilmmseForm::kLiteral, BilmmseForm::kNoiseInflated}) {
    const BilmmseMessages msg = bilmmse_messages(z, 2.0, s, ProblemDims{6, 8, 3}, 1.0, f);
    EXPECT_EQ((msg.lambda_u - msg.lambda_u.transpose()).norm(), 0.0);
    EXPECT_EQ((msg.lambda_v - msg.lambda_v.transpose()).norm(), 0.0);
  }
}

TEST(ProductPrecision, MatchesDefinition) {
  Engine eng = make_engine(5, Stream::kSolverInit);
  const int n = 9, m = 4, r = 2;
  const UvState s = random_state(n, m, r, eng);
  const Mat& u = s.u_post_minus;
  const Mat& v = s.v_post_minus;
  const double expect =
      1.0 / ((s.r_u_post_minus * s.r_v_post_minus).trace() +
             (s.r_u_post_minus * v.transpose() * v).trace() / m +
             (s.r_v_post_minus * u.transpose() * u).trace() / n);
  EXPECT_NEAR(product_precision(s, ProblemDims{n, m, r}), expect, 1e-12 * expect);
}

TEST(OutputPosteriorZ, PrecisionExceedsIncomingPrecision) {
  Engine eng = make_engine(6, Stream::kSolverInit);
  const UvState s = random_state(5, 6, 2, eng);
  const ZPosterior zp = output_posterior_z(s, random_mat(5, 6, eng), 1.5, ProblemDims{5, 6, 2});
  EXPECT_GT(zp.precision, 1.5);
  EXPECT_TRUE(zp.mean.allFinite());
}

}  // namespace
}  // namespace bivamp
