#include <cmath>

#include <gtest/gtest.h>

#include "bivamp/model.hpp"

namespace bivamp {
namespace {

TEST(ProblemDims, RejectsInvalidSizes) {
  EXPECT_THROW(ProblemDims::make(0, 5, 1), std::invalid_argument);
  EXPECT_THROW(ProblemDims::make(5, 5, 0), std::invalid_argument);
  EXPECT_THROW(ProblemDims::make(5, 3, 4), std::invalid_argument);
  EXPECT_NO_THROW(ProblemDims::make(5, 3, 3));
}

TEST(PriorSpec, RejectsInvalidParameters) {
  EXPECT_THROW(PriorSpec::gaussian(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(PriorSpec::bernoulli_gaussian(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(PriorSpec::bernoulli_gaussian(1.5, 1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(PriorSpec::bernoulli_gaussian(0.05, 2.0).second_moment(), 0.1);
  EXPECT_DOUBLE_EQ(PriorSpec::gaussian(1.0, 2.0).second_moment(), 3.0);
}

TEST(ChannelSpec, ScaleFollowsConvention) {
  const ProblemDims d{16, 4, 2};
  EXPECT_EQ(ChannelSpec::awgn(1.0).z_scale(d), 1.0);
  EXPECT_NEAR(ChannelSpec::awgn(1.0, true).z_scale(d), 1.0 / std::sqrt(8.0), 1e-15);
  EXPECT_THROW(ChannelSpec::selection(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ChannelSpec::awgn(-1.0), std::invalid_argument);
}

TEST(GenerateInstance, RealizedSnrIsExact) {
  const ProblemDims d{60, 40, 3};
  const Instance inst = generate_instance(d, PriorSpec::gaussian(0, 1), PriorSpec::binary(),
                                          ChannelSpec::awgn(1.0, true), 17.0, 5);
  const double power = inst.z_true.squaredNorm() / (60.0 * 40.0);
  EXPECT_NEAR(10.0 * std::log10(power * inst.channel.noise_precision), 17.0, 1e-10);
  EXPECT_NEAR(snr_db_of(inst.z_true, inst.y_obs - inst.z_true), 17.0, 0.5);
}

TEST(GenerateInstance, ProductAndShapes) {
  const ProblemDims d{20, 10, 4};
  const double c = std::pow(200.0, -0.25);
  const Instance inst = generate_instance(d, PriorSpec::binary(),
                                          PriorSpec::bernoulli_gaussian(0.3, 1.0),
                                          ChannelSpec::awgn(1.0, true), 10.0, 1);
  EXPECT_EQ(inst.u_true.rows(), 20);
  EXPECT_EQ(inst.v_true.rows(), 10);
  EXPECT_LT((inst.z_true - c * inst.u_true * inst.v_true.transpose()).norm(), 1e-12);
  EXPECT_TRUE((inst.u_true.array().abs() == 1.0).all());
}

TEST(GenerateInstance, IsDeterministicAndStreamsAreIndependent) {
  const ProblemDims d{30, 20, 2};
  const auto pu = PriorSpec::gaussian(0, 1);
  const auto pv = PriorSpec::gaussian(0, 1);
  const Instance a = generate_instance(d, pu, pv, ChannelSpec::selection(0.3, 1.0), 10, 9);
  const Instance b = generate_instance(d, pu, pv, ChannelSpec::selection(0.3, 1.0), 10, 9);
  const Instance c = generate_instance(d, pu, pv, ChannelSpec::selection(0.8, 1.0), 10, 9);
  const Instance e = generate_instance(d, pu, pv, ChannelSpec::selection(0.3, 1.0), 10, 10);
  EXPECT_EQ(a.y_obs, b.y_obs);
  EXPECT_EQ(a.u_true, c.u_true);
  EXPECT_EQ(a.v_true, c.v_true);
  EXPECT_NE(a.mask, c.mask);
  EXPECT_NE(a.u_true, e.u_true);
}

TEST(GenerateInstance, SelectionMaskZeroesUnobserved) {
  const Instance inst =
      generate_instance(ProblemDims{100, 80, 2}, PriorSpec::gaussian(0, 1),
                        PriorSpec::gaussian(0, 1), ChannelSpec::selection(0.2, 1.0), 10, 3);
  EXPECT_TRUE((inst.y_obs.array() * (1.0 - inst.mask.array()) == 0.0).all());
  EXPECT_NEAR(inst.mask.mean(), 0.2, 0.02);
}

TEST(Nrmse, BasicProperties) {
  Mat z = Mat::Ones(3, 3);
  EXPECT_EQ(nrmse(z, z), 0.0);
  EXPECT_NEAR(nrmse(Mat::Zero(3, 3), z), 1.0, 1e-15);
  EXPECT_NEAR(nrmse(-z, z), 2.0, 1e-15);
  EXPECT_THROW(nrmse(z, Mat::Zero(3, 3)), std::domain_error);
  EXPECT_THROW(nrmse(z, Mat::Ones(2, 3)), std::invalid_argument);
}

}  // namespace
}  // namespace bivamp
