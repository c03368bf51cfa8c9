#include "bivamp/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "bivamp/rng.hpp"

namespace bivamp {

ProblemDims ProblemDims::make(int n, int m, int rank) {
  if (n < 1 || m < 1) {
    throw std::invalid_argument("dimension error: N and M must be >= 1");
  }
  if (rank < 1 || rank > std::min(n, m)) {
    throw std::invalid_argument("dimension error: rank must lie in [1, min(N, M)]");
  }
  return ProblemDims{n, m, rank};
}

PriorSpec PriorSpec::gaussian(double mean, double variance) {
  PriorSpec p;
  p.kind = Kind::kGaussian;
  p.mean = mean;
  p.variance = variance;
  p.validate();
  return p;
}

PriorSpec PriorSpec::bernoulli_gaussian(double nonzero_prob, double variance) {
  PriorSpec p;
  p.kind = Kind::kBernoulliGaussian;
  p.nonzero_prob = nonzero_prob;
  p.variance = variance;
  p.validate();
  return p;
}

PriorSpec PriorSpec::binary() {
  PriorSpec p;
  p.kind = Kind::kBinary;
  return p;
}

double PriorSpec::second_moment() const {
  switch (kind) {
    case Kind::kGaussian:
      return mean * mean + variance;
    case Kind::kBernoulliGaussian:
      return nonzero_prob * variance;
    case Kind::kBinary:
      return 1.0;
  }
  return 0.0;
}

void PriorSpec::validate() const {
  if (kind != Kind::kBinary && !(variance > 0.0 && std::isfinite(variance))) {
    throw std::invalid_argument("parameter error: prior variance must be positive");
  }
  if (kind == Kind::kBernoulliGaussian && !(nonzero_prob > 0.0 && nonzero_prob <= 1.0)) {
    throw std::invalid_argument("parameter error: nonzero probability must lie in (0, 1]");
  }
  if (kind == Kind::kGaussian && !std::isfinite(mean)) {
    throw std::invalid_argument("parameter error: prior mean must be finite");
  }
}

std::string PriorSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kGaussian:
      os << "gaussian(" << mean << "," << variance << ")";
      break;
    case Kind::kBernoulliGaussian:
      os << "bg(" << nonzero_prob << "," << variance << ")";
      break;
    case Kind::kBinary:
      os << "binary";
      break;
  }
  return os.str();
}

ChannelSpec ChannelSpec::awgn(double noise_precision, bool se_scaling) {
  ChannelSpec c;
  c.kind = Kind::kAwgn;
  c.noise_precision = noise_precision;
  c.se_scaling = se_scaling;
  c.validate();
  return c;
}

ChannelSpec ChannelSpec::selection(double rate, double noise_precision,
                                   bool se_scaling) {
  ChannelSpec c;
  c.kind = Kind::kSelection;
  c.selection_rate = rate;
  c.noise_precision = noise_precision;
  c.se_scaling = se_scaling;
  c.validate();
  return c;
}

void ChannelSpec::validate() const {
  if (!(noise_precision > 0.0)) {
    throw std::invalid_argument("parameter error: noise precision must be positive");
  }
  if (kind == Kind::kSelection && !(selection_rate > 0.0 && selection_rate <= 1.0)) {
    throw std::invalid_argument("parameter error: selection rate must lie in (0, 1]");
  }
}

double ChannelSpec::z_scale(const ProblemDims& dims) const {
  if (!se_scaling) return 1.0;
  return std::pow(static_cast<double>(dims.n) * dims.m, -0.25);
}

namespace {

Mat sample_factor(const PriorSpec& prior, int rows, int cols, Engine& engine) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  boost::random::uniform_01<double> uniform;
  Mat x(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) {
      switch (prior.kind) {
        case PriorSpec::Kind::kGaussian:
          x(i, k) = prior.mean + std::sqrt(prior.variance) * normal(engine);
          break;
        case PriorSpec::Kind::kBernoulliGaussian: {
          const double u = uniform(engine);
          const double g = normal(engine);
          x(i, k) = u < prior.nonzero_prob ? std::sqrt(prior.variance) * g : 0.0;
          break;
        }
        case PriorSpec::Kind::kBinary:
          x(i, k) = uniform(engine) < 0.5 ? -1.0 : 1.0;
          break;
      }
    }
  }
  return x;
}

double expected_z_power(const ProblemDims& dims, const PriorSpec& pu,
                        const PriorSpec& pv, double c) {
  const double mu_u = pu.kind == PriorSpec::Kind::kGaussian ? pu.mean : 0.0;
  const double mu_v = pv.kind == PriorSpec::Kind::kGaussian ? pv.mean : 0.0;
  const double r = dims.rank;
  return c * c *
         (r * pu.second_moment() * pv.second_moment() +
          r * (r - 1.0) * mu_u * mu_u * mu_v * mu_v);
}

}  // namespace

Instance generate_instance(const ProblemDims& dims, const PriorSpec& prior_u,
                           const PriorSpec& prior_v, const ChannelSpec& channel,
                           double snr_db, std::uint64_t seed, SnrMode snr_mode) {
  ProblemDims::make(dims.n, dims.m, dims.rank);
  prior_u.validate();
  prior_v.validate();
  if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("parameter error: snr_db must be finite");
  }

  Instance inst;
  inst.dims = dims;
  inst.seed = seed;
  inst.channel = channel;

  Engine eng_u = make_engine(seed, Stream::kFactorU);
  Engine eng_v = make_engine(seed, Stream::kFactorV);
  inst.u_true = sample_factor(prior_u, dims.n, dims.rank, eng_u);
  inst.v_true = sample_factor(prior_v, dims.m, dims.rank, eng_v);

  const double c = channel.z_scale(dims);
  inst.z_true = c * (inst.u_true * inst.v_true.transpose());

  const double ratio = std::pow(10.0, snr_db / 10.0);
  double power = 0.0;
  if (snr_mode == SnrMode::kRealized) {
    power = inst.z_true.squaredNorm() / (static_cast<double>(dims.n) * dims.m);
  } else {
    power = expected_z_power(dims, prior_u, prior_v, c);
  }
  const double gamma_w = ratio / power;
  if (!(gamma_w > 0.0) || !std::isfinite(gamma_w)) {
    throw std::invalid_argument("parameter error: SNR implies a non-positive noise precision");
  }
  inst.channel.noise_precision = gamma_w;

  Engine eng_w = make_engine(seed, Stream::kNoise);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double sd = 1.0 / std::sqrt(gamma_w);
  Mat w(dims.n, dims.m);
  for (int i = 0; i < dims.n; ++i) {
    for (int j = 0; j < dims.m; ++j) w(i, j) = sd * normal(eng_w);
  }

  inst.mask = Mat::Ones(dims.n, dims.m);
  if (channel.kind == ChannelSpec::Kind::kSelection) {
    Engine eng_m = make_engine(seed, Stream::kMask);
    boost::random::uniform_01<double> uniform;
    for (int i = 0; i < dims.n; ++i) {
      for (int j = 0; j < dims.m; ++j) {
        inst.mask(i, j) = uniform(eng_m) < channel.selection_rate ? 1.0 : 0.0;
      }
    }
  }
  inst.y_obs = (inst.z_true + w).cwiseProduct(inst.mask);
  return inst;
}

double nrmse(const Mat& z_hat, const Mat& z_true) {
  if (z_hat.rows() != z_true.rows() || z_hat.cols() != z_true.cols()) {
    throw std::invalid_argument("dimension error: nrmse shapes differ");
  }
  const double denom = z_true.norm();
  if (!(denom > 0.0)) {
    throw std::domain_error("undefined metric: reference matrix has zero norm");
  }
  return (z_true - z_hat).norm() / denom;
}

double snr_db_of(const Mat& z, const Mat& w) {
  if (z.rows() != w.rows() || z.cols() != w.cols()) {
    throw std::invalid_argument("dimension error: snr_db_of shapes differ");
  }
  const double wn = w.squaredNorm();
  if (wn == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(z.squaredNorm() / wn);
}

}  // namespace bivamp
