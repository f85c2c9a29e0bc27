#include "glplan/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace glplan {

namespace {

constexpr double kWeightTolerance = 1e-9;
constexpr double kMinEigenvalue = 1e-8;
constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::VectorXd to_eigen(const Configuration& q) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(q.dof()));
  for (std::size_t i = 0; i < q.dof(); ++i) v[static_cast<Eigen::Index>(i)] = q[i];
  return v;
}

}  // namespace

Configuration sample_uniform(const std::vector<JointLimits>& limits, RandomStream& rng) {
  if (limits.empty()) throw std::invalid_argument("sample_uniform: no joint limits");
  Configuration q;
  q.angles.reserve(limits.size());
  for (const JointLimits& l : limits) q.angles.push_back(rng.uniform(l.lo, l.hi));
  return q;
}

Mixture Mixture::with_sigma(Configuration mean, double sigma) {
  Mixture m;
  m.mean = std::move(mean);
  m.isotropic = true;
  m.sigma = sigma;
  return m;
}

Mixture Mixture::with_covariance(Configuration mean, Eigen::MatrixXd covariance) {
  Mixture m;
  m.mean = std::move(mean);
  m.isotropic = false;
  m.covariance = std::move(covariance);
  return m;
}

GmmSampler::GmmSampler(std::vector<Mixture> mixtures, std::vector<double> weights)
    : mixtures_(std::move(mixtures)), weights_(std::move(weights)) {
  if (mixtures_.empty()) throw std::invalid_argument("GmmSampler: needs at least one mixture");
  if (mixtures_.size() != weights_.size()) {
    throw std::invalid_argument("GmmSampler: mixture/weight count mismatch");
  }
  const std::size_t dof = mixtures_.front().mean.dof();
  double sum = 0.0;
  for (double w : weights_) {
    if (w <= 0.0) throw std::invalid_argument("GmmSampler: weights must be positive");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("GmmSampler: weights sum to " + std::to_string(sum));
  }

  chol_.reserve(mixtures_.size());
  log_norm_.reserve(mixtures_.size());
  const double k = static_cast<double>(dof);
  for (const Mixture& m : mixtures_) {
    if (m.mean.dof() != dof) throw std::invalid_argument("GmmSampler: mean dimension mismatch");
    if (m.isotropic) {
      if (m.sigma * m.sigma < kMinEigenvalue) {
        throw std::invalid_argument("GmmSampler: sigma below eigenvalue floor");
      }
      chol_.emplace_back();
      log_norm_.push_back(-0.5 * k * kLog2Pi - k * std::log(m.sigma));
    } else {
      const auto n = static_cast<Eigen::Index>(dof);
      if (m.covariance.rows() != n || m.covariance.cols() != n) {
        throw std::invalid_argument("GmmSampler: covariance dimension mismatch");
      }
      if (!m.covariance.isApprox(m.covariance.transpose(), 1e-9)) {
        throw std::invalid_argument("GmmSampler: covariance not symmetric");
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.covariance);
      if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < kMinEigenvalue) {
        throw std::invalid_argument("GmmSampler: covariance eigenvalue below 1e-8");
      }
      Eigen::LLT<Eigen::MatrixXd> llt(m.covariance);
      if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("GmmSampler: covariance not positive definite");
      }
      chol_.push_back(llt.matrixL());
      double log_det = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(chol_.back()(i, i));
      log_norm_.push_back(-0.5 * k * kLog2Pi - 0.5 * log_det);
    }
  }
}

GmmSampler GmmSampler::equal_weights(std::vector<Mixture> mixtures) {
  const std::size_t m = mixtures.size();
  if (m == 0) throw std::invalid_argument("GmmSampler: needs at least one mixture");
  return GmmSampler(std::move(mixtures), std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Configuration GmmSampler::sample(const std::vector<JointLimits>& limits, RandomStream& rng) const {
  const std::size_t idx = rng.weighted_index(weights_);
  const Mixture& m = mixtures_[idx];
  const std::size_t dof = m.mean.dof();
  Configuration q = m.mean;
  if (m.isotropic) {
    for (std::size_t i = 0; i < dof; ++i) q[i] += m.sigma * rng.normal();
  } else {
    Eigen::VectorXd z(static_cast<Eigen::Index>(dof));
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const Eigen::VectorXd d = chol_[idx] * z;
    for (std::size_t i = 0; i < dof; ++i) q[i] += d[static_cast<Eigen::Index>(i)];
  }
  for (std::size_t i = 0; i < dof; ++i) q[i] = limits[i].clamp(wrap_angle(q[i]));
  return q;
}

double GmmSampler::density(const Configuration& q) const {
  const Eigen::VectorXd x = to_eigen(q);
  double p = 0.0;
  for (std::size_t j = 0; j < mixtures_.size(); ++j) {
    const Mixture& m = mixtures_[j];
    const Eigen::VectorXd d = x - to_eigen(m.mean);
    double quad;
    if (m.isotropic) {
      quad = d.squaredNorm() / (m.sigma * m.sigma);
    } else {
      const Eigen::VectorXd y = chol_[j].triangularView<Eigen::Lower>().solve(d);
      quad = y.squaredNorm();
    }
    p += weights_[j] * std::exp(log_norm_[j] - 0.5 * quad);
  }
  return p;
}

SynthesizedSampler::SynthesizedSampler(std::vector<GmmSampler> locals)
    : locals_(std::move(locals)) {
  if (locals_.empty()) {
    throw std::invalid_argument("SynthesizedSampler: needs at least one local sampler");
  }
  double total = 0.0;
  for (const GmmSampler& g : locals_) total += static_cast<double>(g.mixture_count());
  local_weights_.reserve(locals_.size());
  for (const GmmSampler& g : locals_) {
    local_weights_.push_back(static_cast<double>(g.mixture_count()) / total);
  }
}

Configuration SynthesizedSampler::sample(const std::vector<JointLimits>& limits,
                                         RandomStream& rng) const {
  return locals_[rng.weighted_index(local_weights_)].sample(limits, rng);
}

double SynthesizedSampler::density(const Configuration& q) const {
  double p = 0.0;
  for (std::size_t i = 0; i < locals_.size(); ++i) {
    p += local_weights_[i] * locals_[i].density(q);
  }
  return p;
}

SynthesizedSampler synthesize(std::vector<GmmSampler> locals) {
  return SynthesizedSampler(std::move(locals));
}

GlSampler::GlSampler(std::optional<SynthesizedSampler> global, double lambda,
                     std::vector<JointLimits> joint_limits)
    : global_(std::move(global)), lambda_(lambda), limits_(std::move(joint_limits)) {
  if (lambda_ < 0.0 || lambda_ > 1.0) {
    throw std::invalid_argument("GlSampler: lambda must be in [0, 1]");
  }
  if (limits_.empty()) throw std::invalid_argument("GlSampler: no joint limits");
}

GlSampler GlSampler::uniform_only(std::vector<JointLimits> joint_limits) {
  return GlSampler(std::nullopt, 0.0, std::move(joint_limits));
}

Configuration GlSampler::sample(RandomStream& rng, bool* biased) const {
  // The branch decision always consumes exactly one draw, so a lambda = 0
  // sampler replays the same stream as a plain uniform one.
  const double u = rng.uniform01();
  const bool take_biased = global_.has_value() && lambda_ > 0.0 && u <= lambda_;
  if (biased) *biased = take_biased;
  if (take_biased) return global_->sample(limits_, rng);
  return sample_uniform(limits_, rng);
}

}  // namespace glplan
