#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "glplan/geometry.hpp"
#include "glplan/random.hpp"

namespace glplan {

/// Isotropic mixture standard deviation used when a clique is too small to
/// fit a covariance, radians.
inline constexpr double kDefaultSigma = 0.1;

/// Probability of drawing from the synthesized sampler instead of uniform.
inline constexpr double kDefaultLambda = 0.5;

Configuration sample_uniform(const std::vector<JointLimits>& limits, RandomStream& rng);

/// One Gaussian mixture component over configurations. Covariance is either
/// isotropic sigma^2*I or a fitted full matrix.
struct Mixture {
  Configuration mean;
  bool isotropic = true;
  double sigma = kDefaultSigma;
  Eigen::MatrixXd covariance;  // dof x dof, used when !isotropic

  static Mixture with_sigma(Configuration mean, double sigma);
  static Mixture with_covariance(Configuration mean, Eigen::MatrixXd covariance);
};

/// Gaussian mixture over the C-space of one local primitive.
///
/// Invariants checked on construction: at least one mixture, weights positive
/// and summing to 1 within 1e-9, covariance eigenvalues >= 1e-8.
class GmmSampler {
 public:
  GmmSampler(std::vector<Mixture> mixtures, std::vector<double> weights);

  /// Equal-weight mixture, one component per configuration.
  static GmmSampler equal_weights(std::vector<Mixture> mixtures);

  std::size_t mixture_count() const { return mixtures_.size(); }
  const std::vector<Mixture>& mixtures() const { return mixtures_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Draws a mixture index by weight, then a Gaussian sample, wrapped to
  /// (-pi, pi] per joint and clamped into the joint limits.
  Configuration sample(const std::vector<JointLimits>& limits, RandomStream& rng) const;

  /// Mixture-weighted Gaussian density at q (diagnostics and tests).
  double density(const Configuration& q) const;

 private:
  std::vector<Mixture> mixtures_;
  std::vector<double> weights_;
  std::vector<Eigen::MatrixXd> chol_;  // lower Cholesky factor per mixture
  std::vector<double> log_norm_;       // -(k/2)log(2pi) - (1/2)log|Sigma|
};

/// Weighted combination of the retrieved local samplers; the global biased
/// distribution for one world.
class SynthesizedSampler {
 public:
  /// Weights each local sampler by its mixture count, a_i = M_i / sum_k M_k,
  /// which makes the result one flat GMM over all components.
  explicit SynthesizedSampler(std::vector<GmmSampler> locals);

  std::size_t primitive_count() const { return locals_.size(); }
  const std::vector<GmmSampler>& locals() const { return locals_; }
  const std::vector<double>& local_weights() const { return local_weights_; }

  Configuration sample(const std::vector<JointLimits>& limits, RandomStream& rng) const;
  double density(const Configuration& q) const;

 private:
  std::vector<GmmSampler> locals_;
  std::vector<double> local_weights_;
};

SynthesizedSampler synthesize(std::vector<GmmSampler> locals);

/// The lambda-mixed sampler fed to the planners: with probability lambda a
/// draw comes from the synthesized sampler, otherwise from uniform. Without a
/// synthesized sampler the effective lambda is 0.
class GlSampler {
 public:
  GlSampler(std::optional<SynthesizedSampler> global, double lambda,
            std::vector<JointLimits> joint_limits);

  /// Pure uniform sampler over the given limits.
  static GlSampler uniform_only(std::vector<JointLimits> joint_limits);

  double lambda() const { return lambda_; }
  double effective_lambda() const { return global_ ? lambda_ : 0.0; }
  bool has_global() const { return global_.has_value(); }
  const std::optional<SynthesizedSampler>& global() const { return global_; }
  const std::vector<JointLimits>& joint_limits() const { return limits_; }

  /// Draws one configuration; *biased reports whether the synthesized branch
  /// was taken. The branch decision is made per sample.
  Configuration sample(RandomStream& rng, bool* biased = nullptr) const;

 private:
  std::optional<SynthesizedSampler> global_;
  double lambda_;
  std::vector<JointLimits> limits_;
};

}  // namespace glplan
