#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>

#include "mabkit/rng.hpp"

namespace mabkit {

/// Noise scale of the Gaussian reward model: either given directly as v, or
/// derived as v = R * sqrt((24/eps) * d * ln(1/delta)).
class NoiseParams {
 public:
  static NoiseParams direct(double v);
  static NoiseParams formula(double R, double epsilon, double delta);

  /// Resolve to a concrete scale for dimension d.
  double scale_for(int d) const;

  bool is_direct() const { return direct_; }
  double v() const { return v_; }
  double R() const { return R_; }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  NoiseParams() = default;
  bool direct_ = true;
  double v_ = 1.0;
  double R_ = 0.0, epsilon_ = 0.0, delta_ = 0.0;
};

/// Spec-level alias: resolve NoiseParams for dimension d.
double noise_scale(const NoiseParams& params, int d);

/// Gaussian posterior over the linear reward coefficients:
///
///   B = I_d + sum b b^T      (Gram matrix, prior ridge included)
///   f = sum b r              (reward-weighted feature sum)
///   mu_hat = B^-1 f
///
/// and belief N(mu_hat, v^2 B^-1). The identity start encodes the prior
/// N(0, v^2 I). A state is a plain value: copy it to branch histories.
class PosteriorState {
 public:
  /// Fresh prior state for dimension d and noise scale v.
  PosteriorState(int d, double v);

  /// Incorporate one rewarded observation. b must have dimension d.
  void update(const Eigen::VectorXd& b, double reward);

  /// One draw of the coefficient vector from N(mu_hat, v^2 B^-1).
  Eigen::VectorXd sample(Rng& rng) const;

  int dimension() const { return static_cast<int>(gram_.rows()); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& weighted_sum() const { return weighted_sum_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  double v() const { return v_; }
  std::int64_t n_obs() const { return n_obs_; }

  /// Marginal posterior sd of one coordinate: v * sqrt((B^-1)_jj).
  double coordinate_sd(int j) const;

  /// Canonical JSON document (row-major B, arrays f and mu_hat, scalars
  /// v and n_obs); round-trips exactly.
  nlohmann::json to_json() const;
  static PosteriorState from_json(const nlohmann::json& doc);

  bool operator==(const PosteriorState& other) const;

 private:
  void refresh();  // recompute Cholesky factor and mu_hat from B, f

  Eigen::MatrixXd gram_;
  Eigen::VectorXd weighted_sum_;
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double v_ = 1.0;
  std::int64_t n_obs_ = 0;
};

/// Spec-level aliases for the posterior operations.
PosteriorState init_posterior(int d, double v);
void update_posterior(PosteriorState& state, const Eigen::VectorXd& b,
                      double reward);
Eigen::VectorXd sample_coefficients(const PosteriorState& state, Rng& rng);

}  // namespace mabkit
