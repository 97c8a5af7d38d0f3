#include "mabkit/posterior.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "mabkit/errors.hpp"

namespace mabkit {

NoiseParams NoiseParams::direct(double v) {
  if (!(v > 0.0)) throw ValidationError("noise scale v must be positive");
  NoiseParams p;
  p.direct_ = true;
  p.v_ = v;
  return p;
}

NoiseParams NoiseParams::formula(double R, double epsilon, double delta) {
  if (!(R > 0.0)) throw ValidationError("noise parameter R must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("noise parameter epsilon must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("noise parameter delta must lie in (0, 1)");
  }
  NoiseParams p;
  p.direct_ = false;
  p.R_ = R;
  p.epsilon_ = epsilon;
  p.delta_ = delta;
  return p;
}

double NoiseParams::scale_for(int d) const {
  if (d < 1) throw ValidationError("dimension must be >= 1");
  if (direct_) return v_;
  return R_ * std::sqrt(24.0 / epsilon_ * static_cast<double>(d) *
                        std::log(1.0 / delta_));
}

double noise_scale(const NoiseParams& params, int d) {
  return params.scale_for(d);
}

PosteriorState::PosteriorState(int d, double v) {
  if (d < 1) throw ValidationError("posterior dimension must be >= 1");
  if (!(v > 0.0)) throw ValidationError("noise scale v must be positive");
  gram_ = Eigen::MatrixXd::Identity(d, d);
  weighted_sum_ = Eigen::VectorXd::Zero(d);
  mean_ = Eigen::VectorXd::Zero(d);
  v_ = v;
  n_obs_ = 0;
  refresh();
}

void PosteriorState::refresh() {
  chol_.compute(gram_);
  if (chol_.info() != Eigen::Success) {
    throw InternalError("posterior Gram matrix lost positive definiteness");
  }
  mean_ = chol_.solve(weighted_sum_);
}

void PosteriorState::update(const Eigen::VectorXd& b, double reward) {
  if (b.size() != gram_.rows()) {
    throw ValidationError("feature vector dimension " +
                          std::to_string(b.size()) +
                          " does not match posterior dimension " +
                          std::to_string(gram_.rows()));
  }
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(b);
  gram_ = gram_.selfadjointView<Eigen::Lower>();
  weighted_sum_ += b * reward;
  ++n_obs_;
  refresh();
}

Eigen::VectorXd PosteriorState::sample(Rng& rng) const {
  Eigen::VectorXd z(dimension());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  // With B = L L^T, x = L^-T z has covariance B^-1.
  return mean_ + v_ * chol_.matrixU().solve(z);
}

double PosteriorState::coordinate_sd(int j) const {
  if (j < 0 || j >= dimension()) {
    throw ValidationError("coordinate index out of range");
  }
  Eigen::VectorXd e = Eigen::VectorXd::Unit(dimension(), j);
  return v_ * std::sqrt(chol_.solve(e)[j]);
}

nlohmann::json PosteriorState::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < gram_.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < gram_.cols(); ++j) row.push_back(gram_(i, j));
    rows.push_back(std::move(row));
  }
  std::vector<double> f(weighted_sum_.begin(), weighted_sum_.end());
  std::vector<double> mu(mean_.begin(), mean_.end());
  return nlohmann::json{
      {"B", rows}, {"f", f}, {"mu_hat", mu}, {"v", v_}, {"n_obs", n_obs_}};
}

PosteriorState PosteriorState::from_json(const nlohmann::json& doc) {
  if (!doc.contains("B") || !doc.contains("f") || !doc.contains("v") ||
      !doc.contains("n_obs")) {
    throw ParseError("posterior document missing B, f, v or n_obs");
  }
  const auto& rows = doc.at("B");
  const int d = static_cast<int>(rows.size());
  if (d < 1) throw ParseError("posterior document has empty B");
  PosteriorState state(d, doc.at("v").get<double>());
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) {
      throw ParseError("posterior B is not square");
    }
    for (int j = 0; j < d; ++j) {
      state.gram_(i, j) = rows[i][j].get<double>();
    }
  }
  const auto& f = doc.at("f");
  if (static_cast<int>(f.size()) != d) {
    throw ParseError("posterior f has wrong dimension");
  }
  for (int i = 0; i < d; ++i) state.weighted_sum_[i] = f[i].get<double>();
  state.n_obs_ = doc.at("n_obs").get<std::int64_t>();
  state.refresh();  // mu_hat is derived, never trusted from the document
  return state;
}

bool PosteriorState::operator==(const PosteriorState& other) const {
  return gram_ == other.gram_ && weighted_sum_ == other.weighted_sum_ &&
         v_ == other.v_ && n_obs_ == other.n_obs_;
}

PosteriorState init_posterior(int d, double v) { return PosteriorState(d, v); }

void update_posterior(PosteriorState& state, const Eigen::VectorXd& b,
                      double reward) {
  state.update(b, reward);
}

Eigen::VectorXd sample_coefficients(const PosteriorState& state, Rng& rng) {
  return state.sample(rng);
}

}  // namespace mabkit
