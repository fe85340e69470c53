#include "fogpr/models.hpp"

#include <limits>

namespace fogpr {

namespace {

Hyperparams uncapped(Hyperparams hp) {
    hp.max_size = std::numeric_limits<int>::max();
    return hp;
}

}  // namespace

StandardGprModel::StandardGprModel(Eigen::Index input_dim, Eigen::Index output_dim,
                                   Hyperparams hp)
    : state_(make_gp_state(input_dim, output_dim, uncapped(hp))) {}

Posterior StandardGprModel::predict(const Eigen::VectorXd& query) const {
    return fogpr::predict(state_, query);
}

void StandardGprModel::observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) {
    state_ = add_observation(state_, dx_obs, command);
}

OfflineGprModel::OfflineGprModel(Eigen::Index input_dim, Eigen::Index output_dim,
                                 const Hyperparams& hp, long freeze_at)
    : state_(make_gp_state(input_dim, output_dim, hp)), freeze_at_(freeze_at) {
    if (freeze_at < 1) throw InputError("offline gpr: freeze_at must be >= 1");
}

Posterior OfflineGprModel::predict(const Eigen::VectorXd& query) const {
    return fogpr::predict(state_, query);
}

void OfflineGprModel::observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) {
    if (observed_ >= freeze_at_) return;  // frozen: the Gram no longer changes
    state_ = add_observation(state_, dx_obs, command);
    ++observed_;
}

LinearModel::LinearModel(Eigen::Index input_dim, Eigen::Index output_dim, double learning_rate)
    : weights_(Eigen::MatrixXd::Zero(output_dim, input_dim)), learning_rate_(learning_rate) {
    if (!(learning_rate > 0.0)) throw InputError("linear model: learning_rate must be > 0");
}

Posterior LinearModel::predict(const Eigen::VectorXd& query) const {
    if (query.size() != weights_.cols())
        throw InputError("linear model: query dimension mismatch");
    Posterior post;
    post.mu = weights_ * query;
    post.var = 0.0;
    return post;
}

void LinearModel::observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) {
    if (dx_obs.size() != weights_.cols() || command.size() != weights_.rows())
        throw InputError("linear model: observation dimension mismatch");
    weights_ += learning_rate_ * (command - weights_ * dx_obs) * dx_obs.transpose();
}

}  // namespace fogpr
