#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>

#include "fogpr/online_gp.hpp"
#include "fogpr/types.hpp"

namespace fogpr {

// Common surface for the deformation-function learners driven by the servo
// loop: the online engine and the comparison baselines.
class DeformationModel {
public:
    virtual ~DeformationModel() = default;
    virtual Posterior predict(const Eigen::VectorXd& query) const = 0;
    virtual void observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) = 0;
    virtual std::string name() const = 0;
};

// Bounded-memory online GP (the production model).
class FoGprModel : public DeformationModel {
public:
    FoGprModel(Eigen::Index input_dim, Eigen::Index output_dim, const Hyperparams& hp)
        : state_(make_gp_state(input_dim, output_dim, hp)) {}
    explicit FoGprModel(GpState state) : state_(std::move(state)) {}

    Posterior predict(const Eigen::VectorXd& query) const override {
        return fogpr::predict(state_, query);
    }
    void observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) override {
        state_ = add_observation(state_, dx_obs, command);
    }
    std::string name() const override { return "fo_gpr"; }

    const GpState& state() const { return state_; }

private:
    GpState state_;
};

// Unbounded GP: same incremental growth, no capacity cap, never forgets.
// Below the online engine's capacity the two are the same computation.
class StandardGprModel : public DeformationModel {
public:
    StandardGprModel(Eigen::Index input_dim, Eigen::Index output_dim, Hyperparams hp);

    Posterior predict(const Eigen::VectorXd& query) const override;
    void observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) override;
    std::string name() const override { return "standard_gpr"; }

    const GpState& state() const { return state_; }

private:
    GpState state_;
};

// Online GP frozen after `freeze_at` observations: later data is discarded.
class OfflineGprModel : public DeformationModel {
public:
    OfflineGprModel(Eigen::Index input_dim, Eigen::Index output_dim, const Hyperparams& hp,
                    long freeze_at);

    Posterior predict(const Eigen::VectorXd& query) const override;
    void observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) override;
    std::string name() const override { return "offline_gpr"; }

    long observed() const { return observed_; }

private:
    GpState state_;
    long freeze_at_;
    long observed_ = 0;
};

// Adaptive linear deformation model: W updated by the stochastic-gradient
// rule W += rate * (command - W dx) dx^T; predictions carry no uncertainty.
class LinearModel : public DeformationModel {
public:
    LinearModel(Eigen::Index input_dim, Eigen::Index output_dim, double learning_rate);

    Posterior predict(const Eigen::VectorXd& query) const override;
    void observe(const Eigen::VectorXd& dx_obs, const Eigen::VectorXd& command) override;
    std::string name() const override { return "linear"; }

    const Eigen::MatrixXd& weights() const { return weights_; }

private:
    Eigen::MatrixXd weights_;
    double learning_rate_;
};

}  // namespace fogpr
