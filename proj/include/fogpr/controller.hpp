#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fogpr/features.hpp"
#include "fogpr/models.hpp"
#include "fogpr/online_gp.hpp"
#include "fogpr/rng.hpp"
#include "fogpr/sim.hpp"
#include "fogpr/types.hpp"

namespace fogpr {

struct ControlConfig {
    double eta = 1.0;
    int max_steps = 500;
    double success_tol = 1e-3;    // feature-space error norm
    bool explore = true;
    std::uint64_t rng_seed = 0;
    double velocity_cap = 0.01;   // meters per step

    void validate() const {
        if (!(eta > 0.0)) throw InputError("control config: eta must be > 0");
        if (!(success_tol > 0.0)) throw InputError("control config: success_tol must be > 0");
        if (!(velocity_cap > 0.0)) throw InputError("control config: velocity_cap must be > 0");
        if (max_steps < 0) throw InputError("control config: max_steps must be >= 0");
    }
};

struct StepRecord {
    int step = 0;
    Eigen::VectorXd x;
    Eigen::VectorXd delta_x;  // x_d - x
    Eigen::VectorXd command;  // delta p^m actually applied
    double posterior_var = 0.0;
    double err_norm = 0.0;
    // per-phase wall clock, microseconds
    double t_extract_us = 0.0;
    double t_predict_us = 0.0;
    double t_apply_us = 0.0;
    double t_update_us = 0.0;
};

struct TrajectoryLog {
    std::vector<StepRecord> steps;
    bool success = false;
    int steps_to_success = -1;  // commands executed before success
    double final_err = 0.0;

    // Column order is stable:
    // step,err_norm,posterior_var,t_extract_us,t_predict_us,t_apply_us,
    // t_update_us,x_0..,cmd_0..
    void write_csv(const std::string& path) const;
};

// One feedback step: query the model at eta * (x_d - x), optionally sample
// exploration noise from the posterior, clamp to the velocity cap.
std::pair<Eigen::VectorXd, Posterior> control_step(const DeformationModel& model,
                                                   const Eigen::VectorXd& x_d,
                                                   const Eigen::VectorXd& x,
                                                   const ControlConfig& cfg, Rng& rng);

std::pair<Eigen::VectorXd, Posterior> control_step(const GpState& state,
                                                   const Eigen::VectorXd& x_d,
                                                   const Eigen::VectorXd& x,
                                                   const ControlConfig& cfg, Rng& rng);

// Called after every executed command with the settled world.
using WorldObserver = std::function<void(int step, const World&)>;

// Closed servo loop: extract, predict, execute, observe, learn. Terminates
// on ||x_d - x|| <= success_tol or after max_steps commands. Pairs with a
// realized feature change below 1e-9 are not fed to the model.
TrajectoryLog run_servo_loop(World& world, const FeatureSpec& spec, const Eigen::VectorXd& x_d,
                             DeformationModel& model, const ControlConfig& cfg, Rng& rng,
                             const WorldObserver& observer = {});

// GpState-valued variant; returns the log together with the updated model.
std::pair<TrajectoryLog, GpState> run_servo_loop(World& world, const FeatureSpec& spec,
                                                 const Eigen::VectorXd& x_d, GpState state,
                                                 const ControlConfig& cfg);

// Random end-effector excitation: n accepted pairs of amplitude-scaled
// commands and their realized feature responses.
void warm_start(World& world, const FeatureSpec& spec, DeformationModel& model, int n,
                double amplitude, Rng& rng);

GpState warm_start(World& world, const FeatureSpec& spec, GpState state, int n, double amplitude,
                   Rng& rng);

}  // namespace fogpr
