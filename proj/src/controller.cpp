#include "fogpr/controller.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fogpr/log.hpp"

namespace fogpr {

namespace {

constexpr double kMinFeatureChange = 1e-9;

double us_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
        .count();
}

void append_double(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += ',';
    line += buf;
}

}  // namespace

void TrajectoryLog::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("trajectory log: cannot open '" + path + "' for writing");
    const Eigen::Index x_dim = steps.empty() ? 0 : steps.front().x.size();
    const Eigen::Index cmd_dim = steps.empty() ? 0 : steps.front().command.size();
    out << "step,err_norm,posterior_var,t_extract_us,t_predict_us,t_apply_us,t_update_us";
    for (Eigen::Index i = 0; i < x_dim; ++i) out << ",x_" << i;
    for (Eigen::Index i = 0; i < cmd_dim; ++i) out << ",cmd_" << i;
    out << "\n";
    for (const auto& rec : steps) {
        std::string line = std::to_string(rec.step);
        append_double(line, rec.err_norm);
        append_double(line, rec.posterior_var);
        append_double(line, rec.t_extract_us);
        append_double(line, rec.t_predict_us);
        append_double(line, rec.t_apply_us);
        append_double(line, rec.t_update_us);
        for (Eigen::Index i = 0; i < rec.x.size(); ++i) append_double(line, rec.x[i]);
        for (Eigen::Index i = 0; i < rec.command.size(); ++i) append_double(line, rec.command[i]);
        out << line << "\n";
    }
}

std::pair<Eigen::VectorXd, Posterior> control_step(const DeformationModel& model,
                                                   const Eigen::VectorXd& x_d,
                                                   const Eigen::VectorXd& x,
                                                   const ControlConfig& cfg, Rng& rng) {
    cfg.validate();
    if (x_d.size() != x.size())
        throw InputError("control_step: current and desired features differ in dimension");

    const Eigen::VectorXd query = cfg.eta * (x_d - x);
    const Posterior post = model.predict(query);

    Eigen::VectorXd command = post.mu;
    if (cfg.explore) {
        const double sigma = std::sqrt(std::max(post.var, 0.0));
        command += sigma * rng.normal_vector(command.size());
    }
    if (!command.allFinite())
        throw NumericalError("control_step: non-finite command from model " + model.name());

    const double norm = command.norm();
    if (norm > cfg.velocity_cap) command *= cfg.velocity_cap / norm;
    return {command, post};
}

std::pair<Eigen::VectorXd, Posterior> control_step(const GpState& state,
                                                   const Eigen::VectorXd& x_d,
                                                   const Eigen::VectorXd& x,
                                                   const ControlConfig& cfg, Rng& rng) {
    const FoGprModel model(state);
    return control_step(model, x_d, x, cfg, rng);
}

TrajectoryLog run_servo_loop(World& world, const FeatureSpec& spec, const Eigen::VectorXd& x_d,
                             DeformationModel& model, const ControlConfig& cfg, Rng& rng,
                             const WorldObserver& observer) {
    cfg.validate();
    if (x_d.size() != spec.dimension())
        throw InputError("run_servo_loop: target dimension does not match feature spec");

    TrajectoryLog log;
    for (int step = 0; step < cfg.max_steps + 1; ++step) {
        const auto t_extract = std::chrono::steady_clock::now();
        const Eigen::VectorXd x = extract(spec, feedback_cloud(world));
        const double extract_us = us_since(t_extract);

        const Eigen::VectorXd delta_x = x_d - x;
        const double err = delta_x.norm();
        log.final_err = err;
        if (err <= cfg.success_tol) {
            log.success = true;
            log.steps_to_success = step;
            return log;
        }
        if (step == cfg.max_steps) break;

        StepRecord rec;
        rec.step = step;
        rec.x = x;
        rec.delta_x = delta_x;
        rec.err_norm = err;
        rec.t_extract_us = extract_us;

        const auto t_predict = std::chrono::steady_clock::now();
        auto [command, post] = control_step(model, x_d, x, cfg, rng);
        rec.t_predict_us = us_since(t_predict);
        rec.command = command;
        rec.posterior_var = post.var;

        const auto t_apply = std::chrono::steady_clock::now();
        Eigen::VectorXd dx_obs;
        try {
            auto [next_world, observed] = apply_control(world, command, spec);
            world = std::move(next_world);
            dx_obs = std::move(observed);
        } catch (const EquilibriumError& err_eq) {
            throw EquilibriumError("run_servo_loop: step " + std::to_string(step) + ": " +
                                       err_eq.what(),
                                   err_eq.residual());
        }
        rec.t_apply_us = us_since(t_apply);

        const auto t_update = std::chrono::steady_clock::now();
        if (dx_obs.norm() >= kMinFeatureChange) {
            model.observe(dx_obs, command);
        } else {
            log::debug("run_servo_loop: step ", step, " produced no feature change; discarded");
        }
        rec.t_update_us = us_since(t_update);

        log.steps.push_back(std::move(rec));
        if (observer) observer(step, world);
    }
    return log;
}

std::pair<TrajectoryLog, GpState> run_servo_loop(World& world, const FeatureSpec& spec,
                                                 const Eigen::VectorXd& x_d, GpState state,
                                                 const ControlConfig& cfg) {
    FoGprModel model(std::move(state));
    Rng rng(cfg.rng_seed);
    TrajectoryLog log = run_servo_loop(world, spec, x_d, model, cfg, rng);
    return {std::move(log), model.state()};
}

void warm_start(World& world, const FeatureSpec& spec, DeformationModel& model, int n,
                double amplitude, Rng& rng) {
    if (n < 0) throw InputError("warm_start: n must be >= 0");
    const Eigen::Index cmd_dim = world.manipulated_positions().size();
    int accepted = 0;
    int attempts = 0;
    const int attempt_cap = 100 * std::max(n, 1);
    while (accepted < n) {
        if (++attempts > attempt_cap)
            throw NumericalError("warm_start: excitation produced no feature response");
        const Eigen::VectorXd command = amplitude * rng.unit_vector(cmd_dim);
        auto [next_world, dx_obs] = apply_control(world, command, spec);
        world = std::move(next_world);
        if (dx_obs.norm() < kMinFeatureChange) continue;
        model.observe(dx_obs, command);
        ++accepted;
    }
}

GpState warm_start(World& world, const FeatureSpec& spec, GpState state, int n, double amplitude,
                   Rng& rng) {
    FoGprModel model(std::move(state));
    warm_start(world, spec, model, n, amplitude, rng);
    return model.state();
}

}  // namespace fogpr
