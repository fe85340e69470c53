#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fogpr/controller.hpp"
#include "fogpr/features.hpp"
#include "fogpr/models.hpp"
#include "fogpr/sim.hpp"
#include "fogpr/types.hpp"

#include "json.hpp"

namespace fogpr {

// How the desired feature vector is produced: given explicitly, or read off
// a copy of the world displaced by a fixed command sequence (guaranteed
// reachable).
struct TargetSpec {
    enum class Kind { Vector, Displace };
    Kind kind = Kind::Vector;
    Eigen::VectorXd values;       // Vector
    Eigen::VectorXd delta;        // Displace: per-step manipulated shift
    int steps = 1;                // Displace: how many times to apply it
};

struct WarmStartSpec {
    int steps = 0;
    double amplitude = 0.0;
};

struct TaskDef {
    std::string name;
    std::string world_template;
    nlohmann::json world_params;
    FeatureSpec feature_spec;  // point_count filled when the world is built
    TargetSpec target;
    ControlConfig control;
    WarmStartSpec warm_start;
    bool dump_nodes = false;  // per-step node positions to CSV
};

struct ModelConfig {
    enum class Kind { FoGpr, StandardGpr, OfflineGpr, Linear };
    Kind kind = Kind::FoGpr;
    Hyperparams hp;
    long freeze_at = 1;          // OfflineGpr
    double learning_rate = 0.1;  // Linear

    std::string name() const;
};

struct RunConfig {
    int schema_version = 1;
    TaskDef task;
    ModelConfig model;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";

    // The raw "task" subtree plus seeds, used to check that compared configs
    // share the experiment.
    nlohmann::json task_fingerprint;
};

// Parses and validates; errors carry the offending field's path.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Instantiates the configured world and binds the feature spec's point
// count to its feedback cloud.
World instantiate_world(const TaskDef& task);

// Resolves x_d against a freshly built world (Displace targets simulate the
// command sequence on a copy).
Eigen::VectorXd resolve_target(const TaskDef& task, const World& world);

std::unique_ptr<DeformationModel> make_model(const ModelConfig& cfg, Eigen::Index input_dim,
                                             Eigen::Index output_dim);

}  // namespace fogpr
