#include "fogpr/config.hpp"

#include <fstream>

namespace fogpr {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double as_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

long as_integer(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
}

std::string as_string(const nlohmann::json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const nlohmann::json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

Eigen::VectorXd as_vector(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

FeatureComponent parse_component(const nlohmann::json& j, const std::string& path) {
    FeatureComponent comp;
    const std::string type = as_string(require(j, "type", path), path + ".type");
    if (type == "centroid") {
        comp.kind = FeatureComponent::Kind::Centroid;
    } else if (type == "positions") {
        comp.kind = FeatureComponent::Kind::Positions;
    } else if (type == "distance") {
        comp.kind = FeatureComponent::Kind::Distance;
        comp.index_a = static_cast<int>(as_integer(require(j, "i", path), path + ".i"));
        comp.index_b = static_cast<int>(as_integer(require(j, "j", path), path + ".j"));
    } else if (type == "surface_variation") {
        comp.kind = FeatureComponent::Kind::SurfaceVariation;
        comp.center_index =
            static_cast<int>(as_integer(require(j, "center", path), path + ".center"));
        if (j.contains("radius")) comp.radius = as_number(j["radius"], path + ".radius");
    } else if (type == "fpfh") {
        comp.kind = FeatureComponent::Kind::FpfhHistogram;
        comp.bins = static_cast<int>(as_integer(require(j, "bins", path), path + ".bins"));
        if (comp.bins < 1) fail(path + ".bins", "must be >= 1");
    } else {
        fail(path + ".type", "unknown feature component '" + type + "'");
    }
    if (j.contains("weight")) {
        comp.weight = as_number(j["weight"], path + ".weight");
        if (!(comp.weight > 0.0)) fail(path + ".weight", "must be > 0");
    }
    return comp;
}

TargetSpec parse_target(const nlohmann::json& j, const std::string& path) {
    TargetSpec target;
    const std::string type = as_string(require(j, "type", path), path + ".type");
    if (type == "vector") {
        target.kind = TargetSpec::Kind::Vector;
        target.values = as_vector(require(j, "values", path), path + ".values");
    } else if (type == "displace") {
        target.kind = TargetSpec::Kind::Displace;
        target.delta = as_vector(require(j, "delta", path), path + ".delta");
        target.steps = static_cast<int>(as_integer(require(j, "steps", path), path + ".steps"));
        if (target.steps < 1) fail(path + ".steps", "must be >= 1");
    } else {
        fail(path + ".type", "unknown target type '" + type + "'");
    }
    return target;
}

ControlConfig parse_control(const nlohmann::json& j, const std::string& path) {
    ControlConfig cfg;
    if (j.contains("eta")) cfg.eta = as_number(j["eta"], path + ".eta");
    if (j.contains("max_steps"))
        cfg.max_steps = static_cast<int>(as_integer(j["max_steps"], path + ".max_steps"));
    if (j.contains("success_tol"))
        cfg.success_tol = as_number(j["success_tol"], path + ".success_tol");
    if (j.contains("explore")) cfg.explore = as_bool(j["explore"], path + ".explore");
    if (j.contains("velocity_cap"))
        cfg.velocity_cap = as_number(j["velocity_cap"], path + ".velocity_cap");
    try {
        cfg.validate();
    } catch (const InputError& err) {
        fail(path, err.what());
    }
    return cfg;
}

Hyperparams parse_hyperparams(const nlohmann::json& j, const std::string& path) {
    Hyperparams hp;
    if (j.contains("sigma_rbf")) hp.sigma_rbf = as_number(j["sigma_rbf"], path + ".sigma_rbf");
    if (j.contains("sigma_n")) hp.sigma_n = as_number(j["sigma_n"], path + ".sigma_n");
    if (j.contains("max_size"))
        hp.max_size = static_cast<int>(as_integer(j["max_size"], path + ".max_size"));
    if (j.contains("eta")) hp.eta = as_number(j["eta"], path + ".eta");
    try {
        hp.validate();
    } catch (const InputError& err) {
        fail(path, err.what());
    }
    return hp;
}

}  // namespace

std::string ModelConfig::name() const {
    switch (kind) {
        case Kind::FoGpr: return "fo_gpr";
        case Kind::StandardGpr: return "standard_gpr";
        case Kind::OfflineGpr: return "offline_gpr";
        case Kind::Linear: return "linear";
    }
    return "?";
}

RunConfig parse_run_config(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.schema_version =
        static_cast<int>(as_integer(require(j, "schema_version", "$"), "$.schema_version"));
    if (cfg.schema_version != 1) fail("$.schema_version", "unsupported schema version");

    const nlohmann::json& jt = require(j, "task", "$");
    cfg.task.name = as_string(require(jt, "name", "$.task"), "$.task.name");

    const nlohmann::json& jw = require(jt, "world", "$.task");
    cfg.task.world_template =
        as_string(require(jw, "template", "$.task.world"), "$.task.world.template");
    cfg.task.world_params =
        jw.contains("params") ? jw["params"] : nlohmann::json::object();
    if (!cfg.task.world_params.is_object()) fail("$.task.world.params", "expected an object");

    const nlohmann::json& jf = require(jt, "features", "$.task");
    const nlohmann::json& jc = require(jf, "components", "$.task.features");
    if (!jc.is_array() || jc.empty())
        fail("$.task.features.components", "expected a nonempty array");
    for (std::size_t i = 0; i < jc.size(); ++i)
        cfg.task.feature_spec.components.push_back(
            parse_component(jc[i], "$.task.features.components[" + std::to_string(i) + "]"));
    if (jf.contains("scale")) {
        cfg.task.feature_spec.scale = as_number(jf["scale"], "$.task.features.scale");
        if (!(cfg.task.feature_spec.scale > 0.0)) fail("$.task.features.scale", "must be > 0");
    }

    cfg.task.target = parse_target(require(jt, "target", "$.task"), "$.task.target");
    cfg.task.control = jt.contains("control")
                           ? parse_control(jt["control"], "$.task.control")
                           : ControlConfig{};
    if (jt.contains("warm_start")) {
        const nlohmann::json& jws = jt["warm_start"];
        cfg.task.warm_start.steps =
            static_cast<int>(as_integer(require(jws, "steps", "$.task.warm_start"),
                                        "$.task.warm_start.steps"));
        cfg.task.warm_start.amplitude = as_number(
            require(jws, "amplitude", "$.task.warm_start"), "$.task.warm_start.amplitude");
        if (cfg.task.warm_start.steps < 0) fail("$.task.warm_start.steps", "must be >= 0");
        if (cfg.task.warm_start.steps > 0 && !(cfg.task.warm_start.amplitude > 0.0))
            fail("$.task.warm_start.amplitude", "must be > 0");
    }
    if (jt.contains("dump_nodes"))
        cfg.task.dump_nodes = as_bool(jt["dump_nodes"], "$.task.dump_nodes");

    const nlohmann::json& jm = require(j, "model", "$");
    const std::string type = as_string(require(jm, "type", "$.model"), "$.model.type");
    if (type == "fo_gpr") {
        cfg.model.kind = ModelConfig::Kind::FoGpr;
        cfg.model.hp = parse_hyperparams(jm, "$.model");
    } else if (type == "standard_gpr") {
        cfg.model.kind = ModelConfig::Kind::StandardGpr;
        cfg.model.hp = parse_hyperparams(jm, "$.model");
    } else if (type == "offline_gpr") {
        cfg.model.kind = ModelConfig::Kind::OfflineGpr;
        cfg.model.hp = parse_hyperparams(jm, "$.model");
        cfg.model.freeze_at = as_integer(require(jm, "freeze_at", "$.model"), "$.model.freeze_at");
        if (cfg.model.freeze_at < 1) fail("$.model.freeze_at", "must be >= 1");
    } else if (type == "linear") {
        cfg.model.kind = ModelConfig::Kind::Linear;
        cfg.model.learning_rate =
            as_number(require(jm, "learning_rate", "$.model"), "$.model.learning_rate");
        if (!(cfg.model.learning_rate > 0.0)) fail("$.model.learning_rate", "must be > 0");
    } else {
        fail("$.model.type", "unknown model type '" + type + "'");
    }

    const nlohmann::json& js = require(j, "seeds", "$");
    if (!js.is_array() || js.empty()) fail("$.seeds", "expected a nonempty array of integers");
    for (std::size_t i = 0; i < js.size(); ++i)
        cfg.seeds.push_back(static_cast<std::uint64_t>(
            as_integer(js[i], "$.seeds[" + std::to_string(i) + "]")));

    if (j.contains("output_dir")) cfg.output_dir = as_string(j["output_dir"], "$.output_dir");

    cfg.task_fingerprint = {{"task", jt}, {"seeds", js}};
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError("config error in '" + path + "': " + err.what());
    }
    return parse_run_config(j);
}

World instantiate_world(const TaskDef& task) {
    World world = build_world(task.world_template, task.world_params);
    // Tasks start from a settled world (templates under gravity or pre-strain
    // are built away from equilibrium).
    return solve_equilibrium(world, world.manipulated_positions());
}

Eigen::VectorXd resolve_target(const TaskDef& task, const World& world) {
    FeatureSpec spec = task.feature_spec;
    spec.point_count = feedback_cloud(world).size();
    if (task.target.kind == TargetSpec::Kind::Vector) {
        if (task.target.values.size() != spec.dimension())
            throw ConfigError("config error at $.task.target.values: dimension " +
                              std::to_string(task.target.values.size()) +
                              " does not match feature dimension " +
                              std::to_string(spec.dimension()));
        return task.target.values;
    }
    const Eigen::Index cmd_dim = world.manipulated_positions().size();
    if (task.target.delta.size() != cmd_dim)
        throw ConfigError("config error at $.task.target.delta: dimension " +
                          std::to_string(task.target.delta.size()) +
                          " does not match manipulated dimension " + std::to_string(cmd_dim));
    World scratch = world;
    for (int s = 0; s < task.target.steps; ++s) {
        scratch = solve_equilibrium(scratch, scratch.manipulated_positions() + task.target.delta);
    }
    return extract(spec, feedback_cloud(scratch));
}

std::unique_ptr<DeformationModel> make_model(const ModelConfig& cfg, Eigen::Index input_dim,
                                             Eigen::Index output_dim) {
    switch (cfg.kind) {
        case ModelConfig::Kind::FoGpr:
            return std::make_unique<FoGprModel>(input_dim, output_dim, cfg.hp);
        case ModelConfig::Kind::StandardGpr:
            return std::make_unique<StandardGprModel>(input_dim, output_dim, cfg.hp);
        case ModelConfig::Kind::OfflineGpr:
            return std::make_unique<OfflineGprModel>(input_dim, output_dim, cfg.hp,
                                                     cfg.freeze_at);
        case ModelConfig::Kind::Linear:
            return std::make_unique<LinearModel>(input_dim, output_dim, cfg.learning_rate);
    }
    throw ConfigError("make_model: unknown model kind");
}

}  // namespace fogpr
