#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "fogpr/bench.hpp"
#include "fogpr/config.hpp"
#include "fogpr/controller.hpp"
#include "fogpr/rng.hpp"

using namespace fogpr;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_config() {
    return nlohmann::json::parse(R"({
        "schema_version": 1,
        "task": {
            "name": "rod_mini",
            "world": {"template": "rod", "params": {"nodes": 12}},
            "features": {"components": [
                {"type": "centroid"},
                {"type": "distance", "i": 0, "j": 7}
            ]},
            "target": {"type": "displace", "delta": [0, 0, 0, -0.002, 0.004, 0], "steps": 8},
            "control": {"eta": 0.9, "max_steps": 120, "success_tol": 0.002,
                        "explore": false, "velocity_cap": 0.01},
            "warm_start": {"steps": 25, "amplitude": 0.008}
        },
        "model": {"type": "fo_gpr", "sigma_rbf": 0.6, "sigma_n": 0.001, "max_size": 300},
        "seeds": [3],
        "output_dir": "cli_test_out"
    })");
}

std::string write_config(const nlohmann::json& j, const std::string& name) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << j.dump(2);
    return path.string();
}

// Rows with the timing columns (t_*) blanked, for byte-comparisons that the
// reproducibility contract excludes.
std::vector<std::string> csv_without_timings(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    std::vector<int> keep;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ','))
            keep.push_back(col.rfind("t_", 0) == 0 ? 0 : 1);
    }
    std::vector<std::string> rows{header};
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell, rebuilt;
        std::size_t idx = 0;
        while (std::getline(ss, cell, ',')) {
            rebuilt += (idx < keep.size() && keep[idx] ? cell : "_");
            rebuilt += ',';
            ++idx;
        }
        rows.push_back(rebuilt);
    }
    return rows;
}

int run_cli(const std::string& args, std::string* stderr_text = nullptr) {
    const fs::path err_file = fs::temp_directory_path() / "fogpr_cli_stderr.txt";
    const std::string cmd =
        std::string(FOGPR_CLI_PATH) + " " + args + " > /dev/null 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    if (stderr_text) {
        std::ifstream in(err_file);
        std::stringstream ss;
        ss << in.rdbuf();
        *stderr_text = ss.str();
    }
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing round trip") {
    const RunConfig cfg = parse_run_config(base_config());
    CHECK(cfg.task.name == "rod_mini");
    CHECK(cfg.task.world_template == "rod");
    CHECK(cfg.task.feature_spec.components.size() == 2);
    CHECK(cfg.task.control.eta == 0.9);
    CHECK(cfg.model.kind == ModelConfig::Kind::FoGpr);
    CHECK(cfg.model.hp.max_size == 300);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{3});
}

TEST_CASE("config errors name the offending field") {
    auto expect_error = [](nlohmann::json j, const std::string& needle) {
        try {
            parse_run_config(j);
            FAIL("expected ConfigError for ", needle);
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find(needle) != std::string::npos);
        }
    };

    nlohmann::json no_task = base_config();
    no_task.erase("task");
    expect_error(no_task, "$.task");

    nlohmann::json bad_eta = base_config();
    bad_eta["task"]["control"]["eta"] = -1.0;
    expect_error(bad_eta, "$.task.control");

    nlohmann::json bad_model = base_config();
    bad_model["model"]["type"] = "transformer";
    expect_error(bad_model, "$.model.type");

    nlohmann::json bad_component = base_config();
    bad_component["task"]["features"]["components"][1].erase("j");
    expect_error(bad_component, "components[1].j");

    nlohmann::json bad_seeds = base_config();
    bad_seeds["seeds"] = nlohmann::json::array();
    expect_error(bad_seeds, "$.seeds");
}

TEST_CASE("displace targets resolve against the built world") {
    const RunConfig cfg = parse_run_config(base_config());
    const World world = instantiate_world(cfg.task);
    const Eigen::VectorXd x_d = resolve_target(cfg.task, world);
    CHECK(x_d.size() == 4);
    // Target differs from the initial features (the displacement does move).
    FeatureSpec spec = cfg.task.feature_spec;
    spec.point_count = feedback_cloud(world).size();
    const Eigen::VectorXd x0 = extract(spec, feedback_cloud(world));
    CHECK((x_d - x0).norm() > 1e-4);
}

TEST_CASE("run_experiment writes per-seed trajectories and a report") {
    RunConfig cfg = parse_run_config(base_config());
    cfg.output_dir = (fs::temp_directory_path() / "fogpr_run_a").string();
    fs::remove_all(cfg.output_dir);
    const Report report = run_experiment(cfg);
    REQUIRE(report.seeds.size() == 1);
    CHECK(report.seeds[0].success);
    CHECK(fs::exists(cfg.output_dir + "/rod_mini_fo_gpr_seed3.csv"));
    CHECK(fs::exists(cfg.output_dir + "/rod_mini_fo_gpr_report.csv"));
}

TEST_CASE("identical runs produce identical CSVs outside the timing columns") {
    RunConfig cfg = parse_run_config(base_config());
    cfg.output_dir = (fs::temp_directory_path() / "fogpr_run_b1").string();
    fs::remove_all(cfg.output_dir);
    run_experiment(cfg);

    RunConfig cfg2 = parse_run_config(base_config());
    cfg2.output_dir = (fs::temp_directory_path() / "fogpr_run_b2").string();
    fs::remove_all(cfg2.output_dir);
    run_experiment(cfg2);

    const auto a = csv_without_timings(cfg.output_dir + "/rod_mini_fo_gpr_seed3.csv");
    const auto b = csv_without_timings(cfg2.output_dir + "/rod_mini_fo_gpr_seed3.csv");
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() > 1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("below capacity the online and unbounded engines are bit-identical") {
    Hyperparams hp;
    FoGprModel fo(3, 2, hp);
    StandardGprModel standard(3, 2, hp);

    Rng rng(11);
    for (int t = 0; t < 60; ++t) {  // well below M = 300
        const Eigen::VectorXd dx = rng.uniform_vector(3, -1.0, 1.0);
        const Eigen::VectorXd dp = rng.uniform_vector(2, -1.0, 1.0);
        fo.observe(dx, dp);
        standard.observe(dx, dp);
    }
    Rng probes(13);
    for (int p = 0; p < 20; ++p) {
        const Eigen::VectorXd q = probes.uniform_vector(3, -1.0, 1.0);
        const Posterior a = fo.predict(q);
        const Posterior b = standard.predict(q);
        CHECK(a.mu == b.mu);
        CHECK(a.var == b.var);
    }
}

TEST_CASE("command sequences agree across engines below capacity") {
    auto run_with = [](ModelConfig::Kind kind) {
        RunConfig cfg = parse_run_config(base_config());
        cfg.model.kind = kind;
        TrajectoryLog log;
        run_single(cfg, 3, &log);
        std::vector<Eigen::VectorXd> commands;
        for (const auto& rec : log.steps) commands.push_back(rec.command);
        return commands;
    };
    const auto fo = run_with(ModelConfig::Kind::FoGpr);
    const auto standard = run_with(ModelConfig::Kind::StandardGpr);
    REQUIRE(fo.size() == standard.size());
    for (std::size_t i = 0; i < fo.size(); ++i) CHECK(fo[i] == standard[i]);
}

TEST_CASE("an offline model frozen before any data acts as the prior mean") {
    RunConfig cfg = parse_run_config(base_config());
    cfg.model.kind = ModelConfig::Kind::OfflineGpr;
    cfg.model.freeze_at = 1;
    cfg.task.warm_start.steps = 0;  // nothing ever reaches the model

    TrajectoryLog log;
    const SeedResult result = run_single(cfg, 3, &log);
    CHECK_FALSE(result.success);
    // Zero commands throughout: the prior mean is zero and exploration is off.
    for (const auto& rec : log.steps) CHECK(rec.command.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compare_models runs the shared task across models") {
    RunConfig fo_cfg = parse_run_config(base_config());
    nlohmann::json linear_json = base_config();
    linear_json["model"] = {{"type", "linear"}, {"learning_rate", 0.5}};
    RunConfig linear_cfg = parse_run_config(linear_json);

    const std::string out = (fs::temp_directory_path() / "fogpr_cmp").string();
    fs::remove_all(out);
    fo_cfg.output_dir = out;
    linear_cfg.output_dir = out;

    const Comparison cmp = compare_models({fo_cfg, linear_cfg});
    REQUIRE(cmp.rows.size() == 2);
    CHECK(cmp.rows[0].model_name == "fo_gpr");
    CHECK(cmp.rows[1].model_name == "linear");
    // The mini rod task is nearly linear; the online GP must cope.
    CHECK(cmp.rows[0].success_rate == 1.0);

    cmp.write_csv(out + "/cmp.csv");
    cmp.write_markdown(out + "/cmp.md");
    CHECK(fs::exists(out + "/cmp.csv"));
    CHECK(fs::exists(out + "/cmp.md"));
}

TEST_CASE("compare_models rejects mismatched tasks") {
    RunConfig a = parse_run_config(base_config());
    nlohmann::json other = base_config();
    other["task"]["world"]["params"]["nodes"] = 16;
    RunConfig b = parse_run_config(other);
    CHECK_THROWS_AS(compare_models({a, b}), ConfigError);
}

TEST_CASE("bench_update_cost covers both engines over one stream") {
    Hyperparams hp;
    const auto points = bench_update_cost({20, 40}, 80, 3, 2, 7, hp);
    long fo20 = 0, fo40 = 0, standard = 0;
    for (const auto& p : points) {
        if (p.model == "fo_gpr" && p.capacity == 20) ++fo20;
        if (p.model == "fo_gpr" && p.capacity == 40) ++fo40;
        if (p.model == "standard_gpr") ++standard;
    }
    CHECK(fo20 == 80);
    CHECK(fo40 == 80);
    CHECK(standard == 80);
    CHECK_THROWS_AS(bench_update_cost({100}, 50, 3, 2, 7, hp), InputError);
}

TEST_CASE("cli: validate-config accepts the good config") {
    const std::string path = write_config(base_config(), "fogpr_ok.json");
    CHECK(run_cli("validate-config --config " + path) == 0);
}

TEST_CASE("cli: validate-config rejects malformed configs with exit code 2") {
    nlohmann::json bad = base_config();
    bad["task"]["world"]["template"] = "torus";
    const std::string path = write_config(bad, "fogpr_bad.json");
    std::string err;
    CHECK(run_cli("validate-config --config " + path, &err) == 2);
    CHECK(err.find("torus") != std::string::npos);

    nlohmann::json missing = base_config();
    missing["task"].erase("target");
    const std::string path2 = write_config(missing, "fogpr_bad2.json");
    CHECK(run_cli("validate-config --config " + path2, &err) == 2);
    CHECK(err.find("$.task.target") != std::string::npos);

    CHECK(run_cli("validate-config --config /nonexistent.json", &err) == 2);
}

TEST_CASE("cli: run executes and writes outputs") {
    nlohmann::json j = base_config();
    const std::string out = (fs::temp_directory_path() / "fogpr_cli_run").string();
    fs::remove_all(out);
    j["output_dir"] = out;
    const std::string path = write_config(j, "fogpr_run.json");
    CHECK(run_cli("run --config " + path) == 0);
    CHECK(fs::exists(out + "/rod_mini_fo_gpr_seed3.csv"));
}

TEST_CASE("cli: compare rejects mismatched configs with exit code 2") {
    const std::string a = write_config(base_config(), "fogpr_cmp_a.json");
    nlohmann::json other = base_config();
    other["task"]["name"] = "different";
    const std::string b = write_config(other, "fogpr_cmp_b.json");
    std::string err;
    CHECK(run_cli("compare --config " + a + " --config " + b, &err) == 2);
}

TEST_CASE("cli: bench writes the timing csv") {
    const std::string out = (fs::temp_directory_path() / "fogpr_cli_bench").string();
    fs::remove_all(out);
    CHECK(run_cli("bench --m-values 10 --n-stream 30 --input-dim 2 --output-dim 2 --out " +
                  out) == 0);
    CHECK(fs::exists(out + "/bench_update_cost.csv"));
}
