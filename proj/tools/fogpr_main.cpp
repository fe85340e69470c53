#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fogpr/bench.hpp"
#include "fogpr/config.hpp"
#include "fogpr/log.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunError = 1;
constexpr int kExitConfigError = 2;

fogpr::RunConfig load_with_overrides(const std::string& path,
                                     const std::vector<std::uint64_t>& seed_override,
                                     const std::string& out_override, bool no_explore) {
    fogpr::RunConfig config = fogpr::load_run_config(path);
    if (!seed_override.empty()) config.seeds = seed_override;
    if (!out_override.empty()) config.output_dir = out_override;
    if (no_explore) config.task.control.explore = false;
    return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
            const std::string& out, bool no_explore) {
    const fogpr::RunConfig config = load_with_overrides(config_path, seeds, out, no_explore);
    const fogpr::Report report = fogpr::run_experiment(config);
    std::printf("task=%s model=%s seeds=%zu success_rate=%.0f%%\n", report.task_name.c_str(),
                report.model_name.c_str(), report.seeds.size(),
                100.0 * report.success_rate());
    for (const auto& s : report.seeds)
        std::printf("  seed=%llu success=%d steps=%d final_err=%.6g\n",
                    static_cast<unsigned long long>(s.seed), s.success ? 1 : 0,
                    s.steps_to_success, s.final_err);
    return kExitOk;
}

int cmd_bench(const std::vector<int>& m_values, int n_stream, int input_dim, int output_dim,
              std::uint64_t seed, const std::string& out) {
    fogpr::Hyperparams hp;
    const auto points = fogpr::bench_update_cost(m_values, n_stream, input_dim, output_dim,
                                                 seed, hp);
    std::filesystem::create_directories(out);
    const std::string path = (std::filesystem::path(out) / "bench_update_cost.csv").string();
    fogpr::write_bench_csv(points, path);
    std::printf("wrote %zu timing rows to %s\n", points.size(), path.c_str());
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& config_paths,
                const std::vector<std::uint64_t>& seeds, const std::string& out,
                bool no_explore) {
    std::vector<fogpr::RunConfig> configs;
    configs.reserve(config_paths.size());
    for (const auto& path : config_paths)
        configs.push_back(load_with_overrides(path, seeds, out, no_explore));
    const fogpr::Comparison cmp = fogpr::compare_models(configs);

    const std::string dir = configs.front().output_dir;
    std::filesystem::create_directories(dir);
    cmp.write_csv((std::filesystem::path(dir) / (cmp.task_name + "_comparison.csv")).string());
    cmp.write_markdown(
        (std::filesystem::path(dir) / (cmp.task_name + "_comparison.md")).string());
    for (const auto& row : cmp.rows)
        std::printf("model=%s success_rate=%.0f%% median_steps=%.0f mean_final_err=%.6g\n",
                    row.model_name.c_str(), 100.0 * row.success_rate, row.median_steps,
                    row.mean_final_err);
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    const fogpr::RunConfig config = fogpr::load_run_config(config_path);
    // Building the world and resolving the target catches the errors a dry
    // parse cannot (bad indices, dimension mismatches).
    const fogpr::World world = fogpr::instantiate_world(config.task);
    const Eigen::VectorXd x_d = fogpr::resolve_target(config.task, world);
    std::printf("ok: task=%s model=%s feature_dim=%lld seeds=%zu\n", config.task.name.c_str(),
                config.model.name().c_str(), static_cast<long long>(x_d.size()),
                config.seeds.size());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online-GP deformable-object servo experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> config_paths;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    bool no_explore = false;

    auto* run = app.add_subcommand("run", "execute a configured experiment");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--seed", seeds, "override the config's seed list");
    run->add_option("--out", out_dir, "override the output directory");
    run->add_flag("--no-explore", no_explore, "disable exploration sampling");

    std::vector<int> m_values{50, 100, 300};
    int n_stream = 1000;
    int bench_in = 4;
    int bench_out = 6;
    std::uint64_t bench_seed = 1;
    auto* bench = app.add_subcommand("bench", "time model updates on a synthetic stream");
    bench->add_option("--m-values", m_values, "online-engine capacities to test");
    bench->add_option("--n-stream", n_stream, "observations in the stream");
    bench->add_option("--input-dim", bench_in, "feature dimension");
    bench->add_option("--output-dim", bench_out, "command dimension");
    bench->add_option("--seed", bench_seed, "stream seed");
    bench->add_option("--out", out_dir, "output directory")->required();

    auto* compare = app.add_subcommand("compare", "run several models on one task");
    compare->add_option("--config", config_paths, "one config per model")->required();
    compare->add_option("--seed", seeds, "override every config's seed list");
    compare->add_option("--out", out_dir, "override the output directory");
    compare->add_flag("--no-explore", no_explore, "disable exploration sampling");

    auto* validate = app.add_subcommand("validate-config", "parse and sanity-check a config");
    validate->add_option("--config", config_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seeds, out_dir, no_explore);
        if (bench->parsed())
            return cmd_bench(m_values, n_stream, bench_in, bench_out, bench_seed, out_dir);
        if (compare->parsed()) return cmd_compare(config_paths, seeds, out_dir, no_explore);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const fogpr::ConfigError& err) {
        std::fprintf(stderr, "%s\n", err.what());
        return kExitConfigError;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "run error: %s\n", err.what());
        return kExitRunError;
    }
    return kExitOk;
}
