#include "fogpr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fogpr/log.hpp"
#include "fogpr/rng.hpp"

namespace fogpr {

namespace {

double us_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_node_positions(const World& world, int step, std::ofstream& out) {
    for (std::size_t i = 0; i < world.nodes.size(); ++i)
        out << step << ',' << i << ',' << fmt(world.nodes[i].x()) << ','
            << fmt(world.nodes[i].y()) << ',' << fmt(world.nodes[i].z()) << "\n";
}

}  // namespace

TimingStats timing_stats(const std::vector<double>& samples_us, std::size_t warmup) {
    TimingStats stats;
    if (samples_us.size() <= warmup) return stats;
    std::vector<double> tail(samples_us.begin() + warmup, samples_us.end());
    std::sort(tail.begin(), tail.end());
    stats.count = static_cast<long>(tail.size());
    double sum = 0.0;
    for (double v : tail) sum += v;
    stats.mean_us = sum / tail.size();
    const std::size_t p95_idx =
        std::min(tail.size() - 1, static_cast<std::size_t>(std::ceil(0.95 * tail.size())) - 1);
    stats.p95_us = tail[p95_idx];
    stats.max_us = tail.back();
    return stats;
}

double Report::success_rate() const {
    if (seeds.empty()) return 0.0;
    long ok = 0;
    for (const auto& s : seeds) ok += s.success ? 1 : 0;
    return static_cast<double>(ok) / seeds.size();
}

void Report::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("report: cannot open '" + path + "' for writing");
    out << "task,model,seed,success,steps_to_success,final_err,"
           "update_mean_us,update_p95_us,update_max_us,"
           "cycle_mean_us,cycle_p95_us,cycle_max_us\n";
    for (const auto& s : seeds) {
        out << task_name << ',' << model_name << ',' << s.seed << ',' << (s.success ? 1 : 0)
            << ',' << s.steps_to_success << ',' << fmt(s.final_err) << ','
            << fmt(s.update.mean_us) << ',' << fmt(s.update.p95_us) << ','
            << fmt(s.update.max_us) << ',' << fmt(s.cycle.mean_us) << ',' << fmt(s.cycle.p95_us)
            << ',' << fmt(s.cycle.max_us) << "\n";
    }
}

SeedResult run_single(const RunConfig& config, std::uint64_t seed, TrajectoryLog* log_out,
                      const WorldObserver& observer) {
    SeedResult result;
    result.seed = seed;

    World world = instantiate_world(config.task);
    FeatureSpec spec = config.task.feature_spec;
    spec.point_count = feedback_cloud(world).size();
    const Eigen::VectorXd x_d = resolve_target(config.task, world);

    const Eigen::Index input_dim = spec.dimension();
    const Eigen::Index output_dim = world.manipulated_positions().size();
    auto model = make_model(config.model, input_dim, output_dim);

    ControlConfig control = config.task.control;
    control.rng_seed = seed;
    Rng rng(seed);

    if (config.task.warm_start.steps > 0)
        warm_start(world, spec, *model, config.task.warm_start.steps,
                   config.task.warm_start.amplitude, rng);

    TrajectoryLog log = run_servo_loop(world, spec, x_d, *model, control, rng, observer);

    result.success = log.success;
    result.steps_to_success = log.steps_to_success;
    result.final_err = log.final_err;
    std::vector<double> update_us, cycle_us;
    update_us.reserve(log.steps.size());
    cycle_us.reserve(log.steps.size());
    for (const auto& rec : log.steps) {
        update_us.push_back(rec.t_update_us);
        cycle_us.push_back(rec.t_extract_us + rec.t_predict_us + rec.t_apply_us +
                           rec.t_update_us);
    }
    result.update = timing_stats(update_us);
    result.cycle = timing_stats(cycle_us);
    if (log_out) *log_out = std::move(log);
    return result;
}

Report run_experiment(const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);

    Report report;
    report.task_name = config.task.name;
    report.model_name = config.model.name();

    for (std::uint64_t seed : config.seeds) {
        TrajectoryLog log;
        std::ofstream nodes_csv;
        WorldObserver observer;
        if (config.task.dump_nodes) {
            const std::string nodes_path =
                (fs::path(config.output_dir) /
                 (config.task.name + "_" + config.model.name() + "_seed" +
                  std::to_string(seed) + "_nodes.csv"))
                    .string();
            nodes_csv.open(nodes_path);
            if (!nodes_csv)
                throw ConfigError("run: cannot open '" + nodes_path + "' for writing");
            nodes_csv << "step,node,x,y,z\n";
            observer = [&nodes_csv](int step, const World& w) {
                dump_node_positions(w, step, nodes_csv);
            };
        }
        SeedResult result = run_single(config, seed, &log, observer);

        const std::string csv_name = config.task.name + "_" + config.model.name() + "_seed" +
                                     std::to_string(seed) + ".csv";
        const std::string csv_path = (fs::path(config.output_dir) / csv_name).string();
        log.write_csv(csv_path);
        result.trajectory_csv = csv_path;
        log::info("run: task=", config.task.name, " model=", config.model.name(),
                  " seed=", seed, " success=", result.success ? 1 : 0,
                  " steps=", result.steps_to_success, " final_err=", result.final_err);
        report.seeds.push_back(std::move(result));
    }

    const std::string report_path =
        (fs::path(config.output_dir) /
         (config.task.name + "_" + config.model.name() + "_report.csv"))
            .string();
    report.write_csv(report_path);
    return report;
}

std::vector<BenchPoint> bench_update_cost(const std::vector<int>& m_values, int n_stream,
                                          int input_dim, int output_dim, std::uint64_t seed,
                                          const Hyperparams& hp_base) {
    if (m_values.empty()) throw InputError("bench_update_cost: m_values must be nonempty");
    for (int m : m_values)
        if (n_stream <= m)
            throw InputError("bench_update_cost: n_stream must exceed every capacity");

    // One shared synthetic stream.
    Rng rng(seed);
    Eigen::MatrixXd xs(n_stream, input_dim);
    Eigen::MatrixXd ps(n_stream, output_dim);
    for (int t = 0; t < n_stream; ++t) {
        xs.row(t) = rng.uniform_vector(input_dim, -1.0, 1.0).transpose();
        ps.row(t) = rng.uniform_vector(output_dim, -1.0, 1.0).transpose();
    }

    std::vector<BenchPoint> points;
    points.reserve((m_values.size() + 1) * n_stream);

    for (int m : m_values) {
        Hyperparams hp = hp_base;
        hp.max_size = m;
        FoGprModel model(input_dim, output_dim, hp);
        for (int t = 0; t < n_stream; ++t) {
            const auto t0 = std::chrono::steady_clock::now();
            model.observe(xs.row(t), ps.row(t));
            points.push_back({"fo_gpr", m, t, us_since(t0)});
        }
    }

    StandardGprModel standard(input_dim, output_dim, hp_base);
    for (int t = 0; t < n_stream; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        standard.observe(xs.row(t), ps.row(t));
        points.push_back({"standard_gpr", 0, t, us_since(t0)});
    }
    return points;
}

void write_bench_csv(const std::vector<BenchPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("bench: cannot open '" + path + "' for writing");
    out << "model,capacity,step,update_us\n";
    for (const auto& p : points)
        out << p.model << ',' << p.capacity << ',' << p.step << ',' << fmt(p.update_us) << "\n";
}

void Comparison::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("comparison: cannot open '" + path + "' for writing");
    out << "task,model,success_rate,median_steps,mean_final_err\n";
    for (const auto& row : rows)
        out << task_name << ',' << row.model_name << ',' << fmt(row.success_rate) << ','
            << fmt(row.median_steps) << ',' << fmt(row.mean_final_err) << "\n";
}

void Comparison::write_markdown(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("comparison: cannot open '" + path + "' for writing");
    out << "# Model comparison: " << task_name << "\n\n";
    out << "| model | success rate | median steps | mean final error |\n";
    out << "|---|---|---|---|\n";
    for (const auto& row : rows) {
        out << "| " << row.model_name << " | " << row.success_rate * 100.0 << "% | ";
        if (row.median_steps < 0)
            out << "-";
        else
            out << row.median_steps;
        out << " | " << fmt(row.mean_final_err) << " |\n";
    }
    out << "\nPer-seed details are in the accompanying report CSVs.\n";
}

Comparison compare_models(const std::vector<RunConfig>& configs) {
    if (configs.empty()) throw ConfigError("compare_models: no configurations given");
    for (std::size_t i = 1; i < configs.size(); ++i)
        if (configs[i].task_fingerprint != configs.front().task_fingerprint)
            throw ConfigError("compare_models: config " + std::to_string(i) +
                              " has a different task or seed list");

    Comparison cmp;
    cmp.task_name = configs.front().task.name;
    for (const auto& config : configs) {
        Report report = run_experiment(config);
        ComparisonRow row;
        row.model_name = report.model_name;
        row.success_rate = report.success_rate();
        std::vector<double> steps;
        double err_sum = 0.0;
        for (const auto& s : report.seeds) {
            if (s.success) steps.push_back(s.steps_to_success);
            err_sum += s.final_err;
        }
        row.mean_final_err = report.seeds.empty() ? 0.0 : err_sum / report.seeds.size();
        if (!steps.empty()) {
            std::sort(steps.begin(), steps.end());
            row.median_steps = steps[steps.size() / 2];
        }
        cmp.rows.push_back(row);
        cmp.reports.push_back(std::move(report));
    }
    return cmp;
}

}  // namespace fogpr
