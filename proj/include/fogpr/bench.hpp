#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fogpr/config.hpp"
#include "fogpr/controller.hpp"
#include "fogpr/types.hpp"

namespace fogpr {

struct TimingStats {
    double mean_us = 0.0;
    double p95_us = 0.0;
    double max_us = 0.0;
    long count = 0;
};

// Sample statistics with the first `warmup` entries discarded.
TimingStats timing_stats(const std::vector<double>& samples_us, std::size_t warmup = 10);

struct SeedResult {
    std::uint64_t seed = 0;
    bool success = false;
    int steps_to_success = -1;
    double final_err = 0.0;
    TimingStats update;  // model-update phase
    TimingStats cycle;   // full control cycle
    std::string trajectory_csv;
};

struct Report {
    std::string task_name;
    std::string model_name;
    std::vector<SeedResult> seeds;

    double success_rate() const;
    void write_csv(const std::string& path) const;
};

// Executes the configured experiment for every seed, writing one trajectory
// CSV per seed plus a summary CSV into the output directory.
Report run_experiment(const RunConfig& config);

// Runs one seed without touching the filesystem.
SeedResult run_single(const RunConfig& config, std::uint64_t seed,
                      TrajectoryLog* log_out = nullptr, const WorldObserver& observer = {});

struct BenchPoint {
    std::string model;
    int capacity = 0;  // 0 = unbounded
    int step = 0;
    double update_us = 0.0;
};

// Feeds an identical synthetic observation stream to the online engine (one
// run per capacity) and to the unbounded engine, timing every model update.
std::vector<BenchPoint> bench_update_cost(const std::vector<int>& m_values, int n_stream,
                                          int input_dim, int output_dim, std::uint64_t seed,
                                          const Hyperparams& hp_base);

void write_bench_csv(const std::vector<BenchPoint>& points, const std::string& path);

struct ComparisonRow {
    std::string model_name;
    double success_rate = 0.0;
    double median_steps = -1.0;  // over successful seeds; -1 if none
    double mean_final_err = 0.0;
};

struct Comparison {
    std::string task_name;
    std::vector<ComparisonRow> rows;
    std::vector<Report> reports;

    void write_csv(const std::string& path) const;
    void write_markdown(const std::string& path) const;
};

// Runs several model configurations over the same task and seeds. Configs
// with differing tasks or seeds are rejected.
Comparison compare_models(const std::vector<RunConfig>& configs);

}  // namespace fogpr
