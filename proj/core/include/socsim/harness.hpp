#pragma once

#include "socsim/engine.hpp"
#include "socsim/sched_neural.hpp"
#include "socsim/workload.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace socsim {

// One experiment: a workload source, a resource profile, a scheduler, sim
// and training settings, seeds, and optional sweep axes. Every run is fully
// determined by (spec, seed): per-run random streams derive from the seed
// and a hash of the sweep-point values, so adding sweep points never
// perturbs existing runs.
struct ExperimentSpec {
    std::string job_profile;      // path; empty means synthesize workloads
    DagGenParams synth;           // used when job_profile is empty
    CompCostModel synth_costs;
    std::string resource_profile; // path, required
    std::string scheduler = "stf";
    SimConfig sim;
    TrainConfig train;
    double mu = 0.5;
    std::vector<std::uint64_t> seeds{0};
    std::string out_path;
    std::string trace_path;      // optional: episode trace CSV
    std::string checkpoint_path; // eval input / train resume
    std::vector<std::pair<std::string, std::vector<double>>> sweep;
    int threads = 0; // 0: hardware concurrency
};

struct MetricsRow {
    std::vector<std::pair<std::string, double>> axes;
    std::uint64_t seed = 0;
    std::string scheduler;
    std::optional<double> avg_latency;
    std::optional<double> avg_slr;
    std::optional<double> avg_speedup;
    int completed_jobs = 0;
    double total_reward = 0.0;
};

std::string write_metrics_csv(const std::vector<MetricsRow>& rows);

// Sweep x seeds episodes with a rule-based scheduler (or a checkpointed
// neural one via cmd_eval). Writes the metrics CSV, returns the rows.
std::vector<MetricsRow> cmd_run(const ExperimentSpec& spec);

// Trains a neural scheduler, writes the checkpoint to out_path and the
// training log CSV next to it (<out>.log.csv). Returns the curve.
TrainResult cmd_train(const ExperimentSpec& spec);

// Loads a checkpoint and runs it as the scheduler over the sweep.
std::vector<MetricsRow> cmd_eval(const ExperimentSpec& spec);

struct SynthReportRow {
    std::string file;
    int v = 0;
    int levels = 0;
    int edges = 0;
    double edge_density = 0.0;
    double chain_ratio = 0.0;
};

// Writes `count` synthesized job profiles plus a structural summary CSV
// into the out_path directory. All files re-parse cleanly.
std::vector<SynthReportRow> cmd_synth(const ExperimentSpec& spec, int count);

// Helpers shared with tests.
Platform load_platform(const ExperimentSpec& spec);
std::vector<JobDag> build_workloads(const ExperimentSpec& spec, const Platform& platform, Rng stream);
ObservationSpec make_observation_spec(const ExperimentSpec& spec, const Platform& platform,
                                      const std::vector<JobDag>& workloads);

} // namespace socsim
