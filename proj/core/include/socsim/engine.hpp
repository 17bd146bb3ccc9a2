#pragma once

#include "socsim/platform.hpp"
#include "socsim/scheduler.hpp"
#include "socsim/workload.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace socsim {

enum class RewardKind { dense, dense2, sparse, sparse2 };

RewardKind reward_kind_from_name(const std::string& name);
const char* reward_kind_name(RewardKind kind);

struct SimConfig {
    double scale = 25.0;            // mean job inter-arrival in clocks
    std::int64_t sim_length = 10000; // CLK
    int capacity = 3;               // max jobs in the system
    int num_workloads = 200;        // total jobs injectable per episode
    bool quasi_steady = false;      // pre-fill the job queue to capacity at clk 0
    std::uint64_t seed = 0;
    RewardKind reward_kind = RewardKind::dense;
    double c1 = 50.0;  // job completion bonus
    double c2 = -0.5;  // per-clock penalty
    std::int64_t sparse_window = 100; // m: trailing window of the sparse reward
};

// key = value text mirroring SimConfig.
SimConfig parse_sim_config(std::string_view text);
std::string write_sim_config(const SimConfig& config);

// Reward emitted at one clock tick. Gated by kind:
//   dense   : c1 * completed + c2 * clk
//   dense2  : c1 * completed
//   sparse  : c1 * completed, only when clk >= CLK - m
//   sparse2 : c1 * completed, only when clk == CLK
double reward(std::int64_t clk, int newly_completed, RewardKind kind, double c1, double c2,
              std::int64_t sparse_window, std::int64_t sim_length);

// Inter-arrival gap: exponential with the given mean, rounded up to >= 1 tick.
std::int64_t draw_interarrival(Rng& rng, double scale);

struct TaskRecord {
    int job_id = 0;
    int task_id = 0;
    TaskStatus status = TaskStatus::outstanding;
    int assigned_pe = -1;
    std::int64_t ready_clk = -1;
    std::int64_t assign_clk = -1;
    std::int64_t start_clk = -1;
    std::int64_t completion_clk = -1; // omega
    double duration = 0.0;
};

struct JobRuntimeRecord {
    int job_id = 0;
    std::int64_t inject_clk = 0;
    std::int64_t completion_clk = -1;
    std::int64_t makespan = 0;
    std::vector<TaskRecord> tasks;
    JobDag dag;
};

struct PeStats {
    int pe_id = 0;
    std::int64_t execution_count = 0;
    std::int64_t active_time = 0;   // ticks spent running tasks
    std::int64_t blocking_time = 0; // ticks busy while assigned work waits
};

struct LoggedAction {
    int job_id = 0;
    int task_id = 0;
    int pe_id = 0;
    std::int64_t sched_clk = 0;
    std::int64_t start_clk = -1;       // execution start; -1 when never started
    std::int64_t completion_clk = -1;  // omega; -1 when truncated at episode end
    bool truncated = false;
};

struct InteractionStep {
    std::int64_t clk = 0;
    std::vector<LoggedAction> actions;
};

enum class TraceKind { inject, ready, assign, start, complete, job_complete };

struct TraceEvent {
    std::int64_t clk = 0;
    TraceKind kind = TraceKind::inject;
    int job_id = -1;
    int task_id = -1;
    int pe_id = -1;
};

struct EpisodeResult {
    std::vector<JobRuntimeRecord> completed_jobs;
    std::vector<double> reward_stream; // index i holds R(clk = i + 1)
    std::vector<InteractionStep> interaction_log;
    std::vector<PeStats> pe_stats;
    std::vector<TraceEvent> trace;

    int jobs_injected = 0;
    int tasks_injected = 0;
    int tasks_completed = 0;
    int tasks_running_at_end = 0;
    int tasks_ready_at_end = 0;
    int tasks_outstanding_at_end = 0;

    double total_reward() const;
};

// Runs Algorithm-style clocked simulation: inject jobs from the workload
// list (cycled when num_workloads exceeds it), promote dependency-free
// tasks, invoke the scheduler, execute non-preemptively on PEs, and emit
// one reward per tick.
EpisodeResult run_episode(std::span<const JobDag> jobdags, const Platform& platform, Scheduler& scheduler,
                          const SimConfig& config);

// Recomputed from the interaction log and task records (not from engine
// internals): execution counts, active ticks, and blocking ticks per PE.
std::vector<PeStats> pe_usage_stats(const EpisodeResult& result, const Platform& platform);

// One row per event: clk,kind,job,task,pe.
std::string write_trace_csv(const EpisodeResult& result);

} // namespace socsim
