#pragma once

#include "socsim/platform.hpp"
#include "socsim/rng.hpp"
#include "socsim/workload.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace socsim {

enum class TaskStatus { outstanding, ready, running, completed };

// Read-only snapshot of one task's runtime state.
struct TaskStateView {
    int task_id = 0;
    TaskStatus status = TaskStatus::outstanding;
    int assigned_pe = -1;
    std::int64_t ready_clk = -1;
    std::int64_t start_clk = -1;
    int remaining_preds = 0;
};

// One job currently in the system.
struct JobView {
    int job_id = 0;
    std::int64_t inject_clk = 0;
    const JobDag* dag = nullptr;
    std::vector<TaskStateView> tasks; // ordered by task_id
};

// A dependency-free task offered for scheduling. All parents have completed,
// so their placements and finish times are final.
struct ReadyTaskView {
    int job_id = 0;
    int task_id = 0;
    std::int64_t ready_clk = 0;
    const JobDag* dag = nullptr;
    const TaskTemplate* task = nullptr;
    std::vector<ParentPlacement> parents;
};

// Committed occupancy of one PE: the running task plus queued assignments,
// as disjoint [start, finish) intervals in assignment-plan time.
struct PeView {
    int pe_id = 0;
    bool busy = false;   // running or holding queued work
    double avail = 0.0;  // earliest time the PE is free, >= current clk
    std::vector<std::pair<double, double>> timeline;
};

struct SchedulerView {
    std::int64_t clk = 0;
    const Platform* platform = nullptr;
    std::vector<ReadyTaskView> ready; // ordered by (job injection, task_id)
    std::vector<PeView> pes;          // ordered by pe_id
    std::vector<JobView> jobs;        // ordered by injection
};

struct TaskAssignment {
    int job_id = 0;
    int task_id = 0;
    int pe_id = 0;
    std::optional<double> planned_start; // set by insertion-based schedulers
};

struct Assignment {
    std::vector<TaskAssignment> items;
};

class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual const char* name() const = 0;
    virtual Assignment schedule(const SchedulerView& view, Rng& rng) = 0;
    // Called once per injected job instance, before any of its tasks are offered.
    virtual void on_job_injected(const JobDag& dag) { (void)dag; }
};

} // namespace socsim
