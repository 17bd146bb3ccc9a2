#pragma once

#include "socsim/scheduler.hpp"

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace socsim {

// Upward rank of every task: mean computation cost plus the heaviest
// child chain, where edge cost is weight / mean pairwise bandwidth.
std::map<int, double> rank_u(const JobDag& dag, const Platform& platform);

// Earliest start/finish of a ready task on one PE: start is gated by PE
// availability and parent data arrival, finish adds the scaled computation
// time.
struct EftResult {
    double start = 0.0;
    double finish = 0.0;
};
EftResult eft(const ReadyTaskView& task, const PeView& pe, const Platform& platform);

// Earliest start >= earliest_start such that [start, start + duration)
// misses every busy interval. Appending after the last interval always
// works, so a start always exists.
double insertion_slot(double duration, double earliest_start,
                      const std::vector<std::pair<double, double>>& timeline);

class RandomScheduler final : public Scheduler {
public:
    const char* name() const override { return "random"; }
    Assignment schedule(const SchedulerView& view, Rng& rng) override;
};

// Shortest Task First: ready tasks ascending by their minimum execution
// time, each mapped to its fastest PE. Ignores PE busyness.
class StfScheduler final : public Scheduler {
public:
    const char* name() const override { return "stf"; }
    Assignment schedule(const SchedulerView& view, Rng& rng) override;
};

// Minimum Execution Time: like STF, but a busy argmin PE is swapped for the
// fastest idle one; with every PE busy the argmin stands.
class MetScheduler final : public Scheduler {
public:
    const char* name() const override { return "met"; }
    Assignment schedule(const SchedulerView& view, Rng& rng) override;
};

// Run-time HEFT: schedules the current ready set by descending upward rank,
// each task to the PE with the minimum (optionally insertion-aware) EFT.
class HeftRtScheduler final : public Scheduler {
public:
    explicit HeftRtScheduler(bool insertion = true) : insertion_(insertion) {}
    const char* name() const override { return insertion_ ? "heft_rt" : "heft_rt_noinsert"; }
    Assignment schedule(const SchedulerView& view, Rng& rng) override;
    void on_job_injected(const JobDag& dag) override;

    // Per-decision planned finish times of the latest call, used by the
    // insertion-dominance checks.
    const std::vector<double>& last_finishes() const { return last_finishes_; }

private:
    bool insertion_ = true;
    std::map<int, std::map<int, double>> ranks_; // job_id -> task_id -> rank
    std::vector<double> last_finishes_;
};

// Factory for the CLI names: random | stf | met | heft_rt | heft_rt_noinsert.
// The neural scheduler is constructed separately (it needs a model).
std::unique_ptr<Scheduler> make_heuristic_scheduler(const std::string& name);

} // namespace socsim
