#include "socsim/sched_heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace socsim {

std::map<int, double> rank_u(const JobDag& dag, const Platform& platform) {
    double mean_bw = platform.mean_bandwidth();

    std::map<int, double> mean_cost;
    for (const auto& n : dag.nodes) {
        if (n.comp_cost.empty())
            throw std::invalid_argument("rank_u: task " + std::to_string(n.task_id) + " unsupported");
        double sum = 0.0;
        for (const auto& [pe, c] : n.comp_cost) sum += c;
        mean_cost[n.task_id] = sum / static_cast<double>(n.comp_cost.size());
    }

    std::map<int, std::vector<const DagEdge*>> out_edges;
    for (const auto& e : dag.edges) out_edges[e.src].push_back(&e);

    std::map<int, double> ranks;
    // reverse topological order = descending longest-path level
    auto levels = node_levels(dag);
    std::vector<std::pair<int, int>> order; // (level, task_id)
    for (std::size_t i = 0; i < dag.nodes.size(); ++i)
        order.emplace_back(levels[i], dag.nodes[i].task_id);
    std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });

    for (const auto& [level, tid] : order) {
        double best_child = 0.0;
        if (auto it = out_edges.find(tid); it != out_edges.end()) {
            for (const DagEdge* e : it->second) {
                double c = e->weight / mean_bw;
                best_child = std::max(best_child, c + ranks.at(e->dst));
            }
        }
        ranks[tid] = mean_cost.at(tid) + best_child;
    }
    return ranks;
}

EftResult eft(const ReadyTaskView& task, const PeView& pe, const Platform& platform) {
    auto cost_it = task.task->comp_cost.find(pe.pe_id);
    if (cost_it == task.task->comp_cost.end())
        throw std::invalid_argument("eft: task " + std::to_string(task.task_id) + " not supported by pe " +
                                    std::to_string(pe.pe_id));
    double start = pe.avail;
    for (const auto& p : task.parents) {
        double c = p.pe_id == pe.pe_id ? 0.0 : p.edge_weight / platform.bandwidth_between(p.pe_id, pe.pe_id);
        start = std::max(start, p.finish_time + c);
    }
    return {start, start + platform.mu * cost_it->second};
}

double insertion_slot(double duration, double earliest_start,
                      const std::vector<std::pair<double, double>>& timeline) {
    double cursor = earliest_start;
    for (const auto& [busy_start, busy_end] : timeline) {
        if (cursor + duration <= busy_start) return cursor;
        cursor = std::max(cursor, busy_end);
    }
    return cursor;
}

namespace {

double min_exec_time(const ReadyTaskView& task, const Platform& platform, int* argmin_pe) {
    double best = std::numeric_limits<double>::infinity();
    int best_pe = -1;
    for (const auto& [pe, cost] : task.task->comp_cost) {
        double t = exec_time(*task.task, pe, task.parents, platform);
        if (t < best) { // map iterates ascending pe_id, so ties keep the lowest
            best = t;
            best_pe = pe;
        }
    }
    if (best_pe < 0)
        throw std::invalid_argument("task " + std::to_string(task.task_id) + " has no supporting PE");
    if (argmin_pe) *argmin_pe = best_pe;
    return best;
}

// STF/MET task order: ascending min exec time, ties by task then job id.
std::vector<std::size_t> stf_order(const SchedulerView& view) {
    struct Key {
        double t;
        int task_id;
        int job_id;
        std::size_t idx;
    };
    std::vector<Key> keys;
    for (std::size_t i = 0; i < view.ready.size(); ++i) {
        const auto& rt = view.ready[i];
        keys.push_back({min_exec_time(rt, *view.platform, nullptr), rt.task_id, rt.job_id, i});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.task_id != b.task_id) return a.task_id < b.task_id;
        return a.job_id < b.job_id;
    });
    std::vector<std::size_t> order;
    for (const auto& k : keys) order.push_back(k.idx);
    return order;
}

} // namespace

Assignment RandomScheduler::schedule(const SchedulerView& view, Rng& rng) {
    Assignment out;
    for (const auto& task : view.ready) {
        std::vector<int> supporting;
        for (const auto& [pe, cost] : task.task->comp_cost) supporting.push_back(pe);
        if (supporting.empty())
            throw std::invalid_argument("task " + std::to_string(task.task_id) + " has no supporting PE");
        int pe = supporting[static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(supporting.size())))];
        out.items.push_back({task.job_id, task.task_id, pe, std::nullopt});
    }
    return out;
}

Assignment StfScheduler::schedule(const SchedulerView& view, Rng&) {
    Assignment out;
    for (std::size_t idx : stf_order(view)) {
        const auto& task = view.ready[idx];
        int pe = -1;
        min_exec_time(task, *view.platform, &pe);
        out.items.push_back({task.job_id, task.task_id, pe, std::nullopt});
    }
    return out;
}

Assignment MetScheduler::schedule(const SchedulerView& view, Rng&) {
    // busy = running or holding queued work; assignments made earlier in
    // this same call count immediately
    std::map<int, bool> busy;
    for (const auto& pe : view.pes) busy[pe.pe_id] = pe.busy;

    Assignment out;
    for (std::size_t idx : stf_order(view)) {
        const auto& task = view.ready[idx];
        int pe = -1;
        min_exec_time(task, *view.platform, &pe);
        if (busy[pe]) {
            double best = std::numeric_limits<double>::infinity();
            int best_idle = -1;
            for (const auto& [cand, cost] : task.task->comp_cost) {
                if (busy[cand]) continue;
                double t = exec_time(*task.task, cand, task.parents, *view.platform);
                if (t < best) {
                    best = t;
                    best_idle = cand;
                }
            }
            if (best_idle >= 0) pe = best_idle;
        }
        busy[pe] = true;
        out.items.push_back({task.job_id, task.task_id, pe, std::nullopt});
    }
    return out;
}

void HeftRtScheduler::on_job_injected(const JobDag& dag) {
    // ranks are computed lazily at the first schedule() call that sees this
    // job (the platform is not available here); drop any entry a previous
    // episode left under the same job id
    ranks_.erase(dag.job_id);
}

Assignment HeftRtScheduler::schedule(const SchedulerView& view, Rng&) {
    last_finishes_.clear();
    for (const auto& task : view.ready) {
        if (!ranks_.count(task.job_id)) ranks_[task.job_id] = rank_u(*task.dag, *view.platform);
    }

    std::vector<std::size_t> order(view.ready.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ta = view.ready[a];
        const auto& tb = view.ready[b];
        double ra = ranks_.at(ta.job_id).at(ta.task_id);
        double rb = ranks_.at(tb.job_id).at(tb.task_id);
        if (ra != rb) return ra > rb;
        if (ta.task_id != tb.task_id) return ta.task_id < tb.task_id;
        return ta.job_id < tb.job_id;
    });

    // working copy of the committed occupancy, updated between decisions
    std::map<int, std::vector<std::pair<double, double>>> timeline;
    std::map<int, double> avail;
    for (const auto& pe : view.pes) {
        timeline[pe.pe_id] = pe.timeline;
        avail[pe.pe_id] = pe.avail;
    }

    Assignment out;
    for (std::size_t idx : order) {
        const auto& task = view.ready[idx];
        double best_finish = std::numeric_limits<double>::infinity();
        double best_start = 0.0;
        int best_pe = -1;
        for (const auto& [pe_id, cost] : task.task->comp_cost) {
            double arrival = static_cast<double>(view.clk);
            for (const auto& p : task.parents) {
                double c = p.pe_id == pe_id ? 0.0
                                            : p.edge_weight / view.platform->bandwidth_between(p.pe_id, pe_id);
                arrival = std::max(arrival, p.finish_time + c);
            }
            double duration = view.platform->mu * cost;
            double start = insertion_ ? insertion_slot(duration, arrival, timeline.at(pe_id))
                                      : std::max(arrival, avail.at(pe_id));
            double finish = start + duration;
            if (finish < best_finish) { // comp_cost iterates ascending pe_id: ties keep the lowest
                best_finish = finish;
                best_start = start;
                best_pe = pe_id;
            }
        }
        if (best_pe < 0)
            throw std::invalid_argument("task " + std::to_string(task.task_id) + " has no supporting PE");

        auto& tl = timeline.at(best_pe);
        tl.emplace_back(best_start, best_finish);
        std::sort(tl.begin(), tl.end());
        avail[best_pe] = std::max(avail.at(best_pe), best_finish);
        last_finishes_.push_back(best_finish);
        out.items.push_back({task.job_id, task.task_id, best_pe, best_start});
    }
    return out;
}

std::unique_ptr<Scheduler> make_heuristic_scheduler(const std::string& name) {
    if (name == "random") return std::make_unique<RandomScheduler>();
    if (name == "stf") return std::make_unique<StfScheduler>();
    if (name == "met") return std::make_unique<MetScheduler>();
    if (name == "heft_rt") return std::make_unique<HeftRtScheduler>(true);
    if (name == "heft_rt_noinsert") return std::make_unique<HeftRtScheduler>(false);
    throw std::invalid_argument("unknown scheduler '" + name + "'");
}

} // namespace socsim
