#include "socsim/engine.hpp"

#include "socsim/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace socsim {

RewardKind reward_kind_from_name(const std::string& name) {
    if (name == "dense") return RewardKind::dense;
    if (name == "dense2") return RewardKind::dense2;
    if (name == "sparse") return RewardKind::sparse;
    if (name == "sparse2") return RewardKind::sparse2;
    throw std::invalid_argument("unknown reward kind '" + name + "'");
}

const char* reward_kind_name(RewardKind kind) {
    switch (kind) {
    case RewardKind::dense: return "dense";
    case RewardKind::dense2: return "dense2";
    case RewardKind::sparse: return "sparse";
    case RewardKind::sparse2: return "sparse2";
    }
    return "?";
}

double reward(std::int64_t clk, int newly_completed, RewardKind kind, double c1, double c2,
              std::int64_t sparse_window, std::int64_t sim_length) {
    double bonus = c1 * static_cast<double>(newly_completed);
    switch (kind) {
    case RewardKind::dense: return bonus + c2 * static_cast<double>(clk);
    case RewardKind::dense2: return bonus;
    case RewardKind::sparse: return clk >= sim_length - sparse_window ? bonus : 0.0;
    case RewardKind::sparse2: return clk == sim_length ? bonus : 0.0;
    }
    throw std::invalid_argument("unknown reward kind");
}

std::int64_t draw_interarrival(Rng& rng, double scale) {
    double gap = rng.exponential(scale);
    auto ticks = static_cast<std::int64_t>(std::ceil(gap));
    return std::max<std::int64_t>(1, ticks);
}

SimConfig parse_sim_config(std::string_view text) {
    SimConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() != 3 || tok[1] != "=")
            throw ParseError(line_no, "expected 'key = value'");
        std::string key(tok[0]);
        std::string_view val = tok[2];
        if (key == "scale") cfg.scale = parse_double(val, line_no, "scale");
        else if (key == "sim_length") cfg.sim_length = parse_int(val, line_no, "sim_length");
        else if (key == "capacity") cfg.capacity = static_cast<int>(parse_int(val, line_no, "capacity"));
        else if (key == "num_workloads") cfg.num_workloads = static_cast<int>(parse_int(val, line_no, "num_workloads"));
        else if (key == "quasi_steady") cfg.quasi_steady = parse_int(val, line_no, "quasi_steady") != 0;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(val, line_no, "seed"));
        else if (key == "reward_kind") cfg.reward_kind = reward_kind_from_name(std::string(val));
        else if (key == "c1") cfg.c1 = parse_double(val, line_no, "c1");
        else if (key == "c2") cfg.c2 = parse_double(val, line_no, "c2");
        else if (key == "sparse_window") cfg.sparse_window = parse_int(val, line_no, "sparse_window");
        else throw ParseError(line_no, "unknown key '" + key + "'");
    }
    return cfg;
}

std::string write_sim_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "scale = " << fmt_double(cfg.scale) << "\n";
    out << "sim_length = " << cfg.sim_length << "\n";
    out << "capacity = " << cfg.capacity << "\n";
    out << "num_workloads = " << cfg.num_workloads << "\n";
    out << "quasi_steady = " << (cfg.quasi_steady ? 1 : 0) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "reward_kind = " << reward_kind_name(cfg.reward_kind) << "\n";
    out << "c1 = " << fmt_double(cfg.c1) << "\n";
    out << "c2 = " << fmt_double(cfg.c2) << "\n";
    out << "sparse_window = " << cfg.sparse_window << "\n";
    return out.str();
}

double EpisodeResult::total_reward() const {
    double sum = 0.0;
    for (double r : reward_stream) sum += r;
    return sum;
}

namespace {

struct TaskRt {
    TaskStatus status = TaskStatus::outstanding;
    int assigned_pe = -1;
    std::int64_t ready_clk = -1;
    std::int64_t assign_clk = -1;
    std::int64_t start_clk = -1;
    std::int64_t completion_clk = -1;
    double duration = 0.0;
    double planned_start = -1.0;
    bool has_planned = false;
    int remaining_preds = 0;
    std::int64_t assign_seq = -1;
    std::vector<ParentPlacement> parents;
    // backref into the interaction log
    int log_step = -1;
    int log_slot = -1;
};

struct JobRt {
    JobDag dag; // instance copy, job_id assigned at injection
    std::int64_t inject_clk = 0;
    int remaining = 0;
    bool completed = false;
    std::vector<TaskRt> tasks;                 // by node index
    std::map<int, std::size_t> index_of;       // task_id -> node index
    std::vector<std::vector<std::size_t>> preds, succs;
};

struct QueuedRef {
    std::size_t job;
    std::size_t node;
};

struct PeRt {
    int pe_id = 0;
    bool has_running = false;
    QueuedRef running{};
    std::vector<QueuedRef> queue; // assigned, waiting for the PE
    std::int64_t active_ticks = 0;
    std::int64_t blocking_ticks = 0;
    std::int64_t execution_count = 0;
};

} // namespace

EpisodeResult run_episode(std::span<const JobDag> jobdags, const Platform& platform, Scheduler& scheduler,
                          const SimConfig& config) {
    if (config.sim_length <= 0) throw std::invalid_argument("run_episode: sim_length must be > 0");
    if (config.capacity <= 0) throw std::invalid_argument("run_episode: capacity must be > 0");
    if (config.scale <= 0.0) throw std::invalid_argument("run_episode: scale must be > 0");
    if (config.quasi_steady && config.num_workloads < config.capacity)
        throw std::invalid_argument("run_episode: quasi steady requires num_workloads >= capacity");
    if (platform.pes.empty()) throw std::invalid_argument("run_episode: platform has no PEs");

    Rng root(config.seed);
    Rng inj_rng = root.split(1);
    Rng sched_rng = root.split(2);

    EpisodeResult result;
    std::vector<JobRt> jobs;            // all injected instances, in injection order
    std::vector<std::size_t> active;    // indices into jobs, injection order
    std::vector<PeRt> pes;
    for (const auto& pe : platform.pes) {
        PeRt rt;
        rt.pe_id = pe.pe_id;
        pes.push_back(rt);
    }
    std::sort(pes.begin(), pes.end(), [](const PeRt& a, const PeRt& b) { return a.pe_id < b.pe_id; });

    const std::int64_t CLK = config.sim_length;
    std::int64_t assign_seq = 0;

    auto inject_job = [&](std::int64_t clk) {
        if (jobdags.empty()) return false;
        if (result.jobs_injected >= config.num_workloads) return false;
        if (static_cast<int>(active.size()) >= config.capacity) return false;
        const JobDag& tpl = jobdags[static_cast<std::size_t>(result.jobs_injected) % jobdags.size()];
        JobRt job;
        job.dag = tpl;
        job.dag.job_id = result.jobs_injected;
        job.inject_clk = clk;
        job.remaining = static_cast<int>(job.dag.nodes.size());
        job.tasks.resize(job.dag.nodes.size());
        job.preds.resize(job.dag.nodes.size());
        job.succs.resize(job.dag.nodes.size());
        for (std::size_t i = 0; i < job.dag.nodes.size(); ++i)
            job.index_of[job.dag.nodes[i].task_id] = i;
        for (const auto& e : job.dag.edges) {
            std::size_t s = job.index_of.at(e.src);
            std::size_t d = job.index_of.at(e.dst);
            job.preds[d].push_back(s);
            job.succs[s].push_back(d);
        }
        for (std::size_t i = 0; i < job.tasks.size(); ++i)
            job.tasks[i].remaining_preds = static_cast<int>(job.preds[i].size());
        jobs.push_back(std::move(job));
        active.push_back(jobs.size() - 1);
        ++result.jobs_injected;
        result.tasks_injected += static_cast<int>(jobs.back().dag.nodes.size());
        result.trace.push_back({clk, TraceKind::inject, jobs.back().dag.job_id, -1, -1});
        scheduler.on_job_injected(jobs.back().dag);
        return true;
    };

    std::int64_t next_inject_clk = -1;
    if (config.quasi_steady) {
        while (static_cast<int>(active.size()) < config.capacity && inject_job(0)) {
        }
    } else {
        next_inject_clk = draw_interarrival(inj_rng, config.scale);
    }

    int newly_completed_jobs = 0;

    auto complete_running = [&](PeRt& pe, std::int64_t clk) {
        JobRt& job = jobs[pe.running.job];
        TaskRt& task = job.tasks[pe.running.node];
        const TaskTemplate& node = job.dag.nodes[pe.running.node];
        task.status = TaskStatus::completed;
        task.completion_clk = clk;
        pe.has_running = false;
        result.trace.push_back({clk, TraceKind::complete, job.dag.job_id, node.task_id, pe.pe_id});
        if (task.log_step >= 0)
            result.interaction_log[static_cast<std::size_t>(task.log_step)]
                .actions[static_cast<std::size_t>(task.log_slot)]
                .completion_clk = clk;
        ++result.tasks_completed;
        for (std::size_t succ : job.succs[pe.running.node])
            --job.tasks[succ].remaining_preds;
        if (--job.remaining == 0) {
            job.completed = true;
            ++newly_completed_jobs;
            result.trace.push_back({clk, TraceKind::job_complete, job.dag.job_id, -1, -1});

            JobRuntimeRecord rec;
            rec.job_id = job.dag.job_id;
            rec.inject_clk = job.inject_clk;
            rec.completion_clk = clk;
            rec.makespan = clk - job.inject_clk;
            rec.dag = job.dag;
            for (std::size_t i = 0; i < job.tasks.size(); ++i) {
                const TaskRt& t = job.tasks[i];
                TaskRecord r;
                r.job_id = job.dag.job_id;
                r.task_id = job.dag.nodes[i].task_id;
                r.status = t.status;
                r.assigned_pe = t.assigned_pe;
                r.ready_clk = t.ready_clk;
                r.assign_clk = t.assign_clk;
                r.start_clk = t.start_clk;
                r.completion_clk = t.completion_clk;
                r.duration = t.duration;
                rec.tasks.push_back(r);
            }
            result.completed_jobs.push_back(std::move(rec));

            auto it = std::find(active.begin(), active.end(), pe.running.job);
            if (it != active.end()) active.erase(it);
            if (config.quasi_steady) inject_job(clk);
        }
    };

    auto build_view = [&](std::int64_t clk) {
        SchedulerView view;
        view.clk = clk;
        view.platform = &platform;
        for (std::size_t ji : active) {
            JobRt& job = jobs[ji];
            JobView jv;
            jv.job_id = job.dag.job_id;
            jv.inject_clk = job.inject_clk;
            jv.dag = &job.dag;
            std::vector<std::pair<int, std::size_t>> order;
            for (const auto& [tid, idx] : job.index_of) order.emplace_back(tid, idx);
            for (const auto& [tid, idx] : order) {
                const TaskRt& t = job.tasks[idx];
                TaskStateView sv;
                sv.task_id = tid;
                sv.status = t.status;
                sv.assigned_pe = t.assigned_pe;
                sv.ready_clk = t.ready_clk;
                sv.start_clk = t.start_clk;
                sv.remaining_preds = t.remaining_preds;
                jv.tasks.push_back(sv);
                if (t.status == TaskStatus::ready && t.assigned_pe < 0) {
                    ReadyTaskView rv;
                    rv.job_id = job.dag.job_id;
                    rv.task_id = tid;
                    rv.ready_clk = t.ready_clk;
                    rv.dag = &job.dag;
                    rv.task = &job.dag.nodes[idx];
                    rv.parents = t.parents;
                    view.ready.push_back(std::move(rv));
                }
            }
            view.jobs.push_back(std::move(jv));
        }
        for (const auto& pe : pes) {
            PeView pv;
            pv.pe_id = pe.pe_id;
            pv.busy = pe.has_running || !pe.queue.empty();
            double cursor = static_cast<double>(clk);
            if (pe.has_running) {
                const TaskRt& t = jobs[pe.running.job].tasks[pe.running.node];
                double finish = static_cast<double>(t.start_clk) + t.duration;
                pv.timeline.emplace_back(static_cast<double>(t.start_clk), finish);
                cursor = std::max(cursor, finish);
            }
            std::vector<QueuedRef> q = pe.queue;
            std::sort(q.begin(), q.end(), [&](const QueuedRef& a, const QueuedRef& b) {
                const TaskRt& ta = jobs[a.job].tasks[a.node];
                const TaskRt& tb = jobs[b.job].tasks[b.node];
                double ka = ta.has_planned ? ta.planned_start : static_cast<double>(ta.assign_seq);
                double kb = tb.has_planned ? tb.planned_start : static_cast<double>(tb.assign_seq);
                return ka != kb ? ka < kb : ta.assign_seq < tb.assign_seq;
            });
            for (const auto& ref : q) {
                const TaskRt& t = jobs[ref.job].tasks[ref.node];
                double s = cursor;
                if (t.has_planned) s = std::max(s, t.planned_start);
                pv.timeline.emplace_back(s, s + t.duration);
                cursor = s + t.duration;
            }
            pv.avail = cursor;
            view.pes.push_back(std::move(pv));
        }
        return view;
    };

    // Main loop. Tick clk covers real time [clk, clk+1); completions are
    // swept at the head of each tick so finished tasks free their PE and
    // unblock children within the same tick. A final sweep at clk == CLK
    // records completions landing exactly at the horizon.
    for (std::int64_t clk = 0; clk <= CLK; ++clk) {
        newly_completed_jobs = 0;

        // completions
        for (auto& pe : pes) {
            if (!pe.has_running) continue;
            const TaskRt& t = jobs[pe.running.job].tasks[pe.running.node];
            if (static_cast<double>(t.start_clk) + t.duration <= static_cast<double>(clk))
                complete_running(pe, clk);
        }

        if (clk == CLK) {
            if (CLK >= 1)
                result.reward_stream.push_back(reward(clk, newly_completed_jobs, config.reward_kind, config.c1,
                                                      config.c2, config.sparse_window, CLK));
            break;
        }

        // injection
        if (!config.quasi_steady && next_inject_clk >= 0 && clk >= next_inject_clk) {
            if (inject_job(clk)) next_inject_clk = clk + draw_interarrival(inj_rng, config.scale);
            // queue full: keep the pending injection until capacity frees
        }

        // ready promotion
        for (std::size_t ji : active) {
            JobRt& job = jobs[ji];
            for (std::size_t i = 0; i < job.tasks.size(); ++i) {
                TaskRt& t = job.tasks[i];
                if (t.status != TaskStatus::outstanding || t.remaining_preds != 0) continue;
                t.status = TaskStatus::ready;
                t.ready_clk = clk;
                for (std::size_t p : job.preds[i]) {
                    const TaskRt& parent = job.tasks[p];
                    double w = 0.0;
                    for (const auto& e : job.dag.edges)
                        if (e.src == job.dag.nodes[p].task_id && e.dst == job.dag.nodes[i].task_id) w = e.weight;
                    t.parents.push_back({parent.assigned_pe, w, static_cast<double>(parent.completion_clk)});
                }
                result.trace.push_back({clk, TraceKind::ready, job.dag.job_id, job.dag.nodes[i].task_id, -1});
            }
        }

        // scheduling
        bool any_ready = false;
        for (std::size_t ji : active) {
            for (const auto& t : jobs[ji].tasks)
                if (t.status == TaskStatus::ready && t.assigned_pe < 0) { any_ready = true; break; }
            if (any_ready) break;
        }
        if (any_ready) {
            SchedulerView view = build_view(clk);
            Assignment assignment = scheduler.schedule(view, sched_rng);
            if (!assignment.items.empty()) {
                InteractionStep step;
                step.clk = clk;
                for (const auto& item : assignment.items) {
                    // locate the job instance
                    JobRt* job = nullptr;
                    std::size_t ji = 0;
                    for (std::size_t cand : active)
                        if (jobs[cand].dag.job_id == item.job_id) { job = &jobs[cand]; ji = cand; break; }
                    if (!job)
                        throw std::runtime_error(std::string("scheduler '") + scheduler.name() +
                                                 "' assigned task of unknown job " + std::to_string(item.job_id));
                    auto idx_it = job->index_of.find(item.task_id);
                    if (idx_it == job->index_of.end())
                        throw std::runtime_error(std::string("scheduler '") + scheduler.name() + "' assigned unknown task " +
                                                 std::to_string(item.task_id) + " of job " + std::to_string(item.job_id));
                    std::size_t ni = idx_it->second;
                    TaskRt& t = job->tasks[ni];
                    if (t.status != TaskStatus::ready || t.assigned_pe >= 0)
                        throw std::runtime_error(std::string("scheduler '") + scheduler.name() + "' assigned non-ready task " +
                                                 std::to_string(item.task_id) + " of job " + std::to_string(item.job_id));
                    const TaskTemplate& node = job->dag.nodes[ni];
                    if (!platform.supports(node, item.pe_id))
                        throw std::runtime_error(std::string("scheduler '") + scheduler.name() + "' assigned task " +
                                                 std::to_string(item.task_id) + " to unsupported pe " +
                                                 std::to_string(item.pe_id));
                    PeRt* pe = nullptr;
                    for (auto& cand : pes)
                        if (cand.pe_id == item.pe_id) { pe = &cand; break; }
                    if (!pe) throw std::runtime_error("scheduler assigned unknown pe " + std::to_string(item.pe_id));

                    t.assigned_pe = item.pe_id;
                    t.assign_clk = clk;
                    t.assign_seq = assign_seq++;
                    if (item.planned_start) {
                        t.has_planned = true;
                        t.planned_start = *item.planned_start;
                    }
                    t.duration = exec_time(node, item.pe_id, t.parents, platform);
                    pe->queue.push_back({ji, ni});

                    LoggedAction la;
                    la.job_id = item.job_id;
                    la.task_id = item.task_id;
                    la.pe_id = item.pe_id;
                    la.sched_clk = clk;
                    t.log_step = static_cast<int>(result.interaction_log.size());
                    t.log_slot = static_cast<int>(step.actions.size());
                    step.actions.push_back(la);
                    result.trace.push_back({clk, TraceKind::assign, item.job_id, item.task_id, item.pe_id});
                }
                result.interaction_log.push_back(std::move(step));
            }
        }

        // execution: idle PEs pull their next committed task
        for (auto& pe : pes) {
            if (pe.has_running || pe.queue.empty()) continue;
            std::size_t best = 0;
            for (std::size_t i = 1; i < pe.queue.size(); ++i) {
                const TaskRt& a = jobs[pe.queue[i].job].tasks[pe.queue[i].node];
                const TaskRt& b = jobs[pe.queue[best].job].tasks[pe.queue[best].node];
                double ka = a.has_planned ? a.planned_start : static_cast<double>(a.assign_seq);
                double kb = b.has_planned ? b.planned_start : static_cast<double>(b.assign_seq);
                if (ka < kb || (ka == kb && a.assign_seq < b.assign_seq)) best = i;
            }
            QueuedRef ref = pe.queue[best];
            pe.queue.erase(pe.queue.begin() + static_cast<std::ptrdiff_t>(best));
            JobRt& job = jobs[ref.job];
            TaskRt& t = job.tasks[ref.node];
            t.status = TaskStatus::running;
            t.start_clk = clk;
            pe.has_running = true;
            pe.running = ref;
            ++pe.execution_count;
            if (t.log_step >= 0)
                result.interaction_log[static_cast<std::size_t>(t.log_step)]
                    .actions[static_cast<std::size_t>(t.log_slot)]
                    .start_clk = clk;
            result.trace.push_back({clk, TraceKind::start, job.dag.job_id, job.dag.nodes[ref.node].task_id, pe.pe_id});
        }

        // occupancy bookkeeping for the tick [clk, clk+1)
        for (auto& pe : pes) {
            if (!pe.has_running) continue;
            ++pe.active_ticks;
            if (!pe.queue.empty()) ++pe.blocking_ticks;
        }

        if (clk >= 1)
            result.reward_stream.push_back(
                reward(clk, newly_completed_jobs, config.reward_kind, config.c1, config.c2, config.sparse_window, CLK));
    }

    // truncation flags and end-of-episode census
    for (auto& step : result.interaction_log)
        for (auto& a : step.actions)
            if (a.completion_clk < 0) a.truncated = true;
    for (const auto& job : jobs) {
        for (const auto& t : job.tasks) {
            switch (t.status) {
            case TaskStatus::running: ++result.tasks_running_at_end; break;
            case TaskStatus::ready: ++result.tasks_ready_at_end; break;
            case TaskStatus::outstanding: ++result.tasks_outstanding_at_end; break;
            case TaskStatus::completed: break;
            }
        }
    }
    for (const auto& pe : pes) {
        PeStats s;
        s.pe_id = pe.pe_id;
        s.execution_count = pe.execution_count;
        s.active_time = pe.active_ticks;
        s.blocking_time = pe.blocking_ticks;
        result.pe_stats.push_back(s);
    }
    return result;
}

std::vector<PeStats> pe_usage_stats(const EpisodeResult& result, const Platform& platform) {
    const auto CLK = static_cast<std::int64_t>(result.reward_stream.size());
    std::vector<PeStats> stats;
    for (const auto& pe : platform.pes) {
        PeStats s;
        s.pe_id = pe.pe_id;
        stats.push_back(s);
    }
    std::sort(stats.begin(), stats.end(), [](const PeStats& a, const PeStats& b) { return a.pe_id < b.pe_id; });

    for (auto& s : stats) {
        std::vector<int> busy(static_cast<std::size_t>(CLK) + 1, 0);
        std::vector<int> waiting(static_cast<std::size_t>(CLK) + 1, 0);
        auto mark = [CLK](std::vector<int>& diff, std::int64_t from, std::int64_t to) {
            from = std::clamp<std::int64_t>(from, 0, CLK);
            to = std::clamp<std::int64_t>(to, 0, CLK);
            if (from >= to) return;
            ++diff[static_cast<std::size_t>(from)];
            --diff[static_cast<std::size_t>(to)];
        };
        for (const auto& step : result.interaction_log) {
            for (const auto& a : step.actions) {
                if (a.pe_id != s.pe_id) continue;
                std::int64_t start = a.start_clk >= 0 ? a.start_clk : CLK;
                std::int64_t end = a.completion_clk >= 0 ? a.completion_clk : CLK;
                if (a.start_clk >= 0) {
                    ++s.execution_count;
                    mark(busy, start, end);
                }
                mark(waiting, a.sched_clk, start);
            }
        }
        int b = 0, w = 0;
        for (std::int64_t t = 0; t < CLK; ++t) {
            b += busy[static_cast<std::size_t>(t)];
            w += waiting[static_cast<std::size_t>(t)];
            if (b > 0) ++s.active_time;
            if (b > 0 && w > 0) ++s.blocking_time;
        }
    }
    return stats;
}

std::string write_trace_csv(const EpisodeResult& result) {
    std::ostringstream out;
    out << "# socsim trace v1\n";
    out << "clk,kind,job,task,pe\n";
    auto kind_name = [](TraceKind k) {
        switch (k) {
        case TraceKind::inject: return "inject";
        case TraceKind::ready: return "ready";
        case TraceKind::assign: return "assign";
        case TraceKind::start: return "start";
        case TraceKind::complete: return "complete";
        case TraceKind::job_complete: return "job_complete";
        }
        return "?";
    };
    for (const auto& e : result.trace)
        out << e.clk << "," << kind_name(e.kind) << "," << e.job_id << "," << e.task_id << "," << e.pe_id << "\n";
    return out.str();
}

} // namespace socsim
