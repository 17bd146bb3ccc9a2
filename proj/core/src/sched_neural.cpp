#include "socsim/sched_neural.hpp"

#include "socsim/metrics.hpp"
#include "socsim/util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace socsim {

ActionMode action_mode_from_name(const std::string& name) {
    if (name == "independent") return ActionMode::independent;
    if (name == "group") return ActionMode::group;
    throw std::invalid_argument("unknown action mode '" + name + "'");
}

const char* action_mode_name(ActionMode mode) {
    return mode == ActionMode::independent ? "independent" : "group";
}

namespace {

void write_task_features(std::span<double> out, const TaskStateView& t, std::int64_t clk, double time_norm) {
    out[0] = static_cast<double>(t.assigned_pe); // -1 when unassigned
    out[1] = t.status == TaskStatus::ready ? 1.0 : 0.0;
    out[2] = t.status == TaskStatus::running ? 1.0 : 0.0;
    out[3] = t.status == TaskStatus::outstanding ? 1.0 : 0.0;
    double waited = 0.0;
    if (t.status == TaskStatus::ready && t.ready_clk >= 0) waited = static_cast<double>(clk - t.ready_clk);
    if (t.status == TaskStatus::running && t.ready_clk >= 0 && t.start_clk >= 0)
        waited = static_cast<double>(t.start_clk - t.ready_clk);
    out[4] = waited / time_norm;
    out[5] = static_cast<double>(t.remaining_preds);
}

} // namespace

std::vector<double> build_observation(const SchedulerView& view, const ObservationSpec& spec) {
    if (static_cast<int>(view.jobs.size()) > spec.capacity)
        throw std::invalid_argument("build_observation: more jobs than capacity slots");

    std::vector<double> obs(static_cast<std::size_t>(spec.dim()), 0.0);
    int n_child = 0;
    for (std::size_t j = 0; j < view.jobs.size(); ++j) {
        const JobView& job = view.jobs[j];
        if (static_cast<int>(job.tasks.size()) > spec.v_max)
            throw std::invalid_argument("build_observation: job " + std::to_string(job.job_id) + " exceeds v_max");

        std::size_t base = j * static_cast<std::size_t>(spec.v_max) * ObservationSpec::task_features;
        for (std::size_t t = 0; t < job.tasks.size(); ++t) {
            const TaskStateView& task = job.tasks[t];
            write_task_features(std::span<double>(&obs[base + t * ObservationSpec::task_features],
                                                  ObservationSpec::task_features),
                                task, view.clk, spec.time_norm);
            if (task.status == TaskStatus::ready || task.status == TaskStatus::outstanding) ++n_child;
        }

        // remaining dependency hops: levels still holding unfinished tasks
        auto levels = node_levels(*job.dag);
        std::map<int, std::size_t> index;
        for (std::size_t i = 0; i < job.dag->nodes.size(); ++i) index[job.dag->nodes[i].task_id] = i;
        std::set<int> open_levels;
        for (const auto& task : job.tasks)
            if (task.status != TaskStatus::completed) open_levels.insert(levels[index.at(task.task_id)]);

        std::size_t job_base = static_cast<std::size_t>(spec.capacity) * static_cast<std::size_t>(spec.v_max) *
                                   ObservationSpec::task_features +
                               j * 2;
        obs[job_base] = static_cast<double>(open_levels.size());
        obs[job_base + 1] = static_cast<double>(view.clk - job.inject_clk) / spec.time_norm;
    }
    obs.back() = static_cast<double>(n_child);
    return obs;
}

namespace {

// Ascending PE ids backing the logit chunks.
std::vector<int> chunk_pe_ids(const SchedulerView& view, const ObservationSpec& spec) {
    std::vector<int> ids;
    for (const auto& pe : view.pes) ids.push_back(pe.pe_id);
    std::sort(ids.begin(), ids.end());
    if (static_cast<int>(ids.size()) != spec.num_pes)
        throw std::invalid_argument("sample_actions: platform PE count does not match the observation spec");
    return ids;
}

// Query block of one ready task: the same 6 features a task slot uses, plus
// its support mask.
void append_query_block(std::vector<double>& input, const ReadyTaskView& task, const ObservationSpec& spec,
                        std::int64_t clk, const std::vector<int>& pe_ids, std::vector<std::uint8_t>& mask_out) {
    TaskStateView sv;
    sv.task_id = task.task_id;
    sv.status = TaskStatus::ready;
    sv.assigned_pe = -1;
    sv.ready_clk = task.ready_clk;
    sv.start_clk = -1;
    sv.remaining_preds = 0;
    double features[ObservationSpec::task_features];
    write_task_features(std::span<double>(features, ObservationSpec::task_features), sv, clk, spec.time_norm);
    for (double f : features) input.push_back(f);

    mask_out.assign(static_cast<std::size_t>(spec.num_pes), 0);
    bool any = false;
    for (int q = 0; q < spec.num_pes; ++q) {
        bool ok = task.task->comp_cost.count(pe_ids[static_cast<std::size_t>(q)]) != 0;
        mask_out[static_cast<std::size_t>(q)] = ok ? 1 : 0;
        input.push_back(ok ? 1.0 : 0.0);
        any = any || ok;
    }
    if (!any)
        throw std::invalid_argument("task " + std::to_string(task.task_id) + " supports no PE in the platform");
}

} // namespace

SampleResult sample_actions(const SchedulerView& view, const PolicyModel& model, Rng& rng, ActionMode mode,
                            const ObservationSpec& spec, int a_max) {
    if (view.ready.empty()) throw std::invalid_argument("sample_actions: empty ready set");
    SampleResult result;
    std::vector<double> obs = build_observation(view, spec);
    std::vector<int> pe_ids = chunk_pe_ids(view, spec);

    if (mode == ActionMode::independent) {
        for (const auto& task : view.ready) {
            NeuralStep step;
            step.clk = view.clk;
            step.input = obs;
            SampledAction act;
            act.slot = 0;
            act.job_id = task.job_id;
            act.task_id = task.task_id;
            append_query_block(step.input, task, spec, view.clk, pe_ids, act.mask);

            auto fwd = model.forward(step.input);
            auto dist = masked_softmax(fwd.logits, act.mask);
            int idx = sample_masked(dist, rng);
            act.pe_index = idx;
            act.pe_id = pe_ids[static_cast<std::size_t>(idx)];
            act.log_prob = dist.log_probs[static_cast<std::size_t>(idx)];
            act.entropy = dist.entropy;
            result.assignment.items.push_back({task.job_id, task.task_id, act.pe_id, std::nullopt});
            step.actions.push_back(std::move(act));
            result.steps.push_back(std::move(step));
        }
        return result;
    }

    // group mode: one forward, logits reshaped to a_max slots of num_pes
    if (model.policy_out() != a_max * spec.num_pes)
        throw std::invalid_argument("sample_actions: model head does not match a_max slots");
    NeuralStep step;
    step.clk = view.clk;
    step.input = obs;
    std::size_t n_assign = std::min(view.ready.size(), static_cast<std::size_t>(a_max));
    std::vector<std::vector<std::uint8_t>> masks(n_assign);
    for (std::size_t i = 0; i < n_assign; ++i)
        append_query_block(step.input, view.ready[i], spec, view.clk, pe_ids, masks[i]);
    // zero padding for unused slots
    std::size_t block = ObservationSpec::task_features + static_cast<std::size_t>(spec.num_pes);
    for (std::size_t i = n_assign; i < static_cast<std::size_t>(a_max); ++i)
        for (std::size_t k = 0; k < block; ++k) step.input.push_back(0.0);

    auto fwd = model.forward(step.input);
    for (std::size_t i = 0; i < n_assign; ++i) {
        const auto& task = view.ready[i];
        std::span<const double> chunk(&fwd.logits[i * static_cast<std::size_t>(spec.num_pes)],
                                      static_cast<std::size_t>(spec.num_pes));
        auto dist = masked_softmax(chunk, masks[i]);
        int idx = sample_masked(dist, rng);
        SampledAction act;
        act.slot = static_cast<int>(i);
        act.job_id = task.job_id;
        act.task_id = task.task_id;
        act.pe_index = idx;
        act.pe_id = pe_ids[static_cast<std::size_t>(idx)];
        act.log_prob = dist.log_probs[static_cast<std::size_t>(idx)];
        act.entropy = dist.entropy;
        act.mask = masks[i];
        result.assignment.items.push_back({task.job_id, task.task_id, act.pe_id, std::nullopt});
        step.actions.push_back(std::move(act));
    }
    result.steps.push_back(std::move(step));
    return result;
}

Assignment NeuralScheduler::schedule(const SchedulerView& view, Rng& rng) {
    SampleResult sampled = sample_actions(view, *model_, rng, mode_, spec_, a_max_);
    for (auto& step : sampled.steps) buffer_.push_back(std::move(step));
    return sampled.assignment;
}

double window_return(std::span<const double> rewards, std::int64_t start, std::int64_t omega, double gamma) {
    if (omega < start) throw std::invalid_argument("window_return: omega before start");
    double g = 0.0;
    std::int64_t first = std::max<std::int64_t>(start, 1); // rewards begin at clk 1
    double pow = 1.0;
    for (std::int64_t k = start; k < first; ++k) pow *= gamma;
    for (std::int64_t clk = first; clk <= omega && clk <= static_cast<std::int64_t>(rewards.size()); ++clk) {
        g += pow * rewards[static_cast<std::size_t>(clk - 1)];
        pow *= gamma;
    }
    return g;
}

std::vector<std::optional<double>> task_window_returns(std::span<const ActionWindow> windows,
                                                       std::span<const double> rewards, double gamma) {
    std::vector<std::optional<double>> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        if (w.truncated) {
            out.push_back(std::nullopt);
            continue;
        }
        if (w.start < 0 || w.omega < 0)
            throw std::invalid_argument("task_window_returns: action has no completion clock and is not truncated");
        out.push_back(window_return(rewards, w.start, w.omega, gamma));
    }
    return out;
}

std::vector<double> interaction_returns(std::span<const std::int64_t> interaction_clks,
                                        std::span<const double> rewards, double gamma) {
    std::vector<double> out;
    out.reserve(interaction_clks.size());
    auto horizon = static_cast<std::int64_t>(rewards.size()); // last rewarded clk
    for (std::size_t t = 0; t < interaction_clks.size(); ++t) {
        std::int64_t from = interaction_clks[t];
        std::int64_t to = t + 1 < interaction_clks.size() ? interaction_clks[t + 1] - 1 : horizon;
        out.push_back(to < from ? 0.0 : window_return(rewards, from, to, gamma));
    }
    return out;
}

LossBreakdown policy_losses(const PolicyModel& model, std::span<const LossBatchItem> batch, double entropy_coef,
                            int num_pes, std::span<double> grad, std::vector<double>* out_returns,
                            std::vector<double>* out_values) {
    LossBreakdown loss;
    bool with_grad = !grad.empty();
    std::vector<double> dlogits(static_cast<std::size_t>(model.policy_out()));

    for (const auto& item : batch) {
        auto fwd = model.forward(*item.input);
        std::fill(dlogits.begin(), dlogits.end(), 0.0);
        double dvalue = 0.0;

        for (const auto& target : item.targets) {
            std::size_t off = static_cast<std::size_t>(target.slot) * static_cast<std::size_t>(num_pes);
            std::span<const double> chunk(&fwd.logits[off], static_cast<std::size_t>(num_pes));
            auto dist = masked_softmax(chunk, *target.mask);

            double advantage = target.ret - fwd.value; // constant in the actor term
            double lp = dist.log_probs[static_cast<std::size_t>(target.pe_index)];
            loss.actor += -lp * advantage;
            loss.critic += 0.5 * (target.ret - fwd.value) * (target.ret - fwd.value);
            loss.entropy += dist.entropy;
            ++loss.actions;
            if (out_returns) out_returns->push_back(target.ret);
            if (out_values) out_values->push_back(fwd.value);

            if (with_grad) {
                double neg_entropy = -dist.entropy; // E[log pi]
                for (int q = 0; q < num_pes; ++q) {
                    double p = dist.probs[static_cast<std::size_t>(q)];
                    if (p <= 0.0) continue; // masked PEs take no gradient
                    double indicator = q == target.pe_index ? 1.0 : 0.0;
                    double d_actor = -advantage * (indicator - p);
                    double d_entropy = entropy_coef * p * (dist.log_probs[static_cast<std::size_t>(q)] - neg_entropy);
                    dlogits[off + static_cast<std::size_t>(q)] += d_actor + d_entropy;
                }
                dvalue += -(target.ret - fwd.value);
            }
        }
        if (with_grad) model.backward(*item.input, fwd, dlogits, dvalue, grad);
    }
    loss.total = loss.actor + loss.critic - entropy_coef * loss.entropy;
    return loss;
}

namespace {

struct JoinedWindows {
    std::vector<ActionWindow> per_action; // flattened in buffer order
};

JoinedWindows join_windows(const std::vector<NeuralStep>& buffer, const EpisodeResult& result) {
    std::map<std::pair<int, int>, const LoggedAction*> by_task;
    for (const auto& step : result.interaction_log)
        for (const auto& a : step.actions) by_task[{a.job_id, a.task_id}] = &a;

    JoinedWindows joined;
    for (const auto& step : buffer) {
        for (const auto& act : step.actions) {
            auto it = by_task.find({act.job_id, act.task_id});
            if (it == by_task.end())
                throw std::runtime_error("training buffer holds an action the engine never logged");
            const LoggedAction* la = it->second;
            ActionWindow w;
            w.start = la->start_clk;
            w.omega = la->completion_clk;
            w.truncated = la->truncated || la->start_clk < 0;
            joined.per_action.push_back(w);
        }
    }
    return joined;
}

} // namespace

TrainResult train(const EnvFactory& factory, const TrainConfig& config, const ObservationSpec& spec,
                  PolicyModel& model, AdamOptimizer& optimizer, int start_episode) {
    if (config.gamma < 0.0 || config.gamma > 1.0) throw std::invalid_argument("train: gamma must be in [0, 1]");
    if (config.grad_clip <= 0.0) throw std::invalid_argument("train: grad_clip must be > 0");
    if (config.a_max <= 0) throw std::invalid_argument("train: a_max must be > 0");

    TrainResult result;
    std::vector<double> grad(model.param_count(), 0.0);

    for (int ep = start_episode; ep < start_episode + config.episodes; ++ep) {
        EnvSetup env = factory(ep);
        NeuralScheduler scheduler(model, spec, config.action_mode, config.a_max);
        EpisodeResult episode = run_episode(env.jobdags, env.platform, scheduler, env.sim);
        std::vector<NeuralStep> buffer = scheduler.take_buffer();

        JoinedWindows windows = join_windows(buffer, episode);

        // batch assembly: one LossBatchItem per forward pass
        std::vector<LossBatchItem> batch;
        std::size_t cursor = 0;
        if (config.task_window) {
            auto returns = task_window_returns(windows.per_action, episode.reward_stream, config.gamma);
            if (config.action_mode == ActionMode::independent) {
                for (const auto& step : buffer) {
                    for (const auto& act : step.actions) {
                        auto ret = returns[cursor++];
                        if (!ret) continue; // truncated at the horizon
                        LossBatchItem item;
                        item.input = &step.input;
                        item.targets.push_back({act.slot, act.pe_index, *ret, &act.mask});
                        batch.push_back(std::move(item));
                    }
                }
            } else {
                // group: one window spanning the whole set, min start to the
                // longest task's completion, shared by every slot
                for (const auto& step : buffer) {
                    std::int64_t start = -1, omega = -1;
                    bool usable = !step.actions.empty();
                    for (std::size_t i = 0; i < step.actions.size(); ++i) {
                        const auto& w = windows.per_action[cursor + i];
                        if (w.truncated) {
                            usable = false;
                            break;
                        }
                        start = start < 0 ? w.start : std::min(start, w.start);
                        omega = std::max(omega, w.omega);
                    }
                    if (usable) {
                        double ret = window_return(episode.reward_stream, start, omega, config.gamma);
                        LossBatchItem item;
                        item.input = &step.input;
                        for (const auto& act : step.actions)
                            item.targets.push_back({act.slot, act.pe_index, ret, &act.mask});
                        batch.push_back(std::move(item));
                    }
                    cursor += step.actions.size();
                }
            }
        } else {
            // interaction-window returns need no completion clocks; several
            // buffer steps can share one interaction clk (independent mode
            // samples per task) and all of them get that interaction's return
            std::vector<std::int64_t> clks;
            std::vector<std::size_t> interaction_of(buffer.size());
            for (std::size_t s = 0; s < buffer.size(); ++s) {
                if (clks.empty() || clks.back() != buffer[s].clk) clks.push_back(buffer[s].clk);
                interaction_of[s] = clks.size() - 1;
            }
            auto returns = interaction_returns(clks, episode.reward_stream, config.gamma);
            for (std::size_t s = 0; s < buffer.size(); ++s) {
                const auto& step = buffer[s];
                if (step.actions.empty()) continue;
                LossBatchItem item;
                item.input = &step.input;
                for (const auto& act : step.actions)
                    item.targets.push_back({act.slot, act.pe_index, returns[interaction_of[s]], &act.mask});
                batch.push_back(std::move(item));
            }
        }

        EpisodeLog log;
        log.episode = ep;
        log.total_reward = episode.total_reward();
        log.completed_jobs = static_cast<int>(episode.completed_jobs.size());
        log.avg_latency = average_latency(episode.completed_jobs);

        if (!batch.empty()) {
            std::fill(grad.begin(), grad.end(), 0.0);
            std::vector<double> returns, values;
            LossBreakdown loss =
                policy_losses(model, batch, config.entropy_coef, spec.num_pes, grad, &returns, &values);
            if (!std::isfinite(loss.total))
                throw std::runtime_error("training fault: non-finite loss at episode " + std::to_string(ep));
            clip_global_norm(grad, config.grad_clip);

            std::vector<double> snapshot = model.params();
            optimizer.step(model.params(), grad);
            bool finite = true;
            for (double p : model.params())
                if (!std::isfinite(p)) { finite = false; break; }
            if (!finite) {
                model.params() = snapshot; // keep the last good parameters
                result.diverged = true;
            }

            log.batch_actions = loss.actions;
            log.actor_loss = loss.actor;
            log.critic_loss = loss.critic;
            log.entropy = loss.actions > 0 ? loss.entropy / static_cast<double>(loss.actions) : 0.0;
            double mean_ret = 0.0;
            for (double r : returns) mean_ret += r;
            log.mean_return = returns.empty() ? 0.0 : mean_ret / static_cast<double>(returns.size());
            log.explained_variance = explained_variance(returns, values);
        }

        result.curve.push_back(log);
        ++result.episodes_run;
        if (result.diverged) break;
    }
    return result;
}

std::uint64_t model_config_hash(const TrainConfig& config, const ObservationSpec& spec) {
    std::ostringstream s;
    s << spec.capacity << '|' << spec.v_max << '|' << spec.num_pes << '|' << fmt_double(spec.time_norm) << '|'
      << config.hidden << '|' << action_mode_name(config.action_mode) << '|' << config.a_max;
    return fnv1a(s.str());
}

std::string write_checkpoint(const Checkpoint& ckpt) {
    std::ostringstream out;
    out << "socsim-checkpoint v1\n";
    out << "hash " << ckpt.config_hash << "\n";
    out << "dims " << ckpt.input_dim << " " << ckpt.policy_out << " " << ckpt.hidden << "\n";
    out << "episode " << ckpt.next_episode << "\n";
    out << "adam_t " << ckpt.adam_t << "\n";
    auto dump = [&out](const char* key, const std::vector<double>& xs) {
        out << key << " " << xs.size();
        for (double x : xs) out << " " << fmt_double(x);
        out << "\n";
    };
    dump("theta", ckpt.theta);
    dump("adam_m", ckpt.adam_m);
    dump("adam_v", ckpt.adam_v);
    return out.str();
}

Checkpoint parse_checkpoint(std::string_view text) {
    Checkpoint ckpt;
    int line_no = 0;
    std::size_t pos = 0;
    bool saw_magic = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (!saw_magic) {
            if (tok.size() != 2 || tok[0] != "socsim-checkpoint" || tok[1] != "v1")
                throw ParseError(line_no, "not a socsim checkpoint");
            saw_magic = true;
            continue;
        }
        auto read_vec = [&](std::vector<double>& dst) {
            auto n = static_cast<std::size_t>(parse_int(tok[1], line_no, "vector size"));
            if (tok.size() != n + 2) throw ParseError(line_no, "vector length mismatch");
            dst.resize(n);
            for (std::size_t i = 0; i < n; ++i) dst[i] = parse_double(tok[i + 2], line_no, "vector entry");
        };
        if (tok[0] == "hash") {
            unsigned long long h = 0;
            auto res = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), h);
            if (res.ec != std::errc{} || res.ptr != tok[1].data() + tok[1].size())
                throw ParseError(line_no, "bad hash value");
            ckpt.config_hash = h;
        }
        else if (tok[0] == "dims") {
            if (tok.size() != 4) throw ParseError(line_no, "dims takes 3 integers");
            ckpt.input_dim = static_cast<int>(parse_int(tok[1], line_no, "input dim"));
            ckpt.policy_out = static_cast<int>(parse_int(tok[2], line_no, "policy out"));
            ckpt.hidden = static_cast<int>(parse_int(tok[3], line_no, "hidden"));
        } else if (tok[0] == "episode") ckpt.next_episode = static_cast<int>(parse_int(tok[1], line_no, "episode"));
        else if (tok[0] == "adam_t") ckpt.adam_t = parse_int(tok[1], line_no, "adam_t");
        else if (tok[0] == "theta") read_vec(ckpt.theta);
        else if (tok[0] == "adam_m") read_vec(ckpt.adam_m);
        else if (tok[0] == "adam_v") read_vec(ckpt.adam_v);
        else throw ParseError(line_no, "unknown checkpoint key '" + std::string(tok[0]) + "'");
    }
    if (!saw_magic) throw std::invalid_argument("empty checkpoint");
    return ckpt;
}

std::string write_training_log_csv(std::span<const EpisodeLog> curve) {
    std::ostringstream out;
    out << "# socsim training log v1\n";
    out << "episode,total_reward,mean_return,actor_loss,critic_loss,entropy,explained_variance,avg_latency,"
           "completed_jobs,batch_actions\n";
    for (const auto& log : curve) {
        out << log.episode << "," << fmt_double(log.total_reward) << "," << fmt_double(log.mean_return) << ","
            << fmt_double(log.actor_loss) << "," << fmt_double(log.critic_loss) << "," << fmt_double(log.entropy)
            << ",";
        if (log.explained_variance) out << fmt_double(*log.explained_variance);
        out << ",";
        if (log.avg_latency) out << fmt_double(*log.avg_latency);
        out << "," << log.completed_jobs << "," << log.batch_actions << "\n";
    }
    return out.str();
}

} // namespace socsim
