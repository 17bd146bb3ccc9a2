#pragma once

#include "socsim/engine.hpp"
#include "socsim/policy_model.hpp"
#include "socsim/scheduler.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socsim {

enum class ActionMode { independent, group };

ActionMode action_mode_from_name(const std::string& name);
const char* action_mode_name(ActionMode mode);

// Fixed observation layout: capacity job slots of v_max task slots, each
// task contributing [pe id, status one-hot x3, waiting time, remaining
// predecessors]; per job [remaining dependency hops, job waiting time];
// one global count of awaiting child tasks. Absent slots stay zero.
struct ObservationSpec {
    int capacity = 3;
    int v_max = 10;
    int num_pes = 4;
    double time_norm = 100.0; // divisor for clock-valued features

    static constexpr int task_features = 6;
    int dim() const { return capacity * v_max * task_features + capacity * 2 + 1; }
    // model input: observation plus one (or a_max) task query blocks of
    // [task features, support mask]
    int query_dim(ActionMode mode, int a_max) const {
        int block = task_features + num_pes;
        return dim() + (mode == ActionMode::group ? a_max * block : block);
    }
};

std::vector<double> build_observation(const SchedulerView& view, const ObservationSpec& spec);

struct SampledAction {
    int slot = 0; // logit chunk in group mode
    int job_id = 0;
    int task_id = 0;
    int pe_id = 0;    // platform PE id, as assigned
    int pe_index = 0; // position in the ascending-PE-id logit chunk
    double log_prob = 0.0;
    double entropy = 0.0;
    std::vector<std::uint8_t> mask;
};

struct NeuralStep {
    std::int64_t clk = 0;
    std::vector<double> input;
    std::vector<SampledAction> actions;
};

struct SampleResult {
    Assignment assignment;
    std::vector<NeuralStep> steps; // independent mode: one step per action
};

// Masked multinomial PE selection for every ready task. Independent mode
// runs one forward per task on the state + that task's query block; group
// mode runs a single forward whose logits split into a_max per-slot
// distributions (slots past the ready count are ignored; ready tasks past
// a_max are left unassigned for the next tick).
SampleResult sample_actions(const SchedulerView& view, const PolicyModel& model, Rng& rng, ActionMode mode,
                            const ObservationSpec& spec, int a_max);

class NeuralScheduler final : public Scheduler {
public:
    NeuralScheduler(PolicyModel& model, ObservationSpec spec, ActionMode mode, int a_max)
        : model_(&model), spec_(spec), mode_(mode), a_max_(a_max) {}

    const char* name() const override { return "neural"; }
    Assignment schedule(const SchedulerView& view, Rng& rng) override;

    std::vector<NeuralStep> take_buffer() { return std::move(buffer_); }

private:
    PolicyModel* model_;
    ObservationSpec spec_;
    ActionMode mode_;
    int a_max_;
    std::vector<NeuralStep> buffer_;
};

// --- return alignment ------------------------------------------------------

struct ActionWindow {
    std::int64_t start = -1; // execution start clk
    std::int64_t omega = -1; // completion clk
    bool truncated = false;  // never finished before the horizon
};

// Discounted reward sum over one window: sum_{clk=start..omega}
// gamma^(clk-start) * r_clk, with rewards[i] holding R(clk = i + 1).
double window_return(std::span<const double> rewards, std::int64_t start, std::int64_t omega, double gamma);

// Per-action returns over each action's own task-duration window.
// Truncated actions yield nullopt and must be excluded from updates.
std::vector<std::optional<double>> task_window_returns(std::span<const ActionWindow> windows,
                                                       std::span<const double> rewards, double gamma);

// Per-interaction returns: rewards between one interaction and the next
// (the final interaction runs to the horizon). Delayed consequences past
// the next interaction are discarded.
std::vector<double> interaction_returns(std::span<const std::int64_t> interaction_clks,
                                        std::span<const double> rewards, double gamma);

// --- losses ----------------------------------------------------------------

struct SlotTarget {
    int slot = 0;
    int pe_index = 0; // position in the slot's logit chunk
    double ret = 0.0; // aligned return for this action
    const std::vector<std::uint8_t>* mask = nullptr;
};

struct LossBatchItem {
    const std::vector<double>* input = nullptr;
    std::vector<SlotTarget> targets;
};

struct LossBreakdown {
    double actor = 0.0;
    double critic = 0.0;
    double entropy = 0.0; // positive total entropy over actions
    double total = 0.0;   // actor + critic - coef * entropy
    std::size_t actions = 0;
};

// Policy-gradient losses summed over the batch; the advantage is constant
// in the actor term and gradients flow through logits, value head, and the
// entropy regularizer. grad may be empty to skip gradient accumulation.
LossBreakdown policy_losses(const PolicyModel& model, std::span<const LossBatchItem> batch, double entropy_coef,
                            int num_pes, std::span<double> grad, std::vector<double>* out_returns = nullptr,
                            std::vector<double>* out_values = nullptr);

// --- training --------------------------------------------------------------

struct TrainConfig {
    double gamma = 0.98;
    double lr = 3e-4;
    double entropy_coef = 0.01;
    double grad_clip = 1.0;
    int episodes = 500;
    ActionMode action_mode = ActionMode::independent;
    int a_max = 8;
    bool task_window = true; // --eim: align returns to task windows
    int hidden = 128;
    double time_norm = 100.0;
    std::uint64_t seed = 0;
};

struct EnvSetup {
    std::vector<JobDag> jobdags;
    Platform platform;
    SimConfig sim;
};
using EnvFactory = std::function<EnvSetup(int episode)>;

struct EpisodeLog {
    int episode = 0;
    double total_reward = 0.0;
    double mean_return = 0.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    std::optional<double> explained_variance;
    std::optional<double> avg_latency;
    int completed_jobs = 0;
    std::size_t batch_actions = 0;
};

struct TrainResult {
    std::vector<EpisodeLog> curve;
    bool diverged = false;
    int episodes_run = 0;
};

// One REINFORCE-style update per episode: roll out with the sampling
// policy, align returns, accumulate gradients over the whole batch, clip,
// and take an optimizer step. On a non-finite update the parameters are
// rolled back and training stops.
TrainResult train(const EnvFactory& factory, const TrainConfig& config, const ObservationSpec& spec,
                  PolicyModel& model, AdamOptimizer& optimizer, int start_episode = 0);

// --- checkpointing ---------------------------------------------------------

struct Checkpoint {
    std::uint64_t config_hash = 0;
    int input_dim = 0;
    int policy_out = 0;
    int hidden = 0;
    int next_episode = 0;
    std::int64_t adam_t = 0;
    std::vector<double> theta;
    std::vector<double> adam_m;
    std::vector<double> adam_v;
};

std::uint64_t model_config_hash(const TrainConfig& config, const ObservationSpec& spec);
std::string write_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);

std::string write_training_log_csv(std::span<const EpisodeLog> curve);

} // namespace socsim
