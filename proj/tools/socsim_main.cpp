// socsim command line: run / train / eval / synth.
//
// Examples:
//   socsim run   --resource profiles/resource_synthetic.txt --job profiles/job_synthetic.txt \
//                --scheduler heft_rt --seeds 1,2,3 --out metrics.csv
//   socsim run   --resource profiles/resource_synthetic.txt --synth-v 10 --alpha 0.8 \
//                --scheduler stf --sweep alpha=0.4,0.8,1.2 --out sweep.csv
//   socsim train --resource profiles/resource_synthetic.txt --synth-v 10 --episodes 500 \
//                --quasi-steady --out model.ckpt
//   socsim eval  --resource profiles/resource_synthetic.txt --synth-v 10 --checkpoint model.ckpt \
//                --out eval.csv

#include "CLI11.hpp"

#include "socsim/harness.hpp"
#include "socsim/util.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (seeds.empty()) throw std::invalid_argument("empty seed list");
    return seeds;
}

// "--sweep alpha=0.4,0.8,1.2" -> axis + values
std::pair<std::string, std::vector<double>> parse_sweep_axis(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("sweep axis must look like name=v1,v2,...");
    std::string name = text.substr(0, eq);
    std::vector<double> values;
    std::size_t pos = eq + 1;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) values.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (values.empty()) throw std::invalid_argument("sweep axis '" + name + "' has no values");
    return {name, values};
}

struct CommonOpts {
    std::string job, resource, scheduler = "stf", out, trace, checkpoint, config, reward = "dense",
                action_mode = "independent";
    std::string seeds_text;
    std::uint64_t seed = 0;
    bool synth = false;
    bool quasi = false;
    bool no_eim = false;
    std::vector<std::string> sweep_axes;
    socsim::ExperimentSpec spec;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_resource = true) {
    cmd->add_option("--job", o.job, "job profile path (omit to synthesize workloads)");
    auto* res = cmd->add_option("--resource", o.resource, "resource profile path");
    if (need_resource) res->required();
    cmd->add_option("--config", o.config, "run-config file (key = value), overridden by flags");
    cmd->add_option("--scale", o.spec.sim.scale, "mean job inter-arrival in clocks");
    cmd->add_option("--sim-length", o.spec.sim.sim_length, "simulation length in clocks");
    cmd->add_option("--capacity", o.spec.sim.capacity, "job queue capacity");
    cmd->add_option("--workloads", o.spec.sim.num_workloads, "number of injectable jobs");
    cmd->add_flag("--quasi-steady", o.quasi, "pre-fill the job queue to capacity at clk 0");
    cmd->add_option("--mu", o.spec.mu, "execution-time scale");
    cmd->add_option("--reward", o.reward, "dense | dense2 | sparse | sparse2");
    cmd->add_option("--c1", o.spec.sim.c1, "job completion bonus");
    cmd->add_option("--c2", o.spec.sim.c2, "per-clock penalty");
    cmd->add_option("--sparse-window", o.spec.sim.sparse_window, "trailing window of the sparse reward");
    cmd->add_option("--seed", o.seed, "single seed");
    cmd->add_option("--seeds", o.seeds_text, "comma-separated seed list");
    cmd->add_option("--synth-v", o.spec.synth.v, "synthetic workloads: task count")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", o.spec.synth.alpha, "synthetic workloads: shape parameter");
    cmd->add_option("--nu", o.spec.synth.nu, "synthetic workloads: mean communication delay");
    cmd->add_option("--nu-std", o.spec.synth.nu_std, "synthetic workloads: delay std deviation");
    cmd->add_option("--cost-mean", o.spec.synth_costs.cost_mean, "synthetic workloads: mean computation cost");
    cmd->add_option("--cost-std", o.spec.synth_costs.cost_std, "synthetic workloads: cost std deviation");
    cmd->add_option("--support-prob", o.spec.synth_costs.support_prob,
                    "synthetic workloads: chance a PE supports a task");
    cmd->add_option("--sweep", o.sweep_axes, "sweep axis, e.g. alpha=0.4,0.8,1.2 (repeatable)");
    cmd->add_option("--threads", o.spec.threads, "worker threads for sweep points (0 = auto)");
    cmd->add_option("--out", o.out, "output path");
}

void add_train_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--episodes", o.spec.train.episodes, "training episodes");
    cmd->add_option("--action-mode", o.action_mode, "independent | group");
    cmd->add_flag("--eim,!--no-eim", o.spec.train.task_window,
                  "align returns to task execution windows (default on)");
    cmd->add_option("--gamma", o.spec.train.gamma, "discount factor");
    cmd->add_option("--lr", o.spec.train.lr, "learning rate");
    cmd->add_option("--entropy-coef", o.spec.train.entropy_coef, "entropy regularization coefficient");
    cmd->add_option("--grad-clip", o.spec.train.grad_clip, "global gradient norm clip");
    cmd->add_option("--hidden", o.spec.train.hidden, "hidden layer width");
    cmd->add_option("--amax", o.spec.train.a_max, "group mode: padded action slots");
    cmd->add_option("--time-norm", o.spec.train.time_norm, "observation time normalization divisor");
}

socsim::ExperimentSpec finalize(CommonOpts& o, const CLI::App* cmd) {
    socsim::ExperimentSpec spec = o.spec;
    if (!o.config.empty()) {
        // file first, explicitly passed flags on top
        std::ifstream in(o.config, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open '" + o.config + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        socsim::SimConfig merged = socsim::parse_sim_config(ss.str());
        auto given = [cmd](const char* flag) { return cmd->count(flag) > 0; };
        if (given("--scale")) merged.scale = o.spec.sim.scale;
        if (given("--sim-length")) merged.sim_length = o.spec.sim.sim_length;
        if (given("--capacity")) merged.capacity = o.spec.sim.capacity;
        if (given("--workloads")) merged.num_workloads = o.spec.sim.num_workloads;
        if (given("--c1")) merged.c1 = o.spec.sim.c1;
        if (given("--c2")) merged.c2 = o.spec.sim.c2;
        if (given("--sparse-window")) merged.sparse_window = o.spec.sim.sparse_window;
        if (given("--quasi-steady")) merged.quasi_steady = o.quasi;
        if (given("--reward")) merged.reward_kind = socsim::reward_kind_from_name(o.reward);
        spec.sim = merged;
    } else {
        spec.sim.quasi_steady = o.quasi;
        spec.sim.reward_kind = socsim::reward_kind_from_name(o.reward);
    }
    spec.job_profile = o.job;
    spec.resource_profile = o.resource;
    spec.scheduler = o.scheduler;
    spec.out_path = o.out;
    spec.trace_path = o.trace;
    spec.checkpoint_path = o.checkpoint;
    spec.train.action_mode = socsim::action_mode_from_name(o.action_mode);
    if (!o.seeds_text.empty())
        spec.seeds = parse_seed_list(o.seeds_text);
    else
        spec.seeds = {o.seed};
    for (const auto& axis : o.sweep_axes) spec.sweep.push_back(parse_sweep_axis(axis));
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"socsim: heterogeneous SoC scheduling simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, train_o, eval_o, synth_o;
    int synth_count = 1;

    auto* run_cmd = app.add_subcommand("run", "simulate episodes and export metrics");
    add_common(run_cmd, run_o);
    run_cmd->add_option("--scheduler", run_o.scheduler, "random | stf | met | heft_rt | heft_rt_noinsert | neural");
    run_cmd->add_option("--trace", run_o.trace, "episode trace CSV path");
    run_cmd->add_option("--checkpoint", run_o.checkpoint, "checkpoint for --scheduler neural");
    add_train_opts(run_cmd, run_o); // neural eval needs matching model flags

    auto* train_cmd = app.add_subcommand("train", "train the neural scheduler");
    add_common(train_cmd, train_o);
    add_train_opts(train_cmd, train_o);
    train_cmd->add_option("--resume", train_o.checkpoint, "checkpoint to continue from");

    auto* eval_cmd = app.add_subcommand("eval", "run a trained checkpoint as the scheduler");
    add_common(eval_cmd, eval_o);
    eval_cmd->add_option("--checkpoint", eval_o.checkpoint, "trained checkpoint")->required();
    eval_cmd->add_option("--trace", eval_o.trace, "episode trace CSV path");
    add_train_opts(eval_cmd, eval_o);

    auto* synth_cmd = app.add_subcommand("synth", "write synthetic job profiles and a structural report");
    add_common(synth_cmd, synth_o, /*need_resource=*/false);
    synth_cmd->add_option("--count", synth_count, "number of profiles to write");

    CLI11_PARSE(app, argc, argv);

    const char* log_env = std::getenv("SOCSIM_LOG");
    bool verbose = log_env && std::string(log_env) != "" && std::string(log_env) != "0";

    try {
        if (run_cmd->parsed()) {
            auto rows = socsim::cmd_run(finalize(run_o, run_cmd));
            if (run_o.out.empty()) std::cout << socsim::write_metrics_csv(rows);
            if (verbose) std::cerr << "run: " << rows.size() << " row(s) -> " << run_o.out << "\n";
        } else if (train_cmd->parsed()) {
            if (train_o.out.empty()) throw std::invalid_argument("train needs --out <checkpoint path>");
            auto result = socsim::cmd_train(finalize(train_o, train_cmd));
            if (verbose)
                std::cerr << "train: " << result.episodes_run << " episode(s) -> " << train_o.out << "\n";
        } else if (eval_cmd->parsed()) {
            auto rows = socsim::cmd_eval(finalize(eval_o, eval_cmd));
            if (eval_o.out.empty()) std::cout << socsim::write_metrics_csv(rows);
            if (verbose) std::cerr << "eval: " << rows.size() << " row(s) -> " << eval_o.out << "\n";
        } else if (synth_cmd->parsed()) {
            auto report = socsim::cmd_synth(finalize(synth_o, synth_cmd), synth_count);
            if (verbose) std::cerr << "synth: " << report.size() << " profile(s) -> " << synth_o.out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
