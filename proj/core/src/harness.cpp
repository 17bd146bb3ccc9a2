#include "socsim/harness.hpp"

#include "socsim/metrics.hpp"
#include "socsim/platform.hpp"
#include "socsim/sched_heuristic.hpp"
#include "socsim/util.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace socsim {

namespace fs = std::filesystem;

namespace {

// derived-stream ids
constexpr std::uint64_t kStreamWorkloads = 11;
constexpr std::uint64_t kStreamSim = 12;
constexpr std::uint64_t kStreamModelInit = 7;
constexpr std::uint64_t kStreamEpisodeBase = 0x9E00;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

struct SweepPoint {
    std::vector<std::pair<std::string, double>> values;

    std::string key() const {
        std::string k;
        for (const auto& [name, value] : values) {
            if (!k.empty()) k += ";";
            k += name + "=" + fmt_double(value);
        }
        return k;
    }
};

std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec) {
    std::vector<SweepPoint> points{SweepPoint{}};
    for (const auto& [axis, values] : spec.sweep) {
        if (values.empty()) throw std::invalid_argument("sweep axis '" + axis + "' has no values");
        std::vector<SweepPoint> next;
        for (const auto& p : points)
            for (double v : values) {
                SweepPoint q = p;
                q.values.emplace_back(axis, v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    return points;
}

ExperimentSpec apply_point(const ExperimentSpec& spec, const SweepPoint& point) {
    ExperimentSpec out = spec;
    for (const auto& [axis, value] : point.values) {
        if (axis == "alpha") {
            if (!out.job_profile.empty())
                throw std::invalid_argument("sweep axis 'alpha' needs synthetic workloads");
            out.synth.alpha = value;
        } else if (axis == "nu") {
            if (!out.job_profile.empty()) throw std::invalid_argument("sweep axis 'nu' needs synthetic workloads");
            out.synth.nu = value;
        } else if (axis == "nu_std") {
            if (!out.job_profile.empty())
                throw std::invalid_argument("sweep axis 'nu_std' needs synthetic workloads");
            out.synth.nu_std = value;
        } else if (axis == "v") {
            if (!out.job_profile.empty()) throw std::invalid_argument("sweep axis 'v' needs synthetic workloads");
            out.synth.v = static_cast<int>(value);
        } else if (axis == "mu") {
            out.mu = value;
        } else if (axis == "scale") {
            out.sim.scale = value;
        } else if (axis == "capacity") {
            out.sim.capacity = static_cast<int>(value);
        } else {
            throw std::invalid_argument("unknown sweep axis '" + axis + "'");
        }
    }
    return out;
}

struct RunOutput {
    MetricsRow row;
    std::string trace_csv;
};

} // namespace

Platform load_platform(const ExperimentSpec& spec) {
    if (spec.resource_profile.empty()) throw std::invalid_argument("no resource profile given");
    Platform platform = parse_resource_profile(read_file(spec.resource_profile));
    platform.mu = spec.mu;
    return platform;
}

std::vector<JobDag> build_workloads(const ExperimentSpec& spec, const Platform& platform, Rng stream) {
    std::vector<JobDag> workloads;
    if (!spec.job_profile.empty()) {
        std::set<int> pe_ids;
        for (const auto& pe : platform.pes) pe_ids.insert(pe.pe_id);
        workloads.push_back(parse_job_profile(read_file(spec.job_profile), pe_ids));
        return workloads;
    }
    // synthesized costs always target the loaded platform's PEs
    CompCostModel costs = spec.synth_costs;
    costs.pe_ids.clear();
    for (const auto& pe : platform.pes) costs.pe_ids.push_back(pe.pe_id);
    std::sort(costs.pe_ids.begin(), costs.pe_ids.end());
    int count = std::max(1, spec.sim.num_workloads);
    workloads.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Rng dag_rng = stream.split(static_cast<std::uint64_t>(i));
        workloads.push_back(synthesize_dag(spec.synth, dag_rng, costs));
    }
    return workloads;
}

ObservationSpec make_observation_spec(const ExperimentSpec& spec, const Platform& platform,
                                      const std::vector<JobDag>& workloads) {
    ObservationSpec obs;
    obs.capacity = spec.sim.capacity;
    obs.v_max = 0;
    for (const auto& dag : workloads) obs.v_max = std::max(obs.v_max, static_cast<int>(dag.nodes.size()));
    obs.num_pes = static_cast<int>(platform.pes.size());
    obs.time_norm = spec.train.time_norm;
    return obs;
}

std::string write_metrics_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "# socsim metrics v1\n";
    std::vector<std::string> axis_names;
    if (!rows.empty())
        for (const auto& [name, value] : rows.front().axes) axis_names.push_back(name);
    for (const auto& name : axis_names) out << name << ",";
    out << "seed,scheduler,avg_latency,avg_slr,avg_speedup,completed_jobs,total_reward\n";
    for (const auto& row : rows) {
        for (const auto& [name, value] : row.axes) out << fmt_double(value) << ",";
        out << row.seed << "," << row.scheduler << ",";
        if (row.avg_latency) out << fmt_double(*row.avg_latency);
        out << ",";
        if (row.avg_slr) out << fmt_double(*row.avg_slr);
        out << ",";
        if (row.avg_speedup) out << fmt_double(*row.avg_speedup);
        out << "," << row.completed_jobs << "," << fmt_double(row.total_reward) << "\n";
    }
    return out.str();
}

namespace {

RunOutput run_single(const ExperimentSpec& point_spec, const SweepPoint& point, std::uint64_t seed,
                     PolicyModel* model) {
    Platform platform = load_platform(point_spec);
    Rng run_stream = Rng(seed).split(fnv1a(point.key()));
    std::vector<JobDag> workloads = build_workloads(point_spec, platform, run_stream.split(kStreamWorkloads));

    SimConfig sim = point_spec.sim;
    sim.seed = run_stream.split(kStreamSim).seed();

    std::unique_ptr<Scheduler> owned;
    std::unique_ptr<NeuralScheduler> neural;
    Scheduler* scheduler = nullptr;
    if (point_spec.scheduler == "neural") {
        if (!model) throw std::invalid_argument("scheduler 'neural' needs a checkpoint (use eval or --checkpoint)");
        ObservationSpec obs = make_observation_spec(point_spec, platform, workloads);
        neural = std::make_unique<NeuralScheduler>(*model, obs, point_spec.train.action_mode,
                                                   point_spec.train.a_max);
        scheduler = neural.get();
    } else {
        owned = make_heuristic_scheduler(point_spec.scheduler);
        scheduler = owned.get();
    }

    EpisodeResult episode = run_episode(workloads, platform, *scheduler, sim);

    RunOutput out;
    out.row.axes = point.values;
    out.row.seed = seed;
    out.row.scheduler = point_spec.scheduler;
    out.row.avg_latency = average_latency(episode.completed_jobs);
    out.row.avg_slr = avg_slr(episode.completed_jobs, platform);
    out.row.avg_speedup = avg_speedup(episode.completed_jobs, platform);
    out.row.completed_jobs = static_cast<int>(episode.completed_jobs.size());
    out.row.total_reward = episode.total_reward();
    out.trace_csv = write_trace_csv(episode);
    return out;
}

std::vector<MetricsRow> run_grid(const ExperimentSpec& spec, PolicyModel* model) {
    auto points = expand_sweep(spec);
    struct Task {
        ExperimentSpec spec;
        SweepPoint point;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& point : points) {
        ExperimentSpec point_spec = apply_point(spec, point);
        for (std::uint64_t seed : spec.seeds) tasks.push_back({point_spec, point, seed});
    }
    if (tasks.empty()) throw std::invalid_argument("nothing to run: no seeds");

    std::vector<RunOutput> outputs(tasks.size());
    unsigned threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));

    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(tasks.size());
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                outputs[i] = run_single(tasks[i].spec, tasks[i].point, tasks[i].seed, model);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw std::runtime_error(err);

    std::vector<MetricsRow> rows;
    rows.reserve(outputs.size());
    for (auto& out : outputs) rows.push_back(std::move(out.row));

    if (!spec.out_path.empty()) write_file(spec.out_path, write_metrics_csv(rows));
    if (!spec.trace_path.empty()) {
        if (outputs.size() == 1) {
            write_file(spec.trace_path, outputs[0].trace_csv);
        } else {
            for (std::size_t i = 0; i < outputs.size(); ++i)
                write_file(spec.trace_path + "." + std::to_string(i), outputs[i].trace_csv);
        }
    }
    return rows;
}

} // namespace

std::vector<MetricsRow> cmd_run(const ExperimentSpec& spec) {
    if (spec.scheduler == "neural" && spec.checkpoint_path.empty())
        throw std::invalid_argument("scheduler 'neural' needs --checkpoint (or use the eval subcommand)");
    if (spec.scheduler == "neural") return cmd_eval(spec);
    make_heuristic_scheduler(spec.scheduler); // reject unknown names before spawning workers
    return run_grid(spec, nullptr);
}

TrainResult cmd_train(const ExperimentSpec& spec) {
    Platform platform = load_platform(spec);
    std::uint64_t seed = spec.seeds.empty() ? 0 : spec.seeds.front();
    Rng run_stream = Rng(seed).split(fnv1a("train"));
    std::vector<JobDag> workloads = build_workloads(spec, platform, run_stream.split(kStreamWorkloads));
    ObservationSpec obs = make_observation_spec(spec, platform, workloads);

    TrainConfig train_cfg = spec.train;
    train_cfg.seed = seed;
    std::uint64_t expected_hash = model_config_hash(train_cfg, obs);

    int input_dim = obs.query_dim(train_cfg.action_mode, train_cfg.a_max);
    int policy_out = train_cfg.action_mode == ActionMode::group ? train_cfg.a_max * obs.num_pes : obs.num_pes;
    PolicyModel model(input_dim, policy_out, train_cfg.hidden);
    AdamOptimizer optimizer(model.param_count(), train_cfg.lr);
    int start_episode = 0;

    if (!spec.checkpoint_path.empty()) {
        Checkpoint ckpt = parse_checkpoint(read_file(spec.checkpoint_path));
        if (ckpt.config_hash != expected_hash)
            throw std::invalid_argument("checkpoint config hash mismatch: trained with different settings");
        if (ckpt.input_dim != input_dim || ckpt.policy_out != policy_out || ckpt.hidden != train_cfg.hidden)
            throw std::invalid_argument("checkpoint dimensions do not match this configuration");
        model.params() = ckpt.theta;
        optimizer.set_state(ckpt.adam_m, ckpt.adam_v, ckpt.adam_t);
        start_episode = ckpt.next_episode;
    } else {
        Rng init_rng = run_stream.split(kStreamModelInit);
        model.init_params(init_rng);
    }

    EnvFactory factory = [&](int episode) {
        EnvSetup env;
        env.jobdags = workloads;
        env.platform = platform;
        env.sim = spec.sim;
        env.sim.seed = run_stream.split(kStreamEpisodeBase + static_cast<std::uint64_t>(episode)).seed();
        return env;
    };

    TrainResult result = train(factory, train_cfg, obs, model, optimizer, start_episode);

    if (!spec.out_path.empty()) {
        Checkpoint ckpt;
        ckpt.config_hash = expected_hash;
        ckpt.input_dim = input_dim;
        ckpt.policy_out = policy_out;
        ckpt.hidden = train_cfg.hidden;
        ckpt.next_episode = start_episode + result.episodes_run;
        ckpt.adam_t = optimizer.step_count();
        ckpt.theta = model.params();
        ckpt.adam_m = optimizer.first_moment();
        ckpt.adam_v = optimizer.second_moment();
        write_file(spec.out_path, write_checkpoint(ckpt));
        write_file(spec.out_path + ".log.csv", write_training_log_csv(result.curve));
    }
    if (result.diverged)
        throw std::runtime_error("training diverged: non-finite parameters; checkpoint holds the last good state");
    return result;
}

std::vector<MetricsRow> cmd_eval(const ExperimentSpec& spec) {
    if (spec.checkpoint_path.empty()) throw std::invalid_argument("eval needs --checkpoint");
    Checkpoint ckpt = parse_checkpoint(read_file(spec.checkpoint_path));

    // Validate the checkpoint against this spec's derived configuration.
    Platform platform = load_platform(spec);
    std::uint64_t seed = spec.seeds.empty() ? 0 : spec.seeds.front();
    Rng run_stream = Rng(seed).split(fnv1a("train"));
    std::vector<JobDag> workloads = build_workloads(spec, platform, run_stream.split(kStreamWorkloads));
    ObservationSpec obs = make_observation_spec(spec, platform, workloads);
    TrainConfig train_cfg = spec.train;
    if (ckpt.config_hash != model_config_hash(train_cfg, obs))
        throw std::invalid_argument("checkpoint config hash mismatch: pass the training-time flags");

    PolicyModel model(ckpt.input_dim, ckpt.policy_out, ckpt.hidden);
    model.params() = ckpt.theta;

    ExperimentSpec eval_spec = spec;
    eval_spec.scheduler = "neural";
    return run_grid(eval_spec, &model);
}

std::vector<SynthReportRow> cmd_synth(const ExperimentSpec& spec, int count) {
    if (count < 0) throw std::invalid_argument("count must be >= 0");
    if (spec.out_path.empty()) throw std::invalid_argument("synth needs --out <dir>");
    fs::create_directories(spec.out_path);

    std::uint64_t seed = spec.seeds.empty() ? 0 : spec.seeds.front();
    Rng stream = Rng(seed).split(fnv1a("synth"));

    std::vector<SynthReportRow> report;
    for (int i = 0; i < count; ++i) {
        Rng dag_rng = stream.split(static_cast<std::uint64_t>(i));
        JobDag dag = synthesize_dag(spec.synth, dag_rng, spec.synth_costs);
        dag.name = "synth_" + std::to_string(i);
        char name[32];
        std::snprintf(name, sizeof(name), "job_%03d.txt", i);
        std::string path = (fs::path(spec.out_path) / name).string();
        write_file(path, write_job_profile(dag));

        SynthReportRow row;
        row.file = name;
        row.v = static_cast<int>(dag.nodes.size());
        row.levels = dag_depth(dag);
        row.edges = static_cast<int>(dag.edges.size());
        row.edge_density = edge_density(dag);
        row.chain_ratio = chain_ratio(dag);
        report.push_back(std::move(row));
    }

    std::ostringstream csv;
    csv << "# socsim synth report v1\n";
    csv << "file,v,levels,edges,edge_density,chain_ratio\n";
    for (const auto& row : report)
        csv << row.file << "," << row.v << "," << row.levels << "," << row.edges << ","
            << fmt_double(row.edge_density) << "," << fmt_double(row.chain_ratio) << "\n";
    write_file((fs::path(spec.out_path) / "summary.csv").string(), csv.str());
    return report;
}

} // namespace socsim
