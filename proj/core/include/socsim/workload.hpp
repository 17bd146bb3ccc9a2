#pragma once

#include "socsim/rng.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace socsim {

struct Platform;

// One task of a job: an opaque unit of work with per-PE computation costs.
// A PE id absent from comp_cost means that PE cannot execute the task.
struct TaskTemplate {
    int task_id = 0;
    std::string name;
    std::map<int, double> comp_cost; // pe_id -> cost in clock units
};

struct DagEdge {
    int src = 0;
    int dst = 0;
    double weight = 0.0; // data transmission delay
};

// A job: a directed acyclic graph of tasks with a unique HEAD (no parents)
// and a unique TAIL (no children).
struct JobDag {
    int job_id = 0;
    std::string name;
    std::vector<TaskTemplate> nodes;
    std::vector<DagEdge> edges;
    int head_id = -1;
    int tail_id = -1;
    bool depth_clamped = false; // set by synthesize_dag when the level count hit the floor of 3

    const TaskTemplate* find_task(int task_id) const;
    std::vector<int> parents_of(int task_id) const;
    std::vector<int> children_of(int task_id) const;
};

struct DagGenParams {
    int v = 10;          // task count, >= 3
    double alpha = 0.8;  // shape: width ~ sqrt(v)*alpha, depth ~ sqrt(v)/alpha
    double nu = 0.0;     // mean communication delay
    double nu_std = 0.0;
    std::uint64_t seed = 0;
};

// Where synthesized tasks get their computation costs. Kept separate from
// DagGenParams: the graph shape parameters say nothing about PE performance.
struct CompCostModel {
    std::vector<int> pe_ids = {0, 1, 2, 3};
    double cost_mean = 10.0;
    double cost_std = 0.0;
    double support_prob = 1.0; // chance each PE supports a task; at least one is forced
};

JobDag synthesize_dag(const DagGenParams& params, Rng& rng, const CompCostModel& costs = {});

// Empty result iff every JobDag invariant holds; each entry names the broken
// invariant and the offending element.
std::vector<std::string> validate_dag(const JobDag& dag);

// Longest-path level of each node, indexed like dag.nodes. HEAD is level 0.
std::vector<int> node_levels(const JobDag& dag);

// Number of levels (HEAD and TAIL levels included).
int dag_depth(const JobDag& dag);

double edge_density(const JobDag& dag); // 2E / (V(V-1)), V >= 2
double chain_ratio(const JobDag& dag);  // nodes with exactly one parent and one child, over V
double ccr(const JobDag& dag, const Platform& platform);

// Line-oriented job profile: '#' comments, directives
//   job <name>
//   task <id> <name>
//   edge <src> <dst> <weight>
//   comp <task_id> <pe_id> <cost>
// parse(write(d)) is structurally identical to d. When known_pes is given,
// comp lines referencing other PE ids are a parse error.
JobDag parse_job_profile(std::string_view text);
JobDag parse_job_profile(std::string_view text, const std::set<int>& known_pes);
std::string write_job_profile(const JobDag& dag);

// Structural equality: same nodes, costs, edges and head/tail (job_id ignored).
bool structurally_equal(const JobDag& a, const JobDag& b);

// Debug helper: adjacency dump, one "src -> dst (weight)" line per edge.
std::string write_adjacency(const JobDag& dag);

} // namespace socsim
