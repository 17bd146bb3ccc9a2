#include "socsim/workload.hpp"

#include "socsim/platform.hpp"
#include "socsim/util.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace socsim {

const TaskTemplate* JobDag::find_task(int task_id) const {
    for (const auto& n : nodes)
        if (n.task_id == task_id) return &n;
    return nullptr;
}

std::vector<int> JobDag::parents_of(int task_id) const {
    std::vector<int> out;
    for (const auto& e : edges)
        if (e.dst == task_id) out.push_back(e.src);
    return out;
}

std::vector<int> JobDag::children_of(int task_id) const {
    std::vector<int> out;
    for (const auto& e : edges)
        if (e.src == task_id) out.push_back(e.dst);
    return out;
}

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void sample_comp_costs(TaskTemplate& task, const CompCostModel& costs, Rng& rng) {
    for (int pe : costs.pe_ids) {
        if (costs.support_prob >= 1.0 || rng.uniform01() < costs.support_prob)
            task.comp_cost[pe] = std::max(1.0, rng.normal(costs.cost_mean, costs.cost_std));
    }
    if (task.comp_cost.empty()) {
        int pe = costs.pe_ids[static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(costs.pe_ids.size())))];
        task.comp_cost[pe] = std::max(1.0, rng.normal(costs.cost_mean, costs.cost_std));
    }
}

} // namespace

JobDag synthesize_dag(const DagGenParams& params, Rng& rng, const CompCostModel& costs) {
    if (params.v < 3) throw std::invalid_argument("synthesize_dag: v must be >= 3");
    if (params.alpha <= 0.0) throw std::invalid_argument("synthesize_dag: alpha must be > 0");
    if (params.nu < 0.0 || params.nu_std < 0.0)
        throw std::invalid_argument("synthesize_dag: nu and nu_std must be >= 0");
    if (costs.pe_ids.empty()) throw std::invalid_argument("synthesize_dag: cost model has no PEs");

    JobDag dag;
    dag.name = "synth_v" + std::to_string(params.v);

    int depth = round_half_up(std::sqrt(static_cast<double>(params.v)) / params.alpha);
    bool clamped = depth < 3 || depth > params.v;
    depth = std::clamp(depth, 3, params.v); // a level needs at least one node
    dag.depth_clamped = clamped;

    // Level widths: HEAD and TAIL levels hold one node each; interior levels
    // are drawn around floor(sqrt(v) * alpha).
    double width_mean = std::floor(std::sqrt(static_cast<double>(params.v)) * params.alpha);
    std::vector<int> widths(static_cast<std::size_t>(depth), 1);
    for (int l = 1; l < depth - 1; ++l)
        widths[static_cast<std::size_t>(l)] = std::max(1, round_half_up(rng.normal(width_mean, 0.0)));

    // Correct the total to exactly v by add/subtract on random interior levels.
    auto total = [&widths]() {
        int t = 0;
        for (int w : widths) t += w;
        return t;
    };
    int interior_levels = depth - 2;
    while (total() != params.v) {
        int l = 1 + static_cast<int>(rng.uniform_int(interior_levels));
        if (total() < params.v) {
            ++widths[static_cast<std::size_t>(l)];
        } else if (widths[static_cast<std::size_t>(l)] > 1) {
            --widths[static_cast<std::size_t>(l)];
        }
    }

    // Materialize nodes level by level; task ids follow level order.
    std::vector<std::vector<int>> level_nodes(static_cast<std::size_t>(depth));
    int next_id = 0;
    for (int l = 0; l < depth; ++l) {
        for (int k = 0; k < widths[static_cast<std::size_t>(l)]; ++k) {
            TaskTemplate t;
            t.task_id = next_id;
            t.name = "t" + std::to_string(next_id);
            sample_comp_costs(t, costs, rng);
            dag.nodes.push_back(std::move(t));
            level_nodes[static_cast<std::size_t>(l)].push_back(next_id);
            ++next_id;
        }
    }
    dag.head_id = level_nodes.front().front();
    dag.tail_id = level_nodes.back().front();

    auto edge_weight = [&]() {
        double w = rng.normal(params.nu, params.nu_std);
        return std::max(1.0, std::floor(std::fabs(w)));
    };

    // Each node below the HEAD level picks predecessors uniformly from the
    // level above; parentless upper-level nodes are then wired forward so
    // every node stays on a HEAD->TAIL path.
    std::set<std::pair<int, int>> seen;
    auto add_edge = [&](int src, int dst) {
        if (seen.insert({src, dst}).second)
            dag.edges.push_back({src, dst, edge_weight()});
    };

    for (int l = 1; l < depth; ++l) {
        const auto& prev = level_nodes[static_cast<std::size_t>(l - 1)];
        const auto& cur = level_nodes[static_cast<std::size_t>(l)];
        int prev_count = static_cast<int>(prev.size());
        for (int node : cur) {
            int want = std::max(1, std::min(round_half_up(rng.normal(prev_count / 3.0, 0.0)), prev_count));
            // uniform draw without replacement
            std::vector<int> pool = prev;
            for (int k = 0; k < want; ++k) {
                std::size_t pick = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(pool.size())));
                add_edge(pool[pick], node);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            }
        }
        for (int node : prev) {
            bool has_child = false;
            for (const auto& e : dag.edges)
                if (e.src == node) { has_child = true; break; }
            if (!has_child) {
                std::size_t pick = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(cur.size())));
                add_edge(node, cur[pick]);
            }
        }
    }

    return dag;
}

std::vector<std::string> validate_dag(const JobDag& dag) {
    std::vector<std::string> violations;
    if (dag.nodes.empty()) {
        violations.push_back("empty: dag has no nodes");
        return violations;
    }

    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) {
        const auto& n = dag.nodes[i];
        if (!index.emplace(n.task_id, i).second)
            violations.push_back("duplicate-task: task " + std::to_string(n.task_id) + " declared twice");
        if (n.comp_cost.empty())
            violations.push_back("unsupported-task: task " + std::to_string(n.task_id) + " has no supporting PE");
        for (const auto& [pe, cost] : n.comp_cost)
            if (cost < 0.0)
                violations.push_back("negative-cost: task " + std::to_string(n.task_id) + " on pe " + std::to_string(pe));
    }

    std::set<std::pair<int, int>> seen;
    std::map<int, int> indeg, outdeg;
    for (const auto& n : dag.nodes) {
        indeg[n.task_id] = 0;
        outdeg[n.task_id] = 0;
    }
    for (const auto& e : dag.edges) {
        if (!index.count(e.src) || !index.count(e.dst)) {
            violations.push_back("dangling-edge: (" + std::to_string(e.src) + " -> " + std::to_string(e.dst) + ")");
            continue;
        }
        if (e.src == e.dst)
            violations.push_back("self-loop: task " + std::to_string(e.src));
        if (!seen.insert({e.src, e.dst}).second)
            violations.push_back("duplicate-edge: (" + std::to_string(e.src) + " -> " + std::to_string(e.dst) + ")");
        if (e.weight < 0.0)
            violations.push_back("negative-weight: (" + std::to_string(e.src) + " -> " + std::to_string(e.dst) + ")");
        ++outdeg[e.src];
        ++indeg[e.dst];
    }

    std::vector<int> heads, tails;
    for (const auto& n : dag.nodes) {
        if (indeg[n.task_id] == 0) heads.push_back(n.task_id);
        if (outdeg[n.task_id] == 0) tails.push_back(n.task_id);
    }
    if (heads.size() != 1) {
        std::string ids;
        for (int h : heads) ids += " " + std::to_string(h);
        violations.push_back("multiple-head: in-degree-0 tasks:" + ids);
    } else if (dag.head_id >= 0 && heads[0] != dag.head_id) {
        violations.push_back("head-mismatch: declared " + std::to_string(dag.head_id) + ", found " + std::to_string(heads[0]));
    }
    if (tails.size() != 1) {
        std::string ids;
        for (int t : tails) ids += " " + std::to_string(t);
        violations.push_back("multiple-tail: out-degree-0 tasks:" + ids);
    } else if (dag.tail_id >= 0 && tails[0] != dag.tail_id) {
        violations.push_back("tail-mismatch: declared " + std::to_string(dag.tail_id) + ", found " + std::to_string(tails[0]));
    }

    // Cycle check via Kahn's algorithm.
    std::map<int, int> deg = indeg;
    std::deque<int> q;
    for (const auto& [id, d] : deg)
        if (d == 0) q.push_back(id);
    std::size_t visited = 0;
    while (!q.empty()) {
        int id = q.front();
        q.pop_front();
        ++visited;
        for (const auto& e : dag.edges)
            if (e.src == id && index.count(e.dst) && --deg[e.dst] == 0) q.push_back(e.dst);
    }
    if (visited != dag.nodes.size()) {
        violations.push_back("cycle: " + std::to_string(dag.nodes.size() - visited) + " task(s) on a cycle");
        return violations; // reachability below assumes acyclic
    }

    if (heads.size() == 1 && tails.size() == 1) {
        // Every node must sit on some HEAD->TAIL path: reachable from HEAD
        // and able to reach TAIL.
        auto reach = [&](int start, bool forward) {
            std::set<int> out{start};
            std::deque<int> bfs{start};
            while (!bfs.empty()) {
                int id = bfs.front();
                bfs.pop_front();
                for (const auto& e : dag.edges) {
                    int next = forward ? (e.src == id ? e.dst : -1) : (e.dst == id ? e.src : -1);
                    if (next >= 0 && out.insert(next).second) bfs.push_back(next);
                }
            }
            return out;
        };
        auto from_head = reach(heads[0], true);
        auto to_tail = reach(tails[0], false);
        for (const auto& n : dag.nodes) {
            if (!from_head.count(n.task_id))
                violations.push_back("unreachable: task " + std::to_string(n.task_id) + " not reachable from HEAD");
            else if (!to_tail.count(n.task_id))
                violations.push_back("dead-end: task " + std::to_string(n.task_id) + " cannot reach TAIL");
        }
    }

    return violations;
}

std::vector<int> node_levels(const JobDag& dag) {
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) index[dag.nodes[i].task_id] = i;

    std::vector<int> level(dag.nodes.size(), 0);
    std::vector<int> indeg(dag.nodes.size(), 0);
    for (const auto& e : dag.edges) ++indeg[index.at(e.dst)];

    std::deque<std::size_t> q;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i)
        if (indeg[i] == 0) q.push_back(i);
    while (!q.empty()) {
        std::size_t i = q.front();
        q.pop_front();
        for (const auto& e : dag.edges) {
            if (index.at(e.src) != i) continue;
            std::size_t j = index.at(e.dst);
            level[j] = std::max(level[j], level[i] + 1);
            if (--indeg[j] == 0) q.push_back(j);
        }
    }
    return level;
}

int dag_depth(const JobDag& dag) {
    auto levels = node_levels(dag);
    int max_level = 0;
    for (int l : levels) max_level = std::max(max_level, l);
    return max_level + 1;
}

double edge_density(const JobDag& dag) {
    auto v = static_cast<double>(dag.nodes.size());
    if (v < 2.0) throw std::invalid_argument("edge_density: needs at least 2 nodes");
    return 2.0 * static_cast<double>(dag.edges.size()) / (v * (v - 1.0));
}

double chain_ratio(const JobDag& dag) {
    if (dag.nodes.empty()) return 0.0;
    std::map<int, int> indeg, outdeg;
    for (const auto& e : dag.edges) {
        ++outdeg[e.src];
        ++indeg[e.dst];
    }
    int chained = 0;
    for (const auto& n : dag.nodes)
        if (indeg[n.task_id] == 1 && outdeg[n.task_id] == 1) ++chained;
    return static_cast<double>(chained) / static_cast<double>(dag.nodes.size());
}

double ccr(const JobDag& dag, const Platform& platform) {
    double mean_bw = platform.mean_bandwidth(); // throws when no entries
    double comp_sum = 0.0;
    for (const auto& n : dag.nodes) {
        if (n.comp_cost.empty()) throw std::invalid_argument("ccr: task " + std::to_string(n.task_id) + " unsupported");
        double s = 0.0;
        for (const auto& [pe, c] : n.comp_cost) s += c;
        comp_sum += s / static_cast<double>(n.comp_cost.size());
    }
    double mean_comp = comp_sum / static_cast<double>(dag.nodes.size());

    double w_sum = 0.0;
    for (const auto& e : dag.edges) w_sum += e.weight;
    double mean_w = dag.edges.empty() ? 0.0 : w_sum / static_cast<double>(dag.edges.size());

    return (mean_w / mean_bw) / mean_comp;
}

namespace {

JobDag parse_job_profile_impl(std::string_view text, const std::set<int>* known_pes) {
    JobDag dag;
    struct PendingEdge {
        int src, dst, line;
        double weight;
    };
    struct PendingComp {
        int task, pe, line;
        double cost;
    };
    std::vector<PendingEdge> pending_edges;
    std::vector<PendingComp> pending_comps;
    std::map<int, int> task_line; // task_id -> declaring line

    int line_no = 0;
    std::size_t pos = 0;
    bool saw_job = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tok = split_ws(line);
        if (tok.empty()) continue;

        if (tok[0] == "job") {
            if (tok.size() != 2) throw ParseError(line_no, "job takes one name");
            if (saw_job) throw ParseError(line_no, "duplicate job directive");
            dag.name = std::string(tok[1]);
            saw_job = true;
        } else if (tok[0] == "task") {
            if (tok.size() != 3) throw ParseError(line_no, "task takes <id> <name>");
            TaskTemplate t;
            t.task_id = static_cast<int>(parse_int(tok[1], line_no, "task id"));
            t.name = std::string(tok[2]);
            if (!task_line.emplace(t.task_id, line_no).second)
                throw ParseError(line_no, "task " + std::to_string(t.task_id) + " already declared");
            dag.nodes.push_back(std::move(t));
        } else if (tok[0] == "edge") {
            if (tok.size() != 4) throw ParseError(line_no, "edge takes <src> <dst> <weight>");
            PendingEdge e;
            e.src = static_cast<int>(parse_int(tok[1], line_no, "edge src"));
            e.dst = static_cast<int>(parse_int(tok[2], line_no, "edge dst"));
            e.weight = parse_double(tok[3], line_no, "edge weight");
            e.line = line_no;
            if (e.weight < 0.0) throw ParseError(line_no, "edge weight must be >= 0");
            if (e.src == e.dst) throw ParseError(line_no, "self-loop on task " + std::to_string(e.src));
            pending_edges.push_back(e);
        } else if (tok[0] == "comp") {
            if (tok.size() != 4) throw ParseError(line_no, "comp takes <task_id> <pe_id> <cost>");
            PendingComp c;
            c.task = static_cast<int>(parse_int(tok[1], line_no, "comp task id"));
            c.pe = static_cast<int>(parse_int(tok[2], line_no, "comp pe id"));
            c.cost = parse_double(tok[3], line_no, "comp cost");
            c.line = line_no;
            if (c.cost < 0.0) throw ParseError(line_no, "comp cost must be >= 0");
            pending_comps.push_back(c);
        } else {
            throw ParseError(line_no, "unknown directive '" + std::string(tok[0]) + "'");
        }
    }

    if (dag.nodes.empty()) throw ParseError(line_no, "profile declares no tasks");

    std::set<std::pair<int, int>> edge_seen;
    for (const auto& e : pending_edges) {
        if (!task_line.count(e.src))
            throw ParseError(e.line, "edge references undefined task " + std::to_string(e.src));
        if (!task_line.count(e.dst))
            throw ParseError(e.line, "edge references undefined task " + std::to_string(e.dst));
        if (!edge_seen.insert({e.src, e.dst}).second)
            throw ParseError(e.line, "duplicate edge (" + std::to_string(e.src) + " -> " + std::to_string(e.dst) + ")");
        dag.edges.push_back({e.src, e.dst, e.weight});
    }
    for (const auto& c : pending_comps) {
        if (!task_line.count(c.task))
            throw ParseError(c.line, "comp references undefined task " + std::to_string(c.task));
        if (known_pes && !known_pes->count(c.pe))
            throw ParseError(c.line, "comp references undefined PE " + std::to_string(c.pe));
        for (auto& n : dag.nodes) {
            if (n.task_id != c.task) continue;
            if (!n.comp_cost.emplace(c.pe, c.cost).second)
                throw ParseError(c.line, "duplicate comp entry for task " + std::to_string(c.task) + " pe " + std::to_string(c.pe));
        }
    }

    for (const auto& n : dag.nodes)
        if (n.comp_cost.empty())
            throw ParseError(task_line.at(n.task_id), "task " + std::to_string(n.task_id) + " has no comp entry");

    // Derive HEAD/TAIL and reject structurally broken graphs up front.
    std::map<int, int> indeg, outdeg;
    for (const auto& n : dag.nodes) {
        indeg[n.task_id] = 0;
        outdeg[n.task_id] = 0;
    }
    for (const auto& e : dag.edges) {
        ++outdeg[e.src];
        ++indeg[e.dst];
    }
    for (const auto& n : dag.nodes) {
        if (indeg[n.task_id] == 0) dag.head_id = dag.head_id < 0 ? n.task_id : dag.head_id;
        if (outdeg[n.task_id] == 0) dag.tail_id = dag.tail_id < 0 ? n.task_id : dag.tail_id;
    }
    auto violations = validate_dag(dag);
    if (!violations.empty()) throw ParseError(line_no, "invalid dag: " + violations.front());
    return dag;
}

} // namespace

JobDag parse_job_profile(std::string_view text) { return parse_job_profile_impl(text, nullptr); }

JobDag parse_job_profile(std::string_view text, const std::set<int>& known_pes) {
    return parse_job_profile_impl(text, &known_pes);
}

std::string write_job_profile(const JobDag& dag) {
    std::ostringstream out;
    out << "job " << (dag.name.empty() ? "job" : dag.name) << "\n";
    std::vector<const TaskTemplate*> nodes;
    for (const auto& n : dag.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(), [](auto* a, auto* b) { return a->task_id < b->task_id; });
    for (const auto* n : nodes) out << "task " << n->task_id << " " << n->name << "\n";
    std::vector<DagEdge> edges = dag.edges;
    std::sort(edges.begin(), edges.end(), [](const DagEdge& a, const DagEdge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (const auto& e : edges)
        out << "edge " << e.src << " " << e.dst << " " << fmt_double(e.weight) << "\n";
    for (const auto* n : nodes)
        for (const auto& [pe, cost] : n->comp_cost)
            out << "comp " << n->task_id << " " << pe << " " << fmt_double(cost) << "\n";
    return out.str();
}

bool structurally_equal(const JobDag& a, const JobDag& b) {
    if (a.name != b.name || a.head_id != b.head_id || a.tail_id != b.tail_id) return false;
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
    for (const auto& n : a.nodes) {
        const TaskTemplate* m = b.find_task(n.task_id);
        if (!m || m->name != n.name || m->comp_cost != n.comp_cost) return false;
    }
    auto key = [](const JobDag& d) {
        std::vector<std::tuple<int, int, double>> k;
        for (const auto& e : d.edges) k.emplace_back(e.src, e.dst, e.weight);
        std::sort(k.begin(), k.end());
        return k;
    };
    return key(a) == key(b);
}

std::string write_adjacency(const JobDag& dag) {
    std::ostringstream out;
    std::vector<DagEdge> edges = dag.edges;
    std::sort(edges.begin(), edges.end(), [](const DagEdge& a, const DagEdge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (const auto& e : edges)
        out << e.src << " -> " << e.dst << " (" << fmt_double(e.weight) << ")\n";
    return out.str();
}

} // namespace socsim
