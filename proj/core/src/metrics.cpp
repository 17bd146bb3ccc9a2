#include "socsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace socsim {

std::optional<double> average_latency(std::span<const JobRuntimeRecord> records) {
    if (records.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& rec : records)
        for (const auto& t : rec.tasks) sum += t.duration;
    return sum / static_cast<double>(records.size());
}

double cp_min_cost(const JobDag& dag, const Platform& platform) {
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) index[dag.nodes[i].task_id] = i;

    std::vector<double> node_cost(dag.nodes.size());
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) {
        const auto& costs = dag.nodes[i].comp_cost;
        if (costs.empty())
            throw std::invalid_argument("cp_min_cost: task " + std::to_string(dag.nodes[i].task_id) + " unsupported");
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [pe, c] : costs) best = std::min(best, c);
        node_cost[i] = platform.mu * best;
    }

    // Longest path by node weight, topological order.
    std::vector<int> indeg(dag.nodes.size(), 0);
    for (const auto& e : dag.edges) ++indeg[index.at(e.dst)];
    std::vector<double> best(dag.nodes.size());
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) best[i] = node_cost[i];
    std::deque<std::size_t> q;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i)
        if (indeg[i] == 0) q.push_back(i);
    double overall = 0.0;
    while (!q.empty()) {
        std::size_t i = q.front();
        q.pop_front();
        overall = std::max(overall, best[i]);
        for (const auto& e : dag.edges) {
            if (index.at(e.src) != i) continue;
            std::size_t j = index.at(e.dst);
            best[j] = std::max(best[j], best[i] + node_cost[j]);
            if (--indeg[j] == 0) q.push_back(j);
        }
    }
    return overall;
}

double slr(const JobRuntimeRecord& record, const Platform& platform) {
    double lower = cp_min_cost(record.dag, platform);
    if (lower <= 0.0) throw std::invalid_argument("slr: critical path cost is zero");
    return static_cast<double>(record.makespan) / lower;
}

double speedup(const JobRuntimeRecord& record, const Platform& platform, bool* partial_support) {
    if (partial_support) *partial_support = false;
    if (record.makespan <= 0) throw std::invalid_argument("speedup: makespan must be > 0");

    double best_single = std::numeric_limits<double>::infinity();
    for (const auto& pe : platform.pes) {
        double sum = 0.0;
        bool supports_all = true;
        for (const auto& n : record.dag.nodes) {
            auto it = n.comp_cost.find(pe.pe_id);
            if (it == n.comp_cost.end()) {
                supports_all = false;
                break;
            }
            sum += it->second;
        }
        if (supports_all) best_single = std::min(best_single, platform.mu * sum);
    }
    if (!std::isfinite(best_single)) {
        // no PE runs the whole job; fall back to each task's best supported cost
        if (partial_support) *partial_support = true;
        double sum = 0.0;
        for (const auto& n : record.dag.nodes) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [pe, c] : n.comp_cost) best = std::min(best, c);
            sum += best;
        }
        best_single = platform.mu * sum;
    }
    return best_single / static_cast<double>(record.makespan);
}

std::optional<double> avg_slr(std::span<const JobRuntimeRecord> records, const Platform& platform) {
    if (records.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& rec : records) sum += slr(rec, platform);
    return sum / static_cast<double>(records.size());
}

std::optional<double> avg_speedup(std::span<const JobRuntimeRecord> records, const Platform& platform) {
    if (records.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& rec : records) sum += speedup(rec, platform);
    return sum / static_cast<double>(records.size());
}

std::optional<double> explained_variance(std::span<const double> empirical, std::span<const double> predicted) {
    if (empirical.size() != predicted.size())
        throw std::invalid_argument("explained_variance: size mismatch");
    if (empirical.size() < 2) return std::nullopt;
    auto variance = [](std::span<const double> xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        return var / static_cast<double>(xs.size());
    };
    double var_g = variance(empirical);
    if (var_g == 0.0) return std::nullopt;
    std::vector<double> residual(empirical.size());
    for (std::size_t i = 0; i < empirical.size(); ++i) residual[i] = empirical[i] - predicted[i];
    return 1.0 - variance(residual) / var_g;
}

} // namespace socsim
