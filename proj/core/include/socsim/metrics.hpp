#pragma once

#include "socsim/engine.hpp"
#include "socsim/platform.hpp"

#include <optional>
#include <span>

namespace socsim {

// Mean over completed jobs of the summed task execution durations.
// Absent (not zero) when no job completed.
std::optional<double> average_latency(std::span<const JobRuntimeRecord> records);

// Lower-bound cost of the job: the heaviest HEAD->TAIL path where each node
// weighs mu * min-over-supporting-PE computation cost and edges weigh zero.
double cp_min_cost(const JobDag& dag, const Platform& platform);

// makespan / cp_min_cost. >= 1 for every completed job.
double slr(const JobRuntimeRecord& record, const Platform& platform);

// Best single-PE sequential time over makespan. When no single PE supports
// every task, the numerator falls back to the per-task best supported cost
// sum and *partial_support is set.
double speedup(const JobRuntimeRecord& record, const Platform& platform, bool* partial_support = nullptr);

std::optional<double> avg_slr(std::span<const JobRuntimeRecord> records, const Platform& platform);
std::optional<double> avg_speedup(std::span<const JobRuntimeRecord> records, const Platform& platform);

// 1 - Var[G - G_hat] / Var[G]; absent when fewer than two samples or Var[G]
// is zero.
std::optional<double> explained_variance(std::span<const double> empirical, std::span<const double> predicted);

} // namespace socsim
