#pragma once

#include "socsim/workload.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace socsim {

struct OppPoint {
    double voltage = 1.0;
    double frequency = 1.0;
};

// A compute resource that executes one task at a time, non-preemptively.
// The active frequency is pinned to the fastest OPP for the whole run.
struct ProcessingElement {
    int pe_id = 0;
    std::string name;
    std::vector<OppPoint> opp{OppPoint{}};
    double active_frequency = 1.0;
};

struct ParentPlacement {
    int pe_id = -1;
    double edge_weight = 0.0;
    double finish_time = 0.0; // AFT of the parent, used by EFT planning
};

struct Platform {
    std::vector<ProcessingElement> pes;
    std::map<std::pair<int, int>, double> bandwidth; // ordered (src, dst) pairs, src != dst
    double mu = 1.0;                                 // execution-time scale

    const ProcessingElement* find_pe(int pe_id) const;
    bool supports(const TaskTemplate& task, int pe_id) const;
    // Transfer bandwidth src -> dst; same-PE transfers are free by convention.
    double bandwidth_between(int src, int dst) const;
    double mean_bandwidth() const;
};

// Max over parents of edge_weight / bandwidth(parent_pe -> pe); parents on
// the same PE contribute zero.
double comm_delay(int pe_id, const std::vector<ParentPlacement>& parents, const Platform& platform);

// mu * comp_cost(task, pe) + comm_delay(...). Throws when pe does not
// support the task.
double exec_time(const TaskTemplate& task, int pe_id, const std::vector<ParentPlacement>& parents,
                 const Platform& platform);

// Resource profile: '#' comments, directives
//   pe <id> <name>
//   opp <pe_id> <voltage> <frequency>
//   bw <pe_i> <pe_j> <value>
// Every PE needs at least one opp line; every ordered pair of distinct PEs
// needs a bw line.
Platform parse_resource_profile(std::string_view text);
std::string write_resource_profile(const Platform& platform);

} // namespace socsim
