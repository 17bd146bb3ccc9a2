#include "socsim/platform.hpp"

#include "socsim/util.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace socsim {

const ProcessingElement* Platform::find_pe(int pe_id) const {
    for (const auto& pe : pes)
        if (pe.pe_id == pe_id) return &pe;
    return nullptr;
}

bool Platform::supports(const TaskTemplate& task, int pe_id) const {
    return task.comp_cost.count(pe_id) != 0;
}

double Platform::bandwidth_between(int src, int dst) const {
    if (src == dst) return 0.0; // unused: same-PE transfer incurs no delay
    auto it = bandwidth.find({src, dst});
    if (it == bandwidth.end())
        throw std::invalid_argument("no bandwidth entry for pe pair (" + std::to_string(src) + ", " +
                                    std::to_string(dst) + ")");
    return it->second;
}

double Platform::mean_bandwidth() const {
    if (bandwidth.empty()) throw std::invalid_argument("platform has no bandwidth entries");
    double sum = 0.0;
    for (const auto& [pair, bw] : bandwidth) sum += bw;
    return sum / static_cast<double>(bandwidth.size());
}

double comm_delay(int pe_id, const std::vector<ParentPlacement>& parents, const Platform& platform) {
    double delay = 0.0;
    for (const auto& p : parents) {
        if (p.pe_id == pe_id) continue;
        delay = std::max(delay, p.edge_weight / platform.bandwidth_between(p.pe_id, pe_id));
    }
    return delay;
}

double exec_time(const TaskTemplate& task, int pe_id, const std::vector<ParentPlacement>& parents,
                 const Platform& platform) {
    auto it = task.comp_cost.find(pe_id);
    if (it == task.comp_cost.end())
        throw std::invalid_argument("task " + std::to_string(task.task_id) + " not supported by pe " +
                                    std::to_string(pe_id));
    return platform.mu * it->second + comm_delay(pe_id, parents, platform);
}

Platform parse_resource_profile(std::string_view text) {
    Platform platform;
    struct PendingOpp {
        int pe, line;
        double voltage, frequency;
    };
    struct PendingBw {
        int src, dst, line;
        double value;
    };
    std::vector<PendingOpp> opps;
    std::vector<PendingBw> bws;
    std::map<int, int> pe_line;

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

        if (tok[0] == "pe") {
            if (tok.size() != 3) throw ParseError(line_no, "pe takes <id> <name>");
            ProcessingElement pe;
            pe.pe_id = static_cast<int>(parse_int(tok[1], line_no, "pe id"));
            pe.name = std::string(tok[2]);
            pe.opp.clear();
            if (!pe_line.emplace(pe.pe_id, line_no).second)
                throw ParseError(line_no, "pe " + std::to_string(pe.pe_id) + " already declared");
            platform.pes.push_back(std::move(pe));
        } else if (tok[0] == "opp") {
            if (tok.size() != 4) throw ParseError(line_no, "opp takes <pe_id> <voltage> <frequency>");
            PendingOpp o;
            o.pe = static_cast<int>(parse_int(tok[1], line_no, "opp pe id"));
            o.voltage = parse_double(tok[2], line_no, "opp voltage");
            o.frequency = parse_double(tok[3], line_no, "opp frequency");
            o.line = line_no;
            if (o.frequency <= 0.0) throw ParseError(line_no, "opp frequency must be > 0");
            opps.push_back(o);
        } else if (tok[0] == "bw") {
            if (tok.size() != 4) throw ParseError(line_no, "bw takes <pe_i> <pe_j> <value>");
            PendingBw b;
            b.src = static_cast<int>(parse_int(tok[1], line_no, "bw src pe"));
            b.dst = static_cast<int>(parse_int(tok[2], line_no, "bw dst pe"));
            b.value = parse_double(tok[3], line_no, "bw value");
            b.line = line_no;
            if (b.value <= 0.0) throw ParseError(line_no, "bw value must be > 0");
            if (b.src == b.dst) throw ParseError(line_no, "bw self pair is implicit (zero delay)");
            bws.push_back(b);
        } else {
            throw ParseError(line_no, "unknown directive '" + std::string(tok[0]) + "'");
        }
    }

    if (platform.pes.empty()) throw ParseError(line_no, "profile declares no PEs");

    for (const auto& o : opps) {
        bool found = false;
        for (auto& pe : platform.pes) {
            if (pe.pe_id != o.pe) continue;
            pe.opp.push_back({o.voltage, o.frequency});
            found = true;
        }
        if (!found) throw ParseError(o.line, "opp references undefined PE " + std::to_string(o.pe));
    }
    for (auto& pe : platform.pes) {
        if (pe.opp.empty())
            throw ParseError(pe_line.at(pe.pe_id), "pe " + std::to_string(pe.pe_id) + " has no opp entry");
        pe.active_frequency = 0.0;
        for (const auto& p : pe.opp) pe.active_frequency = std::max(pe.active_frequency, p.frequency);
    }

    for (const auto& b : bws) {
        if (!pe_line.count(b.src)) throw ParseError(b.line, "bw references undefined PE " + std::to_string(b.src));
        if (!pe_line.count(b.dst)) throw ParseError(b.line, "bw references undefined PE " + std::to_string(b.dst));
        if (!platform.bandwidth.emplace(std::make_pair(b.src, b.dst), b.value).second)
            throw ParseError(b.line, "duplicate bw entry (" + std::to_string(b.src) + ", " + std::to_string(b.dst) + ")");
    }
    for (const auto& a : platform.pes)
        for (const auto& b : platform.pes) {
            if (a.pe_id == b.pe_id) continue;
            if (!platform.bandwidth.count({a.pe_id, b.pe_id}))
                throw ParseError(line_no, "missing bw entry (" + std::to_string(a.pe_id) + ", " +
                                              std::to_string(b.pe_id) + ")");
        }

    return platform;
}

std::string write_resource_profile(const Platform& platform) {
    std::ostringstream out;
    std::vector<const ProcessingElement*> pes;
    for (const auto& pe : platform.pes) pes.push_back(&pe);
    std::sort(pes.begin(), pes.end(), [](auto* a, auto* b) { return a->pe_id < b->pe_id; });
    for (const auto* pe : pes) out << "pe " << pe->pe_id << " " << (pe->name.empty() ? "pe" : pe->name) << "\n";
    for (const auto* pe : pes)
        for (const auto& o : pe->opp)
            out << "opp " << pe->pe_id << " " << fmt_double(o.voltage) << " " << fmt_double(o.frequency) << "\n";
    for (const auto& [pair, bw] : platform.bandwidth)
        out << "bw " << pair.first << " " << pair.second << " " << fmt_double(bw) << "\n";
    return out.str();
}

} // namespace socsim
