#include "corrscreen/report.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace corrscreen {

InclusionGraph inclusion_graph(const std::map<std::string, ScreenResult>& results, double cutoff) {
    if (results.empty()) throw DataError("inclusion graph needs at least one screen result");
    if (!(cutoff > 0.0 && cutoff <= 1.0)) throw std::invalid_argument("inclusion cutoff must lie in (0, 1]");
    const std::size_t p = results.begin()->second.p;
    InclusionGraph g;
    g.cutoff = cutoff;
    std::vector<const std::vector<std::size_t>*> sets;
    for (const auto& [label, r] : results) {
        if (r.p != p) throw DataError("inclusion graph: screens cover different variable sets");
        g.nodes.push_back({label, r.N()});
        sets.push_back(&r.discoveries);
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i]->empty()) continue;
        for (std::size_t j = 0; j < sets.size(); ++j) {
            if (i == j) continue;
            std::vector<std::size_t> common;
            std::set_intersection(sets[i]->begin(), sets[i]->end(), sets[j]->begin(), sets[j]->end(),
                                  std::back_inserter(common));
            const double fraction = static_cast<double>(common.size()) / static_cast<double>(sets[i]->size());
            if (fraction >= cutoff) g.edges.push_back({i, j, fraction, common.size() == sets[i]->size()});
        }
    }
    return g;
}

std::map<std::string, ScreenResult> subset_screens(const std::vector<ScreenResult>& per_treatment,
                                                   const ScreenOptions& options) {
    const std::size_t m = per_treatment.size();
    if (m == 0) throw DataError("subset screens need at least one treatment");
    if (m > 20) throw std::invalid_argument("too many treatments for subset enumeration");
    std::map<std::string, ScreenResult> out;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<ScreenResult> members;
        std::string label;
        for (std::size_t t = 0; t < m; ++t) {
            if (!(mask & (1u << t))) continue;
            if (!label.empty()) label += '&';
            const auto& r = per_treatment[t];
            label += r.treatments.empty() || r.treatments.front().empty() ? "T" + std::to_string(t + 1)
                                                                          : r.treatments.front();
            members.push_back(r);
        }
        out.emplace(label, members.size() == 1 ? members.front() : persistent_screen(members, options));
    }
    return out;
}

std::vector<std::vector<std::size_t>> connected_components(std::size_t p, const std::vector<Edge>& edges) {
    std::vector<std::size_t> parent(p);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<char> touched(p, 0);
    for (const auto& e : edges) {
        touched.at(e.i) = touched.at(e.j) = 1;
        const auto a = find(e.i), b = find(e.j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t v = 0; v < p; ++v)
        if (touched[v]) groups[find(v)].push_back(v);
    std::vector<std::vector<std::size_t>> comps;
    for (auto& [root, members] : groups) comps.push_back(std::move(members));
    std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();
    });
    return comps;
}

Subnetwork persistent_subnetwork(const std::vector<ScreenResult>& per_treatment) {
    Subnetwork s;
    if (per_treatment.empty()) return s;
    s.variable_ids = per_treatment.front().variable_ids;
    if (per_treatment.size() == 1) {
        s.edges = per_treatment.front().load_edges();
    } else {
        s.edges = persistent_screen(per_treatment).load_edges();
    }
    s.components = connected_components(per_treatment.front().p, s.edges);
    return s;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string var_name(const Subnetwork& s, std::size_t i) {
    return i < s.variable_ids.size() ? s.variable_ids[i] : "V" + std::to_string(i + 1);
}

}  // namespace

std::string inclusion_graph_csv(const InclusionGraph& g) {
    std::string out = "from,to,fraction,full\n";
    for (const auto& e : g.edges)
        out += g.nodes[e.from].label + ',' + g.nodes[e.to].label + ',' + format_real(e.fraction) + ',' +
               (e.full ? "1" : "0") + '\n';
    return out;
}

std::string inclusion_graph_dot(const InclusionGraph& g) {
    std::string out = "digraph inclusion {\n";
    for (const auto& node : g.nodes) {
        // Node size grows with the log of the discovery count.
        const double size = 0.3 + 0.25 * std::log1p(static_cast<double>(node.count));
        out += "  " + dot_quote(node.label) + " [label=" + dot_quote(node.label + " (" + std::to_string(node.count) + ")") +
               ", width=" + fixed(size, 4) + ", count=" + std::to_string(node.count) + "];\n";
    }
    for (const auto& e : g.edges)
        out += "  " + dot_quote(g.nodes[e.from].label) + " -> " + dot_quote(g.nodes[e.to].label) +
               " [fraction=" + fixed(e.fraction, 6) + ", penwidth=" + (e.full ? "3" : "1") + "];\n";
    out += "}\n";
    return out;
}

std::string subnetwork_csv(const Subnetwork& s) {
    std::string out = "var_i,var_j,r\n";
    for (const auto& e : s.edges) out += var_name(s, e.i) + ',' + var_name(s, e.j) + ',' + format_real(e.r) + '\n';
    return out;
}

std::string subnetwork_dot(const Subnetwork& s) {
    std::string out = "graph persistent {\n";
    for (std::size_t c = 0; c < s.components.size(); ++c)
        for (auto v : s.components[c])
            out += "  " + dot_quote(var_name(s, v)) + " [component=" + std::to_string(c) + "];\n";
    for (const auto& e : s.edges)
        out += "  " + dot_quote(var_name(s, e.i)) + " -- " + dot_quote(var_name(s, e.j)) + " [r=" + fixed(e.r, 6) + "];\n";
    out += "}\n";
    return out;
}

nlohmann::json inclusion_graph_json(const InclusionGraph& g) {
    nlohmann::json j;
    j["cutoff"] = g.cutoff;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : g.nodes) j["nodes"].push_back({{"label", n.label}, {"count", n.count}});
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"from", g.nodes[e.from].label}, {"to", g.nodes[e.to].label}, {"fraction", e.fraction}, {"full", e.full}});
    return j;
}

nlohmann::json subnetwork_json(const Subnetwork& s) {
    nlohmann::json j;
    j["edges"] = s.edges.size();
    j["components"] = s.components.size();
    j["giant_component"] = s.giant_size();
    std::map<std::size_t, std::size_t> histogram;
    for (const auto& c : s.components) ++histogram[c.size()];
    j["component_size_histogram"] = nlohmann::json::array();
    for (const auto& [size, count] : histogram) j["component_size_histogram"].push_back({{"size", size}, {"count", count}});
    return j;
}

void export_graph(const InclusionGraph& g, GraphFormat format, const std::filesystem::path& path) {
    write_text_file(path, format == GraphFormat::dot ? inclusion_graph_dot(g) : inclusion_graph_csv(g));
}

void export_graph(const Subnetwork& s, GraphFormat format, const std::filesystem::path& path) {
    write_text_file(path, format == GraphFormat::dot ? subnetwork_dot(s) : subnetwork_csv(s));
}

}  // namespace corrscreen
