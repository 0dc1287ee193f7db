#pragma once

#include "corrscreen/screen.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace corrscreen {

struct InclusionNode {
    std::string label;
    std::size_t count = 0;  // |D|
};

// Directed edge from -> to: |D_from ∩ D_to| / |D_from| >= cutoff.
struct InclusionEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double fraction = 0.0;
    bool full = false;  // 100% inclusion
};

struct InclusionGraph {
    std::vector<InclusionNode> nodes;  // in label order
    std::vector<InclusionEdge> edges;  // sorted by (from, to)
    double cutoff = 0.9;
};

// Nodes are the entries of `results` (label -> screen). Nodes with no
// discoveries have no outgoing edges.
InclusionGraph inclusion_graph(const std::map<std::string, ScreenResult>& results, double cutoff = 0.9);

// Every nonempty subset of the per-treatment auto screens: singletons map to
// the screens themselves, larger subsets to their persistent screen.
// Labels join treatment names with '&'.
std::map<std::string, ScreenResult> subset_screens(const std::vector<ScreenResult>& per_treatment,
                                                   const ScreenOptions& options = {});

struct Subnetwork {
    std::vector<Edge> edges;                          // persistent edges, sorted
    std::vector<std::vector<std::size_t>> components;  // size descending, then first vertex
    std::vector<std::string> variable_ids;
    std::size_t giant_size() const { return components.empty() ? 0 : components.front().size(); }
};

// Edges present in every treatment, grouped into connected components.
Subnetwork persistent_subnetwork(const std::vector<ScreenResult>& per_treatment);

// Connected components of an edge list over vertices [0, p); isolated
// vertices are not reported.
std::vector<std::vector<std::size_t>> connected_components(std::size_t p, const std::vector<Edge>& edges);

enum class GraphFormat { edge_csv, dot };

// Deterministic serializations.
std::string inclusion_graph_csv(const InclusionGraph& g);
std::string inclusion_graph_dot(const InclusionGraph& g);
std::string subnetwork_csv(const Subnetwork& s);
std::string subnetwork_dot(const Subnetwork& s);
nlohmann::json inclusion_graph_json(const InclusionGraph& g);
nlohmann::json subnetwork_json(const Subnetwork& s);

void export_graph(const InclusionGraph& g, GraphFormat format, const std::filesystem::path& path);
void export_graph(const Subnetwork& s, GraphFormat format, const std::filesystem::path& path);

}  // namespace corrscreen
