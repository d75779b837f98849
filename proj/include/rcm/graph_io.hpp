#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "rcm/graph.hpp"

namespace rcm {

// Wire format: {"n": int, "delta": int, "edges": [[u,v], ...]} with 0-based
// vertices. Edges are serialized in id order so round-trips are byte-stable.
inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.n;
    j["delta"] = g.delta;
    auto edges = nlohmann::json::array();
    for (auto [u, v] : g.edges) edges.push_back({u, v});
    j["edges"] = edges;
    if (g.has_boundary()) {
        auto b = nlohmann::json::array();
        for (int v = 0; v < g.n; ++v)
            if (g.boundary[v]) b.push_back(v);
        j["boundary"] = b;
    }
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    if (!j.contains("n") || !j.contains("delta") || !j.contains("edges"))
        throw std::invalid_argument("graph json: need n, delta, edges");
    int n = j.at("n").get<int>();
    int delta = j.at("delta").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("graph json: edge must be [u,v]");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    std::vector<int> boundary;
    if (j.contains("boundary")) boundary = j.at("boundary").get<std::vector<int>>();
    Graph g = graph_from_edges(n, delta, std::move(edges), /*regular=*/boundary.empty());
    for (int v : boundary) {
        if (v < 0 || v >= n) throw std::invalid_argument("graph json: boundary vertex out of range");
        g.boundary[v] = 1;
    }
    if (!boundary.empty()) {
        for (int v = 0; v < n; ++v)
            if (!g.boundary[v] && g.degree(v) != delta)
                throw std::invalid_argument("graph json: non-boundary vertex with degree != delta");
    }
    return g;
}

inline void write_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << graph_to_json(g).dump() << "\n";
}

inline Graph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return graph_from_json(j);
}

}  // namespace rcm
