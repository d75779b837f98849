#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "rcm/graph.hpp"
#include "rcm/util.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Boundary closure: grow an edge set by absorbing all edges at any vertex
// with >= 5*delta/9 incident in-set edges, to a fixed point. The threshold is
// evaluated as 9*count >= 5*delta in integers.
// ---------------------------------------------------------------------------

// Reusable scratch space: closure touches only edges near b0, so buffers are
// reset through touched lists rather than reallocated.
struct ClosureWorkspace {
    std::vector<char> in_set;
    std::vector<int> cnt;
    std::vector<int> touched_edges;
    std::vector<int> touched_verts;
    std::vector<int> work;

    void ensure(const Graph& g) {
        if ((int)in_set.size() < g.m()) in_set.assign(g.m(), 0);
        if ((int)cnt.size() < g.n) cnt.assign(g.n, 0);
    }
    void reset() {
        for (int e : touched_edges) in_set[e] = 0;
        for (int v : touched_verts) cnt[v] = 0;
        touched_edges.clear();
        touched_verts.clear();
        work.clear();
    }
};

inline std::vector<int> boundary_closure(const Graph& g, const std::vector<int>& b0,
                                         ClosureWorkspace& ws) {
    ws.ensure(g);
    auto add_edge = [&](int e) {
        if (ws.in_set[e]) return;
        ws.in_set[e] = 1;
        ws.touched_edges.push_back(e);
        for (int v : {g.edges[e].first, g.edges[e].second}) {
            if (ws.cnt[v] == 0) ws.touched_verts.push_back(v);
            ++ws.cnt[v];
            if (9 * ws.cnt[v] >= 5 * g.delta) ws.work.push_back(v);
        }
    };
    for (int e : b0) add_edge(e);
    while (!ws.work.empty()) {
        int v = ws.work.back();
        ws.work.pop_back();
        if (9 * ws.cnt[v] < 5 * g.delta) continue;
        for (auto [w, e] : g.adj[v]) {
            (void)w;
            add_edge(e);
        }
    }
    std::vector<int> result = ws.touched_edges;
    ws.reset();
    std::sort(result.begin(), result.end());
    return result;
}

inline std::vector<int> boundary_closure(const Graph& g, const std::vector<int>& b0) {
    ClosureWorkspace ws;
    return boundary_closure(g, b0, ws);
}

// Audit variant: performs single-edge additions in an order driven by rng.
// Must agree with boundary_closure for every input.
inline std::vector<int> boundary_closure_randomized(const Graph& g, const std::vector<int>& b0,
                                                    std::mt19937_64& rng) {
    std::vector<char> in_set(g.m(), 0);
    std::vector<int> cnt(g.n, 0);
    std::vector<int> result;
    for (int e : b0) {
        if (in_set[e]) continue;
        in_set[e] = 1;
        result.push_back(e);
        ++cnt[g.edges[e].first];
        ++cnt[g.edges[e].second];
    }
    for (;;) {
        std::vector<int> candidates;
        for (int v = 0; v < g.n; ++v) {
            if (9 * cnt[v] < 5 * g.delta) continue;
            for (auto [w, e] : g.adj[v]) {
                (void)w;
                if (!in_set[e]) candidates.push_back(e);
            }
        }
        if (candidates.empty()) break;
        int e = candidates[rng() % candidates.size()];
        in_set[e] = 1;
        result.push_back(e);
        ++cnt[g.edges[e].first];
        ++cnt[g.edges[e].second];
    }
    std::sort(result.begin(), result.end());
    return result;
}

// ---------------------------------------------------------------------------
// Connected edge-set enumeration. Recursive extension rooted at the minimum
// edge id (or at a fixed vertex), with in-order banning so every set is
// produced exactly once. Verified against brute force in the tests.
// ---------------------------------------------------------------------------

namespace detail {

template <typename Fn>
void connected_sets_rec(const Graph& g, int root_edge, std::vector<int>& set,
                        std::vector<char>& in_set, std::vector<char>& banned,
                        const std::vector<int>& cand, int max_edges, Fn&& fn) {
    fn(set);
    if ((int)set.size() >= max_edges) return;
    std::vector<int> local_ban;
    for (size_t i = 0; i < cand.size(); ++i) {
        int e = cand[i];
        std::vector<int> next;
        next.reserve(cand.size() + 2 * g.delta);
        for (size_t j = i + 1; j < cand.size(); ++j) next.push_back(cand[j]);
        in_set[e] = 1;
        set.push_back(e);
        for (int v : {g.edges[e].first, g.edges[e].second}) {
            for (auto [w, f] : g.adj[v]) {
                (void)w;
                if (f <= root_edge || in_set[f] || banned[f]) continue;
                if (std::find(next.begin(), next.end(), f) == next.end()) next.push_back(f);
            }
        }
        banned[e] = 1;  // excluded from this new candidate set and later branches
        connected_sets_rec(g, root_edge, set, in_set, banned, next, max_edges, fn);
        set.pop_back();
        in_set[e] = 0;
        local_ban.push_back(e);
    }
    for (int e : local_ban) banned[e] = 0;
}

}  // namespace detail

// Calls fn(sorted-ish edge list) once for every connected edge set with
// 1 <= |set| <= max_edges.
template <typename Fn>
void for_each_connected_edge_set(const Graph& g, int max_edges, Fn&& fn) {
    if (max_edges < 1) return;
    std::vector<char> in_set(g.m(), 0), banned(g.m(), 0);
    std::vector<int> set;
    for (int e0 = 0; e0 < g.m(); ++e0) {
        set.assign(1, e0);
        in_set[e0] = 1;
        std::vector<int> cand;
        for (int v : {g.edges[e0].first, g.edges[e0].second})
            for (auto [w, f] : g.adj[v]) {
                (void)w;
                if (f > e0 && std::find(cand.begin(), cand.end(), f) == cand.end())
                    cand.push_back(f);
            }
        std::sort(cand.begin(), cand.end());
        detail::connected_sets_rec(g, e0, set, in_set, banned, cand, max_edges, fn);
        in_set[e0] = 0;
    }
}

// Same, restricted to sets whose vertex span contains `anchor`.
template <typename Fn>
void for_each_connected_edge_set_at(const Graph& g, int anchor, int max_edges, Fn&& fn) {
    if (max_edges < 1) return;
    std::vector<char> in_set(g.m(), 0), banned(g.m(), 0);
    std::vector<int> set;
    std::vector<int> cand;
    for (auto [w, f] : g.adj[anchor]) {
        (void)w;
        cand.push_back(f);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    // root_edge = -1: all ids allowed; connectivity to the anchor is kept by
    // only ever extending the anchored component.
    detail::connected_sets_rec(g, -1, set, in_set, banned, cand, max_edges,
                               [&](const std::vector<int>& s) {
                                   if (!s.empty()) fn(s);
                               });
}

// ---------------------------------------------------------------------------
// Polymers
// ---------------------------------------------------------------------------

enum class Model { dis, ord };

inline const char* to_string(Model m) { return m == Model::dis ? "dis" : "ord"; }

namespace detail {

// Marked-graph (wired tree) fast path. With every unmarked vertex of full
// degree delta >= 3, a component avoiding all marks has frontier
// >= (delta-2)|P| edges, all of which lie in e_u, so |P| <= |e_u|/(delta-2).
// Pieces are scanned from e_u endpoints with a size cap; exceeding the cap
// certifies the piece reaches a mark.
inline int c_prime_marked(const Graph& g, const std::vector<int>& e_u_in) {
    std::vector<int> e_u = e_u_in;
    std::sort(e_u.begin(), e_u.end());
    int cap = 2 * (int)e_u.size() + 4;
    auto is_removed = [&](int e) { return std::binary_search(e_u.begin(), e_u.end(), e); };
    std::vector<int> seeds;
    for (int e : e_u) {
        seeds.push_back(g.edges[e].first);
        seeds.push_back(g.edges[e].second);
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    std::vector<int> piece;
    std::map<int, char> visited;  // only vertices near e_u are ever touched
    int count = 0;
    for (int s : seeds) {
        if (visited.count(s)) continue;
        piece.assign(1, s);
        visited[s] = 1;
        bool small_unmarked = !g.boundary[s];
        for (size_t i = 0; i < piece.size() && small_unmarked; ++i) {
            int v = piece[i];
            for (auto [w, e] : g.adj[v]) {
                if (is_removed(e) || visited.count(w)) continue;
                if (g.boundary[w] || (int)piece.size() + 1 > cap) {
                    small_unmarked = false;
                    break;
                }
                visited[w] = 1;
                piece.push_back(w);
            }
        }
        if (small_unmarked) {
            ++count;
        } else {
            // a partial scan must not wall off a later scan of the same piece;
            // re-scanning a bad piece from another seed re-derives the abort
            for (int v : piece) visited.erase(v);
        }
    }
    return count;
}

}  // namespace detail

// Count of components of (V, E \ e_u) that are "small": fewer than n/2
// vertices, or, when the graph carries boundary marks (tree truncations),
// containing no marked vertex. e_u must be sorted.
inline int c_prime(const Graph& g, const std::vector<int>& e_u) {
    if (g.has_boundary()) return detail::c_prime_marked(g, e_u);
    std::vector<char> removed(g.m(), 0);
    for (int e : e_u) removed[e] = 1;
    std::vector<int> parent(g.n);
    for (int v = 0; v < g.n; ++v) parent[v] = v;
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int e = 0; e < g.m(); ++e) {
        if (removed[e]) continue;
        int ru = find(g.edges[e].first), rv = find(g.edges[e].second);
        if (ru != rv) parent[ru] = rv;
    }
    std::vector<int> size(g.n, 0);
    std::vector<char> has_mark(g.n, 0);
    for (int v = 0; v < g.n; ++v) {
        int r = find(v);
        ++size[r];
        if (!g.boundary.empty() && g.boundary[v]) has_mark[r] = 1;
    }
    bool use_marks = g.has_boundary();
    int count = 0;
    for (int v = 0; v < g.n; ++v) {
        if (find(v) != v) continue;
        if (use_marks ? !has_mark[v] : 2 * size[v] < g.n) ++count;
    }
    return count;
}

struct Polymer {
    Model model = Model::dis;
    std::vector<int> edges;     // sorted edge ids
    std::vector<int> vertices;  // sorted vertex ids
    std::vector<int> e_u;       // ord: sorted unoccupied edge ids
    int cprime = 0;             // ord only

    int edge_count() const { return (int)edges.size(); }
    int vertex_count() const { return (int)vertices.size(); }
};

inline bool compatible(const Polymer& a, const Polymer& b) {
    // vertex disjointness; a polymer is incompatible with itself
    size_t i = 0, j = 0;
    while (i < a.vertices.size() && j < b.vertices.size()) {
        if (a.vertices[i] == b.vertices[j]) return false;
        if (a.vertices[i] < b.vertices[j]) ++i;
        else ++j;
    }
    return true;
}

inline double w_dis_log(int nvert, int nedge, double log_q, double log_x) {
    if (nedge >= 1 && log_x == neg_inf()) return neg_inf();
    return (1 - nvert) * log_q + nedge * log_x;
}

inline double w_ord_log(int cprime, int n_eu, double log_q, double log_x) {
    return cprime * log_q - n_eu * log_x;
}

// log weight of a polymer at real beta >= 0 (ord requires e^beta - 1 > 0)
inline double polymer_log_weight(const Polymer& p, double q, double beta) {
    double x = std::expm1(beta);
    if (p.model == Model::dis) {
        if (beta < 0) throw std::invalid_argument("w_dis: beta must be >= 0");
        return w_dis_log(p.vertex_count(), p.edge_count(), std::log(q), x > 0 ? std::log(x) : neg_inf());
    }
    if (x <= 0) throw std::invalid_argument("w_ord: requires e^beta - 1 > 0");
    return w_ord_log(p.cprime, (int)p.e_u.size(), std::log(q), std::log(x));
}

// Complex-beta evaluation: returns complex log weight (log-modulus, phase).
inline std::complex<double> polymer_log_weight(const Polymer& p, double q,
                                               std::complex<double> beta) {
    std::complex<double> x = std::exp(beta) - 1.0;
    if (p.model == Model::dis)
        return (1.0 - p.vertex_count()) * std::log(q) + (double)p.edge_count() * std::log(x);
    return (double)p.cprime * std::log(q) - (double)p.e_u.size() * std::log(x);
}

inline std::vector<int> edge_span_vertices(const Graph& g, const std::vector<int>& edges) {
    std::vector<int> verts;
    for (int e : edges) {
        verts.push_back(g.edges[e].first);
        verts.push_back(g.edges[e].second);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    return verts;
}

inline Polymer make_dis_polymer(const Graph& g, std::vector<int> edges) {
    Polymer p;
    p.model = Model::dis;
    p.edges = std::move(edges);
    std::sort(p.edges.begin(), p.edges.end());
    p.vertices = edge_span_vertices(g, p.edges);
    return p;
}

inline Polymer make_ord_polymer(const Graph& g, std::vector<int> edges, std::vector<int> e_u) {
    Polymer p;
    p.model = Model::ord;
    p.edges = std::move(edges);
    std::sort(p.edges.begin(), p.edges.end());
    p.e_u = std::move(e_u);
    std::sort(p.e_u.begin(), p.e_u.end());
    p.vertices = edge_span_vertices(g, p.edges);
    p.cprime = c_prime(g, p.e_u);
    return p;
}

// All disordered polymers (connected subgraphs) with 1 <= |E| <= m.
inline std::vector<Polymer> enumerate_dis_polymers(const Graph& g, int m, int cap = 12) {
    if (m > cap) throw cap_exceeded("enumerate_dis_polymers: m exceeds cap");
    std::vector<Polymer> out;
    for_each_connected_edge_set(g, m, [&](const std::vector<int>& s) {
        out.push_back(make_dis_polymer(g, s));
    });
    return out;
}

// Labelled connected edge sets that are fixed points of the boundary closure
// of their unoccupied part. The closure runs in the host graph, so labelled
// sets whose closure escapes the set are rejected.
inline std::vector<Polymer> enumerate_ord_polymers(const Graph& g, int m, int cap = 10) {
    if (m > cap) throw cap_exceeded("enumerate_ord_polymers: m exceeds cap");
    std::vector<Polymer> out;
    ClosureWorkspace ws;
    for_each_connected_edge_set(g, m, [&](const std::vector<int>& s) {
        std::vector<int> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        int k = (int)sorted.size();
        std::vector<int> e_u;
        for (std::uint32_t lab = 1; lab < (1u << k); ++lab) {
            e_u.clear();
            for (int i = 0; i < k; ++i)
                if (lab >> i & 1) e_u.push_back(sorted[i]);
            if (boundary_closure(g, e_u, ws) != sorted) continue;
            Polymer p = make_ord_polymer(g, sorted, e_u);
            if (p.edge_count() > 10 * (int)p.e_u.size())
                throw std::logic_error("ord polymer violates |E| <= 10|E_u|");
            out.push_back(std::move(p));
        }
    });
    return out;
}

// Dense-id polymer store with canonical-key hash consing.
struct PolymerArena {
    Model model = Model::dis;
    std::vector<Polymer> polymers;
    std::map<std::pair<std::vector<int>, std::vector<int>>, int> index;  // (edges, e_u) -> id

    int intern(Polymer p) {
        auto key = std::make_pair(p.edges, p.e_u);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        int id = (int)polymers.size();
        index.emplace(std::move(key), id);
        polymers.push_back(std::move(p));
        return id;
    }
    int size() const { return (int)polymers.size(); }
    const Polymer& operator[](int id) const { return polymers[id]; }
};

inline PolymerArena build_arena(const Graph& g, Model model, int max_polymer_edges,
                                int cap_dis = 12, int cap_ord = 10) {
    PolymerArena arena;
    arena.model = model;
    auto list = model == Model::dis ? enumerate_dis_polymers(g, max_polymer_edges, cap_dis)
                                    : enumerate_ord_polymers(g, max_polymer_edges, cap_ord);
    for (auto& p : list) arena.intern(std::move(p));
    return arena;
}

}  // namespace rcm
