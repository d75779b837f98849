#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rcm/util.hpp"

namespace rcm {

// Subset of edges of a fixed graph, A in {0,1}^E.
class EdgeConfig {
public:
    EdgeConfig() = default;
    explicit EdgeConfig(int n_edges) : n_(n_edges), bits_((n_edges + 63) / 64, 0) {}

    int size() const { return n_; }
    bool test(int e) const { return (bits_[e >> 6] >> (e & 63)) & 1ULL; }
    void set(int e) { bits_[e >> 6] |= 1ULL << (e & 63); }
    void reset(int e) { bits_[e >> 6] &= ~(1ULL << (e & 63)); }
    void flip(int e) { bits_[e >> 6] ^= 1ULL << (e & 63); }
    void fill() {
        for (auto& w : bits_) w = ~0ULL;
        trim();
    }
    void clear() { std::fill(bits_.begin(), bits_.end(), 0ULL); }
    int count() const {
        int c = 0;
        for (auto w : bits_) c += __builtin_popcountll(w);
        return c;
    }
    bool operator==(const EdgeConfig& o) const { return n_ == o.n_ && bits_ == o.bits_; }
    bool operator<(const EdgeConfig& o) const { return bits_ < o.bits_; }

    // MSB-first hex over ceil(|E|/4) nibbles; edge 0 is the lowest bit.
    std::string to_hex() const {
        int nibbles = (n_ + 3) / 4;
        std::string s(nibbles, '0');
        for (int i = 0; i < nibbles; ++i) {
            int v = 0;
            for (int b = 0; b < 4; ++b) {
                int e = 4 * i + b;
                if (e < n_ && test(e)) v |= 1 << b;
            }
            s[nibbles - 1 - i] = "0123456789abcdef"[v];
        }
        return s;
    }
    static EdgeConfig from_hex(const std::string& s, int n_edges) {
        EdgeConfig a(n_edges);
        int nibbles = (n_edges + 3) / 4;
        if ((int)s.size() != nibbles) throw std::invalid_argument("hex mask length mismatch");
        for (int i = 0; i < nibbles; ++i) {
            char c = s[nibbles - 1 - i];
            int v = c >= '0' && c <= '9' ? c - '0' : c >= 'a' && c <= 'f' ? c - 'a' + 10 : c >= 'A' && c <= 'F' ? c - 'A' + 10 : -1;
            if (v < 0) throw std::invalid_argument("bad hex digit in mask");
            for (int b = 0; b < 4; ++b) {
                int e = 4 * i + b;
                if (e < n_edges && (v >> b & 1)) a.set(e);
            }
        }
        return a;
    }

private:
    void trim() {
        int tail = n_ & 63;
        if (tail && !bits_.empty()) bits_.back() &= (1ULL << tail) - 1;
    }
    int n_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Immutable after construction; edge ids are 0..|E|-1 in insertion order.
struct Graph {
    int n = 0;
    int delta = 0;  // declared degree
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, edge id)
    std::vector<char> boundary;                         // per-vertex mark, used by tree builders
    bool regular = true;

    int m() const { return (int)edges.size(); }
    int degree(int v) const { return (int)adj[v].size(); }
    bool has_boundary() const { return std::find(boundary.begin(), boundary.end(), 1) != boundary.end(); }
};

inline Graph graph_from_edges(int n, int delta, std::vector<std::pair<int, int>> edges, bool regular = true) {
    Graph g;
    g.n = n;
    g.delta = delta;
    g.regular = regular;
    g.adj.assign(n, {});
    g.boundary.assign(n, 0);
    g.edges.reserve(edges.size());
    std::vector<std::vector<char>> seen;  // dedupe/simplicity check via sorted pair set
    std::vector<std::pair<int, int>> canon;
    canon.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("loop edge");
        canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    {
        auto sorted = canon;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("parallel edge");
    }
    for (auto [u, v] : canon) {
        int id = (int)g.edges.size();
        g.edges.emplace_back(u, v);
        g.adj[u].emplace_back(v, id);
        g.adj[v].emplace_back(u, id);
    }
    if (regular) {
        for (int v = 0; v < n; ++v)
            if (!g.boundary[v] && g.degree(v) != delta)
                throw std::invalid_argument("graph declared regular but vertex " + std::to_string(v) +
                                            " has degree " + std::to_string(g.degree(v)));
    }
    return g;
}

inline Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return graph_from_edges(n, n - 1, std::move(e));
}

inline Graph cycle_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u) e.emplace_back(u, (u + 1) % n);
    return graph_from_edges(n, 2, std::move(e));
}

inline Graph path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
    return graph_from_edges(n, 1, std::move(e), /*regular=*/false);
}

// Configuration-model pairing with full rejection of loops and parallel
// edges; uniform over pairings, deterministic for a fixed seed.
inline Graph random_regular(int n, int delta, std::uint64_t seed, int max_attempts = 1000000) {
    if (n <= delta) throw std::invalid_argument("random_regular: need n > delta");
    if ((std::int64_t)n * delta % 2 != 0) throw std::invalid_argument("random_regular: n*delta must be even");
    auto rng = make_rng(seed);
    std::vector<int> stubs(n * delta);
    for (int i = 0; i < n * delta; ++i) stubs[i] = i / delta;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (int i = (int)stubs.size() - 1; i > 0; --i) {
            int j = (int)(rng() % (std::uint64_t)(i + 1));
            std::swap(stubs[i], stubs[j]);
        }
        bool ok = true;
        std::vector<std::pair<int, int>> e(stubs.size() / 2);
        for (size_t k = 0; k < e.size() && ok; ++k) {
            int u = stubs[2 * k], v = stubs[2 * k + 1];
            if (u == v) ok = false;
            e[k] = {std::min(u, v), std::max(u, v)};
        }
        if (!ok) continue;
        std::sort(e.begin(), e.end());
        if (std::adjacent_find(e.begin(), e.end()) != e.end()) continue;
        return graph_from_edges(n, delta, std::move(e));
    }
    throw budget_exceeded("random_regular: rejection budget exceeded");
}

struct ComponentLabels {
    std::vector<int> label;  // per-vertex component id, 0..count-1
    int count = 0;
};

inline ComponentLabels components(const Graph& g, const EdgeConfig& a) {
    if (a.size() != g.m()) throw std::invalid_argument("components: config sized for a different graph");
    std::vector<int> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int e = 0; e < g.m(); ++e) {
        if (!a.test(e)) continue;
        int ru = find(g.edges[e].first), rv = find(g.edges[e].second);
        if (ru != rv) parent[ru] = rv;
    }
    ComponentLabels out;
    out.label.assign(g.n, -1);
    for (int v = 0; v < g.n; ++v) {
        int r = find(v);
        if (out.label[r] < 0) out.label[r] = out.count++;
        out.label[v] = out.label[r];
    }
    return out;
}

inline int component_count(const Graph& g, const EdgeConfig& a) { return components(g, a).count; }

struct ExpansionProfile {
    double value = 0.0;            // min |E(S,S^c)| / (delta |S|)
    std::vector<int> witness;      // a minimizing S
};

// Exact expansion profile by enumeration over all nonempty S with |S| <= alpha*n.
inline ExpansionProfile expansion_profile_exact(const Graph& g, double alpha, int exact_cap = 24) {
    if (g.n > exact_cap) throw cap_exceeded("expansion_profile_exact: n exceeds exact cap");
    int smax = (int)(alpha * g.n + 1e-9);
    if (smax < 1) throw std::invalid_argument("expansion_profile_exact: no admissible S (alpha too small)");
    std::vector<std::uint32_t> adj_mask(g.n, 0);
    for (auto [u, v] : g.edges) {
        adj_mask[u] |= 1u << v;
        adj_mask[v] |= 1u << u;
    }
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 0;
    for (std::uint32_t s = 1; s < (1u << g.n); ++s) {
        int sz = __builtin_popcount(s);
        if (sz > smax) continue;
        int boundary = 0;
        for (std::uint32_t rest = s; rest;) {
            int v = __builtin_ctz(rest);
            rest &= rest - 1;
            boundary += g.degree(v) - __builtin_popcount(adj_mask[v] & s);
        }
        double ratio = (double)boundary / ((double)g.delta * sz);
        if (ratio < best) {
            best = ratio;
            best_mask = s;
        }
    }
    ExpansionProfile out;
    out.value = best;
    for (int v = 0; v < g.n; ++v)
        if (best_mask >> v & 1) out.witness.push_back(v);
    return out;
}

enum class ClassVerdict { PASS, FAIL, UNKNOWN };

inline const char* to_string(ClassVerdict v) {
    switch (v) {
        case ClassVerdict::PASS: return "PASS";
        case ClassVerdict::FAIL: return "FAIL";
        default: return "UNKNOWN";
    }
}

struct ClassThresholds {
    double t_half = 1.0 / 10.0;  // required phi(1/2)
    double t_small = 5.0 / 9.0;  // required phi(delta)
};

struct ClassCheckReport {
    ClassVerdict verdict = ClassVerdict::UNKNOWN;
    bool exact = false;          // certified by full profile enumeration
    double phi_half = -1.0;      // exact value when exact, else best witnessed upper bound
    double phi_small = -1.0;
    double lambda2 = 0.0;        // second adjacency eigenvalue (when computed)
    double cheeger_bound = -1.0; // (delta - lambda2) / (2 delta)
    int small_cap = 0;           // |S| cap actually enumerated on the non-exact path
    bool small_enum_complete = false;
    std::string note;
};

// Second largest adjacency eigenvalue via a dense symmetric eigensolve.
inline double adjacency_lambda2(const Graph& g) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
    for (auto [u, v] : g.edges) a(u, v) = a(v, u) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(g.n - 2);
}

namespace detail {

// Minimum boundary ratio over connected S with |S| <= s_cap. The minimum of
// |E(S,S^c)|/|S| over sets of bounded size is attained on a connected set
// (mediant inequality on the parts), so this equals the unrestricted minimum.
inline bool min_ratio_small_sets(const Graph& g, int s_cap, double& out_ratio,
                                 std::int64_t budget = 20000000) {
    double best = std::numeric_limits<double>::infinity();
    std::int64_t visited = 0;
    std::vector<int> set_stack;
    std::vector<char> in_set(g.n, 0), banned(g.n, 0);
    int boundary = 0;
    bool complete = true;
    // Connected-set enumeration rooted at the minimum vertex: candidates are
    // neighbors of the current set with index > root, in-order banning avoids
    // duplicates.
    std::function<void(int, std::vector<int>)> grow = [&](int root, std::vector<int> cand) {
        if (++visited > budget) {
            complete = false;
            return;
        }
        double ratio = (double)boundary / ((double)g.delta * set_stack.size());
        best = std::min(best, ratio);
        if ((int)set_stack.size() == s_cap || !complete) return;
        std::vector<int> local_ban;
        for (size_t i = 0; i < cand.size() && complete; ++i) {
            int v = cand[i];
            std::vector<int> next_cand;
            next_cand.reserve(cand.size() + g.degree(v));
            for (size_t j = i + 1; j < cand.size(); ++j) next_cand.push_back(cand[j]);
            in_set[v] = 1;
            set_stack.push_back(v);
            int gain = g.degree(v);
            for (auto [w, id] : g.adj[v]) {
                (void)id;
                if (in_set[w]) gain -= 2;
                else if (w > root && !banned[w] &&
                         std::find(next_cand.begin(), next_cand.end(), w) == next_cand.end() &&
                         std::find(cand.begin(), cand.begin() + i, w) == cand.begin() + i)
                    next_cand.push_back(w);
            }
            boundary += gain;
            grow(root, next_cand);
            boundary -= gain;
            set_stack.pop_back();
            in_set[v] = 0;
            banned[v] = 1;
            local_ban.push_back(v);
        }
        for (int v : local_ban) banned[v] = 0;
    };
    for (int root = 0; root < g.n && complete; ++root) {
        in_set[root] = 1;
        set_stack.push_back(root);
        boundary = g.degree(root);
        grow(root, [&] {
            std::vector<int> c;
            for (auto [w, id] : g.adj[root]) {
                (void)id;
                if (w > root) c.push_back(w);
            }
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
            return c;
        }());
        set_stack.pop_back();
        in_set[root] = 0;
    }
    out_ratio = best;
    return complete;
}

}  // namespace detail

// Membership check for the expander class: PASS only with a certificate,
// FAIL only with a witness, UNKNOWN otherwise.
inline ClassCheckReport class_check(const Graph& g, double delta_small,
                                    ClassThresholds th = {}, int exact_cap = 24) {
    ClassCheckReport r;
    if (g.n <= exact_cap) {
        auto ph = expansion_profile_exact(g, 0.5, exact_cap);
        r.exact = true;
        r.phi_half = ph.value;
        bool small_ok = true;
        if ((int)(delta_small * g.n + 1e-9) >= 1) {
            auto ps = expansion_profile_exact(g, delta_small, exact_cap);
            r.phi_small = ps.value;
            small_ok = ps.value >= th.t_small;
        } else {
            r.phi_small = std::numeric_limits<double>::infinity();  // vacuous
        }
        r.verdict = (ph.value >= th.t_half && small_ok) ? ClassVerdict::PASS : ClassVerdict::FAIL;
        return r;
    }
    int small_admissible = (int)(delta_small * g.n + 1e-9);
    r.small_cap = std::min(8, small_admissible);
    double small_ratio = std::numeric_limits<double>::infinity();
    if (r.small_cap >= 1)
        r.small_enum_complete = detail::min_ratio_small_sets(g, r.small_cap, small_ratio);
    r.phi_small = small_ratio;
    r.phi_half = small_ratio;  // any small set also bounds phi(1/2) from above
    if (small_ratio < th.t_small && r.small_cap >= 1) {
        // witnessed violation of the delta condition
        r.verdict = ClassVerdict::FAIL;
        if (small_ratio < th.t_half) r.note = "violates both thresholds";
        return r;
    }
    if (small_ratio < th.t_half) {
        r.verdict = ClassVerdict::FAIL;
        return r;
    }
    if (g.n <= 2048) {
        r.lambda2 = adjacency_lambda2(g);
        r.cheeger_bound = (g.delta - r.lambda2) / (2.0 * g.delta);
    } else {
        r.note = "graph too large for dense eigensolve";
        r.verdict = ClassVerdict::UNKNOWN;
        return r;
    }
    bool half_certified = r.cheeger_bound >= th.t_half;
    bool small_certified =
        (r.small_enum_complete && r.small_cap == small_admissible) || r.cheeger_bound >= th.t_small;
    r.verdict = (half_certified && small_certified) ? ClassVerdict::PASS : ClassVerdict::UNKNOWN;
    return r;
}

// Exact counts of simple cycles by length, 3..k_max. DFS from each root over
// paths whose interior vertices exceed the root; direction fixed by
// path[1] < path.back().
inline std::vector<std::int64_t> count_cycles(const Graph& g, int k_max) {
    if (k_max > 12) throw cap_exceeded("count_cycles: k_max > 12");
    std::vector<std::int64_t> x(std::max(0, k_max + 1), 0);
    if (k_max < 3) return x;
    std::vector<char> on_path(g.n, 0);
    std::vector<int> path;
    std::function<void(int, int)> dfs = [&](int root, int v) {
        for (auto [w, id] : g.adj[v]) {
            (void)id;
            if (w == root) {
                if ((int)path.size() >= 3 && path[1] < path.back()) x[(int)path.size()]++;
                continue;
            }
            if (w < root || on_path[w] || (int)path.size() >= k_max) continue;
            on_path[w] = 1;
            path.push_back(w);
            dfs(root, w);
            path.pop_back();
            on_path[w] = 0;
        }
    };
    for (int root = 0; root < g.n; ++root) {
        on_path[root] = 1;
        path.assign(1, root);
        dfs(root, root);
        on_path[root] = 0;
    }
    return x;
}

struct Ball {
    Graph subgraph;
    std::vector<int> vertices;  // subgraph vertex i is original vertices[i]
    bool is_tree = true;
    std::vector<std::vector<int>> cycles;  // cycles within the ball, original vertex ids
};

inline Ball ball(const Graph& g, int center, int radius) {
    std::vector<int> dist(g.n, -1);
    std::queue<int> q;
    dist[center] = 0;
    q.push(center);
    std::vector<int> verts = {center};
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (dist[v] == radius) continue;
        for (auto [w, id] : g.adj[v]) {
            (void)id;
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                verts.push_back(w);
                q.push(w);
            }
        }
    }
    std::vector<int> index(g.n, -1);
    for (size_t i = 0; i < verts.size(); ++i) index[verts[i]] = (int)i;
    std::vector<std::pair<int, int>> sub_edges;
    for (auto [u, v] : g.edges)
        if (index[u] >= 0 && index[v] >= 0) sub_edges.emplace_back(index[u], index[v]);
    Ball b;
    b.vertices = verts;
    b.subgraph = graph_from_edges((int)verts.size(), g.delta, sub_edges, /*regular=*/false);
    b.is_tree = sub_edges.size() + 1 == verts.size();
    if (!b.is_tree) {
        int cap = std::min<int>(12, (int)verts.size());
        // recover explicit cycles up to the cap for diagnostics
        std::vector<char> on_path(b.subgraph.n, 0);
        std::vector<int> path;
        std::function<void(int, int)> dfs = [&](int root, int v) {
            for (auto [w, id] : b.subgraph.adj[v]) {
                (void)id;
                if (w == root) {
                    if ((int)path.size() >= 3 && path[1] < path.back()) {
                        std::vector<int> cyc;
                        for (int p : path) cyc.push_back(verts[p]);
                        b.cycles.push_back(cyc);
                    }
                    continue;
                }
                if (w < root || on_path[w] || (int)path.size() >= cap) continue;
                on_path[w] = 1;
                path.push_back(w);
                dfs(root, w);
                path.pop_back();
                on_path[w] = 0;
            }
        };
        for (int root = 0; root < b.subgraph.n; ++root) {
            on_path[root] = 1;
            path.assign(1, root);
            dfs(root, root);
            on_path[root] = 0;
        }
    }
    return b;
}

}  // namespace rcm
