#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "rcm/polymer.hpp"
#include "rcm/util.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Ursell function phi(H) = (1/|V|!) sum over spanning connected A of (-1)^|A|.
// The signed sum is computed exactly in integers by Moebius inversion over
// vertex subsets: with P(U) = [U has no internal edge] = sum over all subsets
// of (-1)^|A|, fixing v in U gives P(U) = sum_{v in W subseteq U} C(W) P(U\W).
// ---------------------------------------------------------------------------

inline std::int64_t ursell_signed_sum(const std::vector<std::uint32_t>& adj) {
    int t = (int)adj.size();
    if (t > 10) throw cap_exceeded("ursell: more than 10 vertices");
    if (t == 0) return 0;
    std::uint32_t full = (t == 32) ? ~0u : ((1u << t) - 1);
    std::vector<char> edgeless(full + 1, 0);
    for (std::uint32_t u = 0; u <= full; ++u) {
        bool ok = true;
        for (std::uint32_t rest = u; rest && ok;) {
            int v = __builtin_ctz(rest);
            rest &= rest - 1;
            if (adj[v] & u) ok = false;
        }
        edgeless[u] = ok;
    }
    std::vector<std::int64_t> c(full + 1, 0);
    for (std::uint32_t u = 1; u <= full; ++u) {
        int v = __builtin_ctz(u);
        if (u == (1u << v)) {
            c[u] = 1;
            continue;
        }
        std::int64_t acc = edgeless[u];
        // proper submasks of u containing v
        std::uint32_t rest_mask = u & ~(1u << v);
        for (std::uint32_t w = rest_mask; w; w = (w - 1) & rest_mask) {
            std::uint32_t sub = u & ~w;  // = (1<<v) | (rest_mask \ w), proper since w nonempty
            if (edgeless[w]) acc -= c[sub];
        }
        c[u] = acc;
    }
    return c[full];
}

inline double ursell(const std::vector<std::uint32_t>& adj) {
    int t = (int)adj.size();
    double fact = 1.0;
    for (int i = 2; i <= t; ++i) fact *= i;
    return (double)ursell_signed_sum(adj) / fact;
}

inline double tail_bound(double n, double q, int delta, int m) {
    return n * std::pow(q, -(double)m / (200.0 * delta));
}

// ---------------------------------------------------------------------------
// Clusters as multiset representatives of the ordered-tuple expansion. For a
// multiset with multiplicities m_i and t = sum m_i, the ordered tuples sum to
// (t!/prod m_i!) * phi(H) * prod w^{m_i}; with phi = S(H)/t! the (q,beta)-free
// scalar is S(H)/prod m_i!.
// ---------------------------------------------------------------------------

struct Cluster {
    std::vector<int> polymer_ids;     // distinct ids, ascending
    std::vector<int> multiplicities;  // parallel to polymer_ids
    int size = 0;                     // ||Gamma|| = sum mult * |E(gamma)|
    double ursell = 0.0;              // phi(H_Gamma)
    double coeff = 0.0;               // (t!/prod m!) * phi = S(H)/prod m!

    int tuple_length() const {
        int t = 0;
        for (int m : multiplicities) t += m;
        return t;
    }
};

namespace detail {

inline double cluster_coeff(const std::vector<const Polymer*>& support,
                            const std::vector<int>& mult, double* phi_out) {
    int k = (int)support.size();
    int t = 0;
    for (int m : mult) t += m;
    // adjacency of the tuple-expanded incompatibility graph
    std::vector<std::uint32_t> adj(t, 0);
    std::vector<int> owner(t);
    {
        int pos = 0;
        for (int i = 0; i < k; ++i)
            for (int r = 0; r < mult[i]; ++r) owner[pos++] = i;
    }
    for (int a = 0; a < t; ++a)
        for (int b = a + 1; b < t; ++b) {
            bool inc = owner[a] == owner[b] || !compatible(*support[owner[a]], *support[owner[b]]);
            if (inc) {
                adj[a] |= 1u << b;
                adj[b] |= 1u << a;
            }
        }
    std::int64_t s = ursell_signed_sum(adj);
    double tfact = 1.0, mfact = 1.0;
    for (int i = 2; i <= t; ++i) tfact *= i;
    for (int m : mult)
        for (int i = 2; i <= m; ++i) mfact *= i;
    if (phi_out) *phi_out = (double)s / tfact;
    return (double)s / mfact;
}

}  // namespace detail

// All clusters with ||Gamma|| < m over an explicit arena. Enumerates
// connected subsets of the incompatibility graph (supports), then
// multiplicity vectors. Intended for small arenas; graph-scale sums use
// build_cluster_series below.
inline std::vector<Cluster> enumerate_clusters(const PolymerArena& arena, int m,
                                               std::int64_t budget = 10000000) {
    int n = arena.size();
    std::vector<int> size(n);
    for (int i = 0; i < n; ++i) size[i] = arena[i].edge_count();
    // incompatibility adjacency between distinct polymers
    std::vector<std::vector<int>> inc(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!compatible(arena[i], arena[j])) {
                inc[i].push_back(j);
                inc[j].push_back(i);
            }
    std::vector<Cluster> out;
    std::int64_t produced = 0;

    std::vector<int> support;
    int support_size = 0;
    std::vector<char> in_sup(n, 0), banned(n, 0);

    std::function<void()> emit_multiplicities = [&]() {
        int k = (int)support.size();
        std::vector<const Polymer*> sup(k);
        for (int i = 0; i < k; ++i) sup[i] = &arena[support[i]];
        std::vector<int> mult(k, 1);
        std::function<void(int, int)> rec = [&](int pos, int used) {
            if (pos == k) {
                if (++produced > budget) throw budget_exceeded("enumerate_clusters: budget exceeded");
                Cluster c;
                c.polymer_ids = support;
                c.multiplicities = mult;
                c.size = used;
                c.coeff = detail::cluster_coeff(sup, mult, &c.ursell);
                if (c.coeff != 0.0) out.push_back(std::move(c));
                return;
            }
            for (int extra = 0;; ++extra) {
                mult[pos] = 1 + extra;
                int total = used + extra * size[support[pos]];
                if (total >= m) break;
                int tuple_len = 0;
                for (int i = 0; i <= pos; ++i) tuple_len += mult[i];
                tuple_len += k - pos - 1;
                if (tuple_len > 10) throw cap_exceeded("cluster tuple exceeds ursell vertex cap");
                rec(pos + 1, total);
            }
            mult[pos] = 1;
        };
        rec(0, support_size);
    };

    std::function<void(int, std::vector<int>)> grow = [&](int root, std::vector<int> cand) {
        emit_multiplicities();
        std::vector<int> local_ban;
        for (size_t i = 0; i < cand.size(); ++i) {
            int p = cand[i];
            if (support_size + size[p] >= m) {
                banned[p] = 1;
                local_ban.push_back(p);
                continue;
            }
            std::vector<int> next;
            for (size_t j = i + 1; j < cand.size(); ++j) next.push_back(cand[j]);
            in_sup[p] = 1;
            banned[p] = 1;
            support.push_back(p);
            support_size += size[p];
            for (int q2 : inc[p])
                if (q2 > root && !in_sup[q2] && !banned[q2] &&
                    std::find(next.begin(), next.end(), q2) == next.end())
                    next.push_back(q2);
            grow(root, next);
            support_size -= size[p];
            support.pop_back();
            in_sup[p] = 0;
            local_ban.push_back(p);
        }
        for (int p : local_ban) banned[p] = 0;
    };

    for (int root = 0; root < n; ++root) {
        if (size[root] >= m) continue;
        in_sup[root] = 1;
        support.assign(1, root);
        support_size = size[root];
        std::vector<int> cand;
        for (int q2 : inc[root])
            if (q2 > root) cand.push_back(q2);
        std::sort(cand.begin(), cand.end());
        grow(root, cand);
        in_sup[root] = 0;
    }
    return out;
}

// Exact polymer-model partition function by enumerating pairwise-compatible
// subsets of the arena. log-space result.
inline double xi_brute_log(const PolymerArena& arena, const std::vector<double>& log_w) {
    int n = arena.size();
    if (n > 25) throw cap_exceeded("xi_brute: more than 25 polymers");
    std::vector<std::uint32_t> comp(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && compatible(arena[i], arena[j])) comp[i] |= 1u << j;
    logsum_acc acc;
    acc.add(0.0);  // empty collection
    std::function<void(int, std::uint32_t, double)> rec = [&](int next, std::uint32_t allowed,
                                                              double lw) {
        for (int i = next; i < n; ++i) {
            if (!(allowed >> i & 1)) continue;
            double lw2 = lw + log_w[i];
            if (lw2 != neg_inf()) acc.add(lw2);
            rec(i + 1, allowed & comp[i], lw2);
        }
    };
    rec(0, n >= 32 ? ~0u : ((1u << n) - 1), 0.0);
    return acc.value();
}

inline std::vector<double> arena_log_weights(const PolymerArena& arena, double q, double beta) {
    std::vector<double> lw(arena.size());
    for (int i = 0; i < arena.size(); ++i) lw[i] = polymer_log_weight(arena[i], q, beta);
    return lw;
}

struct TruncatedSeries {
    Model model = Model::dis;
    int m = 0;
    double value = 0.0;
    double tail = 0.0;  // n * q^{-m/(200 delta)}
};

// T_m over an explicit arena (small-scale path; compensated summation).
inline TruncatedSeries truncated_log_xi(const PolymerArena& arena, double q, double beta, int m,
                                        double n, int delta, std::int64_t budget = 10000000) {
    auto clusters = enumerate_clusters(arena, m, budget);
    auto lw = arena_log_weights(arena, q, beta);
    kahan_sum sum;
    for (const auto& c : clusters) {
        double lwc = 0.0;
        for (size_t i = 0; i < c.polymer_ids.size(); ++i)
            lwc += c.multiplicities[i] * lw[c.polymer_ids[i]];
        if (lwc == neg_inf()) continue;
        sum.add(c.coeff * std::exp(lwc));
    }
    TruncatedSeries t;
    t.model = arena.model;
    t.m = m;
    t.value = sum.value();
    t.tail = tail_bound(n, q, delta, m);
    return t;
}

// ---------------------------------------------------------------------------
// Coefficient-table form of T_m for a graph-bound polymer model. Cluster
// combinatorics are (q,beta)-independent: a dis cluster contributes
// coeff * q^{sum mult(1-|gamma|)} * x^{||Gamma||} and an ord cluster
// coeff * q^{sum mult c'} * x^{-sum mult |E_u|} with x = e^beta - 1. The
// union of a cluster's polymers is a connected edge set, so enumeration runs
// union-first and each cluster is counted at its exact union.
// ---------------------------------------------------------------------------

enum class PinWeight { none, inv_u };

struct ClusterSeries {
    Model model = Model::dis;
    int m = 0;
    double n = 0;  // vertex count of the host graph (for the tail bound)
    int delta = 0;
    std::map<std::pair<int, int>, double> coeff;  // (q-exp, x-exp) -> coefficient
    std::int64_t cluster_count = 0;

    double eval(double q, double beta) const {
        double x = std::expm1(beta);
        double lq = std::log(q);
        double lx = x > 0 ? std::log(x) : neg_inf();
        kahan_sum sum;
        for (const auto& [key, kcoeff] : coeff) {
            auto [a, b] = key;
            if (b != 0 && lx == neg_inf()) {
                if (b > 0) continue;  // x^b = 0
                throw std::invalid_argument("ordered series needs e^beta - 1 > 0");
            }
            sum.add(kcoeff * std::exp(a * lq + b * lx));
        }
        return sum.value();
    }
    TruncatedSeries eval_series(double q, double beta) const {
        TruncatedSeries t;
        t.model = model;
        t.m = m;
        t.value = eval(q, beta);
        t.tail = tail_bound(n, q, delta, m);
        return t;
    }
};

namespace detail {

// Memoized map from a connected edge set to its polymer variants: one dis
// polymer, or every labelling that survives the boundary-closure fixed-point
// test. Each edge set is resolved once no matter how many unions contain it.
struct PolymerLookup {
    Model model = Model::dis;
    PolymerArena* arena = nullptr;
    ClosureWorkspace ws;
    std::map<std::vector<int>, std::vector<int>> memo;

    const std::vector<int>& ids_for(const Graph& g, const std::vector<int>& sorted_edges) {
        auto it = memo.find(sorted_edges);
        if (it != memo.end()) return it->second;
        std::vector<int> ids;
        if (model == Model::dis) {
            ids.push_back(arena->intern(make_dis_polymer(g, sorted_edges)));
        } else {
            int k = (int)sorted_edges.size();
            std::vector<int> e_u;
            for (std::uint32_t lab = 1; lab < (1u << k); ++lab) {
                e_u.clear();
                for (int i = 0; i < k; ++i)
                    if (lab >> i & 1) e_u.push_back(sorted_edges[i]);
                if (boundary_closure(g, e_u, ws) != sorted_edges) continue;
                ids.push_back(arena->intern(make_ord_polymer(g, sorted_edges, e_u)));
            }
        }
        return memo.emplace(sorted_edges, std::move(ids)).first->second;
    }
};

struct UnionPolymer {
    int arena_id = 0;
    std::uint32_t edge_mask = 0;  // within the union's local edge indexing
    int size = 0;
    int a_exp = 0;  // dis: 1-|gamma| ; ord: c'
    int b_exp = 0;  // dis: |E(gamma)| ; ord: -|E_u|
};

// Enumerate clusters whose polymer union is exactly `union_edges`; accumulate
// into the coefficient table.
inline void clusters_within_union(const Graph& g, const std::vector<int>& union_edges,
                                  PolymerLookup& lookup, int m, PinWeight pin,
                                  ClusterSeries& series, std::int64_t budget) {
    const int ue = (int)union_edges.size();
    std::vector<int> sorted_union = union_edges;
    std::sort(sorted_union.begin(), sorted_union.end());
    // local vertex ids spanning the union
    std::vector<int> span;
    for (int e : sorted_union) {
        span.push_back(g.edges[e].first);
        span.push_back(g.edges[e].second);
    }
    std::sort(span.begin(), span.end());
    span.erase(std::unique(span.begin(), span.end()), span.end());
    auto local_vertex = [&](int v) {
        return (int)(std::lower_bound(span.begin(), span.end(), v) - span.begin());
    };
    std::vector<std::pair<int, int>> local_ends(ue);
    for (int i = 0; i < ue; ++i)
        local_ends[i] = {local_vertex(g.edges[sorted_union[i]].first),
                         local_vertex(g.edges[sorted_union[i]].second)};

    // polymers living inside the union: connected edge subsets x label variants
    std::vector<UnionPolymer> polys;
    const PolymerArena& arena = *lookup.arena;
    std::vector<int> sub;
    std::array<int, 32> parent{};
    for (std::uint32_t mask = 1; mask < (1u << ue); ++mask) {
        // connectivity of the subset over its touched vertices
        int touched = 0, merges = 0;
        for (int i = 0; i < (int)span.size(); ++i) parent[i] = -1;
        for (int i = 0; i < ue; ++i) {
            if (!(mask >> i & 1)) continue;
            for (int lv : {local_ends[i].first, local_ends[i].second})
                if (parent[lv] < 0) {
                    parent[lv] = lv;
                    ++touched;
                }
        }
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (int i = 0; i < ue; ++i) {
            if (!(mask >> i & 1)) continue;
            int ru = find(local_ends[i].first), rv = find(local_ends[i].second);
            if (ru != rv) {
                parent[ru] = rv;
                ++merges;
            }
        }
        if (touched - merges != 1) continue;
        sub.clear();
        for (int i = 0; i < ue; ++i)
            if (mask >> i & 1) sub.push_back(sorted_union[i]);
        for (int id : lookup.ids_for(g, sub)) {
            UnionPolymer up;
            up.arena_id = id;
            up.edge_mask = mask;
            up.size = (int)sub.size();
            if (arena.model == Model::dis) {
                up.a_exp = 1 - arena[id].vertex_count();
                up.b_exp = arena[id].edge_count();
            } else {
                up.a_exp = arena[id].cprime;
                up.b_exp = -(int)arena[id].e_u.size();
            }
            polys.push_back(up);
        }
    }
    if (polys.empty()) return;
    const int np = (int)polys.size();
    const std::uint32_t full = (1u << ue) - 1;
    std::vector<std::uint32_t> suffix(np + 1, 0);
    for (int i = np - 1; i >= 0; --i) suffix[i] = suffix[i + 1] | polys[i].edge_mask;

    std::vector<int> chosen;
    std::function<void(int, int, std::uint32_t)> rec = [&](int start, int used,
                                                           std::uint32_t covered) {
        if (covered == full && !chosen.empty()) {
            int k = (int)chosen.size();
            std::vector<const Polymer*> sup(k);
            for (int i = 0; i < k; ++i) sup[i] = &arena[polys[chosen[i]].arena_id];
            // H connectivity follows from the union being connected, checked
            // cheaply anyway since supports are tiny
            bool connected = true;
            if (k > 1) {
                std::vector<std::uint32_t> adjm(k, 0);
                for (int i = 0; i < k; ++i)
                    for (int j = i + 1; j < k; ++j)
                        if (!compatible(*sup[i], *sup[j])) {
                            adjm[i] |= 1u << j;
                            adjm[j] |= 1u << i;
                        }
                std::uint32_t seen = 1;
                std::vector<int> stack = {0};
                while (!stack.empty()) {
                    int v = stack.back();
                    stack.pop_back();
                    std::uint32_t nb = adjm[v] & ~seen;
                    while (nb) {
                        int w = __builtin_ctz(nb);
                        nb &= nb - 1;
                        seen |= 1u << w;
                        stack.push_back(w);
                    }
                }
                connected = seen == ((k == 32) ? ~0u : (1u << k) - 1);
            }
            if (connected) {
                double pin_factor = 1.0;
                if (pin == PinWeight::inv_u) {
                    std::vector<int> verts;
                    for (int i = 0; i < k; ++i)
                        verts.insert(verts.end(), sup[i]->vertices.begin(),
                                     sup[i]->vertices.end());
                    std::sort(verts.begin(), verts.end());
                    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
                    pin_factor = 1.0 / (double)verts.size();
                }
                std::vector<int> mult(k, 1);
                std::function<void(int, int, int)> mrec = [&](int pos, int total, int tuple_len) {
                    if (pos == k) {
                        if (++series.cluster_count > budget)
                            throw budget_exceeded("cluster series budget exceeded");
                        double coeff = detail::cluster_coeff(sup, mult, nullptr) * pin_factor;
                        if (coeff == 0.0) return;
                        int a = 0, b = 0;
                        for (int i = 0; i < k; ++i) {
                            a += mult[i] * polys[chosen[i]].a_exp;
                            b += mult[i] * polys[chosen[i]].b_exp;
                        }
                        series.coeff[{a, b}] += coeff;
                        return;
                    }
                    for (int extra = 0;; ++extra) {
                        mult[pos] = 1 + extra;
                        int tot = total + extra * polys[chosen[pos]].size;
                        if (tot >= m) break;
                        if (tuple_len + 1 + extra + (k - pos - 1) > 10)
                            throw cap_exceeded("cluster tuple exceeds ursell vertex cap");
                        mrec(pos + 1, tot, tuple_len + extra + 1);
                    }
                    mult[pos] = 1;
                };
                mrec(0, used, 0);
            }
        }
        for (int i = start; i < np; ++i) {
            int nu = used + polys[i].size;
            if (nu >= m) continue;
            std::uint32_t ncov = covered | polys[i].edge_mask;
            int missing = __builtin_popcount(full & ~ncov);
            if (missing > 0 && nu + missing >= m) continue;
            if ((full & ~ncov & ~suffix[i + 1]) != 0) continue;
            chosen.push_back(i);
            rec(i + 1, nu, ncov);
            chosen.pop_back();
        }
    };
    rec(0, 0, 0);
}

}  // namespace detail

// Build the truncated-expansion coefficient table for clusters with
// ||Gamma|| < m. anchor < 0: all clusters; anchor >= 0: only clusters whose
// union contains that vertex (root-pinned sums, optionally 1/u-weighted).
inline ClusterSeries build_cluster_series(const Graph& g, Model model, int m, int anchor = -1,
                                          PinWeight pin = PinWeight::none,
                                          PolymerArena* arena_out = nullptr,
                                          std::int64_t budget = 10000000) {
    ClusterSeries series;
    series.model = model;
    series.m = m;
    series.n = g.n;
    series.delta = g.delta;
    PolymerArena local;
    PolymerArena& arena = arena_out ? *arena_out : local;
    arena.model = model;
    detail::PolymerLookup lookup;
    lookup.model = model;
    lookup.arena = &arena;
    auto visit = [&](const std::vector<int>& u) {
        detail::clusters_within_union(g, u, lookup, m, pin, series, budget);
    };
    if (anchor < 0) for_each_connected_edge_set(g, m - 1, visit);
    else for_each_connected_edge_set_at(g, anchor, m - 1, visit);
    return series;
}

// ---------------------------------------------------------------------------
// Kotecky-Preiss audit: per-vertex sums sum_{gamma ni v} e^{(1+r)|E(gamma)|}
// |w(gamma)| over polymers of size <= m, compared against 1/2. A partial
// certificate: sizes above m are not audited.
// ---------------------------------------------------------------------------

struct KpReport {
    bool holds_up_to_m = false;
    double worst_ratio = 0.0;
    int worst_vertex = -1;
    int m = 0;
    double r = 0.0;
};

inline double kp_default_rate(Model model, double q, int delta) {
    return model == Model::dis ? std::log(q) / (4.0 * delta) : std::log(q) / (200.0 * delta);
}

inline KpReport kp_check(const Graph& g, double q, double beta, Model model, double r, int m,
                         int cap_dis = 12, int cap_ord = 10) {
    PolymerArena arena = build_arena(g, model, m, cap_dis, cap_ord);
    std::vector<double> sums(g.n, 0.0);
    for (int i = 0; i < arena.size(); ++i) {
        const Polymer& p = arena[i];
        double lw = polymer_log_weight(p, q, beta);
        if (lw == neg_inf()) continue;
        double term = std::exp((1.0 + r) * p.edge_count() + lw);
        for (int v : p.vertices) sums[v] += term;
    }
    KpReport rep;
    rep.m = m;
    rep.r = r;
    for (int v = 0; v < g.n; ++v)
        if (sums[v] > rep.worst_ratio) {
            rep.worst_ratio = sums[v];
            rep.worst_vertex = v;
        }
    rep.holds_up_to_m = rep.worst_ratio <= 0.5;
    return rep;
}

}  // namespace rcm
