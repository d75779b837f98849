#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "rcm/graph.hpp"
#include "rcm/util.hpp"

namespace rcm {

inline double default_eta(double delta_small) { return std::min(0.01, delta_small / 5.0); }

// Joint counts over all 2^|E| edge subsets: hist[c][a] = #{A : c(A)=c, |A|=a}.
// This is the expensive pass; every (q, beta, eta) evaluation reads it.
struct ComponentEdgeHistogram {
    int n = 0;
    int m = 0;
    std::vector<std::int64_t> counts;  // (n+1) x (m+1), row-major by c

    std::int64_t& at(int c, int a) { return counts[(std::size_t)c * (m + 1) + a]; }
    std::int64_t at(int c, int a) const { return counts[(std::size_t)c * (m + 1) + a]; }
};

inline ComponentEdgeHistogram component_edge_histogram(const Graph& g, int threads = 1) {
    if (g.m() > 30) throw cap_exceeded("z_rc_exact: |E| > 30");
    ComponentEdgeHistogram h;
    h.n = g.n;
    h.m = g.m();
    h.counts.assign((std::size_t)(g.n + 1) * (g.m() + 1), 0);
    const std::uint64_t total = 1ULL << g.m();
    threads = std::max(1, threads);
    auto run = [&](std::uint64_t lo, std::uint64_t hi, ComponentEdgeHistogram& out) {
        std::vector<int> parent(g.n);
        for (std::uint64_t mask = lo; mask < hi; ++mask) {
            for (int v = 0; v < g.n; ++v) parent[v] = v;
            int merges = 0;
            std::uint64_t rest = mask;
            while (rest) {
                int e = __builtin_ctzll(rest);
                rest &= rest - 1;
                int ru = g.edges[e].first, rv = g.edges[e].second;
                while (parent[ru] != ru) ru = parent[ru] = parent[parent[ru]];
                while (parent[rv] != rv) rv = parent[rv] = parent[parent[rv]];
                if (ru != rv) {
                    parent[ru] = rv;
                    ++merges;
                }
            }
            out.at(g.n - merges, __builtin_popcountll(mask))++;
        }
    };
    if (threads == 1) {
        run(0, total, h);
    } else {
        std::vector<ComponentEdgeHistogram> parts(threads);
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            parts[t] = h;
            std::uint64_t lo = total / threads * t;
            std::uint64_t hi = t + 1 == threads ? total : total / threads * (t + 1);
            pool.emplace_back(run, lo, hi, std::ref(parts[t]));
        }
        for (auto& th : pool) th.join();
        for (auto& p : parts)
            for (std::size_t i = 0; i < h.counts.size(); ++i) h.counts[i] += p.counts[i];
    }
    return h;
}

struct ExactResult {
    double log_z = neg_inf();
    double log_z_dis = neg_inf();
    double log_z_ord = neg_inf();
    double log_z_err = neg_inf();
    double eta = 0.0;
};

// Evaluate log Z and its phase split from a precomputed histogram.
inline ExactResult z_rc_from_histogram(const ComponentEdgeHistogram& h, double q, double beta,
                                       double eta) {
    if (q <= 0 || beta < 0) throw std::invalid_argument("z_rc_exact: need q > 0, beta >= 0");
    const double x = std::expm1(beta);
    const double lq = std::log(q);
    const double lx = x > 0 ? std::log(x) : neg_inf();
    logsum_acc dis, ord, err;
    const double dis_cut = eta * h.m + 1e-12;
    const double ord_cut = (1.0 - eta) * h.m - 1e-12;
    for (int c = 1; c <= h.n; ++c) {
        for (int a = 0; a <= h.m; ++a) {
            std::int64_t cnt = h.at(c, a);
            if (!cnt) continue;
            if (a > 0 && x <= 0) continue;  // (e^beta - 1)^a = 0
            double lt = std::log((double)cnt) + c * lq + (a > 0 ? a * lx : 0.0);
            if (a <= dis_cut) dis.add(lt);
            else if (a >= ord_cut) ord.add(lt);
            else err.add(lt);
        }
    }
    ExactResult r;
    r.eta = eta;
    r.log_z_dis = dis.value();
    r.log_z_ord = ord.value();
    r.log_z_err = err.value();
    r.log_z = logsumexp3(r.log_z_dis, r.log_z_ord, r.log_z_err);
    return r;
}

inline ExactResult z_rc_exact(const Graph& g, double q, double beta, double eta, int threads = 1) {
    return z_rc_from_histogram(component_edge_histogram(g, threads), q, beta, eta);
}

// Exact Potts log partition function by enumerating colorings. The color of
// vertex 0 is pinned and the q-fold symmetry restored at the end.
inline double z_potts_exact(const Graph& g, int q, double beta) {
    if (q < 1) throw std::invalid_argument("z_potts_exact: q must be a positive integer");
    double states = std::pow((double)q, g.n);
    if (states > 1e8) throw cap_exceeded("z_potts_exact: q^n > 1e8");
    if (g.n == 0) return 0.0;
    // adjacency to lower-numbered vertices only
    std::vector<std::vector<int>> lower(g.n);
    for (auto [u, v] : g.edges) lower[std::max(u, v)].push_back(std::min(u, v));
    std::vector<std::int64_t> mono_hist(g.m() + 1, 0);
    std::vector<int> color(g.n, 0);
    std::function<void(int, int)> rec = [&](int v, int mono) {
        if (v == g.n) {
            mono_hist[mono]++;
            return;
        }
        for (int ccol = 0; ccol < q; ++ccol) {
            color[v] = ccol;
            int add = 0;
            for (int w : lower[v]) add += color[w] == ccol;
            rec(v + 1, mono + add);
            if (v == 0) break;  // pinned
        }
    };
    rec(0, 0);
    logsum_acc acc;
    for (int k = 0; k <= g.m(); ++k)
        if (mono_hist[k]) acc.add(std::log((double)mono_hist[k]) + beta * k);
    return std::log((double)q) + acc.value();
}

// Full probability table over edge subsets, indexed by bitmask.
inline std::vector<double> rc_distribution(const Graph& g, double q, double beta) {
    if (g.m() > 22) throw cap_exceeded("rc_distribution: |E| > 22");
    const double x = std::expm1(beta);
    const double lq = std::log(q);
    const double lx = x > 0 ? std::log(x) : neg_inf();
    const std::uint32_t total = 1u << g.m();
    std::vector<double> logw(total);
    logsum_acc z;
    std::vector<int> parent(g.n);
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        for (int v = 0; v < g.n; ++v) parent[v] = v;
        int merges = 0;
        std::uint32_t rest = mask;
        while (rest) {
            int e = __builtin_ctz(rest);
            rest &= rest - 1;
            int ru = g.edges[e].first, rv = g.edges[e].second;
            while (parent[ru] != ru) ru = parent[ru] = parent[parent[ru]];
            while (parent[rv] != rv) rv = parent[rv] = parent[parent[rv]];
            if (ru != rv) {
                parent[ru] = rv;
                ++merges;
            }
        }
        int a = __builtin_popcount(mask);
        double lt = (a > 0 && x <= 0) ? neg_inf() : (g.n - merges) * lq + (a > 0 ? a * lx : 0.0);
        logw[mask] = lt;
        z.add(lt);
    }
    double lz = z.value();
    std::vector<double> p(total);
    for (std::uint32_t mask = 0; mask < total; ++mask)
        p[mask] = logw[mask] == neg_inf() ? 0.0 : std::exp(logw[mask] - lz);
    return p;
}

// Edwards-Sokal coupling step: one uniform color per component of (V, a).
inline std::vector<int> edwards_sokal_color(const Graph& g, const EdgeConfig& a, int q,
                                            std::mt19937_64& rng) {
    auto comp = components(g, a);
    std::vector<int> comp_color(comp.count);
    for (int& c : comp_color) c = (int)(rng() % (std::uint64_t)q);
    std::vector<int> sigma(g.n);
    for (int v = 0; v < g.n; ++v) sigma[v] = comp_color[comp.label[v]];
    return sigma;
}

}  // namespace rcm
