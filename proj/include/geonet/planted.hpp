// planted.hpp - lattice realizations of network graphs.
//
// The graph is drawn in layers (vertex layer = twice its longest-path depth
// from the source, so every edge passes at least one dummy node), a
// crossing-free ordering of every layer is found by search, and each layer
// gap is routed in the rotated coordinates tau = x + t, sigma = x - t.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lpp.hpp"
#include "netgraph.hpp"

namespace geonet::lpp {

namespace detail {

struct LayerItem {
    int vertex = -1;  // real vertex, or -1 for a dummy
    int edge = -1;    // edge index for dummies
    int layer = 0;
};

struct Layout {
    std::vector<std::vector<int>> layers;  // item ids per layer, left to right
    std::vector<LayerItem> items;
    std::vector<std::vector<int>> edge_chain;  // item ids along each edge
};

inline Layout layered_layout(const NetworkGraph& g) {
    auto order = g.topo_order();
    if (static_cast<int>(order.size()) != g.num_vertices()) throw std::invalid_argument("plant: graph has a cycle");
    std::vector<int> depth(g.num_vertices(), 0);
    for (int v : order)
        for (auto [a, b] : g.edges())
            if (a == v) depth[b] = std::max(depth[b], depth[a] + 1);
    Layout lay;
    const int top = 2 * depth[g.sink()];
    lay.layers.assign(top + 1, {});
    std::vector<int> vitem(g.num_vertices(), -1);
    for (int v = 0; v < g.num_vertices(); ++v) {
        vitem[v] = static_cast<int>(lay.items.size());
        lay.items.push_back({v, -1, 2 * depth[v]});
        lay.layers[2 * depth[v]].push_back(vitem[v]);
    }
    const auto& es = g.edges();
    lay.edge_chain.resize(es.size());
    for (std::size_t e = 0; e < es.size(); ++e) {
        auto [a, b] = es[e];
        lay.edge_chain[e].push_back(vitem[a]);
        for (int L = 2 * depth[a] + 1; L < 2 * depth[b]; ++L) {
            int id = static_cast<int>(lay.items.size());
            lay.items.push_back({-1, static_cast<int>(e), L});
            lay.layers[L].push_back(id);
            lay.edge_chain[e].push_back(id);
        }
        lay.edge_chain[e].push_back(vitem[b]);
    }
    // segments between consecutive layers
    std::vector<std::vector<std::pair<int, int>>> seg(top);
    for (auto& chain : lay.edge_chain)
        for (std::size_t i = 1; i < chain.size(); ++i) seg[lay.items[chain[i - 1]].layer].emplace_back(chain[i - 1], chain[i]);

    std::vector<int> pos(lay.items.size(), 0);
    std::function<bool(int)> place = [&](int L) -> bool {
        if (L > top) return true;
        auto& cur = lay.layers[L];
        std::sort(cur.begin(), cur.end());
        do {
            for (std::size_t i = 0; i < cur.size(); ++i) pos[cur[i]] = static_cast<int>(i);
            bool ok = true;
            auto& s = seg[L - 1];
            for (std::size_t i = 0; i < s.size() && ok; ++i)
                for (std::size_t j = i + 1; j < s.size() && ok; ++j)
                    if ((pos[s[i].first] - pos[s[j].first]) * (pos[s[i].second] - pos[s[j].second]) < 0) ok = false;
            if (ok && place(L + 1)) return true;
        } while (std::next_permutation(cur.begin(), cur.end()));
        return false;
    };
    if (!place(1)) throw std::invalid_argument("plant: no crossing-free layered drawing with the source and sink outside");
    return lay;
}

struct RotSite {
    int tau;
    int sigma;
};

}  // namespace detail

struct PlantedNetwork {
    GeodesicSet geodesics;
    int width = 0;
    int height = 0;
    std::vector<LatticePath> edge_paths;  // one lattice path per edge of the graph
};

// Lattice paths, one per source-to-sink route of g, whose union realizes g.
// Out-branches leave a vertex by U (left), D (middle), R (right); in-branches
// arrive by R (left), D (middle), U (right).
inline PlantedNetwork plant_network(const NetworkGraph& g) {
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.out_degree(v) > 3 || g.in_degree(v) > 3) throw std::invalid_argument("plant: a vertex has more than 3 in- or out-edges");
    auto lay = detail::layered_layout(g);
    const int S = 3;  // half the sigma spacing between neighbouring items
    std::size_t widest = 1;
    for (auto& l : lay.layers) widest = std::max(widest, l.size());
    int H = 2 * S * static_cast<int>(widest) + 8;
    if (H % 2) ++H;

    std::vector<int> pos(lay.items.size());
    for (auto& l : lay.layers)
        for (std::size_t i = 0; i < l.size(); ++i) pos[l[i]] = static_cast<int>(i);
    auto place = [&](int item) { return detail::RotSite{lay.items[item].layer * H, 2 * S * pos[item]}; };

    // slot of each segment at its tail and head
    std::map<int, std::vector<int>> outs, ins;  // item -> partner items
    for (auto& chain : lay.edge_chain)
        for (std::size_t i = 1; i < chain.size(); ++i) {
            outs[chain[i - 1]].push_back(chain[i]);
            ins[chain[i]].push_back(chain[i - 1]);
        }
    auto slot = [&](const std::vector<int>& partners, int partner) {
        std::vector<int> sorted = partners;
        std::sort(sorted.begin(), sorted.end(), [&](int a, int b) { return pos[a] < pos[b]; });
        int rank = static_cast<int>(std::find(sorted.begin(), sorted.end(), partner) - sorted.begin());
        int d = static_cast<int>(sorted.size());
        // -1 = left branch, 0 = middle, +1 = right
        if (d == 1) return 0;
        if (d == 2) return rank == 0 ? -1 : 1;
        return rank - 1;
    };

    std::vector<std::vector<detail::RotSite>> edge_rot(lay.edge_chain.size());
    for (std::size_t e = 0; e < lay.edge_chain.size(); ++e) {
        auto& chain = lay.edge_chain[e];
        auto& path = edge_rot[e];
        path.push_back(place(chain[0]));
        for (std::size_t i = 1; i < chain.size(); ++i) {
            int A = chain[i - 1], B = chain[i];
            auto a = place(A), b = place(B);
            int so = slot(outs[A], B);
            int si = slot(ins[B], A);
            // fan-out: U branch to sigma - 2, D to sigma, R to sigma + 2
            if (so == 0) path.push_back({a.tau + 2, a.sigma});
            else { path.push_back({a.tau + 1, a.sigma + so}); path.push_back({a.tau + 2, a.sigma + 2 * so}); }
            // fan-in: R branch from sigma - 2, D from sigma, U from sigma + 2
            detail::RotSite end_mid{b.tau - 2, b.sigma + 2 * si};
            auto cur = path.back();
            int ds = end_mid.sigma - cur.sigma;
            int room = end_mid.tau - cur.tau - std::abs(ds);
            if (room < 0 || room % 2) throw std::logic_error("plant: layer gap too small");
            int step = ds > 0 ? 1 : -1;
            for (int j = 0; j < std::abs(ds); ++j) { cur = {cur.tau + 1, cur.sigma + step}; path.push_back(cur); }
            for (int j = 0; j < room / 2; ++j) { cur = {cur.tau + 2, cur.sigma}; path.push_back(cur); }
            if (si != 0) path.push_back({b.tau - 1, b.sigma + si});
            path.push_back(b);
        }
    }

    int min_x = 1 << 30, min_t = 1 << 30, max_x = -(1 << 30), max_t = -(1 << 30);
    for (auto& p : edge_rot)
        for (auto r : p) {
            int x = (r.tau + r.sigma) / 2, t = (r.tau - r.sigma) / 2;
            min_x = std::min(min_x, x); min_t = std::min(min_t, t);
            max_x = std::max(max_x, x); max_t = std::max(max_t, t);
        }
    PlantedNetwork out;
    out.width = max_x - min_x + 1;
    out.height = max_t - min_t + 1;
    for (auto& p : edge_rot) {
        std::vector<Site> sites;
        for (auto r : p) sites.push_back({(r.tau + r.sigma) / 2 - min_x, (r.tau - r.sigma) / 2 - min_t});
        out.edge_paths.emplace_back(sites);
    }

    // every source-to-sink route, parallel edges distinct
    std::vector<LatticePath> routes;
    std::vector<Site> acc;
    std::function<void(int)> walk = [&](int v) {
        if (v == g.sink()) { routes.emplace_back(acc); return; }
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            if (g.edges()[e].first != v) continue;
            auto& s = out.edge_paths[e].sites();
            std::size_t keep = acc.size();
            acc.insert(acc.end(), s.begin() + (acc.empty() ? 0 : 1), s.end());
            walk(g.edges()[e].second);
            acc.resize(keep);
        }
    };
    walk(g.source());
    out.geodesics = planted_geodesic_set(std::move(routes));
    return out;
}

}  // namespace geonet::lpp
