// netgraph.hpp - directed multigraphs with a source and a sink, the five
// admissibility rules, transpose-isomorphism codes and per-graph invariants.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

namespace geonet {

// Exact half-integer stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(long long t) { HalfInt h; h.twice_ = t; return h; }
    static constexpr HalfInt from_int(long long v) { return from_twice(2 * v); }

    constexpr long long twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double to_double() const { return static_cast<double>(twice_) / 2.0; }

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }
    static HalfInt parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return from_int(std::stoll(s));
        if (s.substr(slash + 1) != "2") throw std::invalid_argument("HalfInt: bad denominator in '" + s + "'");
        return from_twice(std::stoll(s.substr(0, slash)));
    }

    friend constexpr auto operator<=>(const HalfInt&, const HalfInt&) = default;
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }

private:
    long long twice_ = 0;
};

struct RuleReport {
    bool rule1_planar_loopfree = false;
    bool rule2_unique_source_sink = false;
    bool rule3_interior_forest = false;
    bool rule4_interior_degree3 = false;
    bool rule5_endpoint_degree_le3 = false;
    bool all = false;
};

using CanonicalCode = std::vector<std::uint8_t>;

struct GraphInvariants {
    int k = 0;
    int l = 0;
    int num_vertices = 0;
    int num_edges = 0;
    int num_faces = 0;
    HalfInt d_value;
    long long geodesic_count = 0;
    bool dense = false;
};

class NetworkGraph {
public:
    using Edge = std::pair<int, int>;

    NetworkGraph() : NetworkGraph(2, 0, 1, {{0, 1}}) {}

    NetworkGraph(int num_vertices, int source, int sink, std::vector<Edge> edges)
        : n_(num_vertices), p_(source), q_(sink), edges_(std::move(edges)) {
        if (n_ < 2) throw std::invalid_argument("NetworkGraph: need at least two vertices");
        if (p_ < 0 || p_ >= n_ || q_ < 0 || q_ >= n_ || p_ == q_)
            throw std::invalid_argument("NetworkGraph: bad source/sink");
        for (auto [a, b] : edges_) {
            if (a < 0 || a >= n_ || b < 0 || b >= n_)
                throw std::invalid_argument("NetworkGraph: edge endpoint out of range");
            if (a == b) throw std::invalid_argument("NetworkGraph: loop at vertex " + std::to_string(a));
            if (b == p_) throw std::invalid_argument("NetworkGraph: edge into source");
            if (a == q_) throw std::invalid_argument("NetworkGraph: edge out of sink");
        }
        std::sort(edges_.begin(), edges_.end());
    }

    int num_vertices() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int source() const { return p_; }
    int sink() const { return q_; }
    const std::vector<Edge>& edges() const { return edges_; }

    int out_degree(int v) const {
        return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [v](const Edge& e) { return e.first == v; }));
    }
    int in_degree(int v) const {
        return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [v](const Edge& e) { return e.second == v; }));
    }
    int degree(int v) const { return in_degree(v) + out_degree(v); }
    int multiplicity(int a, int b) const {
        return static_cast<int>(std::count(edges_.begin(), edges_.end(), Edge{a, b}));
    }

    // Source degree k and sink degree l.
    int k() const { return degree(p_); }
    int l() const { return degree(q_); }

    std::vector<int> interior() const {
        std::vector<int> out;
        for (int v = 0; v < n_; ++v)
            if (v != p_ && v != q_) out.push_back(v);
        return out;
    }

    // Every vertex lies on a directed source->sink path.
    bool all_on_paths() const {
        auto fwd = reach(p_, false), bwd = reach(q_, true);
        for (int v = 0; v < n_; ++v)
            if (!fwd[v] || !bwd[v]) return false;
        return true;
    }

    bool is_acyclic() const { return topo_order().size() == static_cast<std::size_t>(n_); }

    // Kahn order; shorter than n when a directed cycle exists.
    std::vector<int> topo_order() const {
        std::vector<int> indeg(n_, 0), order;
        for (auto& e : edges_) ++indeg[e.second];
        std::vector<int> stack;
        for (int v = n_ - 1; v >= 0; --v)
            if (indeg[v] == 0) stack.push_back(v);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (auto& e : edges_)
                if (e.first == v && --indeg[e.second] == 0) stack.push_back(e.second);
        }
        return order;
    }

    bool operator==(const NetworkGraph& o) const {
        return n_ == o.n_ && p_ == o.p_ && q_ == o.q_ && edges_ == o.edges_;
    }

private:
    std::vector<char> reach(int start, bool backward) const {
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto& e : edges_) {
                int from = backward ? e.second : e.first;
                int to = backward ? e.first : e.second;
                if (from == v && !seen[to]) { seen[to] = 1; stack.push_back(to); }
            }
        }
        return seen;
    }

    int n_;
    int p_;
    int q_;
    std::vector<Edge> edges_;
};

inline NetworkGraph transpose(const NetworkGraph& g) {
    std::vector<NetworkGraph::Edge> rev;
    rev.reserve(g.edges().size());
    for (auto [a, b] : g.edges()) rev.emplace_back(b, a);
    return NetworkGraph(g.num_vertices(), g.sink(), g.source(), std::move(rev));
}

namespace detail {

// Undirected multigraph as an edge list.
struct UGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

inline UGraph underlying(const NetworkGraph& g) {
    UGraph u;
    u.n = g.num_vertices();
    for (auto [a, b] : g.edges()) u.edges.emplace_back(std::min(a, b), std::max(a, b));
    return u;
}

inline std::vector<int> components(const UGraph& u) {
    std::vector<int> parent(u.n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [a, b] : u.edges) parent[find(a)] = find(b);
    std::vector<int> comp(u.n);
    for (int v = 0; v < u.n; ++v) comp[v] = find(v);
    return comp;
}

inline bool connected(const UGraph& u) {
    auto c = components(u);
    return std::all_of(c.begin(), c.end(), [&](int x) { return x == c[0]; });
}

// Subdivide every repeated parallel edge so the result is simple.
inline UGraph subdivide_parallel(const UGraph& u) {
    UGraph s;
    s.n = u.n;
    std::set<std::pair<int, int>> seen;
    for (auto e : u.edges) {
        if (seen.insert(e).second) {
            s.edges.push_back(e);
        } else {
            int m = s.n++;
            s.edges.emplace_back(e.first, m);
            s.edges.emplace_back(e.second, m);
        }
    }
    return s;
}

}  // namespace detail

// Planarity of the underlying undirected multigraph: parallel edges are
// subdivided and the simple graph goes to the Boyer-Myrvold test.
inline bool is_planar(const NetworkGraph& g) {
    auto s = detail::subdivide_parallel(detail::underlying(g));
    boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS> bg(s.n);
    for (auto [a, b] : s.edges) boost::add_edge(a, b, bg);
    return boost::boyer_myrvold_planarity_test(bg);
}

inline RuleReport check_rules(const NetworkGraph& g) {
    RuleReport r;
    // loops are rejected at construction
    r.rule1_planar_loopfree = is_planar(g);

    bool unique = true;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (v == g.source() || v == g.sink()) continue;
        if (g.in_degree(v) == 0 || g.out_degree(v) == 0) unique = false;
    }
    r.rule2_unique_source_sink = unique;

    detail::UGraph inner;
    inner.n = g.num_vertices();
    for (auto [a, b] : g.edges())
        if (a != g.source() && a != g.sink() && b != g.source() && b != g.sink())
            inner.edges.emplace_back(a, b);
    int interior_count = g.num_vertices() - 2;
    auto comp = detail::components(inner);
    std::set<int> roots;
    for (int v : g.interior()) roots.insert(comp[v]);
    // a forest has exactly |V| - |E| components; parallel edges count as cycles
    r.rule3_interior_forest =
        static_cast<int>(roots.size()) == interior_count - static_cast<int>(inner.edges.size());

    r.rule4_interior_degree3 = true;
    for (int v : g.interior())
        if (g.degree(v) != 3) r.rule4_interior_degree3 = false;

    r.rule5_endpoint_degree_le3 = g.k() >= 1 && g.k() <= 3 && g.l() >= 1 && g.l() <= 3;
    r.all = r.rule1_planar_loopfree && r.rule2_unique_source_sink && r.rule3_interior_forest &&
            r.rule4_interior_degree3 && r.rule5_endpoint_degree_le3;
    return r;
}

// Rules 1-4 only; endpoint degrees are left to the caller (star profiles).
inline bool satisfies_rules_1_to_4(const NetworkGraph& g) {
    auto r = check_rules(g);
    return r.rule1_planar_loopfree && r.rule2_unique_source_sink && r.rule3_interior_forest &&
           r.rule4_interior_degree3;
}

struct CodeOverflow : std::length_error {
    using std::length_error::length_error;
};

inline constexpr int kCanonicalVertexBudget = 12;

namespace detail {

// Relabel so source=0, sink=1, interior sorted by (indeg, outdeg, mult from
// source, mult to sink); minimise the multiplicity matrix over permutations
// inside each invariant class.
inline std::pair<CanonicalCode, std::vector<int>> oriented_code(const NetworkGraph& g) {
    const int n = g.num_vertices();
    using Key = std::array<int, 4>;
    std::vector<std::pair<Key, int>> keyed;
    for (int v : g.interior())
        keyed.push_back({{g.in_degree(v), g.out_degree(v), g.multiplicity(g.source(), v), g.multiplicity(v, g.sink())}, v});
    std::sort(keyed.begin(), keyed.end());

    std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
    for (auto [a, b] : g.edges()) ++mult[a][b];

    std::vector<int> order{g.source(), g.sink()};
    std::vector<std::pair<int, int>> blocks;  // [begin, end) inside order
    for (std::size_t i = 0; i < keyed.size();) {
        std::size_t j = i;
        while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
        blocks.emplace_back(static_cast<int>(order.size()), static_cast<int>(order.size() + (j - i)));
        for (std::size_t t = i; t < j; ++t) order.push_back(keyed[t].second);
        i = j;
    }
    for (auto& b : blocks) std::sort(order.begin() + b.first, order.begin() + b.second);

    auto serialize = [&](const std::vector<int>& ord) {
        CanonicalCode c;
        c.reserve(1 + n * n);
        c.push_back(static_cast<std::uint8_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c.push_back(static_cast<std::uint8_t>(mult[ord[i]][ord[j]]));
        return c;
    };

    CanonicalCode best;
    std::vector<int> best_order;
    std::function<void(std::size_t)> rec = [&](std::size_t bi) {
        if (bi == blocks.size()) {
            auto c = serialize(order);
            if (best.empty() || c < best) { best = std::move(c); best_order = order; }
            return;
        }
        auto [lo, hi] = blocks[bi];
        std::sort(order.begin() + lo, order.begin() + hi);
        do {
            rec(bi + 1);
        } while (std::next_permutation(order.begin() + lo, order.begin() + hi));
    };
    rec(0);
    return {best, best_order};
}

inline NetworkGraph relabel(const NetworkGraph& g, const std::vector<int>& order) {
    std::vector<int> pos(g.num_vertices());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    std::vector<NetworkGraph::Edge> es;
    for (auto [a, b] : g.edges()) es.emplace_back(pos[a], pos[b]);
    return NetworkGraph(g.num_vertices(), pos[g.source()], pos[g.sink()], std::move(es));
}

}  // namespace detail

inline CanonicalCode canonical_code(const NetworkGraph& g) {
    if (g.num_vertices() > kCanonicalVertexBudget)
        throw CodeOverflow("canonical_code: " + std::to_string(g.num_vertices()) + " vertices exceeds budget of " +
                           std::to_string(kCanonicalVertexBudget));
    auto a = detail::oriented_code(g).first;
    auto b = detail::oriented_code(transpose(g)).first;
    return std::min(a, b);
}

// Relabelled representative: source 0, sink 1, oriented so k <= l; among
// k == l the orientation with the smaller code.
inline NetworkGraph canonical_form(const NetworkGraph& g) {
    if (g.num_vertices() > kCanonicalVertexBudget)
        throw CodeOverflow("canonical_form: vertex budget exceeded");
    auto t = transpose(g);
    auto [ca, oa] = detail::oriented_code(g);
    auto [cb, ob] = detail::oriented_code(t);
    bool use_t = g.k() != g.l() ? g.k() > g.l() : cb < ca;
    return use_t ? detail::relabel(t, ob) : detail::relabel(g, oa);
}

inline std::string code_hex(const CanonicalCode& c) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : c) { s.push_back(digits[b >> 4]); s.push_back(digits[b & 15]); }
    return s;
}

inline int face_count(const NetworkGraph& g) {
    auto u = detail::underlying(g);
    if (!detail::connected(u)) throw std::invalid_argument("face_count: graph is disconnected");
    if (!is_planar(g)) throw std::invalid_argument("face_count: graph is not planar");
    return g.num_edges() - g.num_vertices() + 2;
}

inline long long count_geodesics(const NetworkGraph& g) {
    auto order = g.topo_order();
    if (static_cast<int>(order.size()) != g.num_vertices())
        throw std::invalid_argument("count_geodesics: graph has a directed cycle");
    std::vector<long long> ways(g.num_vertices(), 0);
    ways[g.source()] = 1;
    for (int v : order)
        for (auto [a, b] : g.edges())
            if (a == v) ways[b] += ways[v];
    return ways[g.sink()];
}

inline long long choose2(long long n) { return n * (n - 1) / 2; }

inline HalfInt d_value(const NetworkGraph& g) {
    if (!check_rules(g).all) throw std::invalid_argument("d_value: graph violates the admissibility rules");
    long long k = g.k(), l = g.l(), v = g.num_vertices();
    auto d = HalfInt::from_int(12) - HalfInt::from_twice(v + k * k + l * l);
    auto alt = HalfInt::from_int(11 - face_count(g) - choose2(k) - choose2(l));
    if (d != alt) throw std::logic_error("d_value: closed forms disagree");
    return d;
}

// Some edge is a bridge of the underlying undirected multigraph.
inline bool has_bridge(const NetworkGraph& g) {
    auto u = detail::underlying(g);
    for (std::size_t i = 0; i < u.edges.size(); ++i) {
        detail::UGraph w{u.n, {}};
        for (std::size_t j = 0; j < u.edges.size(); ++j)
            if (j != i) w.edges.push_back(u.edges[j]);
        if (!detail::connected(w)) return true;
    }
    return false;
}

inline bool is_dense_class(const NetworkGraph& g) {
    if (!check_rules(g).all) throw std::invalid_argument("is_dense_class: graph violates the admissibility rules");
    return has_bridge(g);
}

inline GraphInvariants invariants(const NetworkGraph& g) {
    GraphInvariants inv;
    inv.k = g.k();
    inv.l = g.l();
    inv.num_vertices = g.num_vertices();
    inv.num_edges = g.num_edges();
    inv.num_faces = face_count(g);
    inv.d_value = d_value(g);
    inv.geodesic_count = count_geodesics(g);
    inv.dense = is_dense_class(g);
    return inv;
}

inline std::string to_dot(const NetworkGraph& g, const std::string& name = "G") {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=LR;\n";
    for (int v = 0; v < g.num_vertices(); ++v) {
        os << "  v" << v;
        if (v == g.source()) os << " [label=\"p\", shape=box, style=filled, fillcolor=lightblue]";
        else if (v == g.sink()) os << " [label=\"q\", shape=box, style=filled, fillcolor=salmon]";
        else os << " [label=\"" << v << "\", shape=circle]";
        os << ";\n";
    }
    for (auto [a, b] : g.edges()) os << "  v" << a << " -> v" << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace geonet
