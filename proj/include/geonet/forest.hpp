// forest.hpp - ordered forests, interior forests of catalog graphs,
// admissible pairs, the weight spaces W(Z) and Gelfand-Tsetlin patterns.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "netgraph.hpp"

namespace geonet {

// A directed forest with ordered degree-1 sources p_1..p_k and sinks
// q_1..q_l. Vertex ids are 0..num_vertices-1; weights are per edge.
class OrderedForest {
public:
    using Edge = std::pair<int, int>;

    OrderedForest(int num_vertices, std::vector<Edge> edges, std::vector<int> sources, std::vector<int> sinks,
                  std::vector<double> weights = {})
        : n_(num_vertices), edges_(std::move(edges)), sources_(std::move(sources)), sinks_(std::move(sinks)),
          weights_(std::move(weights)) {
        if (weights_.empty()) weights_.assign(edges_.size(), 0.0);
        validate();
    }

    int num_vertices() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& sources() const { return sources_; }
    const std::vector<int>& sinks() const { return sinks_; }
    const std::vector<double>& weights() const { return weights_; }
    int k() const { return static_cast<int>(sources_.size()); }
    int l() const { return static_cast<int>(sinks_.size()); }

    OrderedForest with_weights(std::vector<double> w) const {
        if (w.size() != edges_.size()) throw std::invalid_argument("OrderedForest: weight count mismatch");
        return OrderedForest(n_, edges_, sources_, sinks_, std::move(w));
    }

    // Same forest with p_i := sources[src_perm[i]] and q_j := sinks[sink_perm[j]].
    OrderedForest reordered(const std::vector<int>& src_perm, const std::vector<int>& sink_perm) const {
        auto check = [](const std::vector<int>& p, std::size_t n) {
            std::vector<int> s = p;
            std::sort(s.begin(), s.end());
            for (std::size_t i = 0; i < s.size(); ++i)
                if (s[i] != static_cast<int>(i)) return false;
            return s.size() == n;
        };
        if (!check(src_perm, sources_.size()) || !check(sink_perm, sinks_.size()))
            throw std::invalid_argument("OrderedForest::reordered: not a permutation");
        std::vector<int> s, t;
        for (int i : src_perm) s.push_back(sources_[i]);
        for (int j : sink_perm) t.push_back(sinks_[j]);
        return OrderedForest(n_, edges_, s, t, weights_);
    }

    int component_count() const {
        auto comp = component_ids();
        return static_cast<int>(std::set<int>(comp.begin(), comp.end()).size());
    }

    std::vector<int> component_ids() const {
        std::vector<int> parent(n_);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        for (auto [a, b] : edges_) parent[find(a)] = find(b);
        std::vector<int> c(n_);
        for (int v = 0; v < n_; ++v) c[v] = find(v);
        return c;
    }

    // Leaves in cyclic boundary order: p_1..p_k then q_l..q_1.
    std::vector<int> boundary_cycle() const {
        std::vector<int> cyc = sources_;
        cyc.insert(cyc.end(), sinks_.rbegin(), sinks_.rend());
        return cyc;
    }

    // Forest splits are cyclic intervals of the boundary order and leaf
    // sets of distinct components do not interleave.
    bool boundary_order_planar() const {
        auto cyc = boundary_cycle();
        const int b = static_cast<int>(cyc.size());
        auto is_interval = [](const std::vector<char>& in) {
            int changes = 0;
            for (std::size_t i = 0; i < in.size(); ++i)
                if (in[i] != in[(i + 1) % in.size()]) ++changes;
            return changes <= 2;
        };
        auto comp = component_ids();
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            auto side = side_of_edge(e);
            std::vector<char> in;  // restricted to this component's leaves
            for (int i = 0; i < b; ++i)
                if (comp[cyc[i]] == comp[edges_[e].first]) in.push_back(side[cyc[i]]);
            if (!is_interval(in)) return false;
        }
        std::set<int> roots(comp.begin(), comp.end());
        for (int r1 : roots)
            for (int r2 : roots) {
                if (r1 >= r2) continue;
                std::vector<int> seq;
                for (int i = 0; i < b; ++i)
                    if (comp[cyc[i]] == r1) seq.push_back(1);
                    else if (comp[cyc[i]] == r2) seq.push_back(2);
                int changes = 0;
                for (std::size_t i = 0; i < seq.size(); ++i)
                    if (seq[i] != seq[(i + 1) % seq.size()]) ++changes;
                if (changes > 2) return false;
            }
        return true;
    }

    // d_Z along the directed path p_i -> q_j; NaN when there is none.
    double path_weight(int i, int j) const {
        const int s = sources_.at(i), t = sinks_.at(j);
        std::vector<double> dist(n_, std::numeric_limits<double>::quiet_NaN());
        dist[s] = 0.0;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (std::size_t e = 0; e < edges_.size(); ++e)
                if (edges_[e].first == v && std::isnan(dist[edges_[e].second])) {
                    dist[edges_[e].second] = dist[v] + weights_[e];
                    stack.push_back(edges_[e].second);
                }
        }
        return dist[t];
    }

private:
    // vertices on the head side of edge e once it is removed
    std::vector<char> side_of_edge(std::size_t e) const {
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{edges_[e].second};
        seen[edges_[e].second] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (std::size_t f = 0; f < edges_.size(); ++f) {
                if (f == e) continue;
                int a = edges_[f].first, c = edges_[f].second;
                int w = a == v ? c : (c == v ? a : -1);
                if (w >= 0 && !seen[w]) { seen[w] = 1; stack.push_back(w); }
            }
        }
        return seen;
    }

    void validate() const {
        if (weights_.size() != edges_.size()) throw std::invalid_argument("OrderedForest: weight count mismatch");
        std::vector<int> deg(n_, 0), indeg(n_, 0), outdeg(n_, 0);
        for (auto [a, b] : edges_) {
            if (a < 0 || a >= n_ || b < 0 || b >= n_ || a == b) throw std::invalid_argument("OrderedForest: bad edge");
            ++deg[a]; ++deg[b]; ++outdeg[a]; ++indeg[b];
        }
        if (component_count() != n_ - static_cast<int>(edges_.size()))
            throw std::invalid_argument("OrderedForest: underlying graph is not a forest");
        std::set<int> seen;
        for (int s : sources_) {
            if (s < 0 || s >= n_ || deg[s] != 1 || outdeg[s] != 1 || !seen.insert(s).second)
                throw std::invalid_argument("OrderedForest: sources must be distinct degree-1 tails");
        }
        for (int t : sinks_) {
            if (t < 0 || t >= n_ || deg[t] != 1 || indeg[t] != 1 || !seen.insert(t).second)
                throw std::invalid_argument("OrderedForest: sinks must be distinct degree-1 heads");
        }
        if (!boundary_order_planar())
            throw std::invalid_argument("OrderedForest: source/sink order admits no planar embedding");
    }

    int n_;
    std::vector<Edge> edges_;
    std::vector<int> sources_;
    std::vector<int> sinks_;
    std::vector<double> weights_;
};

namespace detail {

// Forest of g with the source and sink split per incident edge. Source
// copies are numbered in the order of g's sorted edge list, likewise sinks.
struct SplitForest {
    int n = 0;
    std::vector<OrderedForest::Edge> edges;
    std::vector<int> source_copies;
    std::vector<int> sink_copies;
};

inline SplitForest split_endpoints(const NetworkGraph& g) {
    SplitForest s;
    std::map<int, int> inner;
    for (int v : g.interior()) inner[v] = s.n++;
    for (auto [a, b] : g.edges()) {
        int u, w;
        if (a == g.source()) { u = s.n++; s.source_copies.push_back(u); } else { u = inner.at(a); }
        if (b == g.sink()) { w = s.n++; s.sink_copies.push_back(w); } else { w = inner.at(b); }
        s.edges.emplace_back(u, w);
    }
    return s;
}

inline bool try_forest(const SplitForest& s, const std::vector<int>& sp, const std::vector<int>& tp,
                       std::vector<OrderedForest>* out) {
    std::vector<int> src, snk;
    for (int i : sp) src.push_back(s.source_copies[i]);
    for (int j : tp) snk.push_back(s.sink_copies[j]);
    try {
        OrderedForest f(s.n, s.edges, src, snk);
        if (out) out->push_back(std::move(f));
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

}  // namespace detail

// Every valid ordering of the split source and sink copies, lexicographic
// in (source permutation, sink permutation).
inline std::vector<OrderedForest> all_interior_forests(const NetworkGraph& g) {
    if (!check_rules(g).all) throw std::invalid_argument("interior_forest: graph violates the admissibility rules");
    auto s = detail::split_endpoints(g);
    std::vector<int> sp(s.source_copies.size()), tp(s.sink_copies.size());
    std::iota(sp.begin(), sp.end(), 0);
    std::vector<OrderedForest> out;
    do {
        std::iota(tp.begin(), tp.end(), 0);
        do {
            detail::try_forest(s, sp, tp, &out);
        } while (std::next_permutation(tp.begin(), tp.end()));
    } while (std::next_permutation(sp.begin(), sp.end()));
    return out;
}

// The lexicographically first valid ordering.
inline OrderedForest interior_forest(const NetworkGraph& g) {
    if (!check_rules(g).all) throw std::invalid_argument("interior_forest: graph violates the admissibility rules");
    auto s = detail::split_endpoints(g);
    std::vector<int> sp(s.source_copies.size()), tp(s.sink_copies.size());
    std::iota(sp.begin(), sp.end(), 0);
    std::vector<OrderedForest> out;
    do {
        std::iota(tp.begin(), tp.end(), 0);
        do {
            if (detail::try_forest(s, sp, tp, &out)) return out.front();
        } while (std::next_permutation(tp.begin(), tp.end()));
    } while (std::next_permutation(sp.begin(), sp.end()));
    throw std::invalid_argument("interior_forest: no planar source/sink order exists");
}

// 0-based (i, j) with a directed path p_i -> q_j.
inline std::vector<std::pair<int, int>> admissible_pairs(const OrderedForest& f) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < f.k(); ++i)
        for (int j = 0; j < f.l(); ++j)
            if (!std::isnan(f.path_weight(i, j))) out.emplace_back(i, j);
    return out;
}

// Constraint rows over (x_1..x_k, y_1..y_l): (x_i + y_j) - (x_i0 + y_j0) =
// d(i0, j0) - d(i, j) for every admissible pair after the first.
template <class T>
struct LinearSystem {
    std::vector<std::vector<T>> rows;
    std::vector<T> rhs;
    int cols = 0;
};

template <class T>
LinearSystem<T> weight_constraint_system(const OrderedForest& f, const std::vector<T>& path_weights_by_pair) {
    auto pairs = admissible_pairs(f);
    if (pairs.size() != path_weights_by_pair.size())
        throw std::invalid_argument("weight_constraint_system: one weight per admissible pair required");
    LinearSystem<T> sys;
    sys.cols = f.k() + f.l();
    for (std::size_t a = 1; a < pairs.size(); ++a) {
        std::vector<T> row(sys.cols, T(0));
        row[pairs[a].first] += T(1);
        row[f.k() + pairs[a].second] += T(1);
        row[pairs[0].first] -= T(1);
        row[f.k() + pairs[0].second] -= T(1);
        sys.rows.push_back(row);
        sys.rhs.push_back(path_weights_by_pair[0] - path_weights_by_pair[a]);
    }
    return sys;
}

class AffineSubspace {
public:
    AffineSubspace(Eigen::VectorXd offset, Eigen::MatrixXd basis_columns) : offset_(std::move(offset)) {
        if (basis_columns.rows() != offset_.size() && basis_columns.cols() > 0)
            throw std::invalid_argument("AffineSubspace: basis dimension mismatch");
        if (basis_columns.cols() == 0) {
            basis_ = Eigen::MatrixXd(offset_.size(), 0);
        } else {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis_columns);
            qr.setThreshold(1e-10);
            const auto r = qr.rank();
            if (r != basis_columns.cols()) throw std::invalid_argument("AffineSubspace: basis is dependent");
            basis_ = qr.householderQ() * Eigen::MatrixXd::Identity(offset_.size(), r);
        }
    }

    int ambient_dim() const { return static_cast<int>(offset_.size()); }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Eigen::VectorXd& offset() const { return offset_; }
    const Eigen::MatrixXd& basis() const { return basis_; }  // orthonormal columns

    // Residual of v after projecting onto the direction space, relative to |v|.
    double direction_residual(const Eigen::VectorXd& v) const {
        double n = v.norm();
        if (n == 0.0) return 0.0;
        Eigen::VectorXd u = v / n;
        return (u - basis_ * (basis_.transpose() * u)).norm();
    }
    bool contains_direction(const Eigen::VectorXd& v, double tol = 1e-9) const { return direction_residual(v) < tol; }
    bool contains_point(const Eigen::VectorXd& x, double tol = 1e-9) const {
        Eigen::VectorXd d = x - offset_;
        double scale = std::max({1.0, x.norm(), offset_.norm()});
        return (d - basis_ * (basis_.transpose() * d)).norm() / scale < tol;
    }
    bool contains(const AffineSubspace& o, double tol = 1e-9) const {
        if (o.ambient_dim() != ambient_dim()) return false;
        if (!contains_point(o.offset_, tol)) return false;
        for (int c = 0; c < o.dim(); ++c)
            if (!contains_direction(o.basis_.col(c), tol)) return false;
        return true;
    }
    bool equals(const AffineSubspace& o, double tol = 1e-9) const {
        return dim() == o.dim() && contains(o, tol) && o.contains(*this, tol);
    }
    AffineSubspace translated(const Eigen::VectorXd& by) const { return AffineSubspace(offset_ + by, basis_); }

private:
    Eigen::VectorXd offset_;
    Eigen::MatrixXd basis_;
};

inline std::vector<double> pair_weights(const OrderedForest& f) {
    std::vector<double> w;
    for (auto [i, j] : admissible_pairs(f)) w.push_back(f.path_weight(i, j));
    return w;
}

// W(Z) = {(x, y): x_i + d_Z(p_i, q_j) + y_j constant over admissible pairs}.
inline AffineSubspace weight_constraint_space(const OrderedForest& f) {
    auto sys = weight_constraint_system<double>(f, pair_weights(f));
    const int n = sys.cols;
    if (sys.rows.empty()) return AffineSubspace(Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd A(sys.rows.size(), n);
    Eigen::VectorXd b(sys.rows.size());
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
        for (int c = 0; c < n; ++c) A(r, c) = sys.rows[r][c];
        b(r) = sys.rhs[r];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-10);
    Eigen::VectorXd x0 = lu.solve(b);
    if ((A * x0 - b).norm() > 1e-9 * std::max(1.0, b.norm()))
        throw std::logic_error("weight_constraint_space: inconsistent constraints");
    Eigen::MatrixXd ker = lu.rank() == n ? Eigen::MatrixXd(n, 0) : Eigen::MatrixXd(lu.kernel());
    return AffineSubspace(x0, ker);
}

// Z + F where F adds a_i on the edge at p_i and b_j on the edge at q_j.
inline OrderedForest shift_boundary(const OrderedForest& f, const std::vector<double>& a, const std::vector<double>& b) {
    if (static_cast<int>(a.size()) != f.k() || static_cast<int>(b.size()) != f.l())
        throw std::invalid_argument("shift_boundary: size mismatch");
    auto w = f.weights();
    for (std::size_t e = 0; e < f.edges().size(); ++e) {
        for (int i = 0; i < f.k(); ++i)
            if (f.edges()[e].first == f.sources()[i]) w[e] += a[i];
        for (int j = 0; j < f.l(); ++j)
            if (f.edges()[e].second == f.sinks()[j]) w[e] += b[j];
    }
    return f.with_weights(w);
}

// Row i (1-based) holds w_{i,1..k+1-i}.
class GTPattern {
public:
    GTPattern() = default;
    explicit GTPattern(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
        const std::size_t k = rows_.size();
        for (std::size_t i = 0; i < k; ++i)
            if (rows_[i].size() != k - i) throw std::invalid_argument("GTPattern: rows must have lengths k, k-1, ..., 1");
    }
    int levels() const { return static_cast<int>(rows_.size()); }
    double at(int i, int j) const { return rows_.at(i - 1).at(j - 1); }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    std::vector<double> values() const {
        std::vector<double> v;
        for (auto& r : rows_) v.insert(v.end(), r.begin(), r.end());
        return v;
    }

    // w_{i,j} <= w_{i+1,j} <= w_{i,j+1} for i + j <= k
    bool interlaces() const {
        const int k = levels();
        for (int i = 1; i <= k; ++i)
            for (int j = 1; i + j <= k; ++j)
                if (!(at(i, j) <= at(i + 1, j) && at(i + 1, j) <= at(i, j + 1))) return false;
        return true;
    }

private:
    std::vector<std::vector<double>> rows_;
};

// (w, x) in GT_{k+1} with x as row 1.
inline bool validate_gt(const GTPattern& w, const std::vector<double>& x) {
    if (x.size() != static_cast<std::size_t>(w.levels()) + 1)
        throw std::invalid_argument("validate_gt: x must have k+1 entries");
    if (!std::is_sorted(x.begin(), x.end())) throw std::invalid_argument("validate_gt: x must be nondecreasing");
    std::vector<std::vector<double>> rows{x};
    rows.insert(rows.end(), w.rows().begin(), w.rows().end());
    return GTPattern(rows).interlaces();
}

struct GTStats {
    int distinct_count = 0;
    double min_gap = std::numeric_limits<double>::infinity();
};

inline GTStats gt_stats(const GTPattern& w) {
    auto v = w.values();
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    GTStats s;
    s.distinct_count = static_cast<int>(v.size());
    for (std::size_t i = 1; i < v.size(); ++i) s.min_gap = std::min(s.min_gap, v[i] - v[i - 1]);
    return s;
}

inline nlohmann::ordered_json forest_to_json(const OrderedForest& f) {
    nlohmann::ordered_json j;
    j["vertices"] = f.num_vertices();
    j["edges"] = nlohmann::ordered_json::array();
    for (auto [a, b] : f.edges()) j["edges"].push_back({a, b});
    j["sources"] = f.sources();
    j["sinks"] = f.sinks();
    j["weights"] = f.weights();
    return j;
}

inline OrderedForest forest_from_json(const nlohmann::json& j) {
    std::vector<OrderedForest::Edge> es;
    for (auto& e : j.at("edges")) es.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return OrderedForest(j.at("vertices").get<int>(), es, j.at("sources").get<std::vector<int>>(), j.at("sinks").get<std::vector<int>>(),
                         j.value("weights", std::vector<double>{}));
}

// basis holds one row per direction vector
inline nlohmann::ordered_json subspace_to_json(const AffineSubspace& w) {
    nlohmann::ordered_json j;
    j["offset"] = std::vector<double>(w.offset().data(), w.offset().data() + w.offset().size());
    j["basis"] = nlohmann::ordered_json::array();
    for (int c = 0; c < w.dim(); ++c) {
        Eigen::VectorXd col = w.basis().col(c);
        j["basis"].push_back(std::vector<double>(col.data(), col.data() + col.size()));
    }
    return j;
}

inline AffineSubspace subspace_from_json(const nlohmann::json& j) {
    auto off = j.at("offset").get<std::vector<double>>();
    auto rows = j.at("basis").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd B(off.size(), rows.size());
    for (std::size_t c = 0; c < rows.size(); ++c) {
        if (rows[c].size() != off.size()) throw std::invalid_argument("subspace_from_json: basis dimension mismatch");
        for (std::size_t r = 0; r < off.size(); ++r) B(r, c) = rows[c][r];
    }
    return AffineSubspace(Eigen::Map<Eigen::VectorXd>(off.data(), off.size()), B);
}

}  // namespace geonet
