// botany.hpp - exhaustive enumeration of admissible network graphs under
// star-dimension profiles, catalog summaries and catalog serialization.
#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

#include "netgraph.hpp"

namespace geonet {

using Rational = boost::rational<long long>;

inline std::string rational_str(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Accepts "5", "-3", "3/2" and finite decimals such as "1.5".
inline Rational parse_rational(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw std::invalid_argument("parse_rational: empty value");
    std::size_t used = 0;
    try {
        if (auto slash = s.find('/'); slash != std::string::npos) {
            long long num = std::stoll(s.substr(0, slash), &used);
            if (used != slash) throw std::invalid_argument(s);
            std::string den_s = s.substr(slash + 1);
            long long den = std::stoll(den_s, &used);
            if (used != den_s.size() || den == 0) throw std::invalid_argument(s);
            return Rational(num, den);
        }
        if (auto dot = s.find('.'); dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            long long den = 1;
            for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
            long long num = std::stoll(digits, &used);
            if (used != digits.size()) throw std::invalid_argument(s);
            return Rational(num, den);
        }
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return Rational(v);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("parse_rational: cannot parse '" + s + "'");
    }
}

class StarProfile {
public:
    StarProfile() = default;
    explicit StarProfile(std::map<int, Rational> dims, std::string name = "custom")
        : dims_(std::move(dims)), name_(std::move(name)) {
        int expect = 1;
        for (auto& [k, v] : dims_) {
            if (k != expect++) throw std::invalid_argument("StarProfile: domain must be {1..K}");
            if (v < 0) throw std::invalid_argument("StarProfile: negative dimension");
        }
        for (auto it = dims_.begin(); it != dims_.end() && std::next(it) != dims_.end(); ++it)
            if (std::next(it)->second > it->second)
                throw std::invalid_argument("StarProfile: dimensions must be nonincreasing in k");
    }

    static StarProfile landscape() { return StarProfile({{1, 5}, {2, 4}, {3, 2}}, "landscape"); }
    static StarProfile brownian_map() {
        std::map<int, Rational> d;
        for (int k = 1; k <= 5; ++k) d[k] = 5 - k;
        return StarProfile(d, "brownian_map");
    }

    // key=value lines: star.K=VALUE, optional name=..., '#' comments.
    static StarProfile parse(const std::string& text) {
        std::map<int, Rational> d;
        std::string name = "custom";
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("profile line " + std::to_string(lineno) + ": expected key=value");
            auto trim = [](std::string s) {
                auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
            };
            std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
            if (key == "name") { name = val; continue; }
            if (key.rfind("star.", 0) != 0)
                throw std::invalid_argument("profile line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            int k = 0;
            try { k = std::stoi(key.substr(5)); } catch (const std::logic_error&) {
                throw std::invalid_argument("profile line " + std::to_string(lineno) + ": bad star order");
            }
            if (k < 1) throw std::invalid_argument("profile: star order must be positive");
            d[k] = parse_rational(val);
        }
        return StarProfile(d, name);
    }

    bool has(int k) const { return dims_.count(k) > 0; }
    Rational dim(int k) const {
        auto it = dims_.find(k);
        if (it == dims_.end()) throw std::out_of_range("StarProfile: Star_" + std::to_string(k) + " is empty");
        return it->second;
    }
    int max_order() const { return dims_.empty() ? 0 : dims_.rbegin()->first; }
    const std::map<int, Rational>& dims() const { return dims_; }
    const std::string& name() const { return name_; }

    // d_gen(G) = dim_k + dim_l + 2 - (|V| + k + l)/2
    Rational d_gen(int k, int l, int v) const { return dim(k) + dim(l) + 2 - Rational(v + k + l, 2); }

    // Both filters depend on (k, l, |V|) only.
    bool admits(int k, int l, int v) const {
        if (!has(k) || !has(l)) return false;
        if (d_gen(k, l, v) < 0) return false;
        if (dim(k) - std::max(k - l, 0) < 0) return false;
        if (dim(l) - std::max(l - k, 0) < 0) return false;
        return true;
    }

    bool operator==(const StarProfile& o) const { return dims_ == o.dims_ && name_ == o.name_; }

private:
    std::map<int, Rational> dims_;
    std::string name_ = "custom";
};

struct CatalogMember {
    NetworkGraph graph;
    CanonicalCode code;
    GraphInvariants inv;
    Rational dim;  // attached dimension value (d_gen; equals d(G) for the landscape)

    bool operator==(const CatalogMember& o) const {
        return graph == o.graph && code == o.code && dim == o.dim && inv.k == o.inv.k && inv.l == o.inv.l &&
               inv.num_vertices == o.inv.num_vertices && inv.num_edges == o.inv.num_edges &&
               inv.num_faces == o.inv.num_faces && inv.d_value == o.inv.d_value &&
               inv.geodesic_count == o.inv.geodesic_count && inv.dense == o.inv.dense;
    }
};

struct Catalog {
    std::vector<CatalogMember> members;
    StarProfile profile;
    std::vector<std::pair<std::string, long long>> generation_log;

    std::set<CanonicalCode> codes() const {
        std::set<CanonicalCode> s;
        for (auto& m : members) s.insert(m.code);
        return s;
    }
    bool operator==(const Catalog& o) const {
        return members == o.members && profile == o.profile && generation_log == o.generation_log;
    }
};

namespace detail {

// Invariants without the rule-5 guard, so profiles beyond degree 3 work.
inline GraphInvariants raw_invariants(const NetworkGraph& g) {
    GraphInvariants inv;
    inv.k = g.k();
    inv.l = g.l();
    inv.num_vertices = g.num_vertices();
    inv.num_edges = g.num_edges();
    inv.num_faces = face_count(g);
    inv.d_value = HalfInt::from_int(12) - HalfInt::from_twice(inv.num_vertices + inv.k * inv.k + inv.l * inv.l);
    inv.geodesic_count = count_geodesics(g);
    inv.dense = has_bridge(g);
    return inv;
}

// Calls emit(g) for every candidate with source degree k, sink degree l,
// n vertices, interior degrees 3, interior graph a simple forest and every
// interior vertex having in- and out-edges. Vertex 0 is p, vertex 1 is q.
inline void generate_candidates(int k, int l, int n, const std::function<void(const NetworkGraph&)>& emit) {
    const int m = n - 2;
    if (m < 0 || (k + l + 3 * m) % 2 != 0) return;
    for (int a = 0; a <= std::min(k, l); ++a) {
        if (m == 0) {
            if (a == k && a == l) emit(NetworkGraph(2, 0, 1, std::vector<NetworkGraph::Edge>(a, {0, 1})));
            continue;
        }
        const int rk = k - a, rl = l - a;
        std::vector<std::pair<int, int>> xy(m);
        // nonincreasing (x_i, y_i): interior vertices are interchangeable
        std::function<void(int, int, int)> assign = [&](int i, int left_k, int left_l) {
            if (i == m) {
                if (left_k != 0 || left_l != 0) return;
                std::vector<int> r(m);
                int total = 0;
                for (int j = 0; j < m; ++j) total += r[j] = 3 - xy[j].first - xy[j].second;
                if (total % 2 != 0 || total / 2 > m - 1) return;
                std::vector<std::pair<int, int>> pairs;
                for (int u = 0; u < m; ++u)
                    for (int v = u + 1; v < m; ++v) pairs.emplace_back(u, v);
                std::vector<int> deg(m, 0), parent(m);
                std::vector<std::pair<int, int>> chosen;
                std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : find(parent[x]); };
                std::iota(parent.begin(), parent.end(), 0);
                std::function<void(std::size_t)> forest = [&](std::size_t pi) {
                    if (static_cast<int>(chosen.size()) * 2 == total) {
                        for (int j = 0; j < m; ++j)
                            if (deg[j] != r[j]) return;
                        const int e = static_cast<int>(chosen.size());
                        for (int mask = 0; mask < (1 << e); ++mask) {
                            std::vector<int> in(m), out(m);
                            for (int j = 0; j < m; ++j) { in[j] = xy[j].first; out[j] = xy[j].second; }
                            std::vector<NetworkGraph::Edge> edges(a, {0, 1});
                            for (int j = 0; j < m; ++j) {
                                for (int c = 0; c < xy[j].first; ++c) edges.emplace_back(0, j + 2);
                                for (int c = 0; c < xy[j].second; ++c) edges.emplace_back(j + 2, 1);
                            }
                            for (int t = 0; t < e; ++t) {
                                auto [u, v] = chosen[t];
                                if (mask >> t & 1) std::swap(u, v);
                                ++out[u];
                                ++in[v];
                                edges.emplace_back(u + 2, v + 2);
                            }
                            bool ok = true;
                            for (int j = 0; j < m; ++j)
                                if (in[j] == 0 || out[j] == 0) ok = false;
                            if (ok) emit(NetworkGraph(n, 0, 1, std::move(edges)));
                        }
                        return;
                    }
                    if (pi == pairs.size()) return;
                    auto [u, v] = pairs[pi];
                    if (deg[u] < r[u] && deg[v] < r[v]) {
                        int ru = find(u), rv = find(v);
                        if (ru != rv) {
                            parent[ru] = rv;
                            ++deg[u];
                            ++deg[v];
                            chosen.push_back(pairs[pi]);
                            forest(pi + 1);
                            chosen.pop_back();
                            --deg[u];
                            --deg[v];
                            parent[ru] = ru;
                        }
                    }
                    forest(pi + 1);
                };
                forest(0);
                return;
            }
            for (int x = std::min(3, left_k); x >= 0; --x)
                for (int y = std::min(3 - x, left_l); y >= 0; --y) {
                    if (i > 0 && std::make_pair(x, y) > xy[i - 1]) continue;
                    xy[i] = {x, y};
                    assign(i + 1, left_k - x, left_l - y);
                }
        };
        assign(0, rk, rl);
    }
}

inline void sort_members(std::vector<CatalogMember>& ms) {
    std::sort(ms.begin(), ms.end(), [](const CatalogMember& a, const CatalogMember& b) {
        return std::tie(a.inv.k, a.inv.l, a.inv.num_vertices, a.code) <
               std::tie(b.inv.k, b.inv.l, b.inv.num_vertices, b.code);
    });
}

struct Collector {
    std::map<CanonicalCode, NetworkGraph> unique;
    long long raw = 0;
    long long passed = 0;
};

inline void collect(Collector& c, const NetworkGraph& g, const std::function<bool(const NetworkGraph&)>& accept) {
    ++c.raw;
    if (!accept(g)) return;
    ++c.passed;
    auto code = canonical_code(g);
    if (!c.unique.count(code)) c.unique.emplace(code, canonical_form(g));
}

}  // namespace detail

// All graphs satisfying the five rules, by direct search over degree
// sequences; |V| <= k + l follows from the degree count.
inline Catalog enumerate_landscape() {
    Catalog cat;
    cat.profile = StarProfile::landscape();
    detail::Collector col;
    long long triples = 0;
    for (int k = 1; k <= 3; ++k)
        for (int l = k; l <= 3; ++l)
            for (int n = 2; n <= k + l; ++n) {
                ++triples;
                detail::generate_candidates(k, l, n, [&](const NetworkGraph& g) {
                    detail::collect(col, g, [](const NetworkGraph& h) { return check_rules(h).all; });
                });
            }
    for (auto& [code, g] : col.unique) {
        auto inv = invariants(g);
        cat.members.push_back({g, code, inv, Rational(inv.d_value.twice(), 2)});
    }
    detail::sort_members(cat.members);
    cat.generation_log = {{"degree_triples", triples},
                          {"candidates", col.raw},
                          {"pass_rules", col.passed},
                          {"unique", static_cast<long long>(cat.members.size())}};
    return cat;
}

inline Catalog enumerate_with_star_profile(const StarProfile& profile) {
    Catalog cat;
    cat.profile = profile;
    detail::Collector col;
    long long triples = 0, admitted = 0;
    const int K = profile.max_order();
    for (int k = 1; k <= K; ++k)
        for (int l = k; l <= K; ++l)
            for (int n = 2; n <= k + l; ++n) {
                if ((k + l + 3 * (n - 2)) % 2 != 0) continue;
                ++triples;
                if (!profile.admits(k, l, n)) continue;
                ++admitted;
                if (n > kCanonicalVertexBudget) throw CodeOverflow("enumerate: |V| beyond the vertex budget");
                detail::generate_candidates(k, l, n, [&](const NetworkGraph& g) {
                    detail::collect(col, g, satisfies_rules_1_to_4);
                });
            }
    for (auto& [code, g] : col.unique) {
        auto inv = detail::raw_invariants(g);
        cat.members.push_back({g, code, inv, profile.d_gen(inv.k, inv.l, inv.num_vertices)});
    }
    detail::sort_members(cat.members);
    cat.generation_log = {{"degree_triples", triples},
                          {"profile_admitted_triples", admitted},
                          {"candidates", col.raw},
                          {"pass_rules_1_4", col.passed},
                          {"unique", static_cast<long long>(cat.members.size())}};
    return cat;
}

struct SummaryRow {
    long long geodesics = 0;
    int members = 0;
    Rational max_dim;
    bool countable = false;  // every member has dimension 0
};

struct SummaryTable {
    std::vector<SummaryRow> by_geodesics;  // T = 1..max, rows with no members omitted
    std::map<std::pair<int, int>, int> by_degrees;
    std::vector<std::tuple<int, int, long long>> dense;  // (k, l, T)
    long long max_geodesics = 0;
};

inline SummaryTable catalog_summary(const Catalog& c) {
    SummaryTable s;
    std::map<long long, SummaryRow> rows;
    for (auto& m : c.members) {
        auto& r = rows[m.inv.geodesic_count];
        if (r.members == 0) { r.geodesics = m.inv.geodesic_count; r.max_dim = m.dim; r.countable = true; }
        r.max_dim = std::max(r.max_dim, m.dim);
        r.countable = r.countable && m.dim.numerator() == 0;
        ++r.members;
        ++s.by_degrees[{m.inv.k, m.inv.l}];
        if (m.inv.dense) s.dense.emplace_back(m.inv.k, m.inv.l, m.inv.geodesic_count);
        s.max_geodesics = std::max(s.max_geodesics, m.inv.geodesic_count);
    }
    for (auto& [t, r] : rows) s.by_geodesics.push_back(r);
    std::sort(s.dense.begin(), s.dense.end());
    return s;
}

inline constexpr const char* kCatalogSchema = "geonet.catalog/1";

inline nlohmann::ordered_json graph_to_json(const NetworkGraph& g) {
    nlohmann::ordered_json j;
    j["vertices"] = g.num_vertices();
    j["source"] = g.source();
    j["sink"] = g.sink();
    j["edges"] = nlohmann::ordered_json::array();
    for (auto [a, b] : g.edges()) j["edges"].push_back({a, b});
    return j;
}

inline NetworkGraph graph_from_json(const nlohmann::json& j) {
    std::vector<NetworkGraph::Edge> es;
    for (auto& e : j.at("edges")) es.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return NetworkGraph(j.at("vertices").get<int>(), j.at("source").get<int>(), j.at("sink").get<int>(), es);
}

inline nlohmann::ordered_json catalog_to_json(const Catalog& c) {
    nlohmann::ordered_json j;
    j["schema"] = kCatalogSchema;
    j["profile"]["name"] = c.profile.name();
    for (auto& [k, v] : c.profile.dims()) j["profile"]["dims"][std::to_string(k)] = rational_str(v);
    j["generation_log"] = nlohmann::ordered_json::array();
    for (auto& [stage, n] : c.generation_log) j["generation_log"].push_back({{"stage", stage}, {"count", n}});
    j["members"] = nlohmann::ordered_json::array();
    for (auto& m : c.members) {
        nlohmann::ordered_json r;
        r["graph"] = graph_to_json(m.graph);
        r["k"] = m.inv.k;
        r["l"] = m.inv.l;
        r["V"] = m.inv.num_vertices;
        r["E"] = m.inv.num_edges;
        r["F"] = m.inv.num_faces;
        r["d"] = boost::rational_cast<double>(m.dim);
        r["d_exact"] = rational_str(m.dim);
        r["d_formula"] = m.inv.d_value.str();
        r["T"] = m.inv.geodesic_count;
        r["dense"] = m.inv.dense;
        r["code"] = code_hex(m.code);
        j["members"].push_back(r);
    }
    return j;
}

inline Catalog catalog_from_json(const nlohmann::json& j) {
    if (j.at("schema").get<std::string>() != kCatalogSchema)
        throw std::invalid_argument("catalog_from_json: unsupported schema " + j.at("schema").dump());
    Catalog c;
    std::map<int, Rational> dims;
    if (j.at("profile").contains("dims"))
        for (auto& [k, v] : j.at("profile").at("dims").items()) dims[std::stoi(k)] = parse_rational(v.get<std::string>());
    c.profile = StarProfile(dims, j.at("profile").at("name").get<std::string>());
    for (auto& e : j.at("generation_log")) c.generation_log.emplace_back(e.at("stage").get<std::string>(), e.at("count").get<long long>());
    for (auto& r : j.at("members")) {
        CatalogMember m;
        m.graph = graph_from_json(r.at("graph"));
        m.code = canonical_code(m.graph);
        if (code_hex(m.code) != r.at("code").get<std::string>())
            throw std::invalid_argument("catalog_from_json: stored code does not match graph");
        m.inv.k = r.at("k");
        m.inv.l = r.at("l");
        m.inv.num_vertices = r.at("V");
        m.inv.num_edges = r.at("E");
        m.inv.num_faces = r.at("F");
        m.inv.d_value = HalfInt::parse(r.at("d_formula").get<std::string>());
        m.inv.geodesic_count = r.at("T");
        m.inv.dense = r.at("dense");
        m.dim = parse_rational(r.at("d_exact").get<std::string>());
        c.members.push_back(std::move(m));
    }
    return c;
}

inline std::string edges_str(const NetworkGraph& g) {
    std::string s;
    for (auto [a, b] : g.edges()) {
        if (!s.empty()) s += ' ';
        s += std::to_string(a) + ">" + std::to_string(b);
    }
    return s;
}

inline std::string export_catalog(const Catalog& c, const std::string& format) {
    if (format == "json") return catalog_to_json(c).dump(2) + "\n";
    if (format == "csv") {
        std::ostringstream os;
        os << "index,k,l,V,E,F,d,T,dense,code,edges\n";
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            auto& m = c.members[i];
            os << i << ',' << m.inv.k << ',' << m.inv.l << ',' << m.inv.num_vertices << ',' << m.inv.num_edges << ','
               << m.inv.num_faces << ',' << rational_str(m.dim) << ',' << m.inv.geodesic_count << ','
               << (m.inv.dense ? 1 : 0) << ',' << code_hex(m.code) << ',' << edges_str(m.graph) << '\n';
        }
        return os.str();
    }
    if (format == "dot") {
        std::ostringstream os;
        os << "digraph catalog {\n  rankdir=LR;\n";
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            auto& m = c.members[i];
            const auto& g = m.graph;
            os << "  subgraph cluster_" << i << " {\n    label=\"#" << i << " k=" << m.inv.k << " l=" << m.inv.l
               << " |V|=" << m.inv.num_vertices << " d=" << rational_str(m.dim) << " T=" << m.inv.geodesic_count
               << (m.inv.dense ? " dense" : "") << "\";\n";
            for (int v = 0; v < g.num_vertices(); ++v) {
                os << "    g" << i << "_" << v;
                if (v == g.source()) os << " [label=\"p\", shape=box, style=filled, fillcolor=lightblue]";
                else if (v == g.sink()) os << " [label=\"q\", shape=box, style=filled, fillcolor=salmon]";
                else os << " [label=\"\", shape=circle, width=0.15]";
                os << ";\n";
            }
            for (auto [a, b] : g.edges()) os << "    g" << i << "_" << a << " -> g" << i << "_" << b << ";\n";
            os << "  }\n";
        }
        os << "}\n";
        return os.str();
    }
    throw std::invalid_argument("export_catalog: unknown format '" + format + "'");
}

inline std::string summary_csv(const SummaryTable& s) {
    std::ostringstream os;
    os << "T,members,max_d,countable\n";
    for (auto& r : s.by_geodesics)
        os << r.geodesics << ',' << r.members << ',' << rational_str(r.max_dim) << ',' << (r.countable ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace geonet
