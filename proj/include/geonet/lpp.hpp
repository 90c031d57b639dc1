// lpp.hpp - lattice last-passage environments, geodesics, network
// extraction, overlap distance, line ensembles and disjoint tuples.
//
// Sites are (x, t): x is the column (space), t the row (time). Path weight
// is the sum of site weights with both endpoints included.
#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netgraph.hpp"
#include "rng.hpp"

namespace geonet::lpp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sampled weights are rounded to multiples of 2^-32 so that sums along
// paths of up to ~10^6 sites are exact in double precision.
inline constexpr int kQuantumBits = 32;
inline double quantize(double w) { return std::ldexp(std::round(std::ldexp(w, kQuantumBits)), -kQuantumBits); }

enum class Model { exponential, geometric, deterministic, line_ensemble };
enum class StepSet { up_right, up_right_diagonal };

inline std::string model_name(Model m) {
    switch (m) {
        case Model::exponential: return "exponential";
        case Model::geometric: return "geometric";
        case Model::deterministic: return "deterministic";
        case Model::line_ensemble: return "line_ensemble";
    }
    return "?";
}

inline Model parse_model(const std::string& s) {
    if (s == "exponential") return Model::exponential;
    if (s == "geometric") return Model::geometric;
    if (s == "deterministic") return Model::deterministic;
    if (s == "line_ensemble") return Model::line_ensemble;
    throw std::invalid_argument("unknown model '" + s + "'");
}

struct EnvSpec {
    Model model = Model::exponential;
    int width = 1;
    int height = 1;           // rows; for line_ensemble the number of lines
    double geometric_q = 0.5;  // P(w = j) = (1 - q) q^j
    double constant = 1.0;     // deterministic weight
    double grid_step = 1.0;    // line_ensemble time step
    StepSet steps = StepSet::up_right;
};

struct Site {
    int x = 0;
    int t = 0;
    friend auto operator<=>(const Site&, const Site&) = default;
};

class LppEnvironment {
public:
    LppEnvironment(EnvSpec spec, std::uint64_t seed, std::vector<double> weights)
        : spec_(spec), seed_(seed), w_(std::move(weights)) {
        if (spec_.width < 1 || spec_.height < 1) throw std::invalid_argument("LppEnvironment: extents must be >= 1");
        if (w_.size() != static_cast<std::size_t>(spec_.width) * spec_.height)
            throw std::invalid_argument("LppEnvironment: weight array size mismatch");
        for (double v : w_)
            if (!std::isfinite(v)) throw std::invalid_argument("LppEnvironment: weights must be finite");
    }

    // rows[t][x]
    static LppEnvironment from_rows(const std::vector<std::vector<double>>& rows, StepSet steps = StepSet::up_right) {
        if (rows.empty() || rows[0].empty()) throw std::invalid_argument("from_rows: empty grid");
        EnvSpec s;
        s.model = Model::deterministic;
        s.height = static_cast<int>(rows.size());
        s.width = static_cast<int>(rows[0].size());
        s.steps = steps;
        std::vector<double> w;
        for (auto& r : rows) {
            if (static_cast<int>(r.size()) != s.width) throw std::invalid_argument("from_rows: ragged grid");
            w.insert(w.end(), r.begin(), r.end());
        }
        return LppEnvironment(s, 0, w);
    }

    const EnvSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    int width() const { return spec_.width; }
    int height() const { return spec_.height; }
    bool diagonal() const { return spec_.steps == StepSet::up_right_diagonal; }
    bool contains(Site s) const { return s.x >= 0 && s.x < spec_.width && s.t >= 0 && s.t < spec_.height; }
    double w(Site s) const { return w_[static_cast<std::size_t>(s.t) * spec_.width + s.x]; }
    double w(int x, int t) const { return w({x, t}); }
    const std::vector<double>& weights() const { return w_; }

    // For line_ensemble environments: row i-1 is f_i sampled on the grid.
    std::vector<std::vector<double>> lines() const {
        std::vector<std::vector<double>> f(spec_.height);
        for (int i = 0; i < spec_.height; ++i)
            f[i].assign(w_.begin() + static_cast<std::ptrdiff_t>(i) * spec_.width,
                        w_.begin() + static_cast<std::ptrdiff_t>(i + 1) * spec_.width);
        return f;
    }

private:
    EnvSpec spec_;
    std::uint64_t seed_;
    std::vector<double> w_;
};

inline LppEnvironment build_environment(const EnvSpec& spec, std::uint64_t seed) {
    if (spec.width < 1 || spec.height < 1) throw std::invalid_argument("build_environment: extents must be >= 1");
    const std::size_t n = static_cast<std::size_t>(spec.width) * spec.height;
    std::vector<double> w(n);
    Engine eng(derive_seed(seed, "lpp.environment"));
    switch (spec.model) {
        case Model::exponential: {
            std::exponential_distribution<double> d(1.0);
            for (auto& v : w) v = quantize(d(eng));
            break;
        }
        case Model::geometric: {
            if (!(spec.geometric_q >= 0.0 && spec.geometric_q < 1.0))
                throw std::invalid_argument("build_environment: geometric q must lie in [0, 1)");
            std::geometric_distribution<int> d(1.0 - spec.geometric_q);
            for (auto& v : w) v = d(eng);
            break;
        }
        case Model::deterministic:
            if (!std::isfinite(spec.constant)) throw std::invalid_argument("build_environment: bad constant");
            std::fill(w.begin(), w.end(), spec.constant);
            break;
        case Model::line_ensemble: {
            if (!(spec.grid_step > 0.0)) throw std::invalid_argument("build_environment: grid step must be positive");
            // diffusion parameter 2: increments N(0, 2 h)
            std::normal_distribution<double> d(0.0, std::sqrt(2.0 * spec.grid_step));
            for (int i = 0; i < spec.height; ++i) {
                double acc = 0.0;
                for (int j = 0; j < spec.width; ++j) {
                    if (j > 0) acc = quantize(acc + d(eng));
                    w[static_cast<std::size_t>(i) * spec.width + j] = acc;
                }
            }
            break;
        }
    }
    return LppEnvironment(spec, seed, std::move(w));
}

// A monotone lattice path; steps are R (x+1), U (t+1) and D (x+1, t+1).
class LatticePath {
public:
    LatticePath() = default;
    explicit LatticePath(std::vector<Site> sites) : sites_(std::move(sites)) {
        if (sites_.empty()) throw std::invalid_argument("LatticePath: empty");
        for (std::size_t i = 1; i < sites_.size(); ++i) {
            int dx = sites_[i].x - sites_[i - 1].x, dt = sites_[i].t - sites_[i - 1].t;
            bool ok = (dx == 1 && dt == 0) || (dx == 0 && dt == 1) || (dx == 1 && dt == 1);
            if (!ok) throw std::invalid_argument("LatticePath: non-contiguous or non-monotone step");
        }
    }
    const std::vector<Site>& sites() const { return sites_; }
    Site front() const { return sites_.front(); }
    Site back() const { return sites_.back(); }
    std::size_t size() const { return sites_.size(); }
    bool uses_diagonal() const {
        for (std::size_t i = 1; i < sites_.size(); ++i)
            if (sites_[i].x != sites_[i - 1].x && sites_[i].t != sites_[i - 1].t) return true;
        return false;
    }
    double weight(const LppEnvironment& env) const {
        double s = 0.0;
        for (auto p : sites_) s += env.w(p);
        return s;
    }
    // Occupied x-range on row t; {1, 0} (empty) if the path misses the row.
    std::pair<int, int> row_span(int t) const {
        int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
        for (auto p : sites_)
            if (p.t == t) { lo = std::min(lo, p.x); hi = std::max(hi, p.x); }
        if (lo > hi) return {1, 0};
        return {lo, hi};
    }
    bool operator==(const LatticePath& o) const { return sites_ == o.sites_; }
    bool operator<(const LatticePath& o) const { return sites_ < o.sites_; }

private:
    std::vector<Site> sites_;
};

struct GeodesicSet {
    Site u;
    Site v;
    double max_weight = 0.0;
    std::vector<LatticePath> paths;
    double slack = 0.0;
    bool planted = false;  // assembled from given paths, not from an environment
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultPathBudget = 100000;

namespace detail {

inline void require_ordered(const LppEnvironment& env, Site u, Site v, const char* who) {
    if (!env.contains(u) || !env.contains(v)) throw std::out_of_range(std::string(who) + ": endpoint outside grid");
    if (u.x > v.x || u.t > v.t) throw std::invalid_argument(std::string(who) + ": endpoints are not ordered");
}

// DP tables on the rectangle [u, v].
struct Rect {
    Site u, v;
    int w, h;
    Rect(Site a, Site b) : u(a), v(b), w(b.x - a.x + 1), h(b.t - a.t + 1) {}
    std::size_t idx(Site s) const { return static_cast<std::size_t>(s.t - u.t) * w + (s.x - u.x); }
    bool in(Site s) const { return s.x >= u.x && s.x <= v.x && s.t >= u.t && s.t <= v.t; }
};

// predecessor steps in leftmost preference order: R, D, U
inline std::vector<Site> preds(const LppEnvironment& env, Site s) {
    std::vector<Site> p{{s.x - 1, s.t}};
    if (env.diagonal()) p.push_back({s.x - 1, s.t - 1});
    p.push_back({s.x, s.t - 1});
    return p;
}

inline std::vector<Site> succs(const LppEnvironment& env, Site s) {
    std::vector<Site> p{{s.x + 1, s.t}};
    if (env.diagonal()) p.push_back({s.x + 1, s.t + 1});
    p.push_back({s.x, s.t + 1});
    return p;
}

inline std::vector<double> forward_table(const LppEnvironment& env, const Rect& r) {
    std::vector<double> F(static_cast<std::size_t>(r.w) * r.h, kNegInf);
    for (int t = r.u.t; t <= r.v.t; ++t)
        for (int x = r.u.x; x <= r.v.x; ++x) {
            Site s{x, t};
            double best = s == r.u ? 0.0 : kNegInf;
            for (auto p : preds(env, s))
                if (r.in(p)) best = std::max(best, F[r.idx(p)]);
            F[r.idx(s)] = best + env.w(s);
        }
    return F;
}

inline std::vector<double> backward_table(const LppEnvironment& env, const Rect& r) {
    std::vector<double> B(static_cast<std::size_t>(r.w) * r.h, kNegInf);
    for (int t = r.v.t; t >= r.u.t; --t)
        for (int x = r.v.x; x >= r.u.x; --x) {
            Site s{x, t};
            double best = s == r.v ? 0.0 : kNegInf;
            for (auto q : succs(env, s))
                if (r.in(q)) best = std::max(best, B[r.idx(q)]);
            B[r.idx(s)] = best + env.w(s);
        }
    return B;
}

}  // namespace detail

inline double passage_value(const LppEnvironment& env, Site u, Site v) {
    detail::require_ordered(env, u, v, "passage_value");
    detail::Rect r(u, v);
    return detail::forward_table(env, r)[r.idx(v)];
}

// L(u -> v), or -infinity when v is not reachable from u.
inline double passage_or_neg_inf(const LppEnvironment& env, Site u, Site v) {
    if (u.x > v.x || u.t > v.t) return kNegInf;
    return passage_value(env, u, v);
}

enum class Side { left, right };

inline LatticePath extremal_geodesic(const LppEnvironment& env, Site u, Site v, Side side) {
    detail::require_ordered(env, u, v, "extremal_geodesic");
    detail::Rect r(u, v);
    auto F = detail::forward_table(env, r);
    std::vector<Site> rev{v};
    Site s = v;
    while (s != u) {
        auto ps = detail::preds(env, s);
        if (side == Side::right) std::reverse(ps.begin(), ps.end());
        double need = F[r.idx(s)] - env.w(s);
        bool moved = false;
        for (auto p : ps)
            if (r.in(p) && F[r.idx(p)] == need) { s = p; moved = true; break; }
        if (!moved) throw std::logic_error("extremal_geodesic: backtrack failed");
        rev.push_back(s);
    }
    std::reverse(rev.begin(), rev.end());
    return LatticePath(rev);
}

inline GeodesicSet all_geodesics(const LppEnvironment& env, Site u, Site v, double slack = 0.0,
                                 std::size_t budget = kDefaultPathBudget) {
    detail::require_ordered(env, u, v, "all_geodesics");
    if (slack < 0) throw std::invalid_argument("all_geodesics: negative slack");
    detail::Rect r(u, v);
    auto B = detail::backward_table(env, r);
    GeodesicSet gs{u, v, B[r.idx(u)], {}, slack, false};
    const double floor = gs.max_weight - slack;
    std::vector<Site> stack{u};
    std::function<void(Site, double)> dfs = [&](Site s, double acc) {
        if (s == v) {
            if (gs.paths.size() >= budget)
                throw BudgetExceeded("all_geodesics: more than " + std::to_string(budget) + " paths; shrink the slack");
            gs.paths.emplace_back(stack);
            return;
        }
        for (auto q : detail::succs(env, s)) {
            if (!r.in(q) || acc + B[r.idx(q)] < floor) continue;
            stack.push_back(q);
            dfs(q, acc + env.w(q));
            stack.pop_back();
        }
    };
    dfs(u, env.w(u));
    return gs;
}

// Sites lying on at least one geodesic from u to v.
inline std::set<Site> geodesic_sites(const LppEnvironment& env, Site u, Site v) {
    detail::require_ordered(env, u, v, "geodesic_sites");
    detail::Rect r(u, v);
    auto F = detail::forward_table(env, r), B = detail::backward_table(env, r);
    const double L = F[r.idx(v)];
    std::set<Site> out;
    for (int t = u.t; t <= v.t; ++t)
        for (int x = u.x; x <= v.x; ++x) {
            Site s{x, t};
            if (F[r.idx(s)] + B[r.idx(s)] - env.w(s) == L) out.insert(s);
        }
    return out;
}

inline GeodesicSet planted_geodesic_set(std::vector<LatticePath> paths) {
    if (paths.empty()) throw std::invalid_argument("planted_geodesic_set: no paths");
    GeodesicSet gs;
    gs.u = paths.front().front();
    gs.v = paths.front().back();
    for (auto& p : paths)
        if (p.front() != gs.u || p.back() != gs.v) throw std::invalid_argument("planted_geodesic_set: endpoints differ");
    gs.paths = std::move(paths);
    gs.planted = true;
    return gs;
}

// Branch points of the union of the paths become vertices; branch-free
// chains become edges. Source is vertex 0, sink vertex 1, the rest follow
// in (t, x) order.
inline NetworkGraph extract_network(const GeodesicSet& gs) {
    if (gs.paths.empty()) throw std::invalid_argument("extract_network: empty geodesic set");
    std::set<std::pair<Site, Site>> steps;
    for (auto& p : gs.paths) {
        if (p.front() != gs.u || p.back() != gs.v) throw std::invalid_argument("extract_network: path endpoints differ");
        for (std::size_t i = 1; i < p.size(); ++i) steps.insert({p.sites()[i - 1], p.sites()[i]});
    }
    std::map<Site, std::vector<Site>> out;
    std::map<Site, int> indeg, outdeg;
    for (auto& [a, b] : steps) {
        out[a].push_back(b);
        ++outdeg[a];
        ++indeg[b];
    }
    std::map<Site, int> id;
    id[gs.u] = 0;
    id[gs.v] = 1;
    std::vector<Site> branch;
    std::set<Site> sites;
    for (auto& [a, b] : steps) { sites.insert(a); sites.insert(b); }
    for (auto s : sites)
        if (s != gs.u && s != gs.v && (indeg[s] > 1 || outdeg[s] > 1)) branch.push_back(s);
    std::sort(branch.begin(), branch.end(), [](Site a, Site b) { return std::tie(a.t, a.x) < std::tie(b.t, b.x); });
    for (auto s : branch) id.emplace(s, static_cast<int>(id.size()));
    std::vector<NetworkGraph::Edge> edges;
    for (auto& [s, vid] : id) {
        for (auto nxt : out[s]) {
            Site c = nxt;
            while (!id.count(c)) c = out[c].front();  // chain sites have exactly one successor
            edges.emplace_back(vid, id.at(c));
        }
    }
    if (gs.u == gs.v) throw std::invalid_argument("extract_network: degenerate endpoints");
    return NetworkGraph(static_cast<int>(id.size()), 0, 1, edges);
}

// Length of the step set weighted by the time increment x + t (R, U: 1; D: 2).
inline double overlap_distance(const LatticePath& a, const LatticePath& b, double grid_step = 1.0) {
    auto step_set = [](const LatticePath& p) {
        std::map<std::pair<Site, Site>, int> m;
        for (std::size_t i = 1; i < p.size(); ++i) {
            auto s = p.sites()[i - 1], e = p.sites()[i];
            m[{s, e}] = (e.x - s.x) + (e.t - s.t);
        }
        return m;
    };
    auto sa = step_set(a), sb = step_set(b);
    double la = 0, lb = 0, shared = 0;
    for (auto& [k, v] : sa) { la += v; if (sb.count(k)) shared += v; }
    for (auto& [k, v] : sb) lb += v;
    return (la + lb - 2 * shared) * grid_step;
}

// max over nonincreasing line paths from (x, n) to (y, m) of
// sum_i f_i(pi_i) - f_i(pi_{i+1}); f[i-1] is line i sampled on the grid.
inline double line_ensemble_value(const std::vector<std::vector<double>>& f, int x, int n, int y, int m) {
    const int K = static_cast<int>(f.size());
    if (K == 0) throw std::invalid_argument("line_ensemble_value: no lines");
    const int G = static_cast<int>(f[0].size());
    for (auto& line : f)
        if (static_cast<int>(line.size()) != G) throw std::invalid_argument("line_ensemble_value: ragged lines");
    if (m < 1 || n > K || m > n) throw std::invalid_argument("line_ensemble_value: need 1 <= m <= n <= lines");
    if (x < 0 || y >= G || x > y) throw std::invalid_argument("line_ensemble_value: need 0 <= x <= y < grid");
    // V[i] = best value on line i at the current time
    std::vector<double> V(K + 1, kNegInf);
    V[n] = 0.0;
    for (int j = x;; ++j) {
        for (int i = n; i > m; --i) V[i - 1] = std::max(V[i - 1], V[i]);  // jumps at time j
        if (j == y) break;
        for (int i = m; i <= n; ++i)
            if (V[i] != kNegInf) V[i] += f[i - 1][j + 1] - f[i - 1][j];
    }
    return V[m];
}

// Maximum total weight of k up-right paths from (xs[i], s_row) to
// (ys[i], t_row), pairwise vertex-disjoint except at shared endpoints.
// Each path counts its own endpoints. -infinity if no such tuple exists.
inline double disjoint_passage_value(const LppEnvironment& env, const std::vector<int>& xs, const std::vector<int>& ys,
                                     int s_row, int t_row) {
    if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("disjoint_passage_value: dimension mismatch");
    if (env.diagonal()) throw std::invalid_argument("disjoint_passage_value: up-right step set only");
    if (s_row < 0 || t_row >= env.height() || s_row > t_row) throw std::invalid_argument("disjoint_passage_value: bad rows");
    const int k = static_cast<int>(xs.size());
    for (int i = 0; i < k; ++i) {
        if (xs[i] < 0 || ys[i] >= env.width() || xs[i] > ys[i])
            throw std::invalid_argument("disjoint_passage_value: endpoints out of order");
        if (i > 0 && (xs[i] < xs[i - 1] || ys[i] < ys[i - 1]))
            throw std::invalid_argument("disjoint_passage_value: endpoint vectors must be weakly increasing");
    }
    // antidiagonal tau = x + t; path i lives on [xs[i] + s_row, ys[i] + t_row]
    std::vector<int> t0(k), t1(k);
    int tau_lo = std::numeric_limits<int>::max(), tau_hi = 0;
    for (int i = 0; i < k; ++i) {
        t0[i] = xs[i] + s_row;
        t1[i] = ys[i] + t_row;
        tau_lo = std::min(tau_lo, t0[i]);
        tau_hi = std::max(tau_hi, t1[i]);
    }
    const int dead = -1;
    auto valid = [&](const std::vector<int>& pos, int tau) {
        int prev = -1;
        int prev_i = -1;
        for (int i = 0; i < k; ++i) {
            if (pos[i] == dead) continue;
            if (prev_i >= 0 && pos[i] <= prev) {
                bool shared_start = pos[i] == prev && tau == t0[i] && tau == t0[prev_i] && xs[i] == xs[prev_i];
                bool shared_end = pos[i] == prev && tau == t1[i] && tau == t1[prev_i] && ys[i] == ys[prev_i];
                if (!shared_start && !shared_end) return false;
            }
            prev = pos[i];
            prev_i = i;
        }
        return true;
    };
    auto site_weight = [&](const std::vector<int>& pos, int tau) {
        double s = 0;
        for (int i = 0; i < k; ++i)
            if (pos[i] != dead) s += env.w(pos[i], tau - pos[i]);
        return s;
    };
    std::map<std::vector<int>, double> cur;
    {
        std::vector<int> pos(k, dead);
        for (int i = 0; i < k; ++i)
            if (t0[i] == tau_lo) pos[i] = xs[i];
        if (!valid(pos, tau_lo)) return kNegInf;
        cur[pos] = site_weight(pos, tau_lo);
    }
    for (int tau = tau_lo; tau < tau_hi; ++tau) {
        std::map<std::vector<int>, double> nxt;
        for (auto& [pos, val] : cur) {
            std::vector<int> np(k, dead);
            std::function<void(int)> rec = [&](int i) {
                if (i == k) {
                    if (!valid(np, tau + 1)) return;
                    double v = val + site_weight(np, tau + 1);
                    auto [it, ins] = nxt.emplace(np, v);
                    if (!ins) it->second = std::max(it->second, v);
                    return;
                }
                if (tau + 1 == t0[i]) { np[i] = xs[i]; rec(i + 1); return; }
                if (tau + 1 < t0[i] || tau + 1 > t1[i]) { np[i] = dead; rec(i + 1); return; }
                for (int dx = 0; dx <= 1; ++dx) {  // U keeps x, R adds one
                    int x = pos[i] + dx, t = tau + 1 - x;
                    if (x > ys[i] || t > t_row || t < s_row) continue;
                    np[i] = x;
                    rec(i + 1);
                }
            };
            rec(0);
        }
        cur = std::move(nxt);
        if (cur.empty()) return kNegInf;
    }
    double best = kNegInf;
    for (auto& [pos, val] : cur) best = std::max(best, val);
    return best;
}

// F(y) = L((y, s) -> (x1, t)) - L((y, s) -> (x2, t)) for y = 0..x1.
inline std::vector<double> difference_profile(const LppEnvironment& env, int x1, int x2, int t_row, int s_row) {
    if (s_row < 0 || t_row >= env.height() || s_row >= t_row)
        throw std::invalid_argument("difference_profile: need 0 <= s_row < t_row < height");
    if (x1 < 0 || x2 >= env.width() || x1 > x2) throw std::invalid_argument("difference_profile: need 0 <= x1 <= x2 < width");
    detail::Rect r1({0, s_row}, {x1, t_row}), r2({0, s_row}, {x2, t_row});
    auto B1 = detail::backward_table(env, r1), B2 = detail::backward_table(env, r2);
    std::vector<double> F(x1 + 1);
    for (int y = 0; y <= x1; ++y) F[y] = B1[r1.idx({y, s_row})] - B2[r2.idx({y, s_row})];
    return F;
}

// Lattice two-star split: no geodesic (y, s) -> (x1, t) meets any geodesic
// (y+1, s) -> (x2, t). Holds exactly when F(y) > F(y+1).
inline bool split_star_witness(const LppEnvironment& env, int y, int s_row, int x1, int x2, int t_row) {
    auto a = geodesic_sites(env, {y, s_row}, {x1, t_row});
    auto b = geodesic_sites(env, {y + 1, s_row}, {x2, t_row});
    for (auto s : a)
        if (b.count(s)) return false;
    return true;
}

// L(x1 -> y2) + L(x2 -> y1) <= L(x1 -> y1) + L(x2 -> y2) for starts on
// s_row and ends on t_row; undefined passage values are -infinity.
inline bool quadrangle_check(const LppEnvironment& env, int x1, int x2, int y1, int y2, int s_row, int t_row) {
    if (!(x1 <= x2 && y1 <= y2 && s_row <= t_row)) throw std::invalid_argument("quadrangle_check: invalid orderings");
    if (x1 < 0 || y2 >= env.width() || x2 >= env.width() || s_row < 0 || t_row >= env.height())
        throw std::out_of_range("quadrangle_check: point outside grid");
    auto L = [&](int a, int b) { return passage_or_neg_inf(env, {a, s_row}, {b, t_row}); };
    double lhs = L(x1, y2) + L(x2, y1);
    double rhs = L(x1, y1) + L(x2, y2);
    if (lhs == kNegInf) return true;
    return lhs <= rhs;
}

// The 1:2:3 metric: planar points (x, s) or points (x, s, y, t) of R^4.
inline double d123_distance(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("d123_distance: dimension mismatch");
    if (u.size() == 2) return std::cbrt(std::abs(u[1] - v[1])) + std::sqrt(std::abs(u[0] - v[0]));
    if (u.size() == 4)
        return std::cbrt(std::abs(u[3] - v[3])) + std::cbrt(std::abs(u[1] - v[1])) + std::sqrt(std::abs(u[0] - v[0])) +
               std::sqrt(std::abs(u[2] - v[2]));
    throw std::invalid_argument("d123_distance: points must have 2 or 4 coordinates");
}

// Spec and seed replay a sampled environment; weights are written only on
// request (needed for grids built with from_rows).
inline nlohmann::ordered_json environment_to_json(const LppEnvironment& env, bool with_weights = false) {
    const auto& s = env.spec();
    nlohmann::ordered_json j;
    j["model"] = model_name(s.model);
    j["width"] = s.width;
    j["height"] = s.height;
    j["geometric_q"] = s.geometric_q;
    j["constant"] = s.constant;
    j["grid_step"] = s.grid_step;
    j["steps"] = s.steps == StepSet::up_right ? "up_right" : "up_right_diagonal";
    j["seed"] = env.seed();
    if (with_weights) j["weights"] = env.weights();
    return j;
}

inline LppEnvironment environment_from_json(const nlohmann::json& j) {
    EnvSpec s;
    s.model = parse_model(j.at("model").get<std::string>());
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    s.geometric_q = j.value("geometric_q", s.geometric_q);
    s.constant = j.value("constant", s.constant);
    s.grid_step = j.value("grid_step", s.grid_step);
    auto steps = j.value("steps", std::string("up_right"));
    if (steps == "up_right_diagonal") s.steps = StepSet::up_right_diagonal;
    else if (steps != "up_right") throw std::invalid_argument("environment_from_json: unknown step set '" + steps + "'");
    auto seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("weights")) return LppEnvironment(s, seed, j.at("weights").get<std::vector<double>>());
    return build_environment(s, seed);
}

inline nlohmann::ordered_json geodesic_set_to_json(const GeodesicSet& gs) {
    nlohmann::ordered_json j;
    j["u"] = {gs.u.x, gs.u.t};
    j["v"] = {gs.v.x, gs.v.t};
    j["max_weight"] = gs.max_weight;
    j["slack"] = gs.slack;
    j["planted"] = gs.planted;
    j["paths"] = nlohmann::ordered_json::array();
    for (auto& p : gs.paths) {
        auto arr = nlohmann::ordered_json::array();
        for (auto s : p.sites()) arr.push_back({s.x, s.t});
        j["paths"].push_back(arr);
    }
    return j;
}

inline GeodesicSet geodesic_set_from_json(const nlohmann::json& j) {
    auto site = [](const nlohmann::json& a) { return Site{a.at(0).get<int>(), a.at(1).get<int>()}; };
    GeodesicSet gs;
    gs.u = site(j.at("u"));
    gs.v = site(j.at("v"));
    gs.max_weight = j.value("max_weight", 0.0);
    gs.slack = j.value("slack", 0.0);
    gs.planted = j.value("planted", false);
    for (auto& p : j.at("paths")) {
        std::vector<Site> sites;
        for (auto& a : p) sites.push_back(site(a));
        gs.paths.emplace_back(sites);
    }
    return gs;
}

}  // namespace geonet::lpp
