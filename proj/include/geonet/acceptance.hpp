// acceptance.hpp - the end-to-end checks run by `geonet verify` and by the
// acceptance test binary. Report text carries no timings so that two runs
// with the same seed are byte-identical.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "botany.hpp"
#include "bridges.hpp"
#include "forest.hpp"
#include "lpp.hpp"
#include "netgraph.hpp"
#include "planted.hpp"
#include "rng.hpp"

namespace geonet::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;  // wall time; never written to the report
};

struct Options {
    std::uint64_t seed = 1;
    long mc_trials = 100000;
    int mc_grid_steps = 200;
    long slope_trials = 100000;
    int threads = 0;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

template <class F>
CriterionResult timed(int id, std::string name, double limit_seconds, F body) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    auto t0 = std::chrono::steady_clock::now();
    body(r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_seconds > 0 && r.seconds >= limit_seconds) {
        r.pass = false;
        r.detail += "; time limit exceeded";
    }
    return r;
}

// Rank of a rational matrix by exact elimination.
inline int exact_rank(std::vector<std::vector<Rational>> a) {
    int rank = 0;
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (a[r][c].numerator() != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(a[piv], a[rank]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || a[r][c].numerator() == 0) continue;
            Rational f = a[r][c] / a[rank][c];
            for (int j = c; j < cols; ++j) a[r][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

// Every lattice path from u to v, by recursion on the step set.
inline void all_paths(const lpp::LppEnvironment& env, lpp::Site u, lpp::Site v,
                      const std::function<void(const std::vector<lpp::Site>&)>& emit) {
    std::vector<lpp::Site> cur{u};
    std::function<void()> rec = [&] {
        auto s = cur.back();
        if (s == v) { emit(cur); return; }
        std::vector<lpp::Site> next{{s.x + 1, s.t}, {s.x, s.t + 1}};
        if (env.diagonal()) next.push_back({s.x + 1, s.t + 1});
        for (auto q : next) {
            if (q.x > v.x || q.t > v.t) continue;
            cur.push_back(q);
            rec();
            cur.pop_back();
        }
    };
    rec();
}

inline double path_sum(const lpp::LppEnvironment& env, const std::vector<lpp::Site>& p) {
    double s = 0;
    for (auto q : p) s += env.w(q);
    return s;
}

}  // namespace detail

inline CriterionResult check_enumeration() {
    return detail::timed(1, "enumeration count", 5.0, [](CriterionResult& r) {
        auto c = enumerate_landscape();
        auto s = catalog_summary(c);
        std::vector<int> sub;
        for (auto key : {std::pair{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}) sub.push_back(s.by_degrees[key]);
        r.pass = c.members.size() == 27 && sub == std::vector<int>{1, 1, 1, 3, 6, 15};
        std::ostringstream os;
        os << c.members.size() << " members; subcounts (1,1) (1,2) (1,3) (2,2) (2,3) (3,3) =";
        for (int x : sub) os << ' ' << x;
        r.detail = os.str();
    });
}

inline CriterionResult check_geodesic_table() {
    return detail::timed(2, "geodesic-count table", 0, [](CriterionResult& r) {
        auto c = enumerate_landscape();
        auto s = catalog_summary(c);
        std::map<long long, Rational> maxd;
        std::map<long long, bool> zero;
        for (auto& row : s.by_geodesics) { maxd[row.geodesics] = row.max_dim; zero[row.geodesics] = row.countable; }
        bool ok = s.max_geodesics == 9;
        const long long want[] = {10, 8, 6, 6, 3, 3};
        std::ostringstream os;
        os << "max T = " << s.max_geodesics << "; max d for T=1..6:";
        for (int t = 1; t <= 6; ++t) {
            bool has = maxd.count(t) > 0;
            os << ' ' << (has ? rational_str(maxd[t]) : std::string("-"));
            ok = ok && has && maxd[t] == Rational(want[t - 1]);
        }
        os << "; d = 0 for T=7,8,9:";
        for (int t = 7; t <= 9; ++t) {
            bool z = zero.count(t) && zero[t];
            os << ' ' << (z ? "yes" : "no");
            ok = ok && z;
        }
        r.pass = ok;
        r.detail = os.str();
    });
}

inline CriterionResult check_d_identity() {
    return detail::timed(3, "d(G) double identity and vertex bounds", 0, [](CriterionResult& r) {
        auto c = enumerate_landscape();
        int bad = 0;
        for (auto& m : c.members) {
            const auto& g = m.graph;
            long long k = g.k(), l = g.l(), V = g.num_vertices(), E = g.num_edges();
            long long F = E - V + 2;
            long long twice_a = 24 - (V + k * k + l * l);
            long long twice_b = 2 * (11 - F - k * (k - 1) / 2 - l * (l - 1) / 2);
            bool ok = twice_a == twice_b && twice_a == m.inv.d_value.twice() && F == face_count(g);
            ok = ok && twice_a >= 0 && twice_a <= 20;
            ok = ok && 2 + std::abs(k - l) <= V && V <= k + l;
            if (!ok) ++bad;
        }
        r.pass = bad == 0 && c.members.size() == 27;
        r.detail = std::to_string(c.members.size() - bad) + "/" + std::to_string(c.members.size()) + " members satisfy both forms, 0 <= d <= 10 and 2+|k-l| <= |V| <= k+l";
    });
}

inline CriterionResult check_density() {
    return detail::timed(4, "density classification", 0, [](CriterionResult& r) {
        auto c = enumerate_landscape();
        std::vector<std::tuple<int, int, long long>> dense;
        for (auto& m : c.members)
            if (m.inv.dense) dense.emplace_back(std::min(m.inv.k, m.inv.l), std::max(m.inv.k, m.inv.l), count_geodesics(m.graph));
        std::sort(dense.begin(), dense.end());
        const std::vector<std::tuple<int, int, long long>> want = {{1, 1, 1}, {1, 2, 2}, {1, 3, 3}, {2, 2, 4}, {2, 3, 6}, {3, 3, 9}};
        r.pass = dense == want;
        std::ostringstream os;
        os << dense.size() << " dense members:";
        for (auto [k, l, t] : dense) os << " (" << k << ',' << l << ",T=" << t << ')';
        r.detail = os.str();
    });
}

inline CriterionResult check_star_profiles() {
    return detail::timed(5, "star-profile enumeration", 0, [](CriterionResult& r) {
        auto base = enumerate_landscape();
        auto land = enumerate_with_star_profile(StarProfile::landscape());
        auto bm = enumerate_with_star_profile(StarProfile::brownian_map());
        auto lqg = enumerate_with_star_profile(StarProfile::parse("name=lqg\nstar.1=5\nstar.2=4\nstar.3=2\nstar.4=3/2\n"));
        auto extras = [&](const Catalog& c) {
            std::vector<const CatalogMember*> out;
            auto b = base.codes();
            for (auto& m : c.members)
                if (!b.count(m.code)) out.push_back(&m);
            return out;
        };
        bool land_ok = land.codes() == base.codes() && land.members.size() == 27;
        auto bx = extras(bm);
        bool bm_ok = bm.members.size() == 28 && bx.size() == 1 && std::min(bx[0]->inv.k, bx[0]->inv.l) == 3 &&
                     std::max(bx[0]->inv.k, bx[0]->inv.l) == 4 && bx[0]->inv.num_vertices == 3;
        auto lx = extras(lqg);
        bool quad = false, has43 = false;
        for (auto* m : lx) {
            if (m->inv.k == 4 && m->inv.l == 4 && m->inv.num_vertices == 2) quad = true;
            if (bm_ok && m->code == bx[0]->code) has43 = true;
        }
        bool lqg_ok = lqg.members.size() == 29 && lx.size() == 2 && quad && has43;
        for (auto& m : base.members) lqg_ok = lqg_ok && lqg.codes().count(m.code);
        r.pass = land_ok && bm_ok && lqg_ok;
        std::ostringstream os;
        os << "landscape " << land.members.size() << (land_ok ? " (same codes)" : " (codes differ)") << "; brownian_map "
           << bm.members.size();
        if (bx.size() == 1) os << " (extra k,l,V = " << bx[0]->inv.l << ',' << bx[0]->inv.k << ',' << bx[0]->inv.num_vertices << ')';
        os << "; lqg " << lqg.members.size() << (quad ? " (adds quadruple edge)" : "");
        r.detail = os.str();
    });
}

inline CriterionResult check_weight_space(std::uint64_t seed) {
    return detail::timed(6, "W(Z) dimension", 0, [seed](CriterionResult& r) {
        auto c = enumerate_landscape();
        auto eng = make_engine(seed, "acceptance.weights");
        std::uniform_int_distribution<int> num(1, 640);
        int checks = 0, good = 0;
        for (auto& m : c.members) {
            auto f0 = interior_forest(m.graph);
            const int k = m.inv.k, l = m.inv.l, V = m.inv.num_vertices;
            const int predicted = (k + l - V) / 2 + 2;
            for (int rep = 0; rep < 10; ++rep) {
                // dyadic weights j/64: exact in double, so path sums are exact too
                std::vector<double> w(f0.edges().size());
                for (auto& x : w) x = num(eng) / 64.0;
                auto f = f0.with_weights(w);
                std::vector<Rational> pw;
                for (double d : pair_weights(f)) pw.push_back(Rational(static_cast<long long>(d * 64), 64));
                auto sys = weight_constraint_system<Rational>(f, pw);
                auto aug = sys.rows;
                for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(sys.rhs[i]);
                int rk = detail::exact_rank(sys.rows);
                bool consistent = detail::exact_rank(aug) == rk;
                int exact_dim = sys.cols - rk;
                auto W = weight_constraint_space(f);
                ++checks;
                if (consistent && exact_dim == predicted && exact_dim == f.component_count() + 1 && W.dim() == exact_dim) ++good;
            }
        }
        r.pass = good == checks && checks == 270;
        r.detail = std::to_string(good) + "/" + std::to_string(checks) + " weightings give dim W = (k+l-|V|)/2 + 2 = c + 1 (exact rational rank, float rank agrees)";
    });
}

inline CriterionResult check_lpp_oracle(std::uint64_t seed) {
    return detail::timed(7, "LPP brute-force equivalence", 0, [seed](CriterionResult& r) {
        using namespace lpp;
        int envs = 0, pairs = 0, disjoint = 0, bad = 0;
        for (int rep = 0; rep < 3; ++rep)
            for (int W = 1; W <= 7; ++W)
                for (int H = 1; H <= 7; ++H) {
                    EnvSpec spec;
                    spec.width = W;
                    spec.height = H;
                    spec.model = (W + H + rep) % 2 ? Model::exponential : Model::geometric;
                    auto env_seed = derive_seed(seed, "acceptance.lpp", static_cast<std::uint64_t>(envs));
                    auto env = build_environment(spec, env_seed);
                    ++envs;
                    for (int ut = 0; ut < H; ++ut)
                        for (int ux = 0; ux < W; ++ux)
                            for (int vt = ut; vt < H; ++vt)
                                for (int vx = ux; vx < W; ++vx) {
                                    Site u{ux, ut}, v{vx, vt};
                                    double best = kNegInf;
                                    std::vector<std::vector<Site>> all;
                                    detail::all_paths(env, u, v, [&](const std::vector<Site>& p) {
                                        double s = detail::path_sum(env, p);
                                        if (s > best) { best = s; all.clear(); }
                                        if (s == best) all.push_back(p);
                                    });
                                    auto gs = all_geodesics(env, u, v, 0.0);
                                    std::vector<std::vector<Site>> got;
                                    for (auto& p : gs.paths) got.push_back(p.sites());
                                    std::sort(all.begin(), all.end());
                                    std::sort(got.begin(), got.end());
                                    ++pairs;
                                    if (passage_value(env, u, v) != best || gs.max_weight != best || got != all) ++bad;
                                    if (ut == 0 && vt == H - 1) {
                                        ++disjoint;
                                        if (disjoint_passage_value(env, {ux}, {vx}, ut, vt) != best) ++bad;
                                    }
                                }
                    // two disjoint paths between rows s and t
                    auto eng = make_engine(env_seed, "acceptance.lpp.disjoint");
                    for (int trial = 0; trial < 6; ++trial) {
                        std::uniform_int_distribution<int> X(0, W - 1), T(0, H - 1);
                        int a = X(eng), b = X(eng), c2 = X(eng), d = X(eng), s = T(eng), t = T(eng);
                        if (a > b) std::swap(a, b);
                        if (c2 > d) std::swap(c2, d);
                        if (s > t) std::swap(s, t);
                        if (a > c2 || b > d) continue;
                        auto idx = [&](Site q) { return q.t * W + q.x; };
                        std::vector<std::pair<std::uint64_t, double>> p1, p2;
                        detail::all_paths(env, {a, s}, {c2, t}, [&](const std::vector<Site>& p) {
                            std::uint64_t m = 0;
                            for (auto q : p) m |= 1ULL << idx(q);
                            p1.emplace_back(m, detail::path_sum(env, p));
                        });
                        detail::all_paths(env, {b, s}, {d, t}, [&](const std::vector<Site>& p) {
                            std::uint64_t m = 0;
                            for (auto q : p) m |= 1ULL << idx(q);
                            p2.emplace_back(m, detail::path_sum(env, p));
                        });
                        std::uint64_t allowed = 0;
                        if (a == b) allowed |= 1ULL << idx({a, s});
                        if (c2 == d) allowed |= 1ULL << idx({c2, t});
                        double best = kNegInf;
                        for (auto& [m1, w1] : p1)
                            for (auto& [m2, w2] : p2)
                                if ((m1 & m2 & ~allowed) == 0) best = std::max(best, w1 + w2);
                        ++disjoint;
                        if (disjoint_passage_value(env, {a, b}, {c2, d}, s, t) != best) ++bad;
                    }
                }
        r.pass = bad == 0 && envs >= 100;
        r.detail = std::to_string(envs) + " environments (all shapes up to 7x7), " + std::to_string(pairs) + " endpoint pairs, " +
                   std::to_string(disjoint) + " disjoint tuples, " + std::to_string(bad) + " mismatches";
    });
}

inline CriterionResult check_inequalities(std::uint64_t seed) {
    return detail::timed(8, "quadrangle and monotone difference profile", 60.0, [seed](CriterionResult& r) {
        using namespace lpp;
        EnvSpec spec;
        spec.width = spec.height = 200;
        auto env = build_environment(spec, derive_seed(seed, "acceptance.quadrangle"));
        auto eng = make_engine(seed, "acceptance.quadrangle.points");
        std::uniform_int_distribution<int> X(0, 199);
        int quad_fail = 0;
        for (int i = 0; i < 10000; ++i) {
            int p[4] = {X(eng), X(eng), X(eng), X(eng)};
            std::sort(p, p + 4);
            int s = X(eng), t = X(eng);
            if (s > t) std::swap(s, t);
            if (!quadrangle_check(env, p[0], p[1], p[2], p[3], s, t)) ++quad_fail;
        }
        int prof_fail = 0, points = 0;
        for (int e = 0; e < 50; ++e) {
            EnvSpec ps;
            ps.width = ps.height = 60;
            ps.model = e % 2 ? Model::geometric : Model::exponential;
            auto pe = build_environment(ps, derive_seed(seed, "acceptance.profile", static_cast<std::uint64_t>(e)));
            auto pick = make_engine(seed, "acceptance.profile.points", static_cast<std::uint64_t>(e));
            std::uniform_int_distribution<int> P(0, 59);
            int x1 = P(pick), x2 = P(pick), s = P(pick), t = P(pick);
            if (x1 > x2) std::swap(x1, x2);
            if (s > t) std::swap(s, t);
            if (s == t) t == 59 ? --s : ++t;
            auto F = difference_profile(pe, x1, x2, t, s);
            for (std::size_t y = 0; y + 1 < F.size(); ++y) {
                ++points;
                if (F[y + 1] > F[y]) ++prof_fail;
            }
        }
        r.pass = quad_fail == 0 && prof_fail == 0;
        r.detail = "quadrangle failures " + std::to_string(quad_fail) + "/10000; profile increases " + std::to_string(prof_fail) + "/" +
                   std::to_string(points) + " steps over 50 environments";
    });
}

inline CriterionResult check_planted() {
    return detail::timed(9, "network extraction from planted fixtures", 0, [](CriterionResult& r) {
        auto c = enumerate_landscape();
        int ok = 0;
        for (auto& m : c.members) {
            auto pn = lpp::plant_network(m.graph);
            if (canonical_code(lpp::extract_network(pn.geodesics)) == m.code) ++ok;
        }
        r.pass = ok == 27 && c.members.size() == 27;
        r.detail = std::to_string(ok) + "/" + std::to_string(c.members.size()) + " members recovered";
    });
}

inline CriterionResult check_karlin_mcgregor(const Options& opt) {
    return detail::timed(10, "Karlin-McGregor vs Monte Carlo", 120.0, [&opt](CriterionResult& r) {
        using namespace bridges;
        auto one = km_nonintersection_prob({0.0}, {0.0}, 1.0);
        bool ok = one.probability == 1.0;
        std::ostringstream os;
        os << "k=1 km=" << (one.probability == 1.0 ? "1" : detail::fmt("%.17g", one.probability));
        for (int k = 2; k <= 3; ++k) {
            std::vector<double> x;
            for (int i = 0; i < k; ++i) x.push_back(k - 1 - i);
            auto km = km_nonintersection_prob(x, x, 1.0);
            McOptions mo;
            mo.grid_steps = opt.mc_grid_steps;
            mo.threads = opt.threads;
            auto mc = mc_nonintersection_prob(x, x, 1.0, opt.mc_trials, derive_seed(opt.seed, "acceptance.km", k), mo);
            double z = std::abs(mc.estimate - km.probability) / mc.std_error;
            ok = ok && z <= 3.0;
            os << "; k=" << k << " km=" << detail::fmt("%.6f", km.probability) << " mc=" << detail::fmt("%.6f", mc.estimate) << "+-"
               << detail::fmt("%.6f", mc.std_error) << " (" << detail::fmt("%.2f", z) << " se)";
        }
        r.pass = ok;
        r.detail = os.str();
    });
}

inline CriterionResult check_slope(const Options& opt) {
    return detail::timed(11, "near-maximizer exponent", 300.0, [&opt](CriterionResult& r) {
        bridges::SlopeConfig cfg;
        cfg.trials = opt.slope_trials;
        cfg.seed = derive_seed(opt.seed, "acceptance.slope");
        cfg.threads = opt.threads;
        auto res = bridges::slope_experiment(cfg);
        bool ok = true;
        std::ostringstream os;
        for (int k : cfg.ks) {
            double s = res.slope.at(k);
            ok = ok && std::abs(s - (k - 1)) <= 0.3;
            os << (k == cfg.ks.front() ? "" : "; ") << "k=" << k << " slope=" << detail::fmt("%.3f", s) << " (target " << k - 1 << " +- 0.3)";
        }
        r.pass = ok;
        r.detail = os.str();
    });
}

// Criteria 1-11; reproducibility (12) compares two whole reports.
inline std::vector<CriterionResult> run_checks(const Options& opt, const std::function<void(const CriterionResult&)>& on_result = {}) {
    std::vector<std::function<CriterionResult()>> checks = {
        [] { return check_enumeration(); },
        [] { return check_geodesic_table(); },
        [] { return check_d_identity(); },
        [] { return check_density(); },
        [] { return check_star_profiles(); },
        [&] { return check_weight_space(opt.seed); },
        [&] { return check_lpp_oracle(opt.seed); },
        [&] { return check_inequalities(opt.seed); },
        [] { return check_planted(); },
        [&] { return check_karlin_mcgregor(opt); },
        [&] { return check_slope(opt); },
    };
    std::vector<CriterionResult> out;
    for (auto& c : checks) {
        CriterionResult r;
        try {
            r = c();
        } catch (const std::exception& e) {
            r.id = static_cast<int>(out.size()) + 1;
            r.name = "exception";
            r.pass = false;
            r.detail = e.what();
        }
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string format_line(const CriterionResult& r) {
    char head[16];
    std::snprintf(head, sizeof head, "[%2d] ", r.id);
    return std::string(head) + (r.pass ? "PASS " : "FAIL ") + r.name + ": " + r.detail;
}

inline std::string format_report(const std::vector<CriterionResult>& rs, std::uint64_t seed) {
    std::ostringstream os;
    os << "geonet verify seed=" << seed << '\n';
    int passed = 0;
    for (auto& r : rs) {
        os << format_line(r) << '\n';
        passed += r.pass;
    }
    os << passed << '/' << rs.size() << " checks passed\n";
    return os.str();
}

inline bool all_pass(const std::vector<CriterionResult>& rs) {
    return std::all_of(rs.begin(), rs.end(), [](const CriterionResult& r) { return r.pass; });
}

}  // namespace geonet::acceptance
