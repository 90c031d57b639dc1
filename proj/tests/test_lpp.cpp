#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "geonet/botany.hpp"
#include "geonet/lpp.hpp"
#include "geonet/planted.hpp"

using namespace geonet;
using namespace geonet::lpp;

namespace {

std::vector<LatticePath> brute_paths(const LppEnvironment& env, Site u, Site v) {
    std::vector<LatticePath> out;
    std::vector<Site> acc{u};
    std::function<void(Site)> go = [&](Site s) {
        if (s == v) { out.emplace_back(acc); return; }
        std::vector<Site> next{{s.x + 1, s.t}, {s.x, s.t + 1}};
        if (env.diagonal()) next.push_back({s.x + 1, s.t + 1});
        for (auto q : next) {
            if (q.x > v.x || q.t > v.t) continue;
            acc.push_back(q);
            go(q);
            acc.pop_back();
        }
    };
    go(u);
    return out;
}

double brute_passage(const LppEnvironment& env, Site u, Site v) {
    double best = kNegInf;
    for (auto& p : brute_paths(env, u, v)) best = std::max(best, p.weight(env));
    return best;
}

LppEnvironment random_env(int w, int h, std::uint64_t seed, Model m = Model::exponential) {
    EnvSpec s;
    s.model = m;
    s.width = w;
    s.height = h;
    return build_environment(s, seed);
}

// Two paths may share a site only as a common start or a common end.
bool disjoint_pair(const LatticePath& a, const LatticePath& b) {
    for (auto& s : a.sites())
        for (auto& r : b.sites())
            if (s == r && !(s == a.front() && s == b.front()) && !(s == a.back() && s == b.back())) return false;
    return true;
}

double brute_disjoint2(const LppEnvironment& env, int x1, int x2, int y1, int y2, int s, int t) {
    auto A = brute_paths(env, {x1, s}, {y1, t}), B = brute_paths(env, {x2, s}, {y2, t});
    double best = kNegInf;
    for (auto& a : A)
        for (auto& b : B)
            if (disjoint_pair(a, b)) best = std::max(best, a.weight(env) + b.weight(env));
    return best;
}

// Jump times z_n = x <= z_{n-1} <= ... <= z_m <= z_{m-1} = y.
double brute_line(const std::vector<std::vector<double>>& f, int x, int n, int y, int m) {
    double best = kNegInf;
    std::vector<int> z(n + 1);
    z[n] = x;
    std::function<void(int)> choose = [&](int i) {
        if (i < m) {
            double v = 0;
            for (int j = m; j <= n; ++j) v += f[j - 1][j == m ? y : z[j - 1]] - f[j - 1][z[j]];
            best = std::max(best, v);
            return;
        }
        for (int t = z[i + 1]; t <= y; ++t) { z[i] = t; choose(i - 1); }
    };
    choose(n - 1);
    return best;
}

}  // namespace

TEST(Environment, DeterministicAndQuantized) {
    auto a = random_env(16, 16, 42), b = random_env(16, 16, 42), c = random_env(16, 16, 43);
    EXPECT_EQ(a.weights(), b.weights());
    EXPECT_NE(a.weights(), c.weights());
    for (double w : a.weights()) EXPECT_EQ(w, quantize(w));
    EnvSpec d;
    d.model = Model::deterministic;
    d.width = 3;
    d.height = 2;
    d.constant = 2.5;
    auto flat = build_environment(d, 1);
    for (double w : flat.weights()) EXPECT_EQ(w, 2.5);
    EXPECT_THROW(random_env(0, 3, 1), std::invalid_argument);
    EXPECT_EQ(parse_model("geometric"), Model::geometric);
    EXPECT_THROW(parse_model("gamma"), std::invalid_argument);
}

TEST(Environment, ExponentialMean) {
    auto e = random_env(32, 16, 7);
    double s = 0;
    for (double w : e.weights()) s += w;
    EXPECT_NEAR(s / 512.0, 1.0, 5.0 / std::sqrt(512.0));
}

TEST(Passage, SmallExamples) {
    auto env = LppEnvironment::from_rows({{1, 2}, {3, 4}});
    EXPECT_EQ(passage_value(env, {0, 0}, {1, 1}), 8);
    EXPECT_EQ(passage_value(env, {1, 1}, {1, 1}), 4);
    EXPECT_THROW(passage_value(env, {1, 0}, {0, 1}), std::invalid_argument);
    EXPECT_THROW(passage_value(env, {0, 0}, {2, 0}), std::out_of_range);
}

TEST(Passage, MatchesBruteForceAndComposes) {
    for (int rep = 0; rep < 20; ++rep) {
        auto env = random_env(5, 4, 100 + rep, rep % 2 ? Model::geometric : Model::exponential);
        EXPECT_EQ(passage_value(env, {0, 0}, {4, 3}), brute_passage(env, {0, 0}, {4, 3}));
        EXPECT_EQ(passage_value(env, {1, 1}, {3, 3}), brute_passage(env, {1, 1}, {3, 3}));
        // concatenating through a middle site never beats the maximum
        double whole = passage_value(env, {0, 0}, {4, 3});
        for (int x = 0; x <= 4; ++x)
            for (int t = 0; t <= 3; ++t)
                EXPECT_LE(passage_value(env, {0, 0}, {x, t}) + passage_value(env, {x, t}, {4, 3}) - env.w(x, t), whole);
    }
}

TEST(Passage, DiagonalSteps) {
    std::vector<std::vector<double>> rows{{1, 0, 0}, {0, 0, 0}, {0, 0, 1}};
    auto env = LppEnvironment::from_rows(rows, StepSet::up_right_diagonal);
    EXPECT_EQ(passage_value(env, {0, 0}, {2, 2}), 2);
    EXPECT_EQ(brute_paths(env, {0, 0}, {1, 1}).size(), 3u);
    auto g = all_geodesics(env, {0, 0}, {2, 2});
    EXPECT_EQ(g.paths.size(), brute_paths(env, {0, 0}, {2, 2}).size());
}

TEST(Geodesics, ExtremalAndAll) {
    auto env = random_env(8, 8, 9);
    auto l = extremal_geodesic(env, {0, 0}, {7, 7}, Side::left);
    auto r = extremal_geodesic(env, {0, 0}, {7, 7}, Side::right);
    EXPECT_EQ(l, r);  // continuous weights: the geodesic is unique
    EXPECT_EQ(l.weight(env), passage_value(env, {0, 0}, {7, 7}));

    auto flat = LppEnvironment::from_rows(std::vector<std::vector<double>>(3, std::vector<double>(3, 1.0)));
    auto fl = extremal_geodesic(flat, {0, 0}, {2, 2}, Side::left);
    auto fr = extremal_geodesic(flat, {0, 0}, {2, 2}, Side::right);
    std::set<Site> ls(fl.sites().begin(), fl.sites().end()), rs(fr.sites().begin(), fr.sites().end());
    EXPECT_TRUE(ls.count({0, 2}) || rs.count({0, 2}));
    EXPECT_TRUE(ls.count({2, 0}) || rs.count({2, 0}));
    EXPECT_NE(fl, fr);
    auto all = all_geodesics(flat, {0, 0}, {1, 1});
    EXPECT_EQ(all.paths.size(), 2u);
    EXPECT_EQ(all_geodesics(flat, {0, 0}, {2, 2}).paths.size(), 6u);
}

TEST(Geodesics, AllWithSlackMatchesBruteForce) {
    for (int rep = 0; rep < 10; ++rep) {
        auto env = random_env(4, 4, 300 + rep, Model::geometric);
        for (double slack : {0.0, 1.0, 2.0}) {
            auto gs = all_geodesics(env, {0, 0}, {3, 3}, slack);
            std::set<LatticePath> want;
            double L = passage_value(env, {0, 0}, {3, 3});
            for (auto& p : brute_paths(env, {0, 0}, {3, 3}))
                if (p.weight(env) >= L - slack) want.insert(p);
            EXPECT_EQ(std::set<LatticePath>(gs.paths.begin(), gs.paths.end()), want);
        }
    }
}

TEST(Geodesics, BudgetExceeded) {
    auto flat = LppEnvironment::from_rows(std::vector<std::vector<double>>(10, std::vector<double>(10, 1.0)));
    EXPECT_THROW(all_geodesics(flat, {0, 0}, {9, 9}, 0.0, 1000), BudgetExceeded);
    EXPECT_THROW(all_geodesics(flat, {0, 0}, {1, 1}, -1.0), std::invalid_argument);
}

TEST(Network, ExtractionFixtures) {
    auto env = random_env(4, 4, 5);
    auto one = extract_network(all_geodesics(env, {0, 0}, {3, 3}));
    EXPECT_EQ(canonical_code(one), canonical_code(NetworkGraph(2, 0, 1, {{0, 1}})));

    LatticePath a({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}});
    LatticePath b({{0, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 2}});
    auto two = extract_network(planted_geodesic_set({a, b}));
    NetworkGraph g12(3, 0, 1, {{0, 2}, {2, 1}, {2, 1}});
    EXPECT_EQ(canonical_code(two), canonical_code(transpose(g12)));
    EXPECT_EQ(count_geodesics(two), 2);

    EXPECT_THROW(planted_geodesic_set({a, LatticePath({{0, 0}, {1, 0}})}), std::invalid_argument);
    EXPECT_THROW(LatticePath({{0, 0}, {2, 0}}), std::invalid_argument);
}

TEST(Network, PlantedCatalogRoundTrip) {
    auto cat = enumerate_landscape();
    for (auto& m : cat.members) {
        auto pn = plant_network(m.graph);
        EXPECT_EQ(static_cast<long long>(pn.geodesics.paths.size()), m.inv.geodesic_count);
        std::set<LatticePath> distinct(pn.geodesics.paths.begin(), pn.geodesics.paths.end());
        EXPECT_EQ(distinct.size(), pn.geodesics.paths.size());
        EXPECT_EQ(canonical_code(extract_network(pn.geodesics)), m.code);
    }
    NetworkGraph nine(6, 0, 1, {{0, 4}, {0, 5}, {0, 5}, {5, 4}, {4, 2}, {2, 1}, {2, 3}, {3, 1}, {3, 1}});
    auto pn = plant_network(nine);
    EXPECT_EQ(pn.geodesics.paths.size(), 9u);
    EXPECT_EQ(canonical_code(extract_network(pn.geodesics)), canonical_code(nine));
}

TEST(Overlap, Distance) {
    LatticePath a({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}});
    LatticePath b({{0, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 2}});
    LatticePath c({{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}});
    EXPECT_EQ(overlap_distance(a, a), 0);
    EXPECT_EQ(overlap_distance(a, b), 4);
    EXPECT_EQ(overlap_distance(a, c), 8);  // step-disjoint: twice the length
    EXPECT_EQ(overlap_distance(a, c, 0.5), 4);
    EXPECT_LE(overlap_distance(a, c), overlap_distance(a, b) + overlap_distance(b, c));
    EXPECT_EQ(overlap_distance(a, b), overlap_distance(b, a));
}

TEST(LineEnsemble, MatchesBruteForce) {
    std::mt19937 rng(11);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::vector<double>> f(4, std::vector<double>(6));
        for (auto& line : f)
            for (auto& v : line) v = z(rng);
        for (int n = 1; n <= 4; ++n)
            for (int m = 1; m <= n; ++m)
                for (int x = 0; x < 6; ++x)
                    for (int y = x; y < 6; ++y) EXPECT_NEAR(line_ensemble_value(f, x, n, y, m), brute_line(f, x, n, y, m), 1e-12);
    }
    EXPECT_THROW(line_ensemble_value({{0, 1}}, 1, 1, 0, 1), std::invalid_argument);
}

TEST(Disjoint, SinglePathIsPassage) {
    auto env = random_env(5, 5, 21);
    EXPECT_EQ(disjoint_passage_value(env, {0}, {4}, 0, 4), passage_value(env, {0, 0}, {4, 4}));
    EXPECT_EQ(disjoint_passage_value(env, {1}, {3}, 1, 2), passage_value(env, {1, 1}, {3, 2}));
}

TEST(Disjoint, PairsMatchBruteForce) {
    for (int rep = 0; rep < 20; ++rep) {
        auto env = random_env(4, 3, 400 + rep, rep % 2 ? Model::geometric : Model::exponential);
        for (int x1 = 0; x1 < 4; ++x1)
            for (int x2 = x1; x2 < 4; ++x2)
                for (int y1 = x1; y1 < 4; ++y1)
                    for (int y2 = std::max(y1, x2); y2 < 4; ++y2)
                        EXPECT_EQ(disjoint_passage_value(env, {x1, x2}, {y1, y2}, 0, 2), brute_disjoint2(env, x1, x2, y1, y2, 0, 2))
                            << x1 << x2 << y1 << y2;
    }
}

TEST(Disjoint, ForcedColumns) {
    // k = width on a single row: each path is the one site below it
    auto env = LppEnvironment::from_rows({{1, 2, 3}, {4, 5, 6}});
    EXPECT_EQ(disjoint_passage_value(env, {0, 1, 2}, {0, 1, 2}, 0, 1), 21);
    // the end of path 1 is the start of path 2
    EXPECT_EQ(disjoint_passage_value(env, {0, 1}, {1, 2}, 0, 0), kNegInf);
    EXPECT_THROW(disjoint_passage_value(env, {1, 0}, {1, 2}, 0, 1), std::invalid_argument);
    auto diag = LppEnvironment::from_rows({{1, 2}, {3, 4}}, StepSet::up_right_diagonal);
    EXPECT_THROW(disjoint_passage_value(diag, {0}, {1}, 0, 1), std::invalid_argument);
}

TEST(Profile, MonotoneAndSplitWitness) {
    for (int rep = 0; rep < 10; ++rep) {
        auto env = random_env(10, 10, 500 + rep);
        auto same = difference_profile(env, 6, 6, 9, 0);
        for (double v : same) EXPECT_EQ(v, 0);
        auto F = difference_profile(env, 4, 8, 9, 0);
        for (std::size_t y = 1; y < F.size(); ++y) {
            EXPECT_GE(F[y - 1], F[y]);
            EXPECT_EQ(F[y - 1] > F[y], split_star_witness(env, static_cast<int>(y) - 1, 0, 4, 8, 9));
        }
    }
    auto env = random_env(4, 4, 1);
    EXPECT_THROW(difference_profile(env, 3, 2, 3, 0), std::invalid_argument);
}

TEST(Quadrangle, HoldsAndMatchesBruteForce) {
    for (int rep = 0; rep < 20; ++rep) {
        auto env = random_env(5, 5, 600 + rep, Model::geometric);
        for (int x1 = 0; x1 < 5; ++x1)
            for (int x2 = x1; x2 < 5; ++x2)
                for (int y1 = 0; y1 < 5; ++y1)
                    for (int y2 = y1; y2 < 5; ++y2) {
                        EXPECT_TRUE(quadrangle_check(env, x1, x2, y1, y2, 0, 4));
                        auto L = [&](int a, int b) { return a <= b ? brute_passage(env, {a, 0}, {b, 4}) : kNegInf; };
                        double lhs = L(x1, y2) + L(x2, y1), rhs = L(x1, y1) + L(x2, y2);
                        EXPECT_TRUE(lhs == kNegInf || lhs <= rhs);
                    }
    }
    auto env = random_env(3, 3, 1);
    EXPECT_THROW(quadrangle_check(env, 2, 1, 0, 1, 0, 2), std::invalid_argument);
}

TEST(Metric, D123) {
    EXPECT_DOUBLE_EQ(d123_distance({0, 0}, {4, 8}), 4.0);
    EXPECT_DOUBLE_EQ(d123_distance({0, 0, 0, 0}, {1, 8, 9, 27}), 1 + 2 + 3 + 3);
    EXPECT_EQ(d123_distance({1, 2}, {1, 2}), 0);
    EXPECT_THROW(d123_distance({0}, {0}), std::invalid_argument);
    EXPECT_THROW(d123_distance({0, 0}, {0, 0, 0, 0}), std::invalid_argument);
}

TEST(Json, EnvironmentReplayAndGeodesicSets) {
    EnvSpec s;
    s.model = Model::geometric;
    s.width = 6;
    s.height = 4;
    s.geometric_q = 0.3;
    auto env = build_environment(s, 77);
    auto replay = environment_from_json(nlohmann::json::parse(environment_to_json(env).dump()));
    EXPECT_EQ(replay.weights(), env.weights());
    EXPECT_EQ(replay.seed(), 77u);
    auto rows = LppEnvironment::from_rows({{1, 2, 3}, {4, 5, 6}}, StepSet::up_right_diagonal);
    auto rows_back = environment_from_json(nlohmann::json::parse(environment_to_json(rows, true).dump()));
    EXPECT_EQ(rows_back.weights(), rows.weights());
    EXPECT_TRUE(rows_back.diagonal());

    auto gs = all_geodesics(env, {0, 0}, {5, 3}, 1.0);
    auto back = geodesic_set_from_json(nlohmann::json::parse(geodesic_set_to_json(gs).dump()));
    EXPECT_EQ(back.paths, gs.paths);
    EXPECT_EQ(back.max_weight, gs.max_weight);
    EXPECT_EQ(back.slack, 1.0);
    EXPECT_EQ(back.u, gs.u);
    EXPECT_EQ(back.v, gs.v);
}
