#include <gtest/gtest.h>

#include <functional>
#include <set>
#include <sstream>

#include "geonet/botany.hpp"

using namespace geonet;

namespace {

const Catalog& landscape() {
    static const Catalog c = enumerate_landscape();
    return c;
}

// Independent generator: every edge multiset on n vertices with the degree
// targets (out(p) = k, in(q) = l, interior degree 3), filtered by the rules.
std::set<CanonicalCode> naive_catalog(int max_deg) {
    std::set<CanonicalCode> out;
    for (int k = 1; k <= max_deg; ++k)
        for (int l = 1; l <= max_deg; ++l)
            for (int n = 2; n <= k + l; ++n) {
                if ((k + l + 3 * (n - 2)) % 2) continue;
                std::vector<std::pair<int, int>> pairs;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        if (a != b && a != 1 && b != 0) pairs.emplace_back(a, b);
                std::vector<int> cap(n, 3);
                cap[0] = k;
                cap[1] = l;
                std::vector<NetworkGraph::Edge> es;
                std::function<void(std::size_t)> rec = [&](std::size_t i) {
                    if (i == pairs.size()) {
                        for (int c : cap)
                            if (c) return;
                        NetworkGraph g(n, 0, 1, es);
                        if (check_rules(g).all) out.insert(canonical_code(g));
                        return;
                    }
                    auto [a, b] = pairs[i];
                    int added = 0;
                    rec(i + 1);
                    while (cap[a] > 0 && cap[b] > 0 && added < 3) {
                        --cap[a]; --cap[b]; ++added;
                        es.emplace_back(a, b);
                        rec(i + 1);
                    }
                    for (; added > 0; --added) { ++cap[a]; ++cap[b]; es.pop_back(); }
                };
                rec(0);
            }
    return out;
}

}  // namespace

TEST(EnumerateLandscape, TwentySevenMembersWithSubcounts) {
    const auto& c = landscape();
    ASSERT_EQ(c.members.size(), 27u);
    auto s = catalog_summary(c);
    EXPECT_EQ(s.by_degrees.at({1, 1}), 1);
    EXPECT_EQ(s.by_degrees.at({1, 2}), 1);
    EXPECT_EQ(s.by_degrees.at({1, 3}), 1);
    EXPECT_EQ(s.by_degrees.at({2, 2}), 3);
    EXPECT_EQ(s.by_degrees.at({2, 3}), 6);
    EXPECT_EQ(s.by_degrees.at({3, 3}), 15);
    int dense = 0;
    for (auto& m : c.members) dense += m.inv.dense;
    EXPECT_EQ(dense, 6);
}

TEST(EnumerateLandscape, MatchesNaiveGenerator) {
    EXPECT_EQ(naive_catalog(3), landscape().codes());
}

TEST(EnumerateLandscape, MembersAreValidAndUnique) {
    std::set<CanonicalCode> seen;
    for (auto& m : landscape().members) {
        EXPECT_TRUE(check_rules(m.graph).all);
        EXPECT_TRUE(seen.insert(canonical_code(m.graph)).second);
        EXPECT_EQ(m.code, canonical_code(m.graph));
        EXPECT_LE(m.inv.geodesic_count, 9);
        EXPECT_LE(m.inv.k, m.inv.l);
    }
}

TEST(EnumerateLandscape, Deterministic) {
    EXPECT_EQ(catalog_to_json(enumerate_landscape()).dump(), catalog_to_json(landscape()).dump());
}

TEST(CatalogSummary, GeodesicTable) {
    auto s = catalog_summary(landscape());
    std::map<long long, SummaryRow> rows;
    for (auto& r : s.by_geodesics) rows[r.geodesics] = r;
    const int want[] = {10, 8, 6, 6, 3, 3};
    for (int t = 1; t <= 6; ++t) EXPECT_EQ(rows.at(t).max_dim, Rational(want[t - 1])) << "T=" << t;
    for (int t = 7; t <= 9; ++t) EXPECT_TRUE(rows.at(t).countable) << "T=" << t;
    EXPECT_EQ(s.max_geodesics, 9);
    std::vector<std::tuple<int, int, long long>> want_dense = {{1, 1, 1}, {1, 2, 2}, {1, 3, 3}, {2, 2, 4}, {2, 3, 6}, {3, 3, 9}};
    EXPECT_EQ(s.dense, want_dense);
}

TEST(StarProfile, ValidationAndParsing) {
    using Dims = std::map<int, Rational>;
    EXPECT_THROW(StarProfile(Dims{{1, 2}, {2, 3}}), std::invalid_argument);
    EXPECT_THROW(StarProfile(Dims{{1, 2}, {3, 1}}), std::invalid_argument);
    EXPECT_THROW(StarProfile(Dims{{1, -1}}), std::invalid_argument);
    auto p = StarProfile::parse("# comment\nname=lqg\nstar.1 = 5\nstar.2=4\nstar.3=2\nstar.4=1.5\n");
    EXPECT_EQ(p.name(), "lqg");
    EXPECT_EQ(p.dim(4), Rational(3, 2));
    EXPECT_THROW(StarProfile::parse("star.x=1\n"), std::invalid_argument);
    EXPECT_THROW(StarProfile::parse("dim=1\n"), std::invalid_argument);
    EXPECT_THROW(StarProfile::parse("star.1\n"), std::invalid_argument);
    EXPECT_EQ(parse_rational("7/2"), Rational(7, 2));
    EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
}

TEST(StarProfile, LandscapeMatchesRules) {
    auto c = enumerate_with_star_profile(StarProfile::landscape());
    EXPECT_EQ(c.members.size(), 27u);
    EXPECT_EQ(c.codes(), landscape().codes());
    for (auto& m : c.members) EXPECT_EQ(m.dim, Rational(m.inv.d_value.twice(), 2));
}

TEST(StarProfile, BrownianMapAddsOne) {
    auto c = enumerate_with_star_profile(StarProfile::brownian_map());
    ASSERT_EQ(c.members.size(), 28u);
    auto base = landscape().codes();
    int extras = 0;
    for (auto& m : c.members) {
        if (base.count(m.code)) continue;
        ++extras;
        EXPECT_EQ(std::min(m.inv.k, m.inv.l), 3);
        EXPECT_EQ(std::max(m.inv.k, m.inv.l), 4);
        EXPECT_EQ(m.inv.num_vertices, 3);
        EXPECT_TRUE(m.dim >= Rational(0));
    }
    EXPECT_EQ(extras, 1);
}

TEST(StarProfile, LqgAddsQuadrupleEdge) {
    auto c = enumerate_with_star_profile(StarProfile::parse("star.1=5\nstar.2=4\nstar.3=2\nstar.4=3/2\n"));
    ASSERT_EQ(c.members.size(), 29u);
    NetworkGraph quad(2, 0, 1, {{0, 1}, {0, 1}, {0, 1}, {0, 1}});
    EXPECT_TRUE(c.codes().count(canonical_code(quad)));
    for (auto& code : landscape().codes()) EXPECT_TRUE(c.codes().count(code));
}

TEST(StarProfile, EnlargingNeverRemovesMembers) {
    auto small = enumerate_with_star_profile(StarProfile::landscape());
    auto big = enumerate_with_star_profile(StarProfile(std::map<int, Rational>{{1, 5}, {2, 4}, {3, 3}}, "bigger"));
    for (auto& code : small.codes()) EXPECT_TRUE(big.codes().count(code));
    EXPECT_GE(big.members.size(), small.members.size());
}

TEST(Export, CsvHeaderOnlyForEmptyCatalog) {
    Catalog empty;
    auto csv = export_catalog(empty, "csv");
    EXPECT_EQ(csv, "index,k,l,V,E,F,d,T,dense,code,edges\n");
    EXPECT_THROW(export_catalog(empty, "xml"), std::invalid_argument);
}

TEST(Export, JsonRecordsAndRoundTrip) {
    auto j = catalog_to_json(landscape());
    EXPECT_EQ(j["schema"], kCatalogSchema);
    ASSERT_EQ(j["members"].size(), 27u);
    for (auto& r : j["members"])
        for (const char* key : {"graph", "k", "l", "V", "E", "F", "d", "T", "dense"}) EXPECT_TRUE(r.contains(key)) << key;
    auto back = catalog_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_TRUE(back == landscape());
}

TEST(Export, DotHasOneClusterPerMember) {
    auto dot = export_catalog(landscape(), "dot");
    std::size_t n = 0, pos = 0;
    while ((pos = dot.find("subgraph cluster_", pos)) != std::string::npos) { ++n; ++pos; }
    EXPECT_EQ(n, 27u);
}

TEST(Export, SummaryCsv) {
    auto s = summary_csv(catalog_summary(landscape()));
    EXPECT_EQ(s.substr(0, s.find('\n')), "T,members,max_d,countable");
    EXPECT_NE(s.find("\n1,"), std::string::npos);
}
