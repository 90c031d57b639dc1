#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geonet/bridges.hpp"

using namespace geonet;
using namespace geonet::bridges;

namespace {

// Largest subset of indices with f within eps of the max and pairwise gaps > m.
int brute_multiplicity(const std::vector<double>& t, const std::vector<double>& f, double m, double eps) {
    double M = *std::max_element(f.begin(), f.end());
    const int n = static_cast<int>(t.size());
    int best = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> idx;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            if (mask >> i & 1) {
                ok = f[i] >= M - eps && (idx.empty() || t[i] - t[idx.back()] > m);
                idx.push_back(i);
            }
        if (ok) best = std::max(best, static_cast<int>(idx.size()));
    }
    return best;
}

}  // namespace

TEST(Kernel, NormalizedWithVarianceTwoT) {
    double s = 0, s2 = 0, h = 1e-3;
    for (double y = -20; y <= 20; y += h) {
        s += heat_kernel(0.5, y, 1.5) * h;
        s2 += (y - 0.5) * (y - 0.5) * heat_kernel(0.5, y, 1.5) * h;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
    EXPECT_NEAR(s2, 2 * 1.5, 1e-6);
}

TEST(Sample, EndpointsAndGrid) {
    auto e = sample_bridges(2, 0.0, 1.0, {1.0, 0.0}, {2.0, -1.0}, 1.0, 3);
    EXPECT_EQ(e.paths[0], (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(e.paths[1], (std::vector<double>{0.0, -1.0}));
    auto f = sample_bridges(1, -1.0, 1.0, {0.0}, {0.0}, 0.25, 3);
    EXPECT_EQ(f.steps(), 8);
    EXPECT_EQ(f.times.front(), -1.0);
    EXPECT_EQ(f.times.back(), 1.0);
    EXPECT_EQ(f.paths[0].back(), 0.0);
    EXPECT_THROW(sample_bridges(1, 0.0, 1.0, {0.0}, {0.0}, 0.3, 1), std::invalid_argument);
    EXPECT_THROW(sample_bridges(2, 0.0, 1.0, {0.0, 1.0}, {0.0, 0.0}, 0.5, 1), std::invalid_argument);
    EXPECT_EQ(sample_bridges(1, 0.0, 1.0, {0.0}, {0.0}, 0.1, 9).paths, sample_bridges(1, 0.0, 1.0, {0.0}, {0.0}, 0.1, 9).paths);
}

TEST(Sample, MidpointMoments) {
    // bridge over [0, 2] from 1 to 3: midpoint mean 2, variance 2 * 1 * 1 / 2 = 1
    const int k = 4000;
    auto e = sample_bridges(k, 0.0, 2.0, std::vector<double>(k, 1.0), std::vector<double>(k, 3.0), 0.5, 17);
    double s = 0, s2 = 0;
    for (auto& p : e.paths) { s += p[2]; s2 += p[2] * p[2]; }
    double mean = s / k, var = s2 / k - mean * mean;
    EXPECT_NEAR(mean, 2.0, 5.0 / std::sqrt(k));
    EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / k));
}

TEST(KarlinMcGregor, ClosedFormForTwo) {
    EXPECT_EQ(km_nonintersection_prob({0.3}, {-1.0}, 2.0).probability, 1.0);
    for (double t : {0.5, 1.0, 3.0})
        for (double g : {0.2, 1.0, 2.5}) {
            double want = 1 - std::exp(-g * (g + 0.5) / (2 * t));
            EXPECT_NEAR(km_nonintersection_prob({g, 0.0}, {0.5 + g, 0.0}, t).probability, want, 1e-12);
        }
}

TEST(KarlinMcGregor, InvariancesAndTrends) {
    std::vector<double> x{1.0, 0.2, -0.7}, y{0.9, 0.0, -1.1};
    double p = km_nonintersection_prob(x, y, 1.0).probability;
    std::vector<double> xs = x, ys = y;
    for (auto& v : xs) v += 3.25;
    for (auto& v : ys) v += 3.25;
    EXPECT_NEAR(km_nonintersection_prob(xs, ys, 1.0).probability, p, 1e-12);
    double prev = 0;
    for (double g : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        double q = km_nonintersection_prob({2 * g, g, 0.0}, {2 * g, g, 0.0}, 1.0).probability;
        EXPECT_GT(q, prev);
        prev = q;
    }
    EXPECT_GT(prev, 0.99);
    // small gaps: probability ~ C gap^(k(k-1))
    for (int k = 2; k <= 3; ++k) {
        auto at = [k](double d) {
            std::vector<double> v;
            for (int i = 0; i < k; ++i) v.push_back((k - 1 - i) * d);
            return km_nonintersection_prob(v, v, 1.0).probability;
        };
        EXPECT_NEAR(at(0.02) / at(0.01), std::pow(2.0, k * (k - 1)), 0.02 * std::pow(2.0, k * (k - 1)));
    }
    EXPECT_THROW(km_nonintersection_prob({0.0, 1.0}, {1.0, 0.0}, 1.0), std::invalid_argument);
    EXPECT_THROW(km_nonintersection_prob({1.0, 0.0}, {1.0, 0.0}, 0.0), std::invalid_argument);
}

TEST(MonteCarlo, Basics) {
    auto one = mc_nonintersection_prob({0.0}, {0.0}, 1.0, 100, 1);
    EXPECT_EQ(one.estimate, 1.0);
    EXPECT_EQ(one.std_error, 0.0);
    EXPECT_GT(mc_nonintersection_prob({10.0, 0.0}, {10.0, 0.0}, 1.0, 2000, 1).estimate, 0.99);
    EXPECT_THROW(mc_nonintersection_prob({0.0}, {0.0}, 1.0, 0, 1), std::invalid_argument);
}

TEST(MonteCarlo, AgreesWithClosedForm) {
    McOptions o;
    o.grid_steps = 100;
    auto mc = mc_nonintersection_prob({1.0, 0.0}, {1.0, 0.0}, 1.0, 20000, 5, o);
    double want = 1 - std::exp(-0.5);
    EXPECT_NEAR(mc.estimate, want, 4 * mc.std_error);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResult) {
    McOptions a, b;
    a.threads = 1;
    b.threads = 5;
    a.chunk_size = b.chunk_size = 300;
    auto r1 = mc_nonintersection_prob({2.0, 1.0, 0.0}, {2.0, 1.0, 0.0}, 1.0, 3000, 8, a);
    auto r2 = mc_nonintersection_prob({2.0, 1.0, 0.0}, {2.0, 1.0, 0.0}, 1.0, 3000, 8, b);
    EXPECT_EQ(r1.estimate, r2.estimate);
    EXPECT_EQ(r1.std_error, r2.std_error);
}

TEST(MonteCarlo, UncorrectedCoarseGridOverestimates) {
    McOptions coarse, fine;
    coarse.crossing_correction = fine.crossing_correction = false;
    coarse.grid_steps = 5;
    fine.grid_steps = 400;
    auto c = mc_nonintersection_prob({1.0, 0.0}, {1.0, 0.0}, 1.0, 10000, 2, coarse);
    auto f = mc_nonintersection_prob({1.0, 0.0}, {1.0, 0.0}, 1.0, 10000, 2, fine);
    EXPECT_GT(c.estimate, f.estimate + 3 * std::hypot(c.std_error, f.std_error));
}

TEST(NearMax, Examples) {
    std::vector<double> t, bump, flat;
    for (int i = 0; i <= 1000; ++i) {
        t.push_back(i / 1000.0);
        bump.push_back(-(t.back() - 0.4) * (t.back() - 0.4));
        flat.push_back(0.0);
    }
    EXPECT_EQ(near_max_multiplicity(t, bump, 0.1, 1e-4), 1);
    EXPECT_EQ(near_max_multiplicity(t, flat, 0.3, 0.1), 4);
    // L / m integral: strict separation gives ceil(L / m), not L / m + 1
    EXPECT_EQ(near_max_multiplicity(t, flat, 0.25, 0.1), 4);
    EXPECT_EQ(near_max_multiplicity(0.0, 1.0, flat, 0.3, 0.1), 4);
    EXPECT_THROW(near_max_multiplicity(t, flat, 0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(near_max_multiplicity({0.0, 0.0}, {1.0, 1.0}, 0.1, 0.1), std::invalid_argument);
}

TEST(NearMax, MatchesBruteForceAndIsMonotone) {
    std::mt19937 rng(4);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> t(12), f(12);
        double acc = 0;
        for (int i = 0; i < 12; ++i) { t[i] = i * 0.1; f[i] = acc += z(rng); }
        for (double m : {0.05, 0.15, 0.25})
            for (double eps : {0.1, 0.5, 2.0}) {
                int c = near_max_multiplicity(t, f, m, eps);
                EXPECT_EQ(c, brute_multiplicity(t, f, m, eps));
                EXPECT_LE(near_max_multiplicity(t, f, m, eps / 2), c);
                EXPECT_LE(near_max_multiplicity(t, f, m + 0.1, eps), c);
            }
    }
}

TEST(Slope, FitRecoversPowerLaw) {
    std::vector<double> eps;
    std::vector<long> counts;
    const long trials = 1L << 40;
    for (int j = 4; j <= 9; ++j) {
        eps.push_back(std::ldexp(1.0, -j));
        counts.push_back(1L << (40 - 2 * j));
    }
    EXPECT_NEAR(fit_loglog_slope(eps, counts, trials), 2.0, 1e-12);
    counts[5] = 0;  // dropped, the rest still fit exactly
    EXPECT_NEAR(fit_loglog_slope(eps, counts, trials), 2.0, 1e-12);
    EXPECT_TRUE(std::isnan(fit_loglog_slope({0.1, 0.2}, {0, 5}, 10)));
}

TEST(Slope, SmallExperimentIsDeterministic) {
    SlopeConfig a;
    a.trials = 3000;
    a.grid = 512;
    a.chunk_size = 500;
    a.threads = 1;
    SlopeConfig b = a;
    b.threads = 4;
    auto ra = slope_experiment(a), rb = slope_experiment(b);
    EXPECT_EQ(slope_csv(ra), slope_csv(rb));
    EXPECT_EQ(ra.rows.size(), a.eps.size() * a.ks.size());
    EXPECT_EQ(slope_csv(ra).substr(0, slope_csv(ra).find('\n')), "eps,k,count,probability,std_error");
    for (auto& row : ra.rows) EXPECT_LE(row.count, a.trials);
    // more maxima is rarer
    for (std::size_t e = 0; e < a.eps.size(); ++e) EXPECT_GE(ra.rows[e].count, ra.rows[a.eps.size() + e].count);
}
