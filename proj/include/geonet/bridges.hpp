// bridges.hpp - Brownian bridges with diffusion parameter 2, the
// Karlin-McGregor nonintersection probability, its Monte Carlo check and
// near-maximizer multiplicities of sampled functions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "rng.hpp"

namespace geonet::bridges {

inline constexpr double kDiffusion = 2.0;

// Transition density of Brownian motion with variance 2t at time t.
inline double heat_kernel(double x, double y, double t) {
    return std::exp(-(x - y) * (x - y) / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

struct BridgeEnsemble {
    int k = 0;
    double a = 0.0;
    double b = 1.0;
    std::vector<double> x;
    std::vector<double> y;
    double grid = 1.0;
    std::vector<double> times;
    std::vector<std::vector<double>> paths;  // paths[i][j] = B_i(times[j])
    double diffusion = kDiffusion;

    int steps() const { return static_cast<int>(times.size()) - 1; }

    // Strict ordering B_1 > B_2 > ... at every grid time.
    bool ordered_on_grid() const {
        for (std::size_t j = 0; j < times.size(); ++j)
            for (int i = 0; i + 1 < k; ++i)
                if (!(paths[i][j] > paths[i + 1][j])) return false;
        return true;
    }
};

namespace detail {

inline int grid_steps(double length, double grid) {
    if (!(length > 0.0)) throw std::invalid_argument("bridges: interval must have positive length");
    if (!(grid > 0.0)) throw std::invalid_argument("bridges: grid step must be positive");
    double n = length / grid;
    double r = std::round(n);
    if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, n)) throw std::invalid_argument("bridges: grid step does not divide the interval");
    return static_cast<int>(r);
}

// One bridge from x to y over n steps of size dt, written into out[0..n].
inline void sample_bridge(Engine& eng, double x, double y, int n, double dt, double* out) {
    std::normal_distribution<double> z(0.0, 1.0);
    double pos = x;
    out[0] = x;
    for (int i = 0; i < n - 1; ++i) {
        double rem = (n - i) * dt;
        double mean = pos + (y - pos) * dt / rem;
        double var = kDiffusion * dt * (rem - dt) / rem;
        pos = mean + std::sqrt(var) * z(eng);
        out[i + 1] = pos;
    }
    out[n] = y;
}

inline void require_strictly_decreasing(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1] > v[i])) throw std::invalid_argument(std::string("bridges: ") + what + " must be strictly decreasing");
}

// Runs fn(chunk) for chunk = 0..n-1 on up to `threads` workers and returns
// the results in chunk order.
template <class R, class F>
std::vector<R> run_chunks(int n, int threads, F fn) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, std::max(n, 1));
    std::vector<R> out(n);
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < threads; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (int c = w; c < n; c += threads) out[c] = fn(c);
        }));
    for (auto& j : jobs) j.get();
    return out;
}

}  // namespace detail

inline BridgeEnsemble sample_bridges(int k, double a, double b, const std::vector<double>& x, const std::vector<double>& y,
                                     double grid, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("sample_bridges: k must be >= 1");
    if (static_cast<int>(x.size()) != k || static_cast<int>(y.size()) != k)
        throw std::invalid_argument("sample_bridges: endpoint vectors must have k entries");
    for (int i = 1; i < k; ++i)
        if (x[i] > x[i - 1]) throw std::invalid_argument("sample_bridges: start points must be weakly decreasing");
    int n = detail::grid_steps(b - a, grid);
    double dt = (b - a) / n;
    BridgeEnsemble e;
    e.k = k; e.a = a; e.b = b; e.x = x; e.y = y; e.grid = dt;
    for (int j = 0; j <= n; ++j) e.times.push_back(j == n ? b : a + j * dt);
    e.paths.assign(k, std::vector<double>(n + 1));
    auto eng = make_engine(seed, "bridges.sample");
    for (int i = 0; i < k; ++i) detail::sample_bridge(eng, x[i], y[i], n, dt, e.paths[i].data());
    return e;
}

struct KmResult {
    double probability = 1.0;  // clipped to [0, 1]
    double determinant = 1.0;  // unclipped ratio
    double condition = 1.0;    // 2-norm condition number of the normalized kernel matrix
};

// det(p_t(x_i, y_j)) / prod p_t(x_i, y_i), computed on the matrix with row i
// divided by p_t(x_i, y_i) so that nothing underflows.
inline KmResult km_nonintersection_prob(const std::vector<double>& x, const std::vector<double>& y, double duration) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("km_nonintersection_prob: x and y must be nonempty and of equal size");
    if (!(duration > 0.0)) throw std::invalid_argument("km_nonintersection_prob: duration must be positive");
    detail::require_strictly_decreasing(x, "x");
    detail::require_strictly_decreasing(y, "y");
    const int k = static_cast<int>(x.size());
    if (k == 1) return {};
    Eigen::MatrixXd M(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            M(i, j) = std::exp(-((x[i] - y[j]) * (x[i] - y[j]) - (x[i] - y[i]) * (x[i] - y[i])) / (4.0 * duration));
    KmResult r;
    r.determinant = Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    auto s = svd.singularValues();
    r.condition = s(k - 1) > 0.0 ? s(0) / s(k - 1) : std::numeric_limits<double>::infinity();
    r.probability = std::clamp(r.determinant, 0.0, 1.0);
    return r;
}

struct McOptions {
    int grid_steps = 200;
    bool crossing_correction = true;
    int threads = 0;        // 0 = hardware concurrency
    int chunk_size = 2000;  // trials per seed substream
};

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    long trials = 0;
};

// Monte Carlo nonintersection probability for k independent bridges. Each
// trial scores 0 if the order fails at a grid time; with the crossing
// correction it otherwise scores the product over steps and adjacent pairs
// of the probability that the gap bridge (variance 4 per unit time) stays
// positive between grid times.
inline McResult mc_nonintersection_prob(const std::vector<double>& x, const std::vector<double>& y, double duration, long trials,
                                        std::uint64_t seed, const McOptions& opt = {}) {
    if (trials < 1) throw std::invalid_argument("mc_nonintersection_prob: trials must be >= 1");
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("mc_nonintersection_prob: x and y must be nonempty and of equal size");
    if (opt.grid_steps < 1 || opt.chunk_size < 1) throw std::invalid_argument("mc_nonintersection_prob: bad options");
    const int k = static_cast<int>(x.size());
    const int n = opt.grid_steps;
    const double dt = duration / n;
    const long chunks = (trials + opt.chunk_size - 1) / opt.chunk_size;
    struct Acc { double s = 0.0, s2 = 0.0; };
    auto parts = detail::run_chunks<Acc>(static_cast<int>(chunks), opt.threads, [&](int c) {
        auto eng = make_engine(seed, "bridges.mc", static_cast<std::uint64_t>(c));
        long lo = c * static_cast<long>(opt.chunk_size);
        long hi = std::min(trials, lo + opt.chunk_size);
        std::vector<double> P(static_cast<std::size_t>(k) * (n + 1));
        Acc acc;
        for (long t = lo; t < hi; ++t) {
            for (int i = 0; i < k; ++i) detail::sample_bridge(eng, x[i], y[i], n, dt, &P[static_cast<std::size_t>(i) * (n + 1)]);
            double w = 1.0;
            for (int i = 0; i + 1 < k && w > 0.0; ++i) {
                const double* u = &P[static_cast<std::size_t>(i) * (n + 1)];
                const double* v = u + (n + 1);
                for (int j = 0; j <= n; ++j)
                    if (!(u[j] > v[j])) { w = 0.0; break; }
                if (w > 0.0 && opt.crossing_correction)
                    for (int j = 0; j < n; ++j) w *= -std::expm1(-(u[j] - v[j]) * (u[j + 1] - v[j + 1]) / (2.0 * dt));
            }
            acc.s += w;
            acc.s2 += w * w;
        }
        return acc;
    });
    double s = 0.0, s2 = 0.0;
    for (auto& p : parts) { s += p.s; s2 += p.s2; }
    McResult r;
    r.trials = trials;
    r.estimate = s / trials;
    double var = trials > 1 ? std::max(0.0, (s2 - s * s / trials) / (trials - 1)) : 0.0;
    r.std_error = std::sqrt(var / trials);
    return r;
}

// Largest set of sample times, pairwise more than m apart, at which f is
// within eps of its maximum. Greedy leftmost selection is optimal for
// separation constraints on a line.
inline int near_max_multiplicity(const std::vector<double>& t, const std::vector<double>& f, double m, double eps) {
    if (!(m > 0.0) || !(eps > 0.0)) throw std::invalid_argument("near_max_multiplicity: m and eps must be positive");
    if (t.size() != f.size() || t.empty()) throw std::invalid_argument("near_max_multiplicity: t and f must be nonempty and of equal size");
    double M = *std::max_element(f.begin(), f.end());
    int count = 0;
    double last = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i && !(t[i] > t[i - 1])) throw std::invalid_argument("near_max_multiplicity: times must be increasing");
        if (f[i] >= M - eps && (count == 0 || t[i] - last > m)) { ++count; last = t[i]; }
    }
    return count;
}

// f sampled at lo + i (hi - lo) / (f.size() - 1).
inline int near_max_multiplicity(double lo, double hi, const std::vector<double>& f, double m, double eps) {
    if (f.size() < 2 || !(hi > lo)) throw std::invalid_argument("near_max_multiplicity: need an interval and at least two samples");
    std::vector<double> t(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(f.size() - 1);
    return near_max_multiplicity(t, f, m, eps);
}

struct SlopeConfig {
    double m = 0.25;
    double lo = -1.0;
    double hi = 1.0;
    int grid = 2048;
    long trials = 100000;
    std::vector<double> eps = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
    std::vector<int> ks = {2, 3};
    std::uint64_t seed = 1;
    int threads = 0;
    int chunk_size = 2000;
};

struct SlopeRow {
    double eps = 0.0;
    int k = 0;
    long count = 0;
    double probability = 0.0;
    double std_error = 0.0;
};

struct SlopeResult {
    std::vector<SlopeRow> rows;
    std::map<int, double> slope;  // fitted exponent per k; NaN if fewer than two nonzero counts
};

// Least-squares slope of log(count/trials) against log(eps), weighted by
// count; zero counts are dropped.
inline double fit_loglog_slope(const std::vector<double>& eps, const std::vector<long>& counts, long trials) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (counts[i] <= 0) continue;
        double w = static_cast<double>(counts[i]);
        double X = std::log(eps[i]);
        double Y = std::log(static_cast<double>(counts[i]) / static_cast<double>(trials));
        sw += w; sx += w * X; sy += w * Y; sxx += w * X * X; sxy += w * X * Y;
        ++used;
    }
    if (used < 2) return std::numeric_limits<double>::quiet_NaN();
    double den = sw * sxx - sx * sx;
    return (sw * sxy - sx * sy) / den;
}

// P(E_{m,eps}(B) >= k) for Brownian motion B (variance 2t) sampled on a grid
// over [lo, hi]; the same paths serve every eps.
inline SlopeResult slope_experiment(const SlopeConfig& cfg) {
    if (cfg.grid < 2 || cfg.trials < 1 || cfg.eps.empty() || cfg.chunk_size < 1) throw std::invalid_argument("slope_experiment: bad configuration");
    const int n = cfg.grid;
    const double dt = (cfg.hi - cfg.lo) / n;
    const double sd = std::sqrt(kDiffusion * dt);
    const double eps_max = *std::max_element(cfg.eps.begin(), cfg.eps.end());
    const std::size_t ne = cfg.eps.size(), nk = cfg.ks.size();
    const long chunks = (cfg.trials + cfg.chunk_size - 1) / cfg.chunk_size;
    auto parts = detail::run_chunks<std::vector<long>>(static_cast<int>(chunks), cfg.threads, [&](int c) {
        auto eng = make_engine(cfg.seed, "bridges.slope", static_cast<std::uint64_t>(c));
        std::normal_distribution<double> z(0.0, 1.0);
        long lo = c * static_cast<long>(cfg.chunk_size);
        long hi = std::min(cfg.trials, lo + cfg.chunk_size);
        std::vector<long> cnt(ne * nk, 0);
        std::vector<double> B(n + 1);
        std::vector<int> cand;
        for (long tr = lo; tr < hi; ++tr) {
            B[0] = 0.0;
            for (int i = 1; i <= n; ++i) B[i] = B[i - 1] + sd * z(eng);
            double M = *std::max_element(B.begin(), B.end());
            cand.clear();
            for (int i = 0; i <= n; ++i)
                if (B[i] >= M - eps_max) cand.push_back(i);
            for (std::size_t e = 0; e < ne; ++e) {
                int count = 0, last = 0;
                for (int i : cand)
                    if (B[i] >= M - cfg.eps[e] && (count == 0 || (i - last) * dt > cfg.m)) { ++count; last = i; }
                for (std::size_t q = 0; q < nk; ++q)
                    if (count >= cfg.ks[q]) ++cnt[e * nk + q];
            }
        }
        return cnt;
    });
    std::vector<long> total(ne * nk, 0);
    for (auto& p : parts)
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += p[i];
    SlopeResult r;
    for (std::size_t q = 0; q < nk; ++q) {
        std::vector<long> counts;
        for (std::size_t e = 0; e < ne; ++e) {
            SlopeRow row;
            row.eps = cfg.eps[e];
            row.k = cfg.ks[q];
            row.count = total[e * nk + q];
            row.probability = static_cast<double>(row.count) / cfg.trials;
            row.std_error = std::sqrt(row.probability * (1 - row.probability) / cfg.trials);
            r.rows.push_back(row);
            counts.push_back(row.count);
        }
        r.slope[cfg.ks[q]] = fit_loglog_slope(cfg.eps, counts, cfg.trials);
    }
    return r;
}

inline std::string slope_csv(const SlopeResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "eps,k,count,probability,std_error\n";
    for (auto& row : r.rows) os << row.eps << ',' << row.k << ',' << row.count << ',' << row.probability << ',' << row.std_error << '\n';
    return os.str();
}

}  // namespace geonet::bridges
