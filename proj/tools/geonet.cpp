// geonet - command-line front end: catalog enumeration, acceptance checks,
// lattice and bridge experiments.
#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <set>
#include <string>
#include <string_view>

#include "CLI11.hpp"
#include "geonet/acceptance.hpp"
#include "geonet/botany.hpp"
#include "geonet/bridges.hpp"
#include "geonet/lpp.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace geonet;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;
constexpr int kExitBudget = 3;

std::string default_out_dir() {
    const char* env = std::getenv("GEONET_OUT_DIR");
    return env && *env ? env : "geonet-out";
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

StarProfile load_profile(const std::string& spec) {
    if (spec == "landscape") return StarProfile::landscape();
    if (spec == "brownian_map") return StarProfile::brownian_map();
    if (!fs::exists(spec)) throw std::invalid_argument("profile '" + spec + "' is neither a built-in name nor a file");
    return StarProfile::parse(read_file(spec));
}

std::pair<int, int> parse_size(const std::string& s) {
    auto num = [&s](std::string_view part) {
        int v = 0;
        auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || end != part.data() + part.size() || v < 1) throw std::invalid_argument("bad --size '" + s + "' (use N or WxH)");
        return v;
    };
    std::string_view sv(s);
    auto x = sv.find('x');
    if (x == std::string_view::npos) { int n = num(sv); return {n, n}; }
    return {num(sv.substr(0, x)), num(sv.substr(x + 1))};
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Common {
    std::uint64_t seed = 1;
    std::string out = default_out_dir();
};

int run_enumerate(const Common& c, const std::string& profile, const std::string& format) {
    Catalog cat = profile.empty() ? enumerate_landscape() : enumerate_with_star_profile(load_profile(profile));
    std::string body = format == "json" ? catalog_to_json(cat).dump(2) + "\n" : export_catalog(cat, format);
    nlohmann::ordered_json cfg{{"profile", profile.empty() ? "rules" : profile}, {"format", format}};
    cli::RunManifest m("enumerate", c.seed, cfg);
    m.add("catalog." + format, body);
    m.write(c.out);
    std::cout << body;
    return 0;
}

int run_verify(const Common& c, const acceptance::Options& opt) {
    auto results = acceptance::run_checks(opt, [](const acceptance::CriterionResult& r) {
        std::cerr << acceptance::format_line(r) << "  (" << acceptance::detail::fmt("%.1f", r.seconds) << " s)\n";
    });
    std::string report = acceptance::format_report(results, opt.seed);
    nlohmann::ordered_json cfg{{"mc_trials", opt.mc_trials}, {"mc_grid_steps", opt.mc_grid_steps}, {"slope_trials", opt.slope_trials}};
    cli::RunManifest m("verify", c.seed, cfg);
    m.add("verify_report.txt", report);
    m.write(c.out);
    std::cout << report;
    return acceptance::all_pass(results) ? 0 : kExitFail;
}

int run_lpp(const Common& c, const std::string& model, const std::string& size, long trials, const std::string& experiment) {
    auto [W, H] = parse_size(size);
    lpp::EnvSpec spec;
    spec.model = lpp::parse_model(model);
    spec.width = W;
    spec.height = H;
    if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
    std::ostringstream csv;
    bool ok = true;
    long summary_a = 0, summary_b = 0;

    if (experiment == "quadrangle") {
        auto env = lpp::build_environment(spec, derive_seed(c.seed, "lpp.quadrangle"));
        auto eng = make_engine(c.seed, "lpp.quadrangle.points");
        std::uniform_int_distribution<int> X(0, W - 1), T(0, H - 1);
        csv << "x1,x2,y1,y2,s,t,lhs,rhs,holds\n";
        for (long i = 0; i < trials; ++i) {
            int p[4] = {X(eng), X(eng), X(eng), X(eng)};
            std::sort(p, p + 4);
            int s = T(eng), t = T(eng);
            if (s > t) std::swap(s, t);
            auto L = [&](int a, int b) { return lpp::passage_or_neg_inf(env, {a, s}, {b, t}); };
            bool h = lpp::quadrangle_check(env, p[0], p[1], p[2], p[3], s, t);
            csv << p[0] << ',' << p[1] << ',' << p[2] << ',' << p[3] << ',' << s << ',' << t << ',' << fmt(L(p[0], p[3]) + L(p[1], p[2])) << ','
                << fmt(L(p[0], p[2]) + L(p[1], p[3])) << ',' << h << '\n';
            ok = ok && h;
            summary_a += h;
        }
        std::cout << "quadrangle: " << summary_a << "/" << trials << " hold\n";
    } else if (experiment == "profile") {
        csv << "env,x1,x2,s,t,y,F,strict_drop,split_witness\n";
        for (long e = 0; e < trials; ++e) {
            auto env = lpp::build_environment(spec, derive_seed(c.seed, "lpp.profile", static_cast<std::uint64_t>(e)));
            auto eng = make_engine(c.seed, "lpp.profile.points", static_cast<std::uint64_t>(e));
            std::uniform_int_distribution<int> X(0, W - 1), T(0, H - 1);
            int x1 = X(eng), x2 = X(eng), s = T(eng), t = T(eng);
            if (x1 > x2) std::swap(x1, x2);
            if (s > t) std::swap(s, t);
            if (s == t) {
                if (H < 2) throw std::invalid_argument("profile experiment needs at least two rows");
                t == H - 1 ? --s : ++t;
            }
            auto F = lpp::difference_profile(env, x1, x2, t, s);
            for (int y = 0; y <= x1; ++y) {
                csv << e << ',' << x1 << ',' << x2 << ',' << s << ',' << t << ',' << y << ',' << fmt(F[y]);
                if (y < x1) {
                    bool drop = F[y] > F[y + 1];
                    bool split = lpp::split_star_witness(env, y, s, x1, x2, t);
                    ok = ok && F[y + 1] <= F[y] && drop == split;
                    summary_a += drop;
                    ++summary_b;
                    csv << ',' << drop << ',' << split;
                } else {
                    csv << ",,";
                }
                csv << '\n';
            }
        }
        std::cout << "profile: " << trials << " environments, " << summary_a << "/" << summary_b << " strict drops, "
                  << (ok ? "monotone and split-consistent" : "VIOLATION") << "\n";
    } else if (experiment == "geodesics") {
        csv << "env,weight,geodesics,left_right_overlap_distance\n";
        for (long e = 0; e < trials; ++e) {
            auto env = lpp::build_environment(spec, derive_seed(c.seed, "lpp.geodesics", static_cast<std::uint64_t>(e)));
            lpp::Site u{0, 0}, v{W - 1, H - 1};
            auto gs = lpp::all_geodesics(env, u, v, 0.0);
            auto l = lpp::extremal_geodesic(env, u, v, lpp::Side::left);
            auto r = lpp::extremal_geodesic(env, u, v, lpp::Side::right);
            csv << e << ',' << fmt(gs.max_weight) << ',' << gs.paths.size() << ',' << fmt(lpp::overlap_distance(l, r)) << '\n';
            summary_a = std::max<long>(summary_a, static_cast<long>(gs.paths.size()));
        }
        std::cout << "geodesics: " << trials << " environments, at most " << summary_a << " geodesics between corners\n";
    } else if (experiment == "network") {
        std::set<CanonicalCode> catalog_codes = enumerate_landscape().codes();
        csv << "env,geodesics,V,E,k,l,rules,in_catalog,code\n";
        for (long e = 0; e < trials; ++e) {
            auto env = lpp::build_environment(spec, derive_seed(c.seed, "lpp.network", static_cast<std::uint64_t>(e)));
            auto gs = lpp::all_geodesics(env, {0, 0}, {W - 1, H - 1}, 0.0);
            auto g = lpp::extract_network(gs);
            bool rules = check_rules(g).all;
            std::string code_s;
            bool in_cat = false;
            try {
                auto code = canonical_code(g);
                in_cat = catalog_codes.count(code) > 0;
                code_s = code_hex(code);
            } catch (const CodeOverflow&) {
                code_s = "overflow";
            }
            csv << e << ',' << gs.paths.size() << ',' << g.num_vertices() << ',' << g.num_edges() << ',' << g.k() << ',' << g.l() << ','
                << rules << ',' << in_cat << ',' << code_s << '\n';
            summary_a += in_cat;
        }
        std::cout << "network: " << summary_a << "/" << trials << " extracted networks are catalog members\n";
    } else {
        throw std::invalid_argument("unknown experiment '" + experiment + "'");
    }

    nlohmann::ordered_json cfg{{"model", model}, {"size", size}, {"trials", trials}, {"experiment", experiment}};
    cli::RunManifest m("lpp", c.seed, cfg);
    m.add("lpp_" + experiment + ".csv", csv.str());
    m.write(c.out);
    return ok ? 0 : kExitFail;
}

int run_bridges(const Common& c, const std::string& experiment, int k, double gap, double duration, long trials, int grid_steps) {
    if (experiment != "km" && experiment != "slope" && experiment != "all") throw std::invalid_argument("unknown experiment '" + experiment + "'");
    nlohmann::ordered_json cfg{{"experiment", experiment}, {"k", k}, {"gap", gap}, {"duration", duration}, {"trials", trials}, {"grid_steps", grid_steps}};
    cli::RunManifest m("bridges", c.seed, cfg);
    if (experiment == "km" || experiment == "all") {
        std::ostringstream csv;
        csv << "k,gap,duration,km,determinant,condition,mc,std_error,z\n";
        for (int j = 1; j <= k; ++j) {
            std::vector<double> x;
            for (int i = 0; i < j; ++i) x.push_back((j - 1 - i) * gap);
            auto km = bridges::km_nonintersection_prob(x, x, duration);
            bridges::McOptions mo;
            mo.grid_steps = grid_steps;
            auto mc = bridges::mc_nonintersection_prob(x, x, duration, trials, derive_seed(c.seed, "bridges.km", j), mo);
            double z = mc.std_error > 0 ? (mc.estimate - km.probability) / mc.std_error : 0.0;
            csv << j << ',' << fmt(gap) << ',' << fmt(duration) << ',' << fmt(km.probability) << ',' << fmt(km.determinant) << ','
                << fmt(km.condition) << ',' << fmt(mc.estimate) << ',' << fmt(mc.std_error) << ',' << fmt(z) << '\n';
            std::cout << "k=" << j << " km=" << km.probability << " mc=" << mc.estimate << " +- " << mc.std_error << "\n";
        }
        m.add("bridges_km.csv", csv.str());
    }
    if (experiment == "slope" || experiment == "all") {
        bridges::SlopeConfig sc;
        sc.trials = trials;
        sc.seed = derive_seed(c.seed, "bridges.slope");
        auto res = bridges::slope_experiment(sc);
        for (auto [kk, s] : res.slope) std::cout << "slope k=" << kk << ": " << s << "\n";
        m.add("bridges_slope.csv", bridges::slope_csv(res));
    }
    m.write(c.out);
    return 0;
}

int run_report(const Common& c) {
    auto cat = enumerate_landscape();
    auto s = catalog_summary(cat);
    cli::RunManifest m("report", c.seed, nlohmann::ordered_json::object());
    m.add("catalog.json", catalog_to_json(cat).dump(2) + "\n");
    m.add("catalog.csv", export_catalog(cat, "csv"));
    m.add("gallery.dot", export_catalog(cat, "dot"));
    m.add("summary.csv", summary_csv(s));
    std::ostringstream deg;
    deg << "k,l,members\n";
    for (auto [kl, n] : s.by_degrees) deg << kl.first << ',' << kl.second << ',' << n << '\n';
    m.add("degrees.csv", deg.str());
    m.write(c.out);
    std::cout << summary_csv(s) << "\n" << deg.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geonet: geodesic network catalog and lattice experiments"};
    app.require_subcommand(1);
    // key=value lines under a [subcommand] header, e.g. [lpp] then size=64
    app.set_config("--config", "", "key=value option file");
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "master seed");
        sub->add_option("--out", common.out, "output directory (default: $GEONET_OUT_DIR or ./geonet-out)");
    };

    std::string profile, format = "json";
    auto* en = app.add_subcommand("enumerate", "enumerate the network catalog");
    en->add_option("--profile", profile, "star profile: landscape, brownian_map, or a key=value file");
    en->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv", "dot"}));
    add_common(en);

    acceptance::Options vopt;
    auto* ve = app.add_subcommand("verify", "run the acceptance checks");
    add_common(ve);
    ve->add_option("--mc-trials", vopt.mc_trials, "Monte Carlo trials for the bridge check");
    ve->add_option("--slope-trials", vopt.slope_trials, "trials per eps for the exponent check");
    ve->add_option("--threads", vopt.threads, "worker threads (0 = all cores)");

    std::string model = "exponential", size = "100", experiment = "quadrangle";
    long trials = 100;
    auto* lp = app.add_subcommand("lpp", "lattice last-passage experiments");
    lp->add_option("--model", model)->check(CLI::IsMember({"exponential", "geometric", "deterministic"}));
    lp->add_option("--size", size, "N or WxH");
    lp->add_option("--trials", trials);
    lp->add_option("--experiment", experiment)->check(CLI::IsMember({"quadrangle", "profile", "geodesics", "network"}));
    add_common(lp);

    std::string bexp = "all";
    int bk = 3, grid_steps = 200;
    double gap = 1.0, duration = 1.0;
    long btrials = 100000;
    auto* br = app.add_subcommand("bridges", "Karlin-McGregor and near-maximizer experiments");
    br->add_option("--experiment", bexp)->check(CLI::IsMember({"km", "slope", "all"}));
    br->add_option("--k", bk, "largest bridge count")->check(CLI::Range(1, 8));
    br->add_option("--gap", gap);
    br->add_option("--duration", duration);
    br->add_option("--trials", btrials);
    br->add_option("--grid-steps", grid_steps);
    add_common(br);

    auto* re = app.add_subcommand("report", "write the catalog gallery and summary tables");
    add_common(re);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;
    }
    vopt.seed = common.seed;
    try {
        if (*en) return run_enumerate(common, profile, format);
        if (*ve) return run_verify(common, vopt);
        if (*lp) return run_lpp(common, model, size, trials, experiment);
        if (*br) return run_bridges(common, bexp, bk, gap, duration, btrials, grid_steps);
        if (*re) return run_report(common);
    } catch (const lpp::BudgetExceeded& e) {
        std::cerr << "geonet: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "geonet: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
