// Command-line front end: every estimator behind reproducible seeds with
// machine-readable CSV/JSON output. Same argv + same seed means byte-identical
// output, independent of the worker count.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdim/wdim.hpp"

using nlohmann::json;
using namespace wdim;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Output {
    std::string path;  // empty = stdout

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::domain_error("cannot open output path: " + path);
        f << text;
    }
};

struct CsvTable {
    std::string header;
    std::vector<std::vector<double>> rows;

    std::string render() const {
        std::ostringstream out;
        out << header << "\n";
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) out << ",";
                out << fmt17(row[i]);
            }
            out << "\n";
        }
        return out.str();
    }
};

RidgeKind parse_ridge(const std::string& name) {
    if (name == "cos" || name == "cosine") return RidgeKind::Cosine;
    if (name == "pwl" || name == "dist") return RidgeKind::PiecewiseLinear;
    throw std::domain_error("unknown ridge kind: " + name + " (use cos|pwl)");
}

json fit_to_json(const ScalingFit& fit) {
    json pts = json::array();
    for (const auto& [x, y] : fit.points) pts.push_back({x, y});
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"max_residual", fit.max_residual},
            {"points", pts}};
}

json density_to_json(const EmpiricalDensity& h) {
    json bins = json::array();
    for (size_t i = 0; i < h.counts.size(); ++i)
        bins.push_back({h.lo + i * h.bin_width(), h.lo + (i + 1) * h.bin_width(), h.density(i)});
    return {{"bins", bins}, {"mass", h.mass()}, {"l2_norm_sq", h.l2_norm_sq()}};
}

CsvTable density_to_csv(const EmpiricalDensity& h) {
    CsvTable t;
    t.header = "bin_left,bin_right,density";
    for (size_t i = 0; i < h.counts.size(); ++i)
        t.rows.push_back({h.lo + i * h.bin_width(), h.lo + (i + 1) * h.bin_width(), h.density(i)});
    return t;
}

// Per-subcommand shared state. The thread count is execution plumbing, not
// part of the run's identity, so it is never echoed into the config object.
struct Common {
    int b = 2;
    double lambda = 0.6;
    std::string ridge = "cos";
    double tail_tol = 1e-12;
    std::uint64_t seed = 0;
    std::uint64_t samples = 100000;
    std::string format;  // default decided per subcommand
    Output out;
    int threads = 0;

    void apply_threads() const {
        if (threads > 0) par::set_thread_count(threads);
    }

    WeierstrassFunction wf() const {
        return WeierstrassFunction::create(SystemParams::create(b, lambda),
                                           {parse_ridge(ridge)}, tail_tol);
    }

    bool json_mode(const char* default_format) const {
        const std::string f = format.empty() ? default_format : format;
        if (f != "csv" && f != "json") throw std::domain_error("format must be csv or json");
        return f == "json";
    }

    json config(const std::string& subcommand) const {
        return {{"subcommand", subcommand}, {"b", b},           {"lambda", lambda},
                {"ridge", ridge},           {"tail_tol", tail_tol}, {"seed", seed},
                {"samples", samples}};
    }
};

void add_output_flags(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
    sub->add_option("--format", c.format, "output format: csv | json")->capture_default_str();
    sub->add_option("--out", c.out.path, "output file (default: stdout)")->capture_default_str();
    sub->add_option("--threads", c.threads,
                    "worker threads (0 = WDIM_THREADS env or hardware; never affects results)")
        ->capture_default_str();
}

void add_param_flags(CLI::App* sub, Common& c) {
    sub->add_option("--b", c.b, "integer base b >= 2")->capture_default_str();
    sub->add_option("--lambda", c.lambda, "lambda in (1/b, 1)")->capture_default_str();
    sub->add_option("--ridge", c.ridge, "ridge profile: cos | pwl")->capture_default_str();
    sub->add_option("--tail-tol", c.tail_tol, "series truncation tolerance")
        ->capture_default_str();
}

void add_samples_flag(CLI::App* sub, Common& c) {
    sub->add_option("--samples", c.samples, "Monte Carlo samples")->capture_default_str();
}

void emit(const Common& c, const char* default_format, const json& as_json,
          const CsvTable& as_csv, const std::string& csv_note = "") {
    if (c.json_mode(default_format)) {
        c.out.write(as_json.dump(2) + "\n");
    } else {
        c.out.write(as_csv.render());
        if (!csv_note.empty()) std::cerr << csv_note << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerics for Weierstrass graphs: dimension estimators, baker-map "
                 "dynamics, stable-fibre geometry, and critical parameters"};
    app.require_subcommand(1);

    // ---- eval ----------------------------------------------------------
    Common ec;
    double eval_x = 0.0;
    auto* eval = app.add_subcommand("eval", "evaluate the series W(x)");
    add_param_flags(eval, ec);
    eval->add_option("--x", eval_x, "point in [0,1)")->capture_default_str();
    add_output_flags(eval, ec);
    eval->callback([&] {
        ec.apply_threads();
        auto wf = ec.wf();
        if (!(eval_x >= 0.0 && eval_x < 1.0))
            throw std::domain_error("eval: x must lie in [0,1)");
        const double v = wf.value(eval_x);
        json j{{"config", {{"subcommand", "eval"}, {"b", ec.b}, {"lambda", ec.lambda},
                           {"ridge", ec.ridge}, {"tail_tol", ec.tail_tol}, {"x", eval_x}}},
               {"value", v}};
        CsvTable t;
        t.header = "value";
        t.rows.push_back({v});
        emit(ec, "json", j, t);
    });

    // ---- lambdab -------------------------------------------------------
    Common lc;
    double lb_tol = 1e-12;
    auto* lambdab = app.add_subcommand("lambdab", "critical parameter lambda_b for a base");
    lambdab->add_option("--b", lc.b, "integer base b >= 2")->capture_default_str();
    lambdab->add_option("--tol", lb_tol, "bisection width target")->capture_default_str();
    add_output_flags(lambdab, lc);
    lambdab->callback([&] {
        lc.apply_threads();
        auto r = solve_lambda_b(lc.b, lb_tol);
        json j{{"config", {{"subcommand", "lambdab"}, {"b", lc.b}, {"tol", lb_tol}}},
               {"b", r.base},
               {"lambda_b", r.lambda_b},
               {"residual", r.residual},
               {"iterations", r.iterations},
               {"bracket", {r.bracket_lo, r.bracket_hi}}};
        CsvTable t;
        t.header = "b,lambda_b,residual";
        t.rows.push_back({static_cast<double>(r.base), r.lambda_b, r.residual});
        emit(lc, "json", j, t);
    });

    // ---- boxdim --------------------------------------------------------
    Common bc;
    int bd_nmin = 3, bd_nmax = 9, bd_spc = 64;
    auto* boxdim = app.add_subcommand("boxdim", "box-counting dimension of the graph");
    add_param_flags(boxdim, bc);
    boxdim->add_option("--nmin", bd_nmin, "smallest scale exponent")->capture_default_str();
    boxdim->add_option("--nmax", bd_nmax, "largest scale exponent")->capture_default_str();
    boxdim->add_option("--samples-per-column", bd_spc, "stratified samples per column")
        ->capture_default_str();
    add_output_flags(boxdim, bc);
    boxdim->callback([&] {
        bc.apply_threads();
        auto res = box_dimension(bc.wf(), bd_nmin, bd_nmax, bd_spc, bc.seed);
        json j{{"config", bc.config("boxdim")},
               {"nmin", bd_nmin},
               {"nmax", bd_nmax},
               {"samples_per_column", bd_spc},
               {"fit", fit_to_json(res.fit)}};
        json pts = json::array();
        CsvTable t;
        t.header = "N,log_scale,box_count";
        for (const auto& p : res.points) {
            t.rows.push_back({static_cast<double>(p.N), p.log_scale, p.count});
            pts.push_back({{"N", p.N}, {"log_scale", p.log_scale}, {"box_count", p.count}});
        }
        j["points"] = pts;
        emit(bc, "csv", j, t,
             "slope=" + fmt17(res.fit.slope) + " intercept=" + fmt17(res.fit.intercept) +
                 " max_residual=" + fmt17(res.fit.max_residual));
    });

    // ---- localdim ------------------------------------------------------
    Common ldc;
    int ld_nmin = 2, ld_nmax = 8;
    double ld_k = -1.0, ld_xi = -1.0, ld_x = -1.0;
    auto* localdim = app.add_subcommand(
        "localdim", "local dimension along fibre-band neighbourhoods of one point");
    add_param_flags(localdim, ldc);
    localdim->add_option("--xi", ld_xi, "expanding coordinate (default: drawn from seed)")
        ->capture_default_str();
    localdim->add_option("--x", ld_x, "contracting coordinate (default: drawn from seed)")
        ->capture_default_str();
    localdim->add_option("--nmin", ld_nmin, "smallest scale exponent")->capture_default_str();
    localdim->add_option("--nmax", ld_nmax, "largest scale exponent")->capture_default_str();
    localdim->add_option("--k", ld_k, "band half-height multiplier (default: K1 + 1)")
        ->capture_default_str();
    add_samples_flag(localdim, ldc);
    add_output_flags(localdim, ldc);
    localdim->callback([&] {
        ldc.apply_threads();
        auto wf = ldc.wf();
        SampleRng rng(ldc.seed, 0xba5eull, 0);
        const double xi = ld_xi >= 0.0 ? ld_xi : rng.next_unit();
        const double x = ld_x >= 0.0 ? ld_x : rng.next_unit();
        const double K = ld_k >= 0.0 ? ld_k : default_band_k(wf);
        if (ld_nmin > ld_nmax) throw std::domain_error("localdim: nmin must be <= nmax");
        auto w = digits_of(xi, wf.params.base, fiber_digit_count(wf));
        CsvTable t;
        t.header = "N,mu_VN,ratio";
        json rows = json::array();
        for (int N = ld_nmin; N <= ld_nmax; ++N) {
            auto est = v_n_measure(wf, w, x, N, K, ldc.samples, ldc.seed);
            const double ratio = est.value > 0.0
                ? std::log(est.value) / (-N * std::log(static_cast<double>(wf.params.base)))
                : 0.0;
            t.rows.push_back({static_cast<double>(N), est.value, ratio});
            rows.push_back({{"N", N}, {"mu_VN", est.value}, {"ratio", ratio},
                            {"std_error", est.std_error}});
        }
        json j{{"config", ldc.config("localdim")}, {"xi", xi}, {"x", x}, {"K", K},
               {"rows", rows}};
        emit(ldc, "csv", j, t);
    });

    // ---- telescope -----------------------------------------------------
    Common tc;
    std::vector<int> tel_n{2, 4, 6};
    double tel_k = -1.0, tel_xi = -1.0, tel_x = -1.0;
    auto* telescope = app.add_subcommand(
        "telescope", "compare the column estimator against its baker preimage twin");
    add_param_flags(telescope, tc);
    telescope->add_option("--xi", tel_xi, "expanding coordinate (default: drawn from seed)")
        ->capture_default_str();
    telescope->add_option("--x", tel_x, "contracting coordinate (default: drawn from seed)")
        ->capture_default_str();
    telescope->add_option("--n", tel_n, "scale exponents")->delimiter(',')->capture_default_str();
    telescope->add_option("--k", tel_k, "band half-height multiplier (default: K1 + 1)")
        ->capture_default_str();
    add_samples_flag(telescope, tc);
    add_output_flags(telescope, tc);
    telescope->callback([&] {
        tc.apply_threads();
        auto wf = tc.wf();
        SampleRng rng(tc.seed, 0xba5eull, 0);
        const double xi = tel_xi >= 0.0 ? tel_xi : rng.next_unit();
        const double x = tel_x >= 0.0 ? tel_x : rng.next_unit();
        const double K = tel_k >= 0.0 ? tel_k : default_band_k(wf);
        CsvTable t;
        t.header = "N,lhs,rhs,z_score";
        json rows = json::array();
        for (int N : tel_n) {
            auto r = telescope_check(wf, xi, x, N, K, tc.samples, tc.seed);
            t.rows.push_back({static_cast<double>(N), r.lhs, r.rhs, r.z_score});
            rows.push_back({{"N", N}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"z_score", r.z_score}});
        }
        json j{{"config", tc.config("telescope")}, {"xi", xi}, {"x", x}, {"K", K},
               {"rows", rows}};
        emit(tc, "csv", j, t);
    });

    // ---- scaling -------------------------------------------------------
    Common sc;
    int sc_points = 20;
    std::vector<int> sc_n{2, 3, 4, 5, 6, 7, 8};
    double sc_k = -1.0;
    auto* scaling = app.add_subcommand(
        "scaling", "small-measure scaling exponent of fibre distances at random base points");
    add_param_flags(scaling, sc);
    scaling->add_option("--points", sc_points, "number of random base points")
        ->capture_default_str();
    scaling->add_option("--n", sc_n, "scale exponents")->delimiter(',')->capture_default_str();
    scaling->add_option("--k", sc_k, "band half-height multiplier (default: K1 + 1)")
        ->capture_default_str();
    add_samples_flag(scaling, sc);
    add_output_flags(scaling, sc);
    scaling->callback([&] {
        sc.apply_threads();
        auto wf = sc.wf();
        const double K = sc_k >= 0.0 ? sc_k : default_band_k(wf);
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < sc_points; ++i) {
            SampleRng rng(sc.seed, 0xba5eull, static_cast<std::uint64_t>(i));
            pts.emplace_back(rng.next_unit(), rng.next_unit());
        }
        auto res = measure_scaling_exponent(wf, pts, sc_n, K, sc.samples, sc.seed);
        CsvTable t;
        t.header = "point,N,p_hat,stderr";
        json per_point = json::array();
        for (size_t i = 0; i < res.per_point.size(); ++i) {
            const auto& pr = res.per_point[i];
            for (const auto& cell : pr.cells)
                t.rows.push_back({static_cast<double>(i), static_cast<double>(cell.N),
                                  cell.frac.fraction, cell.frac.std_error});
            per_point.push_back({{"xi", pr.xi}, {"x", pr.x}, {"slope", pr.fit.slope},
                                 {"dropped", pr.dropped}});
        }
        json j{{"config", sc.config("scaling")}, {"K", K}, {"median_slope", res.median_slope},
               {"per_point", per_point}};
        emit(sc, "csv", j, t, "median_slope=" + fmt17(res.median_slope));
    });

    // ---- theta-stats ---------------------------------------------------
    Common thc;
    double th_x = 0.0;
    int th_bins = 512, th_grid = 64;
    bool th_capacity = false;
    auto* theta_stats = app.add_subcommand(
        "theta-stats", "conditional law of the z = 0 fibre series at fixed x");
    add_param_flags(theta_stats, thc);
    theta_stats->add_option("--x", th_x, "conditioning point in [0,1)")->capture_default_str();
    theta_stats->add_option("--bins", th_bins, "histogram bins")->capture_default_str();
    theta_stats->add_flag("--capacity", th_capacity,
                          "estimate the integrated squared density over an x grid instead");
    theta_stats->add_option("--grid", th_grid, "x grid size for --capacity")
        ->capture_default_str();
    add_samples_flag(theta_stats, thc);
    add_output_flags(theta_stats, thc);
    theta_stats->callback([&] {
        thc.apply_threads();
        auto wf = thc.wf();
        if (th_capacity) {
            auto cap = capacity_theta0(wf, th_grid, thc.samples, th_bins, thc.seed);
            json j{{"config", thc.config("theta-stats")},
                   {"capacity", cap.value},
                   {"std_error", cap.std_error},
                   {"bins", cap.bins},
                   {"grid", th_grid}};
            CsvTable t;
            t.header = "capacity,stderr";
            t.rows.push_back({cap.value, cap.std_error});
            emit(thc, "json", j, t);
            return;
        }
        auto samples = sample_theta0_conditional(wf, th_x, thc.samples, thc.seed);
        const double bound = two_pi * wf.params.gamma / (1.0 - wf.params.gamma);
        auto h = EmpiricalDensity::create(-bound, bound * (1.0 + 1e-12), th_bins);
        for (double s : samples) h.add(s);
        h.check_invariants();
        json j{{"config", thc.config("theta-stats")}, {"x", th_x},
               {"density", density_to_json(h)}};
        emit(thc, "csv", j, density_to_csv(h));
    });

    // ---- bernoulli -----------------------------------------------------
    Common bnc;
    double bn_gamma = 0.5;
    int bn_bins = 512;
    auto* bernoulli = app.add_subcommand(
        "bernoulli", "histogram of the infinite Bernoulli convolution with ratio gamma");
    bernoulli->add_option("--gamma", bn_gamma, "ratio in (0,1)")->capture_default_str();
    bernoulli->add_option("--bins", bn_bins, "histogram bins")->capture_default_str();
    add_samples_flag(bernoulli, bnc);
    add_output_flags(bernoulli, bnc);
    bernoulli->callback([&] {
        bnc.apply_threads();
        auto h = bernoulli_density(bn_gamma, bnc.samples, bn_bins, bnc.seed);
        json j{{"config",
                {{"subcommand", "bernoulli"}, {"gamma", bn_gamma}, {"bins", bn_bins},
                 {"samples", bnc.samples}, {"seed", bnc.seed}}},
               {"density", density_to_json(h)}};
        emit(bnc, "csv", j, density_to_csv(h));
    });

    // ---- schedule ------------------------------------------------------
    Common shc;
    int sh_ell = 3;
    double sh_r = 1e-4, sh_z = 0.1;
    auto* schedule = app.add_subcommand(
        "schedule", "multi-scale truncation levels for the fibre series");
    schedule->add_option("--b", shc.b, "integer base b >= 2")->capture_default_str();
    schedule->add_option("--lambda", shc.lambda, "lambda in (1/b, 1)")->capture_default_str();
    schedule->add_option("--ell", sh_ell, "number of levels")->capture_default_str();
    schedule->add_option("--r", sh_r, "radius r in (0,1)")->capture_default_str();
    schedule->add_option("--z", sh_z, "offset z with 0 < |z| <= 1")->capture_default_str();
    add_output_flags(schedule, shc);
    schedule->callback([&] {
        shc.apply_threads();
        auto p = SystemParams::create(shc.b, shc.lambda);
        auto s = truncation_schedule(p, sh_ell, sh_r, sh_z);
        json cfg{{"subcommand", "schedule"}, {"b", shc.b}, {"lambda", shc.lambda},
                 {"ell", sh_ell}, {"r", sh_r}, {"z", sh_z}};
        if (!s) {
            json j{{"config", cfg}, {"trivial_regime", true}};
            CsvTable t;
            t.header = "trivial_regime";
            t.rows.push_back({1.0});
            emit(shc, "json", j, t);
            return;
        }
        json j{{"config", cfg},          {"trivial_regime", false}, {"alpha", s->alpha},
               {"r_z", s->r_z},          {"levels", s->levels},     {"n_cap", s->n_cap}};
        CsvTable t;
        t.header = "k,n_k";
        for (int k = 0; k <= s->ell; ++k)
            t.rows.push_back({static_cast<double>(k), static_cast<double>(s->n(k))});
        emit(shc, "json", j, t);
    });

    // ---- concentration -------------------------------------------------
    Common cc;
    std::vector<double> cz{0.2}, cr{1e-2, 3e-3, 1e-3}, ccenters{-0.5, -0.25, 0.0, 0.25, 0.5};
    double c_gamma = 0.5;
    auto* concentration = app.add_subcommand(
        "concentration", "interval concentration of the fibre series over random states");
    add_param_flags(concentration, cc);
    concentration->add_option("--gamma", c_gamma,
                              "ratio for the pwl branch (pwl ignores --b/--lambda)")
        ->capture_default_str();
    concentration->add_option("--z", cz, "offsets z")->delimiter(',')->capture_default_str();
    concentration->add_option("--r", cr, "radii r (2r < |z|)")->delimiter(',')
        ->capture_default_str();
    concentration->add_option("--centers", ccenters, "interval centers")->delimiter(',')
        ->capture_default_str();
    add_samples_flag(concentration, cc);
    add_output_flags(concentration, cc);
    concentration->callback([&] {
        cc.apply_threads();
        ConcentrationScan scan;
        json cfg = cc.config("concentration");
        if (parse_ridge(cc.ridge) == RidgeKind::PiecewiseLinear) {
            scan = concentration_scan_pwl(c_gamma, cz, cr, ccenters, cc.samples, cc.seed);
            cfg["gamma"] = c_gamma;
        } else {
            scan = concentration_scan(cc.wf(), cz, cr, ccenters, cc.samples, cc.seed);
        }
        CsvTable t;
        t.header = "z,r,p_hat,stderr";
        json cells = json::array();
        for (const auto& cell : scan.cells) {
            t.rows.push_back({cell.z, cell.r, cell.p_hat, cell.std_error});
            cells.push_back({{"z", cell.z}, {"r", cell.r}, {"p_hat", cell.p_hat},
                             {"stderr", cell.std_error}});
        }
        json j{{"config", cfg}, {"cells", cells}};
        json rexp = json::array(), zexp = json::array();
        std::string note;
        for (const auto& [z, e] : scan.r_exponents) {
            rexp.push_back({{"z", z}, {"exponent", e}});
            note += "r_exponent(z=" + fmt17(z) + ")=" + fmt17(e) + " ";
        }
        for (const auto& [r, e] : scan.z_exponents) zexp.push_back({{"r", r}, {"exponent", e}});
        j["r_exponents"] = rexp;
        j["z_exponents"] = zexp;
        json dropped = json::array();
        for (const auto& [z, r] : scan.dropped) dropped.push_back({{"z", z}, {"r", r}});
        j["dropped"] = dropped;
        emit(cc, "csv", j, t, note);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
