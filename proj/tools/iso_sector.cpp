#include <isosector/acceptance.hpp>
#include <isosector/cgc.hpp>
#include <isosector/disk.hpp>
#include <isosector/grid.hpp>
#include <isosector/oracle.hpp>
#include <isosector/report.hpp>
#include <isosector/rn.hpp>
#include <isosector/sector.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

using namespace isosector;

namespace {

struct UsageError {
    std::string message;
};

std::vector<double> grid_arg(const std::string& flag, const std::string& text) {
    try {
        return make_grid(text);
    } catch (const Error& e) {
        throw UsageError{flag + ": " + e.what()};
    }
}

struct Output {
    std::string format = "csv";
    std::string path;
};

void add_output(CLI::App* sub, Output& out, std::vector<std::string> formats) {
    sub->add_option("--format", out.format, "output format")->check(CLI::IsMember(formats))->capture_default_str();
    sub->add_option("--out", out.path, "output file (default stdout)");
}

void emit_table(const Table& t, const Output& out) {
    const Format f = parse_format(out.format);
    if (f == Format::Svg) fail(ErrorKind::UnsupportedFormat, "svg is only available for curve and phase outputs");
    write_output(f == Format::Csv ? to_csv(t) : dump_json(to_json(t)), out.path);
}

Cell opt_cell(const std::optional<double>& v) {
    if (v) return *v;
    return std::monostate{};
}

std::map<std::string, std::function<double(double)>> profiles() {
    return {{"r", [](double r) { return r; }},
            {"r2", [](double r) { return r * r; }},
            {"r3", [](double r) { return r * r * r; }},
            {"1+r", [](double r) { return 1.0 + r; }},
            {"const", [](double) { return 1.0; }},
            {"sqrt", [](double r) { return std::sqrt(r); }}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Isoperimetric regions in planar sectors with radial power densities"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0: all, capped by ISO_SECTOR_THREADS)");

    // classify
    double c_p = 1.0, c_theta = 1.0;
    Output c_out;
    auto* classify = app.add_subcommand("classify", "rank arc, semicircle and undulary for one sector");
    classify->add_option("--p", c_p, "density exponent")->required()->check(CLI::PositiveNumber);
    classify->add_option("--theta", c_theta, "sector angle")->required()->check(CLI::PositiveNumber);
    add_output(classify, c_out, {"csv", "json"});

    // phase
    std::string ph_pgrid, ph_tgrid;
    Output ph_out;
    auto* phase = app.add_subcommand("phase", "winner over a (p, theta0) grid");
    phase->add_option("--p-grid", ph_pgrid, "lo:hi:lin|log:count")->required();
    phase->add_option("--theta-grid", ph_tgrid, "lo:hi:lin|log:count")->required();
    add_output(phase, ph_out, {"csv", "json", "svg"});

    // period
    double pe_p = 2.0;
    std::string pe_grid = "1.001:50:log:200";
    Output pe_out;
    auto* period = app.add_subcommand("period", "undulary half period against r1");
    period->add_option("--p", pe_p, "density exponent")->required()->check(CLI::PositiveNumber);
    period->add_option("--r1-grid", pe_grid, "lo:hi:lin|log:count")->capture_default_str();
    add_output(period, pe_out, {"csv", "json"});

    // undulary
    double un_p = 1.0;
    std::optional<double> un_theta, un_r1;
    std::size_t un_nodes = 1024;
    Output un_out;
    auto* undulary = app.add_subcommand("undulary", "one undulary half wave");
    undulary->add_option("--p", un_p, "density exponent")->required()->check(CLI::PositiveNumber);
    auto* un_theta_opt = undulary->add_option("--theta", un_theta, "sector angle (solves for r1)")->check(CLI::PositiveNumber);
    undulary->add_option("--r1", un_r1, "maximum radius (minimum is 1)")->excludes(un_theta_opt)->check(CLI::Range(1.0, 1e300));
    undulary->add_option("--nodes", un_nodes, "samples along the wave")->check(CLI::Range(64, 1 << 22))->capture_default_str();
    add_output(undulary, un_out, {"csv", "json", "svg"});

    // inequality
    double in_p = 1.0;
    std::optional<double> in_theta;
    std::size_t in_trials = 10000;
    std::uint64_t in_seed = 1;
    Output in_out;
    auto* inequality = app.add_subcommand("inequality", "seeded trials of the sector inequality");
    inequality->add_option("--p", in_p, "density exponent")->required()->check(CLI::PositiveNumber);
    inequality->add_option("--theta", in_theta, "sector angle (default pi/(p+1))")->check(CLI::PositiveNumber);
    inequality->add_option("--trials", in_trials, "trial count")->check(CLI::PositiveNumber)->capture_default_str();
    inequality->add_option("--seed", in_seed, "generator seed")->capture_default_str();
    add_output(inequality, in_out, {"csv", "json"});

    // disk
    double dk_a = 2.0, dk_theta = 1.0;
    std::optional<double> dk_area;
    Output dk_out;
    auto* disk = app.add_subcommand("disk", "unit-disk density: candidates for one area, or area thresholds");
    disk->add_option("--a", dk_a, "density inside the unit disk is 1, outside a")->required()->check(CLI::Range(1.0, 1e300));
    disk->add_option("--theta", dk_theta, "sector angle")->required()->check(CLI::PositiveNumber);
    disk->add_option("--area", dk_area, "area to enclose (omit for thresholds)")->check(CLI::PositiveNumber);
    add_output(disk, dk_out, {"csv", "json"});

    // disk-curves
    std::string dc_grid = "1.1:6:lin:50";
    Output dc_out;
    auto* disk_curves = app.add_subcommand("disk-curves", "transition curves f and g over a");
    disk_curves->add_option("--a-grid", dc_grid, "lo:hi:lin|log:count")->capture_default_str();
    add_output(disk_curves, dc_out, {"csv", "json"});

    // rn-check
    int rc_n = 3;
    std::string rc_profile = "r2";
    std::size_t rc_trials = 1000, rc_grid = 0;
    std::uint64_t rc_seed = 1;
    Output rc_out;
    auto* rn_check = app.add_subcommand("rn-check", "convexity condition and averaging chain in R^n");
    rn_check->add_option("--n", rc_n, "dimension (2 or 3)")->check(CLI::Range(2, 3))->capture_default_str();
    std::vector<std::string> profile_names;
    for (const auto& [k, v] : profiles()) profile_names.push_back(k);
    rn_check->add_option("--profile", rc_profile, "radial density")->check(CLI::IsMember(profile_names))->capture_default_str();
    rn_check->add_option("--trials", rc_trials, "random star regions")->capture_default_str();
    rn_check->add_option("--grid", rc_grid, "sphere grid nodes (0: default)");
    rn_check->add_option("--seed", rc_seed, "generator seed")->capture_default_str();
    add_output(rn_check, rc_out, {"csv", "json"});

    // rn-demo
    int rd_n = 2;
    double rd_p = -1.0, rd_volume = 1.0;
    std::string rd_grid = "2:256:log:8";
    Output rd_out;
    auto* rn_demo = app.add_subcommand("rn-demo", "balls of fixed weighted volume with vanishing perimeter");
    rn_demo->add_option("--n", rd_n, "dimension")->check(CLI::Range(2, 64))->capture_default_str();
    rn_demo->add_option("--p", rd_p, "density exponent, -n <= p < 0")->capture_default_str();
    rn_demo->add_option("--volume", rd_volume, "weighted volume")->check(CLI::PositiveNumber)->capture_default_str();
    rn_demo->add_option("--r-grid", rd_grid, "lo:hi:lin|log:count")->capture_default_str();
    add_output(rn_demo, rd_out, {"csv", "json"});

    // oracle
    double or_p = 1.0, or_theta = 1.0, or_area = 1.0;
    std::size_t or_nodes = 256;
    int or_starts = 3;
    std::uint64_t or_seed = 1;
    Output or_out;
    auto* oracle = app.add_subcommand("oracle", "direct minimization over polar graphs");
    oracle->add_option("--p", or_p, "density exponent")->required()->check(CLI::PositiveNumber);
    oracle->add_option("--theta", or_theta, "sector angle")->required()->check(CLI::PositiveNumber);
    oracle->add_option("--area", or_area, "target area")->check(CLI::PositiveNumber)->capture_default_str();
    oracle->add_option("--nodes", or_nodes, "grid nodes")->check(CLI::Range(16, 1 << 16))->capture_default_str();
    oracle->add_option("--starts", or_starts, "2: arc and semicircle, 3: also undulary")->check(CLI::Range(1, 3))->capture_default_str();
    oracle->add_option("--seed", or_seed, "perturbation seed")->capture_default_str();
    add_output(oracle, or_out, {"csv", "json", "svg"});

    // validate
    std::uint64_t va_seed = AcceptanceOptions{}.seed;
    std::string va_path;
    auto* validate = app.add_subcommand("validate", "run the acceptance suite and print its report");
    validate->add_option("--seed", va_seed, "seed for the randomized criteria")->capture_default_str();
    validate->add_option("--out", va_path, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*classify) {
            const auto c = classify_sector({c_p}, c_theta);
            if (c_out.format == "json") write_output(dump_json(classification_json(c)), c_out.path);
            else write_output(to_csv(Table{"classification", phase_header(), {classification_row(c)}}), c_out.path);
        } else if (*phase) {
            const auto pg = grid_arg("--p-grid", ph_pgrid), tg = grid_arg("--theta-grid", ph_tgrid);
            const auto cells = phase_sweep(pg, tg, threads);
            if (ph_out.format == "svg") write_output(svg_phase(cells, pg, tg), ph_out.path);
            else emit_table(phase_table(cells), ph_out);
        } else if (*period) {
            const auto scan = period_scan({pe_p}, grid_arg("--r1-grid", pe_grid), threads);
            Table t{"period", {"p", "r1", "half_period", "lambda"}, {}};
            for (std::size_t i = 0; i < scan.r1.size(); ++i)
                t.rows.push_back({pe_p, scan.r1[i], scan.half_period[i], lambda_of_r1(scan.r1[i], {pe_p})});
            emit_table(t, pe_out);
        } else if (*undulary) {
            require(un_theta.has_value() != un_r1.has_value(), ErrorKind::ParamOutOfRange, "give exactly one of --theta, --r1");
            double r1 = 0.0;
            if (un_theta) {
                const auto s = solve_equilibrium_undulary(*un_theta, {un_p});
                if (!s.undulary)
                    fail(ErrorKind::NoTransition, "no undulary with half period " + format_number(*un_theta) +
                                                      "; reachable range (" + format_number(s.t_min) + ", " +
                                                      format_number(s.t_max) + ")");
                r1 = s.undulary->r1;
            } else {
                r1 = *un_r1;
            }
            const auto spec = UndularySpec::make(r1, {un_p});
            const auto g = integrate_undulary(spec, un_nodes);
            if (un_out.format == "svg") {
                write_output(svg_sector_curves(g.theta0, {{g, "undulary p=" + format_number(un_p) + " r1=" + format_number(r1)}},
                                               "undulary"),
                             un_out.path);
            } else {
                Table t{"undulary", {"theta", "r"}, {}};
                for (std::size_t i = 0; i < g.theta.size(); ++i) t.rows.push_back({g.theta[i], g.radius[i]});
                emit_table(t, un_out);
            }
        } else if (*inequality) {
            const double th = in_theta.value_or(std::numbers::pi / (in_p + 1.0));
            const auto s = inequality_trials({in_p}, th, in_trials, in_seed, threads);
            Table t{"inequality", {"p", "theta0", "trials", "violations", "worst_excess", "seed"}, {}};
            t.rows.push_back({in_p, th, std::int64_t(s.trials), std::int64_t(s.violations), s.worst_excess,
                              std::to_string(in_seed)});
            emit_table(t, in_out);
        } else if (*disk) {
            require(dk_a > 1.0, ErrorKind::OutOfDomain, "disk density needs a > 1");
            if (dk_area) {
                const auto c = classify_disk({dk_a}, dk_theta, *dk_area);
                Table t{"disk", {"a", "theta0", "area", "winner", "tie", "rank", "tag", "branch", "param", "perimeter"}, {}};
                const std::string winner = c.tie ? "tie" : to_string(c.winner);
                for (std::size_t i = 0; i < c.ranked.size(); ++i) {
                    const auto& x = c.ranked[i];
                    t.rows.push_back({dk_a, dk_theta, *dk_area, winner, std::int64_t(c.tie), std::int64_t(i + 1),
                                      std::string(to_string(x.tag)),
                                      x.tag == DiskTag::Bite ? Cell{std::string(to_string(x.branch))} : Cell{},
                                      x.param, x.perimeter});
                }
                if (c.tangent)
                    t.rows.push_back({dk_a, dk_theta, *dk_area, winner, std::int64_t(c.tie), std::monostate{},
                                      std::string("tangent-semicircle"), std::monostate{}, c.tangent->R,
                                      c.tangent->perimeter});
                emit_table(t, dk_out);
            } else {
                const auto th = transition_thresholds({dk_a}, dk_theta);
                auto thr = [](const std::optional<AreaThreshold>& x) { return x ? Cell{x->value} : Cell{}; };
                std::string notes;
                for (const auto& n : th.notes) notes += (notes.empty() ? "" : "; ") + n;
                Table t{"disk-thresholds",
                        {"a", "theta0", "small_area_winner", "a0", "a1", "annulus_never", "bite_never", "a_large",
                         "a_large_bisected", "notes"},
                        {}};
                t.rows.push_back({dk_a, dk_theta, std::string(to_string(th.small_area)), thr(th.a0), thr(th.a1),
                                  std::int64_t(th.annulus_never), std::int64_t(th.bite_never), opt_cell(th.a_large), thr(th.a_large_bisected), notes});
                emit_table(t, dk_out);
            }
        } else if (*disk_curves) {
            const auto rows = transition_curves_sweep(grid_arg("--a-grid", dc_grid), threads);
            Table t{"disk-curves", {"a", "f_theta", "g_theta", "error"}, {}};
            for (const auto& r : rows) t.rows.push_back({r.a, r.f_theta, opt_cell(r.g_theta), r.error});
            emit_table(t, dc_out);
        } else if (*rn_check) {
            const auto prof = RadialProfile::make(rc_n, profiles().at(rc_profile));
            const auto v = betta_convexity_check(prof);
            Table t{"rn-check",
                    {"n", "profile", "convex", "worst_second_difference", "tolerance", "trials", "failures", "worst_gap"},
                    {}};
            Cell trials = std::int64_t(0), failures = std::monostate{}, gap = std::monostate{};
            if (v.convex && rc_trials > 0) {
                const auto j = jensen_trials(prof, rc_trials, rc_seed, rc_grid, threads);
                trials = std::int64_t(j.trials);
                failures = std::int64_t(j.failures);
                gap = j.worst_gap;
            }
            t.rows.push_back({std::int64_t(rc_n), rc_profile, std::int64_t(v.convex), v.worst_second_difference,
                              v.tolerance, trials, failures, gap});
            emit_table(t, rc_out);
        } else if (*rn_demo) {
            const auto rows = vanishing_perimeter_demo(rd_n, rd_p, rd_volume, grid_arg("--r-grid", rd_grid));
            Table t{"rn-demo", {"n", "p", "R", "h", "volume", "perimeter"}, {}};
            for (const auto& r : rows) t.rows.push_back({std::int64_t(rd_n), rd_p, r.R, r.h, r.volume, r.perimeter});
            emit_table(t, rd_out);
        } else if (*oracle) {
            const auto oc = oracle_classify(or_p, or_theta, or_area, or_starts, or_nodes, or_seed, threads);
            if (or_out.format == "svg") {
                std::vector<SvgCurve> curves;
                for (std::size_t i = 0; i < oc.runs.size(); ++i)
                    curves.push_back({oc.runs[i].curve, "start " + oc.starts[i] + ": " +
                                                            to_string(shape_signature(oc.runs[i].curve)) +
                                                            " P=" + format_number(oc.runs[i].perimeter)});
                write_output(svg_sector_curves(or_theta, curves, "oracle"), or_out.path);
            } else {
                const auto cls = classify_sector({or_p}, or_theta);
                Table t{"oracle",
                        {"p", "theta0", "start", "converged", "iterations", "gradient_norm", "area", "perimeter", "ratio",
                         "shape", "dispersion", "best", "oracle_winner", "classifier_winner"},
                        {}};
                for (std::size_t i = 0; i < oc.runs.size(); ++i) {
                    const auto& r = oc.runs[i];
                    t.rows.push_back({or_p, or_theta, oc.starts[i], std::int64_t(r.converged), std::int64_t(r.iterations),
                                      r.gradient_norm, r.area, r.perimeter, iso_ratio(r.perimeter, r.area, {or_p}),
                                      std::string(to_string(shape_signature(r.curve))),
                                      curvature_dispersion(r.curve, {or_p}).relative(),
                                      std::int64_t(oc.starts[i] == oc.best_start), std::string(to_string(oc.winner)),
                                      std::string(to_string(cls.winner))});
                }
                emit_table(t, or_out);
            }
        } else if (*validate) {
            AcceptanceOptions opt;
            opt.seed = va_seed;
            opt.threads = threads;
            const auto results = run_acceptance(opt, [](const CriterionResult& r) { std::cerr << criterion_line(r) << "\n"; });
            write_output(acceptance_report(results, va_seed), va_path);
            for (const auto& r : results)
                if (!r.pass) return 1;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.message << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
