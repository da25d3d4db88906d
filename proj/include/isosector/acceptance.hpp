#pragma once

#include "cgc.hpp"
#include "disk.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "measures.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "rn.hpp"
#include "sector.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace isosector {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<std::string> details;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
};

namespace acceptance {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }
inline std::string fix(double v) { return fmt("%.6f", v); }

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

inline CriterionResult closed_forms() {
    CriterionResult r{1, "closed-form agreement at 2048 nodes", true, {}};
    constexpr double tol = 1e-9;
    for (double p : {0.5, 1.0, 2.0, 5.0}) {
        const PowerDensity d{p};
        double worst = 0.0;
        for (double th : {0.5, 1.5, 3.0}) {
            const double R = 1.3;
            const auto q = polar_measure(PolarGraph::sample([&](double) { return R; }, th, 2048), d);
            const auto c = arc_measures(R, d, th);
            worst = std::max({worst, rel(q.area, c.area), rel(q.perimeter, c.perimeter), rel(q.ratio, c.ratio)});
        }
        const double half = 0.5 * std::numbers::pi;
        const auto q = polar_measure(
            PolarGraph::sample([](double t) { return std::max(0.0, std::cos(t)); }, half, 2048, false, true), d);
        const auto c = semicircle_measures(1.0, d);
        const double ws = std::max({rel(q.area, c.area), rel(q.perimeter, c.perimeter), rel(q.ratio, c.ratio)});
        const bool ok = worst <= tol && ws <= tol;
        r.pass = r.pass && ok;
        r.details.push_back("p=" + fmt("%g", p) + " arc max rel err " + sci(worst) + ", semicircle " + sci(ws) +
                            " (tol 1e-9)");
    }
    return r;
}

inline CriterionResult curvature_calibration() {
    CriterionResult r{2, "generalized curvature calibration at 4096 nodes", true, {}};
    constexpr double tol = 1e-5;
    for (double p : {0.5, 1.0, 2.0}) {
        const PowerDensity d{p};
        auto worst = [&](const PolarGraph& g, double target) {
            double w = 0.0;
            for (double v : generalized_curvature_of(g, d)) w = std::max(w, std::abs(v - target));
            return w;
        };
        const double e_arc = worst(PolarGraph::sample([](double) { return 1.0; }, 1.0, 4096), p + 1.0);
        const double e_semi = worst(PolarGraph::sample([](double t) { return std::cos(t); }, 1.2, 4096), p + 2.0);
        const double lim = std::numbers::pi / (2.0 * p + 2.0);
        const double e_geo = worst(PolarGraph::sample([&](double t) { return geodesic_radius(t, d); }, 0.8 * lim, 4096), 0.0);
        const bool ok = e_arc <= tol && e_semi <= tol && e_geo <= tol;
        r.pass = r.pass && ok;
        r.details.push_back("p=" + fmt("%g", p) + " |lambda err| circle about origin " + sci(e_arc) +
                            ", circle through origin " + sci(e_semi) + ", geodesic " + sci(e_geo) + " (tol 1e-5)");
    }
    return r;
}

inline CriterionResult period_limits() {
    CriterionResult r{3, "half period near r1 = 1", true, {}};
    for (double p : {0.5, 1.0, 2.0}) {
        const double t = half_period(1.0 + 1e-6, {p}), ref = std::numbers::pi / std::sqrt(p + 1.0);
        const bool ok = std::abs(t - ref) <= 1e-4;
        r.pass = r.pass && ok;
        r.details.push_back("p=" + fmt("%g", p) + " T=" + fix(t) + " vs pi/sqrt(p+1)=" + fix(ref) + " diff " +
                            sci(std::abs(t - ref)) + " (tol 1e-4)");
    }
    return r;
}

inline const char* kPeriodGrid = "1.001:50:log:200";

inline CriterionResult period_curve(unsigned threads) {
    CriterionResult r{4, "period curve for p = 2", true, {}};
    const auto scan = period_scan({2.0}, make_grid(kPeriodGrid), threads);
    const double lo = std::numbers::pi / std::sqrt(3.0) - 1e-3, hi = 2.0 * std::numbers::pi / 3.0 + 1e-3;
    double tmin = INFINITY, tmax = -INFINITY;
    for (double t : scan.half_period) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    const bool confined = tmin > lo && tmax < hi;
    r.pass = scan.violations == 0 && confined;
    r.details.push_back(std::string("grid ") + kPeriodGrid + ", " + std::to_string(scan.r1.size()) + " points, " +
                        std::to_string(scan.violations) + " decreases");
    r.details.push_back("T range [" + fix(tmin) + ", " + fix(tmax) + "] inside (" + fix(lo) + ", " + fix(hi) + ")");
    return r;
}

inline CriterionResult transitions() {
    CriterionResult r{5, "regime transitions for p = 1", true, {}};
    const auto rep = locate_transitions({1.0});
    r.pass = rep.theta1.within_bounds && rep.theta2.within_bounds;
    r.details.push_back("theta1=" + fix(rep.theta1.theta) + " proven [" + fix(rep.bounds.theta1_lo) + ", " +
                        fix(rep.bounds.theta1_hi) + "] " + (rep.theta1.within_bounds ? "inside" : "OUTSIDE"));
    r.details.push_back("theta2=" + fix(rep.theta2.theta) + " proven [" + fix(rep.bounds.theta2_lo) + ", " +
                        fix(rep.bounds.theta2_hi) + "] " + (rep.theta2.within_bounds ? "inside" : "OUTSIDE"));
    r.details.push_back("recorded: pi/sqrt(2)=" + fix(rep.conjecture.theta1) + " diff " +
                        sci(std::abs(rep.theta1.theta - rep.conjecture.theta1)) + ", 3pi/4=" + fix(rep.conjecture.theta2) +
                        " diff " + sci(std::abs(rep.theta2.theta - rep.conjecture.theta2)) + " (within 0.02: " +
                        (rep.theta1.agrees_with_conjecture && rep.theta2.agrees_with_conjecture ? "yes" : "no") + ")");
    return r;
}

inline CriterionResult proven_floors(unsigned threads) {
    CriterionResult r{6, "proven winner floors and winner monotonicity", true, {}};
    const double pi = std::numbers::pi;
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        std::vector<double> low(50), high(50);
        for (int i = 0; i < 50; ++i) {
            low[i] = pi / (p + 1.0) * double(i + 1) / 50.0;
            high[i] = pi + pi * double(i) / 49.0;
        }
        const auto lc = phase_sweep({p}, low, threads), hc = phase_sweep({p}, high, threads);
        int bad_low = 0, bad_high = 0;
        for (const auto& c : lc) bad_low += (!c.result || c.result->winner != Winner::Arc) ? 1 : 0;
        for (const auto& c : hc) bad_high += (!c.result || c.result->winner != Winner::Semicircle) ? 1 : 0;
        std::vector<double> row(200);
        for (int i = 0; i < 200; ++i) row[i] = 0.05 + (2.0 * pi - 0.05) * double(i) / 199.0;
        const bool mono = winner_sequence_monotone(phase_sweep({p}, row, threads));
        const bool ok = bad_low == 0 && bad_high == 0 && mono;
        r.pass = r.pass && ok;
        r.details.push_back("p=" + fmt("%g", p) + " non-arc below pi/(p+1): " + std::to_string(bad_low) +
                            "/50, non-semicircle above pi: " + std::to_string(bad_high) +
                            "/50, monotone over 200 angles: " + (mono ? "yes" : "no"));
    }
    return r;
}

inline CriterionResult inequality(std::uint64_t seed, unsigned threads) {
    CriterionResult r{7, "analytic inequality trials", true, {}};
    for (double p : {0.5, 1.0, 2.0}) {
        const auto s = inequality_trials({p}, std::numbers::pi / (p + 1.0), 10000, seed, threads);
        r.pass = r.pass && s.violations == 0;
        r.details.push_back("p=" + fmt("%g", p) + " " + std::to_string(s.trials) + " trials, " +
                            std::to_string(s.violations) + " violations, worst lhs-rhs " + sci(s.worst_excess));
    }
    return r;
}

inline CriterionResult crossover() {
    CriterionResult r{8, "arc/semicircle crossover for p = 1", true, {}};
    const PowerDensity d{1.0};
    const double semi = semicircle_ratio(d);
    const double th = bisect([&](double t) { return arc_ratio(d, t) - semi; }, 2.0, 2.5, 1e-15);
    const double err = std::abs(th - 2.25);
    r.pass = err <= 1e-10;
    r.details.push_back("crossover " + fmt("%.15f", th) + " vs 9/4, diff " + sci(err) + " (tol 1e-10)");
    return r;
}

inline CriterionResult disk_thresholds(unsigned threads) {
    CriterionResult r{9, "disk density thresholds", true, {}};
    const double pi = std::numbers::pi;
    const DiskDensity d2{2.0};
    const auto t = transition_thresholds(d2, 1.5 * pi);
    const double ref = 9.0 * pi / 4.0;
    const double e_closed = t.a_large ? std::abs(*t.a_large - ref) : INFINITY;
    const double e_bisect = t.a_large_bisected ? std::abs(t.a_large_bisected->value - ref) : INFINITY;
    const bool large_ok = e_closed <= 1e-9 && e_bisect <= 1e-9;
    r.details.push_back("A_large(a=2, 3pi/2): closed form diff " + sci(e_closed) + ", bisection diff " + sci(e_bisect) +
                        " (tol 1e-9) " + (large_ok ? "ok" : "FAIL"));

    bool small_ok = true;
    for (double a : {1.5, 2.0, 3.0, 4.0}) {
        const DiskDensity dd{a};
        const double th = pi / a;
        small_ok = small_ok && small_area_winner(dd, th) == SmallAreaWinner::Tie &&
                   small_area_winner(dd, th * (1.0 - 1e-9)) == SmallAreaWinner::ArcInside &&
                   small_area_winner(dd, th * (1.0 + 1e-9)) == SmallAreaWinner::EdgeSemicircle;
    }
    r.details.push_back(std::string("small-area crossover at theta0 = pi/a for a in {1.5, 2, 3, 4}: ") +
                        (small_ok ? "ok" : "FAIL"));

    const std::vector<double> as{1.5, 2.0, 3.0, 4.0};
    std::vector<double> ths;
    for (int k = 1; k <= 7; ++k) ths.push_back(k * pi / 4.0);

    // tangent semicircle against the best ranked candidate, theta0 > pi
    struct TangentCase {
        double a, th, A, tangent, best;
        bool loses;
    };
    std::vector<TangentCase> cases;
    for (double a : as)
        for (double th : ths) {
            if (!(th > pi)) continue;
            const double full = a * th / 2.0;
            for (double f : {0.05, 0.25, 0.5, 1.0, 2.0, 4.0}) cases.push_back({a, th, full + f * full, 0, 0, false});
        }
    parallel_for(
        cases.size(),
        [&](std::size_t i) {
            auto& c = cases[i];
            const auto cls = classify_disk({c.a}, c.th, c.A);
            c.best = cls.ranked.front().perimeter;
            c.tangent = cls.tangent ? cls.tangent->perimeter : INFINITY;
            c.loses = c.tangent > c.best;
        },
        threads);
    int won = 0;
    const TangentCase* example = nullptr;
    for (const auto& c : cases)
        if (!c.loses) {
            ++won;
            if (!example) example = &c;
        }
    const bool tangent_ok = won == 0;
    r.details.push_back("tangent semicircle not beaten in " + std::to_string(won) + "/" + std::to_string(cases.size()) +
                        " cases " + (tangent_ok ? "ok" : "FAIL"));
    if (example)
        r.details.push_back("  e.g. a=" + fmt("%g", example->a) + " theta0=" + fix(example->th) + " A=" + fix(example->A) +
                            ": tangent P=" + fix(example->tangent) + " vs best ranked P=" + fix(example->best));

    std::vector<int> changes(as.size() * ths.size());
    parallel_for(
        changes.size(),
        [&](std::size_t i) { changes[i] = bite_annulus_sign_changes({as[i / ths.size()]}, ths[i % ths.size()]); },
        threads);
    int most = 0;
    for (int c : changes) most = std::max(most, c);
    const bool sign_ok = most <= 1;
    r.details.push_back("bite vs annulus sign changes, max over " + std::to_string(changes.size()) +
                        " (a, theta0) pairs: " + std::to_string(most) + (sign_ok ? " ok" : " FAIL"));
    r.pass = large_ok && small_ok && tangent_ok && sign_ok;
    return r;
}

struct NamedProfile {
    const char* name;
    std::function<double(double)> a;
    bool expect_convex;
};

inline std::vector<NamedProfile> profile_matrix() {
    return {{"r", [](double r) { return r; }, true},
            {"r^2", [](double r) { return r * r; }, true},
            {"r^3", [](double r) { return r * r * r; }, true},
            {"1+r", [](double r) { return 1.0 + r; }, true},
            {"const", [](double) { return 1.0; }, true},
            {"sqrt(r)", [](double r) { return std::sqrt(r); }, false}};
}

inline CriterionResult rn_checks(std::uint64_t seed, unsigned threads) {
    CriterionResult r{10, "R^n radial checks", true, {}};
    std::vector<double> radii;
    for (double R = 2.0; R <= 256.0; R *= 2.0) radii.push_back(R);
    for (auto [n, p] : std::vector<std::pair<int, double>>{{2, -1.0}, {3, -2.0}}) {
        const auto rows = vanishing_perimeter_demo(n, p, 1.0, radii);
        bool dec = true;
        for (std::size_t i = 1; i < rows.size(); ++i) dec = dec && rows[i].perimeter < rows[i - 1].perimeter;
        const bool ok = dec && rows.back().perimeter < rows.front().perimeter / 10.0;
        r.pass = r.pass && ok;
        r.details.push_back("demo n=" + std::to_string(n) + " p=" + fmt("%g", p) + ": P " + fix(rows.front().perimeter) +
                            " -> " + fix(rows.back().perimeter) + ", strictly decreasing " + (dec ? "yes" : "no"));
    }
    for (int n : {2, 3}) {
        for (const auto& prof : profile_matrix()) {
            const auto rp = RadialProfile::make(n, prof.a);
            const auto v = betta_convexity_check(rp);
            const bool verdict_ok = v.convex == prof.expect_convex;
            std::string line = "n=" + std::to_string(n) + " a=" + prof.name + ": convex " + (v.convex ? "yes" : "no") +
                               (verdict_ok ? " (expected)" : " (UNEXPECTED)");
            bool ok = verdict_ok;
            if (prof.expect_convex && std::string(prof.name) != "const") {
                const auto j = jensen_trials(rp, 1000, seed + std::uint64_t(n), 0, threads);
                ok = ok && j.failures == 0;
                line += ", Jensen chain " + std::to_string(j.trials - j.failures) + "/" + std::to_string(j.trials);
            }
            r.pass = r.pass && ok;
            r.details.push_back(line);
        }
    }
    return r;
}

struct OraclePoint {
    double p, theta0;
};

inline std::vector<OraclePoint> oracle_grid() {
    std::vector<OraclePoint> g;
    for (double t : {0.6, 1.0, 1.4, 1.8, 2.0, 2.1, 2.24, 2.26, 2.28, 2.30, 2.32, 2.5, 2.8, 3.0, 3.2}) g.push_back({1.0, t});
    for (double t : {0.5, 0.8, 1.1, 1.4, 1.6, 1.7, 1.84, 1.86, 1.90, 1.95, 2.00, 2.2, 2.5, 2.8, 3.1}) g.push_back({2.0, t});
    return g;
}

inline CriterionResult oracle_agreement(std::uint64_t seed, unsigned threads) {
    CriterionResult r{11, "variational oracle cross-check", true, {}};
    const auto grid = oracle_grid();
    struct Outcome {
        Winner expected = Winner::Tie;
        SectorTag found = SectorTag::Arc;
        bool converged = false;
        double dispersion = 0.0;
        std::string error;
    };
    std::vector<Outcome> out(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            const auto [p, th] = grid[i];
            try {
                out[i].expected = classify_sector({p}, th).winner;
                const auto oc = oracle_classify(p, th, 1.0, 3, 256, seed, 1);
                out[i].found = oc.winner;
                out[i].converged = oc.best.converged;
                out[i].dispersion = curvature_dispersion(oc.best.curve, {p}).relative();
            } catch (const Error& e) {
                out[i].error = e.what();
            }
        },
        threads);
    int agree = 0, conv = 0;
    double worst = 0.0;
    std::vector<std::string> misses;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& o = out[i];
        const bool a = o.error.empty() && o.expected == winner_of(o.found);
        agree += a ? 1 : 0;
        conv += o.converged ? 1 : 0;
        if (o.converged) worst = std::max(worst, o.dispersion);
        if (!a)
            misses.push_back("  p=" + fmt("%g", grid[i].p) + " theta0=" + fmt("%g", grid[i].theta0) + ": classifier " +
                             to_string(o.expected) + ", oracle " + (o.error.empty() ? to_string(o.found) : o.error));
    }
    const bool disp_ok = worst <= 1e-3 && conv == int(grid.size());
    r.details.push_back("winner agreement " + std::to_string(agree) + "/" + std::to_string(grid.size()));
    for (const auto& m : misses) r.details.push_back(m);
    r.details.push_back("converged " + std::to_string(conv) + "/" + std::to_string(grid.size()) +
                        ", worst curvature dispersion " + sci(worst) + " (tol 1e-3)");
    double grad = 0.0;
    for (auto [p, th] : std::vector<OraclePoint>{{1.0, 1.0}, {1.0, 2.3}, {2.0, 1.95}, {2.0, 2.5}})
        grad = std::max(grad, oracle_gradient_check(p, th, 256, seed));
    const bool grad_ok = grad <= 1e-5;
    r.details.push_back("finite-difference gradient check worst rel err " + sci(grad) + " (tol 1e-5)");
    r.pass = agree == int(grid.size()) && disp_ok && grad_ok;
    return r;
}

} // namespace acceptance

// Criteria 1 to 11; determinism (12) compares two full runs from outside.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                                   const std::function<void(const CriterionResult&)>& on_done = {}) {
    std::vector<std::function<CriterionResult()>> steps{
        [] { return acceptance::closed_forms(); },
        [] { return acceptance::curvature_calibration(); },
        [] { return acceptance::period_limits(); },
        [&] { return acceptance::period_curve(opt.threads); },
        [] { return acceptance::transitions(); },
        [&] { return acceptance::proven_floors(opt.threads); },
        [&] { return acceptance::inequality(opt.seed, opt.threads); },
        [] { return acceptance::crossover(); },
        [&] { return acceptance::disk_thresholds(opt.threads); },
        [&] { return acceptance::rn_checks(opt.seed, opt.threads); },
        [&] { return acceptance::oracle_agreement(opt.seed, opt.threads); },
    };
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        CriterionResult r;
        try {
            r = steps[i]();
        } catch (const Error& e) {
            r = {int(i + 1), "criterion " + std::to_string(i + 1), false, {std::string("error: ") + e.what()}};
        }
        if (on_done) on_done(r);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string criterion_line(const CriterionResult& r) {
    return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + ": " + r.title;
}

inline std::string acceptance_report(const std::vector<CriterionResult>& results, std::uint64_t seed) {
    std::string s = "iso-sector acceptance report, seed " + std::to_string(seed) + "\n";
    int passed = 0;
    for (const auto& r : results) {
        s += criterion_line(r) + "\n";
        for (const auto& d : r.details) s += "    " + d + "\n";
        passed += r.pass ? 1 : 0;
    }
    s += std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
    return s;
}

} // namespace isosector
