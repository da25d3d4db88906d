#pragma once

#include "cgc.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "sector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace isosector {

struct FromArc {};
struct FromSemicircle {};
struct FromUndulary {
    double r1;
};
struct Custom {
    PolarGraph graph;
};
using OracleInit = std::variant<FromArc, FromSemicircle, FromUndulary, Custom>;

inline const char* init_name(const OracleInit& init) {
    switch (init.index()) {
    case 0: return "arc";
    case 1: return "semicircle";
    case 2: return "undulary";
    default: return "custom";
    }
}

struct OracleProblem {
    double p = 1.0;
    double theta0 = 1.0;
    double target_area = 1.0;
    std::size_t node_count = 256;
    OracleInit init = FromArc{};
    std::uint64_t seed = 0;
    int max_iterations = 4000;
    double tolerance = 1e-8;
};

struct OracleResult {
    PolarGraph curve;
    double perimeter = 0.0;
    double area = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::optional<ErrorKind> status; // MaxIterations when the budget ran out
};

inline constexpr double kRadiusFloor = 1e-12;
inline constexpr double kOriginTouch = 1e-6;

// Discrete functionals on a uniform grid. Perimeter per segment: chord mean of r^p
// times the midpoint arc element. Area by the trapezoid rule. Both exactly homogeneous in r.
class DiscretePolar {
public:
    DiscretePolar(double p, double theta0, std::size_t n)
        : p_(p), n_(n), h_(theta0 / double(n - 1)), chord_(gauss_legendre(kChordNodes)) {}

    std::size_t size() const { return n_; }
    double step() const { return h_; }
    double p() const { return p_; }

    double weight(std::size_t i) const { return (i == 0 || i + 1 == n_) ? 0.5 * h_ : h_; }

    double area(const std::vector<double>& r) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += weight(i) * std::pow(r[i], p_ + 2.0);
        return s / (p_ + 2.0);
    }

    double perimeter(const std::vector<double>& r) const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const double m = 0.5 * (r[i] + r[i + 1]), d = (r[i + 1] - r[i]) / h_;
            s += h_ * mean_power(r[i], r[i + 1]).w * std::hypot(m, d);
        }
        return s;
    }

    std::vector<double> area_gradient(const std::vector<double>& r) const {
        std::vector<double> g(n_);
        for (std::size_t i = 0; i < n_; ++i) g[i] = weight(i) * std::pow(r[i], p_ + 1.0);
        return g;
    }

    std::vector<double> perimeter_gradient(const std::vector<double>& r) const {
        std::vector<double> g(n_, 0.0);
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const Segment s = segment(r, i);
            g[i] += s.ga;
            g[i + 1] += s.gb;
        }
        return g;
    }

    // Tridiagonal Hessian of P - mu A: diag, and off[i] couples i and i+1.
    void lagrangian_hessian(const std::vector<double>& r, double mu, std::vector<double>& diag,
                            std::vector<double>& off) const {
        diag.assign(n_, 0.0);
        off.assign(n_ - 1, 0.0);
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const Segment s = segment(r, i);
            diag[i] += s.haa;
            diag[i + 1] += s.hbb;
            off[i] += s.hab;
        }
        for (std::size_t i = 0; i < n_; ++i) diag[i] -= mu * weight(i) * (p_ + 1.0) * std::pow(r[i], p_);
    }

private:
    // Mean of r^p along the chord from a to b, with first and second partials.
    struct MeanPower {
        double w = 0, wa = 0, wb = 0, waa = 0, wab = 0, wbb = 0;
    };

    MeanPower mean_power(double a, double b) const {
        MeanPower out;
        for (std::size_t k = 0; k < chord_.x.size(); ++k) {
            const double t = 0.5 * (chord_.x[k] + 1.0), wk = 0.5 * chord_.w[k];
            const double x = a + t * (b - a);
            const double x1 = p_ * std::pow(x, p_ - 1.0), x2 = p_ * (p_ - 1.0) * std::pow(x, p_ - 2.0);
            out.w += wk * std::pow(x, p_);
            out.wa += wk * x1 * (1.0 - t);
            out.wb += wk * x1 * t;
            out.waa += wk * x2 * (1.0 - t) * (1.0 - t);
            out.wab += wk * x2 * (1.0 - t) * t;
            out.wbb += wk * x2 * t * t;
        }
        return out;
    }

    struct Segment {
        double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    };

    Segment segment(const std::vector<double>& r, std::size_t i) const {
        const double a = r[i], b = r[i + 1];
        const double m = 0.5 * (a + b), d = (b - a) / h_;
        const double s = std::hypot(m, d);
        Segment out;
        if (s == 0.0) return out;
        const double s3 = s * s * s;
        const double sm = m / s, sd = d / s;
        const double smm = d * d / s3, smd = -m * d / s3, sdd = m * m / s3;
        const double q = 1.0 / h_;
        const double sa = 0.5 * sm - q * sd, sb = 0.5 * sm + q * sd;
        const double saa = 0.25 * smm - q * smd + q * q * sdd;
        const double sbb = 0.25 * smm + q * smd + q * q * sdd;
        const double sab = 0.25 * smm - q * q * sdd;
        const MeanPower w = mean_power(a, b);
        out.ga = h_ * (w.wa * s + w.w * sa);
        out.gb = h_ * (w.wb * s + w.w * sb);
        out.haa = h_ * (w.waa * s + 2.0 * w.wa * sa + w.w * saa);
        out.hbb = h_ * (w.wbb * s + 2.0 * w.wb * sb + w.w * sbb);
        out.hab = h_ * (w.wab * s + w.wa * sb + w.wb * sa + w.w * sab);
        return out;
    }

    static constexpr int kChordNodes = 6;

    double p_;
    std::size_t n_;
    double h_;
    GaussRule chord_;
};

namespace detail {

struct TridiagSolve {
    std::vector<double> x;
    int negative_pivots = 0;
    bool ok = true;
};

// LDL^T of a symmetric tridiagonal matrix, applied to one right-hand side.
inline TridiagSolve tridiag_ldl_solve(const std::vector<double>& diag, const std::vector<double>& off,
                                      const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> d(n), l(n, 0.0), y(n);
    TridiagSolve out;
    d[0] = diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (d[i - 1] == 0.0 || !std::isfinite(d[i - 1])) {
            out.ok = false;
            return out;
        }
        l[i] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - l[i] * off[i - 1];
    }
    if (d[n - 1] == 0.0 || !std::isfinite(d[n - 1])) {
        out.ok = false;
        return out;
    }
    for (double v : d) out.negative_pivots += v < 0.0 ? 1 : 0;
    y[0] = rhs[0];
    for (std::size_t i = 1; i < n; ++i) y[i] = rhs[i] - l[i] * y[i - 1];
    out.x.resize(n);
    out.x[n - 1] = y[n - 1] / d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out.x[i] = y[i] / d[i] - l[i + 1] * out.x[i + 1];
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double linear_interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = std::size_t(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

} // namespace detail

// Area-preserving reduced functional: P evaluated after radial rescaling to the target area.
class ReducedPerimeter {
public:
    ReducedPerimeter(const DiscretePolar& f, double target) : f_(f), target_(target) {}

    double scale_for(const std::vector<double>& r) const {
        return std::pow(target_ / f_.area(r), 1.0 / (f_.p() + 2.0));
    }

    std::vector<double> project(std::vector<double> r) const {
        for (double& v : r) v = std::max(v, kRadiusFloor);
        const double c = scale_for(r);
        for (double& v : r) v = std::max(v * c, kRadiusFloor);
        return r;
    }

    double value(const std::vector<double>& r) const {
        const double c = scale_for(r);
        return std::pow(c, f_.p() + 1.0) * f_.perimeter(r);
    }

    // Gradient of value() at a feasible r.
    std::vector<double> gradient(const std::vector<double>& r) const {
        const double P = f_.perimeter(r), A = f_.area(r), c = scale_for(r);
        const double p = f_.p();
        auto g = f_.perimeter_gradient(r);
        const auto a = f_.area_gradient(r);
        const double cp1 = std::pow(c, p + 1.0);
        const double mu = (p + 1.0) * P / ((p + 2.0) * A);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = cp1 * (g[i] - mu * a[i]);
        return g;
    }

private:
    const DiscretePolar& f_;
    double target_;
};

inline PolarGraph make_uniform_graph(const std::vector<double>& r, double theta0) {
    PolarGraph g;
    const std::size_t n = r.size();
    g.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.theta[i] = theta0 * double(i) / double(n - 1);
    g.theta.back() = theta0;
    g.theta0 = theta0;
    g.radius = r;
    return g;
}

namespace detail {

inline std::vector<double> initial_radii(const OracleProblem& prob) {
    const std::size_t n = prob.node_count;
    const double th = prob.theta0, pi = std::numbers::pi;
    std::vector<double> r(n);
    auto theta = [&](std::size_t i) { return th * double(i) / double(n - 1); };
    switch (prob.init.index()) {
    case 0:
        std::fill(r.begin(), r.end(), 1.0);
        break;
    case 1:
        for (std::size_t i = 0; i < n; ++i) r[i] = std::max(std::cos(std::min(theta(i), pi / 2.0)), kRadiusFloor);
        break;
    case 2: {
        const double r1 = std::get<FromUndulary>(prob.init).r1;
        const auto g = integrate_undulary(UndularySpec::make(r1, {prob.p}), 4096);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = linear_interp(g.theta, g.radius, theta(i) * g.theta0 / th);
        break;
    }
    default: {
        const auto& g = std::get<Custom>(prob.init).graph;
        g.validate();
        for (std::size_t i = 0; i < n; ++i)
            r[i] = std::max(linear_interp(g.theta, g.radius, theta(i) * g.theta0 / th), kRadiusFloor);
        break;
    }
    }
    // seeded low-mode perturbation so symmetric starts can leave saddles
    std::mt19937_64 gen(prob.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double xi[4];
    for (double& x : xi) x = uni(gen);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += xi[k] * std::cos((k + 1) * pi * theta(i) / th);
        r[i] *= 1.0 + 1e-3 * s;
    }
    return r;
}

} // namespace detail

inline OracleResult minimize_polar(const OracleProblem& prob) {
    require(prob.p > 0.0, ErrorKind::OutOfDomain, "oracle needs p > 0");
    require(prob.theta0 > 0.0 && prob.target_area > 0.0, ErrorKind::NonPositiveInput,
            "theta0 and target area must be positive");
    require(prob.node_count >= 64, ErrorKind::DegenerateGrid, "oracle needs at least 64 nodes");
    const std::size_t n = prob.node_count;
    const DiscretePolar F(prob.p, prob.theta0, n);
    const ReducedPerimeter J(F, prob.target_area);
    const double h = F.step();

    std::vector<double> r = J.project(detail::initial_radii(prob));
    OracleResult res;
    auto collapsed = [&](const std::vector<double>& x) {
        double mx = 0.0;
        for (double v : x) {
            if (!std::isfinite(v)) return true;
            mx = std::max(mx, v);
        }
        return mx < 1e-8;
    };

    // Sobolev metric used when Newton is not applicable
    std::vector<double> sob_diag(n), sob_off(n - 1, -1.0 / h);
    for (std::size_t i = 0; i < n; ++i) sob_diag[i] = F.weight(i) + ((i == 0 || i + 1 == n) ? 1.0 : 2.0) / h;

    double value = J.value(r);
    int it = 0;
    for (; it < prob.max_iterations; ++it) {
        if (collapsed(r)) fail(ErrorKind::CollapseDetected, "curve degenerated to zero area");
        auto g = J.gradient(r);
        // nodes that are numerically at the origin and still want to shrink
        // are snapped to the floor and frozen
        const double rmax = *std::max_element(r.begin(), r.end());
        bool snapped = false;
        for (std::size_t i = 0; i < n; ++i)
            if (r[i] > kRadiusFloor && r[i] < 1e-9 * rmax && g[i] > 0.0) {
                r[i] = kRadiusFloor;
                snapped = true;
            }
        if (snapped) {
            r = J.project(std::move(r));
            value = J.value(r);
            g = J.gradient(r);
        }
        auto a = F.area_gradient(r);
        std::vector<char> frozen(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (r[i] <= 2.0 * kRadiusFloor && g[i] > 0.0) frozen[i] = 1;
        double gn = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!frozen[i]) gn += g[i] * g[i];
        gn = std::sqrt(gn / h);
        res.gradient_norm = gn;
        if (gn < prob.tolerance) {
            res.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (frozen[i]) {
                g[i] = 0.0;
                a[i] = 0.0;
            }

        auto tangent_solve = [&](const std::vector<double>& diag, const std::vector<double>& off, bool need_inertia)
            -> std::optional<std::vector<double>> {
            auto dg = diag;
            auto of = off;
            for (std::size_t i = 0; i < n; ++i)
                if (frozen[i]) {
                    dg[i] = 1.0;
                    if (i > 0) of[i - 1] = 0.0;
                    if (i + 1 < n) of[i] = 0.0;
                }
            const auto x1 = detail::tridiag_ldl_solve(dg, of, g);
            const auto x2 = detail::tridiag_ldl_solve(dg, of, a);
            if (!x1.ok || !x2.ok) return std::nullopt;
            const double S = detail::dot(a, x2.x);
            if (need_inertia) {
                const bool tangent_pd = (x1.negative_pivots == 0 && S > 0.0) || (x1.negative_pivots == 1 && S < 0.0);
                if (!tangent_pd) return std::nullopt;
            }
            if (S == 0.0) return std::nullopt;
            const double nu = detail::dot(a, x1.x) / S;
            std::vector<double> dir(n);
            for (std::size_t i = 0; i < n; ++i) dir[i] = frozen[i] ? 0.0 : -x1.x[i] + nu * x2.x[i];
            if (!(detail::dot(dir, g) < 0.0)) return std::nullopt;
            return dir;
        };

        auto try_step = [&](const std::vector<double>& dir, bool newton) -> bool {
            const double slope = detail::dot(g, dir);
            double t = 1.0;
            for (int k = 0; k < 60; ++k, t *= 0.5) {
                std::vector<double> trial(n);
                for (std::size_t i = 0; i < n; ++i) trial[i] = r[i] + t * dir[i];
                trial = J.project(std::move(trial));
                const double v = J.value(trial);
                const bool armijo = v <= value + 1e-4 * t * slope;
                const bool roundoff = newton && t == 1.0 && v <= value + 1e-14 * std::abs(value);
                if (std::isfinite(v) && (armijo || roundoff)) {
                    r = std::move(trial);
                    value = v;
                    return true;
                }
            }
            return false;
        };

        std::vector<double> diag, off;
        const double P = F.perimeter(r), A = F.area(r);
        F.lagrangian_hessian(r, (prob.p + 1.0) * P / ((prob.p + 2.0) * A), diag, off);
        bool moved = false;
        // Newton, then Newton shifted toward the Sobolev metric, then the Sobolev gradient
        for (double sigma : {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
            std::vector<double> sd(n), so(n - 1);
            for (std::size_t i = 0; i < n; ++i) sd[i] = diag[i] + sigma * sob_diag[i];
            for (std::size_t i = 0; i + 1 < n; ++i) so[i] = off[i] + sigma * sob_off[i];
            if (auto dir = tangent_solve(sd, so, true)) {
                moved = try_step(*dir, sigma == 0.0);
                if (moved) break;
            }
        }
        if (!moved) {
            if (auto dir = tangent_solve(sob_diag, sob_off, false)) moved = try_step(*dir, false);
        }
        if (!moved) break; // no further decrease representable
    }
    res.iterations = it;
    if (!res.converged && it >= prob.max_iterations) res.status = ErrorKind::MaxIterations;
    res.curve = make_uniform_graph(r, prob.theta0);
    res.perimeter = F.perimeter(r);
    res.area = F.area(r);
    return res;
}

// Relative discrepancy between the analytic reduced gradient and central
// differences of the reduced functional at a seeded non-critical curve.
inline double oracle_gradient_check(double p, double theta0, std::size_t nodes, std::uint64_t seed) {
    const DiscretePolar F(p, theta0, nodes);
    const ReducedPerimeter J(F, 1.0);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double xi[6];
    for (double& x : xi) x = uni(gen);
    std::vector<double> r(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double t = double(i) / double(nodes - 1);
        double s = 0.0;
        for (int k = 0; k < 6; ++k) s += xi[k] * std::cos((k + 1) * std::numbers::pi * t);
        r[i] = 1.0 + 0.2 * s;
    }
    r = J.project(r);
    const auto g = J.gradient(r);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double eps = 1e-5 * r[i];
        auto rp = r, rm = r;
        rp[i] += eps;
        rm[i] -= eps;
        const double fd = (J.value(rp) - J.value(rm)) / (2.0 * eps);
        num += (fd - g[i]) * (fd - g[i]);
        den += g[i] * g[i];
    }
    return std::sqrt(num / den);
}

inline SectorTag shape_signature(const PolarGraph& g) {
    const auto [mn, mx] = std::minmax_element(g.radius.begin(), g.radius.end());
    if (std::min(g.radius.front(), g.radius.back()) < kOriginTouch * *mx) return SectorTag::Semicircle;
    if ((*mx - *mn) / *mx < 1e-4) return SectorTag::Arc;
    return SectorTag::Undulary;
}

struct CurvatureDispersion {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t samples = 0;
    double relative() const { return stddev / std::abs(mean); }
};

// Dispersion of the generalized curvature weighted by the density arc element r^p ds.
// Nodes whose stencil reaches a near-origin radius are dropped.
inline CurvatureDispersion curvature_dispersion(const PolarGraph& g, const PowerDensity& d) {
    const auto lam = generalized_curvature_of(g, d);
    const auto D = differentiate(g.theta, g.radius);
    const double mx = *std::max_element(g.radius.begin(), g.radius.end());
    const std::size_t n = g.radius.size();
    CurvatureDispersion out;
    std::vector<double> vals, wts;
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = true;
        for (std::size_t j = i >= 3 ? i - 3 : 0; j <= std::min(n - 1, i + 3); ++j)
            if (g.radius[j] < 1e-3 * mx) ok = false;
        if (!ok) continue;
        const double r = g.radius[i];
        const double dt = 0.5 * (g.theta[std::min(n - 1, i + 1)] - g.theta[i > 0 ? i - 1 : 0]);
        vals.push_back(lam[i]);
        wts.push_back(std::pow(r, d.p) * std::hypot(r, D.d1[i]) * dt);
    }
    out.samples = vals.size();
    if (vals.empty()) return out;
    double wsum = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        out.mean += wts[k] * vals[k];
        wsum += wts[k];
    }
    out.mean /= wsum;
    for (std::size_t k = 0; k < vals.size(); ++k) out.stddev += wts[k] * (vals[k] - out.mean) * (vals[k] - out.mean);
    out.stddev = std::sqrt(out.stddev / wsum);
    return out;
}

struct OracleClassification {
    SectorTag winner = SectorTag::Arc;
    OracleResult best;
    std::string best_start;
    std::vector<std::string> starts;
    std::vector<OracleResult> runs;
    double ratio = 0.0;
    double margin_vs_arc = 0.0;  // (arc ratio - oracle ratio) / oracle ratio
    double margin_vs_semi = 0.0; // (semicircle ratio - oracle ratio) / oracle ratio
};

inline OracleClassification oracle_classify(double p, double theta0, double area = 1.0, int starts = 3,
                                            std::size_t node_count = 256, std::uint64_t seed = 1,
                                            unsigned threads = 0) {
    require(p > 0.0 && theta0 > 0.0, ErrorKind::OutOfDomain, "oracle needs p > 0 and theta0 > 0");
    std::vector<OracleInit> inits{FromArc{}, FromSemicircle{}};
    if (starts >= 3) {
        try {
            if (auto s = solve_equilibrium_undulary(theta0, {p}); s.undulary) inits.push_back(FromUndulary{s.undulary->r1});
        } catch (const Error&) {
        }
    }
    inits.resize(std::min<std::size_t>(inits.size(), std::size_t(std::max(starts, 1))));
    std::vector<std::optional<OracleResult>> runs(inits.size());
    parallel_for(
        inits.size(),
        [&](std::size_t k) {
            OracleProblem prob{p, theta0, area, node_count, inits[k], seed + k};
            try {
                runs[k] = minimize_polar(prob);
            } catch (const Error&) {
            }
        },
        threads);
    OracleClassification out;
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (!runs[k]) continue;
        out.starts.push_back(init_name(inits[k]));
        out.runs.push_back(*runs[k]);
        if (!best || runs[k]->perimeter < runs[*best]->perimeter) best = k;
    }
    if (!best) fail(ErrorKind::AllStartsFailed, "every oracle start failed");
    out.best = *runs[*best];
    out.best_start = init_name(inits[*best]);
    out.winner = shape_signature(out.best.curve);
    const PowerDensity d{p};
    out.ratio = iso_ratio(out.best.perimeter, out.best.area, d);
    out.margin_vs_arc = (arc_ratio(d, theta0) - out.ratio) / out.ratio;
    out.margin_vs_semi = (semicircle_ratio(d) - out.ratio) / out.ratio;
    return out;
}

} // namespace isosector
