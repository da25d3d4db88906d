#pragma once

#include "errors.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

namespace isosector {

enum class CurveTag { Undulary, Nodoid, CircleThroughOrigin, CircleAboutOrigin, Geodesic };

struct CurveClass {
    CurveTag tag;
};

inline const char* to_string(CurveTag t) {
    switch (t) {
    case CurveTag::Undulary: return "undulary";
    case CurveTag::Nodoid: return "nodoid";
    case CurveTag::CircleThroughOrigin: return "circle-through-origin";
    case CurveTag::CircleAboutOrigin: return "circle-about-origin";
    case CurveTag::Geodesic: return "geodesic";
    }
    return "unknown";
}

inline CurveClass classify_lambda(double lambda, const PowerDensity& d) {
    const double p = d.p;
    if (lambda == 0.0) return {CurveTag::Geodesic};
    if (lambda == p + 1.0) return {CurveTag::CircleAboutOrigin};
    if (lambda == p + 2.0) return {CurveTag::CircleThroughOrigin};
    if (lambda > 0.0 && lambda < p + 2.0) return {CurveTag::Undulary};
    return {CurveTag::Nodoid};
}

inline double geodesic_radius(double theta, const PowerDensity& d) {
    const double limit = std::numbers::pi / (2.0 * d.p + 2.0);
    if (!(std::abs(theta) < limit)) {
        std::ostringstream os;
        os << "|theta| must be below " << limit;
        fail(ErrorKind::OutOfDomain, os.str());
    }
    return std::pow(1.0 / std::cos((d.p + 1.0) * theta), 1.0 / (d.p + 1.0));
}

namespace detail {

// K = (r1^(p+1) - 1) / (r1^(p+2) - 1), evaluated without cancellation.
inline double first_integral_k(double r1, double p) {
    const double L = std::log1p(r1 - 1.0);
    if (r1 < 2.0) return std::expm1((p + 1.0) * L) / std::expm1((p + 2.0) * L);
    return -std::expm1(-(p + 1.0) * L) / (r1 * -std::expm1(-(p + 2.0) * L));
}

} // namespace detail

inline double lambda_of_r1(double r1, const PowerDensity& d) {
    require(r1 > 1.0, ErrorKind::OutOfDomain, "r1 must exceed 1");
    require(d.p > 0.0, ErrorKind::OutOfDomain, "lambda_of_r1 needs p > 0");
    return (d.p + 2.0) * detail::first_integral_k(r1, d.p);
}

struct UndularySpec {
    double r1 = 0.0;
    double p = 0.0;
    double lambda = 0.0;

    static UndularySpec make(double r1, const PowerDensity& d) { return {r1, d.p, lambda_of_r1(r1, d)}; }
};

// Half-wave integrals of the undulary with minimum radius 1 and maximum r1.
struct UndularyIntegrals {
    double half_period = 0.0;
    double perimeter = 0.0;
    double area = 0.0;
};

namespace detail {

// Smooth integrands after x = log r = L sin^2(u); the inverse square roots at
// both critical radii are absorbed into the Jacobian.
struct UndularyKernel {
    double p, L, K, c0;

    // c0 = (r1^(p+2) - r1^(p+1)) / (r1^(p+2) - 1)
    UndularyKernel(double r1, double p_)
        : p(p_), L(std::log1p(r1 - 1.0)), K(first_integral_k(r1, p_)),
          c0(std::expm1(-L) / std::expm1(-(p_ + 2.0) * L)) {}

    struct Sample {
        double dtheta, dperim, darea, r;
    };

    Sample operator()(double u) const {
        const double s = std::sin(u), c = std::cos(u);
        const double x = L * s * s, xc = L * c * c; // xc = L - x
        double F;
        if (x <= 0.5 * L) {
            F = std::expm1((p + 1.0) * x) - K * std::expm1((p + 2.0) * x);
        } else {
            // same F regrouped around x = L; the two large terms would cancel otherwise
            F = std::exp((p + 1.0) * L - (p + 2.0) * xc) * std::expm1(xc) + c0 * std::expm1(-(p + 2.0) * xc);
        }
        const double phi = F / (x * xc);
        const double r = std::exp(x);
        const double rp1 = std::exp((p + 1.0) * x);
        const double h = 1.0 + K * std::expm1((p + 2.0) * x);
        const double root = std::sqrt(phi * (rp1 + h));
        return {2.0 * h / root, 2.0 * rp1 * rp1 / root, 2.0 * std::pow(r, p + 2.0) * h / ((p + 2.0) * root), r};
    }
};

} // namespace detail

inline UndularyIntegrals undulary_integrals(double r1, const PowerDensity& d, int gauss_nodes = 256) {
    require(r1 > 1.0, ErrorKind::OutOfDomain, "r1 must exceed 1");
    require(d.p > 0.0, ErrorKind::OutOfDomain, "undulary needs p > 0");
    const detail::UndularyKernel kern(r1, d.p);
    const GaussRule& rule = gauss_legendre(gauss_nodes);
    UndularyIntegrals out;
    const double q = std::numbers::pi / 4.0;
    for (double lo : {0.0, q}) {
        for (int i = 0; i < gauss_nodes; ++i) {
            const double u = lo + 0.5 * q * (1.0 + rule.x[i]);
            const auto s = kern(u);
            if (!std::isfinite(s.dtheta) || !std::isfinite(s.dperim) || !std::isfinite(s.darea)) {
                std::ostringstream os;
                os.precision(17);
                os << "non-finite integrand at r1=" << r1 << " p=" << d.p;
                fail(ErrorKind::QuadratureFailure, os.str());
            }
            const double w = 0.5 * q * rule.w[i];
            out.half_period += w * s.dtheta;
            out.perimeter += w * s.dperim;
            out.area += w * s.darea;
        }
    }
    return out;
}

inline double half_period(double r1, const PowerDensity& d, int gauss_nodes = 256) {
    return undulary_integrals(r1, d, gauss_nodes).half_period;
}

inline Measure undulary_measures(const UndularySpec& spec) {
    const PowerDensity d{spec.p};
    const auto I = undulary_integrals(spec.r1, d);
    return make_measure(I.area, I.perimeter, d);
}

// Half wave from r = 1 at theta = 0 to r = r1 at theta = T(r1).
inline PolarGraph integrate_undulary(const UndularySpec& spec, std::size_t nodes) {
    require(nodes >= 64, ErrorKind::DegenerateGrid, "undulary needs at least 64 nodes");
    require(spec.r1 > 1.0, ErrorKind::OutOfDomain, "r1 must exceed 1");
    const detail::UndularyKernel kern(spec.r1, spec.p);
    const double du = (std::numbers::pi / 2.0) / double(nodes - 1);
    PolarGraph g;
    g.theta.resize(nodes);
    g.radius.resize(nodes);
    g.theta[0] = 0.0;
    g.radius[0] = 1.0;
    for (std::size_t j = 1; j < nodes; ++j) {
        const double a = du * double(j - 1), b = du * double(j);
        const double step = gauss_integrate([&](double u) { return kern(u).dtheta; }, a, b, 8);
        if (!std::isfinite(step)) fail(ErrorKind::QuadratureFailure, "non-finite angular increment");
        g.theta[j] = g.theta[j - 1] + step;
        const double s = std::sin(b);
        g.radius[j] = std::exp(kern.L * s * s);
    }
    g.radius.back() = spec.r1;
    g.theta0 = g.theta.back();
    for (std::size_t j = 0; j + 1 < nodes; ++j) {
        if (!(g.theta[j + 1] > g.theta[j]) || !(g.radius[j + 1] > g.radius[j]))
            fail(ErrorKind::MonotonicityViolation, "undulary half wave is not monotone");
    }
    return g;
}

// Per-node generalized curvature kappa + p/sqrt(r^2 + r'^2); calibrated so the
// unit circle about the origin gives p+1.
inline std::vector<double> generalized_curvature_of(const PolarGraph& g, const PowerDensity& d) {
    require(g.theta.size() >= 5, ErrorKind::DegenerateGrid, "curvature needs at least 5 nodes");
    g.validate();
    const auto D = differentiate(g.theta, g.radius);
    std::vector<double> lam(g.theta.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double r = g.radius[i], r1 = D.d1[i], r2 = D.d2[i];
        const double q = r * r + r1 * r1;
        lam[i] = (r * r + 2.0 * r1 * r1 - r * r2) / (q * std::sqrt(q)) + d.p / std::sqrt(q);
    }
    return lam;
}

struct EquilibriumSearch {
    std::optional<UndularySpec> undulary;
    double t_min = 0.0; // smallest half period seen on the probes
    double t_max = 0.0; // largest half period seen on the probes
};

inline constexpr double kR1Min = 1.0 + 1e-6;
inline constexpr double kR1Max = 1e6;

// Root of T(r1) = theta0 on (1+eps, r_max]: log-spaced probes then bisection in log(r1-1).
inline EquilibriumSearch solve_equilibrium_undulary(double theta0, const PowerDensity& d, double r_max = kR1Max) {
    require(d.p > 0.0, ErrorKind::OutOfDomain, "undulary needs p > 0");
    require(theta0 > 0.0, ErrorKind::NonPositiveInput, "theta0 must be positive");
    constexpr int probes = 64;
    const double lo = std::log(kR1Min - 1.0), hi = std::log(r_max - 1.0);
    std::vector<double> s(probes), t(probes);
    EquilibriumSearch out;
    out.t_min = INFINITY;
    out.t_max = -INFINITY;
    for (int i = 0; i < probes; ++i) {
        s[i] = lo + (hi - lo) * i / (probes - 1);
        try {
            t[i] = half_period(1.0 + std::exp(s[i]), d);
        } catch (const Error& e) {
            std::ostringstream os;
            os.precision(17);
            os << "probe failed (" << e.what() << "); T-range so far [" << out.t_min << ", " << out.t_max << "]";
            fail(ErrorKind::BracketFailure, os.str());
        }
        out.t_min = std::min(out.t_min, t[i]);
        out.t_max = std::max(out.t_max, t[i]);
    }
    for (int i = 0; i + 1 < probes; ++i) {
        const double a = t[i] - theta0, b = t[i + 1] - theta0;
        if (a == 0.0) {
            out.undulary = UndularySpec::make(1.0 + std::exp(s[i]), d);
            return out;
        }
        if ((a < 0.0) != (b < 0.0) || b == 0.0) {
            double sl = s[i], sh = s[i + 1], fl = a;
            double sm = 0.5 * (sl + sh);
            for (int it = 0; it < 200; ++it) {
                sm = 0.5 * (sl + sh);
                const double fm = half_period(1.0 + std::exp(sm), d) - theta0;
                if (std::abs(fm) < 1e-11 || sh - sl < 1e-15) break;
                if ((fm < 0.0) == (fl < 0.0)) {
                    sl = sm;
                    fl = fm;
                } else {
                    sh = sm;
                }
            }
            out.undulary = UndularySpec::make(1.0 + std::exp(sm), d);
            return out;
        }
    }
    return out;
}

struct PeriodScan {
    std::vector<double> r1;
    std::vector<double> half_period;
    std::size_t violations = 0;
    double worst_drop = 0.0;
};

// Half periods on the given r1 grid (in order) with any decreases counted.
inline PeriodScan period_scan(const PowerDensity& d, const std::vector<double>& r1, unsigned threads = 0) {
    for (double r : r1) require(r > 1.0, ErrorKind::OutOfDomain, "r1 must exceed 1");
    PeriodScan out;
    out.r1 = r1;
    out.half_period.resize(r1.size());
    parallel_for(r1.size(), [&](std::size_t i) { out.half_period[i] = half_period(r1[i], d); }, threads);
    for (std::size_t i = 1; i < r1.size(); ++i) {
        const double drop = out.half_period[i - 1] - out.half_period[i];
        if (drop > 0.0) {
            ++out.violations;
            out.worst_drop = std::max(out.worst_drop, drop);
        }
    }
    return out;
}

// Monotonicity of T on a log grid of r1 - 1.
inline PeriodScan period_monotonicity_report(const PowerDensity& d, double r1_lo, double r1_hi, std::size_t count) {
    require(count >= 2 && r1_lo > 1.0 && r1_hi > r1_lo, ErrorKind::OutOfDomain, "invalid r1 scan");
    std::vector<double> r1(count);
    const double a = std::log(r1_lo - 1.0), b = std::log(r1_hi - 1.0);
    for (std::size_t i = 0; i < count; ++i)
        r1[i] = i + 1 == count ? r1_hi : 1.0 + std::exp(a + (b - a) * double(i) / double(count - 1));
    return period_scan(d, r1);
}

} // namespace isosector
