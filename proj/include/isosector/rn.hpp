#pragma once

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace isosector {

// |S^k|, the surface measure of the unit k-sphere in R^{k+1}.
inline double unit_sphere_measure(int k) {
    require(k >= 0, ErrorKind::ParamOutOfRange, "sphere dimension must be non-negative");
    const double m = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

// Radial perimeter density a(r) in R^n. `a` must accept r >= 0; a0 is a(0).
struct RadialProfile {
    int n = 2;
    std::function<double(double)> a;
    double a0 = 0.0;
    double r_min = 1e-3;
    double r_max = 10.0;
    std::size_t samples = 256;

    static RadialProfile make(int n, std::function<double(double)> a, double r_min = 1e-3, double r_max = 10.0) {
        RadialProfile p{n, std::move(a), 0.0, r_min, r_max, 256};
        p.a0 = p.a(0.0);
        return p;
    }

    // Values on the log grid over [r_min, r_max].
    std::vector<double> sample() const {
        std::vector<double> v(samples);
        const double lo = std::log(r_min), hi = std::log(r_max);
        for (std::size_t i = 0; i < samples; ++i)
            v[i] = a(std::exp(lo + (hi - lo) * double(i) / double(samples - 1)));
        return v;
    }

    void validate(bool need_monotone) const {
        require(n >= 2, ErrorKind::ParamOutOfRange, "dimension must be at least 2");
        require(bool(a), ErrorKind::NonFiniteProfile, "profile has no density function");
        require(r_min > 0.0 && r_max > r_min && samples >= 2, ErrorKind::DegenerateGrid, "bad profile sample range");
        require(std::isfinite(a0) && a0 >= 0.0, ErrorKind::NonFiniteProfile, "a(0) must be finite and non-negative");
        const auto v = sample();
        for (std::size_t i = 0; i < v.size(); ++i) {
            require(std::isfinite(v[i]), ErrorKind::NonFiniteProfile, "profile sample is not finite");
            require(v[i] > 0.0, ErrorKind::NonPositiveFunction, "profile must be positive for r > 0");
            if (need_monotone && i > 0)
                require(v[i] >= v[i - 1] * (1.0 - 1e-12), ErrorKind::MonotonicityViolation,
                        "profile must be nondecreasing");
        }
    }
};

struct ConvexityVerdict {
    bool convex = false;
    double worst_second_difference = 0.0; // most negative centered second difference
    double tolerance = 0.0;
};

// f(s) = [a(s^{1/n}) - a(0)] s^{1-1/n}
inline double betta_f(const RadialProfile& prof, double s) {
    if (s <= 0.0) return 0.0;
    const double n = prof.n;
    return (prof.a(std::pow(s, 1.0 / n)) - prof.a0) * std::pow(s, 1.0 - 1.0 / n);
}

// Convexity of f on a uniform s-grid over [0, r_max^n].
inline ConvexityVerdict betta_convexity_check(const RadialProfile& prof, std::size_t grid_size = 2001) {
    prof.validate(true);
    require(grid_size >= 3, ErrorKind::DegenerateGrid, "convexity grid needs at least 3 nodes");
    const double smax = std::pow(prof.r_max, prof.n);
    std::vector<double> f(grid_size);
    double scale = 0.0;
    for (std::size_t i = 0; i < grid_size; ++i) {
        f[i] = betta_f(prof, smax * double(i) / double(grid_size - 1));
        require(std::isfinite(f[i]), ErrorKind::NonFiniteProfile, "f(s) is not finite");
        scale = std::max(scale, std::abs(f[i]));
    }
    ConvexityVerdict out;
    out.tolerance = 1e-9 * scale;
    out.worst_second_difference = INFINITY;
    for (std::size_t i = 1; i + 1 < grid_size; ++i)
        out.worst_second_difference = std::min(out.worst_second_difference, f[i - 1] - 2.0 * f[i] + f[i + 1]);
    out.convex = out.worst_second_difference >= -out.tolerance;
    return out;
}

struct RnMeasures {
    double volume = 0.0;
    double perimeter = 0.0;
};

namespace detail {

// int_0^beta sin^k psi dpsi by the standard reduction.
inline double sine_power_integral(int k, double beta) {
    if (k == 0) return beta;
    if (k == 1) return 1.0 - std::cos(beta);
    const double s = std::sin(beta), c = std::cos(beta);
    return -std::pow(s, k - 1) * c / k + double(k - 1) / k * sine_power_integral(k - 2, beta);
}

} // namespace detail

// Weighted volume and perimeter of the ball of radius R whose centre lies at distance h from the origin.
inline RnMeasures sphere_measures_rn(int n, double p, double h, double R, int quad_nodes = 512) {
    require(n >= 2, ErrorKind::ParamOutOfRange, "dimension must be at least 2");
    require(R > 0.0 && h >= 0.0, ErrorKind::NonPositiveInput, "need R > 0 and h >= 0");
    require(std::isfinite(p), ErrorKind::NonFiniteSample, "p must be finite");
    if (p < 0.0) require(h > R, ErrorKind::OriginInside, "negative exponent needs the origin outside the ball");
    require(quad_nodes >= 16, ErrorKind::DegenerateGrid, "need at least 16 quadrature nodes");
    const int panels = quad_nodes / 16;
    const double s_n2 = unit_sphere_measure(n - 2);
    RnMeasures out;

    // perimeter: sphere parametrized by the angle phi at the centre, measured from the far axis point
    auto dp = [&](double phi) {
        const double rho2 = h * h + R * R + 2.0 * h * R * std::cos(phi);
        return std::pow(std::max(rho2, 0.0), 0.5 * p) * std::pow(std::sin(phi), n - 2);
    };
    out.perimeter = s_n2 * std::pow(R, n - 1) * gauss_composite(dp, 0.0, std::numbers::pi, panels, 16);

    // volume: shells of radius rho about the origin, intersected with the ball
    if (h < R) out.volume += unit_sphere_measure(n - 1) * std::pow(R - h, n + p) / (n + p);
    if (h > 0.0) {
        const double lo = std::abs(R - h), hi = R + h;
        auto dv = [&](double u) {
            const double rho = lo + 0.5 * (hi - lo) * (1.0 - std::cos(u));
            const double c = std::clamp((rho * rho + h * h - R * R) / (2.0 * rho * h), -1.0, 1.0);
            const double cap = detail::sine_power_integral(n - 2, std::acos(c));
            return std::pow(rho, p + n - 1) * cap * 0.5 * (hi - lo) * std::sin(u);
        };
        out.volume += s_n2 * gauss_composite(dv, 0.0, std::numbers::pi, panels, 16);
    }
    require(std::isfinite(out.volume) && std::isfinite(out.perimeter), ErrorKind::QuadratureFailure,
            "sphere measures are not finite");
    return out;
}

// Closed forms for the ball centred at the origin.
inline RnMeasures centered_sphere_measures(int n, double p, double R) {
    require(p > -n, ErrorKind::ParamOutOfRange, "volume about the origin needs p > -n");
    return {unit_sphere_measure(n - 1) * std::pow(R, n + p) / (n + p), unit_sphere_measure(n - 1) * std::pow(R, n - 1 + p)};
}

struct VanishingRow {
    double R = 0.0;
    double h = 0.0;
    double volume = 0.0;
    double perimeter = 0.0;
};

// For each R, moves a ball of radius R away from the origin until its weighted volume is v_target.
inline std::vector<VanishingRow> vanishing_perimeter_demo(int n, double p, double v_target,
                                                          const std::vector<double>& radii, int quad_nodes = 512) {
    require(n >= 2, ErrorKind::ParamOutOfRange, "dimension must be at least 2");
    require(p >= -n && p < 0.0, ErrorKind::ParamOutOfRange, "demo needs -n <= p < 0");
    require(v_target > 0.0, ErrorKind::NonPositiveInput, "target volume must be positive");
    std::vector<VanishingRow> rows;
    for (double R : radii) {
        require(R > 0.0, ErrorKind::NonPositiveInput, "radius must be positive");
        auto vol = [&](double h) { return sphere_measures_rn(n, p, h, R, quad_nodes).volume; };
        const double h_lo = R * (1.0 + 1e-9);
        if (vol(h_lo) < v_target)
            fail(ErrorKind::VolumeUnattainable, "radius " + std::to_string(R) + " cannot enclose the target volume");
        double h_hi = 2.0 * R;
        for (int k = 0; vol(h_hi) > v_target; ++k) {
            require(k < 200, ErrorKind::BracketFailure, "could not bracket the centre distance");
            h_hi *= 2.0;
        }
        const double h = bisect([&](double x) { return vol(x) - v_target; }, h_lo, h_hi, 1e-14 * h_hi);
        const auto m = sphere_measures_rn(n, p, h, R, quad_nodes);
        rows.push_back({R, h, m.volume, m.perimeter});
    }
    return rows;
}

// A star-shaped region described in the s = r^n coordinate on a sphere grid.
struct StarRegion {
    int n = 3;
    std::vector<std::array<double, 3>> nodes; // unit directions (z = 0 for n = 2)
    std::vector<double> weights;
    std::vector<double> t;     // s value of the boundary along each direction
    std::vector<double> slope; // |grad_S log r| at each node

    void validate() const {
        require(n == 2 || n == 3, ErrorKind::ParamOutOfRange, "star regions are supported for n = 2, 3");
        require(!nodes.empty() && nodes.size() == weights.size() && t.size() == nodes.size() &&
                    slope.size() == nodes.size(),
                ErrorKind::DegenerateGrid, "star region arrays disagree in size");
        for (double v : t) require(std::isfinite(v) && v >= 0.0, ErrorKind::NonFiniteProfile, "t must be finite and >= 0");
    }
};

// Uniform angles on S^1 (n = 2) or a Fibonacci lattice on S^2 (n = 3), equal weights.
inline std::vector<std::array<double, 3>> sphere_grid(int n, std::size_t count) {
    require(n == 2 || n == 3, ErrorKind::ParamOutOfRange, "sphere grids are supported for n = 2, 3");
    if (n == 3) require(count >= 500, ErrorKind::GridTooCoarse, "Fibonacci lattice needs at least 500 nodes");
    require(count >= 8, ErrorKind::GridTooCoarse, "circle grid needs at least 8 nodes");
    std::vector<std::array<double, 3>> out(count);
    if (n == 2) {
        for (std::size_t i = 0; i < count; ++i) {
            const double phi = 2.0 * std::numbers::pi * double(i) / double(count);
            out[i] = {std::cos(phi), std::sin(phi), 0.0};
        }
        return out;
    }
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * double(i) + 1.0) / double(count);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z)), phi = golden * double(i);
        out[i] = {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    return out;
}

// Samples the boundary radius r(x) on the grid; the tangential slope comes from
// central differences along an orthonormal frame of the tangent plane.
inline StarRegion make_star_region(int n, const std::function<double(const std::array<double, 3>&)>& radius,
                                   std::size_t count) {
    StarRegion reg;
    reg.n = n;
    reg.nodes = sphere_grid(n, count);
    reg.weights.assign(count, unit_sphere_measure(n - 1) / double(count));
    reg.t.resize(count);
    reg.slope.resize(count);
    constexpr double eps = 1e-5;
    auto along = [&](const std::array<double, 3>& x, const std::array<double, 3>& e, double s) {
        std::array<double, 3> y{x[0] + s * e[0], x[1] + s * e[1], x[2] + s * e[2]};
        const double len = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        for (double& c : y) c /= len;
        return std::log(radius(y));
    };
    for (std::size_t i = 0; i < count; ++i) {
        const auto& x = reg.nodes[i];
        const double r = radius(x);
        require(std::isfinite(r) && r > 0.0, ErrorKind::NonFiniteProfile, "star region radius must be positive");
        reg.t[i] = std::pow(r, n);
        std::vector<std::array<double, 3>> frame;
        if (n == 2) {
            frame.push_back({-x[1], x[0], 0.0});
        } else {
            // any unit vector not parallel to x seeds the frame
            std::array<double, 3> a = std::abs(x[2]) < 0.9 ? std::array<double, 3>{0, 0, 1} : std::array<double, 3>{1, 0, 0};
            std::array<double, 3> e1{a[1] * x[2] - a[2] * x[1], a[2] * x[0] - a[0] * x[2], a[0] * x[1] - a[1] * x[0]};
            const double l1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
            for (double& c : e1) c /= l1;
            std::array<double, 3> e2{x[1] * e1[2] - x[2] * e1[1], x[2] * e1[0] - x[0] * e1[2], x[0] * e1[1] - x[1] * e1[0]};
            frame.push_back(e1);
            frame.push_back(e2);
        }
        double g2 = 0.0;
        for (const auto& e : frame) {
            const double d = (along(x, e, eps) - along(x, e, -eps)) / (2.0 * eps);
            g2 += d * d;
        }
        reg.slope[i] = std::sqrt(g2);
    }
    return reg;
}

struct JensenChain {
    double q_full = 0.0;
    double q_tangential = 0.0;
    double q_ball = 0.0;
    bool ok = false;
};

// Checks Q_full >= Q_tangential >= Q_ball, all with the density a - a(0).
inline JensenChain averaging_inequality_check(const StarRegion& reg, const RadialProfile& prof) {
    reg.validate();
    require(reg.n == prof.n, ErrorKind::ParamOutOfRange, "region and profile dimensions differ");
    if (reg.n == 3) require(reg.nodes.size() >= 500, ErrorKind::GridTooCoarse, "Fibonacci lattice needs at least 500 nodes");
    require(betta_convexity_check(prof).convex, ErrorKind::OutOfDomain, "profile fails the convexity condition");
    JensenChain out;
    double wsum = 0.0, t_avg = 0.0;
    for (std::size_t i = 0; i < reg.t.size(); ++i) {
        const double f = betta_f(prof, reg.t[i]);
        out.q_tangential += reg.weights[i] * f;
        out.q_full += reg.weights[i] * f * std::sqrt(1.0 + reg.slope[i] * reg.slope[i]);
        t_avg += reg.weights[i] * reg.t[i];
        wsum += reg.weights[i];
    }
    t_avg /= wsum;
    out.q_ball = wsum * betta_f(prof, t_avg);
    const double tol = 1e-9 * std::max({std::abs(out.q_full), std::abs(out.q_tangential), std::abs(out.q_ball), 1e-300});
    out.ok = out.q_full >= out.q_tangential - tol && out.q_tangential >= out.q_ball - tol;
    return out;
}

// Random smooth star region with t = 1 + amplitude * mix, |mix| <= 1, mix a low-order harmonic combination.
inline StarRegion random_star_region(int n, std::size_t count, std::mt19937_64& gen, double amplitude = 0.3) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> c(n == 2 ? 8 : 15);
    double norm = 0.0;
    for (double& x : c) {
        x = uni(gen);
        norm += std::abs(x);
    }
    auto mix = [c, norm, n](const std::array<double, 3>& v) {
        const double x = v[0], y = v[1], z = v[2];
        std::vector<double> basis;
        if (n == 2) {
            const double phi = std::atan2(y, x);
            for (int k = 1; k <= 4; ++k) {
                basis.push_back(std::cos(k * phi));
                basis.push_back(std::sin(k * phi));
            }
        } else {
            // real harmonics of degree 1 to 3, each bounded by 1 on the sphere
            basis = {x,
                     y,
                     z,
                     2.0 * x * y,
                     2.0 * y * z,
                     2.0 * x * z,
                     x * x - y * y,
                     0.5 * (3.0 * z * z - 1.0),
                     0.5 * z * (5.0 * z * z - 3.0),
                     x * (5.0 * z * z - 1.0) / 4.0 * std::sqrt(2.0),
                     y * (5.0 * z * z - 1.0) / 4.0 * std::sqrt(2.0),
                     z * (x * x - y * y),
                     2.0 * x * y * z,
                     x * (x * x - 3.0 * y * y),
                     y * (3.0 * x * x - y * y)};
        }
        double s = 0.0;
        for (std::size_t k = 0; k < basis.size(); ++k) s += c[k] * basis[k];
        return s / norm;
    };
    return make_star_region(
        n, [&](const std::array<double, 3>& v) { return std::pow(1.0 + amplitude * mix(v), 1.0 / n); }, count);
}

struct JensenTrials {
    std::size_t trials = 0;
    std::size_t failures = 0;
    double worst_gap = INFINITY; // min over trials of the smaller chain gap, relative
};

// Trial k draws from a generator seeded with (seed, k), so results do not depend on threading.
inline JensenTrials jensen_trials(const RadialProfile& prof, std::size_t count, std::uint64_t seed,
                                  std::size_t grid = 0, unsigned threads = 0) {
    if (grid == 0) grid = prof.n == 2 ? 256 : 800;
    std::vector<JensenChain> res(count);
    parallel_for(
        count,
        [&](std::size_t k) {
            std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(k), std::uint32_t(k >> 32)};
            std::mt19937_64 gen(seq);
            res[k] = averaging_inequality_check(random_star_region(prof.n, grid, gen), prof);
        },
        threads);
    JensenTrials out;
    out.trials = count;
    for (const auto& r : res) {
        out.failures += r.ok ? 0 : 1;
        const double gap = std::min(r.q_full - r.q_tangential, r.q_tangential - r.q_ball) / r.q_ball;
        out.worst_gap = std::min(out.worst_gap, gap);
    }
    return out;
}

// For p < -n the substitution s = r^{p+n} gives dQ = s^e dTheta with e = 1 - 1/(p+n) > 1.
struct NegativePowerReduction {
    double exponent = 0.0;
    bool convex = false;
};

inline NegativePowerReduction negative_power_reduction(int n, double p) {
    require(n >= 2, ErrorKind::ParamOutOfRange, "dimension must be at least 2");
    require(p < -n, ErrorKind::ParamOutOfRange, "reduction needs p < -n");
    const double e = 1.0 - 1.0 / (p + n);
    return {e, e >= 1.0};
}

// Density of the rotational quotient of R^n with radial density f: y^{n-2} f(r) on the half plane y > 0.
inline double half_plane_density(int n, const std::function<double(double)>& f, double x, double y) {
    require(n >= 2, ErrorKind::ParamOutOfRange, "dimension must be at least 2");
    require(y > 0.0, ErrorKind::OutOfDomain, "half plane needs y > 0");
    return std::pow(y, n - 2) * f(std::hypot(x, y));
}

} // namespace isosector
