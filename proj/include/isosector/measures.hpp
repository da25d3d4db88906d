#pragma once

#include "errors.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace isosector {

struct PowerDensity {
    double p = 0.0;
};

// Sampled polar graph r(theta) over [0, theta0].
struct PolarGraph {
    std::vector<double> theta;
    std::vector<double> radius;
    double theta0 = 0.0;

    void validate() const {
        const std::size_t n = theta.size();
        require(n >= 3, ErrorKind::DegenerateGrid, "polar graph needs at least 3 nodes");
        require(radius.size() == n, ErrorKind::DegenerateGrid, "theta and radius lengths differ");
        require(theta.front() == 0.0 && theta.back() == theta0, ErrorKind::DegenerateGrid,
                "grid must span [0, theta0]");
        for (std::size_t i = 0; i + 1 < n; ++i)
            require(theta[i + 1] > theta[i], ErrorKind::DegenerateGrid, "grid must be strictly increasing");
        for (std::size_t i = 0; i < n; ++i) {
            require(std::isfinite(radius[i]), ErrorKind::NonFiniteSample, "radius sample is not finite");
            require(radius[i] >= 0.0, ErrorKind::DegenerateGrid, "negative radius");
            if (i != 0 && i + 1 != n)
                require(radius[i] > 0.0, ErrorKind::DegenerateGrid, "interior radius must be positive");
        }
    }

    // Samples r on [0, theta0]; flagged ends get a geometrically graded mesh.
    static PolarGraph sample(const std::function<double(double)>& r, double theta0, std::size_t nodes,
                             bool grade_left = false, bool grade_right = false) {
        require(theta0 > 0.0, ErrorKind::NonPositiveInput, "theta0 must be positive");
        PolarGraph g;
        g.theta = graded_grid(theta0, nodes, grade_left, grade_right);
        g.theta0 = theta0;
        g.radius.reserve(g.theta.size());
        for (double t : g.theta) g.radius.push_back(r(t));
        g.validate();
        return g;
    }
};

struct Measure {
    double area = 0.0;
    double perimeter = 0.0;
    double ratio = 0.0;
};

inline double ratio_exponent(const PowerDensity& d) { return (d.p + 1.0) / (d.p + 2.0); }

inline double iso_ratio(double perimeter, double area, const PowerDensity& d) {
    require(perimeter > 0.0 && area > 0.0, ErrorKind::NonPositiveInput, "perimeter and area must be positive");
    require(d.p > -2.0, ErrorKind::NonPositiveInput, "ratio needs p > -2");
    return perimeter / std::pow(area, ratio_exponent(d));
}

inline Measure make_measure(double area, double perimeter, const PowerDensity& d) {
    return {area, perimeter, iso_ratio(perimeter, area, d)};
}

inline double weighted_area_polar(const PolarGraph& g, const PowerDensity& d) {
    g.validate();
    require(d.p > -2.0, ErrorKind::OutOfDomain, "area needs p > -2");
    std::vector<double> f(g.radius.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = std::pow(g.radius[i], d.p + 2.0) / (d.p + 2.0);
        require(std::isfinite(f[i]), ErrorKind::NonFiniteSample, "r^(p+2) overflow");
    }
    return simpson_nonuniform(g.theta, f);
}

inline double weighted_perimeter_polar(const PolarGraph& g, const PowerDensity& d) {
    g.validate();
    const std::size_t n = g.theta.size();
    std::vector<double> dr(n, 0.0);
    if (n >= 5) {
        dr = differentiate(g.theta, g.radius).d1;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t lo = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
            auto c = fornberg_weights(g.theta[i], std::span(g.theta).subspan(lo, 3), 1);
            for (std::size_t j = 0; j < 3; ++j) dr[i] += c[1][j] * g.radius[lo + j];
        }
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = g.radius[i];
        f[i] = std::pow(r, d.p) * std::hypot(r, dr[i]);
        require(std::isfinite(f[i]), ErrorKind::NonFiniteSample, "perimeter integrand not finite");
    }
    return simpson_nonuniform(g.theta, f);
}

inline Measure polar_measure(const PolarGraph& g, const PowerDensity& d) {
    return make_measure(weighted_area_polar(g, d), weighted_perimeter_polar(g, d), d);
}

inline Measure arc_measures(double R, const PowerDensity& d, double theta0) {
    require(R > 0.0 && theta0 > 0.0, ErrorKind::NonPositiveInput, "arc needs R > 0 and theta0 > 0");
    require(d.p > -2.0, ErrorKind::NonPositiveInput, "arc needs p > -2");
    double P = theta0 * std::pow(R, d.p + 1.0);
    double A = theta0 * std::pow(R, d.p + 2.0) / (d.p + 2.0);
    return make_measure(A, P, d);
}

// Closed-form arc ratio, independent of R.
inline double arc_ratio(const PowerDensity& d, double theta0) {
    return std::pow(theta0, 1.0 / (d.p + 2.0)) * std::pow(d.p + 2.0, ratio_exponent(d));
}

// Integral of cos^k over [-pi/2, pi/2].
inline double wallis(double k) {
    return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(0.5 * (k + 1.0)) - std::lgamma(0.5 * k + 1.0));
}

inline Measure semicircle_measures(double dia, const PowerDensity& d) {
    require(dia > 0.0, ErrorKind::NonPositiveInput, "diameter must be positive");
    require(d.p >= 0.0, ErrorKind::NonPositiveInput, "semicircle needs p >= 0");
    double P = 0.5 * std::pow(dia, d.p + 1.0) * wallis(d.p);
    double A = 0.5 * std::pow(dia, d.p + 2.0) / (d.p + 2.0) * wallis(d.p + 2.0);
    return make_measure(A, P, d);
}

inline double semicircle_ratio(const PowerDensity& d) { return semicircle_measures(1.0, d).ratio; }

struct MappedDensities {
    double p_perim;
    double q_area;
    double theta0;
};

// Image of the theta0-sector under w = z^n / n.
inline MappedDensities change_coordinates(double p_perim, double q_area, double theta0, double n) {
    require(n != 0.0, ErrorKind::ZeroExponent, "exponent n must be nonzero");
    require(theta0 > 0.0, ErrorKind::NonPositiveInput, "theta0 must be positive");
    return {(p_perim + 1.0) / n - 1.0, (q_area + 2.0) / n - 2.0, std::abs(n) * theta0};
}

} // namespace isosector
