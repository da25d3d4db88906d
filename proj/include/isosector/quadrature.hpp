#pragma once

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

namespace isosector {

struct GaussRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

namespace detail {

inline GaussRule build_gauss_legendre(int n) {
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return rule;
}

} // namespace detail

// Rules are immutable once built; the cache only memoizes construction.
inline const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussRule>(detail::build_gauss_legendre(n));
    return *slot;
}

template <class F>
double gauss_integrate(F&& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
    return sum * half;
}

// Composite rule over equal panels of [a, b].
template <class F>
double gauss_composite(F&& f, double a, double b, int panels, int n) {
    double sum = 0.0, h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) sum += gauss_integrate(f, a + k * h, a + (k + 1) * h, n);
    return sum;
}

// Simpson's rule on an arbitrary increasing grid, pairing intervals; a
// trailing odd interval uses the quadratic through its last three nodes.
inline double simpson_nonuniform(std::span<const double> x, std::span<const double> f) {
    const std::size_t n = x.size();
    if (n < 3) fail(ErrorKind::DegenerateGrid, "simpson needs at least 3 nodes");
    double sum = 0.0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1], s = h0 + h1;
        sum += s / 6.0 *
               ((2.0 - h1 / h0) * f[i] + s * s / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    }
    if (i + 1 < n) {
        // quadratic through nodes i-1, i, i+1 integrated over [x_i, x_{i+1}]
        double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        sum += h1 / 6.0 *
               ((3.0 - h1 / (h0 + h1)) * f[i + 1] + (3.0 + h1 / h0) * f[i] -
                h1 * h1 / (h0 * (h0 + h1)) * f[i - 1]);
    }
    return sum;
}

// Finite-difference weights for derivatives 0..m at z on the stencil x.
// Returns c[k][j]: weight of node j for derivative k.
inline std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

// First and second derivatives of sampled data: five-point stencils in the
// interior, low-order one-sided stencils at the two ends.
struct Derivatives {
    std::vector<double> d1, d2;
};

inline Derivatives differentiate(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 5) fail(ErrorKind::DegenerateGrid, "differentiation needs at least 5 nodes");
    Derivatives out{std::vector<double>(n), std::vector<double>(n)};
    auto apply = [&](std::size_t i, std::size_t lo, std::size_t len, int order, std::vector<double>& dst) {
        auto c = fornberg_weights(x[i], x.subspan(lo, len), order);
        double s = 0.0;
        for (std::size_t j = 0; j < len; ++j) s += c[order][j] * y[lo + j];
        dst[i] = s;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n) {
            apply(i, i - 2, 5, 1, out.d1);
            apply(i, i - 2, 5, 2, out.d2);
        } else if (i < 2) {
            apply(i, 0, 3, 1, out.d1);
            apply(i, 0, 4, 2, out.d2);
        } else {
            apply(i, n - 3, 3, 1, out.d1);
            apply(i, n - 4, 4, 2, out.d2);
        }
    }
    return out;
}

// Bisection on a sign change of f over [lo, hi]; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
    double flo = f(lo);
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Grid on [0, span] with nodes clustered geometrically (factor 1/2, `levels`
// panels) toward whichever ends are flagged.
inline std::vector<double> graded_grid(double span, std::size_t nodes, bool grade_left, bool grade_right,
                                       int levels = 20) {
    if (nodes < 3) fail(ErrorKind::DegenerateGrid, "graded grid needs at least 3 nodes");
    if (!grade_left && !grade_right) {
        std::vector<double> g(nodes);
        for (std::size_t i = 0; i < nodes; ++i) g[i] = span * double(i) / double(nodes - 1);
        g.back() = span;
        return g;
    }
    const int ends = int(grade_left) + int(grade_right);
    const double zone = span / 8.0;
    // breakpoints of one graded zone measured from its end: 0, zone*2^-levels, ..., zone/2, zone
    std::vector<double> breaks{0.0};
    for (int k = levels; k >= 0; --k) breaks.push_back(zone * std::ldexp(1.0, -k));
    const std::size_t panels = breaks.size() - 1;
    std::size_t per = std::max<std::size_t>(2, (nodes / 2) / (panels * ends));
    per += per % 2;
    std::vector<double> zone_pts; // offsets from the graded end, increasing
    for (std::size_t k = 0; k < panels; ++k)
        for (std::size_t j = 0; j < per; ++j)
            zone_pts.push_back(breaks[k] + (breaks[k + 1] - breaks[k]) * double(j) / double(per));
    std::size_t used = zone_pts.size() * ends;
    std::size_t mid_nodes = nodes > used + 3 ? nodes - used : 3;
    double a = grade_left ? zone : 0.0, b = grade_right ? span - zone : span;
    std::vector<double> g;
    g.reserve(used + mid_nodes);
    if (grade_left)
        for (double t : zone_pts) g.push_back(t);
    for (std::size_t i = 0; i < mid_nodes; ++i) g.push_back(a + (b - a) * double(i) / double(mid_nodes - 1));
    if (grade_right)
        for (auto it = zone_pts.rbegin(); it != zone_pts.rend(); ++it) g.push_back(span - *it);
    g.front() = 0.0;
    g.back() = span;
    return g;
}

} // namespace isosector
