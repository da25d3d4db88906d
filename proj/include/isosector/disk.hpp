#pragma once

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace isosector {

// Density a inside the unit disk, 1 outside and on the circle itself.
struct DiskDensity {
    double a = 2.0;
};

enum class DiskTag { ArcInside, ArcEnclosing, Annulus, Bite, EdgeSemicircle, EnclosingSemicircle };

// EdgeLens: lens cut off by the internal arc, symmetric about an edge.
// Notch: the disk sector minus such a lens at the other edge.
enum class BiteBranch { EdgeLens, Notch };

inline const char* to_string(DiskTag t) {
    switch (t) {
    case DiskTag::ArcInside: return "arc-inside";
    case DiskTag::ArcEnclosing: return "arc-enclosing";
    case DiskTag::Annulus: return "annulus";
    case DiskTag::Bite: return "bite";
    case DiskTag::EdgeSemicircle: return "edge-semicircle";
    case DiskTag::EnclosingSemicircle: return "enclosing-semicircle";
    }
    return "unknown";
}

inline const char* to_string(BiteBranch b) { return b == BiteBranch::EdgeLens ? "edge-lens" : "notch"; }

struct DiskCandidate {
    DiskTag tag = DiskTag::ArcInside;
    double param = 0.0; // R, rho, phi or s depending on tag
    BiteBranch branch = BiteBranch::EdgeLens;
    double area = 0.0;
    double perimeter = 0.0;
};

inline double snell_angle(const DiskDensity& dd) {
    require(dd.a > 1.0, ErrorKind::OutOfDomain, "disk density needs a > 1");
    return std::acos(1.0 / dd.a);
}

// P^2/A of a semicircle with one endpoint on the circle, the diameter along an
// edge, and an angle beta of it inside the disk.
inline double one_endpoint_semicircle_ratio(const DiskDensity& dd, double beta) {
    return 2.0 * (std::numbers::pi + beta * (dd.a - 1.0));
}

// Region cut from the unit disk by a circular arc through (cos psi, +-sin psi),
// symmetric about the x-axis, with interior corner angle omega against the circle.
struct LensGeometry {
    double euclid_area = 0.0;
    double arc_length = 0.0;
    double arc_radius = 0.0;
    double center_x = 0.0;
    double axis_x = 0.0; // where the internal arc crosses the x-axis
    double start_angle = 0.0;
    double sweep = 0.0; // signed parameter sweep from the endpoint to the axis
    bool contains_origin = false;
    double max_polar_angle = 0.0;
};

inline std::optional<LensGeometry> lens_geometry(double psi, double omega) {
    const double tau = 2.0 * (omega - psi);
    if (std::abs(tau) < 1e-12) {
        // straight chord: the internal arc degenerates to a segment
        LensGeometry g;
        g.euclid_area = (2.0 * psi - std::sin(2.0 * psi)) / 2.0;
        g.arc_length = 2.0 * std::sin(psi);
        g.arc_radius = INFINITY;
        g.axis_x = std::cos(psi);
        g.contains_origin = std::cos(psi) < 0.0;
        g.max_polar_angle = psi;
        return g;
    }
    LensGeometry g;
    const double at = std::abs(tau);
    const double rc = std::sin(psi) / std::abs(std::sin(tau / 2.0));
    g.arc_radius = rc;
    g.arc_length = rc * at;
    g.euclid_area = (2.0 * psi - std::sin(2.0 * psi)) / 2.0 + std::copysign(rc * rc * (at - std::sin(at)) / 2.0, tau);
    const double sag = rc * (1.0 - std::cos(tau / 2.0));
    if (tau > 0.0) {
        g.axis_x = std::cos(psi) - sag;
        g.center_x = g.axis_x + rc;
    } else {
        g.axis_x = std::cos(psi) + sag;
        g.center_x = g.axis_x - rc;
    }
    const double cp = std::cos(psi);
    const bool in_disk_segment = cp < 0.0;
    const bool in_circle = std::abs(g.center_x) < rc;
    if (tau > 0.0) g.contains_origin = in_disk_segment || (in_circle && cp > 0.0);
    else g.contains_origin = in_disk_segment && !(in_circle && cp < 0.0);

    // parameterize the internal arc by its angle about the center
    const double pi = std::numbers::pi;
    g.start_angle = std::atan2(std::sin(psi), cp - g.center_x);
    const double target = g.axis_x > g.center_x ? 0.0 : pi;
    auto wrap = [pi](double x) { return std::remainder(x, 2.0 * pi); };
    const double plus = std::abs(wrap(g.start_angle + at / 2.0 - target));
    const double minus = std::abs(wrap(g.start_angle - at / 2.0 - target));
    g.sweep = plus <= minus ? at / 2.0 : -at / 2.0;

    // largest polar angle on the arc: endpoints or a tangency point seen from the origin
    double best = std::max(psi, g.axis_x < 0.0 ? pi : 0.0);
    if (std::abs(g.center_x) > rc) {
        const double beta = std::asin(rc / std::abs(g.center_x));
        const double polar = g.center_x > 0.0 ? beta : pi - beta;
        const double dist = std::sqrt(g.center_x * g.center_x - rc * rc);
        const double tx = dist * std::cos(polar), ty = dist * std::sin(polar);
        const double t = std::atan2(ty, tx - g.center_x);
        double along = std::remainder((t - g.start_angle) * (g.sweep > 0.0 ? 1.0 : -1.0), 2.0 * pi);
        if (along < 0.0) along += 2.0 * pi;
        if (along <= std::abs(g.sweep)) best = std::max(best, polar);
    }
    g.max_polar_angle = best;
    return g;
}

// Interior corner angle measured from the realized circle centers, independent
// of the construction formula.
inline double lens_corner_angle(double psi, const LensGeometry& g) {
    const double qx = std::cos(psi), qy = std::sin(psi);
    const double tdx = std::sin(psi), tdy = -std::cos(psi); // along the circle toward (1, 0)
    double tx, ty;
    if (!std::isfinite(g.arc_radius)) {
        tx = 0.0;
        ty = -1.0;
    } else {
        const double nx = (qx - g.center_x) / g.arc_radius, ny = qy / g.arc_radius;
        const double s = g.sweep > 0.0 ? 1.0 : -1.0;
        tx = -s * ny;
        ty = s * nx;
    }
    return std::acos(std::clamp(tdx * tx + tdy * ty, -1.0, 1.0));
}

struct BiteShape {
    double area, perimeter;
    LensGeometry lens;
    double psi;
};

inline std::optional<BiteShape> bite_shape(BiteBranch branch, double phi, const DiskDensity& dd, double theta0) {
    const double alpha = snell_angle(dd), pi = std::numbers::pi;
    const double psi = branch == BiteBranch::EdgeLens ? phi : theta0 - phi;
    const double omega = branch == BiteBranch::EdgeLens ? alpha : pi - alpha;
    if (!(psi > 0.0 && psi < pi)) return std::nullopt;
    auto g = lens_geometry(psi, omega);
    if (!g) return std::nullopt;
    const bool plane = std::abs(theta0 - pi) < 1e-12;
    if ((g->contains_origin && !plane) || g->max_polar_angle > theta0) return std::nullopt;
    const double P = phi + dd.a * g->arc_length / 2.0;
    const double A = branch == BiteBranch::EdgeLens ? dd.a * g->euclid_area / 2.0
                                                    : dd.a * (theta0 - g->euclid_area) / 2.0;
    if (!(A > 0.0) || !(P > 0.0)) return std::nullopt;
    return BiteShape{A, P, *g, psi};
}

struct TangentSemicircle {
    double R, area, perimeter;
};

// Half circle about the origin over an angle pi, continued by the unit circle
// over the remaining theta0 - pi. Defined for theta0 > pi; kept out of the ranking.
inline std::optional<TangentSemicircle> tangent_semicircle(const DiskDensity& dd, double theta0, double A) {
    const double pi = std::numbers::pi;
    if (!(theta0 > pi)) return std::nullopt;
    const double r2 = 1.0 + (A - theta0 * dd.a / 2.0) / (pi / 2.0);
    if (!(r2 >= 1.0)) return std::nullopt;
    const double R = std::sqrt(r2);
    return TangentSemicircle{R, A, pi * R + (theta0 - pi)};
}

inline DiskCandidate disk_candidate_measures(DiskTag tag, double param, const DiskDensity& dd, double theta0,
                                             BiteBranch branch = BiteBranch::EdgeLens) {
    require(dd.a > 1.0, ErrorKind::OutOfDomain, "disk density needs a > 1");
    require(theta0 > 0.0, ErrorKind::NonPositiveInput, "theta0 must be positive");
    const double a = dd.a, pi = std::numbers::pi;
    DiskCandidate c{tag, param, branch, 0.0, 0.0};
    auto range = [&](bool ok, const char* what) { require(ok, ErrorKind::ParamOutOfRange, what); };
    switch (tag) {
    case DiskTag::ArcInside:
        range(param > 0.0 && param <= 1.0, "arc inside needs R in (0, 1]");
        c.area = a * theta0 * param * param / 2.0;
        c.perimeter = a * theta0 * param;
        break;
    case DiskTag::ArcEnclosing:
        range(param >= 1.0, "enclosing arc needs R >= 1");
        c.area = a * theta0 / 2.0 + theta0 * (param * param - 1.0) / 2.0;
        c.perimeter = theta0 * param;
        break;
    case DiskTag::EnclosingSemicircle:
        range(std::abs(theta0 - pi) < 1e-12 && param >= 1.0, "enclosing semicircle needs theta0 = pi and R >= 1");
        c.area = a * theta0 / 2.0 + theta0 * (param * param - 1.0) / 2.0;
        c.perimeter = theta0 * param;
        break;
    case DiskTag::Annulus:
        range(param > 0.0 && param < 1.0, "annulus needs rho in (0, 1)");
        c.area = a * theta0 * (1.0 - param * param) / 2.0;
        c.perimeter = a * theta0 * param + theta0;
        break;
    case DiskTag::EdgeSemicircle:
        range(param > 0.0, "edge semicircle needs s > 0");
        c.area = pi * param * param / 2.0;
        c.perimeter = pi * param;
        break;
    case DiskTag::Bite: {
        range(param > 0.0 && param < theta0, "bite needs phi in (0, theta0)");
        auto shape = bite_shape(branch, param, dd, theta0);
        if (!shape) {
            std::ostringstream os;
            os.precision(17);
            os << "no admissible " << to_string(branch) << " bite at phi=" << param;
            fail(ErrorKind::BiteSolveFailure, os.str());
        }
        c.area = shape->area;
        c.perimeter = shape->perimeter;
        break;
    }
    }
    return c;
}

namespace detail {

inline std::string interval_text(double lo, double hi) {
    std::ostringstream os;
    os.precision(17);
    os << "[" << lo << ", " << hi << "]";
    return os.str();
}

// Admissible bites with the requested area on one branch, refined by bisection.
inline std::vector<DiskCandidate> bite_roots(BiteBranch branch, const DiskDensity& dd, double theta0, double A,
                                             int scan = 1500) {
    const double pi = std::numbers::pi;
    const double lo = branch == BiteBranch::EdgeLens ? 0.0 : std::max(0.0, theta0 - pi);
    const double hi = branch == BiteBranch::EdgeLens ? std::min(theta0, pi) : theta0;
    std::vector<DiskCandidate> out;
    std::optional<BiteShape> prev;
    double prev_phi = 0.0;
    for (int i = 1; i < scan; ++i) {
        const double phi = lo + (hi - lo) * double(i) / scan;
        auto cur = bite_shape(branch, phi, dd, theta0);
        if (prev && cur && (prev->area - A) * (cur->area - A) <= 0.0 && prev->area != cur->area) {
            double a = prev_phi, b = phi;
            const bool rising = cur->area > prev->area;
            double mid = 0.5 * (a + b);
            std::optional<BiteShape> s;
            for (int it = 0; it < 200; ++it) {
                mid = 0.5 * (a + b);
                s = bite_shape(branch, mid, dd, theta0);
                if (!s) break;
                if (std::abs(s->area - A) <= 1e-13 * A || b - a < 1e-16) break;
                if ((s->area < A) == rising) a = mid;
                else b = mid;
            }
            if (s && std::abs(s->area - A) <= 1e-10 * A)
                out.push_back({DiskTag::Bite, mid, branch, s->area, s->perimeter});
        }
        prev = cur;
        prev_phi = phi;
    }
    return out;
}

} // namespace detail

inline DiskCandidate solve_candidate_for_area(DiskTag tag, const DiskDensity& dd, double theta0, double A) {
    require(dd.a > 1.0, ErrorKind::OutOfDomain, "disk density needs a > 1");
    require(theta0 > 0.0 && A > 0.0, ErrorKind::NonPositiveInput, "theta0 and area must be positive");
    const double a = dd.a, full = a * theta0 / 2.0, pi = std::numbers::pi;
    auto unattainable = [&](double lo, double hi) {
        fail(ErrorKind::AreaUnattainable,
             std::string(to_string(tag)) + " attains areas " + detail::interval_text(lo, hi));
    };
    switch (tag) {
    case DiskTag::ArcInside:
        if (A > full) unattainable(0.0, full);
        return disk_candidate_measures(tag, std::min(1.0, std::sqrt(2.0 * A / (a * theta0))), dd, theta0);
    case DiskTag::ArcEnclosing:
        if (A < full) unattainable(full, INFINITY);
        return disk_candidate_measures(tag, std::sqrt(1.0 + (2.0 * A - a * theta0) / theta0), dd, theta0);
    case DiskTag::EnclosingSemicircle:
        if (std::abs(theta0 - pi) >= 1e-12 || A < full) unattainable(full, INFINITY);
        return disk_candidate_measures(tag, std::sqrt(1.0 + (2.0 * A - a * theta0) / theta0), dd, theta0);
    case DiskTag::Annulus:
        if (A >= full) unattainable(0.0, full);
        return disk_candidate_measures(tag, std::sqrt(1.0 - 2.0 * A / (a * theta0)), dd, theta0);
    case DiskTag::EdgeSemicircle:
        return disk_candidate_measures(tag, std::sqrt(2.0 * A / pi), dd, theta0);
    case DiskTag::Bite: {
        std::vector<DiskCandidate> roots;
        for (auto br : {BiteBranch::EdgeLens, BiteBranch::Notch}) {
            auto r = detail::bite_roots(br, dd, theta0, A);
            roots.insert(roots.end(), r.begin(), r.end());
        }
        if (roots.empty()) fail(ErrorKind::AreaUnattainable, "no admissible bite encloses the requested area");
        return *std::min_element(roots.begin(), roots.end(),
                                 [](const auto& x, const auto& y) { return x.perimeter < y.perimeter; });
    }
    }
    fail(ErrorKind::ParamOutOfRange, "unknown candidate");
}

inline constexpr double kDiskTieTolerance = 1e-9;

struct DiskClassification {
    double a = 0.0, theta0 = 0.0, area = 0.0;
    std::vector<DiskCandidate> ranked; // ascending perimeter
    DiskTag winner = DiskTag::ArcInside;
    bool tie = false;
    double margin = 0.0;
    std::optional<TangentSemicircle> tangent;
    std::vector<std::string> skipped; // candidates that could not realize the area
};

inline DiskClassification classify_disk(const DiskDensity& dd, double theta0, double A) {
    require(dd.a > 1.0, ErrorKind::OutOfDomain, "disk density needs a > 1");
    require(theta0 > 0.0 && A > 0.0, ErrorKind::NonPositiveInput, "theta0 and area must be positive");
    DiskClassification out;
    out.a = dd.a;
    out.theta0 = theta0;
    out.area = A;
    for (auto tag : {DiskTag::ArcInside, DiskTag::ArcEnclosing, DiskTag::Annulus, DiskTag::EdgeSemicircle,
                     DiskTag::Bite}) {
        try {
            out.ranked.push_back(solve_candidate_for_area(tag, dd, theta0, A));
        } catch (const Error& e) {
            out.skipped.push_back(e.what());
        }
    }
    std::stable_sort(out.ranked.begin(), out.ranked.end(),
                     [](const auto& x, const auto& y) { return x.perimeter < y.perimeter; });
    out.winner = out.ranked.front().tag;
    if (out.ranked.size() > 1) {
        out.margin = (out.ranked[1].perimeter - out.ranked[0].perimeter) / out.ranked[0].perimeter;
        out.tie = out.margin < kDiskTieTolerance;
    } else {
        out.margin = INFINITY;
    }
    out.tangent = tangent_semicircle(dd, theta0, A);
    return out;
}

enum class SmallAreaWinner { ArcInside, EdgeSemicircle, Tie };

inline const char* to_string(SmallAreaWinner w) {
    switch (w) {
    case SmallAreaWinner::ArcInside: return "arc-inside";
    case SmallAreaWinner::EdgeSemicircle: return "edge-semicircle";
    case SmallAreaWinner::Tie: return "tie";
    }
    return "unknown";
}

// P^2/A of the arc inside is 2 a theta0 and of the edge semicircle 2 pi.
inline SmallAreaWinner small_area_winner(const DiskDensity& dd, double theta0) {
    const double lhs = dd.a * theta0, pi = std::numbers::pi;
    if (std::abs(lhs - pi) <= 4.0 * std::numeric_limits<double>::epsilon() * pi) return SmallAreaWinner::Tie;
    return lhs < pi ? SmallAreaWinner::ArcInside : SmallAreaWinner::EdgeSemicircle;
}

inline std::optional<double> large_area_threshold(const DiskDensity& dd, double theta0) {
    const double pi = std::numbers::pi;
    if (!(theta0 > pi)) return std::nullopt;
    return theta0 * theta0 * (dd.a - 1.0) / (2.0 * (theta0 - pi));
}

struct AreaThreshold {
    double value = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

struct TransitionThresholds {
    std::optional<AreaThreshold> a0;      // small-area candidate vs the better of bite and annulus
    std::optional<AreaThreshold> a1;      // bite vs annulus (theta0 <= pi)
    bool annulus_never = false;           // a1 pinned at a theta0 / 2
    bool bite_never = false;              // a1 pinned at a0
    std::optional<double> a_large;        // enclosing arc vs edge semicircle (theta0 > pi)
    std::optional<AreaThreshold> a_large_bisected;
    SmallAreaWinner small_area{};
    std::vector<std::string> notes;
};

namespace detail {

inline std::optional<double> best_bite_perimeter(const DiskDensity& dd, double theta0, double A) {
    try {
        return solve_candidate_for_area(DiskTag::Bite, dd, theta0, A).perimeter;
    } catch (const Error&) {
        return std::nullopt;
    }
}

// Sign change of f on (lo, hi) located on a grid then bisected.
template <class F>
std::optional<AreaThreshold> locate_sign_change(F&& f, double lo, double hi, int grid, double tol) {
    std::optional<double> prev;
    double prev_x = lo;
    for (int i = 1; i < grid; ++i) {
        const double x = lo + (hi - lo) * double(i) / grid;
        const auto cur = f(x);
        if (prev && cur && ((*prev < 0.0) != (*cur < 0.0))) {
            double a = prev_x, b = x;
            const bool neg_left = *prev < 0.0;
            while (b - a > tol * std::max(1.0, std::abs(b))) {
                const double m = 0.5 * (a + b);
                const auto fm = f(m);
                if (!fm) break;
                if ((*fm < 0.0) == neg_left) a = m;
                else b = m;
            }
            return AreaThreshold{0.5 * (a + b), a, b};
        }
        if (cur) {
            prev = cur;
            prev_x = x;
        }
    }
    return std::nullopt;
}

} // namespace detail

inline TransitionThresholds transition_thresholds(const DiskDensity& dd, double theta0, int grid = 200) {
    require(dd.a > 1.0, ErrorKind::OutOfDomain, "disk density needs a > 1");
    require(theta0 > 0.0, ErrorKind::NonPositiveInput, "theta0 must be positive");
    const double a = dd.a, pi = std::numbers::pi, full = a * theta0 / 2.0;
    TransitionThresholds t;
    t.small_area = small_area_winner(dd, theta0);
    t.a_large = large_area_threshold(dd, theta0);
    if (t.a_large && theta0 <= a * pi) {
        auto diff = [&](double A) -> std::optional<double> {
            return solve_candidate_for_area(DiskTag::ArcEnclosing, dd, theta0, A).perimeter - std::sqrt(2.0 * pi * A);
        };
        t.a_large_bisected = detail::locate_sign_change(diff, full, 4.0 * *t.a_large + full, 4000, 1e-15);
    }
    if (theta0 > a * pi) {
        t.notes.push_back("edge semicircle wins every area");
        return t;
    }
    auto small_p = [&](double A) {
        double edge = std::sqrt(2.0 * pi * A);
        return std::min(edge, std::sqrt(2.0 * a * theta0 * A));
    };
    auto annulus_p = [&](double A) { return solve_candidate_for_area(DiskTag::Annulus, dd, theta0, A).perimeter; };
    // small-area candidate against the better of bite and annulus
    auto middle_vs_small = [&](double A) -> std::optional<double> {
        auto b = detail::best_bite_perimeter(dd, theta0, A);
        const double mid = b ? std::min(*b, annulus_p(A)) : annulus_p(A);
        return mid - (theta0 > pi ? std::sqrt(2.0 * pi * A) : small_p(A));
    };
    t.a0 = detail::locate_sign_change(middle_vs_small, 0.0, full, grid, 1e-10);
    if (!t.a0) t.notes.push_back("small-area candidate is never overtaken below a theta0 / 2");
    if (theta0 <= pi) {
        auto bite_vs_annulus = [&](double A) -> std::optional<double> {
            auto b = detail::best_bite_perimeter(dd, theta0, A);
            if (!b) return std::nullopt;
            return *b - annulus_p(A);
        };
        t.a1 = detail::locate_sign_change(bite_vs_annulus, 0.0, full, grid, 1e-10);
        if (!t.a1) {
            t.annulus_never = true;
            t.a1 = AreaThreshold{full, full, full};
            t.notes.push_back("annulus never isoperimetric");
        } else if (t.a0 && t.a1->value < t.a0->value) {
            // the annulus already beats the bite where the small candidate gives way
            t.a1 = t.a0;
            t.bite_never = true;
            t.notes.push_back("bite never isoperimetric");
        }
    }
    return t;
}

// Count of sign changes of P_bite - P_annulus along an area grid below a theta0 / 2.
inline int bite_annulus_sign_changes(const DiskDensity& dd, double theta0, int grid = 200) {
    const double full = dd.a * theta0 / 2.0;
    int changes = 0, last = 0;
    for (int i = 1; i <= grid; ++i) {
        const double A = full * double(i) / double(grid + 1);
        auto b = detail::best_bite_perimeter(dd, theta0, A);
        if (!b) continue;
        const double d = *b - solve_candidate_for_area(DiskTag::Annulus, dd, theta0, A).perimeter;
        const int s = d < 0.0 ? -1 : 1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

struct TransitionCurveRow {
    double a = 0.0;
    double f_theta = 0.0;               // small-area arc vs edge semicircle
    std::optional<double> g_theta;      // near-full-area annulus vs bite
    std::string error;
};

inline constexpr double kNearFullAreaGap = 1e-3;

// Angle where annulus and bite tie at area a theta0 / 2 - gap.
inline std::optional<double> g_curve_angle(const DiskDensity& dd, double gap = kNearFullAreaGap) {
    auto diff = [&](double th) -> std::optional<double> {
        const double A = dd.a * th / 2.0 - gap;
        if (!(A > 0.0)) return std::nullopt;
        auto b = detail::best_bite_perimeter(dd, th, A);
        if (!b) return std::nullopt;
        return *b - solve_candidate_for_area(DiskTag::Annulus, dd, th, A).perimeter;
    };
    auto r = detail::locate_sign_change(diff, 0.0, std::numbers::pi, 64, 1e-7);
    if (!r) return std::nullopt;
    return r->value;
}

inline std::vector<TransitionCurveRow> transition_curves_sweep(const std::vector<double>& a_grid, unsigned threads = 0) {
    std::vector<TransitionCurveRow> rows(a_grid.size());
    parallel_for(
        rows.size(),
        [&](std::size_t i) {
            rows[i].a = a_grid[i];
            try {
                rows[i].f_theta = std::numbers::pi / a_grid[i];
                rows[i].g_theta = g_curve_angle({a_grid[i]});
            } catch (const Error& e) {
                rows[i].error = e.what();
            }
        },
        threads);
    return rows;
}

} // namespace isosector
