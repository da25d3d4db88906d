#pragma once

#include "cgc.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace isosector {

enum class SectorTag { Arc, Semicircle, Undulary };
enum class Winner { Arc, Semicircle, Undulary, Tie };

inline const char* to_string(SectorTag t) {
    switch (t) {
    case SectorTag::Arc: return "arc";
    case SectorTag::Semicircle: return "semicircle";
    case SectorTag::Undulary: return "undulary";
    }
    return "unknown";
}

inline const char* to_string(Winner w) {
    switch (w) {
    case Winner::Arc: return "arc";
    case Winner::Semicircle: return "semicircle";
    case Winner::Undulary: return "undulary";
    case Winner::Tie: return "tie";
    }
    return "unknown";
}

inline Winner winner_of(SectorTag t) {
    switch (t) {
    case SectorTag::Arc: return Winner::Arc;
    case SectorTag::Semicircle: return Winner::Semicircle;
    case SectorTag::Undulary: return Winner::Undulary;
    }
    return Winner::Tie;
}

inline constexpr double kTieTolerance = 1e-9;

struct SectorCandidate {
    SectorTag tag;
    Measure measure;                      // arc R=1, semicircle diameter 1, undulary minimum radius 1
    std::optional<UndularySpec> undulary; // set for SectorTag::Undulary
    double half_period = 0.0;             // undulary only
};

struct Classification {
    double p = 0.0;
    double theta0 = 0.0;
    std::vector<SectorCandidate> ranked; // ascending ratio
    Winner winner = Winner::Tie;
    double margin = 0.0;
    double undulary_t_min = 0.0; // achieved half-period range of the equilibrium search
    double undulary_t_max = 0.0;
    std::string undulary_error; // set when the undulary solve failed

    SectorTag leader() const { return ranked.front().tag; }

    const SectorCandidate* find(SectorTag t) const {
        for (const auto& c : ranked)
            if (c.tag == t) return &c;
        return nullptr;
    }
};

struct ProvenBounds {
    double theta1_lo, theta1_hi, theta2_lo, theta2_hi;
    bool p1_special;
};

inline ProvenBounds proven_bounds(const PowerDensity& d) {
    require(d.p > 0.0, ErrorKind::OutOfDomain, "bounds need p > 0");
    const double pi = std::numbers::pi, p = d.p;
    ProvenBounds b{pi / (p + 1.0), pi / std::sqrt(p + 1.0), pi * (p + 2.0) / (2.0 * p + 2.0), pi, p == 1.0};
    if (b.p1_special) b.theta1_lo = std::max(b.theta1_lo, 2.0);
    return b;
}

struct ConjecturedTransitions {
    double theta1, theta2;
};

inline ConjecturedTransitions conjectured_transitions(const PowerDensity& d) {
    require(d.p > 0.0, ErrorKind::OutOfDomain, "conjecture needs p > 0");
    const double pi = std::numbers::pi;
    return {pi / std::sqrt(d.p + 1.0), pi * (d.p + 2.0) / (2.0 * d.p + 2.0)};
}

struct ArcStability {
    bool stable;
    bool boundary; // Q == 1
    double Q;
};

inline ArcStability arc_stability(double theta0, const PowerDensity& d) {
    const double q = (1.0 + d.p) * (theta0 / std::numbers::pi) * (theta0 / std::numbers::pi);
    if (d.p < -1.0) return {true, false, q};
    return {q < 1.0, q == 1.0, q};
}

inline Classification classify_sector(const PowerDensity& d, double theta0) {
    require(d.p > 0.0, ErrorKind::OutOfDomain, "sector classification needs p > 0");
    require(theta0 > 0.0, ErrorKind::NonPositiveInput, "theta0 must be positive");
    Classification c;
    c.p = d.p;
    c.theta0 = theta0;
    c.ranked.push_back({SectorTag::Arc, arc_measures(1.0, d, theta0), std::nullopt, 0.0});
    c.ranked.push_back({SectorTag::Semicircle, semicircle_measures(1.0, d), std::nullopt, 0.0});
    try {
        const auto search = solve_equilibrium_undulary(theta0, d);
        c.undulary_t_min = search.t_min;
        c.undulary_t_max = search.t_max;
        if (search.undulary) {
            const auto I = undulary_integrals(search.undulary->r1, d);
            c.ranked.push_back(
                {SectorTag::Undulary, make_measure(I.area, I.perimeter, d), search.undulary, I.half_period});
        }
    } catch (const Error& e) {
        c.undulary_error = e.what();
    }
    std::stable_sort(c.ranked.begin(), c.ranked.end(),
                     [](const SectorCandidate& a, const SectorCandidate& b) { return a.measure.ratio < b.measure.ratio; });
    const double best = c.ranked[0].measure.ratio;
    c.margin = (c.ranked[1].measure.ratio - best) / best;
    c.winner = c.margin < kTieTolerance ? Winner::Tie : winner_of(c.ranked[0].tag);
    return c;
}

struct PhaseCell {
    double p = 0.0;
    double theta0 = 0.0;
    std::optional<Classification> result;
    std::string error; // set when the cell failed
};

// Row-major over (p, theta0); deterministic regardless of thread count.
inline std::vector<PhaseCell> phase_sweep(const std::vector<double>& p_grid, const std::vector<double>& theta_grid,
                                          unsigned threads = 0) {
    require(!p_grid.empty() && !theta_grid.empty(), ErrorKind::DegenerateGrid, "sweep grids must be nonempty");
    require(std::is_sorted(p_grid.begin(), p_grid.end()) && std::is_sorted(theta_grid.begin(), theta_grid.end()),
            ErrorKind::DegenerateGrid, "sweep grids must be sorted");
    std::vector<PhaseCell> cells(p_grid.size() * theta_grid.size());
    parallel_for(
        cells.size(),
        [&](std::size_t k) {
            auto& cell = cells[k];
            cell.p = p_grid[k / theta_grid.size()];
            cell.theta0 = theta_grid[k % theta_grid.size()];
            try {
                cell.result = classify_sector({cell.p}, cell.theta0);
            } catch (const Error& e) {
                cell.error = e.what();
            }
        },
        threads);
    return cells;
}

// Checks the winner sequence of one p-row (cells sorted by theta0): Arc never
// wins after losing and Semicircle never loses after winning. Ties are skipped.
inline bool winner_sequence_monotone(const std::vector<PhaseCell>& row) {
    bool arc_lost = false, semi_won = false;
    for (const auto& cell : row) {
        if (!cell.result || cell.result->winner == Winner::Tie) continue;
        const Winner w = cell.result->winner;
        if (w == Winner::Arc && arc_lost) return false;
        if (w != Winner::Semicircle && semi_won) return false;
        if (w != Winner::Arc) arc_lost = true;
        if (w == Winner::Semicircle) semi_won = true;
    }
    return true;
}

struct MeasuredTransition {
    double theta = 0.0;      // bracket midpoint
    double bracket_lo = 0.0; // predicate holds on the left
    double bracket_hi = 0.0;
    bool within_bounds = false;
    bool agrees_with_conjecture = false; // within the conjecture tolerance
};

struct TransitionReport {
    double p = 0.0;
    MeasuredTransition theta1; // last angle where Arc strictly wins
    MeasuredTransition theta2; // first angle where Semicircle strictly wins
    ProvenBounds bounds{};
    ConjecturedTransitions conjecture{};
};

// Bisection (to `tol`) for the two regime boundaries. Bounds are checked
// with slack equal to the bisection resolution.
inline TransitionReport locate_transitions(const PowerDensity& d, double tol = 1e-4, double conjecture_tol = 0.02) {
    TransitionReport rep;
    rep.p = d.p;
    rep.bounds = proven_bounds(d);
    rep.conjecture = conjectured_transitions(d);
    auto arc_strict = [&](double t) { return classify_sector(d, t).winner == Winner::Arc; };
    auto semi_strict = [&](double t) { return classify_sector(d, t).winner == Winner::Semicircle; };
    auto refine = [&](auto&& pred, double lo, double hi, bool pred_on_left) {
        if (pred(lo) != pred_on_left || pred(hi) == pred_on_left)
            fail(ErrorKind::NoTransition, "regime boundary not bracketed");
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (pred(mid) == pred_on_left) lo = mid;
            else hi = mid;
        }
        return MeasuredTransition{0.5 * (lo + hi), lo, hi, false, false};
    };
    const double lo = 0.5 * std::numbers::pi / (d.p + 1.0);
    const double hi = 1.1 * std::numbers::pi;
    rep.theta1 = refine(arc_strict, lo, hi, true);
    rep.theta2 = refine(semi_strict, lo, hi, false);
    rep.theta1.within_bounds =
        rep.theta1.theta >= rep.bounds.theta1_lo - tol && rep.theta1.theta <= rep.bounds.theta1_hi + tol;
    rep.theta2.within_bounds =
        rep.theta2.theta >= rep.bounds.theta2_lo - tol && rep.theta2.theta <= rep.bounds.theta2_hi + tol;
    rep.theta1.agrees_with_conjecture = std::abs(rep.theta1.theta - rep.conjecture.theta1) <= conjecture_tol;
    rep.theta2.agrees_with_conjecture = std::abs(rep.theta2.theta - rep.conjecture.theta2) <= conjecture_tol;
    return rep;
}

// ---- analytic inequality trials ----

struct InequalityOutcome {
    double lhs = 0.0;
    double rhs = 0.0;
    bool violated = false;
};

inline constexpr double kInequalitySlack = 1e-10;

// r(alpha) = floor + |sum_k c_k cos(k pi alpha)| on [0, 1].
inline InequalityOutcome inequality_trial(const PowerDensity& d, double theta0, const std::vector<double>& coeffs,
                                          double floor) {
    require(floor > 0.0, ErrorKind::NonPositiveFunction, "trial floor must be positive");
    require(d.p > -1.0 && theta0 > 0.0, ErrorKind::OutOfDomain, "trial needs p > -1 and theta0 > 0");
    const double pi = std::numbers::pi;
    auto S = [&](double a) {
        double s = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * std::cos(double(k) * pi * a);
        return s;
    };
    auto dS = [&](double a) {
        double s = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) s -= coeffs[k] * double(k) * pi * std::sin(double(k) * pi * a);
        return s;
    };
    // kinks of |S| split the quadrature
    std::vector<double> cuts{0.0};
    constexpr int scan = 1024;
    double prev = S(0.0);
    for (int i = 1; i <= scan; ++i) {
        const double a = double(i) / scan, cur = S(a);
        if ((prev < 0.0) != (cur < 0.0) && prev != 0.0 && cur != 0.0)
            cuts.push_back(bisect(S, double(i - 1) / scan, a, 1e-15));
        prev = cur;
    }
    cuts.push_back(1.0);
    const double q = (d.p + 2.0) / (d.p + 1.0);
    const double scale = 1.0 / ((d.p + 1.0) * theta0);
    double lhs_int = 0.0, rhs = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        if (b <= a) continue;
        const int panels = std::max(1, int(std::ceil((b - a) * 64.0)));
        lhs_int += gauss_composite(
            [&](double x) {
                const double r = floor + std::abs(S(x));
                if (!(r > 0.0)) fail(ErrorKind::NonPositiveFunction, "trial function not positive");
                return std::pow(r, q);
            },
            a, b, panels, 12);
        rhs += gauss_composite(
            [&](double x) {
                const double r = floor + std::abs(S(x));
                return std::hypot(r, dS(x) * scale);
            },
            a, b, panels, 12);
    }
    InequalityOutcome out;
    out.lhs = std::pow(lhs_int, 1.0 / q);
    out.rhs = rhs;
    out.violated = out.lhs > out.rhs + kInequalitySlack;
    return out;
}

inline constexpr int kTrialModes = 8;
inline constexpr double kTrialFloor = 0.05;

inline std::vector<std::vector<double>> trial_coefficients(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<std::vector<double>> out(count, std::vector<double>(kTrialModes));
    for (auto& c : out)
        for (double& x : c) x = uni(gen);
    return out;
}

struct TrialSummary {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double worst_excess = -INFINITY; // max of lhs - rhs
    std::vector<InequalityOutcome> outcomes;
};

inline TrialSummary inequality_trials(const PowerDensity& d, double theta0, std::size_t count, std::uint64_t seed,
                                      unsigned threads = 0) {
    const auto coeffs = trial_coefficients(count, seed);
    TrialSummary s;
    s.trials = count;
    s.outcomes.resize(count);
    parallel_for(
        count, [&](std::size_t i) { s.outcomes[i] = inequality_trial(d, theta0, coeffs[i], kTrialFloor); }, threads);
    for (const auto& o : s.outcomes) {
        s.violations += o.violated ? 1 : 0;
        s.worst_excess = std::max(s.worst_excess, o.lhs - o.rhs);
    }
    return s;
}

} // namespace isosector
