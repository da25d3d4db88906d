#include <isosector/sector.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace isosector;
using std::numbers::pi;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

} // namespace

TEST(ProvenBounds, Examples) {
    auto b = proven_bounds({1.0});
    EXPECT_TRUE(b.p1_special);
    EXPECT_DOUBLE_EQ(b.theta1_lo, 2.0);
    EXPECT_NEAR(b.theta1_hi, 2.221441469, 1e-9);
    EXPECT_NEAR(b.theta2_lo, 3.0 * pi / 4.0, 1e-15);
    EXPECT_DOUBLE_EQ(b.theta2_hi, pi);
    b = proven_bounds({3.0});
    EXPECT_FALSE(b.p1_special);
    EXPECT_NEAR(b.theta1_lo, pi / 4, 1e-15);
    EXPECT_NEAR(b.theta1_hi, pi / 2, 1e-15);
    EXPECT_NEAR(b.theta2_lo, 5 * pi / 8, 1e-15);
    EXPECT_DOUBLE_EQ(b.theta2_hi, pi);
    b = proven_bounds({1e-12});
    EXPECT_NEAR(b.theta1_lo, pi, 1e-9);
    EXPECT_NEAR(b.theta1_hi, pi, 1e-9);
    EXPECT_NEAR(b.theta2_lo, pi, 1e-9);
    EXPECT_THROW(proven_bounds({0.0}), Error);
}

TEST(ConjecturedTransitions, Examples) {
    auto c = conjectured_transitions({1.0});
    EXPECT_NEAR(c.theta1, pi / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(c.theta2, 3 * pi / 4, 1e-15);
    c = conjectured_transitions({2.0});
    EXPECT_NEAR(c.theta1, 1.813799364, 1e-9);
    EXPECT_NEAR(c.theta2, 2.094395102, 1e-9);
    c = conjectured_transitions({1e-12});
    EXPECT_NEAR(c.theta1, pi, 1e-9);
    EXPECT_NEAR(c.theta2, pi, 1e-9);
}

TEST(ArcStability, Examples) {
    auto s = arc_stability(2.0, {1.0});
    EXPECT_TRUE(s.stable);
    EXPECT_NEAR(s.Q, 8.0 / (pi * pi), 1e-15);
    // Q lands on 1 up to rounding at the threshold angle
    s = arc_stability(pi / std::sqrt(2.0), {1.0});
    EXPECT_NEAR(s.Q, 1.0, 1e-15);
    EXPECT_FALSE(arc_stability(2.3, {1.0}).stable);
    EXPECT_TRUE(arc_stability(1e6, {-2.0}).stable);
    EXPECT_TRUE(arc_stability(pi, {0.0}).boundary);
}

TEST(ClassifySector, Examples) {
    auto c = classify_sector({1.0}, 1.4);
    EXPECT_EQ(c.winner, Winner::Arc);
    c = classify_sector({1.0}, 3.2);
    EXPECT_EQ(c.winner, Winner::Semicircle);
    c = classify_sector({1.0}, 2.30);
    ASSERT_EQ(c.winner, Winner::Undulary);
    const double und = c.find(SectorTag::Undulary)->measure.ratio;
    EXPECT_LT(und, c.find(SectorTag::Arc)->measure.ratio);
    EXPECT_LT(und, c.find(SectorTag::Semicircle)->measure.ratio);
}

TEST(ClassifySector, RejectsBadInput) {
    EXPECT_THROW(classify_sector({0.0}, 1.0), Error);
    EXPECT_THROW(classify_sector({1.0}, 0.0), Error);
}

TEST(ClassifySector, RankingIsSortedWithNonnegativeMargin) {
    for (double p : {0.5, 1.0, 2.0})
        for (double th : linspace(0.3, 4.0, 25)) {
            const auto c = classify_sector({p}, th);
            ASSERT_FALSE(c.ranked.empty());
            EXPECT_GE(c.margin, 0.0);
            for (std::size_t i = 1; i < c.ranked.size(); ++i)
                EXPECT_LE(c.ranked[i - 1].measure.ratio, c.ranked[i].measure.ratio);
        }
}

TEST(ClassifySector, ProvenWinnerFloors) {
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        for (double th : linspace(0.05, pi / (p + 1.0), 50))
            EXPECT_EQ(classify_sector({p}, th).winner, Winner::Arc) << "p=" << p << " theta0=" << th;
        for (double th : linspace(pi, 2.0 * pi, 50))
            EXPECT_EQ(classify_sector({p}, th).winner, Winner::Semicircle) << "p=" << p << " theta0=" << th;
    }
}

TEST(ClassifySector, UndularyWinnersAreAdmissible) {
    for (double p : {0.5, 1.0, 2.0})
        for (double th : linspace(pi / std::sqrt(p + 1.0) - 0.05, pi * (p + 2.0) / (2 * p + 2.0) + 0.05, 40)) {
            const auto c = classify_sector({p}, th);
            if (c.winner != Winner::Undulary) continue;
            const auto& u = c.ranked.front();
            ASSERT_TRUE(u.undulary.has_value());
            EXPECT_LT(std::abs(half_period(u.undulary->r1, {p}) - th), 1e-8);
            EXPECT_GT(u.undulary->lambda, 0.0);
            EXPECT_LT(u.undulary->lambda, p + 1.0);
        }
}

TEST(PhaseSweep, SingleCellMatchesClassify) {
    const auto cells = phase_sweep({1.0}, {2.3});
    ASSERT_EQ(cells.size(), 1u);
    ASSERT_TRUE(cells[0].result.has_value());
    const auto direct = classify_sector({1.0}, 2.3);
    EXPECT_EQ(cells[0].result->winner, direct.winner);
    EXPECT_EQ(cells[0].result->ranked.front().measure.ratio, direct.ranked.front().measure.ratio);
}

TEST(PhaseSweep, RejectsUnsortedOrEmptyGrids) {
    EXPECT_THROW(phase_sweep({}, {1.0}), Error);
    EXPECT_THROW(phase_sweep({1.0}, {2.0, 1.0}), Error);
}

TEST(PhaseSweep, WinnerSequencesAreMonotoneAndTransitionsMatch) {
    const auto theta = linspace(1.0, 3.5, 501); // step 0.005
    const std::vector<double> ps{1.0, 2.0};
    const auto cells = phase_sweep(ps, theta, 0);
    const std::vector<std::pair<double, double>> expected{{2.221, 2.356}, {1.814, 2.094}};
    for (std::size_t k = 0; k < ps.size(); ++k) {
        std::vector<PhaseCell> row(cells.begin() + k * theta.size(), cells.begin() + (k + 1) * theta.size());
        EXPECT_TRUE(winner_sequence_monotone(row)) << "p=" << ps[k];
        double last_arc = 0.0, first_semi = 0.0;
        for (const auto& c : row) {
            ASSERT_TRUE(c.result.has_value()) << c.error;
            if (c.result->winner == Winner::Arc) last_arc = c.theta0;
            if (c.result->winner == Winner::Semicircle && first_semi == 0.0) first_semi = c.theta0;
        }
        EXPECT_NEAR(last_arc, expected[k].first, 0.01) << "p=" << ps[k];
        EXPECT_NEAR(first_semi, expected[k].second, 0.01) << "p=" << ps[k];
    }
}

TEST(PhaseSweep, DeterministicAcrossThreadCounts) {
    const auto theta = linspace(2.0, 2.5, 12);
    const auto a = phase_sweep({1.0, 1.5}, theta, 1);
    const auto b = phase_sweep({1.0, 1.5}, theta, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].result->winner, b[i].result->winner);
        EXPECT_EQ(a[i].result->ranked.front().measure.ratio, b[i].result->ranked.front().measure.ratio);
    }
}

TEST(WinnerSequence, DetectsArcReturning) {
    auto cell = [](Winner w) {
        PhaseCell c;
        c.result = Classification{};
        c.result->winner = w;
        return c;
    };
    EXPECT_TRUE(winner_sequence_monotone({cell(Winner::Arc), cell(Winner::Undulary), cell(Winner::Semicircle)}));
    EXPECT_TRUE(winner_sequence_monotone({cell(Winner::Arc), cell(Winner::Tie), cell(Winner::Semicircle)}));
    EXPECT_FALSE(winner_sequence_monotone({cell(Winner::Arc), cell(Winner::Undulary), cell(Winner::Arc)}));
    EXPECT_FALSE(winner_sequence_monotone({cell(Winner::Semicircle), cell(Winner::Undulary)}));
}

TEST(Transitions, PEqualsOne) {
    const auto rep = locate_transitions({1.0});
    EXPECT_NEAR(rep.theta1.theta, 2.221422, 2e-4);
    EXPECT_NEAR(rep.theta2.theta, 2.356211, 2e-4);
    EXPECT_TRUE(rep.theta1.within_bounds);
    EXPECT_TRUE(rep.theta2.within_bounds);
    EXPECT_TRUE(rep.theta1.agrees_with_conjecture);
    EXPECT_TRUE(rep.theta2.agrees_with_conjecture);
    EXPECT_LT(rep.theta1.bracket_hi - rep.theta1.bracket_lo, 1e-4 + 1e-12);
}

TEST(Transitions, PEqualsTwo) {
    const auto rep = locate_transitions({2.0});
    EXPECT_NEAR(rep.theta1.theta, 1.813798, 2e-4);
    EXPECT_NEAR(rep.theta2.theta, 2.094414, 2e-4);
    EXPECT_TRUE(rep.theta1.within_bounds);
    EXPECT_TRUE(rep.theta2.within_bounds);
}

TEST(Inequality, ConstantGivesEquality) {
    for (double p : {0.5, 1.0, 2.0}) {
        const auto o = inequality_trial({p}, 1.0, {1.0}, 0.05);
        EXPECT_NEAR(o.lhs, 1.05, 1e-13);
        EXPECT_NEAR(o.rhs, 1.05, 1e-13);
        EXPECT_FALSE(o.violated);
    }
}

TEST(Inequality, RampViolatesPastStabilityThreshold) {
    for (double p : {0.5, 1.0, 2.0}) {
        const double th = 2.0 * pi / std::sqrt(p + 1.0);
        for (double c1 : {-0.9, -0.2, -0.05})
            EXPECT_TRUE(inequality_trial({p}, th, {1.0, c1}, 0.05).violated) << "p=" << p << " c1=" << c1;
        EXPECT_FALSE(inequality_trial({p}, pi / (p + 1.0), {1.0, -0.9}, 0.05).violated);
    }
}

TEST(Inequality, RejectsBadFloor) {
    EXPECT_THROW(inequality_trial({1.0}, 1.0, {1.0}, 0.0), Error);
}

TEST(Inequality, RandomTrialsHoldAtAndBelowTheCircleAngle) {
    for (double p : {0.5, 1.0, 2.0})
        for (auto [th, n] : {std::pair{pi / (p + 1.0), 10000}, std::pair{0.5 * pi / (p + 1.0), 2000}}) {
            const auto s = inequality_trials({p}, th, n, 20240601);
            EXPECT_EQ(s.trials, std::size_t(n));
            EXPECT_EQ(s.violations, 0u) << "p=" << p << " theta0=" << th << " worst " << s.worst_excess;
        }
}

TEST(Inequality, TrialCoefficientsAreReproducible) {
    EXPECT_EQ(trial_coefficients(5, 7), trial_coefficients(5, 7));
    EXPECT_NE(trial_coefficients(5, 7), trial_coefficients(5, 8));
    for (const auto& c : trial_coefficients(100, 1))
        for (double x : c) {
            EXPECT_GE(x, -1.0);
            EXPECT_LE(x, 1.0);
        }
}
