#include <isosector/rn.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace isosector;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no isosector::Error thrown";
    return ErrorKind::IoFailure;
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

RadialProfile power_profile(int n, double k) {
    return RadialProfile::make(n, [k](double r) { return std::pow(r, k); });
}

} // namespace

TEST(UnitSphere, Measures) {
    EXPECT_NEAR(unit_sphere_measure(0), 2.0, 1e-15);
    EXPECT_NEAR(unit_sphere_measure(1), 2 * pi, 1e-14);
    EXPECT_NEAR(unit_sphere_measure(2), 4 * pi, 1e-14);
    EXPECT_NEAR(unit_sphere_measure(3), 2 * pi * pi, 1e-13);
}

TEST(BettaConvexity, Examples) {
    EXPECT_TRUE(betta_convexity_check(power_profile(2, 1.0)).convex);
    EXPECT_TRUE(betta_convexity_check(power_profile(2, 2.0)).convex);
    EXPECT_TRUE(betta_convexity_check(RadialProfile::make(3, [](double) { return 2.0; })).convex);
    EXPECT_EQ(betta_convexity_check(RadialProfile::make(3, [](double) { return 2.0; })).worst_second_difference, 0.0);
    for (int n : {2, 3}) {
        EXPECT_TRUE(betta_convexity_check(power_profile(n, 3.0)).convex);
        EXPECT_TRUE(betta_convexity_check(RadialProfile::make(n, [](double r) { return 1.0 + r; })).convex);
        EXPECT_FALSE(betta_convexity_check(power_profile(n, 0.5)).convex) << "n=" << n;
    }
}

TEST(BettaConvexity, FunctionValues) {
    const auto prof = power_profile(2, 2.0);
    for (double s : {0.0, 0.25, 1.0, 9.0}) EXPECT_NEAR(betta_f(prof, s), std::pow(s, 1.5), 1e-12);
    const auto lin = power_profile(3, 1.0);
    for (double s : {0.5, 2.0, 8.0}) EXPECT_NEAR(betta_f(lin, s), s, 1e-12);
}

TEST(BettaConvexity, RejectsBadProfiles) {
    EXPECT_EQ(kind_of([] { betta_convexity_check(RadialProfile::make(2, [](double r) { return r > 5.0 ? NAN : r; })); }),
              ErrorKind::NonFiniteProfile);
    EXPECT_EQ(kind_of([] { betta_convexity_check(RadialProfile::make(2, [](double r) { return r > 0.0 ? r - 0.01 : 0.0; })); }),
              ErrorKind::NonPositiveFunction);
    EXPECT_EQ(kind_of([] {
                  betta_convexity_check(RadialProfile::make(2, [](double r) { return 2.0 + std::sin(r); }));
              }),
              ErrorKind::MonotonicityViolation);
    EXPECT_EQ(kind_of([] { betta_convexity_check(power_profile(1, 1.0)); }), ErrorKind::ParamOutOfRange);
}

TEST(SphereMeasures, EuclideanBall) {
    for (double h : {0.0, 0.5, 3.0}) {
        const auto m = sphere_measures_rn(3, 0.0, h, 1.0);
        EXPECT_LT(rel(m.volume, 4 * pi / 3), 1e-10);
        EXPECT_LT(rel(m.perimeter, 4 * pi), 1e-10);
    }
}

TEST(SphereMeasures, CentredClosedForm) {
    for (int n : {2, 3, 4, 5})
        for (double p : {0.0, 0.5, 1.0, 2.0, 3.7})
            for (double R : {0.3, 1.0, 2.5}) {
                const auto q = sphere_measures_rn(n, p, 0.0, R);
                const auto c = centered_sphere_measures(n, p, R);
                EXPECT_LT(rel(q.volume, c.volume), 1e-10) << n << " " << p << " " << R;
                EXPECT_LT(rel(q.perimeter, c.perimeter), 1e-10) << n << " " << p << " " << R;
                EXPECT_LT(rel(c.volume, unit_sphere_measure(n - 1) * std::pow(R, n + p) / (n + p)), 1e-14);
            }
}

TEST(SphereMeasures, ShiftedBallWithQuadraticDensity) {
    // |x|^2 over a shifted ball: centre term plus the second moment
    for (double h : {0.3, 1.0, 4.0})
        for (double R : {0.5, 2.0}) {
            auto m = sphere_measures_rn(3, 2.0, h, R);
            EXPECT_LT(rel(m.volume, 4 * pi / 3 * R * R * R * h * h + 4 * pi / 5 * std::pow(R, 5)), 1e-10);
            EXPECT_LT(rel(m.perimeter, 4 * pi * R * R * (h * h + R * R)), 1e-10);
            m = sphere_measures_rn(2, 2.0, h, R);
            EXPECT_LT(rel(m.volume, pi * R * R * h * h + pi * std::pow(R, 4) / 2), 1e-10);
            EXPECT_LT(rel(m.perimeter, 2 * pi * R * (h * h + R * R)), 1e-10);
        }
}

TEST(SphereMeasures, NewtonPotentialOutsideTheBall) {
    for (double h : {1.5, 3.0, 10.0}) {
        const double R = 1.0;
        const auto m = sphere_measures_rn(3, -1.0, h, R);
        EXPECT_LT(rel(m.volume, 4 * pi / 3 / h), 1e-10);
        EXPECT_LT(rel(m.perimeter, 4 * pi / h), 1e-10);
    }
}

TEST(SphereMeasures, PlaneInverseSquareAgainstCartesianQuadrature) {
    using boost::math::quadrature::gauss_kronrod;
    for (double h : {1.5, 2.0, 5.0}) {
        const double R = 1.0;
        const double ref = gauss_kronrod<double, 61>::integrate(
            [&](double x) {
                const double w = std::sqrt(std::max(0.0, R * R - (x - h) * (x - h)));
                return 2.0 * std::atan(w / x) / x;
            },
            h - R, h + R, 15, 1e-14);
        EXPECT_LT(rel(sphere_measures_rn(2, -2.0, h, R).volume, ref), 1e-9) << "h=" << h;
    }
}

TEST(SphereMeasures, InverseSquarePlaneFamilyLosesPerimeter) {
    // p = -n keeps V fixed along h = 2R while P falls like 1/R
    double prev_p = INFINITY;
    const double v0 = sphere_measures_rn(2, -2.0, 2.0, 1.0).volume;
    for (double R : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const auto m = sphere_measures_rn(2, -2.0, 2.0 * R, R);
        EXPECT_LT(rel(m.volume, v0), 1e-10);
        EXPECT_LT(m.perimeter, prev_p);
        prev_p = m.perimeter;
    }
}

TEST(SphereMeasures, Domain) {
    EXPECT_EQ(kind_of([] { sphere_measures_rn(3, -0.5, 0.0, 1.0); }), ErrorKind::OriginInside);
    EXPECT_EQ(kind_of([] { sphere_measures_rn(3, -1.0, 1.0, 1.0); }), ErrorKind::OriginInside);
    EXPECT_EQ(kind_of([] { sphere_measures_rn(1, 1.0, 0.0, 1.0); }), ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([] { sphere_measures_rn(3, 1.0, 0.0, 0.0); }), ErrorKind::NonPositiveInput);
}

TEST(VanishingPerimeter, PlaneInverseDensity) {
    std::vector<double> radii;
    for (double R = 2; R <= 256; R *= 2) radii.push_back(R);
    const auto rows = vanishing_perimeter_demo(2, -1.0, 1.0, radii);
    ASSERT_EQ(rows.size(), radii.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_LT(rel(rows[i].volume, 1.0), 1e-10);
        EXPECT_GT(rows[i].h, rows[i].R);
        if (i > 0) {
            EXPECT_LT(rows[i].perimeter, rows[i - 1].perimeter);
        }
    }
    EXPECT_LT(rows.back().perimeter, rows.front().perimeter / 10.0);
}

TEST(VanishingPerimeter, SpaceInverseSquareDensity) {
    const auto rows = vanishing_perimeter_demo(3, -2.0, 1.0, {2, 4, 8, 16, 32, 64, 128, 256});
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].perimeter, rows[i - 1].perimeter);
    EXPECT_LT(rows.back().perimeter, rows.front().perimeter / 10.0);
}

TEST(VanishingPerimeter, Domain) {
    EXPECT_EQ(kind_of([] { vanishing_perimeter_demo(2, 0.0, 1.0, {2.0}); }), ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([] { vanishing_perimeter_demo(2, -3.0, 1.0, {2.0}); }), ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([] { vanishing_perimeter_demo(2, -1.0, 1.0, {1e-3}); }), ErrorKind::VolumeUnattainable);
}

TEST(SphereGrid, CountsAndWeights) {
    EXPECT_EQ(kind_of([] { sphere_grid(3, 499); }), ErrorKind::GridTooCoarse);
    EXPECT_EQ(kind_of([] { sphere_grid(4, 1000); }), ErrorKind::ParamOutOfRange);
    const auto g = sphere_grid(3, 800);
    double cx = 0, cy = 0, cz = 0;
    for (const auto& v : g) {
        EXPECT_NEAR(v[0] * v[0] + v[1] * v[1] + v[2] * v[2], 1.0, 1e-14);
        cx += v[0];
        cy += v[1];
        cz += v[2];
    }
    EXPECT_LT(std::abs(cz) / 800, 1e-12);
    EXPECT_LT(std::hypot(cx, cy) / 800, 1e-2);
    const auto reg = make_star_region(3, [](const auto&) { return 1.0; }, 800);
    double w = 0.0;
    for (double x : reg.weights) w += x;
    EXPECT_NEAR(w, 4 * pi, 1e-12);
}

TEST(JensenChain, BallGivesEquality) {
    for (int n : {2, 3}) {
        const auto reg = make_star_region(n, [](const auto&) { return 1.3; }, n == 2 ? 64 : 600);
        const auto c = averaging_inequality_check(reg, power_profile(n, 2.0));
        EXPECT_TRUE(c.ok);
        EXPECT_NEAR(c.q_full, c.q_tangential, 1e-12 * c.q_ball);
        EXPECT_NEAR(c.q_tangential, c.q_ball, 1e-12 * c.q_ball);
    }
}

TEST(JensenChain, HarmonicPerturbationIsStrict) {
    std::mt19937_64 gen(5);
    const auto reg = random_star_region(3, 1000, gen);
    const auto c = averaging_inequality_check(reg, power_profile(3, 2.0));
    EXPECT_TRUE(c.ok);
    EXPECT_GT(c.q_full, c.q_tangential);
    EXPECT_GT(c.q_tangential, c.q_ball);
}

TEST(JensenChain, SlopeOfAKnownRegion) {
    // r = exp(0.2 cos phi): |d log r / dphi| = 0.2 |sin phi|
    const auto reg = make_star_region(2, [](const auto& v) { return std::exp(0.2 * v[0]); }, 64);
    for (std::size_t i = 0; i < reg.nodes.size(); ++i) EXPECT_NEAR(reg.slope[i], 0.2 * std::abs(reg.nodes[i][1]), 1e-8);
}

TEST(JensenChain, RejectsCoarseGridsAndNonconvexProfiles) {
    StarRegion reg;
    reg.n = 3;
    reg.nodes.assign(100, {0.0, 0.0, 1.0});
    reg.weights.assign(100, 4 * pi / 100);
    reg.t.assign(100, 1.0);
    reg.slope.assign(100, 0.0);
    EXPECT_EQ(kind_of([&] { averaging_inequality_check(reg, power_profile(3, 2.0)); }), ErrorKind::GridTooCoarse);
    const auto plane = make_star_region(2, [](const auto&) { return 1.0; }, 64);
    EXPECT_EQ(kind_of([&] { averaging_inequality_check(plane, power_profile(2, 0.5)); }), ErrorKind::OutOfDomain);
    EXPECT_EQ(kind_of([&] { averaging_inequality_check(plane, power_profile(3, 2.0)); }), ErrorKind::ParamOutOfRange);
}

TEST(JensenChain, RandomTrialsOverTheProfileMatrix) {
    const std::vector<std::pair<const char*, std::function<double(double)>>> profiles{
        {"r", [](double r) { return r; }},
        {"r2", [](double r) { return r * r; }},
        {"r3", [](double r) { return r * r * r; }},
        {"1+r", [](double r) { return 1.0 + r; }}};
    for (int n : {2, 3}) {
        for (const auto& [name, a] : profiles) {
            const auto res = jensen_trials(RadialProfile::make(n, a), 1000, 20240601);
            EXPECT_EQ(res.trials, 1000u);
            EXPECT_EQ(res.failures, 0u) << "n=" << n << " a=" << name << " worst gap " << res.worst_gap;
        }
    }
}

TEST(JensenChain, TrialsAreThreadIndependent) {
    const auto prof = power_profile(3, 2.0);
    const auto a = jensen_trials(prof, 40, 9, 0, 1);
    const auto b = jensen_trials(prof, 40, 9, 0, 4);
    EXPECT_EQ(a.failures, b.failures);
    EXPECT_EQ(a.worst_gap, b.worst_gap);
}

TEST(NegativePower, ReductionExponent) {
    const auto r = negative_power_reduction(3, -4.0);
    EXPECT_NEAR(r.exponent, 2.0, 1e-15);
    EXPECT_TRUE(r.convex);
    EXPECT_GT(negative_power_reduction(2, -2.5).exponent, 1.0);
    EXPECT_EQ(kind_of([] { negative_power_reduction(3, -3.0); }), ErrorKind::ParamOutOfRange);
}

TEST(HalfPlane, Density) {
    EXPECT_NEAR(half_plane_density(3, [](double r) { return r; }, 3.0, 4.0), 20.0, 1e-14);
    EXPECT_NEAR(half_plane_density(2, [](double r) { return r * r; }, 3.0, 4.0), 25.0, 1e-13);
    EXPECT_EQ(kind_of([] { half_plane_density(3, [](double) { return 1.0; }, 1.0, 0.0); }), ErrorKind::OutOfDomain);
}
