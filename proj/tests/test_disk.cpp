#include <isosector/disk.hpp>

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

double shoelace(const std::vector<std::pair<double, double>>& pts) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto [x0, y0] = pts[i];
        const auto [x1, y1] = pts[(i + 1) % pts.size()];
        s += x0 * y1 - x1 * y0;
    }
    return 0.5 * std::abs(s);
}

// Upper half of the lens as a polygon: axis, unit circle up to psi, internal arc back down.
double polygon_lens_area(double psi, const LensGeometry& g, int n = 20000) {
    std::vector<std::pair<double, double>> pts{{g.axis_x, 0.0}};
    for (int i = 0; i <= n; ++i) pts.emplace_back(std::cos(psi * i / n), std::sin(psi * i / n));
    if (std::isfinite(g.arc_radius))
        for (int i = 1; i < n; ++i) {
            const double t = g.start_angle + g.sweep * i / n;
            pts.emplace_back(g.center_x + g.arc_radius * std::cos(t), g.arc_radius * std::sin(t));
        }
    return 2.0 * shoelace(pts);
}

const std::vector<double> kA{1.5, 2.0, 4.0};
const std::vector<double> kTheta{pi / 4, pi / 2, pi, 3 * pi / 2, 2 * pi, 7.0};

} // namespace

TEST(Snell, Examples) {
    EXPECT_NEAR(snell_angle({2.0}), pi / 3, 1e-15);
    EXPECT_NEAR(snell_angle({1.0 + 1e-12}), 0.0, 1e-5);
    EXPECT_NEAR(snell_angle({1e12}), pi / 2, 1e-11);
    EXPECT_EQ(kind_of([] { snell_angle({1.0}); }), ErrorKind::OutOfDomain);
}

TEST(Snell, RealizedBitesMeetTheCircleAtTheRefractionAngle) {
    for (double a : kA)
        for (double th : {pi / 2, pi, 3 * pi / 2})
            for (auto br : {BiteBranch::EdgeLens, BiteBranch::Notch})
                for (int i = 1; i < 40; ++i) {
                    const double phi = th * i / 40.0;
                    const auto s = bite_shape(br, phi, {a}, th);
                    if (!s) continue;
                    const double omega = br == BiteBranch::EdgeLens ? snell_angle({a}) : pi - snell_angle({a});
                    EXPECT_NEAR(lens_corner_angle(s->psi, s->lens), omega, 1e-8);
                }
}

TEST(Lens, AreaAndArcLengthMatchAPolygon) {
    for (double psi : {0.3, 1.0, 1.5, 2.0, 2.8})
        for (double om : {0.4, 1.0, 1.5708, 2.0, 2.7}) {
            const auto g = lens_geometry(psi, om);
            ASSERT_TRUE(g.has_value());
            EXPECT_NEAR(g->euclid_area, polygon_lens_area(psi, *g), 1e-7 * g->euclid_area) << psi << " " << om;
            const double len = std::isfinite(g->arc_radius) ? 2.0 * g->arc_radius * std::abs(g->sweep) : 2.0 * std::sin(psi);
            EXPECT_NEAR(g->arc_length, len, 1e-12);
        }
}

TEST(Lens, RightAngleChordIsAHalfDisk) {
    const auto g = lens_geometry(pi / 2, pi / 2);
    ASSERT_TRUE(g.has_value());
    EXPECT_NEAR(g->euclid_area, pi / 2, 1e-12);
    EXPECT_NEAR(g->arc_length, 2.0, 1e-12);
}

TEST(CandidateMeasures, Examples) {
    const DiskDensity d{2.0};
    auto c = disk_candidate_measures(DiskTag::ArcInside, 1.0, d, 1.0);
    EXPECT_DOUBLE_EQ(c.area, 1.0);
    EXPECT_DOUBLE_EQ(c.perimeter, 2.0);
    c = disk_candidate_measures(DiskTag::EdgeSemicircle, 1.0, d, 1.0);
    EXPECT_NEAR(c.area, pi / 2, 1e-15);
    EXPECT_NEAR(c.perimeter, pi, 1e-15);
    EXPECT_NEAR(c.perimeter * c.perimeter / c.area, 2 * pi, 1e-14);
    EXPECT_NEAR(one_endpoint_semicircle_ratio(d, pi / 4), 5 * pi / 2, 1e-14);
    c = disk_candidate_measures(DiskTag::ArcEnclosing, 2.0, d, 1.0);
    EXPECT_DOUBLE_EQ(c.area, 1.0 + 1.5);
    EXPECT_DOUBLE_EQ(c.perimeter, 2.0);
    c = disk_candidate_measures(DiskTag::Annulus, 0.5, d, 1.0);
    EXPECT_DOUBLE_EQ(c.area, 0.75);
    EXPECT_DOUBLE_EQ(c.perimeter, 2.0);
    const auto e = disk_candidate_measures(DiskTag::EnclosingSemicircle, 1.5, d, pi);
    const auto arc = disk_candidate_measures(DiskTag::ArcEnclosing, 1.5, d, pi);
    EXPECT_EQ(e.area, arc.area);
    EXPECT_EQ(e.perimeter, arc.perimeter);
}

TEST(CandidateMeasures, OneEndpointSemicircleAlwaysLosesToEdgeSemicircle) {
    for (double a : kA)
        for (double beta = 0.01; beta < pi; beta += 0.1) EXPECT_GT(one_endpoint_semicircle_ratio({a}, beta), 2 * pi);
}

TEST(CandidateMeasures, ParameterRanges) {
    const DiskDensity d{2.0};
    EXPECT_EQ(kind_of([&] { disk_candidate_measures(DiskTag::ArcInside, 1.5, d, 1.0); }), ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([&] { disk_candidate_measures(DiskTag::ArcEnclosing, 0.5, d, 1.0); }), ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([&] { disk_candidate_measures(DiskTag::Annulus, 1.0, d, 1.0); }), ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([&] { disk_candidate_measures(DiskTag::EnclosingSemicircle, 1.5, d, 2.0); }),
              ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([&] { disk_candidate_measures(DiskTag::Bite, 1.5, d, 1.0); }), ErrorKind::ParamOutOfRange);
    EXPECT_EQ(kind_of([&] { disk_candidate_measures(DiskTag::ArcInside, 0.5, {1.0}, 1.0); }), ErrorKind::OutOfDomain);
}

TEST(SolveForArea, Examples) {
    const DiskDensity d{2.0};
    auto c = solve_candidate_for_area(DiskTag::ArcInside, d, 1.0, 0.5);
    EXPECT_NEAR(c.param, std::sqrt(0.5), 1e-15);
    c = solve_candidate_for_area(DiskTag::Annulus, d, 1.0, 1.0 - 1e-12);
    EXPECT_LT(c.param, 1e-5);
    c = solve_candidate_for_area(DiskTag::EdgeSemicircle, d, 1.0, pi / 2);
    EXPECT_NEAR(c.param, 1.0, 1e-15);
    EXPECT_EQ(kind_of([&] { solve_candidate_for_area(DiskTag::ArcInside, d, 1.0, 2.0); }), ErrorKind::AreaUnattainable);
    EXPECT_EQ(kind_of([&] { solve_candidate_for_area(DiskTag::ArcEnclosing, d, 1.0, 0.5); }),
              ErrorKind::AreaUnattainable);
}

TEST(SolveForArea, RealizesTheRequestedArea) {
    for (double a : kA)
        for (double th : {pi / 4, pi / 2, pi, 3 * pi / 2}) {
            const double full = a * th / 2.0;
            for (double f : {0.1, 0.4, 0.8}) {
                const double A = f * full;
                for (auto tag : {DiskTag::ArcInside, DiskTag::Annulus, DiskTag::EdgeSemicircle, DiskTag::Bite}) {
                    DiskCandidate c;
                    try {
                        c = solve_candidate_for_area(tag, {a}, th, A);
                    } catch (const Error& e) {
                        EXPECT_EQ(e.kind(), ErrorKind::AreaUnattainable) << e.what();
                        continue;
                    }
                    EXPECT_LT(std::abs(c.area - A), 1e-10 * A) << to_string(tag);
                    EXPECT_GT(c.perimeter, 0.0);
                }
            }
        }
}

TEST(ClassifyDisk, Examples) {
    const DiskDensity d{2.0};
    for (double A : {0.1, 1.0, 10.0, 100.0}) EXPECT_EQ(classify_disk(d, 7.0, A).winner, DiskTag::EdgeSemicircle);
    const double th = 1.5 * pi, full = th;
    EXPECT_EQ(classify_disk(d, th, full * 1.01).winner, DiskTag::ArcEnclosing);
    EXPECT_EQ(classify_disk(d, th, 9 * pi / 4 * 1.01).winner, DiskTag::EdgeSemicircle);
    const auto tie = classify_disk(d, pi / 2, 1e-6);
    EXPECT_TRUE(tie.tie);
    EXPECT_TRUE(tie.winner == DiskTag::ArcInside || tie.winner == DiskTag::EdgeSemicircle);
    const auto c = classify_disk(d, 4.7124, 8.0);
    EXPECT_EQ(c.winner, DiskTag::EdgeSemicircle);
}

TEST(ClassifyDisk, RankingIsSorted) {
    for (double a : kA)
        for (double th : kTheta)
            for (double f : {0.2, 0.9, 1.5}) {
                const auto c = classify_disk({a}, th, f * a * th / 2.0);
                ASSERT_FALSE(c.ranked.empty());
                EXPECT_GE(c.margin, 0.0);
                for (std::size_t i = 1; i < c.ranked.size(); ++i)
                    EXPECT_LE(c.ranked[i - 1].perimeter, c.ranked[i].perimeter);
            }
}

TEST(ClassifyDisk, ProvenBranchAgreement) {
    for (double a : kA)
        for (double th : kTheta) {
            const DiskDensity d{a};
            const double full = a * th / 2.0;
            const std::string where = "a=" + std::to_string(a) + " theta0=" + std::to_string(th);
            if (th > a * pi) {
                for (double A : {1e-3 * full, 0.5 * full, full, 3 * full})
                    EXPECT_EQ(classify_disk(d, th, A).winner, DiskTag::EdgeSemicircle) << where;
                continue;
            }
            // small areas
            const auto small = classify_disk(d, th, 1e-4 * full);
            const double crit = pi / a;
            if (std::abs(th - crit) < 1e-12) {
                EXPECT_TRUE(small.tie) << where;
            } else if (th < crit) {
                EXPECT_EQ(small.winner, DiskTag::ArcInside) << where;
            } else {
                EXPECT_EQ(small.winner, DiskTag::EdgeSemicircle) << where;
            }
            if (th <= pi) {
                for (double f : {1.0 + 1e-3, 1.5, 4.0})
                    EXPECT_EQ(classify_disk(d, th, f * full).winner, DiskTag::ArcEnclosing) << where;
            } else {
                const double big = *large_area_threshold(d, th);
                EXPECT_EQ(classify_disk(d, th, full + 0.5 * (big - full)).winner, DiskTag::ArcEnclosing) << where;
                EXPECT_EQ(classify_disk(d, th, 1.5 * big).winner, DiskTag::EdgeSemicircle) << where;
            }
        }
}

TEST(ClassifyDisk, TangentSemicircleNeverWins) {
    for (double a : kA)
        for (double th : kTheta) {
            if (!(th > pi)) continue;
            const double full = a * th / 2.0;
            for (double f : {0.05, 0.25, 1.0, 4.0}) {
                const auto c = classify_disk({a}, th, full * (1.0 + f));
                ASSERT_TRUE(c.tangent.has_value());
                EXPECT_GT(c.tangent->perimeter, c.ranked.front().perimeter)
                    << "a=" << a << " theta0=" << th << " A=" << c.area;
            }
        }
}

TEST(TangentSemicircle, MeasuresAndDomain) {
    const DiskDensity d{2.0};
    EXPECT_FALSE(tangent_semicircle(d, pi, 10.0).has_value());
    EXPECT_FALSE(tangent_semicircle(d, 4.0, 1.0).has_value());
    const auto t = tangent_semicircle(d, 4.0, 4.0 + pi / 2 * 3.0);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(t->R, 2.0, 1e-14);
    EXPECT_NEAR(t->perimeter, 2 * pi + 4.0 - pi, 1e-14);
}

TEST(Thresholds, LargeAreaClosedFormAndBisection) {
    const auto t = transition_thresholds({2.0}, 1.5 * pi);
    ASSERT_TRUE(t.a_large.has_value());
    EXPECT_NEAR(*t.a_large, 9 * pi / 4, 1e-12);
    EXPECT_NEAR(*t.a_large, 7.068583, 1e-6);
    ASSERT_TRUE(t.a_large_bisected.has_value());
    EXPECT_NEAR(t.a_large_bisected->value, 9 * pi / 4, 1e-9);
    EXPECT_FALSE(large_area_threshold({2.0}, pi).has_value());
}

TEST(Thresholds, SmallAreaWinnerCrossesAtPiOverA) {
    for (double a : {1.5, 2.0, 3.0, 4.0}) {
        const double th = pi / a;
        EXPECT_EQ(small_area_winner({a}, th), SmallAreaWinner::Tie);
        EXPECT_EQ(small_area_winner({a}, th * (1 - 1e-9)), SmallAreaWinner::ArcInside);
        EXPECT_EQ(small_area_winner({a}, th * (1 + 1e-9)), SmallAreaWinner::EdgeSemicircle);
    }
}

TEST(Thresholds, OrderedBelowFullArea) {
    for (double a : kA)
        for (double th : {pi / 4, pi / 2, 3 * pi / 4, pi}) {
            const auto t = transition_thresholds({a}, th);
            const double full = a * th / 2.0;
            if (t.a0 && t.a1) {
                EXPECT_GT(t.a0->value, 0.0);
                EXPECT_LE(t.a0->value, t.a1->value + 1e-9);
                EXPECT_LE(t.a1->value, full + 1e-12);
            }
            if (t.annulus_never) {
                EXPECT_EQ(t.a1->value, full);
            }
            if (t.bite_never) {
                EXPECT_EQ(t.a1->value, t.a0->value);
            }
        }
}

TEST(Thresholds, NarrowSectorSkipsTheBite) {
    // below the g-curve angle the small candidate gives way straight to the annulus
    const DiskDensity d{2.0};
    const auto t = transition_thresholds(d, pi / 4);
    ASSERT_TRUE(t.a0.has_value());
    EXPECT_TRUE(t.bite_never);
    EXPECT_EQ(classify_disk(d, pi / 4, 0.98 * t.a0->value).winner, DiskTag::ArcInside);
    EXPECT_EQ(classify_disk(d, pi / 4, 1.02 * t.a0->value).winner, DiskTag::Annulus);
    const auto wide = transition_thresholds(d, 3 * pi / 4);
    EXPECT_FALSE(wide.bite_never);
    EXPECT_TRUE(wide.annulus_never);
    EXPECT_EQ(classify_disk(d, 3 * pi / 4, 1.02 * wide.a0->value).winner, DiskTag::Bite);
}

TEST(Thresholds, EdgeSemicircleBeyondAPi) {
    const auto t = transition_thresholds({1.5}, 7.0);
    EXPECT_FALSE(t.a0.has_value());
    ASSERT_FALSE(t.notes.empty());
}

TEST(Bite, AtMostOneSignChangeAgainstAnnulus) {
    for (double a : kA)
        for (double th : {pi / 4, pi / 2, 3 * pi / 4, pi})
            EXPECT_LE(bite_annulus_sign_changes({a}, th), 1) << "a=" << a << " theta0=" << th;
}

TEST(TransitionCurves, FAndGValues) {
    const auto rows = transition_curves_sweep({1.5, 2.0, 4.0});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NEAR(rows[1].f_theta, pi / 2, 1e-15);
    EXPECT_NEAR(rows[2].f_theta, pi / 4, 1e-15);
    const double g[] = {1.13733, 1.071094, 1.197227};
    for (int i = 0; i < 3; ++i) {
        ASSERT_TRUE(rows[i].g_theta.has_value()) << rows[i].error;
        EXPECT_NEAR(*rows[i].g_theta, g[i], 1e-5);
    }
}
