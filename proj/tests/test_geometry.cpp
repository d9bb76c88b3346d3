#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddm/geometry.hpp"

using namespace ddm;

TEST(Geometry, SignedDistanceExamples) {
    const Interval iv{-0.5, 0.5};
    EXPECT_DOUBLE_EQ(signed_distance(iv, {0.0}), 0.5);
    EXPECT_DOUBLE_EQ(signed_distance(iv, {0.75}), -0.25);
    EXPECT_DOUBLE_EQ(signed_distance(iv, {-0.75}), -0.25);
    EXPECT_NEAR(signed_distance(Disk{{0.0, 0.0}, 0.5}, {0.3, 0.4}), 0.0, 1e-16);
    EXPECT_DOUBLE_EQ(signed_distance(Disk{{0.0, 0.0}, 0.5}, {0.0, 0.0}), 0.5);
    EXPECT_DOUBLE_EQ(signed_distance(Disk{{1.0, 0.0}, 0.5}, {3.0, 0.0}), -1.5);
}

TEST(Geometry, PhaseFieldExamples) {
    EXPECT_EQ(phase_field(0.0, 0.1), 0.5);
    EXPECT_EQ(phase_field(0.0, 1e-3), 0.5);
    EXPECT_NEAR(phase_field(0.1, 0.1), 0.88079707797788244, 1e-15);
    EXPECT_NEAR(phase_field_slope(0.0, 0.05), 1.0 / 0.1, 1e-13);
    EXPECT_LE(phase_field_slope(10 * 0.05, 0.05), 1.7e-8 / 0.05);
    EXPECT_LE(phase_field_slope(-10 * 0.05, 0.05), 1.7e-8 / 0.05);
    // sech²(10)/2 = 4.1223072e-9
    EXPECT_NEAR(phase_field_slope(10 * 0.05, 0.05) * 0.05, 4.1223072278836987e-09, 1e-20);
    const double phi = phase_field(0.3, 0.1);
    EXPECT_NEAR(phase_field_slope(0.3, 0.1), 2.0 / 0.1 * phi * (1.0 - phi), 1e-13 / 0.1);
    const double sech = 1.0 / std::cosh(3.0);
    EXPECT_NEAR(phase_field_slope(0.3, 0.1), sech * sech / 0.2, 1e-13 / 0.1);
}

TEST(Geometry, PhaseFieldInvariantsOnRandomSamples) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> r_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> log_eps(std::log(1e-3), std::log(0.9));
    for (int k = 0; k < 20000; ++k) {
        const double r = r_dist(rng);
        const double eps = std::exp(log_eps(rng));
        const double p = phase_field(r, eps);
        const double m = phase_field(-r, eps);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        if (std::abs(r / eps) < 18.0) {
            EXPECT_GT(p, 0.0);
            EXPECT_LT(p, 1.0);
        }
        EXPECT_NEAR(p + m, 1.0, 1e-14);
        EXPECT_NEAR(phase_field_slope(r, eps), 2.0 / eps * p * (1.0 - p), 1e-13 / eps);
        EXPECT_GE(phase_field_slope(r, eps), 0.0);
        EXPECT_LE(phase_field_slope(r, eps), phase_field_slope(0.0, eps));
    }
}

TEST(Geometry, PhaseFieldStrictlyIncreasingInsideLayer) {
    const double eps = 0.05;
    double prev = phase_field(-0.8, eps);
    for (int k = 1; k <= 1600; ++k) {
        const double r = -0.8 + 1e-3 * k;
        const double cur = phase_field(r, eps);
        EXPECT_GE(cur, prev);
        if (std::abs(r) < 0.6) {
            EXPECT_GT(cur, prev) << r;
        }
        prev = cur;
    }
}

TEST(Geometry, RegionClassification) {
    EXPECT_EQ(region_classify(0.5), Region::Inside);
    EXPECT_EQ(region_classify(-0.25), Region::Outside);
    EXPECT_EQ(region_classify(0.0), Region::OnInterface);
    EXPECT_TRUE(counts_as_inside(0.0));
    EXPECT_FALSE(counts_as_inside(-1e-300));
}

TEST(Geometry, DiskSdfGradientHasUnitNorm) {
    const Disk disk{{0.1, -0.2}, 0.3};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double d = 1e-6;
    int checked = 0;
    while (checked < 2000) {
        const Point p{u(rng), u(rng)};
        const double r = signed_distance(disk, p);
        // stay off the interface and away from the centre singularity
        if (std::abs(r) < 1e-3 || r > disk.radius - 1e-3) continue;
        const double gx = (signed_distance(disk, {p.x + d, p.y}) - signed_distance(disk, {p.x - d, p.y})) / (2 * d);
        const double gy = (signed_distance(disk, {p.x, p.y + d}) - signed_distance(disk, {p.x, p.y - d})) / (2 * d);
        EXPECT_NEAR(std::hypot(gx, gy), 1.0, 1e-6);
        ++checked;
    }
}

TEST(Geometry, CuboidAndShapeValidation) {
    EXPECT_THROW(Cuboid(1.0, 1.0), ValidationError);
    EXPECT_THROW(Cuboid(0.0, 1.0, 2.0, 1.0), ValidationError);
    const Cuboid box(-1.0, 1.0, -1.0, 1.0);
    EXPECT_EQ(box.dimension(), 2);
    EXPECT_DOUBLE_EQ(box.volume(), 4.0);
    EXPECT_DOUBLE_EQ(clearance(box, Disk{{0.0, 0.0}, 0.3}), 0.7);
    EXPECT_DOUBLE_EQ(clearance(Cuboid(-1.0, 1.0), Interval{-0.5, 0.6}), 0.4);
    EXPECT_THROW(clearance(Cuboid(-1.0, 1.0), Interval{-1.5, 0.5}), ValidationError);
    EXPECT_THROW(clearance(box, Disk{{0.9, 0.0}, 0.3}), ValidationError);
    EXPECT_DOUBLE_EQ(boundary_measure(Interval{-0.5, 0.5}), 2.0);
    EXPECT_NEAR(boundary_measure(Disk{{0.0, 0.0}, 0.3}), 2 * M_PI * 0.3, 1e-15);
    EXPECT_NEAR(shape_measure(Disk{{0.0, 0.0}, 0.3}), M_PI * 0.09, 1e-15);
    EXPECT_DOUBLE_EQ(shape_measure(Interval{-0.5, 0.6}), 1.1);
}
