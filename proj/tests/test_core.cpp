#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracharm/core.hpp"
#include "fracharm/special.hpp"

using namespace fracharm;

TEST(FracOrder, AcceptsOpenInterval)
{
    EXPECT_DOUBLE_EQ(FracOrder(1e-9).value(), 1e-9);
    EXPECT_DOUBLE_EQ(FracOrder(1.5).half(), 0.75);
    EXPECT_THROW(FracOrder(0.0), InvalidArgument);
    EXPECT_THROW(FracOrder(2.0), InvalidArgument);
    EXPECT_THROW(FracOrder(-1.0), InvalidArgument);
    EXPECT_THROW(FracOrder(std::nan("")), InvalidArgument);
}

TEST(SpaceDim, Range)
{
    EXPECT_EQ(SpaceDim(1).value(), 1u);
    EXPECT_EQ(SpaceDim(8).value(), 8u);
    EXPECT_THROW(SpaceDim(0), InvalidArgument);
    EXPECT_THROW(SpaceDim(9), InvalidArgument);
}

TEST(Point, RejectsNonFinite)
{
    EXPECT_THROW((Point{1.0, std::numeric_limits<double>::infinity()}), InvalidArgument);
    EXPECT_THROW(Point(std::vector<double>{}), InvalidArgument);
    const Point p = Point::on_last_axis(SpaceDim(3), 2.5);
    EXPECT_EQ(p, (Point{0.0, 0.0, 2.5}));
    EXPECT_EQ(p.last(), 2.5);
}

TEST(Ball, Invariants)
{
    EXPECT_THROW(Ball(Point{0.0}, 0.0), InvalidArgument);
    EXPECT_THROW(Ball(Point{0.0}, std::numeric_limits<double>::infinity()), InvalidArgument);
    const Ball b = Ball::tangent_upper(SpaceDim(2), 3.0);
    EXPECT_EQ(b.center(), (Point{0.0, 3.0}));
    const std::vector<double> x{0.0, 1.0};
    EXPECT_TRUE(b.strictly_contains(x));
    EXPECT_DOUBLE_EQ(b.interior_gap(x), 9.0 - 4.0);
    const std::vector<double> origin{0.0, 0.0};
    EXPECT_FALSE(b.strictly_contains(origin));
}

TEST(Geometry, UnitSphereArea)
{
    const double pi = std::numbers::pi;
    EXPECT_DOUBLE_EQ(unit_sphere_area(1), 2.0);
    EXPECT_DOUBLE_EQ(unit_sphere_area(2), 2.0 * pi);
    EXPECT_DOUBLE_EQ(unit_sphere_area(3), 4.0 * pi);
    for (std::size_t n = 1; n <= 8; ++n)
    {
        const double ref = 2.0 * std::pow(pi, n / 2.0) / std::tgamma(n / 2.0);
        EXPECT_NEAR(unit_sphere_area(n), ref, 1e-13 * ref) << "n = " << n;
    }
}

TEST(Special, GammaMatchesLibm)
{
    for (double x : {0.05, 0.15, 0.5, 0.85, 1.0, 1.35, 2.5, 3.7, 5.0, 7.25})
        EXPECT_NEAR(special::gamma(x), std::tgamma(x), 1e-12 * std::tgamma(x)) << "x = " << x;
    // reflection branch
    for (double x : {-0.15, -0.5, -0.85})
        EXPECT_NEAR(special::gamma(x), std::tgamma(x), 1e-12 * std::abs(std::tgamma(x))) << "x = " << x;
}

TEST(EvalResult, ScaleAndAdd)
{
    const EvalResult a{2.0, 0.1, 10, Convention::bare_pv};
    const auto s = a.scaled(-3.0);
    EXPECT_EQ(s.value, -6.0);
    EXPECT_DOUBLE_EQ(s.error_estimate, 0.3);
    EXPECT_EQ(s.convention, Convention::bare_pv);
    const auto sum = a + EvalResult{1.0, 0.2, 5};
    EXPECT_EQ(sum.value, 3.0);
    EXPECT_EQ(sum.n_evals, 15u);
    EXPECT_STREQ(to_string(Convention::constant_applied), "constant_applied");
}
