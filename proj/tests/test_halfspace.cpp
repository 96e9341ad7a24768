#include <cmath>

#include <gtest/gtest.h>

#include "fracharm/halfspace.hpp"

using namespace fracharm;

TEST(Liouville, Evaluation)
{
    const LiouvilleSolution sol(3.0, FracOrder(1.0), SpaceDim(2));
    EXPECT_DOUBLE_EQ(sol(Point{5.0, 4.0}), 6.0);
    EXPECT_EQ(sol(Point{1.0, 0.0}), 0.0);
    EXPECT_EQ(sol.field()(Point{1.0, -2.0}), 0.0);
    EXPECT_TRUE(sol.field().admissible(FracOrder(1.0)));
    EXPECT_THROW(LiouvilleSolution(0.0, FracOrder(1.0), SpaceDim(1)), InvalidArgument);
}

TEST(Liouville, OdeResidualIsRoundoff)
{
    struct Case {
        double C, a, xn;
    };
    for (auto [C, a, xn] : {Case{1.0, 1.0, 4.0}, Case{3.0, 0.7, 0.2}, Case{0.5, 1.9, 17.0}, Case{2.0, 0.05, 1e-3}})
    {
        const LiouvilleSolution sol(C, FracOrder(a), SpaceDim(2));
        const double res = verify_liouville_ode(sol, Point{0.3, xn});
        const double scale = a / (2.0 * xn) * sol(Point{0.3, xn});
        EXPECT_LE(std::abs(res), 4.0 * std::numeric_limits<double>::epsilon() * scale);
    }
    EXPECT_THROW(verify_liouville_ode(LiouvilleSolution(1.0, FracOrder(1.0), SpaceDim(1)), Point{0.0}),
                 InvalidArgument);
}

TEST(PoissonExtend, ReproducesLiouville)
{
    for (std::size_t n : {1u, 2u})
        for (double a : {0.3, 1.0, 1.7})
        {
            const LiouvilleSolution sol(1.0, FracOrder(a), SpaceDim(n));
            const Ball ball = Ball::tangent_upper(SpaceDim(n), 2.0);
            const Point x = Point::on_last_axis(SpaceDim(n), 1.0);
            const auto r = poisson_extend(sol.field(), ball, FracOrder(a), x, QuadratureSpec{});
            EXPECT_NEAR(r.value, sol(x), 1e-6 * sol(x)) << "n " << n << " alpha " << a;
        }
}

TEST(PoissonExtend, ConstantAndZeroData)
{
    const Ball ball(Point{0.5, -0.5}, 1.5);
    const auto one = fields::constant(SpaceDim(2), 1.0);
    for (const Point& x : {Point{0.5, -0.5}, Point{1.2, 0.3}, Point{-0.8, -0.9}})
    {
        EXPECT_NEAR(poisson_extend(one, ball, FracOrder(0.6), x, QuadratureSpec{}).value, 1.0, 1e-6);
        EXPECT_NEAR(poisson_mass(ball, FracOrder(1.4), x, QuadratureSpec{}).value, 1.0, 1e-6);
    }
    const auto zero = fields::constant(SpaceDim(2), 0.0);
    EXPECT_EQ(poisson_extend(zero, ball, FracOrder(0.6), Point{1.0, 0.0}, QuadratureSpec{}).value, 0.0);
    EXPECT_THROW(poisson_extend(one, ball, FracOrder(0.6), Point{2.0, -0.5}, QuadratureSpec{}), InvalidArgument);
}

TEST(PoissonExtend, MaximumPrincipleAndMonotonicity)
{
    const Ball ball(Point{0.0}, 1.0);
    const auto lo = fields::bump(Ball(Point{1.5}, 0.4));
    const auto hi = fields::linear_combination(1.0, lo, 1.0, fields::gaussian(Point{-2.0}, 0.5, 0.3));
    for (double x0 : {-0.7, 0.0, 0.9})
    {
        const double vlo = poisson_extend(lo, ball, FracOrder(1.1), Point{x0}, QuadratureSpec{}).value;
        const double vhi = poisson_extend(hi, ball, FracOrder(1.1), Point{x0}, QuadratureSpec{}).value;
        EXPECT_GT(vlo, 0.0);
        EXPECT_GT(vhi, vlo);
    }
}

TEST(ExtensionConsistency, LiouvilleAndControls)
{
    const LiouvilleSolution sol(1.0, FracOrder(1.0), SpaceDim(2));
    const Point x{0.0, 1.0};
    EXPECT_EQ(extension_consistency(sol.field(), FracOrder(1.0), 3.0, 3.0, x, QuadratureSpec{}), 0.0);
    EXPECT_LE(extension_consistency(sol.field(), FracOrder(1.0), 2.0, 4.0, x, QuadratureSpec{}), 2e-4 * sol(x));
    // Liouville plus a bump outside both balls is not harmonic: the extensions disagree.
    const auto perturbed =
        fields::linear_combination(1.0, sol.field(), 1.0, fields::bump(Ball(Point{9.0, 1.0}, 0.5)));
    EXPECT_GT(extension_consistency(perturbed, FracOrder(1.0), 2.0, 4.0, x, QuadratureSpec{}), 1e-6);
}

TEST(Derivatives, TangentialOnAxisHasZeroBoundaryTerm)
{
    const LiouvilleSolution sol(1.0, FracOrder(1.0), SpaceDim(3));
    const Ball ball = Ball::tangent_upper(SpaceDim(3), 8.0);
    const Point x{0.0, 0.0, 1.0};
    const auto d0 = tangential_derivative(sol.field(), ball, FracOrder(1.0), x, 0, QuadratureSpec{});
    const auto d1 = tangential_derivative(sol.field(), ball, FracOrder(1.0), x, 1, QuadratureSpec{});
    EXPECT_EQ(d0.term_boundary.value, 0.0);
    EXPECT_EQ(d0.direction, 0u);
    EXPECT_EQ(d0.total, d0.term_boundary.value + d0.term_bulk.value);
    EXPECT_NEAR(d0.total, d1.total, 1e-8);
    EXPECT_NEAR(d0.total, 0.0, 1e-6);
    EXPECT_THROW(tangential_derivative(sol.field(), ball, FracOrder(1.0), x, 2, QuadratureSpec{}), InvalidArgument);
}

TEST(Derivatives, TangentialMatchesFiniteDifference)
{
    const auto u = fields::bump(Ball(Point{3.0, 2.0}, 1.0));
    const Ball ball = Ball::tangent_upper(SpaceDim(2), 2.0);
    const FracOrder a(1.0);
    const Point x{0.4, 1.5};
    const auto d = tangential_derivative(u, ball, a, x, 0, QuadratureSpec{});
    const double h = 1e-3;
    const double up = poisson_extend(u, ball, a, Point{0.4 + h, 1.5}, QuadratureSpec{}).value;
    const double dn = poisson_extend(u, ball, a, Point{0.4 - h, 1.5}, QuadratureSpec{}).value;
    const double fd = (up - dn) / (2.0 * h);
    EXPECT_NEAR(d.total, fd, 1e-3 * std::abs(fd));
}

TEST(Derivatives, NormalMatchesFiniteDifference)
{
    const auto u = fields::bump(Ball(Point{3.0, 2.0}, 1.0));
    const Ball ball = Ball::tangent_upper(SpaceDim(2), 2.0);
    const FracOrder a(0.7);
    const Point x{0.4, 1.5};
    const auto d = normal_derivative(u, ball, a, x, QuadratureSpec{});
    EXPECT_EQ(d.direction, 1u);
    const double h = 1e-3;
    const double up = poisson_extend(u, ball, a, Point{0.4, 1.5 + h}, QuadratureSpec{}).value;
    const double dn = poisson_extend(u, ball, a, Point{0.4, 1.5 - h}, QuadratureSpec{}).value;
    const double fd = (up - dn) / (2.0 * h);
    EXPECT_NEAR(d.total, fd, 1e-3 * std::abs(fd));
}

TEST(Derivatives, NormalBoundaryFactorExample)
{
    // J1 / u_hat = alpha (r - x_n) / (2 x_n r - |x|^2) = (r - 1) / (2 r - 1) for alpha = 1, x = (0, 1)
    const LiouvilleSolution sol(1.0, FracOrder(1.0), SpaceDim(2));
    const double r = 1e4;
    const Ball ball = Ball::tangent_upper(SpaceDim(2), r);
    const auto d = normal_derivative(sol.field(), ball, FracOrder(1.0), Point{0.0, 1.0}, QuadratureSpec{});
    const double factor = (r - 1.0) / (2.0 * r - 1.0);
    EXPECT_NEAR(factor, 0.499975, 1e-6);
    EXPECT_NEAR(d.term_boundary.value, factor, 1e-6);
    EXPECT_NEAR(d.total, 0.5, 1e-5);
}

TEST(Derivatives, ZeroData)
{
    const auto zero = fields::constant(SpaceDim(2), 0.0);
    const Ball ball = Ball::tangent_upper(SpaceDim(2), 4.0);
    const auto d = normal_derivative(zero, ball, FracOrder(1.0), Point{0.2, 1.0}, QuadratureSpec{});
    EXPECT_EQ(d.term_boundary.value, 0.0);
    EXPECT_EQ(d.term_bulk.value, 0.0);
}

TEST(Derivatives, RequireTangentBall)
{
    const LiouvilleSolution sol(1.0, FracOrder(1.0), SpaceDim(2));
    const Ball off(Point{0.5, 2.0}, 2.0);
    EXPECT_THROW(normal_derivative(sol.field(), off, FracOrder(1.0), Point{0.5, 1.0}, QuadratureSpec{}),
                 InvalidArgument);
}

TEST(BulkSplit, PartsAddUp)
{
    const LiouvilleSolution sol(1.0, FracOrder(1.0), SpaceDim(2));
    const Ball ball = Ball::tangent_upper(SpaceDim(2), 16.0);
    const Point x{0.0, 1.0};
    const auto split = bulk_split(sol.field(), ball, FracOrder(1.0), x, 0, 10.0, QuadratureSpec{});
    EXPECT_GT(split.inner.value, 0.0);
    EXPECT_GT(split.outer.value, 0.0);
    const auto whole = bulk_split(sol.field(), ball, FracOrder(1.0), x, 0, 1e6, QuadratureSpec{});
    EXPECT_NEAR(split.inner.value + split.outer.value, whole.inner.value + whole.outer.value, 1e-6);
}

TEST(RieszIdentity, Examples)
{
    const Ball ball(Point{0.0, 0.0}, 1.0);
    const FracOrder a(1.0);
    EXPECT_LE(riesz_identity_residual(ball, Point{0.0, 0.0}, Point{3.0, 0.0}, a, QuadratureSpec{}), 1e-4);
    EXPECT_LE(riesz_identity_residual(ball, Point{0.0, 0.0}, Point{1e3, 0.0}, a, QuadratureSpec{}), 1e-4);
    EXPECT_LE(riesz_identity_residual(ball, Point{0.3, -0.5}, Point{-1.1, 1.4}, FracOrder(0.4), QuadratureSpec{}),
              1e-4);
    EXPECT_LE(riesz_identity_residual(Ball(Point{0.0, 0.0, 1.0}, 2.0), Point{0.5, 0.2, 1.5}, Point{0.0, 2.5, 3.0},
                                      FracOrder(1.7), QuadratureSpec{}),
              1e-4);
    EXPECT_THROW(riesz_identity_residual(ball, Point{0.0, 0.0}, Point{1.0, 0.0}, a, QuadratureSpec{}),
                 InvalidArgument);
    EXPECT_THROW(riesz_identity_residual(Ball(Point{0.0}, 1.0), Point{0.0}, Point{2.0}, FracOrder(1.5),
                                         QuadratureSpec{}),
                 InvalidArgument);
}
