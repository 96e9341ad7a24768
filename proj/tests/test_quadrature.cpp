#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "fracharm/fraclap.hpp"
#include "fracharm/kernels.hpp"
#include "fracharm/quadrature.hpp"

using namespace fracharm;

namespace {

QuadratureSpec tight()
{
    QuadratureSpec s;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-12;
    return s;
}

// Unit mass of eps_r in one dimension by Boost exp_sinh. With y = r + w^p and
// p = 2/(2 - alpha) the edge factor (y - r)^{-alpha/2} cancels the Jacobian.
double boost_mean_value_mass_1d(double alpha, double r)
{
    const double c = normalization_constant(SpaceDim(1), FracOrder(alpha));
    const double p = 2.0 / (2.0 - alpha);
    auto g = [&](double w) {
        const double t = std::pow(w, p);
        return c * std::pow(r, alpha) * p / (std::pow(2.0 * r + t, alpha / 2) * (r + t));
    };
    boost::math::quadrature::exp_sinh<double> es;
    return 2.0 * es.integrate(g, 1e-14);
}

}  // namespace

TEST(GaussKronrod, Polynomial)
{
    quad::Budget budget(100000);
    auto res = quad::adaptive_gk15([](double x) { return x * x * x * x * x; }, 0.0, 1.0, {1e-14, 1e-14}, budget);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.estimate.value, 1.0 / 6.0, 1e-15);
    EXPECT_EQ(budget.used(), 15u);
}

TEST(GaussKronrod, EdgePieceAbsorbsSingularity)
{
    quad::Budget budget(100000);
    quad::Piece p{0.0, 1.0, quad::EndKind::edge, quad::EndKind::regular, 0.7, false};
    auto f = [](double, double d) { return std::pow(d, -0.7); };
    auto res = quad::integrate_piece(f, p, {1e-13, 1e-12}, budget);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.estimate.value, 1.0 / 0.3, 1e-10);
}

TEST(GaussKronrod, BudgetStops)
{
    quad::Budget budget(60);
    auto res = quad::adaptive_gk15([](double x) { return std::sqrt(std::abs(std::sin(1 / x))); }, 1e-6, 1.0,
                                   {1e-14, 1e-14}, budget);
    EXPECT_FALSE(res.converged);
    EXPECT_LE(budget.used(), 60u);
}

TEST(IntegrateExterior, MeanValueMassAgainstBoost)
{
    for (double a : {0.3, 1.0, 1.7})
    {
        const double oracle = boost_mean_value_mass_1d(a, 1.0);
        EXPECT_NEAR(oracle, 1.0, 1e-9) << "alpha " << a;
        const auto r = mean_value_mass(SpaceDim(1), FracOrder(a), 1.0, tight());
        EXPECT_NEAR(r.value, oracle, 1e-8) << "alpha " << a;
        EXPECT_LE(r.n_evals, tight().max_evals);
    }
}

TEST(IntegrateExterior, MeanValueMassHigherDimensions)
{
    for (std::size_t n : {2u, 3u})
        for (double a : {0.3, 1.0, 1.7})
        {
            const auto r = mean_value_mass(SpaceDim(n), FracOrder(a), 0.7, QuadratureSpec{});
            EXPECT_NEAR(r.value, 1.0, 1e-6) << "n " << n << " alpha " << a;
            // error honesty on a known answer
            EXPECT_LE(std::abs(r.value - 1.0), 2.0 * r.error_estimate + 1e-12);
        }
}

TEST(IntegrateExterior, ZeroIntegrandIsExactlyZero)
{
    const Ball b(Point{1.0, 0.0}, 1.0);
    ExteriorProblem prob{b, Point{1.2, 0.1}, 0.5, DecayClass{-3.0, 1.0, 0.0}};
    const auto r = integrate_exterior([](const ExteriorSample&) { return 0.0; }, prob, QuadratureSpec{});
    EXPECT_EQ(r.value, 0.0);
}

TEST(IntegrateExterior, Linearity)
{
    const Ball b(Point{0.0, 0.0}, 1.0);
    ExteriorProblem prob{b, Point{0.3, -0.2}, 0.0, DecayClass{-4.0, 3.0, 0.0}};
    auto f = [](const ExteriorSample& s) { return 1.0 / std::pow(1.0 + vec::norm2(s.y), 2); };
    auto g = [](const ExteriorSample& s) { return s.y[0] * s.y[0] / std::pow(1.0 + vec::norm2(s.y), 3); };
    const auto spec = tight();
    const auto rf = integrate_exterior(f, prob, spec);
    const auto rg = integrate_exterior(g, prob, spec);
    const auto rs = integrate_exterior([&](const ExteriorSample& s) { return 2.0 * f(s) - 0.5 * g(s); }, prob, spec);
    EXPECT_NEAR(rs.value, 2.0 * rf.value - 0.5 * rg.value,
                rs.error_estimate + 2.0 * rf.error_estimate + 0.5 * rg.error_estimate + 1e-12);
    // closed form: int_{|y|>1} dy/(1+|y|^2)^2 = 2 pi int_1^inf s/(1+s^2)^2 ds = pi/2
    EXPECT_NEAR(rf.value, std::numbers::pi / 2.0, 1e-8);
}

TEST(IntegrateExterior, Deterministic)
{
    const auto a = mean_value_mass(SpaceDim(2), FracOrder(0.9), 1.0, QuadratureSpec{});
    const auto b = mean_value_mass(SpaceDim(2), FracOrder(0.9), 1.0, QuadratureSpec{});
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.error_estimate, b.error_estimate);
    EXPECT_EQ(a.n_evals, b.n_evals);
}

TEST(IntegrateExterior, RejectsInadmissibleDecay)
{
    const Ball b(Point{0.0, 0.0}, 1.0);
    int calls = 0;
    auto f = [&](const ExteriorSample&) {
        ++calls;
        return 1.0;
    };
    ExteriorProblem prob{b, Point{0.0, 0.0}, 0.0, DecayClass{-1.5, 1.0, 0.0}};
    EXPECT_THROW(integrate_exterior(f, prob, QuadratureSpec{}), InvalidArgument);
    EXPECT_EQ(calls, 0);
    prob.decay = DecayClass{-3.0, 1.0, 0.0};
    prob.pole = Point{1.0, 0.0};
    EXPECT_THROW(integrate_exterior(f, prob, QuadratureSpec{}), InvalidArgument);
}

TEST(IntegrateExterior, BudgetExhaustionCarriesPartial)
{
    QuadratureSpec spec = tight();
    spec.max_evals = 1000;
    try
    {
        mean_value_mass(SpaceDim(3), FracOrder(1.7), 1.0, spec);
        FAIL() << "expected ConvergenceError";
    }
    catch (const ConvergenceError& e)
    {
        EXPECT_LE(e.partial().n_evals, 1000u);
        EXPECT_TRUE(std::isfinite(e.partial().value));
    }
}

TEST(QuadratureSpec, Validation)
{
    QuadratureSpec s;
    EXPECT_NO_THROW(s.validate());
    s.max_evals = 999;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.rel_tol = 0.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.tail_safety = 0.5;
    EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(TailTruncation, RemainderWithinHalfTolerance)
{
    const DecayClass d{-3.5, 2.0, 0.0};
    for (std::size_t n : {1u, 2u, 3u})
    {
        const auto cut = quad::tail_truncation(d, n, 1e-10, 1.0, 0.0);
        EXPECT_LE(cut.remainder, 0.5e-10 * (1 + 1e-12));
        const auto safe = quad::tail_truncation(d, n, 1e-10, 2.0, 0.0);
        EXPECT_DOUBLE_EQ(safe.radius, 2.0 * cut.radius);
        EXPECT_LT(safe.remainder, cut.remainder);
    }
    EXPECT_GE(quad::tail_truncation(d, 2, 1.0, 1.0, 50.0).radius, 50.0);
}

TEST(PvCore, AffineAndConstant)
{
    const ScalarField affine(SpaceDim(2), [](std::span<const double> y) { return 3.0 * y[0] - 2.0 * y[1] + 0.5; },
                             Support{}, DecayClass{1.0, 6.0}, [](std::span<const double>) { return true; });
    for (double a : {0.3, 1.0, 1.7})
    {
        const auto r = integrate_pv_core(affine, Point{0.2, -0.4}, FracOrder(a), 1.0, QuadratureSpec{});
        // Near alpha = 2 the rounding in u(x + s w) + u(x - s w) - 2u(x), weighted by
        // s^{-1-alpha} down to the interpolation cutoff, leaves a few 1e-10.
        EXPECT_NEAR(r.value, 0.0, a <= 1.0 ? 1e-10 : 1e-9) << "alpha " << a;
        EXPECT_LE(std::abs(r.value), r.error_estimate) << "alpha " << a;
        const auto c = integrate_pv_core(fields::constant(SpaceDim(3), 4.0), Point{1.0, 2.0, 3.0}, FracOrder(a), 0.5,
                                         QuadratureSpec{});
        EXPECT_EQ(c.value, 0.0);
    }
}

TEST(PvCore, QuadraticOneDimension)
{
    // u(y) = y^2 at x = 0: int_{-1}^{1} (0 - t^2)/|t|^2 dt = -2
    const ScalarField q(SpaceDim(1), [](std::span<const double> y) { return y[0] * y[0]; }, Support{},
                        DecayClass{2.0, 1.0}, [](std::span<const double>) { return true; });
    const auto r = integrate_pv_core(q, Point{0.0}, FracOrder(1.0), 1.0, QuadratureSpec{});
    EXPECT_NEAR(r.value, -2.0, 1e-9);
}

TEST(PvCore, Rejections)
{
    const ScalarField rough(SpaceDim(1), [](std::span<const double> y) { return std::abs(y[0]); }, Support{},
                            DecayClass{1.0, 1.0}, [](std::span<const double> y) { return y[0] != 0.0; });
    EXPECT_THROW(integrate_pv_core(rough, Point{0.0}, FracOrder(1.0), 1.0, QuadratureSpec{}), InvalidArgument);
    EXPECT_THROW(integrate_pv_core(rough, Point{1.0}, FracOrder(1.0), 0.0, QuadratureSpec{}), InvalidArgument);
}

TEST(FitSlope, ExactPowerLaws)
{
    std::vector<std::pair<double, double>> sq, inv;
    for (double h : {1.0, 0.5, 0.25, 0.125})
    {
        sq.emplace_back(h, h * h);
        inv.emplace_back(h, 3.0 / h);
    }
    const auto a = fit_slope(sq);
    EXPECT_NEAR(a.slope, 2.0, 1e-14);
    EXPECT_NEAR(a.half_width, 0.0, 1e-12);
    const auto b = fit_slope(inv);
    EXPECT_NEAR(b.slope, -1.0, 1e-14);
    EXPECT_NEAR(b.half_width, 0.0, 1e-12);
}

TEST(FitSlope, NoisyPowerLaw)
{
    std::mt19937_64 gen(20240611);
    std::normal_distribution<double> noise;
    std::vector<std::pair<double, double>> rows;
    for (int k = 0; k < 8; ++k)
    {
        const double h = std::pow(0.5, k);
        rows.emplace_back(h, std::pow(h, 1.5) * (1.0 + 0.01 * noise(gen)));
    }
    const auto fit = fit_slope(rows);
    EXPECT_GE(fit.slope, 1.4);
    EXPECT_LE(fit.slope, 1.6);
    EXPECT_GT(fit.half_width, 0.0);
    EXPECT_LT(fit.half_width, 0.05);
}

TEST(FitSlope, Rejections)
{
    std::vector<std::pair<double, double>> rows{{1, 1}, {0.5, 0.5}, {0.25, 0.25}};
    EXPECT_THROW(fit_slope(rows), InvalidArgument);
    rows.emplace_back(0.125, 0.0);
    EXPECT_THROW(fit_slope(rows), InvalidArgument);
    rows.back() = {-0.125, 1.0};
    EXPECT_THROW(fit_slope(rows), InvalidArgument);
}
