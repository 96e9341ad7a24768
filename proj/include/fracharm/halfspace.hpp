// SPDX-License-Identifier: Apache-2.0
//! \file halfspace.hpp
//! The half-space Liouville family C x_n^{alpha/2}, the Poisson extension from
//! the exterior of a ball, the derivative decompositions of the extension, and
//! the identity checks built on them.
#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fracharm/core.hpp"
#include "fracharm/field.hpp"
#include "fracharm/kernels.hpp"
#include "fracharm/quadrature.hpp"

namespace fracharm {

//---------------------------------------------------------------------------//
// Liouville solution
//---------------------------------------------------------------------------//

//! u(x) = C x_n^{alpha/2} on the upper half-space, 0 elsewhere.
class LiouvilleSolution {
  public:
    LiouvilleSolution(double C, FracOrder alpha, SpaceDim dim) : c_(C), alpha_(alpha), dim_(dim)
    {
        if (!(C > 0.0) || !std::isfinite(C))
            throw InvalidArgument("LiouvilleSolution: C must be positive and finite");
    }

    double C() const noexcept { return c_; }
    FracOrder alpha() const noexcept { return alpha_; }
    SpaceDim dim() const noexcept { return dim_; }

    double operator()(std::span<const double> y) const
    {
        return y.back() > 0.0 ? c_ * std::pow(y.back(), alpha_.half()) : 0.0;
    }
    double operator()(const Point& y) const { return (*this)(y.coords()); }

    //! As a ScalarField; (1 + |y|)^{alpha/2} bounds y_n^{alpha/2}, so the decay class is {alpha/2, C}.
    ScalarField field() const
    {
        const double c = c_;
        const double h = alpha_.half();
        return ScalarField(
            dim_, [c, h](std::span<const double> y) { return c * std::pow(y.back(), h); },
            Support{SupportKind::upper_half_space, std::nullopt}, DecayClass{h, c});
    }

  private:
    double c_;
    FracOrder alpha_;
    SpaceDim dim_;
};

//---------------------------------------------------------------------------//
// Poisson integrals
//---------------------------------------------------------------------------//

namespace detail {

inline void require_interior(const Ball& ball, const Point& x, const char* what)
{
    if (x.dim() != ball.dim())
        throw InvalidArgument(std::string(what) + ": point and ball dimensions differ");
    if (!ball.strictly_contains(x.coords()))
        throw InvalidArgument(std::string(what) + ": x must lie strictly inside the ball");
}

/*!
 * Exterior problem for int P_r(x, y) u(y) g(y) dy where |g| <= G s^k
 * (s = |y - x|) beyond g_valid.
 *
 * For s >= 2(|x - c| + r) one has |y - c|^2 - r^2 >= s^2/4, so
 * P <= c gap^{alpha/2} 4^{alpha/2} s^{-n-alpha}.
 */
inline ExteriorProblem poisson_problem(const ScalarField& u,
                                       const Ball& ball,
                                       FracOrder alpha,
                                       const Point& x,
                                       double g_exponent = 0.0,
                                       double g_constant = 1.0,
                                       double g_valid = 0.0)
{
    const SpaceDim n(x.dim());
    const double a = alpha.value();
    const double gap = ball.interior_gap(x.coords());
    const double c = normalization_constant(n, alpha);
    const auto gu = u.growth_from(x.coords());
    const double pc = distance(x, ball.center());
    DecayClass d{gu.tail_exponent - n.as_real() - a + g_exponent,
                 c * std::pow(4.0 * gap, 0.5 * a) * gu.bound_constant * g_constant,
                 std::max({2.0 * (pc + ball.radius()), gu.valid_beyond, g_valid})};
    ExteriorProblem prob{ball, x, 0.5 * a, d};
    prob.support = u.support_regions();
    prob.kinks = u.kinks();
    return prob;
}

//! P_r(x, y) from an exterior sample, using its cancellation-free t.
struct PoissonWeight {
    double c;
    double gap;
    double alpha;
    double n;

    double operator()(const ExteriorSample& smp) const
    {
        return c * std::pow(gap / smp.t, 0.5 * alpha) / std::pow(smp.s, n);
    }
};

inline PoissonWeight poisson_weight(const Ball& ball, FracOrder alpha, const Point& x)
{
    const SpaceDim n(x.dim());
    return {normalization_constant(n, alpha), ball.interior_gap(x.coords()), alpha.value(), n.as_real()};
}

}  // namespace detail

/*!
 * Poisson extension u_hat(x) = int_{|y-c|>r} P_r(x, y) u(y) dy for x strictly
 * inside the ball.
 */
inline EvalResult
poisson_extend(const ScalarField& u, const Ball& ball, FracOrder alpha, const Point& x, const QuadratureSpec& spec)
{
    detail::require_interior(ball, x, "poisson_extend");
    if (u.dim().value() != x.dim())
        throw InvalidArgument("poisson_extend: field dimension does not match the point");
    if (!u.admissible(alpha))
        throw InvalidArgument("poisson_extend: field growth is not admissible for this alpha");
    const auto prob = detail::poisson_problem(u, ball, alpha, x);
    const auto P = detail::poisson_weight(ball, alpha, x);
    return integrate_exterior(
        [&](const ExteriorSample& smp) {
            const double v = u(smp.y);
            return v == 0.0 ? 0.0 : P(smp) * v;
        },
        prob, spec);
}

//! int P_r(x, y) dy over |y - c| > r; equal to 1 for every interior x.
inline EvalResult poisson_mass(const Ball& ball, FracOrder alpha, const Point& x, const QuadratureSpec& spec)
{
    detail::require_interior(ball, x, "poisson_mass");
    const SpaceDim n(x.dim());
    const auto one = fields::constant(n, 1.0);
    const auto P = detail::poisson_weight(ball, alpha, x);
    return integrate_exterior(P, detail::poisson_problem(one, ball, alpha, x), spec);
}

/*!
 * The field equal to the Poisson extension inside the ball and to u outside.
 * Every evaluation inside the ball is a full exterior integral.
 */
inline ScalarField extension_field(const ScalarField& u, const Ball& ball, FracOrder alpha, const QuadratureSpec& spec)
{
    if (u.dim().value() != ball.dim())
        throw InvalidArgument("extension_field: field and ball dimensions differ");
    auto eval = [u, ball, alpha, spec](std::span<const double> y) {
        if (ball.strictly_contains(y))
            return poisson_extend(u, ball, alpha, Point(y), spec).value;
        return u(y);
    };
    auto smooth = [u, ball](std::span<const double> y) {
        return ball.strictly_contains(y) || u.smooth_at(y);
    };
    std::vector<double> c(ball.center().coords().begin(), ball.center().coords().end());
    std::vector<Region> kinks = u.nonsmooth_surfaces();
    kinks.push_back(BallRegion{c, ball.radius(), true});
    return ScalarField(u.dim(), eval, Support{}, u.decay(), smooth, std::move(kinks));
}

//---------------------------------------------------------------------------//
// Derivative decompositions
//---------------------------------------------------------------------------//

//! Boundary-factor term plus bulk integral of a first derivative of the extension.
struct DerivativeDecomposition {
    std::size_t direction = 0;  //!< zero-based axis index
    EvalResult term_boundary;
    EvalResult term_bulk;
    double total = 0.0;
};

namespace detail {

inline void require_tangent_ball(const Ball& ball, const Point& x, const char* what)
{
    require_interior(ball, x, what);
    const auto c = ball.center().coords();
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
    {
        if (c[i] != 0.0)
            throw InvalidArgument(std::string(what) + ": ball must be B_r(x_r) with x_r = (0, ..., 0, r)");
    }
    if (c.back() != ball.radius())
        throw InvalidArgument(std::string(what) + ": ball must be B_r(x_r) with x_r = (0, ..., 0, r)");
    if (!(x.last() > 0.0))
        throw InvalidArgument(std::string(what) + ": x must lie in the upper half-space");
}

//! int n (y_i - x_i)/|y - x|^2 P_r(x, y) u(y) dy, optionally in absolute value and restricted by region.
inline EvalResult bulk_integral(const ScalarField& u,
                                const Ball& ball,
                                FracOrder alpha,
                                const Point& x,
                                std::size_t i,
                                bool absolute,
                                std::optional<Region> restrict_to,
                                const QuadratureSpec& spec)
{
    const double nn = static_cast<double>(x.dim());
    auto prob = poisson_problem(u, ball, alpha, x, -1.0, nn);
    if (restrict_to)
        prob.support.push_back(*restrict_to);
    const auto P = poisson_weight(ball, alpha, x);
    const double xi = x[i];
    return integrate_exterior(
        [&](const ExteriorSample& smp) {
            const double v = u(smp.y);
            if (v == 0.0)
                return 0.0;
            double g = nn * (smp.y[i] - xi) / (smp.s * smp.s);
            if (absolute)
                g = std::abs(g);
            return g * P(smp) * v;
        },
        prob, spec);
}

}  // namespace detail

/*!
 * d u_hat / d x_i for a tangential axis i < n - 1 (zero-based):
 * I1 = -alpha x_i / (r^2 - |x - x_r|^2) * u_hat(x) and I2 = int n (y_i - x_i)/|y-x|^2 P u.
 */
inline DerivativeDecomposition tangential_derivative(
    const ScalarField& u, const Ball& ball, FracOrder alpha, const Point& x, std::size_t i, const QuadratureSpec& spec)
{
    detail::require_tangent_ball(ball, x, "tangential_derivative");
    if (i + 1 >= x.dim())
        throw InvalidArgument("tangential_derivative: axis index must be a tangential axis (i < n - 1)");
    const double gap = ball.interior_gap(x.coords());

    DerivativeDecomposition d;
    d.direction = i;
    if (x[i] == 0.0)
    {
        d.term_boundary = EvalResult{0.0, 0.0, 0, Convention::none};
    }
    else
    {
        d.term_boundary = poisson_extend(u, ball, alpha, x, spec).scaled(-alpha.value() * x[i] / gap);
    }
    d.term_bulk = detail::bulk_integral(u, ball, alpha, x, i, false, std::nullopt, spec);
    d.total = d.term_boundary.value + d.term_bulk.value;
    return d;
}

/*!
 * d u_hat / d x_n: J1 = alpha (r - x_n)/(2 x_n r - |x|^2) * u_hat(x) in closed
 * form and J2 = int n (y_n - x_n)/|y-x|^2 P u by quadrature.
 */
inline DerivativeDecomposition
normal_derivative(const ScalarField& u, const Ball& ball, FracOrder alpha, const Point& x, const QuadratureSpec& spec)
{
    detail::require_tangent_ball(ball, x, "normal_derivative");
    const std::size_t last = x.dim() - 1;
    const double r = ball.radius();
    const double xn = x.last();
    // 2 x_n r - |x|^2 equals r^2 - |x - x_r|^2
    const double gap = ball.interior_gap(x.coords());

    DerivativeDecomposition d;
    d.direction = last;
    d.term_boundary = poisson_extend(u, ball, alpha, x, spec).scaled(alpha.value() * (r - xn) / gap);
    d.term_bulk = detail::bulk_integral(u, ball, alpha, x, last, false, std::nullopt, spec);
    d.total = d.term_boundary.value + d.term_bulk.value;
    return d;
}

/*!
 * The absolute bulk integral int |n (y_i - x_i)| / |y - x|^2 P u split at
 * |y| = R: inner is the |y| <= R part, outer the |y| > R part.
 */
struct BulkSplit {
    double R = 0.0;
    EvalResult inner;
    EvalResult outer;
};

inline BulkSplit bulk_split(const ScalarField& u,
                            const Ball& ball,
                            FracOrder alpha,
                            const Point& x,
                            std::size_t i,
                            double R,
                            const QuadratureSpec& spec)
{
    detail::require_tangent_ball(ball, x, "bulk_split");
    if (i >= x.dim())
        throw InvalidArgument("bulk_split: axis index out of range");
    if (!(R > 0.0) || !std::isfinite(R))
        throw InvalidArgument("bulk_split: R must be positive and finite");
    std::vector<double> origin(x.dim(), 0.0);
    BulkSplit out;
    out.R = R;
    out.inner = detail::bulk_integral(u, ball, alpha, x, i, true, BallRegion{origin, R, true}, spec);
    out.outer = detail::bulk_integral(u, ball, alpha, x, i, true, BallRegion{origin, R, false}, spec);
    return out;
}

//---------------------------------------------------------------------------//
// Identity checks
//---------------------------------------------------------------------------//

/*!
 * d/dx_n [C x_n^{alpha/2}] - (alpha / (2 x_n)) C x_n^{alpha/2}, both terms
 * evaluated analytically. Zero up to rounding.
 */
inline double verify_liouville_ode(const LiouvilleSolution& sol, const Point& x)
{
    const double xn = x.last();
    if (!(xn > 0.0))
        throw InvalidArgument("verify_liouville_ode: x_n must be positive");
    const double h = sol.alpha().half();
    const double derivative = sol.C() * h * std::pow(xn, h - 1.0);
    const double rhs = sol.alpha().value() / (2.0 * xn) * sol.C() * std::pow(xn, h);
    return derivative - rhs;
}

/*!
 * Relative residual |L - R| / L of |z - x|^{alpha-n} = int P_r(x, y) |z - y|^{alpha-n} dy
 * for x inside and z outside the ball.
 */
inline double riesz_identity_residual(
    const Ball& ball, const Point& x, const Point& z, FracOrder alpha, const QuadratureSpec& spec)
{
    detail::require_interior(ball, x, "riesz_identity_residual");
    require_same_dim(x, z, "riesz_identity_residual");
    const SpaceDim n(x.dim());
    const double nn = n.as_real();
    const double a = alpha.value();
    if (!(nn > a))
        throw InvalidArgument("riesz_identity_residual: requires n > alpha");
    const double zc = distance(z, ball.center());
    if (!(zc > ball.radius()))
        throw InvalidArgument("riesz_identity_residual: z must lie strictly outside the ball");

    const double lhs = riesz_kernel(n, alpha, x, z);
    const double gap = ball.interior_gap(x.coords());
    const double c = normalization_constant(n, alpha);
    const double pc = distance(x, ball.center());
    const double zx = distance(z, x);
    // beyond s >= 2|z - x|: |z - y| >= s/2
    ExteriorProblem prob{ball, x, 0.5 * a,
                         DecayClass{-2.0 * nn, c * std::pow(4.0 * gap, 0.5 * a) * std::pow(2.0, nn - a),
                                    std::max(2.0 * (pc + ball.radius()), 2.0 * zx)}};
    prob.singularity = PointSingularity{z, nn - a};
    const auto P = detail::poisson_weight(ball, alpha, x);
    const auto rhs = integrate_exterior(
        [&](const ExteriorSample& smp) { return P(smp) * std::pow(smp.dz, a - nn); }, prob, spec);
    return std::abs(lhs - rhs.value) / lhs;
}

/*!
 * |u_hat_{r1}(x) - u_hat_{r2}(x)| for the extensions from B_{r1}(x_{r1}) and
 * B_{r2}(x_{r2}). Exactly 0 when r1 == r2.
 */
inline double extension_consistency(
    const ScalarField& u, FracOrder alpha, double r1, double r2, const Point& x, const QuadratureSpec& spec)
{
    const SpaceDim n(x.dim());
    const Ball b1 = Ball::tangent_upper(n, r1);
    const Ball b2 = Ball::tangent_upper(n, r2);
    detail::require_interior(b1, x, "extension_consistency");
    detail::require_interior(b2, x, "extension_consistency");
    if (r1 == r2)
        return 0.0;
    const double v1 = poisson_extend(u, b1, alpha, x, spec).value;
    const double v2 = poisson_extend(u, b2, alpha, x, spec).value;
    return std::abs(v1 - v2);
}

}  // namespace fracharm
