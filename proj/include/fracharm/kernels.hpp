// SPDX-License-Identifier: Apache-2.0
//! \file kernels.hpp
//! Closed-form constants and kernels: the ball normalization c(n, alpha), the
//! Poisson kernel of a ball, the exterior mean-value kernel and the Riesz kernel.
#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "fracharm/core.hpp"
#include "fracharm/special.hpp"

namespace fracharm {

/*!
 * c(n, alpha) = Gamma(n/2) sin(pi alpha / 2) / pi^{n/2 + 1}.
 *
 * Shared by the Poisson kernel and the mean-value kernel so the two cannot
 * drift apart.
 */
inline double normalization_constant(SpaceDim n, FracOrder alpha)
{
    const double pi = std::numbers::pi;
    const double h = 0.5 * n.as_real();
    return special::gamma(h) * std::sin(0.5 * pi * alpha.value()) / std::pow(pi, h + 1.0);
}

/*!
 * C_{n,alpha} = 2^alpha Gamma((n + alpha)/2) / (pi^{n/2} |Gamma(-alpha/2)|).
 *
 * The constant for which C_{n,alpha} times the principal-value integral has
 * Fourier symbol |xi|^alpha.
 */
inline double fraclap_constant(SpaceDim n, FracOrder alpha)
{
    const double pi = std::numbers::pi;
    const double a = alpha.value();
    return std::pow(2.0, a) * special::gamma(0.5 * (n.as_real() + a))
           / (std::pow(pi, 0.5 * n.as_real()) * std::abs(special::gamma(-0.5 * a)));
}

namespace detail {

//! Kernel core c * (gap / t)^{alpha/2} / d^n with gap = r^2 - |x-c|^2 and t = |y-c|^2 - r^2.
inline double poisson_core(double c, double alpha, std::size_t n, double gap, double t, double d)
{
    return c * std::pow(gap / t, 0.5 * alpha) / std::pow(d, static_cast<double>(n));
}

}  // namespace detail

/*!
 * Poisson kernel of the ball for interior point x and exterior point y.
 *
 * Returns exactly 0 off the support, i.e. when x is not strictly inside the
 * ball or y is not strictly outside it (the sphere itself included).
 */
inline double poisson_kernel(const Ball& ball, FracOrder alpha, const Point& x, const Point& y)
{
    require_same_dim(x, y, "poisson_kernel");
    require_same_dim(x, ball.center(), "poisson_kernel");
    const SpaceDim n(x.dim());
    const double r = ball.radius();
    const double dx = distance(x, ball.center());
    const double dy = distance(y, ball.center());

    if (dx >= r || dy <= r)
        return 0.0;

    const double d = distance(x, y);
    const double gap = (r - dx) * (r + dx);
    const double t = (dy - r) * (dy + r);
    const double v = detail::poisson_core(normalization_constant(n, alpha), alpha.value(), n.value(), gap, t, d);
    if (!std::isfinite(v))
        throw DomainError("poisson_kernel: non-finite value");
    return v;
}

/*!
 * Exterior mean-value kernel epsilon_alpha^{(r)}(x):
 * 0 for |x| < r and c r^alpha / ((|x|^2 - r^2)^{alpha/2} |x|^n) for |x| > r.
 */
inline double mean_value_kernel(FracOrder alpha, double r, const Point& x)
{
    if (!(r > 0.0) || !std::isfinite(r))
        throw InvalidArgument("mean_value_kernel: radius must be positive and finite");
    const SpaceDim n(x.dim());
    const double rho = vec::norm(x.coords());
    if (rho < r)
        return 0.0;
    if (rho == r)
        throw DomainError("mean_value_kernel: |x| == r (kernel is not finite there)");
    const double t = (rho - r) * (rho + r);
    return normalization_constant(n, alpha) * std::pow(r, alpha.value())
           / (std::pow(t, alpha.half()) * std::pow(rho, n.as_real()));
}

/*!
 * Unnormalized Riesz kernel |x - z|^{-(n - alpha)}. Requires n > alpha; the
 * multiplicative constant of the fundamental solution is not included.
 */
inline double riesz_kernel(SpaceDim n, FracOrder alpha, const Point& x, const Point& z)
{
    require_same_dim(x, z, "riesz_kernel");
    if (x.dim() != n.value())
        throw InvalidArgument("riesz_kernel: point dimension does not match n");
    if (!(n.as_real() > alpha.value()))
        throw InvalidArgument("riesz_kernel: requires n > alpha");
    const double d = distance(x, z);
    if (d == 0.0)
        throw DomainError("riesz_kernel: x == z");
    return std::pow(d, -(n.as_real() - alpha.value()));
}

}  // namespace fracharm
