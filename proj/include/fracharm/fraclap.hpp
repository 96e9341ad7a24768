// SPDX-License-Identifier: Apache-2.0
//! \file fraclap.hpp
//! The fractional Laplacian as a principal-value integral, the mean-value
//! deviation (1/r^alpha)[u - eps_r * u], and the convergence study between them.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "fracharm/core.hpp"
#include "fracharm/field.hpp"
#include "fracharm/kernels.hpp"
#include "fracharm/quadrature.hpp"

namespace fracharm {

namespace detail {

inline void require_field_point(const ScalarField& u, const Point& x, const char* what)
{
    if (x.dim() != u.dim().value())
        throw InvalidArgument(std::string(what) + ": point dimension does not match the field");
}

//! |u(x) - u(y)| <= (|u(x)| + K) s^{max(e,0)} for s = |y - x| >= valid; returns (exponent, constant, valid).
inline DecayClass difference_growth(const ScalarField& u, std::span<const double> x, double ux)
{
    const auto g = u.growth_from(x);
    const double e = std::max(g.tail_exponent, 0.0);
    return {e, std::abs(ux) + g.bound_constant, std::max(1.0, g.valid_beyond)};
}

//! Distance from x to the nearest nonsmooth surface of u (infinite when there is none).
inline double distance_to_kinks(const ScalarField& u, std::span<const double> x)
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& reg : u.nonsmooth_surfaces())
    {
        if (auto* h = std::get_if<HalfSpaceRegion>(&reg))
            d = std::min(d, std::abs(x.back() - h->offset));
        else
        {
            const auto& b = std::get<BallRegion>(reg);
            d = std::min(d, std::abs(vec::dist(x, b.center) - b.radius));
        }
    }
    return d;
}

}  // namespace detail

/*!
 * Bare principal-value integral PV int (u(x) - u(y)) / |x - y|^{n + alpha} dy,
 * assembled as the paired core over |y - x| < rho plus the exterior |y - x| > rho.
 *
 * rho is 1, reduced to half the distance to the nearest nonsmooth surface of u
 * when that is closer, so the core never contains a kink.
 */
inline EvalResult pv_integral(const ScalarField& u, const Point& x, FracOrder alpha, const QuadratureSpec& spec)
{
    detail::require_field_point(u, x, "pv_integral");
    if (!u.smooth_at(x))
        throw InvalidArgument("pv_integral: x is outside the field's smooth region");
    if (!u.admissible(alpha))
        throw InvalidArgument("pv_integral: field growth is not admissible for this alpha (need tail exponent < alpha)");
    spec.validate();

    const std::size_t n = x.dim();
    const double a = alpha.value();
    const double nn = static_cast<double>(n);
    const double ux = u(x);

    // The split radius is 1 unless a kink is closer than 2; the core then stays smooth.
    const double split = std::min(1.0, 0.5 * detail::distance_to_kinks(u, x.coords()));
    const EvalResult core = integrate_pv_core(u, x, alpha, split, spec);

    const auto dg = detail::difference_growth(u, x.coords(), ux);
    ExteriorProblem prob{Ball(x, split), x, 0.0, DecayClass{dg.tail_exponent - nn - a, dg.bound_constant, dg.valid_beyond}};
    if (ux == 0.0)
        prob.support = u.support_regions();
    else
        prob.kinks = u.support_regions();
    const auto& extra = u.kinks();
    prob.kinks.insert(prob.kinks.end(), extra.begin(), extra.end());

    auto integrand = [&](const ExteriorSample& smp) {
        const double d = ux - u(smp.y);
        return d == 0.0 ? 0.0 : d * std::pow(smp.s, -nn - a);
    };

    EvalResult outer;
    try
    {
        outer = integrate_exterior(integrand, prob, spec);
    }
    catch (const ConvergenceError& e)
    {
        auto partial = core + e.partial();
        partial.convention = Convention::bare_pv;
        throw ConvergenceError(e.what(), partial);
    }
    EvalResult out = core + outer;
    out.convention = Convention::bare_pv;
    return out;
}

//! C_{n,alpha} times pv_integral.
inline EvalResult frac_laplacian(const ScalarField& u, const Point& x, FracOrder alpha, const QuadratureSpec& spec)
{
    try
    {
        EvalResult r = pv_integral(u, x, alpha, spec).scaled(fraclap_constant(SpaceDim(x.dim()), alpha));
        r.convention = Convention::constant_applied;
        return r;
    }
    catch (const ConvergenceError& e)
    {
        EvalResult p = e.partial().scaled(fraclap_constant(SpaceDim(x.dim()), alpha));
        p.convention = Convention::constant_applied;
        throw ConvergenceError(e.what(), p);
    }
}

/*!
 * (1/r^alpha) [u(x) - (eps_r * u)(x)].
 *
 * By the unit mass of eps_r this is int eps_r(y - x) (u(x) - u(y)) dy / r^alpha;
 * the integrand is paired with the reflection 2x - y so the linear part of u
 * cancels exactly.
 */
inline EvalResult
mean_value_deviation(const ScalarField& u, const Point& x, FracOrder alpha, double r, const QuadratureSpec& spec)
{
    detail::require_field_point(u, x, "mean_value_deviation");
    if (!(r > 0.0) || !std::isfinite(r))
        throw InvalidArgument("mean_value_deviation: radius must be positive and finite");
    if (!u.smooth_at(x) || !(detail::distance_to_kinks(u, x.coords()) > r))
        throw InvalidArgument("mean_value_deviation: B_r(x) must lie in the field's smooth region");
    if (!u.admissible(alpha))
        throw InvalidArgument("mean_value_deviation: field growth is not admissible for this alpha");
    spec.validate();

    const SpaceDim n(x.dim());
    const double nn = n.as_real();
    const double a = alpha.value();
    const double c = normalization_constant(n, alpha);
    const double ux = u(x);
    const auto xc = x.coords();

    const auto dg = detail::difference_growth(u, xc, ux);
    // for s >= 2r: s^2 - r^2 >= (3/4) s^2
    const double m = c * std::pow(4.0 / 3.0, 0.5 * a) * dg.bound_constant * std::pow(r, -a);
    ExteriorProblem prob{Ball(x, r), x, 0.5 * a,
                         DecayClass{dg.tail_exponent - nn - a, m, std::max(dg.valid_beyond, 2.0 * r)}};
    for (const auto& reg : u.nonsmooth_surfaces())
    {
        prob.kinks.push_back(reg);
        prob.kinks.push_back(reflect_through(reg, xc));
    }

    std::vector<double> refl(n.value());
    auto integrand = [&](const ExteriorSample& smp) {
        for (std::size_t i = 0; i < refl.size(); ++i)
            refl[i] = 2.0 * xc[i] - smp.y[i];
        const double d = 0.5 * ((ux - u(smp.y)) + (ux - u(refl)));
        if (d == 0.0)
            return 0.0;
        // c r^alpha / (t^{alpha/2} s^n), divided by r^alpha
        return c * d / (std::pow(smp.t, 0.5 * a) * std::pow(smp.s, nn));
    };
    return integrate_exterior(integrand, prob, spec);
}

//! int eps_r(y) dy over |y| > r; equal to 1.
inline EvalResult mean_value_mass(SpaceDim n, FracOrder alpha, double r, const QuadratureSpec& spec)
{
    if (!(r > 0.0) || !std::isfinite(r))
        throw InvalidArgument("mean_value_mass: radius must be positive and finite");
    const double nn = n.as_real();
    const double a = alpha.value();
    const double c = normalization_constant(n, alpha);
    const double ra = std::pow(r, a);
    const Point origin = Point::zero(n);
    ExteriorProblem prob{Ball(origin, r), origin, 0.5 * a,
                         DecayClass{-nn - a, c * ra * std::pow(4.0 / 3.0, 0.5 * a), 2.0 * r}};
    return integrate_exterior(
        [&](const ExteriorSample& smp) { return c * ra / (std::pow(smp.t, 0.5 * a) * std::pow(smp.s, nn)); }, prob,
        spec);
}

//---------------------------------------------------------------------------//
// Convergence study
//---------------------------------------------------------------------------//

struct StudyRow {
    double parameter = 0.0;
    double value = 0.0;
    double reference = 0.0;
    double abs_error = 0.0;
};

struct ConvergenceReport {
    std::vector<StudyRow> rows;  //!< sorted by parameter, ascending
    double fitted_slope = 0.0;
    double slope_half_width = 0.0;
    bool degenerate = false;  //!< reference indistinguishable from zero or an exact-zero error; no slope fitted
    Convention reference_convention = Convention::none;
};

inline StudyRow make_row(double parameter, double value, double reference)
{
    return {parameter, value, reference, std::abs(value - reference)};
}

//! Sort rows and fit the log-log slope of abs_error against parameter, flagging degenerate data.
inline void finalize_report(ConvergenceReport& rep, bool reference_is_zero)
{
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const StudyRow& a, const StudyRow& b) { return a.parameter < b.parameter; });
    std::vector<std::pair<double, double>> pts;
    bool zero_error = false;
    for (const auto& row : rep.rows)
    {
        pts.emplace_back(row.parameter, row.abs_error);
        zero_error = zero_error || !(row.abs_error > 0.0);
    }
    rep.degenerate = reference_is_zero || zero_error || pts.size() < 4;
    if (rep.degenerate)
    {
        rep.fitted_slope = 0.0;
        rep.slope_half_width = 0.0;
        return;
    }
    const auto fit = fit_slope(pts);
    rep.fitted_slope = fit.slope;
    rep.slope_half_width = fit.half_width;
}

inline void require_geometric_grid(std::span<const double> radii)
{
    if (radii.size() < 4)
        throw InvalidArgument("convergence study: at least 4 radii are required");
    for (double r : radii)
    {
        if (!(r > 0.0) || !std::isfinite(r))
            throw InvalidArgument("convergence study: radii must be positive and finite");
    }
    const double q = radii[1] / radii[0];
    if (!(q < 1.0))
        throw InvalidArgument("convergence study: radii must decrease");
    for (std::size_t i = 1; i < radii.size(); ++i)
    {
        const double qi = radii[i] / radii[i - 1];
        if (std::abs(qi - q) > 1e-9 * q)
            throw InvalidArgument("convergence study: radii must form a geometric sequence");
    }
}

/*!
 * Rows (r, mean_value_deviation(r), c * pv_integral, |difference|) for a
 * decreasing geometric grid of radii, with the fitted slope of the error.
 */
inline ConvergenceReport mv_convergence_study(const ScalarField& u,
                                              const Point& x,
                                              FracOrder alpha,
                                              std::span<const double> radii,
                                              const QuadratureSpec& spec)
{
    require_geometric_grid(radii);
    const double c = normalization_constant(SpaceDim(x.dim()), alpha);
    const EvalResult pv = pv_integral(u, x, alpha, spec);
    const double reference = c * pv.value;

    ConvergenceReport rep;
    rep.reference_convention = Convention::bare_pv;
    for (double r : radii)
    {
        const EvalResult mv = mean_value_deviation(u, x, alpha, r, spec);
        rep.rows.push_back(make_row(r, mv.value, reference));
    }
    const bool zero_ref = std::abs(pv.value) <= 2.0 * pv.error_estimate;
    finalize_report(rep, zero_ref);
    return rep;
}

}  // namespace fracharm
