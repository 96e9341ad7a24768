// SPDX-License-Identifier: Apache-2.0
//! \file quadrature.hpp
//! Integration engine for exterior-of-ball integrals with an edge singularity,
//! punctured-ball principal-value cores, and log-log slope fitting.
//!
//! Every integral is written in polar coordinates about a pole and computed
//! ray by ray: each ray is cut at the surfaces where the integrand is not
//! smooth, each piece gets an endpoint map, and the directions are integrated
//! adaptively in the polar angle.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "fracharm/core.hpp"
#include "fracharm/field.hpp"
#include "fracharm/quadrature/gauss_kronrod.hpp"
#include "fracharm/quadrature/maps.hpp"
#include "fracharm/quadrature/sphere.hpp"

namespace fracharm {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    std::size_t max_evals = 20'000'000;
    double tail_safety = 1.0;

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !std::isfinite(rel_tol) || !std::isfinite(abs_tol))
            throw InvalidArgument("QuadratureSpec: rel_tol and abs_tol must be positive and finite");
        if (max_evals < 1000)
            throw InvalidArgument("QuadratureSpec: max_evals must be at least 1000");
        if (!(tail_safety >= 1.0) || !std::isfinite(tail_safety))
            throw InvalidArgument("QuadratureSpec: tail_safety must be >= 1");
    }

    quad::Tolerance tolerance() const { return {abs_tol, rel_tol}; }
};

//! f(y) ~ |y - z|^{-order} near z, with order < n.
struct PointSingularity {
    Point z;
    double order = 0.0;
};

/*!
 * An integral of f over {|y - c| > r}, written in polar coordinates about an
 * interior pole.
 *
 * Near the sphere f may blow up like t^{-edge_exponent}, t = |y-c|^2 - r^2.
 * decay bounds |f(y)| <= M |y - pole|^q for |y - pole| >= valid_beyond; q < -n
 * is required so the tail converges. f vanishes outside the intersection of
 * the support regions and is smooth away from the kink surfaces.
 */
struct ExteriorProblem {
    Ball ball;
    Point pole;
    double edge_exponent = 0.0;
    DecayClass decay;
    std::vector<Region> support = {};
    std::vector<Region> kinks = {};
    std::optional<PointSingularity> singularity = std::nullopt;
};

/*!
 * What the integrand sees: the point, t = |y-c|^2 - r^2 computed without
 * cancellation, |y - pole|, and (with a point singularity) |y - z| taken from
 * the polar radius about z where that is more accurate than from y.
 */
struct ExteriorSample {
    std::span<const double> y;
    double t;
    double s;
    double dz = 0.0;
};

namespace quad {

struct TailCut {
    double radius;
    double remainder;  //!< bound on the discarded integral
};

/*!
 * Truncation radius S with M |S^{n-1}| S^{q+n} / (-q-n) <= abs_tol / 2,
 * enlarged to at least min_radius and valid_beyond and then multiplied by safety.
 */
inline TailCut tail_truncation(const DecayClass& d, std::size_t n, double abs_tol, double safety, double min_radius)
{
    const double q = d.tail_exponent;
    const double nn = static_cast<double>(n);
    const double area = unit_sphere_area(n);
    double s0 = 0.0;
    if (d.bound_constant > 0.0)
        s0 = std::pow(abs_tol * (-q - nn) / (2.0 * d.bound_constant * area), 1.0 / (q + nn));
    const double radius = std::max({s0, d.valid_beyond, min_radius}) * safety;
    const double rem = d.bound_constant > 0.0 ? d.bound_constant * area * std::pow(radius, q + nn) / (-q - nn) : 0.0;
    return {radius, rem};
}

/*!
 * Cut [start, end] at the sorted crossings and keep the intervals whose
 * midpoint satisfies inside. The first interval gets an edge map when
 * edge_exponent > 0 (split off at 2 start when the interval is long), interior
 * cuts get kink maps, and long intervals switch to the log variable.
 */
template <class Inside>
std::vector<Piece> build_ray_pieces(double start,
                                    double edge_exponent,
                                    std::vector<double>& cuts,
                                    double end,
                                    Inside&& inside)
{
    std::sort(cuts.begin(), cuts.end());
    constexpr double coincide = 1e-10;
    std::vector<double> pts{start};
    bool kink_at_start = false;
    bool kink_at_end = false;
    for (double c : cuts)
    {
        if (std::abs(c - start) <= coincide * std::max(start, c))
            kink_at_start = true;
        else if (std::abs(c - end) <= coincide * end)
            kink_at_end = true;
        else if (c > start && c < end && c > pts.back() * (1.0 + 1e-13))
            pts.push_back(c);
    }
    pts.push_back(end);

    std::vector<Piece> out;
    const std::size_t last = pts.size() - 2;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    {
        const double a = pts[i];
        const double b = pts[i + 1];
        if (!(b > a) || !inside(a + 0.5 * (b - a)))
            continue;
        Piece p{a, b};
        p.left = EndKind::kink;
        if (i == 0)
            p.left = edge_exponent != 0.0 ? EndKind::edge : (kink_at_start ? EndKind::kink : EndKind::regular);
        p.right = (i < last || kink_at_end) ? EndKind::kink : EndKind::regular;
        p.edge_exponent = edge_exponent;
        if (p.left == EndKind::edge && a > 0.0 && b > 2.0 * a)
        {
            Piece e{a, 2.0 * a, EndKind::edge, EndKind::regular, edge_exponent};
            out.push_back(e);
            p.a = 2.0 * a;
            p.left = EndKind::regular;
        }
        if (p.left != EndKind::edge && p.a > 0.0 && p.b > 8.0 * p.a)
            p.log_scale = true;
        out.push_back(p);
    }
    return out;
}

inline double polar_angle_of_cone(double radius, double dist) { return std::asin(std::min(1.0, radius / dist)); }

//! Axis and polar-angle breakpoints for an exterior problem.
inline AngularLayout exterior_layout(const ExteriorProblem& prob, const std::vector<Region>& surfaces, double excl_radius)
{
    const std::size_t n = prob.pole.dim();
    AngularLayout lay;
    const auto p = prob.pole.coords();
    for (const auto& r : surfaces)
    {
        if (std::holds_alternative<HalfSpaceRegion>(r))
        {
            lay.axis.assign(n, 0.0);
            lay.axis.back() = 1.0;
            lay.theta_breaks = {0.5 * std::numbers::pi};
            return lay;
        }
    }
    if (prob.singularity)
    {
        const auto z = prob.singularity->z.coords();
        lay.axis.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            lay.axis[i] = z[i] - p[i];
        lay.theta_breaks = {polar_angle_of_cone(excl_radius, vec::norm(lay.axis))};
        return lay;
    }
    for (const auto& r : surfaces)
    {
        const auto& b = std::get<BallRegion>(r);
        const double d = vec::dist(p, b.center);
        if (d > b.radius)
        {
            lay.axis.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                lay.axis[i] = b.center[i] - p[i];
            lay.theta_breaks = {polar_angle_of_cone(b.radius, d)};
            return lay;
        }
    }
    const auto c = prob.ball.center().coords();
    if (vec::dist(p, c) > 0.0)
    {
        lay.axis.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            lay.axis[i] = p[i] - c[i];
        return lay;
    }
    lay.axis.assign(n, 0.0);
    lay.axis.back() = 1.0;
    return lay;
}

}  // namespace quad

/*!
 * Integrate f over the exterior of prob.ball; f takes an ExteriorSample.
 *
 * Throws InvalidArgument before any evaluation for an invalid spec, a pole
 * that is not strictly interior or an inadmissible decay bound, and
 * ConvergenceError (with the partial result) when the evaluation budget runs
 * out.
 */
template <class F>
EvalResult integrate_exterior(F&& f, const ExteriorProblem& prob, const QuadratureSpec& spec)
{
    spec.validate();
    const std::size_t n = prob.pole.dim();
    require_same_dim(prob.pole, prob.ball.center(), "integrate_exterior");
    if (!prob.ball.strictly_contains(prob.pole.coords()))
        throw InvalidArgument("integrate_exterior: pole must lie strictly inside the ball");
    if (!(prob.edge_exponent >= 0.0 && prob.edge_exponent < 1.0))
        throw InvalidArgument("integrate_exterior: edge exponent must lie in [0, 1)");
    const double nn = static_cast<double>(n);
    if (!(prob.decay.tail_exponent < -nn) || !(prob.decay.bound_constant >= 0.0)
        || !std::isfinite(prob.decay.bound_constant))
        throw InvalidArgument("integrate_exterior: inadmissible decay class (need tail exponent < -n, M >= 0)");
    if (prob.singularity)
    {
        require_same_dim(prob.singularity->z, prob.pole, "integrate_exterior");
        if (!(prob.singularity->order < nn))
            throw InvalidArgument("integrate_exterior: point singularity must be integrable (order < n)");
    }

    const auto c = prob.ball.center().coords();
    const auto p = prob.pole.coords();
    const double r = prob.ball.radius();
    const double pc = vec::dist(p, c);
    const double gap = (r - pc) * (r + pc);
    const auto tol = spec.tolerance();
    quad::Budget budget(spec.max_evals);

    const auto tail = quad::tail_truncation(prob.decay, n, spec.abs_tol, spec.tail_safety, 2.0 * (pc + r));

    std::vector<Region> surfaces = prob.support;
    surfaces.insert(surfaces.end(), prob.kinks.begin(), prob.kinks.end());

    double excl = 0.0;
    std::vector<Region> support = prob.support;
    std::vector<double> zc;
    if (prob.singularity)
    {
        zc.assign(prob.singularity->z.coords().begin(), prob.singularity->z.coords().end());
        const double zd = vec::dist(zc, c);
        if (!(zd > r))
            throw InvalidArgument("integrate_exterior: point singularity must lie outside the ball");
        excl = 0.25 * std::min(zd - r, vec::dist(zc, p));
        support.push_back(BallRegion{zc, excl, false});
    }
    std::vector<Region> cut_surfaces = support;
    cut_surfaces.insert(cut_surfaces.end(), prob.kinks.begin(), prob.kinks.end());

    const double ray_abs = 0.1 * spec.abs_tol / unit_sphere_area(n);
    std::vector<double> y(n);
    std::vector<double> cuts;

    auto inside_all = [&](std::span<const double> pt) {
        for (const auto& reg : support)
        {
            if (!region_contains(reg, pt))
                return false;
        }
        return true;
    };

    auto ray = [&](std::span<const double> w) -> quad::Estimate {
        double beta = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            beta += (p[i] - c[i]) * w[i];
        const double sq = std::sqrt(beta * beta + gap);
        const double s_star = beta > 0.0 ? gap / (beta + sq) : sq - beta;
        const double s_minus = beta > 0.0 ? beta + sq : gap / (sq - beta);

        cuts.clear();
        for (const auto& reg : cut_surfaces)
            boundary_crossings(reg, p, w, cuts);

        auto inside = [&](double s) {
            for (std::size_t i = 0; i < n; ++i)
                y[i] = p[i] + s * w[i];
            return inside_all(y);
        };
        auto pieces = quad::build_ray_pieces(s_star, prob.edge_exponent, cuts, tail.radius, inside);

        quad::Estimate total;
        if (pieces.empty())
            return total;
        const quad::Tolerance ptol{ray_abs / static_cast<double>(pieces.size()), 0.1 * tol.rel};
        double offset = 0.0;
        auto h = [&](double s, double d) -> double {
            for (std::size_t i = 0; i < n; ++i)
                y[i] = p[i] + s * w[i];
            const double delta = offset + d;
            const double t = delta * (delta + s_star + s_minus);
            const double v = f(ExteriorSample{y, t, s, zc.empty() ? 0.0 : vec::dist(y, zc)});
            return v == 0.0 ? 0.0 : v * std::pow(s, nn - 1.0);
        };
        for (const auto& piece : pieces)
        {
            offset = piece.a - s_star;
            auto res = quad::integrate_piece(h, piece, ptol, budget);
            total += res.estimate;
        }
        return total;
    };

    const auto layout = quad::exterior_layout(prob, surfaces, excl);
    auto outer = quad::integrate_over_sphere(ray, n, layout, tol, budget);
    quad::Estimate est = outer.estimate;
    est.error += tail.remainder;
    bool converged = outer.converged;

    if (prob.singularity)
    {
        // Ball around z in polar coordinates centred at z.
        const double order = prob.singularity->order;
        const double gamma = order - (nn - 1.0);
        auto zray = [&](std::span<const double> w) -> quad::Estimate {
            auto h = [&](double rho, double) -> double {
                for (std::size_t i = 0; i < n; ++i)
                    y[i] = zc[i] + rho * w[i];
                const double dc = vec::dist(y, c);
                const double t = (dc - r) * (dc + r);
                const double v = f(ExteriorSample{y, t, vec::dist(y, p), rho});
                return v == 0.0 ? 0.0 : v * std::pow(rho, nn - 1.0);
            };
            quad::Piece piece{0.0, excl};
            if (gamma > 0.0)
            {
                piece.left = quad::EndKind::edge;
                piece.edge_exponent = gamma;
            }
            return quad::integrate_piece(h, piece, quad::Tolerance{ray_abs, 0.1 * tol.rel}, budget).estimate;
        };
        quad::AngularLayout zl;
        zl.axis.assign(n, 0.0);
        zl.axis.back() = 1.0;
        auto inner = quad::integrate_over_sphere(zray, n, zl, tol, budget);
        est += inner.estimate;
        converged = converged && inner.converged;
    }

    EvalResult result{est.value, est.error, budget.used(), Convention::none};
    if (budget.exhausted())
    {
        throw ConvergenceError("integrate_exterior: evaluation budget of " + std::to_string(spec.max_evals)
                                   + " exhausted before reaching tolerance",
                               result);
    }
    if (!converged && est.error > tol.target(est.value))
        throw ConvergenceError("integrate_exterior: adaptive refinement limit reached before tolerance", result);
    return result;
}

/*!
 * Integral of (u(x) - u(y)) / |y - x|^{n + alpha} over 0 < |y - x| < inner_radius.
 *
 * Each direction is paired with its antipode, so the ray integrand is
 * (2u(x) - u(x + s w) - u(x - s w)) s^{-1-alpha} / 2, which is O(s^{1-alpha}).
 * Below s_min (a thousandth of the local smoothness scale) the second
 * difference quotient D/s^2 is replaced by its linear-in-s^2 interpolant
 * through s_min and 2 s_min and integrated in closed form; cancellation in D
 * grows like s^{-2} and would otherwise dominate for alpha near 2. The
 * resulting roundoff floor is included in the error estimate.
 */
inline EvalResult integrate_pv_core(const ScalarField& u,
                                    const Point& x,
                                    FracOrder alpha,
                                    double inner_radius,
                                    const QuadratureSpec& spec)
{
    spec.validate();
    if (!(inner_radius > 0.0) || !std::isfinite(inner_radius))
        throw InvalidArgument("integrate_pv_core: inner radius must be positive and finite");
    if (x.dim() != u.dim().value())
        throw InvalidArgument("integrate_pv_core: point dimension does not match the field");
    if (!u.smooth_at(x))
        throw InvalidArgument("integrate_pv_core: field is not flagged smooth at x");

    const std::size_t n = x.dim();
    const double a = alpha.value();
    const auto xc = x.coords();
    const double u0 = u(x);
    quad::Budget budget(spec.max_evals);
    const auto tol = spec.tolerance();
    const auto surfaces = u.nonsmooth_surfaces();

    std::vector<double> yp(n);
    std::vector<double> ym(n);
    std::vector<double> neg(n);
    std::vector<double> cuts;

    auto second_difference = [&](std::span<const double> w, double s) {
        for (std::size_t i = 0; i < n; ++i)
        {
            yp[i] = xc[i] + s * w[i];
            ym[i] = xc[i] - s * w[i];
        }
        return (u0 - u(yp)) + (u0 - u(ym));
    };

    const double ray_abs = 0.1 * spec.abs_tol / unit_sphere_area(n);
    auto ray = [&](std::span<const double> w) -> quad::Estimate {
        cuts.clear();
        for (std::size_t i = 0; i < n; ++i)
            neg[i] = -w[i];
        for (const auto& reg : surfaces)
        {
            boundary_crossings(reg, xc, w, cuts);
            boundary_crossings(reg, xc, neg, cuts);
        }
        double first = inner_radius;
        for (double s : cuts)
            first = std::min(first, s);
        const double s_min = 1e-3 * first;

        quad::Estimate total;
        if (!budget.try_consume(4))
            return total;
        // Q(s) = D(s)/s^2 ~ q1 + (q2 - q1)(s^2 - s1^2)/(s2^2 - s1^2), integrated against s^{1-alpha} on [0, s1]
        const double s1 = s_min;
        const double s2 = 2.0 * s_min;
        const double q1 = second_difference(w, s1) / (s1 * s1);
        const double q2 = second_difference(w, s2) / (s2 * s2);
        const double slope = (q2 - q1) / (s2 * s2 - s1 * s1);
        const double m0 = std::pow(s1, 2.0 - a) / (2.0 - a);
        const double m2 = std::pow(s1, 4.0 - a) / (4.0 - a);
        total.value = 0.5 * ((q1 - slope * s1 * s1) * m0 + slope * m2);
        // roundoff in D is about 4 eps |u|; its effect on [s1, inf) and on the interpolant
        total.error = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(u0) + 1e-300) * std::pow(s1, -a) / a;

        auto pieces = quad::build_ray_pieces(s_min, 0.0, cuts, inner_radius, [](double) { return true; });
        const quad::Tolerance ptol{ray_abs / static_cast<double>(std::max<std::size_t>(1, pieces.size())),
                                   0.1 * tol.rel};
        auto h = [&](double s, double) -> double {
            const double d = second_difference(w, s);
            return d == 0.0 ? 0.0 : 0.5 * d * std::pow(s, -1.0 - a);
        };
        for (const auto& piece : pieces)
            total += quad::integrate_piece(h, piece, ptol, budget).estimate;
        return total;
    };

    quad::AngularLayout layout;
    layout.axis.assign(n, 0.0);
    layout.axis.back() = 1.0;
    bool placed = false;
    for (const auto& reg : surfaces)
    {
        if (auto* hs = std::get_if<HalfSpaceRegion>(&reg))
        {
            const double d = std::abs(xc.back() - hs->offset);
            if (d < inner_radius)
            {
                const double th = std::acos(d / inner_radius);
                layout.theta_breaks = {th, std::numbers::pi - th};
            }
            placed = true;
            break;
        }
    }
    if (!placed)
    {
        for (const auto& reg : surfaces)
        {
            const auto& b = std::get<BallRegion>(reg);
            const double d = vec::dist(xc, b.center);
            if (d > b.radius)
            {
                for (std::size_t i = 0; i < n; ++i)
                    layout.axis[i] = b.center[i] - xc[i];
                layout.theta_breaks = {quad::polar_angle_of_cone(b.radius, d)};
                break;
            }
        }
    }

    auto res = quad::integrate_over_sphere(ray, n, layout, tol, budget);
    EvalResult result{res.estimate.value, res.estimate.error, budget.used(), Convention::bare_pv};
    if (budget.exhausted())
    {
        throw ConvergenceError("integrate_pv_core: evaluation budget of " + std::to_string(spec.max_evals)
                                   + " exhausted before reaching tolerance",
                               result);
    }
    if (!res.converged && res.estimate.error > tol.target(res.estimate.value))
        throw ConvergenceError("integrate_pv_core: adaptive refinement limit reached before tolerance", result);
    return result;
}

//---------------------------------------------------------------------------//
// Slope fitting
//---------------------------------------------------------------------------//

struct SlopeFit {
    double slope = 0.0;
    double half_width = 0.0;  //!< symmetric 95% half-width
    double intercept = 0.0;
};

/*!
 * Ordinary least squares of log e against log h. The half-width is the 97.5%
 * Student t quantile with N - 2 degrees of freedom times the slope's standard
 * error.
 */
inline SlopeFit fit_slope(std::span<const std::pair<double, double>> rows)
{
    if (rows.size() < 4)
        throw InvalidArgument("fit_slope: at least 4 rows are required");
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& [h, e] : rows)
    {
        if (!(h > 0.0) || !(e > 0.0) || !std::isfinite(h) || !std::isfinite(e))
            throw InvalidArgument("fit_slope: parameters and errors must be positive and finite");
        lx.push_back(std::log(h));
        ly.push_back(std::log(e));
    }
    const double N = static_cast<double>(rows.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        mx += lx[i];
        my += ly[i];
    }
    mx /= N;
    my /= N;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0))
        throw InvalidArgument("fit_slope: parameters must not all be equal");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        const double res = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ssr += res * res;
    }
    const double se = std::sqrt(ssr / (N - 2.0) / sxx);
    const boost::math::students_t dist(N - 2.0);
    fit.half_width = boost::math::quantile(dist, 0.975) * se;
    return fit;
}

inline SlopeFit fit_slope(const std::vector<std::pair<double, double>>& rows)
{
    return fit_slope(std::span<const std::pair<double, double>>(rows));
}

}  // namespace fracharm
