// SPDX-License-Identifier: Apache-2.0
//! \file field.hpp
//! Scalar fields on R^n with support, smoothness and growth metadata, and the
//! simple regions (half-spaces, balls) used to describe supports and kinks.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracharm/core.hpp"

namespace fracharm {

//---------------------------------------------------------------------------//
// Growth bound
//---------------------------------------------------------------------------//

/*!
 * Guaranteed growth bound |u(y)| <= bound_constant * (1 + |y - o|)^tail_exponent.
 *
 * For fields the reference point o is the origin; the field is in L_alpha
 * whenever tail_exponent < alpha. Integrands handed to the quadrature engine
 * reuse the type with o the ray pole and the bound only required beyond
 * valid_beyond.
 */
struct DecayClass {
    double tail_exponent = 0.0;
    double bound_constant = 0.0;
    double valid_beyond = 0.0;

    bool admissible(FracOrder alpha) const noexcept { return tail_exponent < alpha.value(); }
};

//---------------------------------------------------------------------------//
// Regions
//---------------------------------------------------------------------------//

//! {y_n > offset} when upper, {y_n < offset} otherwise. The normal is always the last axis.
struct HalfSpaceRegion {
    double offset = 0.0;
    bool upper = true;
};

//! Open ball (inside) or the open exterior of a ball (!inside).
struct BallRegion {
    std::vector<double> center;
    double radius = 1.0;
    bool inside = true;
};

using Region = std::variant<HalfSpaceRegion, BallRegion>;

inline bool region_contains(const Region& region, std::span<const double> y)
{
    if (auto* h = std::get_if<HalfSpaceRegion>(&region))
        return h->upper ? y.back() > h->offset : y.back() < h->offset;
    const auto& b = std::get<BallRegion>(region);
    const double d2 = vec::dist2(y, b.center);
    const double r2 = b.radius * b.radius;
    return b.inside ? d2 < r2 : d2 > r2;
}

//! Image of the region under the point reflection y -> 2x - y.
inline Region reflect_through(const Region& region, std::span<const double> x)
{
    if (auto* h = std::get_if<HalfSpaceRegion>(&region))
        return HalfSpaceRegion{2.0 * x.back() - h->offset, !h->upper};
    const auto& b = std::get<BallRegion>(region);
    BallRegion out = b;
    for (std::size_t i = 0; i < x.size(); ++i)
        out.center[i] = 2.0 * x[i] - b.center[i];
    return out;
}

/*!
 * Append the parameters s > 0 at which p + s w crosses the region boundary.
 * Tangential touches are skipped.
 */
inline void boundary_crossings(const Region& region,
                               std::span<const double> p,
                               std::span<const double> w,
                               std::vector<double>& out)
{
    if (auto* h = std::get_if<HalfSpaceRegion>(&region))
    {
        const double wn = w.back();
        if (wn == 0.0)
            return;
        const double s = (h->offset - p.back()) / wn;
        if (s > 0.0 && std::isfinite(s))
            out.push_back(s);
        return;
    }
    const auto& b = std::get<BallRegion>(region);
    // |p - c + s w|^2 = R^2  ->  s^2 + 2 beta s + (|p - c|^2 - R^2) = 0
    double beta = 0.0;
    double pc2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        const double d = p[i] - b.center[i];
        beta += d * w[i];
        pc2 += d * d;
    }
    const double pc = std::sqrt(pc2);
    const double q = (pc - b.radius) * (pc + b.radius);
    const double disc = beta * beta - q;
    if (disc <= 0.0)
        return;
    const double sq = std::sqrt(disc);
    // stable roots of s^2 + 2 beta s + q
    const double big = (beta >= 0.0) ? -(beta + sq) : (-beta + sq);
    const double small = (big != 0.0) ? q / big : 0.0;
    for (double s : {small, big})
    {
        if (s > 0.0 && std::isfinite(s))
            out.push_back(s);
    }
}

//---------------------------------------------------------------------------//
// ScalarField
//---------------------------------------------------------------------------//

enum class SupportKind { all_space, upper_half_space, exterior_of_ball, compact };

inline const char* to_string(SupportKind k)
{
    switch (k)
    {
        case SupportKind::upper_half_space: return "upper-half-space";
        case SupportKind::exterior_of_ball: return "exterior-of-ball";
        case SupportKind::compact: return "compact";
        default: return "all-space";
    }
}

struct Support {
    SupportKind kind = SupportKind::all_space;
    std::optional<Ball> ball;  //!< for exterior_of_ball and compact
};

/*!
 * A real function of an n-point with support, smoothness and decay metadata.
 *
 * Evaluation outside the declared support returns exactly 0 regardless of the
 * wrapped function. Kinks list extra surfaces across which the field is not
 * smooth; the support boundary is always treated as one.
 */
class ScalarField {
  public:
    using Eval = std::function<double(std::span<const double>)>;
    using Predicate = std::function<bool(std::span<const double>)>;

    ScalarField(SpaceDim dim,
                Eval eval,
                Support support,
                DecayClass decay,
                Predicate smooth_at = {},
                std::vector<Region> kinks = {})
        : dim_(dim), eval_(std::move(eval)), support_(std::move(support)), decay_(decay),
          smooth_(std::move(smooth_at)), kinks_(std::move(kinks))
    {
        if (!eval_)
            throw InvalidArgument("ScalarField: empty evaluation function");
        const bool needs_ball =
            support_.kind == SupportKind::exterior_of_ball || support_.kind == SupportKind::compact;
        if (needs_ball && (!support_.ball || support_.ball->dim() != dim_.value()))
            throw InvalidArgument("ScalarField: support ball missing or of wrong dimension");
    }

    SpaceDim dim() const noexcept { return dim_; }
    const Support& support() const noexcept { return support_; }
    const DecayClass& decay() const noexcept { return decay_; }
    const std::vector<Region>& kinks() const noexcept { return kinks_; }

    double operator()(std::span<const double> y) const { return in_support(y) ? eval_(y) : 0.0; }
    double operator()(const Point& y) const { return (*this)(y.coords()); }

    bool in_support(std::span<const double> y) const
    {
        for (const auto& r : support_regions())
        {
            if (!region_contains(r, y))
                return false;
        }
        return true;
    }

    //! Where the field is twice differentiable. Defaults to the open support.
    bool smooth_at(std::span<const double> y) const { return smooth_ ? smooth_(y) : in_support(y); }
    bool smooth_at(const Point& y) const { return smooth_at(y.coords()); }

    bool admissible(FracOrder alpha) const noexcept { return decay_.admissible(alpha); }

    std::vector<Region> support_regions() const
    {
        switch (support_.kind)
        {
            case SupportKind::upper_half_space: return {HalfSpaceRegion{0.0, true}};
            case SupportKind::exterior_of_ball:
                return {BallRegion{std::vector<double>(support_.ball->center().coords().begin(),
                                                       support_.ball->center().coords().end()),
                                   support_.ball->radius(), false}};
            case SupportKind::compact:
                return {BallRegion{std::vector<double>(support_.ball->center().coords().begin(),
                                                       support_.ball->center().coords().end()),
                                   support_.ball->radius(), true}};
            default: return {};
        }
    }

    //! Support boundary plus declared kinks.
    std::vector<Region> nonsmooth_surfaces() const
    {
        auto out = support_regions();
        out.insert(out.end(), kinks_.begin(), kinks_.end());
        return out;
    }

    /*!
     * |u(y)| <= K s^p for s = |y - pole| >= valid, derived from the decay class.
     * Used to build tail bounds of integrands centred at pole.
     */
    DecayClass growth_from(std::span<const double> pole) const
    {
        const double e = decay_.tail_exponent;
        const double m = decay_.bound_constant;
        const double pn = vec::norm(pole);
        if (e >= 0.0)
            return {e, m * std::pow(2.0, e), 1.0 + pn};
        return {e, m * std::pow(1.0 + pn, -e), 0.0};
    }

  private:
    SpaceDim dim_;
    Eval eval_;
    Support support_;
    DecayClass decay_;
    Predicate smooth_;
    std::vector<Region> kinks_;
};

//! Checks on sample points that the raw evaluation path respects the declared support.
inline bool support_respected(const ScalarField& u, std::span<const Point> samples)
{
    for (const auto& y : samples)
    {
        if (!u.in_support(y.coords()) && u(y) != 0.0)
            return false;
    }
    return true;
}

//---------------------------------------------------------------------------//
// Stock fields
//---------------------------------------------------------------------------//

namespace fields {

inline ScalarField constant(SpaceDim n, double value)
{
    return ScalarField(n, [value](std::span<const double>) { return value; }, Support{},
                       DecayClass{0.0, std::abs(value)}, [](std::span<const double>) { return true; });
}

//! amplitude * exp(-|y - center|^2 / width^2)
inline ScalarField gaussian(const Point& center, double width = 1.0, double amplitude = 1.0)
{
    if (!(width > 0.0))
        throw InvalidArgument("gaussian: width must be positive");
    const SpaceDim n(center.dim());
    std::vector<double> c(center.coords().begin(), center.coords().end());
    const double inv = 1.0 / (width * width);
    return ScalarField(
        n,
        [c, inv, amplitude](std::span<const double> y) { return amplitude * std::exp(-vec::dist2(y, c) * inv); },
        Support{}, DecayClass{0.0, std::abs(amplitude)}, [](std::span<const double>) { return true; });
}

//! Smooth bump amplitude * exp(1 - 1/(1 - |y - a|^2/R^2)) supported in B_R(a).
inline ScalarField bump(const Ball& ball, double amplitude = 1.0)
{
    const SpaceDim n(ball.dim());
    std::vector<double> c(ball.center().coords().begin(), ball.center().coords().end());
    const double r2 = ball.radius() * ball.radius();
    return ScalarField(
        n,
        [c, r2, amplitude](std::span<const double> y) {
            const double q = vec::dist2(y, c) / r2;
            return q < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
        },
        Support{SupportKind::compact, ball}, DecayClass{0.0, std::abs(amplitude)},
        [](std::span<const double>) { return true; });
}

//! Pointwise a*u + b*v; support is the union so it is declared all-space.
inline ScalarField linear_combination(double a, const ScalarField& u, double b, const ScalarField& v)
{
    if (u.dim() != v.dim())
        throw InvalidArgument("linear_combination: dimension mismatch");
    const auto& du = u.decay();
    const auto& dv = v.decay();
    DecayClass d{std::max(du.tail_exponent, dv.tail_exponent),
                 std::abs(a) * du.bound_constant + std::abs(b) * dv.bound_constant};
    std::vector<Region> kinks = u.nonsmooth_surfaces();
    auto vk = v.nonsmooth_surfaces();
    kinks.insert(kinks.end(), vk.begin(), vk.end());
    return ScalarField(
        u.dim(), [u, v, a, b](std::span<const double> y) { return a * u(y) + b * v(y); }, Support{}, d,
        [u, v](std::span<const double> y) { return u.smooth_at(y) && v.smooth_at(y); }, std::move(kinks));
}

//! y -> u(y - shift)
inline ScalarField translated(const ScalarField& u, const Point& shift)
{
    std::vector<double> a(shift.coords().begin(), shift.coords().end());
    const double an = vec::norm(a);
    const auto& d = u.decay();
    // (1 + |y - a|)^e <= (1 + |a|)^{|e|} (1 + |y|)^e
    DecayClass dc{d.tail_exponent, d.bound_constant * std::pow(1.0 + an, std::abs(d.tail_exponent))};
    auto shifted = [a](std::span<const double> y) {
        std::vector<double> z(y.begin(), y.end());
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] -= a[i];
        return z;
    };
    std::vector<Region> kinks;
    for (auto r : u.nonsmooth_surfaces())
    {
        if (auto* h = std::get_if<HalfSpaceRegion>(&r))
            h->offset += a.back();
        else
        {
            auto& b = std::get<BallRegion>(r);
            for (std::size_t i = 0; i < a.size(); ++i)
                b.center[i] += a[i];
        }
        kinks.push_back(r);
    }
    return ScalarField(
        u.dim(), [u, shifted](std::span<const double> y) { return u(shifted(y)); }, Support{}, dc,
        [u, shifted](std::span<const double> y) { return u.smooth_at(shifted(y)); }, std::move(kinks));
}

//! y -> u(lambda y), lambda > 0
inline ScalarField dilated(const ScalarField& u, double lambda)
{
    if (!(lambda > 0.0))
        throw InvalidArgument("dilated: lambda must be positive");
    const auto& d = u.decay();
    // (1 + lambda|y|)^e <= max(1, lambda)^{|e|} (1 + |y|)^e for either sign of e
    DecayClass dc{d.tail_exponent,
                  d.bound_constant * std::pow(std::max(1.0, std::max(lambda, 1.0 / lambda)), std::abs(d.tail_exponent))};
    auto scaled = [lambda](std::span<const double> y) {
        std::vector<double> z(y.begin(), y.end());
        for (auto& v : z)
            v *= lambda;
        return z;
    };
    std::vector<Region> kinks;
    for (auto r : u.nonsmooth_surfaces())
    {
        if (auto* h = std::get_if<HalfSpaceRegion>(&r))
            h->offset /= lambda;
        else
        {
            auto& b = std::get<BallRegion>(r);
            for (auto& c : b.center)
                c /= lambda;
            b.radius /= lambda;
        }
        kinks.push_back(r);
    }
    return ScalarField(
        u.dim(), [u, scaled](std::span<const double> y) { return u(scaled(y)); }, Support{}, dc,
        [u, scaled](std::span<const double> y) { return u.smooth_at(scaled(y)); }, std::move(kinks));
}

}  // namespace fields

}  // namespace fracharm
