// SPDX-License-Identifier: Apache-2.0
//! \file maps.hpp
//! One-dimensional pieces with endpoint maps: power maps for integrable edge
//! singularities, cubic maps at kinks, and a logarithmic variable for pieces
//! spanning many scales.
#pragma once

#include <cmath>
#include <type_traits>

#include "fracharm/quadrature/gauss_kronrod.hpp"

namespace fracharm::quad {

enum class EndKind {
    regular,
    kink,  //!< f is continuous but not smooth at the end
    edge,  //!< f ~ (s - a)^{-edge_exponent} at the left end
};

/*!
 * An interval [a, b] of a ray parameter s and how to treat its ends.
 *
 * With log_scale the integration variable is log s (a > 0 required); the end
 * maps then act in that variable. Edge ends are only supported on the left of
 * linear pieces.
 */
struct Piece {
    double a = 0.0;
    double b = 0.0;
    EndKind left = EndKind::regular;
    EndKind right = EndKind::regular;
    double edge_exponent = 0.0;
    bool log_scale = false;
};

namespace detail {

struct MapPoint {
    double s;      //!< parameter value
    double delta;  //!< s - a, computed without cancellation
    double jac;    //!< ds/du
};

inline MapPoint map_piece(const Piece& p, double u)
{
    // phi: [0,1] -> [0,1], with phi(u) the fraction of the transformed range.
    double phi = u;
    double dphi = 1.0;
    switch (p.left)
    {
        case EndKind::edge: {
            const double q = 1.0 / (1.0 - p.edge_exponent);
            phi = std::pow(u, q);
            dphi = q * std::pow(u, q - 1.0);
            break;
        }
        case EndKind::kink:
            phi = u * u * u;
            dphi = 3.0 * u * u;
            break;
        default:
            if (p.right == EndKind::kink)
            {
                const double v = 1.0 - u;
                phi = 1.0 - v * v * v;
                dphi = 3.0 * v * v;
            }
            break;
    }
    if (!p.log_scale)
    {
        const double h = p.b - p.a;
        const double delta = h * phi;
        return {p.a + delta, delta, h * dphi};
    }
    const double za = std::log(p.a);
    const double h = std::log(p.b) - za;
    const double z = h * phi;
    const double s = p.a * std::exp(z);
    return {s, p.a * std::expm1(z), h * dphi * s};
}

}  // namespace detail

namespace detail {

template <class F>
AdaptiveResult integrate_piece_shifted(F& f, const Piece& piece, double shift, Tolerance tol, Budget& budget,
                                       std::size_t max_segments)
{
    if (piece.left != EndKind::regular && piece.right != EndKind::regular)
    {
        const double mid = piece.log_scale ? std::sqrt(piece.a) * std::sqrt(piece.b)
                                           : piece.a + 0.5 * (piece.b - piece.a);
        Piece lp = piece;
        lp.b = mid;
        lp.right = EndKind::regular;
        Piece rp = piece;
        rp.a = mid;
        rp.left = EndKind::regular;
        const auto half = tol.scaled(0.5, 1.0);
        auto l = integrate_piece_shifted(f, lp, shift, half, budget, max_segments);
        auto r = integrate_piece_shifted(f, rp, shift + (mid - piece.a), half, budget, max_segments);
        AdaptiveResult out;
        out.estimate = l.estimate;
        out.estimate += r.estimate;
        out.converged = l.converged && r.converged;
        return out;
    }

    using R = std::invoke_result_t<F&, double, double>;
    auto g = [&f, &piece, shift](double u) -> R {
        const auto mp = map_piece(piece, u);
        if (mp.jac == 0.0)
            return R{};
        if constexpr (std::is_same_v<R, Estimate>)
        {
            const Estimate e = f(mp.s, shift + mp.delta);
            return Estimate{e.value * mp.jac, e.error * std::abs(mp.jac)};
        }
        else
        {
            const double v = f(mp.s, shift + mp.delta);
            return v == 0.0 ? 0.0 : v * mp.jac;
        }
    };
    return adaptive_gk15(g, 0.0, 1.0, tol, budget, max_segments);
}

}  // namespace detail

/*!
 * Integrate f(s, s - a) ds over the piece. f returns double (leaf) or
 * Estimate (nested). Left and right non-regular ends on the same piece are
 * split at the midpoint first.
 */
template <class F>
AdaptiveResult integrate_piece(F& f, const Piece& piece, Tolerance tol, Budget& budget, std::size_t max_segments = 200)
{
    return detail::integrate_piece_shifted(f, piece, 0.0, tol, budget, max_segments);
}

}  // namespace fracharm::quad
