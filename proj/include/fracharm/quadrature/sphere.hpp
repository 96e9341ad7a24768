// SPDX-License-Identifier: Apache-2.0
//! \file sphere.hpp
//! Direction rules: Gauss-Legendre nodes, refinable rules on S^m, and the
//! polar-angle driver that integrates a ray functional over S^{n-1}.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fracharm/core.hpp"
#include "fracharm/quadrature/gauss_kronrod.hpp"
#include "fracharm/quadrature/maps.hpp"

namespace fracharm::quad {

struct NodesWeights {
    std::vector<double> x;
    std::vector<double> w;
};

//! N-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_N.
inline NodesWeights gauss_legendre(std::size_t N)
{
    NodesWeights r;
    r.x.resize(N);
    r.w.resize(N);
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < (N + 1) / 2; ++i)
    {
        double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1.0;
            double p1 = z;
            for (std::size_t k = 2; k <= N; ++k)
            {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            if (N == 1)
                p0 = 1.0;
            const double NN = static_cast<double>(N);
            dp = NN * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // one more derivative evaluation at the converged node
        double p0 = 1.0;
        double p1 = z;
        for (std::size_t k = 2; k <= N; ++k)
        {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        const double NN = static_cast<double>(N);
        dp = (N == 1) ? 1.0 : NN * (z * p1 - p0) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[N - 1 - i] = z;
        r.w[i] = w;
        r.w[N - 1 - i] = w;
    }
    return r;
}

/*!
 * Product rule on S^m in R^{m+1}, flattened: point j occupies
 * pts[j*(m+1) .. j*(m+1)+m]. Level controls resolution.
 *
 * m = 0: the two points +-1. m = 1: trapezoid with 8*2^level points (nested
 * across levels). m >= 2: Gauss-Legendre in the first polar angle times the
 * rule on S^{m-1}.
 */
struct SphereRule {
    std::size_t m = 0;
    std::vector<double> pts;
    std::vector<double> w;

    std::size_t size() const { return w.size(); }
    std::span<const double> point(std::size_t j) const { return std::span(pts).subspan(j * (m + 1), m + 1); }
};

inline SphereRule sphere_rule(std::size_t m, std::size_t level)
{
    SphereRule r;
    r.m = m;
    if (m == 0)
    {
        r.pts = {1.0, -1.0};
        r.w = {1.0, 1.0};
        return r;
    }
    const double pi = std::numbers::pi;
    if (m == 1)
    {
        const std::size_t N = 8u << level;
        r.pts.resize(2 * N);
        r.w.assign(N, 2.0 * pi / static_cast<double>(N));
        for (std::size_t j = 0; j < N; ++j)
        {
            const double phi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(N);
            r.pts[2 * j] = std::cos(phi);
            r.pts[2 * j + 1] = std::sin(phi);
        }
        return r;
    }
    const auto gl = gauss_legendre(3 + 2 * level);
    const auto sub = sphere_rule(m - 1, level);
    for (std::size_t i = 0; i < gl.x.size(); ++i)
    {
        const double psi = 0.5 * pi * (gl.x[i] + 1.0);
        const double wpsi = 0.5 * pi * gl.w[i] * std::pow(std::sin(psi), static_cast<double>(m - 1));
        for (std::size_t j = 0; j < sub.size(); ++j)
        {
            r.pts.push_back(std::cos(psi));
            const auto q = sub.point(j);
            for (double c : q)
                r.pts.push_back(std::sin(psi) * c);
            r.w.push_back(wpsi * sub.w[j]);
        }
    }
    return r;
}

//! Orthonormal basis of R^n whose first vector is the unit vector along axis.
inline std::vector<std::vector<double>> basis_with_axis(std::span<const double> axis)
{
    const std::size_t n = axis.size();
    std::vector<std::vector<double>> e;
    std::vector<double> a(axis.begin(), axis.end());
    const double an = vec::norm(a);
    for (auto& v : a)
        v /= an;
    e.push_back(a);
    for (std::size_t k = 0; k < n && e.size() < n; ++k)
    {
        std::vector<double> v(n, 0.0);
        v[k] = 1.0;
        for (const auto& b : e)
        {
            const double d = vec::dot(v, b);
            for (std::size_t i = 0; i < n; ++i)
                v[i] -= d * b[i];
        }
        const double vn = vec::norm(v);
        if (vn < 1e-8)
            continue;
        for (auto& c : v)
            c /= vn;
        e.push_back(std::move(v));
    }
    return e;
}

//! Polar axis and polar-angle breakpoints (in (0, pi)) chosen for an angular integral.
struct AngularLayout {
    std::vector<double> axis;
    std::vector<double> theta_breaks;
};

struct AngularResult {
    Estimate estimate;
    bool converged = true;
};

/*!
 * Integrate ray(omega) over the unit sphere S^{n-1}, where ray returns an
 * Estimate. For n = 1 this is ray(+1) + ray(-1). For n >= 2 the polar angle
 * about layout.axis is integrated adaptively (breakpoints become kink-mapped
 * panel ends) and each polar slice S^{n-2} is refined by level doubling.
 */
template <class Ray>
AngularResult integrate_over_sphere(Ray&& ray, std::size_t n, const AngularLayout& layout, Tolerance tol, Budget& budget)
{
    AngularResult out;
    if (n == 1)
    {
        const double p = 1.0;
        const double m = -1.0;
        out.estimate = ray(std::span<const double>(&p, 1));
        out.estimate += ray(std::span<const double>(&m, 1));
        return out;
    }

    const auto basis = basis_with_axis(layout.axis);
    const std::size_t m = n - 2;
    const std::size_t max_level = (m == 0) ? 0 : (m == 1 ? 7 : 4);
    std::vector<SphereRule> rules;
    for (std::size_t l = 0; l <= max_level; ++l)
        rules.push_back(sphere_rule(m, l));

    const Tolerance slice_tol{0.1 * tol.abs / std::numbers::pi, 0.1 * tol.rel};

    std::vector<double> omega(n);
    auto direction = [&](double ct, double st, std::span<const double> xi) {
        for (std::size_t i = 0; i < n; ++i)
        {
            double v = ct * basis[0][i];
            for (std::size_t j = 0; j + 1 < n; ++j)
                v += st * xi[j] * basis[j + 1][i];
            omega[i] = v;
        }
        return std::span<const double>(omega);
    };

    // Integral over the polar slice at angle theta, times sin^{n-2}(theta).
    auto slice = [&](double theta) -> Estimate {
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        const double jac = std::pow(st, static_cast<double>(m));

        if (m == 0)
        {
            const auto& rule = rules[0];
            const Estimate up = ray(direction(ct, st, rule.point(0)));
            const Estimate down = ray(direction(ct, st, rule.point(1)));
            return Estimate{jac * (up.value + down.value), jac * (up.error + down.error)};
        }

        double prev = 0.0;
        double result = 0.0;
        double ray_err = 0.0;
        double diff = 0.0;
        std::vector<Estimate> cache;  // circle only: values at the previous level, in order
        for (std::size_t l = 0; l <= max_level; ++l)
        {
            const auto& rule = rules[l];
            std::vector<Estimate> now(rule.size());
            std::vector<double> vals(rule.size());
            double err = 0.0;
            for (std::size_t j = 0; j < rule.size(); ++j)
            {
                if (m == 1 && l > 0 && j % 2 == 0)
                    now[j] = cache[j / 2];
                else
                    now[j] = ray(direction(ct, st, rule.point(j)));
                vals[j] = rule.w[j] * now[j].value;
                err += rule.w[j] * now[j].error;
            }
            cache = std::move(now);
            result = pairwise_sum(vals);
            ray_err = err;
            if (l > 0)
            {
                diff = std::abs(result - prev);
                const double target = std::max(slice_tol.abs, slice_tol.rel * std::abs(result));
                if (diff <= target)
                    break;
            }
            prev = result;
            if (budget.exhausted())
                break;
        }
        return Estimate{jac * result, jac * (diff + ray_err)};
    };

    std::vector<double> cuts{0.0};
    for (double t : layout.theta_breaks)
    {
        if (t > 1e-12 && t < std::numbers::pi - 1e-12)
            cuts.push_back(t);
    }
    cuts.push_back(std::numbers::pi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const std::size_t npieces = cuts.size() - 1;
    std::vector<double> vals;
    double err = 0.0;
    for (std::size_t k = 0; k < npieces; ++k)
    {
        Piece piece{cuts[k], cuts[k + 1]};
        piece.left = (k == 0) ? EndKind::regular : EndKind::kink;
        piece.right = (k + 1 == npieces) ? EndKind::regular : EndKind::kink;
        auto f = [&](double s, double) { return slice(s); };
        auto r = integrate_piece(f, piece, tol.scaled(1.0 / static_cast<double>(npieces), 1.0), budget, 100);
        vals.push_back(r.estimate.value);
        err += r.estimate.error;
        out.converged = out.converged && r.converged;
    }
    out.estimate = Estimate{pairwise_sum(vals), err};
    return out;
}

}  // namespace fracharm::quad
