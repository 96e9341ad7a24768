// SPDX-License-Identifier: Apache-2.0
//! \file gauss_kronrod.hpp
//! Globally adaptive 7/15-point Gauss-Kronrod integration on [a, b] with a
//! shared evaluation budget and deterministic summation.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <type_traits>
#include <vector>

#include "fracharm/core.hpp"

namespace fracharm::quad {

//! A value with an error bar, returned by nested integration stages.
struct Estimate {
    double value = 0.0;
    double error = 0.0;

    Estimate& operator+=(const Estimate& o)
    {
        value += o.value;
        error += o.error;
        return *this;
    }
};

struct Tolerance {
    double abs = 1e-12;
    double rel = 1e-8;

    double target(double value) const { return std::max(abs, rel * std::abs(value)); }
    Tolerance scaled(double abs_factor, double rel_factor) const { return {abs * abs_factor, rel * rel_factor}; }
};

//! Caps the number of leaf integrand evaluations across a whole nested integration.
class Budget {
  public:
    explicit Budget(std::size_t limit) : limit_(limit) {}

    bool try_consume(std::size_t k)
    {
        if (used_ + k > limit_)
        {
            exhausted_ = true;
            return false;
        }
        used_ += k;
        return true;
    }

    bool exhausted() const noexcept { return exhausted_; }
    std::size_t used() const noexcept { return used_; }
    std::size_t limit() const noexcept { return limit_; }

  private:
    std::size_t limit_;
    std::size_t used_ = 0;
    bool exhausted_ = false;
};

//! Pairwise sum in the given order; fixed order gives bit-identical results.
inline double pairwise_sum(std::span<const double> v)
{
    if (v.size() <= 8)
    {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

namespace detail {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};

// Gauss weights for xgk[1], xgk[3], xgk[5], xgk[7]
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Segment {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;        //!< discretization error of this rule
    double inner_error = 0.0;  //!< propagated error of nested integrand values
    bool refinable = true;
};

template <class F>
Estimate call_integrand(F& f, double x)
{
    using R = std::invoke_result_t<F&, double>;
    if constexpr (std::is_same_v<R, Estimate>)
        return f(x);
    else
        return Estimate{static_cast<double>(f(x)), 0.0};
}

/*!
 * One 15-point Kronrod panel. When leaf is set the panel draws 15 evaluations
 * from the budget and returns an infinite error if the budget cannot pay.
 */
template <class F>
Segment gk15(F& f, double a, double b, Budget& budget, bool leaf)
{
    Segment seg{a, b};
    if (leaf && !budget.try_consume(15))
    {
        seg.error = std::numeric_limits<double>::infinity();
        seg.refinable = false;
        return seg;
    }
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    std::array<double, 15> fv{};
    double inner = 0.0;
    const Estimate fc = call_integrand(f, c);
    fv[7] = fc.value;
    inner += detail::wgk[7] * fc.error;
    for (std::size_t j = 0; j < 7; ++j)
    {
        const double dx = h * xgk[j];
        const Estimate f1 = call_integrand(f, c - dx);
        const Estimate f2 = call_integrand(f, c + dx);
        fv[j] = f1.value;
        fv[14 - j] = f2.value;
        inner += wgk[j] * (f1.error + f2.error);
    }

    double resk = wgk[7] * fv[7];
    double resg = wg[3] * fv[7];
    double resabs = std::abs(resk);
    for (std::size_t j = 0; j < 7; ++j)
    {
        const double pair = fv[j] + fv[14 - j];
        resk += wgk[j] * pair;
        resabs += wgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1)
            resg += wg[j / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fv[7] - mean);
    for (std::size_t j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

    const double ah = std::abs(h);
    resk *= h;
    resg *= h;
    resabs *= ah;
    resasc *= ah;

    double err = std::abs(resk - resg);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);

    for (double v : fv)
    {
        if (!std::isfinite(v))
            throw DomainError("quadrature: integrand returned a non-finite value");
    }

    seg.value = resk;
    seg.error = err;
    seg.inner_error = inner * ah;
    return seg;
}

}  // namespace detail

struct AdaptiveResult {
    Estimate estimate;
    bool converged = true;
};

/*!
 * Integrate f over [a, b] by global bisection of the panel with the largest
 * error until the discretization error meets tol, the panel cap is reached or
 * the budget runs out.
 *
 * f may return double (a leaf integrand, charged to the budget) or Estimate
 * (a nested integral whose error is propagated into the result but is not used
 * for the stopping test).
 */
template <class F>
AdaptiveResult adaptive_gk15(F&& f, double a, double b, Tolerance tol, Budget& budget, std::size_t max_segments = 200)
{
    using R = std::invoke_result_t<F&, double>;
    constexpr bool leaf = !std::is_same_v<R, Estimate>;

    AdaptiveResult out;
    if (!(b > a))
        return out;

    std::vector<detail::Segment> segs;
    segs.push_back(detail::gk15(f, a, b, budget, leaf));

    auto totals = [&segs]() {
        double v = 0.0;
        double e = 0.0;
        for (const auto& s : segs)
        {
            v += s.value;
            e += s.error;
        }
        return std::pair{v, e};
    };

    while (true)
    {
        auto [v, e] = totals();
        if (e <= tol.target(v))
            break;
        if (budget.exhausted())
        {
            out.converged = false;
            break;
        }
        if (segs.size() >= max_segments)
        {
            out.converged = false;
            break;
        }
        // largest refinable error; first index wins ties
        std::size_t worst = segs.size();
        for (std::size_t i = 0; i < segs.size(); ++i)
        {
            if (segs[i].refinable && (worst == segs.size() || segs[i].error > segs[worst].error))
                worst = i;
        }
        if (worst == segs.size())
        {
            out.converged = false;
            break;
        }
        const auto parent = segs[worst];
        const double m = 0.5 * (parent.a + parent.b);
        if (!(m > parent.a && m < parent.b)
            || (parent.b - parent.a) <= 64.0 * std::numeric_limits<double>::epsilon()
                                            * std::max(std::abs(parent.a), std::abs(parent.b)))
        {
            segs[worst].refinable = false;
            continue;
        }
        auto left = detail::gk15(f, parent.a, m, budget, leaf);
        auto right = detail::gk15(f, m, parent.b, budget, leaf);
        if (budget.exhausted())
        {
            out.converged = false;
            // keep the parent estimate; the halves are incomplete
            segs[worst].refinable = false;
            segs[worst].error = std::numeric_limits<double>::infinity();
            break;
        }
        segs[worst] = left;
        segs.insert(segs.begin() + static_cast<std::ptrdiff_t>(worst) + 1, right);
    }

    std::vector<double> vals(segs.size());
    double err = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i)
    {
        vals[i] = segs[i].value;
        err += segs[i].error + segs[i].inner_error;
    }
    out.estimate = Estimate{pairwise_sum(vals), err};
    return out;
}

}  // namespace fracharm::quad
