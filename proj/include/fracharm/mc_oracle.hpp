// SPDX-License-Identifier: Apache-2.0
//! \file mc_oracle.hpp
//! Monte Carlo oracle for the Poisson extension: exact sampling of exit points
//! with density P_r(x, .) by rejection, and block-parallel sample means.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "fracharm/core.hpp"
#include "fracharm/field.hpp"
#include "fracharm/kernels.hpp"
#include "fracharm/parallel.hpp"
#include "fracharm/random.hpp"

namespace fracharm {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

/*!
 * Rejection sampler for the density y -> P_r(x, y) on |y - c| > r.
 *
 * Proposal: t = (|y-c|/r)^2 - 1 from g(t) proportional to t^{-a/2} on (0, 1)
 * and t^{-a/2-1} on [1, inf), both by inverse transform, and a uniform
 * direction. With kappa = 1 - |x-c|/r one has |x - y| >= kappa |y - c|, and
 * the target-to-proposal ratio is at most
 *   M = c (1 - |x-c|^2/r^2)^{a/2} |S^{n-1}| Z kappa^{-n} / 2,  Z = 1/(1-a/2) + 2/a,
 * so the acceptance probability of a proposal is
 *   (kappa |y-c| / |x-y|)^n * t^{-a/2} / ((1 + t) g(t))
 * and the mean acceptance rate is 1/M, a function of |x-c|/r only.
 */
class ExitSampler {
  public:
    static constexpr std::size_t max_iterations = 10'000;

    ExitSampler(const Ball& ball, const Point& x, FracOrder alpha)
        : c_(ball.center().coords().begin(), ball.center().coords().end()), x_(x.coords().begin(), x.coords().end()),
          r_(ball.radius()), gamma_(alpha.half())
    {
        if (x.dim() != ball.dim())
            throw InvalidArgument("sample_exit: point and ball dimensions differ");
        if (!ball.strictly_contains(x.coords()))
            throw InvalidArgument("sample_exit: x must lie strictly inside the ball");
        kappa_ = 1.0 - vec::dist(x_, c_) / r_;
        near_mass_ = 1.0 / (1.0 - gamma_);
        total_mass_ = near_mass_ + 1.0 / gamma_;
    }

    std::size_t dim() const noexcept { return c_.size(); }

    //! Expected number of proposals per accepted sample.
    double envelope_constant() const
    {
        const SpaceDim n(dim());
        const double q = vec::dist(x_, c_) / r_;
        return normalization_constant(n, FracOrder(2.0 * gamma_)) * std::pow((1.0 - q) * (1.0 + q), gamma_)
               * unit_sphere_area(dim()) * total_mass_ * std::pow(kappa_, -n.as_real()) / 2.0;
    }

    //! Draw one exit point into y (size n); returns the number of proposals used.
    std::size_t sample(RandomStream& rng, std::vector<double>& y) const
    {
        const std::size_t n = dim();
        y.resize(n);
        std::vector<double> dir(n);
        for (std::size_t it = 1; it <= max_iterations; ++it)
        {
            double t;
            double ratio;  // t^{-gamma} / ((1 + t) g(t))
            if (rng.uniform() * total_mass_ < near_mass_)
            {
                t = std::pow(rng.uniform(), 1.0 / (1.0 - gamma_));
                ratio = 1.0 / (1.0 + t);
            }
            else
            {
                t = std::pow(rng.uniform(), -1.0 / gamma_);
                ratio = t / (1.0 + t);
            }
            double norm2 = 0.0;
            for (auto& d : dir)
            {
                d = rng.normal();
                norm2 += d * d;
            }
            const double inv = 1.0 / std::sqrt(norm2);
            const double rho = r_ * std::sqrt(1.0 + t);
            for (std::size_t i = 0; i < n; ++i)
                y[i] = c_[i] + rho * dir[i] * inv;
            const double dxy = vec::dist(x_, y);
            const double accept = std::pow(kappa_ * rho / dxy, static_cast<double>(n)) * ratio;
            if (!std::isfinite(rho) || !std::isfinite(accept) || !(t > 0.0))
            {
                // t underflow or overflow; a fresh proposal is statistically equivalent
                continue;
            }
            if (rng.uniform() < accept)
                return it;
        }
        throw SamplerError("sample_exit: rejection loop exceeded " + std::to_string(max_iterations)
                           + " iterations; the envelope constant does not dominate");
    }

  private:
    std::vector<double> c_;
    std::vector<double> x_;
    double r_;
    double gamma_;
    double kappa_ = 1.0;
    double near_mass_ = 0.0;
    double total_mass_ = 0.0;
};

//! One exit point of the ball from x, distributed with density P_r(x, .).
inline Point sample_exit(const Ball& ball, const Point& x, FracOrder alpha, RandomStream& stream)
{
    ExitSampler s(ball, x, alpha);
    std::vector<double> y;
    s.sample(stream, y);
    return Point(std::move(y));
}

namespace detail {

struct RunningMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double v)
    {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }

    //! Chan et al. pairwise merge.
    void merge(const RunningMoments& o)
    {
        if (o.n == 0)
            return;
        if (n == 0)
        {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double tot = na + nb;
        mean += d * nb / tot;
        m2 += o.m2 + d * d * na * nb / tot;
        n += o.n;
    }
};

inline std::string format_point(const std::vector<double>& y)
{
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < y.size(); ++i)
        os << (i ? ", " : "") << y[i];
    os << ')';
    return os.str();
}

}  // namespace detail

/*!
 * Sample mean of u over exit points. Samples are drawn in blocks of
 * block_size, block k using stream.substream(k); block moments are merged in
 * block order, so the estimate does not depend on the number of threads.
 *
 * The mean needs only an admissible u. The 3-sigma calibration of std_error
 * further needs a finite second moment, which holds for tail exponents below
 * alpha/2; at exactly alpha/2 (the Liouville solution) the variance diverges
 * logarithmically and std_error grows slowly with n_samples.
 */
inline McEstimate mc_extend(const ScalarField& u,
                            const Ball& ball,
                            FracOrder alpha,
                            const Point& x,
                            std::size_t n_samples,
                            const RandomStream& stream,
                            std::size_t block_size = 8192)
{
    if (n_samples < 100)
        throw InvalidArgument("mc_extend: n_samples must be at least 100");
    if (u.dim().value() != x.dim())
        throw InvalidArgument("mc_extend: field dimension does not match the point");
    if (!u.admissible(alpha))
        throw InvalidArgument("mc_extend: field growth is not admissible for this alpha");
    if (block_size == 0)
        throw InvalidArgument("mc_extend: block size must be positive");
    const ExitSampler sampler(ball, x, alpha);

    const std::size_t blocks = (n_samples + block_size - 1) / block_size;
    auto partial = parallel_map<detail::RunningMoments>(blocks, [&](std::size_t b) {
        RandomStream rng = stream.substream(static_cast<std::uint32_t>(b));
        const std::size_t count = std::min(block_size, n_samples - b * block_size);
        detail::RunningMoments m;
        std::vector<double> y;
        for (std::size_t k = 0; k < count; ++k)
        {
            sampler.sample(rng, y);
            const double v = u(y);
            if (!std::isfinite(v))
                throw SamplerError("mc_extend: non-finite field value at exit point " + detail::format_point(y));
            m.push(v);
        }
        return m;
    });

    detail::RunningMoments total;
    for (const auto& m : partial)
        total.merge(m);
    if (!std::isfinite(total.m2))
        throw SamplerError("mc_extend: sample variance overflowed");

    McEstimate est;
    est.n_samples = total.n;
    est.mean = total.mean;
    const double var = total.m2 / static_cast<double>(total.n - 1);
    est.std_error = std::sqrt(var / static_cast<double>(total.n));
    return est;
}

}  // namespace fracharm
