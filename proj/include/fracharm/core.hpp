// SPDX-License-Identifier: Apache-2.0
//! \file core.hpp
//! Value types shared by every fracharm module: fractional order, ambient
//! dimension, points, balls, evaluation results and the error hierarchy.
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracharm {

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

//! A precondition or type invariant was violated by the caller.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

//! A kernel or operator was evaluated at a point where it is not finite.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

//! Rejection sampler failure: iteration cap hit or non-finite sample.
class SamplerError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// Strong scalar types
//---------------------------------------------------------------------------//

//! Order alpha of the fractional Laplacian, restricted to the open interval (0, 2).
class FracOrder {
  public:
    explicit FracOrder(double alpha) : alpha_(alpha)
    {
        if (!(alpha > 0.0 && alpha < 2.0))
        {
            throw InvalidArgument("fractional order alpha must lie in the open interval (0, 2), got "
                                  + std::to_string(alpha));
        }
    }

    double value() const noexcept { return alpha_; }
    double half() const noexcept { return 0.5 * alpha_; }

    friend bool operator==(FracOrder, FracOrder) = default;

  private:
    double alpha_;
};

//! Ambient dimension; capped at 8 to keep every computation desk-scale.
class SpaceDim {
  public:
    static constexpr std::size_t max_dim = 8;

    explicit SpaceDim(std::size_t n) : n_(n)
    {
        if (n < 1 || n > max_dim)
        {
            throw InvalidArgument("space dimension must satisfy 1 <= n <= 8, got " + std::to_string(n));
        }
    }

    std::size_t value() const noexcept { return n_; }
    double as_real() const noexcept { return static_cast<double>(n_); }

    friend bool operator==(SpaceDim, SpaceDim) = default;

  private:
    std::size_t n_;
};

//---------------------------------------------------------------------------//
// Point
//---------------------------------------------------------------------------//

class Point {
  public:
    Point() = default;

    explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }
    Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }
    explicit Point(std::span<const double> coords) : coords_(coords.begin(), coords.end()) { validate(); }

    //! Origin of R^n.
    static Point zero(SpaceDim n) { return Point(std::vector<double>(n.value(), 0.0)); }

    //! The point (0, ..., 0, h).
    static Point on_last_axis(SpaceDim n, double h)
    {
        std::vector<double> c(n.value(), 0.0);
        c.back() = h;
        return Point(std::move(c));
    }

    std::size_t dim() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double last() const { return coords_.back(); }
    std::span<const double> coords() const noexcept { return coords_; }

    friend bool operator==(const Point&, const Point&) = default;

  private:
    void validate() const
    {
        if (coords_.empty() || coords_.size() > SpaceDim::max_dim)
        {
            throw InvalidArgument("point must have between 1 and 8 coordinates");
        }
        for (double c : coords_)
        {
            if (!std::isfinite(c))
                throw InvalidArgument("point coordinates must be finite");
        }
    }

    std::vector<double> coords_;
};

//---------------------------------------------------------------------------//
// Small vector helpers on spans (dimension <= 8, so plain loops)
//---------------------------------------------------------------------------//

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }
inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline double dist2(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(std::span<const double> a, std::span<const double> b) { return std::sqrt(dist2(a, b)); }

}  // namespace vec

inline double distance(const Point& a, const Point& b) { return vec::dist(a.coords(), b.coords()); }

//---------------------------------------------------------------------------//
// Ball
//---------------------------------------------------------------------------//

class Ball {
  public:
    Ball(Point center, double radius) : center_(std::move(center)), radius_(radius)
    {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw InvalidArgument("ball radius must be strictly positive and finite");
    }

    //! The ball B_r(x_r) with x_r = (0, ..., 0, r), tangent to {y_n = 0} at the origin.
    static Ball tangent_upper(SpaceDim n, double r) { return Ball(Point::on_last_axis(n, r), r); }

    const Point& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    std::size_t dim() const noexcept { return center_.dim(); }

    //! r^2 - |x - c|^2 evaluated as (r - d)(r + d).
    double interior_gap(std::span<const double> x) const
    {
        double d = vec::dist(x, center_.coords());
        return (radius_ - d) * (radius_ + d);
    }

    bool strictly_contains(std::span<const double> x) const { return vec::dist(x, center_.coords()) < radius_; }

  private:
    Point center_;
    double radius_;
};

inline void require_same_dim(const Point& a, const Point& b, const char* what)
{
    if (a.dim() != b.dim())
        throw InvalidArgument(std::string(what) + ": point dimensions differ");
}

//---------------------------------------------------------------------------//
// Results
//---------------------------------------------------------------------------//

//! Which normalization of the fractional Laplacian a result carries.
enum class Convention {
    none,              //!< not a fractional Laplacian value
    bare_pv,           //!< principal-value integral without C_{n,alpha}
    constant_applied,  //!< C_{n,alpha} times the principal-value integral
};

inline const char* to_string(Convention c)
{
    switch (c)
    {
        case Convention::bare_pv: return "bare_pv";
        case Convention::constant_applied: return "constant_applied";
        default: return "none";
    }
}

struct EvalResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t n_evals = 0;
    Convention convention = Convention::none;

    EvalResult scaled(double factor) const
    {
        return {value * factor, error_estimate * std::abs(factor), n_evals, convention};
    }

    friend EvalResult operator+(const EvalResult& a, const EvalResult& b)
    {
        return {a.value + b.value, a.error_estimate + b.error_estimate, a.n_evals + b.n_evals, a.convention};
    }
};

//! Quadrature did not reach its tolerance within the budget; carries the best partial result.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, EvalResult partial)
        : std::runtime_error(what), partial_(partial)
    {
    }

    const EvalResult& partial() const noexcept { return partial_; }

  private:
    EvalResult partial_;
};

//---------------------------------------------------------------------------//
// Geometry constants
//---------------------------------------------------------------------------//

//! Surface measure of the unit sphere S^{n-1} in R^n (2 for n = 1).
inline double unit_sphere_area(std::size_t n)
{
    const double pi = std::numbers::pi;
    // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2), Gamma(n/2) by recursion.
    double g = (n % 2 == 0) ? 1.0 : std::sqrt(pi);  // Gamma(1) or Gamma(1/2)
    for (double k = (n % 2 == 0) ? 1.0 : 0.5; k < 0.5 * static_cast<double>(n) - 0.25; k += 1.0)
        g *= k;
    return 2.0 * std::pow(pi, 0.5 * static_cast<double>(n)) / g;
}

}  // namespace fracharm
