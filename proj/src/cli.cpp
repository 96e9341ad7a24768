// SPDX-License-Identifier: Apache-2.0
#include "fracharm/cli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracharm/fraclap.hpp"
#include "fracharm/halfspace.hpp"
#include "fracharm/kernels.hpp"
#include "fracharm/mc_oracle.hpp"
#include "fracharm/parallel.hpp"
#include "fracharm/report.hpp"

namespace fracharm::cli {
namespace {

using report::Json;

//---------------------------------------------------------------------------//
// Argument parsing helpers
//---------------------------------------------------------------------------//

std::vector<double> parse_coords(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const char* first = text.data() + pos;
        const char* last = text.data() + comma;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || first == last)
            throw InvalidArgument(what + ": cannot parse '" + text + "' as comma-separated numbers");
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

Point parse_point(const std::string& text, SpaceDim n, const std::string& what)
{
    Point p(parse_coords(text, what));
    if (p.dim() != n.value())
    {
        throw InvalidArgument(what + ": expected " + std::to_string(n.value()) + " coordinates for --dim "
                              + std::to_string(n.value()) + ", got " + std::to_string(p.dim()));
    }
    return p;
}

Ball parse_ball(const std::string& text, SpaceDim n)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw InvalidArgument("--ball: expected center:radius, e.g. 0,1:1");
    const Point center = parse_point(text.substr(0, colon), n, "--ball center");
    const auto radius = parse_coords(text.substr(colon + 1), "--ball radius");
    if (radius.size() != 1)
        throw InvalidArgument("--ball: radius must be a single number");
    return Ball(center, radius[0]);
}

Json point_json(const Point& p)
{
    Json a = Json::array();
    for (double c : p.coords())
        a.push_back(c);
    return a;
}

Json ball_json(const Ball& b) { return Json{{"center", point_json(b.center())}, {"radius", b.radius()}}; }

//! Config-file value to command-line tokens for option --key.
void append_config_tokens(const std::string& key, const Json& v, std::vector<std::string>& args)
{
    auto scalar = [](const Json& s) -> std::string {
        if (s.is_string())
            return s.get<std::string>();
        if (s.is_number_integer() || s.is_number_unsigned())
            return s.dump();
        if (s.is_number_float())
            return report::format_double(s.get<double>());
        throw InvalidArgument("--config: unsupported value " + s.dump());
    };
    auto joined = [&](const Json& arr) {
        std::string out;
        for (const auto& e : arr)
            out += (out.empty() ? "" : ",") + scalar(e);
        return out;
    };
    const std::string flag = "--" + key;
    if (v.is_boolean())
    {
        if (v.get<bool>())
            args.push_back(flag);
    }
    else if (v.is_object())
    {
        if (!v.contains("center") || !v.contains("radius"))
            throw InvalidArgument("--config: object values must be balls with center and radius");
        args.push_back(flag);
        args.push_back(joined(v.at("center")) + ":" + scalar(v.at("radius")));
    }
    else if (v.is_array() && !v.empty() && v.front().is_array())
    {
        for (const auto& e : v)
        {
            args.push_back(flag);
            args.push_back(joined(e));
        }
    }
    else if (v.is_array())
    {
        if (!v.empty())
        {
            args.push_back(flag);
            args.push_back(joined(v));
        }
    }
    else if (!v.is_null())
    {
        args.push_back(flag);
        args.push_back(scalar(v));
    }
}

/*!
 * Merge a JSON config file into args: every key becomes --key unless the
 * command line already sets that option. The file holds either a whole
 * previous report or just its "config" object, so reports can be replayed.
 */
std::vector<std::string> merge_config(const std::vector<std::string>& args)
{
    std::string path;
    std::string command;
    for (std::size_t i = 0; i < args.size(); ++i)
    {
        if (command.empty() && !args[i].empty() && args[i][0] != '-')
            command = args[i];
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty())
        return args;

    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("--config: cannot open " + path);
    Json cfg;
    try
    {
        cfg = Json::parse(in);
    }
    catch (const Json::exception& e)
    {
        throw InvalidArgument("--config: " + path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object())
        throw InvalidArgument("--config: top level must be an object");
    // a whole report: replay its config under its command
    if (cfg.contains("config") && cfg["config"].is_object() && cfg.contains("command"))
    {
        Json inner = cfg["config"];
        inner["command"] = cfg["command"];
        cfg = std::move(inner);
    }

    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::vector<std::string> out = args;
    for (const auto& [key, value] : cfg.items())
    {
        if (key == "command")
        {
            if (!command.empty() && value != command)
                throw InvalidArgument("--config: file is for command '" + value.get<std::string>() + "'");
            continue;
        }
        if (key == "config" || given(key))
            continue;
        append_config_tokens(key, value, out);
    }
    return out;
}

//---------------------------------------------------------------------------//
// Common options
//---------------------------------------------------------------------------//

struct CommonOptions {
    std::string out = "json";
    std::string output;
    std::string config;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    std::size_t max_evals = 20'000'000;

    void add_to(CLI::App* app)
    {
        app->add_option("--out", out, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
        app->add_option("--output", output, "Write the report to this file instead of stdout");
        app->add_option("--config", config, "JSON file of option values: a previous report or its config object");
        app->add_option("--rel-tol", rel_tol, "Relative quadrature tolerance")->capture_default_str();
        app->add_option("--abs-tol", abs_tol, "Absolute quadrature tolerance")->capture_default_str();
        app->add_option("--max-evals", max_evals, "Integrand evaluation budget per integral")->capture_default_str();
    }

    /*!
     * The validated quadrature spec. A budget below the library floor of
     * 1000 evaluations cannot run any integral, so it is reported as budget
     * exhaustion rather than as an invalid argument.
     */
    QuadratureSpec spec() const
    {
        QuadratureSpec s;
        s.rel_tol = rel_tol;
        s.abs_tol = abs_tol;
        if (max_evals < 1000)
        {
            throw ConvergenceError("evaluation budget of " + std::to_string(max_evals)
                                       + " is exhausted before the first integral (minimum 1000)",
                                   EvalResult{0.0, std::numeric_limits<double>::infinity(), 0, Convention::none});
        }
        s.max_evals = max_evals;
        s.validate();
        return s;
    }

    Json to_json() const
    {
        return Json{{"out", out}, {"rel-tol", rel_tol}, {"abs-tol", abs_tol}, {"max-evals", max_evals}};
    }
};

struct Outcome {
    Json results = Json::array();
    std::vector<report::CsvRow> csv;
    bool pass = true;
    int code = exit_success;
};

Json failure_entry(const ConvergenceError& e)
{
    return Json{{"converged", false}, {"message", e.what()}, {"partial", report::to_json(e.partial())}};
}

//---------------------------------------------------------------------------//
// kernel
//---------------------------------------------------------------------------//

struct KernelOptions {
    std::string which;
    std::size_t dim = 1;
    double alpha = 1.0;
    std::string ball;
    std::string x;
    std::string y;
    double radius = 1.0;
    bool norm_check = false;

    void add_to(CLI::App* app)
    {
        app->add_option("--which", which, "Kernel: poisson, epsilon or riesz")
            ->required()
            ->check(CLI::IsMember({"poisson", "epsilon", "riesz"}));
        app->add_option("--dim", dim, "Space dimension n")->capture_default_str();
        app->add_option("--alpha", alpha, "Fractional order in (0, 2)")->capture_default_str();
        app->add_option("--ball", ball, "Ball as center:radius, e.g. 0,1:1 (poisson)");
        app->add_option("--x", x, "Evaluation point x");
        app->add_option("--y", y, "Second point: y outside the ball (poisson) or the pole z (riesz)");
        app->add_option("--radius", radius, "Radius r of the mean-value kernel (epsilon)")->capture_default_str();
        app->add_flag("--norm-check", norm_check, "Integrate the kernel and compare its mass with 1");
    }
};

Outcome run_kernel(const KernelOptions& o, const CommonOptions& common, Json& config)
{
    const SpaceDim n(o.dim);
    const FracOrder alpha(o.alpha);

    config = common.to_json();
    config["which"] = o.which;
    config["dim"] = o.dim;
    config["alpha"] = o.alpha;
    config["radius"] = o.radius;
    config["norm-check"] = o.norm_check;

    Outcome res;
    auto value_row = [&](const std::string& quantity, double v) {
        res.results.push_back(Json{{"quantity", quantity}, {"value", report::number(v)}});
        res.csv.push_back({static_cast<double>(res.csv.size()), v, std::nullopt, std::nullopt});
    };
    auto mass_row = [&](const std::string& quantity, const EvalResult& m) {
        const double err = std::abs(m.value - 1.0);
        const bool ok = err <= 1e-6;
        Json row = report::to_json(m);
        row["quantity"] = quantity;
        row["reference"] = 1.0;
        row["abs_error"] = report::number(err);
        row["tolerance"] = 1e-6;
        row["pass"] = ok;
        res.results.push_back(row);
        res.csv.push_back({static_cast<double>(res.csv.size()), m.value, 1.0, err});
        res.pass = res.pass && ok;
    };

    value_row("normalization_constant", normalization_constant(n, alpha));
    bool evaluated = false;
    try
    {
        if (o.which == "poisson")
        {
            if (o.ball.empty())
                throw InvalidArgument("kernel poisson: --ball is required");
            const Ball ball = parse_ball(o.ball, n);
            config["ball"] = ball_json(ball);
            const Point x = o.x.empty() ? ball.center() : parse_point(o.x, n, "--x");
            config["x"] = point_json(x);
            if (!o.y.empty())
            {
                const Point y = parse_point(o.y, n, "--y");
                config["y"] = point_json(y);
                value_row("poisson_kernel", poisson_kernel(ball, alpha, x, y));
                evaluated = true;
            }
            if (o.norm_check)
            {
                mass_row("poisson_kernel_mass", poisson_mass(ball, alpha, x, common.spec()));
                evaluated = true;
            }
        }
        else if (o.which == "epsilon")
        {
            if (!o.x.empty())
            {
                const Point x = parse_point(o.x, n, "--x");
                config["x"] = point_json(x);
                value_row("mean_value_kernel", mean_value_kernel(alpha, o.radius, x));
                evaluated = true;
            }
            if (o.norm_check)
            {
                mass_row("mean_value_kernel_mass", mean_value_mass(n, alpha, o.radius, common.spec()));
                evaluated = true;
            }
        }
        else
        {
            if (o.norm_check)
                throw InvalidArgument("kernel riesz: --norm-check applies to poisson and epsilon only");
            if (o.x.empty() || o.y.empty())
                throw InvalidArgument("kernel riesz: --x and --y (the pole z) are required");
            const Point x = parse_point(o.x, n, "--x");
            const Point z = parse_point(o.y, n, "--y");
            config["x"] = point_json(x);
            config["y"] = point_json(z);
            value_row("riesz_kernel", riesz_kernel(n, alpha, x, z));
            evaluated = true;
        }
    }
    catch (const ConvergenceError& e)
    {
        res.results.push_back(failure_entry(e));
        res.pass = false;
        res.code = exit_numerical_failure;
        return res;
    }
    if (!evaluated)
        throw InvalidArgument("kernel: nothing to evaluate; give --y, --x or --norm-check");
    return res;
}

//---------------------------------------------------------------------------//
// fraclap
//---------------------------------------------------------------------------//

struct FraclapOptions {
    std::string mode = "fraclap";
    std::string field = "gaussian";
    std::size_t dim = 1;
    double alpha = 1.0;
    double C = 1.0;
    double width = 1.0;
    std::vector<std::string> x;
    std::vector<double> radii{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};

    void add_to(CLI::App* app)
    {
        app->add_option("--mode", mode, "pv (bare integral), fraclap (with C_{n,alpha}) or study")
            ->check(CLI::IsMember({"pv", "fraclap", "study"}))
            ->capture_default_str();
        app->add_option("--field", field, "liouville, gaussian, constant or bump")
            ->check(CLI::IsMember({"liouville", "gaussian", "constant", "bump"}))
            ->capture_default_str();
        app->add_option("--dim", dim, "Space dimension n")->capture_default_str();
        app->add_option("--alpha", alpha, "Fractional order in (0, 2)")->capture_default_str();
        app->add_option("--C", C, "Amplitude of the field")->capture_default_str();
        app->add_option("--width", width, "Width of the gaussian field")->capture_default_str();
        app->add_option("--x", x, "Evaluation point (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        app->add_option("--radii", radii, "Decreasing geometric radii for the study")
            ->delimiter(',')
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
            ->capture_default_str();
    }
};

ScalarField make_field(const FraclapOptions& o, SpaceDim n, FracOrder alpha)
{
    if (o.field == "liouville")
        return LiouvilleSolution(o.C, alpha, n).field();
    if (o.field == "gaussian")
        return fields::gaussian(Point::zero(n), o.width, o.C);
    if (o.field == "constant")
        return fields::constant(n, o.C);
    return fields::bump(Ball(Point::zero(n), 1.0), o.C);
}

Outcome run_fraclap(const FraclapOptions& o, const CommonOptions& common, Json& config)
{
    const SpaceDim n(o.dim);
    const FracOrder alpha(o.alpha);
    const ScalarField u = make_field(o, n, alpha);

    std::vector<Point> points;
    for (const auto& s : o.x)
        points.push_back(parse_point(s, n, "--x"));
    if (points.empty())
        points.push_back(o.field == "liouville" ? Point::on_last_axis(n, 1.0) : Point::zero(n));

    config = common.to_json();
    config["mode"] = o.mode;
    config["field"] = o.field;
    config["dim"] = o.dim;
    config["alpha"] = o.alpha;
    config["C"] = o.C;
    config["width"] = o.width;
    config["x"] = Json::array();
    for (const auto& p : points)
        config["x"].push_back(point_json(p));

    if (o.mode == "study")
        config["radii"] = o.radii;
    const QuadratureSpec spec = common.spec();

    Outcome res;
    if (o.mode == "study")
    {
        if (points.size() != 1)
            throw InvalidArgument("fraclap study: exactly one --x is required");
        Json entry{{"x", point_json(points[0])}, {"nominal_slope", 2.0 - alpha.value()}};
        try
        {
            const auto rep = mv_convergence_study(u, points[0], alpha, o.radii, spec);
            entry["converged"] = true;
            entry["study"] = report::to_json(rep);
            res.csv = report::csv_rows(rep);
        }
        catch (const ConvergenceError& e)
        {
            entry.update(failure_entry(e));
            res.pass = false;
            res.code = exit_numerical_failure;
        }
        res.results.push_back(entry);
        return res;
    }

    for (const auto& p : points)
    {
        Json entry{{"x", point_json(p)}};
        try
        {
            const EvalResult r = o.mode == "pv" ? pv_integral(u, p, alpha, spec) : frac_laplacian(u, p, alpha, spec);
            entry.update(report::to_json(r));
            entry["converged"] = true;
            res.csv.push_back({static_cast<double>(res.csv.size()), r.value, std::nullopt, std::nullopt});
        }
        catch (const ConvergenceError& e)
        {
            entry.update(failure_entry(e));
            res.pass = false;
            res.code = exit_numerical_failure;
        }
        res.results.push_back(entry);
    }
    return res;
}

//---------------------------------------------------------------------------//
// verify
//---------------------------------------------------------------------------//

const std::vector<std::string>& all_checks()
{
    static const std::vector<std::string> names{"ode", "extension", "tangential", "normal", "riesz", "mc"};
    return names;
}

struct VerifyOptions {
    std::vector<double> alphas{0.3, 1.0, 1.7};
    std::vector<std::size_t> dims{1, 2, 3};
    std::vector<std::string> checks = all_checks();
    std::uint64_t seed = 1;
    std::size_t mc_samples = 100'000;

    void add_to(CLI::App* app)
    {
        app->add_option("--alpha", alphas, "Fractional orders")
            ->delimiter(',')
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
            ->capture_default_str();
        app->add_option("--dim", dims, "Space dimensions")
            ->delimiter(',')
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
            ->capture_default_str();
        app->add_option("--checks", checks, "Subset of ode,extension,tangential,normal,riesz,mc")
            ->delimiter(',')
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
            ->check(CLI::IsMember(all_checks()))
            ->capture_default_str();
        app->add_option("--seed", seed, "Seed of the random streams")->capture_default_str();
        app->add_option("--mc-samples", mc_samples, "Samples per Monte Carlo cross-check")->capture_default_str();
    }
};

struct VerifyTask {
    std::size_t dim;
    double alpha;
    std::string check;
};

//! (0.5, ..., 0.5, 1): off every axis, so tangential terms do not vanish trivially.
Point verification_point(SpaceDim n)
{
    std::vector<double> c(n.value(), 0.5);
    c.back() = 1.0;
    return Point(std::move(c));
}

//! Stream id from (n, alpha) alone, so a check draws the same numbers whatever else runs.
std::uint32_t stream_id_for(std::size_t dim, double alpha)
{
    const auto bits = std::bit_cast<std::uint64_t>(alpha);
    return static_cast<std::uint32_t>(bits ^ (bits >> 32)) ^ static_cast<std::uint32_t>(dim * 0x9E3779B9u);
}

Json study_row(double parameter, double value, double reference)
{
    return report::to_json(make_row(parameter, value, reference));
}

void attach_slope(Json& entry, const std::vector<std::pair<double, double>>& pts)
{
    const bool fittable = pts.size() >= 4 && std::all_of(pts.begin(), pts.end(), [](const auto& p) {
                              return p.first > 0.0 && p.second > 0.0;
                          });
    if (!fittable)
        return;
    const auto fit = fit_slope(pts);
    entry["fitted_slope"] = report::number(fit.slope);
    entry["slope_half_width"] = report::number(fit.half_width);
}

Json run_check(const VerifyTask& task, const VerifyOptions& o, const QuadratureSpec& spec)
{
    const SpaceDim n(task.dim);
    const FracOrder alpha(task.alpha);
    const double a = alpha.value();
    Json entry{{"check", task.check}, {"dim", task.dim}, {"alpha", task.alpha}};
    Json rows = Json::array();
    bool pass = true;

    const LiouvilleSolution sol(1.0, alpha, n);
    const ScalarField u = sol.field();
    const Point x = verification_point(n);
    const double ux = sol(x);

    if (task.check == "ode")
    {
        constexpr double eps = std::numeric_limits<double>::epsilon();
        for (double C : {1.0, 3.0})
        {
            const LiouvilleSolution s(C, alpha, n);
            for (double xn : {0.2, 1.0, 4.0})
            {
                const Point p = Point::on_last_axis(n, xn);
                const double res = verify_liouville_ode(s, p);
                const double scale = a / (2.0 * xn) * s(p);
                Json row = study_row(xn, res, 0.0);
                row["C"] = C;
                rows.push_back(row);
                pass = pass && std::abs(res) <= 4.0 * eps * scale;
            }
        }
        entry["tolerance"] = "4 ulp of (alpha/2x_n)u";
    }
    else if (task.check == "extension")
    {
        for (double r : {2.0, 8.0})
        {
            const auto pe = poisson_extend(u, Ball::tangent_upper(n, r), alpha, x, spec);
            rows.push_back(study_row(r, pe.value, ux));
            pass = pass && std::abs(pe.value - ux) <= 1e-4 * ux;
        }
        entry["tolerance"] = 1e-4;
    }
    else if (task.check == "tangential" || task.check == "normal")
    {
        const bool normal = task.check == "normal";
        const double limit = normal ? a / (2.0 * x.last()) * ux : 0.0;
        std::vector<std::pair<double, double>> pts;
        double last_err = 0.0;
        for (int k = 4; k <= 12; ++k)
        {
            const double r = x.last() * std::ldexp(1.0, k);
            const Ball ball = Ball::tangent_upper(n, r);
            const auto d = normal ? normal_derivative(u, ball, alpha, x, spec)
                                  : tangential_derivative(u, ball, alpha, x, 0, spec);
            Json row = study_row(r, d.total, limit);
            row["term_boundary"] = report::number(d.term_boundary.value);
            row["term_bulk"] = report::number(d.term_bulk.value);
            rows.push_back(row);
            last_err = std::abs(d.total - limit);
            pts.emplace_back(r, last_err);
            // the tangential derivative of u is 0; the total must vanish at every r
            if (!normal)
                pass = pass && last_err <= 1e-6 * ux / x.last();
        }
        if (normal)
            pass = last_err <= 1e-3 * limit;
        entry["tolerance"] = normal ? 1e-3 : 1e-6;
        attach_slope(entry, pts);
    }
    else if (task.check == "riesz")
    {
        RandomStream rng(o.seed, stream_id_for(task.dim, task.alpha), 1);
        const double r = 2.0;
        const Ball ball = Ball::tangent_upper(n, r);
        const auto c = ball.center().coords();
        for (int k = 0; k < 3; ++k)
        {
            std::vector<double> dx(n.value()), dz(n.value());
            double nx = 0.0, nz = 0.0;
            for (std::size_t i = 0; i < n.value(); ++i)
            {
                dx[i] = rng.normal();
                dz[i] = rng.normal();
                nx += dx[i] * dx[i];
                nz += dz[i] * dz[i];
            }
            const double rx = 0.8 * r * std::pow(rng.uniform(), 1.0 / n.as_real()) / std::sqrt(nx);
            const double rz = r * (1.2 + 1.8 * rng.uniform()) / std::sqrt(nz);
            std::vector<double> xv(n.value()), zv(n.value());
            for (std::size_t i = 0; i < n.value(); ++i)
            {
                xv[i] = c[i] + rx * dx[i];
                zv[i] = c[i] + rz * dz[i];
            }
            const double res = riesz_identity_residual(ball, Point(xv), Point(zv), alpha, spec);
            Json row = study_row(static_cast<double>(k), res, 0.0);
            row["x"] = xv;
            row["z"] = zv;
            rows.push_back(row);
            pass = pass && res <= 1e-4;
        }
        entry["tolerance"] = 1e-4;
    }
    else if (task.check == "mc")
    {
        const Ball ball = Ball::tangent_upper(n, 2.0);
        const Point xm = Point::on_last_axis(n, 1.0);
        const double quad = poisson_extend(u, ball, alpha, xm, spec).value;
        const auto est = mc_extend(u, ball, alpha, xm, o.mc_samples, RandomStream(o.seed, stream_id_for(task.dim, task.alpha)));
        Json row = study_row(static_cast<double>(est.n_samples), est.mean, quad);
        row["std_error"] = report::number(est.std_error);
        rows.push_back(row);
        pass = std::abs(est.mean - quad) <= 3.0 * est.std_error;
        entry["tolerance"] = "3 std_error";
    }
    entry["rows"] = rows;
    entry["pass"] = pass;
    return entry;
}

Outcome run_verify(const VerifyOptions& o, const CommonOptions& common, Json& config)
{
    for (double a : o.alphas)
        FracOrder{a};
    for (std::size_t d : o.dims)
        SpaceDim{d};
    if (o.alphas.empty() || o.dims.empty() || o.checks.empty())
        throw InvalidArgument("verify: --alpha, --dim and --checks must be non-empty");
    if (o.mc_samples < 100)
        throw InvalidArgument("verify: --mc-samples must be at least 100");

    config = common.to_json();
    config["alpha"] = o.alphas;
    config["dim"] = o.dims;
    config["checks"] = o.checks;
    config["seed"] = o.seed;
    config["mc-samples"] = o.mc_samples;
    const QuadratureSpec spec = common.spec();

    std::vector<VerifyTask> tasks;
    for (std::size_t d : o.dims)
        for (double a : o.alphas)
            for (const auto& name : all_checks())
                if (std::find(o.checks.begin(), o.checks.end(), name) != o.checks.end())
                    tasks.push_back({d, a, name});

    auto entries = parallel_map<Json>(tasks.size(), [&](std::size_t i) -> Json {
        const auto& t = tasks[i];
        if (t.check == "tangential" && t.dim < 2)
            return Json{{"check", t.check}, {"dim", t.dim}, {"alpha", t.alpha}, {"pass", true},
                        {"skipped", "no tangential direction for n = 1"}};
        if (t.check == "riesz" && !(static_cast<double>(t.dim) > t.alpha))
            return Json{{"check", t.check}, {"dim", t.dim}, {"alpha", t.alpha}, {"pass", true},
                        {"skipped", "the Riesz kernel needs n > alpha"}};
        try
        {
            return run_check(t, o, spec);
        }
        catch (const ConvergenceError& e)
        {
            Json j{{"check", t.check}, {"dim", t.dim}, {"alpha", t.alpha}, {"pass", false}};
            j.update(failure_entry(e));
            return j;
        }
        catch (const std::exception& e)
        {
            return Json{{"check", t.check}, {"dim", t.dim}, {"alpha", t.alpha}, {"pass", false}, {"message", e.what()}};
        }
    });

    Outcome res;
    for (auto& e : entries)
    {
        res.pass = res.pass && e.at("pass").get<bool>();
        if (e.contains("rows"))
        {
            for (const auto& row : e.at("rows"))
            {
                res.csv.push_back({row.at("parameter").get<double>(), row.at("value").get<double>(),
                                   row.at("reference").get<double>(), row.at("abs_error").get<double>()});
            }
        }
        res.results.push_back(std::move(e));
    }
    res.code = res.pass ? exit_success : exit_numerical_failure;
    return res;
}

//---------------------------------------------------------------------------//
// Output
//---------------------------------------------------------------------------//

void emit(const std::string& command, const Json& config, const Outcome& res, const CommonOptions& common,
          std::ostream& out)
{
    std::string text;
    if (common.out == "csv")
        text = report::to_csv(res.csv);
    else
        text = report::dump(report::make_document(command, config, res.results, res.pass));

    if (common.output.empty())
    {
        out << text;
        return;
    }
    std::ofstream file(common.output, std::ios::binary);
    if (!file)
        throw InvalidArgument("--output: cannot open " + common.output);
    file << text;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fractional harmonic functions: kernels, the fractional Laplacian and verification suites",
                 "fracharm"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    CommonOptions kernel_common, fraclap_common, verify_common;
    KernelOptions kernel_opts;
    FraclapOptions fraclap_opts;
    VerifyOptions verify_opts;

    auto* kernel = app.add_subcommand("kernel", "Evaluate a kernel or check its unit mass");
    kernel_common.add_to(kernel);
    kernel_opts.add_to(kernel);
    auto* fraclap = app.add_subcommand("fraclap", "Fractional Laplacian, bare PV integral or mean-value study");
    fraclap_common.add_to(fraclap);
    fraclap_opts.add_to(fraclap);
    auto* verify = app.add_subcommand("verify", "Run the Liouville verification suite");
    verify_common.add_to(verify);
    verify_opts.add_to(verify);

    try
    {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_success : exit_invalid_argument;
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_invalid_argument;
    }

    const CommonOptions* common = &verify_common;
    std::string name = "verify";
    if (kernel->parsed())
    {
        common = &kernel_common;
        name = "kernel";
    }
    else if (fraclap->parsed())
    {
        common = &fraclap_common;
        name = "fraclap";
    }

    try
    {
        Json config;
        Outcome res;
        try
        {
            if (name == "kernel")
                res = run_kernel(kernel_opts, kernel_common, config);
            else if (name == "fraclap")
                res = run_fraclap(fraclap_opts, fraclap_common, config);
            else
                res = run_verify(verify_opts, verify_common, config);
        }
        catch (const ConvergenceError& e)
        {
            res = Outcome{};
            res.results.push_back(failure_entry(e));
            res.pass = false;
            res.code = exit_numerical_failure;
        }
        emit(name, config, res, *common, out);
        if (res.code != exit_success)
            err << "error: " << name << ": numerical failure; see the report\n";
        return res.code;
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_invalid_argument;
    }
    catch (const std::domain_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_invalid_argument;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_numerical_failure;
    }
}

}  // namespace fracharm::cli
