#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fracharm/cli.hpp"
#include "fracharm/report.hpp"

using namespace fracharm;
using report::Json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

ConvergenceReport sample_report()
{
    ConvergenceReport rep;
    rep.rows = {make_row(0.125, 1.25, 1.0), make_row(0.25, 2.0, 1.0), make_row(0.5, 0.1 + 0.2, 0.3),
                make_row(1.0, -1e-300, 0.0)};
    rep.fitted_slope = 1.0 / 3.0;
    rep.slope_half_width = 0.01;
    rep.reference_convention = Convention::bare_pv;
    return rep;
}

}  // namespace

TEST(Report, ConvergenceRoundTrip)
{
    const auto rep = sample_report();
    const Json j = Json::parse(report::dump(report::to_json(rep)));
    const auto back = report::convergence_report_from_json(j);
    ASSERT_EQ(back.rows.size(), rep.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
    {
        EXPECT_EQ(back.rows[i].parameter, rep.rows[i].parameter);
        EXPECT_EQ(back.rows[i].value, rep.rows[i].value);
        EXPECT_EQ(back.rows[i].abs_error, rep.rows[i].abs_error);
    }
    EXPECT_EQ(back.fitted_slope, rep.fitted_slope);
    EXPECT_EQ(back.reference_convention, Convention::bare_pv);
}

TEST(Report, LoadRejectsInconsistentRows)
{
    Json j = report::to_json(sample_report());
    j["rows"][1]["abs_error"] = 0.5;
    EXPECT_THROW(report::convergence_report_from_json(j), InvalidArgument);
    Json k = report::to_json(sample_report());
    std::swap(k["rows"][0], k["rows"][1]);
    EXPECT_THROW(report::convergence_report_from_json(k), InvalidArgument);
    EXPECT_THROW(report::convergence_report_from_json(Json{{"rows", 3}}), InvalidArgument);
}

TEST(Report, CsvShortestRoundTrip)
{
    const std::string csv = report::to_csv({{0.1, 1.0 / 3.0, 0.3, std::nullopt}, {2.0, -0.0, std::nullopt, 1e-20}});
    EXPECT_EQ(csv, "parameter,value,reference,abs_error\n0.1,0.3333333333333333,0.3,\n2,-0,,1e-20\n");
    const auto rows = report::csv_rows(sample_report());
    EXPECT_EQ(rows.size(), 4u);
    EXPECT_EQ(*rows[2].abs_error, sample_report().rows[2].abs_error);
}

TEST(Report, NonFiniteAsNull)
{
    EXPECT_TRUE(report::number(std::nan("")).is_null());
    EXPECT_TRUE(report::number(HUGE_VAL).is_null());
    EXPECT_EQ(report::number(1.5).get<double>(), 1.5);
}

TEST(Cli, KernelExample)
{
    const auto r = run({"kernel", "--which", "poisson", "--dim", "2", "--alpha", "1", "--ball", "0,1:1", "--x", "0,1",
                        "--y", "0,2.4142"});
    ASSERT_EQ(r.code, cli::exit_success) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["command"], "kernel");
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_NEAR(j["results"][1]["value"].get<double>(), 0.0506625, 1e-7);
    EXPECT_EQ(j["versions"]["fracharm"], report::library_version);
}

TEST(Cli, KernelDimensionMismatchIsInvalid)
{
    const auto r = run({"kernel", "--which", "poisson", "--dim", "2", "--alpha", "1", "--ball", "0,0,1:1", "--x",
                        "0,0,1", "--y", "0,0,2.4142"});
    EXPECT_EQ(r.code, cli::exit_invalid_argument);
}

TEST(Cli, AlphaOutOfRange)
{
    const auto r = run({"kernel", "--which", "epsilon", "--dim", "1", "--alpha", "2.0", "--x", "3"});
    EXPECT_EQ(r.code, cli::exit_invalid_argument);
    EXPECT_NE(r.err.find("open interval"), std::string::npos);
}

TEST(Cli, BudgetExhaustion)
{
    const auto r = run({"fraclap", "--mode", "pv", "--field", "gaussian", "--dim", "1", "--alpha", "1",
                        "--max-evals", "10"});
    EXPECT_EQ(r.code, cli::exit_numerical_failure);
    const Json j = Json::parse(r.out);
    EXPECT_FALSE(j["pass"].get<bool>());
    EXPECT_FALSE(j["results"][0]["converged"].get<bool>());
    EXPECT_TRUE(j["results"][0].contains("partial"));
}

TEST(Cli, JsonReportReemitsByteIdentically)
{
    const auto r = run({"fraclap", "--mode", "pv", "--field", "liouville", "--dim", "2", "--alpha", "1.3"});
    ASSERT_EQ(r.code, cli::exit_success) << r.err;
    EXPECT_EQ(report::dump(Json::parse(r.out)), r.out);
}

TEST(Cli, RepeatedSeedIsDeterministic)
{
    const std::vector<std::string> args{"verify", "--checks", "mc", "--dim", "2", "--alpha", "1", "--mc-samples",
                                        "2000", "--seed", "7", "--seed", "7"};
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, cli::exit_success) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(Json::parse(a.out)["config"]["seed"], 7);
}

TEST(Cli, UnknownOptionAndHelp)
{
    EXPECT_EQ(run({"kernel", "--bogus"}).code, cli::exit_invalid_argument);
    EXPECT_EQ(run({"--help"}).code, cli::exit_success);
    EXPECT_EQ(run({"verify", "--checks", "nonsense"}).code, cli::exit_invalid_argument);
}

TEST(Cli, VerifyOdeCheck)
{
    const auto r = run({"verify", "--checks", "ode", "--alpha", "0.5,1.5", "--dim", "1,2"});
    ASSERT_EQ(r.code, cli::exit_success) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["results"].size(), 4u);
}

TEST(Cli, FraclapStudyCsv)
{
    const auto r = run({"fraclap", "--mode", "study", "--field", "gaussian", "--dim", "1", "--alpha", "1", "--radii",
                        "0.25,0.125,0.0625,0.03125", "--out", "csv"});
    ASSERT_EQ(r.code, cli::exit_success) << r.err;
    EXPECT_EQ(r.out.rfind(report::csv_header, 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST(Cli, ConfigReplayIsIdentical)
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto cfg = dir / "fracharm_test_config.json";
    const auto first = run({"verify", "--checks", "ode,extension", "--dim", "1", "--alpha", "1", "--output",
                            cfg.string()});
    ASSERT_EQ(first.code, cli::exit_success) << first.err;
    std::ifstream in(cfg);
    const std::string original((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto replay = run({"verify", "--config", cfg.string()});
    ASSERT_EQ(replay.code, cli::exit_success) << replay.err;
    std::filesystem::remove(cfg);
    EXPECT_EQ(replay.out, original);
}
