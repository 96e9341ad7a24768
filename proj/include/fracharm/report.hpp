// SPDX-License-Identifier: Apache-2.0
//! \file report.hpp
//! Machine-readable reports: JSON documents with sorted keys and CSV tables
//! with shortest round-trip numbers.
#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "fracharm/core.hpp"
#include "fracharm/fraclap.hpp"

namespace fracharm::report {

using Json = nlohmann::json;

inline constexpr const char* library_version = "0.1.0";

inline Json versions()
{
    return Json{{"fracharm", library_version},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "."
                                      + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "."
                                      + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

//! Finite doubles as numbers, anything else as null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json make_document(const std::string& command, Json config, Json results, bool pass)
{
    return Json{{"command", command},
                {"config", std::move(config)},
                {"results", std::move(results)},
                {"pass", pass},
                {"versions", versions()}};
}

//! Two-space indented text with a trailing newline. Keys are already sorted
//! because nlohmann::json objects are ordered maps.
inline std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

//! Shortest decimal string that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw DomainError("format_double: conversion failed");
    return std::string(buf, end);
}

inline Json to_json(const EvalResult& r)
{
    return Json{{"value", number(r.value)},
                {"error_estimate", number(r.error_estimate)},
                {"n_evals", r.n_evals},
                {"convention", to_string(r.convention)}};
}

inline Json to_json(const StudyRow& row)
{
    return Json{{"parameter", number(row.parameter)},
                {"value", number(row.value)},
                {"reference", number(row.reference)},
                {"abs_error", number(row.abs_error)}};
}

inline Json to_json(const ConvergenceReport& rep)
{
    Json rows = Json::array();
    for (const auto& row : rep.rows)
        rows.push_back(to_json(row));
    return Json{{"rows", std::move(rows)},
                {"fitted_slope", number(rep.fitted_slope)},
                {"slope_half_width", number(rep.slope_half_width)},
                {"degenerate", rep.degenerate},
                {"reference_convention", to_string(rep.reference_convention)}};
}

/*!
 * Parse a convergence report, checking that rows are sorted by parameter and
 * that every stored abs_error equals |value - reference| bit for bit.
 */
inline ConvergenceReport convergence_report_from_json(const Json& j)
{
    ConvergenceReport rep;
    try
    {
        for (const auto& r : j.at("rows"))
        {
            StudyRow row{r.at("parameter").get<double>(), r.at("value").get<double>(),
                         r.at("reference").get<double>(), r.at("abs_error").get<double>()};
            if (row.abs_error != std::abs(row.value - row.reference))
                throw InvalidArgument("convergence report: stored abs_error does not match |value - reference| at parameter "
                                      + format_double(row.parameter));
            if (!rep.rows.empty() && !(rep.rows.back().parameter <= row.parameter))
                throw InvalidArgument("convergence report: rows are not sorted by parameter");
            rep.rows.push_back(row);
        }
        rep.fitted_slope = j.at("fitted_slope").get<double>();
        rep.slope_half_width = j.at("slope_half_width").get<double>();
        rep.degenerate = j.at("degenerate").get<bool>();
        const auto conv = j.at("reference_convention").get<std::string>();
        rep.reference_convention = conv == "bare_pv"            ? Convention::bare_pv
                                   : conv == "constant_applied" ? Convention::constant_applied
                                                                : Convention::none;
    }
    catch (const Json::exception& e)
    {
        throw InvalidArgument(std::string("convergence report: malformed JSON: ") + e.what());
    }
    return rep;
}

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//

inline constexpr const char* csv_header = "parameter,value,reference,abs_error\n";

//! One CSV line; a missing reference or error is an empty field.
struct CsvRow {
    double parameter = 0.0;
    double value = 0.0;
    std::optional<double> reference;
    std::optional<double> abs_error;
};

inline std::string to_csv(const std::vector<CsvRow>& rows)
{
    std::string out = csv_header;
    for (const auto& r : rows)
    {
        out += format_double(r.parameter);
        out += ',';
        out += format_double(r.value);
        out += ',';
        if (r.reference)
            out += format_double(*r.reference);
        out += ',';
        if (r.abs_error)
            out += format_double(*r.abs_error);
        out += '\n';
    }
    return out;
}

inline std::vector<CsvRow> csv_rows(const ConvergenceReport& rep)
{
    std::vector<CsvRow> rows;
    for (const auto& r : rep.rows)
        rows.push_back({r.parameter, r.value, r.reference, r.abs_error});
    return rows;
}

}  // namespace fracharm::report
