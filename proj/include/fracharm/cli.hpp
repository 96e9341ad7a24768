// SPDX-License-Identifier: Apache-2.0
//! \file cli.hpp
//! Entry point of the fracharm command-line tool, callable in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracharm::cli {

enum ExitCode : int {
    exit_success = 0,
    exit_invalid_argument = 2,
    exit_numerical_failure = 3,
};

/*!
 * Run the tool with args (program name excluded). The report goes to out, or
 * to the file named by --output; diagnostics go to err. Returns the process
 * exit code.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracharm::cli
