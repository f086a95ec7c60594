#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgcp/storage.hpp"

namespace lgcp::cli {

/// Runs the `lgcp` command line. Errors are reported as one JSON object on
/// `err` and yield exit status 1.
int run(int argc, const char* const* argv, std::ostream& out = std::cout,
        std::ostream& err = std::cerr, std::istream& in = std::cin);

/// "a,b" -> (a, b).
std::pair<double, double> parsePair(const std::string& text);
std::vector<double> parseList(const std::string& text);
/// "all" or "-1" selects the whole axis; "i" or "a,b" are 1-based inclusive.
AxisSelection parseAxis(const std::string& text);

}  // namespace lgcp::cli
