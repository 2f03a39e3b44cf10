#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "specfreq/specfreq.hpp"

namespace specfreq::cli {

/// One frequency token: "0", "-pi", "0.5pi", "pi/2" or plain radians.
[[nodiscard]] double parse_frequency_token(std::string_view token);

/// "quarterly", "monthly", "interval:LO:HI[:G]" or a comma list of tokens.
/// `n` sets the default interval grid size.
[[nodiscard]] FrequencySet parse_frequencies(std::string_view spec, std::size_t n);

/// "all-off-diagonal", "diagonal", "all", or a comma list of "i:j" entries
/// given as 1-based indices or series labels.
[[nodiscard]] IndexSet parse_pairs(std::string_view spec, const std::vector<std::string>& labels);

/// Runs the command line; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specfreq::cli
