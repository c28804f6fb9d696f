#pragma once

#include <string>
#include <utility>

#include "charm/comb_types.hpp"
#include "charm/moebius.hpp"

namespace charm {

/// Parses {"semicircles":[{"index":..,"center":..,"radius":..},...],
///         "truncation":{"max_word_length":..,"target_tail":..,"element_cap":..}}.
/// Unknown fields are rejected.
std::pair<SemicircleConfig, TruncationPolicy> parseSemicircleConfig(const std::string& jsonText);

/// Parses {"gaps":[{"a":..,"b":..},...], "lambda_star":..}. The distinguished
/// gap 0 is the one containing lambda_star. Unknown fields are rejected.
GapSystem parseGapSystem(const std::string& jsonText);

std::string readFile(const std::string& path);

}  // namespace charm
