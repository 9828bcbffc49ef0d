#pragma once

#include <filesystem>
#include <string>

#include "orcafl/fis.hpp"

namespace orcafl::fis {

/// Parse failure carrying a human-readable location (line/column for syntax
/// errors, rule identifier for semantic ones).
class FisFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the JSON FIS config format:
///   { "inputs":  [ {"name", "universe":[lo,hi], "terms":[{"label","trimf":[a,b,c]}]} ],
///     "output":  { ... },
///     "rules":   [ {"if": ["VN","VS","DCC"], "then": "a"} ],
///     "defuzz_resolution": 1001 }
/// Round-trips with serialize_fis: parse(serialize(f)) equals f.
FuzzyInferenceSystem parse_fis(const std::string& text);
FuzzyInferenceSystem parse_fis_file(const std::filesystem::path& path);

std::string serialize_fis(const FuzzyInferenceSystem& fis);
void write_fis_file(const FuzzyInferenceSystem& fis, const std::filesystem::path& path);

}  // namespace orcafl::fis
