#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdist/analyzer.hpp"
#include "mdist/chain.hpp"
#include "mdist/dimension.hpp"
#include "mdist/oracle.hpp"
#include "mdist/shift.hpp"

// JSON and CSV formats. Parsers throw SpecError on malformed input.
namespace mdist::io {

inline constexpr int schema_version = 1;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

ShiftSpec parse_shift(const std::string& json_text);
ShiftSpec load_shift(const std::filesystem::path& path);
std::string shift_json(const ShiftSpec& spec);

// {"base", "modulus", "ell", "p", "table": [[d, i, value], ...]} or
// {"base", "modulus", "name": "id" | "sum_digits"}.
GAdditiveFunction parse_function(const std::string& json_text);
GAdditiveFunction load_function(const std::filesystem::path& path);
std::string function_json(const GAdditiveFunction& f);

struct JsonOptions {
  bool msb_first = false;  // word strings most significant digit first
};

std::string report_json(const AnalysisReport& report, JsonOptions opts = {});
std::string comparison_json(const AnalysisReport& report, const CensusTable& table, const Comparison& cmp,
                            const std::vector<ConvergenceRow>& rows, JsonOptions opts = {});
std::string dimension_json(const DimensionEstimate& est, const std::optional<TransversalityResult>& check,
                           JsonOptions opts = {});
std::string census_json(const CensusTable& table);

// b_1..b_r, count, frequency_num, frequency_den
std::string census_csv(const CensusTable& table);
// m, tv
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);
// Header of state labels, then rows of "num/den".
std::string matrix_csv(const ChainSystem& sys, std::int64_t i);

// Human-readable residue table: residue, value, float.
std::string render_table(const AnalysisReport& report);
std::string render_cover(const FischerCover& fc);

}  // namespace mdist::io
