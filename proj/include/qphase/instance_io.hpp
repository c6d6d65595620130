#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qphase/model.hpp"

namespace qphase {

/// Ordered key=value metadata, one pair per line.
using KeyValues = std::map<std::string, std::string>;

// Shortest round-trippable decimal; "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double value);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& values);
void write_rows_csv(const std::filesystem::path& path, const std::vector<Vector>& rows);
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_key_values(const std::filesystem::path& path, const KeyValues& values);
/// Reads `key = value` lines; blank lines and `#` comments are skipped.
KeyValues read_key_values(const std::filesystem::path& path);

/// Writes A.csv, y.csv, meta.txt and, when known, theta_star.csv into `dir`.
void save_instance(const std::filesystem::path& dir, const ProblemInstance& inst,
                   std::uint64_t seed);
ProblemInstance load_instance(const std::filesystem::path& dir);

} // namespace qphase
