#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fsel/core.hpp"
#include "fsel/gaussian.hpp"

namespace fsel {

// FFSB v1 layout, all integers little-endian:
//   magic      5 bytes  'F' 'F' 'S' 'B' 0x01
//   n_samples  u32
//   dim        u32
//   n_classes  u32
//   has_groups u8 (0 or 1)
//   labels     u32 x n_samples
//   groups     u32 x n_samples        (only when has_groups == 1)
//   features   f32 x n_samples x dim  (row-major, IEEE-754)
inline constexpr std::array<std::uint8_t, 5> kFfsbMagic = {0x46, 0x46, 0x53, 0x42, 0x01};
inline constexpr std::size_t kFfsbHeaderSize = 5 + 4 + 4 + 4 + 1;

struct FeatureFileHeader {
  std::uint32_t n_samples = 0;
  std::uint32_t dim = 0;
  std::uint32_t n_classes = 0;
  bool has_groups = false;
};

// Features are rounded to float32 on write; reading widens them back to double.
void write_feature_file(const LabeledFeatureSet& data, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_feature_file(const LabeledFeatureSet& data);

LabeledFeatureSet read_feature_file(const std::filesystem::path& path);
LabeledFeatureSet decode_feature_file(const std::vector<std::uint8_t>& bytes);
FeatureFileHeader decode_feature_header(const std::vector<std::uint8_t>& bytes);

// Gaussian spec text format, one `key = value` per line, '#' starts a comment:
//   dim    = 2
//   mean_a = -1, -10
//   mean_b = 1, 10
//   std    = 0.6, 10
// Vectors accept commas and/or whitespace. Unknown or repeated keys are rejected.
GaussianTaskSpec parse_gaussian_spec(const std::string& text);
GaussianTaskSpec read_gaussian_spec(const std::filesystem::path& path);
std::string format_gaussian_spec(const GaussianTaskSpec& spec);

using Cell = std::variant<double, std::int64_t, std::string>;

struct ResultsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
};

enum class ResultsFormat { kCsv, kJson };

// Doubles are written with 17 significant digits, LF line endings.
std::string format_cell(const Cell& cell);
void write_csv(const ResultsTable& table, std::ostream& out);
void write_json(const ResultsTable& table, std::ostream& out);
void write_results(const ResultsTable& table, const std::filesystem::path& path,
                   ResultsFormat format);
void write_metadata(const ResultsTable& table, const std::filesystem::path& path);

// Minimal RFC 4180 reader (quoted fields, LF or CRLF), used to verify output.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace fsel
