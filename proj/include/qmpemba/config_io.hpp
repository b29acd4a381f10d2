#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qmpemba/otto.hpp"

namespace qmpemba {

/// Everything a CLI run needs, in the units of the config file.
struct ExperimentConfig {
  double nu0_khz = 1.0;
  double nu1_khz = 2.0;
  double j_hz = 215.1;
  double t_hot_khz = 4.77;
  double t_cold_khz = 2.38;
  double tau1_us = 100.0;
  double tau_bar_ms = 4.65;
  double mpemba_duration_us = 0.0;
  bool use_mpemba = true;
  // Weights on (|x+>, |x->) of the initial cooling state.
  std::array<double, 2> populations{0.3, 0.7};
  int theta_steps = 73;
  int tau_steps = 64;
  double epsilon_equilibrium_khz = 0.01;
  int output_precision = 12;

  CycleConfig cycle() const;
  /// Throws ValidationError.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses `key = value` lines with optional `[section]` headers, `#` or `;`
/// comments and blank lines. Missing keys keep their defaults.
/// Throws ParseError, UnknownKey, ValidationError.
ExperimentConfig parse_config(std::string_view text);

/// Like parse_config but skips the final validation step.
ExperimentConfig parse_config_unvalidated(std::string_view text);

/// Reads and parses a file. Throws IoError when it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Serializes every key with shortest round-trip number formatting.
std::string format_config(const ExperimentConfig& cfg);

enum class TableFormat { kCsv, kJson };

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// CSV: header row, '\n' endings, numbers with `precision` significant
/// digits. JSON: array of objects keyed by column name.
/// Throws ShapeMismatch when a row's width differs from the schema.
std::string render_table(const Table& table, TableFormat format, int precision);

/// render_table written atomically (temp file + rename). Throws IoError.
void write_table(const Table& table, const std::filesystem::path& path, TableFormat format,
                 int precision);

/// Shortest decimal that round-trips to `value`.
std::string format_double(double value);
/// `value` with `precision` significant digits, general notation.
std::string format_double(double value, int precision);

} // namespace qmpemba
