#include "qmpemba/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "qmpemba/errors.hpp"

namespace qmpemba {

namespace {

constexpr std::string_view kWhitespace = " \t\r";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

struct Field {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

double parse_double(const Field& f) {
  double value = 0.0;
  const auto* end = f.text.data() + f.text.size();
  const auto [ptr, ec] = std::from_chars(f.text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError("expected a number, got '" + std::string(f.text) + "'", f.line, f.column);
  }
  return value;
}

int parse_int(const Field& f) {
  int value = 0;
  const auto* end = f.text.data() + f.text.size();
  const auto [ptr, ec] = std::from_chars(f.text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("expected an integer, got '" + std::string(f.text) + "'", f.line, f.column);
  }
  return value;
}

bool parse_bool(const Field& f) {
  if (f.text == "true" || f.text == "1" || f.text == "yes") {
    return true;
  }
  if (f.text == "false" || f.text == "0" || f.text == "no") {
    return false;
  }
  throw ParseError("expected true/false, got '" + std::string(f.text) + "'", f.line, f.column);
}

std::array<double, 2> parse_pair(const Field& f) {
  const auto comma = f.text.find(',');
  if (comma == std::string_view::npos) {
    throw ParseError("expected two comma-separated numbers", f.line, f.column);
  }
  const auto lhs = trim(f.text.substr(0, comma));
  const auto rhs = trim(f.text.substr(comma + 1));
  const auto rhs_col = f.column + (rhs.data() - f.text.data());
  return {parse_double({lhs, f.line, f.column}), parse_double({rhs, f.line, rhs_col})};
}

void assign(ExperimentConfig& cfg, std::string_view key, const Field& value, std::size_t line) {
  if (key == "nu0_khz") {
    cfg.nu0_khz = parse_double(value);
  } else if (key == "nu1_khz") {
    cfg.nu1_khz = parse_double(value);
  } else if (key == "j_hz") {
    cfg.j_hz = parse_double(value);
  } else if (key == "t_hot_khz") {
    cfg.t_hot_khz = parse_double(value);
  } else if (key == "t_cold_khz") {
    cfg.t_cold_khz = parse_double(value);
  } else if (key == "tau1_us") {
    cfg.tau1_us = parse_double(value);
  } else if (key == "tau_bar_ms") {
    cfg.tau_bar_ms = parse_double(value);
  } else if (key == "mpemba_duration_us") {
    cfg.mpemba_duration_us = parse_double(value);
  } else if (key == "use_mpemba") {
    cfg.use_mpemba = parse_bool(value);
  } else if (key == "populations") {
    cfg.populations = parse_pair(value);
  } else if (key == "theta_steps") {
    cfg.theta_steps = parse_int(value);
  } else if (key == "tau_steps") {
    cfg.tau_steps = parse_int(value);
  } else if (key == "epsilon_equilibrium_khz") {
    cfg.epsilon_equilibrium_khz = parse_double(value);
  } else if (key == "output_precision") {
    cfg.output_precision = parse_int(value);
  } else {
    throw UnknownKey(std::string(key), line);
  }
}

std::string csv_field(const Cell& cell, int precision) {
  if (const auto* d = std::get_if<double>(&cell)) {
    return format_double(*d, precision);
  }
  if (const auto* i = std::get_if<long long>(&cell)) {
    return std::to_string(*i);
  }
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string quoted = "\"";
  for (char c : s) {
    quoted += c;
    if (c == '"') {
      quoted += '"';
    }
  }
  return quoted + "\"";
}

nlohmann::ordered_json json_field(const Cell& cell, int precision) {
  if (const auto* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) {
      return nullptr;
    }
    const std::string text = format_double(*d, precision);
    double rounded = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), rounded);
    return rounded;
  }
  if (const auto* i = std::get_if<long long>(&cell)) {
    return *i;
  }
  return std::get<std::string>(cell);
}

} // namespace

CycleConfig ExperimentConfig::cycle() const {
  CycleConfig c;
  c.nu0_khz = nu0_khz;
  c.nu1_khz = nu1_khz;
  c.j_hz = j_hz;
  c.t_hot_khz = t_hot_khz;
  c.t_cold_khz = t_cold_khz;
  c.tau1_ms = tau1_us * 1e-3;
  c.tau_bar_ms = tau_bar_ms;
  c.mpemba_duration_ms = mpemba_duration_us * 1e-3;
  c.use_mpemba = use_mpemba;
  return c;
}

void ExperimentConfig::validate() const {
  cycle().validate();
  const auto [p_plus, p_minus] = populations;
  if (!(p_plus > 0.0 && p_plus < 1.0 && p_minus > 0.0 && p_minus < 1.0)) {
    throw ValidationError("populations", "each weight must lie in (0, 1)");
  }
  if (std::abs(p_plus + p_minus - 1.0) > 1e-12) {
    throw ValidationError("populations", "weights must sum to 1");
  }
  if (theta_steps < 2) {
    throw ValidationError("theta_steps", "must be at least 2");
  }
  if (tau_steps < 2) {
    throw ValidationError("tau_steps", "must be at least 2");
  }
  if (!(epsilon_equilibrium_khz > 0.0)) {
    throw ValidationError("epsilon_equilibrium_khz", "must be positive");
  }
  if (output_precision < 1 || output_precision > 17) {
    throw ValidationError("output_precision", "must lie in [1, 17]");
  }
}

ExperimentConfig parse_config_unvalidated(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string_view body = trim(line);
    if (body.empty()) {
      continue;
    }
    const std::size_t body_col = static_cast<std::size_t>(body.data() - raw.data()) + 1;

    if (body.front() == '[') {
      if (body.back() != ']' || trim(body.substr(1, body.size() - 2)).empty()) {
        throw ParseError("malformed section header", line_no, body_col);
      }
      continue;
    }

    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no, body_col);
    }
    const std::string_view key = trim(body.substr(0, eq));
    const std::string_view value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("missing key", line_no, body_col);
    }
    const std::size_t value_col =
        value.empty() ? body_col + eq + 1 : static_cast<std::size_t>(value.data() - raw.data()) + 1;
    if (value.empty()) {
      throw ParseError("missing value for '" + std::string(key) + "'", line_no, value_col);
    }
    if (!seen.insert(std::string(key)).second) {
      throw ParseError("duplicate key '" + std::string(key) + "'", line_no, body_col);
    }
    assign(cfg, key, {value, line_no, value_col}, line_no);
  }
  return cfg;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg = parse_config_unvalidated(text);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[cycle]\n"
      << "nu0_khz = " << format_double(cfg.nu0_khz) << '\n'
      << "nu1_khz = " << format_double(cfg.nu1_khz) << '\n'
      << "j_hz = " << format_double(cfg.j_hz) << '\n'
      << "t_hot_khz = " << format_double(cfg.t_hot_khz) << '\n'
      << "t_cold_khz = " << format_double(cfg.t_cold_khz) << '\n'
      << "tau1_us = " << format_double(cfg.tau1_us) << '\n'
      << "tau_bar_ms = " << format_double(cfg.tau_bar_ms) << '\n'
      << "mpemba_duration_us = " << format_double(cfg.mpemba_duration_us) << '\n'
      << "use_mpemba = " << (cfg.use_mpemba ? "true" : "false") << '\n'
      << "\n[surface]\n"
      << "populations = " << format_double(cfg.populations[0]) << ", "
      << format_double(cfg.populations[1]) << '\n'
      << "theta_steps = " << cfg.theta_steps << '\n'
      << "tau_steps = " << cfg.tau_steps << '\n'
      << "epsilon_equilibrium_khz = " << format_double(cfg.epsilon_equilibrium_khz) << '\n'
      << "\n[output]\n"
      << "output_precision = " << cfg.output_precision << '\n';
  return out.str();
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_double(double value, int precision) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, precision);
  return std::string(buf, ptr);
}

std::string render_table(const Table& table, TableFormat format, int precision) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw ShapeMismatch("render_table: row width " + std::to_string(row.size()) +
                          " does not match " + std::to_string(table.columns.size()) +
                          " columns");
    }
  }

  if (format == TableFormat::kJson) {
    auto doc = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < row.size(); ++c) {
        obj[table.columns[c]] = json_field(row[c], precision);
      }
      doc.push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
  }

  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out += (c ? "," : "") + csv_field(table.columns[c], precision);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) {
        out += ',';
      }
      out += csv_field(row[c], precision);
    }
    out += '\n';
  }
  return out;
}

void write_table(const Table& table, const std::filesystem::path& path, TableFormat format,
                 int precision) {
  const std::string content = render_table(table, format, precision);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move table into place at '" + path.string() + "'");
  }
}

} // namespace qmpemba
