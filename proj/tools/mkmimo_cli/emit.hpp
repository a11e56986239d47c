#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mkmimo::cli {

// Unit attached to an emitted value. Nats-valued columns get a _nats suffix
// (or _bits under the display flag, dividing by ln 2); squared-nats columns
// get _nats2 (or _bits2, dividing by ln^2 2); dimensionless values are
// emitted as-is.
enum class Unit { none, nats, nats2 };

struct Column {
  std::string tag;  // stable identifier, e.g. "eq14_mu"; unit suffix is appended
  Unit unit = Unit::none;
  bool integer = false;  // render as an integer literal
  std::vector<double> values;
};

// One summary entry: `key = value` in the structured-text report.
struct Entry {
  enum class Kind { text, real, integer };
  std::string key;
  Unit unit = Unit::none;
  Kind kind = Kind::text;
  std::string text;
  double value = 0.0;
};

// Everything one experiment run emits: the CSV curve plus the summary lines.
struct Report {
  std::vector<Column> columns;
  std::vector<Entry> entries;

  Column& add_column(std::string tag, Unit unit, bool integer = false);
  void add_text(std::string key, std::string text);
  void add_real(std::string key, Unit unit, double value);
  void add_int(std::string key, std::uint64_t value);
};

// Full-precision scientific literal (17 significant digits).
std::string format_real(double x);

// FNV-1a 64-bit hex digest of a byte string.
std::string fnv1a_hex(const std::string& bytes);

// Writes <out_base>.csv and <out_base>.txt, creating parent directories.
// Throws std::runtime_error when a file cannot be written. All columns must
// share one length.
void write_report(const Report& report, const std::string& out_base, bool bits);

}  // namespace mkmimo::cli
