#include "emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mkmimo::cli {
namespace {

constexpr double ln2 = 0.6931471805599453;

std::string unit_suffix(Unit unit, bool bits) {
  switch (unit) {
    case Unit::none:
      return "";
    case Unit::nats:
      return bits ? "_bits" : "_nats";
    case Unit::nats2:
      return bits ? "_bits2" : "_nats2";
  }
  return "";
}

double unit_scale(Unit unit, bool bits) {
  if (!bits) return 1.0;
  switch (unit) {
    case Unit::none:
      return 1.0;
    case Unit::nats:
      return 1.0 / ln2;
    case Unit::nats2:
      return 1.0 / (ln2 * ln2);
  }
  return 1.0;
}

std::string format_int(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(x)));
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
  if (!out.flush()) throw std::runtime_error("cannot write output file " + path);
}

}  // namespace

Column& Report::add_column(std::string tag, Unit unit, bool integer) {
  columns.push_back(Column{std::move(tag), unit, integer, {}});
  return columns.back();
}

void Report::add_text(std::string key, std::string text) {
  entries.push_back(Entry{std::move(key), Unit::none, Entry::Kind::text, std::move(text), 0.0});
}

void Report::add_real(std::string key, Unit unit, double value) {
  entries.push_back(Entry{std::move(key), unit, Entry::Kind::real, {}, value});
}

void Report::add_int(std::string key, std::uint64_t value) {
  entries.push_back(
      Entry{std::move(key), Unit::none, Entry::Kind::integer, {}, static_cast<double>(value)});
}

std::string format_real(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_report(const Report& report, const std::string& out_base, bool bits) {
  std::size_t n_rows = 0;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i == 0) {
      n_rows = report.columns[i].values.size();
    } else if (report.columns[i].values.size() != n_rows) {
      throw std::runtime_error("csv column length mismatch at " + report.columns[i].tag);
    }
  }

  std::string csv;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i > 0) csv += ',';
    csv += report.columns[i].tag + unit_suffix(report.columns[i].unit, bits);
  }
  csv += '\n';
  for (std::size_t row = 0; row < n_rows; ++row) {
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
      const Column& col = report.columns[i];
      if (i > 0) csv += ',';
      csv += col.integer ? format_int(col.values[row])
                         : format_real(col.values[row] * unit_scale(col.unit, bits));
    }
    csv += '\n';
  }

  std::string txt = "# mkmimo summary\n";
  for (const Entry& e : report.entries) {
    txt += e.key + unit_suffix(e.unit, bits) + " = ";
    switch (e.kind) {
      case Entry::Kind::text:
        txt += e.text;
        break;
      case Entry::Kind::real:
        txt += format_real(e.value * unit_scale(e.unit, bits));
        break;
      case Entry::Kind::integer:
        txt += format_int(e.value);
        break;
    }
    txt += '\n';
  }

  write_file(out_base + ".csv", csv);
  write_file(out_base + ".txt", txt);
}

}  // namespace mkmimo::cli
