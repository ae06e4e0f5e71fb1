#include "synctrans/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "synctrans/error.hpp"

namespace synctrans {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
  if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
  auto r = row();
  for (const auto& h : header) r.add(std::string_view(h));
}

CsvWriter::Row::~Row() { w_.out_ << '\n'; }

void CsvWriter::Row::sep() {
  if (!first_) w_.out_ << ',';
  first_ = false;
}

CsvWriter::Row& CsvWriter::Row::add(double v) {
  sep();
  w_.out_ << format_double(v);
  return *this;
}

CsvWriter::Row& CsvWriter::Row::add(long long v) {
  sep();
  w_.out_ << v;
  return *this;
}

CsvWriter::Row& CsvWriter::Row::add(std::string_view v) {
  sep();
  w_.out_ << v;
  return *this;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double width = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + width * static_cast<double>(i);
  out.back() = hi;
  return out;
}

namespace {

double parse_bound(std::string_view text, double period, std::string_view spec) {
  bool periods = false;
  if (!text.empty() && (text.back() == 'T' || text.back() == 't')) {
    periods = true;
    text.remove_suffix(1);
  }
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError("grid '" + std::string(spec) + "': bad number '" + std::string(text) + "'");
  if (periods) {
    if (!std::isfinite(period))
      throw ConfigError("grid '" + std::string(spec) + "': 'T' suffix needs a known period");
    v *= period;
  }
  return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec, double period) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos || spec.find(':', c2 + 1) != std::string_view::npos)
    throw ConfigError("grid '" + std::string(spec) + "' must look like lo:hi:count");
  const double lo = parse_bound(spec.substr(0, c1), period, spec);
  const double hi = parse_bound(spec.substr(c1 + 1, c2 - c1 - 1), period, spec);
  const auto count_text = spec.substr(c2 + 1);
  long long count = 0;
  auto res = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (res.ec != std::errc() || res.ptr != count_text.data() + count_text.size() || count < 1)
    throw ConfigError("grid '" + std::string(spec) + "': count must be a positive integer");
  if (count > 1 && !(hi > lo)) throw ConfigError("grid '" + std::string(spec) + "': need hi > lo");
  return linspace(lo, hi, static_cast<std::size_t>(count));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace synctrans
