#pragma once

#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace synctrans {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Plain comma-separated output. Numbers are written with format_double so
/// identical inputs always give identical bytes.
class CsvWriter {
 public:
  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row(const Row&) = delete;
    Row& operator=(const Row&) = delete;
    ~Row();

    Row& add(double v);
    Row& add(long long v);
    Row& add(int v) { return add(static_cast<long long>(v)); }
    Row& add(std::size_t v) { return add(static_cast<long long>(v)); }
    Row& add(std::string_view v);
    Row& add(const char* v) { return add(std::string_view(v)); }
    Row& add(bool v) { return add(static_cast<long long>(v ? 1 : 0)); }

   private:
    void sep();
    CsvWriter& w_;
    bool first_ = true;
  };

  /// Throws ConfigError when the file cannot be opened.
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  Row row() { return Row(*this); }

 private:
  std::ofstream out_;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Parses "lo:hi:count". Either bound may carry a trailing 'T', meaning a
/// multiple of `period` (which must then be finite). Throws ConfigError.
std::vector<double> parse_grid(std::string_view spec,
                               double period = std::numeric_limits<double>::quiet_NaN());

/// Reads a whole file; throws ConfigError on failure.
std::string read_file(const std::string& path);

void write_file(const std::string& path, std::string_view content);

}  // namespace synctrans
