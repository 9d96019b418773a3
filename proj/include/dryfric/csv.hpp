#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace dryfric::csv {

std::vector<std::string> split(const std::string& line, char sep = ',');

/// 12 significant digits, enough for downstream differencing of grid values.
std::string number(double x);

/// FNV-1a 64-bit digest in hex.
std::string digest(const std::string& text);

const char* version() noexcept;

/// CSV file whose first line is "# config_hash=... version=..." followed by a
/// header row.
class Writer {
 public:
  Writer(const std::string& path, const std::string& config_hash,
         const std::vector<std::string>& columns);

  Writer& cell(const std::string& s);
  Writer& cell(double x);
  Writer& cell(long long x);
  Writer& cell(std::uint64_t x);
  Writer& cell(int x) { return cell(static_cast<long long>(x)); }
  void end_row();

  const std::string& path() const noexcept { return path_; }

 private:
  void separator();

  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace dryfric::csv
