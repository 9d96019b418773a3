#include "dryfric/csv.hpp"

#include <cstdio>
#include <sstream>

#include "dryfric/error.hpp"

#ifndef DRYFRIC_VERSION
#define DRYFRIC_VERSION "unknown"
#endif

namespace dryfric::csv {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* version() noexcept { return DRYFRIC_VERSION; }

Writer::Writer(const std::string& path, const std::string& config_hash,
               const std::vector<std::string>& columns)
    : path_(path), out_(path), columns_(columns.size()) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
  out_ << "# config_hash=" << config_hash << " version=" << version() << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) out_ << (c ? "," : "") << columns[c];
  out_ << '\n';
}

void Writer::separator() {
  if (in_row_++ > 0) out_ << ',';
}

Writer& Writer::cell(const std::string& s) {
  separator();
  out_ << s;
  return *this;
}

Writer& Writer::cell(double x) { return cell(number(x)); }

Writer& Writer::cell(long long x) { return cell(std::to_string(x)); }

Writer& Writer::cell(std::uint64_t x) { return cell(std::to_string(x)); }

void Writer::end_row() {
  if (in_row_ != columns_) throw IoError(path_ + ": row has the wrong number of cells");
  out_ << '\n';
  in_row_ = 0;
  if (!out_) throw IoError("write failure on " + path_);
}

}  // namespace dryfric::csv
