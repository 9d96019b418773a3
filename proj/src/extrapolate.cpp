#include "dryfric/extrapolate.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "dryfric/csv.hpp"
#include "dryfric/error.hpp"

namespace dryfric::extrapolate {

const char* provenance_name(Provenance p) noexcept {
  return p == Provenance::computed ? "computed" : "extrapolated";
}

void StatGrid::set_computed(int k, int l, double value) {
  cells_[{k, l}] = Cell{value, Provenance::computed};
}

bool StatGrid::has(int k, int l) const { return cells_.count({k, l}) != 0; }

double StatGrid::value(int k, int l) const {
  auto it = cells_.find({k, l});
  if (it == cells_.end()) {
    std::ostringstream os;
    os << "no value for cell (" << k << ", " << l << ")";
    throw InvalidArgument(os.str());
  }
  return it->second.value;
}

Provenance StatGrid::provenance(int k, int l) const {
  auto it = cells_.find({k, l});
  if (it == cells_.end()) throw InvalidArgument("no such cell");
  return it->second.provenance;
}

void StatGrid::set_extrapolated(int k, int l, double value) {
  auto it = cells_.find({k, l});
  if (it != cells_.end() && it->second.provenance == Provenance::computed)
    throw InvalidArgument("refusing to overwrite a computed cell");
  cells_[{k, l}] = Cell{value, Provenance::extrapolated};
}

namespace {

// (a - b) / (b - c) with the zero-denominator convention.
double ratio(double a, double b, double c) {
  const double den = b - c;
  return den == 0.0 ? 0.0 : (a - b) / den;
}

}  // namespace

bool can_extrapolate(const StatGrid& S, int k, int l) {
  for (int d = 1; d <= 3; ++d)
    if (!S.has(k, l - d) || !S.has(k - d, l)) return false;
  return true;
}

double extrapolate_cell(const StatGrid& S, int k, int l) {
  if (!can_extrapolate(S, k, l)) {
    std::ostringstream os;
    os << "cell (" << k << ", " << l << ") lacks predecessors";
    throw InvalidArgument(os.str());
  }
  const double v1 = S.value(k, l - 1), v2 = S.value(k, l - 2), v3 = S.value(k, l - 3);
  const double h1 = S.value(k - 1, l), h2 = S.value(k - 2, l), h3 = S.value(k - 3, l);
  const double SV = v1 + ratio(v1, v2, v3) * (v1 - v2);
  const double SH = h1 + ratio(h1, h2, h3) * (h1 - h2);
  return 0.5 * (SV + SH);
}

StatGrid propagate(StatGrid S, const std::vector<StatGrid::Key>& targets, FillOrder order) {
  std::vector<StatGrid::Key> pending;
  for (const auto& t : targets)
    if (!(S.has(t.first, t.second) && S.provenance(t.first, t.second) == Provenance::computed))
      pending.push_back(t);

  if (order == FillOrder::row_major) {
    std::sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    for (const auto& [k, l] : pending) S.set_extrapolated(k, l, extrapolate_cell(S, k, l));
    return S;
  }

  while (!pending.empty()) {
    std::vector<StatGrid::Key> next;
    bool progress = false;
    for (const auto& [k, l] : pending) {
      if (can_extrapolate(S, k, l)) {
        S.set_extrapolated(k, l, extrapolate_cell(S, k, l));
        progress = true;
      } else {
        next.emplace_back(k, l);
      }
    }
    if (!progress) {
      std::ostringstream os;
      os << "unresolvable dependency at cell (" << next.front().first << ", " << next.front().second
         << ")";
      throw InvalidArgument(os.str());
    }
    pending.swap(next);
  }
  return S;
}

std::map<std::string, StatGrid> read_grids_csv(std::istream& in) {
  std::map<std::string, StatGrid> out;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = csv::split(line);
    if (!header) {
      if (f.size() < 4 || f[0] != "statistic" || f[1] != "k" || f[2] != "l" || f[3] != "value")
        throw ConfigError("grid CSV header must start with statistic,k,l,value");
      header = true;
      continue;
    }
    if (f.size() < 4) throw ConfigError("grid CSV line " + std::to_string(lineno) + " is short");
    try {
      const int k = std::stoi(f[1]);
      const int l = std::stoi(f[2]);
      const double v = std::stod(f[3]);
      // only computed cells are read; extrapolated ones are recomputed
      if (f.size() >= 5 && f[4] == "extrapolated") continue;
      out[f[0]].set_computed(k, l, v);
    } catch (const std::logic_error&) {
      throw ConfigError("grid CSV line " + std::to_string(lineno) + " is not numeric");
    }
  }
  if (!header) throw ConfigError("grid CSV is empty");
  return out;
}

void write_grids_csv(std::ostream& out, const std::map<std::string, StatGrid>& grids) {
  out << "statistic,k,l,value,provenance\n";
  for (const auto& [name, g] : grids)
    for (const auto& [key, cell] : g.cells())
      out << name << ',' << key.first << ',' << key.second << ',' << csv::number(cell.value) << ','
          << provenance_name(cell.provenance) << '\n';
}

}  // namespace dryfric::extrapolate
