#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dryfric::extrapolate {

enum class Provenance { computed, extrapolated };

const char* provenance_name(Provenance p) noexcept;

struct Cell {
  double value = 0.0;
  Provenance provenance = Provenance::computed;
};

/// Values S(k, l) of one statistic with p = 2^k and delta = 2^-l.
class StatGrid {
 public:
  using Key = std::pair<int, int>;

  void set_computed(int k, int l, double value);
  bool has(int k, int l) const;
  double value(int k, int l) const;  ///< throws InvalidArgument when absent
  Provenance provenance(int k, int l) const;
  const std::map<Key, Cell>& cells() const noexcept { return cells_; }

  /// Inserts an extrapolated value; refuses to overwrite a computed cell.
  void set_extrapolated(int k, int l, double value);

 private:
  std::map<Key, Cell> cells_;
};

/// Needs S(k, l-1..l-3) and S(k-1..k-3, l). Predicts
///   S_V = S(k,l-1) + R_V(k,l-1) (S(k,l-1) - S(k,l-2))
///   S_H = S(k-1,l) + R_H(k-1,l) (S(k-1,l) - S(k-2,l))
/// and returns (S_V + S_H)/2. A ratio whose denominator is exactly zero is
/// taken as 0. Throws InvalidArgument on a missing predecessor.
double extrapolate_cell(const StatGrid& S, int k, int l);

bool can_extrapolate(const StatGrid& S, int k, int l);

enum class FillOrder { dependency, row_major };

/// Fills `targets` in the requested order. Computed cells among the targets
/// are left untouched. Throws InvalidArgument when a target cannot be
/// resolved.
StatGrid propagate(StatGrid S, const std::vector<StatGrid::Key>& targets,
                   FillOrder order = FillOrder::dependency);

/// CSV with columns statistic,k,l,value,provenance; one StatGrid per name.
std::map<std::string, StatGrid> read_grids_csv(std::istream& in);
void write_grids_csv(std::ostream& out, const std::map<std::string, StatGrid>& grids);

}  // namespace dryfric::extrapolate
