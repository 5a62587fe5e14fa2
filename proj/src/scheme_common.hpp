// Small shared helpers for composing the block systems of the schemes.
#pragma once

#include <vector>

#include "fsi/linsolve.hpp"

namespace fsi::detail {

// Append scale * S with rows/cols renumbered through `map` (small interface
// operator lifted into a global dof numbering).
inline void append_lifted(std::vector<Triplet>& out, const SparseMatrix& S,
                          const std::vector<int>& map, double scale) {
  for (int r = 0; r < S.rows(); ++r)
    for (int k = S.row_ptr()[r]; k < S.row_ptr()[r + 1]; ++k)
      out.push_back({map[r], map[S.col_idx()[k]], scale * S.values()[k]});
}

inline DenseVector gather(const DenseVector& global, const std::vector<int>& map) {
  DenseVector s(static_cast<int>(map.size()));
  for (size_t i = 0; i < map.size(); ++i) s[static_cast<int>(i)] = global[map[i]];
  return s;
}

inline void scatter_add(DenseVector& global, const std::vector<int>& map,
                        const DenseVector& small, double scale = 1.0) {
  for (size_t i = 0; i < map.size(); ++i)
    global[map[i]] += scale * small[static_cast<int>(i)];
}

inline void zero_constrained(DenseVector& v, const std::vector<Constraint>& cs) {
  for (const auto& c : cs) v[c.dof] = c.value;  // homogeneous in all schemes
}

}  // namespace fsi::detail
