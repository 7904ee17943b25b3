#pragma once

#include <numeric>
#include <vector>

namespace jcs {

/// Element of Z^N. Ordered lexicographically by std::vector's operator<.
using MultiIndex = std::vector<int>;

inline int level(const MultiIndex& t) { return std::accumulate(t.begin(), t.end(), 0); }

inline MultiIndex unit_index(int n, int k) {
  MultiIndex e(n, 0);
  e[k] = 1;
  return e;
}

inline MultiIndex shifted(MultiIndex t, int k, int by = 1) {
  t[k] += by;
  return t;
}

inline bool nonnegative(const MultiIndex& t) {
  for (int v : t)
    if (v < 0) return false;
  return true;
}

/// All t in Z_+^N with |t| = degree, in ascending lexicographic order.
inline std::vector<MultiIndex> indices_of_degree(int n, int degree) {
  std::vector<MultiIndex> out;
  if (n <= 0 || degree < 0) return out;
  MultiIndex cur(n, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, degree);
  return out;
}

/// All t in Z_+^N with lo <= |t| <= hi, grouped by degree.
inline std::vector<MultiIndex> indices_up_to(int n, int hi, int lo = 0) {
  std::vector<MultiIndex> out;
  for (int m = lo; m <= hi; ++m) {
    auto part = indices_of_degree(n, m);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

/// |t|! / prod t_j!, computed in floating point.
inline double multinomial(const MultiIndex& t) {
  double r = 1.0;
  int total = 0;
  for (int v : t) {
    for (int i = 1; i <= v; ++i) {
      ++total;
      r = r * total / i;
    }
  }
  return r;
}

}  // namespace jcs
