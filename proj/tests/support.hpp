#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "jcs/linalg.hpp"
#include "jcs/multiindex.hpp"

namespace jcs::test {

/// Real matrix literal, row by row.
inline Mat cmat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  Mat m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline std::vector<Point> polydisk_samples(int n, int count, double r, Rng& rng) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.polydisk_point(n, r));
  return out;
}

inline std::vector<Point> torus_samples(int n, int count, Rng& rng) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.torus_point(n));
  return out;
}

inline std::string index_string(const MultiIndex& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

}  // namespace jcs::test
