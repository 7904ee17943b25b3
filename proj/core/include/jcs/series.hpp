#pragma once

// Degree-truncated operator-valued power series on C^N with a geometric
// tail descriptor.

#include <map>
#include <vector>

#include "jcs/linalg.hpp"
#include "jcs/multiindex.hpp"

namespace jcs {

/// Bound on the dropped homogeneous parts: ||Σ_{|s|=n} c_s z^s|| <= magnitude * (Σ_k rho_k |z_k|)^n.
struct SeriesTail {
  enum class Kind { none, geometric };
  Kind kind = Kind::none;
  std::vector<double> rho;
  double magnitude = 0.0;
  /// Closed form Σ_{n>d} magnitude s^n = magnitude s^{d+1} / (1 - s); throws when s >= 1.
  double bound(const Point& z, int degree) const;
};

class TruncatedOperatorSeries {
public:
  TruncatedOperatorSeries() = default;
  TruncatedOperatorSeries(int n, int degree, int rows, int cols);

  int n() const noexcept { return n_; }
  int degree() const noexcept { return degree_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  /// Coefficient at s (zero when absent). |s| must not exceed the degree.
  Mat coefficient(const MultiIndex& s) const;
  void set(const MultiIndex& s, const Mat& value);
  /// Stored (possibly zero) coefficients in lexicographic order.
  const std::map<MultiIndex, Mat>& coefficients() const noexcept { return coeffs_; }

  SeriesTail tail;

private:
  int n_ = 1;
  int degree_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::map<MultiIndex, Mat> coeffs_;
};

struct EvalResult {
  Mat value;
  double tail_error = 0.0;
};

/// Σ_{|s|<=d} c_s z^s plus the tail bound at z.
EvalResult eval_series(const TruncatedOperatorSeries& s, const Point& z);

/// z^s as a scalar.
cplx monomial(const Point& z, const MultiIndex& s);

}  // namespace jcs
