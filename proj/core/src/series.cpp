#include "jcs/series.hpp"

#include <cmath>
#include <sstream>

namespace jcs {

double SeriesTail::bound(const Point& z, int degree) const {
  if (kind == Kind::none) return 0.0;
  if (rho.size() != z.size()) throw DimensionError("series tail: rho has the wrong length");
  double s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) s += rho[k] * std::abs(z[k]);
  if (s >= 1.0) {
    std::ostringstream os;
    os << "series evaluated outside its certified radius (tail ratio " << s << " >= 1)";
    throw NumericalError(os.str());
  }
  return magnitude * std::pow(s, degree + 1) / (1.0 - s);
}

TruncatedOperatorSeries::TruncatedOperatorSeries(int n, int degree, int rows, int cols)
    : n_(n), degree_(degree), rows_(rows), cols_(cols) {
  if (n < 1) throw DimensionError("series: N must be at least 1");
  if (degree < 0) throw DimensionError("series: negative degree");
  if (rows < 0 || cols < 0) throw DimensionError("series: negative shape");
}

Mat TruncatedOperatorSeries::coefficient(const MultiIndex& s) const {
  auto it = coeffs_.find(s);
  return it == coeffs_.end() ? Mat::Zero(rows_, cols_) : it->second;
}

void TruncatedOperatorSeries::set(const MultiIndex& s, const Mat& value) {
  if (static_cast<int>(s.size()) != n_ || !nonnegative(s))
    throw DimensionError("series: multi-index must lie in Z_+^N");
  if (level(s) > degree_) {
    std::ostringstream os;
    os << "series: coefficient of degree " << level(s) << " exceeds the bound " << degree_;
    throw DimensionError(os.str());
  }
  if (value.rows() != rows_ || value.cols() != cols_)
    throw DimensionError("series: coefficient shape differs from the series shape");
  coeffs_[s] = value;
}

cplx monomial(const Point& z, const MultiIndex& s) {
  cplx r = 1.0;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (int p = 0; p < s[k]; ++p) r *= z[k];
  return r;
}

EvalResult eval_series(const TruncatedOperatorSeries& s, const Point& z) {
  if (static_cast<int>(z.size()) != s.n()) throw DimensionError("eval_series: point has the wrong length");
  EvalResult r;
  r.tail_error = s.tail.bound(z, s.degree());
  // Powers z_k^p tabulated once; products taken per stored coefficient.
  std::vector<std::vector<cplx>> pw(s.n(), std::vector<cplx>(s.degree() + 1, 1.0));
  for (int k = 0; k < s.n(); ++k)
    for (int p = 1; p <= s.degree(); ++p) pw[k][p] = pw[k][p - 1] * z[k];
  r.value = Mat::Zero(s.rows(), s.cols());
  for (const auto& [idx, c] : s.coefficients()) {
    cplx m = 1.0;
    for (int k = 0; k < s.n(); ++k) m *= pw[k][idx[k]];
    r.value += m * c;
  }
  return r;
}

}  // namespace jcs
