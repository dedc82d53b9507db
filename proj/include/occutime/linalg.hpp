#pragma once

#include <cstddef>

#include "occutime/matrix.hpp"

namespace occutime::linalg {

// LU factorisation with partial pivoting, PA = LU, unit lower L stored below
// the diagonal of `lu`.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& m);

  double determinant() const noexcept;
  // True when some |u_ii| falls below 1e-12 times the max row norm of the input.
  bool singular() const noexcept { return singular_; }
  Vector solve(std::span<const double> rhs) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

double det(const Matrix& m);

// Throws SingularMatrix when the pivot test of LuDecomposition fails.
Matrix inverse(const Matrix& m);

// (-1)^{x+y} * det(m without row y and column x), so that
// inverse(m)(x, y) == signed_minor(m, x, y) / det(m).
double signed_minor(const Matrix& m, std::size_t x, std::size_t y);

// Lower-triangular L with L L^T = s. Throws NotPositiveDefinite naming the
// failing pivot, or InvalidInput if s is not symmetric within 1e-10.
Matrix cholesky(const Matrix& s);

}  // namespace occutime::linalg
