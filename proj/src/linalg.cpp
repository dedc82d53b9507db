#include "occutime/linalg.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "occutime/error.hpp"

namespace occutime::linalg {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (!m.square()) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": matrix is not square");
  }
}

}  // namespace

LuDecomposition::LuDecomposition(const Matrix& m) : lu_(m), perm_(m.rows()) {
  require_square(m, "lu");
  const std::size_t n = m.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double tol = 1e-12 * max_row_norm(m);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const double pivot = lu_(k, k);
    if (std::abs(pivot) <= tol) {
      singular_ = true;
      if (pivot == 0.0) continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

double LuDecomposition::determinant() const noexcept {
  double d = sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
  return d;
}

Vector LuDecomposition::solve(std::span<const double> rhs) const {
  if (singular_) throw Error(ErrorCode::SingularMatrix, "solve: matrix is singular");
  const std::size_t n = lu_.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Matrix LuDecomposition::inverse() const {
  if (singular_) throw Error(ErrorCode::SingularMatrix, "inverse: matrix is singular");
  const std::size_t n = lu_.rows();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

double det(const Matrix& m) {
  require_square(m, "det");
  if (m.rows() == 0) return 1.0;
  return LuDecomposition(m).determinant();
}

Matrix inverse(const Matrix& m) { return LuDecomposition(m).inverse(); }

double signed_minor(const Matrix& m, std::size_t x, std::size_t y) {
  require_square(m, "signed_minor");
  if (x >= m.cols() || y >= m.rows()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "signed_minor: index (" + std::to_string(x) + ", " + std::to_string(y) +
                    ") out of range for n = " + std::to_string(m.rows()),
                y, x);
  }
  const double sign = ((x + y) % 2 == 0) ? 1.0 : -1.0;
  return sign * det(m.without(y, x));
}

Matrix cholesky(const Matrix& s) {
  require_square(s, "cholesky");
  const std::size_t n = s.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-10 * std::max(1.0, std::abs(s(i, j)))) {
        throw Error(ErrorCode::InvalidInput, "cholesky: matrix is not symmetric", i, j);
      }

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky: non-positive pivot at index " + std::to_string(j), j, j);
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

}  // namespace occutime::linalg
