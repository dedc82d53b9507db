#pragma once

#include <cstddef>
#include <span>

#include "occutime/generator.hpp"
#include "occutime/matrix.hpp"

namespace occutime {

// Killing rates d >= 0; the argument of the occupation-time Laplace transform.
class KillingVector {
 public:
  KillingVector() = default;
  explicit KillingVector(Vector d);
  static KillingVector zeros(std::size_t n) { return KillingVector(Vector(n, 0.0)); }

  std::size_t size() const noexcept { return d_.size(); }
  double operator[](std::size_t i) const { return d_[i]; }
  std::span<const double> values() const noexcept { return d_; }
  bool is_zero() const noexcept;

 private:
  Vector d_;
};

// (-Q)^{-1}. Entry (x, i) is the expected time spent in i before exit,
// starting from x.
struct GreenMatrix {
  Matrix g;
};

GreenMatrix green(const GeneratorMatrix& g);

// E_0[exp(-sum_i d_i l^i)] for a skip-free block: |-Q_n| / |D - Q_n|.
double joint_lt_skipfree(const GeneratorMatrix& g, const KillingVector& d);

// E_x[exp(-sum_u d_u l^u)] for any killed chain, evaluated term by term as
//   |-Q|/|D-Q| * sum_y (|(D-Q)^{(x,y)}| / |-Q|) * exit[y]
// with |(D-Q)^{(x,y)}| the signed minor (cofactor) of D-Q.
double joint_lt_general(const GeneratorMatrix& g, std::size_t start, const KillingVector& d);

// Rate of the exponential marginal law of l^i under P_0: 1 / green(i, i).
double marginal_rate(const GeneratorMatrix& g, std::size_t i);
Vector marginal_rates(const GeneratorMatrix& g);

// Cov(l^i, l^j) under P_start, read off the transform by central finite
// differences in d around 0 with step h_i = 1e-5 * (1 + green(i, i)).
Matrix occupation_covariance(const GeneratorMatrix& g, std::size_t start);

}  // namespace occutime
