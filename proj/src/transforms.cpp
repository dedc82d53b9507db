#include "occutime/transforms.hpp"

#include <cmath>
#include <string>

#include "occutime/error.hpp"
#include "occutime/linalg.hpp"

namespace occutime {

KillingVector::KillingVector(Vector d) : d_(std::move(d)) {
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (!std::isfinite(d_[i]) || d_[i] < 0.0) {
      throw Error(ErrorCode::InvalidInput,
                  "killing rate d[" + std::to_string(i) + "] must be finite and >= 0", i);
    }
  }
}

bool KillingVector::is_zero() const noexcept {
  for (double v : d_)
    if (v != 0.0) return false;
  return true;
}

namespace {

void check_size(const GeneratorMatrix& g, std::size_t size) {
  if (size != g.n()) {
    throw Error(ErrorCode::InvalidInput, "killing vector has length " + std::to_string(size) +
                                             ", generator has n = " + std::to_string(g.n()));
  }
}

void require_skip_free(const GeneratorMatrix& g, const char* what) {
  if (!g.skip_free()) {
    throw Error(ErrorCode::NotSkipFree, std::string(what) + " requires a skip-free generator");
  }
}

void require_state(const GeneratorMatrix& g, std::size_t x) {
  if (x >= g.n()) {
    throw Error(ErrorCode::IndexOutOfRange, "state " + std::to_string(x) + " out of range");
  }
}

// The cofactor form for an arbitrary (possibly slightly negative) shift, used both by
// joint_lt_general and by the finite-difference moment extraction.
double general_transform(const GeneratorMatrix& g, std::size_t start,
                         std::span<const double> d) {
  const Matrix minus_q = -g.q();
  const Matrix shifted = add_diagonal(minus_q, d);
  const double det_minus_q = linalg::det(minus_q);
  const double det_shifted = linalg::det(shifted);
  if (det_minus_q == 0.0 || det_shifted == 0.0 ||
      linalg::LuDecomposition(shifted).singular()) {
    throw Error(ErrorCode::SingularMatrix, "D - Q is singular");
  }
  double sum = 0.0;
  for (std::size_t y = 0; y < g.n(); ++y) {
    const double exit_rate = g.exit()[y];
    if (exit_rate == 0.0) continue;
    sum += linalg::signed_minor(shifted, start, y) / det_minus_q * exit_rate;
  }
  return det_minus_q / det_shifted * sum;
}

}  // namespace

GreenMatrix green(const GeneratorMatrix& g) { return {linalg::inverse(-g.q())}; }

double joint_lt_skipfree(const GeneratorMatrix& g, const KillingVector& d) {
  require_skip_free(g, "joint_lt_skipfree");
  check_size(g, d.size());
  const Matrix minus_q = -g.q();
  const linalg::LuDecomposition lu(minus_q);
  if (lu.singular()) throw Error(ErrorCode::SingularMatrix, "-Q_n is singular");
  return lu.determinant() / linalg::det(add_diagonal(minus_q, d.values()));
}

double joint_lt_general(const GeneratorMatrix& g, std::size_t start, const KillingVector& d) {
  check_size(g, d.size());
  require_state(g, start);
  if (!g.killing_reachable()) {
    throw Error(ErrorCode::NoKillingReachable,
                "some state cannot reach a state with positive exit rate");
  }
  return general_transform(g, start, d.values());
}

double marginal_rate(const GeneratorMatrix& g, std::size_t i) {
  require_skip_free(g, "marginal_rate");
  require_state(g, i);
  return 1.0 / green(g).g(i, i);
}

Vector marginal_rates(const GeneratorMatrix& g) {
  require_skip_free(g, "marginal_rates");
  const GreenMatrix gm = green(g);
  Vector out(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) out[i] = 1.0 / gm.g(i, i);
  return out;
}

Matrix occupation_covariance(const GeneratorMatrix& g, std::size_t start) {
  require_state(g, start);
  if (!g.killing_reachable()) {
    throw Error(ErrorCode::NoKillingReachable,
                "some state cannot reach a state with positive exit rate");
  }
  const std::size_t n = g.n();
  const GreenMatrix gm = green(g);
  Vector h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = 1e-5 * (1.0 + gm.g(i, i));

  Vector d(n, 0.0);
  auto eval = [&](std::size_t i, double si, std::size_t j, double sj) {
    d.assign(n, 0.0);
    d[i] += si;
    d[j] += sj;
    return general_transform(g, start, d);
  };

  const double base = general_transform(g, start, Vector(n, 0.0));
  Vector mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] = -(eval(i, h[i], i, 0.0) - eval(i, -h[i], i, 0.0)) / (2.0 * h[i]);
  }

  Matrix cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double second =
        (eval(i, h[i], i, 0.0) - 2.0 * base + eval(i, -h[i], i, 0.0)) / (h[i] * h[i]);
    cov(i, i) = second - mean[i] * mean[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double mixed = (eval(i, h[i], j, h[j]) - eval(i, h[i], j, -h[j]) -
                            eval(i, -h[i], j, h[j]) + eval(i, -h[i], j, -h[j])) /
                           (4.0 * h[i] * h[j]);
      cov(i, j) = cov(j, i) = mixed - mean[i] * mean[j];
    }
  }
  return cov;
}

}  // namespace occutime
