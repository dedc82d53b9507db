#include "occutime/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occutime/error.hpp"
#include "occutime/linalg.hpp"

namespace occutime {

namespace {

constexpr std::array<std::array<double, 3>, 5> kProbes{{
    {1.0, 1.0, 1.0},
    {0.5, 2.0, 0.25},
    {3.0, 0.1, 1.7},
    {0.0, 1.3, 4.0},
    {2.2, 0.0, 0.6},
}};

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// det(diag(d1, d2*, 0) - A) written out as in the factorisation argument.
double shifted_pair_det(const ReducedTriple& t, const MarginalPair& p, double d1, double d2,
                        double d3) {
  const double a11 = t.coef(1, 1), a12 = t.coef(1, 2), a21 = t.coef(2, 1);
  const double a22 = t.coef(2, 2), a23 = t.coef(2, 3), a31 = t.coef(3, 1);
  const double a32 = t.coef(3, 2), a33 = t.coef(3, 3);
  const double d2_star = d2 + p.a23_t * p.a23_t * d3 / (a33 * (d3 + a33));
  return (d1 + a11) * (d2_star + a22) * a33 - (d1 + a11) * a23 * a32 - a12 * a21 * a33 -
         a12 * a23 * a31;
}

}  // namespace

Matrix ReducedTriple::negated_generator() const {
  Matrix m(3, 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = r == c ? a(r, c) : -a(r, c);
  return m;
}

ReducedTriple reduce_window(const GeneratorMatrix& g, std::size_t center) {
  const std::size_t n = g.n();
  if (!g.skip_free()) throw Error(ErrorCode::NotSkipFree, "reduction requires a skip-free block");
  if (center < 2 || center >= n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "window centre " + std::to_string(center) + " needs 2 <= i0 < n");
  }
  const double tol = g.zero_tol();
  Matrix m = -g.q();
  double scale = 1.0;

  auto require_pivot = [&](std::size_t r) {
    if (!(m(r, r) > tol)) {
      throw Error(ErrorCode::EliminationBreakdown,
                  "non-positive pivot at " + std::to_string(r) + " during reduction", r, r);
    }
    scale *= m(r, r);
  };

  // Columns left to right: clear (j-1, j) for j <= center-2.
  for (std::size_t j = 1; j + 2 <= center; ++j) {
    require_pivot(j - 1);
    const double f = m(j - 1, j) / m(j - 1, j - 1);
    for (std::size_t r = 0; r < n; ++r) m(r, j) -= f * m(r, j - 1);
    m(j - 1, j) = 0.0;
  }

  // Rows bottom up: clear (j-1, j) for j >= center+1.
  for (std::size_t j = n - 1; j >= center + 1; --j) {
    require_pivot(j);
    const double f = m(j - 1, j) / m(j, j);
    for (std::size_t c = 0; c < n; ++c) m(j - 1, c) -= f * m(j, c);
    m(j - 1, j) = 0.0;
  }

  ReducedTriple t;
  t.i0 = center;
  t.scale_c = scale;
  t.a = Matrix(3, 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = m(center - 2 + r, center - 2 + c);
      t.a(r, c) = r == c ? v : -v;
    }
  return t;
}

ReducedTriple reduce_to_triple(const GeneratorMatrix& g, std::size_t i0) {
  const auto violation = find_violation_index(g);
  if (!violation) {
    throw Error(ErrorCode::NotApplicable, "generator is tridiagonal; nothing to reduce");
  }
  if (*violation != i0) {
    throw Error(ErrorCode::NotApplicable, "i0 = " + std::to_string(i0) +
                                              " is not the first violation index " +
                                              std::to_string(*violation));
  }
  ReducedTriple t = reduce_window(g, i0);
  const double tol = g.zero_tol();
  const bool ok = t.coef(1, 2) > tol && t.coef(2, 3) > tol && t.coef(3, 1) > tol &&
                  t.coef(2, 1) >= -tol && t.coef(3, 2) >= -tol && t.coef(1, 3) == 0.0;
  if (!ok) {
    throw Error(ErrorCode::EliminationBreakdown,
                "reduced triple violates the sign pattern a12, a23, a31 > 0");
  }
  for (std::size_t r = 0; r < 3; ++r) {
    double row_sum = -t.a(r, r);
    for (std::size_t c = 0; c < 3; ++c)
      if (c != r) row_sum += t.a(r, c);
    if (row_sum > tol * std::max(1.0, t.a(r, r))) {
      throw Error(ErrorCode::EliminationBreakdown,
                  "reduced triple row " + std::to_string(r) + " has positive row sum", r);
    }
  }
  return t;
}

ReducedTriple reduce_to_triple(const GeneratorMatrix& g) {
  const auto violation = find_violation_index(g);
  if (!violation) {
    throw Error(ErrorCode::NotApplicable, "generator is tridiagonal; nothing to reduce");
  }
  return reduce_to_triple(g, *violation);
}

MarginalPair pair_reduction(const ReducedTriple& t) {
  const double a11 = t.coef(1, 1);
  return {t.coef(2, 2) - t.coef(1, 2) * t.coef(2, 1) / a11,
          std::sqrt(t.coef(2, 3) * t.coef(3, 2) +
                    t.coef(1, 2) * t.coef(2, 3) * t.coef(3, 1) / a11),
          t.coef(3, 3)};
}

double triple_transform(const ReducedTriple& t, double d1, double d2, double d3) {
  const Matrix minus_a = t.negated_generator();
  const std::array<double, 3> d{d1, d2, d3};
  return linalg::det(minus_a) / linalg::det(add_diagonal(minus_a, d));
}

double conditional_lt(const ReducedTriple& t, double x2, double d3) {
  const MarginalPair p = pair_reduction(t);
  const double a33 = p.a33;
  return a33 / (d3 + a33) * std::exp(-p.a23_t * p.a23_t * d3 * x2 / (a33 * (d3 + a33)));
}

double markov_mismatch(const ReducedTriple& t, double d1, double d3) {
  return t.coef(1, 2) * t.coef(2, 3) * t.coef(3, 1) * (d1 * d3 - t.coef(1, 1) * t.coef(3, 3));
}

double factorization_defect(const ReducedTriple& t, double d1, double d3) {
  return t.coef(1, 2) * t.coef(2, 3) * t.coef(3, 1) * d1 * d3 / t.coef(1, 1);
}

double factorization_residual(const ReducedTriple& t, double d1, double d2, double d3) {
  const MarginalPair p = pair_reduction(t);
  const double a33 = t.coef(3, 3);
  const double minus_a_det = linalg::det(t.negated_generator());
  return triple_transform(t, d1, d2, d3) -
         a33 / (d3 + a33) * minus_a_det / shifted_pair_det(t, p, d1, d2, d3);
}

MarkovVerdict markov_verdict(const GeneratorMatrix& g) {
  if (!g.skip_free()) {
    throw Error(ErrorCode::NotSkipFree, "Markov verdict requires a skip-free generator");
  }
  MarkovVerdict v;
  v.is_markov = g.tridiagonal();
  const std::size_t n = g.n();

  if (v.is_markov) {
    for (std::size_t k = 2; k < n; ++k) {
      const ReducedTriple t = reduce_window(g, k);
      for (const auto& d : kProbes)
        v.max_window_residual =
            std::max(v.max_window_residual, std::abs(factorization_residual(t, d[0], d[1], d[2])));
    }
    if (v.max_window_residual > 1e-8) {
      throw Error(ErrorCode::InternalConsistency,
                  "tridiagonal generator but factorisation residual " +
                      std::to_string(v.max_window_residual));
    }
    return v;
  }

  MarkovWitness w{};
  w.triple = reduce_to_triple(g);
  w.i0 = w.triple.i0;
  const ReducedTriple& t = w.triple;
  w.probe = {1.0 + t.coef(1, 1) * t.coef(3, 3), 1.0, 1.0};
  w.mismatch_at_probe = markov_mismatch(t, w.probe[0], w.probe[2]);
  w.mismatch_at_unit = markov_mismatch(t, 1.0, 1.0);
  w.defect_at_probe = factorization_defect(t, w.probe[0], w.probe[2]);
  w.residual_at_probe = factorization_residual(t, w.probe[0], w.probe[1], w.probe[2]);

  // The reduced block must reproduce the full determinant ...
  const Matrix minus_q = -g.q();
  for (const auto& d : kProbes) {
    Vector full(n, 0.0);
    full[w.i0 - 2] = d[0];
    full[w.i0 - 1] = d[1];
    full[w.i0] = d[2];
    const double lhs = linalg::det(add_diagonal(minus_q, full));
    const double rhs = t.scale_c * linalg::det(add_diagonal(t.negated_generator(), d));
    if (rel_diff(lhs, rhs) > 1e-9) {
      throw Error(ErrorCode::InternalConsistency, "reduced determinant does not match full one");
    }
  }
  // ... and the residual must agree with the closed-form defect.
  const auto [d1, d2, d3] = w.probe;
  const double det_shift =
      linalg::det(add_diagonal(t.negated_generator(), std::array<double, 3>{d1, d2, d3}));
  const double predicted = linalg::det(t.negated_generator()) * w.defect_at_probe /
                           (det_shift * shifted_pair_det(t, pair_reduction(t), d1, d2, d3) *
                            (d3 + t.coef(3, 3)));
  if (!(w.residual_at_probe != 0.0) || rel_diff(w.residual_at_probe, predicted) > 1e-6) {
    throw Error(ErrorCode::InternalConsistency,
                "non-Markov certificate does not match the closed-form defect");
  }
  v.witness = w;
  return v;
}

}  // namespace occutime
