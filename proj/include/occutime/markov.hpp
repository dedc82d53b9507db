#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "occutime/generator.hpp"
#include "occutime/matrix.hpp"

namespace occutime {

// Effective 3x3 chain for the occupation times of states (i0-2, i0-1, i0),
// obtained by eliminating every other state of D - Q_n. The coefficients are
// stored with positive diagonal:
//
//   -A = | a11  -a12    0  |
//        | -a21  a22  -a23 |
//        | -a31 -a32   a33 |
//
// and det(D^{i0,3} - Q_n) = scale_c * det(diag(d1, d2, d3) - A).
struct ReducedTriple {
  Matrix a;  // a(r, r) = a_rr > 0, a(r, c) = a_rc >= 0
  double scale_c = 1.0;
  std::size_t i0 = 0;

  double coef(std::size_t r, std::size_t c) const { return a(r - 1, c - 1); }
  // -A as a matrix, i.e. the reduced block of D - Q_n at d = 0.
  Matrix negated_generator() const;
};

// Marginal (X2, X3) of the triple after integrating out X1:
// E[exp(-d2 X2 - d3 X3)] = |-A| / (a11 * det[[d2 + a22_t, -a23_t], [-a23_t, d3 + a33]]).
struct MarginalPair {
  double a22_t;
  double a23_t;
  double a33;
};

// Column sweep then row sweep around `center` (2 <= center < n); valid for any
// skip-free block whose pivots stay positive. Throws EliminationBreakdown.
ReducedTriple reduce_window(const GeneratorMatrix& g, std::size_t center);

// reduce_window at the first violation index, additionally checking the sign
// pattern a12, a23, a31 > 0. Throws NotApplicable for tridiagonal input or an
// i0 that is not the violation index.
ReducedTriple reduce_to_triple(const GeneratorMatrix& g, std::size_t i0);
ReducedTriple reduce_to_triple(const GeneratorMatrix& g);

MarginalPair pair_reduction(const ReducedTriple& t);

// |-A| / |D - A|
double triple_transform(const ReducedTriple& t, double d1, double d2, double d3);

// E[exp(-d3 X3) | X2 = x2].
double conditional_lt(const ReducedTriple& t, double x2, double d3);

// a12 a23 a31 (d1 d3 - a11 a33), the certificate term in its published form.
double markov_mismatch(const ReducedTriple& t, double d1, double d3);

// (d3 + a33) * det2(d1, d2*) - a33 * |D - A|, which expands to
// a12 a23 a31 d1 d3 / a11 (independent of d2). Zero iff the Markov
// factorisation holds at (d1, d3).
double factorization_defect(const ReducedTriple& t, double d1, double d3);

// |-A|/|D-A| - (a33 / (d3 + a33)) * |-A| / det2(d1, d2*), with
// d2* = d2 + a23_t^2 d3 / (a33 (d3 + a33)) and
// det2 = (d1+a11)(d2*+a22)a33 - (d1+a11)a23 a32 - a12 a21 a33 - a12 a23 a31.
double factorization_residual(const ReducedTriple& t, double d1, double d2, double d3);

struct MarkovWitness {
  std::size_t i0;
  ReducedTriple triple;
  std::array<double, 3> probe;  // (1 + a11 a33, 1, 1)
  double mismatch_at_probe;
  double mismatch_at_unit;      // d1 = d3 = 1
  double defect_at_probe;
  double residual_at_probe;
};

struct MarkovVerdict {
  bool is_markov = true;
  std::optional<MarkovWitness> witness;
  // Largest |factorization_residual| over all windows and the built-in probe
  // set; only computed for Markov (tridiagonal) inputs with n >= 3.
  double max_window_residual = 0.0;
};

// Throws NotSkipFree, or InternalConsistency when the numerical checks that
// back the verdict disagree with it.
MarkovVerdict markov_verdict(const GeneratorMatrix& g);

}  // namespace occutime
