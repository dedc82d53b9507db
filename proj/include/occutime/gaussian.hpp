#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "occutime/generator.hpp"
#include "occutime/matrix.hpp"
#include "occutime/random.hpp"
#include "occutime/simulate.hpp"
#include "occutime/transforms.hpp"

namespace occutime {

// Sigma = (-Q*)^{-1} for the symmetrised birth-death block, with its Cholesky
// factor. One half the sum of squares of two independent N(0, Sigma) vectors
// has the law of the occupation vector.
struct GaussianSpec {
  Matrix sigma;
  Matrix chol;
};

GaussianSpec gaussian_spec(const GeneratorMatrix& g);

Vector sample_occupation_gaussian(const GaussianSpec& spec, CounterRng& rng);

// Row-major num_samples x n buffer; batched like the path simulator.
Vector sample_occupations_gaussian(const GaussianSpec& spec, std::size_t num_samples,
                                   std::uint64_t seed, const SimOptions& options = {});

// A = C + B with C symmetric positive definite and B skew.
struct SplitMatrix {
  Matrix a;
  Matrix c;
  Matrix b;

  // Throws NotPositiveDefinite when (A + A^T)/2 has no Cholesky factor.
  static SplitMatrix from(const Matrix& a);
};

// |A| / |D + A|
double phi(const Matrix& a, const KillingVector& d);
double phi(const SplitMatrix& a, const KillingVector& d);

// |det C * det(C + B C^{-1} B^T) - det(A)^2| / det(A)^2.
double mass_identity_residual(const SplitMatrix& a);

// Total mass 2 (2 pi)^n / |A| of the measure
// (exp(-z^T A conj(z) / 2) + exp(-conj(z)^T A z / 2)) dz on C^n.
double mu_total_mass(const SplitMatrix& a);

}  // namespace occutime
