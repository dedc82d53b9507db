#include "occutime/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <tuple>

#include "occutime/error.hpp"
#include "occutime/linalg.hpp"

namespace occutime {

GaussianSpec gaussian_spec(const GeneratorMatrix& g) {
  const SymmetrizedGenerator sym = symmetrize(g);
  Matrix sigma = linalg::inverse(-sym.qstar);
  // Symmetrise away round-off so the Cholesky symmetry check is meaningful.
  for (std::size_t i = 0; i < sigma.rows(); ++i)
    for (std::size_t j = i + 1; j < sigma.cols(); ++j)
      sigma(i, j) = sigma(j, i) = 0.5 * (sigma(i, j) + sigma(j, i));
  Matrix chol = linalg::cholesky(sigma);
  return {std::move(sigma), std::move(chol)};
}

Vector sample_occupation_gaussian(const GaussianSpec& spec, CounterRng& rng) {
  const std::size_t n = spec.sigma.rows();
  Vector z1(n), z2(n);
  for (std::size_t i = 0; i < n; ++i) std::tie(z1[i], z2[i]) = normal_pair(rng);
  const Vector eta = spec.chol * z1;
  const Vector eta_tilde = spec.chol * z2;
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (eta[i] * eta[i] + eta_tilde[i] * eta_tilde[i]);
  return out;
}

Vector sample_occupations_gaussian(const GaussianSpec& spec, std::size_t num_samples,
                                   std::uint64_t seed, const SimOptions& options) {
  const std::size_t n = spec.sigma.rows();
  Vector out(num_samples * n);
  if (num_samples == 0) return out;
  const BatchPlan plan(num_samples, options.num_batches);
  for_each_batch(plan.count(), options.threads, [&](std::size_t b) {
    CounterRng rng(seed, b);
    for (std::size_t k = 0; k < plan.size(b); ++k) {
      const Vector s = sample_occupation_gaussian(spec, rng);
      std::copy(s.begin(), s.end(), out.begin() + static_cast<std::ptrdiff_t>((plan.offset(b) + k) * n));
    }
  });
  return out;
}

SplitMatrix SplitMatrix::from(const Matrix& a) {
  if (!a.square()) throw Error(ErrorCode::InvalidInput, "split: matrix is not square");
  const Matrix at = a.transpose();
  SplitMatrix s{a, 0.5 * (a + at), 0.5 * (a - at)};
  linalg::cholesky(s.c);
  return s;
}

double phi(const Matrix& a, const KillingVector& d) {
  if (d.size() != a.rows()) {
    throw Error(ErrorCode::InvalidInput, "phi: killing vector length does not match");
  }
  const linalg::LuDecomposition lu(a);
  if (lu.singular()) throw Error(ErrorCode::SingularMatrix, "phi: |A| = 0");
  return lu.determinant() / linalg::det(add_diagonal(a, d.values()));
}

double phi(const SplitMatrix& a, const KillingVector& d) { return phi(a.a, d); }

double mass_identity_residual(const SplitMatrix& s) {
  const Matrix c_inv = linalg::inverse(s.c);
  const double lhs = linalg::det(s.c) * linalg::det(s.c + s.b * c_inv * s.b.transpose());
  const double det_a = linalg::det(s.a);
  return std::abs(lhs - det_a * det_a) / (det_a * det_a);
}

double mu_total_mass(const SplitMatrix& s) {
  const double det_a = linalg::det(s.a);
  if (!(det_a > 0.0)) {
    throw Error(ErrorCode::NonPositiveDeterminant, "mu_total_mass requires |A| > 0");
  }
  const double n = static_cast<double>(s.a.rows());
  return 2.0 * std::pow(2.0 * std::numbers::pi, n) / det_a;
}

}  // namespace occutime
