#pragma once

#include <cstddef>
#include <optional>

#include "occutime/matrix.hpp"

namespace occutime {

inline constexpr double default_zero_tol = 1e-12;

enum class GeneratorKind { FullConservative, SubGenerator };

// A validated (sub-)generator on states 0..n-1. Rows may leak mass: the
// deficit -sum_j q_ij is the exit rate to the cemetery.
//
// Skip-free here means the matrix is the upper-left block Q_n of a chain that
// moves up at most one level per jump: q_ij = 0 for j > i+1, q_{i,i+1} > 0,
// and the only exit is from the top retained state (exit[n-1] > 0 plays the
// role of q_{n-1,n}).
class GeneratorMatrix {
 public:
  static GeneratorMatrix validate(const Matrix& raw, GeneratorKind kind,
                                  double zero_tol = default_zero_tol);

  std::size_t n() const noexcept { return q_.rows(); }
  const Matrix& q() const noexcept { return q_; }
  double operator()(std::size_t i, std::size_t j) const { return q_(i, j); }
  GeneratorKind kind() const noexcept { return kind_; }
  const Vector& exit() const noexcept { return exit_; }
  double zero_tol() const noexcept { return zero_tol_; }

  bool skip_free() const noexcept { return skip_free_; }
  bool tridiagonal() const noexcept { return tridiagonal_; }
  bool strictly_skip_free() const noexcept { return skip_free_ && !tridiagonal_; }
  // Every state reaches a state with positive exit rate in the jump graph.
  bool killing_reachable() const noexcept { return killing_reachable_; }

 private:
  GeneratorMatrix() = default;

  Matrix q_;
  GeneratorKind kind_ = GeneratorKind::SubGenerator;
  Vector exit_;
  double zero_tol_ = default_zero_tol;
  bool skip_free_ = false;
  bool tridiagonal_ = false;
  bool killing_reachable_ = false;
};

// Jump chain: p_xy = -q_xy / q_xx off the diagonal, p_xx = 0, and
// kill_prob[x] = exit[x] / hold[x] so each row of p plus kill_prob sums to 1.
struct EmbeddedChain {
  Matrix p;
  Vector hold;
  Vector kill_prob;

  // Q^diag (I - P), which must reproduce the source generator.
  Matrix reconstruct() const;
};

EmbeddedChain embedded_chain(const GeneratorMatrix& g);

bool is_tridiagonal(const GeneratorMatrix& g);

// Smallest i with q_ij > zero_tol for some j <= i-2.
std::optional<std::size_t> find_violation_index(const GeneratorMatrix& g);

struct SymmetrizedGenerator {
  Matrix qstar;
  // Reversing measure with pi[0] = 1.
  Vector pi;
};

// Diagonal conjugation diag(sqrt(pi)) Q diag(sqrt(pi))^{-1} of a birth-death
// block. Throws NotTridiagonal or ZeroBackRate.
SymmetrizedGenerator symmetrize(const GeneratorMatrix& g);

}  // namespace occutime
