#include "occutime/generator.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "occutime/error.hpp"

namespace occutime {

namespace {

std::string at(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

bool reaches_exit(const Matrix& q, const Vector& exit, double tol) {
  const std::size_t n = q.rows();
  // Backward search from states with positive exit along reversed edges.
  std::vector<bool> good(n, false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (exit[i] > tol) {
      good[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t y = stack.back();
    stack.pop_back();
    for (std::size_t x = 0; x < n; ++x) {
      if (!good[x] && x != y && q(x, y) > tol) {
        good[x] = true;
        stack.push_back(x);
      }
    }
  }
  for (bool b : good)
    if (!b) return false;
  return true;
}

}  // namespace

GeneratorMatrix GeneratorMatrix::validate(const Matrix& raw, GeneratorKind kind,
                                          double zero_tol) {
  if (!raw.square() || raw.rows() == 0) {
    throw Error(ErrorCode::InvalidInput, "generator must be a non-empty square matrix");
  }
  const std::size_t n = raw.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(raw(i, j))) {
        throw Error(ErrorCode::InvalidInput, "non-finite entry at " + at(i, j), i, j);
      }

  GeneratorMatrix g;
  g.q_ = raw;
  g.kind_ = kind;
  g.zero_tol_ = zero_tol;
  g.exit_.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = raw(i, j);
      if (j != i && v < 0.0) {
        throw Error(ErrorCode::NegativeOffDiagonal,
                    "off-diagonal entry " + at(i, j) + " is negative", i, j);
      }
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(raw(i, i)) <= zero_tol) {
      throw Error(ErrorCode::ZeroDiagonal, "diagonal entry of row " + std::to_string(i) +
                                               " is zero", i, i);
    }
    if (sum > zero_tol * scale) {
      throw Error(ErrorCode::PositiveRowSum,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum) + " > 0", i);
    }
    const double deficit = sum < 0.0 ? -sum : 0.0;
    if (kind == GeneratorKind::FullConservative && deficit > zero_tol * scale) {
      throw Error(ErrorCode::NonConservativeRow,
                  "row " + std::to_string(i) + " of a full generator does not sum to 0", i);
    }
    g.exit_[i] = deficit > zero_tol * scale ? deficit : 0.0;
  }

  g.tridiagonal_ = true;
  for (std::size_t i = 0; i < n && g.tridiagonal_; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i > j + 1 || j > i + 1) && std::abs(raw(i, j)) > zero_tol) {
        g.tridiagonal_ = false;
        break;
      }

  bool sf = g.exit_[n - 1] > 0.0;
  for (std::size_t i = 0; i < n && sf; ++i) {
    for (std::size_t j = i + 2; j < n; ++j)
      if (raw(i, j) > zero_tol) sf = false;
    if (i + 1 < n && !(raw(i, i + 1) > zero_tol)) sf = false;
    if (i + 1 < n && g.exit_[i] > 0.0) sf = false;
  }
  g.skip_free_ = sf;
  g.killing_reachable_ = reaches_exit(raw, g.exit_, zero_tol);
  return g;
}

Matrix EmbeddedChain::reconstruct() const {
  const std::size_t n = p.rows();
  Matrix q(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const double identity_minus_p = (x == y ? 1.0 : 0.0) - p(x, y);
      q(x, y) = -hold[x] * identity_minus_p;
    }
  return q;
}

EmbeddedChain embedded_chain(const GeneratorMatrix& g) {
  const std::size_t n = g.n();
  EmbeddedChain chain{Matrix(n, n), Vector(n), Vector(n)};
  for (std::size_t x = 0; x < n; ++x) {
    const double h = -g(x, x);
    chain.hold[x] = h;
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) chain.p(x, y) = g(x, y) / h;
    chain.kill_prob[x] = g.exit()[x] / h;
  }
  return chain;
}

bool is_tridiagonal(const GeneratorMatrix& g) { return g.tridiagonal(); }

std::optional<std::size_t> find_violation_index(const GeneratorMatrix& g) {
  for (std::size_t i = 2; i < g.n(); ++i)
    for (std::size_t j = 0; j + 2 <= i; ++j)
      if (std::abs(g(i, j)) > g.zero_tol()) return i;
  return std::nullopt;
}

SymmetrizedGenerator symmetrize(const GeneratorMatrix& g) {
  if (!g.tridiagonal()) {
    const auto i0 = find_violation_index(g);
    throw Error(ErrorCode::NotTridiagonal,
                "generator is not tridiagonal; only birth-death blocks are diagonally "
                "conjugate to a symmetric matrix",
                i0.value_or(no_index));
  }
  const std::size_t n = g.n();
  SymmetrizedGenerator out{Matrix(n, n), Vector(n, 1.0)};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double up = g(i, i + 1);
    const double down = g(i + 1, i);
    if (!(up > g.zero_tol()) || !(down > g.zero_tol())) {
      throw Error(ErrorCode::ZeroBackRate,
                  "rates between states " + std::to_string(i) + " and " +
                      std::to_string(i + 1) + " are not both positive",
                  i + 1, i);
    }
    out.pi[i + 1] = out.pi[i] * up / down;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j)
        out.qstar(i, j) = g(i, j);
      else if (i + 1 == j || j + 1 == i)
        out.qstar(i, j) = g(i, j) * std::sqrt(out.pi[i] / out.pi[j]);
    }
  return out;
}

}  // namespace occutime
