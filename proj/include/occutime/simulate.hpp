#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "occutime/error.hpp"
#include "occutime/generator.hpp"
#include "occutime/matrix.hpp"
#include "occutime/random.hpp"
#include "occutime/transforms.hpp"

namespace occutime {

enum class Terminal { Absorbed, Killed };

struct PathRecord {
  std::vector<std::size_t> states;  // Y_0, Y_1, ..., Y_eta
  std::vector<double> holds;        // S_{i+1} - S_i
  Vector occupation;
  Terminal terminal = Terminal::Absorbed;
  std::size_t jumps = 0;  // eta + 1, the final jump being the exit
};

struct SimOptions {
  std::size_t num_batches = 100;
  std::size_t max_jumps = 10'000'000;
  unsigned threads = 1;
};

// Precomputed jump table for one generator, optionally with extra killing.
// Immutable and shareable across threads.
class PathSampler {
 public:
  explicit PathSampler(const GeneratorMatrix& g);
  PathSampler(const GeneratorMatrix& g, const KillingVector& d);

  std::size_t n() const noexcept { return hold_.size(); }

  // Runs one trajectory from `start`, calling visit(state, hold) once per
  // sojourn. Returns the terminal kind; throws PathLengthExceeded (with zero
  // completed paths) past max_jumps.
  template <class Visitor>
  Terminal walk(std::size_t start, CounterRng& rng, std::size_t max_jumps,
                Visitor&& visit) const;

 private:
  struct Edge {
    double cumulative;
    std::size_t target;
  };

  std::vector<double> hold_;       // total exit rate of the sojourn (plus d)
  std::vector<double> kill_;       // d_x / (hold_x + d_x)
  std::vector<std::vector<Edge>> edges_;  // cumulative embedded probabilities
  bool killed_ = false;
};

PathRecord sample_path(const GeneratorMatrix& g, std::size_t start, CounterRng& rng,
                       std::size_t max_jumps = SimOptions{}.max_jumps);

PathRecord sample_killed_path(const GeneratorMatrix& g, const KillingVector& d,
                              std::size_t start, CounterRng& rng,
                              std::size_t max_jumps = SimOptions{}.max_jumps);

// Change-of-measure weight of a path drawn without killing: the product over
// every visited state y (the last one included) of h_y / (h_y + d_y).
double path_weight(const PathRecord& path, const GeneratorMatrix& g, const KillingVector& d);

enum class McMethod { ExpWeight, KillSurvival, CoMWeight };

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // from batch means
  std::size_t num_paths = 0;
  std::uint64_t seed = 0;
};

McEstimate mc_transform(const GeneratorMatrix& g, std::size_t start, const KillingVector& d,
                        std::size_t num_paths, std::uint64_t seed, McMethod method,
                        const SimOptions& options = {});

// Row-per-sample summary statistics with standard errors for every entry.
struct SampleMoments {
  Vector mean;
  Matrix covariance;
  Vector mean_se;
  Matrix covariance_se;
  std::size_t count = 0;
};

// `samples` is row-major, `dim` values per sample.
SampleMoments sample_moments(std::span<const double> samples, std::size_t dim);

SampleMoments empirical_moments(const GeneratorMatrix& g, std::size_t start,
                                std::size_t num_paths, std::uint64_t seed,
                                const SimOptions& options = {});

// One simulated path per row, in path order. Killed paths are used when
// `d` is given together with `killed`; otherwise plain paths with their
// change-of-measure weight under `d`.
struct PathSample {
  Vector occupation;
  Terminal terminal;
  double weight;
};

std::vector<PathSample> simulate_paths(const GeneratorMatrix& g, std::size_t start,
                                       const KillingVector& d, bool killed,
                                       std::size_t num_paths, std::uint64_t seed,
                                       const SimOptions& options = {});

// Batch layout shared by every batched sampler: batch b covers
// [offset(b), offset(b) + size(b)) and draws from CounterRng(seed, b).
struct BatchPlan {
  BatchPlan(std::size_t num_items, std::size_t requested_batches);
  std::size_t count() const noexcept { return batches_; }
  std::size_t offset(std::size_t b) const noexcept;
  std::size_t size(std::size_t b) const noexcept;

 private:
  std::size_t items_;
  std::size_t batches_;
};

// Runs body(b) for every batch, spreading batches across `threads` workers.
// Exceptions are rethrown for the lowest failing batch.
void for_each_batch(std::size_t num_batches, unsigned threads,
                    const std::function<void(std::size_t)>& body);

// ---- template definition --------------------------------------------------

template <class Visitor>
Terminal PathSampler::walk(std::size_t x, CounterRng& rng, std::size_t max_jumps,
                           Visitor&& visit) const {
  for (std::size_t jumps = 1;; ++jumps) {
    if (jumps > max_jumps) throw PathLengthExceeded(0, max_jumps);
    visit(x, exponential(rng, hold_[x]));
    if (killed_ && kill_[x] > 0.0 && uniform_open_zero(rng) <= kill_[x]) {
      return Terminal::Killed;
    }
    const double u = uniform_open_zero(rng);
    const auto& row = edges_[x];
    std::size_t next = n();
    for (const Edge& e : row) {
      if (u <= e.cumulative) {
        next = e.target;
        break;
      }
    }
    if (next == n()) return Terminal::Absorbed;
    x = next;
  }
}

}  // namespace occutime
