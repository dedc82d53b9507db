#include "occutime/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace occutime {

namespace {

void require_simulable(const GeneratorMatrix& g, std::size_t start) {
  if (start >= g.n()) {
    throw Error(ErrorCode::IndexOutOfRange, "start state " + std::to_string(start) +
                                                " out of range for n = " +
                                                std::to_string(g.n()));
  }
  if (!g.killing_reachable()) {
    throw Error(ErrorCode::NoKillingReachable,
                "some state cannot reach a state with positive exit rate");
  }
}

void require_size(const GeneratorMatrix& g, const KillingVector& d) {
  if (d.size() != g.n()) {
    throw Error(ErrorCode::InvalidInput, "killing vector has length " +
                                             std::to_string(d.size()) + ", expected " +
                                             std::to_string(g.n()));
  }
}

}  // namespace

// ---- batching -------------------------------------------------------------

BatchPlan::BatchPlan(std::size_t num_items, std::size_t requested_batches)
    : items_(num_items),
      batches_(std::max<std::size_t>(1, std::min(requested_batches, num_items))) {}

std::size_t BatchPlan::offset(std::size_t b) const noexcept {
  const std::size_t base = items_ / batches_;
  const std::size_t extra = items_ % batches_;
  return b * base + std::min(b, extra);
}

std::size_t BatchPlan::size(std::size_t b) const noexcept {
  return items_ / batches_ + (b < items_ % batches_ ? 1 : 0);
}

void for_each_batch(std::size_t num_batches, unsigned threads,
                    const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> failures(num_batches);
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, num_batches)));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next++; b < num_batches; b = next++) {
      try {
        body(b);
      } catch (...) {
        failures[b] = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

// ---- path sampling --------------------------------------------------------

PathSampler::PathSampler(const GeneratorMatrix& g)
    : PathSampler(g, KillingVector::zeros(g.n())) {}

PathSampler::PathSampler(const GeneratorMatrix& g, const KillingVector& d) {
  require_size(g, d);
  const std::size_t n = g.n();
  const EmbeddedChain chain = embedded_chain(g);
  hold_.resize(n);
  kill_.resize(n);
  edges_.resize(n);
  killed_ = !d.is_zero();
  for (std::size_t x = 0; x < n; ++x) {
    const double h = chain.hold[x];
    hold_[x] = h + d[x];
    kill_[x] = d[x] / (h + d[x]);
    double cumulative = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (chain.p(x, y) > 0.0) {
        cumulative += chain.p(x, y);
        edges_[x].push_back({cumulative, y});
      }
    }
    if (chain.kill_prob[x] == 0.0 && !edges_[x].empty()) edges_[x].back().cumulative = 1.0;
  }
}

namespace {

PathRecord record_path(const PathSampler& sampler, std::size_t start, CounterRng& rng,
                       std::size_t max_jumps) {
  PathRecord rec;
  rec.occupation.assign(sampler.n(), 0.0);
  rec.terminal = sampler.walk(start, rng, max_jumps, [&](std::size_t x, double hold) {
    rec.states.push_back(x);
    rec.holds.push_back(hold);
    rec.occupation[x] += hold;
  });
  rec.jumps = rec.states.size();
  return rec;
}

}  // namespace

PathRecord sample_path(const GeneratorMatrix& g, std::size_t start, CounterRng& rng,
                       std::size_t max_jumps) {
  require_simulable(g, start);
  return record_path(PathSampler(g), start, rng, max_jumps);
}

PathRecord sample_killed_path(const GeneratorMatrix& g, const KillingVector& d,
                              std::size_t start, CounterRng& rng, std::size_t max_jumps) {
  require_simulable(g, start);
  return record_path(PathSampler(g, d), start, rng, max_jumps);
}

double path_weight(const PathRecord& path, const GeneratorMatrix& g, const KillingVector& d) {
  require_size(g, d);
  double w = 1.0;
  for (std::size_t x : path.states) {
    const double h = -g(x, x);
    w *= h / (h + d[x]);
  }
  return w;
}

// ---- estimators -----------------------------------------------------------

McEstimate mc_transform(const GeneratorMatrix& g, std::size_t start, const KillingVector& d,
                        std::size_t num_paths, std::uint64_t seed, McMethod method,
                        const SimOptions& options) {
  require_simulable(g, start);
  require_size(g, d);
  if (num_paths == 0) throw Error(ErrorCode::InvalidInput, "num_paths must be >= 1");

  const bool killed = method == McMethod::KillSurvival;
  const PathSampler sampler = killed ? PathSampler(g, d) : PathSampler(g);
  Vector rate_ratio(g.n());
  for (std::size_t x = 0; x < g.n(); ++x) rate_ratio[x] = -g(x, x) / (-g(x, x) + d[x]);

  const BatchPlan plan(num_paths, options.num_batches);
  Vector batch_sum(plan.count(), 0.0);

  for_each_batch(plan.count(), options.threads, [&](std::size_t b) {
    CounterRng rng(seed, b);
    double sum = 0.0;
    const std::size_t size = plan.size(b);
    for (std::size_t k = 0; k < size; ++k) {
      double value = 0.0;
      try {
        switch (method) {
          case McMethod::ExpWeight: {
            double exponent = 0.0;
            sampler.walk(start, rng, options.max_jumps,
                         [&](std::size_t x, double hold) { exponent += d[x] * hold; });
            value = std::exp(-exponent);
            break;
          }
          case McMethod::KillSurvival:
            value = sampler.walk(start, rng, options.max_jumps, [](std::size_t, double) {}) ==
                            Terminal::Absorbed
                        ? 1.0
                        : 0.0;
            break;
          case McMethod::CoMWeight: {
            double w = 1.0;
            sampler.walk(start, rng, options.max_jumps,
                         [&](std::size_t x, double) { w *= rate_ratio[x]; });
            value = w;
            break;
          }
        }
      } catch (const PathLengthExceeded&) {
        throw PathLengthExceeded(plan.offset(b) + k, options.max_jumps);
      }
      sum += value;
    }
    batch_sum[b] = sum;
  });

  McEstimate est;
  est.num_paths = num_paths;
  est.seed = seed;
  double total = 0.0;
  for (double s : batch_sum) total += s;
  est.mean = total / static_cast<double>(num_paths);

  const std::size_t batches = plan.count();
  if (batches >= 2) {
    double acc = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const double nb = static_cast<double>(plan.size(b));
      const double dev = batch_sum[b] / nb - est.mean;
      acc += nb * dev * dev;
    }
    est.std_error =
        std::sqrt(acc / (static_cast<double>(num_paths) * static_cast<double>(batches - 1)));
  }
  return est;
}

SampleMoments sample_moments(std::span<const double> samples, std::size_t dim) {
  if (dim == 0 || samples.size() % dim != 0) {
    throw Error(ErrorCode::InvalidInput, "sample buffer is not a whole number of rows");
  }
  const std::size_t count = samples.size() / dim;
  SampleMoments m{Vector(dim, 0.0), Matrix(dim, dim), Vector(dim, 0.0), Matrix(dim, dim),
                  count};
  if (count == 0) return m;
  const double n = static_cast<double>(count);

  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t i = 0; i < dim; ++i) m.mean[i] += samples[r * dim + i];
  for (double& v : m.mean) v /= n;
  if (count < 2) return m;

  // Products of centred coordinates; their mean is the covariance and their
  // spread gives its standard error.
  Matrix sum(dim, dim), sum_sq(dim, dim);
  Vector c(dim);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t i = 0; i < dim; ++i) c[i] = samples[r * dim + i] - m.mean[i];
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) {
        const double p = c[i] * c[j];
        sum(i, j) += p;
        sum_sq(i, j) += p * p;
      }
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      const double cov = sum(i, j) / (n - 1.0);
      const double mean_p = sum(i, j) / n;
      const double var_p = std::max(0.0, (sum_sq(i, j) / n - mean_p * mean_p) * n / (n - 1.0));
      m.covariance(i, j) = m.covariance(j, i) = cov;
      m.covariance_se(i, j) = m.covariance_se(j, i) = std::sqrt(var_p / n);
    }
  for (std::size_t i = 0; i < dim; ++i) m.mean_se[i] = std::sqrt(m.covariance(i, i) / n);
  return m;
}

std::vector<PathSample> simulate_paths(const GeneratorMatrix& g, std::size_t start,
                                       const KillingVector& d, bool killed,
                                       std::size_t num_paths, std::uint64_t seed,
                                       const SimOptions& options) {
  require_simulable(g, start);
  require_size(g, d);
  const PathSampler sampler = killed ? PathSampler(g, d) : PathSampler(g);
  Vector rate_ratio(g.n());
  for (std::size_t x = 0; x < g.n(); ++x) rate_ratio[x] = -g(x, x) / (-g(x, x) + d[x]);

  std::vector<PathSample> out(num_paths);
  if (num_paths == 0) return out;
  const BatchPlan plan(num_paths, options.num_batches);
  for_each_batch(plan.count(), options.threads, [&](std::size_t b) {
    CounterRng rng(seed, b);
    for (std::size_t k = 0; k < plan.size(b); ++k) {
      PathSample& s = out[plan.offset(b) + k];
      s.occupation.assign(g.n(), 0.0);
      double w = 1.0;
      try {
        s.terminal = sampler.walk(start, rng, options.max_jumps, [&](std::size_t x, double h) {
          s.occupation[x] += h;
          w *= rate_ratio[x];
        });
      } catch (const PathLengthExceeded&) {
        throw PathLengthExceeded(plan.offset(b) + k, options.max_jumps);
      }
      s.weight = killed ? 1.0 : w;
    }
  });
  return out;
}

SampleMoments empirical_moments(const GeneratorMatrix& g, std::size_t start,
                                std::size_t num_paths, std::uint64_t seed,
                                const SimOptions& options) {
  const auto paths =
      simulate_paths(g, start, KillingVector::zeros(g.n()), false, num_paths, seed, options);
  Vector flat;
  flat.reserve(num_paths * g.n());
  for (const auto& p : paths) flat.insert(flat.end(), p.occupation.begin(), p.occupation.end());
  return sample_moments(flat, g.n());
}

}  // namespace occutime
