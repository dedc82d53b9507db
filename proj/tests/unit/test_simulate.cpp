#include "doctest.h"

#include <cmath>
#include <random>

#include "occutime/error.hpp"
#include "occutime/simulate.hpp"
#include "occutime/transforms.hpp"
#include "support/oracles.hpp"

using namespace occutime;
using testing::fix_bd;
using testing::fix_sf;
using testing::sub;

TEST_CASE("path bookkeeping") {
  const GeneratorMatrix g = sub(fix_sf());
  CounterRng rng(11, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const PathRecord p = sample_path(g, 0, rng);
    REQUIRE(p.states.size() == p.holds.size());
    CHECK(p.jumps == p.states.size());
    CHECK(p.terminal == Terminal::Absorbed);
    // Only state 2 leaks, and 0 always moves up first.
    CHECK(p.states.back() == 2);
    if (p.states.size() > 1) CHECK(p.states[1] == 1);
    Vector occ(3, 0.0);
    for (std::size_t k = 0; k < p.states.size(); ++k) occ[p.states[k]] += p.holds[k];
    for (std::size_t i = 0; i < 3; ++i) CHECK(occ[i] == doctest::Approx(p.occupation[i]));
    // Skip-free from 0 to the exit at n-1: every state is visited.
    for (double v : p.occupation) CHECK(v > 0.0);
  }
}

TEST_CASE("single state: exponential holding time") {
  const GeneratorMatrix g = sub(Matrix{{-2.0}});
  CounterRng rng(12, 0);
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(sample_path(g, 0, rng).occupation[0]);
  CHECK(testing::ks_exponential(xs, 2.0) < testing::ks_critical_1pct(xs.size()));
}

TEST_CASE("killed paths") {
  // d = exit rate: each sojourn ends in killing with probability 1/2.
  const GeneratorMatrix g = sub(Matrix{{-2.0}});
  const KillingVector d({2.0});
  CounterRng rng(13, 0);
  int killed = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i)
    killed += sample_killed_path(g, d, 0, rng).terminal == Terminal::Killed ? 1 : 0;
  CHECK(std::abs(killed / static_cast<double>(n) - 0.5) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("path weight") {
  const GeneratorMatrix g = sub(fix_bd());
  PathRecord p;
  p.states = {0, 1, 0, 1};
  p.holds = {0.1, 0.2, 0.3, 0.4};
  p.occupation = {0.4, 0.6};
  const double w = path_weight(p, g, KillingVector({1.0, 2.0}));
  // Holding rates 1 and 1.5.
  const double expected = (1.0 / 2.0) * (1.5 / 3.5) * (1.0 / 2.0) * (1.5 / 3.5);
  CHECK(w == doctest::Approx(expected).epsilon(1e-14));
  CHECK(path_weight(p, g, KillingVector::zeros(2)) == 1.0);
}

TEST_CASE("zero killing gives exactly one") {
  const GeneratorMatrix g = sub(fix_sf());
  for (McMethod m : {McMethod::ExpWeight, McMethod::KillSurvival, McMethod::CoMWeight}) {
    const McEstimate e = mc_transform(g, 0, KillingVector::zeros(3), 5000, 3, m);
    CHECK(e.mean == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.num_paths == 5000);
  }
}

TEST_CASE("three estimators agree with the exact transform") {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 4; ++rep) {
    const std::size_t n = 2 + rep;
    const GeneratorMatrix g = sub(testing::random_skip_free(rng, n, rep % 2 == 0 || n < 3));
    const KillingVector d(testing::random_d(rng, n, 1.0));
    const double exact = joint_lt_skipfree(g, d);
    for (McMethod m : {McMethod::ExpWeight, McMethod::KillSurvival, McMethod::CoMWeight}) {
      const McEstimate e = mc_transform(g, 0, d, 40000, 100 + rep, m);
      CHECK(e.std_error > 0.0);
      CHECK(testing::within_se(e.mean, exact, e.std_error, 4.5));
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  const GeneratorMatrix g = sub(fix_sf());
  const KillingVector d({0.5, 1.0, 2.0});
  SimOptions one;
  const McEstimate ref = mc_transform(g, 0, d, 12345, 9, McMethod::CoMWeight, one);
  for (unsigned t : {2u, 3u, 7u}) {
    SimOptions opt;
    opt.threads = t;
    const McEstimate e = mc_transform(g, 0, d, 12345, 9, McMethod::CoMWeight, opt);
    CHECK(e.mean == ref.mean);
    CHECK(e.std_error == ref.std_error);
    const auto a = simulate_paths(g, 0, d, true, 777, 5, one);
    const auto b = simulate_paths(g, 0, d, true, 777, 5, opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].occupation == b[k].occupation);
      CHECK(a[k].terminal == b[k].terminal);
    }
  }
}

TEST_CASE("jump budget") {
  // Slow leak: paths bounce for a long time before exiting.
  const GeneratorMatrix g = sub(Matrix{{-1.0, 1.0}, {100.0, -100.01}});
  SimOptions opt;
  opt.max_jumps = 3;
  opt.num_batches = 1;
  try {
    mc_transform(g, 0, KillingVector({1.0, 1.0}), 1000, 1, McMethod::ExpWeight, opt);
    FAIL("expected PathLengthExceeded");
  } catch (const PathLengthExceeded& e) {
    CHECK(e.code() == ErrorCode::PathLengthExceeded);
    CHECK(e.completed_paths() < 1000);
  }
}

TEST_CASE("batch plan covers every item once") {
  for (std::size_t items : {0u, 1u, 99u, 100u, 101u, 12345u}) {
    const BatchPlan plan(items, 100);
    std::size_t next = 0;
    for (std::size_t b = 0; b < plan.count(); ++b) {
      CHECK(plan.offset(b) == next);
      next += plan.size(b);
    }
    CHECK(next == items);
  }
}

TEST_CASE("empirical moments match the Green matrix") {
  const GeneratorMatrix g = sub(fix_bd());
  const SampleMoments m = empirical_moments(g, 0, 60000, 21);
  const Matrix green_m = green(g).g;
  const Matrix cov = occupation_covariance(g, 0);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(testing::within_se(m.mean[i], green_m(0, i), m.mean_se[i], 4.5));
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(testing::within_se(m.covariance(i, j), cov(i, j), m.covariance_se(i, j), 4.5));
  }
}

TEST_CASE("sample moments of a known buffer") {
  const std::vector<double> flat{1, 2, 3, 4, 5, 6};
  const SampleMoments m = sample_moments(flat, 2);
  CHECK(m.count == 3);
  CHECK(m.mean[0] == doctest::Approx(3.0));
  CHECK(m.mean[1] == doctest::Approx(4.0));
  CHECK(m.covariance(0, 1) == doctest::Approx(4.0));
}
