// Acceptance run: one line per criterion, nonzero exit if any fails.
// Tolerances and seeds are fixed here; nothing is tuned at run time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "occutime/cli.hpp"
#include "occutime/gaussian.hpp"
#include "occutime/linalg.hpp"
#include "occutime/markov.hpp"
#include "occutime/simulate.hpp"
#include "occutime/transforms.hpp"
#include "support/oracles.hpp"

using namespace occutime;
using testing::fix_bd;
using testing::fix_sf;
using testing::sub;

namespace {

constexpr double kExactRel = 1e-12;
constexpr double kCollapseTol = 1e-10;
constexpr double kGreenTol = 1e-10;
constexpr double kResidualTol = 1e-10;
constexpr double kMismatchTol = 1e-12;
constexpr double kProbeMin = 1e-6;
constexpr double kMassTol = 1e-8;
constexpr double kQuad1Rel = 1e-3;
constexpr double kQuad2Rel = 1e-2;
constexpr double kConjRel = 1e-10;
constexpr double kMeanSe = 3.0;
constexpr double kWideSe = 4.0;
constexpr std::size_t kPaths = 100000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Worst-case tracker used by every criterion.
struct Worst {
  double value = 0.0;
  std::string where;
  void see(double v, const std::string& w) {
    if (!(v <= value)) {
      value = v;
      where = w;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Matrix> fixtures_and_corpus() {
  std::vector<Matrix> out{fix_bd(), fix_sf()};
  for (const auto& e : testing::random_corpus()) out.push_back(e.g.q());
  return out;
}

std::string label(std::size_t k) {
  if (k == 0) return "FIX-BD";
  if (k == 1) return "FIX-SF";
  return "corpus[" + std::to_string(k - 2) + "]";
}

double z_two_sample(double a, double sa, double b, double sb) {
  const double se = std::hypot(sa, sb);
  if (se == 0.0) return a == b ? 0.0 : INFINITY;
  return std::abs(a - b) / se;
}

Outcome ac1() {
  const double bd = joint_lt_skipfree(sub(fix_bd()), KillingVector({1, 1}));
  const double sf = joint_lt_skipfree(sub(fix_sf()), KillingVector({1, 1, 1}));
  const double e1 = testing::relative_error(bd, 1.0 / 4.5);
  const double e2 = testing::relative_error(sf, 1.0 / 10.65);
  return {e1 <= kExactRel && e2 <= kExactRel,
          fmt("FIX-BD %.15g (rel %.1e), FIX-SF %.15g (rel %.1e), tol %.0e", bd, e1, sf, e2,
              kExactRel)};
}

Outcome ac2() {
  std::mt19937_64 rng(2002);
  const auto gens = fixtures_and_corpus();
  Worst worst;
  std::size_t runs = 0, failures = 0;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const GeneratorMatrix g = sub(gens[k]);
    for (int r = 0; r < 3; ++r) {
      const KillingVector d(testing::random_d(rng, g.n()));
      const double exact = joint_lt_skipfree(g, d);
      int m = 0;
      for (McMethod method : {McMethod::ExpWeight, McMethod::KillSurvival, McMethod::CoMWeight}) {
        const std::uint64_t seed = 10000 + 100 * k + 10 * r + m++;
        const McEstimate e = mc_transform(g, 0, d, kPaths, seed, method);
        const double z = z_two_sample(e.mean, e.std_error, exact, 0.0);
        worst.see(z, label(k) + fmt(" d#%d method %d", r, m - 1));
        ++runs;
        if (z > kWideSe) ++failures;
      }
    }
  }
  return {failures == 0, fmt("%zu runs of %zu paths, max |z| = %.2f at %s, limit %.0f", runs,
                             kPaths, worst.value, worst.where.c_str(), kWideSe)};
}

Outcome ac3() {
  std::mt19937_64 rng(3003);
  Worst collapse, minor;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 8;
    const GeneratorMatrix g = sub(testing::random_skip_free(rng, n, n < 3 || rep % 2 == 0));
    const KillingVector d(testing::random_d(rng, n));
    collapse.see(std::abs(joint_lt_general(g, 0, d) - joint_lt_skipfree(g, d)),
                 fmt("rep %d", rep));
    if (rep >= 20 || n < 2) continue;
    const double ref = linalg::signed_minor(-g.q(), 0, n - 1);
    for (int k = 0; k < 20; ++k) {
      const Vector dk = testing::random_d(rng, n, 5.0);
      minor.see(std::abs(linalg::signed_minor(add_diagonal(-g.q(), dk), 0, n - 1) - ref) /
                    std::max(1.0, std::abs(ref)),
                fmt("g %d", rep));
    }
  }
  return {collapse.value <= kCollapseTol && minor.value <= kCollapseTol,
          fmt("collapse max %.1e over 100 (g, d); minor drift max %.1e over 20 d per g; tol %.0e",
              collapse.value, minor.value, kCollapseTol)};
}

Outcome ac4() {
  const GeneratorMatrix bd = sub(fix_bd());
  CounterRng rng(4004, 0);
  std::vector<double> l1;
  for (int i = 0; i < 10000; ++i) l1.push_back(sample_path(bd, 0, rng).occupation[1]);
  const double ks = testing::ks_exponential(l1, 1.0);
  const double crit = testing::ks_critical_1pct(l1.size());
  Worst rate;
  const auto gens = fixtures_and_corpus();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const GeneratorMatrix g = sub(gens[k]);
    const Matrix gm = green(g).g;
    for (std::size_t i = 0; i < g.n(); ++i)
      rate.see(testing::relative_error(marginal_rate(g, i), 1.0 / gm(i, i)), label(k));
  }
  return {ks < crit && rate.value <= kExactRel,
          fmt("KS D = %.4f vs 1%% critical %.4f (n = 10^4); rate vs 1/green max rel %.1e", ks,
              crit, rate.value)};
}

Outcome ac5() {
  const auto gens = fixtures_and_corpus();
  Worst structure;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const Matrix gm = green(sub(gens[k])).g;
    for (std::size_t i = 0; i < gm.rows(); ++i)
      structure.see(std::abs(gm(0, i) - gm(i, i)), label(k));
  }
  Worst z;
  for (std::size_t k = 0; k < 2; ++k) {
    const GeneratorMatrix g = sub(gens[k]);
    const SampleMoments m = empirical_moments(g, 0, kPaths, 5005 + k);
    const Matrix gm = green(g).g;
    for (std::size_t i = 0; i < g.n(); ++i)
      z.see(z_two_sample(m.mean[i], m.mean_se[i], gm(0, i), 0.0), label(k) + fmt(" i=%zu", i));
  }
  return {structure.value <= kGreenTol && z.value <= kMeanSe,
          fmt("g(0,i) - g(i,i) max %.1e over %zu generators; mean |z| max %.2f at %s", structure.value,
              gens.size(), z.value, z.where.c_str())};
}

Outcome ac6() {
  bool agree = true;
  const auto gens = fixtures_and_corpus();
  for (const Matrix& q : gens) {
    const GeneratorMatrix g = sub(q);
    agree = agree && markov_verdict(g).is_markov == is_tridiagonal(g);
  }
  std::mt19937_64 rng(6006);
  Worst residual;
  std::size_t checked = 0;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const GeneratorMatrix g = sub(gens[k]);
    if (!g.tridiagonal() || g.n() < 3) continue;
    for (std::size_t center = 2; center < g.n(); ++center) {
      const ReducedTriple t = reduce_window(g, center);
      for (int r = 0; r < 100; ++r) {
        const auto d = testing::random_d(rng, 3);
        residual.see(std::abs(factorization_residual(t, d[0], d[1], d[2])), label(k));
        ++checked;
      }
    }
  }
  const MarkovVerdict sf = markov_verdict(sub(fix_sf()));
  const double mismatch = sf.witness ? sf.witness->mismatch_at_unit : NAN;
  const double probe = sf.witness ? std::abs(sf.witness->residual_at_probe) : NAN;
  const bool pass = agree && residual.value <= kResidualTol &&
                    std::abs(mismatch + 0.2) <= kMismatchTol && probe > kProbeMin;
  return {pass, fmt("verdicts %s on %zu generators; tridiagonal residual max %.1e over %zu "
                    "(window, d); FIX-SF mismatch %.12g, probe residual %.3e",
                    agree ? "agree" : "DISAGREE", gens.size(), residual.value, checked, mismatch,
                    probe)};
}

Outcome ac7() {
  std::mt19937_64 rng(7007);
  std::vector<Matrix> gens{fix_bd()};
  for (int k = 0; k < 5; ++k) gens.push_back(testing::random_skip_free(rng, 2 + k, true));
  Worst mean_z, cov_z, lt_z;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const GeneratorMatrix g = sub(gens[k]);
    const std::size_t n = g.n();
    const std::string name = k == 0 ? "FIX-BD" : fmt("tri[%zu] n=%zu", k - 1, n);
    const Vector gauss = sample_occupations_gaussian(gaussian_spec(g), kPaths, 7100 + k);
    const auto paths = simulate_paths(g, 0, KillingVector::zeros(n), false, kPaths, 7200 + k);
    Vector sim;
    sim.reserve(kPaths * n);
    for (const auto& p : paths) sim.insert(sim.end(), p.occupation.begin(), p.occupation.end());

    const SampleMoments a = sample_moments(gauss, n);
    const SampleMoments b = sample_moments(sim, n);
    for (std::size_t i = 0; i < n; ++i) {
      mean_z.see(z_two_sample(a.mean[i], a.mean_se[i], b.mean[i], b.mean_se[i]), name);
      for (std::size_t j = i; j < n; ++j)
        cov_z.see(z_two_sample(a.covariance(i, j), a.covariance_se(i, j), b.covariance(i, j),
                               b.covariance_se(i, j)),
                  name);
    }
    for (int r = 0; r < 5; ++r) {
      const Vector d = testing::random_d(rng, n);
      auto transform = [&](const Vector& flat) {
        std::vector<double> w(kPaths);
        for (std::size_t s = 0; s < kPaths; ++s) {
          double e = 0.0;
          for (std::size_t i = 0; i < n; ++i) e += d[i] * flat[s * n + i];
          w[s] = std::exp(-e);
        }
        return sample_moments(w, 1);
      };
      const SampleMoments ta = transform(gauss), tb = transform(sim);
      lt_z.see(z_two_sample(ta.mean[0], ta.mean_se[0], tb.mean[0], tb.mean_se[0]), name);
    }
  }
  return {mean_z.value <= kMeanSe && cov_z.value <= kWideSe && lt_z.value <= kWideSe,
          fmt("gaussian vs simulation, 6 generators: mean |z| max %.2f (%s, limit 3), cov |z| "
              "max %.2f (%s, limit 4), transform |z| max %.2f (%s, limit 4)",
              mean_z.value, mean_z.where.c_str(), cov_z.value, cov_z.where.c_str(), lt_z.value,
              lt_z.where.c_str())};
}

Outcome ac8() {
  std::mt19937_64 rng(8008);
  Worst mass, conj;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 8;
    const Matrix a = testing::random_pd_symmetric_part(rng, n);
    mass.see(mass_identity_residual(SplitMatrix::from(a)), fmt("rep %d", rep));
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    Vector t(n), t_inv(n);
    for (std::size_t i = 0; i < n; ++i) t_inv[i] = 1.0 / (t[i] = scale(rng));
    const KillingVector d(testing::random_d(rng, n));
    const Matrix similar = Matrix::diagonal(t) * a * Matrix::diagonal(t_inv);
    conj.see(testing::relative_error(phi(similar, d), phi(a, d)), fmt("rep %d", rep));
  }
  const Matrix a1{{2.0}};
  const double q1 = testing::relative_error(testing::mu_mass_quadrature(a1, 8.0, 400),
                                            mu_total_mass(SplitMatrix::from(a1)));
  const Matrix a2{{1.0, 0.5}, {-0.5, 1.0}};
  const double q2 = testing::relative_error(testing::mu_mass_quadrature(a2, 7.0, 36),
                                            mu_total_mass(SplitMatrix::from(a2)));
  return {mass.value <= kMassTol && q1 <= kQuad1Rel && q2 <= kQuad2Rel && conj.value <= kConjRel,
          fmt("mass residual max %.1e; quadrature rel n=1 %.1e, n=2 %.1e; conjugation rel max "
              "%.1e",
              mass.value, q1, q2, conj.value)};
}

Outcome ac9() {
  const std::string data = OCCUTIME_DATA_DIR;
  const std::vector<std::vector<std::string>> commands{
      {"validate", "--input", data + "/fix_sf.json"},
      {"markov", "--input", data + "/fix_sf.json"},
      {"transform", "--input", data + "/fix_sf.json", "--d", "1,0.5,2", "--verify", "--paths",
       "20000", "--seed", "91", "--method", "comweight"},
      {"transform", "--input", data + "/fix_bd.json", "--d", "1,1", "--verify", "--paths",
       "20000", "--seed", "92", "--method", "kill", "--start", "1"},
      {"sample", "--input", data + "/fix_sf.json", "--paths", "5000", "--seed", "93", "--d",
       "0.5,1,2"},
      {"sample", "--input", data + "/fix_sf.json", "--paths", "5000", "--seed", "94", "--d",
       "0.5,1,2", "--method", "kill", "--format", "json"},
      {"sample", "--input", data + "/fix_bd.json", "--paths", "5000", "--seed", "95", "--mode",
       "gaussian"}};
  std::size_t compared = 0;
  for (const auto& base : commands) {
    std::string ref;
    for (int threads = 1; threads <= 8; ++threads) {
      for (int repeat = 0; repeat < 2; ++repeat) {
        std::vector<std::string> args = base;
        args.insert(args.end(), {"--threads", std::to_string(threads)});
        std::ostringstream out, err;
        cli::run(args, out, err);
        if (threads == 1 && repeat == 0) {
          ref = out.str();
          continue;
        }
        ++compared;
        if (out.str() != ref)
          return {false, "output differs for `" + base[0] + "` at --threads " +
                             std::to_string(threads)};
      }
    }
  }
  return {true, fmt("%zu repeated invocations over %zu commands, threads 1..8: byte-identical",
                    compared, commands.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 fixture exactness", ac1},        {"AC2 formula vs Monte Carlo", ac2},
      {"AC3 general/skip-free collapse", ac3}, {"AC4 marginal law", ac4},
      {"AC5 green structure", ac5},          {"AC6 markov criterion", ac6},
      {"AC7 gaussian identification", ac7},  {"AC8 signed-measure identities", ac8},
      {"AC9 reproducibility", ac9}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
