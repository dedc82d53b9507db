#include "occutime/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "occutime/error.hpp"
#include "occutime/gaussian.hpp"
#include "occutime/io.hpp"
#include "occutime/markov.hpp"
#include "occutime/simulate.hpp"
#include "occutime/transforms.hpp"

namespace occutime::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string d_text;
  std::size_t num_paths = 100000;
  std::optional<std::uint64_t> seed;
  bool verify = false;
  std::string method = "expweight";
  unsigned threads = 1;
  std::string output;
  std::string format;
  std::size_t start = 0;
  std::string mode = "sim";
};

// Usage problems detected after parsing.
struct UsageError {
  std::string message;
};

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

KillingVector parse_d(const RunConfig& cfg, std::size_t n) {
  if (cfg.d_text.empty()) return KillingVector::zeros(n);
  Vector d;
  std::stringstream ss(cfg.d_text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0') {
      throw UsageError{"cannot parse killing rate \"" + item + "\""};
    }
    d.push_back(v);
  }
  if (d.size() != n) {
    throw UsageError{"--d has " + std::to_string(d.size()) + " entries, generator has n = " +
                     std::to_string(n)};
  }
  try {
    return KillingVector(std::move(d));
  } catch (const Error& e) {
    throw UsageError{e.what()};
  }
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("OCCUTIME_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw UsageError{"OCCUTIME_SEED is not an unsigned integer"};
  }
  throw UsageError{"a seed is required (--seed or OCCUTIME_SEED)"};
}

McMethod parse_method(const std::string& m) {
  if (m == "expweight") return McMethod::ExpWeight;
  if (m == "kill") return McMethod::KillSurvival;
  if (m == "comweight") return McMethod::CoMWeight;
  throw UsageError{"unknown method " + m};
}

SimOptions sim_options(const RunConfig& cfg) {
  SimOptions opt;
  opt.threads = std::max(1u, cfg.threads);
  return opt;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json error_json(const Error& e) {
  json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (e.row() != no_index) j["row"] = e.row();
  if (e.col() != no_index) j["col"] = e.col();
  return j;
}

int cmd_validate(const RunConfig& cfg, std::string& report) {
  try {
    const GeneratorMatrix g = io::load_generator(cfg.input_path);
    json j{{"valid", true},
           {"n", g.n()},
           {"kind", g.kind() == GeneratorKind::FullConservative ? "full" : "sub"},
           {"skip_free", g.skip_free()},
           {"tridiagonal", g.tridiagonal()},
           {"strictly_skip_free", g.strictly_skip_free()},
           {"killing_reachable", g.killing_reachable()},
           {"exit", io::rounded(g.exit())}};
    if (const auto i0 = find_violation_index(g)) j["i0"] = *i0;
    report = dump(j);
    return kOk;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedInput) throw;
    json j = error_json(e);
    j["valid"] = false;
    report = dump(j);
    return kInvalid;
  }
}

int cmd_transform(const RunConfig& cfg, std::string& report) {
  const GeneratorMatrix g = io::load_generator(cfg.input_path);
  const KillingVector d = parse_d(cfg, g.n());
  if (cfg.start >= g.n()) throw UsageError{"--start is out of range"};
  const bool use_skipfree = g.skip_free() && cfg.start == 0;

  json j;
  j["start"] = cfg.start;
  j["d"] = io::rounded(Vector(d.values().begin(), d.values().end()));
  j["formula"] = use_skipfree ? "skipfree" : "general";
  const double exact = use_skipfree ? joint_lt_skipfree(g, d) : joint_lt_general(g, cfg.start, d);
  j["exact"] = io::round12(exact);

  const GreenMatrix gm = green(g);
  j["green_diagonal"] = io::rounded(gm.g.diag());
  j["green_row"] = io::rounded(Vector(gm.g.row(cfg.start).begin(), gm.g.row(cfg.start).end()));
  if (g.skip_free()) j["marginal_rates"] = io::rounded(marginal_rates(g));

  if (cfg.verify) {
    const std::uint64_t seed = require_seed(cfg);
    const McMethod method = parse_method(cfg.method);
    const McEstimate est =
        mc_transform(g, cfg.start, d, cfg.num_paths, seed, method, sim_options(cfg));
    json v{{"method", cfg.method},
           {"paths", est.num_paths},
           {"seed", est.seed},
           {"estimate", io::round12(est.mean)},
           {"std_error", io::round12(est.std_error)}};
    const double gap = std::abs(exact - est.mean);
    if (est.std_error > 0.0) v["z"] = io::round12(gap / est.std_error);
    else v["z"] = gap == 0.0 ? json(0.0) : json(nullptr);
    j["verify"] = std::move(v);
  }
  report = dump(j);
  return kOk;
}

int cmd_markov(const RunConfig& cfg, std::string& report) {
  const GeneratorMatrix g = io::load_generator(cfg.input_path);
  const MarkovVerdict v = markov_verdict(g);
  report = dump(io::to_json(v));
  return v.is_markov ? kOk : kNotMarkov;
}

int cmd_sample(const RunConfig& cfg, std::string& report) {
  const GeneratorMatrix g = io::load_generator(cfg.input_path);
  const std::size_t n = g.n();
  const std::uint64_t seed = require_seed(cfg);
  const bool as_json = cfg.format == "json";

  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();

  if (cfg.mode == "gaussian") {
    const GaussianSpec spec = gaussian_spec(g);
    const Vector samples = sample_occupations_gaussian(spec, cfg.num_paths, seed, sim_options(cfg));
    columns.push_back("sample_id");
    for (std::size_t i = 0; i < n; ++i) columns.push_back("l_" + std::to_string(i));
    for (std::size_t r = 0; r < cfg.num_paths; ++r) {
      std::vector<std::string> row{std::to_string(r)};
      json jr = json::array({r});
      for (std::size_t i = 0; i < n; ++i) {
        row.push_back(fmt12(samples[r * n + i]));
        jr.push_back(io::round12(samples[r * n + i]));
      }
      rows.push_back(std::move(row));
      jrows.push_back(std::move(jr));
    }
  } else if (cfg.mode == "sim") {
    const KillingVector d = parse_d(cfg, n);
    const bool killed = parse_method(cfg.method) == McMethod::KillSurvival;
    if (cfg.start >= n) throw UsageError{"--start is out of range"};
    const auto paths = simulate_paths(g, cfg.start, d, killed, cfg.num_paths, seed, sim_options(cfg));
    columns.push_back("path_id");
    for (std::size_t i = 0; i < n; ++i) columns.push_back("l_" + std::to_string(i));
    columns.push_back("terminal");
    columns.push_back("weight");
    for (std::size_t r = 0; r < paths.size(); ++r) {
      const PathSample& p = paths[r];
      const char* term = p.terminal == Terminal::Absorbed ? "absorbed" : "killed";
      std::vector<std::string> row{std::to_string(r)};
      json jr = json::array({r});
      for (double v : p.occupation) {
        row.push_back(fmt12(v));
        jr.push_back(io::round12(v));
      }
      row.push_back(term);
      row.push_back(fmt12(p.weight));
      jr.push_back(term);
      jr.push_back(io::round12(p.weight));
      rows.push_back(std::move(row));
      jrows.push_back(std::move(jr));
    }
  } else {
    throw UsageError{"--mode must be sim or gaussian"};
  }

  if (as_json) {
    report = dump(json{{"columns", columns}, {"rows", std::move(jrows)}});
    return kOk;
  }
  std::ostringstream csv;
  for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << columns[c];
  csv << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << row[c];
    csv << "\n";
  }
  report = csv.str();
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::MalformedInput:
    case ErrorCode::IndexOutOfRange:
      return kMalformed;
    case ErrorCode::SingularMatrix:
    case ErrorCode::PathLengthExceeded:
    case ErrorCode::EliminationBreakdown:
    case ErrorCode::InternalConsistency:
    case ErrorCode::NotPositiveDefinite:
      return kNumerical;
    default:
      return kInvalid;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Occupation-time transforms, moments, and Markov verdicts for skip-free chains",
               "occutime"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--input", cfg.input_path, "Generator JSON file")->required();
  app.add_option("--d", cfg.d_text, "Killing rates, comma separated");
  app.add_option("--paths", cfg.num_paths, "Number of simulated paths or samples")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Master seed (falls back to OCCUTIME_SEED)");
  app.add_flag("--verify", cfg.verify, "Check the exact value by Monte Carlo");
  app.add_option("--method", cfg.method, "expweight | kill | comweight")
      ->check(CLI::IsMember({"expweight", "kill", "comweight"}));
  app.add_option("--threads", cfg.threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--output", cfg.output, "Write the report here instead of stdout");
  app.add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--start", cfg.start, "Start state (transform, sample)");
  app.add_option("--mode", cfg.mode, "sample source: sim | gaussian")
      ->check(CLI::IsMember({"sim", "gaussian"}));

  for (const char* name : {"validate", "transform", "markov", "sample"}) {
    app.add_subcommand(name)->final_callback([&cfg, name] { cfg.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kMalformed;
  }

  if (cfg.format == "csv" && cfg.command != "sample") {
    err << "error: --format csv is only available for sample\n";
    return kMalformed;
  }

  std::string report;
  int code = kOk;
  try {
    if (cfg.command == "validate") code = cmd_validate(cfg, report);
    else if (cfg.command == "transform") code = cmd_transform(cfg, report);
    else if (cfg.command == "markov") code = cmd_markov(cfg, report);
    else code = cmd_sample(cfg, report);
  } catch (const UsageError& e) {
    err << "error: " << e.message << "\n";
    return kMalformed;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    if (cfg.command != "sample") out << dump(error_json(e));
    return exit_code_for(e);
  }

  if (cfg.output.empty()) {
    out << report;
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << cfg.output << "\n";
      return kMalformed;
    }
    file << report;
  }
  return code;
}

}  // namespace occutime::cli
