#include "occutime/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "occutime/error.hpp"

namespace occutime::io {

using nlohmann::json;

GeneratorMatrix generator_from_json(const json& doc, double zero_tol) {
  if (!doc.is_object()) throw Error(ErrorCode::MalformedInput, "generator JSON must be an object");
  if (!doc.contains("q") || !doc["q"].is_array()) {
    throw Error(ErrorCode::MalformedInput, "generator JSON needs an array field \"q\"");
  }
  GeneratorKind kind = GeneratorKind::SubGenerator;
  if (doc.contains("kind")) {
    const auto& k = doc["kind"];
    if (k == "sub") kind = GeneratorKind::SubGenerator;
    else if (k == "full") kind = GeneratorKind::FullConservative;
    else throw Error(ErrorCode::MalformedInput, "\"kind\" must be \"sub\" or \"full\"");
  }
  const auto& rows = doc["q"];
  std::vector<std::vector<double>> raw;
  for (const auto& r : rows) {
    if (!r.is_array()) throw Error(ErrorCode::MalformedInput, "\"q\" must be an array of rows");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw Error(ErrorCode::MalformedInput, "\"q\" entries must be numbers");
      row.push_back(v.get<double>());
    }
    if (row.size() != rows.size()) {
      throw Error(ErrorCode::MalformedInput, "\"q\" must be square");
    }
    raw.push_back(std::move(row));
  }
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer() || doc["n"].get<long long>() != static_cast<long long>(raw.size())) {
      throw Error(ErrorCode::MalformedInput, "\"n\" does not match the size of \"q\"");
    }
  }
  if (raw.empty()) throw Error(ErrorCode::MalformedInput, "\"q\" is empty");
  return GeneratorMatrix::validate(Matrix::from_rows(raw), kind, zero_tol);
}

GeneratorMatrix parse_generator(std::string_view text, double zero_tol) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, std::string("malformed JSON: ") + e.what());
  }
  return generator_from_json(doc, zero_tol);
}

GeneratorMatrix load_generator(const std::string& path, double zero_tol) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_generator(buf.str(), zero_tol);
}

json to_json(const GeneratorMatrix& g) {
  json q = json::array();
  for (std::size_t i = 0; i < g.n(); ++i) {
    json row = json::array();
    for (double v : g.q().row(i)) row.push_back(v);
    q.push_back(std::move(row));
  }
  return {{"n", g.n()},
          {"q", std::move(q)},
          {"kind", g.kind() == GeneratorKind::FullConservative ? "full" : "sub"}};
}

json to_json(const MarkovVerdict& v) {
  json out{{"is_markov", v.is_markov}};
  if (v.is_markov) {
    out["max_window_residual"] = round12(v.max_window_residual);
    return out;
  }
  const MarkovWitness& w = *v.witness;
  out["i0"] = w.i0;
  out["triple"] = rounded(w.triple.a);
  out["scale_c"] = round12(w.triple.scale_c);
  out["probe"] = rounded(Vector(w.probe.begin(), w.probe.end()));
  out["mismatch_at_probe"] = round12(w.mismatch_at_probe);
  out["mismatch_at_unit"] = round12(w.mismatch_at_unit);
  out["defect_at_probe"] = round12(w.defect_at_probe);
  out["residual_at_probe"] = round12(w.residual_at_probe);
  return out;
}

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json rounded(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(round12(x));
  return out;
}

json rounded(const Matrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (double x : m.row(i)) row.push_back(round12(x));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace occutime::io
