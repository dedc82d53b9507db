#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "occutime/generator.hpp"
#include "occutime/markov.hpp"

namespace occutime::io {

// Generator schema: {"n": int, "q": [[...], ...], "kind": "sub" | "full"}.
// "kind" defaults to "sub". Structural problems raise MalformedInput; a well
// formed matrix that is not a generator raises the validation error.
GeneratorMatrix generator_from_json(const nlohmann::json& doc,
                                    double zero_tol = default_zero_tol);
GeneratorMatrix parse_generator(std::string_view text, double zero_tol = default_zero_tol);
GeneratorMatrix load_generator(const std::string& path, double zero_tol = default_zero_tol);

nlohmann::json to_json(const GeneratorMatrix& g);
nlohmann::json to_json(const MarkovVerdict& v);

// Rounds to 12 significant digits, the precision of every reported number.
double round12(double x);
nlohmann::json rounded(const Vector& v);
nlohmann::json rounded(const Matrix& m);

}  // namespace occutime::io
