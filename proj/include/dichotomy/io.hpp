#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "dichotomy/green.hpp"
#include "dichotomy/grid_function.hpp"
#include "dichotomy/torus.hpp"

namespace dichotomy::io {

using json = nlohmann::json;

std::string read_file(const std::string& path);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::string& path, const std::string& content);

// Sorted keys, doubles as %.17g, non-finite doubles as null.
std::string canonical_json(const json& j);

// {"n": int, "re": [[...]], "im": [[...]]}, row-major, "im" optional.
Mat parse_matrix_json(const json& j);
Mat parse_matrix_json(const std::string& text);
json matrix_to_json(const Mat& m);

// t, re(f_1), im(f_1), ..., one row per sample; a header row is allowed.
std::string grid_function_csv(const GridFunction& f);
GridFunction parse_grid_function_csv(const std::string& text);

// t, re(G_11), re(G_12), ..., im(G_11), ..., row-major.
std::string green_samples_csv(const GreenSamples& gs);

// {"M": int, "coeffs": {"k": [re..., im...]}}; missing k means zero.
TorusFunction parse_torus_json(const std::string& text);
json torus_to_json(const TorusFunction& f);

std::string annulus_csv(const AnnulusReport& rep);

}  // namespace dichotomy::io
