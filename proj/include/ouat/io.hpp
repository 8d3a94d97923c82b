#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ouat/fit.hpp"
#include "ouat/measure.hpp"
#include "ouat/net.hpp"
#include "ouat/orlicz.hpp"
#include "ouat/young.hpp"

namespace ouat {

using Json = nlohmann::json;

/// %.17g; non-finite values become "inf", "-inf" or "nan".
std::string format_double(double v);

/// Deterministic text: keys sorted, doubles at 17 significant digits,
/// two-space indent, trailing newline. Non-finite doubles are written as null.
std::string dump_json(const Json& j);

/// Header line plus one line per row; cells are written verbatim.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

/// Throws ValidationError when the path cannot be written.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
/// Throws ValidationError on a missing file or malformed JSON.
Json read_json_file(const std::string& path);
Json parse_json(const std::string& text, const std::string& context);

void emit_json(const std::string& path, const Json& j);
void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

/// Throws ValidationError if j is not an object or holds a key outside `allowed`.
void require_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& context);

// Typed accessors that raise ValidationError naming the key.
double get_double(const Json& j, const std::string& key, const std::string& context);
std::size_t get_count(const Json& j, const std::string& key, const std::string& context);
std::string get_string(const Json& j, const std::string& key, const std::string& context);
std::vector<double> get_doubles(const Json& j, const std::string& key, const std::string& context);

Json young_to_json(const YoungFunction& phi);
YoungFunction young_from_json(const Json& j);
/// "power:p[:scale]" (scale may be written a/b), "exp_minus_linear",
/// "entropy", or a path to a JSON file holding a Young function.
YoungFunction parse_young_spec(const std::string& text);

Json box_to_json(const Box& box);
Box box_from_json(const Json& j);

Json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

Json density_to_json(const DensitySpec& spec);
DensitySpec density_from_json(const Json& j);

Json network_to_json(const Network& net);
Network network_from_json(const Json& j);

/// {"dim": m, "values": [[...], ...]} or a bare array of numbers (m = 1).
Json table_to_json(const FunctionTable& f);
FunctionTable table_from_json(const Json& j);

/// Named closed forms: {"name": "sin_product", "input_dim": 1, "frequency": 1},
/// {"name": "gaussian_blob", "center": [...], "width": w},
/// {"name": "smooth_step", "input_dim": n, "sharpness": s, "threshold": t},
/// {"name": "constant", "input_dim": n, "value": [...]},
/// {"name": "table", "points": [[...]], "values": [[...]]}.
TargetFunction target_from_json(const Json& j);

std::vector<std::string> curve_header();
std::vector<std::vector<std::string>> curve_rows(const std::vector<CurveRow>& rows);

} // namespace ouat
