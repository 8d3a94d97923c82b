#include "ouat/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ouat {

namespace {

void dump_into(const Json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            out += inner + Json(it.key()).dump() + ": ";
            dump_into(it.value(), out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
            return !e.is_object() && !e.is_array();
        });
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                dump_into(j[i], out, indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) {
                out += ",\n";
            }
            out += inner;
            dump_into(j[i], out, indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

Json doubles_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) {
        a.push_back(x);
    }
    return a;
}

std::vector<double> doubles_of(const Json& j, const std::string& context) {
    if (!j.is_array()) {
        throw ValidationError(context + ": expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (const Json& e : j) {
        if (!e.is_number()) {
            throw ValidationError(context + ": expected an array of numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::vector<double>> matrix_of(const Json& j, const std::string& context) {
    if (!j.is_array()) {
        throw ValidationError(context + ": expected an array of arrays");
    }
    std::vector<std::vector<double>> out;
    for (const Json& row : j) {
        out.push_back(doubles_of(row, context));
    }
    return out;
}

double parse_number(const std::string& token, const std::string& context) {
    const auto slash = token.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const std::string num = token.substr(0, slash);
            const std::string den = token.substr(slash + 1);
            std::size_t used_den = 0;
            const double a = std::stod(num, &used);
            const double b = std::stod(den, &used_den);
            if (used != num.size() || used_den != den.size()) {
                throw ValidationError(context + ": malformed number '" + token + "'");
            }
            return a / b;
        }
        const double v = std::stod(token, &used);
        if (used != token.size()) {
            throw ValidationError(context + ": malformed number '" + token + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ValidationError(context + ": malformed number '" + token + "'");
    }
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const Json& j) {
    std::string out;
    dump_into(j, out, 0);
    out += "\n";
    return out;
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) {
        if (r.size() != header.size()) {
            throw DomainError("csv row width differs from the header");
        }
        line(r);
    }
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw ValidationError("failed writing '" + path + "'");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const std::string& text, const std::string& context) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(context + ": malformed JSON (" + e.what() + ")");
    }
}

Json read_json_file(const std::string& path) { return parse_json(read_text(path), path); }

void emit_json(const std::string& path, const Json& j) { write_text(path, dump_json(j)); }

void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
    write_text(path, to_csv(header, rows));
}

void require_keys(const Json& j, const std::vector<std::string>& allowed,
                  const std::string& context) {
    if (!j.is_object()) {
        throw ValidationError(context + ": expected a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            throw ValidationError(context + ": unknown key '" + it.key() + "'");
        }
    }
}

double get_double(const Json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ValidationError(context + ": '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

std::size_t get_count(const Json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
        throw ValidationError(context + ": '" + key + "' must be a nonnegative integer");
    }
    return j.at(key).get<std::size_t>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ValidationError(context + ": '" + key + "' must be a string");
    }
    return j.at(key).get<std::string>();
}

std::vector<double> get_doubles(const Json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key)) {
        throw ValidationError(context + ": missing '" + key + "'");
    }
    return doubles_of(j.at(key), context + "." + key);
}

Json young_to_json(const YoungFunction& phi) {
    Json j;
    switch (phi.kind()) {
    case YoungKind::power:
        j["kind"] = "power";
        j["p"] = phi.p();
        j["scale"] = phi.scale();
        break;
    case YoungKind::exp_minus_linear:
        j["kind"] = "exp_minus_linear";
        break;
    case YoungKind::entropy:
        j["kind"] = "entropy";
        break;
    case YoungKind::tabulated:
        j["kind"] = "tabulated";
        j["grid"] = doubles_json(phi.grid());
        j["values"] = doubles_json(phi.values());
        break;
    }
    return j;
}

YoungFunction young_from_json(const Json& j) {
    const std::string ctx = "young function";
    require_keys(j, {"kind", "p", "scale", "grid", "values"}, ctx);
    const std::string kind = get_string(j, "kind", ctx);
    try {
        if (kind == "power") {
            const double scale = j.contains("scale") ? get_double(j, "scale", ctx) : 1.0;
            return YoungFunction::power(get_double(j, "p", ctx), scale);
        }
        if (kind == "exp_minus_linear") {
            return YoungFunction::exp_minus_linear();
        }
        if (kind == "entropy") {
            return YoungFunction::entropy();
        }
        if (kind == "tabulated") {
            return YoungFunction::tabulated(get_doubles(j, "grid", ctx), get_doubles(j, "values", ctx));
        }
    } catch (const DomainError& e) {
        throw ValidationError(ctx + ": " + e.what());
    }
    throw ValidationError(ctx + ": unknown kind '" + kind + "'");
}

YoungFunction parse_young_spec(const std::string& text) {
    const std::string ctx = "young spec '" + text + "'";
    if (text == "exp_minus_linear") {
        return YoungFunction::exp_minus_linear();
    }
    if (text == "entropy") {
        return YoungFunction::entropy();
    }
    if (text.rfind("power:", 0) == 0) {
        std::vector<std::string> parts;
        std::stringstream ss(text.substr(6));
        std::string item;
        while (std::getline(ss, item, ':')) {
            parts.push_back(item);
        }
        if (parts.empty() || parts.size() > 2) {
            throw ValidationError(ctx + ": expected power:p[:scale]");
        }
        const double p = parse_number(parts[0], ctx);
        const double scale = parts.size() == 2 ? parse_number(parts[1], ctx) : 1.0;
        try {
            return YoungFunction::power(p, scale);
        } catch (const DomainError& e) {
            throw ValidationError(ctx + ": " + e.what());
        }
    }
    if (text.size() > 5 && text.substr(text.size() - 5) == ".json") {
        return young_from_json(read_json_file(text));
    }
    throw ValidationError(ctx + ": expected power:p[:scale], exp_minus_linear, entropy or a .json file");
}

Json box_to_json(const Box& box) {
    return Json{{"lo", doubles_json(box.lo)}, {"hi", doubles_json(box.hi)}};
}

Box box_from_json(const Json& j) {
    require_keys(j, {"lo", "hi"}, "box");
    Box box{get_doubles(j, "lo", "box"), get_doubles(j, "hi", "box")};
    if (box.lo.size() != box.hi.size() || box.lo.empty()) {
        throw ValidationError("box: lo and hi must be non-empty and equal in length");
    }
    try {
        box.validate();
    } catch (const DomainError& e) {
        throw ValidationError(std::string("box: ") + e.what());
    }
    return box;
}

Json measure_to_json(const DiscreteMeasure& mu) {
    Json points = Json::array();
    for (const Point& p : mu.points()) {
        points.push_back(doubles_json(p));
    }
    return Json{{"dim", mu.dim()}, {"points", points}, {"weights", doubles_json(mu.weights())}};
}

DiscreteMeasure measure_from_json(const Json& j) {
    const std::string ctx = "measure";
    require_keys(j, {"dim", "points", "weights"}, ctx);
    if (!j.contains("points")) {
        throw ValidationError(ctx + ": missing 'points'");
    }
    std::vector<Point> points;
    for (const Json& p : j.at("points")) {
        points.push_back(p.is_number() ? Point{p.get<double>()} : doubles_of(p, ctx + ".points"));
    }
    if (j.contains("dim")) {
        const std::size_t dim = get_count(j, "dim", ctx);
        for (const Point& p : points) {
            if (p.size() != dim) {
                throw ValidationError(ctx + ": point dimension differs from 'dim'");
            }
        }
    }
    try {
        return DiscreteMeasure(std::move(points), get_doubles(j, "weights", ctx));
    } catch (const DomainError& e) {
        throw ValidationError(std::string(e.what()));
    }
}

Json density_to_json(const DensitySpec& spec) {
    switch (spec.kind) {
    case DensitySpec::Kind::uniform:
        return Json{{"kind", "uniform"}};
    case DensitySpec::Kind::gaussian:
        return Json{{"kind", "gaussian"}, {"mean", doubles_json(spec.mean)},
                    {"sd", doubles_json(spec.sd)}};
    case DensitySpec::Kind::mixture: {
        Json comps = Json::array();
        for (const auto& c : spec.components) {
            comps.push_back(Json{{"weight", c.weight}, {"spec", density_to_json(c.spec)}});
        }
        return Json{{"kind", "mixture"}, {"components", comps}};
    }
    }
    return Json{};
}

DensitySpec density_from_json(const Json& j) {
    const std::string ctx = "density";
    require_keys(j, {"kind", "mean", "sd", "components"}, ctx);
    DensitySpec::Kind kind{};
    try {
        kind = parse_density_kind(get_string(j, "kind", ctx));
        switch (kind) {
        case DensitySpec::Kind::uniform:
            return DensitySpec::uniform();
        case DensitySpec::Kind::gaussian:
            return DensitySpec::gaussian(get_doubles(j, "mean", ctx), get_doubles(j, "sd", ctx));
        case DensitySpec::Kind::mixture: {
            if (!j.contains("components") || !j.at("components").is_array()) {
                throw ValidationError(ctx + ": mixture needs a 'components' array");
            }
            std::vector<DensitySpec::Component> comps;
            for (const Json& c : j.at("components")) {
                require_keys(c, {"weight", "spec"}, ctx + ".components");
                if (!c.contains("spec")) {
                    throw ValidationError(ctx + ".components: missing 'spec'");
                }
                comps.push_back({get_double(c, "weight", ctx + ".components"),
                                 density_from_json(c.at("spec"))});
            }
            return DensitySpec::mixture(std::move(comps));
        }
        }
    } catch (const DomainError& e) {
        throw ValidationError(ctx + ": " + e.what());
    }
    throw ValidationError(ctx + ": unknown kind");
}

Json network_to_json(const Network& net) {
    Json layers = Json::array();
    for (const Layer& layer : net.layers()) {
        Json a = Json::array();
        for (std::size_t r = 0; r < layer.rows; ++r) {
            a.push_back(doubles_json(std::vector<double>(
                layer.weights.begin() + static_cast<std::ptrdiff_t>(r * layer.cols),
                layer.weights.begin() + static_cast<std::ptrdiff_t>((r + 1) * layer.cols))));
        }
        layers.push_back(Json{{"A", a}, {"b", doubles_json(layer.bias)}, {"act", to_string(layer.act)}});
    }
    return Json{{"input_dim", net.input_dim()}, {"layers", layers}};
}

Network network_from_json(const Json& j) {
    const std::string ctx = "network";
    require_keys(j, {"input_dim", "layers"}, ctx);
    const std::size_t input_dim = get_count(j, "input_dim", ctx);
    if (!j.contains("layers") || !j.at("layers").is_array()) {
        throw ValidationError(ctx + ": 'layers' must be an array");
    }
    std::vector<Layer> layers;
    for (const Json& lj : j.at("layers")) {
        require_keys(lj, {"A", "b", "act"}, ctx + ".layers");
        if (!lj.contains("A")) {
            throw ValidationError(ctx + ".layers: missing 'A'");
        }
        const auto a = matrix_of(lj.at("A"), ctx + ".layers.A");
        Layer layer;
        layer.rows = a.size();
        layer.cols = a.empty() ? 0 : a.front().size();
        for (const auto& row : a) {
            if (row.size() != layer.cols) {
                throw ValidationError(ctx + ".layers.A: ragged matrix");
            }
            layer.weights.insert(layer.weights.end(), row.begin(), row.end());
        }
        layer.bias = get_doubles(lj, "b", ctx + ".layers");
        try {
            layer.act = lj.contains("act") ? parse_activation(get_string(lj, "act", ctx))
                                           : Activation::none;
        } catch (const DomainError& e) {
            throw ValidationError(ctx + ": " + e.what());
        }
        layers.push_back(std::move(layer));
    }
    try {
        return Network(input_dim, std::move(layers));
    } catch (const DomainError& e) {
        throw ValidationError(ctx + ": " + e.what());
    }
}

Json table_to_json(const FunctionTable& f) {
    Json values = Json::array();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto r = f.row(i);
        values.push_back(doubles_json(std::vector<double>(r.begin(), r.end())));
    }
    return Json{{"dim", f.out_dim()}, {"values", values}};
}

FunctionTable table_from_json(const Json& j) {
    const std::string ctx = "function table";
    try {
        if (j.is_array()) {
            return FunctionTable::scalar(doubles_of(j, ctx));
        }
        require_keys(j, {"dim", "values"}, ctx);
        if (!j.contains("values") || !j.at("values").is_array()) {
            throw ValidationError(ctx + ": 'values' must be an array");
        }
        const Json& v = j.at("values");
        FunctionTable table = (!v.empty() && v.front().is_array())
                                  ? FunctionTable::from_rows(matrix_of(v, ctx))
                                  : FunctionTable::scalar(doubles_of(v, ctx));
        if (j.contains("dim") && get_count(j, "dim", ctx) != table.out_dim()) {
            throw ValidationError(ctx + ": 'dim' differs from the row length");
        }
        return table;
    } catch (const DomainError& e) {
        throw ValidationError(ctx + ": " + e.what());
    }
}

TargetFunction target_from_json(const Json& j) {
    const std::string ctx = "target";
    if (!j.is_object()) {
        throw ValidationError(ctx + ": expected an object");
    }
    const std::string name = get_string(j, "name", ctx);
    auto dim = [&] { return j.contains("input_dim") ? get_count(j, "input_dim", ctx) : 1; };
    try {
        if (name == "sin_product") {
            require_keys(j, {"name", "input_dim", "frequency"}, ctx);
            return TargetFunction::sin_product(
                dim(), j.contains("frequency") ? get_double(j, "frequency", ctx) : 1.0);
        }
        if (name == "gaussian_blob") {
            require_keys(j, {"name", "center", "width"}, ctx);
            return TargetFunction::gaussian_blob(get_doubles(j, "center", ctx),
                                                 get_double(j, "width", ctx));
        }
        if (name == "smooth_step") {
            require_keys(j, {"name", "input_dim", "sharpness", "threshold"}, ctx);
            return TargetFunction::smooth_step(
                dim(), j.contains("sharpness") ? get_double(j, "sharpness", ctx) : 10.0,
                j.contains("threshold") ? get_double(j, "threshold", ctx) : 0.5);
        }
        if (name == "constant") {
            require_keys(j, {"name", "input_dim", "value"}, ctx);
            return TargetFunction::constant(dim(), get_doubles(j, "value", ctx));
        }
        if (name == "table") {
            require_keys(j, {"name", "points", "values"}, ctx);
            if (!j.contains("points")) {
                throw ValidationError(ctx + ": missing 'points'");
            }
            std::vector<Point> points;
            for (const Json& p : j.at("points")) {
                points.push_back(p.is_number() ? Point{p.get<double>()}
                                               : doubles_of(p, ctx + ".points"));
            }
            if (!j.contains("values")) {
                throw ValidationError(ctx + ": missing 'values'");
            }
            return TargetFunction::table(points, table_from_json(j.at("values")));
        }
    } catch (const DomainError& e) {
        throw ValidationError(ctx + ": " + e.what());
    }
    throw ValidationError(ctx + ": unknown name '" + name + "'");
}

std::vector<std::string> curve_header() {
    return {"width", "seed", "gauge_error", "l1_error", "fit_millis"};
}

std::vector<std::vector<std::string>> curve_rows(const std::vector<CurveRow>& rows) {
    std::vector<std::vector<std::string>> out;
    out.reserve(rows.size());
    for (const CurveRow& r : rows) {
        out.push_back({std::to_string(r.width), std::to_string(r.seed), format_double(r.gauge_error),
                       format_double(r.l1_error), format_double(r.fit_millis)});
    }
    return out;
}

} // namespace ouat
