#include "ouat/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>

#include "ouat/fit.hpp"
#include "ouat/io.hpp"
#include "ouat/net.hpp"
#include "ouat/orlicz.hpp"
#include "ouat/robust.hpp"
#include "ouat/selftest.hpp"

namespace ouat {

namespace {

namespace fs = std::filesystem;

// Config values with flag overrides: a flag given on the command line wins,
// then the config key, then the default.
class Settings {
public:
    Settings(Json config, fs::path base) : config_(std::move(config)), base_(std::move(base)) {}

    bool has(const std::string& key) const { return config_.contains(key); }
    const Json& at(const std::string& key) const { return config_.at(key); }

    template <class T>
    T pick(const CLI::Option* flag, const T& flag_value, const std::string& key, const T& fallback,
           const std::function<T(const Json&)>& convert) const {
        if (flag != nullptr && flag->count() > 0) {
            return flag_value;
        }
        if (has(key)) {
            return convert(at(key));
        }
        return fallback;
    }

    /// Paths in a config file are relative to the config's directory.
    std::string path(const std::string& p) const {
        if (p.empty() || fs::path(p).is_absolute()) {
            return p;
        }
        return (base_ / p).string();
    }

private:
    Json config_;
    fs::path base_;
};

Settings load_settings(const std::string& config_path, const std::vector<std::string>& allowed,
                       const std::string& command) {
    if (config_path.empty()) {
        return Settings(Json::object(), fs::path{});
    }
    Json config = read_json_file(config_path);
    require_keys(config, allowed, command + " config");
    return Settings(std::move(config), fs::path(config_path).parent_path());
}

std::string json_string(const Json& j, const std::string& what) {
    if (!j.is_string()) {
        throw ValidationError(what + " must be a string");
    }
    return j.get<std::string>();
}

double json_double(const Json& j, const std::string& what) {
    if (!j.is_number()) {
        throw ValidationError(what + " must be a number");
    }
    return j.get<double>();
}

template <class T>
std::vector<T> json_counts(const Json& j, const std::string& what) {
    if (!j.is_array()) {
        throw ValidationError(what + " must be an array of nonnegative integers");
    }
    std::vector<T> out;
    for (const Json& e : j) {
        if (!e.is_number_integer() || e.get<long long>() < 0) {
            throw ValidationError(what + " must be an array of nonnegative integers");
        }
        out.push_back(e.get<T>());
    }
    return out;
}

void write_or_print(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
    } else {
        write_text(path, content);
    }
}

Activation parse_activation_checked(const std::string& name) {
    try {
        return parse_activation(name);
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

VectorNorm parse_norm_checked(const std::string& name) {
    try {
        return parse_vector_norm(name);
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

DiscreteMeasure measure_from_setting(const Json& j, const Settings& s) {
    if (j.is_string()) {
        return measure_from_json(read_json_file(s.path(j.get<std::string>())));
    }
    return measure_from_json(j);
}

/// {"density": {...}, "n": 256, "seed": 1, "box": {...}}
DiscreteMeasure sampled_measure(const Json& j) {
    const std::string ctx = "sample";
    require_keys(j, {"density", "n", "seed", "box"}, ctx);
    if (!j.contains("density") || !j.contains("box")) {
        throw ValidationError(ctx + ": needs 'density' and 'box'");
    }
    try {
        return sample_empirical(density_from_json(j.at("density")), get_count(j, "n", ctx),
                                j.contains("seed") ? get_count(j, "seed", ctx) : 0,
                                box_from_json(j.at("box")));
    } catch (const DomainError& e) {
        throw ValidationError(ctx + ": " + e.what());
    }
}

MeasureFamily family_from_setting(const Json& j, const Settings& s) {
    const std::string ctx = "family";
    require_keys(j, {"members"}, ctx);
    if (!j.contains("members") || !j.at("members").is_array() || j.at("members").empty()) {
        throw ValidationError(ctx + ": 'members' must be a non-empty array");
    }
    std::vector<DiscreteMeasure> members;
    for (const Json& m : j.at("members")) {
        if (m.is_string()) {
            members.push_back(measure_from_setting(m, s));
        } else if (m.is_object() && m.contains("density")) {
            members.push_back(sampled_measure(m));
        } else {
            members.push_back(measure_from_json(m));
        }
    }
    try {
        return MeasureFamily(std::move(members));
    } catch (const DomainError& e) {
        throw ValidationError(ctx + ": " + e.what());
    }
}

Box box_from_flags(const std::vector<double>& lo, const std::vector<double>& hi,
                   const std::string& what) {
    if (lo.empty() || lo.size() != hi.size()) {
        throw ValidationError(what + ": --lo and --hi must be given with equal length");
    }
    Box box{lo, hi};
    try {
        box.validate();
    } catch (const DomainError& e) {
        throw ValidationError(what + ": " + e.what());
    }
    return box;
}

Json structure_report(const Network& net) {
    Json widths = Json::array();
    for (std::size_t w : net.hidden_widths()) {
        widths.push_back(w);
    }
    return Json{{"input_dim", net.input_dim()},
                {"output_dim", net.output_dim()},
                {"hidden_layers", net.hidden_layer_count()},
                {"hidden_widths", widths}};
}

// --- norm -------------------------------------------------------------------

struct NormArgs {
    std::string config;
    std::vector<std::string> phi;
    std::string measure;
    std::string f;
    std::string norm = "euclidean";
    double tol = 1e-10;
    std::string out;
    CLI::Option* phi_opt = nullptr;
    CLI::Option* measure_opt = nullptr;
    CLI::Option* f_opt = nullptr;
    CLI::Option* norm_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

int run_norm(const NormArgs& a, std::ostream& out) {
    const Settings s = load_settings(a.config, {"phi", "measure", "f", "norm", "tol", "out"}, "norm");
    const auto phis = s.pick<std::vector<std::string>>(
        a.phi_opt, a.phi, "phi", {}, [](const Json& j) {
            if (j.is_string()) {
                return std::vector<std::string>{j.get<std::string>()};
            }
            std::vector<std::string> v;
            for (const Json& e : j) {
                v.push_back(json_string(e, "phi"));
            }
            return v;
        });
    if (phis.empty()) {
        throw ValidationError("norm: at least one --phi is required");
    }
    std::optional<DiscreteMeasure> mu;
    if (a.measure_opt->count() > 0) {
        mu = measure_from_json(read_json_file(a.measure));
    } else if (s.has("measure")) {
        mu = measure_from_setting(s.at("measure"), s);
    } else {
        throw ValidationError("norm: --measure is required");
    }
    FunctionTable f;
    if (a.f_opt->count() > 0) {
        f = table_from_json(read_json_file(a.f));
    } else if (s.has("f")) {
        const Json& fj = s.at("f");
        f = table_from_json(fj.is_string() ? read_json_file(s.path(fj.get<std::string>())) : fj);
    } else {
        throw ValidationError("norm: --f is required");
    }
    if (f.size() != mu->size()) {
        throw ValidationError("norm: the function table has " + std::to_string(f.size()) +
                              " rows but the measure has " + std::to_string(mu->size()) + " points");
    }
    const VectorNorm norm = parse_norm_checked(s.pick<std::string>(
        a.norm_opt, a.norm, "norm", "euclidean", [](const Json& j) { return json_string(j, "norm"); }));
    const double tol = s.pick<double>(a.tol_opt, a.tol, "tol", 1e-10,
                                      [](const Json& j) { return json_double(j, "tol"); });
    const std::string out_path = a.out_opt->count() > 0 ? a.out
                                 : s.has("out")        ? s.path(json_string(s.at("out"), "out"))
                                                       : "";
    std::vector<std::vector<std::string>> rows;
    for (const std::string& spec : phis) {
        const YoungFunction phi = parse_young_spec(spec);
        const GaugeNormResult r = gauge_norm(phi, *mu, f, tol, norm);
        rows.push_back({phi.describe(), format_double(r.value), format_double(r.k_lo),
                        format_double(r.k_hi), format_double(r.modular_at_value),
                        std::to_string(r.iterations)});
    }
    write_or_print(out_path,
                   to_csv({"phi", "value", "k_lo", "k_hi", "modular_at_value", "iterations"}, rows),
                   out);
    return exit_ok;
}

// --- conjugate --------------------------------------------------------------

struct ConjugateArgs {
    std::string phi;
    std::size_t grid_count = 1024;
    double y_min = 1e-4;
    double y_max = 1e4;
    std::vector<double> at{1.0};
    std::string out;
};

int run_conjugate(const ConjugateArgs& a, std::ostream& out) {
    const YoungFunction phi = parse_young_spec(a.phi);
    if (a.grid_count < 2 || !(a.y_min > 0.0) || !(a.y_min < a.y_max)) {
        throw ValidationError("conjugate: need --grid-count >= 2 and 0 < --y-min < --y-max");
    }
    const GridSpec grid{a.grid_count, a.y_min, a.y_max};
    const YoungFunction psi = complementary_numeric(phi, grid);
    Json report{{"phi", young_to_json(phi)}, {"psi", young_to_json(psi)}};
    const YoungFunction closed = complementary(phi, grid);
    if (closed.kind() != YoungKind::tabulated) {
        report["analytic"] = young_to_json(closed);
    }
    Json spots = Json::array();
    for (double y : a.at) {
        spots.push_back(Json{{"y", y}, {"value", conjugate_value(phi, y)}, {"tabulated", psi(y)}});
    }
    report["spot"] = spots;
    write_or_print(a.out, dump_json(report), out);
    return exit_ok;
}

// --- construct --------------------------------------------------------------

struct ConstructArgs {
    std::string kind;
    double bound = 1.0;
    double a = 0.0;
    double b = 1.0;
    double delta = 0.1;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<double> j_lo;
    std::vector<double> j_hi;
    double c = -1.0;
    double big_c = 1.0;
    std::string net;
    std::string target = "sin_product";
    std::size_t knots = 9;
    std::string out;
};

int run_construct(const ConstructArgs& a, std::ostream& out) {
    Json report;
    std::optional<Network> net;
    if (a.kind == "identity") {
        net = identity_gadget(a.bound);
    } else if (a.kind == "max") {
        net = max_gadget();
    } else if (a.kind == "min") {
        net = min_gadget();
    } else if (a.kind == "bump") {
        net = bump_1d(a.a, a.b, a.delta);
    } else if (a.kind == "box") {
        net = box_indicator(box_from_flags(a.lo, a.hi, "construct box"), a.delta);
    } else if (a.kind == "interp") {
        const TargetFunction f = target_from_json(Json{{"name", a.target}});
        net = fit_grid_relu_1d(f, a.a, a.b, a.knots);
    } else if (a.kind == "register" || a.kind == "clip") {
        if (a.net.empty()) {
            throw ValidationError("construct " + a.kind + ": --net is required");
        }
        const Network source = network_from_json(read_json_file(a.net));
        const Box box = box_from_flags(a.lo, a.hi, "construct " + a.kind);
        const RegisterNetwork reg = to_register_form(source, box);
        const std::size_t width = reg.layout.width();
        report["register_width"] = width;
        if (a.kind == "register") {
            net = reg.net;
        } else {
            const Box j_box = box_from_flags(a.j_lo, a.j_hi, "construct clip (J)");
            net = clip_and_localize(reg, j_box, a.delta, a.c, a.big_c);
        }
        report["uniform_register_width"] = has_uniform_hidden_width(*net, width);
    } else {
        throw ValidationError("construct: unknown --kind '" + a.kind +
                              "' (identity|max|min|bump|box|interp|register|clip)");
    }
    report.update(structure_report(*net));
    const Json doc{{"kind", a.kind}, {"network", network_to_json(*net)}, {"report", report}};
    write_or_print(a.out, dump_json(doc), out);
    return exit_ok;
}

// --- fit --------------------------------------------------------------------

struct FitArgs {
    std::string config;
    std::string measure;
    std::string phi = "power:2";
    std::vector<std::size_t> widths;
    std::vector<std::uint64_t> seeds;
    std::string activation = "sigmoid";
    double ridge = 1e-10;
    std::string norm = "euclidean";
    std::string out;
    bool timed = false;
    CLI::Option* measure_opt = nullptr;
    CLI::Option* phi_opt = nullptr;
    CLI::Option* widths_opt = nullptr;
    CLI::Option* seeds_opt = nullptr;
    CLI::Option* activation_opt = nullptr;
    CLI::Option* ridge_opt = nullptr;
    CLI::Option* norm_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

int run_fit(const FitArgs& a, std::ostream& out) {
    const Settings s = load_settings(a.config,
                                     {"target", "measure", "sample", "phi", "widths", "seeds",
                                      "activation", "ridge", "norm", "out", "timed"},
                                     "fit");
    const TargetFunction target =
        s.has("target") ? target_from_json(s.at("target")) : TargetFunction::sin_product(1);
    std::optional<DiscreteMeasure> mu;
    if (a.measure_opt->count() > 0) {
        mu = measure_from_json(read_json_file(a.measure));
    } else if (s.has("measure")) {
        mu = measure_from_setting(s.at("measure"), s);
    } else if (s.has("sample")) {
        mu = sampled_measure(s.at("sample"));
    } else {
        mu = sample_empirical(DensitySpec::uniform(), 256, 1, cube(target.input_dim(), 0.0, 1.0));
    }
    const YoungFunction phi = parse_young_spec(s.pick<std::string>(
        a.phi_opt, a.phi, "phi", "power:2", [](const Json& j) { return json_string(j, "phi"); }));
    const auto widths = s.pick<std::vector<std::size_t>>(
        a.widths_opt, a.widths, "widths", {8, 16, 32, 64},
        [](const Json& j) { return json_counts<std::size_t>(j, "widths"); });
    const auto seeds = s.pick<std::vector<std::uint64_t>>(
        a.seeds_opt, a.seeds, "seeds", {1, 2, 3},
        [](const Json& j) { return json_counts<std::uint64_t>(j, "seeds"); });
    if (std::find(widths.begin(), widths.end(), std::size_t{0}) != widths.end()) {
        throw ValidationError("fit: widths must be >= 1");
    }
    const Activation act = parse_activation_checked(s.pick<std::string>(
        a.activation_opt, a.activation, "activation", "sigmoid",
        [](const Json& j) { return json_string(j, "activation"); }));
    CurveOptions options;
    options.ridge = s.pick<double>(a.ridge_opt, a.ridge, "ridge", 1e-10,
                                   [](const Json& j) { return json_double(j, "ridge"); });
    options.norm = parse_norm_checked(s.pick<std::string>(
        a.norm_opt, a.norm, "norm", "euclidean", [](const Json& j) { return json_string(j, "norm"); }));
    options.timed = a.timed || (s.has("timed") && s.at("timed").is_boolean() && s.at("timed").get<bool>());
    const std::string out_path = a.out_opt->count() > 0 ? a.out
                                 : s.has("out")        ? s.path(json_string(s.at("out"), "out"))
                                                       : "";
    const auto rows = approximation_curve(target, *mu, phi, widths, act, seeds, options);
    write_or_print(out_path, to_csv(curve_header(), curve_rows(rows)), out);
    return exit_ok;
}

// --- robust -----------------------------------------------------------------

struct RobustArgs {
    std::string config;
    double epsilon = 0.05;
    std::string robust_case;
    std::string activation;
    std::vector<std::size_t> widths;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    CLI::Option* epsilon_opt = nullptr;
    CLI::Option* case_opt = nullptr;
    CLI::Option* activation_opt = nullptr;
    CLI::Option* widths_opt = nullptr;
    CLI::Option* seeds_opt = nullptr;
    CLI::Option* out_dir_opt = nullptr;
};

int run_robust(const RobustArgs& a, std::ostream& out) {
    const Settings s = load_settings(
        a.config,
        {"case", "family", "target", "psi_candidates", "activation", "epsilon", "widths", "seeds",
         "ridge", "norm", "compact_box", "j_box", "delta", "weight", "hidden_weight", "out_dir",
         "output"},
        "robust");
    if (!s.has("family")) {
        throw ValidationError("robust config: 'family' is required");
    }
    const MeasureFamily family = family_from_setting(s.at("family"), s);

    ExperimentConfig cfg;
    try {
        cfg.robust_case = parse_robust_case(s.pick<std::string>(
            a.case_opt, a.robust_case, "case", "i", [](const Json& j) { return json_string(j, "case"); }));
        cfg.weight = WeightFunction::parse(s.has("weight") ? json_string(s.at("weight"), "weight")
                                                           : "1+|x|^2");
        cfg.hidden_weight = WeightFunction::parse(
            s.has("hidden_weight") ? json_string(s.at("hidden_weight"), "hidden_weight") : "1+z^2");
    } catch (const DomainError& e) {
        throw ValidationError(std::string("robust config: ") + e.what());
    }
    cfg.target = s.has("target") ? target_from_json(s.at("target"))
                                 : TargetFunction::sin_product(family.dim());
    if (s.has("psi_candidates")) {
        cfg.psi_candidates.clear();
        for (const Json& p : s.at("psi_candidates")) {
            cfg.psi_candidates.push_back(p.is_string() ? parse_young_spec(p.get<std::string>())
                                                       : young_from_json(p));
        }
    }
    cfg.act = parse_activation_checked(s.pick<std::string>(
        a.activation_opt, a.activation, "activation",
        cfg.robust_case == RobustCase::relu_narrow ? "relu" : "sigmoid",
        [](const Json& j) { return json_string(j, "activation"); }));
    cfg.epsilon = s.pick<double>(a.epsilon_opt, a.epsilon, "epsilon", 0.05,
                                 [](const Json& j) { return json_double(j, "epsilon"); });
    cfg.widths = s.pick<std::vector<std::size_t>>(
        a.widths_opt, a.widths, "widths", cfg.widths,
        [](const Json& j) { return json_counts<std::size_t>(j, "widths"); });
    cfg.seeds = s.pick<std::vector<std::uint64_t>>(
        a.seeds_opt, a.seeds, "seeds", cfg.seeds,
        [](const Json& j) { return json_counts<std::uint64_t>(j, "seeds"); });
    if (s.has("ridge")) {
        cfg.ridge = json_double(s.at("ridge"), "ridge");
    }
    if (s.has("norm")) {
        cfg.norm = parse_norm_checked(json_string(s.at("norm"), "norm"));
    }
    if (s.has("compact_box")) {
        cfg.compact_box = box_from_json(s.at("compact_box"));
    }
    if (s.has("j_box")) {
        cfg.j_box = box_from_json(s.at("j_box"));
    }
    if (s.has("delta")) {
        cfg.delta = json_double(s.at("delta"), "delta");
    }

    std::string out_dir = a.out_dir_opt->count() > 0 ? a.out_dir
                          : s.has("out_dir")       ? s.path(json_string(s.at("out_dir"), "out_dir"))
                                                   : "";
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) {
            throw ValidationError("cannot create output directory '" + out_dir + "'");
        }
        cfg.report_path = (fs::path(out_dir) / "report.json").string();
        cfg.curve_path = (fs::path(out_dir) / "curve.csv").string();
        cfg.network_path = (fs::path(out_dir) / "network.json").string();
    }
    if (s.has("output")) {
        const Json& o = s.at("output");
        require_keys(o, {"report", "curve", "network"}, "robust config output");
        if (o.contains("report")) {
            cfg.report_path = s.path(json_string(o.at("report"), "output.report"));
        }
        if (o.contains("curve")) {
            cfg.curve_path = s.path(json_string(o.at("curve"), "output.curve"));
        }
        if (o.contains("network")) {
            cfg.network_path = s.path(json_string(o.at("network"), "output.network"));
        }
    }
    const ExperimentResult result = run_robust_experiment(cfg, family);
    if (cfg.report_path.empty()) {
        out << dump_json(report_to_json(result.report));
    }
    return exit_ok;
}

// --- selftest ---------------------------------------------------------------

int run_selftest_command(std::uint64_t seed, std::ostream& out) {
    const auto results = run_selftest(seed);
    std::size_t passed = 0;
    for (const SuiteResult& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        passed += r.passed ? 1 : 0;
    }
    out << passed << "/" << results.size() << " suites passed\n";
    return passed == results.size() ? exit_ok : exit_failure;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Orlicz-space universal approximation toolkit", "orlicz-uat"};
    app.require_subcommand(1);

    NormArgs norm;
    auto* norm_cmd = app.add_subcommand("norm", "Gauge norms of a function table (CSV)");
    norm_cmd->add_option("--config", norm.config, "JSON config");
    norm.phi_opt = norm_cmd->add_option("--phi", norm.phi, "Young function spec (repeatable)");
    norm.measure_opt = norm_cmd->add_option("--measure", norm.measure, "measure JSON");
    norm.f_opt = norm_cmd->add_option("--f", norm.f, "function table JSON");
    norm.norm_opt = norm_cmd->add_option("--norm", norm.norm, "euclidean|max");
    norm.tol_opt = norm_cmd->add_option("--tol", norm.tol, "relative bisection tolerance");
    norm.out_opt = norm_cmd->add_option("--out", norm.out, "CSV path (default stdout)");

    ConjugateArgs conj;
    auto* conj_cmd = app.add_subcommand("conjugate", "Tabulated complementary function (JSON)");
    conj_cmd->add_option("--phi", conj.phi, "Young function spec")->required();
    conj_cmd->add_option("--grid-count", conj.grid_count, "tabulation nodes");
    conj_cmd->add_option("--y-min", conj.y_min, "smallest positive node");
    conj_cmd->add_option("--y-max", conj.y_max, "largest node");
    conj_cmd->add_option("--at", conj.at, "spot evaluation points")->delimiter(',');
    conj_cmd->add_option("--out", conj.out, "JSON path (default stdout)");

    ConstructArgs con;
    auto* con_cmd = app.add_subcommand("construct", "Gadget, register or clipped network (JSON)");
    con_cmd->add_option("--kind", con.kind, "identity|max|min|bump|box|interp|register|clip")
        ->required();
    con_cmd->add_option("--bound", con.bound, "identity gadget range");
    con_cmd->add_option("--a", con.a, "bump/interp left end");
    con_cmd->add_option("--b", con.b, "bump/interp right end");
    con_cmd->add_option("--delta", con.delta, "bump margin");
    con_cmd->add_option("--lo", con.lo, "box lower corner")->delimiter(',');
    con_cmd->add_option("--hi", con.hi, "box upper corner")->delimiter(',');
    con_cmd->add_option("--j-lo", con.j_lo, "clip box J lower corner")->delimiter(',');
    con_cmd->add_option("--j-hi", con.j_hi, "clip box J upper corner")->delimiter(',');
    con_cmd->add_option("--c", con.c, "clip lower level");
    con_cmd->add_option("--C", con.big_c, "clip upper level");
    con_cmd->add_option("--net", con.net, "source network JSON (register, clip)");
    con_cmd->add_option("--target", con.target, "named 1-D target (interp)");
    con_cmd->add_option("--knots", con.knots, "interpolation knots (interp)");
    con_cmd->add_option("--out", con.out, "JSON path (default stdout)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Random-feature approximation curve (CSV)");
    fit_cmd->add_option("--config", fit.config, "JSON config");
    fit.measure_opt = fit_cmd->add_option("--measure", fit.measure, "measure JSON");
    fit.phi_opt = fit_cmd->add_option("--phi", fit.phi, "Young function for the gauge error");
    fit.widths_opt = fit_cmd->add_option("--widths", fit.widths, "hidden widths")->delimiter(',');
    fit.seeds_opt = fit_cmd->add_option("--seeds", fit.seeds, "feature seeds")->delimiter(',');
    fit.activation_opt = fit_cmd->add_option("--activation", fit.activation, "relu|sigmoid|tanh");
    fit.ridge_opt = fit_cmd->add_option("--ridge", fit.ridge, "ridge penalty");
    fit.norm_opt = fit_cmd->add_option("--norm", fit.norm, "euclidean|max");
    fit.out_opt = fit_cmd->add_option("--out", fit.out, "CSV path (default stdout)");
    fit_cmd->add_flag("--timed", fit.timed, "record fit wall time");

    RobustArgs rob;
    auto* rob_cmd = app.add_subcommand("robust", "Robust approximation experiment (JSON report)");
    rob_cmd->add_option("--config", rob.config, "JSON config")->required();
    rob.epsilon_opt = rob_cmd->add_option("--epsilon", rob.epsilon, "target sup L1 error");
    rob.case_opt = rob_cmd->add_option("--case", rob.robust_case, "i|ii|iii|iv");
    rob.activation_opt = rob_cmd->add_option("--activation", rob.activation, "activation");
    rob.widths_opt = rob_cmd->add_option("--widths", rob.widths, "width schedule")->delimiter(',');
    rob.seeds_opt = rob_cmd->add_option("--seeds", rob.seeds, "seed schedule")->delimiter(',');
    rob.out_dir_opt = rob_cmd->add_option("--out-dir", rob.out_dir, "artifact directory");

    std::uint64_t selftest_seed = 2024;
    auto* self_cmd = app.add_subcommand("selftest", "Run the invariant suites");
    self_cmd->add_option("--seed", selftest_seed, "random seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_validation;
    }

    try {
        if (*norm_cmd) {
            return run_norm(norm, out);
        }
        if (*conj_cmd) {
            return run_conjugate(conj, out);
        }
        if (*con_cmd) {
            return run_construct(con, out);
        }
        if (*fit_cmd) {
            return run_fit(fit, out);
        }
        if (*rob_cmd) {
            return run_robust(rob, out);
        }
        if (*self_cmd) {
            return run_selftest_command(selftest_seed, out);
        }
    } catch (const HypothesisError& e) {
        err << "error: " << e.what() << "\n";
        return exit_hypothesis;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const Json::exception& e) {
        err << "error: malformed config (" << e.what() << ")\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_validation;
}

} // namespace ouat
