#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "generators.hpp"
#include "ouat/cli.hpp"
#include "ouat/io.hpp"
#include "ouat/robust.hpp"

using namespace ouat;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "ouat_test_io_cli";
    fs::create_directories(dir);
    return dir;
}

std::string write(const fs::path& path, const std::string& text) {
    write_text(path.string(), text);
    return path.string();
}

} // namespace

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("json emission is deterministic") {
    const Json j = {{"b", 1.5}, {"a", {1.0, 2.0}}, {"c", {{"z", true}, {"y", "s"}}}};
    const std::string once = dump_json(j);
    CHECK(once == dump_json(Json::parse(once)));
    CHECK(once.find("\"a\"") < once.find("\"b\""));
    CHECK(once.back() == '\n');
    CHECK(dump_json(Json{{"x", NAN}}).find("null") != std::string::npos);
}

TEST_CASE("csv") {
    CHECK(to_csv(curve_header(), {}) == "width,seed,gauge_error,l1_error,fit_millis\n");
    const auto rows = curve_rows({CurveRow{8, 1, 0.5, 0.25, 0.0}});
    CHECK(to_csv(curve_header(), rows) ==
          "width,seed,gauge_error,l1_error,fit_millis\n8,1,0.5,0.25,0\n");
    CHECK_THROWS_AS(write_text("/nonexistent_dir/x.csv", "a"), ValidationError);
}

TEST_CASE("round trips") {
    gen::Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        const Network net = gen::shallow_relu(rng, gen::pick(rng, 1, 3), gen::pick(rng, 1, 2),
                                              gen::pick(rng, 0, 6));
        const std::string text = dump_json(network_to_json(net));
        CHECK(network_from_json(parse_json(text, "net")) == net);
        const auto mu = gen::measure(rng, gen::pick(rng, 1, 10), 2);
        CHECK(measure_from_json(measure_to_json(mu)) == mu);
    }
    for (const auto& phi : {YoungFunction::power(2.5, 0.3), YoungFunction::entropy(),
                            YoungFunction::tabulated({1.0, 2.0}, {0.5, 3.0})}) {
        CHECK(young_from_json(young_to_json(phi)) == phi);
    }
    CHECK(parse_young_spec("power:3:1/3") == YoungFunction::power(3.0, 1.0 / 3.0));
    CHECK(parse_young_spec("exp_minus_linear") == YoungFunction::exp_minus_linear());
    CHECK_THROWS_AS(parse_young_spec("power:x"), ValidationError);
    CHECK_THROWS_AS(network_from_json(Json{{"input_dim", 1}, {"layers", Json::array()}, {"extra", 1}}),
                    ValidationError);
    CHECK_THROWS_AS(box_from_json(Json{{"lo", {0.0}}}), ValidationError);
}

TEST_CASE("norm subcommand") {
    const fs::path dir = scratch();
    const auto m = write(dir / "m.json", R"({"dim": 1, "points": [[0], [1]], "weights": [0.5, 0.5]})");
    const auto f = write(dir / "f.json", "[1, 3]");
    const Run r = run({"norm", "--phi", "power:2", "--phi", "power:1", "--measure", m, "--f", f});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::string l2;
    std::string l1;
    std::getline(lines, header);
    std::getline(lines, l2);
    std::getline(lines, l1);
    CHECK(header == "phi,value,k_lo,k_hi,modular_at_value,iterations");
    CHECK(std::stod(l2.substr(l2.find(',') + 1)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-10));
    CHECK(std::stod(l1.substr(l1.find(',') + 1)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(run({"norm", "--phi", "power:2", "--measure", m, "--f", f}).out ==
          run({"norm", "--phi", "power:2", "--measure", m, "--f", f}).out);

    const auto short_f = write(dir / "short.json", "[1]");
    CHECK(run({"norm", "--phi", "power:2", "--measure", m, "--f", short_f}).code == 2);
    CHECK(run({"norm", "--phi", "power:0.5", "--measure", m, "--f", f}).code == 2);
}

TEST_CASE("conjugate subcommand") {
    const Run r = run({"conjugate", "--phi", "power:3:0.3333333333333333", "--at", "1,2"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["spot"][0]["value"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(j["spot"][1]["value"].get<double>() ==
          doctest::Approx(std::pow(2.0, 1.5) / 1.5).epsilon(1e-6));
    CHECK(j["psi"]["kind"] == "tabulated");
    CHECK(run({"conjugate", "--phi", "power:1"}).code == 2);
}

TEST_CASE("construct subcommand") {
    const Run r = run({"construct", "--kind", "bump", "--a", "0", "--b", "1", "--delta", "0.5"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    const Network v = network_from_json(j["network"]);
    CHECK(evaluate_scalar(v, -0.25) == doctest::Approx(0.5));
    CHECK(run({"construct", "--kind", "spiral"}).code == 2);

    const fs::path dir = scratch();
    const Network shallow(1, {Layer{2, 1, {1.0, -1.0}, {0.0, 0.5}, Activation::relu},
                              Layer{1, 2, {1.0, 2.0}, {0.0}, Activation::none}});
    const auto net = write(dir / "shallow.json", dump_json(network_to_json(shallow)));
    const Run reg = run({"construct", "--kind", "register", "--net", net, "--lo", "-2", "--hi", "2"});
    REQUIRE(reg.code == 0);
    const Json rj = Json::parse(reg.out);
    CHECK(rj["report"]["uniform_register_width"] == true);
    CHECK(rj["report"]["register_width"] == 3);
}

TEST_CASE("robust subcommand exit codes") {
    const fs::path dir = scratch();
    const std::string family =
        R"("family": {"members": [{"density": {"kind": "uniform"}, "n": 64, "seed": 1, "box": {"lo": [0], "hi": [1]}},
                                 {"density": {"kind": "gaussian", "mean": [0.5], "sd": [0.2]}, "n": 64, "seed": 2, "box": {"lo": [0], "hi": [1]}}]})";
    const auto ok = write(dir / "ok.json", "{\"case\": \"i\", " + family + R"(, "widths": [8, 16], "seeds": [1]})");
    const Run r = run({"robust", "--config", ok});
    REQUIRE(r.code == 0);
    const RobustReport report = report_from_json(Json::parse(r.out));
    CHECK(report.bound_holds);
    CHECK(r.out == run({"robust", "--config", ok}).out);

    CHECK(run({"robust", "--config", ok, "--activation", "relu"}).code == 3);
    const Run hyp = run({"robust", "--config", ok, "--activation", "relu"});
    CHECK(hyp.err.find("bounded activation") != std::string::npos);

    const auto unknown = write(dir / "unknown.json", "{\"case\": \"i\", \"colour\": 1, " + family + "}");
    CHECK(run({"robust", "--config", unknown}).code == 2);
    CHECK(run({"robust", "--config", (dir / "missing.json").string()}).code == 2);
    const auto garbled = write(dir / "garbled.json", "{\"case\": ");
    CHECK(run({"robust", "--config", garbled}).code == 2);
    CHECK(run({"robust"}).code == 2);
    CHECK(run({"levitate"}).code == 2);

    const Run with_dir = run({"robust", "--config", ok, "--out-dir", (dir / "art").string()});
    CHECK(with_dir.code == 0);
    fs::remove_all(dir);
}

TEST_CASE("demo configs reach epsilon") {
    for (const char* name : {"demo_robust.json", "demo_robust_relu.json", "demo_robust_compact.json",
                             "demo_robust_fnn.json"}) {
        const Run r = run({"robust", "--config", std::string(OUAT_SOURCE_DIR) + "/configs/" + name});
        REQUIRE(r.code == 0);
        const Json j = Json::parse(r.out);
        CHECK(j["bound_holds"] == true);
        CHECK(j["reached_epsilon"] == true);
    }
}

TEST_CASE("selftest subcommand") {
    const Run r = run({"selftest"});
    CHECK(r.code == 0);
    CHECK(r.out.find("9/9 suites passed") != std::string::npos);
}
