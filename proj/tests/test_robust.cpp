#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "generators.hpp"
#include "ouat/robust.hpp"

using namespace ouat;

namespace {

const YoungFunction half = YoungFunction::power(2.0, 0.5);

MeasureFamily unit_family(std::size_t members, std::size_t n) {
    std::vector<DiscreteMeasure> ms;
    for (std::size_t m = 0; m < members; ++m) {
        ms.push_back(sample_empirical(DensitySpec::uniform(), n, 100 + m, cube(1, 0.0, 1.0)));
    }
    return MeasureFamily(ms);
}

ExperimentConfig quick_config(RobustCase c, Activation act) {
    ExperimentConfig cfg;
    cfg.robust_case = c;
    cfg.act = act;
    cfg.widths = {8, 16};
    cfg.seeds = {1};
    return cfg;
}

} // namespace

TEST_CASE("associated young pair") {
    const auto mu = make_discrete_1d({0.0, 1.0, 2.0}, {0.25, 0.25, 0.5});
    const auto pair = associated_young_pair(MeasureFamily({mu}), {half});
    CHECK(pair.psi_m == half);
    CHECK(pair.phi_m == half);
    CHECK(pair.certificate.sup_norm == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));

    // densities 1.8 and 0.2 against the average: at most 2 N(1) = sqrt(2)
    const MeasureFamily two({make_discrete_1d({0.0, 1.0}, {0.9, 0.1}),
                             make_discrete_1d({0.0, 1.0}, {0.1, 0.9})});
    CHECK(associated_young_pair(two, {half}).certificate.sup_norm <= std::sqrt(2.0) * (1.0 + 1e-9));

    const auto cubic = associated_young_pair(MeasureFamily({mu}), {YoungFunction::power(3.0, 1.0 / 3.0)});
    CHECK(cubic.phi_m.p() == doctest::Approx(1.5));
    CHECK_THROWS_AS(associated_young_pair(MeasureFamily({mu}), {}), DomainError);
}

TEST_CASE("robust error") {
    const auto family = unit_family(3, 20);
    const auto f = TargetFunction::sin_product(1);
    const Network zero = Network::zero(1, 1);

    const auto one = TargetFunction::constant(1, {1.0});
    const auto e1 = robust_error(family, one, zero);
    for (double v : e1.per_member) {
        CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(e1.sup == doctest::Approx(1.0).epsilon(1e-14));

    const auto fitted = TargetFunction::table(family.dominating().points(), f.on(family.dominating()));
    CHECK(robust_error(family, FunctionTable::zeros(family.dominating().size(), 1)).sup == 0.0);
    CHECK(robust_error(family, fitted, Network::zero(1, 1)).sup > 0.0);

    const auto single = MeasureFamily({family.member(1)});
    const auto es = robust_error(single, f, zero);
    CHECK(es.per_member.size() == 1);
    CHECK(es.sup == l1_norm(family.member(1), f.on(family.member(1))));
}

TEST_CASE("hoelder chain witnesses equality") {
    const auto mu = make_discrete_1d({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5});
    const auto r = verify_robust_bound(MeasureFamily({mu}), half, half, TargetFunction::constant(1, {1.0}),
                                       Network::zero(1, 1));
    CHECK(r.sup_l1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.gauge_error == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(r.density_norm_sup == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(r.holder_rhs == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.bound_holds);

    const auto z = verify_robust_bound(MeasureFamily({mu}), half, half, FunctionTable::zeros(3, 1));
    CHECK(z.sup_l1 == 0.0);
    CHECK(z.holder_rhs == 0.0);
    CHECK(z.bound_holds);
}

TEST_CASE("hoelder chain on random families") {
    gen::Rng rng(31);
    const auto candidates = default_psi_candidates();
    for (int t = 0; t < 1000; ++t) {
        std::vector<DiscreteMeasure> members;
        for (std::size_t m = 0; m < gen::pick(rng, 1, 4); ++m) {
            members.push_back(gen::probability(rng, gen::pick(rng, 1, 12)));
        }
        const MeasureFamily family(members);
        YoungFunction phi = half;
        YoungFunction psi = half;
        if (t % 2 == 0) {
            const auto pair = associated_young_pair(family, candidates);
            phi = pair.phi_m;
            psi = pair.psi_m;
        } else {
            auto pair = gen::young_pair(rng);
            phi = pair.phi;
            psi = pair.psi;
        }
        const auto diff = gen::table(rng, family.dominating().size(), gen::pick(rng, 1, 2), 5.0);
        const auto r = verify_robust_bound(family, phi, psi, diff);
        CHECK(r.bound_holds);
        CHECK(r.sup_l1 <= r.holder_rhs * (1.0 + 1e-8));
        double mx = 0.0;
        for (double v : r.per_measure_l1) {
            mx = std::max(mx, v);
        }
        CHECK(r.sup_l1 == mx);
    }
}

TEST_CASE("robust error grows with the family") {
    gen::Rng rng(37);
    const auto f = TargetFunction::from_callable(1, 1, [](std::span<const double> x) {
        return std::vector<double>{std::cos(x[0])};
    });
    for (int t = 0; t < 200; ++t) {
        const Network eta = gen::shallow_relu(rng, 1, 1, gen::pick(rng, 0, 5));
        std::vector<DiscreteMeasure> members;
        for (std::size_t m = 0; m < gen::pick(rng, 1, 4); ++m) {
            members.push_back(gen::measure(rng, gen::pick(rng, 1, 10)));
        }
        const double before = robust_error(MeasureFamily(members), f, eta).sup;
        members.push_back(gen::measure(rng, gen::pick(rng, 1, 10)));
        const auto after = robust_error(MeasureFamily(members), f, eta);
        CHECK(after.sup >= before * (1.0 - 1e-12));

        const DiscreteMeasure& nu = members.back();
        const FunctionTable d = f.on(nu) - eta.evaluate_on(nu);
        CHECK(robust_error(MeasureFamily({nu}), f, eta).sup == l1_norm(nu, d));
    }
}

TEST_CASE("experiment stops at the zero network when epsilon is loose") {
    ExperimentConfig cfg;
    cfg.epsilon = 2.0;
    cfg.widths = {0, 8};
    const auto result = run_robust_experiment(cfg, unit_family(2, 30));
    CHECK(result.report.reached_epsilon);
    CHECK(result.report.width == 0);
    CHECK(result.curve.size() == 1);
    CHECK(result.report.sup_l1 < 2.0);
    CHECK(result.report.bound_holds);
}

TEST_CASE("experiment cases") {
    const auto family = unit_family(3, 64);

    const auto i = run_robust_experiment(quick_config(RobustCase::bounded_shallow, Activation::sigmoid), family);
    CHECK(i.report.case_name == "i");
    CHECK(i.report.bound_holds);
    CHECK(i.network.hidden_layer_count() == 1);

    const auto ii = run_robust_experiment(quick_config(RobustCase::relu_narrow, Activation::relu), family);
    CHECK(ii.report.case_name == "ii");
    CHECK(has_uniform_hidden_width(ii.network, 3));
    CHECK(ii.report.bound_holds);

    auto c3 = quick_config(RobustCase::nonpoly_compact, Activation::tanh);
    c3.compact_box = cube(1, 0.0, 1.0);
    CHECK(run_robust_experiment(c3, family).report.bound_holds);

    const auto iv = run_robust_experiment(quick_config(RobustCase::fnn, Activation::sigmoid), family);
    CHECK(iv.report.case_name == "iv");
    CHECK(iv.report.bound_holds);
}

TEST_CASE("hypothesis failures name the hypothesis") {
    const auto family = unit_family(2, 16);
    auto expect = [&](const ExperimentConfig& cfg, const std::string& name) {
        try {
            run_robust_experiment(cfg, family);
            FAIL("no hypothesis error for " << name);
        } catch (const HypothesisError& e) {
            CHECK(std::string(e.what()).find(name) != std::string::npos);
        }
    };
    expect(quick_config(RobustCase::bounded_shallow, Activation::relu), "bounded activation");
    expect(quick_config(RobustCase::relu_narrow, Activation::sigmoid), "relu activation");
    expect(quick_config(RobustCase::nonpoly_compact, Activation::identity), "non-polynomial activation");
    auto small_box = quick_config(RobustCase::nonpoly_compact, Activation::tanh);
    small_box.compact_box = cube(1, 0.0, 0.5);
    expect(small_box, "compact support");
    auto no_box = quick_config(RobustCase::nonpoly_compact, Activation::tanh);
    expect(no_box, "compact support");
    auto decaying = quick_config(RobustCase::fnn, Activation::sigmoid);
    decaying.weight = WeightFunction::parse("exp(-|x|)");
    expect(decaying, "admissible weight");

    auto empty = quick_config(RobustCase::bounded_shallow, Activation::sigmoid);
    empty.psi_candidates.clear();
    CHECK_THROWS_AS(run_robust_experiment(empty, family), DomainError);
}

TEST_CASE("artifacts round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "ouat_test_robust";
    std::filesystem::create_directories(dir);
    auto cfg = quick_config(RobustCase::bounded_shallow, Activation::sigmoid);
    cfg.report_path = (dir / "report.json").string();
    cfg.curve_path = (dir / "curve.csv").string();
    cfg.network_path = (dir / "net.json").string();
    const auto result = run_robust_experiment(cfg, unit_family(2, 32));

    const std::string text = read_text(cfg.report_path);
    CHECK(text == dump_json(report_to_json(result.report)));
    const RobustReport back = report_from_json(parse_json(text, "report"));
    CHECK(dump_json(report_to_json(back)) == text);
    CHECK(back.network_file == cfg.network_path);
    CHECK(network_from_json(read_json_file(cfg.network_path)) == result.network);
    CHECK(read_text(cfg.curve_path).rfind("width,seed,gauge_error,l1_error,fit_millis\n", 0) == 0);

    const Json j = report_to_json(result.report);
    for (const char* key : {"sup_l1", "holder_rhs", "gauge_error", "density_norm_sup", "per_measure_l1",
                            "bound_holds", "network_file", "case"}) {
        CHECK(j.contains(key));
    }
    Json broken = j;
    broken.erase("sup_l1");
    CHECK_THROWS_AS(report_from_json(broken), ValidationError);
    std::filesystem::remove_all(dir);
}
