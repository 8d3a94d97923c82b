#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "ouat/fit.hpp"
#include "ouat/io.hpp"

using namespace ouat;

namespace {

DiscreteMeasure uniform_sample(std::size_t n, std::uint64_t seed) {
    return sample_empirical(DensitySpec::uniform(), n, seed, cube(1, 0.0, 1.0));
}

Layer hidden_of(const std::vector<AffineMap>& maps, Activation act) {
    Layer l{maps.size(), maps.front().a.size(), {}, {}, act};
    for (const auto& h : maps) {
        l.weights.insert(l.weights.end(), h.a.begin(), h.a.end());
        l.bias.push_back(h.b);
    }
    return l;
}

double residual(const Network& eta, const DiscreteMeasure& mu, const FunctionTable& f) {
    return l2_residual(mu, f, eta.evaluate_on(mu));
}

} // namespace

TEST_CASE("targets") {
    const auto s = TargetFunction::sin_product(2, 1.0);
    CHECK(s(std::vector<double>{0.25, 0.25})[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.bound() == 1.0);
    const auto blob = TargetFunction::gaussian_blob({0.5}, 0.1);
    CHECK(blob(std::vector<double>{0.5})[0] == 1.0);
    CHECK(TargetFunction::smooth_step(1)(std::vector<double>{0.5})[0] == 0.5);
    CHECK(TargetFunction::constant(1, {2.5, -1.0})(std::vector<double>{9.0}) ==
          std::vector<double>{2.5, -1.0});
    const auto tab = TargetFunction::table({{0.0}, {1.0}}, FunctionTable::scalar({4.0, 5.0}));
    CHECK(tab(std::vector<double>{1.0})[0] == 5.0);
    CHECK_THROWS_AS(tab(std::vector<double>{0.5}), DomainError);
    CHECK_THROWS_AS(s(std::vector<double>{0.5}), DomainError);
}

TEST_CASE("feature draws nest by width") {
    const Box b = cube(2, -1.0, 3.0);
    const auto wide = draw_features(2, 20, 77, b);
    const auto narrow = draw_features(2, 7, 77, b);
    for (std::size_t k = 0; k < narrow.size(); ++k) {
        CHECK(narrow[k].a == wide[k].a);
        CHECK(narrow[k].b == wide[k].b);
    }
    // b = -w . z puts each kink through the box
    for (const auto& h : wide) {
        double lo = h.b;
        double hi = h.b;
        for (std::size_t d = 0; d < 2; ++d) {
            lo += std::min(h.a[d] * b.lo[d], h.a[d] * b.hi[d]);
            hi += std::max(h.a[d] * b.lo[d], h.a[d] * b.hi[d]);
        }
        CHECK(lo <= 0.0);
        CHECK(hi >= 0.0);
    }
    CHECK_FALSE(draw_features(2, 7, 78, b)[0].a == narrow[0].a);
}

TEST_CASE("exact recovery of a feature in the draw") {
    const auto mu = uniform_sample(64, 3);
    const auto feats = draw_features(1, 6, 11, mu.bounding_box());
    const AffineMap h = feats[2];
    const auto f = TargetFunction::from_callable(1, 1, [h](std::span<const double> x) {
        return std::vector<double>{std::max(0.0, h(x))};
    });
    const Network eta = fit_readout(hidden_of(feats, Activation::relu), mu, f.on(mu), 0.0);
    CHECK(residual(eta, mu, f.on(mu)) <= 1e-12);
}

TEST_CASE("constant targets are fitted through the intercept") {
    const auto mu = uniform_sample(100, 4);
    for (std::size_t width : {1u, 5u, 20u}) {
        const auto f = TargetFunction::constant(1, {3.7});
        const Network eta = fit_random_features(f, mu, width, Activation::sigmoid, 5);
        CHECK(residual(eta, mu, f.on(mu)) <= 1e-8);
    }
}

TEST_CASE("best-of-three residual is nonincreasing from width 8 to 64") {
    const auto mu = uniform_sample(256, 1);
    const auto f = TargetFunction::sin_product(1);
    const FunctionTable values = f.on(mu);
    double previous = INFINITY;
    for (std::size_t width : {8u, 16u, 32u, 64u}) {
        double best = INFINITY;
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            best = std::min(best,
                            residual(fit_random_features(f, mu, width, Activation::sigmoid, seed),
                                     mu, values));
        }
        CHECK(best <= previous);
        previous = best;
    }
}

TEST_CASE("appending a feature never increases the residual") {
    gen::Rng rng(8);
    int checked = 0;
    while (checked < 200) {
        const std::size_t n = gen::pick(rng, 20, 60);
        const auto mu = gen::probability(rng, n);
        const auto target = gen::table(rng, mu.size(), 1, 2.0);
        const Activation act =
            std::array<Activation, 3>{Activation::relu, Activation::sigmoid, Activation::tanh}
                [gen::pick(rng, 0, 2)];
        const std::size_t m = gen::pick(rng, 1, 8);
        const auto feats = draw_features(1, m + 1, rng(), mu.bounding_box());
        const std::vector<AffineMap> fewer(feats.begin(), feats.end() - 1);
        double before = 0.0;
        double after = 0.0;
        try {
            before = residual(fit_readout(hidden_of(fewer, act), mu, target, 0.0), mu, target);
            after = residual(fit_readout(hidden_of(feats, act), mu, target, 0.0), mu, target);
        } catch (const SolverError&) {
            continue; // collinear relu columns on this support: redraw
        }
        CHECK(after <= before + 1e-10);
        ++checked;
    }
}

TEST_CASE("rank-deficient systems need a ridge") {
    const auto mu = make_discrete_1d({0.0, 1.0}, {0.5, 0.5});
    const auto feats = draw_features(1, 5, 1, cube(1, 0.0, 1.0));
    const auto target = FunctionTable::scalar({1.0, 2.0});
    CHECK_THROWS_AS(fit_readout(hidden_of(feats, Activation::relu), mu, target, 0.0), SolverError);
    CHECK_NOTHROW(fit_readout(hidden_of(feats, Activation::relu), mu, target, 1e-10));
    CHECK_THROWS_AS(fit_random_features(TargetFunction::constant(1, {1.0}), mu, 0, Activation::relu, 1),
                    DomainError);
    CHECK_THROWS_AS(
        fit_random_features(TargetFunction::constant(1, {1.0}), mu, 3, Activation::identity, 1),
        DomainError);
}

TEST_CASE("grid interpolation") {
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) {
        grid.push_back(i / 999.0);
    }
    const auto id = fit_grid_relu_1d(TargetFunction::from_callable(1, 1, [](std::span<const double> x) {
                                         return std::vector<double>{x[0]};
                                     }),
                                     0.0, 1.0, 5);
    for (double x : grid) {
        CHECK(std::fabs(evaluate_scalar(id, x) - x) <= 1e-12);
    }

    const auto kink = TargetFunction::from_callable(1, 1, [](std::span<const double> x) {
        return std::vector<double>{std::fabs(x[0] - 0.5)};
    });
    const Network k = fit_grid_relu_1d(kink, 0.0, 1.0, 3);
    for (double x : grid) {
        CHECK(std::fabs(evaluate_scalar(k, x) - std::fabs(x - 0.5)) <= 1e-12);
    }

    const auto square = TargetFunction::from_callable(1, 1, [](std::span<const double> x) {
        return std::vector<double>{x[0] * x[0]};
    });
    auto sup_error = [&](std::size_t knots) {
        const Network net = fit_grid_relu_1d(square, 0.0, 1.0, knots);
        double e = 0.0;
        for (double x : grid) {
            e = std::max(e, std::fabs(evaluate_scalar(net, x) - x * x));
        }
        return e;
    };
    CHECK(sup_error(17) < sup_error(2));

    gen::Rng rng(9);
    for (int t = 0; t < 50; ++t) {
        const double a = gen::uniform(rng, -3.0, 0.0);
        const double b = a + gen::uniform(rng, 0.1, 4.0);
        const std::size_t knots = gen::pick(rng, 2, 30);
        const auto wave = TargetFunction::from_callable(1, 1, [](std::span<const double> x) {
            return std::vector<double>{std::sin(3.0 * x[0]) + x[0] * x[0]};
        });
        const Network net = fit_grid_relu_1d(wave, a, b, knots);
        for (std::size_t i = 0; i < knots; ++i) {
            const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(knots - 1);
            CHECK(std::fabs(evaluate_scalar(net, x) - (std::sin(3.0 * x) + x * x)) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(fit_grid_relu_1d(TargetFunction::sin_product(2), 0.0, 1.0, 4), DomainError);
    CHECK_THROWS_AS(fit_grid_relu_1d(square, 0.0, 1.0, 1), DomainError);
}

TEST_CASE("fits are deterministic and survive serialization") {
    const auto mu = uniform_sample(128, 6);
    const auto f = TargetFunction::gaussian_blob({0.3}, 0.2);
    const Network a = fit_random_features(f, mu, 24, Activation::tanh, 42);
    const Network b = fit_random_features(f, mu, 24, Activation::tanh, 42);
    CHECK(a == b);
    const std::string text = dump_json(network_to_json(a));
    CHECK(text == dump_json(network_to_json(b)));
    const Network back = network_from_json(parse_json(text, "network"));
    CHECK(back == a);
    CHECK(dump_json(network_to_json(back)) == text);
}

TEST_CASE("approximation curves") {
    const auto mu = uniform_sample(256, 1);
    const auto f = TargetFunction::sin_product(1);
    const YoungFunction phi = YoungFunction::power(2.0);
    const auto rows = approximation_curve(f, mu, phi, {8, 16, 32}, Activation::sigmoid, {1, 2, 3});
    REQUIRE(rows.size() == 9);
    CHECK(rows[0].width == 8);
    CHECK(rows[3].width == 16);
    CHECK(rows[4].seed == 2);
    for (const auto& r : rows) {
        CHECK(r.fit_millis == 0.0);
        // phi = x^2 makes the gauge error the L2 residual
        const Network eta = fit_random_features(f, mu, r.width, Activation::sigmoid, r.seed);
        CHECK(r.gauge_error == doctest::Approx(residual(eta, mu, f.on(mu))).epsilon(1e-8));
        CHECK(r.l1_error <= r.gauge_error * (1.0 + 1e-8));
    }
    const auto best = best_per_width(rows);
    REQUIRE(best.size() == 3);
    for (std::size_t i = 1; i < best.size(); ++i) {
        CHECK(best[i].gauge_error <= best[i - 1].gauge_error);
    }
    CHECK(approximation_curve(f, mu, phi, {8}, Activation::sigmoid, {1}).size() == 1);

    // a table target on a few points is interpolated once features + intercept match the count
    const auto small = make_discrete_1d({0.0, 0.25, 0.5, 0.75, 1.0}, {0.2, 0.2, 0.2, 0.2, 0.2});
    const auto tab = TargetFunction::table(small.points(), FunctionTable::scalar({1.0, -2.0, 0.5, 3.0, 0.0}));
    const auto exact = approximation_curve(tab, small, phi, {4}, Activation::tanh, {1}, {0.0});
    CHECK(exact[0].gauge_error <= 1e-10);

    const auto timed = approximation_curve(f, mu, phi, {8}, Activation::sigmoid, {1},
                                           CurveOptions{1e-10, VectorNorm::euclidean, true});
    CHECK(timed[0].fit_millis >= 0.0);
}
