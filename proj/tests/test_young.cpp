#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "ouat/young.hpp"

using namespace ouat;

namespace {

const double e = std::numbers::e;

std::vector<YoungFunction> catalog() {
    return {YoungFunction::power(1.0), YoungFunction::power(2.0, 0.5), YoungFunction::power(3.0),
            YoungFunction::power(1.5, 2.0), YoungFunction::exp_minus_linear(),
            YoungFunction::entropy()};
}

// sup over a dense x grid, independent of the library's conjugate code
double brute_conjugate(const YoungFunction& phi, double y, double x_max) {
    double best = 0.0;
    const int n = 2000000;
    for (int i = 0; i <= n; ++i) {
        const double x = x_max * i / n;
        best = std::max(best, x * y - phi(x));
    }
    return best;
}

} // namespace

TEST_CASE("evaluate on the closed forms") {
    CHECK(evaluate(YoungFunction::power(2.0, 0.5), 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (const auto& phi : catalog()) {
        CHECK(phi(0.0) == 0.0);
    }
    CHECK(YoungFunction::entropy()(e - 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(YoungFunction::exp_minus_linear()(1.0) == doctest::Approx(e - 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(YoungFunction::power(2.0)(std::nan("")), DomainError);
    CHECK_THROWS_AS(YoungFunction::power(0.5), DomainError);
}

TEST_CASE("young functions are even, monotone and convex on probes") {
    gen::Rng rng(11);
    for (const auto& phi : catalog()) {
        for (int t = 0; t < 2000; ++t) {
            const double x = gen::uniform(rng, 0.0, 20.0);
            const double y = gen::uniform(rng, 0.0, 20.0);
            CHECK(phi(-x) == phi(x));
            CHECK(phi(std::min(x, y)) <= phi(std::max(x, y)));
            CHECK(phi(0.5 * (x + y)) <= 0.5 * (phi(x) + phi(y)) + 1e-12 * (1.0 + phi(x) + phi(y)));
        }
    }
}

TEST_CASE("tabulated functions keep the convex hull") {
    // (1, 5) lies above the chord from (0, 0) to (2, 2) and is dropped
    const YoungFunction t = YoungFunction::tabulated({1.0, 2.0, 3.0}, {5.0, 5.0, 9.0});
    CHECK(t(0.0) == 0.0);
    CHECK(t(1.0) <= 5.0);
    CHECK(t(-2.5) == t(2.5));
    for (double x = 0.0; x < 4.0; x += 0.01) {
        CHECK(t(x + 0.005) <= 0.5 * (t(x) + t(x + 0.01)) + 1e-12);
    }
    CHECK(t(4.0) == doctest::Approx(t(3.0) + (t(3.0) - t(2.0))));
    CHECK_THROWS_AS(YoungFunction::tabulated({1.0, 0.5}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(YoungFunction::tabulated({1.0, 2.0}, {2.0, 1.0}), DomainError);
}

TEST_CASE("complementary of cataloged kinds") {
    const YoungFunction half = YoungFunction::power(2.0, 0.5);
    CHECK(complementary(half) == half);
    CHECK(complementary(half)(1.0) == doctest::Approx(0.5));

    const YoungFunction cubic = complementary(YoungFunction::power(3.0, 1.0 / 3.0));
    CHECK(cubic.kind() == YoungKind::power);
    CHECK(cubic.p() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(cubic.scale() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(cubic(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const YoungFunction ent = complementary(YoungFunction::exp_minus_linear());
    CHECK(ent.kind() == YoungKind::entropy);
    CHECK(ent(e - 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(brute_conjugate(YoungFunction::exp_minus_linear(), e - 1.0, 5.0) ==
          doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(complementary(YoungFunction::power(1.0)), UnboundedConjugateError);
}

TEST_CASE("general power scale against a brute-force supremum") {
    const YoungFunction phi = YoungFunction::power(2.5, 0.7);
    const YoungFunction psi = complementary(phi);
    for (double y : {0.3, 1.0, 2.0, 4.0}) {
        CHECK(psi(y) == doctest::Approx(brute_conjugate(phi, y, 20.0)).epsilon(1e-8));
    }
}

TEST_CASE("numeric conjugate agrees with the closed forms") {
    for (double p : {1.5, 2.0, 3.0}) {
        const double q = p / (p - 1.0);
        const YoungFunction phi = YoungFunction::power(p, 1.0 / p);
        for (double y : {0.1, 0.5, 1.0, 3.0, 10.0}) {
            CHECK(conjugate_value(phi, y) == doctest::Approx(std::pow(y, q) / q).epsilon(1e-9));
        }
        // default 1024-node tabulation: secant error between log-spaced nodes
        const YoungFunction tab = complementary_numeric(phi);
        CHECK(tab.kind() == YoungKind::tabulated);
        for (double y : geometric_grid(0.1, 10.0, 50)) {
            CHECK(tab(y) == doctest::Approx(std::pow(y, q) / q).epsilon(1e-3));
        }
    }
    CHECK(conjugate_value(YoungFunction::entropy(), 1.0) == doctest::Approx(e - 2.0).epsilon(1e-9));
    const YoungFunction kinked = YoungFunction::tabulated({1.0, 2.0}, {1.0, 3.0});
    // sup_x (x y - phi(x)) is attained at a hull vertex: y = 1.5 gives max(0, 0.5, 0)
    CHECK(conjugate_value(kinked, 1.5) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(complementary_numeric(YoungFunction::power(1.0)), UnboundedConjugateError);
}

TEST_CASE("conjugate duality") {
    for (const auto& phi : catalog()) {
        if (phi.kind() == YoungKind::power && phi.p() == 1.0) {
            continue;
        }
        const YoungFunction back = complementary(complementary(phi));
        for (double x : geometric_grid(1e-3, 1e2, 40)) {
            CHECK(back(x) == doctest::Approx(phi(x)).epsilon(1e-6));
        }
    }
    // numeric round trip: discretization error of two tabulations. A table is
    // linear past its last node, so its conjugate is finite only below the
    // final slope; the second pass stays well inside it.
    const YoungFunction phi = YoungFunction::power(2.0, 0.5);
    const YoungFunction twice =
        complementary_numeric(complementary_numeric(phi), GridSpec{1024, 1e-4, 100.0});
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(twice(x) == doctest::Approx(phi(x)).epsilon(1e-3));
    }
}

TEST_CASE("young inequality") {
    const YoungFunction half = YoungFunction::power(2.0, 0.5);
    CHECK(1.0 * 1.0 - half(1.0) - half(1.0) == 0.0);
    const auto r = check_young_inequality(YoungFunction::power(3.0, 1.0 / 3.0),
                                          YoungFunction::power(1.5, 1.0 / 1.5), 10000, 5);
    CHECK(r.samples == 10000);
    CHECK(r.max_violation <= 1e-12);
    CHECK(r.witnesses.size() <= 5);

    gen::Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto [phi, psi] = gen::young_pair(rng);
        CHECK(check_young_inequality(phi, psi, 10000, rng()).max_violation <= 1e-10);
        CHECK(psi(gen::uniform(rng, 0.0, 5.0)) >= 0.0); // x = 0 leaves slack psi(y)
    }
    // a wrong partner is caught
    const auto bad = check_young_inequality(half, YoungFunction::power(2.0, 0.25), 2000, 1);
    CHECK(bad.max_violation > 0.1);
}

TEST_CASE("n-function verdicts") {
    CHECK(is_n_function(YoungFunction::power(2.0)).is_n_function);
    const auto linear = is_n_function(YoungFunction::power(1.0));
    CHECK_FALSE(linear.is_n_function);
    CHECK(linear.limit0_estimate == doctest::Approx(1.0));
    CHECK(is_n_function(YoungFunction::exp_minus_linear()).is_n_function);
    // phi(x)/x grows like ln x for the entropy kind, so the numeric proxy
    // needs a smaller growth threshold; the analytic verdict is exact
    CHECK(is_n_function(YoungFunction::entropy(), default_n_function_probes(), {1e-4, 10.0})
              .is_n_function);
    CHECK(known_n_function(YoungFunction::entropy()));
    CHECK_FALSE(known_n_function(YoungFunction::power(1.0)));
}

TEST_CASE("delta2") {
    const auto grid = geometric_grid(1.0, 1e3, 60);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        const auto r = check_delta2(YoungFunction::power(p), 1.0, grid);
        CHECK(r.holds);
        CHECK(r.k_estimate == doctest::Approx(std::pow(2.0, p)).epsilon(1e-12));
    }
    CHECK_FALSE(check_delta2(YoungFunction::exp_minus_linear(), 1.0, geometric_grid(1.0, 50.0, 40)).holds);
    const auto ent = check_delta2(YoungFunction::entropy(), 1.0, geometric_grid(1.0, 1e8, 80));
    CHECK(ent.holds);
    CHECK(ent.ratios.back() == doctest::Approx(2.0).epsilon(0.1));
    CHECK_THROWS_AS(check_delta2(YoungFunction::power(2.0), 1.0, {0.5}), DomainError);
}

TEST_CASE("inverse") {
    CHECK(inverse(YoungFunction::power(2.0), 4.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(inverse(YoungFunction::entropy(), 0.0) == 0.0);
    CHECK(inverse(YoungFunction::entropy(), 1.0) == doctest::Approx(e - 1.0).epsilon(1e-11));
    for (const auto& phi : {YoungFunction::power(1.5), YoungFunction::power(3.0, 0.2),
                            YoungFunction::exp_minus_linear(), YoungFunction::entropy()}) {
        for (double x : {0.01, 0.5, 1.0, 7.0, 90.0, 1000.0}) {
            if (phi.kind() == YoungKind::exp_minus_linear && x > 600.0) {
                continue; // e^x overflows
            }
            const double back = inverse(phi, phi(x), 1e-13);
            CHECK(std::fabs(phi(back) - phi(x)) <= 1e-13 * std::max(1.0, phi(x)));
        }
    }
}
