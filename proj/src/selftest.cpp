#include "ouat/selftest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "ouat/fit.hpp"
#include "ouat/io.hpp"
#include "ouat/net.hpp"
#include "ouat/orlicz.hpp"
#include "ouat/robust.hpp"

namespace ouat {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

DiscreteMeasure random_measure(Rng& rng, std::size_t n) {
    std::vector<double> xs(n);
    std::vector<double> ws(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = static_cast<double>(i);
        ws[i] = uniform(rng, 0.05, 2.0);
    }
    return make_discrete_1d(xs, ws);
}

FunctionTable random_table(Rng& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = uniform(rng, -scale, scale);
    }
    return FunctionTable::scalar(std::move(v));
}

Network random_shallow(Rng& rng, std::size_t n0, std::size_t nl, std::size_t m) {
    std::normal_distribution<double> normal(0.0, 1.0);
    if (m == 0) {
        std::vector<double> a(n0 * nl);
        std::vector<double> b(nl);
        for (double& v : a) {
            v = normal(rng);
        }
        for (double& v : b) {
            v = normal(rng);
        }
        return Network::affine(n0, nl, a, b);
    }
    Layer hidden{m, n0, std::vector<double>(m * n0), std::vector<double>(m), Activation::relu};
    Layer out{nl, m, std::vector<double>(nl * m), std::vector<double>(nl), Activation::none};
    for (double& v : hidden.weights) {
        v = normal(rng);
    }
    for (double& v : hidden.bias) {
        v = normal(rng);
    }
    for (double& v : out.weights) {
        v = normal(rng);
    }
    for (double& v : out.bias) {
        v = normal(rng);
    }
    return Network(n0, {hidden, out});
}

Point random_point(Rng& rng, const Box& box) {
    Point x(box.dim());
    for (std::size_t d = 0; d < box.dim(); ++d) {
        x[d] = uniform(rng, box.lo[d], box.hi[d]);
    }
    return x;
}

SuiteResult young_suite(Rng& rng) {
    const std::vector<std::pair<YoungFunction, YoungFunction>> pairs{
        {YoungFunction::power(2.0, 0.5), YoungFunction::power(2.0, 0.5)},
        {YoungFunction::power(3.0, 1.0 / 3.0), YoungFunction::power(1.5, 1.0 / 1.5)},
        {YoungFunction::exp_minus_linear(), YoungFunction::entropy()},
    };
    double worst = 0.0;
    for (const auto& [phi, psi] : pairs) {
        worst = std::max(worst, check_young_inequality(phi, psi, 2000, rng()).max_violation);
    }
    return {"young_inequality", worst <= 1e-10, "max violation " + format_double(worst)};
}

SuiteResult lp_suite(Rng& rng) {
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const double p = std::array<double, 4>{1.0, 1.5, 2.0, 3.0}[pick(rng, 0, 3)];
        const std::size_t n = pick(rng, 1, 30);
        const DiscreteMeasure mu = random_measure(rng, n);
        const FunctionTable f = random_table(rng, n, 5.0);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += std::pow(std::fabs(f.flat()[i]), p) * mu.weight(i);
        }
        const double exact = std::pow(sum, 1.0 / p);
        const double got = gauge_norm(YoungFunction::power(p), mu, f).value;
        if (exact > 0.0) {
            worst = std::max(worst, std::fabs(got - exact) / exact);
        }
    }
    return {"lp_consistency", worst <= 1e-8, "max relative error " + format_double(worst)};
}

SuiteResult holder_suite(Rng& rng) {
    const std::vector<std::pair<YoungFunction, YoungFunction>> pairs{
        {YoungFunction::power(2.0, 0.5), YoungFunction::power(2.0, 0.5)},
        {YoungFunction::power(3.0, 1.0 / 3.0), YoungFunction::power(1.5, 1.0 / 1.5)},
        {YoungFunction::exp_minus_linear(), YoungFunction::entropy()},
    };
    std::size_t failures = 0;
    for (int t = 0; t < 100; ++t) {
        const auto& [phi, psi] = pairs[pick(rng, 0, pairs.size() - 1)];
        const std::size_t n = pick(rng, 1, 20);
        const DiscreteMeasure mu = random_measure(rng, n);
        if (!holder_check(phi, psi, mu, random_table(rng, n, 3.0), random_table(rng, n, 3.0)).holds) {
            ++failures;
        }
    }
    return {"generalized_holder", failures == 0, std::to_string(failures) + " failures"};
}

SuiteResult gauge_axiom_suite(Rng& rng) {
    std::size_t failures = 0;
    const YoungFunction phis[] = {YoungFunction::power(1.0), YoungFunction::power(2.0, 0.5),
                                  YoungFunction::exp_minus_linear(), YoungFunction::entropy()};
    for (int t = 0; t < 100; ++t) {
        const YoungFunction& phi = phis[pick(rng, 0, 3)];
        const std::size_t n = pick(rng, 1, 20);
        const DiscreteMeasure mu = random_measure(rng, n);
        const FunctionTable f = random_table(rng, n, 3.0);
        const FunctionTable g = random_table(rng, n, 3.0);
        const double a = uniform(rng, -4.0, 4.0);
        const double nf = gauge_norm(phi, mu, f).value;
        const double ng = gauge_norm(phi, mu, g).value;
        const double naf = gauge_norm(phi, mu, f.scaled(a)).value;
        const double nfg = gauge_norm(phi, mu, f + g).value;
        if (std::fabs(naf - std::fabs(a) * nf) > 1e-8 * std::max(1.0, std::fabs(a) * nf)) {
            ++failures;
        }
        if (nfg > (nf + ng) * (1.0 + 1e-8)) {
            ++failures;
        }
        if (nf > 0.0 && modular(phi, mu, f, nf) > 1.0 + 1e-8) {
            ++failures;
        }
    }
    return {"gauge_norm_axioms", failures == 0, std::to_string(failures) + " failures"};
}

SuiteResult gadget_suite(Rng& rng) {
    const Network mx = max_gadget();
    const Network mn = min_gadget();
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const double x = uniform(rng, -100.0, 100.0);
        const double y = uniform(rng, -100.0, 100.0);
        const std::vector<double> in{x, y};
        worst = std::max(worst, std::fabs(mx(in)[0] - std::max(x, y)));
        worst = std::max(worst, std::fabs(mn(in)[0] - std::min(x, y)));
    }
    const Network bump = bump_1d(0.0, 1.0, 0.5);
    const bool bump_ok = evaluate_scalar(bump, 0.5) == 1.0 && evaluate_scalar(bump, -0.5) == 0.0 &&
                         evaluate_scalar(bump, 1.5) == 0.0 &&
                         std::fabs(evaluate_scalar(bump, -0.25) - 0.5) <= 1e-12;
    return {"relu_gadgets", worst <= 1e-12 && bump_ok,
            "max gadget error " + format_double(worst) + (bump_ok ? "" : ", bump mismatch")};
}

SuiteResult register_suite(Rng& rng) {
    double worst_register = 0.0;
    double worst_outside = 0.0;
    double worst_clip = 0.0;
    bool widths_ok = true;
    for (int t = 0; t < 5; ++t) {
        const std::size_t n0 = pick(rng, 1, 3);
        const std::size_t nl = pick(rng, 1, 2);
        const Network g = random_shallow(rng, n0, nl, pick(rng, 0, 16));
        Box box{std::vector<double>(n0), std::vector<double>(n0)};
        for (std::size_t d = 0; d < n0; ++d) {
            box.lo[d] = uniform(rng, -2.0, 0.0);
            box.hi[d] = box.lo[d] + uniform(rng, 0.5, 2.0);
        }
        const RegisterNetwork reg = to_register_form(g, box);
        widths_ok = widths_ok && has_uniform_hidden_width(reg.net, n0 + nl + 1);
        for (int s = 0; s < 100; ++s) {
            const Point x = random_point(rng, box);
            const auto a = g(x);
            const auto b = reg.net(x);
            for (std::size_t j = 0; j < nl; ++j) {
                worst_register = std::max(worst_register, std::fabs(a[j] - b[j]));
            }
        }
        double delta = 1e300;
        for (std::size_t d = 0; d < n0; ++d) {
            delta = std::min(delta, 0.2 * (box.hi[d] - box.lo[d]));
        }
        const Box j_box = Box{box.lo, box.hi}.enlarged(-delta);
        const Box k_box = j_box.enlarged(delta);
        const double c = uniform(rng, -2.0, 0.0);
        const double big_c = c + uniform(rng, 0.1, 3.0);
        const Network clipped = clip_and_localize(reg, j_box, delta, c, big_c);
        widths_ok = widths_ok && has_uniform_hidden_width(clipped, n0 + nl + 1);
        for (int s = 0; s < 100; ++s) {
            const Point x = random_point(rng, j_box);
            const auto a = g(x);
            const auto b = clipped(x);
            for (std::size_t j = 0; j < nl; ++j) {
                worst_clip = std::max(worst_clip, std::fabs(std::clamp(a[j], c, big_c) - b[j]));
            }
            Point y = random_point(rng, box.enlarged(2.0));
            if (!k_box.contains(y)) {
                for (double v : clipped(y)) {
                    worst_outside = std::max(worst_outside, std::fabs(v));
                }
            }
        }
    }
    const bool ok = widths_ok && worst_register <= 1e-9 && worst_clip <= 1e-9 && worst_outside <= 1e-12;
    return {"register_and_clip", ok,
            "register " + format_double(worst_register) + ", clip " + format_double(worst_clip) +
                ", outside " + format_double(worst_outside) + (widths_ok ? "" : ", width mismatch")};
}

SuiteResult robust_suite(Rng& rng) {
    std::size_t failures = 0;
    for (int t = 0; t < 30; ++t) {
        std::vector<DiscreteMeasure> members;
        const std::size_t count = pick(rng, 1, 4);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t n = pick(rng, 1, 12);
            std::vector<double> xs(n);
            std::vector<double> ws(n);
            for (std::size_t i = 0; i < n; ++i) {
                xs[i] = static_cast<double>(pick(rng, 0, 15));
                ws[i] = uniform(rng, 0.01, 1.0);
            }
            members.push_back(make_discrete_1d(xs, ws));
        }
        const MeasureFamily family(members);
        const FunctionTable diff = random_table(rng, family.dominating().size(), 2.0);
        try {
            const auto pair = associated_young_pair(family, default_psi_candidates());
            const RobustReport r = verify_robust_bound(family, pair.phi_m, pair.psi_m, diff);
            if (!r.bound_holds) {
                ++failures;
            }
        } catch (const std::logic_error&) {
            ++failures;
        }
    }
    return {"robust_holder_chain", failures == 0, std::to_string(failures) + " failures"};
}

SuiteResult family_suite() {
    const std::vector<Point> probes = cube_grid(2, -1.0, 1.0, 4);
    const bool affine_ok = check_additive_family(affine_family(2), probes).all_pass();
    const auto linear = check_additive_family(linear_family(2), probes);
    const auto zero = check_additive_family(zero_family(2), probes);
    const bool ok = affine_ok && !linear.contains_constants && !zero.point_separating;
    return {"additive_family_axioms", ok,
            std::string(affine_ok ? "affine passes" : "affine fails") +
                (linear.contains_constants ? ", linear has constants" : "") +
                (zero.point_separating ? ", zero separates" : "")};
}

SuiteResult conjugate_suite() {
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0}) {
        const double q = p / (p - 1.0);
        const GridSpec grid{17, 0.1, 10.0};
        const YoungFunction psi = complementary_numeric(YoungFunction::power(p, 1.0 / p), grid);
        for (double y : geometric_grid(0.1, 10.0, 16)) {
            const double exact = std::pow(y, q) / q;
            worst = std::max(worst, std::fabs(psi(y) - exact) / exact);
        }
    }
    return {"numeric_conjugate", worst <= 1e-6, "max relative error " + format_double(worst)};
}

} // namespace

std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::function<SuiteResult()>> suites{
        [&] { return young_suite(rng); },
        [&] { return lp_suite(rng); },
        [&] { return holder_suite(rng); },
        [&] { return gauge_axiom_suite(rng); },
        [&] { return gadget_suite(rng); },
        [&] { return register_suite(rng); },
        [&] { return robust_suite(rng); },
        [] { return family_suite(); },
        [] { return conjugate_suite(); },
    };
    std::vector<SuiteResult> results;
    for (const auto& suite : suites) {
        try {
            results.push_back(suite());
        } catch (const std::exception& e) {
            results.push_back({"suite " + std::to_string(results.size()), false, e.what()});
        }
    }
    return results;
}

} // namespace ouat
