#include "ouat/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ouat {

AssociatedYoungPair associated_young_pair(const MeasureFamily& family,
                                          const std::vector<YoungFunction>& psi_candidates) {
    DlvpCertificate cert = dlvp_certificate(family, psi_candidates);
    YoungFunction phi = complementary(cert.psi);
    YoungFunction psi = cert.psi;
    return AssociatedYoungPair{std::move(phi), std::move(psi), std::move(cert)};
}

RobustError robust_error(const MeasureFamily& family, const FunctionTable& diff, VectorNorm norm) {
    if (diff.size() != family.dominating().size()) {
        throw DomainError("f - eta must be tabulated on the dominating support");
    }
    const std::vector<double> mags = diff.magnitudes(norm);
    RobustError out;
    for (std::size_t k = 0; k < family.size(); ++k) {
        const DiscreteMeasure& nu = family.member(k);
        const auto& map = family.support_map(k);
        double sum = 0.0;
        for (std::size_t i = 0; i < nu.size(); ++i) {
            sum += mags[map[i]] * nu.weight(i);
        }
        out.per_member.push_back(sum);
        out.sup = std::max(out.sup, sum);
    }
    return out;
}

RobustError robust_error(const MeasureFamily& family, const TargetFunction& f, const Network& eta,
                         VectorNorm norm) {
    const DiscreteMeasure& mu = family.dominating();
    return robust_error(family, f.on(mu) - eta.evaluate_on(mu), norm);
}

RobustReport verify_robust_bound(const MeasureFamily& family, const YoungFunction& phi_m,
                                 const YoungFunction& psi_m, const FunctionTable& diff,
                                 VectorNorm norm) {
    const DiscreteMeasure& mu = family.dominating();
    const RobustError err = robust_error(family, diff, norm);
    const std::vector<double> mags = diff.magnitudes(norm);

    for (std::size_t k = 0; k < family.size(); ++k) {
        const auto& density = family.densities()[k];
        double via_density = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            via_density += mags[i] * density[i] * mu.weight(i);
        }
        const double direct = err.per_member[k];
        if (std::fabs(via_density - direct) > 1e-12 * std::max(std::fabs(direct), std::fabs(via_density))) {
            throw InvariantViolation("change of measure: density-weighted integral " +
                                     format_double(via_density) + " differs from direct L1 " +
                                     format_double(direct) + " for member " + std::to_string(k));
        }
    }

    RobustReport report;
    report.per_measure_l1 = err.per_member;
    report.sup_l1 = err.sup;
    report.gauge_error = gauge_norm_of_magnitudes(phi_m, mu.weights(), mags).value;
    for (const auto& density : family.densities()) {
        report.density_norm_sup =
            std::max(report.density_norm_sup,
                     gauge_norm_of_magnitudes(psi_m, mu.weights(), density).value);
    }
    report.holder_rhs = 2.0 * report.gauge_error * report.density_norm_sup;
    report.bound_holds = report.sup_l1 <= report.holder_rhs * (1.0 + 1e-8);
    report.phi_m = phi_m.describe();
    report.psi_m = psi_m.describe();
    if (!report.bound_holds) {
        throw InvariantViolation("Hoelder chain violated: sup_l1 " + format_double(report.sup_l1) +
                                 " > holder_rhs " + format_double(report.holder_rhs));
    }
    return report;
}

RobustReport verify_robust_bound(const MeasureFamily& family, const YoungFunction& phi_m,
                                 const YoungFunction& psi_m, const TargetFunction& f,
                                 const Network& eta, VectorNorm norm) {
    const DiscreteMeasure& mu = family.dominating();
    return verify_robust_bound(family, phi_m, psi_m, f.on(mu) - eta.evaluate_on(mu), norm);
}

Json report_to_json(const RobustReport& r) {
    Json per = Json::array();
    for (double v : r.per_measure_l1) {
        per.push_back(v);
    }
    return Json{{"sup_l1", r.sup_l1},
                {"holder_rhs", r.holder_rhs},
                {"gauge_error", r.gauge_error},
                {"density_norm_sup", r.density_norm_sup},
                {"per_measure_l1", per},
                {"bound_holds", r.bound_holds},
                {"epsilon", r.epsilon},
                {"network_file", r.network_file},
                {"case", r.case_name},
                {"reached_epsilon", r.reached_epsilon},
                {"width", r.width},
                {"seed", r.seed},
                {"phi_M", r.phi_m},
                {"psi_M", r.psi_m}};
}

RobustReport report_from_json(const Json& j) {
    const std::string ctx = "robust report";
    require_keys(j, {"sup_l1", "holder_rhs", "gauge_error", "density_norm_sup", "per_measure_l1",
                     "bound_holds", "epsilon", "network_file", "case", "reached_epsilon", "width",
                     "seed", "phi_M", "psi_M"},
                 ctx);
    RobustReport r;
    r.sup_l1 = get_double(j, "sup_l1", ctx);
    r.holder_rhs = get_double(j, "holder_rhs", ctx);
    r.gauge_error = get_double(j, "gauge_error", ctx);
    r.density_norm_sup = get_double(j, "density_norm_sup", ctx);
    r.per_measure_l1 = get_doubles(j, "per_measure_l1", ctx);
    if (!j.contains("bound_holds") || !j.at("bound_holds").is_boolean()) {
        throw ValidationError(ctx + ": 'bound_holds' must be a boolean");
    }
    r.bound_holds = j.at("bound_holds").get<bool>();
    r.epsilon = j.contains("epsilon") ? get_double(j, "epsilon", ctx) : 0.0;
    r.network_file = j.contains("network_file") ? get_string(j, "network_file", ctx) : "";
    r.case_name = j.contains("case") ? get_string(j, "case", ctx) : "";
    r.reached_epsilon = j.value("reached_epsilon", false);
    r.width = j.contains("width") ? get_count(j, "width", ctx) : 0;
    r.seed = j.contains("seed") ? get_count(j, "seed", ctx) : 0;
    r.phi_m = j.contains("phi_M") ? get_string(j, "phi_M", ctx) : "";
    r.psi_m = j.contains("psi_M") ? get_string(j, "psi_M", ctx) : "";
    return r;
}

std::string to_string(RobustCase c) {
    switch (c) {
    case RobustCase::bounded_shallow:
        return "i";
    case RobustCase::relu_narrow:
        return "ii";
    case RobustCase::nonpoly_compact:
        return "iii";
    case RobustCase::fnn:
        return "iv";
    }
    return "i";
}

RobustCase parse_robust_case(const std::string& name) {
    if (name == "i") {
        return RobustCase::bounded_shallow;
    }
    if (name == "ii") {
        return RobustCase::relu_narrow;
    }
    if (name == "iii") {
        return RobustCase::nonpoly_compact;
    }
    if (name == "iv") {
        return RobustCase::fnn;
    }
    throw DomainError("unknown robust case '" + name + "' (expected i|ii|iii|iv)");
}

namespace {

std::vector<Point> weight_probe_grid(std::size_t dim) {
    const std::size_t per_axis = dim == 1 ? 201 : dim == 2 ? 41 : dim == 3 ? 13 : 5;
    return cube_grid(dim, -10.0, 10.0, per_axis);
}

void check_hypotheses(const ExperimentConfig& cfg, const MeasureFamily& family,
                      const AssociatedYoungPair& pair) {
    const DiscreteMeasure& mu = family.dominating();
    switch (cfg.robust_case) {
    case RobustCase::bounded_shallow:
        if (!is_bounded(cfg.act)) {
            throw HypothesisError("bounded activation",
                                  "case i needs a bounded activation, got " + to_string(cfg.act));
        }
        break;
    case RobustCase::relu_narrow:
        if (cfg.act != Activation::relu) {
            throw HypothesisError("relu activation",
                                  "case ii builds ReLU networks, got " + to_string(cfg.act));
        }
        break;
    case RobustCase::nonpoly_compact: {
        if (is_polynomial(cfg.act)) {
            throw HypothesisError("non-polynomial activation",
                                  to_string(cfg.act) + " is a polynomial");
        }
        if (!cfg.compact_box) {
            throw HypothesisError("compact support", "case iii needs a declared compact box");
        }
        for (std::size_t k = 0; k < family.size(); ++k) {
            for (const Point& x : family.member(k).points()) {
                if (!cfg.compact_box->contains(x)) {
                    throw HypothesisError("compact support",
                                          "member " + std::to_string(k) +
                                              " charges a point outside the declared box");
                }
            }
        }
        break;
    }
    case RobustCase::fnn: {
        if (is_polynomial(cfg.act)) {
            throw HypothesisError("activating function", to_string(cfg.act) + " is a polynomial");
        }
        const std::size_t dim = family.dim();
        std::vector<Point> probes(mu.points().begin(),
                                  mu.points().begin() +
                                      static_cast<std::ptrdiff_t>(std::min<std::size_t>(mu.size(), 32)));
        const AdditiveFamilyReport axioms = check_additive_family(affine_family(dim), probes);
        if (!axioms.all_pass()) {
            throw HypothesisError("additive family", "the affine family failed an axiom check");
        }
        const auto sample = draw_features(dim, 32, 0, mu.bounding_box());
        const WeightCompatibilityReport compat =
            check_weight_compatibility(sample, cfg.weight, cfg.hidden_weight, weight_probe_grid(dim));
        if (!compat.finite) {
            throw HypothesisError("weight compatibility", "sup w1(h(x)) / w(x) is not finite");
        }
        if (!compat.admissible) {
            throw HypothesisError("admissible weight",
                                  "w = " + cfg.weight.describe() + " does not grow at infinity");
        }
        std::vector<double> w_values;
        for (const Point& x : mu.points()) {
            w_values.push_back(cfg.weight(x));
        }
        try {
            const double n = gauge_norm_of_magnitudes(pair.phi_m, mu.weights(), w_values).value;
            if (!std::isfinite(n)) {
                throw BracketError("non-finite");
            }
        } catch (const BracketError&) {
            throw HypothesisError("finite weight norm", "N_{phi_M, mu_M}(w) is not finite");
        }
        break;
    }
    }
}

struct Trial {
    Network network;
    RobustReport report;
};

Trial run_trial(const ExperimentConfig& cfg, const MeasureFamily& family,
                const AssociatedYoungPair& pair, const FunctionTable& target, std::size_t width,
                std::uint64_t seed) {
    const DiscreteMeasure& mu = family.dominating();
    const std::size_t n0 = family.dim();
    const std::size_t nl = cfg.target.output_dim();
    Network eta = width == 0 ? Network::zero(n0, nl)
                             : fit_random_features(cfg.target, mu, width, cfg.act, seed, cfg.ridge);
    if (cfg.robust_case == RobustCase::relu_narrow) {
        const Box j_box = cfg.j_box ? *cfg.j_box : mu.bounding_box();
        const double delta = cfg.delta * std::max(j_box.max_extent(), 1.0);
        const RegisterNetwork reg = to_register_form(eta, j_box.enlarged(delta));
        const auto [lo, hi] = std::minmax_element(target.flat().begin(), target.flat().end());
        eta = clip_and_localize(reg, j_box, delta, *lo - 1.0, *hi + 1.0);
        if (!has_uniform_hidden_width(eta, n0 + nl + 1)) {
            throw InvariantViolation("case ii network does not have register width N0 + NL + 1");
        }
    }
    RobustReport report =
        verify_robust_bound(family, pair.phi_m, pair.psi_m, target - eta.evaluate_on(mu), cfg.norm);
    report.width = width;
    report.seed = seed;
    return Trial{std::move(eta), std::move(report)};
}

} // namespace

ExperimentResult run_robust_experiment(const ExperimentConfig& cfg, const MeasureFamily& family) {
    if (!(cfg.epsilon > 0.0)) {
        throw DomainError("epsilon must be positive");
    }
    if (cfg.widths.empty() || cfg.seeds.empty()) {
        throw DomainError("schedule needs at least one width and one seed");
    }
    if (cfg.target.input_dim() != family.dim()) {
        throw DomainError("target input dimension differs from the family");
    }
    const AssociatedYoungPair pair = associated_young_pair(family, cfg.psi_candidates);
    check_hypotheses(cfg, family, pair);
    const FunctionTable target = cfg.target.on(family.dominating());

    std::optional<Trial> best;
    ExperimentResult result;
    for (std::size_t width : cfg.widths) {
        bool done = false;
        for (std::uint64_t seed : cfg.seeds) {
            Trial trial = run_trial(cfg, family, pair, target, width, seed);
            result.curve.push_back(
                CurveRow{width, seed, trial.report.gauge_error, trial.report.sup_l1, 0.0});
            const bool better = !best || trial.report.sup_l1 < best->report.sup_l1;
            if (better) {
                best = std::move(trial);
            }
            if (best->report.sup_l1 < cfg.epsilon) {
                done = true;
                break;
            }
            if (width == 0) {
                break; // the zero network ignores the seed
            }
        }
        if (done) {
            break;
        }
    }

    result.report = best->report;
    result.report.epsilon = cfg.epsilon;
    result.report.case_name = to_string(cfg.robust_case);
    result.report.reached_epsilon = result.report.sup_l1 < cfg.epsilon;
    result.report.network_file = cfg.network_path;
    result.network = best->network;

    if (!cfg.network_path.empty()) {
        emit_json(cfg.network_path, network_to_json(result.network));
    }
    if (!cfg.curve_path.empty()) {
        emit_csv(cfg.curve_path, curve_header(), curve_rows(result.curve));
    }
    if (!cfg.report_path.empty()) {
        emit_json(cfg.report_path, report_to_json(result.report));
    }
    return result;
}

} // namespace ouat
