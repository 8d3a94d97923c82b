#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ouat/fit.hpp"
#include "ouat/io.hpp"
#include "ouat/measure.hpp"
#include "ouat/net.hpp"
#include "ouat/orlicz.hpp"
#include "ouat/young.hpp"

namespace ouat {

struct AssociatedYoungPair {
    YoungFunction phi_m;
    YoungFunction psi_m;
    DlvpCertificate certificate;
};

/// psi_M from the De la Vallee Poussin catalog search, phi_M its complementary.
AssociatedYoungPair associated_young_pair(const MeasureFamily& family,
                                          const std::vector<YoungFunction>& psi_candidates);

struct RobustError {
    std::vector<double> per_member;
    double sup = 0.0;
};

/// ||f - eta||_{L1(nu)} for every member nu, and their maximum.
RobustError robust_error(const MeasureFamily& family, const TargetFunction& f, const Network& eta,
                         VectorNorm norm = VectorNorm::euclidean);
/// Same, for f - eta tabulated on the dominating support.
RobustError robust_error(const MeasureFamily& family, const FunctionTable& diff,
                         VectorNorm norm = VectorNorm::euclidean);

struct RobustReport {
    std::vector<double> per_measure_l1;
    double sup_l1 = 0.0;
    double gauge_error = 0.0;      // N_{phi_M, mu_M}(f - eta)
    double density_norm_sup = 0.0; // sup_nu N_{psi_M, mu_M}(d nu / d mu_M)
    double holder_rhs = 0.0;       // 2 gauge_error density_norm_sup
    bool bound_holds = false;
    double epsilon = 0.0;
    // experiment bookkeeping
    std::string case_name;
    std::string network_file;
    bool reached_epsilon = false;
    std::size_t width = 0;
    std::uint64_t seed = 0;
    std::string phi_m;
    std::string psi_m;
};

/// Fills a RobustReport for f - eta tabulated on the dominating support.
/// Throws InvariantViolation when the change-of-measure identity fails
/// (1e-12 relative) or the Hoelder chain sup_l1 <= holder_rhs (1 + 1e-8)
/// does not hold.
RobustReport verify_robust_bound(const MeasureFamily& family, const YoungFunction& phi_m,
                                 const YoungFunction& psi_m, const FunctionTable& diff,
                                 VectorNorm norm = VectorNorm::euclidean);
RobustReport verify_robust_bound(const MeasureFamily& family, const YoungFunction& phi_m,
                                 const YoungFunction& psi_m, const TargetFunction& f,
                                 const Network& eta, VectorNorm norm = VectorNorm::euclidean);

Json report_to_json(const RobustReport& report);
/// Throws ValidationError on a malformed report.
RobustReport report_from_json(const Json& j);

/// Which network class approximates f.
enum class RobustCase {
    bounded_shallow, // i: bounded activation, one hidden layer
    relu_narrow,     // ii: register-width ReLU network from fit + clip
    nonpoly_compact, // iii: non-polynomial activation, supports in a compact box
    fnn,             // iv: functional-input network over H* with weights
};

std::string to_string(RobustCase c);
/// "i" | "ii" | "iii" | "iv"; throws DomainError otherwise.
RobustCase parse_robust_case(const std::string& name);

struct ExperimentConfig {
    RobustCase robust_case = RobustCase::bounded_shallow;
    TargetFunction target = TargetFunction::sin_product(1);
    std::vector<YoungFunction> psi_candidates = default_psi_candidates();
    Activation act = Activation::sigmoid;
    double epsilon = 0.05;
    /// Width 0 stands for the zero network.
    std::vector<std::size_t> widths{8, 16, 32, 64, 128};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    double ridge = 1e-10;
    VectorNorm norm = VectorNorm::euclidean;
    std::optional<Box> compact_box; // case iii
    std::optional<Box> j_box;       // case ii, defaults to the support's bounding box
    double delta = 0.05;            // case ii margin, relative to the box extent
    WeightFunction weight = WeightFunction::parse("1+|x|^2");       // case iv, w
    WeightFunction hidden_weight = WeightFunction::parse("1+z^2"); // case iv, w1
    // artifact paths; empty means not written
    std::string report_path;
    std::string curve_path;
    std::string network_path;
};

struct ExperimentResult {
    RobustReport report;
    std::vector<CurveRow> curve; // gauge_error and l1_error (= sup_l1) per trial
    Network network = Network::zero(1, 1);
};

/// Walks the schedule (widths outer, seeds inner), stopping at the first
/// network with sup_l1 < epsilon; otherwise reports the best trial. Checks the
/// hypotheses of the chosen case first and throws HypothesisError naming the
/// one that fails. Writes the report JSON, curve CSV and network JSON when
/// the config names paths.
ExperimentResult run_robust_experiment(const ExperimentConfig& config,
                                       const MeasureFamily& family);

} // namespace ouat
