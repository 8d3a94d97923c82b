#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ouat/error.hpp"

namespace ouat {

enum class YoungKind { power, exp_minus_linear, entropy, tabulated };

/// An even convex function phi with phi(0) = 0 growing to infinity.
///
/// Cataloged kinds have closed forms on y = |x|:
///   power              scale * y^p          (p >= 1)
///   exp_minus_linear   e^y - y - 1
///   entropy            (1 + y) ln(1 + y) - y
/// A tabulated function is the lower convex hull of the given nodes,
/// interpolated by secants and extended linearly past the last node.
/// Values are immutable after construction.
class YoungFunction {
public:
    static YoungFunction power(double p, double scale = 1.0);
    static YoungFunction exp_minus_linear();
    static YoungFunction entropy();
    /// Nodes need not contain 0; (0, 0) is prepended when absent. Throws
    /// DomainError unless the grid is increasing, nonnegative and the values
    /// are nonnegative and nondecreasing.
    static YoungFunction tabulated(std::vector<double> grid, std::vector<double> values);

    YoungKind kind() const noexcept { return kind_; }
    double p() const noexcept { return p_; }
    double scale() const noexcept { return scale_; }
    bool has_derivative() const noexcept { return kind_ != YoungKind::tabulated; }

    /// Hull nodes of a tabulated function (empty for cataloged kinds).
    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// phi(|x|). Throws DomainError for non-finite x.
    double operator()(double x) const;
    /// Right derivative on [0, inf) evaluated at |x|; requires has_derivative().
    double derivative(double x) const;

    /// Compact textual form, e.g. "power:2:0.5", "entropy", "tabulated:1024".
    std::string describe() const;

    friend bool operator==(const YoungFunction&, const YoungFunction&) = default;

private:
    YoungFunction() = default;

    YoungKind kind_ = YoungKind::power;
    double p_ = 2.0;
    double scale_ = 1.0;
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// phi(|x|); free-function spelling of YoungFunction::operator().
double evaluate(const YoungFunction& phi, double x);

/// Ordinates used to tabulate a numeric conjugate: {0} followed by
/// `count - 1` log-spaced points in [y_min, y_max].
struct GridSpec {
    std::size_t count = 1024;
    double y_min = 1e-4;
    double y_max = 1e4;

    std::vector<double> points() const;
};

/// Complementary function psi(y) = sup_{x >= 0} (x |y| - phi(x)).
///
/// Cataloged pairs are returned in closed form (power <-> power,
/// exp_minus_linear <-> entropy); everything else is tabulated by
/// complementary_numeric.
YoungFunction complementary(const YoungFunction& phi, const GridSpec& grid = {});

/// Always tabulates: derivative inversion by bisection when phi has a
/// derivative, golden-section search on [0, x_max] otherwise. Throws
/// UnboundedConjugateError when the supremum escapes the growth budget.
YoungFunction complementary_numeric(const YoungFunction& phi, const GridSpec& grid = {});

/// Single conjugate value sup_{x >= 0} (x |y| - phi(x)).
double conjugate_value(const YoungFunction& phi, double y);

struct YoungWitness {
    double x = 0.0;
    double y = 0.0;
    double violation = 0.0; // x*y - phi(x) - psi(y), may be negative
};

struct YoungInequalityReport {
    double max_violation = 0.0;         // max(x*y - phi(x) - psi(y), 0)
    std::vector<YoungWitness> witnesses; // the worst samples, descending
    std::size_t samples = 0;
};

/// Samples x*y <= phi(x) + psi(y). Half the samples are drawn near the
/// equality curve y = phi'(x) when phi has a derivative.
YoungInequalityReport check_young_inequality(const YoungFunction& phi, const YoungFunction& psi,
                                             std::size_t sample_count, std::uint64_t seed,
                                             double x_max = 10.0);

struct NFunctionVerdict {
    bool is_n_function = false;
    double limit0_estimate = 0.0;   // phi(x)/x at the smallest positive probe
    double limitinf_estimate = 0.0; // phi(x)/x at the largest probe
    bool vanishes_only_at_zero = false;
    std::vector<double> probes;
};

struct NFunctionThresholds {
    double tol0 = 1e-4;
    double big = 1e4;
};

/// Geometric grid with `count` points in [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

/// Default probe grid for is_n_function: 161 points spanning [1e-8, 1e8].
std::vector<double> default_n_function_probes();

NFunctionVerdict is_n_function(const YoungFunction& phi, const std::vector<double>& probes,
                               const NFunctionThresholds& thresholds = {});
NFunctionVerdict is_n_function(const YoungFunction& phi);

/// Analytic N-function status of cataloged kinds; tabulated kinds fall back
/// to the numeric verdict.
bool known_n_function(const YoungFunction& phi);

struct Delta2Report {
    bool holds = false;
    double k_estimate = 0.0;         // max phi(2x)/phi(x) over the grid
    std::vector<double> ratios;      // phi(2x)/phi(x) per probe
};

struct Delta2Options {
    double cap = 1e3;
    double plateau_tol = 1e-2;
};

/// Numeric Delta_2 test phi(2x) <= K phi(x) for x >= x0. Throws DomainError
/// when a probe lies below x0 or phi vanishes at a probe.
Delta2Report check_delta2(const YoungFunction& phi, double x0, const std::vector<double>& probes,
                          const Delta2Options& options = {});

/// x >= 0 with |phi(x) - y| <= tol * max(1, y), by bisection after
/// geometric bracketing. Requires phi strictly increasing on [0, inf).
double inverse(const YoungFunction& phi, double y, double tol = 1e-12);

} // namespace ouat
