#include "ouat/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ouat {

namespace {

constexpr int kGrowthBudget = 200;
constexpr int kBisectionBudget = 400;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

// Lower convex hull of points sorted by abscissa (Andrew's monotone chain).
void lower_hull(std::vector<double>& xs, std::vector<double>& ys) {
    std::vector<double> hx;
    std::vector<double> hy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        while (hx.size() >= 2) {
            const std::size_t n = hx.size();
            // cross product of (h[n-2] -> h[n-1]) and (h[n-2] -> p_i)
            const double cross = (hx[n - 1] - hx[n - 2]) * (ys[i] - hy[n - 2]) -
                                 (hy[n - 1] - hy[n - 2]) * (xs[i] - hx[n - 2]);
            if (cross <= 0.0) {
                hx.pop_back();
                hy.pop_back();
            } else {
                break;
            }
        }
        hx.push_back(xs[i]);
        hy.push_back(ys[i]);
    }
    xs = std::move(hx);
    ys = std::move(hy);
}

double power_conjugate_scale(double p, double scale) {
    // sup_x (x y - s x^p) = (1/q) (s p)^{-(q-1)} y^q
    const double q = p / (p - 1.0);
    return (1.0 / q) * std::pow(scale * p, -(q - 1.0));
}

} // namespace

YoungFunction YoungFunction::power(double p, double scale) {
    if (!(std::isfinite(p) && p >= 1.0)) {
        throw DomainError("power Young function requires finite p >= 1");
    }
    if (!(std::isfinite(scale) && scale > 0.0)) {
        throw DomainError("power Young function requires finite scale > 0");
    }
    YoungFunction phi;
    phi.kind_ = YoungKind::power;
    phi.p_ = p;
    phi.scale_ = scale;
    return phi;
}

YoungFunction YoungFunction::exp_minus_linear() {
    YoungFunction phi;
    phi.kind_ = YoungKind::exp_minus_linear;
    phi.p_ = 0.0;
    phi.scale_ = 1.0;
    return phi;
}

YoungFunction YoungFunction::entropy() {
    YoungFunction phi;
    phi.kind_ = YoungKind::entropy;
    phi.p_ = 0.0;
    phi.scale_ = 1.0;
    return phi;
}

YoungFunction YoungFunction::tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size()) {
        throw DomainError("tabulated Young function: grid and values differ in length");
    }
    if (grid.empty()) {
        throw DomainError("tabulated Young function: empty grid");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require_finite(grid[i], "tabulated grid node");
        require_finite(values[i], "tabulated value");
        if (grid[i] < 0.0 || values[i] < 0.0) {
            throw DomainError("tabulated Young function: grid and values must be nonnegative");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw DomainError("tabulated Young function: grid must be strictly increasing");
        }
        if (i > 0 && values[i] < values[i - 1]) {
            throw DomainError("tabulated Young function: values must be nondecreasing");
        }
    }
    if (grid.front() == 0.0) {
        if (values.front() != 0.0) {
            throw DomainError("tabulated Young function: phi(0) must be 0");
        }
    } else {
        grid.insert(grid.begin(), 0.0);
        values.insert(values.begin(), 0.0);
    }
    if (!(values.back() > 0.0)) {
        throw DomainError("tabulated Young function: values must eventually be positive");
    }
    lower_hull(grid, values);

    YoungFunction phi;
    phi.kind_ = YoungKind::tabulated;
    phi.p_ = 0.0;
    phi.scale_ = 1.0;
    phi.grid_ = std::move(grid);
    phi.values_ = std::move(values);
    return phi;
}

double YoungFunction::operator()(double x) const {
    require_finite(x, "Young function argument");
    const double y = std::fabs(x);
    switch (kind_) {
    case YoungKind::power:
        return scale_ * std::pow(y, p_);
    case YoungKind::exp_minus_linear:
        return std::expm1(y) - y;
    case YoungKind::entropy:
        return (1.0 + y) * std::log1p(y) - y;
    case YoungKind::tabulated: {
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), y);
        std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
        if (hi == grid_.size()) {
            hi = grid_.size() - 1; // linear extension of the last secant
        }
        const std::size_t lo = hi - 1;
        const double slope = (values_[hi] - values_[lo]) / (grid_[hi] - grid_[lo]);
        return values_[lo] + slope * (y - grid_[lo]);
    }
    }
    return 0.0;
}

double YoungFunction::derivative(double x) const {
    require_finite(x, "Young function argument");
    const double y = std::fabs(x);
    switch (kind_) {
    case YoungKind::power:
        if (p_ == 1.0) {
            return scale_;
        }
        return scale_ * p_ * std::pow(y, p_ - 1.0);
    case YoungKind::exp_minus_linear:
        return std::expm1(y);
    case YoungKind::entropy:
        return std::log1p(y);
    case YoungKind::tabulated:
        break;
    }
    throw DomainError("tabulated Young functions carry no derivative");
}

std::string YoungFunction::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
    case YoungKind::power:
        os << "power:" << p_ << ':' << scale_;
        break;
    case YoungKind::exp_minus_linear:
        os << "exp_minus_linear";
        break;
    case YoungKind::entropy:
        os << "entropy";
        break;
    case YoungKind::tabulated:
        os << "tabulated:" << grid_.size();
        break;
    }
    return os.str();
}

double evaluate(const YoungFunction& phi, double x) { return phi(x); }

std::vector<double> GridSpec::points() const {
    if (count < 2) {
        throw DomainError("conjugate grid needs at least 2 ordinates");
    }
    if (!(y_min > 0.0 && y_max > y_min && std::isfinite(y_max))) {
        throw DomainError("conjugate grid needs 0 < y_min < y_max < inf");
    }
    std::vector<double> ys{0.0};
    const std::vector<double> tail = geometric_grid(y_min, y_max, count - 1);
    ys.insert(ys.end(), tail.begin(), tail.end());
    return ys;
}

namespace {

double conjugate_by_derivative(const YoungFunction& phi, double y) {
    double hi = 1.0;
    int grow = 0;
    while (phi.derivative(hi) < y) {
        hi *= 2.0;
        if (++grow > kGrowthBudget || !std::isfinite(hi)) {
            throw UnboundedConjugateError("conjugate supremum not attained at y = " +
                                          std::to_string(y));
        }
    }
    double lo = 0.0;
    for (int it = 0; it < kBisectionBudget; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (phi.derivative(mid) < y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double x = 0.5 * (lo + hi);
    return std::max(x * y - phi(x), 0.0);
}

double conjugate_by_golden_section(const YoungFunction& phi, double y) {
    auto objective = [&](double x) {
        const double v = phi(x);
        return std::isfinite(v) ? x * y - v : -std::numeric_limits<double>::infinity();
    };
    double x_max = 1.0;
    bool grown = false;
    int grow = 0;
    while (objective(2.0 * x_max) >= objective(x_max)) {
        x_max *= 2.0;
        grown = true;
        if (++grow > kGrowthBudget || !std::isfinite(x_max)) {
            throw UnboundedConjugateError("conjugate supremum not attained at y = " +
                                          std::to_string(y));
        }
    }
    // concave objective: the maximizer lies in [x_max/2, 2 x_max] once grown
    double a = grown ? 0.5 * x_max : 0.0;
    double b = 2.0 * x_max;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int it = 0; it < kBisectionBudget && (b - a) > 1e-15 * std::max(1.0, b); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    double best = std::max({objective(0.5 * (a + b)), fc, fd, 0.0});
    if (phi.kind() == YoungKind::tabulated) {
        // hull vertices are the exact candidates for a piecewise-linear phi
        for (std::size_t i = 0; i < phi.grid().size(); ++i) {
            best = std::max(best, phi.grid()[i] * y - phi.values()[i]);
        }
    }
    return best;
}

} // namespace

double conjugate_value(const YoungFunction& phi, double y) {
    require_finite(y, "conjugate argument");
    const double ay = std::fabs(y);
    if (ay == 0.0) {
        return 0.0;
    }
    return phi.has_derivative() ? conjugate_by_derivative(phi, ay)
                                : conjugate_by_golden_section(phi, ay);
}

YoungFunction complementary_numeric(const YoungFunction& phi, const GridSpec& grid) {
    const std::vector<double> ys = grid.points();
    std::vector<double> values;
    values.reserve(ys.size());
    for (double y : ys) {
        const double v = conjugate_value(phi, y);
        if (!std::isfinite(v)) {
            throw UnboundedConjugateError("conjugate overflows at y = " + std::to_string(y));
        }
        values.push_back(v);
    }
    // numeric noise can break monotonicity by an ulp near 0
    for (std::size_t i = 1; i < values.size(); ++i) {
        values[i] = std::max(values[i], values[i - 1]);
    }
    return YoungFunction::tabulated(ys, std::move(values));
}

YoungFunction complementary(const YoungFunction& phi, const GridSpec& grid) {
    switch (phi.kind()) {
    case YoungKind::power: {
        if (phi.p() == 1.0) {
            throw UnboundedConjugateError(
                "conjugate of a linear Young function takes the value +inf");
        }
        const double p = phi.p();
        const double q = p / (p - 1.0);
        if (phi.scale() == 1.0 / p) {
            return YoungFunction::power(q, 1.0 / q);
        }
        return YoungFunction::power(q, power_conjugate_scale(p, phi.scale()));
    }
    case YoungKind::exp_minus_linear:
        return YoungFunction::entropy();
    case YoungKind::entropy:
        return YoungFunction::exp_minus_linear();
    case YoungKind::tabulated:
        break;
    }
    return complementary_numeric(phi, grid);
}

YoungInequalityReport check_young_inequality(const YoungFunction& phi, const YoungFunction& psi,
                                             std::size_t sample_count, std::uint64_t seed,
                                             double x_max) {
    constexpr std::size_t kWitnesses = 5;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, 1e-3);

    YoungInequalityReport report;
    report.samples = sample_count;
    std::vector<YoungWitness> all;
    all.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        const double x = x_max * unit(rng);
        double y = 0.0;
        if (phi.has_derivative() && i % 2 == 1) {
            y = std::max(0.0, phi.derivative(x) * (1.0 + jitter(rng)));
        } else {
            y = x_max * unit(rng);
        }
        const double gap = x * y - phi(x) - psi(y);
        all.push_back({x, y, gap});
        report.max_violation = std::max(report.max_violation, gap);
    }
    const std::size_t keep = std::min(kWitnesses, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      [](const YoungWitness& a, const YoungWitness& b) {
                          return a.violation > b.violation;
                      });
    all.resize(keep);
    report.witnesses = std::move(all);
    return report;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi >= lo) || count == 0) {
        throw DomainError("geometric grid needs 0 < lo <= hi and count >= 1");
    }
    std::vector<double> xs(count);
    if (count == 1) {
        xs[0] = lo;
        return xs;
    }
    const double llo = std::log10(lo);
    const double lhi = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        xs[i] = std::pow(10.0, llo + t * (lhi - llo));
    }
    xs.front() = lo;
    xs.back() = hi;
    return xs;
}

std::vector<double> default_n_function_probes() { return geometric_grid(1e-8, 1e8, 161); }

NFunctionVerdict is_n_function(const YoungFunction& phi, const std::vector<double>& probes,
                               const NFunctionThresholds& thresholds) {
    NFunctionVerdict verdict;
    verdict.probes = probes;
    std::vector<double> positive;
    for (double x : probes) {
        if (x > 0.0) {
            positive.push_back(x);
        }
    }
    if (positive.empty()) {
        return verdict;
    }
    std::sort(positive.begin(), positive.end());
    verdict.vanishes_only_at_zero = phi(0.0) == 0.0;
    for (double x : positive) {
        if (!(phi(x) > 0.0)) {
            verdict.vanishes_only_at_zero = false;
        }
    }
    verdict.limit0_estimate = phi(positive.front()) / positive.front();
    verdict.limitinf_estimate = phi(positive.back()) / positive.back();
    verdict.is_n_function = verdict.vanishes_only_at_zero &&
                            verdict.limit0_estimate <= thresholds.tol0 &&
                            verdict.limitinf_estimate >= thresholds.big;
    return verdict;
}

NFunctionVerdict is_n_function(const YoungFunction& phi) {
    return is_n_function(phi, default_n_function_probes());
}

bool known_n_function(const YoungFunction& phi) {
    switch (phi.kind()) {
    case YoungKind::power:
        return phi.p() > 1.0;
    case YoungKind::exp_minus_linear:
    case YoungKind::entropy:
        return true;
    case YoungKind::tabulated:
        break;
    }
    return is_n_function(phi).is_n_function;
}

Delta2Report check_delta2(const YoungFunction& phi, double x0, const std::vector<double>& probes,
                          const Delta2Options& options) {
    if (probes.empty()) {
        throw DomainError("Delta2 check needs at least one probe");
    }
    Delta2Report report;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double x = probes[i];
        if (x < x0) {
            throw DomainError("Delta2 probe below x0");
        }
        if (i > 0 && !(x > probes[i - 1])) {
            throw DomainError("Delta2 probes must be strictly increasing");
        }
        const double base = phi(x);
        if (!(base > 0.0)) {
            throw DomainError("Delta2 probe where phi vanishes (degenerate probe)");
        }
        report.ratios.push_back(phi(2.0 * x) / base);
    }
    report.k_estimate = *std::max_element(report.ratios.begin(), report.ratios.end());
    bool plateau = true;
    if (report.ratios.size() >= 2) {
        const double last = report.ratios.back();
        const double prev = report.ratios[report.ratios.size() - 2];
        plateau = std::isfinite(last) && last <= prev * (1.0 + options.plateau_tol);
    }
    report.holds = std::isfinite(report.k_estimate) && report.k_estimate <= options.cap && plateau;
    return report;
}

double inverse(const YoungFunction& phi, double y, double tol) {
    if (!std::isfinite(y) || y < 0.0) {
        throw DomainError("inverse needs finite y >= 0");
    }
    if (y == 0.0) {
        return 0.0;
    }
    const double slack = tol * std::max(1.0, y);
    double hi = 1.0;
    int grow = 0;
    while (phi(hi) < y) {
        hi *= 2.0;
        if (++grow > 2000 || !std::isfinite(hi)) {
            throw BracketError("inverse: phi never reaches y");
        }
    }
    double lo = 0.0;
    double mid = hi;
    for (int it = 0; it < kBisectionBudget; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = phi(mid);
        if (std::fabs(v - y) <= slack) {
            return mid;
        }
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (v < y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

} // namespace ouat
