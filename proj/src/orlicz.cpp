#include "ouat/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ouat {

namespace {

constexpr int kBracketBudget = 200;
constexpr int kBisectionBudget = 400;

void require_aligned(const DiscreteMeasure& mu, const FunctionTable& f) {
    if (f.size() != mu.size()) {
        throw DomainError("function table has " + std::to_string(f.size()) +
                          " rows but the measure has " + std::to_string(mu.size()) +
                          " support points");
    }
}

double modular_of_magnitudes(const YoungFunction& phi, std::span<const double> weights,
                             std::span<const double> magnitudes, double k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (magnitudes[i] != 0.0) {
            sum += phi(magnitudes[i] / k) * weights[i];
        }
    }
    return sum;
}

} // namespace

double vector_norm(std::span<const double> v, VectorNorm norm) {
    if (v.size() == 1) {
        return std::fabs(v[0]);
    }
    double acc = 0.0;
    if (norm == VectorNorm::max) {
        for (double x : v) {
            acc = std::max(acc, std::fabs(x));
        }
        return acc;
    }
    for (double x : v) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

VectorNorm parse_vector_norm(const std::string& name) {
    if (name == "euclidean") {
        return VectorNorm::euclidean;
    }
    if (name == "max") {
        return VectorNorm::max;
    }
    throw DomainError("unknown vector norm '" + name + "' (expected euclidean|max)");
}

std::string to_string(VectorNorm norm) {
    return norm == VectorNorm::max ? "max" : "euclidean";
}

FunctionTable::FunctionTable(std::size_t out_dim, std::vector<double> flat)
    : out_dim_(out_dim), data_(std::move(flat)) {
    if (out_dim_ == 0) {
        throw DomainError("function table needs output dimension >= 1");
    }
    if (data_.size() % out_dim_ != 0) {
        throw DomainError("function table storage is not a whole number of rows");
    }
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw DomainError("function table entries must be finite");
        }
    }
}

FunctionTable FunctionTable::scalar(std::vector<double> values) {
    return FunctionTable(1, std::move(values));
}

FunctionTable FunctionTable::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw DomainError("function table needs at least one row");
    }
    const std::size_t m = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * m);
    for (const auto& r : rows) {
        if (r.size() != m) {
            throw DomainError("function table rows must share one output dimension");
        }
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return FunctionTable(m, std::move(flat));
}

FunctionTable FunctionTable::zeros(std::size_t size, std::size_t out_dim) {
    return FunctionTable(out_dim, std::vector<double>(size * out_dim, 0.0));
}

std::vector<std::vector<double>> FunctionTable::rows() const {
    std::vector<std::vector<double>> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        const auto r = row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

std::vector<double> FunctionTable::magnitudes(VectorNorm norm) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = vector_norm(row(i), norm);
    }
    return out;
}

bool FunctionTable::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

FunctionTable FunctionTable::operator-(const FunctionTable& other) const {
    if (other.out_dim_ != out_dim_ || other.data_.size() != data_.size()) {
        throw DomainError("function tables differ in shape");
    }
    std::vector<double> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out[i] = data_[i] - other.data_[i];
    }
    return FunctionTable(out_dim_, std::move(out));
}

FunctionTable FunctionTable::operator+(const FunctionTable& other) const {
    if (other.out_dim_ != out_dim_ || other.data_.size() != data_.size()) {
        throw DomainError("function tables differ in shape");
    }
    std::vector<double> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out[i] = data_[i] + other.data_[i];
    }
    return FunctionTable(out_dim_, std::move(out));
}

FunctionTable FunctionTable::scaled(double alpha) const {
    std::vector<double> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out[i] = alpha * data_[i];
    }
    return FunctionTable(out_dim_, std::move(out));
}

double modular(const YoungFunction& phi, const DiscreteMeasure& mu, const FunctionTable& f,
               double k, VectorNorm norm) {
    require_aligned(mu, f);
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw DomainError("modular needs a finite scale k > 0");
    }
    const std::vector<double> mags = f.magnitudes(norm);
    return modular_of_magnitudes(phi, mu.weights(), mags, k);
}

GaugeNormResult gauge_norm_of_magnitudes(const YoungFunction& phi, std::span<const double> weights,
                                         std::span<const double> magnitudes, double tol) {
    if (weights.size() != magnitudes.size()) {
        throw DomainError("gauge norm: weights and magnitudes differ in length");
    }
    if (!(tol > 0.0)) {
        throw DomainError("gauge norm tolerance must be positive");
    }
    GaugeNormResult result;
    if (std::all_of(magnitudes.begin(), magnitudes.end(), [](double m) { return m == 0.0; })) {
        return result;
    }
    auto mod = [&](double k) { return modular_of_magnitudes(phi, weights, magnitudes, k); };

    double lo = 1.0;
    double hi = 1.0;
    if (mod(1.0) <= 1.0) {
        int steps = 0;
        while (mod(lo) <= 1.0) {
            hi = lo;
            lo *= 0.5;
            if (++steps > kBracketBudget) {
                throw BracketError("gauge norm: modular stays <= 1 while halving k");
            }
        }
        result.iterations += static_cast<std::size_t>(steps);
    } else {
        int steps = 0;
        while (!(mod(hi) <= 1.0)) {
            lo = hi;
            hi *= 2.0;
            if (++steps > kBracketBudget) {
                throw BracketError("gauge norm: modular never drops to 1 (f not in L^phi?)");
            }
        }
        result.iterations += static_cast<std::size_t>(steps);
    }
    for (int it = 0; it < kBisectionBudget && hi - lo > tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (mod(mid) <= 1.0) {
            hi = mid;
        } else {
            lo = mid;
        }
        ++result.iterations;
    }
    result.value = hi;
    result.k_lo = lo;
    result.k_hi = hi;
    result.modular_at_value = mod(hi);
    return result;
}

GaugeNormResult gauge_norm(const YoungFunction& phi, const DiscreteMeasure& mu,
                           const FunctionTable& f, double tol, VectorNorm norm) {
    require_aligned(mu, f);
    const std::vector<double> mags = f.magnitudes(norm);
    return gauge_norm_of_magnitudes(phi, mu.weights(), mags, tol);
}

double l1_norm(const DiscreteMeasure& nu, const FunctionTable& f, VectorNorm norm) {
    require_aligned(nu, f);
    double sum = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        sum += vector_norm(f.row(i), norm) * nu.weight(i);
    }
    return sum;
}

HolderReport holder_check(const YoungFunction& phi, const YoungFunction& psi,
                          const DiscreteMeasure& mu, const FunctionTable& f,
                          const FunctionTable& g, VectorNorm norm) {
    require_aligned(mu, f);
    require_aligned(mu, g);
    HolderReport report;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        report.lhs += vector_norm(f.row(i), norm) * vector_norm(g.row(i), norm) * mu.weight(i);
    }
    report.rhs =
        2.0 * gauge_norm(phi, mu, f, 1e-10, norm).value * gauge_norm(psi, mu, g, 1e-10, norm).value;
    report.holds = report.lhs <= report.rhs * (1.0 + 1e-8);
    return report;
}

double WeightFunction::operator()(std::span<const double> x) const {
    switch (kind) {
    case Kind::constant:
        return c;
    case Kind::one_plus_norm_squared: {
        double sq = 0.0;
        for (double v : x) {
            sq += v * v;
        }
        return 1.0 + sq;
    }
    case Kind::exp_neg_norm:
        return std::exp(-vector_norm(x, VectorNorm::euclidean));
    }
    return c;
}

std::string WeightFunction::describe() const {
    switch (kind) {
    case Kind::constant: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "const:%.17g", c);
        return buf;
    }
    case Kind::one_plus_norm_squared:
        return "1+|x|^2";
    case Kind::exp_neg_norm:
        return "exp(-|x|)";
    }
    return "";
}

WeightFunction WeightFunction::parse(const std::string& text) {
    if (text == "1+|x|^2" || text == "1+z^2" || text == "one_plus_norm_squared") {
        return WeightFunction{Kind::one_plus_norm_squared, 1.0};
    }
    if (text == "exp(-|x|)" || text == "exp_neg_norm") {
        return WeightFunction{Kind::exp_neg_norm, 1.0};
    }
    if (text.rfind("const:", 0) == 0) {
        try {
            return constant(std::stod(text.substr(6)));
        } catch (const std::logic_error&) {
            throw DomainError("malformed constant weight '" + text + "'");
        }
    }
    throw DomainError("unknown weight function '" + text + "'");
}

WeightFunction WeightFunction::constant(double c) {
    if (!std::isfinite(c)) {
        throw DomainError("constant weight must be finite");
    }
    return WeightFunction{Kind::constant, c};
}

double weighted_sup_norm(const WeightFunction& w, const std::vector<Point>& sample_points,
                         const FunctionTable& f, VectorNorm norm) {
    if (f.size() != sample_points.size()) {
        throw DomainError("weighted sup-norm: table and sample points differ in length");
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < sample_points.size(); ++i) {
        const double wx = w(sample_points[i]);
        if (!(wx > 0.0)) {
            throw DomainError("weight function is not positive at a sample point");
        }
        sup = std::max(sup, vector_norm(f.row(i), norm) / wx);
    }
    return sup;
}

FunctionTable truncate_to_box(const DiscreteMeasure& mu, const FunctionTable& f, const Box& box) {
    require_aligned(mu, f);
    std::vector<double> flat = f.flat();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (!box.contains(mu.point(i))) {
            std::fill_n(flat.begin() + static_cast<std::ptrdiff_t>(i * f.out_dim()), f.out_dim(),
                        0.0);
        }
    }
    return FunctionTable(f.out_dim(), std::move(flat));
}

} // namespace ouat
