#pragma once

#include <span>
#include <string>
#include <vector>

#include "ouat/measure.hpp"
#include "ouat/young.hpp"

namespace ouat {

/// Norm on the value space R^m.
enum class VectorNorm { euclidean, max };

double vector_norm(std::span<const double> v, VectorNorm norm);
VectorNorm parse_vector_norm(const std::string& name);
std::string to_string(VectorNorm norm);

/// Values of f : R^n -> R^m at the support points of a measure, row i
/// belonging to support point i.
class FunctionTable {
public:
    FunctionTable() = default;
    /// Row-major storage; throws DomainError on ragged size or non-finite entries.
    FunctionTable(std::size_t out_dim, std::vector<double> flat);

    static FunctionTable scalar(std::vector<double> values);
    static FunctionTable from_rows(const std::vector<std::vector<double>>& rows);
    static FunctionTable zeros(std::size_t size, std::size_t out_dim);

    std::size_t size() const noexcept { return out_dim_ == 0 ? 0 : data_.size() / out_dim_; }
    std::size_t out_dim() const noexcept { return out_dim_; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * out_dim_, out_dim_};
    }
    const std::vector<double>& flat() const noexcept { return data_; }
    std::vector<std::vector<double>> rows() const;

    /// Pointwise norms ||f(x_i)||.
    std::vector<double> magnitudes(VectorNorm norm) const;
    bool is_zero() const;

    FunctionTable operator-(const FunctionTable& other) const;
    FunctionTable operator+(const FunctionTable& other) const;
    FunctionTable scaled(double alpha) const;

    friend bool operator==(const FunctionTable&, const FunctionTable&) = default;

private:
    std::size_t out_dim_ = 0;
    std::vector<double> data_;
};

/// sum_x phi(||f(x)|| / k) mu({x}). Throws DomainError when f is not aligned
/// with mu or k <= 0.
double modular(const YoungFunction& phi, const DiscreteMeasure& mu, const FunctionTable& f,
               double k, VectorNorm norm = VectorNorm::euclidean);

struct GaugeNormResult {
    double value = 0.0;
    double k_lo = 0.0;
    double k_hi = 0.0;
    double modular_at_value = 0.0;
    std::size_t iterations = 0;
};

/// Luxemburg norm inf{k > 0 : modular(k) <= 1}. Brackets geometrically from
/// k = 1 (at most 200 doublings or halvings), then bisects until
/// k_hi - k_lo <= tol * k_hi. The returned value is k_hi, so
/// modular(value) <= 1 always holds.
GaugeNormResult gauge_norm(const YoungFunction& phi, const DiscreteMeasure& mu,
                           const FunctionTable& f, double tol = 1e-10,
                           VectorNorm norm = VectorNorm::euclidean);

/// Same, for precomputed magnitudes |f(x_i)| against weights mu({x_i}).
GaugeNormResult gauge_norm_of_magnitudes(const YoungFunction& phi, std::span<const double> weights,
                                         std::span<const double> magnitudes, double tol = 1e-10);

/// sum_x ||f(x)|| nu({x})
double l1_norm(const DiscreteMeasure& nu, const FunctionTable& f,
               VectorNorm norm = VectorNorm::euclidean);

struct HolderReport {
    double lhs = 0.0; // sum ||f|| ||g|| mu
    double rhs = 0.0; // 2 N_phi(f) N_psi(g)
    bool holds = false;
};

HolderReport holder_check(const YoungFunction& phi, const YoungFunction& psi,
                          const DiscreteMeasure& mu, const FunctionTable& f,
                          const FunctionTable& g, VectorNorm norm = VectorNorm::euclidean);

/// Positive weight function on R^n used by weighted sup-norms.
struct WeightFunction {
    enum class Kind { constant, one_plus_norm_squared, exp_neg_norm };

    Kind kind = Kind::one_plus_norm_squared;
    double c = 1.0; // value of the constant weight

    double operator()(std::span<const double> x) const;
    double operator()(double z) const { return (*this)(std::span<const double>(&z, 1)); }
    std::string describe() const;

    /// "1+|x|^2" | "exp(-|x|)" | "const:<c>"
    static WeightFunction parse(const std::string& text);
    static WeightFunction constant(double c);
};

/// max_x ||f(x)|| / w(x) over the given sample points (aligned with f).
/// Throws DomainError if w is not positive at a sample point.
double weighted_sup_norm(const WeightFunction& w, const std::vector<Point>& sample_points,
                         const FunctionTable& f, VectorNorm norm = VectorNorm::euclidean);

/// Copy of f with every row outside `box` set to zero.
FunctionTable truncate_to_box(const DiscreteMeasure& mu, const FunctionTable& f, const Box& box);

} // namespace ouat
