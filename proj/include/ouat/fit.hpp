#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ouat/measure.hpp"
#include "ouat/net.hpp"
#include "ouat/orlicz.hpp"

namespace ouat {

/// Target f : R^N0 -> R^NL, either a named closed form, a callable, or a
/// table of values keyed by exact points.
class TargetFunction {
public:
    enum class Kind { sin_product, gaussian_blob, smooth_step, constant, callable, table };
    using Fn = std::function<std::vector<double>(std::span<const double>)>;

    /// prod_i sin(2 pi k x_i); bound 1.
    static TargetFunction sin_product(std::size_t input_dim, double frequency = 1.0);
    /// exp(-|x - center|^2 / (2 width^2)); bound 1.
    static TargetFunction gaussian_blob(std::vector<double> center, double width);
    /// (1 + tanh(sharpness (x_1 - threshold))) / 2; bound 1.
    static TargetFunction smooth_step(std::size_t input_dim, double sharpness = 10.0,
                                      double threshold = 0.5);
    static TargetFunction constant(std::size_t input_dim, std::vector<double> value);
    static TargetFunction from_callable(std::size_t input_dim, std::size_t output_dim, Fn fn,
                                        std::string name = "callable",
                                        std::optional<double> bound = std::nullopt);
    /// Values at exact points; evaluating anywhere else throws DomainError.
    static TargetFunction table(const std::vector<Point>& points, const FunctionTable& values);

    Kind kind() const noexcept { return kind_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }
    /// Declared sup-norm bound, if known.
    std::optional<double> bound() const noexcept { return bound_; }
    const std::string& name() const noexcept { return name_; }

    std::vector<double> operator()(std::span<const double> x) const;
    /// Values at every support point of mu.
    FunctionTable on(const DiscreteMeasure& mu) const;

private:
    TargetFunction() = default;

    Kind kind_ = Kind::callable;
    std::string name_;
    std::size_t input_dim_ = 1;
    std::size_t output_dim_ = 1;
    std::optional<double> bound_;
    Fn fn_;
};

/// Hidden maps x -> w . x + b for random features: per feature, w ~ N(0, I)
/// and an anchor z ~ U(box), then b = -w . z so the feature's kink or
/// inflection passes through the box. Features are drawn one after another
/// from a single stream, so width m is a prefix of width m + 1.
std::vector<AffineMap> draw_features(std::size_t input_dim, std::size_t width, std::uint64_t seed,
                                     const Box& box);

/// Weighted ridge least squares for the readout of a fixed hidden layer,
/// with an intercept column. ridge = 0 on a rank-deficient system throws
/// SolverError.
Network fit_readout(const Layer& hidden, const DiscreteMeasure& mu, const FunctionTable& target,
                    double ridge);

/// One-hidden-layer network of `width` random features fitted to f on
/// support(mu). Throws DomainError for width 0 or a polynomial activation.
Network fit_random_features(const TargetFunction& f, const DiscreteMeasure& mu, std::size_t width,
                            Activation act, std::uint64_t seed, double ridge = 1e-10);

/// Piecewise-linear interpolant of f at `knots` equally spaced knots of
/// [a, b] as a ReLU network, extended affinely outside [a, b].
Network fit_grid_relu_1d(const TargetFunction& f, double a, double b, std::size_t knots);

struct CurveRow {
    std::size_t width = 0;
    std::uint64_t seed = 0;
    double gauge_error = 0.0;
    double l1_error = 0.0;
    double fit_millis = 0.0;
};

struct CurveOptions {
    double ridge = 1e-10;
    VectorNorm norm = VectorNorm::euclidean;
    /// Record wall-clock fit time; off by default so curves are reproducible.
    bool timed = false;
};

/// One row per (width, seed), widths outer. Fits run in parallel.
std::vector<CurveRow> approximation_curve(const TargetFunction& f, const DiscreteMeasure& mu,
                                          const YoungFunction& phi,
                                          const std::vector<std::size_t>& widths, Activation act,
                                          const std::vector<std::uint64_t>& seeds,
                                          const CurveOptions& options = {});

/// Smallest gauge error per width, in order of first appearance.
std::vector<CurveRow> best_per_width(const std::vector<CurveRow>& rows);

/// sqrt(sum ||f - eta||^2 mu) over support(mu).
double l2_residual(const DiscreteMeasure& mu, const FunctionTable& f, const FunctionTable& eta);

} // namespace ouat
