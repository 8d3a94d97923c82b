#include "ouat/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <memory>
#include <cmath>
#include <numbers>
#include <random>

#include "ouat/parallel.hpp"

namespace ouat {

TargetFunction TargetFunction::sin_product(std::size_t input_dim, double frequency) {
    if (input_dim == 0 || !std::isfinite(frequency)) {
        throw DomainError("sin_product needs input_dim >= 1 and a finite frequency");
    }
    TargetFunction f;
    f.kind_ = Kind::sin_product;
    f.name_ = "sin_product";
    f.input_dim_ = input_dim;
    f.bound_ = 1.0;
    f.fn_ = [frequency](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) {
            v *= std::sin(2.0 * std::numbers::pi * frequency * xi);
        }
        return std::vector<double>{v};
    };
    return f;
}

TargetFunction TargetFunction::gaussian_blob(std::vector<double> center, double width) {
    if (center.empty() || !(width > 0.0)) {
        throw DomainError("gaussian_blob needs a center and width > 0");
    }
    TargetFunction f;
    f.kind_ = Kind::gaussian_blob;
    f.name_ = "gaussian_blob";
    f.input_dim_ = center.size();
    f.bound_ = 1.0;
    f.fn_ = [center = std::move(center), width](std::span<const double> x) {
        double sq = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) {
            sq += (x[i] - center[i]) * (x[i] - center[i]);
        }
        return std::vector<double>{std::exp(-sq / (2.0 * width * width))};
    };
    return f;
}

TargetFunction TargetFunction::smooth_step(std::size_t input_dim, double sharpness,
                                           double threshold) {
    if (input_dim == 0 || !std::isfinite(sharpness) || !std::isfinite(threshold)) {
        throw DomainError("smooth_step needs input_dim >= 1 and finite parameters");
    }
    TargetFunction f;
    f.kind_ = Kind::smooth_step;
    f.name_ = "smooth_step";
    f.input_dim_ = input_dim;
    f.bound_ = 1.0;
    f.fn_ = [sharpness, threshold](std::span<const double> x) {
        return std::vector<double>{0.5 * (1.0 + std::tanh(sharpness * (x[0] - threshold)))};
    };
    return f;
}

TargetFunction TargetFunction::constant(std::size_t input_dim, std::vector<double> value) {
    if (input_dim == 0 || value.empty()) {
        throw DomainError("constant target needs input_dim >= 1 and a value");
    }
    TargetFunction f;
    f.kind_ = Kind::constant;
    f.name_ = "constant";
    f.input_dim_ = input_dim;
    f.output_dim_ = value.size();
    f.bound_ = vector_norm(value, VectorNorm::euclidean);
    f.fn_ = [value = std::move(value)](std::span<const double>) { return value; };
    return f;
}

TargetFunction TargetFunction::from_callable(std::size_t input_dim, std::size_t output_dim, Fn fn,
                                             std::string name, std::optional<double> bound) {
    if (input_dim == 0 || output_dim == 0 || !fn) {
        throw DomainError("callable target needs dimensions >= 1 and a function");
    }
    TargetFunction f;
    f.kind_ = Kind::callable;
    f.name_ = std::move(name);
    f.input_dim_ = input_dim;
    f.output_dim_ = output_dim;
    f.bound_ = bound;
    f.fn_ = std::move(fn);
    return f;
}

TargetFunction TargetFunction::table(const std::vector<Point>& points, const FunctionTable& values) {
    if (points.empty() || points.size() != values.size()) {
        throw DomainError("table target needs one value row per point");
    }
    auto lookup = std::make_shared<std::map<Point, std::vector<double>>>();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != points.front().size()) {
            throw DomainError("table target points differ in dimension");
        }
        const auto r = values.row(i);
        (*lookup)[points[i]] = std::vector<double>(r.begin(), r.end());
    }
    TargetFunction f;
    f.kind_ = Kind::table;
    f.name_ = "table";
    f.input_dim_ = points.front().size();
    f.output_dim_ = values.out_dim();
    double sup = 0.0;
    for (const auto& [p, v] : *lookup) {
        sup = std::max(sup, vector_norm(v, VectorNorm::euclidean));
    }
    f.bound_ = sup;
    f.fn_ = [lookup](std::span<const double> x) {
        const auto it = lookup->find(Point(x.begin(), x.end()));
        if (it == lookup->end()) {
            throw DomainError("table target is not defined at the requested point");
        }
        return it->second;
    };
    return f;
}

std::vector<double> TargetFunction::operator()(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw DomainError("target expects input dimension " + std::to_string(input_dim_) +
                          ", got " + std::to_string(x.size()));
    }
    return fn_(x);
}

FunctionTable TargetFunction::on(const DiscreteMeasure& mu) const {
    std::vector<double> flat;
    flat.reserve(mu.size() * output_dim_);
    for (const Point& x : mu.points()) {
        const auto y = (*this)(x);
        if (y.size() != output_dim_) {
            throw DomainError("target returned the wrong output dimension");
        }
        flat.insert(flat.end(), y.begin(), y.end());
    }
    return FunctionTable(output_dim_, std::move(flat));
}

std::vector<AffineMap> draw_features(std::size_t input_dim, std::size_t width, std::uint64_t seed,
                                     const Box& box) {
    box.validate();
    if (box.dim() != input_dim) {
        throw DomainError("feature box dimension differs from the input dimension");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<AffineMap> features;
    features.reserve(width);
    for (std::size_t k = 0; k < width; ++k) {
        AffineMap h{std::vector<double>(input_dim), 0.0};
        for (double& a : h.a) {
            a = normal(rng);
        }
        for (std::size_t i = 0; i < input_dim; ++i) {
            const double z = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
            h.b -= h.a[i] * z;
        }
        features.push_back(std::move(h));
    }
    return features;
}

Network fit_readout(const Layer& hidden, const DiscreteMeasure& mu, const FunctionTable& target,
                    double ridge) {
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw DomainError("ridge must be finite and >= 0");
    }
    if (target.size() != mu.size()) {
        throw DomainError("target table is not aligned with the measure");
    }
    if (hidden.cols != mu.dim()) {
        throw DomainError("hidden layer input dimension differs from the measure");
    }
    const auto n = static_cast<Eigen::Index>(mu.size());
    const auto m = static_cast<Eigen::Index>(hidden.rows);
    const auto cols = m + 1;
    const auto out = static_cast<Eigen::Index>(target.out_dim());
    // the intercept is not penalized
    const Eigen::Index extra = ridge > 0.0 ? m : 0;

    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n + extra, cols);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + extra, out);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sw = std::sqrt(mu.weight(static_cast<std::size_t>(i)));
        const Point& x = mu.point(static_cast<std::size_t>(i));
        for (Eigen::Index k = 0; k < m; ++k) {
            double z = hidden.bias[static_cast<std::size_t>(k)];
            for (std::size_t c = 0; c < hidden.cols; ++c) {
                z += hidden.weight(static_cast<std::size_t>(k), c) * x[c];
            }
            design(i, k) = sw * activate(hidden.act, z);
        }
        design(i, m) = sw;
        const auto y = target.row(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < out; ++j) {
            rhs(i, j) = sw * y[static_cast<std::size_t>(j)];
        }
    }
    if (extra > 0) {
        design.bottomLeftCorner(extra, m) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(m, m);
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (ridge == 0.0 && qr.rank() < cols) {
        throw SolverError("least squares system is rank deficient (rank " +
                          std::to_string(qr.rank()) + " of " + std::to_string(cols) +
                          "); use ridge > 0");
    }
    const Eigen::MatrixXd coef = qr.solve(rhs);
    if (!coef.allFinite()) {
        throw SolverError("least squares produced non-finite coefficients; use ridge > 0");
    }

    Layer readout{static_cast<std::size_t>(out), hidden.rows,
                  std::vector<double>(static_cast<std::size_t>(out * m)),
                  std::vector<double>(static_cast<std::size_t>(out)), Activation::none};
    for (Eigen::Index j = 0; j < out; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            readout.weights[static_cast<std::size_t>(j * m + k)] = coef(k, j);
        }
        readout.bias[static_cast<std::size_t>(j)] = coef(m, j);
    }
    return Network(hidden.cols, {hidden, std::move(readout)});
}

Network fit_random_features(const TargetFunction& f, const DiscreteMeasure& mu, std::size_t width,
                            Activation act, std::uint64_t seed, double ridge) {
    if (width == 0) {
        throw DomainError("random-feature fit needs width >= 1");
    }
    if (act != Activation::relu && act != Activation::sigmoid && act != Activation::tanh) {
        throw DomainError("random-feature fit supports relu, sigmoid and tanh, not " +
                          to_string(act));
    }
    if (f.input_dim() != mu.dim()) {
        throw DomainError("target and measure differ in input dimension");
    }
    const auto features = draw_features(mu.dim(), width, seed, mu.bounding_box());
    Layer hidden{width, mu.dim(), {}, {}, act};
    for (const auto& h : features) {
        hidden.weights.insert(hidden.weights.end(), h.a.begin(), h.a.end());
        hidden.bias.push_back(h.b);
    }
    return fit_readout(hidden, mu, f.on(mu), ridge);
}

Network fit_grid_relu_1d(const TargetFunction& f, double a, double b, std::size_t knots) {
    if (f.input_dim() != 1) {
        throw DomainError("grid interpolation needs a target with input dimension 1");
    }
    if (knots < 2) {
        throw DomainError("grid interpolation needs at least 2 knots");
    }
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw DomainError("grid interpolation needs finite a < b");
    }
    const std::size_t out = f.output_dim();
    std::vector<double> t(knots);
    for (std::size_t k = 0; k < knots; ++k) {
        t[k] = k + 1 == knots ? b
                              : a + (b - a) * static_cast<double>(k) /
                                        static_cast<double>(knots - 1);
    }
    std::vector<std::vector<double>> y(knots);
    for (std::size_t k = 0; k < knots; ++k) {
        y[k] = f(std::span<const double>(&t[k], 1));
    }

    // relu(x - a), relu(a - x) give x - a exactly; one kink unit per interior knot
    const std::size_t m = knots;
    Layer hidden{m, 1, std::vector<double>(m), std::vector<double>(m), Activation::relu};
    hidden.weights[0] = 1.0;
    hidden.bias[0] = -a;
    hidden.weights[1] = -1.0;
    hidden.bias[1] = a;
    for (std::size_t k = 1; k + 1 < knots; ++k) {
        hidden.weights[k + 1] = 1.0;
        hidden.bias[k + 1] = -t[k];
    }
    Layer readout{out, m, std::vector<double>(out * m, 0.0), std::vector<double>(out),
                  Activation::none};
    for (std::size_t j = 0; j < out; ++j) {
        std::vector<double> slope(knots - 1);
        for (std::size_t k = 0; k + 1 < knots; ++k) {
            slope[k] = (y[k + 1][j] - y[k][j]) / (t[k + 1] - t[k]);
        }
        readout.bias[j] = y[0][j];
        readout.weights[j * m + 0] = slope[0];
        readout.weights[j * m + 1] = -slope[0];
        for (std::size_t k = 1; k + 1 < knots; ++k) {
            readout.weights[j * m + k + 1] = slope[k] - slope[k - 1];
        }
    }
    return Network(1, {std::move(hidden), std::move(readout)});
}

std::vector<CurveRow> approximation_curve(const TargetFunction& f, const DiscreteMeasure& mu,
                                          const YoungFunction& phi,
                                          const std::vector<std::size_t>& widths, Activation act,
                                          const std::vector<std::uint64_t>& seeds,
                                          const CurveOptions& options) {
    if (widths.empty() || seeds.empty()) {
        throw DomainError("approximation curve needs at least one width and one seed");
    }
    const FunctionTable target = f.on(mu);
    std::vector<CurveRow> rows(widths.size() * seeds.size());
    parallel_for(rows.size(), [&](std::size_t idx) {
        CurveRow& row = rows[idx];
        row.width = widths[idx / seeds.size()];
        row.seed = seeds[idx % seeds.size()];
        const auto start = std::chrono::steady_clock::now();
        const Network eta = fit_random_features(f, mu, row.width, act, row.seed, options.ridge);
        const auto stop = std::chrono::steady_clock::now();
        const FunctionTable diff = target - eta.evaluate_on(mu);
        row.gauge_error = gauge_norm(phi, mu, diff, 1e-10, options.norm).value;
        row.l1_error = l1_norm(mu, diff, options.norm);
        if (options.timed) {
            row.fit_millis = std::chrono::duration<double, std::milli>(stop - start).count();
        }
    });
    return rows;
}

std::vector<CurveRow> best_per_width(const std::vector<CurveRow>& rows) {
    std::vector<CurveRow> best;
    for (const CurveRow& r : rows) {
        auto it = std::find_if(best.begin(), best.end(),
                               [&](const CurveRow& b) { return b.width == r.width; });
        if (it == best.end()) {
            best.push_back(r);
        } else if (r.gauge_error < it->gauge_error) {
            *it = r;
        }
    }
    return best;
}

double l2_residual(const DiscreteMeasure& mu, const FunctionTable& f, const FunctionTable& eta) {
    const FunctionTable diff = f - eta;
    if (diff.size() != mu.size()) {
        throw DomainError("residual tables are not aligned with the measure");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double r = vector_norm(diff.row(i), VectorNorm::euclidean);
        sum += r * r * mu.weight(i);
    }
    return std::sqrt(sum);
}

} // namespace ouat
