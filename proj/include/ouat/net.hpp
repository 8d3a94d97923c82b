#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ouat/box.hpp"
#include "ouat/measure.hpp"
#include "ouat/orlicz.hpp"

namespace ouat {

enum class Activation { relu, sigmoid, tanh, identity, none };

double activate(Activation act, double z);
std::string to_string(Activation act);
/// Throws DomainError for an unknown name.
Activation parse_activation(const std::string& name);
bool is_bounded(Activation act);
bool is_polynomial(Activation act);

/// One affine map x -> A x + b followed by an activation.
struct Layer {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> weights; // row-major, rows x cols
    std::vector<double> bias;    // rows
    Activation act = Activation::none;

    double weight(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }

    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Feedforward network w_L o act o w_{L-1} o ... o act o w_1 stored as dense
/// layers. The last layer is an affine readout (activation none or identity).
class Network {
public:
    /// Throws DomainError if dimensions do not chain, weights are not finite,
    /// or the readout carries a nonlinear activation.
    Network(std::size_t input_dim, std::vector<Layer> layers);

    /// x -> A x + b without hidden layers.
    static Network affine(std::size_t input_dim, std::size_t output_dim, std::vector<double> a,
                          std::vector<double> b);
    static Network zero(std::size_t input_dim, std::size_t output_dim);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return layers_.back().rows; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<std::size_t> hidden_widths() const;
    std::size_t hidden_layer_count() const noexcept { return layers_.size() - 1; }

    std::vector<double> operator()(std::span<const double> x) const;
    /// Outputs at every support point of mu, as a table aligned with mu.
    FunctionTable evaluate_on(const DiscreteMeasure& mu) const;

    friend bool operator==(const Network&, const Network&) = default;

private:
    std::size_t input_dim_ = 0;
    std::vector<Layer> layers_;
};

std::vector<double> evaluate(const Network& net, std::span<const double> x);
double evaluate_scalar(const Network& net, double x);

/// x -> relu(x + bound) - bound, the identity on [-bound, inf).
Network identity_gadget(double bound);
/// max{x, y} = relu(x - y) + relu(y) - relu(-y), exact on all of R^2.
Network max_gadget();
/// min{x, y} = relu(x) - relu(-x) - relu(x - y), exact on all of R^2.
Network min_gadget();

/// Piecewise-affine bump: 1 on [a, b], 0 outside (a - delta, b + delta),
/// linear in between. Two ReLU layers of two neurons:
///   s = relu(1 - relu((a - x)/delta)),  t = relu(1 - relu((x - b)/delta)),
///   V = s + t - 1.
/// Since one of s, t equals 1 everywhere, V = min{s, t} holds exactly.
Network bump_1d(double a, double b, double delta);

/// min_i V_i(x_i) over the coordinate bumps of J with margin delta: 1 on J,
/// 0 outside the delta-enlarged box K, within [0, 1] in between.
Network box_indicator(const Box& j_box, double delta);

/// Register network: every hidden layer has width N0 + NL + 1, holding the
/// inputs, the output accumulators and one compute neuron.
struct RegisterLayout {
    std::vector<std::size_t> input_registers;
    std::vector<std::size_t> output_registers;
    std::size_t compute_index = 0;

    std::size_t width() const noexcept {
        return input_registers.size() + output_registers.size() + 1;
    }
    static RegisterLayout standard(std::size_t n_in, std::size_t n_out);
};

struct RegisterNetwork {
    Network net;
    RegisterLayout layout;
    Box box; // inputs for which the register network reproduces its source
    /// Register i holds x_i + input_offsets[i] (offset chosen from the box).
    std::vector<double> input_offsets;
    /// Output register j holds its partial readout sum + accumulator_offsets[j].
    std::vector<double> accumulator_offsets;
    /// Lower bounds of each output over the box (interval arithmetic).
    std::vector<double> output_lower_bounds;
};

/// Narrows a one-hidden-layer ReLU network with m units to a ReLU network of
/// hidden width N0 + NL + 1 and depth m that agrees with it on `box`. An
/// affine network (m = 0) is returned unchanged. Throws DomainError for more
/// than one hidden layer, a non-ReLU hidden layer, or an invalid box.
RegisterNetwork to_register_form(const Network& shallow, const Box& box);

/// G_j = min{max{g_j, c V}, C V} with V the box indicator of J and margin
/// delta, realized as -relu(-relu(g_j - c V) + (C - c) V) + C V by adding
/// 3 N0 + 1 hidden layers of register width. G = g on J where c <= g <= C and
/// G = 0 outside K. Requires K inside g.box, c < C.
Network clip_and_localize(const RegisterNetwork& g, const Box& j_box, double delta, double c,
                          double big_c);

/// True when every hidden layer has exactly `width` units.
bool has_uniform_hidden_width(const Network& net, std::size_t width);

/// Affine map x -> a . x + b, a member of the family H*.
struct AffineMap {
    std::vector<double> a;
    double b = 0.0;

    double operator()(std::span<const double> x) const;
};

struct FnnSpec {
    std::vector<AffineMap> hidden;          // h_1 ... h_N
    std::vector<std::vector<double>> readouts; // y_1 ... y_N in R^{out_dim}
    Activation act = Activation::sigmoid;
    std::size_t input_dim = 1;
    std::size_t output_dim = 1;
};

/// eta(x) = sum_n y_n act(h_n(x)).
class Fnn {
public:
    explicit Fnn(FnnSpec spec);

    const FnnSpec& spec() const noexcept { return spec_; }
    std::vector<double> operator()(std::span<const double> x) const;
    /// The same map as a one-hidden-layer Network.
    Network to_network() const;

private:
    FnnSpec spec_;
};

Fnn build_fnn(FnnSpec spec);

/// A parametrized set of maps R^n -> R used to test the additive-family axioms.
struct ParametricFamily {
    using Params = std::vector<double>;

    std::string name;
    std::size_t input_dim = 1;
    std::function<double(const Params&, std::span<const double>)> eval;
    /// Member-form parameters of the sum, or nullopt if not representable.
    std::function<std::optional<Params>(const Params&, const Params&)> add;
    std::function<Params(std::mt19937_64&)> sample;
    /// Best member for the constant map x -> c, or nullopt.
    std::function<std::optional<Params>(double)> constant;
};

/// H* = {x -> a . x + b}; params = (a_1 ... a_n, b).
ParametricFamily affine_family(std::size_t input_dim);
/// {x -> 0}
ParametricFamily zero_family(std::size_t input_dim);
/// {x -> a . x}, lacking the constants.
ParametricFamily linear_family(std::size_t input_dim);

struct AdditiveFamilyReport {
    bool closed_under_addition = false;
    bool point_separating = false;
    bool contains_constants = false;
    double max_addition_error = 0.0;
    std::size_t unseparated_pairs = 0;

    bool all_pass() const noexcept {
        return closed_under_addition && point_separating && contains_constants;
    }
};

AdditiveFamilyReport check_additive_family(const ParametricFamily& family,
                                           const std::vector<Point>& probes,
                                           std::uint64_t seed = 7, std::size_t samples = 64);

struct WeightCompatibilityReport {
    double sup_ratio = 0.0; // sup_{h, x} w1(h(x)) / w(x)
    bool finite = false;
    bool admissible = false; // sublevel-set proxy for w on the probe range
    double inner_max = 0.0;  // max of w on the inner half of the probe range
    double outer_min = 0.0;  // min of w on the outer shell
};

/// Checks sup_x w1(h(x)) / w(x) < inf over the sampled maps, and that w
/// grows towards the edge of the probe range (a numeric stand-in for bounded
/// sublevel sets). Throws DomainError if a weight is not positive.
WeightCompatibilityReport check_weight_compatibility(const std::vector<AffineMap>& h_sample,
                                                     const WeightFunction& w,
                                                     const WeightFunction& w1,
                                                     const std::vector<Point>& probes);

/// Tensor grid with `per_axis` points per coordinate on [lo, hi]^dim.
std::vector<Point> cube_grid(std::size_t dim, double lo, double hi, std::size_t per_axis);

} // namespace ouat
