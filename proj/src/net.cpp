#include "ouat/net.hpp"

#include <algorithm>
#include <cmath>

namespace ouat {

double activate(Activation act, double z) {
    switch (act) {
    case Activation::relu:
        return z > 0.0 ? z : 0.0;
    case Activation::sigmoid:
        return 1.0 / (1.0 + std::exp(-z));
    case Activation::tanh:
        return std::tanh(z);
    case Activation::identity:
    case Activation::none:
        return z;
    }
    return z;
}

std::string to_string(Activation act) {
    switch (act) {
    case Activation::relu:
        return "relu";
    case Activation::sigmoid:
        return "sigmoid";
    case Activation::tanh:
        return "tanh";
    case Activation::identity:
        return "identity";
    case Activation::none:
        return "none";
    }
    return "none";
}

Activation parse_activation(const std::string& name) {
    if (name == "relu") {
        return Activation::relu;
    }
    if (name == "sigmoid") {
        return Activation::sigmoid;
    }
    if (name == "tanh") {
        return Activation::tanh;
    }
    if (name == "identity") {
        return Activation::identity;
    }
    if (name == "none") {
        return Activation::none;
    }
    throw DomainError("unknown activation '" + name + "'");
}

bool is_bounded(Activation act) { return act == Activation::sigmoid || act == Activation::tanh; }

bool is_polynomial(Activation act) {
    return act == Activation::identity || act == Activation::none;
}

Network::Network(std::size_t input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
    if (input_dim_ == 0) {
        throw DomainError("network input dimension must be >= 1");
    }
    if (layers_.empty()) {
        throw DomainError("network needs at least a readout layer");
    }
    std::size_t prev = input_dim_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        if (layer.cols != prev) {
            throw DomainError("layer " + std::to_string(l) + " expects " +
                              std::to_string(layer.cols) + " inputs but receives " +
                              std::to_string(prev));
        }
        if (layer.rows == 0) {
            throw DomainError("layer " + std::to_string(l) + " has no units");
        }
        if (layer.weights.size() != layer.rows * layer.cols || layer.bias.size() != layer.rows) {
            throw DomainError("layer " + std::to_string(l) + " storage does not match its shape");
        }
        for (double w : layer.weights) {
            if (!std::isfinite(w)) {
                throw DomainError("network weights must be finite");
            }
        }
        for (double b : layer.bias) {
            if (!std::isfinite(b)) {
                throw DomainError("network biases must be finite");
            }
        }
        prev = layer.rows;
    }
    const Activation out = layers_.back().act;
    if (out != Activation::none && out != Activation::identity) {
        throw DomainError("network readout must be affine (activation none)");
    }
}

Network Network::affine(std::size_t input_dim, std::size_t output_dim, std::vector<double> a,
                        std::vector<double> b) {
    Layer layer{output_dim, input_dim, std::move(a), std::move(b), Activation::none};
    return Network(input_dim, {std::move(layer)});
}

Network Network::zero(std::size_t input_dim, std::size_t output_dim) {
    return affine(input_dim, output_dim, std::vector<double>(input_dim * output_dim, 0.0),
                  std::vector<double>(output_dim, 0.0));
}

std::vector<std::size_t> Network::hidden_widths() const {
    std::vector<std::size_t> widths;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
        widths.push_back(layers_[l].rows);
    }
    return widths;
}

std::vector<double> Network::operator()(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw DomainError("network expects input dimension " + std::to_string(input_dim_) +
                          ", got " + std::to_string(x.size()));
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (const Layer& layer : layers_) {
        next.assign(layer.rows, 0.0);
        for (std::size_t r = 0; r < layer.rows; ++r) {
            double z = layer.bias[r];
            const double* row = layer.weights.data() + r * layer.cols;
            for (std::size_t c = 0; c < layer.cols; ++c) {
                z += row[c] * cur[c];
            }
            next[r] = activate(layer.act, z);
        }
        cur.swap(next);
    }
    return cur;
}

FunctionTable Network::evaluate_on(const DiscreteMeasure& mu) const {
    std::vector<double> flat;
    flat.reserve(mu.size() * output_dim());
    for (const Point& x : mu.points()) {
        const std::vector<double> y = (*this)(x);
        flat.insert(flat.end(), y.begin(), y.end());
    }
    return FunctionTable(output_dim(), std::move(flat));
}

std::vector<double> evaluate(const Network& net, std::span<const double> x) { return net(x); }

double evaluate_scalar(const Network& net, double x) {
    return net(std::span<const double>(&x, 1)).at(0);
}

namespace {

// Affine expression sum_c coef[c] * prev[c] + constant over a previous layer.
struct Expr {
    std::vector<double> coef;
    double constant = 0.0;

    static Expr unit(std::size_t width, std::size_t col, double scale = 1.0) {
        Expr e{std::vector<double>(width, 0.0), 0.0};
        e.coef.at(col) = scale;
        return e;
    }
    static Expr constant_only(std::size_t width, double value) {
        return Expr{std::vector<double>(width, 0.0), value};
    }

    Expr operator+(const Expr& o) const {
        Expr e = *this;
        for (std::size_t i = 0; i < coef.size(); ++i) {
            e.coef[i] += o.coef[i];
        }
        e.constant += o.constant;
        return e;
    }
    Expr operator-(const Expr& o) const { return *this + o * -1.0; }
    Expr operator*(double s) const {
        Expr e = *this;
        for (double& c : e.coef) {
            c *= s;
        }
        e.constant *= s;
        return e;
    }
    Expr operator+(double v) const {
        Expr e = *this;
        e.constant += v;
        return e;
    }
    Expr operator-(double v) const { return *this + (-v); }
};

class LayerBuilder {
public:
    LayerBuilder(std::size_t rows, std::size_t cols, Activation act)
        : layer_{rows, cols, std::vector<double>(rows * cols, 0.0), std::vector<double>(rows, 0.0),
                 act} {}

    void set(std::size_t row, const Expr& e) {
        std::copy(e.coef.begin(), e.coef.end(),
                  layer_.weights.begin() + static_cast<std::ptrdiff_t>(row * layer_.cols));
        layer_.bias.at(row) = e.constant;
    }

    Layer build() && { return std::move(layer_); }

private:
    Layer layer_;
};

Expr row_expr(const Layer& layer, std::size_t row) {
    Expr e{std::vector<double>(layer.weights.begin() + static_cast<std::ptrdiff_t>(row * layer.cols),
                               layer.weights.begin() +
                                   static_cast<std::ptrdiff_t>((row + 1) * layer.cols)),
           layer.bias[row]};
    return e;
}

void require_bump_args(double a, double b, double delta) {
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw DomainError("bump requires finite a <= b");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw DomainError("bump requires a finite delta > 0");
    }
}

// Upper bound of relu(w . x + b) over the box.
double relu_upper(const Layer& layer, std::size_t row, const Box& box) {
    double hi = layer.bias[row];
    for (std::size_t c = 0; c < layer.cols; ++c) {
        const double w = layer.weight(row, c);
        hi += std::max(w * box.lo[c], w * box.hi[c]);
    }
    return std::max(hi, 0.0);
}

double affine_lower(const Layer& layer, std::size_t row, const Box& box) {
    double lo = layer.bias[row];
    for (std::size_t c = 0; c < layer.cols; ++c) {
        const double w = layer.weight(row, c);
        lo += std::min(w * box.lo[c], w * box.hi[c]);
    }
    return lo;
}

double shift_for(double lower_bound) { return std::max(0.0, -lower_bound) + 1.0; }

} // namespace

Network identity_gadget(double bound) {
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw DomainError("identity gadget needs a finite bound N > 0");
    }
    Layer hidden{1, 1, {1.0}, {bound}, Activation::relu};
    Layer out{1, 1, {1.0}, {-bound}, Activation::none};
    return Network(1, {hidden, out});
}

Network max_gadget() {
    Layer hidden{3, 2, {1.0, -1.0, 0.0, 1.0, 0.0, -1.0}, {0.0, 0.0, 0.0}, Activation::relu};
    Layer out{1, 3, {1.0, 1.0, -1.0}, {0.0}, Activation::none};
    return Network(2, {hidden, out});
}

Network min_gadget() {
    Layer hidden{3, 2, {1.0, 0.0, -1.0, 0.0, 1.0, -1.0}, {0.0, 0.0, 0.0}, Activation::relu};
    Layer out{1, 3, {1.0, -1.0, -1.0}, {0.0}, Activation::none};
    return Network(2, {hidden, out});
}

Network bump_1d(double a, double b, double delta) {
    require_bump_args(a, b, delta);
    return box_indicator(Box{{a}, {b}}, delta);
}

Network box_indicator(const Box& j_box, double delta) {
    j_box.validate();
    for (std::size_t i = 0; i < j_box.dim(); ++i) {
        require_bump_args(j_box.lo[i], j_box.hi[i], delta);
    }
    const std::size_t n0 = j_box.dim();
    std::vector<Layer> layers;

    // ramps: p_i = relu((a_i - x_i)/delta) at 2i, r_i = relu((x_i - b_i)/delta) at 2i+1
    LayerBuilder ramps(2 * n0, n0, Activation::relu);
    for (std::size_t i = 0; i < n0; ++i) {
        ramps.set(2 * i, Expr::unit(n0, i, -1.0 / delta) + j_box.lo[i] / delta);
        ramps.set(2 * i + 1, Expr::unit(n0, i, 1.0 / delta) - j_box.hi[i] / delta);
    }
    layers.push_back(std::move(ramps).build());

    // s_i = relu(1 - p_i), t_i = relu(1 - r_i)
    LayerBuilder caps(2 * n0, 2 * n0, Activation::relu);
    for (std::size_t u = 0; u < 2 * n0; ++u) {
        caps.set(u, Expr::unit(2 * n0, u, -1.0) + 1.0);
    }
    layers.push_back(std::move(caps).build());

    std::size_t width = 2 * n0;
    std::vector<Expr> bumps;
    for (std::size_t i = 0; i < n0; ++i) {
        bumps.push_back(Expr::unit(width, 2 * i) + Expr::unit(width, 2 * i + 1) - 1.0);
    }
    if (n0 > 1) {
        // Materialize V_i = relu(s_i + t_i - 1) so the min chain sees exact
        // zeros outside K; folding the -1 into later rows leaves 1e-16 residue.
        LayerBuilder materialize(n0, width, Activation::relu);
        for (std::size_t i = 0; i < n0; ++i) {
            materialize.set(i, bumps[i]);
            bumps[i] = Expr::unit(n0, i);
        }
        layers.push_back(std::move(materialize).build());
        width = n0;
    }

    // min chain on [0, inf)^2: min{E, V} = E - relu(E - V)
    Expr acc = bumps.front();
    for (std::size_t t = 1; t < n0; ++t) {
        const std::size_t remaining = n0 - t - 1;
        const std::size_t next_width = 2 + remaining;
        LayerBuilder step(next_width, width, Activation::relu);
        step.set(0, acc);
        step.set(1, acc - bumps[t]);
        for (std::size_t k = 0; k < remaining; ++k) {
            step.set(2 + k, bumps[t + 1 + k]);
        }
        layers.push_back(std::move(step).build());
        width = next_width;
        acc = Expr::unit(width, 0) - Expr::unit(width, 1);
        std::vector<Expr> carried(bumps.size());
        for (std::size_t k = 0; k < remaining; ++k) {
            carried[t + 1 + k] = Expr::unit(width, 2 + k);
        }
        bumps = std::move(carried);
    }

    LayerBuilder out(1, width, Activation::none);
    out.set(0, acc);
    layers.push_back(std::move(out).build());
    return Network(n0, std::move(layers));
}

RegisterLayout RegisterLayout::standard(std::size_t n_in, std::size_t n_out) {
    RegisterLayout layout;
    for (std::size_t i = 0; i < n_in; ++i) {
        layout.input_registers.push_back(i);
    }
    for (std::size_t j = 0; j < n_out; ++j) {
        layout.output_registers.push_back(n_in + j);
    }
    layout.compute_index = n_in + n_out;
    return layout;
}

RegisterNetwork to_register_form(const Network& shallow, const Box& box) {
    box.validate();
    const std::size_t n0 = shallow.input_dim();
    const std::size_t nl = shallow.output_dim();
    if (box.dim() != n0) {
        throw DomainError("register box dimension differs from the network input dimension");
    }
    if (shallow.layers().size() > 2) {
        throw DomainError("to_register_form expects at most one hidden layer");
    }
    RegisterNetwork out{shallow, RegisterLayout::standard(n0, nl), box, {}, {}, {}};
    for (std::size_t i = 0; i < n0; ++i) {
        out.input_offsets.push_back(shift_for(box.lo[i]));
    }
    if (shallow.layers().size() == 1) {
        const Layer& affine = shallow.layers().front();
        for (std::size_t j = 0; j < nl; ++j) {
            out.accumulator_offsets.push_back(1.0);
            out.output_lower_bounds.push_back(affine_lower(affine, j, box));
        }
        return out;
    }

    const Layer& hidden = shallow.layers()[0];
    const Layer& readout = shallow.layers()[1];
    if (hidden.act != Activation::relu) {
        throw DomainError("to_register_form expects a ReLU hidden layer");
    }
    const std::size_t m = hidden.rows;
    const RegisterLayout& layout = out.layout;
    const std::size_t width = layout.width();
    const std::size_t cid = layout.compute_index;

    std::vector<double> h_max(m);
    for (std::size_t k = 0; k < m; ++k) {
        h_max[k] = relu_upper(hidden, k, box);
    }
    for (std::size_t j = 0; j < nl; ++j) {
        double lower = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            lower += std::min(0.0, readout.weight(j, k) * h_max[k]);
        }
        out.accumulator_offsets.push_back(shift_for(lower));
        out.output_lower_bounds.push_back(lower + readout.bias[j]);
    }

    std::vector<Layer> layers;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t prev = k == 0 ? n0 : width;
        LayerBuilder lb(width, prev, Activation::relu);
        Expr feature = row_expr(hidden, k);
        if (k == 0) {
            for (std::size_t i = 0; i < n0; ++i) {
                lb.set(layout.input_registers[i],
                       Expr::unit(n0, i) + out.input_offsets[i]);
            }
            for (std::size_t j = 0; j < nl; ++j) {
                lb.set(layout.output_registers[j],
                       Expr::constant_only(n0, out.accumulator_offsets[j]));
            }
            lb.set(cid, feature);
        } else {
            Expr in_terms_of_registers = Expr::constant_only(width, feature.constant);
            for (std::size_t i = 0; i < n0; ++i) {
                const std::size_t r = layout.input_registers[i];
                lb.set(r, Expr::unit(width, r));
                // x_i = register_i - offset_i
                in_terms_of_registers =
                    in_terms_of_registers +
                    (Expr::unit(width, r) - out.input_offsets[i]) * feature.coef[i];
            }
            for (std::size_t j = 0; j < nl; ++j) {
                const std::size_t r = layout.output_registers[j];
                lb.set(r, Expr::unit(width, r) + Expr::unit(width, cid, readout.weight(j, k - 1)));
            }
            lb.set(cid, in_terms_of_registers);
        }
        layers.push_back(std::move(lb).build());
    }

    LayerBuilder final_readout(nl, width, Activation::none);
    for (std::size_t j = 0; j < nl; ++j) {
        const std::size_t r = layout.output_registers[j];
        final_readout.set(j, Expr::unit(width, r) + Expr::unit(width, cid, readout.weight(j, m - 1)) +
                                 (readout.bias[j] - out.accumulator_offsets[j]));
    }
    layers.push_back(std::move(final_readout).build());
    out.net = Network(n0, std::move(layers));
    return out;
}

Network clip_and_localize(const RegisterNetwork& g, const Box& j_box, double delta, double c,
                          double big_c) {
    j_box.validate();
    g.box.validate();
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw DomainError("clip_and_localize needs a finite delta > 0");
    }
    if (!std::isfinite(c) || !std::isfinite(big_c) || !(c < big_c)) {
        throw DomainError("clip_and_localize needs finite c < C");
    }
    const std::size_t n0 = g.net.input_dim();
    const std::size_t nl = g.net.output_dim();
    if (j_box.dim() != n0) {
        throw DomainError("box J dimension differs from the network input dimension");
    }
    const Box k_box = j_box.enlarged(delta);
    for (std::size_t i = 0; i < n0; ++i) {
        // rounding slack: the register offsets keep a margin of 1 anyway
        const double slack = 1e-9 * (1.0 + std::fabs(g.box.lo[i]) + std::fabs(g.box.hi[i]));
        if (k_box.lo[i] < g.box.lo[i] - slack || k_box.hi[i] > g.box.hi[i] + slack) {
            throw DomainError("enlarged box K is not inside the register network's declared box");
        }
    }
    const RegisterLayout& layout = g.layout;
    const std::size_t width = layout.width();
    const std::size_t cid = layout.compute_index;
    auto rid = [&](std::size_t i) { return layout.input_registers[i]; };
    auto oid = [&](std::size_t j) { return layout.output_registers[j]; };

    std::vector<Layer> layers(g.net.layers().begin(), g.net.layers().end() - 1);
    const Layer& readout = g.net.layers().back();
    const bool has_hidden = !layers.empty();
    std::size_t prev_width = has_hidden ? width : n0;

    std::vector<Expr> x_expr(n0);
    for (std::size_t i = 0; i < n0; ++i) {
        x_expr[i] = has_hidden ? Expr::unit(width, rid(i)) - g.input_offsets[i]
                               : Expr::unit(n0, i);
    }
    std::vector<double> g_shift(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        g_shift[j] = shift_for(g.output_lower_bounds[j]);
    }

    // V_i(x_i) replaces input register i: two layers per coordinate, and the
    // merge V_i = s_i + t_i - 1 rides along with the next coordinate's ramps.
    for (std::size_t i = 0; i < n0; ++i) {
        LayerBuilder ramps(width, prev_width, Activation::relu);
        ramps.set(rid(i), x_expr[i] * (-1.0 / delta) + j_box.lo[i] / delta);
        ramps.set(cid, x_expr[i] * (1.0 / delta) - j_box.hi[i] / delta);
        for (std::size_t k = 0; k + 1 < i; ++k) {
            ramps.set(rid(k), Expr::unit(prev_width, rid(k)));
        }
        if (i >= 1) {
            ramps.set(rid(i - 1),
                      Expr::unit(prev_width, rid(i - 1)) + Expr::unit(prev_width, cid) - 1.0);
        }
        for (std::size_t k = i + 1; k < n0; ++k) {
            ramps.set(rid(k), x_expr[k] + g.input_offsets[k]);
        }
        for (std::size_t j = 0; j < nl; ++j) {
            if (i == 0) {
                ramps.set(oid(j), row_expr(readout, j) + g_shift[j]);
            } else {
                ramps.set(oid(j), Expr::unit(prev_width, oid(j)));
            }
        }
        layers.push_back(std::move(ramps).build());
        prev_width = width;
        for (std::size_t k = i + 1; k < n0; ++k) {
            x_expr[k] = Expr::unit(width, rid(k)) - g.input_offsets[k];
        }

        LayerBuilder caps(width, width, Activation::relu);
        for (std::size_t u = 0; u < width; ++u) {
            caps.set(u, Expr::unit(width, u));
        }
        caps.set(rid(i), Expr::unit(width, rid(i), -1.0) + 1.0);
        caps.set(cid, Expr::unit(width, cid, -1.0) + 1.0);
        layers.push_back(std::move(caps).build());
    }

    // min chain, accumulated in the last input register
    const std::size_t acc_reg = rid(n0 - 1);
    Expr v_expr = Expr::unit(width, acc_reg) + Expr::unit(width, cid) - 1.0;
    for (std::size_t t = 0; t + 1 < n0; ++t) {
        LayerBuilder step(width, width, Activation::relu);
        for (std::size_t u = 0; u < width; ++u) {
            step.set(u, Expr::unit(width, u));
        }
        step.set(acc_reg, v_expr);
        step.set(cid, v_expr - Expr::unit(width, rid(t)));
        layers.push_back(std::move(step).build());
        v_expr = Expr::unit(width, acc_reg) - Expr::unit(width, cid);
    }

    // relu(g_j - c V), then relu(-(.) + (C - c) V); V rides in the compute neuron
    LayerBuilder lower(width, width, Activation::relu);
    for (std::size_t j = 0; j < nl; ++j) {
        lower.set(oid(j), Expr::unit(width, oid(j)) - g_shift[j] - v_expr * c);
    }
    lower.set(cid, v_expr);
    layers.push_back(std::move(lower).build());

    LayerBuilder upper(width, width, Activation::relu);
    for (std::size_t j = 0; j < nl; ++j) {
        upper.set(oid(j), Expr::unit(width, oid(j), -1.0) + Expr::unit(width, cid, big_c - c));
    }
    upper.set(cid, Expr::unit(width, cid));
    layers.push_back(std::move(upper).build());

    LayerBuilder out(nl, width, Activation::none);
    for (std::size_t j = 0; j < nl; ++j) {
        out.set(j, Expr::unit(width, oid(j), -1.0) + Expr::unit(width, cid, big_c));
    }
    layers.push_back(std::move(out).build());
    return Network(n0, std::move(layers));
}

bool has_uniform_hidden_width(const Network& net, std::size_t width) {
    const auto widths = net.hidden_widths();
    return std::all_of(widths.begin(), widths.end(), [&](std::size_t w) { return w == width; });
}

double AffineMap::operator()(std::span<const double> x) const {
    if (x.size() != a.size()) {
        throw DomainError("affine map dimension mismatch");
    }
    double z = b;
    for (std::size_t i = 0; i < a.size(); ++i) {
        z += a[i] * x[i];
    }
    return z;
}

Fnn::Fnn(FnnSpec spec) : spec_(std::move(spec)) {
    if (spec_.input_dim == 0 || spec_.output_dim == 0) {
        throw DomainError("FNN dimensions must be >= 1");
    }
    if (spec_.hidden.size() != spec_.readouts.size()) {
        throw DomainError("FNN needs one readout per hidden map");
    }
    for (std::size_t n = 0; n < spec_.hidden.size(); ++n) {
        if (spec_.hidden[n].a.size() != spec_.input_dim) {
            throw DomainError("FNN hidden map " + std::to_string(n) + " has the wrong input dimension");
        }
        if (spec_.readouts[n].size() != spec_.output_dim) {
            throw DomainError("FNN readout " + std::to_string(n) + " has the wrong output dimension");
        }
    }
}

std::vector<double> Fnn::operator()(std::span<const double> x) const {
    if (x.size() != spec_.input_dim) {
        throw DomainError("FNN input dimension mismatch");
    }
    std::vector<double> y(spec_.output_dim, 0.0);
    for (std::size_t n = 0; n < spec_.hidden.size(); ++n) {
        const double z = activate(spec_.act, spec_.hidden[n](x));
        for (std::size_t j = 0; j < spec_.output_dim; ++j) {
            y[j] += spec_.readouts[n][j] * z;
        }
    }
    return y;
}

Network Fnn::to_network() const {
    const std::size_t n = spec_.hidden.size();
    if (n == 0) {
        return Network::zero(spec_.input_dim, spec_.output_dim);
    }
    Layer hidden{n, spec_.input_dim, {}, {}, spec_.act};
    for (const auto& h : spec_.hidden) {
        hidden.weights.insert(hidden.weights.end(), h.a.begin(), h.a.end());
        hidden.bias.push_back(h.b);
    }
    Layer out{spec_.output_dim, n, std::vector<double>(spec_.output_dim * n, 0.0),
              std::vector<double>(spec_.output_dim, 0.0), Activation::none};
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < spec_.output_dim; ++j) {
            out.weights[j * n + k] = spec_.readouts[k][j];
        }
    }
    return Network(spec_.input_dim, {std::move(hidden), std::move(out)});
}

Fnn build_fnn(FnnSpec spec) { return Fnn(std::move(spec)); }

ParametricFamily affine_family(std::size_t input_dim) {
    ParametricFamily f;
    f.name = "affine";
    f.input_dim = input_dim;
    f.eval = [input_dim](const ParametricFamily::Params& p, std::span<const double> x) {
        double z = p[input_dim];
        for (std::size_t i = 0; i < input_dim; ++i) {
            z += p[i] * x[i];
        }
        return z;
    };
    f.add = [](const ParametricFamily::Params& p, const ParametricFamily::Params& q)
        -> std::optional<ParametricFamily::Params> {
        ParametricFamily::Params s(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            s[i] = p[i] + q[i];
        }
        return s;
    };
    f.sample = [input_dim](std::mt19937_64& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        ParametricFamily::Params p(input_dim + 1);
        for (double& v : p) {
            v = normal(rng);
        }
        return p;
    };
    f.constant = [input_dim](double c) -> std::optional<ParametricFamily::Params> {
        ParametricFamily::Params p(input_dim + 1, 0.0);
        p[input_dim] = c;
        return p;
    };
    return f;
}

ParametricFamily zero_family(std::size_t input_dim) {
    ParametricFamily f;
    f.name = "zero";
    f.input_dim = input_dim;
    f.eval = [](const ParametricFamily::Params&, std::span<const double>) { return 0.0; };
    f.add = [](const ParametricFamily::Params&, const ParametricFamily::Params&)
        -> std::optional<ParametricFamily::Params> { return ParametricFamily::Params{}; };
    f.sample = [](std::mt19937_64&) { return ParametricFamily::Params{}; };
    f.constant = [](double) -> std::optional<ParametricFamily::Params> {
        return ParametricFamily::Params{};
    };
    return f;
}

ParametricFamily linear_family(std::size_t input_dim) {
    ParametricFamily f = affine_family(input_dim);
    f.name = "linear";
    f.eval = [input_dim](const ParametricFamily::Params& p, std::span<const double> x) {
        double z = 0.0;
        for (std::size_t i = 0; i < input_dim; ++i) {
            z += p[i] * x[i];
        }
        return z;
    };
    f.sample = [input_dim](std::mt19937_64& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        ParametricFamily::Params p(input_dim);
        for (double& v : p) {
            v = normal(rng);
        }
        return p;
    };
    f.add = [](const ParametricFamily::Params& p, const ParametricFamily::Params& q)
        -> std::optional<ParametricFamily::Params> {
        ParametricFamily::Params s(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            s[i] = p[i] + q[i];
        }
        return s;
    };
    // the zero map is the closest member to any constant
    f.constant = [input_dim](double) -> std::optional<ParametricFamily::Params> {
        return ParametricFamily::Params(input_dim, 0.0);
    };
    return f;
}

AdditiveFamilyReport check_additive_family(const ParametricFamily& family,
                                           const std::vector<Point>& probes, std::uint64_t seed,
                                           std::size_t samples) {
    constexpr double kTol = 1e-12;
    AdditiveFamilyReport report;
    std::mt19937_64 rng(seed);

    report.closed_under_addition = true;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto p = family.sample(rng);
        const auto q = family.sample(rng);
        const auto sum = family.add(p, q);
        if (!sum) {
            report.closed_under_addition = false;
            break;
        }
        for (const Point& x : probes) {
            const double expect = family.eval(p, x) + family.eval(q, x);
            const double err = std::fabs(family.eval(*sum, x) - expect);
            report.max_addition_error = std::max(report.max_addition_error, err);
            if (err > kTol * (1.0 + std::fabs(expect))) {
                report.closed_under_addition = false;
            }
        }
    }

    std::vector<ParametricFamily::Params> members;
    for (std::size_t s = 0; s < samples; ++s) {
        members.push_back(family.sample(rng));
    }
    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (std::size_t j = i + 1; j < probes.size(); ++j) {
            if (probes[i] == probes[j]) {
                continue;
            }
            const bool separated = std::any_of(members.begin(), members.end(), [&](const auto& p) {
                return std::fabs(family.eval(p, probes[i]) - family.eval(p, probes[j])) > kTol;
            });
            if (!separated) {
                ++report.unseparated_pairs;
            }
        }
    }
    report.point_separating = report.unseparated_pairs == 0;

    report.contains_constants = true;
    for (double c : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
        const auto p = family.constant(c);
        if (!p) {
            report.contains_constants = false;
            break;
        }
        for (const Point& x : probes) {
            if (std::fabs(family.eval(*p, x) - c) > kTol * (1.0 + std::fabs(c))) {
                report.contains_constants = false;
            }
        }
    }
    return report;
}

WeightCompatibilityReport check_weight_compatibility(const std::vector<AffineMap>& h_sample,
                                                     const WeightFunction& w,
                                                     const WeightFunction& w1,
                                                     const std::vector<Point>& probes) {
    if (probes.empty()) {
        throw DomainError("weight compatibility needs probe points");
    }
    WeightCompatibilityReport report;
    double r_max = 0.0;
    for (const Point& x : probes) {
        r_max = std::max(r_max, vector_norm(x, VectorNorm::euclidean));
    }
    report.inner_max = 0.0;
    report.outer_min = std::numeric_limits<double>::infinity();
    for (const Point& x : probes) {
        const double wx = w(x);
        if (!(wx > 0.0)) {
            throw DomainError("input weight is not positive at a probe");
        }
        const double r = vector_norm(x, VectorNorm::euclidean);
        if (r <= 0.5 * r_max) {
            report.inner_max = std::max(report.inner_max, wx);
        }
        if (r >= 0.9 * r_max) {
            report.outer_min = std::min(report.outer_min, wx);
        }
        for (const AffineMap& h : h_sample) {
            const double w1x = w1(h(x));
            if (!(w1x > 0.0)) {
                throw DomainError("hidden weight is not positive at a probe");
            }
            report.sup_ratio = std::max(report.sup_ratio, w1x / wx);
        }
    }
    report.finite = std::isfinite(report.sup_ratio);
    report.admissible = r_max > 0.0 && report.outer_min > report.inner_max;
    return report;
}

std::vector<Point> cube_grid(std::size_t dim, double lo, double hi, std::size_t per_axis) {
    if (dim == 0 || per_axis == 0) {
        throw DomainError("cube grid needs dim >= 1 and per_axis >= 1");
    }
    std::vector<double> axis(per_axis);
    for (std::size_t k = 0; k < per_axis; ++k) {
        axis[k] = per_axis == 1 ? lo
                                : lo + (hi - lo) * static_cast<double>(k) /
                                           static_cast<double>(per_axis - 1);
    }
    std::vector<Point> grid;
    std::vector<std::size_t> idx(dim, 0);
    while (true) {
        Point x(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            x[d] = axis[idx[d]];
        }
        grid.push_back(std::move(x));
        std::size_t d = 0;
        while (d < dim && ++idx[d] == per_axis) {
            idx[d] = 0;
            ++d;
        }
        if (d == dim) {
            break;
        }
    }
    return grid;
}

} // namespace ouat
