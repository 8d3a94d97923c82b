#include "ouat/measure.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>

#include "ouat/orlicz.hpp"

namespace ouat {

DiscreteMeasure::DiscreteMeasure(std::vector<Point> points, std::vector<double> weights) {
    if (points.size() != weights.size()) {
        throw DomainError("measure: points and weights differ in length");
    }
    if (points.empty()) {
        throw DomainError("measure: empty support");
    }
    dim_ = points.front().size();
    if (dim_ == 0) {
        throw DomainError("measure: points must have dimension >= 1");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim_) {
            throw DomainError("measure: points differ in dimension");
        }
        for (double c : points[i]) {
            if (!std::isfinite(c)) {
                throw DomainError("measure: point coordinates must be finite");
            }
        }
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
            throw DomainError("measure: weights must be finite and nonnegative");
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (weights[i] == 0.0) {
            continue;
        }
        auto [it, inserted] = index_.try_emplace(points[i], points_.size());
        if (inserted) {
            points_.push_back(std::move(points[i]));
            weights_.push_back(weights[i]);
        } else {
            weights_[it->second] += weights[i];
        }
    }
    if (points_.empty()) {
        throw DomainError("measure: empty support (all weights are zero)");
    }
}

double DiscreteMeasure::mass() const {
    double m = 0.0;
    for (double w : weights_) {
        m += w;
    }
    return m;
}

std::optional<std::size_t> DiscreteMeasure::find(std::span<const double> x) const {
    const auto it = index_.find(Point(x.begin(), x.end()));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Box DiscreteMeasure::bounding_box() const {
    Box box{points_.front(), points_.front()};
    for (const Point& p : points_) {
        for (std::size_t d = 0; d < dim_; ++d) {
            box.lo[d] = std::min(box.lo[d], p[d]);
            box.hi[d] = std::max(box.hi[d], p[d]);
        }
    }
    return box;
}

DiscreteMeasure make_discrete(std::vector<Point> points, std::vector<double> weights) {
    return DiscreteMeasure(std::move(points), std::move(weights));
}

DiscreteMeasure make_discrete_1d(const std::vector<double>& xs, std::vector<double> weights) {
    std::vector<Point> points;
    points.reserve(xs.size());
    for (double x : xs) {
        points.push_back({x});
    }
    return DiscreteMeasure(std::move(points), std::move(weights));
}

DensitySpec DensitySpec::uniform() { return DensitySpec{}; }

DensitySpec DensitySpec::gaussian(std::vector<double> mean, std::vector<double> sd) {
    if (mean.size() != sd.size() || mean.empty()) {
        throw DomainError("gaussian density: mean and sd must be non-empty and equal in length");
    }
    for (double s : sd) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw DomainError("gaussian density: sd must be positive");
        }
    }
    DensitySpec spec;
    spec.kind = Kind::gaussian;
    spec.mean = std::move(mean);
    spec.sd = std::move(sd);
    return spec;
}

DensitySpec DensitySpec::mixture(std::vector<Component> components) {
    if (components.empty()) {
        throw DomainError("mixture density needs at least one component");
    }
    for (const auto& c : components) {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            throw DomainError("mixture weights must be positive");
        }
    }
    DensitySpec spec;
    spec.kind = Kind::mixture;
    spec.components = std::move(components);
    return spec;
}

DensitySpec::Kind parse_density_kind(const std::string& name) {
    if (name == "uniform") {
        return DensitySpec::Kind::uniform;
    }
    if (name == "gaussian" || name == "gaussian-clipped") {
        return DensitySpec::Kind::gaussian;
    }
    if (name == "mixture") {
        return DensitySpec::Kind::mixture;
    }
    throw DomainError("unknown density spec '" + name + "'");
}

namespace {

Point draw(const DensitySpec& spec, const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (spec.kind) {
    case DensitySpec::Kind::uniform: {
        Point x(box.dim());
        for (std::size_t d = 0; d < box.dim(); ++d) {
            x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * unit(rng);
        }
        return x;
    }
    case DensitySpec::Kind::gaussian: {
        if (spec.mean.size() != box.dim()) {
            throw DomainError("gaussian density dimension differs from the clip box");
        }
        std::normal_distribution<double> normal(0.0, 1.0);
        Point x(box.dim());
        for (int attempt = 0; attempt < 10000; ++attempt) {
            for (std::size_t d = 0; d < box.dim(); ++d) {
                x[d] = spec.mean[d] + spec.sd[d] * normal(rng);
            }
            if (box.contains(x)) {
                return x;
            }
        }
        for (std::size_t d = 0; d < box.dim(); ++d) {
            x[d] = std::clamp(x[d], box.lo[d], box.hi[d]);
        }
        return x;
    }
    case DensitySpec::Kind::mixture: {
        double total = 0.0;
        for (const auto& c : spec.components) {
            total += c.weight;
        }
        double u = unit(rng) * total;
        for (const auto& c : spec.components) {
            if (u < c.weight) {
                return draw(c.spec, box, rng);
            }
            u -= c.weight;
        }
        return draw(spec.components.back().spec, box, rng);
    }
    }
    throw DomainError("unknown density kind");
}

} // namespace

DiscreteMeasure sample_empirical(const DensitySpec& spec, std::size_t n, std::uint64_t seed,
                                 const Box& clip_box) {
    if (n == 0) {
        throw DomainError("sample_empirical needs n >= 1");
    }
    clip_box.validate();
    std::mt19937_64 rng(seed);
    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        points.push_back(draw(spec, clip_box, rng));
    }
    return DiscreteMeasure(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure dominating_measure(const std::vector<DiscreteMeasure>& members) {
    if (members.empty()) {
        throw DomainError("dominating measure of an empty family");
    }
    const std::size_t dim = members.front().dim();
    std::vector<Point> points;
    std::vector<double> sums;
    std::map<Point, std::size_t> index;
    for (const auto& nu : members) {
        if (nu.dim() != dim) {
            throw DomainError("family members differ in dimension");
        }
        for (std::size_t i = 0; i < nu.size(); ++i) {
            auto [it, inserted] = index.try_emplace(nu.point(i), points.size());
            if (inserted) {
                points.push_back(nu.point(i));
                sums.push_back(nu.weight(i));
            } else {
                sums[it->second] += nu.weight(i);
            }
        }
    }
    const double n = static_cast<double>(members.size());
    for (double& s : sums) {
        s /= n;
    }
    return DiscreteMeasure(std::move(points), std::move(sums));
}

std::vector<double> radon_nikodym(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
    if (nu.dim() != mu.dim()) {
        throw DomainError("radon_nikodym: dimension mismatch");
    }
    std::vector<double> density(mu.size(), 0.0);
    for (std::size_t i = 0; i < nu.size(); ++i) {
        const auto j = mu.find(nu.point(i));
        if (!j) {
            throw AbsoluteContinuityError("nu charges a point outside the support of mu");
        }
        // mu never stores zero weights, so the ratio is always defined
        assert(mu.weight(*j) > 0.0);
        density[*j] = nu.weight(i) / mu.weight(*j);
    }
    return density;
}

MeasureFamily::MeasureFamily(std::vector<DiscreteMeasure> members)
    : members_(std::move(members)), dominating_(dominating_measure(members_)) {
    densities_.reserve(members_.size());
    support_maps_.reserve(members_.size());
    for (const auto& nu : members_) {
        densities_.push_back(radon_nikodym(nu, dominating_));
        std::vector<std::size_t> map(nu.size());
        for (std::size_t i = 0; i < nu.size(); ++i) {
            map[i] = *dominating_.find(nu.point(i));
        }
        support_maps_.push_back(std::move(map));
    }
    for (std::size_t k = 0; k < members_.size(); ++k) {
        const auto& nu = members_[k];
        for (std::size_t i = 0; i < nu.size(); ++i) {
            const std::size_t j = support_maps_[k][i];
            const double rebuilt = densities_[k][j] * dominating_.weight(j);
            if (std::fabs(rebuilt - nu.weight(i)) > 1e-14 * nu.weight(i)) {
                throw InvariantViolation("density does not reproduce member weight");
            }
        }
    }
}

std::vector<YoungFunction> default_psi_candidates() {
    return {YoungFunction::power(2.0, 0.5), YoungFunction::power(1.5, 1.0 / 1.5),
            YoungFunction::power(3.0, 1.0 / 3.0), YoungFunction::entropy()};
}

DlvpCertificate dlvp_certificate(const MeasureFamily& family,
                                 const std::vector<YoungFunction>& psi_candidates) {
    if (psi_candidates.empty()) {
        throw DomainError("De la Vallee Poussin certificate needs at least one psi candidate");
    }
    for (const auto& psi : psi_candidates) {
        if (!known_n_function(psi)) {
            throw DomainError("psi candidate " + psi.describe() + " is not an N-function");
        }
    }
    const auto& weights = family.dominating().weights();
    for (const auto& psi : psi_candidates) {
        DlvpCertificate cert{psi, {}, 0.0};
        bool finite = true;
        for (const auto& density : family.densities()) {
            double norm = 0.0;
            try {
                norm = gauge_norm_of_magnitudes(psi, weights, density).value;
            } catch (const BracketError&) {
                finite = false;
                break;
            }
            cert.per_member_norms.push_back(norm);
            cert.sup_norm = std::max(cert.sup_norm, norm);
        }
        if (finite && std::isfinite(cert.sup_norm)) {
            return cert;
        }
    }
    throw BracketError("no psi candidate gives a finite sup of density norms");
}

} // namespace ouat
