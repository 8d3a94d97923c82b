#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ouat/box.hpp"
#include "ouat/young.hpp"

namespace ouat {

using Point = std::vector<double>;

/// Finite-support nonnegative measure sum_i w_i delta_{x_i} on R^dim.
///
/// Construction canonicalizes: duplicate points are merged (weights summed,
/// first occurrence keeps its position) and zero-weight points are dropped.
class DiscreteMeasure {
public:
    /// Throws DomainError on length mismatch, negative or non-finite weights,
    /// ragged or non-finite points, or an empty resulting support.
    DiscreteMeasure(std::vector<Point> points, std::vector<double> weights);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<Point>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const Point& point(std::size_t i) const { return points_.at(i); }
    double weight(std::size_t i) const { return weights_.at(i); }
    double mass() const;

    /// Index of an exact support point.
    std::optional<std::size_t> find(std::span<const double> x) const;
    /// Smallest box containing the support.
    Box bounding_box() const;

    friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
        return a.points_ == b.points_ && a.weights_ == b.weights_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Point> points_;
    std::vector<double> weights_;
    std::map<Point, std::size_t> index_;
};

DiscreteMeasure make_discrete(std::vector<Point> points, std::vector<double> weights);

/// Convenience for one-dimensional measures.
DiscreteMeasure make_discrete_1d(const std::vector<double>& xs, std::vector<double> weights);

/// Named sampler for empirical measures.
struct DensitySpec {
    enum class Kind { uniform, gaussian, mixture };
    struct Component;

    Kind kind = Kind::uniform;
    std::vector<double> mean; // gaussian
    std::vector<double> sd;   // gaussian
    std::vector<Component> components;

    static DensitySpec uniform();
    static DensitySpec gaussian(std::vector<double> mean, std::vector<double> sd);
    static DensitySpec mixture(std::vector<Component> components);
};

struct DensitySpec::Component {
    double weight = 1.0;
    DensitySpec spec;
};

/// Parses "uniform" | "gaussian" | "mixture"; throws DomainError otherwise.
DensitySpec::Kind parse_density_kind(const std::string& name);

/// n points of weight 1/n drawn from `spec` restricted to `clip_box`.
/// Gaussian draws outside the box are rejected (and clamped after 10^4
/// rejections). Deterministic for a fixed seed.
DiscreteMeasure sample_empirical(const DensitySpec& spec, std::size_t n, std::uint64_t seed,
                                 const Box& clip_box);

/// mu_M = (1/|members|) sum_k nu_k over the union support.
DiscreteMeasure dominating_measure(const std::vector<DiscreteMeasure>& members);

/// d nu / d mu on support(mu). Throws AbsoluteContinuityError if nu charges
/// a point outside support(mu).
std::vector<double> radon_nikodym(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

/// Finite family of measures together with its dominating measure and the
/// density of every member with respect to it.
class MeasureFamily {
public:
    explicit MeasureFamily(std::vector<DiscreteMeasure> members);

    std::size_t size() const noexcept { return members_.size(); }
    std::size_t dim() const noexcept { return dominating_.dim(); }
    const std::vector<DiscreteMeasure>& members() const noexcept { return members_; }
    const DiscreteMeasure& member(std::size_t k) const { return members_.at(k); }
    const DiscreteMeasure& dominating() const noexcept { return dominating_; }
    /// densities()[k][i] = d nu_k / d mu_M at dominating point i.
    const std::vector<std::vector<double>>& densities() const noexcept { return densities_; }
    /// support_map(k)[j] = dominating index of the j-th point of member k.
    const std::vector<std::size_t>& support_map(std::size_t k) const { return support_maps_.at(k); }

private:
    std::vector<DiscreteMeasure> members_;
    DiscreteMeasure dominating_;
    std::vector<std::vector<double>> densities_;
    std::vector<std::vector<std::size_t>> support_maps_;
};

struct DlvpCertificate {
    YoungFunction psi;
    std::vector<double> per_member_norms; // N_{psi, mu_M}(d nu / d mu_M)
    double sup_norm = 0.0;
};

/// [y^2/2, |y|^1.5/1.5, |y|^3/3, entropy]
std::vector<YoungFunction> default_psi_candidates();

/// First candidate psi with sup_k N_{psi, mu_M}(density_k) finite. Throws
/// DomainError for an empty list or a candidate that is not an N-function.
DlvpCertificate dlvp_certificate(const MeasureFamily& family,
                                 const std::vector<YoungFunction>& psi_candidates);

} // namespace ouat
