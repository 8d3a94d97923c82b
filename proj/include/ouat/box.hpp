#pragma once

#include <span>
#include <vector>

namespace ouat {

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_n, hi_n].
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const noexcept { return lo.size(); }
    /// Throws DomainError unless lo <= hi componentwise and all bounds are finite.
    void validate() const;
    bool contains(std::span<const double> x) const;
    /// The delta-enlargement [lo - delta, hi + delta].
    Box enlarged(double delta) const;
    double max_extent() const;

    friend bool operator==(const Box&, const Box&) = default;
};

/// [lo, hi]^dim
Box cube(std::size_t dim, double lo, double hi);

} // namespace ouat
