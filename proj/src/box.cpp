#include "ouat/box.hpp"

#include <algorithm>
#include <cmath>

#include "ouat/error.hpp"

namespace ouat {

void Box::validate() const {
    if (lo.size() != hi.size() || lo.empty()) {
        throw DomainError("box bounds must be non-empty and of equal dimension");
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
            throw DomainError("box bounds must be finite");
        }
        if (lo[i] > hi[i]) {
            throw DomainError("box requires lo <= hi in every coordinate");
        }
    }
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != lo.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo[i] || x[i] > hi[i]) {
            return false;
        }
    }
    return true;
}

Box Box::enlarged(double delta) const {
    Box out = *this;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        out.lo[i] -= delta;
        out.hi[i] += delta;
    }
    return out;
}

double Box::max_extent() const {
    double extent = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        extent = std::max(extent, hi[i] - lo[i]);
    }
    return extent;
}

Box cube(std::size_t dim, double lo, double hi) {
    return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

} // namespace ouat
