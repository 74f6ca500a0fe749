#include "treequad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treequad/error.hpp"

namespace treequad {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size()) {
        throw Error(Errc::invalid_domain, "box bounds must be non-empty and of equal length");
    }
    for (std::size_t d = 0; d < lower_.size(); ++d) {
        if (!(lower_[d] < upper_[d]) || !std::isfinite(lower_[d]) || !std::isfinite(upper_[d])) {
            throw Error(Errc::invalid_domain,
                        "box axis " + std::to_string(d) + " has lower >= upper");
        }
    }
}

Box Box::cube(std::size_t dim, double lo, double hi) {
    if (dim == 0) {
        throw Error(Errc::invalid_dimension, "dimension must be at least 1");
    }
    return Box(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

double Box::volume() const noexcept {
    double v = 1.0;
    for (std::size_t d = 0; d < lower_.size(); ++d) v *= upper_[d] - lower_[d];
    return v;
}

Point Box::center() const {
    Point c(dim());
    for (std::size_t d = 0; d < dim(); ++d) c[d] = 0.5 * (lower_[d] + upper_[d]);
    return c;
}

bool Box::contains(std::span<const double> x) const noexcept {
    if (x.size() != dim()) return false;
    for (std::size_t d = 0; d < dim(); ++d) {
        if (!(x[d] >= lower_[d] && x[d] <= upper_[d])) return false;
    }
    return true;
}

Box Box::with_upper(std::size_t d, double value) const {
    Box b = *this;
    b.upper_[d] = value;
    return b;
}

Box Box::with_lower(std::size_t d, double value) const {
    Box b = *this;
    b.lower_[d] = value;
    return b;
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0 || coords_.size() % dim_ != 0) {
        throw Error(Errc::invalid_argument, "point coordinates do not form whole rows");
    }
}

void PointSet::push_back(std::span<const double> x) {
    if (x.size() != dim_) {
        throw Error(Errc::invalid_argument, "point dimension mismatch");
    }
    coords_.insert(coords_.end(), x.begin(), x.end());
}

}  // namespace treequad
