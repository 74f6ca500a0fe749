#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace treequad {

using Point = std::vector<double>;

/// Closed axis-aligned hyper-rectangle [lower, upper].
class Box {
public:
    Box() = default;
    Box(std::vector<double> lower, std::vector<double> upper);

    static Box cube(std::size_t dim, double lo, double hi);

    std::size_t dim() const noexcept { return lower_.size(); }
    const std::vector<double>& lower() const noexcept { return lower_; }
    const std::vector<double>& upper() const noexcept { return upper_; }
    double lower(std::size_t d) const { return lower_[d]; }
    double upper(std::size_t d) const { return upper_[d]; }
    double width(std::size_t d) const { return upper_[d] - lower_[d]; }

    double volume() const noexcept;
    Point center() const;
    bool contains(std::span<const double> x) const noexcept;

    /// Copies with one face moved; the caller guarantees the result is non-empty.
    Box with_upper(std::size_t d, double value) const;
    Box with_lower(std::size_t d, double value) const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// Row-major N x D matrix of sample locations.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {}
    PointSet(std::size_t dim, std::vector<double> coords);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const noexcept { return coords_.empty(); }

    std::span<const double> row(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    double at(std::size_t i, std::size_t d) const { return coords_[i * dim_ + d]; }

    void push_back(std::span<const double> x);
    void reserve(std::size_t n) { coords_.reserve(n * dim_); }

    const std::vector<double>& coords() const noexcept { return coords_; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

}  // namespace treequad
