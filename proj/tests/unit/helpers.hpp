#pragma once

#include <optional>
#include <vector>

#include "treequad/container.hpp"
#include "treequad/error.hpp"

namespace testing {

inline treequad::Container make_container(const treequad::Box& bounds,
                                          const std::vector<std::vector<double>>& xs,
                                          const std::vector<double>& ys) {
    treequad::Container c;
    c.bounds = bounds;
    c.X = treequad::PointSet(bounds.dim());
    for (std::size_t i = 0; i < xs.size(); ++i) c.insert(xs[i], ys[i]);
    return c;
}

template <class F>
std::optional<treequad::Errc> error_code(F&& f) {
    try {
        f();
    } catch (const treequad::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace testing
