#pragma once

#include <cstddef>

#include "cpd/errors.hpp"

namespace cpd {

/// Composite Simpson rule on [a, b] with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, std::size_t panels) {
    if (panels == 0 || panels % 2 != 0) {
        throw ConfigError("simpson: panel count must be positive and even");
    }
    const double h = (b - a) / static_cast<double>(panels);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < panels; ++i) {
        const double x = a + h * static_cast<double>(i);
        s += f(x) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

} // namespace cpd
