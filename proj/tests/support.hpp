#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "wolff/dyadic.hpp"

namespace testsupport {

inline double rel_err(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline wolff::Point random_point(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    wolff::Point x(static_cast<std::size_t>(n));
    for (auto& v : x) v = u(rng);
    return x;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testsupport
