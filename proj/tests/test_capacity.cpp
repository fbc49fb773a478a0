#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wolff/capacity.hpp"
#include "wolff/errors.hpp"

using namespace wolff;
using testsupport::rel_err;

namespace {

Measure uniform_cube(int n, int depth, double height = 1.0) {
    const CellGrid g(DyadicCube{0, std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)}, -depth);
    return CellDensityMeasure(g, std::vector<double>(g.cell_count(), height));
}

}  // namespace

TEST_SUITE("capacity") {

TEST_CASE("capacity indices") {
    const auto ci = capacity_indices(make_params(3, 1, 2, 5));
    CHECK(rel_err(ci.s, 5.0 / 4.0) < 1e-15);
    CHECK(rel_err(ci.kappa, 2.5) < 1e-15);
    CHECK(rel_err(ci.gamma, 4.0) < 1e-14);
}

TEST_CASE("atoms carry no capacity") {
    const auto est = riesz_capacity_lower({Box{{-1, -1, -1}, {1, 1, 1}}}, Measure::dirac(Point{0, 0, 0}),
                                          make_params(3, 1, 2, 5), 1.0);
    CHECK(est.value == 0.0);
    CHECK(est.note == "atoms have zero capacity contribution");
}

TEST_CASE("normalisation invariance and monotonicity in E") {
    const Params P = make_params(3, 1, 2, 5);
    const Box E{{0, 0, 0}, {1, 1, 1}};
    const auto a = riesz_capacity_lower({E}, uniform_cube(3, 2), P, 1.0);
    const auto b = riesz_capacity_lower({E}, uniform_cube(3, 2, 2.0), P, 1.0);
    CHECK(a.value > 0.0);
    CHECK(rel_err(a.value, b.value) < 1e-12);
    const auto big = riesz_capacity_lower({Box{{-1, -1, -1}, {2, 2, 2}}}, uniform_cube(3, 2), P, 1.0);
    CHECK(big.value >= a.value);
    CHECK_THROWS_AS(riesz_capacity_lower({Box{{5, 5, 5}, {6, 6, 6}}}, uniform_cube(3, 2), P, 1.0), ConfigError);
}

TEST_CASE("Bessel energy") {
    const Params P = make_params(3, 1, 2, 2);
    CHECK(bessel_energy(Measure::zero(3), P, 1.0, -3).value == 0.0);
    // (n - p) q/(p-1) = 2 < 3: the Dirac energy is finite
    const auto d = bessel_energy(Measure::dirac(Point{0.1, 0.1, 0.1}), P, 0.5, -4);
    CHECK(std::isfinite(d.value));
    CHECK(d.divergence.empty());
    const auto d2 = bessel_energy(Measure::dirac(Point{0.1, 0.1, 0.1}), P, 1.0, -4);
    CHECK(d2.value >= d.value);
    const auto inf = bessel_energy(Measure::dirac(Point{0.1, 0.1, 0.1}), make_params(3, 1, 2, 4), 0.5, -4);
    CHECK_FALSE(inf.divergence.empty());
}

TEST_CASE("scaling check guards") {
    CHECK_THROWS_AS(capacity_scaling_check(make_params(3, 1, 2, 2), {1, 2, 4}), RegimeError);
    CHECK_THROWS_AS(capacity_scaling_check(make_params(3, 1, 2, 5), {1}), ConfigError);
    CHECK_THROWS_AS(capacity_scaling_check(make_params(3, 1, 2, 5), {1, 3, 4}), ConfigError);
}

TEST_CASE("scaling slope in two dimensions") {
    // n = 2, alpha p = 1, q = 3, p = 2: exponent 2 - 3/2 = 0.5
    const auto rep = capacity_scaling_check(make_params(2, 0.5, 2, 3), {1, 2, 4, 8}, 3);
    CHECK(std::abs(rep.value("slope") - 0.5) < 0.05);
}

}
