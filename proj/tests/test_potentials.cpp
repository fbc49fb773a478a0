#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "wolff/errors.hpp"
#include "wolff/kernels.hpp"
#include "wolff/oracles.hpp"
#include "wolff/params.hpp"
#include "wolff/potentials.hpp"

using namespace wolff;
using testsupport::rel_err;
using testsupport::uniform;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PointMassMeasure random_atoms(std::mt19937_64& rng, int n, int count) {
    std::vector<Atom> atoms;
    for (int i = 0; i < count; ++i) atoms.push_back({testsupport::random_point(rng, n, -1, 1), uniform(rng, 0.1, 2.0)});
    return PointMassMeasure(n, atoms);
}

Params random_params(std::mt19937_64& rng, int n) {
    const double p = uniform(rng, 1.3, 3.5);
    const double alpha = uniform(rng, 0.1, 0.95) * n / p;
    return make_params(n, alpha, p, p + 1.0);
}

}  // namespace

TEST_SUITE("potentials") {

TEST_CASE("generation window") {
    CHECK(GenerationWindow(-3, 2).count() == 6);
    CHECK_THROWS_AS(GenerationWindow(1, 0), ConfigError);
}

TEST_CASE("Dirac potential matches the power-law integral") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const Params P = random_params(rng, n);
        const double d = std::exp(uniform(rng, -3, 3));
        const double r = std::exp(uniform(rng, -3, 4));
        Point x(static_cast<std::size_t>(n), 0.0);
        x[0] = d;
        const double beta = (n - P.alpha_p()) / (P.p - 1.0);
        const double expect = r <= d ? 0.0 : (std::pow(d, -beta) - std::pow(r, -beta)) / beta;
        const auto w = wolff_truncated(Measure::dirac(Point(x.size(), 0.0)), x, P, r);
        REQUIRE(w.finite());
        CHECK(std::abs(w.value - expect) <= 1e-12 * std::abs(expect));
        const auto full = wolff_truncated(Measure::dirac(Point(x.size(), 0.0)), x, P, kInf);
        CHECK(rel_err(full.value, std::pow(d, -beta) / beta) < 1e-12);
    }
}

TEST_CASE("divergence sentinels") {
    const Params P = make_params(3, 1.0, 2.0, 3.0);
    const Measure d = Measure::dirac(Point{0, 0, 0});
    const auto at_atom = wolff_truncated(d, Point{0, 0, 0}, P, 1.0);
    CHECK(at_atom.divergence == Divergence::at_zero);
    CHECK(std::isinf(at_atom.value));
    const Params local = make_params(2, 1.0, 2.0, 3.0);
    const auto far = wolff_truncated(Measure::dirac(Point{0, 0}), Point{1, 0}, local, kInf);
    CHECK(far.divergence == Divergence::at_infinity);
    CHECK_FALSE(far.reason().empty());
    const auto finite = wolff_truncated(Measure::dirac(Point{0, 0}), Point{1, 0}, local, 4.0);
    CHECK(rel_err(finite.value, std::log(4.0)) < 1e-14);
}

TEST_CASE("point masses agree with the brute-force quadrature") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 10; ++i) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const Params P = random_params(rng, n);
        const Measure mu(random_atoms(rng, n, 5));
        const Point x = testsupport::random_point(rng, n, -1.5, 1.5);
        // the trapezoid rule is first order across the mass jumps
        const double w = wolff_truncated(mu, x, P, 3.0).value;
        for (int nodes : {128, 1024, 8192}) {
            const double h = std::log(10.0) / nodes;
            CHECK(std::abs(brute_wolff(mu, x, P, 3.0, nodes).value - w) < 2.0 * h * w);
        }
    }
}

TEST_CASE("Newtonian potential of the uniform ball") {
    const Measure ball = RadialPowerMeasure(3, 1.0, 0.0, 1.0);
    // I_2 mu(0) = 2 pi R^2, and 2 pi (R^2 - |x|^2/3) inside
    CHECK(rel_err(riesz_truncated(ball, Point{0, 0, 0}, 2.0, kInf).value, 2 * std::numbers::pi) < 1e-13);
    for (double r : {0.25, 0.5, 0.8}) {
        const double v = riesz_truncated(ball, Point{r, 0, 0}, 2.0, kInf).value;
        CHECK(rel_err(v, 2 * std::numbers::pi * (1 - r * r / 3)) < 1e-3);
    }
    // outside: 4 pi / (3 |x|)
    CHECK(rel_err(riesz_truncated(ball, Point{2, 0, 0}, 2.0, kInf).value, 4 * std::numbers::pi / 6) < 1e-3);
}

TEST_CASE("centred power law in closed form") {
    // mu = |x|^{-g} on B_1 in R^3, W_{1,2}(0) = int_0^1 c t^{3-g-1} dt/t + M int_1^inf t^{-2} dt
    const double g = 1.5;
    const Measure mu = RadialPowerMeasure(3, 1.0, g, 1.0);
    const double c = 4 * std::numbers::pi / (3 - g);
    const double expect = c / (2 - g) + c;
    CHECK(rel_err(wolff_truncated(mu, Point{0, 0, 0}, make_params(3, 1, 2, 3), kInf).value, expect) < 1e-13);
    CHECK_THROWS_AS(wolff_truncated(Measure(RadialPowerMeasure(3, 1.0, 1.0, kInf)), Point{1, 0, 0},
                                    make_params(3, 1, 2, 3), kInf),
                    ConfigError);
}

TEST_CASE("upper and lower parts add up") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 50; ++i) {
        const Params P = random_params(rng, 3);
        const Measure mu(random_atoms(rng, 3, 4));
        const Point x = testsupport::random_point(rng, 3, -1, 1);
        const double r = std::exp(uniform(rng, -2, 2));
        const auto s = wolff_split(mu, x, P, r);
        const auto full = wolff_truncated(mu, x, P, kInf);
        CHECK(rel_err(s.upper.value + s.lower.value, full.value) < 1e-12);
    }
}

TEST_CASE("dyadic sums over the chain of a single atom") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const Params P = random_params(rng, n);
        const Point a = testsupport::random_point(rng, n, -4, 4);
        const Point x = testsupport::random_point(rng, n, -4, 4);
        const double m = uniform(rng, 0.5, 2);
        const Measure mu = Measure::dirac(a, m);
        const GenerationWindow w(-6, 4);
        double wolff = 0.0, riesz = 0.0;
        for (int g = w.g_min; g <= w.g_max; ++g) {
            if (!(cube_containing(x, g) == cube_containing(a, g))) continue;
            const double side = std::ldexp(1.0, g);
            wolff += std::pow(m * std::pow(side, P.alpha_p() - n), 1.0 / (P.p - 1.0));
            riesz += m * std::pow(side, 0.7 - n);
        }
        CHECK(rel_err(dyadic_wolff(mu, x, P, w), wolff) < 1e-13);
        CHECK(rel_err(dyadic_riesz(mu, x, 0.7, w), riesz) < 1e-13);
        CHECK(rel_err(dyadic_wolff_shifted(mu, x, P, w, ShiftedLattice{Point(x.size(), 0.0)}), wolff) < 1e-13);
    }
}

TEST_CASE("serial and parallel kernels agree bitwise") {
    std::mt19937_64 rng(37);
    const Params P = make_params(3, 1.0, 2.0, 4.0);
    const Measure atoms(random_atoms(rng, 3, 6));
    const CellGrid g(DyadicCube{0, {0, 0, 0}}, -3);
    std::vector<double> v(g.cell_count());
    for (auto& x : v) x = uniform(rng, 0, 1);
    const Measure cells(CellDensityMeasure(g, v));
    std::vector<Point> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(testsupport::random_point(rng, 3, -0.5, 1.5));
    for (const Measure* mu : {&atoms, &cells}) {
        const auto s = wolff_at_points(*mu, xs, P, 2.0, Execution::serial);
        const auto p = wolff_at_points(*mu, xs, P, 2.0, Execution::parallel);
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK(s[i].value == p[i].value);
        const auto ds = dyadic_wolff_at_points(*mu, xs, P, GenerationWindow(-5, 2), Execution::serial);
        const auto dp = dyadic_wolff_at_points(*mu, xs, P, GenerationWindow(-5, 2), Execution::parallel);
        CHECK(ds == dp);
        const auto ts = truncated_at_points(*mu, xs, 1.5, 0.5, 0.1, 3.0, Execution::serial);
        const auto tp = truncated_at_points(*mu, xs, 1.5, 0.5, 0.1, 3.0, Execution::parallel);
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ts[i].value == tp[i].value);
    }
}

TEST_CASE("cell densities: potential converges with the t-grid") {
    const CellGrid g(DyadicCube{0, {0, 0, 0}}, -3);
    std::vector<double> v(g.cell_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + static_cast<double>(i % 5);
    const Measure mu(CellDensityMeasure(g, v));
    const Params P = make_params(3, 1.0, 2.0, 3.0);
    const Point x{0.3, 0.55, 0.71};
    const double w = wolff_truncated(mu, x, P, kInf).value;
    const double b = brute_wolff(mu, x, P, kInf, 1024).value;
    CHECK(rel_err(w, b) < 1e-3);
}

}
