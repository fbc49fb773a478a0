#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "wolff/errors.hpp"
#include "wolff/solver.hpp"

using namespace wolff;
using testsupport::rel_err;
using testsupport::uniform;

namespace {

GridFunction random_function(std::mt19937_64& rng, const CellGrid& g, double zero_fraction = 0.3) {
    std::vector<double> v(g.cell_count());
    for (auto& x : v) x = uniform(rng, 0, 1) < zero_fraction ? 0.0 : uniform(rng, 0, 2);
    return GridFunction(g, v);
}

// N f at every cell centre straight from the definition: masses of f^q by summing cells.
std::vector<double> brute_N(const GridFunction& f, const Params& P, GenerationWindow w) {
    const CellGrid& g = f.grid;
    const int n = g.dim();
    std::vector<double> out(g.cell_count(), 0.0);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const Point x = g.cell_center(i);
        for (int gen = w.g_min; gen <= w.g_max; ++gen) {
            const DyadicCube Q = cube_containing(x, gen);
            double m = 0.0;
            if (gen <= g.generation) {
                m = std::pow(f.values[i], P.q) * std::pow(Q.side(), n);
            } else {
                for (std::size_t j = 0; j < g.cell_count(); ++j)
                    if (Q.contains(g.cell(j))) m += std::pow(f.values[j], P.q) * g.cell_volume();
            }
            if (m > 0.0) out[i] += std::pow(m * std::pow(Q.side(), P.alpha_p() - n), 1.0 / (P.p - 1.0));
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("grid function basics") {
    const CellGrid g(DyadicCube{0, {0, 0}}, -2);
    const auto f = GridFunction::indicator(g, 5, 2.0);
    CHECK(f.sup() == 2.0);
    CHECK_FALSE(f.is_zero());
    CHECK(GridFunction::zeros(g).is_zero());
    CHECK(rel_err(f.power_measure(3.0).total_mass(), 8.0 / 16.0) < 1e-15);
    const auto fine = f.refined();
    CHECK(fine.size() == 4 * f.size());
    for (std::size_t i = 0; i < fine.size(); ++i)
        CHECK(fine.values[i] == f.values[*g.cell_containing(fine.grid.cell_center(i))]);
    CHECK_THROWS_AS(GridFunction(g, std::vector<double>(3, 1.0)), ConfigError);
    CHECK_THROWS_AS(GridFunction::indicator(g, 16), ConfigError);
}

TEST_CASE("apply_N against the definition and the serial reference") {
    std::mt19937_64 rng(41);
    for (int n = 1; n <= 3; ++n) {
        const CellGrid g(DyadicCube{1, std::vector<std::int64_t>(static_cast<std::size_t>(n), -1)}, n == 3 ? -1 : -3);
        const Params P = make_params(n, 0.3, 1.5 + 0.5 * n, 3.0);
        const GenerationWindow w(g.generation - 2, 3);
        const auto f = random_function(rng, g);
        const auto fast = apply_N(f, P, w);
        const auto ref = apply_N_reference(f, P, w);
        const auto brute = brute_N(f, P, w);
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(std::abs(fast.values[i] - ref.values[i]) <= 1e-12 * ref.values[i]);
            CHECK(std::abs(fast.values[i] - brute[i]) <= 1e-12 * brute[i]);
        }
    }
}

TEST_CASE("N is monotone and homogeneous") {
    std::mt19937_64 rng(43);
    const CellGrid g(DyadicCube{0, {0, 0}}, -3);
    const GenerationWindow w(-5, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const Params P = make_params(2, uniform(rng, 0.2, 0.6), uniform(rng, 1.5, 3), uniform(rng, 2.5, 5));
        const auto f = random_function(rng, g);
        auto h = f;
        for (auto& v : h.values) v += uniform(rng, 0, 0.5);
        const auto Nf = apply_N(f, P, w);
        const auto Nh = apply_N(h, P, w);
        const double lam = uniform(rng, 0.1, 10);
        auto lf = f;
        for (auto& v : lf.values) v *= lam;
        const auto Nlf = apply_N(lf, P, w);
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(Nf.values[i] <= Nh.values[i]);
            CHECK(rel_err(Nlf.values[i], std::pow(lam, P.q / (P.p - 1)) * Nf.values[i]) < 1e-12);
        }
    }
}

TEST_CASE("zero data gives the zero solution") {
    const CellGrid g(DyadicCube{0, {0}}, -4);
    const auto res = picard_solve(GridFunction::zeros(g), make_params(1, 0.4, 2, 3), GenerationWindow(-4, 0));
    CHECK(res.cert.status == SolveStatus::converged);
    CHECK(res.cert.iterations == 1);
    CHECK(res.u.is_zero());
}

TEST_CASE("Picard certificate on a one-cell source") {
    const CellGrid g(DyadicCube{0, {0}}, -6);
    const auto f = GridFunction::indicator(g, 20);
    const Params P = make_params(1, 0.4, 2, 3);
    const GenerationWindow w(-6, 0);
    const auto res = picard_solve(f, P, w);
    const auto& c = res.cert;
    CHECK(c.status == SolveStatus::converged);
    CHECK(c.monotone);
    CHECK(c.majorant_ok);
    CHECK(c.lower_ok);
    CHECK(c.upper_ok);
    CHECK(c.C_estimated);
    CHECK(rel_err(c.C, 1.1 * pointwise_constant(f, P, w)) < 1e-15);
    CHECK(c.residual_history.size() == static_cast<std::size_t>(c.iterations));
    // the returned iterate solves the equation up to one more step
    CHECK(residual(res.u, f, c.eps, P, w) <= 1e-10);
    CHECK(c.majorant_coefficient <= c.x0);
}

TEST_CASE("options: eps override, iteration limit, regime") {
    const CellGrid g(DyadicCube{0, {0}}, -5);
    const auto f = GridFunction::indicator(g, 3);
    const Params P = make_params(1, 0.4, 2, 3);
    PicardOptions o;
    o.eps = 0.01;
    const auto small = picard_solve(f, P, GenerationWindow(-5, 0), o);
    CHECK_FALSE(small.cert.bounds_checked);
    CHECK(small.cert.status == SolveStatus::converged);
    o.max_iter = 2;
    o.tol = 1e-300;
    CHECK(picard_solve(f, P, GenerationWindow(-5, 0), o).cert.status == SolveStatus::max_iterations);
    CHECK_THROWS_AS(picard_solve(f, make_params(1, 1.0, 2, 3), GenerationWindow(-5, 0)), RegimeError);
    PicardOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(picard_solve(f, P, GenerationWindow(-5, 0), bad), ConfigError);
}

TEST_CASE("too large eps is reported as divergence") {
    const CellGrid g(DyadicCube{0, {0}}, -5);
    const auto f = GridFunction::constant(g, 1.0);
    PicardOptions o;
    o.eps = 50.0;
    o.max_iter = 200;
    const auto res = picard_solve(f, make_params(1, 0.4, 2, 3), GenerationWindow(-5, 0), o);
    CHECK(res.cert.status == SolveStatus::diverged);
}

}
