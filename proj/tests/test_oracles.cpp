#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "support.hpp"
#include "wolff/errors.hpp"
#include "wolff/oracles.hpp"
#include "wolff/potentials.hpp"

using namespace wolff;
using testsupport::rel_err;

namespace {

double binom(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("p-Laplace singular solution constant") {
    for (auto [n, p, q] : std::initializer_list<std::tuple<int, double, double>>{{3, 2.0, 5.0}, {4, 2.0, 4.0}, {3, 1.5, 4.0}, {5, 3.0, 9.0}}) {
        const auto sol = radial_plap_solution(n, p, q);
        const double beta = p / (q - p + 1);
        const double c = std::pow(std::pow(beta, p - 1) * (n - p - beta * (p - 1)), 1.0 / (q - p + 1));
        CHECK(rel_err(sol.c, c) < 1e-14);
        CHECK(rel_err(sol.exponent, -beta) < 1e-15);
    }
    CHECK(rel_err(radial_plap_solution(3, 2, 5).c, std::sqrt(0.5)) < 1e-15);
    CHECK(rel_err(radial_plap_solution(4, 2, 4).c, std::cbrt(8.0 / 9.0)) < 1e-15);
    CHECK_THROWS_AS(radial_plap_solution(3, 2, 3), RegimeError);
    CHECK_THROWS_AS(radial_plap_solution(3, 3, 5), RegimeError);
}

TEST_CASE("Hessian singular solution constant") {
    for (auto [n, k, q] : std::initializer_list<std::tuple<int, int, double>>{{5, 1, 5.0}, {7, 2, 7.0}, {9, 3, 10.0}}) {
        const auto sol = radial_hessian_solution(n, k, q);
        const double beta = 2.0 * k / (q - k);
        const double c = std::pow(binom(n - 1, k - 1) / k * std::pow(beta, k) * (n - 2 * k - k * beta), 1.0 / (q - k));
        CHECK(rel_err(sol.c, c) < 1e-13);
    }
    CHECK_THROWS_AS(radial_hessian_solution(4, 2, 9), RegimeError);
    CHECK_THROWS_AS(radial_hessian_solution(5, 1, 1.5), RegimeError);
}

TEST_CASE("log mesh") {
    const auto m = log_mesh(0.5, 2.0, 5);
    REQUIRE(m.size() == 5);
    CHECK(m.front() == 0.5);
    CHECK(m.back() == 2.0);
    CHECK(rel_err(m[2], 1.0) < 1e-15);
    CHECK_THROWS_AS(log_mesh(0.0, 1.0, 4), ConfigError);
}

TEST_CASE("residuals are second order") {
    for (auto [n, p, q] : std::initializer_list<std::tuple<int, double, double>>{{3, 2.0, 5.0}, {4, 2.0, 4.0}, {3, 1.5, 4.0}}) {
        const auto sol = radial_plap_solution(n, p, q);
        const auto coarse = sample_profile(sol, log_mesh(0.5, 2.0, 201));
        const auto fine = sample_profile(sol, log_mesh(0.5, 2.0, 401));
        const double rc = plap_radial_residual(coarse, n, p, q) / source_scale(coarse, q);
        const double rf = plap_radial_residual(fine, n, p, q) / source_scale(fine, q);
        CHECK(rf <= 1e-4);
        CHECK(rc / rf >= 3.5);
        CHECK(rc / rf <= 4.5);
    }
}

TEST_CASE("k = 1 Hessian residual is the Laplacian residual") {
    const auto sol = radial_hessian_solution(5, 1, 5.0);
    const auto prof = sample_profile(sol, log_mesh(0.5, 2.0, 400));
    CHECK(hessian_radial_residual(prof, 5, 1, 5.0) == plap_radial_residual(prof, 5, 2.0, 5.0));
    // a wrong constant is detected
    auto bad = prof;
    for (auto& u : bad.u) u *= 1.01;
    CHECK(plap_radial_residual(bad, 5, 2.0, 5.0) / source_scale(bad, 5.0) > 1e-2);
}

TEST_CASE("Dirac closed form and brute quadrature") {
    const Params P = make_params(3, 1, 2, 3);
    CHECK(wolff_dirac_closed_form(P, 0.5, std::numeric_limits<double>::infinity()) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(wolff_dirac_closed_form(P, 1.0, 0.5) == 0.0);
    const Measure d = Measure::dirac(Point{0, 0, 0});
    double prev = std::numeric_limits<double>::infinity();
    for (int nodes : {16, 64, 512}) {
        const double err = std::abs(brute_wolff(d, Point{0.5, 0, 0}, P, std::numeric_limits<double>::infinity(), nodes).value - 2.0);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-5);
    CHECK_THROWS_AS(brute_wolff(d, Point{0.5, 0, 0}, P, 1.0, 4), ConfigError);
}

}
