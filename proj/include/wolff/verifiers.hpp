#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wolff/dyadic.hpp"
#include "wolff/measures.hpp"
#include "wolff/params.hpp"
#include "wolff/potentials.hpp"
#include "wolff/solver.hpp"

namespace wolff {

/// The set or point at which a verifier attained its best constant.
struct Witness {
    enum class Kind { none, cube, ball, point, point_radius, cube_pair };
    Kind kind = Kind::none;
    DyadicCube cube;
    DyadicCube other;   // second cube (test function support) for cube_pair
    Ball ball;
    Point point;
    double radius = 0.0;
    std::size_t index = 0;  // position in the supplied family
};

/// Best empirical constant of an inequality over a finite family of sets.
struct VerifierReport {
    std::string name;
    double best_constant = 0.0;  // +inf when the left side diverges
    std::string divergence;      // reason, set iff best_constant is +inf
    Witness witness;
    std::size_t samples = 0;
    std::size_t skipped = 0;     // members with zero mass on the right side
    bool vacuous = false;
    std::optional<bool> passed;
    std::string family;
    std::string note;
    std::vector<std::pair<std::string, double>> values;  // secondary quantities

    bool divergent() const { return !divergence.empty(); }
    /// Records passed = (best_constant <= threshold).
    void check_against(double threshold);
    double value(const std::string& key) const;  // NaN when absent
};

struct ChainIntegrals {
    double A1 = 0.0;  // sum_{Q in P} [mu(Q)/|Q|^{1-ap/n}]^{q/(p-1)} |Q|
    double A2 = 0.0;  // int_P [sum_Q (mu(Q)/|Q|^{1-ap/n})^{1/(p-1)} chi_Q]^q dx
    double A3 = 0.0;  // int_P [sum_Q mu(Q)/|Q|^{1-ap/n} chi_Q]^{q/(p-1)} dx
};

/// Sums over the dyadic subcubes of P down to `depth` generations below P.
/// The integrands are constant on the finest cubes, so A2 and A3 are exact.
ChainIntegrals equivalence_A123(const Measure& mu, const DyadicCube& P, const Params& params, int depth);

/// All dyadic subcubes of `box` down to `depth` generations below it.
std::vector<DyadicCube> dyadic_family(const DyadicCube& box, int depth);
/// Balls centred at the cell centres of a `per_side`^n grid over `box` with the given radii.
std::vector<Ball> ball_family(const Box& box, int per_side, const std::vector<double>& radii);

/// max_P A3(P)/omega(P) (Riesz form); the Wolff form A2/omega(P) is reported as "testing2".
VerifierReport testing_inequality_dyadic(const Measure& omega, const std::vector<DyadicCube>& cubes,
                                         const Params& params, int depth);

/// max_B int_B [W^r omega_B]^q dx / omega(B) by cell-centre quadrature at 2^levels cells per
/// diameter, repeated one level finer; a tenfold jump under refinement reports divergence.
/// levels < 0 selects floor(12/n).
VerifierReport testing_inequality_balls(const Measure& omega, const std::vector<Ball>& balls,
                                        const Params& params, double r, int levels = -1);

/// max_x W^r(nu)(x) / W^r(omega)(x) with d nu = (W^r omega)^q dx realised on `grid`.
VerifierReport pointwise_condition(const Measure& omega, const std::vector<Point>& xs, const Params& params,
                                   double r, const std::optional<CellGrid>& grid, bool refine = true);

/// sup omega(B_t(x)) / t^{n - ap q/(q-p+1)} over geometric t in [t_min, t_max].
VerifierReport frostman_ratio(const Measure& omega, const std::vector<Point>& xs, double t_min, double t_max,
                              const Params& params, int nodes_per_octave = 8);

/// max_B int_B f^{1+delta} dx / R^{n - (1+delta) ap q/(q-p+1)}.
VerifierReport fefferman_phong(const CellDensityMeasure& f, double delta, const std::vector<Ball>& balls,
                               const Params& params);

/// max_B int_B u^q dx / R^{n - ap q/(q-p+1)}; needs the supercritical regime.
VerifierReport local_integral_estimate(const GridFunction& u, const std::vector<Ball>& balls,
                                       const Params& params);

/// max_r int_{B_r} u^q dx / (log(2R/r))^{(1-p)/(q-p+1)} for r < R; needs q = q*.
VerifierReport local_integral_estimate_critical(const GridFunction& u, const Ball& outer,
                                                const std::vector<double>& radii, const Params& params);

/// Dyadic Carleson embedding with f = indicators of the supplied subcubes of P.
/// The premise max_{P' in P} sum_{Q in P'} mu(Q)^{q/(p-1)} / mu(P') is reported as "premise".
VerifierReport carleson_embedding_check(const Measure& mu, const DyadicCube& P,
                                        const std::vector<DyadicCube>& f_cubes, const Params& params,
                                        int depth);

}  // namespace wolff
