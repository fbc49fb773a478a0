#pragma once

#include <span>
#include <string>
#include <vector>

#include "wolff/dyadic.hpp"
#include "wolff/measures.hpp"
#include "wolff/params.hpp"

namespace wolff {

/// Dyadic sums run over cubes of side 2^g_min ... 2^g_max.
struct GenerationWindow {
    int g_min = 0;
    int g_max = 0;

    GenerationWindow() = default;
    GenerationWindow(int lo, int hi);
    int count() const { return g_max - g_min + 1; }
};

enum class Divergence { none, at_zero, at_infinity };

/// A potential value; divergent integrals are reported as +inf with the cause.
struct PotentialValue {
    double value = 0.0;
    Divergence divergence = Divergence::none;

    bool finite() const { return divergence == Divergence::none; }
    std::string reason() const;
    static PotentialValue diverges(Divergence d);
};

PotentialValue operator+(PotentialValue a, PotentialValue b);

/// Sum of omega(Q) / |Q|^{1 - order/n} over the dyadic chain of x.
double dyadic_riesz(const Measure& mu, std::span<const double> x, double order, GenerationWindow w);

/// Sum of [mu(Q) / l(Q)^{n - alpha p}]^{1/(p-1)} over the dyadic chain of x.
double dyadic_wolff(const Measure& mu, std::span<const double> x, const Params& params, GenerationWindow w);

/// dyadic_wolff over the translated lattice shift + D.
double dyadic_wolff_shifted(const Measure& mu, std::span<const double> x, const Params& params,
                            GenerationWindow w, const ShiftedLattice& lattice);

/// Number of geometric t-nodes per decade used for density measures.
inline constexpr int kNodesPerDecade = 64;

/// int_{r_lo}^{r_hi} [mu(B_t(x)) / t^{n - kappa}]^{gamma} dt/t.
///
/// Point masses are integrated exactly between jump radii.  Density measures
/// use the exact small-ball law below the radius where the density is locally
/// constant, a geometric grid with the mass frozen at each subinterval's
/// geometric midpoint, and the total mass beyond the support.
PotentialValue truncated_potential(const Measure& mu, std::span<const double> x, double kappa,
                                   double gamma, double r_lo, double r_hi);

/// W^r_{alpha,p} mu(x); r may be +inf.
PotentialValue wolff_truncated(const Measure& mu, std::span<const double> x, const Params& params, double r);

/// I^r_order mu(x); r may be +inf.
PotentialValue riesz_truncated(const Measure& mu, std::span<const double> x, double order, double r);

struct WolffSplit {
    PotentialValue upper;  // U_r: int_0^r
    PotentialValue lower;  // L_r: int_r^inf
};

WolffSplit wolff_split(const Measure& mu, std::span<const double> x, const Params& params, double r);

}  // namespace wolff
