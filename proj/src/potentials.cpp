#include "wolff/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wolff/errors.hpp"

namespace wolff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_a^b t^{-e-1} dt for 0 <= a < b <= inf; +inf when the integral diverges.
double power_integral(double e, double a, double b) {
    if (!(b > a)) return 0.0;
    if (a == 0.0 && e >= 0.0) return kInf;
    if (std::isinf(b) && e <= 0.0) return kInf;
    if (e == 0.0) return std::log(b / a);
    if (std::isinf(b)) return std::pow(a, -e) / e;
    if (a == 0.0) return std::pow(b, -e) / -e;
    // a^{-e} (1 - (a/b)^e) / e without cancellation when b is close to a.
    return -std::pow(a, -e) * std::expm1(e * std::log(a / b)) / e;
}

struct Kernel {
    int n;
    double kappa;
    double gamma;
    double e() const { return (n - kappa) * gamma; }

    // Contribution of [a, b) on which mu(B_t) = mass.
    PotentialValue piece(double mass, double a, double b) const {
        if (mass <= 0.0 || !(b > a)) return {};
        const double v = power_integral(e(), a, b);
        if (std::isinf(v)) return PotentialValue::diverges(a == 0.0 ? Divergence::at_zero : Divergence::at_infinity);
        return {std::pow(mass, gamma) * v, Divergence::none};
    }

    // Contribution of [a, b) on which mu(B_t) = c t^s.
    PotentialValue power_piece(double c, double s, double a, double b) const {
        if (c <= 0.0 || !(b > a)) return {};
        // integrand c^gamma t^{s gamma - e - 1}
        const double v = power_integral(e() - s * gamma, a, b);
        if (std::isinf(v)) return PotentialValue::diverges(a == 0.0 ? Divergence::at_zero : Divergence::at_infinity);
        return {std::pow(c, gamma) * v, Divergence::none};
    }
};

PotentialValue point_potential(const PointMassMeasure& pm, std::span<const double> x, const Kernel& k,
                               double r_lo, double r_hi) {
    std::vector<std::pair<double, double>> jumps;
    jumps.reserve(pm.atoms().size());
    for (const auto& a : pm.atoms())
        if (a.m > 0.0) jumps.emplace_back(distance(a.x, x), a.m);
    std::sort(jumps.begin(), jumps.end());

    PotentialValue total;
    double mass = 0.0;
    for (std::size_t j = 0; j < jumps.size(); ++j) {
        mass += jumps[j].second;
        const double start = jumps[j].first;
        const double end = j + 1 < jumps.size() ? jumps[j + 1].first : kInf;
        total = total + k.piece(mass, std::max(start, r_lo), std::min(end, r_hi));
    }
    return total;
}

// Exact law for a radial power measure centred at x.
PotentialValue centered_radial_potential(const RadialPowerMeasure& rm, const Kernel& k, double r_lo,
                                         double r_hi) {
    const int n = rm.dim();
    const double s = n - rm.gamma();
    const double c = rm.amplitude() * unit_sphere_area(n) / s;
    PotentialValue total = k.power_piece(c, s, r_lo, std::min(r_hi, rm.outer_radius()));
    if (rm.bounded()) total = total + k.piece(rm.total_mass(), std::max(r_lo, rm.outer_radius()), r_hi);
    return total;
}

struct DensityLocal {
    double flat_radius;  // mu(B_t) = rho |B_t| for t <= flat_radius
    double rho;
    double support_radius;  // mu(B_t) = total for t >= support_radius
    double scale;
};

PotentialValue density_potential(const Measure& mu, std::span<const double> x, const Kernel& k,
                                 DensityLocal loc, double r_lo, double r_hi) {
    const int n = mu.dim();
    const double vol = unit_ball_volume(n);
    double t0 = loc.flat_radius;
    double c = loc.rho * vol;
    if (!(t0 > 0.0)) {
        // x on a density discontinuity: freeze the small-ball law at a tiny radius.
        t0 = std::ldexp(loc.scale, -30);
        c = mu.mass_ball(x, t0) / std::pow(t0, n);
    }
    const double total_mass = mu.total_mass();
    const double T = std::max(loc.support_radius, t0);

    PotentialValue total = k.power_piece(c, n, r_lo, std::min(r_hi, t0));

    const double lo = std::max(r_lo, t0);
    const double hi = std::min(r_hi, T);
    if (hi > lo) {
        const double ratio = std::pow(10.0, 1.0 / kNodesPerDecade);
        std::vector<double> edges{lo};
        while (edges.back() < hi) edges.push_back(std::min(hi, edges.back() * ratio));
        std::vector<double> mids(edges.size() - 1);
        for (std::size_t j = 0; j < mids.size(); ++j) mids[j] = std::sqrt(edges[j] * edges[j + 1]);
        std::vector<double> masses;
        if (const auto* cm = mu.cells()) {
            masses = cm->mass_balls(x, mids);
        } else {
            masses.resize(mids.size());
            for (std::size_t j = 0; j < mids.size(); ++j) masses[j] = mu.mass_ball(x, mids[j]);
        }
        for (std::size_t j = 0; j < mids.size(); ++j) total = total + k.piece(masses[j], edges[j], edges[j + 1]);
    }
    total = total + k.piece(total_mass, std::max(r_lo, T), r_hi);
    return total;
}

}  // namespace

GenerationWindow::GenerationWindow(int lo, int hi) : g_min(lo), g_max(hi) {
    if (lo > hi) throw ConfigError("generation window: g_min > g_max");
}

std::string PotentialValue::reason() const {
    switch (divergence) {
        case Divergence::none: return "";
        case Divergence::at_zero: return "integral diverges as t -> 0";
        case Divergence::at_infinity: return "integral diverges as t -> infinity";
    }
    return "";
}

PotentialValue PotentialValue::diverges(Divergence d) { return {kInf, d}; }

PotentialValue operator+(PotentialValue a, PotentialValue b) {
    if (!a.finite()) return a;
    if (!b.finite()) return b;
    return {a.value + b.value, Divergence::none};
}

double dyadic_riesz(const Measure& mu, std::span<const double> x, double order, GenerationWindow w) {
    const int n = mu.dim();
    DyadicCube q = cube_containing(x, w.g_min);
    double s = 0.0;
    for (int g = w.g_min; g <= w.g_max; ++g) {
        if (g > w.g_min) q = q.ancestor(g);
        const double m = mu.mass_cube(q);
        if (m > 0.0) s += m * std::pow(q.side(), order - n);
    }
    return s;
}

double dyadic_wolff(const Measure& mu, std::span<const double> x, const Params& params, GenerationWindow w) {
    const int n = mu.dim();
    const double expo = 1.0 / (params.p - 1.0);
    DyadicCube q = cube_containing(x, w.g_min);
    double s = 0.0;
    for (int g = w.g_min; g <= w.g_max; ++g) {
        if (g > w.g_min) q = q.ancestor(g);
        const double m = mu.mass_cube(q);
        if (m > 0.0) s += std::pow(m * std::pow(q.side(), params.alpha_p() - n), expo);
    }
    return s;
}

double dyadic_wolff_shifted(const Measure& mu, std::span<const double> x, const Params& params,
                            GenerationWindow w, const ShiftedLattice& lattice) {
    const int n = mu.dim();
    const double expo = 1.0 / (params.p - 1.0);
    double s = 0.0;
    for (int g = w.g_min; g <= w.g_max; ++g) {
        const Box b = lattice.cube_box(x, g);
        const double m = mu.mass_box(b);
        if (m > 0.0) s += std::pow(m * std::pow(std::ldexp(1.0, g), params.alpha_p() - n), expo);
    }
    return s;
}

PotentialValue truncated_potential(const Measure& mu, std::span<const double> x, double kappa,
                                   double gamma, double r_lo, double r_hi) {
    if (!(r_lo >= 0.0) || !(r_hi > 0.0)) throw ConfigError("truncation radius must be > 0");
    if (static_cast<int>(x.size()) != mu.dim()) throw ConfigError("evaluation point dimension mismatch");
    const Kernel k{mu.dim(), kappa, gamma};
    if (!(r_hi > r_lo) || mu.is_zero()) return {};

    if (const auto* pm = mu.points()) return point_potential(*pm, x, k, r_lo, r_hi);

    if (const auto* cm = mu.cells()) {
        const Box box = cm->grid().box.box();
        const DensityLocal loc{cm->uniform_radius(x), cm->density_at(x), box.farthest_from(x),
                               cm->grid().cell_side()};
        return density_potential(mu, x, k, loc, r_lo, r_hi);
    }

    const auto* rm = mu.radial();
    const double d = distance(rm->center(), x);
    if (d == 0.0) return centered_radial_potential(*rm, k, r_lo, r_hi);
    if (!rm->bounded()) {
        if (std::isinf(r_hi)) throw ConfigError("r = inf with an unbounded off-centre density");
        DensityLocal loc{1e-4 * d, rm->density_at(x), kInf, d};
        return density_potential(mu, x, k, loc, r_lo, r_hi);
    }
    const double R = rm->outer_radius();
    DensityLocal loc{0.0, 0.0, d + R, std::min(d, R)};
    if (d > R) {
        loc.flat_radius = d - R;
    } else if (d < R) {
        loc.flat_radius = 1e-4 * std::min(d, R - d);
        loc.rho = rm->density_at(x);
    }
    return density_potential(mu, x, k, loc, r_lo, r_hi);
}

PotentialValue wolff_truncated(const Measure& mu, std::span<const double> x, const Params& params, double r) {
    return truncated_potential(mu, x, params.alpha_p(), 1.0 / (params.p - 1.0), 0.0, r);
}

PotentialValue riesz_truncated(const Measure& mu, std::span<const double> x, double order, double r) {
    if (!(order > 0.0)) throw ConfigError("Riesz order must be > 0");
    return truncated_potential(mu, x, order, 1.0, 0.0, r);
}

WolffSplit wolff_split(const Measure& mu, std::span<const double> x, const Params& params, double r) {
    if (!(r > 0.0) || std::isinf(r)) throw ConfigError("split radius must be finite and > 0");
    const double gamma = 1.0 / (params.p - 1.0);
    return {truncated_potential(mu, x, params.alpha_p(), gamma, 0.0, r),
            truncated_potential(mu, x, params.alpha_p(), gamma, r, kInf)};
}

}  // namespace wolff
