#include "wolff/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wolff/errors.hpp"
#include "wolff/kernels.hpp"

namespace wolff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_union(const std::vector<Box>& E, std::span<const double> x) {
    for (const auto& b : E)
        if (b.distance_to(x) == 0.0) return true;
    return false;
}

}  // namespace

CapacityIndices capacity_indices(const Params& params) {
    CapacityIndices c;
    c.order = params.alpha_p();
    c.s = params.q / (params.q - params.p + 1.0);
    c.kappa = c.order * c.s;
    c.gamma = 1.0 / (c.s - 1.0);
    return c;
}

CapacityEstimate riesz_capacity_lower(const std::vector<Box>& E, const Measure& trial, const Params& params,
                                      double R) {
    if (!(R > 0.0) || std::isinf(R)) throw ConfigError("capacity: R must be finite and > 0");
    const CapacityIndices ci = capacity_indices(params);
    CapacityEstimate out;
    out.trial_mass = trial.total_mass();

    std::vector<Point> support;
    if (const auto* pm = trial.points()) {
        for (const auto& a : pm->atoms())
            if (a.m > 0.0) support.push_back(a.x);
    } else if (const auto* cm = trial.cells()) {
        for (std::size_t i = 0; i < cm->values().size(); ++i)
            if (cm->values()[i] > 0.0) support.push_back(cm->grid().cell_center(i));
    } else {
        throw ConfigError("capacity: trial measure must be points or cells");
    }
    for (const auto& x : support)
        if (!in_union(E, x)) throw ConfigError("capacity: trial measure not supported in E");
    out.samples = support.size();
    if (support.empty()) {
        out.note = "zero trial measure";
        return out;
    }

    const auto w = truncated_at_points(trial, support, ci.kappa, ci.gamma, 0.0, 4.0 * R);
    for (const auto& v : w) out.max_potential = std::max(out.max_potential, v.value);
    if (std::isinf(out.max_potential)) {
        out.note = "atoms have zero capacity contribution";
        return out;
    }
    out.value = out.trial_mass / std::pow(out.max_potential, ci.s - 1.0);
    out.note = "dual lower bound; the potential is sampled on the trial support only";
    return out;
}

EnergyEstimate bessel_energy(const Measure& mu, const Params& params, double R, int cell_generation) {
    if (!(R > 0.0) || std::isinf(R)) throw ConfigError("bessel_energy: R must be finite and > 0");
    const double order = params.alpha_p();
    const double power = params.q / (params.p - 1.0);
    EnergyEstimate out;
    if (mu.is_zero()) return out;
    const auto support = mu.support_box();
    if (!support) throw ConfigError("bessel_energy: unbounded support");
    const int n = mu.dim();
    if (mu.points() && (n - order) * power >= n) {
        out.value = kInf;
        out.divergence = "atom: (I delta)^{q/(p-1)} ~ |y|^{-(n-ap)q/(p-1)} is not integrable";
        return out;
    }

    Box region = *support;
    for (int i = 0; i < n; ++i) {
        region.lo[i] -= 2.0 * R;
        region.hi[i] += 2.0 * R;
    }
    const DyadicCube first = cube_containing(region.lo, cell_generation);
    const DyadicCube last = cube_containing(region.hi, cell_generation);
    double cells = 1.0;
    for (int i = 0; i < n; ++i) cells *= static_cast<double>(last.index[i] - first.index[i] + 1);
    if (cells > 4194304.0) throw ConfigError("bessel_energy: more than 2^22 cells; use a coarser generation");

    std::vector<Point> xs;
    xs.reserve(static_cast<std::size_t>(cells));
    std::vector<std::int64_t> idx = first.index;
    while (true) {
        xs.push_back(DyadicCube{cell_generation, idx}.center());
        int axis = 0;
        while (axis < n) {
            if (++idx[axis] <= last.index[axis]) break;
            idx[axis] = first.index[axis];
            ++axis;
        }
        if (axis == n) break;
    }
    const auto w = truncated_at_points(mu, xs, order, 1.0, 0.0, 2.0 * R);
    const double vol = std::ldexp(1.0, cell_generation * n);
    double s = 0.0;
    for (const auto& v : w) {
        if (!v.finite()) {
            out.value = kInf;
            out.divergence = "potential infinite at a cell centre";
            return out;
        }
        s += std::pow(v.value, power);
    }
    out.value = s * vol;
    out.cells = xs.size();
    return out;
}

VerifierReport capacity_scaling_check(const Params& params, const std::vector<double>& lambdas, int cell_depth) {
    const double expected = params.growth_exponent();
    if (!(expected > 0.0)) throw RegimeError("capacity scaling needs alpha p q/(q-p+1) < n");
    if (lambdas.size() < 3) throw ConfigError("need >= 3 scales");
    if (cell_depth < 0) throw ConfigError("cell_depth must be >= 0");
    const int n = params.n;

    VerifierReport rep;
    rep.name = "capacity_scaling_check";
    std::ostringstream fam;
    fam << lambdas.size() << " dilations of [0,1)^n, uniform trial on 2^" << cell_depth
        << " cells per side, R = lambda";
    rep.family = fam.str();

    std::vector<double> xs, ys;
    for (double lambda : lambdas) {
        int k = 0;
        const double mant = std::frexp(lambda, &k);
        if (!(lambda > 0.0) || mant != 0.5) throw ConfigError("capacity scaling: lambdas must be powers of two");
        const int g = k - 1;
        const DyadicCube cube{g, std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)};
        const CellGrid grid(cube, g - cell_depth);
        const CellDensityMeasure trial(grid, std::vector<double>(grid.cell_count(), 1.0));
        const auto est = riesz_capacity_lower({cube.box()}, trial, params, lambda);
        xs.push_back(std::log(lambda));
        ys.push_back(std::log(est.value));
        rep.values.emplace_back("capacity_lambda_" + std::to_string(g), est.value);
    }
    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = m * sxx - sx * sx;
    if (!(denom > 0.0)) throw ConfigError("capacity scaling: need distinct scales");
    const double slope = (m * sxy - sx * sy) / denom;
    rep.values.insert(rep.values.begin(), {{"slope", slope}, {"expected", expected}});
    rep.best_constant = std::abs(slope - expected);
    rep.samples = xs.size();
    rep.note = "best_constant is |slope - expected|";
    return rep;
}

}  // namespace wolff
