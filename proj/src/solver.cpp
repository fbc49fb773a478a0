#include "wolff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wolff/errors.hpp"

namespace wolff {

namespace {

void require_same_shape(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
        throw ConfigError("grid functions live on different grids");
    }
}

// Aligned-cube masses of g^q dx, level j = cubes of generation grid.generation + j.
std::vector<std::vector<double>> mass_pyramid(const GridFunction& g, double q) {
    const CellGrid& grid = g.grid;
    const int n = grid.dim();
    const int depth = grid.depth();
    std::vector<std::vector<double>> levels(static_cast<std::size_t>(depth) + 1);
    const double vol = grid.cell_volume();
    levels[0].resize(g.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < g.size(); ++i) levels[0][i] = std::pow(g.values[i], q) * vol;

    for (int j = 1; j <= depth; ++j) {
        const std::size_t m = static_cast<std::size_t>(grid.cells_per_side() >> j);
        const std::size_t m_fine = 2 * m;
        std::size_t count = 1;
        for (int d = 0; d < n; ++d) count *= m;
        levels[j].assign(count, 0.0);
        const auto& fine = levels[j - 1];
        auto& coarse = levels[j];
#pragma omp parallel for schedule(static)
        for (std::size_t c = 0; c < count; ++c) {
            // Base fine index of the first child.
            std::size_t rest = c;
            std::size_t base = 0;
            std::size_t stride = 1;
            for (int d = 0; d < n; ++d) {
                base += 2 * (rest % m) * stride;
                rest /= m;
                stride *= m_fine;
            }
            double s = 0.0;
            for (unsigned child = 0; child < (1u << n); ++child) {
                std::size_t offset = 0;
                std::size_t st = 1;
                for (int d = 0; d < n; ++d) {
                    offset += ((child >> d) & 1u) * st;
                    st *= m_fine;
                }
                s += fine[base + offset];
            }
            coarse[c] = s;
        }
    }
    return levels;
}

}  // namespace

GridFunction::GridFunction(CellGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.cell_count()) throw ConfigError("grid function: wrong number of cell values");
    for (double x : values)
        if (!(x >= 0.0)) throw ConfigError("grid function: values must be >= 0");
}

GridFunction GridFunction::zeros(const CellGrid& g) { return constant(g, 0.0); }

GridFunction GridFunction::constant(const CellGrid& g, double c) {
    return GridFunction(g, std::vector<double>(g.cell_count(), c));
}

GridFunction GridFunction::indicator(const CellGrid& g, std::size_t cell, double height) {
    GridFunction out = zeros(g);
    if (cell >= out.size()) throw ConfigError("indicator: cell index out of range");
    out.values[cell] = height;
    return out;
}

double GridFunction::sup() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, v);
    return s;
}

bool GridFunction::is_zero() const { return sup() == 0.0; }

CellDensityMeasure GridFunction::power_measure(double power) const {
    std::vector<double> v(values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(values[i], power);
    return CellDensityMeasure(grid, std::move(v));
}

GridFunction GridFunction::refined() const {
    const CellGrid fine = grid.refined();
    std::vector<double> v(fine.cell_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto local = fine.multi_index(i);
        for (auto& k : local) k >>= 1;
        v[i] = values[grid.linear_index(local)];
    }
    return GridFunction(fine, std::move(v));
}

GridFunction apply_N(const GridFunction& f, const Params& params, GenerationWindow w) {
    const CellGrid& grid = f.grid;
    const int n = grid.dim();
    const int gc = grid.generation;
    const int G = grid.box.generation;
    const double expo = 1.0 / (params.p - 1.0);
    const double ap = params.alpha_p();
    if (n > 16) throw ConfigError("apply_N: dimension above 16");
    const auto levels = mass_pyramid(f, params.q);

    // Chain terms from cubes at or above the box: their mass is the total mass.
    double above = 0.0;
    const double total = levels.back().front();
    if (total > 0.0) {
        for (int g = std::max(w.g_min, G + 1); g <= w.g_max; ++g)
            above += std::pow(total * std::pow(std::ldexp(1.0, g), ap - n), expo);
    }

    // Per-level term tables for cubes between the cell and box generations.
    const int j_lo = std::max(0, w.g_min - gc);
    const int j_hi = std::min(grid.depth(), w.g_max - gc);
    std::vector<std::vector<double>> terms(static_cast<std::size_t>(std::max(0, j_hi - j_lo + 1)));
    for (int j = j_lo; j <= j_hi; ++j) {
        const double scale = std::pow(std::ldexp(1.0, gc + j), ap - n);
        const auto& m = levels[j];
        auto& t = terms[j - j_lo];
        t.resize(m.size());
#pragma omp parallel for schedule(static)
        for (std::size_t c = 0; c < m.size(); ++c) t[c] = m[c] > 0.0 ? std::pow(m[c] * scale, expo) : 0.0;
    }

    GridFunction out = GridFunction::zeros(grid);
    const std::int64_t M = grid.cells_per_side();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        const double fq = levels[0][i] / grid.cell_volume();
        if (fq > 0.0) {
            for (int g = w.g_min; g <= std::min(w.g_max, gc - 1); ++g) {
                const double side = std::ldexp(1.0, g);
                s += std::pow(fq * std::pow(side, n) * std::pow(side, ap - n), expo);
            }
        }
        if (!terms.empty()) {
            // Multi-index of the cell, axis 0 fastest.
            std::int64_t local[16];
            std::size_t rest = i;
            for (int d = 0; d < n; ++d) {
                local[d] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(M));
                rest /= static_cast<std::size_t>(M);
            }
            for (int j = j_lo; j <= j_hi; ++j) {
                const std::int64_t m = M >> j;
                std::size_t c = 0;
                for (int d = n - 1; d >= 0; --d)
                    c = c * static_cast<std::size_t>(m) + static_cast<std::size_t>(local[d] >> j);
                s += terms[j - j_lo][c];
            }
        }
        out.values[i] = s + above;
    }
    return out;
}

GridFunction apply_N_reference(const GridFunction& f, const Params& params, GenerationWindow w) {
    const Measure omega = f.power_measure(params.q);
    GridFunction out = GridFunction::zeros(f.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = dyadic_wolff(omega, f.grid.cell_center(i), params, w);
    return out;
}

double residual(const GridFunction& u, const GridFunction& f, double eps, const Params& params,
                GenerationWindow w) {
    require_same_shape(u, f);
    const GridFunction Nu = apply_N(u, params, w);
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) r = std::max(r, std::abs(u.values[i] - Nu.values[i] - eps * f.values[i]));
    return r;
}

double pointwise_constant(const GridFunction& f, const Params& params, GenerationWindow w) {
    const GridFunction Nf = apply_N(f, params, w);
    const GridFunction N2f = apply_N(Nf, params, w);
    double C = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (Nf.values[i] > 0.0) C = std::max(C, N2f.values[i] / Nf.values[i]);
    return C;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::stagnated: return "stagnated";
        case SolveStatus::diverged: return "diverged";
    }
    return "unknown";
}

PicardResult picard_solve(const GridFunction& f, const Params& params, GenerationWindow w,
                          const PicardOptions& options) {
    params.require_global();
    if (!(options.tol > 0.0)) throw ConfigError("solver tolerance must be > 0");
    if (options.max_iter < 1) throw ConfigError("max_iter must be >= 1");

    PicardResult res{GridFunction::zeros(f.grid), {}};
    auto& cert = res.cert;
    cert.window = w;

    if (f.is_zero()) {
        cert.status = SolveStatus::converged;
        cert.iterations = 1;
        cert.note = "f = 0: the zero function is the solution";
        return res;
    }

    if (options.C) {
        if (!(*options.C >= 0.0)) throw ConfigError("C must be >= 0");
        cert.C = *options.C;
    } else {
        cert.C = options.safety * pointwise_constant(f, params, w);
        cert.C_estimated = true;
    }
    const IterationConstants ic = iteration_constants(params, cert.C);
    cert.x0 = ic.x0;
    if (options.eps) {
        if (!(*options.eps >= 0.0)) throw ConfigError("eps override must be >= 0");
        cert.eps = *options.eps;
        cert.bounds_checked = false;
    } else {
        if (ic.unconstrained()) throw ConfigError("pointwise constant C = 0 with nonzero f; supply eps");
        cert.eps = ic.eps;
    }
    const double eps = cert.eps;
    const double lower_coef = std::pow(eps, params.q / (params.p - 1.0));
    const GridFunction Nf = apply_N(f, params, w);
    const double slack = options.bound_slack;

    GridFunction& u = res.u;
    double c_prev = 0.0;  // c_k attached to the current u_k (u_0 has none)
    for (int k = 1; k <= options.max_iter; ++k) {
        GridFunction next = apply_N(u, params, w);
        const double c_k = k == 1 ? 0.0 : ic.majorant_map(c_prev);
        double r = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < next.size(); ++i) {
            double& v = next.values[i];
            v += eps * f.values[i];
            if (!std::isfinite(v)) finite = false;
            if (v < u.values[i]) cert.monotone = false;
            r = std::max(r, std::abs(v - u.values[i]));
            if (cert.bounds_checked) {
                const double major = c_k * Nf.values[i] + eps * f.values[i];
                if (v > major * (1.0 + slack)) cert.majorant_ok = false;
                if (v > (ic.x0 * Nf.values[i] + eps * f.values[i]) * (1.0 + slack)) cert.upper_ok = false;
                if (k >= 2 && v < (lower_coef * Nf.values[i] + eps * f.values[i]) * (1.0 - slack))
                    cert.lower_ok = false;
            }
        }
        cert.residual_history.push_back(r);

        // r is the residual of u = u_{k-1}.
        if (r <= options.tol) {
            cert.status = SolveStatus::converged;
            cert.iterations = k;
            cert.sup_residual = r;
            cert.majorant_coefficient = c_prev;
            break;
        }
        if (!finite || (cert.bounds_checked && !cert.upper_ok)) {
            cert.status = SolveStatus::diverged;
            cert.iterations = k;
            cert.sup_residual = r;
            cert.majorant_coefficient = c_k;
            cert.note = finite ? "iterate exceeded eps f + x0 N f: C was underestimated"
                               : "iterate overflowed";
            u = std::move(next);
            return res;
        }
        const auto& h = cert.residual_history;
        if (h.size() > 10 && h[h.size() - 11] - r < 1e-15 * std::max(1.0, next.sup())) {
            cert.status = SolveStatus::stagnated;
            cert.iterations = k;
            cert.sup_residual = r;
            cert.majorant_coefficient = c_prev;
            cert.note = "residual stopped decreasing";
            break;
        }
        u = std::move(next);
        c_prev = c_k;
        cert.iterations = k;
        cert.sup_residual = r;
        cert.majorant_coefficient = c_k;
    }
    if (cert.status == SolveStatus::max_iterations) cert.note = "iteration limit reached";

    // Two-sided bound on the returned iterate (the lower one needs at least two steps).
    if (cert.bounds_checked) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double ef = eps * f.values[i];
            if (u.values[i] > (ef + ic.x0 * Nf.values[i]) * (1.0 + slack)) cert.upper_ok = false;
            if (cert.iterations >= 3 && u.values[i] < (ef + lower_coef * Nf.values[i]) * (1.0 - slack))
                cert.lower_ok = false;
        }
    }
    return res;
}

}  // namespace wolff
