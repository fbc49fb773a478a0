#include "wolff/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wolff/errors.hpp"
#include "wolff/kernels.hpp"

namespace wolff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// A constant that grows tenfold under one refinement step is reported as divergent.
constexpr double kDivergenceJump = 10.0;

// Index of the largest non-NaN entry (first one on ties); nullopt if all are NaN.
std::optional<std::size_t> argmax(const std::vector<double>& v) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i])) continue;
        if (!best || v[i] > v[*best]) best = i;
    }
    return best;
}

void check_depth(int n, int depth) {
    if (depth < 0) throw ConfigError("descent depth must be >= 0");
    if (static_cast<long>(n) * depth > 24) throw ConfigError("descent depth too large (more than 2^24 leaves)");
}

bool has_atoms(const Measure& mu) {
    if (const auto* pm = mu.points())
        for (const auto& a : pm->atoms())
            if (a.m > 0.0) return true;
    return false;
}

std::string describe_cubes(const std::vector<DyadicCube>& cubes) {
    if (cubes.empty()) return "no cubes";
    int lo = cubes.front().generation, hi = lo;
    for (const auto& q : cubes) {
        lo = std::min(lo, q.generation);
        hi = std::max(hi, q.generation);
    }
    std::ostringstream os;
    os << cubes.size() << " dyadic cubes, generations " << lo << ".." << hi;
    return os.str();
}

std::string describe_balls(const std::vector<Ball>& balls) {
    std::ostringstream os;
    os << balls.size() << " balls";
    if (!balls.empty()) {
        double lo = kInf, hi = 0.0;
        for (const auto& b : balls) {
            lo = std::min(lo, b.radius);
            hi = std::max(hi, b.radius);
        }
        os << ", radii " << lo << ".." << hi;
    }
    return os.str();
}

// int_B [W^r mu]^q dx by the cell-centre rule on a (2^level)^n grid over the bounding cube.
double ball_quadrature(const Measure& mu, const Ball& b, const Params& params, double r, int level) {
    const int n = b.dim();
    const std::int64_t per = std::int64_t{1} << level;
    const double h = 2.0 * b.radius / static_cast<double>(per);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per);
    std::vector<Point> xs;
    Point y(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rest = k;
        for (int i = 0; i < n; ++i) {
            y[i] = b.center[i] - b.radius + (static_cast<double>(rest % per) + 0.5) * h;
            rest /= per;
        }
        if (b.contains(y)) xs.push_back(y);
    }
    const auto w = wolff_at_points(mu, xs, params, r);
    double s = 0.0;
    for (const auto& v : w) {
        if (!v.finite()) return kInf;
        s += std::pow(v.value, params.q);
    }
    return s * std::pow(h, n);
}

// Cell values (mean over the 2^n sub-cell centres) of (W^r omega)^q.
CellDensityMeasure realize_nu(const Measure& omega, const CellGrid& grid, const Params& params, double r) {
    const int n = grid.dim();
    const std::size_t sub = std::size_t{1} << n;
    std::vector<Point> xs;
    xs.reserve(grid.cell_count() * sub);
    const double quarter = 0.25 * grid.cell_side();
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const Point ctr = grid.cell_center(c);
        for (std::size_t j = 0; j < sub; ++j) {
            Point y = ctr;
            for (int i = 0; i < n; ++i) y[i] += ((j >> i) & 1u) ? quarter : -quarter;
            xs.push_back(std::move(y));
        }
    }
    const auto w = wolff_at_points(omega, xs, params, r);
    std::vector<double> values(grid.cell_count(), 0.0);
    for (std::size_t c = 0; c < values.size(); ++c) {
        double s = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < sub; ++j) {
            const auto& v = w[c * sub + j];
            if (!v.finite()) continue;
            s += std::pow(v.value, params.q);
            ++count;
        }
        values[c] = count > 0 ? s / static_cast<double>(count) : 0.0;
    }
    return CellDensityMeasure(grid, std::move(values));
}

}  // namespace

void VerifierReport::check_against(double threshold) { passed = best_constant <= threshold; }

double VerifierReport::value(const std::string& key) const {
    for (const auto& [k, v] : values)
        if (k == key) return v;
    return kNaN;
}

// --- dyadic sums ---------------------------------------------------------

ChainIntegrals equivalence_A123(const Measure& mu, const DyadicCube& P, const Params& params, int depth) {
    check_depth(P.dim(), depth);
    const double s = params.q / (params.p - 1.0);
    const double g = 1.0 / (params.p - 1.0);
    const double expo = 1.0 - params.alpha_p() / P.dim();
    ChainIntegrals out;
    auto visit = [&](auto&& self, const DyadicCube& Q, int level, double acc_riesz, double acc_wolff) -> void {
        const double m = mu.mass_cube(Q);
        const double vol = Q.volume();
        if (m > 0.0) {
            const double a = m / std::pow(vol, expo);
            acc_riesz += a;
            acc_wolff += std::pow(a, g);
            out.A1 += std::pow(a, s) * vol;
        }
        if (level == depth || m == 0.0) {
            out.A2 += std::pow(acc_wolff, params.q) * vol;
            out.A3 += std::pow(acc_riesz, s) * vol;
            return;
        }
        for (unsigned j = 0; j < (1u << P.dim()); ++j) self(self, Q.child(j), level + 1, acc_riesz, acc_wolff);
    };
    visit(visit, P, 0, 0.0, 0.0);
    return out;
}

std::vector<DyadicCube> dyadic_family(const DyadicCube& box, int depth) {
    check_depth(box.dim(), depth);
    std::vector<DyadicCube> out{box};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (box.generation - out[i].generation >= depth) continue;
        for (unsigned j = 0; j < (1u << box.dim()); ++j) out.push_back(out[i].child(j));
    }
    return out;
}

std::vector<Ball> ball_family(const Box& box, int per_side, const std::vector<double>& radii) {
    if (per_side < 1) throw ConfigError("ball family: per_side must be >= 1");
    const int n = box.dim();
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_side);
    std::vector<Ball> out;
    for (std::size_t k = 0; k < total; ++k) {
        Point c(static_cast<std::size_t>(n));
        std::size_t rest = k;
        for (int i = 0; i < n; ++i) {
            const double h = (box.hi[i] - box.lo[i]) / per_side;
            c[i] = box.lo[i] + (static_cast<double>(rest % per_side) + 0.5) * h;
            rest /= per_side;
        }
        for (double r : radii) out.push_back(Ball{c, r});
    }
    return out;
}

VerifierReport testing_inequality_dyadic(const Measure& omega, const std::vector<DyadicCube>& cubes,
                                         const Params& params, int depth) {
    VerifierReport rep;
    rep.name = "testing_inequality_dyadic";
    std::ostringstream fam;
    fam << describe_cubes(cubes) << ", descent depth " << depth;
    rep.family = fam.str();
    std::vector<double> t1(cubes.size(), kNaN), t2(cubes.size(), kNaN);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        const double m = omega.mass_cube(cubes[i]);
        if (!(m > 0.0)) continue;
        const auto A = equivalence_A123(omega, cubes[i], params, depth);
        t1[i] = A.A3 / m;
        t2[i] = A.A2 / m;
    }
    for (double v : t1) (std::isnan(v) ? rep.skipped : rep.samples) += 1;
    const auto b1 = argmax(t1);
    const auto b2 = argmax(t2);
    if (!b1) {
        rep.vacuous = true;
        rep.note = "vacuous: omega(P) = 0 for every cube";
        rep.values = {{"testing2", 0.0}};
        return rep;
    }
    rep.best_constant = t1[*b1];
    rep.witness.kind = Witness::Kind::cube;
    rep.witness.cube = cubes[*b1];
    rep.witness.index = *b1;
    rep.values = {{"testing2", t2[*b2]}};
    return rep;
}

// --- ball testing inequality --------------------------------------------------

VerifierReport testing_inequality_balls(const Measure& omega, const std::vector<Ball>& balls,
                                        const Params& params, double r, int levels) {
    if (std::isinf(r)) params.require_global();
    const int n = omega.dim();
    if (levels < 0) levels = std::max(1, 12 / n);
    VerifierReport rep;
    rep.name = "testing_inequality_balls";
    std::ostringstream fam;
    fam << describe_balls(balls) << ", cell-centre quadrature at 2^" << levels << " and 2^" << levels + 1
        << " cells per diameter, r = " << r;
    rep.family = fam.str();
    const double beta = params.dirac_decay();

    std::vector<double> ratio(balls.size(), kNaN);
    std::vector<std::string> reason(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) {
        const Measure wb = restrict(omega, balls[i]);
        const double m = wb.total_mass();
        if (!(m > 0.0)) continue;
        if (has_atoms(wb) && beta * params.q >= n) {
            ratio[i] = kInf;
            reason[i] = "atom in the ball: (W delta)^q ~ |y|^{-beta q} with beta q >= n is not integrable";
            continue;
        }
        const double coarse = ball_quadrature(wb, balls[i], params, r, levels) / m;
        const double fine = ball_quadrature(wb, balls[i], params, r, levels + 1) / m;
        if (!std::isfinite(fine) || (coarse > 0.0 && fine >= kDivergenceJump * coarse)) {
            ratio[i] = kInf;
            reason[i] = "constant grew tenfold under quadrature refinement";
            continue;
        }
        ratio[i] = fine;
    }
    for (double v : ratio) (std::isnan(v) ? rep.skipped : rep.samples) += 1;
    const auto best = argmax(ratio);
    if (!best) {
        rep.vacuous = true;
        rep.note = "vacuous: omega(B) = 0 for every ball";
        return rep;
    }
    rep.best_constant = ratio[*best];
    rep.divergence = reason[*best];
    rep.witness.kind = Witness::Kind::ball;
    rep.witness.ball = balls[*best];
    rep.witness.index = *best;
    return rep;
}

// --- pointwise condition -------------------------------------------------------

VerifierReport pointwise_condition(const Measure& omega, const std::vector<Point>& xs, const Params& params,
                                   double r, const std::optional<CellGrid>& grid, bool refine) {
    if (xs.empty()) throw ConfigError("pointwise condition: no evaluation points");
    if (std::isinf(r)) params.require_global();
    const int n = omega.dim();
    VerifierReport rep;
    rep.name = "pointwise_condition";
    std::ostringstream fam;
    fam << xs.size() << " points, r = " << r;
    if (grid) fam << ", nu on cells of generation " << grid->generation << " in a box of generation "
                  << grid->box.generation << (refine ? " (and one finer)" : "");
    rep.family = fam.str();

    if (omega.is_zero()) {
        rep.vacuous = true;
        rep.note = "vacuous: omega = 0";
        return rep;
    }
    const double beta = params.dirac_decay();
    const double bq = beta * params.q;
    rep.values = {{"beta_q", bq}};
    auto diverge = [&](std::string why) {
        rep.best_constant = kInf;
        rep.divergence = std::move(why);
        rep.samples = xs.size();
        rep.witness.kind = Witness::Kind::point;
        rep.witness.point = xs.front();
        return rep;
    };
    if (has_atoms(omega) && bq >= n) {
        return diverge("atom: (W omega)^q ~ |y|^{-beta q} near the atom with beta q >= n, so nu is not locally finite");
    }
    if (std::isinf(r) && bq <= params.alpha_p()) {
        return diverge("(W omega)^q ~ |y|^{-beta q} at infinity with beta q <= alpha p: W nu diverges as t -> infinity");
    }
    if (!grid) throw ConfigError("pointwise condition: a cell grid for nu is required");

    const auto den = wolff_at_points(omega, xs, params, r);
    auto evaluate = [&](const CellGrid& g, std::vector<double>& ratio) {
        const Measure nu = realize_nu(omega, g, params, r);
        const auto num = wolff_at_points(nu, xs, params, r);
        ratio.assign(xs.size(), kNaN);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!den[i].finite() || !(den[i].value > 0.0)) continue;
            ratio[i] = num[i].finite() ? num[i].value / den[i].value : kInf;
        }
    };
    std::vector<double> ratio;
    evaluate(*grid, ratio);
    if (refine) {
        std::vector<double> fine;
        evaluate(grid->refined(), fine);
        const auto bc = argmax(ratio);
        const auto bf = argmax(fine);
        if (bc && bf) {
            rep.values.emplace_back("coarse_constant", ratio[*bc]);
            if (ratio[*bc] > 0.0 && fine[*bf] >= kDivergenceJump * ratio[*bc])
                rep.divergence = "constant grew tenfold under grid refinement";
        }
        ratio = fine;
    }
    for (double v : ratio) (std::isnan(v) ? rep.skipped : rep.samples) += 1;
    const auto best = argmax(ratio);
    if (!best) {
        rep.vacuous = true;
        rep.note = "vacuous: W omega = 0 or infinite at every point";
        return rep;
    }
    rep.best_constant = rep.divergent() ? kInf : ratio[*best];
    if (std::isinf(ratio[*best]) && rep.divergence.empty()) rep.divergence = "W nu diverges at the witness";
    rep.witness.kind = Witness::Kind::point;
    rep.witness.point = xs[*best];
    rep.witness.index = *best;
    rep.note = "nu is truncated to the grid box";
    return rep;
}

// --- growth conditions ---------------------------------------------------------

VerifierReport frostman_ratio(const Measure& omega, const std::vector<Point>& xs, double t_min, double t_max,
                              const Params& params, int nodes_per_octave) {
    if (!(t_min > 0.0) || !(t_max >= t_min)) throw ConfigError("frostman: need 0 < t_min <= t_max");
    if (nodes_per_octave < 1) throw ConfigError("frostman: nodes_per_octave must be >= 1");
    VerifierReport rep;
    rep.name = "frostman_ratio";
    const double g = params.growth_exponent();
    rep.values = {{"exponent", g}};
    if (g <= 0.0) rep.note = "Liouville regime: only omega = 0 passes";

    std::vector<double> ts;
    const int steps = static_cast<int>(std::ceil(std::log2(t_max / t_min) * nodes_per_octave - 1e-9));
    for (int j = 0; j <= steps; ++j) ts.push_back(std::min(t_max, t_min * std::exp2(static_cast<double>(j) / nodes_per_octave)));
    std::ostringstream fam;
    fam << xs.size() << " points x " << ts.size() << " radii in [" << t_min << ", " << t_max << "]";
    rep.family = fam.str();

    std::vector<double> ratio(xs.size() * ts.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ts.size(); ++j)
            ratio[i * ts.size() + j] = omega.mass_ball(xs[i], ts[j]) / std::pow(ts[j], g);
    rep.samples = ratio.size();
    const auto best = argmax(ratio);
    if (!best) return rep;
    rep.best_constant = ratio[*best];
    rep.vacuous = omega.is_zero();
    rep.witness.kind = Witness::Kind::point_radius;
    rep.witness.point = xs[*best / ts.size()];
    rep.witness.radius = ts[*best % ts.size()];
    rep.witness.index = *best;
    double lo = kInf;
    for (double v : ratio) lo = std::min(lo, v);
    rep.values.emplace_back("min_ratio", lo);
    return rep;
}

VerifierReport fefferman_phong(const CellDensityMeasure& f, double delta, const std::vector<Ball>& balls,
                               const Params& params) {
    if (!(delta > 0.0)) throw ConfigError("fefferman_phong: delta must be > 0");
    VerifierReport rep;
    rep.name = "fefferman_phong";
    rep.family = describe_balls(balls);
    const double e = f.dim() - (1.0 + delta) * params.alpha_p() * params.q / (params.q - params.p + 1.0);
    rep.values = {{"exponent", e}, {"delta", delta}};
    std::vector<double> v = f.values();
    for (auto& x : v) x = std::pow(x, 1.0 + delta);
    const CellDensityMeasure g(f.grid(), std::move(v), f.leaf_depth());
    std::vector<double> ratio(balls.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < balls.size(); ++i)
        ratio[i] = g.mass_ball(balls[i].center, balls[i].radius) / std::pow(balls[i].radius, e);
    rep.samples = ratio.size();
    const auto best = argmax(ratio);
    if (!best) return rep;
    rep.vacuous = g.total_mass() == 0.0;
    rep.best_constant = ratio[*best];
    rep.witness.kind = Witness::Kind::ball;
    rep.witness.ball = balls[*best];
    rep.witness.index = *best;
    return rep;
}

VerifierReport local_integral_estimate(const GridFunction& u, const std::vector<Ball>& balls,
                                       const Params& params) {
    const double g = params.growth_exponent();
    if (!(g > 0.0)) throw RegimeError("local integral estimate needs alpha p q/(q-p+1) < n");
    VerifierReport rep;
    rep.name = "local_integral_estimate";
    rep.family = describe_balls(balls);
    rep.values = {{"exponent", g}};
    const CellDensityMeasure uq = u.power_measure(params.q);
    std::vector<double> ratio(balls.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < balls.size(); ++i)
        ratio[i] = uq.mass_ball(balls[i].center, balls[i].radius) / std::pow(balls[i].radius, g);
    rep.samples = ratio.size();
    const auto best = argmax(ratio);
    if (!best) return rep;
    rep.vacuous = u.is_zero();
    rep.best_constant = ratio[*best];
    rep.witness.kind = Witness::Kind::ball;
    rep.witness.ball = balls[*best];
    rep.witness.index = *best;
    double lo = kInf;
    for (double v : ratio) lo = std::min(lo, v);
    rep.values.emplace_back("min_ratio", lo);
    return rep;
}

VerifierReport local_integral_estimate_critical(const GridFunction& u, const Ball& outer,
                                                const std::vector<double>& radii, const Params& params) {
    if (std::abs(params.growth_exponent()) > 1e-9 * params.n) throw RegimeError("not critical: q != q*");
    VerifierReport rep;
    rep.name = "local_integral_estimate_critical";
    std::ostringstream fam;
    fam << radii.size() << " radii inside R = " << outer.radius;
    rep.family = fam.str();
    const double e = (1.0 - params.p) / (params.q - params.p + 1.0);
    rep.values = {{"log_exponent", e}};
    const CellDensityMeasure uq = u.power_measure(params.q);
    std::vector<double> ratio(radii.size(), kNaN);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !(radii[i] < outer.radius)) throw ConfigError("critical estimate needs 0 < r < R");
        ratio[i] = uq.mass_ball(outer.center, radii[i]) / std::pow(std::log(2.0 * outer.radius / radii[i]), e);
    }
    rep.samples = ratio.size();
    const auto best = argmax(ratio);
    if (!best) return rep;
    rep.vacuous = u.is_zero();
    rep.best_constant = ratio[*best];
    rep.witness.kind = Witness::Kind::ball;
    rep.witness.ball = Ball{outer.center, radii[*best]};
    rep.witness.index = *best;
    return rep;
}

VerifierReport carleson_embedding_check(const Measure& mu, const DyadicCube& P,
                                        const std::vector<DyadicCube>& f_cubes, const Params& params,
                                        int depth) {
    if (std::abs(params.growth_exponent()) > 1e-9 * params.n) {
        throw RegimeError("Carleson check needs the critical regime alpha p q/(q-p+1) = n");
    }
    check_depth(P.dim(), depth);
    const double s = params.q / (params.p - 1.0);
    VerifierReport rep;
    rep.name = "carleson_embedding_check";
    std::ostringstream fam;
    fam << f_cubes.size() << " indicator test functions, descent depth " << depth;
    rep.family = fam.str();

    // Premise: sum_{Q in P'} mu(Q)^s <= C mu(P') for every P' in P.
    double premise = 0.0;
    auto subtree = [&](auto&& self, const DyadicCube& Q, int level) -> double {
        const double m = mu.mass_cube(Q);
        if (m == 0.0) return 0.0;
        double S = std::pow(m, s);
        if (level < depth)
            for (unsigned j = 0; j < (1u << P.dim()); ++j) S += self(self, Q.child(j), level + 1);
        premise = std::max(premise, S / m);
        return S;
    };
    subtree(subtree, P, 0);

    std::vector<double> ratio(f_cubes.size(), kNaN);
    for (std::size_t i = 0; i < f_cubes.size(); ++i) {
        const DyadicCube& Pp = f_cubes[i];
        if (!P.contains(Pp)) throw ConfigError("Carleson check: test cube outside P");
        const double right = mu.mass_cube(Pp);
        if (!(right > 0.0)) continue;
        double left = 0.0;
        auto visit = [&](auto&& self, const DyadicCube& Q, int level) -> void {
            double m;
            if (Pp.contains(Q)) m = mu.mass_cube(Q);
            else if (Q.contains(Pp)) m = right;
            else return;
            if (m == 0.0) return;
            left += std::pow(m, s);
            if (level < depth)
                for (unsigned j = 0; j < (1u << P.dim()); ++j) self(self, Q.child(j), level + 1);
        };
        visit(visit, P, 0);
        ratio[i] = left / right;
    }
    for (double v : ratio) (std::isnan(v) ? rep.skipped : rep.samples) += 1;
    rep.values = {{"premise", premise}};
    const auto best = argmax(ratio);
    if (!best) {
        rep.vacuous = true;
        rep.note = "vacuous: mu vanishes on every test cube";
        return rep;
    }
    rep.best_constant = ratio[*best];
    rep.witness.kind = Witness::Kind::cube_pair;
    rep.witness.cube = P;
    rep.witness.other = f_cubes[*best];
    rep.witness.index = *best;
    return rep;
}

}  // namespace wolff
