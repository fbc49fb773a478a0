#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wolff/capacity.hpp"
#include "wolff/errors.hpp"
#include "wolff/io.hpp"
#include "wolff/kernels.hpp"
#include "wolff/oracles.hpp"
#include "wolff/potentials.hpp"
#include "wolff/solver.hpp"
#include "wolff/verifiers.hpp"

using namespace wolff;
using io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDiverged = 3;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double parse_real(const std::string& s, const std::string& what) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw ConfigError(what + ": bad number '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(parse_real(item, what));
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

// "x,y,z;x,y,z"
std::vector<Point> parse_points(const std::string& s) {
    std::vector<Point> out;
    for (const auto& item : split(s, ';'))
        if (!item.empty()) out.push_back(parse_list(item, "--points"));
    if (out.empty()) throw ConfigError("--points: no points");
    return out;
}

// "g:i,j,k"
DyadicCube parse_cube(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw ConfigError("--cube: expected g:i,j,...");
    DyadicCube q;
    q.generation = static_cast<int>(parse_real(parts[0], "--cube"));
    for (double v : parse_list(parts[1], "--cube")) {
        if (v != std::floor(v)) throw ConfigError("--cube: indices must be integers");
        q.index.push_back(static_cast<std::int64_t>(v));
    }
    return q;
}

// "x,y,z:R"
Ball parse_ball(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw ConfigError("--ball: expected x,y,...:R");
    return Ball{parse_list(parts[0], "--ball"), parse_real(parts[1], "--ball")};
}

// "lo,lo:hi,hi;..."
std::vector<Box> parse_boxes(const std::string& s) {
    std::vector<Box> out;
    for (const auto& item : split(s, ';')) {
        if (item.empty()) continue;
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError("--E: expected lo,...:hi,...");
        out.push_back(Box{parse_list(parts[0], "--E"), parse_list(parts[1], "--E")});
    }
    return out;
}

GenerationWindow parse_window(const std::string& s) {
    const auto v = parse_list(s, "--window");
    if (v.size() != 2) throw ConfigError("--window: expected g_min,g_max");
    return GenerationWindow(static_cast<int>(v[0]), static_cast<int>(v[1]));
}

std::string csv_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + out_path);
    out << text;
}

Json points_json(const std::vector<Point>& xs) {
    Json a = Json::array();
    for (const auto& x : xs) {
        Json p = Json::array();
        for (double v : x) p.push_back(io::number(v));
        a.push_back(p);
    }
    return a;
}

struct Options {
    // shared
    std::string measure, params, out, r = "inf";
    // potential
    std::string kind = "wolff", from, to, points, window = "-20,10";
    int count = 65;
    double order = 2.0;
    std::optional<std::uint64_t> seed;
    bool serial = false;
    // solve
    std::string f;
    std::optional<double> C, eps;
    double tol = 1e-10;
    int max_iter = 10000;
    // verify
    std::string verifier, cube, ball, radii = "0.25,0.5", u;
    int depth = 3, per_side = 4, grid_generation = 0, f_depth = 1, levels = -1;
    bool have_grid_generation = false, no_refine = false;
    double t_min = 1e-3, t_max = 1.0, delta = 0.1;
    // oracle
    std::string oracle;
    int n = 3, k = 1, mesh_points = 400;
    double p = 2.0, q = 5.0, r_min = 0.5, r_max = 2.0, distance = 1.0;
    // capacity
    std::string capacity, E, lambdas = "1,2,4";
    double R = 1.0;
    int cell_generation = -4, cell_depth = 3;
};

Measure load_measure(const std::string& path) {
    if (path.empty()) throw ConfigError("--measure is required");
    return io::measure_from_json(io::read_json_file(path));
}

Params need_params(const Options& o) {
    if (o.params.empty()) throw ConfigError("--params is required");
    return io::parse_params(o.params);
}

int run_potential(const Options& o) {
    const Measure mu = load_measure(o.measure);
    std::vector<Point> xs;
    std::vector<double> s;
    if (!o.points.empty()) {
        xs = parse_points(o.points);
        for (const auto& x : xs) s.push_back(distance(x, xs.front()));
    } else {
        if (o.from.empty() || o.to.empty()) throw ConfigError("give --points or --from/--to");
        const Point a = parse_list(o.from, "--from"), b = parse_list(o.to, "--to");
        if (a.size() != b.size()) throw ConfigError("--from/--to dimension mismatch");
        if (o.count < 1) throw ConfigError("--count must be >= 1");
        for (int i = 0; i < o.count; ++i) {
            const double lam = o.count == 1 ? 0.0 : static_cast<double>(i) / (o.count - 1);
            Point x(a.size());
            for (std::size_t d = 0; d < a.size(); ++d) x[d] = a[d] + lam * (b[d] - a[d]);
            s.push_back(distance(x, a));
            xs.push_back(std::move(x));
        }
    }
    for (const auto& x : xs)
        if (static_cast<int>(x.size()) != mu.dim()) throw ConfigError("evaluation point dimension mismatch");
    const Execution exec = o.serial ? Execution::serial : Execution::parallel;
    const double r = parse_real(o.r, "--r");

    std::vector<double> values(xs.size());
    bool divergent = false;
    auto take = [&](const std::vector<PotentialValue>& pv) {
        for (std::size_t i = 0; i < pv.size(); ++i) {
            values[i] = pv[i].value;
            divergent = divergent || !pv[i].finite();
        }
    };
    if (o.kind == "wolff") {
        take(wolff_at_points(mu, xs, need_params(o), r, exec));
    } else if (o.kind == "riesz") {
        if (!(o.order > 0.0)) throw ConfigError("--order must be > 0");
        take(truncated_at_points(mu, xs, o.order, 1.0, 0.0, r, exec));
    } else if (o.kind == "dyadic_wolff") {
        const Params params = need_params(o);
        const GenerationWindow w = parse_window(o.window);
        if (o.seed) {
            std::mt19937_64 rng(*o.seed);
            std::uniform_real_distribution<double> u(0.0, std::ldexp(1.0, w.g_max));
            ShiftedLattice lat;
            for (int d = 0; d < mu.dim(); ++d) lat.shift.push_back(u(rng));
            for (std::size_t i = 0; i < xs.size(); ++i) values[i] = dyadic_wolff_shifted(mu, xs[i], params, w, lat);
        } else {
            values = dyadic_wolff_at_points(mu, xs, params, w, exec);
        }
    } else if (o.kind == "dyadic_riesz") {
        const GenerationWindow w = parse_window(o.window);
        for (std::size_t i = 0; i < xs.size(); ++i) values[i] = dyadic_riesz(mu, xs[i], o.order, w);
    } else {
        throw ConfigError("--kind must be wolff, riesz, dyadic_wolff or dyadic_riesz");
    }

    std::ostringstream csv;
    csv << "radius";
    for (int d = 0; d < mu.dim(); ++d) csv << ",x" << d;
    csv << ",value\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        csv << csv_number(s[i]);
        for (double v : xs[i]) csv << "," << csv_number(v);
        csv << "," << csv_number(values[i]) << "\n";
    }
    emit(csv.str(), o.out);
    return divergent ? kExitDiverged : kExitOk;
}

int run_solve(const Options& o) {
    if (o.f.empty()) throw ConfigError("--f is required");
    const GridFunction f = io::grid_function_from_json(io::read_json_file(o.f));
    const Params params = need_params(o);
    const GenerationWindow w = parse_window(o.window);
    PicardOptions opt;
    opt.C = o.C;
    opt.eps = o.eps;
    opt.tol = o.tol;
    opt.max_iter = o.max_iter;
    const PicardResult res = picard_solve(f, params, w, opt);

    Json j;
    j["command"] = "solve";
    j["params"] = io::to_json(params);
    Json cfg;
    cfg["grid"] = io::to_json(f.grid);
    cfg["window"] = io::to_json(w);
    cfg["C"] = o.C ? io::number(*o.C) : Json(nullptr);
    cfg["eps"] = o.eps ? io::number(*o.eps) : Json(nullptr);
    cfg["safety"] = io::number(opt.safety);
    cfg["tol"] = io::number(opt.tol);
    cfg["max_iter"] = opt.max_iter;
    j["config"] = cfg;
    j["certificate"] = io::to_json(res.cert);
    j["u"] = io::to_json(res.u);
    emit(io::dump(j), o.out);
    return res.cert.status == SolveStatus::converged ? kExitOk : kExitDiverged;
}

int run_verify(const Options& o) {
    const Params params = need_params(o);
    const double r = parse_real(o.r, "--r");
    Json cfg;
    cfg["params"] = io::to_json(params);
    VerifierReport rep;
    const std::string& v = o.verifier;

    auto need_cube = [&]() {
        if (o.cube.empty()) throw ConfigError("--cube is required");
        return parse_cube(o.cube);
    };
    if (v == "equivalence") {
        const Measure mu = load_measure(o.measure);
        const DyadicCube P = need_cube();
        const ChainIntegrals a = equivalence_A123(mu, P, params, o.depth);
        cfg["cube"] = io::to_json(P);
        cfg["depth"] = o.depth;
        Json j;
        j["command"] = "verify";
        j["verifier"] = v;
        j["config"] = cfg;
        j["A1"] = io::number(a.A1);
        j["A2"] = io::number(a.A2);
        j["A3"] = io::number(a.A3);
        j["A2_over_A1"] = io::number(a.A1 > 0 ? a.A2 / a.A1 : std::nan(""));
        j["A3_over_A1"] = io::number(a.A1 > 0 ? a.A3 / a.A1 : std::nan(""));
        emit(io::dump(j), o.out);
        return kExitOk;
    }
    if (v == "pointwise") {
        const Measure omega = load_measure(o.measure);
        const auto xs = parse_points(o.points);
        std::optional<CellGrid> grid;
        if (!o.cube.empty()) {
            if (!o.have_grid_generation) throw ConfigError("--cube needs --grid-generation");
            grid = CellGrid(parse_cube(o.cube), o.grid_generation);
            cfg["grid"] = io::to_json(*grid);
        }
        cfg["points"] = points_json(xs);
        cfg["r"] = io::number(r);
        cfg["refine"] = !o.no_refine;
        rep = pointwise_condition(omega, xs, params, r, grid, !o.no_refine);
    } else if (v == "testing_dyadic") {
        const Measure omega = load_measure(o.measure);
        const DyadicCube P = need_cube();
        cfg["cube"] = io::to_json(P);
        cfg["depth"] = o.depth;
        rep = testing_inequality_dyadic(omega, dyadic_family(P, o.depth), params, o.depth);
    } else if (v == "testing_balls") {
        const Measure omega = load_measure(o.measure);
        std::vector<Ball> balls;
        if (!o.ball.empty()) {
            balls.push_back(parse_ball(o.ball));
        } else {
            const DyadicCube P = need_cube();
            balls = ball_family(P.box(), o.per_side, parse_list(o.radii, "--radii"));
            cfg["cube"] = io::to_json(P);
            cfg["per_side"] = o.per_side;
            cfg["radii"] = parse_list(o.radii, "--radii");
        }
        cfg["r"] = io::number(r);
        cfg["levels"] = o.levels;
        rep = testing_inequality_balls(omega, balls, params, r, o.levels);
    } else if (v == "frostman") {
        const Measure omega = load_measure(o.measure);
        const auto xs = parse_points(o.points);
        cfg["points"] = points_json(xs);
        cfg["t_min"] = io::number(o.t_min);
        cfg["t_max"] = io::number(o.t_max);
        rep = frostman_ratio(omega, xs, o.t_min, o.t_max, params);
    } else if (v == "fefferman_phong") {
        const Measure f = load_measure(o.measure);
        if (!f.cells()) throw ConfigError("fefferman_phong needs a cells measure");
        const DyadicCube P = need_cube();
        cfg["cube"] = io::to_json(P);
        cfg["per_side"] = o.per_side;
        cfg["radii"] = parse_list(o.radii, "--radii");
        cfg["delta"] = io::number(o.delta);
        rep = fefferman_phong(*f.cells(), o.delta, ball_family(P.box(), o.per_side, parse_list(o.radii, "--radii")),
                              params);
    } else if (v == "local_integral" || v == "local_integral_critical") {
        if (o.u.empty()) throw ConfigError("--u is required");
        const GridFunction u = io::grid_function_from_json(io::read_json_file(o.u));
        cfg["radii"] = parse_list(o.radii, "--radii");
        if (v == "local_integral") {
            const DyadicCube P = need_cube();
            cfg["cube"] = io::to_json(P);
            cfg["per_side"] = o.per_side;
            rep = local_integral_estimate(u, ball_family(P.box(), o.per_side, parse_list(o.radii, "--radii")), params);
        } else {
            if (o.ball.empty()) throw ConfigError("--ball is required");
            const Ball outer = parse_ball(o.ball);
            cfg["ball"] = io::to_json(outer);
            rep = local_integral_estimate_critical(u, outer, parse_list(o.radii, "--radii"), params);
        }
    } else if (v == "carleson") {
        const Measure mu = load_measure(o.measure);
        const DyadicCube P = need_cube();
        cfg["cube"] = io::to_json(P);
        cfg["depth"] = o.depth;
        cfg["f_depth"] = o.f_depth;
        rep = carleson_embedding_check(mu, P, dyadic_family(P, o.f_depth), params, o.depth);
    } else {
        throw ConfigError("unknown verifier '" + v + "'");
    }

    Json j;
    j["command"] = "verify";
    j["verifier"] = v;
    j["config"] = cfg;
    j["report"] = io::to_json(rep);
    emit(io::dump(j), o.out);
    return rep.divergent() ? kExitDiverged : kExitOk;
}

int run_oracle(const Options& o) {
    Json j;
    j["command"] = "oracle";
    j["oracle"] = o.oracle;
    if (o.oracle == "dirac") {
        const Params params = need_params(o);
        const double r = parse_real(o.r, "--r");
        Point x(static_cast<std::size_t>(params.n), 0.0);
        x[0] = o.distance;
        const PotentialValue w = wolff_truncated(Measure::dirac(Point(x.size(), 0.0)), x, params, r);
        j["params"] = io::to_json(params);
        j["distance"] = io::number(o.distance);
        j["r"] = io::number(r);
        j["closed_form"] = io::number(wolff_dirac_closed_form(params, o.distance, r));
        j["wolff_truncated"] = io::number(w.value);
        emit(io::dump(j), o.out);
        return w.finite() ? kExitOk : kExitDiverged;
    }
    RadialSolution sol;
    double p = o.p;
    if (o.oracle == "plap") {
        sol = radial_plap_solution(o.n, o.p, o.q);
    } else if (o.oracle == "hessian") {
        sol = radial_hessian_solution(o.n, o.k, o.q);
        p = o.k + 1.0;
    } else {
        throw ConfigError("oracle must be plap, hessian or dirac");
    }
    if (o.mesh_points < 5) throw ConfigError("--mesh-points must be >= 5");
    const auto mesh = log_mesh(o.r_min, o.r_max, static_cast<std::size_t>(o.mesh_points));
    const RadialProfile prof = sample_profile(sol, mesh);
    const double res = o.oracle == "plap" ? plap_radial_residual(prof, o.n, o.p, o.q)
                                          : hessian_radial_residual(prof, o.n, o.k, o.q);
    const double scale = source_scale(prof, o.q);
    j["n"] = o.n;
    if (o.oracle == "plap") j["p"] = io::number(p);
    else j["k"] = o.k;
    j["q"] = io::number(o.q);
    Json mesh_cfg;
    mesh_cfg["r_min"] = io::number(o.r_min);
    mesh_cfg["r_max"] = io::number(o.r_max);
    mesh_cfg["points"] = o.mesh_points;
    j["mesh"] = mesh_cfg;
    j["c"] = io::number(sol.c);
    j["exponent"] = io::number(sol.exponent);
    j["residual"] = io::number(res);
    j["scale"] = io::number(scale);
    j["relative_residual"] = io::number(res / scale);
    emit(io::dump(j), o.out);
    return kExitOk;
}

int run_capacity(const Options& o) {
    const Params params = need_params(o);
    Json j;
    j["command"] = "capacity";
    j["estimator"] = o.capacity;
    j["params"] = io::to_json(params);
    if (o.capacity == "lower") {
        const Measure trial = load_measure(o.measure);
        std::vector<Box> E;
        if (!o.E.empty()) {
            E = parse_boxes(o.E);
        } else {
            const auto sb = trial.support_box();
            if (!sb) throw ConfigError("trial measure has no bounded support; give --E");
            E.push_back(*sb);
        }
        Json ej = Json::array();
        for (const auto& b : E) ej.push_back(io::to_json(b));
        j["E"] = ej;
        j["R"] = io::number(o.R);
        const CapacityEstimate est = riesz_capacity_lower(E, trial, params, o.R);
        j["estimate"] = io::to_json(est);
        emit(io::dump(j), o.out);
        return kExitOk;
    }
    if (o.capacity == "energy") {
        const Measure mu = load_measure(o.measure);
        j["R"] = io::number(o.R);
        j["cell_generation"] = o.cell_generation;
        const EnergyEstimate e = bessel_energy(mu, params, o.R, o.cell_generation);
        j["energy"] = io::to_json(e);
        emit(io::dump(j), o.out);
        return e.divergence.empty() ? kExitOk : kExitDiverged;
    }
    if (o.capacity == "scaling") {
        const auto lambdas = parse_list(o.lambdas, "--lambdas");
        j["lambdas"] = lambdas;
        j["cell_depth"] = o.cell_depth;
        const VerifierReport rep = capacity_scaling_check(params, lambdas, o.cell_depth);
        j["report"] = io::to_json(rep);
        emit(io::dump(j), o.out);
        return kExitOk;
    }
    throw ConfigError("capacity estimator must be lower, energy or scaling");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wolff potential toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* pot = app.add_subcommand("potential", "evaluate a potential on a point set (CSV)");
    pot->add_option("--measure", o.measure, "measure JSON file")->required();
    pot->add_option("--params", o.params, "n=..,alpha=..,p=..,q=.. or n=..,k=..,q=..");
    pot->add_option("--kind", o.kind, "wolff | riesz | dyadic_wolff | dyadic_riesz");
    pot->add_option("--r", o.r, "truncation radius (inf allowed)");
    pot->add_option("--order", o.order, "Riesz order");
    pot->add_option("--from", o.from, "segment start x,y,...");
    pot->add_option("--to", o.to, "segment end x,y,...");
    pot->add_option("--count", o.count, "points on the segment");
    pot->add_option("--points", o.points, "explicit points x,y;x,y");
    pot->add_option("--window", o.window, "dyadic generations g_min,g_max");
    pot->add_option("--seed", o.seed, "random lattice shift for dyadic_wolff");
    pot->add_flag("--serial", o.serial, "use the serial reference kernels");
    pot->add_option("--out", o.out, "output file (default stdout)");

    auto* solve = app.add_subcommand("solve", "Picard iteration u = N u + eps f");
    solve->add_option("--f", o.f, "cells JSON for f")->required();
    solve->add_option("--params", o.params)->required();
    solve->add_option("--window", o.window, "dyadic generations g_min,g_max");
    solve->add_option("--C", o.C, "pointwise constant (estimated when absent)");
    solve->add_option("--eps", o.eps, "override eps (disables bound checks)");
    solve->add_option("--tol", o.tol);
    solve->add_option("--max-iter", o.max_iter);
    solve->add_option("--out", o.out);

    auto* verify = app.add_subcommand("verify", "run a verifier (VerifierReport JSON)");
    verify->add_option("name", o.verifier,
                       "pointwise | testing_dyadic | testing_balls | frostman | fefferman_phong | "
                       "local_integral | local_integral_critical | carleson | equivalence")
        ->required();
    verify->add_option("--measure", o.measure);
    verify->add_option("--params", o.params)->required();
    verify->add_option("--r", o.r);
    verify->add_option("--points", o.points, "x,y;x,y");
    verify->add_option("--cube", o.cube, "dyadic cube g:i,j,...");
    verify->add_option("--grid-generation", o.grid_generation)->each([&](const std::string&) {
        o.have_grid_generation = true;
    });
    verify->add_flag("--no-refine", o.no_refine);
    verify->add_option("--depth", o.depth);
    verify->add_option("--f-depth", o.f_depth);
    verify->add_option("--levels", o.levels);
    verify->add_option("--ball", o.ball, "x,y,...:R");
    verify->add_option("--radii", o.radii);
    verify->add_option("--per-side", o.per_side);
    verify->add_option("--t-min", o.t_min);
    verify->add_option("--t-max", o.t_max);
    verify->add_option("--delta", o.delta);
    verify->add_option("--u", o.u, "cells JSON for u");
    verify->add_option("--out", o.out);

    auto* oracle = app.add_subcommand("oracle", "closed-form radial solutions and residuals");
    oracle->add_option("name", o.oracle, "plap | hessian | dirac")->required();
    oracle->add_option("--n", o.n);
    oracle->add_option("--p", o.p);
    oracle->add_option("--q", o.q);
    oracle->add_option("--k", o.k);
    oracle->add_option("--r-min", o.r_min);
    oracle->add_option("--r-max", o.r_max);
    oracle->add_option("--mesh-points", o.mesh_points);
    oracle->add_option("--params", o.params);
    oracle->add_option("--distance", o.distance);
    oracle->add_option("--r", o.r);
    oracle->add_option("--out", o.out);

    auto* cap = app.add_subcommand("capacity", "capacity lower bounds, energies and scaling");
    cap->add_option("name", o.capacity, "lower | energy | scaling")->required();
    cap->add_option("--params", o.params)->required();
    cap->add_option("--measure", o.measure, "trial measure (lower) or mu (energy)");
    cap->add_option("--E", o.E, "boxes lo,..:hi,..;...");
    cap->add_option("--R", o.R);
    cap->add_option("--cell-generation", o.cell_generation);
    cap->add_option("--lambdas", o.lambdas);
    cap->add_option("--cell-depth", o.cell_depth);
    cap->add_option("--out", o.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*pot) return run_potential(o);
        if (*solve) return run_solve(o);
        if (*verify) return run_verify(o);
        if (*oracle) return run_oracle(o);
        if (*cap) return run_capacity(o);
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
