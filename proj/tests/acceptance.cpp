#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wolff/capacity.hpp"
#include "wolff/oracles.hpp"
#include "wolff/params.hpp"
#include "wolff/potentials.hpp"
#include "wolff/solver.hpp"
#include "wolff/verifiers.hpp"

using namespace wolff;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    char timing[96];
    if (limit_s > 0) {
        std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", dt, limit_s);
        pass = pass && dt < limit_s;
    } else {
        std::snprintf(timing, sizeof timing, "%.2f s", dt);
    }
    if (!pass) ++failures;
    std::printf("[%s] %-3s %s: %s; %s\n", pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), o.detail.c_str(), timing);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double rel_err(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Point random_point(std::mt19937_64& rng, int n, double lo, double hi) {
    Point x(static_cast<std::size_t>(n));
    for (auto& v : x) v = uniform(rng, lo, hi);
    return x;
}

Params random_params(std::mt19937_64& rng, int n) {
    const double p = uniform(rng, 1.2, 4.0);
    const double alpha = uniform(rng, 0.05, 0.95) * n / p;
    return make_params(n, alpha, p, uniform(rng, p - 0.5, p + 6.0));
}

// 1 ----------------------------------------------------------------------------
Outcome dirac_closed_form() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const Params P = random_params(rng, n);
        const double d = std::exp(uniform(rng, -4, 4));
        const double r = i % 10 == 0 ? kInf : d * std::exp(uniform(rng, -1, 4));
        Point x(static_cast<std::size_t>(n), 0.0);
        x[0] = d;
        const auto w = wolff_truncated(Measure::dirac(Point(x.size(), 0.0)), x, P, r);
        if (!w.finite()) return {false, "divergent value"};
        const double c = wolff_dirac_closed_form(P, d, r);
        worst = std::max(worst, c == 0.0 ? std::abs(w.value) : rel_err(w.value, c));
    }
    return {worst <= 1e-12, fmt("100 configurations, max rel err %.2e (tol 1e-12)", worst)};
}

// 2 ----------------------------------------------------------------------------
Outcome plap_residuals() {
    bool ok = true;
    std::ostringstream s;
    for (auto [n, p, q] : std::initializer_list<std::tuple<int, double, double>>{{3, 2.0, 5.0}, {4, 2.0, 4.0}, {3, 1.5, 4.0}}) {
        const auto sol = radial_plap_solution(n, p, q);
        const auto coarse = sample_profile(sol, log_mesh(0.5, 2.0, 400));
        const auto fine = sample_profile(sol, log_mesh(0.5, 2.0, 799));  // spacing halved
        const double rc = plap_radial_residual(coarse, n, p, q) / source_scale(coarse, q);
        const double rf = plap_radial_residual(fine, n, p, q) / source_scale(fine, q);
        const double factor = rc / rf;
        ok = ok && rc <= 1e-4 && factor >= 3.5 && factor <= 4.5;
        s << fmt("(%g,%g,%g)", n, p, q) << fmt(" rel %.2e factor %.3f; ", rc, factor);
    }
    return {ok, s.str() + "tol 1e-4, factor in [3.5,4.5]"};
}

// 3 ----------------------------------------------------------------------------
Outcome hessian_residuals() {
    bool ok = true;
    std::ostringstream s;
    for (auto [n, k, q] : std::initializer_list<std::tuple<int, int, double>>{{5, 1, 5.0}, {7, 2, 7.0}}) {
        const auto sol = radial_hessian_solution(n, k, q);
        const auto prof = sample_profile(sol, log_mesh(0.5, 2.0, 400));
        const double rel = hessian_radial_residual(prof, n, k, q) / source_scale(prof, q);
        ok = ok && rel <= 1e-4;
        s << fmt("(%g,%g,%g) rel %.2e; ", n, k, q, rel);
    }
    const auto sol = radial_hessian_solution(5, 1, 5.0);
    const auto prof = sample_profile(sol, log_mesh(0.5, 2.0, 400));
    const double h = hessian_radial_residual(prof, 5, 1, 5.0);
    const double l = plap_radial_residual(prof, 5, 2.0, 5.0);
    const double diff = rel_err(h, l);
    ok = ok && diff <= 1e-12;
    s << fmt("k=1 vs p=2 rel diff %.1e (tol 1e-12)", diff);
    return {ok, s.str()};
}

// 4 ----------------------------------------------------------------------------
Outcome picard_contract() {
    const CellGrid g(DyadicCube{0, {0}}, -6);  // 64 cells on [0,1)
    const auto f = GridFunction::indicator(g, 20);
    const Params P = make_params(1, 0.4, 2.0, 3.0);
    const GenerationWindow w(-6, 0);
    const auto res = picard_solve(f, P, w);
    const auto& c = res.cert;
    const bool ok = c.status == SolveStatus::converged && c.monotone && c.majorant_ok && c.lower_ok &&
                    c.upper_ok && c.sup_residual <= 1e-8 && c.C_estimated;
    return {ok, "status " + to_string(c.status) +
                    fmt(", %g iterations, sup residual %.2e (tol 1e-8), C %.4g, eps %.4g", c.iterations,
                        c.sup_residual, c.C, c.eps) +
                    ", monotone " + (c.monotone ? "yes" : "no") + ", majorant " + (c.majorant_ok ? "yes" : "no") +
                    ", minorant " + (c.lower_ok ? "yes" : "no")};
}

// 5 ----------------------------------------------------------------------------
Outcome iteration_constants_check() {
    std::mt19937_64 rng(1005);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double p = uniform(rng, 1.1, 5.0);
        const double q = uniform(rng, p - 1.0 + 0.05, p + 8.0);
        const double C = std::exp(uniform(rng, -6, 6));
        worst = std::max(worst, iteration_constants(make_params(3, 0.3, p, q), C).fixed_point_residual());
    }
    const auto ic = iteration_constants(make_params(3, 1.0, 2.0, 2.0), 1.0);
    const double e = std::max(std::abs(ic.eps - 0.5), std::abs(ic.x0 - 1.0));
    return {worst <= 1e-10 && e <= 1e-12,
            fmt("max fixed-point residual %.2e over 1000 draws (tol 1e-10); (2,2,1): eps-0.5, x0-1 within %.1e (tol 1e-12)",
                worst, e)};
}

// 6 ----------------------------------------------------------------------------
Outcome equivalence_homogeneity() {
    std::mt19937_64 rng(1006);
    const Params regimes[] = {make_params(2, 0.5, 2.0, 3.0), make_params(3, 0.5, 3.0, 4.0)};
    bool ok = true;
    std::ostringstream s;
    for (const Params& P : regimes) {
        const int n = P.n;
        const DyadicCube root{0, std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)};
        const CellGrid g(root, -1);
        double lo2 = kInf, hi2 = 0, lo3 = kInf, hi3 = 0, slo2 = kInf, shi2 = 0, slo3 = kInf, shi3 = 0;
        double homog = 0.0;
        for (int i = 0; i < 50; ++i) {
            std::vector<double> v(g.cell_count());
            for (auto& x : v) x = uniform(rng, 0, 1) < 0.2 ? 0.0 : std::exp(uniform(rng, -3, 3));
            if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
            const Measure mu(CellDensityMeasure(g, v));
            const auto A = equivalence_A123(mu, root, P, 1);
            const auto B = equivalence_A123(mu.scaled(1e3), root, P, 1);
            const double s3 = std::pow(1e3, P.q / (P.p - 1));
            homog = std::max({homog, rel_err(B.A1, s3 * A.A1), rel_err(B.A2, s3 * A.A2), rel_err(B.A3, s3 * A.A3)});
            lo2 = std::min(lo2, A.A2 / A.A1), hi2 = std::max(hi2, A.A2 / A.A1);
            lo3 = std::min(lo3, A.A3 / A.A1), hi3 = std::max(hi3, A.A3 / A.A1);
            slo2 = std::min(slo2, B.A2 / B.A1), shi2 = std::max(shi2, B.A2 / B.A1);
            slo3 = std::min(slo3, B.A3 / B.A1), shi3 = std::max(shi3, B.A3 / B.A1);
        }
        const double change = std::max({rel_err(lo2, slo2), rel_err(hi2, shi2), rel_err(lo3, slo3), rel_err(hi3, shi3)});
        ok = ok && change < 0.01 && homog < 1e-12;
        s << fmt("n=%g p=%g: A2/A1 in [%.3g, ", n, P.p, lo2) << fmt("%.3g], A3/A1 in [%.3g, %.3g]", hi2, lo3, hi3)
          << fmt(", bracket change %.1e, homogeneity err %.1e; ", change, homog);
    }
    return {ok, s.str() + "tol 1%"};
}

// 7 ----------------------------------------------------------------------------
VerifierReport dirac_pointwise(const Params& P) {
    const int n = P.n;
    Point x(static_cast<std::size_t>(n), 0.0);
    x[0] = 0.75;
    const CellGrid grid(DyadicCube{1, std::vector<std::int64_t>(static_cast<std::size_t>(n), -1)}, -1);
    return pointwise_condition(Measure::dirac(Point(x.size(), 0.0)), {x}, P, kInf, grid, true);
}

Outcome liouville_infinite() {
    bool ok = true;
    std::ostringstream s;
    const std::pair<std::string, Params> cases[] = {{"(3,2,2)", make_params(3, 1, 2, 2)},
                                                    {"(3,2,3)", make_params(3, 1, 2, 3)},
                                                    {"Hessian (5,1,5/3)", hessian_params(5, 1, 5.0 / 3.0)}};
    for (const auto& [name, P] : cases) {
        const auto rep = dirac_pointwise(P);
        const bool inf = std::isinf(rep.best_constant) && rep.divergent();
        ok = ok && inf;
        s << name << (inf ? " +inf" : fmt(" finite %.3g", rep.best_constant)) << "; ";
    }
    return {ok, s.str() + "expected +inf sentinel"};
}

Outcome liouville_finite() {
    bool ok = true;
    std::ostringstream s;
    const std::pair<std::string, Params> cases[] = {{"(3,2,5)", make_params(3, 1, 2, 5)},
                                                    {"Hessian (5,1,5)", hessian_params(5, 1, 5.0)}};
    for (const auto& [name, P] : cases) {
        const auto rep = dirac_pointwise(P);
        const bool finite = std::isfinite(rep.best_constant) && !rep.divergent() && !rep.vacuous;
        ok = ok && finite;
        s << name << (finite ? fmt(" finite %.4g", rep.best_constant) : " +inf (" + rep.divergence + ")") << "; ";
    }
    return {ok, s.str() + "expected a finite refinement-stable constant"};
}

// 8 ----------------------------------------------------------------------------
Outcome frostman_capacity() {
    const Params P = make_params(3, 1, 2, 5);
    const double gamma = P.n - P.growth_exponent();
    const Measure omega = RadialPowerMeasure(3, 1.0, gamma, kInf);
    const auto fr = frostman_ratio(omega, {Point{0, 0, 0}}, 1e-3, 1e3, P);
    const double spread = 1.0 - fr.value("min_ratio") / fr.best_constant;
    const auto cap = capacity_scaling_check(P, {1, 2, 4});
    const double slope = cap.value("slope");
    const bool ok = spread <= 0.05 && std::abs(slope - 0.5) <= 0.05;
    return {ok, fmt("Frostman spread %.1e (tol 5%%); capacity slope %.4f, expected 0.5 +- 0.05", spread, slope)};
}

// 9 ----------------------------------------------------------------------------
Measure random_atoms(std::mt19937_64& rng, int n, int count) {
    std::vector<Atom> atoms;
    for (int i = 0; i < count; ++i) atoms.push_back({random_point(rng, n, -1, 1), std::exp(uniform(rng, -2, 2))});
    return PointMassMeasure(n, atoms);
}

Measure merged(const Measure& a, const Measure& b) {
    auto atoms = a.points()->atoms();
    for (const auto& x : b.points()->atoms()) atoms.push_back(x);
    return PointMassMeasure(a.dim(), atoms);
}

Outcome property_suites() {
    std::mt19937_64 rng(1009);
    int homog_bad = 0, mono_bad = 0, sub_bad = 0, n_homog_bad = 0, n_mono_bad = 0;
    double homog_worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const int n = 1 + static_cast<int>(rng() % 4);
        Params P = random_params(rng, n);
        const Measure mu = random_atoms(rng, n, 1 + static_cast<int>(rng() % 5));
        const Measure nu = random_atoms(rng, n, 1 + static_cast<int>(rng() % 5));
        const Point x = random_point(rng, n, -1.5, 1.5);
        const double r = std::exp(uniform(rng, -1, 2));
        const double lam = std::exp(uniform(rng, -3, 3));
        const double wm = wolff_truncated(mu, x, P, r).value;
        const double wn = wolff_truncated(nu, x, P, r).value;
        const double wsum = wolff_truncated(merged(mu, nu), x, P, r).value;
        const double wl = wolff_truncated(mu.scaled(lam), x, P, r).value;
        const double e = rel_err(wl, std::pow(lam, 1.0 / (P.p - 1)) * wm);
        homog_worst = std::max(homog_worst, wm == 0.0 ? 0.0 : e);
        if (e > 1e-12 && wm != 0.0) ++homog_bad;
        if (wsum < wm * (1 - 1e-12) || wsum < wn * (1 - 1e-12)) ++mono_bad;
        if (wsum > subadditivity_constant(P.p) * (wm + wn) * (1 + 1e-12)) ++sub_bad;

        // solver invariants: N is monotone and homogeneous of degree q/(p-1)
        const CellGrid g(DyadicCube{0, std::vector<std::int64_t>(static_cast<std::size_t>(std::min(n, 2)), 0)}, -2);
        const Params Q = make_params(g.dim(), uniform(rng, 0.1, 0.45) * g.dim() / 2.0, 2.0, uniform(rng, 1.5, 4));
        std::vector<double> v(g.cell_count()), vb(g.cell_count());
        for (std::size_t k = 0; k < v.size(); ++k) {
            v[k] = uniform(rng, 0, 2);
            vb[k] = v[k] + uniform(rng, 0, 1);
        }
        const GenerationWindow w(-4, 1);
        const auto Na = apply_N(GridFunction(g, v), Q, w);
        const auto Nb = apply_N(GridFunction(g, vb), Q, w);
        auto vl = v;
        for (auto& t : vl) t *= lam;
        const auto Nl = apply_N(GridFunction(g, vl), Q, w);
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (Na.values[k] > Nb.values[k]) ++n_mono_bad;
            if (rel_err(Nl.values[k], std::pow(lam, Q.q / (Q.p - 1)) * Na.values[k]) > 1e-12) ++n_homog_bad;
        }
    }
    const bool ok = homog_bad + mono_bad + sub_bad + n_homog_bad + n_mono_bad == 0;
    std::ostringstream s;
    s << "500 cases each; violations: W homogeneity " << homog_bad << fmt(" (worst %.1e)", homog_worst)
      << ", W monotonicity " << mono_bad << ", W subadditivity with c(p) " << sub_bad << ", N monotonicity "
      << n_mono_bad << ", N homogeneity " << n_homog_bad;
    return {ok, s.str()};
}

// 10 ---------------------------------------------------------------------------
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism() {
    const std::string dir = std::string(WOLFF_ACCEPTANCE_TMP);
    {
        std::ofstream(dir + "/dirac.json") << R"({"type":"points","atoms":[{"x":[0,0,0],"m":1}]})";
        std::ofstream f(dir + "/f.json");
        f << R"({"type":"cells","box":{"generation":0,"index":[0]},"generation":-6,"values":[)";
        for (int i = 0; i < 64; ++i) f << (i ? "," : "") << (i == 20 ? 1 : 0);
        f << "]}";
        std::ofstream(dir + "/cube.json")
            << R"({"type":"cells","box":{"generation":0,"index":[0,0,0]},"generation":-2,"values":[)"
            << "1,2,3,4,5,6,7,8,1,2,3,4,5,6,7,8,1,2,3,4,5,6,7,8,1,2,3,4,5,6,7,8,"
            << "1,2,3,4,5,6,7,8,1,2,3,4,5,6,7,8,1,2,3,4,5,6,7,8,1,2,3,4,5,6,7,8]}";
    }
    const std::string cli = WOLFF_CLI_PATH;
    const std::vector<std::string> commands = {
        "verify pointwise --measure " + dir + "/dirac.json --params n=3,p=2,q=2 --r inf --points 1,0,0",
        "oracle plap --n 3 --p 2 --q 5",
        "solve --f " + dir + "/f.json --params n=1,alpha=0.4,p=2,q=3 --window=-6,0",
        "potential --measure " + dir + "/cube.json --params n=3,p=2,q=5 --from 0.1,0.2,0.3 --to 2,2,2 --count 17",
        "verify testing_dyadic --measure " + dir + "/cube.json --params n=3,alpha=0.5,p=2,q=3 --cube 0:0,0,0 --depth 2",
        "capacity lower --measure " + dir + "/cube.json --params n=3,p=2,q=5 --R 1",
    };
    int identical = 0;
    std::ostringstream s;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::string out[2];
        int codes[2];
        for (int k = 0; k < 2; ++k) {
            const std::string path = dir + "/run" + std::to_string(i) + "_" + std::to_string(k) + ".out";
            codes[k] = std::system((cli + " " + commands[i] + " > " + path + " 2>&1").c_str());
            out[k] = slurp(path);
        }
        if (out[0] == out[1] && codes[0] == codes[1] && !out[0].empty()) ++identical;
        else s << "differs: " << commands[i] << "; ";
    }
    s << identical << "/" << commands.size() << " commands byte-identical across two runs";
    return {identical == static_cast<int>(commands.size()), s.str()};
}

}  // namespace

int main() {
    report("1", "Dirac closed form", 1, dirac_closed_form);
    report("2", "radial p-Laplace residual", 5, plap_residuals);
    report("3", "radial Hessian residual", 5, hessian_residuals);
    report("4", "Picard solver contract", 10, picard_contract);
    report("5", "iteration constants", 0, iteration_constants_check);
    report("6", "A1/A2/A3 equivalence and homogeneity", 0, equivalence_homogeneity);
    report("7a", "Liouville dichotomy, infinite half", 0, liouville_infinite);
    report("7b", "Liouville dichotomy, finite half", 0, liouville_finite);
    report("8", "Frostman and capacity scaling", 30, frostman_capacity);
    report("9", "property suites", 0, property_suites);
    report("10", "CLI determinism", 0, cli_determinism);
    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
