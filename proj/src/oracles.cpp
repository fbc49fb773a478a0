#include "wolff/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wolff/errors.hpp"

namespace wolff {

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

void check_profile(const RadialProfile& profile) {
    if (profile.r.size() != profile.u.size()) throw ConfigError("profile: r and u differ in length");
    if (profile.r.size() < 5) throw ConfigError("profile: mesh too coarse (fewer than 5 points)");
    for (std::size_t i = 0; i < profile.r.size(); ++i) {
        if (!(profile.r[i] > 0.0)) throw ConfigError("profile: radii must be positive");
        if (i > 0 && !(profile.r[i] > profile.r[i - 1])) throw ConfigError("profile: radii must increase");
    }
}

// sup_j |op_j - u_j^q| where op_j = sign * r_j^{1-n} d(flux)/dr, flux given at half nodes.
template <class Flux>
double flux_residual(const RadialProfile& pr, int n, double q, double factor, Flux flux) {
    const std::size_t m = pr.r.size();
    std::vector<double> s(m);
    for (std::size_t j = 0; j < m; ++j) s[j] = std::log(pr.r[j]);
    std::vector<double> F(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double rh = std::sqrt(pr.r[j] * pr.r[j + 1]);
        const double du = (pr.u[j + 1] - pr.u[j]) / (s[j + 1] - s[j]) / rh;
        F[j] = flux(rh, du);
    }
    double res = 0.0;
    for (std::size_t j = 1; j + 1 < m; ++j) {
        const double dF = (F[j] - F[j - 1]) / (0.5 * (s[j + 1] - s[j - 1])) / pr.r[j];
        const double op = factor * std::pow(pr.r[j], 1 - n) * dF;
        res = std::max(res, std::abs(op - std::pow(pr.u[j], q)));
    }
    return res;
}

}  // namespace

double RadialSolution::operator()(double r) const { return c * std::pow(r, exponent); }

RadialSolution radial_plap_solution(int n, double p, double q) {
    if (!(p > 1.0) || !(p < n)) throw RegimeError("p-Laplace singular solution needs 1 < p < n");
    const double bracket = q * (n - p) - n * (p - 1.0);
    if (!(bracket > 0.0)) throw RegimeError("no singular solution in regime: q <= n(p-1)/(n-p)");
    const double d = q - p + 1.0;
    const double c = std::pow(std::pow(p, p - 1.0) / std::pow(d, p), 1.0 / d) * std::pow(bracket, 1.0 / d);
    return {c, -p / d};
}

RadialSolution radial_hessian_solution(int n, int k, double q) {
    if (k < 1 || !(2 * k < n)) throw RegimeError("Hessian singular solution needs 1 <= k < n/2");
    const double bracket = q * (n - 2 * k) - static_cast<double>(n) * k;
    if (!(bracket > 0.0)) throw RegimeError("no singular solution in regime: q <= nk/(n-2k)");
    const double d = q - k;
    const double comb = binomial(n, k) / n;  // (n-1)!/(k!(n-k)!)
    const double c = std::pow(comb, 1.0 / d) * std::pow(std::pow(2.0 * k, k) / std::pow(d, k + 1), 1.0 / d) *
                     std::pow(bracket, 1.0 / d);
    return {c, -2.0 * k / d};
}

std::vector<double> log_mesh(double r_min, double r_max, std::size_t count) {
    if (!(r_min > 0.0) || !(r_max > r_min) || count < 2) throw ConfigError("log_mesh: need 0 < r_min < r_max, count >= 2");
    std::vector<double> r(count);
    const double a = std::log(r_min), b = std::log(r_max);
    for (std::size_t i = 0; i < count; ++i) r[i] = std::exp(a + (b - a) * static_cast<double>(i) / (count - 1));
    r.front() = r_min;
    r.back() = r_max;
    return r;
}

RadialProfile sample_profile(const RadialSolution& sol, const std::vector<double>& mesh) {
    RadialProfile p{mesh, std::vector<double>(mesh.size())};
    for (std::size_t i = 0; i < mesh.size(); ++i) p.u[i] = sol(mesh[i]);
    return p;
}

double plap_radial_residual(const RadialProfile& profile, int n, double p, double q) {
    check_profile(profile);
    if (!(p > 1.0)) throw ConfigError("p must be > 1");
    return flux_residual(profile, n, q, -1.0, [&](double rh, double du) {
        const double mag = std::pow(std::abs(du), p - 1.0);
        return std::pow(rh, n - 1) * (du < 0.0 ? -mag : mag);
    });
}

double hessian_radial_residual(const RadialProfile& profile, int n, int k, double q) {
    check_profile(profile);
    if (k < 1 || k > n) throw ConfigError("k out of range");
    const double factor = binomial(n - 1, k - 1) / k;
    return flux_residual(profile, n, q, factor, [&](double rh, double du) {
        const double dv = -du;
        return std::pow(rh, n - k) * std::pow(dv, k);
    });
}

double source_scale(const RadialProfile& profile, double q) {
    double m = 0.0;
    for (double v : profile.u) m = std::max(m, std::pow(v, q));
    return m;
}

double wolff_dirac_closed_form(const Params& params, double distance, double r) {
    if (!(distance > 0.0)) throw ConfigError("distance must be > 0");
    params.require_global();
    if (r < distance) return 0.0;
    const double beta = params.dirac_decay();
    const double tail = std::isinf(r) ? 0.0 : std::pow(r, -beta);
    return (params.p - 1.0) / (params.n - params.alpha_p()) * (std::pow(distance, -beta) - tail);
}

BruteResult brute_wolff(const Measure& mu, std::span<const double> x, const Params& params, double r,
                        int nodes_per_decade) {
    if (nodes_per_decade < 8) throw ConfigError("brute_wolff: nodes_per_decade must be >= 8");
    BruteResult out;
    if (mu.is_zero()) return out;
    const int n = mu.dim();
    const double gamma = 1.0 / (params.p - 1.0);
    const double e = (n - params.alpha_p()) * gamma;

    double t_lo = 0.0;
    double support = 0.0;
    if (const auto* pm = mu.points()) {
        t_lo = std::numeric_limits<double>::infinity();
        for (const auto& a : pm->atoms()) {
            if (a.m <= 0.0) continue;
            const double d = distance(a.x, x);
            t_lo = std::min(t_lo, d);
            support = std::max(support, d);
        }
        if (t_lo == 0.0) return {std::numeric_limits<double>::infinity(), 0};
    } else {
        const auto box = mu.support_box();
        if (!box) throw ConfigError("brute_wolff: unbounded support");
        support = box->farthest_from(x);
        t_lo = 1e-6 * support;
    }
    if (r <= t_lo) return out;
    const double t_hi = std::isinf(r) ? 1e4 * support : r;

    const double h = std::log(10.0) / nodes_per_decade;
    const auto steps = static_cast<std::size_t>(std::ceil(std::log(t_hi / t_lo) / h));
    const double hs = std::log(t_hi / t_lo) / static_cast<double>(steps);
    auto g = [&](double s) {
        const double t = t_lo * std::exp(s);
        return std::pow(mu.mass_ball(x, t), gamma) * std::pow(t, -e);
    };
    double sum = 0.5 * (g(0.0) + g(hs * static_cast<double>(steps)));
    for (std::size_t i = 1; i < steps; ++i) sum += g(hs * static_cast<double>(i));
    out.value = sum * hs;
    out.nodes = steps + 1;
    if (std::isinf(r)) out.value += std::pow(mu.total_mass(), gamma) * std::pow(t_hi, -e) / e;
    return out;
}

}  // namespace wolff
