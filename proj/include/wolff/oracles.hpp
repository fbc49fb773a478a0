#pragma once

#include <cstddef>
#include <vector>

#include "wolff/measures.hpp"
#include "wolff/params.hpp"

namespace wolff {

/// u(r) = c r^exponent.
struct RadialSolution {
    double c = 0.0;
    double exponent = 0.0;

    double operator()(double r) const;
};

/// Singular solution of -Delta_p u = u^q on R^n \ {0}; needs 1 < p < n and q > n(p-1)/(n-p).
RadialSolution radial_plap_solution(int n, double p, double q);

/// Singular solution of F_k[-u] = u^q; needs 1 <= k < n/2 and q > nk/(n-2k).
RadialSolution radial_hessian_solution(int n, int k, double q);

struct RadialProfile {
    std::vector<double> r;  // increasing, positive
    std::vector<double> u;
};

/// count radii, log-spaced over [r_min, r_max].
std::vector<double> log_mesh(double r_min, double r_max, std::size_t count);
RadialProfile sample_profile(const RadialSolution& sol, const std::vector<double>& mesh);

/// sup over interior nodes of |-r^{1-n}(r^{n-1}|u'|^{p-2}u')' - u^q|, flux form on the log grid.
double plap_radial_residual(const RadialProfile& profile, int n, double p, double q);

/// sup over interior nodes of |S_k(D^2 v) - u^q| with v = -u, using
/// S_k = C(n-1,k-1)/k r^{1-n} (r^{n-k} (v')^k)'.
double hessian_radial_residual(const RadialProfile& profile, int n, int k, double q);

/// max u^q over the profile, the natural scale of both residuals.
double source_scale(const RadialProfile& profile, double q);

/// ((p-1)/(n-ap)) (d^{-beta} - r^{-beta}) for r >= d, beta = (n-ap)/(p-1); 0 for r < d.
double wolff_dirac_closed_form(const Params& params, double distance, double r);

struct BruteResult {
    double value = 0.0;
    std::size_t nodes = 0;
};

/// Trapezoid rule in log t over samples of mu(B_t(x)), from the nearest atom (or a tiny
/// radius for densities) to r; for r = inf the constant-mass tail beyond 10^4 times the
/// support radius is added in closed form.
BruteResult brute_wolff(const Measure& mu, std::span<const double> x, const Params& params, double r,
                        int nodes_per_decade);

}  // namespace wolff
