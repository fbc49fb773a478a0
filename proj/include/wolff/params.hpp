#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace wolff {

enum class OperatorKind { quasilinear, hessian };

/// Exponent bundle (n, alpha, p, q) of a Wolff potential problem.
///
/// Quasilinear problems use W_{alpha,p} directly; a k-Hessian problem is
/// encoded through the exponent map alpha = 2k/(k+1), p = k+1.
struct Params {
    int n = 0;
    double alpha = 0.0;
    double p = 0.0;
    double q = 0.0;
    double p_prime = 0.0;
    OperatorKind kind = OperatorKind::quasilinear;
    int k = 0;                 // Hessian order, 0 for quasilinear
    bool local_only = false;   // alpha*p >= n: global (R^n) operations refuse

    double alpha_p() const { return alpha * p; }
    /// Exponent (n - alpha p)/(p - 1) of the Dirac Wolff potential |x|^{-beta}.
    double dirac_decay() const { return (n - alpha_p()) / (p - 1.0); }
    /// Growth exponent n - alpha p q/(q-p+1) of admissible measures.
    double growth_exponent() const { return n - alpha_p() * q / (q - p + 1.0); }

    /// Throws RegimeError unless alpha*p < n.
    void require_global() const;
    std::string describe() const;
};

Params make_params(int n, double alpha, double p, double q);
Params hessian_params(int n, int k, double q);

struct CriticalExponents {
    double q_star = 0.0;
    std::optional<double> q_star_star;
};

CriticalExponents critical_exponents(const Params& params);

/// max{1, 2^{p'-2}}, the constant of (a+b)^{p'-1} <= c(p)(a^{p'-1} + b^{p'-1}).
double subadditivity_constant(double p);

/// Constants of the Picard scheme u_{n+1} = N u_n + eps f.
struct IterationConstants {
    double eps = 0.0;
    double x0 = 0.0;
    double a = 0.0;   // eps^{1/(p-1)} c(p), kept exactly as derived
    double cp = 1.0;
    double C = 0.0;
    double p = 2.0;
    double q = 2.0;

    /// C = 0 leaves eps unconstrained (eps = x0 = +inf).
    bool unconstrained() const;
    /// The map x -> [eps^{1/(p-1)} c(p) (1 + C^{1/q} x^{p'-1})]^q whose unique root is x0.
    double majorant_map(double x) const;
    /// Relative residual |x0 - majorant_map(x0)| / x0.
    double fixed_point_residual() const;
    /// c_1 = 0, c_2, ..., c_count; c_{m+1} = majorant_map(c_m).
    std::vector<double> majorant_sequence(std::size_t count) const;
};

IterationConstants iteration_constants(const Params& params, double C);

}  // namespace wolff
