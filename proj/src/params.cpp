#include "wolff/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wolff/errors.hpp"

namespace wolff {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void Params::require_global() const {
    if (local_only) {
        throw RegimeError("alpha*p >= n (" + fmt(alpha_p()) + " >= " + std::to_string(n) +
                          "): operation needs the global regime alpha*p < n");
    }
}

std::string Params::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n << ",alpha=" << alpha << ",p=" << p << ",q=" << q;
    if (kind == OperatorKind::hessian) os << ",k=" << k;
    return os.str();
}

Params make_params(int n, double alpha, double p, double q) {
    // n = 1 is accepted: the one-dimensional discrete model is the solver's test bed.
    if (n < 1) throw RegimeError("n >= 1 required, got " + std::to_string(n));
    if (!(alpha > 0.0)) throw RegimeError("alpha > 0 required, got " + fmt(alpha));
    if (!(p > 1.0)) throw RegimeError("p <= 1 (p=" + fmt(p) + ")");
    if (!(q > p - 1.0)) throw RegimeError("q <= p-1 (q=" + fmt(q) + ", p-1=" + fmt(p - 1.0) + ")");
    Params out;
    out.n = n;
    out.alpha = alpha;
    out.p = p;
    out.q = q;
    out.p_prime = p / (p - 1.0);
    out.local_only = !(alpha * p < n);
    return out;
}

Params hessian_params(int n, int k, double q) {
    if (k < 1 || k > n) {
        throw RegimeError("k out of range: need 1 <= k <= n, got k=" + std::to_string(k) +
                          ", n=" + std::to_string(n));
    }
    if (!(q > k)) throw RegimeError("q <= k (q=" + fmt(q) + ", k=" + std::to_string(k) + ")");
    Params out = make_params(n, 2.0 * k / (k + 1.0), k + 1.0, q);
    out.kind = OperatorKind::hessian;
    out.k = k;
    // alpha*p = 2k exactly; keep the flag free of rounding in 2k/(k+1)*(k+1).
    out.local_only = !(2 * k < n);
    return out;
}

CriticalExponents critical_exponents(const Params& params) {
    if (params.local_only) {
        throw RegimeError("no critical exponent; Liouville regime (alpha*p >= n)");
    }
    CriticalExponents out;
    if (params.kind == OperatorKind::hessian) {
        const double n = params.n;
        const double k = params.k;
        out.q_star = n * k / (n - 2.0 * k);
        return out;
    }
    const double n = params.n;
    const double p = params.p;
    out.q_star = n * (p - 1.0) / (n - params.alpha_p());
    if (params.alpha == 1.0) out.q_star_star = (n * (p - 1.0) + p) / (n - p);
    return out;
}

double subadditivity_constant(double p) {
    const double p_prime = p / (p - 1.0);
    return std::max(1.0, std::pow(2.0, p_prime - 2.0));
}

bool IterationConstants::unconstrained() const { return std::isinf(eps); }

double IterationConstants::majorant_map(double x) const {
    return std::pow(a * (1.0 + std::pow(C, 1.0 / q) * std::pow(x, 1.0 / (p - 1.0))), q);
}

double IterationConstants::fixed_point_residual() const {
    return std::abs(x0 - majorant_map(x0)) / x0;
}

std::vector<double> IterationConstants::majorant_sequence(std::size_t count) const {
    std::vector<double> out;
    out.reserve(count);
    double c = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(c);
        c = majorant_map(c);
    }
    return out;
}

IterationConstants iteration_constants(const Params& params, double C) {
    if (!(C >= 0.0)) throw RegimeError("C >= 0 required, got " + fmt(C));
    const double p = params.p;
    const double q = params.q;
    IterationConstants out;
    out.C = C;
    out.p = p;
    out.q = q;
    out.cp = subadditivity_constant(p);
    if (C == 0.0) {
        out.eps = std::numeric_limits<double>::infinity();
        out.x0 = std::numeric_limits<double>::infinity();
        out.a = std::numeric_limits<double>::infinity();
        return out;
    }
    const double r = q - p + 1.0;
    // eps^{1/(p-1)} c(p)
    const double a = std::pow(r / q, r / q) * std::pow((p - 1.0) / q, (p - 1.0) / q) *
                     std::pow(C, (1.0 - p) / (q * q));
    out.a = a;
    out.eps = std::pow(a / out.cp, p - 1.0);
    out.x0 = std::pow(q / (p - 1.0) * a * std::pow(C, 1.0 / q), q * (p - 1.0) / (p - 1.0 - q));
    return out;
}

}  // namespace wolff
