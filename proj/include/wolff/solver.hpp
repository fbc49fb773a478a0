#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wolff/dyadic.hpp"
#include "wolff/measures.hpp"
#include "wolff/params.hpp"
#include "wolff/potentials.hpp"

namespace wolff {

/// Nonnegative function, constant on the cells of a dyadic box.
struct GridFunction {
    CellGrid grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(CellGrid g, std::vector<double> v);

    static GridFunction zeros(const CellGrid& g);
    static GridFunction constant(const CellGrid& g, double c);
    static GridFunction indicator(const CellGrid& g, std::size_t cell, double height = 1.0);

    std::size_t size() const { return values.size(); }
    double sup() const;
    bool is_zero() const;
    /// The measure g^power dx.
    CellDensityMeasure power_measure(double power) const;
    /// Same function on the grid one generation finer.
    GridFunction refined() const;
};

/// N f = W_{alpha,p}(f^q dx) evaluated at every cell centre, summed over the window.
/// Parallel over cells; uses the aligned-cube mass pyramid of f^q.
GridFunction apply_N(const GridFunction& f, const Params& params, GenerationWindow w);

/// Serial reference for apply_N: one dyadic_wolff call per cell centre.
GridFunction apply_N_reference(const GridFunction& f, const Params& params, GenerationWindow w);

/// sup over cells of |u - N u - eps f|.
double residual(const GridFunction& u, const GridFunction& f, double eps, const Params& params,
                GenerationWindow w);

/// Dyadic pointwise constant max_x N(N f)(x) / N f(x) over cells with N f > 0.
double pointwise_constant(const GridFunction& f, const Params& params, GenerationWindow w);

enum class SolveStatus { converged, max_iterations, stagnated, diverged };
std::string to_string(SolveStatus s);

struct PicardOptions {
    std::optional<double> C;          // estimated from pointwise_constant when absent
    double safety = 1.1;              // factor applied to an estimated C
    double tol = 1e-10;
    int max_iter = 10000;
    std::optional<double> eps;        // overrides the derived eps; disables the bound checks
    double bound_slack = 1e-12;       // relative rounding allowance for the two-sided bounds
};

struct ConvergenceCertificate {
    SolveStatus status = SolveStatus::max_iterations;
    int iterations = 0;
    double sup_residual = 0.0;
    bool monotone = true;
    bool majorant_ok = true;      // u_k <= c_k N f + eps f at every step
    bool lower_ok = true;         // eps f + eps^{q/(p-1)} N f <= u from step 2 on
    bool upper_ok = true;         // u <= eps f + x0 N f
    bool bounds_checked = true;   // false when eps was overridden
    double majorant_coefficient = 0.0;
    double eps = 0.0;
    double x0 = 0.0;
    double C = 0.0;
    bool C_estimated = false;
    GenerationWindow window;
    std::vector<double> residual_history;
    std::string note;
};

struct PicardResult {
    GridFunction u;
    ConvergenceCertificate cert;
};

/// u_{k+1} = N u_k + eps f from u_0 = 0.
PicardResult picard_solve(const GridFunction& f, const Params& params, GenerationWindow w,
                          const PicardOptions& options = {});

}  // namespace wolff
