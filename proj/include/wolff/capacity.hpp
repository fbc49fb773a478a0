#pragma once

#include <string>
#include <vector>

#include "wolff/dyadic.hpp"
#include "wolff/measures.hpp"
#include "wolff/params.hpp"
#include "wolff/verifiers.hpp"

namespace wolff {

/// Exponents of the capacity Cap_{I_{ap}, s}, s = q/(q-p+1), and of its Wolff potential
/// W_{ap, s}: kappa = ap s, gamma = 1/(s-1).
struct CapacityIndices {
    double order = 0.0;   // ap
    double s = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
};
CapacityIndices capacity_indices(const Params& params);

struct CapacityEstimate {
    double value = 0.0;          // trial mass / M^{s-1}
    double max_potential = 0.0;  // M = max of W^{4R} over the sampled support
    double trial_mass = 0.0;
    std::size_t samples = 0;
    std::string note;
};

/// Dual lower bound for Cap(E): the trial measure rescaled so that W^{4R}_{ap,s} <= 1 on
/// its support, sampled at atoms or at the centres of cells carrying mass.
/// E is a union of closed boxes that must contain the sampled support.
CapacityEstimate riesz_capacity_lower(const std::vector<Box>& E, const Measure& trial, const Params& params,
                                      double R);

struct EnergyEstimate {
    double value = 0.0;
    std::string divergence;
    std::size_t cells = 0;
};

/// int [I^{2R}_{ap} mu]^{q/(p-1)} dx by cell centres of the dyadic cells of the given
/// generation covering the support enlarged by 2R.
EnergyEstimate bessel_energy(const Measure& mu, const Params& params, double R, int cell_generation);

/// Log-log slope of riesz_capacity_lower over the cubes [0, lambda)^n with uniform trial
/// measures (cells 2^cell_depth per side); lambdas must be powers of two.
/// best_constant is |slope - (n - ap q/(q-p+1))|.
VerifierReport capacity_scaling_check(const Params& params, const std::vector<double>& lambdas,
                                      int cell_depth = 3);

}  // namespace wolff
