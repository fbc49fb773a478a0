#pragma once

#include <vector>

#include "wolff/measures.hpp"
#include "wolff/params.hpp"
#include "wolff/potentials.hpp"

namespace wolff {

enum class Execution { serial, parallel };

/// W^r_{alpha,p} mu at every point; the serial path is the reference.
std::vector<PotentialValue> wolff_at_points(const Measure& mu, const std::vector<Point>& xs,
                                            const Params& params, double r,
                                            Execution exec = Execution::parallel);

/// Truncated kernel int_{r_lo}^{r_hi} [mu(B_t)/t^{n-kappa}]^gamma dt/t at every point.
std::vector<PotentialValue> truncated_at_points(const Measure& mu, const std::vector<Point>& xs,
                                                double kappa, double gamma, double r_lo, double r_hi,
                                                Execution exec = Execution::parallel);

std::vector<double> dyadic_wolff_at_points(const Measure& mu, const std::vector<Point>& xs,
                                           const Params& params, GenerationWindow w,
                                           Execution exec = Execution::parallel);

}  // namespace wolff
