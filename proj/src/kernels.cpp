#include "wolff/kernels.hpp"

#include <exception>

namespace wolff {

namespace {

// Runs body(i) for i < count, rethrowing the first exception raised by a worker.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body body) {
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(wolff_kernel_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<PotentialValue> truncated_at_points(const Measure& mu, const std::vector<Point>& xs,
                                                double kappa, double gamma, double r_lo, double r_hi,
                                                Execution exec) {
    std::vector<PotentialValue> out(xs.size());
    for_each_index(xs.size(), exec,
                   [&](std::size_t i) { out[i] = truncated_potential(mu, xs[i], kappa, gamma, r_lo, r_hi); });
    return out;
}

std::vector<PotentialValue> wolff_at_points(const Measure& mu, const std::vector<Point>& xs,
                                            const Params& params, double r, Execution exec) {
    return truncated_at_points(mu, xs, params.alpha_p(), 1.0 / (params.p - 1.0), 0.0, r, exec);
}

std::vector<double> dyadic_wolff_at_points(const Measure& mu, const std::vector<Point>& xs,
                                           const Params& params, GenerationWindow w, Execution exec) {
    std::vector<double> out(xs.size());
    for_each_index(xs.size(), exec, [&](std::size_t i) { out[i] = dyadic_wolff(mu, xs[i], params, w); });
    return out;
}

}  // namespace wolff
