#include "wolff/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "wolff/errors.hpp"

namespace wolff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 4-point Gauss-Legendre on [-1, 1].
constexpr double kGaussNodes[4] = {-0.86113631159405258, -0.33998104358485626,
                                   0.33998104358485626, 0.86113631159405258};
constexpr double kGaussWeights[4] = {0.34785484513745386, 0.65214515486254614,
                                     0.65214515486254614, 0.34785484513745386};

// Fraction of the sphere |y - c| = s lying in the closed ball B_t(x), |x - c| = d > 0.
double sphere_fraction_in_ball(int n, double s, double d, double t) {
    const double h = (s * s + d * d - t * t) / (2.0 * s * d);  // cos of the cap angle
    if (h <= -1.0) return 1.0;
    if (h > 1.0) return 0.0;
    const double x = std::max(0.0, 1.0 - h * h);
    const double half_cap = 0.5 * boost::math::ibeta(0.5 * (n - 1), 0.5, x);
    return h >= 0.0 ? half_cap : 1.0 - half_cap;
}

// Volume of the part of a ball of radius rho beyond a hyperplane at signed distance a from its centre.
double cap_volume(int n, double rho, double a) {
    const double full = unit_ball_volume(n) * std::pow(rho, n);
    if (a >= rho) return 0.0;
    if (a <= -rho) return full;
    const double x = std::max(0.0, 1.0 - (a / rho) * (a / rho));
    const double half_cap = 0.5 * full * boost::math::ibeta(0.5 * (n + 1), 0.5, x);
    return a >= 0.0 ? half_cap : full - half_cap;
}

// Volume of {y in b : u . (y - x) <= t} for a unit vector u.
double halfspace_volume(const Box& b, std::span<const double> x, std::span<const double> u, double t) {
    const int n = b.dim();
    double s = t;
    double a_max = 0.0;
    std::vector<double> a(static_cast<std::size_t>(n));
    double extent = 1.0;
    for (int i = 0; i < n; ++i) {
        const double h = b.hi[i] - b.lo[i];
        extent *= h;
        s -= u[i] * (b.lo[i] - x[i]);
        a[i] = u[i] * h;
        if (a[i] < 0.0) {
            s -= a[i];  // reflect z -> 1 - z
            a[i] = -a[i];
        }
        a_max = std::max(a_max, a[i]);
    }
    if (a_max == 0.0) return s >= 0.0 ? extent : 0.0;
    // Axes with a negligible slope are averaged out.
    std::vector<double> kept;
    for (double ai : a) {
        if (ai < 1e-2 * a_max) s -= 0.5 * ai;
        else kept.push_back(ai);
    }
    const int m = static_cast<int>(kept.size());
    double sum_a = 0.0;
    for (double ai : kept) sum_a += ai;
    if (s <= 0.0) return 0.0;
    if (s >= sum_a) return extent;
    // Inclusion-exclusion over the vertices of the unit cube.
    double acc = 0.0;
    for (unsigned v = 0; v < (1u << m); ++v) {
        double sv = s;
        int bits = 0;
        for (int i = 0; i < m; ++i)
            if ((v >> i) & 1u) {
                sv -= kept[i];
                ++bits;
            }
        if (sv > 0.0) acc += (bits % 2 ? -1.0 : 1.0) * std::pow(sv, m);
    }
    double denom = std::tgamma(m + 1.0);
    for (double ai : kept) denom *= ai;
    return extent * std::clamp(acc / denom, 0.0, 1.0);
}

}  // namespace

double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

// --- PointMassMeasure --------------------------------------------------------

PointMassMeasure::PointMassMeasure(int n, std::vector<Atom> atoms) : n_(n), atoms_(std::move(atoms)) {
    if (n < 1) throw ConfigError("point measure: dimension must be >= 1");
    for (const auto& a : atoms_) {
        if (static_cast<int>(a.x.size()) != n) throw ConfigError("point measure: atom dimension mismatch");
        if (!(a.m >= 0.0) || !std::isfinite(a.m)) throw ConfigError("point measure: masses must be finite and >= 0");
    }
}

double PointMassMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.m;
    return s;
}

double PointMassMeasure::mass_box(const Box& b) const {
    double s = 0.0;
    for (const auto& a : atoms_)
        if (b.contains(a.x)) s += a.m;
    return s;
}

double PointMassMeasure::mass_ball(std::span<const double> x, double t) const {
    double s = 0.0;
    for (const auto& a : atoms_)
        if (distance(a.x, x) <= t) s += a.m;
    return s;
}

PointMassMeasure PointMassMeasure::translated(std::span<const double> v) const {
    std::vector<Atom> moved = atoms_;
    for (auto& a : moved)
        for (int i = 0; i < n_; ++i) a.x[i] += v[i];
    return PointMassMeasure(n_, std::move(moved));
}

// --- CellDensityMeasure ------------------------------------------------------

CellDensityMeasure::CellDensityMeasure(CellGrid grid, std::vector<double> values, int leaf_depth)
    : grid_(std::move(grid)), values_(std::move(values)), leaf_depth_(leaf_depth) {
    if (values_.size() != grid_.cell_count()) {
        throw ConfigError("cell measure: expected " + std::to_string(grid_.cell_count()) +
                          " values, got " + std::to_string(values_.size()));
    }
    for (double v : values_)
        if (!(v >= 0.0)) throw ConfigError("cell measure: values must be >= 0");
    if (leaf_depth_ < 0) throw ConfigError("cell measure: leaf depth must be >= 0");

    const int n = grid_.dim();
    const int depth = grid_.depth();
    pyramid_.resize(static_cast<std::size_t>(depth) + 1);
    pyramid_[0].resize(values_.size());
    const double vol = grid_.cell_volume();
    for (std::size_t i = 0; i < values_.size(); ++i) pyramid_[0][i] = values_[i] * vol;
    for (int j = 1; j <= depth; ++j) {
        const std::int64_t m_fine = grid_.cells_per_side() >> (j - 1);
        const std::int64_t m = m_fine >> 1;
        std::size_t count = 1;
        for (int d = 0; d < n; ++d) count *= static_cast<std::size_t>(m);
        auto& level = pyramid_[j];
        level.assign(count, 0.0);
        const auto& fine = pyramid_[j - 1];
        std::vector<std::int64_t> local(static_cast<std::size_t>(n));
        for (std::size_t f = 0; f < fine.size(); ++f) {
            std::size_t rest = f;
            std::size_t coarse = 0;
            std::size_t stride = 1;
            for (int d = 0; d < n; ++d) {
                const auto li = static_cast<std::int64_t>(rest % static_cast<std::size_t>(m_fine));
                rest /= static_cast<std::size_t>(m_fine);
                coarse += static_cast<std::size_t>(li >> 1) * stride;
                stride *= static_cast<std::size_t>(m);
            }
            level[coarse] += fine[f];
        }
    }
}

double CellDensityMeasure::total_mass() const { return pyramid_.back().front(); }

double CellDensityMeasure::mass_cube(const DyadicCube& q) const {
    const DyadicCube& box = grid_.box;
    if (q.generation >= box.generation) {
        return q == box.ancestor(q.generation) ? total_mass() : 0.0;
    }
    if (!box.contains(q)) return 0.0;
    if (q.generation < grid_.generation) {
        const DyadicCube cell = q.ancestor(grid_.generation);
        std::vector<std::int64_t> local(cell.index.size());
        for (int i = 0; i < dim(); ++i) local[i] = cell.index[i] - box.index[i] * grid_.cells_per_side();
        return values_[grid_.linear_index(local)] * q.volume();
    }
    const int j = q.generation - grid_.generation;
    const std::int64_t m = grid_.cells_per_side() >> j;
    std::size_t linear = 0;
    for (int i = dim() - 1; i >= 0; --i) {
        const std::int64_t li = q.index[i] - box.index[i] * m;
        linear = linear * static_cast<std::size_t>(m) + static_cast<std::size_t>(li);
    }
    return pyramid_[j][linear];
}

double CellDensityMeasure::mass_box(const Box& b) const {
    const int n = dim();
    const std::int64_t m = grid_.cells_per_side();
    const double h = grid_.cell_side();
    const Box outer = grid_.box.box();
    std::vector<std::int64_t> first(n), last(n);
    for (int i = 0; i < n; ++i) {
        const double lo = std::max(b.lo[i], outer.lo[i]);
        const double hi = std::min(b.hi[i], outer.hi[i]);
        if (!(hi > lo)) return 0.0;
        first[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((lo - outer.lo[i]) / h)), 0, m - 1);
        last[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil((hi - outer.lo[i]) / h)) - 1, 0, m - 1);
    }
    auto overlap = [&](int axis, std::int64_t li) {
        const double clo = outer.lo[axis] + static_cast<double>(li) * h;
        const double chi = clo + h;
        return std::max(0.0, std::min(chi, b.hi[axis]) - std::max(clo, b.lo[axis]));
    };
    std::vector<std::int64_t> idx = first;
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n && w > 0.0; ++i) w *= overlap(i, idx[i]);
        if (w > 0.0) total += w * values_[grid_.linear_index(idx)];
        int axis = 0;
        while (axis < n) {
            if (++idx[axis] <= last[axis]) break;
            idx[axis] = first[axis];
            ++axis;
        }
        if (axis == n) break;
    }
    return total;
}

double CellDensityMeasure::ball_leaf(const Box& b, double value, int depth,
                                     std::span<const double> x, double t) const {
    if (b.distance_to(x) > t) return 0.0;
    if (b.farthest_from(x) <= t) return value * b.volume();
    if (depth == 0) return distance(b.center(), x) <= t ? value * b.volume() : 0.0;
    const int n = b.dim();
    Box child = b;
    double s = 0.0;
    for (unsigned j = 0; j < (1u << n); ++j) {
        for (int i = 0; i < n; ++i) {
            const double mid = 0.5 * (b.lo[i] + b.hi[i]);
            if ((j >> i) & 1u) {
                child.lo[i] = mid;
                child.hi[i] = b.hi[i];
            } else {
                child.lo[i] = b.lo[i];
                child.hi[i] = mid;
            }
        }
        s += ball_leaf(child, value, depth - 1, x, t);
    }
    return s;
}

int CellDensityMeasure::cut_depth(const Box& cell, std::span<const double> x) const {
    const double dc = distance(cell.center(), x);
    const double diam = cell.diameter();
    if (dc >= kPlanarDistance * diam) return -1;
    if (dc >= diam) return std::max(0, leaf_depth_ - 1);
    return leaf_depth_;
}

Box CellDensityMeasure::node_box(int level, const std::vector<std::int64_t>& local) const {
    const int n = dim();
    const double side = std::ldexp(1.0, grid_.generation + level);
    Box b;
    b.lo.resize(n);
    b.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        b.lo[i] = grid_.box.lower(i) + static_cast<double>(local[i]) * side;
        b.hi[i] = b.lo[i] + side;
    }
    return b;
}

std::size_t CellDensityMeasure::node_linear(int level, const std::vector<std::int64_t>& local) const {
    const std::int64_t m = grid_.cells_per_side() >> level;
    std::size_t linear = 0;
    for (int i = dim() - 1; i >= 0; --i)
        linear = linear * static_cast<std::size_t>(m) + static_cast<std::size_t>(local[i]);
    return linear;
}

double CellDensityMeasure::ball_node(int level, std::vector<std::int64_t>& local,
                                     std::span<const double> x, double t) const {
    const int n = dim();
    const std::size_t linear = node_linear(level, local);
    const double mass = pyramid_[level][linear];
    if (mass == 0.0) return 0.0;
    const Box b = node_box(level, local);
    if (b.distance_to(x) > t) return 0.0;
    if (b.farthest_from(x) <= t) return mass;
    if (level == 0) {
        const int depth = cut_depth(b, x);
        if (depth < 0) {
            const Point c = b.center();
            const double dc = distance(c, x);
            Point u(c.size());
            for (int i = 0; i < n; ++i) u[i] = (c[i] - x[i]) / dc;
            return values_[linear] * halfspace_volume(b, x, u, t);
        }
        return ball_leaf(b, values_[linear], depth, x, t);
    }
    double s = 0.0;
    std::vector<std::int64_t> child(local.size());
    for (unsigned j = 0; j < (1u << n); ++j) {
        for (int i = 0; i < n; ++i) child[i] = 2 * local[i] + ((j >> i) & 1u);
        s += ball_node(level - 1, child, x, t);
    }
    return s;
}

double CellDensityMeasure::mass_ball(std::span<const double> x, double t) const {
    std::vector<std::int64_t> root(static_cast<std::size_t>(dim()), 0);
    return ball_node(grid_.depth(), root, x, t);
}

void CellDensityMeasure::balls_node(int level, std::vector<std::int64_t>& local, std::span<const double> x,
                                    std::span<const double> ts, std::vector<double>& step,
                                    std::vector<double>& direct) const {
    const int n = dim();
    const std::size_t linear = node_linear(level, local);
    const double mass = pyramid_[level][linear];
    if (mass == 0.0) return;
    const Box b = node_box(level, local);
    const auto lo = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), b.distance_to(x)) - ts.begin());
    const auto full = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), b.farthest_from(x)) - ts.begin());
    if (level > 0 && lo < full) {
        std::vector<std::int64_t> child(local.size());
        for (unsigned j = 0; j < (1u << n); ++j) {
            for (int i = 0; i < n; ++i) child[i] = 2 * local[i] + ((j >> i) & 1u);
            balls_node(level - 1, child, x, ts, step, direct);
        }
        return;
    }
    step[full] += mass;
    if (lo == full) return;

    const double value = values_[linear];
    const int depth = cut_depth(b, x);
    if (depth < 0) {
        const Point c = b.center();
        const double dc = distance(c, x);
        Point u(c.size());
        for (int i = 0; i < n; ++i) u[i] = (c[i] - x[i]) / dc;
        for (std::size_t k = lo; k < full; ++k) direct[k] += value * halfspace_volume(b, x, u, ts[k]);
        return;
    }
    // Centre rule on the 2^depth sub-grid: sorted sub-centre distances answer every radius.
    const std::int64_t per = std::int64_t{1} << depth;
    const double h = (b.hi[0] - b.lo[0]) / static_cast<double>(per);
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(per);
    std::vector<double> dist(count);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t c = 0; c < count; ++c) {
        double d2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double y = b.lo[i] + (static_cast<double>(idx[i]) + 0.5) * h - x[i];
            d2 += y * y;
        }
        dist[c] = std::sqrt(d2);
        for (int i = 0; i < n; ++i) {
            if (++idx[i] < per) break;
            idx[i] = 0;
        }
    }
    std::sort(dist.begin(), dist.end());
    const double sub_mass = value * std::pow(h, n);
    for (std::size_t k = lo; k < full; ++k) {
        const auto inside = std::upper_bound(dist.begin(), dist.end(), ts[k]) - dist.begin();
        direct[k] += sub_mass * static_cast<double>(inside);
    }
}

std::vector<double> CellDensityMeasure::mass_balls(std::span<const double> x, std::span<const double> ts) const {
    if (!std::is_sorted(ts.begin(), ts.end())) throw ConfigError("mass_balls: radii must be ascending");
    std::vector<double> step(ts.size() + 1, 0.0), out(ts.size(), 0.0);
    std::vector<std::int64_t> root(static_cast<std::size_t>(dim()), 0);
    balls_node(grid_.depth(), root, x, ts, step, out);
    double acc = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        acc += step[k];
        out[k] += acc;
    }
    return out;
}

double CellDensityMeasure::density_at(std::span<const double> x) const {
    const auto cell = grid_.cell_containing(x);
    return cell ? values_[*cell] : 0.0;
}

double CellDensityMeasure::uniform_radius(std::span<const double> x) const {
    const Box outer = grid_.box.box();
    const auto cell = grid_.cell_containing(x);
    if (!cell) return outer.distance_to(x);
    const Box c = grid_.cell(*cell).box();
    double r = kInf;
    for (int i = 0; i < dim(); ++i) r = std::min({r, x[i] - c.lo[i], c.hi[i] - x[i]});
    return std::max(0.0, r);
}

// --- RadialPowerMeasure ------------------------------------------------------

RadialPowerMeasure::RadialPowerMeasure(int n, double a, double gamma, double R, Point center)
    : n_(n), a_(a), gamma_(gamma), R_(R), center_(std::move(center)) {
    if (n < 1) throw ConfigError("radial_power: dimension must be >= 1");
    if (center_.empty()) center_.assign(static_cast<std::size_t>(n), 0.0);
    if (static_cast<int>(center_.size()) != n) throw ConfigError("radial_power: center dimension mismatch");
    if (!(a >= 0.0)) throw ConfigError("radial_power: amplitude must be >= 0");
    if (!(gamma < n)) throw ConfigError("radial_power: gamma < n required for local integrability");
    if (!(R > 0.0)) throw ConfigError("radial_power: R must be > 0");
}

bool RadialPowerMeasure::bounded() const { return std::isfinite(R_); }

double RadialPowerMeasure::centered_mass(double t) const {
    if (a_ == 0.0 || t <= 0.0) return 0.0;
    const double s = std::min(t, R_);
    return a_ * unit_sphere_area(n_) * std::pow(s, n_ - gamma_) / (n_ - gamma_);
}

double RadialPowerMeasure::total_mass() const {
    if (a_ == 0.0) return 0.0;
    return bounded() ? centered_mass(R_) : kInf;
}

double RadialPowerMeasure::density_at(std::span<const double> x) const {
    const double d = distance(center_, x);
    if (d > R_) return 0.0;
    return d == 0.0 ? kInf : a_ * std::pow(d, -gamma_);
}

double RadialPowerMeasure::mass_ball(std::span<const double> x, double t) const {
    if (a_ == 0.0 || t <= 0.0) return 0.0;
    const double d = distance(center_, x);
    if (d == 0.0) return centered_mass(t);
    double total = 0.0;
    if (gamma_ == 0.0 && n_ >= 2) {
        // Uniform density: the lens volume of two balls is a sum of two caps.
        const double R = R_;
        if (d >= R + t) return 0.0;
        if (d + t <= R) return a_ * unit_ball_volume(n_) * std::pow(t, n_);
        if (d + R <= t) return total_mass();
        const double a1 = (d * d + R * R - t * t) / (2.0 * d);
        return a_ * (cap_volume(n_, R, a1) + cap_volume(n_, t, d - a1));
    }
    if (t > d) total += centered_mass(t - d);
    const double lo = std::abs(d - t);
    const double hi = std::min(R_, d + t);
    if (hi > lo) {
        const double sigma = unit_sphere_area(n_);
        auto integrand = [&](double s) {
            if (s <= 0.0) return 0.0;
            return a_ * sigma * std::pow(s, n_ - 1 - gamma_) * sphere_fraction_in_ball(n_, s, d, t);
        };
        if (n_ == 1) {
            // The "sphere" is {c - s, c + s}; for s in (lo, hi] only the point towards x is inside.
            total += a_ * (std::pow(hi, 1.0 - gamma_) - std::pow(lo, 1.0 - gamma_)) / (1.0 - gamma_);
        } else {
            boost::math::quadrature::tanh_sinh<double> integrator;
            total += integrator.integrate(integrand, lo, hi, 1e-10);
        }
    }
    return total;
}

double RadialPowerMeasure::mass_box(const Box& b) const {
    if (a_ == 0.0) return 0.0;
    const int n = n_;
    constexpr int kMaxSingularDepth = 200;
    const double negligible = 1e-13 * centered_mass(std::min(R_, b.farthest_from(center_)));
    const int max_rim_depth = n <= 2 ? 8 : (n == 3 ? 5 : 2);

    // Iterated 4-point rule; every axis is clipped to the chord of the support ball left
    // by the earlier coordinates, so the rim only enters through interval endpoints.
    Point y(static_cast<std::size_t>(n));
    auto gauss = [&](const Box& box) {
        auto axis = [&](auto&& self, int i, double rho2) -> double {
            double lo = box.lo[i], hi = box.hi[i];
            bool cut_lo = false, cut_hi = false;
            if (bounded()) {
                const double h = std::sqrt(std::max(0.0, R_ * R_ - rho2));
                cut_lo = center_[i] - h > lo;
                cut_hi = center_[i] + h < hi;
                lo = std::max(lo, center_[i] - h);
                hi = std::min(hi, center_[i] + h);
            }
            if (!(hi > lo)) return 0.0;
            const double len = hi - lo;
            double s = 0.0;
            for (int g = 0; g < 4; ++g) {
                // Square-root endpoints at chord ends are smoothed by y = lo + len phi(u).
                const double u = 0.5 * (1.0 + kGaussNodes[g]);
                double phi = u, dphi = 1.0;
                if (cut_lo && cut_hi) {
                    phi = u * u * (3.0 - 2.0 * u);
                    dphi = 6.0 * u * (1.0 - u);
                } else if (cut_lo) {
                    phi = u * u;
                    dphi = 2.0 * u;
                } else if (cut_hi) {
                    phi = 1.0 - (1.0 - u) * (1.0 - u);
                    dphi = 2.0 * (1.0 - u);
                }
                y[i] = lo + len * phi;
                const double w = 0.5 * kGaussWeights[g] * dphi;
                const double d2 = rho2 + (y[i] - center_[i]) * (y[i] - center_[i]);
                if (i + 1 < n) {
                    s += w * self(self, i + 1, d2);
                } else if (d2 > 0.0) {
                    s += w * std::pow(d2, -0.5 * gamma_);
                }
            }
            return len * s;
        };
        return a_ * axis(axis, 0, 0.0);
    };

    auto visit = [&](auto&& self, const Box& box, int depth) -> double {
        const double nearest = box.distance_to(center_);
        if (nearest > R_) return 0.0;
        if (bounded()) {
            bool holds_support = true;
            for (int i = 0; i < n && holds_support; ++i)
                holds_support = box.lo[i] <= center_[i] - R_ && center_[i] + R_ <= box.hi[i];
            if (holds_support) return total_mass();
        }
        const double farthest = box.farthest_from(center_);
        const double diam = box.diameter();
        const bool rim = bounded() && farthest > R_;
        bool near_singular = gamma_ > 0.0 && nearest < 2.0 * diam;
        if (near_singular && centered_mass(nearest + diam) <= negligible) {
            // The box lies in a ball of negligible mass.
            if (nearest > 0.0 || rim) return gauss(box);
            return centered_mass(std::pow(box.volume() / unit_ball_volume(n), 1.0 / n));
        }
        const bool split = (near_singular && depth < kMaxSingularDepth) || (rim && depth < max_rim_depth);
        if (!split) return gauss(box);
        Box child = box;
        double s = 0.0;
        for (unsigned j = 0; j < (1u << n); ++j) {
            for (int i = 0; i < n; ++i) {
                const double mid = 0.5 * (box.lo[i] + box.hi[i]);
                child.lo[i] = (j >> i) & 1u ? mid : box.lo[i];
                child.hi[i] = (j >> i) & 1u ? box.hi[i] : mid;
            }
            s += self(self, child, depth + 1);
        }
        return s;
    };
    return visit(visit, b, 0);
}

// --- Measure -----------------------------------------------------------------

Measure Measure::dirac(Point x, double m) {
    const int n = static_cast<int>(x.size());
    return PointMassMeasure(n, {Atom{std::move(x), m}});
}

int Measure::dim() const {
    return std::visit([](const auto& m) { return m.dim(); }, v_);
}

double Measure::total_mass() const {
    return std::visit([](const auto& m) { return m.total_mass(); }, v_);
}

bool Measure::is_zero() const { return total_mass() == 0.0; }

std::optional<Box> Measure::support_box() const {
    if (const auto* pm = points()) {
        std::optional<Box> out;
        for (const auto& a : pm->atoms()) {
            if (a.m == 0.0) continue;
            if (!out) {
                out = Box{a.x, a.x};
                continue;
            }
            for (int i = 0; i < pm->dim(); ++i) {
                out->lo[i] = std::min(out->lo[i], a.x[i]);
                out->hi[i] = std::max(out->hi[i], a.x[i]);
            }
        }
        return out;
    }
    if (const auto* cm = cells()) {
        if (cm->total_mass() == 0.0) return std::nullopt;
        return cm->grid().box.box();
    }
    const auto* rm = radial();
    if (rm->amplitude() == 0.0 || !rm->bounded()) return std::nullopt;
    Box b{rm->center(), rm->center()};
    for (int i = 0; i < rm->dim(); ++i) {
        b.lo[i] -= rm->outer_radius();
        b.hi[i] += rm->outer_radius();
    }
    return b;
}

double Measure::mass_cube(const DyadicCube& q) const {
    if (const auto* cm = cells()) return cm->mass_cube(q);
    return mass_box(q.box());
}

double Measure::mass_box(const Box& b) const {
    return std::visit([&](const auto& m) { return m.mass_box(b); }, v_);
}

double Measure::mass_ball(std::span<const double> x, double t) const {
    return std::visit([&](const auto& m) { return m.mass_ball(x, t); }, v_);
}

Measure Measure::scaled(double lambda) const {
    if (!(lambda >= 0.0)) throw ConfigError("measure scaling factor must be >= 0");
    if (const auto* pm = points()) {
        auto atoms = pm->atoms();
        for (auto& a : atoms) a.m *= lambda;
        return PointMassMeasure(pm->dim(), std::move(atoms));
    }
    if (const auto* cm = cells()) {
        auto values = cm->values();
        for (auto& v : values) v *= lambda;
        return CellDensityMeasure(cm->grid(), std::move(values), cm->leaf_depth());
    }
    const auto* rm = radial();
    return RadialPowerMeasure(rm->dim(), rm->amplitude() * lambda, rm->gamma(), rm->outer_radius(),
                              rm->center());
}

Measure restrict(const Measure& mu, const Ball& ball) {
    if (ball.dim() != mu.dim()) throw ConfigError("restrict: ball dimension mismatch");
    if (const auto* pm = mu.points()) {
        std::vector<Atom> kept;
        for (const auto& a : pm->atoms())
            if (ball.contains(a.x)) kept.push_back(a);
        return PointMassMeasure(pm->dim(), std::move(kept));
    }
    if (const auto* cm = mu.cells()) {
        auto values = cm->values();
        const auto& grid = cm->grid();
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!ball.contains(grid.cell_center(i))) values[i] = 0.0;
        return CellDensityMeasure(grid, std::move(values), cm->leaf_depth());
    }
    const auto* rm = mu.radial();
    const double d = distance(rm->center(), ball.center);
    if (d == 0.0) {
        return RadialPowerMeasure(rm->dim(), rm->amplitude(), rm->gamma(),
                                  std::min(rm->outer_radius(), ball.radius), rm->center());
    }
    if (d >= ball.radius + rm->outer_radius()) return Measure::zero(mu.dim());
    if (rm->bounded() && d + rm->outer_radius() <= ball.radius) return mu;
    throw ConfigError("restrict: off-centre ball restriction of a radial_power measure; discretize it first");
}

Measure restrict(const Measure& mu, const DyadicCube& q) {
    if (q.dim() != mu.dim()) throw ConfigError("restrict: cube dimension mismatch");
    if (const auto* pm = mu.points()) {
        std::vector<Atom> kept;
        for (const auto& a : pm->atoms())
            if (q.contains(a.x)) kept.push_back(a);
        return PointMassMeasure(pm->dim(), std::move(kept));
    }
    if (const auto* cm = mu.cells()) {
        const auto& grid = cm->grid();
        if (q.generation < grid.generation) {
            throw ConfigError("restrict: cube below the cell resolution of a cell measure");
        }
        auto values = cm->values();
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!q.contains(grid.cell(i))) values[i] = 0.0;
        return CellDensityMeasure(grid, std::move(values), cm->leaf_depth());
    }
    const auto support = mu.support_box();
    if (!support) return mu;
    const Box qb = q.box();
    bool inside = true;
    bool disjoint = false;
    for (int i = 0; i < q.dim(); ++i) {
        if (support->lo[i] < qb.lo[i] || support->hi[i] >= qb.hi[i]) inside = false;
        if (support->hi[i] <= qb.lo[i] || support->lo[i] >= qb.hi[i]) disjoint = true;
    }
    if (inside) return mu;
    if (disjoint) return Measure::zero(mu.dim());
    throw ConfigError("restrict: cube cuts a radial_power measure; discretize it first");
}

CellDensityMeasure discretize(const Measure& mu, const CellGrid& grid) {
    std::vector<double> values(grid.cell_count());
    const double vol = grid.cell_volume();
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = mu.mass_cube(grid.cell(i)) / vol;
    return CellDensityMeasure(grid, std::move(values));
}

}  // namespace wolff
