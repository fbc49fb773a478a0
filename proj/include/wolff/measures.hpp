#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "wolff/dyadic.hpp"

namespace wolff {

/// Surface area of the unit sphere S^{n-1} (2 for n = 1).
double unit_sphere_area(int n);
/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

struct Atom {
    Point x;
    double m = 0.0;
};

/// Finite sum of weighted Dirac masses.
class PointMassMeasure {
public:
    PointMassMeasure() = default;
    PointMassMeasure(int n, std::vector<Atom> atoms);

    int dim() const { return n_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double total_mass() const;

    double mass_box(const Box& b) const;           // half-open membership
    double mass_ball(std::span<const double> x, double t) const;  // closed ball

    PointMassMeasure translated(std::span<const double> v) const;

private:
    int n_ = 0;
    std::vector<Atom> atoms_;
};

/// dmu = f dx with f constant on the cells of a dyadic box.
class CellDensityMeasure {
public:
    /// Sub-cell refinement levels used to resolve cells cut by a ball boundary.
    static constexpr int kDefaultLeafDepth = 3;
    /// Cut cells at least this many diameters from the centre use a flat-boundary cut.
    static constexpr double kPlanarDistance = 2.0;

    CellDensityMeasure() = default;
    CellDensityMeasure(CellGrid grid, std::vector<double> values, int leaf_depth = kDefaultLeafDepth);

    int dim() const { return grid_.dim(); }
    const CellGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    int leaf_depth() const { return leaf_depth_; }
    double total_mass() const;

    /// Exact for every dyadic cube (aligned, sub-cell or super-box).
    double mass_cube(const DyadicCube& q) const;
    /// Exact overlap volumes times cell values.
    double mass_box(const Box& b) const;
    /// Cut cells far from x are cut by the tangent plane of the sphere; nearer ones
    /// by the centre rule on a 2^leaf_depth sub-grid (one level coarser beyond one
    /// cell diameter).  Monotone in t.
    double mass_ball(std::span<const double> x, double t) const;
    /// mass_ball at every radius of an ascending list, in one pass over the pyramid.
    std::vector<double> mass_balls(std::span<const double> x, std::span<const double> ts) const;

    /// Density at x (0 outside the box).
    double density_at(std::span<const double> x) const;
    /// Radius below which B_t(x) stays inside one cell (0 on a cell face).
    double uniform_radius(std::span<const double> x) const;

private:
    double ball_node(int level, std::vector<std::int64_t>& local, std::span<const double> x,
                     double t) const;
    double ball_leaf(const Box& b, double value, int depth, std::span<const double> x,
                     double t) const;
    void balls_node(int level, std::vector<std::int64_t>& local, std::span<const double> x,
                    std::span<const double> ts, std::vector<double>& step, std::vector<double>& direct) const;
    int cut_depth(const Box& cell, std::span<const double> x) const;  // -1: planar cut
    Box node_box(int level, const std::vector<std::int64_t>& local) const;
    std::size_t node_linear(int level, const std::vector<std::int64_t>& local) const;

    CellGrid grid_;
    std::vector<double> values_;
    int leaf_depth_ = kDefaultLeafDepth;
    // pyramid_[j] holds masses of the aligned cubes of generation grid.generation + j.
    std::vector<std::vector<double>> pyramid_;
};

/// dmu = a |x - center|^{-gamma} dx on the ball B_R(center); R may be +inf.
class RadialPowerMeasure {
public:
    RadialPowerMeasure() = default;
    RadialPowerMeasure(int n, double a, double gamma, double R, Point center = {});

    int dim() const { return n_; }
    double amplitude() const { return a_; }
    double gamma() const { return gamma_; }
    double outer_radius() const { return R_; }
    const Point& center() const { return center_; }
    bool bounded() const;
    double total_mass() const;

    /// Closed form for balls centred at `center`; radial-angular quadrature otherwise.
    double mass_ball(std::span<const double> x, double t) const;
    /// Mass of the centred ball B_t(center).
    double centered_mass(double t) const;
    /// Adaptive tensor Gauss-Legendre cubature, refined near the singularity and the rim.
    double mass_box(const Box& b) const;
    double density_at(std::span<const double> x) const;

private:
    int n_ = 0;
    double a_ = 0.0;
    double gamma_ = 0.0;
    double R_ = 0.0;
    Point center_;
};

/// A nonnegative measure from one of the three concrete families.
class Measure {
public:
    using Variant = std::variant<PointMassMeasure, CellDensityMeasure, RadialPowerMeasure>;

    Measure() = default;
    Measure(PointMassMeasure m) : v_(std::move(m)) {}
    Measure(CellDensityMeasure m) : v_(std::move(m)) {}
    Measure(RadialPowerMeasure m) : v_(std::move(m)) {}

    static Measure zero(int n) { return PointMassMeasure(n, {}); }
    static Measure dirac(Point x, double m = 1.0);

    const Variant& variant() const { return v_; }
    const PointMassMeasure* points() const { return std::get_if<PointMassMeasure>(&v_); }
    const CellDensityMeasure* cells() const { return std::get_if<CellDensityMeasure>(&v_); }
    const RadialPowerMeasure* radial() const { return std::get_if<RadialPowerMeasure>(&v_); }

    int dim() const;
    double total_mass() const;
    bool is_zero() const;
    /// Closed box containing the support, if the support is bounded and nonempty.
    std::optional<Box> support_box() const;

    double mass_cube(const DyadicCube& q) const;
    double mass_box(const Box& b) const;
    double mass_ball(std::span<const double> x, double t) const;

    Measure scaled(double lambda) const;

private:
    Variant v_;
};

/// mu restricted to a closed ball.  Cell densities are restricted cell by cell
/// (cells whose centre lies in the ball); radial measures only to concentric balls.
Measure restrict(const Measure& mu, const Ball& ball);
/// mu restricted to a dyadic cube.  Cell densities require Q at or above the
/// cell generation.
Measure restrict(const Measure& mu, const DyadicCube& q);

/// Cell averages of mu on a grid.
CellDensityMeasure discretize(const Measure& mu, const CellGrid& grid);

}  // namespace wolff
