#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wolff {

using Point = std::vector<double>;

double distance(std::span<const double> a, std::span<const double> b);

/// Axis-aligned box [lo, hi), half-open per coordinate.
struct Box {
    Point lo;
    Point hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const;
    double diameter() const;
    Point center() const;
    bool empty() const;
    bool contains(std::span<const double> x) const;
    /// Distance from x to the closed box (0 inside).
    double distance_to(std::span<const double> x) const;
    /// Largest distance from x to a point of the closed box.
    double farthest_from(std::span<const double> x) const;
};

struct Ball {
    Point center;
    double radius = 0.0;

    int dim() const { return static_cast<int>(center.size()); }
    bool contains(std::span<const double> x) const;  // closed
};

/// Dyadic cube 2^generation (index + [0,1)^n).
struct DyadicCube {
    int generation = 0;
    std::vector<std::int64_t> index;

    int dim() const { return static_cast<int>(index.size()); }
    double side() const;
    double volume() const;
    double diameter() const;
    double lower(int axis) const;
    double upper(int axis) const;
    Box box() const;
    Point center() const;
    bool contains(std::span<const double> x) const;
    /// True when `other` is this cube or one of its descendants.
    bool contains(const DyadicCube& other) const;
    DyadicCube parent() const;
    /// Child j in [0, 2^n): bit d of j selects the upper half along axis d.
    DyadicCube child(unsigned j) const;
    /// Ancestor at generation g >= this->generation.
    DyadicCube ancestor(int g) const;

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Largest |index| handled; beyond it double-precision floors stop being exact.
inline constexpr double kMaxIndexMagnitude = 9007199254740992.0;  // 2^53

DyadicCube cube_containing(std::span<const double> x, int generation);

/// Q, parent(Q), ... up to generation `up_to_generation` (inclusive).
std::vector<DyadicCube> ancestors(const DyadicCube& q, int up_to_generation);

/// Dyadic lattice translated by a shift vector t: cubes t + 2^i (k + [0,1)^n).
struct ShiftedLattice {
    Point shift;

    DyadicCube base_cube(std::span<const double> x, int generation) const;
    Box cube_box(std::span<const double> x, int generation) const;
};

/// Uniform partition of a dyadic box into cells of side 2^generation.
struct CellGrid {
    DyadicCube box;
    int generation = 0;

    CellGrid() = default;
    CellGrid(DyadicCube box_cube, int cell_generation);

    int dim() const { return box.dim(); }
    int depth() const { return box.generation - generation; }
    std::int64_t cells_per_side() const { return std::int64_t{1} << depth(); }
    std::size_t cell_count() const;
    double cell_side() const;
    double cell_volume() const;

    /// Axis 0 varies fastest in the linear index.
    std::vector<std::int64_t> multi_index(std::size_t linear) const;
    std::size_t linear_index(std::span<const std::int64_t> local) const;
    DyadicCube cell(std::size_t linear) const;
    Point cell_center(std::size_t linear) const;
    std::optional<std::size_t> cell_containing(std::span<const double> x) const;
    /// The same box partitioned one generation finer.
    CellGrid refined() const { return CellGrid(box, generation - 1); }

    friend bool operator==(const CellGrid&, const CellGrid&) = default;
};

struct WhitneyDecomposition {
    std::vector<DyadicCube> cubes;
    int min_generation = 0;
    double covered_volume = 0.0;
    double uncovered_volume = 0.0;  // part of the domain too close to the boundary to resolve
};

inline constexpr double kWhitneyLower = 32.0;   // 2^5 diam(Q) <= dist(Q, boundary)
inline constexpr double kWhitneyUpper = 128.0;  // dist(Q, boundary) <= 2^7 diam(Q)

/// Distance from a cube inside `domain` to the domain boundary.
double boundary_distance(const Box& domain, const DyadicCube& q);

/// Maximal dyadic cubes Q inside the box with 2^5 diam(Q) <= dist(Q, boundary),
/// restricted to generations >= min_generation.
WhitneyDecomposition whitney_decompose(const Box& domain, int min_generation);

}  // namespace wolff
