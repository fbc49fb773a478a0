#include "wolff/dyadic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "wolff/errors.hpp"

namespace wolff {

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// --- Box -------------------------------------------------------------------

double Box::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
    return v;
}

double Box::diameter() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s);
}

Point Box::center() const {
    Point c(lo.size());
    for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

bool Box::empty() const {
    if (lo.empty() || lo.size() != hi.size()) return true;
    for (int i = 0; i < dim(); ++i)
        if (!(hi[i] > lo[i])) return true;
    return false;
}

bool Box::contains(std::span<const double> x) const {
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lo[i] || x[i] >= hi[i]) return false;
    return true;
}

double Box::distance_to(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
        double d = 0.0;
        if (x[i] < lo[i]) d = lo[i] - x[i];
        else if (x[i] > hi[i]) d = x[i] - hi[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double Box::farthest_from(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
        const double d = std::max(std::abs(x[i] - lo[i]), std::abs(x[i] - hi[i]));
        s += d * d;
    }
    return std::sqrt(s);
}

bool Ball::contains(std::span<const double> x) const {
    return distance(center, x) <= radius;
}

// --- DyadicCube ------------------------------------------------------------

double DyadicCube::side() const { return std::ldexp(1.0, generation); }

double DyadicCube::volume() const { return std::ldexp(1.0, generation * dim()); }

double DyadicCube::diameter() const { return side() * std::sqrt(static_cast<double>(dim())); }

double DyadicCube::lower(int axis) const {
    return std::ldexp(static_cast<double>(index[axis]), generation);
}

double DyadicCube::upper(int axis) const {
    return std::ldexp(static_cast<double>(index[axis] + 1), generation);
}

Box DyadicCube::box() const {
    Box b;
    b.lo.resize(index.size());
    b.hi.resize(index.size());
    for (int i = 0; i < dim(); ++i) {
        b.lo[i] = lower(i);
        b.hi[i] = upper(i);
    }
    return b;
}

Point DyadicCube::center() const {
    Point c(index.size());
    for (int i = 0; i < dim(); ++i)
        c[i] = std::ldexp(static_cast<double>(index[i]) + 0.5, generation);
    return c;
}

bool DyadicCube::contains(std::span<const double> x) const {
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lower(i) || x[i] >= upper(i)) return false;
    return true;
}

bool DyadicCube::contains(const DyadicCube& other) const {
    if (other.dim() != dim() || other.generation > generation) return false;
    return other.ancestor(generation) == *this;
}

DyadicCube DyadicCube::parent() const { return ancestor(generation + 1); }

DyadicCube DyadicCube::child(unsigned j) const {
    DyadicCube c{generation - 1, index};
    for (int i = 0; i < dim(); ++i) c.index[i] = 2 * index[i] + ((j >> i) & 1u);
    return c;
}

DyadicCube DyadicCube::ancestor(int g) const {
    assert(g >= generation);
    const int shift = g - generation;
    DyadicCube a{g, index};
    if (shift >= 63) {
        for (auto& k : a.index) k = k < 0 ? -1 : 0;
        return a;
    }
    // Arithmetic right shift is floor division by 2^shift.
    for (auto& k : a.index) k >>= shift;
    return a;
}

DyadicCube cube_containing(std::span<const double> x, int generation) {
    DyadicCube q;
    q.generation = generation;
    q.index.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double k = std::floor(std::ldexp(x[i], -generation));
        if (!(std::abs(k) < kMaxIndexMagnitude)) {
            throw ConfigError("dyadic index out of range (|index| >= 2^53) at generation " +
                              std::to_string(generation));
        }
        q.index[i] = static_cast<std::int64_t>(k);
    }
    return q;
}

std::vector<DyadicCube> ancestors(const DyadicCube& q, int up_to_generation) {
    if (up_to_generation < q.generation) {
        throw ConfigError("ancestors: up_to_generation below the cube's generation");
    }
    std::vector<DyadicCube> chain;
    chain.reserve(static_cast<std::size_t>(up_to_generation - q.generation + 1));
    for (int g = q.generation; g <= up_to_generation; ++g) chain.push_back(q.ancestor(g));
    return chain;
}

// --- ShiftedLattice --------------------------------------------------------

DyadicCube ShiftedLattice::base_cube(std::span<const double> x, int generation) const {
    Point y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= shift[i];
    return cube_containing(y, generation);
}

Box ShiftedLattice::cube_box(std::span<const double> x, int generation) const {
    Box b = base_cube(x, generation).box();
    for (int i = 0; i < b.dim(); ++i) {
        b.lo[i] += shift[i];
        b.hi[i] += shift[i];
    }
    return b;
}

// --- CellGrid --------------------------------------------------------------

CellGrid::CellGrid(DyadicCube box_cube, int cell_generation)
    : box(std::move(box_cube)), generation(cell_generation) {
    if (generation > box.generation) {
        throw ConfigError("cell generation above the box generation");
    }
    if (static_cast<double>(box.dim()) * depth() > 40.0) {
        throw ConfigError("cell grid too fine (more than 2^40 cells)");
    }
}

std::size_t CellGrid::cell_count() const {
    return std::size_t{1} << (static_cast<std::size_t>(depth()) * static_cast<std::size_t>(dim()));
}

double CellGrid::cell_side() const { return std::ldexp(1.0, generation); }

double CellGrid::cell_volume() const { return std::ldexp(1.0, generation * dim()); }

std::vector<std::int64_t> CellGrid::multi_index(std::size_t linear) const {
    std::vector<std::int64_t> local(static_cast<std::size_t>(dim()));
    const auto m = static_cast<std::size_t>(cells_per_side());
    for (int i = 0; i < dim(); ++i) {
        local[i] = static_cast<std::int64_t>(linear % m);
        linear /= m;
    }
    return local;
}

std::size_t CellGrid::linear_index(std::span<const std::int64_t> local) const {
    const auto m = static_cast<std::size_t>(cells_per_side());
    std::size_t linear = 0;
    for (int i = dim() - 1; i >= 0; --i) linear = linear * m + static_cast<std::size_t>(local[i]);
    return linear;
}

DyadicCube CellGrid::cell(std::size_t linear) const {
    const auto local = multi_index(linear);
    DyadicCube c{generation, std::vector<std::int64_t>(local.size())};
    const std::int64_t base_scale = cells_per_side();
    for (int i = 0; i < dim(); ++i) c.index[i] = box.index[i] * base_scale + local[i];
    return c;
}

Point CellGrid::cell_center(std::size_t linear) const { return cell(linear).center(); }

std::optional<std::size_t> CellGrid::cell_containing(std::span<const double> x) const {
    if (!box.contains(x)) return std::nullopt;
    const DyadicCube c = cube_containing(x, generation);
    std::vector<std::int64_t> local(c.index.size());
    const std::int64_t base_scale = cells_per_side();
    for (int i = 0; i < dim(); ++i) local[i] = c.index[i] - box.index[i] * base_scale;
    return linear_index(local);
}

// --- Whitney ---------------------------------------------------------------

double boundary_distance(const Box& domain, const DyadicCube& q) {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < domain.dim(); ++i) {
        d = std::min(d, q.lower(i) - domain.lo[i]);
        d = std::min(d, domain.hi[i] - q.upper(i));
    }
    return d;
}

namespace {

bool intersects(const Box& domain, const DyadicCube& q) {
    for (int i = 0; i < domain.dim(); ++i)
        if (q.upper(i) <= domain.lo[i] || q.lower(i) >= domain.hi[i]) return false;
    return true;
}

void whitney_visit(const Box& domain, const DyadicCube& q, int min_generation,
                   std::vector<DyadicCube>& out) {
    if (!intersects(domain, q)) return;
    const double dist = boundary_distance(domain, q);
    if (dist >= 0.0 && dist >= kWhitneyLower * q.diameter()) {
        out.push_back(q);
        return;
    }
    if (q.generation <= min_generation) return;
    const unsigned children = 1u << q.dim();
    for (unsigned j = 0; j < children; ++j) whitney_visit(domain, q.child(j), min_generation, out);
}

}  // namespace

WhitneyDecomposition whitney_decompose(const Box& domain, int min_generation) {
    if (domain.empty()) throw ConfigError("whitney_decompose: empty domain");
    double min_width = std::numeric_limits<double>::infinity();
    for (int i = 0; i < domain.dim(); ++i) min_width = std::min(min_width, domain.hi[i] - domain.lo[i]);

    // Start where no cube can pass the lower bound, so every selected cube has a
    // rejected parent and therefore satisfies the upper bound as well.
    int top = static_cast<int>(std::floor(std::log2(min_width / 64.0))) + 1;
    top = std::max(top, min_generation);

    const DyadicCube first = cube_containing(domain.lo, top);
    Point last_point(domain.hi);
    for (auto& v : last_point) v = std::nextafter(v, -std::numeric_limits<double>::infinity());
    const DyadicCube last = cube_containing(last_point, top);

    WhitneyDecomposition out;
    out.min_generation = min_generation;
    std::vector<std::int64_t> idx = first.index;
    const int n = domain.dim();
    while (true) {
        whitney_visit(domain, DyadicCube{top, idx}, min_generation, out.cubes);
        int axis = 0;
        while (axis < n) {
            if (++idx[axis] <= last.index[axis]) break;
            idx[axis] = first.index[axis];
            ++axis;
        }
        if (axis == n) break;
    }
    for (const auto& q : out.cubes) out.covered_volume += q.volume();
    out.uncovered_volume = std::max(0.0, domain.volume() - out.covered_volume);
    return out;
}

}  // namespace wolff
