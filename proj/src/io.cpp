#include "wolff/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "wolff/errors.hpp"

namespace wolff::io {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("at " + (where.empty() ? std::string("/") : where) + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(where + "/" + key, "missing field");
    return *it;
}

int int_from_json(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

Point point_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    Point x;
    for (std::size_t i = 0; i < j.size(); ++i) x.push_back(number_from_json(j[i], where + "/" + std::to_string(i)));
    return x;
}

Json point_json(std::span<const double> x) {
    Json a = Json::array();
    for (double v : x) a.push_back(number(v));
    return a;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

void write(std::ostringstream& out, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out << ",\n";
                first = false;
                out << inner << Json(k).dump() << ": ";
                write(out, v, indent + 1);
            }
            out << "\n" << pad << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && !v.is_structured();
            if (scalars) {
                out << "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out << ", ";
                    write(out, j[i], indent + 1);
                }
                out << "]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out << ",\n";
                out << inner;
                write(out, j[i], indent + 1);
            }
            out << "\n" << pad << "]";
            return;
        }
        case Json::value_t::number_float: out << format_double(j.get<double>()); return;
        default: out << j.dump(); return;
    }
}

std::string kind_name(Witness::Kind k) {
    switch (k) {
        case Witness::Kind::none: return "none";
        case Witness::Kind::cube: return "cube";
        case Witness::Kind::ball: return "ball";
        case Witness::Kind::point: return "point";
        case Witness::Kind::point_radius: return "point_radius";
        case Witness::Kind::cube_pair: return "cube_pair";
    }
    return "none";
}

}  // namespace

Params parse_params(const std::string& text) {
    std::optional<int> n, k;
    std::optional<double> alpha, p, q;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("params: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(val, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != val.size() || val.empty()) throw ConfigError("params: bad number for " + key + ": '" + val + "'");
        auto as_int = [&](const std::string& name) {
            if (v != std::floor(v)) throw ConfigError("params: " + name + " must be an integer");
            return static_cast<int>(v);
        };
        if (key == "n") n = as_int("n");
        else if (key == "k") k = as_int("k");
        else if (key == "alpha" || key == "a") alpha = v;
        else if (key == "p") p = v;
        else if (key == "q") q = v;
        else throw ConfigError("params: unknown key '" + key + "'");
    }
    if (!n || !q) throw ConfigError("params: n and q are required");
    if (k) {
        if (alpha || p) throw ConfigError("params: k fixes alpha and p; give n, k, q only");
        return hessian_params(*n, *k, *q);
    }
    if (!p) throw ConfigError("params: p is required");
    return make_params(*n, alpha.value_or(1.0), *p, *q);
}

Json to_json(const Params& params) {
    Json j;
    j["n"] = params.n;
    j["alpha"] = number(params.alpha);
    j["p"] = number(params.p);
    j["q"] = number(params.q);
    j["kind"] = params.kind == OperatorKind::hessian ? "hessian" : "quasilinear";
    if (params.kind == OperatorKind::hessian) j["k"] = params.k;
    j["local_only"] = params.local_only;
    return j;
}

double number_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
        if (s == "-inf") return -kInf;
    }
    fail(where, "expected a number");
}

Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

DyadicCube cube_from_json(const Json& j, const std::string& where) {
    DyadicCube q;
    q.generation = int_from_json(field(j, "generation", where), where + "/generation");
    const Json& idx = field(j, "index", where);
    if (!idx.is_array() || idx.empty()) fail(where + "/index", "expected a non-empty integer array");
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (!idx[i].is_number_integer()) fail(where + "/index/" + std::to_string(i), "expected an integer");
        const auto v = idx[i].get<std::int64_t>();
        if (std::abs(static_cast<double>(v)) >= kMaxIndexMagnitude) fail(where + "/index/" + std::to_string(i), "index too large");
        q.index.push_back(v);
    }
    return q;
}

Measure measure_from_json(const Json& j) {
    const Json& type = field(j, "type", "");
    if (!type.is_string()) fail("/type", "expected a string");
    const auto t = type.get<std::string>();
    if (t == "points") {
        const Json& atoms = field(j, "atoms", "");
        if (!atoms.is_array()) fail("/atoms", "expected an array");
        std::vector<Atom> out;
        std::optional<int> n;
        if (j.contains("n")) n = int_from_json(j["n"], "/n");
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const std::string w = "/atoms/" + std::to_string(i);
            Atom a{point_from_json(field(atoms[i], "x", w), w + "/x"), number_from_json(field(atoms[i], "m", w), w + "/m")};
            if (!(a.m >= 0.0) || !std::isfinite(a.m)) fail(w + "/m", "mass must be finite and >= 0");
            if (!n) n = static_cast<int>(a.x.size());
            if (static_cast<int>(a.x.size()) != *n) fail(w + "/x", "dimension mismatch");
            out.push_back(std::move(a));
        }
        if (!n) fail("/n", "empty atom list needs an explicit dimension");
        return PointMassMeasure(*n, std::move(out));
    }
    if (t == "cells") {
        const DyadicCube box = cube_from_json(field(j, "box", ""), "/box");
        const int g = int_from_json(field(j, "generation", ""), "/generation");
        if (g > box.generation) fail("/generation", "cell generation above the box generation");
        if (box.generation - g > 30) fail("/generation", "grid too deep");
        const CellGrid grid(box, g);
        const Json& vals = field(j, "values", "");
        if (!vals.is_array()) fail("/values", "expected an array");
        if (vals.size() != grid.cell_count())
            fail("/values", "expected " + std::to_string(grid.cell_count()) + " values, got " + std::to_string(vals.size()));
        std::vector<double> v(vals.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = number_from_json(vals[i], "/values/" + std::to_string(i));
            if (!(v[i] >= 0.0) || !std::isfinite(v[i])) fail("/values/" + std::to_string(i), "value must be finite and >= 0");
        }
        int leaf = CellDensityMeasure::kDefaultLeafDepth;
        if (j.contains("leaf_depth")) leaf = int_from_json(j["leaf_depth"], "/leaf_depth");
        return CellDensityMeasure(grid, std::move(v), leaf);
    }
    if (t == "radial_power") {
        Point center;
        if (j.contains("center")) center = point_from_json(j["center"], "/center");
        int n = center.empty() ? 0 : static_cast<int>(center.size());
        if (j.contains("n")) n = int_from_json(j["n"], "/n");
        if (n < 1) fail("/n", "dimension required (n or center)");
        if (!center.empty() && static_cast<int>(center.size()) != n) fail("/center", "dimension mismatch");
        const double a = number_from_json(field(j, "a", ""), "/a");
        const double gamma = number_from_json(field(j, "gamma", ""), "/gamma");
        const double R = number_from_json(field(j, "R", ""), "/R");
        if (!(a >= 0.0)) fail("/a", "amplitude must be >= 0");
        if (!(gamma < n)) fail("/gamma", "gamma < n required");
        if (!(R > 0.0)) fail("/R", "R must be > 0");
        return RadialPowerMeasure(n, a, gamma, R, center);
    }
    fail("/type", "unknown measure type '" + t + "'");
}

Json to_json(const DyadicCube& q) {
    Json j;
    j["generation"] = q.generation;
    j["index"] = q.index;
    return j;
}

Json to_json(const Box& b) {
    Json j;
    j["lo"] = point_json(b.lo);
    j["hi"] = point_json(b.hi);
    return j;
}

Json to_json(const Ball& b) {
    Json j;
    j["center"] = point_json(b.center);
    j["radius"] = number(b.radius);
    return j;
}

Json to_json(const CellGrid& g) {
    Json j;
    j["box"] = to_json(g.box);
    j["generation"] = g.generation;
    j["cells"] = g.cell_count();
    return j;
}

Json to_json(GenerationWindow w) {
    Json j;
    j["g_min"] = w.g_min;
    j["g_max"] = w.g_max;
    return j;
}

Json to_json(const Measure& mu) {
    Json j;
    if (const auto* pm = mu.points()) {
        j["type"] = "points";
        j["n"] = pm->dim();
        Json atoms = Json::array();
        for (const auto& a : pm->atoms()) {
            Json aj;
            aj["x"] = point_json(a.x);
            aj["m"] = number(a.m);
            atoms.push_back(aj);
        }
        j["atoms"] = atoms;
    } else if (const auto* cm = mu.cells()) {
        j["type"] = "cells";
        j["box"] = to_json(cm->grid().box);
        j["generation"] = cm->grid().generation;
        j["leaf_depth"] = cm->leaf_depth();
        j["values"] = point_json(cm->values());
    } else {
        const auto* rm = mu.radial();
        j["type"] = "radial_power";
        j["n"] = rm->dim();
        j["a"] = number(rm->amplitude());
        j["gamma"] = number(rm->gamma());
        j["R"] = number(rm->outer_radius());
        j["center"] = point_json(rm->center());
    }
    return j;
}

GridFunction grid_function_from_json(const Json& j) {
    const Measure mu = measure_from_json(j);
    const auto* cm = mu.cells();
    if (!cm) fail("/type", "a grid function must be a cells document");
    return GridFunction(cm->grid(), cm->values());
}

Json to_json(const GridFunction& f) {
    Json j;
    j["type"] = "cells";
    j["box"] = to_json(f.grid.box);
    j["generation"] = f.grid.generation;
    j["values"] = point_json(f.values);
    return j;
}

Json to_json(const Witness& w) {
    Json j;
    j["kind"] = kind_name(w.kind);
    switch (w.kind) {
        case Witness::Kind::none: break;
        case Witness::Kind::cube: j["cube"] = to_json(w.cube); break;
        case Witness::Kind::cube_pair:
            j["cube"] = to_json(w.cube);
            j["other"] = to_json(w.other);
            break;
        case Witness::Kind::ball: j["ball"] = to_json(w.ball); break;
        case Witness::Kind::point: j["point"] = point_json(w.point); break;
        case Witness::Kind::point_radius:
            j["point"] = point_json(w.point);
            j["radius"] = number(w.radius);
            break;
    }
    j["index"] = w.index;
    return j;
}

Json to_json(const VerifierReport& r) {
    Json j;
    j["name"] = r.name;
    j["best_constant"] = number(r.best_constant);
    j["divergence"] = r.divergence;
    j["witness"] = to_json(r.witness);
    j["samples"] = r.samples;
    j["skipped"] = r.skipped;
    j["vacuous"] = r.vacuous;
    j["passed"] = r.passed ? Json(*r.passed) : Json(nullptr);
    j["family"] = r.family;
    j["note"] = r.note;
    Json values;
    for (const auto& [k, v] : r.values) values[k] = number(v);
    j["values"] = values.is_null() ? Json::object() : values;
    return j;
}

Json to_json(const ConvergenceCertificate& c) {
    Json j;
    j["status"] = to_string(c.status);
    j["iterations"] = c.iterations;
    j["sup_residual"] = number(c.sup_residual);
    j["monotone"] = c.monotone;
    j["majorant_ok"] = c.majorant_ok;
    j["lower_ok"] = c.lower_ok;
    j["upper_ok"] = c.upper_ok;
    j["bounds_checked"] = c.bounds_checked;
    j["majorant_coefficient"] = number(c.majorant_coefficient);
    j["eps"] = number(c.eps);
    j["x0"] = number(c.x0);
    j["C"] = number(c.C);
    j["C_estimated"] = c.C_estimated;
    j["window"] = to_json(c.window);
    j["residual_history"] = point_json(c.residual_history);
    j["note"] = c.note;
    return j;
}

Json to_json(const CapacityEstimate& c) {
    Json j;
    j["value"] = number(c.value);
    j["max_potential"] = number(c.max_potential);
    j["trial_mass"] = number(c.trial_mass);
    j["samples"] = c.samples;
    j["note"] = c.note;
    return j;
}

Json to_json(const EnergyEstimate& e) {
    Json j;
    j["value"] = number(e.value);
    j["divergence"] = e.divergence;
    j["cells"] = e.cells;
    return j;
}

std::string dump(const Json& j) {
    std::ostringstream out;
    write(out, j, 0);
    out << "\n";
    return out.str();
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
}

}  // namespace wolff::io
