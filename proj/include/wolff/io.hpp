#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wolff/capacity.hpp"
#include "wolff/dyadic.hpp"
#include "wolff/measures.hpp"
#include "wolff/params.hpp"
#include "wolff/solver.hpp"
#include "wolff/verifiers.hpp"

namespace wolff::io {

using Json = nlohmann::ordered_json;

/// Parses "n=3,p=2,q=5" (alpha defaults to 1); a k entry selects the k-Hessian map.
Params parse_params(const std::string& text);
Json to_json(const Params& params);

/// Measure schema:
///   {"type":"points","atoms":[{"x":[...],"m":...}]}
///   {"type":"cells","box":{"generation":g,"index":[...]},"generation":g,"values":[...]}
///   {"type":"radial_power","n":n,"a":...,"gamma":...,"R":...,"center":[...]}
/// R may be the string "inf".  Errors name the offending field as a JSON pointer.
Measure measure_from_json(const Json& j);
Json to_json(const Measure& mu);

DyadicCube cube_from_json(const Json& j, const std::string& where);
Json to_json(const DyadicCube& q);
Json to_json(const Box& b);
Json to_json(const Ball& b);
Json to_json(const CellGrid& g);
Json to_json(GenerationWindow w);

/// A cells-measure document read as a grid function.
GridFunction grid_function_from_json(const Json& j);
Json to_json(const GridFunction& f);

Json to_json(const Witness& w);
Json to_json(const VerifierReport& r);
Json to_json(const ConvergenceCertificate& c);
Json to_json(const CapacityEstimate& c);
Json to_json(const EnergyEstimate& e);

/// Number or the strings "inf"/"-inf"/"nan".
double number_from_json(const Json& j, const std::string& where);
/// Non-finite values become the strings "inf", "-inf" and "nan".
Json number(double v);

/// Deterministic text: keys in insertion order, doubles as %.17g, two-space indent.
std::string dump(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace wolff::io
