#pragma once

#include <json.hpp>

#include "nodalcone/coxeter.hpp"
#include "nodalcone/errors.hpp"
#include "nodalcone/harmonic.hpp"
#include "nodalcone/oracle.hpp"
#include "nodalcone/polynomial.hpp"
#include "nodalcone/stationary.hpp"

namespace nodalcone {

using Json = nlohmann::ordered_json;

// Parsers are strict: missing required keys and unrecognized keys raise
// ConfigError with the offending context in the message.

Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j);

Json hyperplane_to_json(const Hyperplane& h);
Hyperplane hyperplane_from_json(const Json& j);

Json subspace_to_json(const AffineSubspace& s);

Json prediction_to_json(const StationaryPrediction& pred);
StationaryPrediction prediction_from_json(const Json& j);

Json decomposition_to_json(const HarmonicDecomposition& dec);

Json closure_to_json(const CoxeterClosureResult& result);

Json report_to_json(const StationarityReport& report);

Json oracle_config_to_json(const OracleConfig& cfg);

// Problem description: a finitely supported distribution plus oracle settings
// (defaults filled from the geometry when the "oracle" object is absent).
struct ProblemConfig {
  FiniteDistribution distribution;
  OracleConfig oracle;
};

ProblemConfig problem_from_json(const Json& j);

Json parse_json_text(const std::string& text, const std::string& context);
Json load_json_file(const std::string& path);

}  // namespace nodalcone
