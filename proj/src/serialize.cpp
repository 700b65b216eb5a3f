#include "nodalcone/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nodalcone {

namespace {

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* name : allowed) {
      if (key == name) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(context + ": unrecognized key '" + key + "'");
  }
}

const Json& require(const Json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(context + ": missing required key '" + key + "'");
  return *it;
}

int require_int(const Json& obj, const char* key, const std::string& context) {
  const Json& v = require(obj, key, context);
  if (!v.is_number_integer()) throw ConfigError(context + ": '" + key + "' must be an integer");
  return v.get<int>();
}

double as_double(const Json& v, const std::string& context) {
  if (!v.is_number()) throw ConfigError(context + ": expected a number");
  return v.get<double>();
}

Rational as_rational(const Json& v, const std::string& context) {
  if (v.is_string()) return rational_from_string(v.get<std::string>());
  if (v.is_number_integer()) return Rational(static_cast<long>(v.get<long long>()));
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  throw ConfigError(context + ": expected a rational (string \"p/q\" or number)");
}

std::vector<double> as_double_vector(const Json& v, const std::string& context) {
  if (!v.is_array()) throw ConfigError(context + ": expected an array of numbers");
  std::vector<double> out;
  for (const Json& e : v) out.push_back(as_double(e, context));
  return out;
}

RationalVec as_rational_vector(const Json& v, const std::string& context) {
  if (!v.is_array()) throw ConfigError(context + ": expected an array");
  RationalVec out;
  for (const Json& e : v) out.push_back(as_rational(e, context));
  return out;
}

Json rational_vec_to_json(const RationalVec& v) {
  Json arr = Json::array();
  for (const Rational& r : v) arr.push_back(rational_to_string(r));
  return arr;
}

}  // namespace

Json polynomial_to_json(const Polynomial& p) {
  Json j;
  j["dimension"] = p.dimension();
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json term;
    term["exponents"] = e;
    term["coefficient"] = rational_to_string(c);
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

Polynomial polynomial_from_json(const Json& j) {
  const std::string ctx = "polynomial";
  check_keys(j, {"dimension", "terms"}, ctx);
  const int dim = require_int(j, "dimension", ctx);
  if (dim < 1) throw ConfigError(ctx + ": dimension must be >= 1");
  Polynomial p(dim);
  const Json& terms = require(j, "terms", ctx);
  if (!terms.is_array()) throw ConfigError(ctx + ": 'terms' must be an array");
  for (const Json& term : terms) {
    check_keys(term, {"exponents", "coefficient"}, ctx + " term");
    const Json& ej = require(term, "exponents", ctx + " term");
    if (!ej.is_array() || static_cast<int>(ej.size()) != dim) {
      throw ConfigError(ctx + ": exponent vector must list one entry per dimension");
    }
    Exponents e;
    for (const Json& v : ej) {
      if (!v.is_number_integer() || v.get<int>() < 0) {
        throw ConfigError(ctx + ": exponents must be nonnegative integers");
      }
      e.push_back(v.get<int>());
    }
    p.add_term(std::move(e), as_rational(require(term, "coefficient", ctx + " term"), ctx));
  }
  return p;
}

Json hyperplane_to_json(const Hyperplane& h) {
  Json j;
  j["normal"] = h.normal;
  j["offset"] = h.offset;
  return j;
}

Hyperplane hyperplane_from_json(const Json& j) {
  const std::string ctx = "hyperplane";
  check_keys(j, {"normal", "offset"}, ctx);
  std::vector<double> normal = as_double_vector(require(j, "normal", ctx), ctx);
  const double offset = as_double(require(j, "offset", ctx), ctx);
  try {
    return make_hyperplane(std::move(normal), offset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

Json subspace_to_json(const AffineSubspace& s) {
  Json j;
  j["basepoint"] = s.basepoint;
  j["basis"] = s.basis;
  j["dimension"] = s.dimension();
  return j;
}

Json prediction_to_json(const StationaryPrediction& pred) {
  Json j;
  j["dimension"] = pred.dimension;
  j["basepoint"] = rational_vec_to_json(pred.basepoint);
  Json gens = Json::array();
  for (const Polynomial& g : pred.generators) gens.push_back(polynomial_to_json(g));
  j["generators"] = std::move(gens);
  Json planes = Json::array();
  for (const Hyperplane& h : pred.hyperplanes) planes.push_back(hyperplane_to_json(h));
  j["hyperplanes"] = std::move(planes);
  j["edge"] = pred.edge ? subspace_to_json(*pred.edge) : Json(nullptr);
  j["containment_only"] = pred.containment_only;
  return j;
}

StationaryPrediction prediction_from_json(const Json& j) {
  const std::string ctx = "prediction";
  check_keys(j, {"dimension", "basepoint", "generators", "hyperplanes", "edge",
                 "containment_only"},
             ctx);
  StationaryPrediction pred;
  pred.dimension = require_int(j, "dimension", ctx);
  if (pred.dimension < 1) throw ConfigError(ctx + ": dimension must be >= 1");
  pred.basepoint = as_rational_vector(require(j, "basepoint", ctx), ctx + " basepoint");
  if (static_cast<int>(pred.basepoint.size()) != pred.dimension) {
    throw ConfigError(ctx + ": basepoint dimension mismatch");
  }
  const Json& gens = require(j, "generators", ctx);
  if (!gens.is_array()) throw ConfigError(ctx + ": 'generators' must be an array");
  for (const Json& g : gens) {
    Polynomial p = polynomial_from_json(g);
    if (p.dimension() != pred.dimension) {
      throw ConfigError(ctx + ": generator dimension mismatch");
    }
    pred.generators.push_back(std::move(p));
  }
  const Json& planes = require(j, "hyperplanes", ctx);
  if (!planes.is_array()) throw ConfigError(ctx + ": 'hyperplanes' must be an array");
  for (const Json& h : planes) {
    Hyperplane plane = hyperplane_from_json(h);
    if (plane.dimension() != pred.dimension) {
      throw ConfigError(ctx + ": hyperplane dimension mismatch");
    }
    pred.hyperplanes.push_back(std::move(plane));
  }
  if (j.contains("edge") && !j["edge"].is_null()) {
    const Json& e = j["edge"];
    check_keys(e, {"basepoint", "basis", "dimension"}, ctx + " edge");
    AffineSubspace sub;
    sub.basepoint = as_double_vector(require(e, "basepoint", ctx + " edge"), ctx);
    const Json& basis = require(e, "basis", ctx + " edge");
    if (!basis.is_array()) throw ConfigError(ctx + ": edge basis must be an array");
    for (const Json& b : basis) sub.basis.push_back(as_double_vector(b, ctx));
    pred.edge = std::move(sub);
  }
  const Json& co = require(j, "containment_only", ctx);
  if (!co.is_boolean()) throw ConfigError(ctx + ": 'containment_only' must be a boolean");
  pred.containment_only = co.get<bool>();
  return pred;
}

Json decomposition_to_json(const HarmonicDecomposition& dec) {
  Json j;
  j["dimension"] = dec.dimension;
  j["degree"] = dec.degree;
  Json comps = Json::array();
  for (const Polynomial& h : dec.components) comps.push_back(polynomial_to_json(h));
  j["components"] = std::move(comps);
  return j;
}

Json closure_to_json(const CoxeterClosureResult& result) {
  Json j;
  j["closed"] = result.closed;
  Json planes = Json::array();
  for (const Hyperplane& h : result.hyperplanes) planes.push_back(hyperplane_to_json(h));
  j["hyperplanes"] = std::move(planes);
  j["count"] = result.hyperplanes.size();
  j["group_order_bound"] = result.group_order_bound;
  j["common_point"] = result.common_point ? Json(*result.common_point) : Json(nullptr);
  return j;
}

Json oracle_config_to_json(const OracleConfig& cfg) {
  Json j;
  Json m;
  m["kind"] = cfg.mollifier.kind() == RadialMollifier::Kind::gaussian ? "gaussian" : "bump";
  m["parameter"] = cfg.mollifier.parameter();
  j["mollifier"] = std::move(m);
  j["quad_order"] = cfg.quad_order;
  j["r_min"] = cfg.r_min;
  j["r_max"] = cfg.r_max;
  j["r_count"] = cfg.r_count;
  j["pass_threshold"] = cfg.pass_threshold;
  j["box_lo"] = cfg.box_lo;
  j["box_hi"] = cfg.box_hi;
  j["seed"] = cfg.seed;
  j["reference_scale"] = cfg.reference_scale;
  return j;
}

Json report_to_json(const StationarityReport& report) {
  Json j;
  j["pass"] = report.pass;
  j["containment_only"] = report.containment_only;
  j["reference_scale"] = report.reference_scale;
  j["config"] = oracle_config_to_json(report.config);
  int on_sampled = 0;
  int off_sampled = 0;
  for (const PointVerdict& v : report.points) {
    (v.on_predicted_set ? on_sampled : off_sampled) += 1;
  }
  Json counts;
  counts["on_requested"] = report.on_requested;
  counts["on_sampled"] = on_sampled;
  counts["off_requested"] = report.off_requested;
  counts["off_sampled"] = off_sampled;
  j["counts"] = std::move(counts);
  Json points = Json::array();
  for (const PointVerdict& v : report.points) {
    Json p;
    p["location"] = v.location;
    p["kind"] = v.on_predicted_set ? "on" : "off";
    p["indicator"] = v.indicator;
    p["normalized"] = v.normalized;
    p["stationary"] = v.stationary;
    p["widened"] = v.widened;
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  j["notes"] = report.notes;
  return j;
}

ProblemConfig problem_from_json(const Json& j) {
  const std::string ctx = "config";
  check_keys(j, {"dimension", "sources", "oracle"}, ctx);
  FiniteDistribution f;
  f.dimension = require_int(j, "dimension", ctx);
  const Json& sources = require(j, "sources", ctx);
  if (!sources.is_array() || sources.empty()) {
    throw ConfigError(ctx + ": 'sources' must be a nonempty array");
  }
  for (const Json& s : sources) {
    check_keys(s, {"point", "weight"}, ctx + " source");
    FiniteDistribution::Source src;
    src.point = as_rational_vector(require(s, "point", ctx + " source"), ctx + " point");
    src.weight = polynomial_from_json(require(s, "weight", ctx + " source"));
    f.sources.push_back(std::move(src));
  }
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }

  OracleConfig cfg = default_oracle_config(f);
  if (j.contains("oracle")) {
    const Json& o = j["oracle"];
    check_keys(o,
               {"mollifier", "quad_order", "r_min", "r_max", "r_count", "pass_threshold",
                "box_lo", "box_hi", "seed"},
               ctx + " oracle");
    if (o.contains("mollifier")) {
      const Json& m = o["mollifier"];
      check_keys(m, {"kind", "parameter"}, ctx + " mollifier");
      const std::string kind = require(m, "kind", ctx + " mollifier").get<std::string>();
      const double param = as_double(require(m, "parameter", ctx + " mollifier"), ctx);
      try {
        if (kind == "gaussian") {
          cfg.mollifier = RadialMollifier::gaussian(f.dimension, param);
        } else if (kind == "bump") {
          cfg.mollifier = RadialMollifier::bump(f.dimension, param);
        } else {
          throw ConfigError(ctx + ": mollifier kind must be 'gaussian' or 'bump'");
        }
      } catch (const std::invalid_argument& e) {
        throw ConfigError(ctx + ": " + e.what());
      }
      // Recouple the radius grid default to the requested width.
      double diameter = 0.0;
      const auto pts = f.support_points();
      for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
          double d2 = 0.0;
          for (int k = 0; k < f.dimension; ++k) {
            d2 += (pts[a][k] - pts[b][k]) * (pts[a][k] - pts[b][k]);
          }
          diameter = std::max(diameter, std::sqrt(d2));
        }
      }
      if (!o.contains("r_min")) cfg.r_min = cfg.mollifier.width() / 2.0;
      if (!o.contains("r_max")) cfg.r_max = diameter + 6.0 * cfg.mollifier.width();
    }
    if (o.contains("quad_order")) cfg.quad_order = require_int(o, "quad_order", ctx);
    if (o.contains("r_min")) cfg.r_min = as_double(o["r_min"], ctx + " r_min");
    if (o.contains("r_max")) cfg.r_max = as_double(o["r_max"], ctx + " r_max");
    if (o.contains("r_count")) cfg.r_count = require_int(o, "r_count", ctx);
    if (o.contains("pass_threshold")) {
      cfg.pass_threshold = as_double(o["pass_threshold"], ctx + " pass_threshold");
    }
    if (o.contains("box_lo")) cfg.box_lo = as_double_vector(o["box_lo"], ctx + " box_lo");
    if (o.contains("box_hi")) cfg.box_hi = as_double_vector(o["box_hi"], ctx + " box_hi");
    if (o.contains("seed")) {
      const Json& s = o["seed"];
      if (!s.is_number_integer()) throw ConfigError(ctx + ": 'seed' must be an integer");
      cfg.seed = s.get<std::uint64_t>();
    }
  }
  try {
    cfg.validate(f.dimension);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  return ProblemConfig{std::move(f), std::move(cfg)};
}

Json parse_json_text(const std::string& text, const std::string& context) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(context + ": invalid JSON: " + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

}  // namespace nodalcone
