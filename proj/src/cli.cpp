#include "nodalcone/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include "nodalcone/serialize.hpp"

namespace nodalcone {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    return;
  }
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write file: " + path);
  file << text;
  if (!text.empty() && text.back() != '\n') file << '\n';
}

std::vector<double> parse_point(const std::string& text, int dimension) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string piece =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw ConfigError("malformed coordinate '" + piece + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (dimension > 0 && static_cast<int>(out.size()) != dimension) {
    throw ConfigError("expected " + std::to_string(dimension) + " coordinates, got " +
                      std::to_string(out.size()));
  }
  return out;
}

// "a..b:k" -> k times spaced linearly from a to b inclusive.
std::vector<double> parse_times(const std::string& text) {
  const std::size_t dots = text.find("..");
  const std::size_t colon = text.rfind(':');
  if (dots == std::string::npos || colon == std::string::npos || colon < dots) {
    throw ConfigError("times must have the form a..b:k");
  }
  double a = 0.0, b = 0.0;
  long k = 0;
  try {
    a = std::stod(text.substr(0, dots));
    b = std::stod(text.substr(dots + 2, colon - dots - 2));
    k = std::stol(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("times must have the form a..b:k");
  }
  if (k < 1 || !(a > 0.0) || !(b >= a)) {
    throw ConfigError("times require 0 < a <= b and k >= 1");
  }
  std::vector<double> out(k);
  for (long i = 0; i < k; ++i) {
    const double t = (k == 1) ? 0.0 : static_cast<double>(i) / (k - 1);
    out[i] = a + (b - a) * t;
  }
  return out;
}

StationaryPrediction predict_for(const FiniteDistribution& f) {
  if (f.sources.size() == 1) {
    return predict_single_point(f.sources.front().weight, f.sources.front().point);
  }
  return predict_multi_point(f);
}

struct CommonArgs {
  std::string out_path;
  std::optional<std::uint64_t> seed;
};

int cmd_predict(const std::string& config_path, const CommonArgs& common, std::ostream& out) {
  const ProblemConfig problem = problem_from_json(load_json_file(config_path));
  const StationaryPrediction pred = predict_for(problem.distribution);
  write_output(prediction_to_json(pred).dump(2), common.out_path, out);
  return 0;
}

int cmd_verify(const std::string& config_path, const std::string& prediction_path, int on_count,
               int off_count, const CommonArgs& common, std::ostream& out) {
  ProblemConfig problem = problem_from_json(load_json_file(config_path));
  if (common.seed) problem.oracle.seed = *common.seed;
  StationaryPrediction pred;
  if (prediction_path.empty()) {
    pred = predict_for(problem.distribution);
  } else {
    pred = prediction_from_json(load_json_file(prediction_path));
    if (pred.dimension != problem.distribution.dimension) {
      throw ConfigError("prediction dimension does not match the configuration");
    }
  }
  VerifyOptions options;
  options.on_count = on_count;
  options.off_count = off_count;
  const StationarityReport report =
      verify_prediction(problem.distribution, pred, problem.oracle, options);
  write_output(report_to_json(report).dump(2), common.out_path, out);
  return report.pass ? 0 : 1;
}

int cmd_scan(const std::string& config_path, int resolution, const std::string& box_text,
             const CommonArgs& common, std::ostream& out) {
  ProblemConfig problem = problem_from_json(load_json_file(config_path));
  if (common.seed) problem.oracle.seed = *common.seed;
  const int n = problem.distribution.dimension;
  if (resolution < 2) throw ConfigError("scan resolution must be >= 2");
  std::vector<double> lo = problem.oracle.box_lo;
  std::vector<double> hi = problem.oracle.box_hi;
  if (!box_text.empty()) {
    const std::vector<double> flat = parse_point(box_text, 2 * n);
    for (int i = 0; i < n; ++i) {
      lo[i] = flat[2 * i];
      hi[i] = flat[2 * i + 1];
      if (!(lo[i] < hi[i])) throw ConfigError("scan box must have positive extent");
    }
  }

  const MollifiedField field(problem.distribution, problem.oracle.mollifier);
  std::string csv;
  for (int i = 0; i < n; ++i) csv += "x" + std::to_string(i + 1) + ",";
  csv += "indicator\n";
  std::vector<int> idx(n, 0);
  std::vector<double> x(n, 0.0);
  while (true) {
    for (int i = 0; i < n; ++i) {
      x[i] = lo[i] + (hi[i] - lo[i]) * (static_cast<double>(idx[i]) / (resolution - 1));
    }
    const IndicatorResult ind = stationarity_indicator(field, problem.oracle, x);
    for (int i = 0; i < n; ++i) csv += format_double(x[i]) + ",";
    csv += format_double(ind.value) + "\n";
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == resolution) {
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  write_output(csv, common.out_path, out);
  return 0;
}

int cmd_decompose(const std::string& poly_path, const CommonArgs& common, std::ostream& out) {
  const Polynomial g = polynomial_from_json(load_json_file(poly_path));
  HarmonicDecomposition dec;
  try {
    dec = gauss_decompose(g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  write_output(decomposition_to_json(dec).dump(2), common.out_path, out);
  return 0;
}

int cmd_divisor(const std::string& psi_path, const std::string& g_path, const CommonArgs& common,
                std::ostream& out) {
  const Polynomial psi = polynomial_from_json(load_json_file(psi_path));
  const Polynomial g = polynomial_from_json(load_json_file(g_path));
  if (psi.is_zero()) throw ConfigError("divisor polynomial must be nonzero");
  if (psi.dimension() != g.dimension()) throw ConfigError("polynomial dimension mismatch");

  Json chain = Json::array();
  bool divides_all = true;
  int power = 0;
  for (const Polynomial& lap : g.iterated_laplacians()) {
    Json link;
    link["laplacian_power"] = power;
    link["degree"] = lap.degree();
    const auto quotient = divide_exact(lap, psi);
    if (quotient) {
      link["quotient"] = polynomial_to_json(*quotient);
    } else {
      link["quotient"] = nullptr;
      divides_all = false;
    }
    chain.push_back(std::move(link));
    ++power;
  }
  Json j;
  j["divides_all"] = divides_all;
  j["chain"] = std::move(chain);
  write_output(j.dump(2), common.out_path, out);
  return 0;
}

int cmd_coxeter(const std::string& planes_path, int max_planes, const CommonArgs& common,
                std::ostream& out) {
  const Json j = load_json_file(planes_path);
  const std::string ctx = "planes";
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "dimension" && key != "hyperplanes") {
      throw ConfigError(ctx + ": unrecognized key '" + key + "'");
    }
  }
  auto it = j.find("hyperplanes");
  if (it == j.end() || !it->is_array() || it->empty()) {
    throw ConfigError(ctx + ": 'hyperplanes' must be a nonempty array");
  }
  std::vector<Hyperplane> planes;
  for (const Json& h : *it) planes.push_back(hyperplane_from_json(h));
  if (j.contains("dimension")) {
    const int dim = j["dimension"].get<int>();
    for (const Hyperplane& h : planes) {
      if (h.dimension() != dim) throw ConfigError(ctx + ": hyperplane dimension mismatch");
    }
  }
  CoxeterClosureResult result;
  try {
    result = coxeter_closure(planes, max_planes);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  write_output(closure_to_json(result).dump(2), common.out_path, out);
  return 0;
}

int cmd_wave(const std::string& config_path, const std::string& at_text,
             const std::string& times_text, const CommonArgs& common, std::ostream& out) {
  ProblemConfig problem = problem_from_json(load_json_file(config_path));
  if (common.seed) problem.oracle.seed = *common.seed;
  const int n = problem.distribution.dimension;
  const std::vector<double> x = parse_point(at_text, n);
  const std::vector<double> times = parse_times(times_text);
  const MollifiedField field(problem.distribution, problem.oracle.mollifier);
  std::string csv = "t,u\n";
  for (double t : times) {
    const double u = wave_eval(field, problem.oracle, x, t);
    csv += format_double(t) + "," + format_double(u) + "\n";
  }
  write_output(csv, common.out_path, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stationary-set prediction and numeric certification for point-source waves"};
  app.require_subcommand(1);

  CommonArgs common;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "override the sampling seed");

  std::string config_path, prediction_path, poly_path, psi_path, g_path, planes_path;
  std::string at_text, times_text, box_text;
  int on_count = 100, off_count = 100, resolution = 41, max_planes = 64;

  CLI::App* predict = app.add_subcommand("predict", "emit the symbolic prediction as JSON");
  predict->add_option("config", config_path, "problem configuration JSON")->required();
  predict->add_option("--out", common.out_path, "output path (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "run the numeric oracle against a prediction");
  verify->add_option("config", config_path, "problem configuration JSON")->required();
  verify->add_option("--prediction", prediction_path, "prediction JSON (default: computed)");
  verify->add_option("--on", on_count, "number of on-set samples");
  verify->add_option("--off", off_count, "number of off-set samples");
  verify->add_option("--out", common.out_path, "output path (default stdout)");

  CLI::App* scan = app.add_subcommand("scan", "grid scan of the stationarity indicator (CSV)");
  scan->add_option("config", config_path, "problem configuration JSON")->required();
  scan->add_option("--resolution", resolution, "grid resolution per axis");
  scan->add_option("--box", box_text, "lo1,hi1,lo2,hi2[,lo3,hi3] (default: config box)");
  scan->add_option("--out", common.out_path, "output path (default stdout)");

  CLI::App* decompose = app.add_subcommand("decompose", "harmonic decomposition of a polynomial");
  decompose->add_option("polynomial", poly_path, "polynomial JSON")->required();
  decompose->add_option("--out", common.out_path, "output path (default stdout)");

  CLI::App* divisor = app.add_subcommand("divisor", "divisibility through the Laplacian chain");
  divisor->add_option("psi", psi_path, "candidate divisor polynomial JSON")->required();
  divisor->add_option("g", g_path, "weight polynomial JSON")->required();
  divisor->add_option("--out", common.out_path, "output path (default stdout)");

  CLI::App* coxeter = app.add_subcommand("coxeter", "reflection closure of hyperplanes");
  coxeter->add_option("planes", planes_path, "hyperplane list JSON")->required();
  coxeter->add_option("--max-planes", max_planes, "bound on the closed system size");
  coxeter->add_option("--out", common.out_path, "output path (default stdout)");

  CLI::App* wave = app.add_subcommand("wave", "evaluate the wave solution on a time grid (CSV)");
  wave->add_option("config", config_path, "problem configuration JSON")->required();
  wave->add_option("--at", at_text, "evaluation point, comma-separated")->required();
  wave->add_option("--times", times_text, "time grid a..b:k")->required();
  wave->add_option("--out", common.out_path, "output path (default stdout)");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (seed_opt->count() > 0) common.seed = seed_value;

  try {
    if (predict->parsed()) return cmd_predict(config_path, common, out);
    if (verify->parsed()) {
      return cmd_verify(config_path, prediction_path, on_count, off_count, common, out);
    }
    if (scan->parsed()) return cmd_scan(config_path, resolution, box_text, common, out);
    if (decompose->parsed()) return cmd_decompose(poly_path, common, out);
    if (divisor->parsed()) return cmd_divisor(psi_path, g_path, common, out);
    if (coxeter->parsed()) return cmd_coxeter(planes_path, max_planes, common, out);
    if (wave->parsed()) return cmd_wave(config_path, at_text, times_text, common, out);
    err << "error: no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace nodalcone
