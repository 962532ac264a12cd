#include "avoid/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "avoid/common.hpp"
#include "avoid/granular.hpp"
#include "avoid/grid.hpp"
#include "avoid/one_dim.hpp"
#include "avoid/rank_cert.hpp"
#include "avoid/saturation.hpp"
#include "avoid/zoom.hpp"

namespace avoid::cli {

namespace {

using nlohmann::json;

ParamSpec required(std::string name, ParamType type, std::string help) {
  return {std::move(name), type, json(), std::move(help)};
}

ParamSpec optional(std::string name, ParamType type, json fallback, std::string help) {
  return {std::move(name), type, std::move(fallback), std::move(help)};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Raster files may be bare rasters or artifacts produced by `zoom`.
GridIndicator load_raster(const std::string& path) {
  json j = read_json(path);
  if (j.is_object() && j.contains("result") && j.contains("config")) j = j["result"];
  return grid_from_json(j);
}

std::int64_t whole_number(double v, const std::string& what) {
  if (!std::isfinite(v) || v != std::floor(v) || std::fabs(v) > 9e18)
    throw ParseError(what + " must be a whole number");
  return static_cast<std::int64_t>(v);
}

std::vector<std::int64_t> integer_list(const std::string& text, const std::string& what) {
  std::vector<std::int64_t> out;
  const auto parsed = DistanceSet::parse(text, DistanceMode::real);
  for (const auto& v : parsed.exact_values()) {
    if (boost::multiprecision::denominator(v) != 1) throw ParseError(what + " must be integers");
    out.push_back(static_cast<std::int64_t>(boost::multiprecision::numerator(v)));
  }
  return out;
}

std::vector<Rational> rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto field = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (field.find_first_not_of(" \t") == std::string::npos)
      throw ParseError("empty field in list '" + text + "'");
    out.push_back(parse_rational(field));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// "R=4,k2=24,delta0=0.01,R0=100"; an empty string sets nothing.
granular::Overrides parse_overrides(const std::string& text) {
  granular::Overrides o;
  std::optional<double> delta0, r0;
  std::size_t start = 0;
  while (!text.empty()) {
    const auto comma = text.find(',', start);
    const auto field = text.substr(start, comma == std::string::npos ? comma : comma - start);
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ParseError("override '" + field + "' is not key=value");
    const auto key = field.substr(0, eq);
    const double value = to_double(parse_rational(field.substr(eq + 1)));
    if (key == "R") {
      o.big_r = value;
    } else if (key == "k2") {
      o.k2 = whole_number(value, "k2");
    } else if (key == "delta0") {
      delta0 = value;
    } else if (key == "R0") {
      r0 = value;
    } else {
      throw ParseError("unknown override '" + key + "' (expected R, k2, delta0, R0)");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (delta0.has_value() != r0.has_value())
    throw ParseError("delta0 and R0 must be overridden together");
  if (delta0) o.constants = granular::SupersaturationConstants{*delta0, *r0};
  return o;
}

granular::SearchOptions search_options(const json& p, std::uint64_t seed, int threads) {
  granular::SearchOptions s;
  s.mode = granular::parse_mode(p["mode"].get<std::string>());
  s.budget = whole_number(p["budget"].get<double>(), "budget");
  s.restarts = static_cast<int>(p["restarts"].get<std::int64_t>());
  s.seed = seed;
  s.threads = threads;
  return s;
}

onedim::SolverOptions solver_options(const json& p) {
  const auto limit = p["node-limit"].get<std::int64_t>();
  if (limit < 1) throw PreconditionError("node-limit must be >= 1");
  return {static_cast<std::uint64_t>(limit)};
}

int as_int(const json& v, const std::string& what) {
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw PreconditionError(what + " is out of range");
  return static_cast<int>(x);
}

struct Outcome {
  json result;
  std::string csv;
};

Outcome execute(const RunConfig& c, int threads) {
  const json& p = c.params;
  const std::string& cmd = c.command;
  if (cmd == "m1d") {
    const auto d = DistanceSet::parse(p["distances"].get<std::string>(), DistanceMode::integer);
    return {onedim::bounds_1d(d, as_int(p["nmax"], "nmax"), threads, solver_options(p)).to_json(), {}};
  }
  if (cmd == "product1d") {
    onedim::ProductOptions o;
    o.k = p["k"].get<std::int64_t>();
    o.t_list = integer_list(p["t-list"].get<std::string>(), "t-list");
    o.n_max = as_int(p["nmax"], "nmax");
    o.n_max_factor = as_int(p["nmax-factor"], "nmax-factor");
    o.reference_n_max = as_int(p["reference-nmax"], "reference-nmax");
    o.threads = threads;
    o.solver = solver_options(p);
    const auto rows = onedim::product_experiment_1d(
        DistanceSet::parse(p["d1"].get<std::string>(), DistanceMode::integer),
        DistanceSet::parse(p["d2"].get<std::string>(), DistanceMode::integer), o);
    json out = json::array();
    for (const auto& r : rows)
      out.push_back({{"t", r.t},
                     {"n_max", r.n_max},
                     {"lower", to_string(r.lower)},
                     {"upper", to_string(r.upper)},
                     {"reference", to_string(r.reference)},
                     {"reference_exact", r.reference_exact},
                     {"verdict", r.verdict}});
    return {{{"rows", out}}, onedim::product_rows_csv(rows)};
  }
  if (cmd == "zoom") {
    const auto a = load_raster(p["in"].get<std::string>());
    return {to_json(zoom::zoom_out(a, {p["delta"].get<double>(), p["eps"].get<double>()})), {}};
  }
  if (cmd == "zoom-props") {
    const int trials = as_int(p["trials"], "trials");
    const auto r = zoom::property_battery(c.seed, trials, threads);
    auto ratio = [trials](int passed) { return std::to_string(passed) + "/" + std::to_string(trials); };
    return {{{"trials_per_dim", trials},
             {"passes_dim1", ratio(r.passed_dim1)},
             {"passes_dim2", ratio(r.passed_dim2)},
             {"lemma_a_failures", r.lemma_a_failures},
             {"lemma_b_failures", r.lemma_b_failures},
             {"antitone_failures", r.antitone_failures},
             {"monotone_failures", r.monotone_failures},
             {"translation_failures", r.translation_failures},
             {"failures", r.failures()}},
            {}};
  }
  if (cmd == "saturation") {
    const auto a = load_raster(p["raster"].get<std::string>());
    const auto sigma = saturation::parse_measure(p["measure"].get<std::string>());
    saturation::SaturationOptions o;
    o.strict = p["strict"].get<bool>();
    o.max_residual_cells = p["max-residual"].get<double>();
    json out = saturation::i_sigma(a, sigma, o).to_json();
    out["measure"] = sigma.describe();
    const auto second = p["measure2"].get<std::string>();
    if (!second.empty()) {
      const auto sigma2 = saturation::parse_measure(second);
      out["i_or"] = saturation::i_or(a, sigma, sigma2, o).to_json();
      out["measure2"] = sigma2.describe();
    }
    return {out, {}};
  }
  if (cmd == "satprops") {
    return {saturation::property_battery(c.seed, as_int(p["trials"], "trials"), threads).to_json(), {}};
  }
  if (cmd == "mgrid") {
    auto o = parse_overrides(p["override"].get<std::string>());
    o.search = search_options(p, c.seed, threads);
    const auto d = DistanceSet::parse(p["distances"].get<std::string>(), DistanceMode::real);
    return {granular::m_approx(p["eps"].get<double>(), d, as_int(p["dim"], "dim"), o).to_json(), {}};
  }
  if (cmd == "product-scan") {
    auto o = parse_overrides(p["override"].get<std::string>());
    o.search = search_options(p, c.seed, threads);
    const auto rows = granular::product_scan(
        DistanceSet::parse(p["d1"].get<std::string>(), DistanceMode::real),
        DistanceSet::parse(p["d2"].get<std::string>(), DistanceMode::real),
        rational_list(p["t-list"].get<std::string>()), as_int(p["dim"], "dim"), o);
    json out = json::array();
    for (const auto& r : rows)
      out.push_back({{"t", to_string(r.t)},
                     {"lower_union", to_string(r.lower_union)},
                     {"lower_d1", to_string(r.lower1)},
                     {"lower_d2", to_string(r.lower2)},
                     {"product", to_string(r.product)},
                     {"certified", r.certified}});
    return {{{"rows", out}}, granular::scan_csv(rows)};
  }
  if (cmd == "clique-cert") {
    json j = read_json(p["points"].get<std::string>());
    const int dim = as_int(p["dim"], "dim");
    if (j.is_object() && !j.contains("dim")) {
      // Without a flag or a file value, the first point's length fixes the dimension.
      const auto& pts = j.contains("points") ? j["points"] : json();
      const bool first = dim == 0 && pts.is_array() && !pts.empty() && pts[0].is_array();
      j["dim"] = first ? static_cast<int>(pts[0].size()) : dim;
    }
    auto x = rankcert::config_from_json(j);
    if (dim != 0 && dim != x.dim)
      throw PreconditionError("--dim " + std::to_string(dim) + " disagrees with the file's dim " +
                              std::to_string(x.dim));
    return {rankcert::clique_report(x, threads), {}};
  }
  throw ParseError("unknown command '" + cmd + "'");
}

void report_error(std::ostream& err, std::string_view kind, std::string_view message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

const std::vector<CommandSpec>& commands() {
  using T = ParamType;
  static const std::vector<CommandSpec> specs = {
      {"m1d",
       "certified bracket on m(D) for integer D",
       {required("distances", T::text, "comma-separated positive integers"),
        optional("nmax", T::integer, 24, "largest period / window"),
        optional("node-limit", T::integer, 2'000'000'000, "search nodes per solve")}},
      {"product1d",
       "m(D1 u (t D2)^k) against m(D1) m(D2) on the integers",
       {required("d1", T::text, "first distance set"), required("d2", T::text, "second distance set"),
        required("k", T::integer, "even neighborhood radius"),
        required("t-list", T::text, "comma-separated scales t"),
        optional("nmax", T::integer, 0, "fixed n_max (0: nmax-factor * t)"),
        optional("nmax-factor", T::integer, 3, "n_max per unit of t"),
        optional("reference-nmax", T::integer, 24, "n_max for m(D1) and m(D2)"),
        optional("node-limit", T::integer, 2'000'000'000, "search nodes per solve")},
       true},
      {"zoom",
       "zoom a raster out",
       {required("in", T::text, "raster JSON"), required("delta", T::real, "window side (length)"),
        required("eps", T::real, "density threshold in (0, 1]")}},
      {"zoom-props",
       "zooming-out property battery",
       {optional("trials", T::integer, 1000, "rasters per dimension")}},
      {"saturation",
       "saturation functional of a raster",
       {required("raster", T::text, "raster JSON"),
        optional("measure", T::text, "circle:1:720", "circle:<r>:<atoms> or two-point:<r>"),
        optional("measure2", T::text, "", "second measure: also report I_or"),
        optional("strict", T::flag, false, "reject coarse atom rounding"),
        optional("max-residual", T::real, 0.25, "strict-mode residual limit (cells)")}},
      {"satprops",
       "saturation property battery",
       {optional("trials", T::integer, 200, "trials per property")}},
      {"mgrid",
       "certified lower bound on m(D) from granular sets",
       {required("distances", T::text, "comma-separated distances"),
        optional("dim", T::integer, 2, "dimension (1 or 2)"),
        optional("eps", T::real, 0.1, "target accuracy"),
        optional("override", T::text, "", "R=..,k2=..,delta0=..,R0=.."),
        optional("mode", T::text, "exhaustive", "exhaustive or local"),
        optional("budget", T::real, 1e6, "annealing moves"),
        optional("restarts", T::integer, 8, "independent annealing runs")}},
      {"product-scan",
       "granular lower bounds on m(D1 u t D2) against the product",
       {required("d1", T::text, "first distance set"), required("d2", T::text, "second distance set"),
        required("t-list", T::text, "comma-separated scales t"),
        optional("dim", T::integer, 2, "dimension"),
        required("override", T::text, "R=..,k2=.. (mandatory)"),
        optional("mode", T::text, "local", "exhaustive or local"),
        optional("budget", T::real, 1e5, "annealing moves per search"),
        optional("restarts", T::integer, 8, "independent annealing runs")},
       true},
      {"clique-cert",
       "rank and repeated-distance certificates for a point set",
       {required("points", T::text, "point JSON {dim?, points}"),
        optional("dim", T::integer, 0, "dimension (0: from the file or the first point)")}},
  };
  return specs;
}

const CommandSpec& command_spec(std::string_view name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw ParseError("unknown command '" + std::string(name) + "'");
}

json RunConfig::to_json() const {
  json j = params;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

RunConfig RunConfig::from_json(const json& source) {
  const json& j = source.is_object() && source.contains("config") ? source["config"] : source;
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  RunConfig c;
  try {
    if (j.contains("command")) c.command = j["command"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  for (const auto& [key, value] : j.items())
    if (key != "command" && key != "seed") c.params[key] = value;
  return c;
}

RunConfig resolve(RunConfig config) {
  const auto& spec = command_spec(config.command);
  for (const auto& [key, value] : config.params.items()) {
    const bool known = std::any_of(spec.params.begin(), spec.params.end(),
                                   [&](const ParamSpec& s) { return s.name == key; });
    if (!known) throw ParseError("'" + config.command + "' has no parameter '" + key + "'");
  }
  json resolved = json::object();
  for (const auto& s : spec.params) {
    json v = config.params.contains(s.name) ? config.params[s.name] : s.fallback;
    if (v.is_null()) throw ParseError("'" + config.command + "' needs --" + s.name);
    const std::string where = "--" + s.name;
    switch (s.type) {
      case ParamType::text:
        if (!v.is_string()) v = v.dump();
        break;
      case ParamType::integer:
        if (v.is_string()) v = to_double(parse_rational(v.get<std::string>()));
        if (!v.is_number()) throw ParseError(where + " must be an integer");
        v = whole_number(v.get<double>(), where);
        break;
      case ParamType::real:
        if (v.is_string()) v = to_double(parse_rational(v.get<std::string>()));
        if (!v.is_number()) throw ParseError(where + " must be a number");
        v = v.get<double>();
        break;
      case ParamType::flag:
        if (v.is_string()) {
          if (v == "true") {
            v = true;
          } else if (v == "false") {
            v = false;
          }
        }
        if (!v.is_boolean()) throw ParseError(where + " must be true or false");
        break;
    }
    resolved[s.name] = v;
  }
  config.params = std::move(resolved);
  return config;
}

Artifact run(const RunConfig& config, int threads) {
  const RunConfig c = resolve(config);
  const auto start = std::chrono::steady_clock::now();
  Outcome o = execute(c, threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Artifact a;
  a.document = {{"version", std::string(kVersion)},
                {"config", c.to_json()},
                {"seed", c.seed},
                {"wall_clock_s", seconds},
                {"result", std::move(o.result)}};
  a.csv = std::move(o.csv);
  return a;
}

json payload(const json& document) {
  json j = document;
  j.erase("wall_clock_s");
  return j;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PreconditionError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw PreconditionError("cannot write '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw PreconditionError("cannot write '" + path.string() + "'");
  }
}

int default_threads() {
  const char* env = std::getenv("AVOID_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) throw ParseError("AVOID_THREADS must be a positive integer");
  return static_cast<int>(v);
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified density bounds for distance-avoiding sets", "avoid"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string config_path, out_path, csv_path;
  std::uint64_t seed = 0;
  bool json_flag = false;
  app.add_option("--threads", threads, "worker cap (default: AVOID_THREADS or 1)");
  app.add_option("--config", config_path, "flat JSON config or artifact to re-run");
  app.add_option("--out", out_path, "write the JSON artifact here");
  app.add_option("--csv", csv_path, "write the CSV table here (tabular commands)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_flag("--json", json_flag, "print the JSON artifact to stdout");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, std::map<std::string, bool>> flags;
  for (const auto& spec : commands()) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    for (const auto& p : spec.params) {
      if (p.type == ParamType::flag) {
        options[spec.name][p.name] = sub->add_flag("--" + p.name, flags[spec.name][p.name], p.help);
      } else {
        options[spec.name][p.name] = sub->add_option("--" + p.name, values[spec.name][p.name], p.help);
      }
    }
  }

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      report_error(err, "usage", e.what());
      return 2;
    }
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    RunConfig config;
    if (!config_path.empty()) {
      config = RunConfig::from_json(read_json(config_path));
      if (!config.command.empty() && config.command != name)
        throw ParseError("config is for '" + config.command + "', not '" + name + "'");
    }
    config.command = name;
    if (seed_opt->count() > 0) config.seed = seed;
    for (const auto& [param, opt] : options[name]) {
      if (opt->count() == 0) continue;
      const auto& spec = command_spec(name);
      const auto it = std::find_if(spec.params.begin(), spec.params.end(),
                                   [&](const ParamSpec& s) { return s.name == param; });
      config.params[param] = it->type == ParamType::flag ? json(flags[name][param])
                                                         : json(values[name][param]);
    }
    if (threads == 0) threads = default_threads();
    if (threads < 1) throw ParseError("--threads must be >= 1");

    const Artifact a = run(config, threads);
    const std::string doc = a.document.dump(2) + "\n";
    const bool tabular = command_spec(name).tabular;
    if (tabular && !csv_path.empty()) {
      write_atomic(csv_path, a.csv);
      write_atomic(csv_path + ".meta.json", doc);
    }
    if (!out_path.empty()) write_atomic(out_path, doc);
    if (tabular && csv_path.empty() && out_path.empty() && !json_flag) {
      out << a.csv;
    } else if (json_flag || (!tabular && out_path.empty())) {
      out << doc;
    }
    return 0;
  } catch (const ParseError& e) {
    report_error(err, "parse", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    report_error(err, "precondition", e.what());
    return 2;
  } catch (const SolverLimitError& e) {
    report_error(err, "solver_limit", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace avoid::cli
