#pragma once

// Verification campaigns: a JSON configuration naming domains, an operator, sweeps and
// checks; execution over every domain; CSV, JSON and text reports.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "decaylab/eigen_cache.hpp"
#include "decaylab/kernels.hpp"
#include "decaylab/perturbation.hpp"

namespace decaylab {

using json = nlohmann::ordered_json;

enum class CheckKind {
  hi,
  thm4,
  thm6,
  cor5,
  cor7,
  lemma1,
  lemma2,
  lemma3,
  lemma9_10,
  thm11,
  ker1,
  ker2,
  thm16,
  weyl,
  hardy_constant,
  halfline,
  example5,
};

inline const std::vector<std::pair<CheckKind, std::string>>& check_names() {
  static const std::vector<std::pair<CheckKind, std::string>> names{
      {CheckKind::hi, "hi"},
      {CheckKind::thm4, "thm4"},
      {CheckKind::thm6, "thm6"},
      {CheckKind::cor5, "cor5"},
      {CheckKind::cor7, "cor7"},
      {CheckKind::lemma1, "lemma1"},
      {CheckKind::lemma2, "lemma2"},
      {CheckKind::lemma3, "lemma3"},
      {CheckKind::lemma9_10, "lemma9_10"},
      {CheckKind::thm11, "thm11"},
      {CheckKind::ker1, "ker1"},
      {CheckKind::ker2, "ker2"},
      {CheckKind::thm16, "thm16"},
      {CheckKind::weyl, "weyl"},
      {CheckKind::hardy_constant, "hardy_constant"},
      {CheckKind::halfline, "halfline"},
      {CheckKind::example5, "example5"},
  };
  return names;
}

inline std::string to_string(CheckKind k) {
  for (const auto& [kind, name] : check_names())
    if (kind == k) return name;
  return "unknown";
}

inline CheckKind check_from_string(const std::string& s) {
  for (const auto& [kind, name] : check_names())
    if (name == s) return kind;
  detail::fail(ErrorKind::config, "unknown check '" + s + "'");
}

struct OperatorConfig {
  OperatorKind kind = OperatorKind::weighted_laplacian;
  std::string sigma = "one";
  double potential = 0.0;
  std::string coefficient = "identity";
  std::optional<double> c;
  std::optional<double> a;
};

struct SweepConfig {
  std::optional<std::vector<double>> eps;
  EpsSchedule schedule;
  std::optional<std::vector<double>> shrink_eps;
  EpsSchedule shrink_schedule{0.5, 1.0, 0.0, EpsSnap::node};
  std::vector<double> t{0.05, 0.1, 0.5, 1.0};
  std::vector<double> lambda;
  std::size_t n_max = 10;
  std::size_t shrink_n = 3;
  std::size_t random_vectors = 5;
  std::vector<double> gamma{0.5, 1.0, 2.0};
  double delta = 0.0;  // 0 = half the largest d~
  std::vector<double> lemma_s{0.0, 1.0};
  std::size_t fit_points = 4;
  double weyl_admit_fraction = 2.0 / 3.0;
  std::size_t ker1_nodes = 3;
  std::vector<double> halfline_eps{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  std::vector<double> halfline_t{1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0};
  std::vector<double> example5_window{0.02, 0.2};
};

struct SolverConfig {
  std::optional<std::size_t> eigenpairs;  // empty = full spectrum
  SolverOptions options;
};

struct Campaign {
  std::string name = "campaign";
  std::string description;
  std::vector<DomainSpec> domains;
  OperatorConfig op;
  SweepConfig sweep;
  std::vector<CheckKind> checks;
  double c_tol = 2.0;
  std::string out_dir = "decaylab-out";
  std::set<std::string> formats{"csv", "json", "text"};
  std::size_t node_cap = 20000;
  std::uint64_t seed = 20240917;
  SolverConfig solver;
  std::string cache_dir;
};

// ---------------------------------------------------------------------------------------
// Parsing

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require(j.is_object(), where + " must be an object", ErrorKind::config);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    require(ok, "unknown key '" + key + "' in " + where, ErrorKind::config);
  }
}

/// A number, or a string "p/q".
inline double parse_number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      require(den != 0.0, where + ": zero denominator", ErrorKind::config);
      return num / den;
    } catch (const std::logic_error&) {
    }
  }
  fail(ErrorKind::config, where + ": expected a number or a fraction string");
}

inline std::vector<double> parse_numbers(const json& j, const std::string& where) {
  require(j.is_array(), where + " must be an array", ErrorKind::config);
  std::vector<double> out;
  for (const auto& v : j) out.push_back(parse_number(v, where));
  return out;
}

inline std::size_t parse_count(const json& j, const std::string& where) {
  require(j.is_number_integer() && j.get<long long>() >= 0, where + " must be a nonnegative integer",
          ErrorKind::config);
  return j.get<std::size_t>();
}

inline EpsSchedule parse_schedule(const json& j, EpsSchedule s, const std::string& where) {
  check_keys(j, {"ratio", "floor_cells", "start", "snap"}, where);
  if (j.contains("ratio")) s.ratio = parse_number(j["ratio"], where + ".ratio");
  if (j.contains("floor_cells")) s.floor_cells = parse_number(j["floor_cells"], where + ".floor_cells");
  if (j.contains("start")) s.start = parse_number(j["start"], where + ".start");
  if (j.contains("snap")) {
    const auto v = j["snap"].get<std::string>();
    if (v == "none") s.snap = EpsSnap::none;
    else if (v == "node") s.snap = EpsSnap::node;
    else if (v == "cell_center") s.snap = EpsSnap::cell_center;
    else fail(ErrorKind::config, where + ".snap must be none, node or cell_center");
  }
  require(s.ratio > 0.0 && s.ratio < 1.0, where + ".ratio must lie in (0,1)", ErrorKind::config);
  require(s.floor_cells > 0.0, where + ".floor_cells must be positive", ErrorKind::config);
  return s;
}

inline DomainSpec parse_domain(const json& j, const std::string& where) {
  check_keys(j, {"generator", "params", "resolution", "mask_file"}, where);
  require(j.contains("generator"), where + ": missing generator", ErrorKind::config);
  DomainSpec s;
  s.generator = generator_from_string(j["generator"].get<std::string>());
  if (j.contains("params")) s.params = parse_numbers(j["params"], where + ".params");
  if (s.generator == Generator::mask_file) {
    require(j.contains("mask_file"), where + ": mask_file generator needs a mask_file path", ErrorKind::config);
    s.mask_path = j["mask_file"].get<std::string>();
    require(std::filesystem::exists(s.mask_path), where + ": mask file '" + s.mask_path + "' does not exist",
            ErrorKind::config);
  } else {
    require(j.contains("resolution"), where + ": missing resolution", ErrorKind::config);
    s.resolution = parse_number(j["resolution"], where + ".resolution");
    require(s.resolution > 0.0, where + ": resolution must be positive", ErrorKind::config);
  }
  return s;
}

/// "name" or "name(a,b)".
inline std::pair<std::string, std::vector<double>> parse_call(const std::string& s, const std::string& where) {
  const auto open = s.find('(');
  if (open == std::string::npos) return {s, {}};
  require(s.back() == ')', where + ": malformed '" + s + "'", ErrorKind::config);
  std::vector<double> args;
  std::stringstream in(s.substr(open + 1, s.size() - open - 2));
  std::string tok;
  while (std::getline(in, tok, ',')) args.push_back(parse_number(json(tok), where));
  return {s.substr(0, open), args};
}

}  // namespace detail

inline Campaign parse_campaign(const json& j) {
  using detail::check_keys;
  using detail::require;
  check_keys(j, {"name", "description", "domain", "domains", "operator", "sweep", "checks", "tolerances", "output",
                 "node_cap", "seed", "solver", "cache_dir"},
             "campaign");
  Campaign c;
  if (j.contains("name")) c.name = j["name"].get<std::string>();
  if (j.contains("description")) c.description = j["description"].get<std::string>();
  if (j.contains("node_cap")) c.node_cap = detail::parse_count(j["node_cap"], "node_cap");
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
  require(!(j.contains("domain") && j.contains("domains")), "give either domain or domains, not both",
          ErrorKind::config);
  if (j.contains("domain")) c.domains.push_back(detail::parse_domain(j["domain"], "domain"));
  if (j.contains("domains")) {
    require(j["domains"].is_array(), "domains must be an array", ErrorKind::config);
    for (std::size_t i = 0; i < j["domains"].size(); ++i)
      c.domains.push_back(detail::parse_domain(j["domains"][i], "domains[" + std::to_string(i) + "]"));
  }

  if (j.contains("operator")) {
    const auto& o = j["operator"];
    check_keys(o, {"kind", "sigma", "potential", "coefficient", "c", "a"}, "operator");
    if (o.contains("kind")) {
      const auto k = o["kind"].get<std::string>();
      if (k == "weighted_laplacian") c.op.kind = OperatorKind::weighted_laplacian;
      else if (k == "one_d_weighted") c.op.kind = OperatorKind::one_d_weighted;
      else if (k == "divergence_form") c.op.kind = OperatorKind::divergence_form;
      else detail::fail(ErrorKind::config, "unknown operator kind '" + k + "'");
    }
    if (o.contains("sigma")) c.op.sigma = o["sigma"].get<std::string>();
    if (o.contains("potential")) c.op.potential = detail::parse_number(o["potential"], "operator.potential");
    if (o.contains("coefficient")) c.op.coefficient = o["coefficient"].get<std::string>();
    if (o.contains("c")) c.op.c = detail::parse_number(o["c"], "operator.c");
    if (o.contains("a")) c.op.a = detail::parse_number(o["a"], "operator.a");
  }

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, {"eps", "eps_schedule", "shrink_eps", "shrink_schedule", "t", "lambda", "n_max", "shrink_n",
                   "random_vectors", "gamma", "delta", "lemma_s", "fit_points", "weyl_admit_fraction",
                   "ker1_nodes", "halfline_eps", "halfline_t", "example5_window"},
               "sweep");
    auto& w = c.sweep;
    if (s.contains("eps")) w.eps = detail::parse_numbers(s["eps"], "sweep.eps");
    if (s.contains("eps_schedule")) w.schedule = detail::parse_schedule(s["eps_schedule"], w.schedule, "sweep.eps_schedule");
    if (s.contains("shrink_eps")) w.shrink_eps = detail::parse_numbers(s["shrink_eps"], "sweep.shrink_eps");
    if (s.contains("shrink_schedule"))
      w.shrink_schedule = detail::parse_schedule(s["shrink_schedule"], w.shrink_schedule, "sweep.shrink_schedule");
    if (s.contains("t")) w.t = detail::parse_numbers(s["t"], "sweep.t");
    if (s.contains("lambda")) w.lambda = detail::parse_numbers(s["lambda"], "sweep.lambda");
    if (s.contains("n_max")) w.n_max = detail::parse_count(s["n_max"], "sweep.n_max");
    if (s.contains("shrink_n")) w.shrink_n = detail::parse_count(s["shrink_n"], "sweep.shrink_n");
    if (s.contains("random_vectors")) w.random_vectors = detail::parse_count(s["random_vectors"], "sweep.random_vectors");
    if (s.contains("gamma")) w.gamma = detail::parse_numbers(s["gamma"], "sweep.gamma");
    if (s.contains("delta")) w.delta = detail::parse_number(s["delta"], "sweep.delta");
    if (s.contains("lemma_s")) w.lemma_s = detail::parse_numbers(s["lemma_s"], "sweep.lemma_s");
    if (s.contains("fit_points")) w.fit_points = detail::parse_count(s["fit_points"], "sweep.fit_points");
    if (s.contains("weyl_admit_fraction"))
      w.weyl_admit_fraction = detail::parse_number(s["weyl_admit_fraction"], "sweep.weyl_admit_fraction");
    if (s.contains("ker1_nodes")) w.ker1_nodes = detail::parse_count(s["ker1_nodes"], "sweep.ker1_nodes");
    if (s.contains("halfline_eps")) w.halfline_eps = detail::parse_numbers(s["halfline_eps"], "sweep.halfline_eps");
    if (s.contains("halfline_t")) w.halfline_t = detail::parse_numbers(s["halfline_t"], "sweep.halfline_t");
    if (s.contains("example5_window")) {
      w.example5_window = detail::parse_numbers(s["example5_window"], "sweep.example5_window");
      require(w.example5_window.size() == 2 && w.example5_window[0] < w.example5_window[1],
              "sweep.example5_window must be [lo, hi]", ErrorKind::config);
    }
    for (double v : w.t) require(v > 0.0, "sweep.t values must be positive", ErrorKind::config);
    if (w.eps)
      for (double v : *w.eps) require(v > 0.0, "sweep.eps values must be positive", ErrorKind::config);
  }

  require(j.contains("checks") && j["checks"].is_array(), "config needs a checks array", ErrorKind::config);
  for (const auto& v : j["checks"]) c.checks.push_back(check_from_string(v.get<std::string>()));
  require(!c.checks.empty(), "checks list is empty: nothing to run", ErrorKind::config);
  std::sort(c.checks.begin(), c.checks.end());
  c.checks.erase(std::unique(c.checks.begin(), c.checks.end()), c.checks.end());
  const bool only_halfline = c.checks.size() == 1 && c.checks.front() == CheckKind::halfline;
  require(only_halfline || !c.domains.empty(), "config needs a domain", ErrorKind::config);

  if (j.contains("tolerances")) {
    check_keys(j["tolerances"], {"c_tol"}, "tolerances");
    if (j["tolerances"].contains("c_tol")) c.c_tol = detail::parse_number(j["tolerances"]["c_tol"], "tolerances.c_tol");
    require(c.c_tol >= 0.0, "tolerances.c_tol must be nonnegative", ErrorKind::config);
  }
  if (j.contains("output")) {
    check_keys(j["output"], {"directory", "formats"}, "output");
    if (j["output"].contains("directory")) c.out_dir = j["output"]["directory"].get<std::string>();
    if (j["output"].contains("formats")) {
      c.formats.clear();
      for (const auto& f : j["output"]["formats"]) {
        const auto v = f.get<std::string>();
        require(v == "csv" || v == "json" || v == "text", "output.formats entries must be csv, json or text",
                ErrorKind::config);
        c.formats.insert(v);
      }
    }
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, {"eigenpairs", "dense_cap", "sparse_threshold", "tolerance", "max_iterations"}, "solver");
    if (s.contains("eigenpairs")) {
      if (s["eigenpairs"].is_string()) {
        require(s["eigenpairs"].get<std::string>() == "all", "solver.eigenpairs must be \"all\" or a count",
                ErrorKind::config);
      } else {
        c.solver.eigenpairs = detail::parse_count(s["eigenpairs"], "solver.eigenpairs");
      }
    }
    if (s.contains("dense_cap")) c.solver.options.dense_cap = detail::parse_count(s["dense_cap"], "solver.dense_cap");
    if (s.contains("sparse_threshold"))
      c.solver.options.sparse_threshold = detail::parse_count(s["sparse_threshold"], "solver.sparse_threshold");
    if (s.contains("tolerance")) c.solver.options.tolerance = detail::parse_number(s["tolerance"], "solver.tolerance");
    if (s.contains("max_iterations"))
      c.solver.options.max_iterations = static_cast<int>(detail::parse_count(s["max_iterations"], "solver.max_iterations"));
  }
  c.solver.options.seed = c.seed;
  return c;
}

inline Campaign parse_campaign_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    detail::fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_campaign(j);
  } catch (const json::exception& e) {
    detail::fail(ErrorKind::config, std::string("config has a value of the wrong type: ") + e.what());
  }
}

inline Campaign load_campaign(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), "cannot read config file '" + path + "'", ErrorKind::config);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_campaign_text(ss.str());
}

// ---------------------------------------------------------------------------------------
// Results

struct LabeledReport {
  std::string check;
  std::string domain;
  std::string op;
  BoundReport report;
};

enum class Relation { within, at_least, at_most, info };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::within: return "within";
    case Relation::at_least: return ">=";
    case Relation::at_most: return "<=";
    case Relation::info: return "info";
  }
  return "?";
}

struct FitRecord {
  std::string check;
  std::string domain;
  std::string quantity;
  ExponentFit fit;
  Relation relation = Relation::info;
  double target = 0.0;
  double slack = 0.0;
  bool pass = true;
};

struct Metric {
  std::string check;
  std::string domain;
  std::string name;
  double value = 0.0;
  Relation relation = Relation::info;
  double limit = 0.0;
  double slack = 0.0;
  bool pass = true;
};

struct ShrinkRow {
  std::string domain;
  std::string op;
  std::size_t n = 0;
  double eps = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
};

struct HeatRow {
  std::string domain;
  std::string op;
  HeatReport report;
};

struct DomainSummary {
  std::string name;
  std::string op;
  std::size_t nodes = 0;
  double h = 0.0;
  double c = 0.0;
  double a = 0.0;
  std::size_t eigenpairs = 0;
  std::vector<double> eps;
};

struct CampaignResult {
  std::string name;
  std::string description;
  std::uint64_t seed = 0;
  std::vector<DomainSummary> domains;
  std::vector<LabeledReport> bounds;
  std::vector<FitRecord> fits;
  std::vector<Metric> metrics;
  std::vector<ShrinkRow> shrink;
  std::vector<HeatRow> heat;
  std::vector<std::string> notes;

  bool pass() const {
    for (const auto& b : bounds)
      if (!b.report.vacuous && !b.report.pass) return false;
    for (const auto& f : fits)
      if (!f.pass) return false;
    for (const auto& m : metrics)
      if (!m.pass) return false;
    for (const auto& h : heat)
      if (!h.report.pass) return false;
    return true;
  }

  void append(CampaignResult&& o) {
    auto move_into = [](auto& dst, auto& src) {
      dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
    };
    move_into(bounds, o.bounds);
    move_into(fits, o.fits);
    move_into(metrics, o.metrics);
    move_into(shrink, o.shrink);
    move_into(heat, o.heat);
    move_into(notes, o.notes);
  }
};

inline Metric make_metric(std::string check, std::string domain, std::string name, double value, Relation rel,
                          double limit, double slack = 0.0) {
  Metric m{std::move(check), std::move(domain), std::move(name), value, rel, limit, slack, true};
  switch (rel) {
    case Relation::within: m.pass = std::abs(value - limit) <= slack; break;
    case Relation::at_least: m.pass = value >= limit - slack; break;
    case Relation::at_most: m.pass = value <= limit + slack; break;
    case Relation::info: m.pass = true; break;
  }
  return m;
}

inline FitRecord make_fit(std::string check, std::string domain, std::string quantity, const ExponentFit& fit,
                          Relation rel, double target, double slack) {
  FitRecord f{std::move(check), std::move(domain), std::move(quantity), fit, rel, target, slack, true};
  const Metric m = make_metric("", "", "", fit.exponent, rel, target, slack);
  f.pass = m.pass;
  return f;
}

// ---------------------------------------------------------------------------------------
// Execution

namespace detail {

inline WeightField parse_sigma(const std::string& s) {
  auto [name, args] = parse_call(s, "operator.sigma");
  if (name == "one" && args.empty()) return unit_weight();
  if (name == "power" && args.size() == 1) return power_weight(args[0]);
  fail(ErrorKind::config, "operator.sigma must be one or power(alpha_w), got '" + s + "'");
}

inline CoefficientField parse_coefficient(const std::string& s) {
  auto [name, args] = parse_call(s, "operator.coefficient");
  if (name == "identity" && args.empty()) return identity_coefficient();
  if (name == "scalar" && args.size() == 1) return scalar_coefficient(args[0]);
  if (name == "diag" && args.size() == 2) return diagonal_coefficient(args[0], args[1]);
  if (name == "checkerboard" && args.size() == 2) return checkerboard_coefficient(args[0], args[1]);
  fail(ErrorKind::config,
       "operator.coefficient must be identity, scalar(k), diag(ax,ay) or checkerboard(alpha,cells), got '" + s + "'");
}

inline OperatorRecipe make_recipe(const OperatorConfig& cfg) {
  OperatorRecipe r;
  r.kind = cfg.kind;
  r.hardy_c = cfg.c;
  r.hardy_a = cfg.a;
  switch (cfg.kind) {
    case OperatorKind::weighted_laplacian:
      r.weight = parse_sigma(cfg.sigma);
      if (cfg.potential != 0.0) r.potential = constant_potential(cfg.potential);
      break;
    case OperatorKind::one_d_weighted: {
      r.weight = parse_sigma(cfg.sigma);
      require(r.weight.face_midpoint, "one_d_weighted needs sigma = power(alpha_w)", ErrorKind::config);
      if (!r.hardy_a) r.hardy_a = 0.0;
      break;
    }
    case OperatorKind::divergence_form:
      r.coefficient = parse_coefficient(cfg.coefficient);
      break;
  }
  return r;
}

/// Which checks consume an eigensystem.
inline bool needs_eigensystem(CheckKind k) {
  switch (k) {
    case CheckKind::hi:
    case CheckKind::thm11:
    case CheckKind::hardy_constant:
    case CheckKind::halfline:
    case CheckKind::example5:
      return false;
    default:
      return true;
  }
}

struct DomainContext {
  const Campaign* campaign = nullptr;
  std::shared_ptr<const GridDomain> domain;
  EllipticOperator op;
  DistanceField dist;    // raw d
  DistanceField scaled;  // d~
  std::optional<EigenSystem> eig;
  std::vector<double> eps;
  std::vector<std::pair<std::string, Eigen::VectorXd>> vectors;  // test vectors with labels
  std::string label;
  std::string op_label;
};

inline std::vector<double> domain_eps(const DomainContext& ctx) {
  const auto& sw = ctx.campaign->sweep;
  if (sw.eps) {
    std::vector<double> v = *sw.eps;
    std::sort(v.rbegin(), v.rend());
    return v;
  }
  return eps_schedule(ctx.scaled, ctx.domain->h * ctx.op.distance_scale, sw.schedule);
}

inline void require_eps(const DomainContext& ctx, const std::string& check) {
  require(!ctx.eps.empty(),
          check + " on " + ctx.label + ": the eps schedule is empty; lower sweep.eps_schedule.floor_cells or refine h",
          ErrorKind::config);
}

inline void add_bound(CampaignResult& out, const DomainContext& ctx, CheckKind k, BoundReport r) {
  out.bounds.push_back({to_string(k), ctx.label, ctx.op_label, std::move(r)});
}

inline CampaignResult run_check(const DomainContext& ctx, CheckKind kind) {
  const Campaign& cfg = *ctx.campaign;
  const auto& sw = cfg.sweep;
  const double c_tol = cfg.c_tol;
  const double c = ctx.op.hardy_c;
  CampaignResult out;
  auto eig = [&]() -> const EigenSystem& { return *ctx.eig; };

  switch (kind) {
    case CheckKind::hi: {
      std::vector<std::pair<std::string, Eigen::VectorXd>> fs = ctx.vectors;
      if (ctx.op.kind() == OperatorKind::one_d_weighted) fs.emplace_back("example5", example5_function(ctx.op));
      fs.emplace_back("d", ctx.dist.values);
      for (const auto& [name, f] : fs) add_bound(out, ctx, kind, verify_hi(ctx.op, ctx.dist, f, c_tol, name));
      break;
    }
    case CheckKind::thm4:
    case CheckKind::thm6: {
      require_eps(ctx, to_string(kind));
      for (const auto& [name, f] : ctx.vectors)
        for (double e : ctx.eps) {
          if (kind == CheckKind::thm4) {
            auto r = verify_thm4(ctx.op, eig(), ctx.dist, f, e, c_tol, name);
            add_bound(out, ctx, kind, r.strip_d2);
            add_bound(out, ctx, kind, r.strip_mass);
          } else {
            add_bound(out, ctx, kind, verify_thm6(ctx.op, eig(), ctx.dist, f, e, c_tol, name));
          }
        }
      break;
    }
    case CheckKind::cor5: {
      const double delta = sw.delta > 0.0 ? sw.delta : 0.5 * ctx.scaled.max();
      for (const auto& [name, f] : ctx.vectors)
        for (double g : sw.gamma) add_bound(out, ctx, kind, verify_cor5(ctx.op, eig(), ctx.dist, f, g, delta, c_tol, name));
      break;
    }
    case CheckKind::cor7: {
      require_eps(ctx, "cor7");
      const std::size_t nn = std::min(sw.n_max, eig().count());
      for (std::size_t n = 0; n < nn; ++n) {
        std::vector<std::pair<double, double>> pts;
        for (double e : ctx.eps) {
          auto r = verify_eigenfunction(ctx.op, eig(), ctx.dist, n, e, c_tol);
          if (r.mass.lhs > 0.0) pts.emplace_back(e, r.mass.lhs);
          add_bound(out, ctx, kind, r.mass);
          add_bound(out, ctx, kind, r.grad);
          add_bound(out, ctx, kind, r.interpolation);
          add_bound(out, ctx, kind, r.trivial);
        }
        if (pts.size() >= 4)
          out.fits.push_back(make_fit("cor7", ctx.label, "strip_mass phi_" + std::to_string(n + 1),
                                      fit_exponent(pts), Relation::info, 2.0 + 2.0 / c, 0.0));
      }
      break;
    }
    case CheckKind::lemma1: {
      require_eps(ctx, "lemma1");
      for (const auto& [name, f] : ctx.vectors)
        for (double e : ctx.eps)
          for (double s : sw.lemma_s) add_bound(out, ctx, kind, verify_lemma1(ctx.op, eig(), ctx.dist, f, e, s, name));
      break;
    }
    case CheckKind::lemma2: {
      require_eps(ctx, "lemma2");
      for (const auto& [name, f] : ctx.vectors)
        for (double e : ctx.eps) {
          add_bound(out, ctx, kind,
                    verify_lemma2(ctx.op, ctx.dist, [e](double d) { return mu_value(d, e); }, f, "mu " + name));
          add_bound(out, ctx, kind,
                    verify_lemma2(ctx.op, ctx.dist, [e, c](double d) { return tau_value(d, e, c); }, f, "tau " + name));
          add_bound(out, ctx, kind,
                    verify_lemma2(ctx.op, ctx.dist, [e, c](double d) { return std::pow(std::max(d, e), -1.0 / c); },
                                  f, "omega " + name));
        }
      break;
    }
    case CheckKind::lemma3: {
      require_eps(ctx, "lemma3");
      for (const auto& [name, f] : ctx.vectors)
        for (double e : ctx.eps) add_bound(out, ctx, kind, verify_lemma3(ctx.op, eig(), ctx.dist, f, e, name));
      break;
    }
    case CheckKind::lemma9_10: {
      require_eps(ctx, "lemma9_10");
      for (const auto& [name, f] : ctx.vectors)
        for (double e : ctx.eps) {
          auto r = verify_lemma9_10(ctx.op, eig(), ctx.dist, f, e, c_tol, name);
          add_bound(out, ctx, kind, r.q_bound);
          add_bound(out, ctx, kind, r.norm_bound);
        }
      break;
    }
    case CheckKind::thm11: {
      std::vector<double> eps_list;
      if (sw.shrink_eps) eps_list = *sw.shrink_eps;
      else eps_list = eps_schedule(ctx.scaled, ctx.domain->h * ctx.op.distance_scale, sw.shrink_schedule);
      SolverOptions so = cfg.solver.options;
      const auto table = shrink_and_solve(ctx.op, ctx.dist, eps_list, sw.shrink_n, so);
      for (std::size_t k = 0; k < table.eps.size(); ++k)
        for (std::size_t n = 0; n < table.n_max; ++n)
          out.shrink.push_back({ctx.label, ctx.op_label, n + 1, table.eps[k], table.lambda[k][n], table.gap(k, n)});
      for (auto& r : verify_thm11(table, c, sw.shrink_n, sw.fit_points)) {
        out.fits.push_back(make_fit("thm11", ctx.label, "gap_" + std::to_string(r.n), r.fit, Relation::at_least,
                                    2.0 / c, 0.1));
        out.metrics.push_back(make_metric("thm11", ctx.label, "c_hat_" + std::to_string(r.n), r.c_hat, Relation::info, 0.0));
        add_bound(out, ctx, kind, r.report);
      }
      break;
    }
    case CheckKind::ker1: {
      require_eps(ctx, "ker1");
      require(eig().complete(), "ker1 needs solver.eigenpairs = all", ErrorKind::config);
      const std::size_t n = ctx.op.size();
      std::vector<std::size_t> ys;
      const std::size_t k = std::max<std::size_t>(1, std::min(sw.ker1_nodes, n));
      for (std::size_t i = 0; i < k; ++i) ys.push_back(k == 1 ? n / 2 : i * (n - 1) / (k - 1));
      const double h = ctx.domain->h;
      for (double t : sw.t) {
        if (t < 20.0 * h * h) {
          out.notes.push_back("ker1 on " + ctx.label + ": t=" + fmt_num(t) + " below 20 h^2 skipped");
          continue;
        }
        add_bound(out, ctx, kind, verify_ultracontractive(eig(), t, ctx.domain->dim, h));
        for (double e : ctx.eps)
          for (auto& r : verify_ker1(ctx.op, eig(), ctx.dist, e, t, ys, c_tol)) add_bound(out, ctx, kind, r);
      }
      break;
    }
    case CheckKind::ker2: {
      require_eps(ctx, "ker2");
      auto res = verify_ker2(ctx.op, eig(), ctx.dist, ctx.eps, sw.t, c_tol);
      for (auto& r : res.reports) out.heat.push_back({ctx.label, ctx.op_label, r});
      for (auto& [t, fit] : res.eps_fits)
        out.fits.push_back(make_fit("ker2", ctx.label, "J eps-exponent t=" + fmt_num(t), fit, Relation::at_least,
                                    2.0 + 2.0 / c, 0.1));
      const double bound_t_exponent = -(1.0 + 1.0 / c) - 0.5 * ctx.domain->dim;
      for (double e : ctx.eps) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : res.reports)
          if (r.eps == e && r.j > 0.0 && eig().lambda(0) * r.t <= 1.0) pts.emplace_back(r.t, r.j);
        if (pts.size() >= 4)
          out.fits.push_back(make_fit("ker2", ctx.label, "J t-exponent eps=" + fmt_num(e), fit_exponent(pts),
                                      Relation::info, bound_t_exponent, 0.0));
      }
      out.metrics.push_back(make_metric("ker2", ctx.label, "c4_hat", res.c4_hat, Relation::info, 0.0));
      break;
    }
    case CheckKind::thm16: {
      require_eps(ctx, "thm16");
      require(!sw.lambda.empty(), "thm16 needs sweep.lambda", ErrorKind::config);
      for (double lam : sw.lambda)
        for (double e : ctx.eps) {
          add_bound(out, ctx, kind, verify_thm16(ctx.op, eig(), ctx.dist, e, lam, c_tol));
          add_bound(out, ctx, kind, verify_projection_norm(ctx.op, eig(), ctx.dist, e, lam, c_tol));
        }
      break;
    }
    case CheckKind::weyl: {
      const auto w = weyl_bracket(eig(), ctx.domain->dim, sw.weyl_admit_fraction);
      out.metrics.push_back(make_metric("weyl", ctx.label, "a1", w.a1, Relation::at_most, eig().lambda(0)));
      out.metrics.push_back(make_metric("weyl", ctx.label, "a2", w.a2, Relation::at_least, eig().lambda(0)));
      out.metrics.push_back(make_metric("weyl", ctx.label, "a2/a1", w.a2 / w.a1, Relation::info, 0.0));
      out.metrics.push_back(
          make_metric("weyl", ctx.label, "admitted", static_cast<double>(w.admitted), Relation::info, 0.0));
      break;
    }
    case CheckKind::hardy_constant: {
      const auto est = estimate_hardy_constant(ctx.op, ctx.dist, cfg.solver.options);
      out.metrics.push_back(make_metric("hardy_constant", ctx.label, "c_num", est.c_num, Relation::at_most, c));
      break;
    }
    case CheckKind::example5: {
      require(ctx.op.kind() == OperatorKind::one_d_weighted, "example5 needs operator.kind = one_d_weighted",
              ErrorKind::config);
      const double aw = ctx.op.recipe.weight.alpha_w;
      const Eigen::VectorXd f = example5_function(ctx.op);
      EpsSchedule s = sw.schedule;
      s.start = sw.example5_window[1];
      std::vector<double> eps_list = sw.eps ? *sw.eps : eps_schedule(ctx.scaled, ctx.domain->h, s);
      std::vector<std::pair<double, double>> mass_pts, d2_pts;
      for (double e : eps_list) {
        if (e < sw.example5_window[0] * (1.0 - 1e-12) || e > sw.example5_window[1] * (1.0 + 1e-12)) continue;
        const auto [d2, mass] = strip_integrals(ctx.op, ctx.dist, f, e);
        const double exact_mass = std::pow(e, 3.0 - aw) / (3.0 - aw);
        const double exact_d2 = std::pow(e, 1.0 - aw) / (1.0 - aw);
        out.metrics.push_back(make_metric("example5", ctx.label, "strip_mass/exact eps=" + fmt_num(e),
                                          mass / exact_mass, Relation::within, 1.0, 0.01));
        out.metrics.push_back(make_metric("example5", ctx.label, "strip_d2/exact eps=" + fmt_num(e), d2 / exact_d2,
                                          Relation::info, 1.0));
        mass_pts.emplace_back(e, mass);
        d2_pts.emplace_back(e, d2);
      }
      out.fits.push_back(make_fit("example5", ctx.label, "strip_mass", fit_exponent(mass_pts), Relation::within,
                                  2.0 + 2.0 / c, 0.05));
      out.fits.push_back(make_fit("example5", ctx.label, "strip_d2", fit_exponent(d2_pts), Relation::info,
                                  2.0 / c, 0.0));
      break;
    }
    case CheckKind::halfline:
      break;  // campaign-level
  }
  return out;
}

inline CampaignResult run_halfline(const Campaign& cfg) {
  CampaignResult out;
  for (double t : cfg.sweep.halfline_t)
    for (double e : cfg.sweep.halfline_eps) {
      if (e * e > t / 100.0) continue;
      const auto ref = halfline_reference(e, t);
      out.metrics.push_back(make_metric("halfline", "half-line", "exact/asymptotic eps=" + fmt_num(e) + " t=" + fmt_num(t),
                                        ref.exact / ref.asymptotic, Relation::within, 1.0, 0.02));
    }
  return out;
}

/// Runs tasks on up to `jobs` threads; results keep the task order.
inline std::vector<CampaignResult> run_tasks(const std::vector<std::function<CampaignResult()>>& tasks,
                                             std::size_t jobs) {
  std::vector<CampaignResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  jobs = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) {
        try {
          results[i] = tasks[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace detail

struct RunOptions {
  std::size_t jobs = 1;
  std::function<void(const std::string&)> log;  // progress lines, may be empty
};

inline CampaignResult run_campaign(const Campaign& cfg, const RunOptions& ro = {}) {
  CampaignResult result;
  result.name = cfg.name;
  result.description = cfg.description;
  result.seed = cfg.seed;
  auto log = [&](const std::string& s) {
    if (ro.log) ro.log(s);
  };
  const bool wants_eig = std::any_of(cfg.checks.begin(), cfg.checks.end(), detail::needs_eigensystem);
  for (std::size_t di = 0; di < cfg.domains.size(); ++di) {
    const bool domain_checks = std::any_of(cfg.checks.begin(), cfg.checks.end(),
                                           [](CheckKind k) { return k != CheckKind::halfline; });
    if (!domain_checks) break;
    DomainSpec spec = cfg.domains[di];
    spec.node_cap = cfg.node_cap;
    detail::DomainContext ctx;
    ctx.campaign = &cfg;
    ctx.domain = std::make_shared<const GridDomain>(build_domain(spec));
    detail::require(ctx.domain->size() >= 4 || !wants_eig,
                    ctx.domain->name + " has fewer than 4 interior nodes", ErrorKind::domain);
    ctx.op = assemble(ctx.domain, detail::make_recipe(cfg.op));
    ctx.dist = distance_to_boundary(*ctx.domain);
    ctx.scaled = scaled_distance(ctx.op, ctx.dist);
    ctx.label = ctx.domain->name;
    ctx.op_label = ctx.op.describe();
    ctx.eps = detail::domain_eps(ctx);
    log("domain " + ctx.label + ": " + std::to_string(ctx.domain->size()) + " nodes, " + ctx.op_label);

    if (wants_eig) {
      const auto m = cfg.solver.eigenpairs;
      if (m) detail::require(*m <= ctx.op.size(), "solver.eigenpairs exceeds the node count of " + ctx.label,
                             ErrorKind::config);
      log("eigensolve " + (m ? std::to_string(*m) : std::string("all")) + " pairs");
      ctx.eig = cached_eigensolve(ctx.op, m, cfg.solver.options, cfg.cache_dir);
      const std::size_t nn = std::min(cfg.sweep.n_max, ctx.eig->count());
      for (std::size_t n = 0; n < nn; ++n) ctx.vectors.emplace_back("phi_" + std::to_string(n + 1), ctx.eig->phi(n));
      auto rv = random_domain_vectors(ctx.op, *ctx.eig, cfg.sweep.random_vectors, cfg.seed + di);
      for (std::size_t k = 0; k < rv.size(); ++k) ctx.vectors.emplace_back("random_" + std::to_string(k + 1), rv[k]);
    } else {
      std::mt19937_64 rng(cfg.seed + di);
      for (std::size_t k = 0; k < cfg.sweep.random_vectors; ++k) {
        Eigen::VectorXd g(static_cast<Eigen::Index>(ctx.op.size()));
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = 2.0 * detail::unit_uniform(rng) - 1.0;
        ctx.vectors.emplace_back("random_" + std::to_string(k + 1), g);
      }
    }

    DomainSummary ds{ctx.label, ctx.op_label, ctx.op.size(), ctx.domain->h, ctx.op.hardy_c, ctx.op.hardy_a,
                     ctx.eig ? ctx.eig->count() : 0, ctx.eps};
    result.domains.push_back(ds);

    std::vector<std::function<CampaignResult()>> tasks;
    for (CheckKind k : cfg.checks) {
      if (k == CheckKind::halfline) continue;
      tasks.emplace_back([&ctx, k, &log] {
        log("  check " + to_string(k));
        return detail::run_check(ctx, k);
      });
    }
    for (auto& r : detail::run_tasks(tasks, ro.jobs)) result.append(std::move(r));
  }
  if (std::find(cfg.checks.begin(), cfg.checks.end(), CheckKind::halfline) != cfg.checks.end())
    result.append(detail::run_halfline(cfg));
  return result;
}

// ---------------------------------------------------------------------------------------
// Output

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string extra_params(const BoundReport& r) {
  std::string s;
  for (const auto& [k, v] : r.params) {
    if (k == "eps" || k == "c" || k == "a") continue;
    if (!s.empty()) s += ';';
    s += k + "=" + num(v);
  }
  return s;
}

inline void write_atomic(const std::filesystem::path& file, const std::string& content) {
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    require(static_cast<bool>(out), "cannot write " + tmp, ErrorKind::io);
    out << content;
    require(static_cast<bool>(out), "failed writing " + tmp, ErrorKind::io);
  }
  std::filesystem::rename(tmp, file);
}

struct CheckStats {
  std::size_t reports = 0;
  std::size_t failures = 0;
  std::size_t vacuous = 0;
  double worst = 0.0;
};

inline std::map<std::string, CheckStats> bound_stats(const CampaignResult& r) {
  std::map<std::string, CheckStats> m;
  for (const auto& b : r.bounds) {
    auto& s = m[b.check];
    ++s.reports;
    if (b.report.vacuous) {
      ++s.vacuous;
      continue;
    }
    if (!b.report.pass) ++s.failures;
    s.worst = std::max(s.worst, b.report.ratio);
  }
  for (const auto& h : r.heat) {
    auto& s = m["ker2"];
    ++s.reports;
    if (!h.report.pass) ++s.failures;
    s.worst = std::max(s.worst, h.report.ratio);
  }
  return m;
}

}  // namespace detail

inline std::string bounds_csv(const CampaignResult& r) {
  using detail::num;
  std::string s = "name,domain,operator,c,a,eps,lhs,rhs,ratio,pass,tol,check,subject,vacuous,params\n";
  for (const auto& b : r.bounds) {
    const auto& x = b.report;
    const double eps = x.param("eps", x.param("delta", 0.0));
    s += detail::csv_field(x.name) + "," + detail::csv_field(b.domain) + "," + detail::csv_field(b.op) + "," +
         num(x.param("c", 0.0)) + "," + num(x.param("a", 0.0)) + "," + num(eps) + "," + num(x.lhs) + "," +
         num(x.rhs) + "," + num(x.ratio) + "," + (x.pass ? "1" : "0") + "," + num(x.tol) + "," + b.check + "," +
         detail::csv_field(x.subject) + "," + (x.vacuous ? "1" : "0") + "," + detail::csv_field(detail::extra_params(x)) +
         "\n";
  }
  return s;
}

inline std::string shrink_csv(const CampaignResult& r) {
  using detail::num;
  std::string s = "domain,operator,n,eps,lambda,gap\n";
  for (const auto& x : r.shrink)
    s += detail::csv_field(x.domain) + "," + detail::csv_field(x.op) + "," + std::to_string(x.n) + "," + num(x.eps) +
         "," + num(x.lambda) + "," + num(x.gap) + "\n";
  return s;
}

inline std::string heat_csv(const CampaignResult& r) {
  using detail::num;
  std::string s = "domain,operator,t,eps,lhs,rhs,ratio,pass,tol,trace,truncation\n";
  for (const auto& x : r.heat) {
    const auto& h = x.report;
    s += detail::csv_field(x.domain) + "," + detail::csv_field(x.op) + "," + num(h.t) + "," + num(h.eps) + "," +
         num(h.j) + "," + num(h.bound) + "," + num(h.ratio) + "," + (h.pass ? "1" : "0") + "," + num(h.tol) + "," +
         num(h.trace) + "," + num(h.truncation) + "\n";
  }
  return s;
}

inline json summary_json(const CampaignResult& r) {
  json j;
  j["schema"] = "decaylab-summary/1";
  j["campaign"] = r.name;
  j["description"] = r.description;
  j["seed"] = r.seed;
  j["status"] = r.pass() ? "pass" : "fail";
  j["domains"] = json::array();
  for (const auto& d : r.domains)
    j["domains"].push_back({{"name", d.name}, {"operator", d.op}, {"nodes", d.nodes}, {"h", d.h}, {"c", d.c},
                            {"a", d.a}, {"eigenpairs", d.eigenpairs}, {"eps", d.eps}});
  j["checks"] = json::object();
  for (const auto& [name, s] : detail::bound_stats(r))
    j["checks"][name] = {{"reports", s.reports}, {"failures", s.failures}, {"vacuous", s.vacuous},
                         {"worst_ratio", s.worst}, {"pass", s.failures == 0}};
  j["fits"] = json::array();
  for (const auto& f : r.fits)
    j["fits"].push_back({{"check", f.check},
                         {"domain", f.domain},
                         {"quantity", f.quantity},
                         {"exponent", f.fit.exponent},
                         {"log_constant", f.fit.log_constant},
                         {"r_squared", f.fit.r_squared},
                         {"window", {f.fit.window.first, f.fit.window.second}},
                         {"points", f.fit.points},
                         {"relation", to_string(f.relation)},
                         {"target", f.target},
                         {"slack", f.slack},
                         {"pass", f.pass}});
  j["metrics"] = json::array();
  for (const auto& m : r.metrics)
    j["metrics"].push_back({{"check", m.check},
                            {"domain", m.domain},
                            {"name", m.name},
                            {"value", m.value},
                            {"relation", to_string(m.relation)},
                            {"limit", m.limit},
                            {"slack", m.slack},
                            {"pass", m.pass}});
  j["notes"] = r.notes;
  return j;
}

inline std::string summary_text(const CampaignResult& r) {
  std::ostringstream os;
  auto line = [&](const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    os << buf << '\n';
  };
  os << "campaign: " << r.name << '\n';
  if (!r.description.empty()) os << r.description << '\n';
  os << "seed: " << r.seed << "\n\n";
  for (const auto& d : r.domains)
    line("domain %s  nodes=%zu  operator=%s  c=%g a=%g  eigenpairs=%zu", d.name.c_str(), d.nodes, d.op.c_str(), d.c,
         d.a, d.eigenpairs);
  const auto stats = detail::bound_stats(r);
  if (!stats.empty()) {
    os << '\n';
    line("%-16s %8s %6s %8s %13s  %s", "check", "reports", "fail", "vacuous", "worst_ratio", "status");
    for (const auto& [name, s] : stats)
      line("%-16s %8zu %6zu %8zu %13.6e  %s", name.c_str(), s.reports, s.failures, s.vacuous, s.worst,
           s.failures == 0 ? "PASS" : "FAIL");
  }
  if (!r.fits.empty()) {
    os << "\nexponent fits\n";
    for (const auto& f : r.fits) {
      std::string rel = f.relation == Relation::info ? "(bound " + detail::fmt_num(f.target) + ")"
                        : f.relation == Relation::within
                            ? "(target " + detail::fmt_num(f.target) + " +- " + detail::fmt_num(f.slack) + ")"
                            : "(>= " + detail::fmt_num(f.target - f.slack) + ")";
      line("  %-10s %-34s %-28s exponent %8.4f r2 %.5f %s %s", f.check.c_str(), f.domain.c_str(), f.quantity.c_str(),
           f.fit.exponent, f.fit.r_squared, rel.c_str(), f.relation == Relation::info ? "" : (f.pass ? "PASS" : "FAIL"));
    }
  }
  if (!r.metrics.empty()) {
    os << "\nmetrics\n";
    for (const auto& m : r.metrics) {
      std::string rel;
      if (m.relation == Relation::within) rel = "(target " + detail::fmt_num(m.limit) + " +- " + detail::fmt_num(m.slack) + ")";
      if (m.relation == Relation::at_most) rel = "(<= " + detail::fmt_num(m.limit) + ")";
      if (m.relation == Relation::at_least) rel = "(>= " + detail::fmt_num(m.limit) + ")";
      line("  %-15s %-34s %-40s %14.6e %s %s", m.check.c_str(), m.domain.c_str(), m.name.c_str(), m.value, rel.c_str(),
           m.relation == Relation::info ? "" : (m.pass ? "PASS" : "FAIL"));
    }
  }
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  os << "\noverall: " << (r.pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

/// Writes the requested formats into `dir`; returns the written file names.
inline std::vector<std::string> write_outputs(const CampaignResult& r, const std::filesystem::path& dir,
                                              const std::set<std::string>& formats) {
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files;
  if (formats.count("csv")) {
    files.emplace_back("bounds.csv", bounds_csv(r));
    if (!r.shrink.empty()) files.emplace_back("shrink.csv", shrink_csv(r));
    if (!r.heat.empty()) files.emplace_back("heat.csv", heat_csv(r));
  }
  if (formats.count("json")) files.emplace_back("summary.json", summary_json(r).dump(2) + "\n");
  if (formats.count("text")) files.emplace_back("summary.txt", summary_text(r));
  std::vector<std::string> names;
  for (const auto& [name, content] : files) {
    detail::write_atomic(dir / name, content);
    names.push_back(name);
  }
  return names;
}

}  // namespace decaylab
