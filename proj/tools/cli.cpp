#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmlrate/error.hpp"
#include "pmlrate/harness.hpp"
#include "pmlrate/rate.hpp"
#include "pmlrate/report.hpp"
#include "pmlrate/scaling.hpp"
#include "pmlrate/solver.hpp"
#include "pmlrate/special.hpp"

namespace pml::cli {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc{} || ptr != end) throw UsageError("not a number: '" + text + "'");
  return v;
}

// Everything one invocation can set. Keys of the config file are the long flag names.
struct RunConfig {
  std::string subcommand;
  std::string scaling;
  std::string theta = "0.7853981633974483";
  int dim = 2;
  std::string k_list;
  double k = 0.0;
  double R_tr = 0.0;
  double a = 1.0;
  double R1 = 0.0;  // 0: the scaling's R1
  double eta = 0.1;
  double Lambda = 0.0;
  int n_grid = 0;
  std::string output;
  std::string format = "csv";

  double r_min = 0.0;
  double r_max = 0.0;
  int samples = 0;
  double tol = 1e-10;
  std::string method = "closed_form";
  int modes = 0;
  int richardson = 4;
  bool check_grid = false;
  std::string report;
  std::string scalings = "cubic:3:6,poly8:3:5";
  std::string thetas;
  std::string out_dir;
};

using Cell = std::variant<double, long long, std::string>;
using Config = std::vector<std::pair<std::string, std::string>>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;  // trailing summary lines
  nlohmann::ordered_json extra;   // JSON-only summary fields
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void write_table(std::ostream& os, const std::string& command, const Config& config, const Table& t,
                 const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    auto& cfg = doc["config"];
    cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    doc["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = cell_json(r[i]);
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    for (const auto& [k, v] : t.extra.items()) doc[k] = v;
    os << doc.dump(2) << '\n';
    return;
  }
  os << "# pmlrate " << command;
  for (const auto& [k, v] : config) os << ' ' << k << '=' << v;
  os << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << '\n';
  }
  for (const auto& n : t.notes) os << "# " << n << '\n';
}

// Writes to --output when given, else to the standard stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

unsigned sweep_threads() {
  const char* env = std::getenv("PML_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  const double v = parse_number(env);
  if (v < 0 || v != std::floor(v)) throw UsageError("PML_THREADS must be a non-negative integer");
  return static_cast<unsigned>(v);
}

std::string angle_text(double theta) { return format_double(theta); }

ScalingFn make_scaling(const std::string& spec) {
  if (spec.empty()) throw UsageError("--scaling is required");
  return ScalingFn::parse(spec);
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw UsageError("--dim must be 1, 2 or 3");
}

Config common_config(const RunConfig& c, const ScalingFn& s, double theta) {
  return {{"scaling", s.spec()}, {"theta", angle_text(theta)}, {"dim", std::to_string(c.dim)}};
}

// ---------------------------------------------------------------------------

int run_rate_phi(const RunConfig& c, std::ostream& out) {
  const ScalingFn s = make_scaling(c.scaling);
  check_dim(c.dim);
  const double theta = parse_angle(c.theta);
  const PmlProfile profile(s, theta);
  if (!(c.r_max > c.r_min) || c.r_min < 0.0) throw UsageError("need 0 <= --r-min < --r-max");
  if (c.dim >= 2 && c.r_min == 0.0) throw UsageError("--r-min must be positive for dim >= 2");
  const int n = c.samples > 0 ? c.samples : 200;
  if (n < 2) throw UsageError("--samples must be at least 2");

  Table t;
  t.columns = {"r", "phi", "phi_over_tan_theta", "t_min", "condition_holds"};
  for (int i = 0; i < n; ++i) {
    const double r = i + 1 == n ? c.r_max : c.r_min + (c.r_max - c.r_min) * i / (n - 1);
    const double p = phi(profile, c.dim, r);
    const auto cond = phi_condition_holds(profile, r);
    t.rows.push_back({r, p, p / profile.tan_theta(), c.dim >= 2 ? t_min(profile, r) : 0.0,
                      static_cast<long long>(cond.holds ? 1 : 0)});
  }
  Config cfg = common_config(c, s, profile.theta());
  cfg.emplace_back("r-min", format_double(c.r_min));
  cfg.emplace_back("r-max", format_double(c.r_max));
  cfg.emplace_back("samples", std::to_string(n));
  Sink sink(c.output, out);
  write_table(sink.get(), "rate phi", cfg, t, c.format);
  return kExitOk;
}

int run_rate_theta0(const RunConfig& c, std::ostream& out) {
  const ScalingFn s = make_scaling(c.scaling);
  check_dim(c.dim);
  if (!(c.R_tr > s.R1())) throw UsageError("--rtr must exceed the scaling's R1");
  if (c.Lambda < 0.0) throw UsageError("--lambda must be non-negative");
  const auto res = theta0(c.Lambda, s, c.dim, c.R_tr, c.tol);
  const PmlProfile at(s, res.theta);
  Table t;
  t.columns = {"Lambda", "theta0", "theta0_deg", "integral_phi", "saturated"};
  t.rows.push_back({c.Lambda, res.theta, res.theta * 180.0 / std::numbers::pi,
                    integral_phi(at, c.dim, s.R1(), c.R_tr), static_cast<long long>(res.saturated)});
  Config cfg = {{"scaling", s.spec()},          {"dim", std::to_string(c.dim)},
                {"rtr", format_double(c.R_tr)}, {"lambda", format_double(c.Lambda)},
                {"tol", format_double(c.tol)}};
  Sink sink(c.output, out);
  write_table(sink.get(), "rate theta0", cfg, t, c.format);
  return kExitOk;
}

int run_predict(const RunConfig& c, std::ostream& out) {
  const ScalingFn s = make_scaling(c.scaling);
  check_dim(c.dim);
  const PmlProfile profile(s, parse_angle(c.theta));
  if (!(c.k > 0.0)) throw UsageError("--k must be positive");
  if (!(c.R_tr > s.R1())) throw UsageError("--rtr must exceed the scaling's R1");
  const auto p = predicted_exponent(c.k, profile, c.dim, c.R_tr, c.Lambda, c.eta);
  Table t;
  t.columns = {"k", "integral_phi", "eta", "Lambda", "exponent", "bound", "flag"};
  std::string flag = "ok";
  if (p.no_decay_guaranteed) flag = "no_decay_guaranteed";
  if (p.below_threshold) flag = flag == "ok" ? "below_threshold" : flag + "|below_threshold";
  t.rows.push_back({p.k, p.integral_phi, p.eta, p.Lambda, p.exponent, p.bound, flag});
  Config cfg = common_config(c, s, profile.theta());
  cfg.emplace_back("rtr", format_double(c.R_tr));
  cfg.emplace_back("k", format_double(c.k));
  cfg.emplace_back("eta", format_double(c.eta));
  cfg.emplace_back("lambda", format_double(c.Lambda));
  Sink sink(c.output, out);
  write_table(sink.get(), "predict", cfg, t, c.format);
  return kExitOk;
}

void write_report(const std::string& path, const std::string& format, const std::vector<SweepRow>& rows,
                  const FitResult& fit) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open report file '" + path + "'");
  f << (format == "json" ? sweep_json(rows, fit) : sweep_csv(rows));
}

void add_fit_summary(Table& t, const FitResult& fit, bool unresolved) {
  std::ostringstream os;
  os << "fit slope=" << format_double(fit.slope) << " predicted_slope=" << format_double(fit.predicted_slope)
     << " residual_rms=" << format_double(fit.residual_rms) << " used_points=" << fit.used_points
     << " verdict=" << to_string(fit.verdict);
  t.notes.push_back(os.str());
  if (unresolved) t.notes.push_back("warning: discretization not 10x below the PML error on some rows");
  t.extra["fit"] = {{"slope", fit.slope},
                    {"predicted_slope", fit.predicted_slope},
                    {"residual_rms", fit.residual_rms},
                    {"used_points", fit.used_points},
                    {"verdict", to_string(fit.verdict)}};
}

std::vector<double> k_values(const RunConfig& c) {
  if (c.k_list.empty()) throw UsageError("--k-list is required");
  auto ks = parse_list(c.k_list);
  for (double k : ks) {
    if (!(k > 0.0)) throw UsageError("--k-list entries must be positive");
  }
  return ks;
}

int run_verify_1d(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ScalingFn s = make_scaling(c.scaling);
  const PmlProfile profile(s, parse_angle(c.theta));
  const double window = c.R1 > 0.0 ? c.R1 : s.R1();
  if (!(window <= s.R1())) throw UsageError("--r1 must not exceed the scaling's R1");
  if (!(c.R_tr > s.R1())) throw UsageError("--rtr must exceed the scaling's R1");
  if (c.n_grid < 0) throw UsageError("--n-grid must be non-negative");

  OneDConfig base;
  base.profile = profile;
  base.window = window;
  base.R_tr = c.R_tr;
  base.method = c.method == "fd" ? OneDConfig::Method::finite_difference : OneDConfig::Method::closed_form;
  base.n_grid = c.n_grid;
  SweepSpec spec{base, SweepAxis::k, k_values(c), c.eta, c.Lambda, false};
  validate(spec);

  const auto rows = run_sweep(spec, sweep_threads());
  const auto fit = fit_decay_rate(rows, FitCriterion{true, 0.02, 1.0});

  Table t;
  t.columns = {"k", "err_sup", "closed_form_pred", "ratio"};
  for (const auto& r : rows) t.rows.push_back({r.value, r.error, r.report.predicted_bound, r.report.ratio});
  add_fit_summary(t, fit, false);
  Config cfg = common_config(c, s, profile.theta());
  cfg.erase(cfg.begin() + 2);  // dim is always 1 here
  cfg.emplace_back("rtr", format_double(c.R_tr));
  cfg.emplace_back("r1", format_double(window));
  cfg.emplace_back("k-list", c.k_list);
  cfg.emplace_back("method", c.method);
  cfg.emplace_back("n-grid", std::to_string(c.n_grid));
  Sink sink(c.output, out);
  write_table(sink.get(), "verify-1d", cfg, t, c.format);
  write_report(c.report, c.format, rows, fit);
  if (fit.verdict != Verdict::pass) {
    err << "verify-1d: verdict " << to_string(fit.verdict) << '\n';
    return kExitFail;
  }
  return kExitOk;
}

int run_verify_scatter(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ScalingFn s = make_scaling(c.scaling);
  if (c.dim != 2 && c.dim != 3) throw UsageError("--dim must be 2 or 3 for verify-scatter");
  const PmlProfile profile(s, parse_angle(c.theta));

  ScatteringConfig base;
  base.dim = c.dim;
  base.obstacle_radius = c.a;
  base.profile = profile;
  base.R1 = c.R1 > 0.0 ? c.R1 : s.R1();
  base.R_tr = c.R_tr;
  base.n_grid = c.n_grid;
  base.mode_cutoff = c.modes;
  base.richardson_levels = c.richardson;
  base.eta = c.eta;
  base.Lambda = c.Lambda;
  const auto ks = k_values(c);
  for (double k : ks) {
    ScatteringConfig probe = base;
    probe.k = k;
    validate(probe);
  }
  SweepSpec spec{base, SweepAxis::k, ks, c.eta, c.Lambda, c.check_grid};
  validate(spec);

  const auto rows = run_sweep(spec, sweep_threads());
  const auto fit = fit_decay_rate(rows, FitCriterion{});
  const bool unresolved = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) {
    return r.flag.find("unresolved") != std::string::npos;
  });

  Table t;
  t.columns = {"k", "rel_L2", "rel_H1", "predicted_bound", "ratio", "n_modes", "n_grid"};
  if (c.check_grid) t.columns.push_back("grid_diff");
  t.columns.push_back("flag");
  for (const auto& r : rows) {
    std::vector<Cell> row{r.value,
                          r.report.rel_L2,
                          r.report.rel_H1,
                          r.report.predicted_bound,
                          r.report.ratio,
                          static_cast<long long>(r.n_modes),
                          static_cast<long long>(r.n_grid)};
    if (c.check_grid) row.emplace_back(r.discretization);
    row.emplace_back(r.flag);
    t.rows.push_back(std::move(row));
  }
  add_fit_summary(t, fit, unresolved);
  Config cfg = common_config(c, s, profile.theta());
  cfg.emplace_back("a", format_double(c.a));
  cfg.emplace_back("r1", format_double(base.R1));
  cfg.emplace_back("rtr", format_double(c.R_tr));
  cfg.emplace_back("k-list", c.k_list);
  cfg.emplace_back("eta", format_double(c.eta));
  cfg.emplace_back("lambda", format_double(c.Lambda));
  cfg.emplace_back("n-grid", std::to_string(c.n_grid));
  cfg.emplace_back("modes", std::to_string(c.modes));
  cfg.emplace_back("richardson", std::to_string(c.richardson));
  cfg.emplace_back("check-grid", c.check_grid ? "true" : "false");
  Sink sink(c.output, out);
  write_table(sink.get(), "verify-scatter", cfg, t, c.format);
  write_report(c.report, c.format, rows, fit);
  if (fit.verdict != Verdict::pass || unresolved) {
    err << "verify-scatter: verdict " << (unresolved ? "fail (unresolved grid)" : to_string(fit.verdict)) << '\n';
    return kExitFail;
  }
  return kExitOk;
}

int run_figures(const RunConfig& c, std::ostream& out) {
  std::vector<double> thetas;
  if (c.thetas.empty()) {
    thetas = {std::numbers::pi / 8, std::numbers::pi / 4, 3 * std::numbers::pi / 8};
  } else {
    std::stringstream ss(c.thetas);
    std::string item;
    while (std::getline(ss, item, ',')) thetas.push_back(parse_angle(item));
  }
  check_dim(c.dim);
  const int n = c.samples > 0 ? c.samples : 301;

  std::vector<ScalingFn> scalings;
  {
    std::stringstream ss(c.scalings);
    std::string item;
    while (std::getline(ss, item, ',')) scalings.push_back(make_scaling(trim(item)));
  }
  if (scalings.empty()) throw UsageError("--scalings is empty");
  if (!c.out_dir.empty()) std::filesystem::create_directories(c.out_dir);

  std::optional<Sink> sink;
  if (c.out_dir.empty()) sink.emplace(c.output, out);
  for (const auto& s : scalings) {
    const double lo = c.r_max > 0.0 ? c.r_min : std::max(s.R1() - 1.0, 0.5 * s.R1());
    const double hi = c.r_max > 0.0 ? c.r_max : std::max(s.R2(), s.R1() + 3.0);
    const auto fig = reproduce_figure_phi(s, thetas, lo, hi, n, c.dim);
    Table t;
    t.columns = fig.columns;
    for (const auto& r : fig.rows) t.rows.emplace_back(r.begin(), r.end());
    std::string th;
    for (double v : thetas) th += (th.empty() ? "" : ",") + format_double(v);
    Config cfg = {{"scaling", s.spec()},      {"thetas", th},         {"dim", std::to_string(c.dim)},
                  {"r-min", format_double(lo)}, {"r-max", format_double(hi)}, {"samples", std::to_string(n)}};
    if (c.out_dir.empty()) {
      write_table(sink->get(), "figures", cfg, t, c.format);
    } else {
      const std::string name = "figure_phi_" + std::string(to_string(s.kind())) + "." + c.format;
      std::ofstream f(std::filesystem::path(c.out_dir) / name);
      if (!f) throw std::runtime_error("cannot write '" + name + "'");
      write_table(f, "figures", cfg, t, c.format);
    }
  }
  return kExitOk;
}

int run_selftest(const RunConfig& c, std::ostream& out) {
  const auto checks = special::run_identity_suite();
  Table t;
  t.columns = {"check", "max_residual", "tolerance", "result"};
  bool ok = true;
  for (const auto& ch : checks) {
    t.rows.push_back({ch.name, ch.max_residual, ch.tolerance, std::string(ch.pass ? "PASS" : "FAIL")});
    ok = ok && ch.pass;
  }
  Sink sink(c.output, out);
  write_table(sink.get(), "special selftest", {}, t, c.format);
  return ok ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* app, RunConfig& c) {
  app->add_option("--output", c.output, "write the table to this file instead of stdout");
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  // Consumed before parsing; listed here for --help.
  app->add_option("--config", "flat key = value file using the long flag names; flags on the command line win");
}

void add_scaling(CLI::App* app, RunConfig& c) {
  app->add_option("--scaling", c.scaling, "scaling function f as kind:R1:R2 (cubic, poly8) or custom:<csv>")
      ->required();
}

void add_theta(CLI::App* app, RunConfig& c) {
  app->add_option("--theta", c.theta, "scaling angle θ in radians, or deg:<degrees>")->required();
}

void add_dim(CLI::App* app, RunConfig& c) {
  app->add_option("--dim", c.dim, "space dimension d")->check(CLI::Range(1, 3));
}

CLI::App* find_leaf(CLI::App& app, const std::vector<std::string>& args, std::size_t& depth) {
  CLI::App* cur = &app;
  depth = 0;
  while (depth < args.size()) {
    CLI::App* next = cur->get_subcommand_no_throw(args[depth]);
    if (next == nullptr) break;
    cur = next;
    ++depth;
  }
  return cur;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

double parse_angle(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("deg:", 0) == 0) return parse_number(t.substr(4)) * std::numbers::pi / 180.0;
  return parse_number(t);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"pmlrate: PML decay rates and their numerical verification", "pmlrate"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  auto* rate = app.add_subcommand("rate", "rate density Φ_θ and threshold angle");
  rate->require_subcommand(1);

  auto* rphi = rate->add_subcommand("phi", "tabulate Φ_θ(r), t_min and the regime condition");
  add_scaling(rphi, c);
  add_theta(rphi, c);
  add_dim(rphi, c);
  rphi->add_option("--r-min", c.r_min, "first radius r")->required();
  rphi->add_option("--r-max", c.r_max, "last radius r")->required();
  rphi->add_option("--samples", c.samples, "number of radii (default 200)");
  add_common(rphi, c);

  auto* rth = rate->add_subcommand("theta0", "threshold angle θ_0 for a given Λ");
  add_scaling(rth, c);
  add_dim(rth, c);
  rth->add_option("--rtr", c.R_tr, "truncation radius R_tr")->required();
  rth->add_option("--lambda", c.Lambda, "trapping exponent Λ >= 0")->required();
  rth->add_option("--tol", c.tol, "bisection tolerance on θ");
  add_common(rth, c);

  auto* pred = app.add_subcommand("predict", "predicted exponent k((2-η)∫Φ_θ - 3Λ) and bound");
  add_scaling(pred, c);
  add_theta(pred, c);
  add_dim(pred, c);
  pred->add_option("--rtr", c.R_tr, "truncation radius R_tr")->required();
  pred->add_option("--k", c.k, "wavenumber k")->required();
  pred->add_option("--eta", c.eta, "slack η in [0, 2) (default 0.1)");
  pred->add_option("--lambda", c.Lambda, "trapping exponent Λ (default 0)");
  add_common(pred, c);

  auto* v1 = app.add_subcommand("verify-1d", "1D sharpness experiment against bc e^{ikr}");
  add_scaling(v1, c);
  add_theta(v1, c);
  v1->add_option("--rtr", c.R_tr, "truncation radius R_tr")->required();
  v1->add_option("--k-list", c.k_list, "wavenumbers k, comma separated and increasing")->required();
  v1->add_option("--r1", c.R1, "end of the measurement window (default: the scaling's R1)");
  v1->add_option("--method", c.method, "closed_form or fd")->check(CLI::IsMember({"closed_form", "fd"}));
  v1->add_option("--n-grid", c.n_grid, "finite-difference cells (0 = auto)");
  v1->add_option("--eta", c.eta, "slack η recorded with the run (default 0.1)");
  v1->add_option("--lambda", c.Lambda, "trapping exponent Λ (default 0)");
  v1->add_option("--report", c.report, "also write the sweep table (harness schema) here");
  add_common(v1, c);

  auto* vs = app.add_subcommand("verify-scatter", "disk (d=2) / sphere (d=3) scattering k-sweep");
  add_scaling(vs, c);
  add_theta(vs, c);
  vs->add_option("--dim", c.dim, "space dimension d (2 or 3)")->check(CLI::Range(2, 3));
  vs->add_option("--a", c.a, "obstacle radius a (default 1)");
  vs->add_option("--r1", c.R1, "outer radius R1 of the error annulus (default: the scaling's R1)");
  vs->add_option("--rtr", c.R_tr, "truncation radius R_tr")->required();
  vs->add_option("--k-list", c.k_list, "wavenumbers k, comma separated and increasing")->required();
  vs->add_option("--eta", c.eta, "slack η in the predicted slope (default 0.1)");
  vs->add_option("--lambda", c.Lambda, "trapping exponent Λ (default 0)");
  vs->add_option("--n-grid", c.n_grid, "base radial cells (0 = auto)");
  vs->add_option("--modes", c.modes, "highest mode solved (0 = auto)");
  vs->add_option("--richardson", c.richardson, "Richardson levels (1 = plain second order)")
      ->check(CLI::Range(1, 4));
  vs->add_flag("--check-grid", c.check_grid, "also solve on the doubled grid and compare");
  vs->add_option("--report", c.report, "also write the sweep table (harness schema) here");
  add_common(vs, c);

  auto* fig = app.add_subcommand("figures", "tables of f, f', Φ_θ/tanθ and ∫Φ_θ/tanθ for replotting");
  fig->add_option("--scalings", c.scalings, "comma separated scaling specs (default cubic:3:6,poly8:3:5)");
  fig->add_option("--thetas", c.thetas, "comma separated angles θ (default π/8, π/4, 3π/8)");
  add_dim(fig, c);
  fig->add_option("--r-min", c.r_min, "first radius (default max(R1 - 1, R1 / 2))");
  fig->add_option("--r-max", c.r_max, "last radius (default max(R2, R1 + 3))");
  fig->add_option("--samples", c.samples, "radii per table (default 301)");
  fig->add_option("--out-dir", c.out_dir, "write one file per scaling into this directory");
  add_common(fig, c);

  auto* special = app.add_subcommand("special", "special-function checks");
  special->group("");
  special->require_subcommand(1);
  auto* st = special->add_subcommand("selftest", "Bessel identity suite");
  add_common(st, c);

  // argv pre-pass: pull out --config and splice its entries in front of the user's flags.
  std::vector<std::string> user;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        err << "--config requires a file argument\n";
        return kExitUsage;
      }
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      user.push_back(args[i]);
    }
  }

  std::size_t depth = 0;
  CLI::App* leaf = find_leaf(app, user, depth);
  std::vector<std::string> merged(user.begin(), user.begin() + static_cast<std::ptrdiff_t>(depth));
  if (config_path) {
    if (leaf == &app || leaf == rate || leaf == special) {
      err << "--config must follow a complete subcommand\n";
      return kExitUsage;
    }
    try {
      for (const auto& [key, value] : read_config_file(*config_path)) {
        const CLI::Option* opt = leaf->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config" || key == "help") {
          err << "unknown config key '" << key << "' for '" << leaf->get_name() << "'\n";
          return kExitUsage;
        }
        merged.push_back("--" + key + "=" + value);
      }
    } catch (const std::runtime_error& e) {
      err << e.what() << '\n';
      return kExitUsage;
    }
  }
  merged.insert(merged.end(), user.begin() + static_cast<std::ptrdiff_t>(depth), user.end());

  try {
    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (rphi->parsed()) {
      c.subcommand = "rate phi";
      return run_rate_phi(c, out);
    }
    if (rth->parsed()) {
      c.subcommand = "rate theta0";
      return run_rate_theta0(c, out);
    }
    if (pred->parsed()) {
      c.subcommand = "predict";
      return run_predict(c, out);
    }
    if (v1->parsed()) {
      c.subcommand = "verify-1d";
      return run_verify_1d(c, out, err);
    }
    if (vs->parsed()) {
      c.subcommand = "verify-scatter";
      return run_verify_scatter(c, out, err);
    }
    if (fig->parsed()) {
      c.subcommand = "figures";
      return run_figures(c, out);
    }
    if (st->parsed()) {
      c.subcommand = "special selftest";
      return run_selftest(c, out);
    }
  } catch (const SweepError& e) {
    err << "sweep aborted after " << e.completed().size() << " rows: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::invalid_argument& e) {
    // UsageError and ConstructionError: bad inputs caught before any solve.
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  err << "no subcommand\n";
  return kExitUsage;
}

}  // namespace pml::cli
