#include "hornlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hornlab/errors.hpp"
#include "hornlab/frequency_elliptic.hpp"
#include "hornlab/frequency_parabolic.hpp"
#include "hornlab/io.hpp"
#include "hornlab/parallel.hpp"
#include "hornlab/radial_modes.hpp"
#include "hornlab/spectral_heat.hpp"

#ifndef HORNLAB_VERSION
#define HORNLAB_VERSION "unknown"
#endif

namespace hornlab::cli {

using nlohmann::json;

namespace {

json grid_json(const GridSpec& g) {
  return {{"lo", g.lo}, {"hi", g.hi}, {"points", g.points}, {"spacing", g.log_spacing ? "log" : "linear"}};
}

void merge_into(json& base, const json& user, const std::string& where) {
  if (!user.is_object()) throw ConfigError("config: " + (where.empty() ? std::string("document") : where) + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object() && key != "heat.initial")
      merge_into(slot, it.value(), key);
    else
      slot = it.value();
  }
}

void apply_override(json& doc, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + item + "'");
  const std::string key = item.substr(0, eq), text = item.substr(eq + 1);
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw ConfigError("--set: unknown key '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  *node = value;
}

template <class T>
T take(const json& doc, const char* a, const char* b) {
  try {
    return doc.at(a).at(b).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + a + "." + b + "'");
  }
}

GridSpec take_grid(const json& doc, const char* a, const char* b) {
  const std::string name = std::string(a) + "." + b;
  GridSpec g;
  try {
    const json& j = doc.at(a).at(b);
    g.lo = j.at("lo").get<double>();
    g.hi = j.at("hi").get<double>();
    g.points = j.at("points").get<int>();
    const std::string sp = j.at("spacing").get<std::string>();
    if (sp != "log" && sp != "linear") throw ConfigError("config: " + name + ".spacing must be log or linear");
    g.log_spacing = sp == "log";
  } catch (const json::exception&) {
    throw ConfigError("config: bad grid '" + name + "' (needs lo, hi, points, spacing)");
  }
  if (!(g.hi > g.lo) || g.points < 2 || (g.log_spacing && !(g.lo > 0.0)))
    throw ConfigError("config: grid '" + name + "' must be non-empty and increasing (log grids need lo > 0)");
  return g;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

json fit_json(const num::LineFit& f, double range) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.max_residual},
          {"residual_fraction", range > 0.0 ? f.max_residual / range : 0.0}};
}

double span_of(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

struct Context {
  explicit Context(const RunConfig& c) : cfg(c) {}
  const RunConfig& cfg;
  json results = json::object();
  json checks = json::object();
  std::vector<std::pair<std::string, std::string>> files;
  std::string stage = "setup";
  bool bounds_ok = true;

  void check(const std::string& name, bool ok) {
    checks[name] = ok;
    bounds_ok = bounds_ok && ok;
  }
};

ModeState mode_state(const RunConfig& cfg, double r_hi) {
  const auto& m = cfg.mode;
  if (m.i >= 1) return make_mode_state(profile_from_k2(cfg.params, m.i, m.mu, m.r_min, m.n_grid, cfg.tolerances.ode));
  if (m.mu == 0.0) return make_mode_state(constant_profile(cfg.params, m.r_min, r_hi, m.n_grid));
  return make_mode_state(bessel_profile(cfg.params, m.mu, m.r_min, r_hi, m.n_grid));
}

std::vector<EigenPair> eigenpairs(Context& ctx, int count) {
  ctx.stage = "eigs";
  EigenOptions opts;
  opts.ode_tol = ctx.cfg.tolerances.ode;
  opts.rel_width = ctx.cfg.tolerances.root;
  auto pairs = dirichlet_eigenvalues(ctx.cfg.params, ctx.cfg.eigs.i, ctx.cfg.eigs.r_out, count, opts);

  std::ostringstream csv;
  csv << "j,nu,zeros,norm_defect\n";
  bool sturm = true, normed = true, dirichlet = true, simple = true;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    csv << j + 1 << ',' << io::sci(pairs[j].nu) << ',' << pairs[j].zeros << ',' << io::sci(pairs[j].norm_defect) << '\n';
    sturm = sturm && pairs[j].zeros == int(j);
    normed = normed && pairs[j].norm_defect <= 1e-8;
    dirichlet = dirichlet && pairs[j].dirichlet_defect <= 1e-8;
    simple = simple && (j == 0 || pairs[j].nu > pairs[j - 1].nu);
  }
  ctx.files.emplace_back("eigs.csv", csv.str());
  json e = {{"i", ctx.cfg.eigs.i}, {"r_out", ctx.cfg.eigs.r_out}, {"nu", json::array()}};
  for (const auto& p : pairs) e["nu"].push_back(p.nu);
  ctx.check("eigs_simple", simple);
  ctx.check("eigs_sturm_count", sturm);
  ctx.check("eigs_normalised", normed);
  ctx.check("eigs_dirichlet", dirichlet);
  if (pairs.size() >= 8) {
    const auto w = weyl_check(pairs, ctx.cfg.params);
    e["weyl"] = {{"C1", w.C1}, {"C2", w.C2}, {"exponent", w.exponent}};
    ctx.check("weyl_exponent", w.exponent >= 2.0 / ctx.cfg.params.bigN - 0.1 && w.exponent <= 2.1);
  }
  ctx.results["eigs"] = e;
  return pairs;
}

CaloricSeries make_series(Context& ctx) {
  const auto& h = ctx.cfg.heat;
  const bool projected = !h.initial_r.empty();
  const int count = projected ? ctx.cfg.eigs.count : std::max<int>(ctx.cfg.eigs.count, int(h.coeffs.size()));
  auto pairs = eigenpairs(ctx, count);
  ctx.stage = "series";
  if (projected) {
    const auto& xs = h.initial_r;
    const auto& ys = h.initial_u;
    auto u0 = [&xs, &ys](double r) {
      if (r < xs.front() || r > xs.back()) return 0.0;
      const auto it = std::upper_bound(xs.begin(), xs.end(), r);
      if (it == xs.end()) return ys.back();
      const std::size_t k = std::size_t(it - xs.begin());
      const double w = (r - xs[k - 1]) / (xs[k] - xs[k - 1]);
      return (1 - w) * ys[k - 1] + w * ys[k];
    };
    return CaloricSeries::from_initial_profile(std::move(pairs), u0);
  }
  pairs.resize(h.coeffs.size());
  return CaloricSeries(std::move(pairs), h.coeffs);
}

void decay_block(Context& ctx, const CaloricSeries& s) {
  ctx.stage = "heat";
  const auto& h = ctx.cfg.heat;
  const auto r_grid = h.r_grid.values();
  std::ostringstream csv;
  csv << "r,t,sign,log_mag\n";
  json runs = json::array();
  std::vector<double> slopes;
  bool fits_ok = true;
  for (double t : h.t_list) {
    std::vector<double> mags;
    for (double r : r_grid) {
      const auto v = evaluate_caloric(s, r, t);
      csv << io::sci(r) << ',' << io::sci(t) << ',' << v.sign << ',' << io::sci(v.log_mag) << '\n';
      mags.push_back(v.log_mag);
    }
    const auto fit = caloric_decay_check(s, r_grid, t);
    const double range = span_of(mags);
    runs.push_back({{"t", t}, {"fit", fit_json(fit, range)}, {"tail_certificate", s.tail_certificate(t)}});
    slopes.push_back(fit.slope);
    fits_ok = fits_ok && fit.slope < 0.0 && fit.max_residual <= 0.1 * range;
  }
  double variation = 0.0;
  const double ref = slopes[slopes.size() / 2];
  for (double sl : slopes) variation = std::max(variation, std::abs(sl - ref) / std::abs(ref));
  ctx.files.emplace_back("heat.csv", csv.str());
  ctx.results["heat"] = {{"truncation", s.truncation()},
                         {"coeffs", s.coeffs()},
                         {"coeff_bound", s.coeff_bound()},
                         {"decay", runs},
                         {"slope_variation", variation}};
  ctx.check("decay_negative_slope_and_fit", fits_ok);
  ctx.check("decay_slope_t_stable", variation <= 0.15);
}

void elliptic_block(Context& ctx, const ModeState& state) {
  ctx.stage = "freq-elliptic";
  const auto grid = ctx.cfg.freq.r_grid.values();
  const auto scan = elliptic_scan(state, grid);
  const auto id = check_logI_identity(state, scan);
  const auto ug = check_U_growth(state, scan);
  std::ostringstream csv;
  scan.write_csv(csv);
  ctx.files.emplace_back("freq_elliptic.csv", csv.str());
  json report = {{"identity_defect", id.max_defect}, {"identity_abs_defect", id.max_abs_defect},
                 {"U_C", ug.C}, {"U_growth_defect", ug.defect}};
  ctx.check("logI_identity", id.max_defect <= 1e-3);
  ctx.check("U_growth", ug.defect <= 1e-9 * std::max(1.0, ug.C));
  if (scan.rows.size() >= 8) {
    std::vector<double> logs;
    for (const auto& row : scan.rows) logs.push_back(row.log_I);
    const auto fit = check_I_lower(state, scan);
    report["I_fit"] = fit_json(fit, span_of(logs));
    if (state.i >= 1) ctx.check("I_lower", fit.slope >= 0.0 && fit.max_residual <= 0.1 * span_of(logs));
  }
  ctx.files.emplace_back("freq_elliptic_report.json", report.dump(2) + "\n");
  ctx.results["freq_elliptic"] = report;
}

void parabolic_block(Context& ctx, const CaloricField& u, bool tip_vanishing) {
  ctx.stage = "freq-parabolic";
  const auto grid = ctx.cfg.freq.R_grid.values();
  const double rel_tol = std::min(ctx.cfg.tolerances.quad, 1e-10);
  std::vector<ParabolicIDN> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { vals[k] = parabolic_IDN(u, grid[k], rel_tol); });
  FrequencyScan scan;
  scan.kind = FrequencyScan::Kind::parabolic;
  std::vector<double> logD;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    scan.rows.push_back({grid[k], vals[k].I, vals[k].D, vals[k].N, std::log(vals[k].I)});
    logD.push_back(vals[k].log_D);
  }
  const double Rm = std::sqrt(grid.front() * grid.back());
  const auto id = check_ID_relation(u, Rm, 1e-3 * Rm);
  const auto nb = check_N_bound(ctx.cfg.params, scan);
  std::ostringstream csv;
  scan.write_csv(csv);
  ctx.files.emplace_back("freq_parabolic.csv", csv.str());
  json report = {{"ID_defect", id.defect}, {"ID_relative_defect", id.relative_defect}, {"ID_R", Rm},
                 {"N_C", nb.C}, {"N_defect", nb.defect}, {"N_trivial", nb.trivial}};
  ctx.check("ID_relation", id.relative_defect <= 1e-4);
  ctx.check("N_bound", nb.trivial || nb.defect <= 1e-9);
  if (grid.size() >= 8) {
    const auto fit = check_D_lower(ctx.cfg.params, scan);
    report["D_fit"] = fit_json(fit, span_of(logD));
    ctx.check("D_lower", tip_vanishing ? fit.slope >= 0.0 && fit.max_residual <= 0.1 * span_of(logD)
                                       : std::abs(fit.slope) <= 1e-8);
  }
  ctx.files.emplace_back("freq_parabolic_report.json", report.dump(2) + "\n");
  ctx.results["freq_parabolic"] = report;
}

void run_pipeline(Context& ctx, const std::string& command) {
  const RunConfig& cfg = ctx.cfg;
  if (command == "modes") {
    ctx.stage = "modes";
    const double r_hi = cfg.mode.i >= 1 ? 0.0 : cfg.freq.r_grid.hi;
    const ModeState s = mode_state(cfg, r_hi);
    std::ostringstream csv;
    s.profile->write_csv(csv);
    ctx.files.emplace_back("modes.csv", csv.str());
    json block = {{"i", s.i}, {"mu", s.mu}, {"r_lo", s.r_lo()}, {"r_hi", s.r_hi()}};
    if (s.i >= 1) {
      const auto fit = decay_exponent_fit(*s.profile);
      const double beta = k_rate(cfg.params, s.i);
      std::vector<double> mags;
      for (double l : s.profile->log_mag())
        if (std::isfinite(l)) mags.push_back(l);
      block["decay_fit"] = fit_json(fit, span_of(mags));
      block["decay_fit"]["bracket"] = {-(beta + 2.0), -(beta - 1.0)};
      ctx.check("decay_in_bracket", fit.slope >= -(beta + 2.0) && fit.slope <= -(beta - 1.0));
      ctx.check("decay_fit_residual", fit.max_residual <= 0.05 * span_of(mags));
    }
    ctx.results["modes"] = block;
  } else if (command == "eigs") {
    eigenpairs(ctx, cfg.eigs.count);
  } else if (command == "freq-elliptic") {
    elliptic_block(ctx, mode_state(cfg, cfg.freq.r_grid.hi));
  } else if (command == "freq-parabolic") {
    if (cfg.freq.field == "unit") {
      parabolic_block(ctx, UnitCaloric(cfg.params), false);
    } else {
      const CaloricSeries s = make_series(ctx);
      parabolic_block(ctx, s, true);
    }
  } else if (command == "heat") {
    decay_block(ctx, make_series(ctx));
  } else if (command == "analyticity") {
    const CaloricSeries s = make_series(ctx);
    ctx.stage = "analyticity";
    const auto& a = cfg.analyticity;
    const auto rep = analyticity_probe(s, a.r0, a.t0, a.kmax);
    json coeffs = json::array();
    for (double l : rep.log_coeffs) coeffs.push_back(std::isfinite(l) ? json(l) : json(nullptr));
    const json out = {{"t0", a.t0}, {"r0", a.r0}, {"kmax", a.kmax},
                      {"fitted_radius", std::isfinite(rep.radius) ? json(rep.radius) : json("inf")},
                      {"coefficients", coeffs}};
    ctx.files.emplace_back("analyticity.json", out.dump(2) + "\n");
    ctx.results["analyticity"] = out;
    ctx.check("radius_positive", rep.radius > 0.0);
  } else if (command == "demo-counterexample") {
    const CaloricSeries s = make_series(ctx);
    decay_block(ctx, s);
    elliptic_block(ctx, make_mode_state(*s.pairs().front().g));
    parabolic_block(ctx, s, true);
    ctx.stage = "summary";
    const auto& decay = ctx.results["heat"]["decay"];
    const json& mid = decay[decay.size() / 2];
    const json summary = {{"decay_slope", mid["fit"]["slope"]},
                          {"decay_t", mid["t"]},
                          {"logI_defect", ctx.results["freq_elliptic"]["identity_defect"]},
                          {"U_C", ctx.results["freq_elliptic"]["U_C"]},
                          {"ID_defect", ctx.results["freq_parabolic"]["ID_relative_defect"]},
                          {"N_C", ctx.results["freq_parabolic"]["N_C"]},
                          {"checks", ctx.checks},
                          {"all_passed", ctx.bounds_ok}};
    ctx.files.emplace_back("summary.json", summary.dump(2) + "\n");
    ctx.results["summary"] = summary;
  }
}

}  // namespace

std::vector<double> GridSpec::values() const {
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) {
    const double f = double(k) / (points - 1);
    g[k] = log_spacing ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

json default_config_json() {
  const RunConfig d;
  return {{"params", {{"n", d.params.n}, {"N", d.params.bigN}, {"eps", d.params.eps}, {"eta", d.params.eta}}},
          {"mode", {{"i", d.mode.i}, {"mu", d.mode.mu}, {"r_min", d.mode.r_min}, {"n_grid", d.mode.n_grid}}},
          {"eigs", {{"i", d.eigs.i}, {"r_out", d.eigs.r_out}, {"count", d.eigs.count}}},
          {"freq", {{"r_grid", grid_json(d.freq.r_grid)}, {"R_grid", grid_json(d.freq.R_grid)}, {"field", d.freq.field}}},
          {"heat",
           {{"coeffs", d.heat.coeffs}, {"initial", nullptr}, {"t_list", d.heat.t_list}, {"r_grid", grid_json(d.heat.r_grid)}}},
          {"analyticity", {{"r0", d.analyticity.r0}, {"t0", d.analyticity.t0}, {"kmax", d.analyticity.kmax}}},
          {"output", d.output},
          {"tolerances", {{"ode", d.tolerances.ode}, {"quad", d.tolerances.quad}, {"root", d.tolerances.root}}}};
}

RunConfig load_config(const json& user, const std::vector<std::string>& overrides, json* effective) {
  json doc = default_config_json();
  merge_into(doc, user, "");
  for (const auto& o : overrides) apply_override(doc, o);
  if (effective) *effective = doc;

  RunConfig c;
  try {
    c.params = make_horn_params(take<int>(doc, "params", "n"), take<double>(doc, "params", "N"),
                                take<double>(doc, "params", "eps"), take<double>(doc, "params", "eta"));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: params: ") + e.what());
  }
  c.mode.i = take<int>(doc, "mode", "i");
  c.mode.mu = take<double>(doc, "mode", "mu");
  c.mode.r_min = take<double>(doc, "mode", "r_min");
  c.mode.n_grid = take<int>(doc, "mode", "n_grid");
  require(c.mode.i >= 0 && c.mode.mu >= 0.0 && c.mode.r_min > 0.0 && c.mode.n_grid >= 16,
          "mode needs i >= 0, mu >= 0, r_min > 0, n_grid >= 16");
  c.eigs.i = take<int>(doc, "eigs", "i");
  c.eigs.r_out = take<double>(doc, "eigs", "r_out");
  c.eigs.count = take<int>(doc, "eigs", "count");
  require(c.eigs.i >= 1 && c.eigs.r_out > 0.0 && c.eigs.count >= 1, "eigs needs i >= 1, r_out > 0, count >= 1");
  c.freq.r_grid = take_grid(doc, "freq", "r_grid");
  c.freq.R_grid = take_grid(doc, "freq", "R_grid");
  c.freq.field = take<std::string>(doc, "freq", "field");
  require(c.freq.field == "series" || c.freq.field == "unit", "freq.field must be series or unit");
  c.heat.coeffs = take<std::vector<double>>(doc, "heat", "coeffs");
  c.heat.t_list = take<std::vector<double>>(doc, "heat", "t_list");
  c.heat.r_grid = take_grid(doc, "heat", "r_grid");
  const json& init = doc["heat"]["initial"];
  if (!init.is_null()) {
    try {
      c.heat.initial_r = init.at("r").get<std::vector<double>>();
      c.heat.initial_u = init.at("u").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError("config: heat.initial must be {\"r\": [...], \"u\": [...]}");
    }
    require(c.heat.initial_r.size() >= 2 && c.heat.initial_r.size() == c.heat.initial_u.size(),
            "heat.initial needs matching r and u arrays of length >= 2");
    for (std::size_t k = 1; k < c.heat.initial_r.size(); ++k)
      require(c.heat.initial_r[k] > c.heat.initial_r[k - 1], "heat.initial.r must increase");
  }
  require(!c.heat.coeffs.empty(), "heat.coeffs must be non-empty");
  require(!c.heat.t_list.empty(), "heat.t_list must be non-empty");
  for (std::size_t k = 0; k < c.heat.t_list.size(); ++k)
    require(c.heat.t_list[k] > 0.0 && (k == 0 || c.heat.t_list[k] > c.heat.t_list[k - 1]),
            "heat.t_list must be positive and increasing");
  c.analyticity.r0 = take<double>(doc, "analyticity", "r0");
  c.analyticity.t0 = take<double>(doc, "analyticity", "t0");
  c.analyticity.kmax = take<int>(doc, "analyticity", "kmax");
  require(c.analyticity.t0 > 0.0 && c.analyticity.kmax >= 8, "analyticity needs t0 > 0, kmax >= 8");
  try {
    c.output = doc.at("output").get<std::string>();
  } catch (const json::exception&) {
    throw ConfigError("config: output must be a path string");
  }
  c.tolerances.ode = take<double>(doc, "tolerances", "ode");
  c.tolerances.quad = take<double>(doc, "tolerances", "quad");
  c.tolerances.root = take<double>(doc, "tolerances", "root");
  require(c.tolerances.ode > 0.0 && c.tolerances.quad > 0.0 && c.tolerances.root > 0.0, "tolerances must be positive");
  return c;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> list{"modes", "eigs", "freq-elliptic", "freq-parabolic",
                                             "heat", "analyticity", "demo-counterexample"};
  return list;
}

int run(const std::string& command, const RunConfig& config, const json& config_echo,
        const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx(config);
  int code = kOk;
  std::string message;
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    code = kConfigError;
    message = "unknown command '" + command + "'";
  } else {
    try {
      run_pipeline(ctx, command);
      if (!ctx.bounds_ok) {
        code = kBoundCheckFailure;
        message = "bound check failed";
      }
    } catch (const DomainError& e) {
      code = kConfigError;
      message = e.what();
    } catch (const NumericalError& e) {
      code = kNumericalFailure;
      message = e.what();
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  static const char* status[] = {"ok", "", "config_error", "numerical_failure", "bound_check_failure"};
  json manifest = {{"command", command},
                   {"version", HORNLAB_VERSION},
                   {"compiler", __VERSION__},
                   {"threads", worker_count()},
                   {"config", config_echo},
                   {"status", status[code]},
                   {"exit_code", code},
                   {"wall_time_s", wall},
                   {"checks", ctx.checks},
                   {"results", ctx.results},
                   {"artifacts", json::array()}};
  if (code != kOk) {
    manifest["failure_stage"] = ctx.stage;
    manifest["message"] = message;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "hornlab: cannot create output directory " << out_dir << ": " << ec.message() << '\n';
    return code == kOk ? kConfigError : code;
  }
  if (code == kOk || code == kBoundCheckFailure) {
    for (const auto& [name, content] : ctx.files) {
      std::ofstream(out_dir / name, std::ios::binary) << content;
      manifest["artifacts"].push_back(name);
    }
  }
  std::ofstream(out_dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
  if (code != kOk) std::cerr << "hornlab " << command << ": " << message << " (stage " << ctx.stage << ")\n";
  return code;
}

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on weighted metric horns"};
  std::string command, config_path, out_dir;
  std::vector<std::string> overrides;
  app.add_option("command", command, "Command")->required()->check(CLI::IsMember(commands()));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--set", overrides, "Override a config leaf, e.g. params.eps=0.4");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  json echo;
  RunConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    json user = json::parse(in, nullptr, false);
    if (user.is_discarded()) throw ConfigError("config file '" + config_path + "' is not valid JSON");
    cfg = load_config(user, overrides, &echo);
  } catch (const ConfigError& e) {
    std::cerr << "hornlab: " << e.what() << '\n';
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("hornlab_out") : std::filesystem::path(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!ec) {
      const json manifest = {{"command", command},     {"version", HORNLAB_VERSION}, {"status", "config_error"},
                             {"exit_code", kConfigError}, {"failure_stage", "config"},  {"message", e.what()}};
      std::ofstream(dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
    }
    return kConfigError;
  }
  return run(command, cfg, echo, out_dir.empty() ? std::filesystem::path(cfg.output) : std::filesystem::path(out_dir));
}

}  // namespace hornlab::cli
