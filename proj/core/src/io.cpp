#include "toa/io.hpp"

#include <cstdio>
#include <fstream>

namespace toa {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError("missing numeric field '" + key + "'");
  return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError("field '" + key + "' must be numeric");
  return j[key].get<double>();
}

std::string require_string(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError("missing string field '" + key + "'");
  return j[key].get<std::string>();
}

Absorption load_alpha(const json& j) {
  Absorption a;
  const std::string form = require_string(j, "form");
  if (form == "const") {
    a.form = Absorption::Form::constant;
    a.value = number_or(j, "value", 1.0);
  } else if (form == "exp_family") {
    a.form = Absorption::Form::exp_family;
    a.coeff = number_or(j, "coeff", 1.0);
    a.p_log = number_or(j, "p_log", 0.0);
    a.e_log = number_or(j, "e_log", 0.0);
    a.p_lin = number_or(j, "p_lin", 0.0);
    a.e_lin = number_or(j, "e_lin", 0.0);
    a.p_quad = number_or(j, "p_quad", 0.0);
  } else if (form == "table") {
    a.form = Absorption::Form::table;
    if (!j.contains("p") || !j.contains("value"))
      throw ConfigError("table alpha needs 'p' and 'value' arrays");
    a.table_p = j["p"].get<std::vector<double>>();
    a.table_alpha = j["value"].get<std::vector<double>>();
  } else {
    throw ConfigError("unknown alpha form '" + form + "'");
  }
  a.validate();
  return a;
}

json alpha_json(const Absorption& a) {
  json j;
  switch (a.form) {
    case Absorption::Form::constant:
      j["form"] = "const";
      j["value"] = a.value;
      break;
    case Absorption::Form::exp_family:
      j["form"] = "exp_family";
      j["coeff"] = a.coeff;
      j["p_log"] = a.p_log;
      j["e_log"] = a.e_log;
      j["p_lin"] = a.p_lin;
      j["e_lin"] = a.e_lin;
      j["p_quad"] = a.p_quad;
      break;
    case Absorption::Form::table:
      j["form"] = "table";
      j["p"] = a.table_p;
      j["value"] = a.table_alpha;
      break;
  }
  return j;
}

}  // namespace

MomentumState load_state(const json& j) {
  const std::string family = require_string(j, "family");
  const double mass = require_number(j, "mass");
  if (!j.contains("params") || !j["params"].is_object())
    throw ConfigError("state needs a 'params' object");
  const json& p = j["params"];
  try {
    if (family == "gaussian")
      return make_gaussian_state(require_number(p, "p0"),
                                 require_number(p, "sigma_p"),
                                 number_or(p, "x0", 0.0), mass);
    if (family == "inverse_gaussian_kinetic")
      return make_inverse_gaussian_state(require_number(p, "xi0"),
                                         require_number(p, "sigma_xi"), mass);
    if (family == "levy_energy")
      return make_levy_energy_state(require_number(p, "c_E"), mass);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid state parameters: ") + e.what());
  }
  throw ConfigError("unknown state family '" + family + "'");
}

DetectorModel load_detector(const json& j) {
  DetectorModel d;
  const std::string kind = require_string(j, "kind");
  if (kind == "maximal") {
    d.kind = DetectorKind::maximal;
    d.tau = number_or(j, "tau", 0.0);
    d.delta = number_or(j, "delta", 0.0);
  } else if (kind == "fully_decoherent") {
    d.kind = DetectorKind::fully_decoherent;
    if (!j.contains("alpha")) throw ConfigError("fully_decoherent needs 'alpha'");
    d.alpha = load_alpha(j["alpha"]);
  } else if (kind == "coherent") {
    d.kind = DetectorKind::coherent;
    if (!j.contains("alpha")) throw ConfigError("coherent needs 'alpha'");
    d.alpha = load_alpha(j["alpha"]);
  } else if (kind == "covariant") {
    d.kind = DetectorKind::covariant;
    if (!j.contains("sigma")) throw ConfigError("covariant needs 'sigma'");
    const json& s = j["sigma"];
    const std::string form = require_string(s, "form");
    if (form == "exp") {
      d.sigma.form = CovariantSigma::Form::exponential;
      d.sigma.rate = require_number(s, "rate");
    } else if (form == "power") {
      d.sigma.form = CovariantSigma::Form::power;
      d.sigma.exponent = require_number(s, "exponent");
    } else {
      throw ConfigError("unknown sigma form '" + form + "'");
    }
  } else if (kind == "ideal") {
    d.kind = DetectorKind::ideal;
    if (j.contains("profile")) {
      const json& pr = j["profile"];
      if (require_string(pr, "form") != "gaussian")
        throw ConfigError("unknown profile form");
      d.profile.width = number_or(pr, "width", 1.0);
    }
  } else {
    throw ConfigError("unknown detector kind '" + kind + "'");
  }
  try {
    d.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid detector parameters: ") + e.what());
  }
  return d;
}

json state_json(const MomentumState& s) {
  json j;
  j["family"] = to_string(s.family());
  j["mass"] = s.mass();
  json params;
  for (const auto& [k, v] : s.params()) params[k] = v;
  j["params"] = params;
  j["support"] = {s.p_min(), s.bounded() ? json(s.p_max()) : json("inf")};
  return j;
}

json detector_json(const DetectorModel& d) {
  json j;
  j["kind"] = to_string(d.kind);
  switch (d.kind) {
    case DetectorKind::maximal:
      j["tau"] = d.tau;
      j["delta"] = d.delta;
      break;
    case DetectorKind::fully_decoherent:
    case DetectorKind::coherent:
      j["alpha"] = alpha_json(d.alpha);
      break;
    case DetectorKind::covariant:
      j["sigma"]["form"] =
          d.sigma.form == CovariantSigma::Form::exponential ? "exp" : "power";
      if (d.sigma.form == CovariantSigma::Form::exponential)
        j["sigma"]["rate"] = d.sigma.rate;
      else
        j["sigma"]["exponent"] = d.sigma.exponent;
      break;
    case DetectorKind::ideal:
      j["profile"]["form"] = "gaussian";
      j["profile"]["width"] = d.profile.width;
      break;
  }
  return j;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : ".";
  fs::create_directories(dir);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_csv(const fs::path& path, const std::string& col_a,
               const std::string& col_b, const std::vector<double>& a,
               const std::vector<double>& b) {
  if (a.size() != b.size()) throw ConfigError("write_csv: column size mismatch");
  std::string body = col_a + "," + col_b + "\n";
  for (std::size_t i = 0; i < a.size(); ++i)
    body += fmt17(a[i]) + "," + fmt17(b[i]) + "\n";
  atomic_write(path, body);
}

json arrival_meta(const ArrivalDistribution& d, const json& state,
                  const json& detector) {
  json j;
  j["x"] = d.detector_x;
  j["norm"] = d.norm;
  j["min_density"] = d.min_density;
  j["negative_dip"] = d.negative_dip;
  j["detector"] = detector;
  j["state"] = state;
  j["grid"] = {{"points", d.t.size()},
               {"t_min", d.t.front()},
               {"t_max", d.t.back()}};
  return j;
}

json position_meta(const PositionDistribution& d, const json& state,
                   const json& detector) {
  json j;
  j["t"] = d.time_t;
  j["norm"] = d.norm;
  j["min_density"] = d.min_density;
  j["negative_dip"] = d.negative_dip;
  j["detector"] = detector;
  j["state"] = state;
  j["grid"] = {{"points", d.x.size()},
               {"x_min", d.x.front()},
               {"x_max", d.x.back()}};
  return j;
}

json moments_report(const ArrivalMoments& m, double quadrature_mean,
                    double quadrature_variance) {
  json j;
  j["mean"] = m.mean;
  j["variance"] = m.variance;
  j["decomposition"] = {{"var_Tc", m.var_tc},
                        {"term_mass", m.term_mass},
                        {"term_detector", m.term_detector}};
  const double rel_err =
      std::abs(m.variance - quadrature_variance) / quadrature_variance;
  j["cross_check"] = {{"quadrature_mean", quadrature_mean},
                      {"quadrature_variance", quadrature_variance},
                      {"rel_err", rel_err}};
  return j;
}

json bound_report_json(const BoundReport& r) {
  json j;
  j["lhs"] = r.lhs;
  j["rhs_terms"] = {{"energy_term", r.energy_term}, {"mass_term", r.mass_term}};
  j["dH"] = r.dh_infinite ? json("inf") : json(r.dh);
  j["satisfied"] = r.satisfied;
  j["slack"] = r.slack;
  return j;
}

json levy_coefficient_json(const LevyCoefficient& c) {
  json j;
  j["regime"] = c.regime == Regime::nonrel ? "nonrel" : "ultrarel";
  j["c_E"] = c.c_E;
  j["coefficient"] = c.coefficient;
  j["closed_form"] = c.closed_form;
  j["published_value"] = c.published_value;
  j["rel_err_vs_closed_form"] = c.rel_err_vs_closed;
  j["regime_ok"] = c.regime_ok;
  if (c.regime == Regime::nonrel) {
    j["factor_two_vs_published"] = c.factor_two_flag;
    if (c.factor_two_flag)
      j["note"] =
          "computed coefficient is half the published sqrt(3)/2; the "
          "discrepancy is reported, not reconciled";
  }
  return j;
}

json variational_json(const VariationalResult& v) {
  json j;
  j["regime"] = v.regime == Regime::nonrel ? "nonrel" : "ultrarel";
  if (v.regime == Regime::ultrarel) j["xi0"] = v.xi0;
  j["b_star"] = v.b_star;
  j["constant"] = v.constant;
  j["published_value"] = v.published_value;
  return j;
}

json suite_outcome_json(const SuiteOutcome& o) {
  json j;
  j["seed"] = o.seed;
  j["n"] = o.n;
  j["satisfied_count"] = o.satisfied;
  json rows = json::array();
  for (const auto& r : o.rows) {
    rows.push_back({{"p0", r.p0},
                    {"sigma_p", r.sigma_p},
                    {"x", r.x},
                    {"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"satisfied", r.satisfied}});
  }
  j["rows"] = rows;
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  if (!j.contains("state")) throw ConfigError("config needs 'state'");
  cfg.state = j["state"];
  load_state(cfg.state);  // validate eagerly
  if (j.contains("detector")) {
    cfg.detector = j["detector"];
    load_detector(cfg.detector);
  } else {
    cfg.detector = {{"kind", "maximal"}, {"tau", 1e-2}, {"delta", 1e-2}};
  }
  if (j.contains("x")) {
    cfg.x = require_number(j, "x");
    cfg.has_x = true;
  }
  if (j.contains("t")) {
    cfg.t = require_number(j, "t");
    cfg.has_t = true;
  }
  if (j.contains("route")) {
    cfg.route = require_string(j, "route");
    if (cfg.route != "kernel" && cfg.route != "amplitude" &&
        cfg.route != "phillips")
      throw ConfigError("route must be kernel|amplitude|phillips");
  }
  if (j.contains("grid")) {
    cfg.grid_points = static_cast<int>(number_or(j["grid"], "points", 2048));
    if (cfg.grid_points < 16) throw ConfigError("grid.points too small");
  }
  cfg.tau = number_or(j, "tau", cfg.tau);
  cfg.delta = number_or(j, "delta", cfg.delta);
  if (j.contains("tolerances")) {
    cfg.abs_tol = number_or(j["tolerances"], "abs_tol", cfg.abs_tol);
    cfg.rel_tol = number_or(j["tolerances"], "rel_tol", cfg.rel_tol);
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
      throw ConfigError("tolerances must be positive");
  }
  return cfg;
}

}  // namespace toa
