#include "mih/config.hpp"

#include <cmath>
#include <fstream>
#include <vector>

namespace mih {

namespace {

using nlohmann::json;

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "/" + key, "missing field");
  return *it;
}

double number(const json& obj, const std::string& path, const char* key) {
  const auto& v = member(obj, path, key);
  if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + "/" + key, "must be finite");
  return x;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number(obj, path, key);
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

ImpactParams parse_market(const json& j, const std::string& path) {
  ImpactParams p;
  p.q = number(j, path, "q");
  require(p.q > 0.0, path + "/q", "must be positive");
  p.rho = number(j, path, "rho");
  require(p.rho > 0.0, path + "/rho", "must be positive");
  p.nu = number(j, path, "nu");
  require(p.nu >= 0.0 && p.nu <= 1.0, path + "/nu", "must lie in [0, 1]");
  p.epsilon = number(j, path, "epsilon");
  require(p.epsilon >= 0.0 && p.epsilon < 1.0, path + "/epsilon", "must lie in [0, 1)");
  return p;
}

MarkLaw parse_mark_law(const json& j, const std::string& path) {
  const auto& type_v = member(j, path, "type");
  require(type_v.is_string(), path + "/type", "expected a string");
  const auto type = type_v.get<std::string>();
  const std::string ppath = path + "/params";
  const json empty = json::object();
  const json& params = j.contains("params") ? j.at("params") : empty;
  try {
    if (type == "dirac") {
      const double v = number(params, ppath, "volume");
      require(v >= 0.0, ppath + "/volume", "must be nonnegative");
      return MarkLaw::dirac(v);
    }
    if (type == "exponential") {
      const double m = number(params, ppath, "mean");
      require(m > 0.0, ppath + "/mean", "must be positive");
      return MarkLaw::exponential(m);
    }
    if (type == "empirical") {
      const auto& vols = member(params, ppath, "volumes");
      const auto& ws = member(params, ppath, "weights");
      require(vols.is_array(), ppath + "/volumes", "expected an array");
      require(ws.is_array(), ppath + "/weights", "expected an array");
      require(vols.size() == ws.size(), ppath + "/weights", "must match volumes in length");
      std::vector<double> v;
      std::vector<double> w;
      for (std::size_t i = 0; i < vols.size(); ++i) {
        const auto at = "/" + std::to_string(i);
        require(vols[i].is_number() && vols[i].get<double>() >= 0.0, ppath + "/volumes" + at,
                "expected a nonnegative number");
        require(ws[i].is_number() && ws[i].get<double>() >= 0.0, ppath + "/weights" + at,
                "expected a nonnegative number");
        v.push_back(vols[i].get<double>());
        w.push_back(ws[i].get<double>());
      }
      return MarkLaw::empirical(std::move(v), std::move(w));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ppath, e.what());
  }
  throw ConfigError(path + "/type", "unknown mark law '" + type + "' (dirac, exponential, empirical)");
}

ExcitationFunction parse_phi(const json& j, const std::string& path) {
  require(j.is_array(), path, "expected an array of {coef, power}");
  std::vector<PowerTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto p = path + "/" + std::to_string(i);
    const double c = number(j[i], p, "coef");
    const double w = number(j[i], p, "power");
    require(c >= 0.0, p + "/coef", "must be nonnegative");
    require(w >= 0.0, p + "/power", "must be nonnegative");
    terms.push_back({c, w});
  }
  return ExcitationFunction(std::move(terms));
}

HawkesSpec parse_hawkes(const json& j, const std::string& path) {
  const double beta = number(j, path, "beta");
  require(beta >= 0.0, path + "/beta", "must be nonnegative");
  const double kinf = number(j, path, "kappa_infty");
  require(kinf >= 0.0, path + "/kappa_infty", "must be nonnegative");
  const double kp = number(j, path, "kappa0_plus");
  require(kp >= 0.0, path + "/kappa0_plus", "must be nonnegative");
  const double km = number(j, path, "kappa0_minus");
  require(km >= 0.0, path + "/kappa0_minus", "must be nonnegative");
  auto marks = parse_mark_law(member(j, path, "mark_law"), path + "/mark_law");
  const json none = json::array();
  ExcitationPair ex{parse_phi(j.contains("phi_s") ? j.at("phi_s") : none, path + "/phi_s"),
                    parse_phi(j.contains("phi_c") ? j.at("phi_c") : none, path + "/phi_c")};
  try {
    return HawkesSpec(beta, kinf, kp, km, std::move(marks), std::move(ex));
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ExecutionProblem RunConfig::problem() const { return ExecutionProblem(hawkes, market, x0, T, D0, S0); }

StrategyNumerics RunConfig::strategy_numerics() const {
  StrategyNumerics n;
  n.ode_step = numerics.ode_step;
  n.eta_threshold = numerics.eta_threshold;
  return n;
}

RunConfig parse_config(const json& j) {
  require(j.is_object(), "", "configuration must be a JSON object");
  auto market = parse_market(member(j, "", "market"), "/market");
  auto hawkes = parse_hawkes(member(j, "", "hawkes"), "/hawkes");
  RunConfig cfg{market, std::move(hawkes), 0.0, 1.0, 0.0, 0.0, RunNumerics{}, json{}};
  const auto& ex = member(j, "", "execution");
  cfg.x0 = number(ex, "/execution", "x0");
  cfg.T = number(ex, "/execution", "T");
  require(cfg.T > 0.0, "/execution/T", "must be positive");
  cfg.D0 = number_or(ex, "/execution", "D0", 0.0);
  cfg.S0 = number_or(ex, "/execution", "S0", 0.0);

  if (j.contains("numerics")) {
    const auto& n = j.at("numerics");
    const std::string p = "/numerics";
    require(n.is_object(), p, "expected an object");
    cfg.numerics.ode_step = number_or(n, p, "ode_step", cfg.T / 2000.0);
    require(cfg.numerics.ode_step > 0.0, p + "/ode_step", "must be positive");
    cfg.numerics.grid_step = number_or(n, p, "grid_step", cfg.T / 2000.0);
    require(cfg.numerics.grid_step > 0.0, p + "/grid_step", "must be positive");
    cfg.numerics.eta_threshold = number_or(n, p, "eta_threshold", 1e-2);
    require(cfg.numerics.eta_threshold >= 0.0, p + "/eta_threshold", "must be nonnegative");
    if (n.contains("n_paths")) {
      require(n.at("n_paths").is_number_integer() && n.at("n_paths").get<std::int64_t>() >= 2, p + "/n_paths",
              "expected an integer >= 2");
      cfg.numerics.n_paths = n.at("n_paths").get<std::size_t>();
    }
    if (n.contains("seed")) {
      require(n.at("seed").is_number_integer() && n.at("seed").get<std::int64_t>() >= 0, p + "/seed", "expected a nonnegative integer");
      cfg.numerics.seed = n.at("seed").get<std::uint64_t>();
    }
  } else {
    cfg.numerics.ode_step = cfg.T / 2000.0;
    cfg.numerics.grid_step = cfg.T / 2000.0;
  }
  try {
    (void)cfg.problem();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/execution", e.what());
  }
  cfg.source = j;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

json figure1_json(double rho) {
  const json shared_terms = json::array({{{"coef", 1.2}, {"power", 0.2}}, {{"coef", 0.5}, {"power", 0.7}}});
  json phi_s = shared_terms;
  phi_s.push_back({{"coef", 14.4}, {"power", 1.0}});
  json phi_c = shared_terms;
  phi_c.push_back({{"coef", 0.4}, {"power", 1.0}});
  return json{
      {"market", {{"q", 100.0}, {"rho", rho}, {"nu", 0.3}, {"epsilon", 0.3}}},
      {"hawkes",
       {{"beta", 20.0},
        {"kappa_infty", 12.0},
        {"kappa0_plus", 60.0},
        {"kappa0_minus", 60.0},
        {"mark_law", {{"type", "exponential"}, {"params", {{"mean", 50.0}}}}},
        {"phi_s", phi_s},
        {"phi_c", phi_c}}},
      {"execution", {{"x0", -500.0}, {"T", 1.0}, {"D0", 0.1}, {"S0", 0.0}}},
      {"numerics",
       {{"ode_step", 5e-4}, {"grid_step", 5e-4}, {"eta_threshold", 1e-2}, {"n_paths", 1000}, {"seed", 1}}},
  };
}

}  // namespace mih
