#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "textio.hpp"

namespace tme {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

struct RawConfig {
  std::map<std::string, RawEntry> kv;
  std::vector<std::string> order;
};

RawConfig lex(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(stripped, lineno, "config line " + std::to_string(lineno) +
                                              ": expected `section.key = value`");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.find('.') == std::string::npos) {
      throw ConfigError(key, lineno, "config line " + std::to_string(lineno) + ": key `" + key +
                                         "` is missing its section prefix");
    }
    if (raw.kv.count(key) != 0) {
      throw ConfigError(key, lineno, "config line " + std::to_string(lineno) +
                                         ": duplicate key `" + key + "`");
    }
    raw.kv[key] = {value, lineno};
    raw.order.push_back(key);
  }
  return raw;
}

double parse_double(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x)) {
    throw ConfigError(key, line, "config line " + std::to_string(line) + ": key `" + key +
                                     "` needs a finite number, got `" + v + "`");
  }
  return x;
}

long parse_int(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError(key, line, "config line " + std::to_string(line) + ": key `" + key +
                                     "` needs an integer, got `" + v + "`");
  }
  return x;
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&out, &cur] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char ch : v) {
    const bool is_space = std::isspace(static_cast<unsigned char>(ch)) != 0;
    const bool is_sep = sep == ' ' ? is_space : ch == sep;
    if (is_sep) {
      flush();
    } else if (!is_space) {  // stray blanks around list entries are ignored
      cur.push_back(ch);
    }
  }
  flush();
  return out;
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key, int line) {
  std::vector<double> out;
  for (const std::string& tok : split(v, ',')) out.push_back(parse_double(tok, key, line));
  if (out.empty()) {
    throw ConfigError(key, line,
                      "config line " + std::to_string(line) + ": key `" + key + "` is empty");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key, int line) {
  std::vector<int> out;
  for (const std::string& tok : split(v, ',')) {
    out.push_back(static_cast<int>(parse_int(tok, key, line)));
  }
  if (out.empty()) {
    throw ConfigError(key, line,
                      "config line " + std::to_string(line) + ": key `" + key + "` is empty");
  }
  return out;
}

// Mode-seed lists are whitespace-separated `m:amp` tokens.
std::vector<ModeSeed> parse_modes(const std::string& v, const std::string& key, int line) {
  std::vector<ModeSeed> out;
  for (const std::string& tok : split(v, ' ')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(key, line, "config line " + std::to_string(line) + ": key `" + key +
                                       "` expects `m:amp` tokens, got `" + tok + "`");
    }
    ModeSeed seed;
    seed.m = static_cast<int>(parse_int(tok.substr(0, colon), key, line));
    seed.amp = parse_double(tok.substr(colon + 1), key, line);
    if (seed.m < 0) {
      throw ConfigError(key, line, "config line " + std::to_string(line) + ": key `" + key +
                                       "` mode index must be >= 0");
    }
    out.push_back(seed);
  }
  return out;
}

std::string modes_to_string(const std::vector<ModeSeed>& modes) {
  std::string out;
  for (const ModeSeed& m : modes) {
    if (!out.empty()) out += " ";
    out += std::to_string(m.m) + ":" + fmt17(m.amp);
  }
  return out;
}

template <typename T>
std::string list_to_string(const std::vector<T>& v) {
  std::string out;
  for (const T& x : v) {
    if (!out.empty()) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += fmt17(x);
    } else {
      out += std::to_string(x);
    }
  }
  return out;
}

struct KeyDef {
  std::string key;
  std::function<void(ScenarioConfig&, const std::string&, int)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

std::vector<KeyDef> build_key_table() {
  std::vector<KeyDef> t;

  auto add_double = [&t](const char* key, std::function<double&(ScenarioConfig&)> ref) {
    std::string k = key;
    t.push_back({k,
                 [ref, k](ScenarioConfig& c, const std::string& v, int line) {
                   ref(c) = parse_double(v, k, line);
                 },
                 [ref](const ScenarioConfig& c) {
                   return fmt17(ref(const_cast<ScenarioConfig&>(c)));
                 }});
  };
  auto add_int = [&t](const char* key, std::function<int&(ScenarioConfig&)> ref) {
    std::string k = key;
    t.push_back({k,
                 [ref, k](ScenarioConfig& c, const std::string& v, int line) {
                   ref(c) = static_cast<int>(parse_int(v, k, line));
                 },
                 [ref](const ScenarioConfig& c) {
                   return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
                 }});
  };
  auto add_modes = [&t](const char* key, std::function<std::vector<ModeSeed>&(ScenarioConfig&)> ref) {
    std::string k = key;
    t.push_back({k,
                 [ref, k](ScenarioConfig& c, const std::string& v, int line) {
                   ref(c) = parse_modes(v, k, line);
                 },
                 [ref](const ScenarioConfig& c) {
                   return modes_to_string(ref(const_cast<ScenarioConfig&>(c)));
                 }});
  };

  t.push_back({"scenario.name",
               [](ScenarioConfig& c, const std::string& v, int line) {
                 try {
                   c.scenario = scenario_from_string(v);
                 } catch (const std::exception& e) {
                   throw ConfigError("scenario.name", line,
                                     "config line " + std::to_string(line) + ": " + e.what());
                 }
               },
               [](const ScenarioConfig& c) { return std::string(to_string(c.scenario)); }});
  t.push_back({"scenario.seed",
               [](ScenarioConfig& c, const std::string& v, int line) {
                 const long s = parse_int(v, "scenario.seed", line);
                 if (s < 0) {
                   throw ConfigError("scenario.seed", line,
                                     "config line " + std::to_string(line) +
                                         ": scenario.seed must be >= 0");
                 }
                 c.seed = static_cast<uint64_t>(s);
               },
               [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
  t.push_back({"scenario.out_dir",
               [](ScenarioConfig& c, const std::string& v, int) { c.out_dir = v; },
               [](const ScenarioConfig& c) { return c.out_dir; }});

  add_double("model.lambda_S", [](ScenarioConfig& c) -> double& { return c.model.lambda_S; });
  add_double("model.lambda_R", [](ScenarioConfig& c) -> double& { return c.model.lambda_R; });
  add_double("model.K", [](ScenarioConfig& c) -> double& { return c.model.K; });
  add_double("model.alpha", [](ScenarioConfig& c) -> double& { return c.model.alpha; });
  add_double("model.xi", [](ScenarioConfig& c) -> double& { return c.model.xi; });
  add_double("model.d_S", [](ScenarioConfig& c) -> double& { return c.model.d_S; });
  add_double("model.d_R", [](ScenarioConfig& c) -> double& { return c.model.d_R; });
  add_double("model.d_D", [](ScenarioConfig& c) -> double& { return c.model.d_D; });
  add_double("model.eta", [](ScenarioConfig& c) -> double& { return c.model.eta; });
  add_double("model.delta0", [](ScenarioConfig& c) -> double& { return c.model.delta0; });
  add_double("model.K_D", [](ScenarioConfig& c) -> double& { return c.model.K_D; });
  add_double("model.gamma_d", [](ScenarioConfig& c) -> double& { return c.model.gamma_d; });
  add_double("model.theta", [](ScenarioConfig& c) -> double& { return c.model.theta; });
  add_double("model.beta", [](ScenarioConfig& c) -> double& { return c.model.beta; });
  add_double("model.K_phi", [](ScenarioConfig& c) -> double& { return c.model.K_phi; });

  add_double("coupling.chi_S", [](ScenarioConfig& c) -> double& { return c.coupling.chi_S; });
  add_double("coupling.chi_R", [](ScenarioConfig& c) -> double& { return c.coupling.chi_R; });
  add_double("coupling.d_c", [](ScenarioConfig& c) -> double& { return c.coupling.d_c; });
  add_double("coupling.kappa", [](ScenarioConfig& c) -> double& { return c.coupling.kappa; });
  add_double("coupling.rho", [](ScenarioConfig& c) -> double& { return c.coupling.rho; });
  add_double("coupling.q", [](ScenarioConfig& c) -> double& { return c.coupling.q; });
  add_double("coupling.h_S", [](ScenarioConfig& c) -> double& { return c.coupling.h_S_star; });
  add_double("coupling.h_R", [](ScenarioConfig& c) -> double& { return c.coupling.h_R_star; });
  add_double("coupling.g_S", [](ScenarioConfig& c) -> double& { return c.coupling.g_S_star; });
  add_double("coupling.g_R", [](ScenarioConfig& c) -> double& { return c.coupling.g_R_star; });
  add_double("coupling.epsilon", [](ScenarioConfig& c) -> double& { return c.coupling.epsilon; });
  add_double("coupling.Qprime",
             [](ScenarioConfig& c) -> double& { return c.coupling.Qprime_cstar; });

  add_int("domain.dimension", [](ScenarioConfig& c) -> int& { return c.domain.dimension; });
  add_double("domain.Lx", [](ScenarioConfig& c) -> double& { return c.domain.Lx; });
  add_double("domain.Ly", [](ScenarioConfig& c) -> double& { return c.domain.Ly; });
  add_int("grid.nx", [](ScenarioConfig& c) -> int& { return c.nx; });
  add_int("grid.ny", [](ScenarioConfig& c) -> int& { return c.ny; });

  t.push_back({"solver.variant",
               [](ScenarioConfig& c, const std::string& v, int line) {
                 try {
                   c.solver.variant = variant_from_string(v);
                 } catch (const std::exception& e) {
                   throw ConfigError("solver.variant", line,
                                     "config line " + std::to_string(line) + ": " + e.what());
                 }
               },
               [](const ScenarioConfig& c) { return std::string(to_string(c.solver.variant)); }});
  add_double("solver.dt", [](ScenarioConfig& c) -> double& { return c.solver.dt; });
  add_double("solver.t_end", [](ScenarioConfig& c) -> double& { return c.solver.t_end; });
  add_double("solver.snapshot_dt",
             [](ScenarioConfig& c) -> double& { return c.solver.snapshot_dt; });
  add_double("solver.cfl_safety",
             [](ScenarioConfig& c) -> double& { return c.solver.cfl_safety; });

  add_double("init.S", [](ScenarioConfig& c) -> double& { return c.solver.init.S.base; });
  add_double("init.R", [](ScenarioConfig& c) -> double& { return c.solver.init.R.base; });
  add_double("init.D", [](ScenarioConfig& c) -> double& { return c.solver.init.D.base; });
  add_double("init.P", [](ScenarioConfig& c) -> double& { return c.solver.init.P.base; });
  add_double("init.A", [](ScenarioConfig& c) -> double& { return c.solver.init.A.base; });
  add_double("init.c", [](ScenarioConfig& c) -> double& { return c.solver.init.c.base; });
  add_modes("init.S_modes",
            [](ScenarioConfig& c) -> std::vector<ModeSeed>& { return c.solver.init.S.modes; });
  add_modes("init.R_modes",
            [](ScenarioConfig& c) -> std::vector<ModeSeed>& { return c.solver.init.R.modes; });
  add_modes("init.D_modes",
            [](ScenarioConfig& c) -> std::vector<ModeSeed>& { return c.solver.init.D.modes; });
  add_modes("init.P_modes",
            [](ScenarioConfig& c) -> std::vector<ModeSeed>& { return c.solver.init.P.modes; });
  add_modes("init.A_modes",
            [](ScenarioConfig& c) -> std::vector<ModeSeed>& { return c.solver.init.A.modes; });
  add_double("init.noise_amp",
             [](ScenarioConfig& c) -> double& { return c.solver.init.noise_amp; });
  t.push_back({"init.noise_fields",
               [](ScenarioConfig& c, const std::string& v, int line) {
                 InitRecipe& init = c.solver.init;
                 init.S.noise = init.R.noise = init.D.noise = init.P.noise = init.A.noise =
                     init.c.noise = false;
                 for (const std::string& f : split(v, ',')) {
                   if (f == "S") init.S.noise = true;
                   else if (f == "R") init.R.noise = true;
                   else if (f == "D") init.D.noise = true;
                   else if (f == "P") init.P.noise = true;
                   else if (f == "A") init.A.noise = true;
                   else if (f == "c") init.c.noise = true;
                   else
                     throw ConfigError("init.noise_fields", line,
                                       "config line " + std::to_string(line) +
                                           ": unknown field `" + f + "` in init.noise_fields");
                 }
               },
               [](const ScenarioConfig& c) {
                 const InitRecipe& init = c.solver.init;
                 std::string out;
                 auto push = [&out](bool flag, const char* name) {
                   if (!flag) return;
                   if (!out.empty()) out += ",";
                   out += name;
                 };
                 push(init.S.noise, "S");
                 push(init.R.noise, "R");
                 push(init.D.noise, "D");
                 push(init.P.noise, "P");
                 push(init.A.noise, "A");
                 push(init.c.noise, "c");
                 return out;
               }});

  add_double("spectral.lambda_min",
             [](ScenarioConfig& c) -> double& { return c.spectral.lambda_min; });
  add_double("spectral.lambda_max",
             [](ScenarioConfig& c) -> double& { return c.spectral.lambda_max; });
  add_int("spectral.points", [](ScenarioConfig& c) -> int& { return c.spectral.points; });
  add_int("spectral.k_max", [](ScenarioConfig& c) -> int& { return c.spectral.k_max; });

  add_int("scan.pairs", [](ScenarioConfig& c) -> int& { return c.scan.pairs; });
  add_double("scan.d_lo", [](ScenarioConfig& c) -> double& { return c.scan.d_lo; });
  add_double("scan.d_hi", [](ScenarioConfig& c) -> double& { return c.scan.d_hi; });

  add_int("oneway.n_random", [](ScenarioConfig& c) -> int& { return c.oneway.n_random; });
  add_int("oneway.check_modes", [](ScenarioConfig& c) -> int& { return c.oneway.check_modes; });

  add_int("schur.n_configs", [](ScenarioConfig& c) -> int& { return c.schur.n_configs; });
  add_int("schur.n_mu", [](ScenarioConfig& c) -> int& { return c.schur.n_mu; });
  add_double("schur.mu_radius", [](ScenarioConfig& c) -> double& { return c.schur.mu_radius; });
  add_double("schur.lambda", [](ScenarioConfig& c) -> double& { return c.schur.lambda; });
  t.push_back({"schur.eps",
               [](ScenarioConfig& c, const std::string& v, int line) {
                 c.schur.eps = parse_double_list(v, "schur.eps", line);
               },
               [](const ScenarioConfig& c) { return list_to_string(c.schur.eps); }});

  add_int("doracle.refine", [](ScenarioConfig& c) -> int& { return c.doracle.refine; });
  t.push_back({"doracle.modes",
               [](ScenarioConfig& c, const std::string& v, int line) {
                 c.doracle.modes = parse_int_list(v, "doracle.modes", line);
               },
               [](const ScenarioConfig& c) { return list_to_string(c.doracle.modes); }});
  t.push_back({"doracle.coeffs",
               [](ScenarioConfig& c, const std::string& v, int line) {
                 c.doracle.coeffs = parse_double_list(v, "doracle.coeffs", line);
               },
               [](const ScenarioConfig& c) { return list_to_string(c.doracle.coeffs); }});
  add_double("doracle.compare_t",
             [](ScenarioConfig& c) -> double& { return c.doracle.compare_t; });

  add_double("ode.S0", [](ScenarioConfig& c) -> double& { return c.ode.S0; });
  add_double("ode.R0", [](ScenarioConfig& c) -> double& { return c.ode.R0; });
  add_double("ode.t_end", [](ScenarioConfig& c) -> double& { return c.ode.t_end; });
  add_double("ode.dt", [](ScenarioConfig& c) -> double& { return c.ode.dt; });
  add_int("ode.random_starts", [](ScenarioConfig& c) -> int& { return c.ode.random_starts; });
  add_double("ode.random_t_end",
             [](ScenarioConfig& c) -> double& { return c.ode.random_t_end; });

  add_double("checks.growth_rtol",
             [](ScenarioConfig& c) -> double& { return c.checks.growth_rtol; });
  add_double("checks.residual_bound",
             [](ScenarioConfig& c) -> double& { return c.checks.residual_bound; });
  add_double("checks.ode_tol", [](ScenarioConfig& c) -> double& { return c.checks.ode_tol; });
  add_double("checks.pde_tol", [](ScenarioConfig& c) -> double& { return c.checks.pde_tol; });
  add_double("checks.gap_bound", [](ScenarioConfig& c) -> double& { return c.checks.gap_bound; });
  add_double("checks.refine_factor",
             [](ScenarioConfig& c) -> double& { return c.checks.refine_factor; });
  add_double("checks.weyl_ratio_bound",
             [](ScenarioConfig& c) -> double& { return c.checks.weyl_ratio_bound; });
  add_double("checks.schur_scale",
             [](ScenarioConfig& c) -> double& { return c.checks.schur_scale; });
  add_double("checks.order_min", [](ScenarioConfig& c) -> double& { return c.checks.order_min; });

  return t;
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = build_key_table();
  return table;
}

std::set<std::string> allowed_sections(Scenario s) {
  switch (s) {
    case Scenario::no_turing_scan:
      return {"scenario", "model", "spectral", "scan", "checks"};
    case Scenario::oneway_suppression:
      return {"scenario", "model", "coupling", "domain", "grid",
              "solver",   "init",  "oneway",   "spectral", "checks"};
    case Scenario::twoway_criteria:
      return {"scenario", "model", "coupling", "domain", "spectral", "checks"};
    case Scenario::twoway_simulate:
      return {"scenario", "model", "coupling", "domain",
              "grid",     "solver", "init",    "spectral", "checks"};
    case Scenario::core_longtime:
      return {"scenario", "model", "domain", "grid", "solver", "init", "ode", "checks"};
    case Scenario::schur_verify:
      return {"scenario", "model", "coupling", "schur", "checks"};
    case Scenario::d_oracle_check:
      return {"scenario", "model", "domain", "grid", "solver", "doracle", "checks"};
    case Scenario::weyl_check:
      return {"scenario", "domain", "spectral", "checks"};
  }
  return {};
}

std::string section_of(const std::string& key) { return key.substr(0, key.find('.')); }

void apply_scenario_defaults(ScenarioConfig& c) {
  switch (c.scenario) {
    case Scenario::core_longtime:
      c.solver.variant = Variant::core;
      c.solver.t_end = 80.0;
      c.solver.snapshot_dt = 0.5;
      break;
    case Scenario::oneway_suppression:
      c.solver.variant = Variant::oneway;
      c.solver.t_end = 12.0;
      c.solver.snapshot_dt = 0.1;
      c.nx = 128;
      break;
    case Scenario::twoway_simulate:
      c.solver.variant = Variant::twoway_reduced;
      c.solver.t_end = 5.5;
      c.solver.snapshot_dt = 0.05;
      break;
    case Scenario::d_oracle_check:
      c.solver.variant = Variant::core;
      c.solver.t_end = 0.5;
      c.solver.snapshot_dt = 0.5;
      break;
    default:
      break;
  }
}

void fail_key(const ScenarioConfig&, const std::string& key, int line, const std::string& msg) {
  throw ConfigError(key, line, (line > 0 ? "config line " + std::to_string(line) + ": " : "") +
                                   "key `" + key + "`: " + msg);
}

void validate(ScenarioConfig& c, const RawConfig& raw) {
  auto line_of = [&raw](const std::string& key) {
    const auto it = raw.kv.find(key);
    return it == raw.kv.end() ? 0 : it->second.line;
  };
  auto require_positive = [&](double v, const std::string& key) {
    if (!(v > 0.0)) fail_key(c, key, line_of(key), "must be > 0");
  };
  auto require_nonneg = [&](double v, const std::string& key) {
    if (!(v >= 0.0)) fail_key(c, key, line_of(key), "must be >= 0");
  };

  require_positive(c.model.lambda_S, "model.lambda_S");
  require_positive(c.model.lambda_R, "model.lambda_R");
  require_positive(c.model.K, "model.K");
  require_positive(c.model.d_S, "model.d_S");
  require_positive(c.model.d_R, "model.d_R");
  require_positive(c.model.d_D, "model.d_D");
  require_positive(c.model.K_D, "model.K_D");
  require_positive(c.model.K_phi, "model.K_phi");
  require_positive(c.model.gamma_d, "model.gamma_d");
  require_nonneg(c.model.alpha, "model.alpha");
  require_nonneg(c.model.xi, "model.xi");
  require_nonneg(c.model.eta, "model.eta");
  require_nonneg(c.model.delta0, "model.delta0");
  require_nonneg(c.model.theta, "model.theta");
  require_nonneg(c.model.beta, "model.beta");
  if (!(c.model.alpha + c.model.xi > 0.0)) {
    fail_key(c, "model.alpha", line_of("model.alpha"), "alpha + xi must be > 0");
  }

  require_nonneg(c.coupling.chi_S, "coupling.chi_S");
  require_nonneg(c.coupling.chi_R, "coupling.chi_R");
  require_positive(c.coupling.d_c, "coupling.d_c");
  require_nonneg(c.coupling.kappa, "coupling.kappa");
  require_positive(c.coupling.rho, "coupling.rho");
  require_positive(c.coupling.epsilon, "coupling.epsilon");

  // One-way damping derivative defaults to -rho (Template I).
  if (raw.kv.count("coupling.Qprime") == 0) c.coupling.Qprime_cstar = -c.coupling.rho;

  const bool twoway = c.scenario == Scenario::twoway_criteria ||
                      c.scenario == Scenario::twoway_simulate ||
                      c.scenario == Scenario::schur_verify;
  if (twoway && !(c.coupling.q < 0.0)) {
    fail_key(c, "coupling.q", line_of("coupling.q"),
             "two-way coupling requires q < 0 (linear damping of the signal)");
  }
  if (c.scenario == Scenario::oneway_suppression && !(c.coupling.Qprime_cstar < 0.0)) {
    fail_key(c, "coupling.Qprime", line_of("coupling.Qprime"),
             "one-way coupling requires Q'(c*) < 0");
  }

  if (c.domain.dimension != 1 && c.domain.dimension != 2) {
    fail_key(c, "domain.dimension", line_of("domain.dimension"), "must be 1 or 2");
  }
  require_positive(c.domain.Lx, "domain.Lx");
  if (c.domain.dimension == 2) require_positive(c.domain.Ly, "domain.Ly");
  if (c.nx < 8) fail_key(c, "grid.nx", line_of("grid.nx"), "need at least 8 cells");
  if (c.domain.dimension == 2 && c.ny < 8) {
    fail_key(c, "grid.ny", line_of("grid.ny"), "need at least 8 cells");
  }

  if (c.solver.dt < 0.0) fail_key(c, "solver.dt", line_of("solver.dt"), "must be >= 0 (0 = auto)");
  require_positive(c.solver.t_end, "solver.t_end");
  if (c.solver.snapshot_dt < 0.0) {
    fail_key(c, "solver.snapshot_dt", line_of("solver.snapshot_dt"), "must be >= 0 (0 = auto)");
  }
  if (!(c.solver.cfl_safety > 0.0 && c.solver.cfl_safety <= 1.0)) {
    fail_key(c, "solver.cfl_safety", line_of("solver.cfl_safety"), "must lie in (0, 1]");
  }
  require_nonneg(c.solver.init.noise_amp, "init.noise_amp");

  switch (c.scenario) {
    case Scenario::core_longtime:
      if (c.solver.variant != Variant::core) {
        fail_key(c, "solver.variant", line_of("solver.variant"),
                 "core-longtime runs the core variant");
      }
      break;
    case Scenario::oneway_suppression:
      if (c.solver.variant != Variant::oneway) {
        fail_key(c, "solver.variant", line_of("solver.variant"),
                 "oneway-suppression runs the oneway variant");
      }
      break;
    case Scenario::twoway_simulate:
      if (c.solver.variant != Variant::twoway_reduced &&
          c.solver.variant != Variant::twoway_full) {
        fail_key(c, "solver.variant", line_of("solver.variant"),
                 "twoway-simulate runs a twoway variant");
      }
      break;
    default:
      break;
  }

  require_positive(c.spectral.lambda_min, "spectral.lambda_min");
  if (!(c.spectral.lambda_max > c.spectral.lambda_min)) {
    fail_key(c, "spectral.lambda_max", line_of("spectral.lambda_max"),
             "must exceed spectral.lambda_min");
  }
  if (c.spectral.points < 2) fail_key(c, "spectral.points", line_of("spectral.points"),
                                      "need at least 2 grid points");
  if (c.spectral.k_max < 1) fail_key(c, "spectral.k_max", line_of("spectral.k_max"),
                                     "need at least 1 mode");

  if (c.scan.pairs < 1) fail_key(c, "scan.pairs", line_of("scan.pairs"), "need at least 1 pair");
  require_positive(c.scan.d_lo, "scan.d_lo");
  if (!(c.scan.d_hi > c.scan.d_lo)) {
    fail_key(c, "scan.d_hi", line_of("scan.d_hi"), "must exceed scan.d_lo");
  }

  if (c.oneway.n_random < 1) {
    fail_key(c, "oneway.n_random", line_of("oneway.n_random"), "need at least 1 draw");
  }
  if (c.oneway.check_modes < 2) {
    fail_key(c, "oneway.check_modes", line_of("oneway.check_modes"), "need at least rank 2");
  }

  if (c.schur.n_configs < 1) {
    fail_key(c, "schur.n_configs", line_of("schur.n_configs"), "need at least 1 configuration");
  }
  if (c.schur.n_mu < 1) fail_key(c, "schur.n_mu", line_of("schur.n_mu"), "need at least 1 point");
  require_positive(c.schur.mu_radius, "schur.mu_radius");
  require_positive(c.schur.lambda, "schur.lambda");
  for (size_t i = 0; i + 1 < c.schur.eps.size(); ++i) {
    if (!(c.schur.eps[i] > c.schur.eps[i + 1])) {
      fail_key(c, "schur.eps", line_of("schur.eps"), "must be positive and decreasing");
    }
  }
  if (c.schur.eps.empty() || !(c.schur.eps.back() > 0.0)) {
    fail_key(c, "schur.eps", line_of("schur.eps"), "must be positive and decreasing");
  }

  if (c.doracle.refine < 2) {
    fail_key(c, "doracle.refine", line_of("doracle.refine"), "refinement factor must be >= 2");
  }
  if (c.doracle.modes.size() != c.doracle.coeffs.size()) {
    fail_key(c, "doracle.coeffs", line_of("doracle.coeffs"),
             "needs one coefficient per entry of doracle.modes");
  }
  for (int m : c.doracle.modes) {
    if (m < 0) fail_key(c, "doracle.modes", line_of("doracle.modes"), "mode indices must be >= 0");
  }
  require_positive(c.doracle.compare_t, "doracle.compare_t");

  if (c.scenario == Scenario::core_longtime) {
    if (c.ode.S0 < 0.0 || c.ode.R0 < 0.0 || c.ode.S0 + c.ode.R0 <= 0.0) {
      fail_key(c, "ode.S0", line_of("ode.S0"), "need nonnegative start with S0 + R0 > 0");
    }
    require_positive(c.ode.dt, "ode.dt");
    require_positive(c.ode.t_end, "ode.t_end");
    require_positive(c.ode.random_t_end, "ode.random_t_end");
    if (c.ode.random_starts < 0) {
      fail_key(c, "ode.random_starts", line_of("ode.random_starts"), "must be >= 0");
    }
  }

  require_positive(c.checks.growth_rtol, "checks.growth_rtol");
  require_positive(c.checks.residual_bound, "checks.residual_bound");
  require_positive(c.checks.ode_tol, "checks.ode_tol");
  require_positive(c.checks.pde_tol, "checks.pde_tol");
  require_positive(c.checks.gap_bound, "checks.gap_bound");
  require_positive(c.checks.refine_factor, "checks.refine_factor");
  require_positive(c.checks.weyl_ratio_bound, "checks.weyl_ratio_bound");
  require_positive(c.checks.schur_scale, "checks.schur_scale");
  require_positive(c.checks.order_min, "checks.order_min");

  c.solver.init.seed = c.seed;
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::no_turing_scan: return "no-turing-scan";
    case Scenario::oneway_suppression: return "oneway-suppression";
    case Scenario::twoway_criteria: return "twoway-criteria";
    case Scenario::twoway_simulate: return "twoway-simulate";
    case Scenario::core_longtime: return "core-longtime";
    case Scenario::schur_verify: return "schur-verify";
    case Scenario::d_oracle_check: return "d-oracle-check";
    case Scenario::weyl_check: return "weyl-check";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "no-turing-scan") return Scenario::no_turing_scan;
  if (s == "oneway-suppression") return Scenario::oneway_suppression;
  if (s == "twoway-criteria") return Scenario::twoway_criteria;
  if (s == "twoway-simulate") return Scenario::twoway_simulate;
  if (s == "core-longtime") return Scenario::core_longtime;
  if (s == "schur-verify") return Scenario::schur_verify;
  if (s == "d-oracle-check") return Scenario::d_oracle_check;
  if (s == "weyl-check") return Scenario::weyl_check;
  throw std::domain_error("unknown scenario `" + s + "`");
}

std::string ScenarioConfig::echo() const {
  const auto sections = allowed_sections(scenario);
  std::ostringstream os;
  for (const KeyDef& def : key_table()) {
    if (sections.count(section_of(def.key)) == 0) continue;
    if (def.key == "domain.Ly" && domain.dimension != 2) continue;
    if (def.key == "grid.ny" && domain.dimension != 2) continue;
    os << def.key << " = " << def.get(*this) << "\n";
  }
  return os.str();
}

ScenarioConfig parse_config_text(const std::string& text) {
  const RawConfig raw = lex(text);

  const auto name_it = raw.kv.find("scenario.name");
  if (name_it == raw.kv.end()) {
    throw ConfigError("scenario.name", 0, "missing required key `scenario.name`");
  }

  ScenarioConfig cfg;
  key_table();  // ensure built
  for (const KeyDef& def : key_table()) {
    if (def.key == "scenario.name") {
      def.set(cfg, name_it->second.value, name_it->second.line);
      break;
    }
  }
  apply_scenario_defaults(cfg);

  const auto sections = allowed_sections(cfg.scenario);
  for (const std::string& key : raw.order) {
    const RawEntry& entry = raw.kv.at(key);
    const auto it = std::find_if(key_table().begin(), key_table().end(),
                                 [&key](const KeyDef& d) { return d.key == key; });
    if (it == key_table().end()) {
      throw ConfigError(key, entry.line, "config line " + std::to_string(entry.line) +
                                             ": unknown key `" + key + "`");
    }
    if (sections.count(section_of(key)) == 0) {
      throw ConfigError(key, entry.line,
                        "config line " + std::to_string(entry.line) + ": key `" + key +
                            "` does not apply to scenario " + to_string(cfg.scenario));
    }
    it->set(cfg, entry.value, entry.line);
  }

  const bool needs_kinetics =
      cfg.scenario != Scenario::weyl_check && cfg.scenario != Scenario::d_oracle_check;
  if (needs_kinetics) {
    for (const char* key : {"model.lambda_S", "model.lambda_R", "model.K", "model.alpha",
                            "model.xi"}) {
      if (raw.kv.count(key) == 0) {
        throw ConfigError(key, 0, std::string("missing required key `") + key + "`");
      }
    }
  }

  validate(cfg, raw);
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(path.string(), 0, e.what());
  }
  return parse_config_text(text);
}

}  // namespace tme
