#include "tmekit.h"

#include <cmath>
#include <new>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "scenario.hpp"
#include "version.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

tmk_status guard_status(const std::exception& e) {
  set_error(e.what());
  if (dynamic_cast<const tme::ConfigError*>(&e)) return TMK_ECONFIG;
  if (dynamic_cast<const tme::DivergenceError*>(&e)) return TMK_EDIVERGED;
  if (dynamic_cast<const std::domain_error*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e)) {
    return TMK_EINVAL;
  }
  return TMK_EINTERNAL;
}

}  // namespace

struct tmk_config {
  tme::ScenarioConfig cfg;
  std::string echo_buf;
};

struct tmk_report {
  tme::ScenarioReport rep;
};

extern "C" {

const char* tmk_version(void) { return TMEKIT_VERSION_STRING; }

const char* tmk_last_error(void) { return g_last_error.c_str(); }

tmk_status tmk_config_load(const char* path, tmk_config** out) {
  if (path == nullptr || out == nullptr) {
    set_error("tmk_config_load: null argument");
    return TMK_EINVAL;
  }
  try {
    auto* handle = new tmk_config{tme::parse_config(path), {}};
    *out = handle;
    return TMK_OK;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return TMK_EINTERNAL;
  } catch (const std::exception& e) {
    return guard_status(e);
  }
}

tmk_status tmk_config_load_text(const char* text, tmk_config** out) {
  if (text == nullptr || out == nullptr) {
    set_error("tmk_config_load_text: null argument");
    return TMK_EINVAL;
  }
  try {
    auto* handle = new tmk_config{tme::parse_config_text(text), {}};
    *out = handle;
    return TMK_OK;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return TMK_EINTERNAL;
  } catch (const std::exception& e) {
    return guard_status(e);
  }
}

tmk_status tmk_config_set(tmk_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) {
    set_error("tmk_config_set: null argument");
    return TMK_EINVAL;
  }
  try {
    // Rewrite the echo with the override applied and re-parse: keeps every
    // validation rule in one place.
    std::string text = cfg->cfg.echo();
    const std::string prefix = std::string(key) + " = ";
    std::string patched;
    bool replaced = false;
    size_t pos = 0;
    while (pos < text.size()) {
      const size_t end = text.find('\n', pos);
      std::string line = text.substr(pos, end - pos);
      if (line.rfind(prefix, 0) == 0) {
        line = prefix + value;
        replaced = true;
      }
      patched += line + "\n";
      pos = end == std::string::npos ? text.size() : end + 1;
    }
    if (!replaced) patched += prefix + value + "\n";
    cfg->cfg = tme::parse_config_text(patched);
    return TMK_OK;
  } catch (const std::exception& e) {
    return guard_status(e);
  }
}

const char* tmk_config_echo(tmk_config* cfg) {
  if (cfg == nullptr) return "";
  try {
    cfg->echo_buf = cfg->cfg.echo();
    return cfg->echo_buf.c_str();
  } catch (const std::exception& e) {
    set_error(e.what());
    return "";
  }
}

void tmk_config_free(tmk_config* cfg) { delete cfg; }

tmk_status tmk_run_scenario(const tmk_config* cfg, tmk_report** out) {
  if (cfg == nullptr || out == nullptr) {
    set_error("tmk_run_scenario: null argument");
    return TMK_EINVAL;
  }
  try {
    auto* rep = new tmk_report{tme::run_scenario(cfg->cfg)};
    *out = rep;
    if (rep->rep.diverged) {
      set_error(rep->rep.status);
      return TMK_EDIVERGED;
    }
    if (!rep->rep.checks.all_pass()) {
      set_error("one or more scenario checks failed");
      return TMK_ECHECK;
    }
    return TMK_OK;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return TMK_EINTERNAL;
  } catch (const std::exception& e) {
    return guard_status(e);
  }
}

int tmk_report_check_count(const tmk_report* rep) {
  return rep == nullptr ? 0 : static_cast<int>(rep->rep.checks.checks.size());
}

tmk_status tmk_report_check_name(const tmk_report* rep, int index, const char** name) {
  if (rep == nullptr || name == nullptr || index < 0 ||
      index >= static_cast<int>(rep->rep.checks.checks.size())) {
    set_error("tmk_report_check_name: bad index");
    return TMK_EINVAL;
  }
  *name = rep->rep.checks.checks[static_cast<size_t>(index)].name.c_str();
  return TMK_OK;
}

tmk_status tmk_report_check_info(const tmk_report* rep, int index, int* passed, double* measured,
                                 double* bound) {
  if (rep == nullptr || index < 0 ||
      index >= static_cast<int>(rep->rep.checks.checks.size())) {
    set_error("tmk_report_check_info: bad index");
    return TMK_EINVAL;
  }
  const tme::CheckResult& c = rep->rep.checks.checks[static_cast<size_t>(index)];
  if (passed != nullptr) *passed = c.pass ? 1 : 0;
  if (measured != nullptr) *measured = c.measured;
  if (bound != nullptr) *bound = c.bound;
  return TMK_OK;
}

int tmk_report_all_passed(const tmk_report* rep) {
  return rep != nullptr && rep->rep.all_passed() ? 1 : 0;
}

int tmk_report_diverged(const tmk_report* rep) {
  return rep != nullptr && rep->rep.diverged ? 1 : 0;
}

const char* tmk_report_summary(const tmk_report* rep) {
  return rep == nullptr ? "" : rep->rep.summary.c_str();
}

void tmk_report_free(tmk_report* rep) { delete rep; }

tmk_status tmk_coexistence_equilibrium(double K, double alpha, double xi, double* S_star,
                                       double* R_star) {
  if (S_star == nullptr || R_star == nullptr) {
    set_error("tmk_coexistence_equilibrium: null output");
    return TMK_EINVAL;
  }
  try {
    tme::ModelParams p;
    p.K = K;
    p.alpha = alpha;
    p.xi = xi;
    const tme::Equilibrium eq = tme::coexistence_equilibrium(p);
    *S_star = eq.S_star;
    *R_star = eq.R_star;
    return TMK_OK;
  } catch (const std::exception& e) {
    return guard_status(e);
  }
}

tmk_status tmk_base_dispersion(double lambda_S, double lambda_R, double K, double alpha,
                               double xi, double d_S, double d_R, double lambda, double* a1,
                               double* a0, double* mu_plus) {
  try {
    tme::ModelParams p;
    p.lambda_S = lambda_S;
    p.lambda_R = lambda_R;
    p.K = K;
    p.alpha = alpha;
    p.xi = xi;
    const tme::Equilibrium eq = tme::coexistence_equilibrium(p);
    const tme::Jacobian2 J = tme::reduced_jacobian(eq.S_star, eq.R_star, p);
    const tme::DispersionSample s = tme::base_dispersion(J, d_S, d_R, lambda);
    if (a1 != nullptr) *a1 = s.a1;
    if (a0 != nullptr) *a0 = s.a0;
    if (mu_plus != nullptr) *mu_plus = s.mu_plus;
    return TMK_OK;
  } catch (const std::exception& e) {
    return guard_status(e);
  }
}

tmk_status tmk_twoway_classify(double lambda_S, double lambda_R, double K, double alpha,
                               double xi, double d_S, double d_R, double chi_S, double chi_R,
                               double g_S, double g_R, int* classification, double* A1,
                               double* A2, double* detJ, double* lambda_lo, double* lambda_hi,
                               unsigned* regimes) {
  try {
    tme::ModelParams p;
    p.lambda_S = lambda_S;
    p.lambda_R = lambda_R;
    p.K = K;
    p.alpha = alpha;
    p.xi = xi;
    p.d_S = d_S;
    p.d_R = d_R;
    tme::SignalCoupling c;
    c.chi_S = chi_S;
    c.chi_R = chi_R;
    c.g_S_star = g_S;
    c.g_R_star = g_R;
    const tme::StabilityVerdict v = tme::twoway_verdict(p, c);
    if (classification != nullptr) *classification = static_cast<int>(v.classification);
    if (A1 != nullptr) *A1 = v.A1;
    if (A2 != nullptr) *A2 = v.A2;
    if (detJ != nullptr) *detJ = v.detJ;
    if (lambda_lo != nullptr) *lambda_lo = v.has_interval ? v.lambda_lo : 0.0;
    if (lambda_hi != nullptr) *lambda_hi = v.has_interval ? v.lambda_hi : 0.0;
    if (regimes != nullptr) *regimes = v.regimes;
    return TMK_OK;
  } catch (const std::exception& e) {
    return guard_status(e);
  }
}

}  // extern "C"
