#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "tmekit.h"

namespace fs = std::filesystem;

TEST_CASE("version and error text") {
  CHECK(std::strcmp(tmk_version(), "0.1.0") == 0);
  CHECK(tmk_last_error() != nullptr);
}

TEST_CASE("coexistence equilibrium through the C surface") {
  double S = 0.0, R = 0.0;
  REQUIRE(tmk_coexistence_equilibrium(10.0, 0.6, 0.4, &S, &R) == TMK_OK);
  CHECK(S == 4.0);
  CHECK(R == 6.0);

  CHECK(tmk_coexistence_equilibrium(10.0, 0.0, 0.0, &S, &R) == TMK_EINVAL);
  CHECK(std::strlen(tmk_last_error()) > 0);
  CHECK(tmk_coexistence_equilibrium(10.0, 0.6, 0.4, nullptr, &R) == TMK_EINVAL);
}

TEST_CASE("base dispersion worked values") {
  double a1 = 0.0, a0 = 0.0, mu = 0.0;
  REQUIRE(tmk_base_dispersion(1.5, 1.0, 10.0, 0.6, 0.4, 1.0, 1.0, 4.0, &a1, &a0, &mu) == TMK_OK);
  CHECK(std::abs(a1 - 10.2) <= 1e-12);
  CHECK(std::abs(a0 - 26.0) <= 1e-12);
  CHECK(mu < 0.0);
}

TEST_CASE("two-way classification through the C surface") {
  int cls = -1;
  double A1 = 0.0, A2 = 0.0, detJ = 0.0, lo = 0.0, hi = 0.0;
  unsigned regimes = 0;
  REQUIRE(tmk_twoway_classify(1.5, 1.0, 10.0, 0.6, 0.4, 0.05, 0.05, 0.0, 1.0, -1.0, 0.0, &cls,
                              &A1, &A2, &detJ, &lo, &hi, &regimes) == TMK_OK);
  CHECK(cls == 5);  // det_case_iii
  CHECK(std::abs(A1 - 0.0025) <= 1e-14);
  CHECK(std::abs(A2 + 1.09) <= 1e-13);
  CHECK(std::abs(detJ - 1.2) <= 1e-13);
  CHECK(std::abs(lo - 1.1037114194897064) <= 1e-9);
  CHECK(std::abs(hi - 434.89628858051029) <= 1e-6);
  CHECK((regimes & 8u) != 0);  // S4
  CHECK((regimes & 1u) == 0);  // not S1
}

TEST_CASE("config handles and scenario execution") {
  const char* text =
      "scenario.name = weyl-check\n"
      "domain.dimension = 1\n"
      "spectral.k_max = 50\n";

  tmk_config* cfg = nullptr;
  REQUIRE(tmk_config_load_text(text, &cfg) == TMK_OK);
  REQUIRE(cfg != nullptr);

  const std::string echo = tmk_config_echo(cfg);
  CHECK(echo.find("scenario.name = weyl-check") != std::string::npos);
  CHECK(echo.find("spectral.k_max = 50") != std::string::npos);

  const fs::path out = fs::temp_directory_path() / "tmekit_capi_weyl";
  fs::remove_all(out);
  REQUIRE(tmk_config_set(cfg, "scenario.out_dir", out.string().c_str()) == TMK_OK);
  REQUIRE(tmk_config_set(cfg, "scenario.seed", "3") == TMK_OK);
  CHECK(tmk_config_set(cfg, "spectral.k_max", "minus-one") == TMK_ECONFIG);

  tmk_report* rep = nullptr;
  REQUIRE(tmk_run_scenario(cfg, &rep) == TMK_OK);
  REQUIRE(rep != nullptr);
  CHECK(tmk_report_all_passed(rep) == 1);
  CHECK(tmk_report_diverged(rep) == 0);
  const int n = tmk_report_check_count(rep);
  CHECK(n >= 2);
  for (int i = 0; i < n; ++i) {
    const char* name = nullptr;
    int passed = 0;
    double measured = 0.0, bound = 0.0;
    REQUIRE(tmk_report_check_name(rep, i, &name) == TMK_OK);
    REQUIRE(tmk_report_check_info(rep, i, &passed, &measured, &bound) == TMK_OK);
    CHECK(std::strlen(name) > 0);
    CHECK(passed == 1);
  }
  CHECK(tmk_report_check_name(rep, n, nullptr) == TMK_EINVAL);
  CHECK(fs::exists(out / "manifest.txt"));

  tmk_report_free(rep);
  tmk_config_free(cfg);
  fs::remove_all(out);
}

TEST_CASE("config errors surface as TMK_ECONFIG with a message") {
  tmk_config* cfg = nullptr;
  CHECK(tmk_config_load_text("scenario.name = bogus\n", &cfg) == TMK_ECONFIG);
  CHECK(std::string(tmk_last_error()).find("bogus") != std::string::npos);
  CHECK(tmk_config_load("/definitely/not/here.cfg", &cfg) == TMK_ECONFIG);
  CHECK(tmk_config_load(nullptr, &cfg) == TMK_EINVAL);

  const char* bad_q =
      "scenario.name = twoway-simulate\n"
      "model.lambda_S = 1.5\nmodel.lambda_R = 1\nmodel.K = 10\n"
      "model.alpha = 0.6\nmodel.xi = 0.4\n"
      "coupling.q = 0.1\ninit.S = 4\ninit.R = 6\n";
  CHECK(tmk_config_load_text(bad_q, &cfg) == TMK_ECONFIG);
  CHECK(std::string(tmk_last_error()).find("q < 0") != std::string::npos);
}
