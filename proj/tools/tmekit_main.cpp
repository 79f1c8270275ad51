// Command-line front end for the tmekit shared library. Talks to the core
// exclusively through the C API in tmekit.h.

#include <cstdio>
#include <cstring>
#include <string>

#include "tmekit.h"

namespace {

void print_usage(std::FILE* to) {
  std::fprintf(to,
               "usage:\n"
               "  tmekit run <config-path> [--out DIR] [--seed N] [--quiet]\n"
               "  tmekit version\n"
               "\n"
               "exit status: 0 all checks passed, 1 a check failed,\n"
               "             2 configuration error, 3 numerical divergence\n");
}

int exit_code_for(tmk_status st) {
  switch (st) {
    case TMK_OK: return 0;
    case TMK_ECHECK: return 1;
    case TMK_ECONFIG: return 2;
    case TMK_EDIVERGED: return 3;
    default: return 2;
  }
}

int run_command(int argc, char** argv) {
  if (argc < 1) {
    print_usage(stderr);
    return 2;
  }
  const char* config_path = argv[0];
  const char* out_dir = nullptr;
  const char* seed = nullptr;
  bool quiet = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      out_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed = argv[++i];
    } else if (std::strcmp(argv[i], "--quiet") == 0) {
      quiet = true;
    } else {
      std::fprintf(stderr, "tmekit: unknown argument `%s`\n", argv[i]);
      print_usage(stderr);
      return 2;
    }
  }

  tmk_config* cfg = nullptr;
  tmk_status st = tmk_config_load(config_path, &cfg);
  if (st != TMK_OK) {
    std::fprintf(stderr, "tmekit: %s\n", tmk_last_error());
    return exit_code_for(st);
  }
  if (out_dir != nullptr) st = tmk_config_set(cfg, "scenario.out_dir", out_dir);
  if (st == TMK_OK && seed != nullptr) st = tmk_config_set(cfg, "scenario.seed", seed);
  if (st != TMK_OK) {
    std::fprintf(stderr, "tmekit: %s\n", tmk_last_error());
    tmk_config_free(cfg);
    return exit_code_for(st);
  }

  tmk_report* rep = nullptr;
  st = tmk_run_scenario(cfg, &rep);
  if (rep == nullptr) {
    std::fprintf(stderr, "tmekit: %s\n", tmk_last_error());
    tmk_config_free(cfg);
    return exit_code_for(st);
  }

  if (!quiet) {
    const int n = tmk_report_check_count(rep);
    for (int i = 0; i < n; ++i) {
      const char* name = nullptr;
      int passed = 0;
      double measured = 0.0, bound = 0.0;
      if (tmk_report_check_name(rep, i, &name) == TMK_OK &&
          tmk_report_check_info(rep, i, &passed, &measured, &bound) == TMK_OK) {
        std::printf("[%s] %-36s measured %.6g bound %.6g\n", passed ? "PASS" : "FAIL", name,
                    measured, bound);
      }
    }
    if (tmk_report_diverged(rep)) {
      std::printf("[DIVERGED] %s\n", tmk_last_error());
    }
    std::printf("%s: %s\n", tmk_report_all_passed(rep) ? "ok" : "failed",
                tmk_report_summary(rep));
  }

  const int code = exit_code_for(st);
  tmk_report_free(rep);
  tmk_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage(stderr);
    return 2;
  }
  if (std::strcmp(argv[1], "version") == 0) {
    std::printf("tmekit %s\n", tmk_version());
    return 0;
  }
  if (std::strcmp(argv[1], "run") == 0) {
    return run_command(argc - 2, argv + 2);
  }
  std::fprintf(stderr, "tmekit: unknown command `%s`\n", argv[1]);
  print_usage(stderr);
  return 2;
}
