// Command-line driver: tpmhd converge|spinodal|kh --config <path> [--out <dir>]
#include <tpmhd/tpmhd.h>

#include <cstdio>
#include <string>

#include "CLI11.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

void print_line(const char* line, void*) {
  std::fprintf(stderr, "%s\n", line);
  std::fflush(stderr);
}

int report(tpmhd_status status) {
  std::fprintf(stderr, "tpmhd: %s\n", tpmhd_last_error());
  return status == TPMHD_ERR_CONFIG || status == TPMHD_ERR_ARGUMENT ? kExitConfig : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase MHD finite element solver"};
  app.set_version_flag("--version", std::string(tpmhd_version()));
  app.require_subcommand(1);
  std::string config_path, out_dir;
  for (const char* name : {"converge", "spinodal", "kh"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  tpmhd_config* config = nullptr;
  if (tpmhd_status s = tpmhd_config_load(config_path.c_str(), &config); s != TPMHD_OK) return report(s);
  int code = kExitOk;
  if (command != tpmhd_config_experiment(config)) {
    std::fprintf(stderr, "tpmhd: %s sets experiment = %s, not %s\n", config_path.c_str(),
                 tpmhd_config_experiment(config), command.c_str());
    code = kExitConfig;
  } else if (tpmhd_status s = out_dir.empty() ? TPMHD_OK : tpmhd_config_set_output_dir(config, out_dir.c_str());
             s != TPMHD_OK) {
    code = report(s);
  } else {
    tpmhd_result* result = nullptr;
    if (tpmhd_status r = tpmhd_run(config, print_line, nullptr, &result); r != TPMHD_OK) {
      code = report(r);
    } else {
      std::printf("%s\n", tpmhd_result_csv(result));
      for (size_t i = 0; i < tpmhd_result_dump_count(result); ++i) std::printf("%s\n", tpmhd_result_dump(result, i));
      tpmhd_result_free(result);
    }
  }
  tpmhd_config_free(config);
  return code;
}
