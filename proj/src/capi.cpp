#include <tpmhd/tpmhd.h>

#include <memory>
#include <new>
#include <string>
#include <vector>

#include "cli.hpp"
#include "errors.hpp"

struct tpmhd_config {
  tpmhd::Config config;
};

struct tpmhd_result {
  std::string csv;
  std::vector<std::string> dumps;
};

namespace {

thread_local std::string g_last_error;

tpmhd_status fail(tpmhd_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

template <class F>
tpmhd_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return TPMHD_OK;
  } catch (const tpmhd::ConfigError& e) {
    return fail(TPMHD_ERR_CONFIG, e.what());
  } catch (const tpmhd::SolverError& e) {
    return fail(TPMHD_ERR_SOLVER, e.what());
  } catch (const tpmhd::IoError& e) {
    return fail(TPMHD_ERR_IO, e.what());
  } catch (const tpmhd::InvalidArgument& e) {
    return fail(TPMHD_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TPMHD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TPMHD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TPMHD_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* tpmhd_version(void) { return "1.0.0"; }

const char* tpmhd_last_error(void) { return g_last_error.c_str(); }

tpmhd_status tpmhd_config_load(const char* path, tpmhd_config** out) {
  if (!path || !out) return fail(TPMHD_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new tpmhd_config{tpmhd::parse_config(path)}; });
}

tpmhd_status tpmhd_config_parse(const char* text, tpmhd_config** out) {
  if (!text || !out) return fail(TPMHD_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new tpmhd_config{tpmhd::parse_config_text(text)}; });
}

void tpmhd_config_free(tpmhd_config* config) { delete config; }

const char* tpmhd_config_experiment(const tpmhd_config* config) {
  return config ? tpmhd::to_string(config->config.experiment) : "";
}

tpmhd_status tpmhd_config_set_output_dir(tpmhd_config* config, const char* dir) {
  if (!config || !dir || !*dir) return fail(TPMHD_ERR_ARGUMENT, "null or empty argument");
  return guarded([&] { config->config.output_dir = dir; });
}

tpmhd_status tpmhd_run(const tpmhd_config* config, tpmhd_log_fn log, void* user, tpmhd_result** out) {
  if (!config) return fail(TPMHD_ERR_ARGUMENT, "null config");
  if (out) *out = nullptr;
  return guarded([&] {
    tpmhd::LogFn sink;
    if (log) sink = [log, user](const std::string& line) { log(line.c_str(), user); };
    auto result = std::make_unique<tpmhd_result>();
    const tpmhd::Config& c = config->config;
    switch (c.experiment) {
      case tpmhd::Experiment::Converge:
        result->csv = tpmhd::cmd_converge(c, sink).csv.string();
        break;
      case tpmhd::Experiment::Spinodal:
      case tpmhd::Experiment::KelvinHelmholtz: {
        const tpmhd::RunOutput r =
            c.experiment == tpmhd::Experiment::Spinodal ? tpmhd::cmd_spinodal(c, sink) : tpmhd::cmd_kh(c, sink);
        result->csv = r.csv.string();
        for (const auto& d : r.dumps) result->dumps.push_back(d.string());
        break;
      }
    }
    if (out) *out = result.release();
  });
}

void tpmhd_result_free(tpmhd_result* result) { delete result; }

const char* tpmhd_result_csv(const tpmhd_result* result) { return result ? result->csv.c_str() : ""; }

size_t tpmhd_result_dump_count(const tpmhd_result* result) { return result ? result->dumps.size() : 0; }

const char* tpmhd_result_dump(const tpmhd_result* result, size_t index) {
  if (!result || index >= result->dumps.size()) return nullptr;
  return result->dumps[index].c_str();
}

}  // extern "C"
