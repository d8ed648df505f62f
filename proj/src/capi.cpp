#include "edgecloud.h"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "edgecloud/errors.hpp"
#include "edgecloud/experiments.hpp"

struct ec_result {
  std::string csv;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

ec_status run_impl(const char* subcommand, const std::string& scenario_json,
                   unsigned long long seed, const char* sweep, int threads, ec_result** out) {
  if (out) *out = nullptr;
  if (!subcommand || !out) {
    g_last_error = "null argument";
    return EC_ERROR_SCHEMA;
  }
  try {
    std::optional<edgecloud::SweepOverride> override;
    if (sweep && *sweep) override = edgecloud::parse_sweep(sweep);
    auto result = edgecloud::run_subcommand(subcommand, scenario_json, seed, override, threads);
    *out = new ec_result{std::move(result.csv), std::move(result.summary)};
    return EC_OK;
  } catch (const edgecloud::Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
      case edgecloud::Error::Kind::schema:
        return EC_ERROR_SCHEMA;
      case edgecloud::Error::Kind::infeasible:
        return EC_ERROR_INFEASIBLE;
      case edgecloud::Error::Kind::numeric:
        return EC_ERROR_NUMERIC;
    }
    return EC_ERROR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EC_ERROR_NUMERIC;
  }
}

}  // namespace

extern "C" {

ec_status ec_run(const char* subcommand, const char* scenario_path, unsigned long long seed,
                 const char* sweep, int threads, ec_result** out) {
  if (out) *out = nullptr;
  if (!scenario_path) {
    g_last_error = "null scenario path";
    return EC_ERROR_SCHEMA;
  }
  std::ifstream file(scenario_path);
  if (!file) {
    g_last_error = std::string("cannot open scenario file '") + scenario_path + "'";
    return EC_ERROR_SCHEMA;
  }
  std::ostringstream text;
  text << file.rdbuf();
  return run_impl(subcommand, text.str(), seed, sweep, threads, out);
}

ec_status ec_run_text(const char* subcommand, const char* scenario_json, unsigned long long seed,
                      const char* sweep, int threads, ec_result** out) {
  if (out) *out = nullptr;
  if (!scenario_json) {
    g_last_error = "null scenario text";
    return EC_ERROR_SCHEMA;
  }
  return run_impl(subcommand, scenario_json, seed, sweep, threads, out);
}

const char* ec_result_csv(const ec_result* result) { return result ? result->csv.c_str() : ""; }

const char* ec_result_summary(const ec_result* result) {
  return result ? result->summary.c_str() : "";
}

void ec_result_free(ec_result* result) { delete result; }

const char* ec_last_error(void) { return g_last_error.c_str(); }

const char* ec_version(void) { return "edgecloud 0.1.0"; }

}  // extern "C"
