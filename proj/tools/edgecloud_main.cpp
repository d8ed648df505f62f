// Command-line front end; all work happens behind the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edgecloud.h"

namespace {

int run_one(const std::string& subcommand, const std::string& scenario,
            const std::string& out_path, unsigned long long seed, const std::string& sweep,
            int threads) {
  ec_result* result = nullptr;
  const ec_status status = ec_run(subcommand.c_str(), scenario.c_str(), seed,
                                  sweep.empty() ? nullptr : sweep.c_str(), threads, &result);
  if (status != EC_OK) {
    std::cerr << "edgecloud " << subcommand << ": " << ec_last_error() << "\n";
    return static_cast<int>(status);
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "edgecloud: cannot write '" << out_path << "'\n";
    ec_result_free(result);
    return 2;
  }
  out << ec_result_csv(result);
  const std::string summary = ec_result_summary(result);
  if (!summary.empty()) std::cout << summary << "\n";
  ec_result_free(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-cloud resource allocation experiments"};
  app.require_subcommand(1);

  std::string scenario, out_path, sweep;
  unsigned long long seed = 0;
  int threads = 0;
  if (const char* env = std::getenv("EDGECLOUD_THREADS")) threads = std::atoi(env);

  const char* names[] = {"offload", "cache", "rem", "reliability", "centrality"};
  const char* blurbs[] = {
      "transmit power vs. deadline for the offloading solvers",
      "relaxed caching program vs. the shortest-path baseline",
      "radio-map recovery from sparse samples",
      "robust power allocation vs. the uniform baseline",
      "perturbation centrality per edge",
  };
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--scenario", scenario, "scenario JSON file")->required();
    sub->add_option("--out", out_path, "output CSV path")->required();
    sub->add_option("--seed", seed, "RNG seed (default 0)");
    sub->add_option("--sweep", sweep, "override, e.g. L=0.08,0.1,0.12");
  }

  CLI11_PARSE(app, argc, argv);
  return run_one(app.get_subcommands().front()->get_name(), scenario, out_path, seed, sweep,
                 threads);
}
