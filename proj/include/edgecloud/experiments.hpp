#ifndef EDGECLOUD_EXPERIMENTS_HPP
#define EDGECLOUD_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edgecloud {

// Deterministic CSV text: ',' separator, '.' decimal point, LF endings,
// shortest round-trip float formatting.
std::string format_double(double value);

struct SweepOverride {
  std::string name;
  std::vector<double> values;
};
SweepOverride parse_sweep(const std::string& text);  // "name=v1,v2,..."

struct RunResult {
  std::string csv;
  std::string summary;  // one line, empty unless the subcommand reports one
};

RunResult run_offload_sweep(const std::string& scenario_json, std::uint64_t seed,
                            const std::optional<SweepOverride>& sweep, int threads);
RunResult run_cache_sweep(const std::string& scenario_json, std::uint64_t seed,
                          const std::optional<SweepOverride>& sweep, int threads);
RunResult run_rem(const std::string& scenario_json, std::uint64_t seed,
                  const std::optional<SweepOverride>& sweep, int threads);
RunResult run_reliability_sweep(const std::string& scenario_json, std::uint64_t seed,
                                const std::optional<SweepOverride>& sweep, int threads);
RunResult run_centrality(const std::string& scenario_json, std::uint64_t seed,
                         const std::optional<SweepOverride>& sweep, int threads);

// Dispatch on {offload, cache, rem, reliability, centrality}.
RunResult run_subcommand(const std::string& subcommand, const std::string& scenario_json,
                         std::uint64_t seed, const std::optional<SweepOverride>& sweep,
                         int threads);

}  // namespace edgecloud

#endif
