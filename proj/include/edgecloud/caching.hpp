#ifndef EDGECLOUD_CACHING_HPP
#define EDGECLOUD_CACHING_HPP

#include <string>
#include <utility>
#include <vector>

#include "edgecloud/lp.hpp"
#include "edgecloud/matrix.hpp"

namespace edgecloud {

struct DirectedLink {
  int from = 0;
  int to = 0;
  int capacity = 1;          // objects per slot
  Vector cost_per_object;    // transport cost, one entry per object
};

struct CacheRequest {
  int node = 0;
  int object = 0;
  int slot = 0;
  int deadline = 0;  // extra slots allowed for delivery
};

// Time-slotted content network over a directed link set.
struct CachingNetwork {
  int num_nodes = 0;
  int num_objects = 0;
  int horizon = 1;            // slots in the window
  double slot_duration = 1.0;
  std::vector<DirectedLink> links;
  std::vector<int> storage_cap;                // per node, objects
  std::vector<std::vector<int>> repo_objects;  // per node, sorted
  std::vector<CacheRequest> requests;
  Matrix popularity;  // num_nodes x num_objects
  double c0 = 1.0;
  double p0 = 1.0;

  bool is_repo(int node, int object) const;
  // links entering each node, as indices into `links`
  std::vector<std::vector<int>> in_links() const;
  std::vector<std::vector<int>> out_links() const;
  double storage_cost(int node, int object) const;

  void validate() const;
  static CachingNetwork from_json(const std::string& text);
};

// c0 / (1 + P/P0)
double storage_unit_cost(double popularity, double c0, double p0);

struct CacheSchedule {
  int num_nodes = 0, num_objects = 0, horizon = 0, num_links = 0;
  Vector storage;    // (u, k, n)
  Vector transport;  // (link, k, n)

  static CacheSchedule zeros(const CachingNetwork& net);
  std::size_t s_index(int u, int k, int n) const {
    return static_cast<std::size_t>((u * num_objects + k) * horizon + n);
  }
  std::size_t t_index(int link, int k, int n) const {
    return static_cast<std::size_t>((link * num_objects + k) * horizon + n);
  }
  double& s(int u, int k, int n) { return storage[s_index(u, k, n)]; }
  double s(int u, int k, int n) const { return storage[s_index(u, k, n)]; }
  double& t(int link, int k, int n) { return transport[t_index(link, k, n)]; }
  double t(int link, int k, int n) const { return transport[t_index(link, k, n)]; }
};

struct CacheCost {
  double storage = 0.0;
  double transport = 0.0;
  double total = 0.0;
};

CacheCost schedule_cost(const CachingNetwork& net, const CacheSchedule& schedule);

struct CachingLpLayout {
  int num_nodes = 0, num_objects = 0, horizon = 0, num_links = 0;
  int var_s(int u, int k, int n) const { return (u * num_objects + k) * horizon + n; }
  int var_t(int link, int k, int n) const {
    return num_nodes * num_objects * horizon + (link * num_objects + k) * horizon + n;
  }
  int num_vars() const { return (num_nodes + num_links) * num_objects * horizon; }
};

// Literal transcription of the dynamic caching program: request satisfaction
// within the delivery deadline, cache continuity, transport provenance,
// repository pinning, storage and transport caps, [0,1] bounds.
std::pair<LinearProgram, CachingLpLayout> build_caching_lp(const CachingNetwork& net, bool relax,
                                                           bool ignore_storage_cost);

struct CachingSolution {
  CacheSchedule schedule;
  CacheCost cost;
  double objective = 0.0;  // storage term dropped when ignore_storage_cost
};

// Relaxed optimum; fractional entries are reported as-is. relax=false checks
// that the relaxed optimum happens to be integral and errors otherwise
// (exact integer search is out of scope).
CachingSolution solve_caching(const CachingNetwork& net, bool relax, bool ignore_storage_cost);

struct ShortestPathResult {
  CacheSchedule schedule;
  CacheCost cost;
  std::vector<int> failed_requests;  // indices into net.requests
};

// Reactive per-request baseline: route each request from the nearest
// repository along the cheapest path, one hop per slot, waiting (and caching)
// when a link is saturated.
ShortestPathResult shortest_path_baseline(const CachingNetwork& net);

// Independent checker for the constraint families; returns human-readable
// violations (empty when the schedule is valid).
std::vector<std::string> validate_schedule(const CachingNetwork& net, const CacheSchedule& schedule,
                                           bool binary, double tol = 1e-7);

}  // namespace edgecloud

#endif
