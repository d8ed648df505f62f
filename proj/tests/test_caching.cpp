#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "edgecloud/caching.hpp"
#include "edgecloud/errors.hpp"
#include "edgecloud/rng.hpp"
#include "support/oracles.hpp"

using namespace edgecloud;

namespace {

void add_bidirectional(CachingNetwork& net, int a, int b, int cap, double cost) {
  DirectedLink l1{a, b, cap, Vector(static_cast<std::size_t>(net.num_objects), cost)};
  DirectedLink l2{b, a, cap, Vector(static_cast<std::size_t>(net.num_objects), cost)};
  net.links.push_back(l1);
  net.links.push_back(l2);
}

// line 0-1-2-... with a repository at node 0 hosting everything
CachingNetwork line_network(int nodes, int objects, int horizon, int cap, double link_cost) {
  CachingNetwork net;
  net.num_nodes = nodes;
  net.num_objects = objects;
  net.horizon = horizon;
  net.storage_cap.assign(static_cast<std::size_t>(nodes), objects);
  net.repo_objects.assign(static_cast<std::size_t>(nodes), {});
  for (int k = 0; k < objects; ++k) net.repo_objects[0].push_back(k);
  net.popularity = Matrix(static_cast<std::size_t>(nodes), static_cast<std::size_t>(objects));
  for (int i = 0; i + 1 < nodes; ++i) add_bidirectional(net, i, i + 1, cap, link_cost);
  return net;
}

}  // namespace

TEST_CASE("storage unit cost follows the popularity discount") {
  CHECK(storage_unit_cost(0.0, 2.0, 5.0) == doctest::Approx(2.0));
  CHECK(storage_unit_cost(5.0, 2.0, 5.0) == doctest::Approx(1.0));  // P = P0 halves the cost
  double prev = storage_unit_cost(0.0, 1.0, 1.0);
  for (double p : {1.0, 10.0, 100.0, 1e4, 1e6}) {
    const double cur = storage_unit_cost(p, 1.0, 1.0);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(storage_unit_cost(1e9, 1.0, 1.0) < 1e-6);
  CHECK_THROWS_AS(storage_unit_cost(-1.0, 1.0, 1.0), SchemaError);
}

TEST_CASE("schedule cost sums the storage and transport terms") {
  CachingNetwork net = line_network(2, 1, 3, 1, 2.0);
  CacheSchedule zero = CacheSchedule::zeros(net);
  auto c0 = schedule_cost(net, zero);
  CHECK(c0.total == doctest::Approx(0.0));

  CacheSchedule stored = zero;
  for (int n = 0; n < 3; ++n) stored.s(1, 0, n) = 1.0;
  auto c1 = schedule_cost(net, stored);
  CHECK(c1.storage == doctest::Approx(3.0 * net.storage_cost(1, 0)));
  CHECK(c1.transport == doctest::Approx(0.0));

  CacheSchedule sent = zero;
  sent.t(0, 0, 1) = 1.0;
  auto c2 = schedule_cost(net, sent);
  CHECK(c2.transport == doctest::Approx(2.0));

  CacheSchedule wrong = zero;
  wrong.horizon = 99;
  CHECK_THROWS_AS(schedule_cost(net, wrong), SchemaError);
}

TEST_CASE("empty request set costs nothing beyond the repositories") {
  CachingNetwork net = line_network(2, 1, 1, 1, 1.0);
  auto sol = solve_caching(net, true, true);
  CHECK(sol.objective == doctest::Approx(0.0));
  for (int n = 0; n < net.horizon; ++n) CHECK(sol.schedule.s(0, 0, n) == doctest::Approx(1.0));
  CHECK(validate_schedule(net, sol.schedule, false).empty());
}

TEST_CASE("request at a repository is free") {
  CachingNetwork net = line_network(3, 1, 3, 1, 1.0);
  net.requests.push_back({0, 0, 1, 1});
  auto sol = solve_caching(net, true, true);
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(validate_schedule(net, sol.schedule, false).empty());
}

TEST_CASE("one hop from the repository needs exactly one transmission") {
  CachingNetwork net = line_network(2, 1, 3, 1, 2.5);
  net.requests.push_back({1, 0, 1, 0});  // tight deadline forces a single full copy
  auto sol = solve_caching(net, true, true);
  CHECK(sol.objective == doctest::Approx(2.5));
  CHECK(validate_schedule(net, sol.schedule, false).empty());

  // enumeration oracle agrees on the toy
  CHECK(test_support::caching_bruteforce_optimum(net, true) == doctest::Approx(2.5));
}

TEST_CASE("three-node line matches the binary brute force at a tight deadline") {
  CachingNetwork net = line_network(3, 1, 4, 1, 1.0);
  net.requests.push_back({2, 0, 1, 0});  // earliest possible arrival: no slack to split
  auto sol = solve_caching(net, true, true);
  const double oracle = test_support::caching_bruteforce_optimum(net, true);
  CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(sol.objective == doctest::Approx(2.0));
  CHECK(validate_schedule(net, sol.schedule, false).empty());
}

TEST_CASE("a loose deadline lets the relaxation time-split below the binary optimum") {
  CachingNetwork net = line_network(3, 1, 4, 1, 1.0);
  net.requests.push_back({2, 0, 0, 3});
  auto sol = solve_caching(net, true, true);
  const double oracle = test_support::caching_bruteforce_optimum(net, true);
  CHECK(sol.objective <= oracle + 1e-9);
  CHECK(sol.objective == doctest::Approx(4.0 / 3.0));
  CHECK(validate_schedule(net, sol.schedule, false).empty());
}

TEST_CASE("relaxed cost is bounded by the binary optimum and shortest path") {
  Rng rng(404);
  for (int trial = 0; trial < 6; ++trial) {
    // 4 nodes, 2 objects, 3 slots; caps decouple the objects
    CachingNetwork net;
    net.num_nodes = 4;
    net.num_objects = 2;
    net.horizon = 3;
    net.storage_cap.assign(4, 2);
    net.repo_objects.assign(4, {});
    net.repo_objects[0] = {0, 1};
    net.popularity = Matrix(4, 2);
    add_bidirectional(net, 0, 1, 2, rng.uniform(0.5, 2.0));
    add_bidirectional(net, 1, 2, 2, rng.uniform(0.5, 2.0));
    add_bidirectional(net, 1, 3, 2, rng.uniform(0.5, 2.0));
    const int req_node = 1 + static_cast<int>(rng.below(3));
    const int req_obj = static_cast<int>(rng.below(2));
    const int deadline = 1 + static_cast<int>(rng.below(2));
    net.requests.push_back({req_node, req_obj, 0, deadline});

    auto lp_sol = solve_caching(net, true, true);
    const double binary = test_support::caching_bruteforce_optimum(net, true);
    auto sp = shortest_path_baseline(net);
    REQUIRE(sp.failed_requests.empty());
    CHECK(validate_schedule(net, sp.schedule, true).empty());
    CHECK(lp_sol.objective <= binary + 1e-9);
    CHECK(binary <= sp.cost.transport + 1e-9);
  }
}

TEST_CASE("lp cost never increases when deadlines, storage or caps grow") {
  CachingNetwork base = line_network(4, 2, 6, 1, 1.0);
  base.requests.push_back({3, 0, 0, 2});
  base.requests.push_back({2, 1, 1, 1});

  const double cost0 = solve_caching(base, true, true).objective;

  CachingNetwork longer = base;
  for (auto& r : longer.requests) r.deadline += 1;
  CHECK(solve_caching(longer, true, true).objective <= cost0 + 1e-9);

  CachingNetwork fatter = base;
  for (auto& l : fatter.links) l.capacity += 1;
  CHECK(solve_caching(fatter, true, true).objective <= cost0 + 1e-9);

  CachingNetwork roomier = base;
  for (auto& s : roomier.storage_cap) s += 1;
  CHECK(solve_caching(roomier, true, true).objective <= cost0 + 1e-9);
}

TEST_CASE("lp solution satisfies constraints (a)-(g) through the validator") {
  Rng rng(77);
  for (int trial = 0; trial < 4; ++trial) {
    CachingNetwork net = line_network(5, 2, 6, 1, 1.0);
    add_bidirectional(net, 0, 3, 1, 2.0);
    net.requests.push_back({4, 0, static_cast<int>(rng.below(2)), 3});
    net.requests.push_back({2, 1, 1 + static_cast<int>(rng.below(2)), 2});
    auto sol = solve_caching(net, true, trial % 2 == 0);
    auto violations = validate_schedule(net, sol.schedule, false);
    for (const auto& v : violations) MESSAGE(v);
    CHECK(violations.empty());
  }
}

TEST_CASE("storage cost steers placement when not ignored") {
  // two repositories, one expensive to reach; with storage cost active, the
  // solver must weigh caching against transport
  CachingNetwork net = line_network(3, 1, 4, 1, 1.0);
  net.requests.push_back({2, 0, 0, 1});
  net.requests.push_back({2, 0, 3, 0});
  auto with_storage = solve_caching(net, true, false);
  auto without = solve_caching(net, true, true);
  CHECK(with_storage.objective >= without.objective - 1e-9);
  CHECK(validate_schedule(net, with_storage.schedule, false).empty());
}

TEST_CASE("infeasible deadline is reported with the request") {
  CachingNetwork net = line_network(4, 1, 4, 1, 1.0);
  net.requests.push_back({3, 0, 1, 0});  // three hops cannot arrive by slot 1
  try {
    solve_caching(net, true, true);
    FAIL("expected infeasibility");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("request") != std::string::npos);
  }
}

TEST_CASE("deadline truncation at the window end is reported") {
  CachingNetwork net = line_network(4, 1, 2, 1, 1.0);
  net.requests.push_back({3, 0, 0, 9});  // arrivals beyond the window cannot count
  CHECK_THROWS_AS(build_caching_lp(net, true, true), InfeasibleError);
}

TEST_CASE("shortest path baseline: repository requests and forced routes") {
  CachingNetwork net = line_network(3, 1, 4, 1, 1.5);
  net.requests.push_back({0, 0, 1, 1});  // at the repository: free
  auto sp0 = shortest_path_baseline(net);
  CHECK(sp0.cost.transport == doctest::Approx(0.0));

  net.requests.clear();
  net.requests.push_back({2, 0, 0, 3});  // unique path of length 2
  auto sp = shortest_path_baseline(net);
  REQUIRE(sp.failed_requests.empty());
  CHECK(sp.cost.transport == doctest::Approx(3.0));
  CHECK(validate_schedule(net, sp.schedule, true).empty());
}

TEST_CASE("shortest path baseline handles saturation by waiting") {
  // two requests for different objects over a unit-capacity line: the second
  // transfer must wait a slot at the bottleneck
  CachingNetwork net = line_network(3, 2, 5, 1, 1.0);
  net.requests.push_back({2, 0, 0, 4});
  net.requests.push_back({2, 1, 0, 4});
  auto sp = shortest_path_baseline(net);
  REQUIRE(sp.failed_requests.empty());
  auto violations = validate_schedule(net, sp.schedule, true);
  for (const auto& v : violations) MESSAGE(v);
  CHECK(violations.empty());
  CHECK(sp.cost.transport == doctest::Approx(4.0));
}

TEST_CASE("shortest path cost dominates the relaxed cost on random instances") {
  Rng rng(909);
  int compared = 0;
  for (int trial = 0; trial < 8; ++trial) {
    CachingNetwork net;
    net.num_nodes = 10;
    net.num_objects = 2;
    net.horizon = 8;
    net.storage_cap.assign(10, 2);
    net.repo_objects.assign(10, {});
    net.repo_objects[0] = {0, 1};
    net.repo_objects[5] = {0};
    net.popularity = Matrix(10, 2);
    for (int i = 0; i + 1 < 10; ++i) add_bidirectional(net, i, i + 1, 2, rng.uniform(0.5, 2.0));
    add_bidirectional(net, 0, 5, 2, rng.uniform(0.5, 2.0));
    add_bidirectional(net, 2, 7, 2, rng.uniform(0.5, 2.0));

    for (int r = 0; r < 4; ++r) {
      const int node = static_cast<int>(rng.below(10));
      const int object = static_cast<int>(rng.below(2));
      const int slot = static_cast<int>(rng.below(4));
      if (net.is_repo(node, object)) continue;
      net.requests.push_back({node, object, slot, 3});
    }
    if (net.requests.empty()) continue;

    auto sp = shortest_path_baseline(net);
    if (!sp.failed_requests.empty()) continue;
    auto lp_sol = solve_caching(net, true, true);
    CHECK(lp_sol.objective <= sp.cost.transport + 1e-7);
    CHECK(validate_schedule(net, lp_sol.schedule, false).empty());
    ++compared;
  }
  CHECK(compared >= 5);
}

TEST_CASE("caching network json round trip and validation") {
  const char* text = R"({
    "nodes": 3, "objects": 2, "T": 4, "dtau": 1.0,
    "links": [[0,1,2,0.5],[1,0,2,0.5],[1,2,2,[1.0,2.0]],[2,1,2,1.0]],
    "storage_cap": 2,
    "repos": [{"node":0, "objects":[0,1]}],
    "c0": 1.0, "P0": 2.0,
    "requests": [{"u":2,"k":1,"n":1,"D":0}]
  })";
  auto net = CachingNetwork::from_json(text);
  CHECK(net.num_nodes == 3);
  CHECK(net.links.size() == 4);
  CHECK(net.links[2].cost_per_object[1] == doctest::Approx(2.0));
  CHECK(net.requests.size() == 1);
  auto sol = solve_caching(net, true, true);
  CHECK(sol.objective == doctest::Approx(2.5));  // two hops at costs 0.5 + 2.0

  CHECK_THROWS_AS(CachingNetwork::from_json("{}"), SchemaError);
  const char* orphan = R"({
    "nodes": 2, "objects": 1, "T": 2,
    "links": [[0,1,1,1.0]], "storage_cap": 1,
    "repos": []
  })";
  CHECK_THROWS_AS(CachingNetwork::from_json(orphan), SchemaError);
}

TEST_CASE("integral check on the non-relaxed path") {
  CachingNetwork net = line_network(3, 1, 4, 1, 1.0);
  net.requests.push_back({2, 0, 1, 0});
  auto sol = solve_caching(net, false, true);  // toy optimum happens to be integral
  CHECK(sol.objective == doctest::Approx(2.0));
}
