#include "edgecloud/caching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "edgecloud/errors.hpp"

#include <nlohmann/json.hpp>

namespace edgecloud {

bool CachingNetwork::is_repo(int node, int object) const {
  const auto& hosted = repo_objects[static_cast<std::size_t>(node)];
  return std::binary_search(hosted.begin(), hosted.end(), object);
}

std::vector<std::vector<int>> CachingNetwork::in_links() const {
  std::vector<std::vector<int>> in(static_cast<std::size_t>(num_nodes));
  for (std::size_t l = 0; l < links.size(); ++l)
    in[static_cast<std::size_t>(links[l].to)].push_back(static_cast<int>(l));
  return in;
}

std::vector<std::vector<int>> CachingNetwork::out_links() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_nodes));
  for (std::size_t l = 0; l < links.size(); ++l)
    out[static_cast<std::size_t>(links[l].from)].push_back(static_cast<int>(l));
  return out;
}

double CachingNetwork::storage_cost(int node, int object) const {
  return storage_unit_cost(popularity(static_cast<std::size_t>(node),
                                      static_cast<std::size_t>(object)),
                           c0, p0);
}

double storage_unit_cost(double popularity, double c0, double p0) {
  if (popularity < 0.0) throw SchemaError("storage cost: negative popularity");
  return c0 / (1.0 + popularity / p0);
}

void CachingNetwork::validate() const {
  if (num_nodes < 1) throw SchemaError("caching network: need at least one node");
  if (num_objects < 1) throw SchemaError("caching network: need at least one object");
  if (horizon < 1) throw SchemaError("caching network: window must span at least one slot");
  if (slot_duration <= 0.0) throw SchemaError("caching network: slot duration must be positive");
  if (c0 <= 0.0 || p0 <= 0.0) throw SchemaError("caching network: cost parameters must be positive");
  if (static_cast<int>(storage_cap.size()) != num_nodes)
    throw SchemaError("caching network: storage cap list size mismatch");
  for (int cap : storage_cap)
    if (cap < 1) throw SchemaError("caching network: storage caps must be positive integers");
  if (static_cast<int>(repo_objects.size()) != num_nodes)
    throw SchemaError("caching network: repository list size mismatch");
  if (static_cast<int>(popularity.rows()) != num_nodes ||
      static_cast<int>(popularity.cols()) != num_objects)
    throw SchemaError("caching network: popularity table must be nodes x objects");
  for (const DirectedLink& link : links) {
    if (link.from < 0 || link.from >= num_nodes || link.to < 0 || link.to >= num_nodes ||
        link.from == link.to)
      throw SchemaError("caching network: bad link endpoints");
    if (link.capacity < 1) throw SchemaError("caching network: transport caps must be positive");
    if (static_cast<int>(link.cost_per_object.size()) != num_objects)
      throw SchemaError("caching network: per-object link costs size mismatch");
    for (double c : link.cost_per_object)
      if (c < 0.0) throw SchemaError("caching network: negative transport cost");
  }
  for (int k = 0; k < num_objects; ++k) {
    bool hosted = false;
    for (int u = 0; u < num_nodes && !hosted; ++u) hosted = is_repo(u, k);
    if (!hosted)
      throw SchemaError("caching network: object " + std::to_string(k) +
                        " has no repository node");
  }
  for (const CacheRequest& r : requests) {
    if (r.node < 0 || r.node >= num_nodes || r.object < 0 || r.object >= num_objects)
      throw SchemaError("caching network: request out of range");
    if (r.slot < 0 || r.slot >= horizon) throw SchemaError("caching network: request slot outside window");
    if (r.deadline < 0) throw SchemaError("caching network: negative delivery deadline");
  }
}

CachingNetwork CachingNetwork::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("caching scenario: ") + e.what());
  }
  CachingNetwork net;
  try {
    net.num_nodes = j.at("nodes").get<int>();
    net.num_objects = j.at("objects").get<int>();
    net.horizon = j.at("T").get<int>();
    net.slot_duration = j.value("dtau", 1.0);
    net.c0 = j.value("c0", 1.0);
    net.p0 = j.value("P0", 1.0);
    for (const auto& item : j.at("links")) {
      DirectedLink link;
      link.from = item.at(0).get<int>();
      link.to = item.at(1).get<int>();
      link.capacity = item.at(2).get<int>();
      if (item.at(3).is_array()) {
        for (const auto& c : item.at(3)) link.cost_per_object.push_back(c.get<double>());
      } else {
        link.cost_per_object.assign(static_cast<std::size_t>(net.num_objects),
                                    item.at(3).get<double>());
      }
      net.links.push_back(std::move(link));
    }
    if (j.at("storage_cap").is_array()) {
      for (const auto& c : j.at("storage_cap")) net.storage_cap.push_back(c.get<int>());
    } else {
      net.storage_cap.assign(static_cast<std::size_t>(net.num_nodes),
                             j.at("storage_cap").get<int>());
    }
    net.repo_objects.assign(static_cast<std::size_t>(net.num_nodes), {});
    for (const auto& repo : j.at("repos")) {
      const int node = repo.at("node").get<int>();
      if (node < 0 || node >= net.num_nodes) throw SchemaError("caching scenario: repo node out of range");
      for (const auto& k : repo.at("objects"))
        net.repo_objects[static_cast<std::size_t>(node)].push_back(k.get<int>());
    }
    for (auto& hosted : net.repo_objects) std::sort(hosted.begin(), hosted.end());
    net.popularity = Matrix(static_cast<std::size_t>(net.num_nodes),
                            static_cast<std::size_t>(net.num_objects));
    if (j.contains("popularity")) {
      const auto& pop = j.at("popularity");
      for (int u = 0; u < net.num_nodes; ++u)
        for (int k = 0; k < net.num_objects; ++k)
          net.popularity(static_cast<std::size_t>(u), static_cast<std::size_t>(k)) =
              pop.at(static_cast<std::size_t>(u)).at(static_cast<std::size_t>(k)).get<double>();
    }
    if (j.contains("requests"))
      for (const auto& r : j.at("requests"))
        net.requests.push_back({r.at("u").get<int>(), r.at("k").get<int>(), r.at("n").get<int>(),
                                r.at("D").get<int>()});
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("caching scenario: ") + e.what());
  }
  net.validate();
  return net;
}

CacheSchedule CacheSchedule::zeros(const CachingNetwork& net) {
  CacheSchedule s;
  s.num_nodes = net.num_nodes;
  s.num_objects = net.num_objects;
  s.horizon = net.horizon;
  s.num_links = static_cast<int>(net.links.size());
  s.storage.assign(static_cast<std::size_t>(s.num_nodes * s.num_objects * s.horizon), 0.0);
  s.transport.assign(static_cast<std::size_t>(s.num_links * s.num_objects * s.horizon), 0.0);
  return s;
}

CacheCost schedule_cost(const CachingNetwork& net, const CacheSchedule& schedule) {
  if (schedule.num_nodes != net.num_nodes || schedule.num_objects != net.num_objects ||
      schedule.horizon != net.horizon ||
      schedule.num_links != static_cast<int>(net.links.size()))
    throw SchemaError("schedule_cost: schedule does not match the network");
  CacheCost cost;
  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k) {
      const double unit = net.storage_cost(u, k);
      for (int n = 0; n < net.horizon; ++n) cost.storage += schedule.s(u, k, n) * unit;
    }
  for (int l = 0; l < schedule.num_links; ++l)
    for (int k = 0; k < net.num_objects; ++k) {
      const double unit = net.links[static_cast<std::size_t>(l)]
                              .cost_per_object[static_cast<std::size_t>(k)];
      for (int n = 0; n < net.horizon; ++n) cost.transport += schedule.t(l, k, n) * unit;
    }
  cost.total = cost.storage + cost.transport;
  return cost;
}

namespace {

// Hop distance from the nearest repository hosting `object` to every node.
std::vector<int> repo_distance(const CachingNetwork& net, int object) {
  const int unreachable = std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(net.num_nodes), unreachable);
  std::queue<int> frontier;
  for (int u = 0; u < net.num_nodes; ++u)
    if (net.is_repo(u, object)) {
      dist[static_cast<std::size_t>(u)] = 0;
      frontier.push(u);
    }
  auto out = net.out_links();
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int l : out[static_cast<std::size_t>(v)]) {
      const int u = net.links[static_cast<std::size_t>(l)].to;
      if (dist[static_cast<std::size_t>(u)] == unreachable) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        frontier.push(u);
      }
    }
  }
  return dist;
}

struct Pins {
  // -1 free, otherwise pinned to the value
  std::vector<signed char> s;
  std::vector<signed char> t;
};

// Repository pinning plus causality (content moves one hop per slot from the
// repositories) and usefulness (a variable that cannot serve any request is
// zero at some optimum since all costs are nonnegative).
Pins compute_pins(const CachingNetwork& net) {
  const CachingLpLayout lay{net.num_nodes, net.num_objects, net.horizon,
                            static_cast<int>(net.links.size())};
  Pins pins;
  pins.s.assign(static_cast<std::size_t>(net.num_nodes * net.num_objects * net.horizon), -1);
  pins.t.assign(static_cast<std::size_t>(lay.num_links * net.num_objects * net.horizon), -1);

  auto s_at = [&](int u, int k, int n) -> signed char& {
    return pins.s[static_cast<std::size_t>((u * net.num_objects + k) * net.horizon + n)];
  };
  auto t_at = [&](int l, int k, int n) -> signed char& {
    return pins.t[static_cast<std::size_t>((l * net.num_objects + k) * net.horizon + n)];
  };

  for (int k = 0; k < net.num_objects; ++k) {
    const auto dist = repo_distance(net, k);
    std::vector<const CacheRequest*> reqs;
    for (const CacheRequest& r : net.requests)
      if (r.object == k) reqs.push_back(&r);
    std::vector<std::vector<int>> to_requester(reqs.size());

    // distance maps computed backwards: dist from x to the requester. Build a
    // reversed adjacency BFS per requester.
    auto in = net.in_links();
    for (std::size_t ri = 0; ri < reqs.size(); ++ri) {
      const int target = reqs[ri]->node;
      const int unreachable = std::numeric_limits<int>::max();
      std::vector<int> d(static_cast<std::size_t>(net.num_nodes), unreachable);
      d[static_cast<std::size_t>(target)] = 0;
      std::queue<int> frontier;
      frontier.push(target);
      while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int l : in[static_cast<std::size_t>(u)]) {
          const int v = net.links[static_cast<std::size_t>(l)].from;
          if (d[static_cast<std::size_t>(v)] == unreachable) {
            d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
            frontier.push(v);
          }
        }
      }
      to_requester[ri] = std::move(d);
    }

    auto useful_arrival = [&](int node, int slot) {
      for (std::size_t ri = 0; ri < reqs.size(); ++ri) {
        const int latest = std::min(reqs[ri]->slot + reqs[ri]->deadline, net.horizon - 1);
        const int d = to_requester[ri][static_cast<std::size_t>(node)];
        if (d == std::numeric_limits<int>::max()) continue;
        if (node == reqs[ri]->node && slot <= latest) return true;
        if (slot + d <= latest) return true;
      }
      return false;
    };
    auto useful_cache = [&](int node, int slot) {
      for (std::size_t ri = 0; ri < reqs.size(); ++ri) {
        const int latest = std::min(reqs[ri]->slot + reqs[ri]->deadline, net.horizon - 1);
        const int d = to_requester[ri][static_cast<std::size_t>(node)];
        if (node == reqs[ri]->node && slot <= latest) return true;
        if (d != std::numeric_limits<int>::max() && slot + d <= latest) return true;
      }
      return false;
    };

    for (int u = 0; u < net.num_nodes; ++u) {
      if (net.is_repo(u, k)) {
        for (int n = 0; n < net.horizon; ++n) s_at(u, k, n) = 1;
        continue;
      }
      const int d = dist[static_cast<std::size_t>(u)];
      for (int n = 0; n < net.horizon; ++n) {
        const bool reachable = d != std::numeric_limits<int>::max() && n >= d;
        if (!reachable || !useful_cache(u, n)) s_at(u, k, n) = 0;
      }
      s_at(u, k, 0) = 0;  // empty caches at the window origin
    }
    for (int l = 0; l < lay.num_links; ++l) {
      const DirectedLink& link = net.links[static_cast<std::size_t>(l)];
      const int d_from = dist[static_cast<std::size_t>(link.from)];
      for (int n = 0; n < net.horizon; ++n) {
        const bool causal = d_from != std::numeric_limits<int>::max() && n >= d_from;
        if (!causal || !useful_arrival(link.to, n)) t_at(l, k, n) = 0;
      }
    }
  }
  return pins;
}

void append_caching_rows(const CachingNetwork& net, const CachingLpLayout& lay,
                         LinearProgram& lp) {
  const auto in = net.in_links();

  // (a) request satisfaction within the delivery deadline
  for (const CacheRequest& r : net.requests) {
    std::vector<std::pair<int, double>> row;
    row.push_back({lay.var_s(r.node, r.object, r.slot), -1.0});
    for (int l : in[static_cast<std::size_t>(r.node)])
      for (int j = 0; j <= r.deadline; ++j) {
        const int slot = r.slot + j;
        if (slot >= net.horizon) break;  // arrivals beyond the window are disallowed
        row.push_back({lay.var_t(l, r.object, slot), -1.0});
      }
    lp.add_le_row(std::move(row), -1.0);
  }

  // (b) cache continuity
  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 1; n < net.horizon; ++n) {
        std::vector<std::pair<int, double>> row;
        row.push_back({lay.var_s(u, k, n), 1.0});
        row.push_back({lay.var_s(u, k, n - 1), -1.0});
        for (int l : in[static_cast<std::size_t>(u)]) row.push_back({lay.var_t(l, k, n - 1), -1.0});
        lp.add_le_row(std::move(row), 0.0);
      }

  // (c) transport provenance
  for (int l = 0; l < lay.num_links; ++l) {
    const int v = net.links[static_cast<std::size_t>(l)].from;
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 1; n < net.horizon; ++n) {
        std::vector<std::pair<int, double>> row;
        row.push_back({lay.var_t(l, k, n), 1.0});
        row.push_back({lay.var_s(v, k, n - 1), -1.0});
        for (int lw : in[static_cast<std::size_t>(v)]) row.push_back({lay.var_t(lw, k, n - 1), -1.0});
        lp.add_le_row(std::move(row), 0.0);
      }
  }

  // (e) storage caps
  for (int u = 0; u < net.num_nodes; ++u)
    for (int n = 0; n < net.horizon; ++n) {
      std::vector<std::pair<int, double>> row;
      for (int k = 0; k < net.num_objects; ++k) row.push_back({lay.var_s(u, k, n), 1.0});
      lp.add_le_row(std::move(row), static_cast<double>(net.storage_cap[static_cast<std::size_t>(u)]));
    }

  // (f) transport caps
  for (int l = 0; l < lay.num_links; ++l)
    for (int n = 0; n < net.horizon; ++n) {
      std::vector<std::pair<int, double>> row;
      for (int k = 0; k < net.num_objects; ++k) row.push_back({lay.var_t(l, k, n), 1.0});
      lp.add_le_row(std::move(row),
                    static_cast<double>(net.links[static_cast<std::size_t>(l)].capacity));
    }
}

void set_caching_objective(const CachingNetwork& net, const CachingLpLayout& lay,
                           LinearProgram& lp, bool ignore_storage_cost) {
  if (!ignore_storage_cost)
    for (int u = 0; u < net.num_nodes; ++u)
      for (int k = 0; k < net.num_objects; ++k) {
        const double unit = net.storage_cost(u, k);
        for (int n = 0; n < net.horizon; ++n) lp.set_objective(lay.var_s(u, k, n), unit);
      }
  for (int l = 0; l < lay.num_links; ++l)
    for (int k = 0; k < net.num_objects; ++k) {
      const double unit =
          net.links[static_cast<std::size_t>(l)].cost_per_object[static_cast<std::size_t>(k)];
      for (int n = 0; n < net.horizon; ++n) lp.set_objective(lay.var_t(l, k, n), unit);
    }
}

}  // namespace

std::pair<LinearProgram, CachingLpLayout> build_caching_lp(const CachingNetwork& net, bool relax,
                                                           bool ignore_storage_cost) {
  (void)relax;  // both forms share the [0,1] box; integrality is semantic
  net.validate();
  CachingLpLayout lay{net.num_nodes, net.num_objects, net.horizon,
                      static_cast<int>(net.links.size())};
  LinearProgram lp(lay.num_vars());

  for (int idx = 0; idx < lay.num_vars(); ++idx) lp.set_bounds(idx, 0.0, 1.0);
  // (d) repository pinning and the empty window origin
  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k) {
      if (net.is_repo(u, k)) {
        for (int n = 0; n < net.horizon; ++n) lp.set_bounds(lay.var_s(u, k, n), 1.0, 1.0);
      } else {
        lp.set_bounds(lay.var_s(u, k, 0), 0.0, 0.0);
      }
    }
  // transports at the first slot can only leave repositories
  for (int l = 0; l < lay.num_links; ++l) {
    const int v = net.links[static_cast<std::size_t>(l)].from;
    for (int k = 0; k < net.num_objects; ++k)
      if (!net.is_repo(v, k)) lp.set_bounds(lay.var_t(l, k, 0), 0.0, 0.0);
  }

  set_caching_objective(net, lay, lp, ignore_storage_cost);
  append_caching_rows(net, lay, lp);

  // A request whose row has no possible support is structurally unsatisfiable.
  for (std::size_t ri = 0; ri < net.requests.size(); ++ri) {
    const CacheRequest& r = net.requests[ri];
    if (net.is_repo(r.node, r.object)) continue;
    const auto dist = repo_distance(net, r.object);
    const int d = dist[static_cast<std::size_t>(r.node)];
    const int latest = std::min(r.slot + r.deadline, net.horizon - 1);
    if (d == std::numeric_limits<int>::max() || d - 1 > latest)
      throw InfeasibleError("caching: request " + std::to_string(ri) +
                            " is unsatisfiable by construction (object cannot reach node " +
                            std::to_string(r.node) + " by slot " + std::to_string(latest) + ")");
  }
  return {std::move(lp), lay};
}

CachingSolution solve_caching(const CachingNetwork& net, bool relax, bool ignore_storage_cost) {
  net.validate();
  CachingLpLayout lay{net.num_nodes, net.num_objects, net.horizon,
                      static_cast<int>(net.links.size())};

  // Reduced but equivalent program: pinned variables substituted, rows that
  // can never bind dropped. The reduction is what keeps the windowed
  // instances tractable for the dense simplex.
  const Pins pins = compute_pins(net);
  auto pin_s = [&](int u, int k, int n) {
    return pins.s[static_cast<std::size_t>((u * net.num_objects + k) * net.horizon + n)];
  };
  auto pin_t = [&](int l, int k, int n) {
    return pins.t[static_cast<std::size_t>((l * net.num_objects + k) * net.horizon + n)];
  };

  std::vector<int> to_reduced(static_cast<std::size_t>(lay.num_vars()), -1);
  int reduced_vars = 0;
  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 0; n < net.horizon; ++n)
        if (pin_s(u, k, n) < 0) to_reduced[static_cast<std::size_t>(lay.var_s(u, k, n))] = reduced_vars++;
  for (int l = 0; l < lay.num_links; ++l)
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 0; n < net.horizon; ++n)
        if (pin_t(l, k, n) < 0) to_reduced[static_cast<std::size_t>(lay.var_t(l, k, n))] = reduced_vars++;

  auto pinned_value = [&](int var) -> double {
    // only called for pinned variables
    const int per_node = net.num_objects * net.horizon;
    if (var < net.num_nodes * per_node) {
      return static_cast<double>(pins.s[static_cast<std::size_t>(var)]);
    }
    return static_cast<double>(pins.t[static_cast<std::size_t>(var - net.num_nodes * per_node)]);
  };

  LinearProgram full_lp(0);
  CachingLpLayout full_lay;
  std::tie(full_lp, full_lay) = build_caching_lp(net, relax, ignore_storage_cost);

  LinearProgram reduced(reduced_vars);
  for (int var = 0; var < lay.num_vars(); ++var) {
    const int rv = to_reduced[static_cast<std::size_t>(var)];
    if (rv < 0) continue;
    reduced.set_bounds(rv, 0.0, 1.0);
    reduced.set_objective(rv, full_lp.objective()[static_cast<std::size_t>(var)]);
  }
  double pinned_cost = 0.0;
  for (int var = 0; var < lay.num_vars(); ++var)
    if (to_reduced[static_cast<std::size_t>(var)] < 0)
      pinned_cost += full_lp.objective()[static_cast<std::size_t>(var)] * pinned_value(var);

  int dropped = 0;
  for (const LpRow& row : full_lp.rows()) {
    std::vector<std::pair<int, double>> entries;
    double rhs = row.rhs;
    double max_activity = 0.0;
    for (const auto& [var, coeff] : row.entries) {
      const int rv = to_reduced[static_cast<std::size_t>(var)];
      if (rv < 0) {
        rhs -= coeff * pinned_value(var);
      } else {
        entries.push_back({rv, coeff});
        if (coeff > 0.0) max_activity += coeff;  // bounds are [0,1]
      }
    }
    if (entries.empty()) {
      if (rhs < -1e-9) {
        throw InfeasibleError(
            "caching: request satisfaction (a) is infeasible after pinning; the object cannot "
            "reach the requester in time");
      }
      ++dropped;
      continue;
    }
    if (max_activity <= rhs + 1e-12) {
      ++dropped;
      continue;
    }
    reduced.add_le_row(std::move(entries), rhs);
  }
  (void)dropped;

  LpSolution sol = solve_lp(reduced);
  if (sol.status == LpStatus::infeasible) {
    // identify the family: requests are the only rows with positive demand
    for (std::size_t ri = 0; ri < net.requests.size(); ++ri) {
      const CacheRequest& r = net.requests[ri];
      const auto dist = repo_distance(net, r.object);
      const int latest = std::min(r.slot + r.deadline, net.horizon - 1);
      if (!net.is_repo(r.node, r.object) &&
          dist[static_cast<std::size_t>(r.node)] - 1 > latest)
        throw InfeasibleError("caching: constraint family (a) violated for request " +
                              std::to_string(ri));
    }
    throw InfeasibleError(
        "caching: program infeasible; storage or transport caps (e)/(f) conflict with the "
        "delivery deadlines (a)");
  }
  if (sol.status == LpStatus::unbounded)
    throw NumericError("caching: relaxed program reported unbounded");

  CachingSolution out;
  out.schedule = CacheSchedule::zeros(net);
  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 0; n < net.horizon; ++n) {
        const int var = lay.var_s(u, k, n);
        const int rv = to_reduced[static_cast<std::size_t>(var)];
        out.schedule.s(u, k, n) = rv < 0 ? pinned_value(var) : sol.x[static_cast<std::size_t>(rv)];
      }
  for (int l = 0; l < lay.num_links; ++l)
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 0; n < net.horizon; ++n) {
        const int var = lay.var_t(l, k, n);
        const int rv = to_reduced[static_cast<std::size_t>(var)];
        out.schedule.t(l, k, n) = rv < 0 ? pinned_value(var) : sol.x[static_cast<std::size_t>(rv)];
      }

  if (!relax) {
    for (double v : out.schedule.storage)
      if (v > 1e-7 && v < 1.0 - 1e-7)
        throw NumericError(
            "caching: relaxed optimum is fractional; exact integer search is out of scope");
    for (double v : out.schedule.transport)
      if (v > 1e-7 && v < 1.0 - 1e-7)
        throw NumericError(
            "caching: relaxed optimum is fractional; exact integer search is out of scope");
  }

  out.cost = schedule_cost(net, out.schedule);
  out.objective = sol.objective + pinned_cost;
  return out;
}

namespace {

// Cheapest repo-to-target path under per-object link costs; ties broken by
// the lexicographically smallest vertex sequence.
struct PathResult {
  bool reachable = false;
  std::vector<int> link_seq;  // links from the repo towards the target
  double cost = 0.0;
};

PathResult cheapest_path(const CachingNetwork& net, int object, int target) {
  const int n = net.num_nodes;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(n), inf);
  std::vector<int> parent_link(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> path_cache(static_cast<std::size_t>(n));

  auto path_of = [&](int v) {
    std::vector<int> nodes;
    int cur = v;
    while (cur != -1) {
      nodes.push_back(cur);
      const int pl = parent_link[static_cast<std::size_t>(cur)];
      cur = pl < 0 ? -1 : net.links[static_cast<std::size_t>(pl)].from;
    }
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
  };

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (int u = 0; u < n; ++u)
    if (net.is_repo(u, object)) {
      dist[static_cast<std::size_t>(u)] = 0.0;
      heap.push({0.0, u});
    }
  auto out = net.out_links();
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(v)] + 1e-15) continue;
    for (int l : out[static_cast<std::size_t>(v)]) {
      const DirectedLink& link = net.links[static_cast<std::size_t>(l)];
      const double nd = d + link.cost_per_object[static_cast<std::size_t>(object)];
      const int to = link.to;
      bool better = nd < dist[static_cast<std::size_t>(to)] - 1e-15;
      if (!better && nd <= dist[static_cast<std::size_t>(to)] + 1e-15 &&
          parent_link[static_cast<std::size_t>(to)] >= 0) {
        // lexicographic tie-break on the full vertex sequence
        std::vector<int> cand = path_of(v);
        cand.push_back(to);
        std::vector<int> incumbent = path_of(to);
        better = cand < incumbent;
      }
      if (better) {
        dist[static_cast<std::size_t>(to)] = std::min(nd, dist[static_cast<std::size_t>(to)]);
        parent_link[static_cast<std::size_t>(to)] = l;
        heap.push({nd, to});
      }
    }
  }

  PathResult res;
  if (dist[static_cast<std::size_t>(target)] == inf && !net.is_repo(target, object)) return res;
  res.reachable = true;
  res.cost = net.is_repo(target, object) ? 0.0 : dist[static_cast<std::size_t>(target)];
  int cur = target;
  while (parent_link[static_cast<std::size_t>(cur)] != -1) {
    const int l = parent_link[static_cast<std::size_t>(cur)];
    res.link_seq.push_back(l);
    cur = net.links[static_cast<std::size_t>(l)].from;
  }
  std::reverse(res.link_seq.begin(), res.link_seq.end());
  return res;
}

}  // namespace

ShortestPathResult shortest_path_baseline(const CachingNetwork& net) {
  net.validate();
  ShortestPathResult out;
  out.schedule = CacheSchedule::zeros(net);

  // per-(link, slot) and per-(node, slot) usage for the greedy cap checks
  std::vector<std::set<int>> link_load(net.links.size() * static_cast<std::size_t>(net.horizon));
  auto link_used = [&](int l, int n) -> std::set<int>& {
    return link_load[static_cast<std::size_t>(l) * static_cast<std::size_t>(net.horizon) +
                     static_cast<std::size_t>(n)];
  };
  std::vector<std::set<int>> node_load(static_cast<std::size_t>(net.num_nodes * net.horizon));
  auto node_used = [&](int u, int n) -> std::set<int>& {
    return node_load[static_cast<std::size_t>(u * net.horizon + n)];
  };

  std::vector<std::size_t> order(net.requests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const CacheRequest& ra = net.requests[a];
    const CacheRequest& rb = net.requests[b];
    return std::tie(ra.slot, ra.node, ra.object) < std::tie(rb.slot, rb.node, rb.object);
  });

  for (std::size_t idx : order) {
    const CacheRequest& r = net.requests[idx];
    if (net.is_repo(r.node, r.object)) continue;  // served in place

    PathResult path = cheapest_path(net, r.object, r.node);
    if (!path.reachable)
      throw InfeasibleError("shortest path baseline: object " + std::to_string(r.object) +
                            " cannot reach node " + std::to_string(r.node));

    const int latest = std::min(r.slot + r.deadline, net.horizon - 1);
    // schedule hops greedily, waiting (and caching) when a link is saturated
    std::vector<std::pair<int, int>> hops;  // (link, slot)
    std::vector<std::pair<int, int>> parked;  // (node, slot) cache entries
    bool ok = true;
    int slot = r.slot;
    for (std::size_t h = 0; h < path.link_seq.size(); ++h) {
      const int l = path.link_seq[h];
      const DirectedLink& link = net.links[static_cast<std::size_t>(l)];
      int depart = slot;
      while (depart <= latest) {
        auto& used = link_used(l, depart);
        if (static_cast<int>(used.size()) < link.capacity || used.count(r.object)) break;
        ++depart;
      }
      if (depart > latest) {
        ok = false;
        break;
      }
      // waiting at the hop's source requires caching there, except at the
      // repository which holds the object permanently
      for (int wait = slot; h > 0 && wait < depart; ++wait) {
        auto& cache = node_used(link.from, wait);
        if (!cache.count(r.object) &&
            static_cast<int>(cache.size()) >=
                net.storage_cap[static_cast<std::size_t>(link.from)]) {
          ok = false;
          break;
        }
        parked.push_back({link.from, wait});
      }
      if (!ok) break;
      hops.push_back({l, depart});
      slot = depart + 1;
    }
    if (ok && !hops.empty() && hops.back().second < r.slot) ok = false;
    if (ok && !hops.empty() && hops.back().second > latest) ok = false;
    if (!ok) {
      out.failed_requests.push_back(static_cast<int>(idx));
      continue;
    }
    for (const auto& [l, n] : hops) {
      out.schedule.t(l, r.object, n) = 1.0;
      link_used(l, n).insert(r.object);
    }
    for (const auto& [u, n] : parked) {
      out.schedule.s(u, r.object, n) = 1.0;
      node_used(u, n).insert(r.object);
    }
  }

  // repositories always hold their objects
  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k)
      if (net.is_repo(u, k))
        for (int n = 0; n < net.horizon; ++n) out.schedule.s(u, k, n) = 1.0;

  out.cost = schedule_cost(net, out.schedule);
  return out;
}

std::vector<std::string> validate_schedule(const CachingNetwork& net,
                                           const CacheSchedule& schedule, bool binary,
                                           double tol) {
  std::vector<std::string> violations;
  auto complain = [&](const std::string& what) {
    if (violations.size() < 32) violations.push_back(what);
  };

  const auto in = net.in_links();
  auto arrivals = [&](int u, int k, int n) {
    double acc = 0.0;
    for (int l : in[static_cast<std::size_t>(u)]) acc += schedule.t(l, k, n);
    return acc;
  };

  for (double v : schedule.storage)
    if (v < -tol || v > 1.0 + tol) complain("(g) storage entry outside [0,1]");
  for (double v : schedule.transport)
    if (v < -tol || v > 1.0 + tol) complain("(g) transport entry outside [0,1]");
  if (binary) {
    for (double v : schedule.storage)
      if (v > tol && v < 1.0 - tol) complain("(g) storage entry not binary");
    for (double v : schedule.transport)
      if (v > tol && v < 1.0 - tol) complain("(g) transport entry not binary");
  }

  for (std::size_t ri = 0; ri < net.requests.size(); ++ri) {
    const CacheRequest& r = net.requests[ri];
    double support = schedule.s(r.node, r.object, r.slot);
    for (int j = 0; j <= r.deadline && r.slot + j < net.horizon; ++j)
      support += arrivals(r.node, r.object, r.slot + j);
    if (support < 1.0 - tol)
      complain("(a) request " + std::to_string(ri) + " unserved (support " +
               std::to_string(support) + ")");
  }

  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 1; n < net.horizon; ++n)
        if (schedule.s(u, k, n) >
            schedule.s(u, k, n - 1) + arrivals(u, k, n - 1) + tol)
          complain("(b) cache continuity violated at node " + std::to_string(u));

  for (int l = 0; l < schedule.num_links; ++l) {
    const int v = net.links[static_cast<std::size_t>(l)].from;
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 1; n < net.horizon; ++n)
        if (schedule.t(l, k, n) > schedule.s(v, k, n - 1) + arrivals(v, k, n - 1) + tol)
          complain("(c) transport provenance violated on link " + std::to_string(l));
  }

  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k) {
      if (net.is_repo(u, k)) {
        for (int n = 0; n < net.horizon; ++n)
          if (std::fabs(schedule.s(u, k, n) - 1.0) > tol)
            complain("(d) repository pinning violated at node " + std::to_string(u));
      } else if (std::fabs(schedule.s(u, k, 0)) > tol) {
        complain("(d) non-repository cache not empty at the window origin");
      }
    }

  // transports at the first slot must originate at repositories
  for (int l = 0; l < schedule.num_links; ++l) {
    const int v = net.links[static_cast<std::size_t>(l)].from;
    for (int k = 0; k < net.num_objects; ++k)
      if (!net.is_repo(v, k) && schedule.t(l, k, 0) > tol)
        complain("(c) first-slot transport from a non-repository node");
  }

  for (int u = 0; u < net.num_nodes; ++u)
    for (int n = 0; n < net.horizon; ++n) {
      double load = 0.0;
      for (int k = 0; k < net.num_objects; ++k) load += schedule.s(u, k, n);
      if (load > net.storage_cap[static_cast<std::size_t>(u)] + tol)
        complain("(e) storage cap exceeded at node " + std::to_string(u));
    }
  for (int l = 0; l < schedule.num_links; ++l)
    for (int n = 0; n < net.horizon; ++n) {
      double load = 0.0;
      for (int k = 0; k < net.num_objects; ++k) load += schedule.t(l, k, n);
      if (load > net.links[static_cast<std::size_t>(l)].capacity + tol)
        complain("(f) transport cap exceeded on link " + std::to_string(l));
    }

  return violations;
}

}  // namespace edgecloud
