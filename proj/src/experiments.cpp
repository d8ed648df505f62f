#include "edgecloud/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "edgecloud/caching.hpp"
#include "edgecloud/errors.hpp"
#include "edgecloud/graph.hpp"
#include "edgecloud/offloading.hpp"
#include "edgecloud/reliability.hpp"
#include "edgecloud/rem.hpp"
#include "edgecloud/rng.hpp"

#include <nlohmann/json.hpp>

namespace edgecloud {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

SweepOverride parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size())
    throw SchemaError("sweep: expected name=v1,v2,...");
  SweepOverride sweep;
  sweep.name = text.substr(0, eq);
  std::stringstream rest(text.substr(eq + 1));
  std::string token;
  while (std::getline(rest, token, ',')) {
    try {
      sweep.values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw SchemaError("sweep: bad numeric value '" + token + "'");
    }
  }
  if (sweep.values.empty()) throw SchemaError("sweep: no values given");
  return sweep;
}

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic parallel map: results land by index regardless of schedule.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::min(resolve_threads(threads), std::max(count, 1));
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

nlohmann::json parse_scenario(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("scenario: ") + e.what());
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = seed ^ (a * 0x9e3779b97f4a7c15ull) ^ (b * 0xc2b2ae3d27d4eb4full);
  return splitmix64(s);
}

// ---------------------------------------------------------------------------
// offload

struct OffloadGenerator {
  int users = 4;
  double bits_lo = 2e5, bits_hi = 8e5;
  double cycles_lo = 3e7, cycles_hi = 9e7;
  double dist_lo = 60.0, dist_hi = 220.0;
  double pathloss_exp = 3.0;
  double noise_var = 1e-9;
  double pcap = 0.2;
  int replications = 1;
};

OffloadScenario draw_offload_instance(const OffloadGenerator& gen, double bandwidth,
                                      const Vector& capacities, const Matrix& backhaul,
                                      double deadline, Rng& rng) {
  OffloadScenario s;
  for (int k = 0; k < gen.users; ++k) {
    OffloadTask t;
    t.bits = rng.uniform(gen.bits_lo, gen.bits_hi);
    t.cycles = rng.uniform(gen.cycles_lo, gen.cycles_hi);
    t.deadline = deadline;
    t.power_cap = gen.pcap;
    s.tasks.push_back(t);
  }
  const int n_aps = static_cast<int>(backhaul.rows());
  s.channel.bandwidth = bandwidth;
  s.channel.alpha = Matrix(static_cast<std::size_t>(gen.users), static_cast<std::size_t>(n_aps));
  for (int k = 0; k < gen.users; ++k)
    for (int n = 0; n < n_aps; ++n) {
      const double h2 = rng.exponential(1.0);
      const double dist = rng.uniform(gen.dist_lo, gen.dist_hi);
      s.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) =
          channel_gain(std::sqrt(h2), 0.0, dist, gen.pathloss_exp, gen.noise_var);
    }
  s.topology.num_aps = n_aps;
  s.topology.num_mecs = static_cast<int>(capacities.size());
  s.topology.mec_capacity = capacities;
  s.topology.backhaul_latency = backhaul;
  return s;
}

}  // namespace

RunResult run_offload_sweep(const std::string& scenario_json, std::uint64_t seed,
                            const std::optional<SweepOverride>& sweep, int threads) {
  nlohmann::json j = parse_scenario(scenario_json);

  std::vector<double> deadlines;
  if (sweep) {
    if (sweep->name != "L") throw SchemaError("offload: only the deadline L is sweepable");
    deadlines = sweep->values;
  } else if (j.contains("L_values")) {
    for (const auto& v : j.at("L_values")) deadlines.push_back(v.get<double>());
  } else {
    throw SchemaError("offload: scenario needs L_values or a --sweep L=... override");
  }

  const bool fixed_instance = j.contains("users");
  OffloadScenario base;
  OffloadGenerator gen;
  double bandwidth = 0.0;
  Vector capacities;
  Matrix backhaul;
  double p_exp = 0.025;
  if (j.contains("p_exp")) p_exp = j.at("p_exp").get<double>();

  if (fixed_instance) {
    base = OffloadScenario::from_json(scenario_json);
  } else {
    try {
      gen.users = j.at("K").get<int>();
      bandwidth = j.at("B").get<double>();
      for (const auto& f : j.at("F")) capacities.push_back(f.get<double>());
      const auto& tb = j.at("T_B");
      const int n_aps = static_cast<int>(tb.size());
      backhaul = Matrix(static_cast<std::size_t>(n_aps), capacities.size());
      for (int n = 0; n < n_aps; ++n)
        for (std::size_t m = 0; m < capacities.size(); ++m)
          backhaul(static_cast<std::size_t>(n), m) = tb.at(static_cast<std::size_t>(n)).at(m).get<double>();
      gen.pcap = j.value("Pcap", 0.2);
      gen.replications = j.value("replications", 1);
      if (j.contains("bits_range")) {
        gen.bits_lo = j.at("bits_range").at(0).get<double>();
        gen.bits_hi = j.at("bits_range").at(1).get<double>();
      }
      if (j.contains("cycles_range")) {
        gen.cycles_lo = j.at("cycles_range").at(0).get<double>();
        gen.cycles_hi = j.at("cycles_range").at(1).get<double>();
      }
      if (j.contains("dist_range")) {
        gen.dist_lo = j.at("dist_range").at(0).get<double>();
        gen.dist_hi = j.at("dist_range").at(1).get<double>();
      }
      gen.pathloss_exp = j.value("pathloss_exp", 3.0);
      gen.noise_var = j.value("noise_var", 1e-9);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("offload scenario: ") + e.what());
    }
  }

  struct Row {
    double deadline = 0.0;
    double psca = 0.0, exhaustive = 0.0, snr_joint = 0.0, snr_disjoint = 0.0;
    int infeasible = 0;
  };
  std::vector<Row> rows(deadlines.size());

  PscaOptions psca_opt;
  psca_opt.p_exp = p_exp;

  parallel_for(static_cast<int>(deadlines.size()), threads, [&](int di) {
    const double deadline = deadlines[static_cast<std::size_t>(di)];
    Row row;
    row.deadline = deadline;
    double psca_sum = 0, exh_sum = 0, joint_sum = 0, disjoint_sum = 0;
    int counted = 0;
    const int reps = fixed_instance ? 1 : gen.replications;
    for (int rep = 0; rep < reps; ++rep) {
      OffloadScenario s;
      if (fixed_instance) {
        s = base;
        for (auto& t : s.tasks) t.deadline = deadline;
      } else {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(di) + 1,
                         static_cast<std::uint64_t>(rep) + 1));
        s = draw_offload_instance(gen, bandwidth, capacities, backhaul, deadline, rng);
      }
      try {
        const double exh = exhaustive_baseline(s).total_power();
        const double psca = solve_multi_mec_psca(s, psca_opt).total_power();
        const double joint = snr_association_baseline(s, true).total_power();
        const double disjoint = snr_association_baseline(s, false).total_power();
        psca_sum += psca;
        exh_sum += exh;
        joint_sum += joint;
        disjoint_sum += disjoint;
        ++counted;
      } catch (const InfeasibleError&) {
        ++row.infeasible;
      }
    }
    if (counted > 0) {
      row.psca = psca_sum / counted;
      row.exhaustive = exh_sum / counted;
      row.snr_joint = joint_sum / counted;
      row.snr_disjoint = disjoint_sum / counted;
    }
    rows[static_cast<std::size_t>(di)] = row;
  });

  std::string csv = "L,psca_power,exhaustive_power,snr_joint_power,snr_disjoint_power,infeasible_count\n";
  for (const Row& row : rows) {
    csv += format_double(row.deadline) + ',' + format_double(row.psca) + ',' +
           format_double(row.exhaustive) + ',' + format_double(row.snr_joint) + ',' +
           format_double(row.snr_disjoint) + ',' + std::to_string(row.infeasible) + '\n';
  }
  return {std::move(csv), ""};
}

// ---------------------------------------------------------------------------
// cache

namespace {

std::vector<CacheRequest> draw_requests(const CachingNetwork& net, double rate, int deadline,
                                        int filter_deadline, Rng& rng) {
  // per-object hop distances from the repositories
  std::vector<std::vector<int>> dist(static_cast<std::size_t>(net.num_objects));
  auto out_links = net.out_links();
  for (int k = 0; k < net.num_objects; ++k) {
    auto& d = dist[static_cast<std::size_t>(k)];
    d.assign(static_cast<std::size_t>(net.num_nodes), std::numeric_limits<int>::max());
    std::vector<int> frontier;
    for (int u = 0; u < net.num_nodes; ++u)
      if (net.is_repo(u, k)) {
        d[static_cast<std::size_t>(u)] = 0;
        frontier.push_back(u);
      }
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const int v = frontier[head];
      for (int l : out_links[static_cast<std::size_t>(v)]) {
        const int to = net.links[static_cast<std::size_t>(l)].to;
        if (d[static_cast<std::size_t>(to)] == std::numeric_limits<int>::max()) {
          d[static_cast<std::size_t>(to)] = d[static_cast<std::size_t>(v)] + 1;
          frontier.push_back(to);
        }
      }
    }
  }

  std::vector<CacheRequest> requests;
  for (int u = 0; u < net.num_nodes; ++u)
    for (int k = 0; k < net.num_objects; ++k)
      for (int n = 0; n < net.horizon; ++n) {
        if (net.is_repo(u, k)) continue;
        if (!rng.bernoulli(rate)) continue;
        const int d = dist[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)];
        // keep only requests the reactive baseline could serve too: the first
        // hop leaves no earlier than the request slot
        if (d == std::numeric_limits<int>::max()) continue;
        if (d - 1 > filter_deadline) continue;
        if (n + d - 1 > net.horizon - 1) continue;
        requests.push_back({u, k, n, deadline});
      }
  return requests;
}

}  // namespace

RunResult run_cache_sweep(const std::string& scenario_json, std::uint64_t seed,
                          const std::optional<SweepOverride>& sweep, int threads) {
  nlohmann::json j = parse_scenario(scenario_json);
  CachingNetwork base = CachingNetwork::from_json(scenario_json);

  std::vector<double> rates;
  std::vector<int> deadlines;
  int replications = 1;
  bool ignore_storage = true;
  if (j.contains("experiment")) {
    const auto& exp = j.at("experiment");
    for (const auto& r : exp.value("arrival_rates", nlohmann::json::array()))
      rates.push_back(r.get<double>());
    for (const auto& d : exp.value("D_values", nlohmann::json::array()))
      deadlines.push_back(d.get<int>());
    replications = exp.value("replications", 1);
    ignore_storage = exp.value("ignore_storage_cost", true);
  }
  if (sweep) {
    if (sweep->name == "rate") {
      rates = sweep->values;
    } else if (sweep->name == "D") {
      deadlines.clear();
      for (double v : sweep->values) deadlines.push_back(static_cast<int>(v));
    } else {
      throw SchemaError("cache: sweepable parameters are rate and D");
    }
  }
  if (rates.empty() || deadlines.empty())
    throw SchemaError("cache: scenario needs experiment.arrival_rates and experiment.D_values");

  struct Row {
    double rate = 0.0;
    int deadline = 0;
    double lp_mean = 0.0, sp_mean = 0.0;
    int sp_failures = 0;
  };
  const int total = static_cast<int>(rates.size() * deadlines.size());
  std::vector<Row> rows(static_cast<std::size_t>(total));

  parallel_for(total, threads, [&](int cell) {
    const int ri = cell / static_cast<int>(deadlines.size());
    const int di = cell % static_cast<int>(deadlines.size());
    Row row;
    row.rate = rates[static_cast<std::size_t>(ri)];
    row.deadline = deadlines[static_cast<std::size_t>(di)];
    const int filter_deadline = *std::min_element(deadlines.begin(), deadlines.end());
    for (int rep = 0; rep < replications; ++rep) {
      CachingNetwork net = base;
      // paired draws across D: the request stream depends on (rate, rep) only,
      // and the serviceability filter uses the smallest swept deadline so the
      // request sets coincide across the D sweep
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(ri) + 1,
                       static_cast<std::uint64_t>(rep) + 1));
      net.requests = draw_requests(net, row.rate, row.deadline, filter_deadline, rng);
      if (net.requests.empty()) continue;
      auto lp = solve_caching(net, true, ignore_storage);
      auto sp = shortest_path_baseline(net);
      row.lp_mean += ignore_storage ? lp.objective : lp.cost.total;
      row.sp_mean += ignore_storage ? sp.cost.transport : sp.cost.total;
      row.sp_failures += static_cast<int>(sp.failed_requests.size());
    }
    row.lp_mean /= replications;
    row.sp_mean /= replications;
    rows[static_cast<std::size_t>(cell)] = row;
  });

  std::string csv = "arrival_rate,D,lp_cost_mean,sp_cost_mean,sp_failures\n";
  for (const Row& row : rows)
    csv += format_double(row.rate) + ',' + std::to_string(row.deadline) + ',' +
           format_double(row.lp_mean) + ',' + format_double(row.sp_mean) + ',' +
           std::to_string(row.sp_failures) + '\n';
  return {std::move(csv), ""};
}

// ---------------------------------------------------------------------------
// rem

RunResult run_rem(const std::string& scenario_json, std::uint64_t seed,
                  const std::optional<SweepOverride>& sweep, int threads) {
  (void)threads;
  if (sweep) throw SchemaError("rem: no sweepable parameters");
  nlohmann::json j = parse_scenario(scenario_json);

  std::vector<FieldGrid> grids;
  double sigma = 1.0, r0 = 1.0;
  int bandwidth = 4;
  int num_samples = 0;
  double noise_std = 0.0;
  std::vector<int> mask_indices;

  try {
    sigma = j.value("sigma", 1.0);
    bandwidth = j.value("K", 4);
    noise_std = j.value("noise_std", 0.0);
    if (j.contains("positions")) {
      FieldGrid proto;
      for (const auto& p : j.at("positions"))
        proto.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      const auto& fields = j.at("fields");
      for (const auto& [key, values] : fields.items()) {
        (void)key;
        FieldGrid g = proto;
        for (const auto& v : values) g.field.push_back(v.get<double>());
        grids.push_back(std::move(g));
      }
      r0 = j.at("R0").get<double>();
      if (j.contains("mask"))
        for (const auto& idx : j.at("mask")) mask_indices.push_back(idx.get<int>());
      num_samples = j.value("num_samples", 0);
    } else {
      const int n = j.value("N", 100);
      const int m = j.value("M", 4);
      const double extent = j.value("extent", 100.0);
      auto scene = generate_synthetic_rem(n, m, extent, mix_seed(seed, 1));
      grids = std::move(scene.per_ap_grids);
      const double spacing = extent / std::ceil(std::sqrt(static_cast<double>(n)));
      r0 = j.value("R0", j.value("R0_factor", 2.5) * spacing * spacing);
      num_samples = j.value("num_samples", n / 3);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("rem scenario: ") + e.what());
  }
  if (grids.empty()) throw SchemaError("rem scenario: no per-AP fields");

  REMDictionary dict = build_dictionary(grids, sigma, r0, bandwidth);
  const int n = dict.num_vertices;

  // band-limited ground truth from seeded coefficients
  Rng rng(mix_seed(seed, 2));
  Vector s0(static_cast<std::size_t>(dict.total_columns()));
  for (auto& v : s0) v = rng.normal();
  Vector x_true = multiply(dict.stacked, s0);

  SamplingMask mask;
  if (!mask_indices.empty()) {
    mask = SamplingMask::from_indices(mask_indices, n);
  } else {
    if (num_samples < 1 || num_samples > n)
      throw SchemaError("rem scenario: num_samples outside [1, N]");
    // deterministic shuffles until the rank condition holds (or give up)
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    for (int attempt = 0; attempt < 200; ++attempt) {
      std::vector<int> idx = all;
      for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
      idx.resize(static_cast<std::size_t>(num_samples));
      mask = SamplingMask::from_indices(idx, n);
      if (check_sampling(mask, dict).recoverable) break;
    }
  }

  auto rank = check_sampling(mask, dict);
  Vector y = sample_field(x_true, mask, noise_std, mix_seed(seed, 3));
  auto rec = recover_bp(y, mask, dict, noise_std);
  const double error = nmse(rec.reconstruction, x_true);

  std::string csv = "vertex,x_true,x_hat\n";
  for (int i = 0; i < n; ++i)
    csv += std::to_string(i) + ',' + format_double(x_true[static_cast<std::size_t>(i)]) + ',' +
           format_double(rec.reconstruction[static_cast<std::size_t>(i)]) + '\n';
  std::string summary = "NMSE " + format_double(error) + " samples " +
                        std::to_string(mask.size()) + " columns " +
                        std::to_string(dict.total_columns()) + " rank " +
                        std::to_string(rank.rank) + " recoverable " +
                        (rank.recoverable ? "1" : "0");
  return {std::move(csv), std::move(summary)};
}

// ---------------------------------------------------------------------------
// reliability + centrality

namespace {

Graph graph_from_spec(const nlohmann::json& j, std::vector<int>* labels_out) {
  if (j.contains("two_cluster")) {
    const auto& tc = j.at("two_cluster");
    const int size_a = tc.at("sizes").at(0).get<int>();
    const int size_b = tc.at("sizes").at(1).get<int>();
    Graph g = generate_two_cluster_graph(size_a, size_b, tc.at("p_in").get<double>(),
                                         tc.at("bridges").get<int>(),
                                         tc.at("seed").get<std::uint64_t>());
    if (labels_out) {
      labels_out->assign(static_cast<std::size_t>(g.num_vertices()), 0);
      for (int v = size_a; v < g.num_vertices(); ++v) (*labels_out)[static_cast<std::size_t>(v)] = 1;
    }
    return g;
  }
  return Graph::from_json(j.dump());
}

}  // namespace

RunResult run_reliability_sweep(const std::string& scenario_json, std::uint64_t seed,
                                const std::optional<SweepOverride>& sweep, int threads) {
  (void)seed;
  nlohmann::json j = parse_scenario(scenario_json);
  Graph graph = graph_from_spec(j.at("graph"), nullptr);

  FadingLinkModel link;
  link.fading = j.value("lambda", 1.0);
  link.rate = j.value("R", 1.0);
  link.noise_var = j.value("sigma_n2", 1.0);
  link.distance = j.value("r_m", 1.0);

  Vector distances;
  if (j.contains("r_m_per_edge"))
    for (const auto& r : j.at("r_m_per_edge")) distances.push_back(r.get<double>());

  std::vector<int> orders;
  for (const auto& n : j.value("n_values", nlohmann::json::array({1, 4})))
    orders.push_back(n.get<int>());

  std::vector<double> budgets;
  if (sweep) {
    if (sweep->name != "budget") throw SchemaError("reliability: only budget is sweepable");
    budgets = sweep->values;
  } else {
    for (const auto& b : j.at("budgets")) budgets.push_back(b.get<double>());
  }

  struct Row {
    double budget = 0.0;
    int order = 1;
    double optimized = std::numeric_limits<double>::quiet_NaN();
    double uniform = std::numeric_limits<double>::quiet_NaN();
  };
  const int total = static_cast<int>(budgets.size() * orders.size());
  std::vector<Row> rows(static_cast<std::size_t>(total));

  parallel_for(total, threads, [&](int cell) {
    const int bi = cell / static_cast<int>(orders.size());
    const int oi = cell % static_cast<int>(orders.size());
    Row row;
    row.budget = budgets[static_cast<std::size_t>(bi)];
    row.order = orders[static_cast<std::size_t>(oi)];
    FadingLinkModel per = link;
    per.diversity = row.order;
    per.power_budget = row.budget;
    const double c_max = row.budget / (per.noise_var * (std::exp2(per.rate) - 1.0));
    try {
      row.optimized = solve_robust_allocation(graph, per, c_max, distances)
                          .normalized_perturbation;
      row.uniform = uniform_power_baseline(graph, per, c_max, distances)
                        .normalized_perturbation;
    } catch (const InfeasibleError&) {
      // flagged by the nan pair; the sweep continues
    }
    rows[static_cast<std::size_t>(cell)] = row;
  });

  std::string csv = "budget,optimized_norm_perturbation,uniform_norm_perturbation,n\n";
  for (const Row& row : rows)
    csv += format_double(row.budget) + ',' + format_double(row.optimized) + ',' +
           format_double(row.uniform) + ',' + std::to_string(row.order) + '\n';
  return {std::move(csv), ""};
}

RunResult run_centrality(const std::string& scenario_json, std::uint64_t seed,
                         const std::optional<SweepOverride>& sweep, int threads) {
  (void)seed;
  (void)threads;
  if (sweep) throw SchemaError("centrality: no sweepable parameters");
  nlohmann::json j = parse_scenario(scenario_json);

  std::vector<int> labels;
  Graph graph = graph_from_spec(j.at("graph"), &labels);
  if (j.contains("labels")) {
    labels.clear();
    for (const auto& l : j.at("labels")) labels.push_back(l.get<int>());
    if (static_cast<int>(labels.size()) != graph.num_vertices())
      throw SchemaError("centrality: label list size mismatch");
  }
  const int cluster_count = j.value("K", 2);

  auto spectrum = eigendecompose(build_laplacian(graph));
  struct Scored {
    Edge edge;
    double score;
  };
  std::vector<Scored> scored;
  for (const Edge& e : graph.edges())
    scored.push_back({e, perturbation_centrality(spectrum, {e.i, e.j, e.w, false}, cluster_count)});
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::make_pair(a.edge.i, a.edge.j) < std::make_pair(b.edge.i, b.edge.j);
  });

  const bool flag_bridges = !labels.empty();
  std::string csv = flag_bridges ? "i,j,p_K,is_bridge\n" : "i,j,p_K\n";
  for (const Scored& s : scored) {
    csv += std::to_string(s.edge.i) + ',' + std::to_string(s.edge.j) + ',' +
           format_double(s.score);
    if (flag_bridges) {
      const bool bridge = labels[static_cast<std::size_t>(s.edge.i)] !=
                          labels[static_cast<std::size_t>(s.edge.j)];
      csv += bridge ? ",1" : ",0";
    }
    csv += '\n';
  }
  return {std::move(csv), ""};
}

RunResult run_subcommand(const std::string& subcommand, const std::string& scenario_json,
                         std::uint64_t seed, const std::optional<SweepOverride>& sweep,
                         int threads) {
  if (subcommand == "offload") return run_offload_sweep(scenario_json, seed, sweep, threads);
  if (subcommand == "cache") return run_cache_sweep(scenario_json, seed, sweep, threads);
  if (subcommand == "rem") return run_rem(scenario_json, seed, sweep, threads);
  if (subcommand == "reliability") return run_reliability_sweep(scenario_json, seed, sweep, threads);
  if (subcommand == "centrality") return run_centrality(scenario_json, seed, sweep, threads);
  throw SchemaError("unknown subcommand '" + subcommand + "'");
}

}  // namespace edgecloud
