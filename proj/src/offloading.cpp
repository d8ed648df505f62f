#include "edgecloud/offloading.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <utility>

#include "edgecloud/errors.hpp"
#include "edgecloud/lp.hpp"
#include "edgecloud/projected_gradient.hpp"
#include "edgecloud/rng.hpp"

#include <nlohmann/json.hpp>

namespace edgecloud {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct EffUser {
  double c = 0.0;     // bits / bandwidth
  double w = 0.0;     // cycles
  double leff = 0.0;  // deadline minus fixed terms
  double alpha = 0.0;
  double pcap = 0.0;
  int id = 0;
};

struct CoreResult {
  Vector comp_rates;
  Vector powers;
  Vector eta;
  double total_power = 0.0;
};

double power_for_tau(const EffUser& u, double tau) {
  return (std::exp2(u.c / tau) - 1.0) / u.alpha;
}

// phi = -dP/df expressed through tau = leff - w/f; strictly decreasing in tau.
double phi_of_tau(const EffUser& u, double tau) {
  const double leff_minus = u.leff - tau;  // w / f
  return kLn2 * u.c * std::exp2(u.c / tau) * leff_minus * leff_minus / (u.alpha * tau * tau * u.w);
}

double rate_f_of_tau(const EffUser& u, double tau) { return u.w / (u.leff - tau); }

// Smallest feasible tau: transmit at the power cap.
double tau_min_of(const EffUser& u) {
  const double rmax = std::log2(1.0 + u.alpha * u.pcap);
  return u.c / rmax;
}

// f(mu) = max(f_min, phi^{-1}(mu)) via bisection on tau in [tau_min, leff).
double rate_for_price(const EffUser& u, double tau_min, double mu) {
  if (phi_of_tau(u, tau_min) <= mu) return rate_f_of_tau(u, tau_min);
  double lo = tau_min, hi = u.leff;
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi_of_tau(u, mid) > mu)
      lo = mid;
    else
      hi = mid;
  }
  return rate_f_of_tau(u, lo);
}

CoreResult solve_core(const std::vector<EffUser>& users, double server_capacity) {
  const int k_count = static_cast<int>(users.size());
  CoreResult out;
  out.comp_rates.assign(static_cast<std::size_t>(k_count), 0.0);
  out.powers.assign(static_cast<std::size_t>(k_count), 0.0);
  out.eta.assign(static_cast<std::size_t>(k_count), 0.0);
  if (k_count == 0) return out;
  if (server_capacity <= 0.0) throw SchemaError("single-server solve: non-positive capacity");

  std::vector<double> tau_min(users.size());
  double floor_sum = 0.0;
  double mu_hi = 0.0;
  int worst = -1;
  double worst_rate = -1.0;
  for (std::size_t k = 0; k < users.size(); ++k) {
    const EffUser& u = users[k];
    if (u.leff <= 0.0)
      throw InfeasibleError("offload: user " + std::to_string(u.id) +
                            " has no latency budget after fixed terms");
    const double tmin = tau_min_of(u);
    if (tmin >= u.leff)
      throw InfeasibleError("offload: user " + std::to_string(u.id) +
                            " cannot meet its deadline even at the power cap");
    tau_min[k] = tmin;
    const double fmin = rate_f_of_tau(u, tmin);
    if (fmin > server_capacity * (1.0 + 1e-12))
      throw InfeasibleError("offload: user " + std::to_string(u.id) +
                            " needs more cycles/s than the server capacity");
    floor_sum += fmin;
    mu_hi = std::max(mu_hi, phi_of_tau(u, tmin));
    if (fmin > worst_rate) {
      worst_rate = fmin;
      worst = u.id;
    }
  }
  if (floor_sum > server_capacity * (1.0 + 1e-12))
    throw InfeasibleError("offload: joint demand exceeds server capacity; most constrained user " +
                          std::to_string(worst));

  auto total_rate = [&](double mu) {
    double acc = 0.0;
    for (std::size_t k = 0; k < users.size(); ++k)
      acc += rate_for_price(users[k], tau_min[k], mu);
    return acc;
  };

  double mu_lo = mu_hi;
  while (total_rate(mu_lo) < server_capacity) {
    mu_lo *= 0.5;
    if (mu_lo < 1e-280) break;
  }
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (total_rate(mid) >= server_capacity)
      mu_lo = mid;
    else
      mu_hi = mid;
  }

  for (std::size_t k = 0; k < users.size(); ++k) {
    const EffUser& u = users[k];
    const double f = rate_for_price(u, tau_min[k], mu_hi);
    const double tau = u.leff - u.w / f;
    out.comp_rates[k] = f;
    out.powers[k] = power_for_tau(u, tau);
    out.eta[k] = kLn2 * u.c * std::exp2(u.c / tau) / (u.alpha * tau * tau);
    out.total_power += out.powers[k];
  }
  return out;
}

std::vector<EffUser> effective_users(const std::vector<OffloadTask>& tasks, double bandwidth,
                                     const std::vector<double>& alpha,
                                     const std::vector<double>& extra_latency) {
  std::vector<EffUser> users(tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    users[k].c = tasks[k].bits / bandwidth;
    users[k].w = tasks[k].cycles;
    users[k].leff = tasks[k].deadline - tasks[k].rx_latency_fixed - extra_latency[k];
    users[k].alpha = alpha[k];
    users[k].pcap = tasks[k].power_cap;
    users[k].id = static_cast<int>(k);
  }
  return users;
}

}  // namespace

double channel_gain(double h_re, double h_im, double distance, double pathloss_exp,
                    double noise_var) {
  if (distance <= 0.0 || noise_var <= 0.0) throw SchemaError("channel_gain: non-positive inputs");
  return (h_re * h_re + h_im * h_im) / (std::pow(distance, pathloss_exp) * noise_var);
}

double spectral_efficiency(double power, double alpha) {
  if (power < 0.0) throw SchemaError("spectral_efficiency: negative power");
  if (alpha <= 0.0) throw SchemaError("spectral_efficiency: non-positive channel gain");
  return std::log2(1.0 + alpha * power);
}

void OffloadScenario::validate() const {
  const int k_count = num_users();
  if (k_count == 0) throw SchemaError("offload scenario: no users");
  if (channel.bandwidth <= 0.0) throw SchemaError("offload scenario: bandwidth must be positive");
  if (topology.num_aps < 1 || topology.num_mecs < 1)
    throw SchemaError("offload scenario: need at least one AP and one server");
  if (static_cast<int>(channel.alpha.rows()) != k_count ||
      static_cast<int>(channel.alpha.cols()) != topology.num_aps)
    throw SchemaError("offload scenario: alpha must be num_users x num_aps");
  if (static_cast<int>(topology.mec_capacity.size()) != topology.num_mecs)
    throw SchemaError("offload scenario: capacity list size mismatch");
  if (static_cast<int>(topology.backhaul_latency.rows()) != topology.num_aps ||
      static_cast<int>(topology.backhaul_latency.cols()) != topology.num_mecs)
    throw SchemaError("offload scenario: backhaul matrix must be num_aps x num_mecs");
  for (int k = 0; k < k_count; ++k) {
    const OffloadTask& t = tasks[static_cast<std::size_t>(k)];
    if (t.bits <= 0.0 || t.cycles <= 0.0 || t.deadline <= 0.0 || t.power_cap <= 0.0)
      throw SchemaError("offload scenario: task fields must be positive (user " +
                        std::to_string(k) + ")");
    if (t.rx_latency_fixed < 0.0 || t.deadline - t.rx_latency_fixed <= 0.0)
      throw SchemaError("offload scenario: rx latency leaves no budget (user " +
                        std::to_string(k) + ")");
    for (int n = 0; n < topology.num_aps; ++n)
      if (channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) <= 0.0)
        throw SchemaError("offload scenario: alpha must be positive");
  }
  for (int m = 0; m < topology.num_mecs; ++m)
    if (topology.mec_capacity[static_cast<std::size_t>(m)] <= 0.0)
      throw SchemaError("offload scenario: server capacity must be positive");
  for (int n = 0; n < topology.num_aps; ++n)
    for (int m = 0; m < topology.num_mecs; ++m)
      if (topology.backhaul_latency(static_cast<std::size_t>(n), static_cast<std::size_t>(m)) < 0.0)
        throw SchemaError("offload scenario: negative backhaul latency");
}

OffloadScenario OffloadScenario::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("offload scenario: ") + e.what());
  }
  OffloadScenario s;
  try {
    for (const auto& user : j.at("users")) {
      OffloadTask t;
      t.bits = user.at("b").get<double>();
      t.cycles = user.at("w").get<double>();
      t.deadline = user.at("L").get<double>();
      t.power_cap = user.at("Pcap").get<double>();
      t.rx_latency_fixed = user.value("Trx", 0.0);
      s.tasks.push_back(t);
    }
    s.channel.bandwidth = j.at("B").get<double>();
    const auto& alpha = j.at("alpha");
    const auto& caps = j.at("F");
    const auto& backhaul = j.at("T_B");
    const int k_count = static_cast<int>(s.tasks.size());
    const int n_aps = k_count > 0 ? static_cast<int>(alpha.at(0).size()) : 0;
    s.channel.alpha = Matrix(static_cast<std::size_t>(k_count), static_cast<std::size_t>(n_aps));
    for (int k = 0; k < k_count; ++k)
      for (int n = 0; n < n_aps; ++n)
        s.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) =
            alpha.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(n)).get<double>();
    s.topology.num_aps = n_aps;
    s.topology.num_mecs = static_cast<int>(caps.size());
    s.topology.mec_capacity.clear();
    for (const auto& f : caps) s.topology.mec_capacity.push_back(f.get<double>());
    s.topology.backhaul_latency =
        Matrix(static_cast<std::size_t>(n_aps), static_cast<std::size_t>(s.topology.num_mecs));
    for (int n = 0; n < n_aps; ++n)
      for (int m = 0; m < s.topology.num_mecs; ++m)
        s.topology.backhaul_latency(static_cast<std::size_t>(n), static_cast<std::size_t>(m)) =
            backhaul.at(static_cast<std::size_t>(n)).at(static_cast<std::size_t>(m)).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("offload scenario: ") + e.what());
  }
  s.validate();
  return s;
}

SingleMecSolution solve_single_mec(const std::vector<OffloadTask>& tasks, const ChannelModel& ch,
                                   double server_capacity) {
  if (tasks.empty()) throw SchemaError("solve_single_mec: no tasks");
  if (ch.alpha.rows() != tasks.size() || ch.alpha.cols() < 1)
    throw SchemaError("solve_single_mec: alpha must have one column per AP and a row per user");
  std::vector<double> alpha(tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) alpha[k] = ch.alpha(k, 0);
  std::vector<double> zero(tasks.size(), 0.0);
  CoreResult core;
  try {
    core = solve_core(effective_users(tasks, ch.bandwidth, alpha, zero), server_capacity);
  } catch (const InfeasibleError& e) {
    const double inflate = minimal_deadline_inflation(tasks, ch, server_capacity);
    throw InfeasibleError(std::string(e.what()) + "; minimal deadline inflation factor " +
                          (std::isfinite(inflate) ? std::to_string(inflate) : "inf"));
  }
  SingleMecSolution out;
  out.powers = std::move(core.powers);
  out.comp_rates = std::move(core.comp_rates);
  out.eta = std::move(core.eta);
  out.total_power = core.total_power;
  return out;
}

Vector proportional_rate_baseline(const std::vector<OffloadTask>& tasks, double server_capacity) {
  double total = 0.0;
  for (const OffloadTask& t : tasks) {
    if (t.cycles < 0.0) throw SchemaError("proportional baseline: negative workload");
    total += t.cycles;
  }
  if (total <= 0.0) throw SchemaError("proportional baseline: all workloads are zero");
  Vector rates(tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k)
    rates[k] = tasks[k].cycles * server_capacity / total;
  return rates;
}

double penalty_value(const Vector& assignment_slice, double eps, double p_exp) {
  if (!(p_exp > 0.0 && p_exp < 1.0)) throw SchemaError("penalty: p must lie in (0,1)");
  if (eps <= 0.0) throw SchemaError("penalty: eps must be positive");
  const double n = static_cast<double>(assignment_slice.size());
  double sum = 0.0;
  for (double a : assignment_slice) {
    if (a < -1e-9 || a > 1.0 + 1e-9) throw SchemaError("penalty: entry outside [0,1]");
    sum += std::pow(std::max(a, 0.0) + eps, p_exp);
  }
  const double floor = std::pow(1.0 + eps, p_exp) + (n - 1.0) * std::pow(eps, p_exp);
  return sum - floor;
}

Vector penalty_gradient(const Vector& assignment_slice, double eps, double p_exp) {
  if (!(p_exp > 0.0 && p_exp < 1.0)) throw SchemaError("penalty: p must lie in (0,1)");
  if (eps <= 0.0) throw SchemaError("penalty: eps must be positive");
  Vector grad(assignment_slice.size());
  for (std::size_t i = 0; i < assignment_slice.size(); ++i)
    grad[i] = p_exp * std::pow(std::max(assignment_slice[i], 0.0) + eps, p_exp - 1.0);
  return grad;
}

std::pair<int, int> Assignment::pair_of(int k) const {
  int best_n = 0, best_m = 0;
  double best = -1.0;
  for (int n = 0; n < num_aps; ++n)
    for (int m = 0; m < num_mecs; ++m)
      if (at(k, n, m) > best) {
        best = at(k, n, m);
        best_n = n;
        best_m = m;
      }
  return {best_n, best_m};
}

double Assignment::total_power() const {
  double acc = 0.0;
  for (double p : powers) acc += p;
  return acc;
}

namespace {

// Powers and rates for a fixed binary pair choice; one convex subproblem per
// server. Throws InfeasibleError when some server cannot serve its users.
Assignment complete_binary(const OffloadScenario& s, const std::vector<int>& pair_choice) {
  const int k_count = s.num_users();
  const int n_aps = s.topology.num_aps;
  const int n_mecs = s.topology.num_mecs;

  Assignment out;
  out.num_users = k_count;
  out.num_aps = n_aps;
  out.num_mecs = n_mecs;
  out.a.assign(static_cast<std::size_t>(k_count * n_aps * n_mecs), 0.0);
  out.powers.assign(static_cast<std::size_t>(k_count), 0.0);
  out.comp_rates = Matrix(static_cast<std::size_t>(n_mecs), static_cast<std::size_t>(k_count));
  out.binary = true;

  std::vector<std::vector<int>> users_of_mec(static_cast<std::size_t>(n_mecs));
  for (int k = 0; k < k_count; ++k) {
    const int n = pair_choice[static_cast<std::size_t>(k)] / n_mecs;
    const int m = pair_choice[static_cast<std::size_t>(k)] % n_mecs;
    out.at(k, n, m) = 1.0;
    users_of_mec[static_cast<std::size_t>(m)].push_back(k);
  }

  for (int m = 0; m < n_mecs; ++m) {
    const auto& group = users_of_mec[static_cast<std::size_t>(m)];
    if (group.empty()) continue;
    std::vector<EffUser> users;
    users.reserve(group.size());
    for (int k : group) {
      const int n = pair_choice[static_cast<std::size_t>(k)] / n_mecs;
      EffUser u;
      const OffloadTask& t = s.tasks[static_cast<std::size_t>(k)];
      u.c = t.bits / s.channel.bandwidth;
      u.w = t.cycles;
      u.leff = t.deadline - t.rx_latency_fixed -
               s.topology.backhaul_latency(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
      u.alpha = s.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
      u.pcap = t.power_cap;
      u.id = k;
      users.push_back(u);
    }
    CoreResult core = solve_core(users, s.topology.mec_capacity[static_cast<std::size_t>(m)]);
    for (std::size_t i = 0; i < group.size(); ++i) {
      out.powers[static_cast<std::size_t>(group[i])] = core.powers[i];
      out.comp_rates(static_cast<std::size_t>(m), static_cast<std::size_t>(group[i])) =
          core.comp_rates[i];
    }
  }
  return out;
}

}  // namespace

Assignment exhaustive_baseline(const OffloadScenario& scenario) {
  scenario.validate();
  const int k_count = scenario.num_users();
  const int pairs = scenario.topology.num_aps * scenario.topology.num_mecs;
  double combos = 1.0;
  for (int k = 0; k < k_count; ++k) {
    combos *= pairs;
    if (combos > 1e6) throw SchemaError("exhaustive baseline: enumeration budget exceeded");
  }

  // Per-server memo keyed by the (user, AP) multiset it would serve.
  const int n_mecs = scenario.topology.num_mecs;
  std::vector<std::map<std::vector<int>, std::pair<bool, double>>> memo(
      static_cast<std::size_t>(n_mecs));

  std::vector<int> choice(static_cast<std::size_t>(k_count), 0);
  std::vector<int> best_choice;
  double best_power = kInf;

  const long total = static_cast<long>(combos);
  for (long code = 0; code < total; ++code) {
    long rest = code;
    for (int k = 0; k < k_count; ++k) {
      choice[static_cast<std::size_t>(k)] = static_cast<int>(rest % pairs);
      rest /= pairs;
    }
    double power = 0.0;
    bool feasible = true;
    for (int m = 0; m < n_mecs && feasible; ++m) {
      std::vector<int> key;
      for (int k = 0; k < k_count; ++k)
        if (choice[static_cast<std::size_t>(k)] % n_mecs == m)
          key.push_back(k * scenario.topology.num_aps + choice[static_cast<std::size_t>(k)] / n_mecs);
      if (key.empty()) continue;
      auto& entry = memo[static_cast<std::size_t>(m)];
      auto it = entry.find(key);
      if (it == entry.end()) {
        std::vector<EffUser> users;
        for (int packed : key) {
          const int k = packed / scenario.topology.num_aps;
          const int n = packed % scenario.topology.num_aps;
          const OffloadTask& t = scenario.tasks[static_cast<std::size_t>(k)];
          EffUser u;
          u.c = t.bits / scenario.channel.bandwidth;
          u.w = t.cycles;
          u.leff = t.deadline - t.rx_latency_fixed -
                   scenario.topology.backhaul_latency(static_cast<std::size_t>(n),
                                                      static_cast<std::size_t>(m));
          u.alpha = scenario.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
          u.pcap = t.power_cap;
          u.id = k;
          users.push_back(u);
        }
        std::pair<bool, double> value{true, 0.0};
        try {
          value.second =
              solve_core(users, scenario.topology.mec_capacity[static_cast<std::size_t>(m)])
                  .total_power;
        } catch (const InfeasibleError&) {
          value.first = false;
        }
        it = entry.emplace(std::move(key), value).first;
      }
      if (!it->second.first)
        feasible = false;
      else
        power += it->second.second;
    }
    if (feasible && power < best_power) {
      best_power = power;
      best_choice = choice;
    }
  }

  if (best_choice.empty())
    throw InfeasibleError("exhaustive baseline: no feasible binary assignment");
  return complete_binary(scenario, best_choice);
}

Assignment snr_association_baseline(const OffloadScenario& scenario, bool joint) {
  scenario.validate();
  const int k_count = scenario.num_users();
  const int n_mecs = scenario.topology.num_mecs;

  std::vector<int> pair_choice(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    int best_n = 0;
    for (int n = 1; n < scenario.topology.num_aps; ++n)
      if (scenario.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) >
          scenario.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(best_n)))
        best_n = n;
    // co-located server: the one nearest in backhaul latency
    int best_m = 0;
    for (int m = 1; m < n_mecs; ++m)
      if (scenario.topology.backhaul_latency(static_cast<std::size_t>(best_n),
                                             static_cast<std::size_t>(m)) <
          scenario.topology.backhaul_latency(static_cast<std::size_t>(best_n),
                                             static_cast<std::size_t>(best_m)))
        best_m = m;
    pair_choice[static_cast<std::size_t>(k)] = best_n * n_mecs + best_m;
  }

  if (joint) return complete_binary(scenario, pair_choice);

  // Disjoint: proportional rates per server, then the minimal power meeting
  // the residual latency budget per user.
  Assignment out;
  out.num_users = k_count;
  out.num_aps = scenario.topology.num_aps;
  out.num_mecs = n_mecs;
  out.a.assign(static_cast<std::size_t>(k_count * out.num_aps * out.num_mecs), 0.0);
  out.powers.assign(static_cast<std::size_t>(k_count), 0.0);
  out.comp_rates = Matrix(static_cast<std::size_t>(n_mecs), static_cast<std::size_t>(k_count));
  out.binary = true;

  for (int m = 0; m < n_mecs; ++m) {
    std::vector<int> group;
    for (int k = 0; k < k_count; ++k)
      if (pair_choice[static_cast<std::size_t>(k)] % n_mecs == m) group.push_back(k);
    if (group.empty()) continue;
    std::vector<OffloadTask> group_tasks;
    for (int k : group) group_tasks.push_back(scenario.tasks[static_cast<std::size_t>(k)]);
    Vector rates = proportional_rate_baseline(
        group_tasks, scenario.topology.mec_capacity[static_cast<std::size_t>(m)]);
    for (std::size_t i = 0; i < group.size(); ++i) {
      const int k = group[i];
      const int n = pair_choice[static_cast<std::size_t>(k)] / n_mecs;
      const OffloadTask& t = scenario.tasks[static_cast<std::size_t>(k)];
      const double backhaul = scenario.topology.backhaul_latency(static_cast<std::size_t>(n),
                                                                 static_cast<std::size_t>(m));
      const double tau = t.deadline - t.rx_latency_fixed - backhaul - t.cycles / rates[i];
      if (tau <= 0.0)
        throw InfeasibleError("snr baseline: user " + std::to_string(k) +
                              " has no transmit budget under proportional rates");
      const double alpha =
          scenario.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
      const double c = t.bits / scenario.channel.bandwidth;
      const double power = (std::exp2(c / tau) - 1.0) / alpha;
      if (power > t.power_cap * (1.0 + 1e-12))
        throw InfeasibleError("snr baseline: user " + std::to_string(k) +
                              " exceeds its power cap under forced association");
      out.at(k, n, m) = 1.0;
      out.powers[static_cast<std::size_t>(k)] = power;
      out.comp_rates(static_cast<std::size_t>(m), static_cast<std::size_t>(k)) = rates[i];
    }
  }
  return out;
}

AssignmentCheck validate_assignment(const OffloadScenario& s, const Assignment& assignment,
                                    double tol) {
  AssignmentCheck check;
  auto fail = [&](const std::string& why) {
    check.feasible = false;
    check.violation = why;
    return check;
  };

  const int k_count = s.num_users();
  if (assignment.num_users != k_count || assignment.num_aps != s.topology.num_aps ||
      assignment.num_mecs != s.topology.num_mecs)
    return fail("dimension mismatch");

  for (int k = 0; k < k_count; ++k) {
    double sum = 0.0;
    for (int n = 0; n < assignment.num_aps; ++n)
      for (int m = 0; m < assignment.num_mecs; ++m) {
        const double a = assignment.at(k, n, m);
        if (a < -tol || a > 1.0 + tol) return fail("assignment entry outside [0,1]");
        if (assignment.binary && a > tol && a < 1.0 - tol)
          return fail("assignment entry not binary");
        sum += a;
      }
    if (std::fabs(sum - 1.0) > tol) return fail("assignment rows must sum to one");
  }

  if (!assignment.binary) return check;  // relaxed: only membership in the set A

  for (int k = 0; k < k_count; ++k) {
    const OffloadTask& t = s.tasks[static_cast<std::size_t>(k)];
    const double p = assignment.powers[static_cast<std::size_t>(k)];
    if (!(p > 0.0) || p > t.power_cap * (1.0 + tol)) return fail("power outside (0, cap]");
    const auto [n, m] = assignment.pair_of(k);
    const double f = assignment.comp_rates(static_cast<std::size_t>(m), static_cast<std::size_t>(k));
    if (!(f > 0.0)) return fail("assigned user without computing rate");
    const double alpha = s.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    const double rate = std::log2(1.0 + alpha * p);
    const double latency = t.bits / s.channel.bandwidth / rate + t.cycles / f +
                           s.topology.backhaul_latency(static_cast<std::size_t>(n),
                                                       static_cast<std::size_t>(m)) +
                           t.rx_latency_fixed;
    if (latency > t.deadline * (1.0 + tol) + tol) return fail("latency constraint violated");
  }
  for (int m = 0; m < assignment.num_mecs; ++m) {
    double load = 0.0;
    for (int k = 0; k < k_count; ++k) {
      const auto [kn, km] = assignment.pair_of(k);
      if (km == m)
        load += assignment.comp_rates(static_cast<std::size_t>(m), static_cast<std::size_t>(k));
    }
    const double cap = s.topology.mec_capacity[static_cast<std::size_t>(m)];
    if (load > cap * (1.0 + tol)) return fail("server capacity exceeded");
  }
  return check;
}

double minimal_deadline_inflation(const std::vector<OffloadTask>& tasks, const ChannelModel& ch,
                                  double server_capacity) {
  auto feasible = [&](double inflate) {
    double floor_sum = 0.0;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const OffloadTask& t = tasks[k];
      const double leff = t.deadline * inflate - t.rx_latency_fixed;
      if (leff <= 0.0) return false;
      const double rmax = std::log2(1.0 + ch.alpha(k, 0) * t.power_cap);
      const double tmin = t.bits / ch.bandwidth / rmax;
      if (tmin >= leff) return false;
      floor_sum += t.cycles / (leff - tmin);
    }
    return floor_sum <= server_capacity;
  };

  if (feasible(1.0)) return 1.0;
  double hi = 2.0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (hi > 1e9) return kInf;
  }
  double lo = hi / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// PSCA

namespace {

struct PscaWorkspace {
  int k_count = 0, n_aps = 0, n_mecs = 0;
  double f_ref = 1.0;  // rate normalization
  Vector c, w_tilde, leff, pcap;
  Matrix alpha;      // K x N
  Matrix backhaul;   // N x M
  Vector cap_tilde;  // per server
  double sigma = 0.0;
  double eps = 0.0, p_exp = 0.0;

  int p_of(int k) const { return k; }
  int f_of(int m, int k) const { return k_count + m * k_count + k; }
  int a_of(int k, int n, int m) const {
    return k_count + n_mecs * k_count + (k * n_aps + n) * n_mecs + m;
  }
  int dim() const { return k_count + n_mecs * k_count + k_count * n_aps * n_mecs; }
  int a_flat(int k, int n, int m) const { return (k * n_aps + n) * n_mecs + m; }

  double inv_rate(int k, int n, double p) const {
    const double u =
        std::log1p(alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) * p);
    return kLn2 / u;
  }
};

// The convex subproblems are solved by outer approximation: in the variables
// (t = power epigraph, s = inverse spectral efficiency, q = inverse computing
// rate, a) every constraint is linear except the power envelope t >= P(s) and
// the server load sum a/q, both convex in a single coordinate, so tangent
// cuts plus the in-repo simplex solver converge in a handful of rounds.
class PscaSolver {
 public:
  PscaSolver(const OffloadScenario& s, const PscaOptions& opt) : opt_(opt) {
    ws_.k_count = s.num_users();
    ws_.n_aps = s.topology.num_aps;
    ws_.n_mecs = s.topology.num_mecs;
    ws_.alpha = s.channel.alpha;
    ws_.backhaul = s.topology.backhaul_latency;
    ws_.f_ref = 0.0;
    for (double f : s.topology.mec_capacity) ws_.f_ref = std::max(ws_.f_ref, f);
    for (double f : s.topology.mec_capacity) ws_.cap_tilde.push_back(f / ws_.f_ref);
    for (const OffloadTask& t : s.tasks) {
      ws_.c.push_back(t.bits / s.channel.bandwidth);
      ws_.w_tilde.push_back(t.cycles / ws_.f_ref);
      ws_.leff.push_back(t.deadline - t.rx_latency_fixed);
      ws_.pcap.push_back(t.power_cap);
    }
    ws_.sigma = opt.sigma0;
    ws_.eps = opt.eps;
    ws_.p_exp = opt.p_exp;
  }

  const PscaWorkspace& workspace() const { return ws_; }

  struct Point {
    Vector a;  // K*N*M simplex blocks
    Vector p;  // watts per user
    Vector f;  // M*K normalized rates
    double power = 0.0;
  };

  Vector pack(const Point& pt) const {
    Vector z(static_cast<std::size_t>(ws_.dim()), 0.0);
    for (int k = 0; k < ws_.k_count; ++k)
      z[static_cast<std::size_t>(ws_.p_of(k))] = pt.p[static_cast<std::size_t>(k)];
    for (int m = 0; m < ws_.n_mecs; ++m)
      for (int k = 0; k < ws_.k_count; ++k)
        z[static_cast<std::size_t>(ws_.f_of(m, k))] =
            pt.f[static_cast<std::size_t>(m * ws_.k_count + k)];
    for (int k = 0; k < ws_.k_count; ++k)
      for (int n = 0; n < ws_.n_aps; ++n)
        for (int m = 0; m < ws_.n_mecs; ++m)
          z[static_cast<std::size_t>(ws_.a_of(k, n, m))] =
              pt.a[static_cast<std::size_t>(ws_.a_flat(k, n, m))];
    return z;
  }

  Vector initial_assignment() const {
    const int block = ws_.n_aps * ws_.n_mecs;
    Vector a(static_cast<std::size_t>(ws_.k_count * block), 0.0);
    const double uniform = 1.0 / static_cast<double>(block);
    for (int k = 0; k < ws_.k_count; ++k) {
      // A fixed per-entry tilt so identical users cannot stay locked on the
      // same pair; without it symmetric instances round onto one server.
      double sum = 0.0;
      for (int i = 0; i < block; ++i) {
        std::uint64_t h = static_cast<std::uint64_t>(k * block + i) + 1;
        const double tilt = static_cast<double>(splitmix64(h) >> 40) / 16777216.0 - 0.5;
        const double v = uniform * (1.0 + 0.05 * tilt);
        a[static_cast<std::size_t>(k * block + i)] = v;
        sum += v;
      }
      for (int i = 0; i < block; ++i) a[static_cast<std::size_t>(k * block + i)] /= sum;
    }
    return a;
  }

  double penalty_of(const Vector& a) const {
    const int block = ws_.n_aps * ws_.n_mecs;
    Vector slice(static_cast<std::size_t>(block));
    double acc = 0.0;
    for (int k = 0; k < ws_.k_count; ++k) {
      for (int i = 0; i < block; ++i)
        slice[static_cast<std::size_t>(i)] =
            std::clamp(a[static_cast<std::size_t>(k * block + i)], 0.0, 1.0);
      acc += penalty_value(slice, ws_.eps, ws_.p_exp);
    }
    return acc;
  }

  double binarity_gap(const Vector& a) const {
    const int block = ws_.n_aps * ws_.n_mecs;
    double gap = 0.0;
    for (int k = 0; k < ws_.k_count; ++k) {
      double best = 0.0;
      for (int i = 0; i < block; ++i)
        best = std::max(best, a[static_cast<std::size_t>(k * block + i)]);
      gap = std::max(gap, 1.0 - best);
    }
    return gap;
  }

  double s_floor(int k, int n) const {
    const double rmax =
        std::log2(1.0 + ws_.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) *
                            ws_.pcap[static_cast<std::size_t>(k)]);
    return 1.0 / rmax;
  }
  double power_needed(int k, int n, double s) const {
    return (std::exp2(1.0 / s) - 1.0) /
           ws_.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
  }
  double power_needed_ds(int k, int n, double s) const {
    return -std::exp2(1.0 / s) * kLn2 /
           (ws_.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) * s * s);
  }

  static constexpr double kSMax = 1e5;
  static constexpr double kQMax = 1e7;

  double s_ceiling(int k, int n) const {
    const double target = ws_.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) *
                          ws_.pcap[static_cast<std::size_t>(k)] * 1e-6;
    const double hi = 1.0 / std::log2(1.0 + target);
    return std::clamp(hi, 8.0 * s_floor(k, n), kSMax);
  }
  double q_ceiling(int m, int k) const {
    const double hi = 64.0 * ws_.leff[static_cast<std::size_t>(k)] /
                      std::max(ws_.w_tilde[static_cast<std::size_t>(k)], 1e-12);
    return std::clamp(hi, 8.0 / ws_.cap_tilde[static_cast<std::size_t>(m)], kQMax);
  }

  struct SubSolution {
    bool feasible = false;
    Vector x;
    double objective = kInf;
  };

  // Tangent pools, grown across calls; a tangent to a fixed convex curve
  // stays valid for every later subproblem.
  mutable std::vector<std::vector<double>> envelope_pool_;  // (k*nn+n) -> s points
  mutable std::vector<std::vector<double>> hyper_pool_;     // (m*kk+k) -> q points

  void seed_pools() const {
    const int kk = ws_.k_count, nn = ws_.n_aps, mm = ws_.n_mecs;
    if (!envelope_pool_.empty()) return;
    envelope_pool_.assign(static_cast<std::size_t>(kk * nn), {});
    hyper_pool_.assign(static_cast<std::size_t>(mm * kk), {});
    const int seeds = 6;
    for (int k = 0; k < kk; ++k)
      for (int n = 0; n < nn; ++n) {
        auto& pool = envelope_pool_[static_cast<std::size_t>(k * nn + n)];
        const double lo = s_floor(k, n), hi = s_ceiling(k, n);
        const double ratio = std::pow(hi / lo, 1.0 / (seeds - 1));
        double s = lo;
        for (int i = 0; i < seeds; ++i, s *= ratio) pool.push_back(s);
      }
    for (int m = 0; m < mm; ++m)
      for (int k = 0; k < kk; ++k) {
        auto& pool = hyper_pool_[static_cast<std::size_t>(m * kk + k)];
        const double lo = 1.0 / ws_.cap_tilde[static_cast<std::size_t>(m)];
        const double hi = q_ceiling(m, k);
        const double ratio = std::pow(hi / lo, 1.0 / (seeds - 1));
        double q = lo;
        for (int i = 0; i < seeds; ++i, q *= ratio) pool.push_back(q);
      }
  }

  static void pool_insert(std::vector<double>& pool, double point) {
    for (double existing : pool)
      if (std::fabs(existing - point) <= 2e-4 * point) return;
    if (pool.size() > 10) pool.erase(pool.begin() + 6);  // keep the seeds
    pool.push_back(point);
  }

  // Shared subproblem in (t, s, q, u [, a]): t is the power epigraph, s the
  // inverse spectral efficiency, q the inverse computing rate and u the
  // per-(server,user) load epigraph. Everything is linear except t >= P(s)
  // and u >= load(q), handled by pooled tangent cuts.
  //
  // with_a = false: assignment frozen at `a` (exact restore).
  // with_a = true : assignment free; the spec's bilinear terms are linearized
  //                 around (a, s_bar, q_bar) and the penalty slope enters the
  //                 objective; |a - a| is trust-bounded.
  SubSolution solve_subproblem(const Vector& a, bool with_a, const Vector* s_bar,
                               const Vector* q_bar, double trust, const Vector* hint_p,
                               const Vector* hint_f) const {
    (void)hint_p;
    (void)hint_f;
    seed_pools();
    const int kk = ws_.k_count, nn = ws_.n_aps, mm = ws_.n_mecs;
    const int t0 = 0;
    const int s0 = kk;
    const int q0 = kk + kk * nn;
    const int u0 = q0 + mm * kk;
    const int a0 = u0 + mm * kk;
    const int dim = with_a ? a0 + kk * nn * mm : a0;

    auto t_of = [&](int k) { return t0 + k; };
    auto s_of = [&](int k, int n) { return s0 + k * nn + n; };
    auto q_of = [&](int m, int k) { return q0 + m * kk + k; };
    auto u_of = [&](int m, int k) { return u0 + m * kk + k; };
    auto a_of = [&](int k, int n, int m) { return a0 + (k * nn + n) * mm + m; };

    Vector abar_km(static_cast<std::size_t>(kk * mm), 0.0);
    for (int k = 0; k < kk; ++k)
      for (int m = 0; m < mm; ++m) {
        double acc = 0.0;
        for (int n = 0; n < nn; ++n)
          acc += a[static_cast<std::size_t>(ws_.a_flat(k, n, m))];
        abar_km[static_cast<std::size_t>(k * mm + m)] = acc;
      }

    LinearProgram lp(dim);
    for (int k = 0; k < kk; ++k) {
      lp.set_bounds(t_of(k), 0.0, ws_.pcap[static_cast<std::size_t>(k)]);
      lp.set_objective(t_of(k), 1.0);
      for (int n = 0; n < nn; ++n)
        lp.set_bounds(s_of(k, n), s_floor(k, n), s_ceiling(k, n));
    }
    for (int m = 0; m < mm; ++m)
      for (int k = 0; k < kk; ++k) {
        lp.set_bounds(q_of(m, k), 1.0 / ws_.cap_tilde[static_cast<std::size_t>(m)],
                      q_ceiling(m, k));
        lp.set_bounds(u_of(m, k), 0.0, kInf);
      }

    if (with_a) {
      for (int k = 0; k < kk; ++k) {
        std::vector<std::pair<int, double>> simplex_row;
        for (int n = 0; n < nn; ++n)
          for (int m = 0; m < mm; ++m) {
            const int idx = ws_.a_flat(k, n, m);
            const double center = a[static_cast<std::size_t>(idx)];
            lp.set_bounds(a_of(k, n, m), std::max(0.0, center - trust),
                          std::min(1.0, center + trust));
            const double slope = ws_.p_exp * std::pow(center + ws_.eps, ws_.p_exp - 1.0);
            lp.set_objective(a_of(k, n, m), ws_.sigma * slope);
            simplex_row.push_back({a_of(k, n, m), 1.0});
          }
        lp.add_eq_row(std::move(simplex_row), 1.0);
      }
    }

    // latency rows (linear in these variables)
    for (int k = 0; k < kk; ++k) {
      const double inv_l = 1.0 / ws_.leff[static_cast<std::size_t>(k)];
      const double cs = ws_.c[static_cast<std::size_t>(k)];
      const double wt = ws_.w_tilde[static_cast<std::size_t>(k)];
      for (int n = 0; n < nn; ++n)
        for (int m = 0; m < mm; ++m) {
          const int idx = ws_.a_flat(k, n, m);
          const double backhaul =
              ws_.backhaul(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
          if (!with_a) {
            const double av = a[static_cast<std::size_t>(idx)];
            if (av <= 1e-12) continue;
            lp.add_le_row({{s_of(k, n), inv_l * av * cs}, {q_of(m, k), inv_l * av * wt}},
                          1.0 - inv_l * av * backhaul);
          } else {
            const double abar = a[static_cast<std::size_t>(idx)];
            const double sb = (*s_bar)[static_cast<std::size_t>(k * nn + n)];
            const double qb = (*q_bar)[static_cast<std::size_t>(m * kk + k)];
            const double a_coeff = cs * sb + wt * qb + backhaul;
            const double offset = -cs * abar * sb - wt * abar * qb;
            lp.add_le_row({{s_of(k, n), inv_l * cs * abar},
                           {q_of(m, k), inv_l * wt * abar},
                           {a_of(k, n, m), inv_l * a_coeff}},
                          1.0 - inv_l * offset);
          }
        }
    }

    // server capacity via the per-user load epigraph
    for (int m = 0; m < mm; ++m) {
      std::vector<std::pair<int, double>> row;
      for (int k = 0; k < kk; ++k) row.push_back({u_of(m, k), 1.0});
      lp.add_le_row(std::move(row), ws_.cap_tilde[static_cast<std::size_t>(m)]);
    }

    // u_mk >= abar/q (+ linearized mass shift when a is free):
    //   tangent at q0: abar/q >= 2 abar/q0 - (abar/q0^2) q
    auto add_hyper_cut = [&](int m, int k, double q_point) {
      const double abar = abar_km[static_cast<std::size_t>(k * mm + m)];
      if (abar <= 1e-14 && !with_a) return;
      std::vector<std::pair<int, double>> row;
      double rhs = -2.0 * abar / q_point;
      row.push_back({u_of(m, k), -1.0});
      if (abar > 1e-14) row.push_back({q_of(m, k), -abar / (q_point * q_point)});
      if (with_a) {
        const double inv_qb = 1.0 / (*q_bar)[static_cast<std::size_t>(m * kk + k)];
        for (int n = 0; n < nn; ++n) row.push_back({a_of(k, n, m), inv_qb});
        rhs += abar * inv_qb;
      }
      lp.add_le_row(std::move(row), rhs);
    };
    auto add_envelope_cut = [&](int k, int n, double s_point) {
      const double deriv = power_needed_ds(k, n, s_point);
      const double value = power_needed(k, n, s_point);
      lp.add_le_row({{s_of(k, n), deriv}, {t_of(k), -1.0}}, -value + deriv * s_point);
    };

    for (int k = 0; k < kk; ++k)
      for (int n = 0; n < nn; ++n)
        for (double s : envelope_pool_[static_cast<std::size_t>(k * nn + n)])
          add_envelope_cut(k, n, s);
    for (int m = 0; m < mm; ++m)
      for (int k = 0; k < kk; ++k)
        for (double q : hyper_pool_[static_cast<std::size_t>(m * kk + k)])
          add_hyper_cut(m, k, q);

    SubSolution out;
    LpOptions lp_opt;
    // The tangent-cut programs are degenerate; modest basis drift is fine
    // because the loop re-checks the true convex constraints at the solution.
    lp_opt.final_feas_tol = 1e-4;
    {
      // Crash so the envelope and load cuts start satisfied (s and t high,
      // u covering the load at the q floor); phase 1 then only repairs the
      // latency and simplex rows.
      Vector hint(static_cast<std::size_t>(dim), 0.0);
      for (int k = 0; k < kk; ++k) {
        hint[static_cast<std::size_t>(t_of(k))] = ws_.pcap[static_cast<std::size_t>(k)];
        for (int n = 0; n < nn; ++n)
          hint[static_cast<std::size_t>(s_of(k, n))] = s_ceiling(k, n);
      }
      for (int m = 0; m < mm; ++m)
        for (int k = 0; k < kk; ++k) {
          const double q_hint = 1.0 / ws_.cap_tilde[static_cast<std::size_t>(m)];
          hint[static_cast<std::size_t>(q_of(m, k))] = q_hint;
          hint[static_cast<std::size_t>(u_of(m, k))] =
              abar_km[static_cast<std::size_t>(k * mm + m)] / q_hint;
        }
      if (with_a)
        for (int k = 0; k < kk; ++k)
          for (int n = 0; n < nn; ++n)
            for (int m = 0; m < mm; ++m)
              hint[static_cast<std::size_t>(a_of(k, n, m))] =
                  a[static_cast<std::size_t>(ws_.a_flat(k, n, m))];
      lp_opt.warm_hint = std::move(hint);
    }
    const int round_budget = with_a ? 3 : 40;
    for (int round = 0; round < round_budget; ++round) {
      LpSolution sol = solve_lp(lp, lp_opt);
      if (sol.status != LpStatus::optimal) return out;  // relaxation infeasible

      double worst = 0.0;
      for (int k = 0; k < kk; ++k)
        for (int n = 0; n < nn; ++n) {
          const double s = sol.x[static_cast<std::size_t>(s_of(k, n))];
          const double t = sol.x[static_cast<std::size_t>(t_of(k))];
          const double gap =
              (power_needed(k, n, s) - t) / ws_.pcap[static_cast<std::size_t>(k)];
          if (gap > 1e-9) {
            add_envelope_cut(k, n, s);
            pool_insert(envelope_pool_[static_cast<std::size_t>(k * nn + n)], s);
          }
          worst = std::max(worst, gap);
        }
      for (int m = 0; m < mm; ++m) {
        const double cap = ws_.cap_tilde[static_cast<std::size_t>(m)];
        for (int k = 0; k < kk; ++k) {
          const double abar = abar_km[static_cast<std::size_t>(k * mm + m)];
          const double q = sol.x[static_cast<std::size_t>(q_of(m, k))];
          double needed = abar / q;
          if (with_a) {
            double mass = 0.0;
            for (int n = 0; n < nn; ++n)
              mass += sol.x[static_cast<std::size_t>(a_of(k, n, m))];
            needed += (mass - abar) / (*q_bar)[static_cast<std::size_t>(m * kk + k)];
          }
          const double gap =
              (needed - sol.x[static_cast<std::size_t>(u_of(m, k))]) / cap;
          if (gap > 1e-9) {
            add_hyper_cut(m, k, q);
            pool_insert(hyper_pool_[static_cast<std::size_t>(m * kk + k)], q);
          }
          worst = std::max(worst, gap);
        }
      }
      if (std::getenv("EC_KELLEY_DEBUG"))
        std::fprintf(stderr, "   kelley round=%d rows=%d obj=%.6g worst=%.3g\n", round,
                     lp.num_rows(), sol.objective, worst);
      if (worst <= 1e-8 || (with_a && round == round_budget - 1)) {
        if (std::getenv("EC_SUB_STATS"))
          std::fprintf(stderr, "sub with_a=%d rounds=%d rows=%d iters=%ld\n", with_a ? 1 : 0,
                       round + 1, lp.num_rows(), sol.iterations);
        // remember the active tangent points: the next call starts converged
        for (int k = 0; k < kk; ++k)
          for (int n = 0; n < nn; ++n)
            pool_insert(envelope_pool_[static_cast<std::size_t>(k * nn + n)],
                        sol.x[static_cast<std::size_t>(s_of(k, n))]);
        for (int m = 0; m < mm; ++m)
          for (int k = 0; k < kk; ++k)
            pool_insert(hyper_pool_[static_cast<std::size_t>(m * kk + k)],
                        sol.x[static_cast<std::size_t>(q_of(m, k))]);
        out.feasible = true;
        out.x = std::move(sol.x);
        out.objective = sol.objective;
        return out;
      }
      lp_opt.warm_hint = sol.x;  // crash the next round at this solution
    }
    return out;  // cut budget exhausted; treat as not usable
  }

  struct Restore {
    bool feasible = false;
    Vector p, f;
    double power = kInf;
  };

  Restore restore_rates(const Vector& a, const Vector* warm_p = nullptr,
                        const Vector* warm_f = nullptr) const {
    const int kk = ws_.k_count, nn = ws_.n_aps, mm = ws_.n_mecs;

    // Exactly binary assignments reduce to one dual-bisection solve per
    // server, far cheaper than the cutting-plane program.
    {
      bool binary = true;
      std::vector<int> pair_choice(static_cast<std::size_t>(kk), -1);
      for (int k = 0; k < kk && binary; ++k) {
        for (int i = 0; i < nn * mm; ++i) {
          const double v = a[static_cast<std::size_t>(k * nn * mm + i)];
          if (v == 1.0 && pair_choice[static_cast<std::size_t>(k)] < 0)
            pair_choice[static_cast<std::size_t>(k)] = i;
          else if (v != 0.0)
            binary = false;
        }
        if (pair_choice[static_cast<std::size_t>(k)] < 0) binary = false;
      }
      if (binary) return restore_binary(pair_choice);
    }

    SubSolution sub;
    try {
      sub = solve_subproblem(a, false, nullptr, nullptr, 0.0, warm_p, warm_f);
    } catch (const NumericError&) {
      // treated as an unusable trial point; the caller shrinks its step
    }
    Restore out;
    if (!sub.feasible) return out;
    out.feasible = true;
    out.p.assign(static_cast<std::size_t>(kk), 0.0);
    out.f.assign(static_cast<std::size_t>(mm * kk), 0.0);
    out.power = 0.0;
    for (int k = 0; k < kk; ++k) {
      // exact envelope at the solved inverse rates
      double p = 0.0;
      for (int n = 0; n < nn; ++n) {
        bool used = false;
        for (int m = 0; m < mm; ++m)
          if (a[static_cast<std::size_t>(ws_.a_flat(k, n, m))] > 1e-12) used = true;
        if (!used) continue;
        p = std::max(p, power_needed(k, n, sub.x[static_cast<std::size_t>(kk + k * nn + n)]));
      }
      if (p <= 0.0) p = 1e-12;
      out.p[static_cast<std::size_t>(k)] = p;
      out.power += p;
    }
    const int q_base = kk + kk * nn;
    for (int m = 0; m < mm; ++m)
      for (int k = 0; k < kk; ++k)
        out.f[static_cast<std::size_t>(m * kk + k)] =
            1.0 / sub.x[static_cast<std::size_t>(q_base + m * kk + k)];
    return out;
  }

  Restore restore_binary(const std::vector<int>& pair_choice) const {
    const int kk = ws_.k_count, nn = ws_.n_aps, mm = ws_.n_mecs;
    Restore out;
    out.p.assign(static_cast<std::size_t>(kk), 1e-12);
    out.f.assign(static_cast<std::size_t>(mm * kk), 1e-7);
    out.power = 0.0;
    for (int m = 0; m < mm; ++m) {
      std::vector<EffUser> users;
      for (int k = 0; k < kk; ++k) {
        if (pair_choice[static_cast<std::size_t>(k)] % mm != m) continue;
        const int n = pair_choice[static_cast<std::size_t>(k)] / mm;
        EffUser u;
        u.c = ws_.c[static_cast<std::size_t>(k)];
        u.w = ws_.w_tilde[static_cast<std::size_t>(k)] * ws_.f_ref;
        u.leff = ws_.leff[static_cast<std::size_t>(k)] -
                 ws_.backhaul(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
        u.alpha = ws_.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
        u.pcap = ws_.pcap[static_cast<std::size_t>(k)];
        u.id = k;
        users.push_back(u);
      }
      if (users.empty()) continue;
      CoreResult core;
      try {
        core = solve_core(users, ws_.cap_tilde[static_cast<std::size_t>(m)] * ws_.f_ref);
      } catch (const InfeasibleError&) {
        return out;  // feasible stays false
      }
      for (std::size_t i = 0; i < users.size(); ++i) {
        out.p[static_cast<std::size_t>(users[i].id)] = core.powers[i];
        out.f[static_cast<std::size_t>(m * kk + users[i].id)] = core.comp_rates[i] / ws_.f_ref;
        out.power += core.powers[i];
      }
    }
    out.feasible = true;
    return out;
  }

  Vector inner_solve(const Point& anchor, double trust) const {
    const int kk = ws_.k_count, nn = ws_.n_aps, mm = ws_.n_mecs;
    Vector s_bar(static_cast<std::size_t>(kk * nn));
    for (int k = 0; k < kk; ++k)
      for (int n = 0; n < nn; ++n)
        s_bar[static_cast<std::size_t>(k * nn + n)] = std::clamp(
            ws_.inv_rate(k, n, std::max(anchor.p[static_cast<std::size_t>(k)],
                                        1e-6 * ws_.pcap[static_cast<std::size_t>(k)])),
            s_floor(k, n), s_ceiling(k, n));
    Vector q_bar(static_cast<std::size_t>(mm * kk));
    for (int m = 0; m < mm; ++m)
      for (int k = 0; k < kk; ++k)
        q_bar[static_cast<std::size_t>(m * kk + k)] = std::clamp(
            1.0 / std::max(anchor.f[static_cast<std::size_t>(m * kk + k)], 1e-7),
            1.0 / ws_.cap_tilde[static_cast<std::size_t>(m)], q_ceiling(m, k));

    SubSolution sub;
    try {
      sub = solve_subproblem(anchor.a, true, &s_bar, &q_bar, trust, &anchor.p, &anchor.f);
    } catch (const NumericError&) {
    }
    Vector a_hat = anchor.a;
    if (!sub.feasible) return a_hat;  // no usable direction
    const int a_base = kk + kk * nn + 2 * mm * kk;
    for (std::size_t i = 0; i < a_hat.size(); ++i)
      a_hat[i] = sub.x[static_cast<std::size_t>(a_base) + i];
    return a_hat;
  }

  Vector run(PscaTrace* trace) {
    Point current;
    current.a = initial_assignment();
    {
      Restore r = restore_rates(current.a);
      if (!r.feasible) throw InfeasibleError("psca: relaxed problem appears infeasible");
      current.p = std::move(r.p);
      current.f = std::move(r.f);
      current.power = r.power;
    }

    // Anchor sigma to the instance's power scale; a watt-level schedule on a
    // milliwatt instance binarizes before the power term is optimized.
    const double power_scale = std::max(current.power, 1e-9);
    ws_.sigma = opt_.sigma0 * power_scale;

    double trust = 1.0;
    for (int stage = 0; stage < opt_.max_stages; ++stage) {
      double fpen = current.power + ws_.sigma * penalty_of(current.a);
      int rejects = 0;
      for (int outer = 0; outer < opt_.max_outer; ++outer) {
        Vector a_hat = inner_solve(current, trust);

        // single-trial step: the exact re-solve doubles as the next anchor
        Vector a_try(current.a.size());
        for (std::size_t i = 0; i < a_try.size(); ++i) a_try[i] = a_hat[i];
        Restore r = restore_rates(a_try, &current.p, &current.f);
        bool accepted = false;
        Point candidate;
        double cand_fpen = 0.0;
        if (r.feasible) {
          const double fpen_try = r.power + ws_.sigma * penalty_of(a_try);
          if (fpen_try <= fpen + 1e-12 * std::max(1.0, std::fabs(fpen))) {
            candidate.a = std::move(a_try);
            candidate.p = std::move(r.p);
            candidate.f = std::move(r.f);
            candidate.power = r.power;
            cand_fpen = fpen_try;
            accepted = true;
          }
        }
        if (!accepted) {
          trust = std::max(trust * 0.4, 1e-3);
          if (++rejects >= 2) break;
          continue;
        }
        trust = std::min(trust * 1.5, 1.0);

        double step = 0.0;
        for (std::size_t i = 0; i < current.a.size(); ++i)
          step = std::max(step, std::fabs(candidate.a[i] - current.a[i]));
        current = std::move(candidate);
        fpen = cand_fpen;

        if (trace) {
          PscaTrace::Entry entry;
          entry.stage = stage;
          entry.sigma = ws_.sigma;
          entry.objective_plus_penalty = fpen;
          entry.total_power = current.power;
          entry.binarity_gap = binarity_gap(current.a);
          entry.violation = 0.0;
          trace->entries.push_back(entry);
        }
        if (step <= opt_.outer_tol) break;
      }
      if (binarity_gap(current.a) <= opt_.binarity_gap) break;
      ws_.sigma *= opt_.sigma_growth;
    }
    return pack(current);
  }

 private:
  PscaWorkspace ws_;
  PscaOptions opt_;
};

}  // namespace

Assignment solve_multi_mec_psca(const OffloadScenario& scenario, const PscaOptions& options,
                                PscaTrace* trace) {
  scenario.validate();
  PscaSolver solver(scenario, options);
  Vector z = solver.run(trace);

  const auto& ws = solver.workspace();
  const int pairs = ws.n_aps * ws.n_mecs;

  // Pairs per user sorted by relaxed mass, ties to the lower flat index.
  std::vector<std::vector<int>> ranked(static_cast<std::size_t>(ws.k_count));
  for (int k = 0; k < ws.k_count; ++k) {
    auto& order = ranked[static_cast<std::size_t>(k)];
    order.resize(static_cast<std::size_t>(pairs));
    for (int i = 0; i < pairs; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
      const double al = z[static_cast<std::size_t>(
          ws.a_of(k, lhs / ws.n_mecs, lhs % ws.n_mecs))];
      const double ar = z[static_cast<std::size_t>(
          ws.a_of(k, rhs / ws.n_mecs, rhs % ws.n_mecs))];
      return al > ar;
    });
  }

  // Primary rule: per-user argmax. Fallback when its completion is
  // infeasible: walk the per-user top-2 combinations by decreasing relaxed
  // mass before giving up.
  const int choices = std::min(pairs, 2);
  long combos = 1;
  for (int k = 0; k < ws.k_count && combos <= 256; ++k) combos *= choices;
  combos = std::min<long>(combos, 256);

  struct Candidate {
    double score;
    long code;
  };
  std::vector<Candidate> candidates;
  for (long code = 0; code < combos; ++code) {
    long rest = code;
    double score = 0.0;
    for (int k = 0; k < ws.k_count; ++k) {
      const int pick = static_cast<int>(rest % choices);
      rest /= choices;
      const int pair = ranked[static_cast<std::size_t>(k)][static_cast<std::size_t>(pick)];
      const double a =
          z[static_cast<std::size_t>(ws.a_of(k, pair / ws.n_mecs, pair % ws.n_mecs))];
      score += std::log(std::max(a, 1e-300));
    }
    candidates.push_back({score, code});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.code < b.code;
  });

  std::string first_error;
  for (const Candidate& cand : candidates) {
    std::vector<int> pair_choice(static_cast<std::size_t>(ws.k_count));
    long rest = cand.code;
    for (int k = 0; k < ws.k_count; ++k) {
      const int pick = static_cast<int>(rest % choices);
      rest /= choices;
      pair_choice[static_cast<std::size_t>(k)] =
          ranked[static_cast<std::size_t>(k)][static_cast<std::size_t>(pick)];
    }
    try {
      Assignment best = complete_binary(scenario, pair_choice);
      // Deterministic single-user improvement pass: the relaxed solve picks
      // the basin, this removes the residual per-user misassignments.
      for (int sweep = 0; sweep < 3 * ws.k_count; ++sweep) {
        bool improved = false;
        for (int k = 0; k < ws.k_count && !improved; ++k) {
          const int current = pair_choice[static_cast<std::size_t>(k)];
          for (int alt = 0; alt < pairs; ++alt) {
            if (alt == current) continue;
            auto trial_choice = pair_choice;
            trial_choice[static_cast<std::size_t>(k)] = alt;
            try {
              Assignment trial = complete_binary(scenario, trial_choice);
              if (trial.total_power() < best.total_power() * (1.0 - 1e-10)) {
                best = std::move(trial);
                pair_choice = std::move(trial_choice);
                improved = true;
                break;
              }
            } catch (const InfeasibleError&) {
            }
          }
        }
        if (!improved) break;
      }
      return best;
    } catch (const InfeasibleError& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  throw InfeasibleError("psca: rounding yields no feasible completion: " + first_error);
}

}  // namespace edgecloud
