#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "edgecloud/errors.hpp"
#include "edgecloud/offloading.hpp"
#include "edgecloud/rng.hpp"
#include "support/oracles.hpp"

using namespace edgecloud;

namespace {

OffloadTask make_task(double bits, double cycles, double deadline, double cap) {
  OffloadTask t;
  t.bits = bits;
  t.cycles = cycles;
  t.deadline = deadline;
  t.power_cap = cap;
  return t;
}

ChannelModel single_ap_channel(const std::vector<double>& alpha, double bandwidth) {
  ChannelModel ch;
  ch.bandwidth = bandwidth;
  ch.alpha = Matrix(alpha.size(), 1);
  for (std::size_t k = 0; k < alpha.size(); ++k) ch.alpha(k, 0) = alpha[k];
  return ch;
}

// Random feasible multi-AP scenario in SI-ish units.
OffloadScenario random_scenario(Rng& rng, int k_count, int n_aps, int n_mecs,
                                const Vector& capacities, double deadline, double cap) {
  OffloadScenario s;
  for (int k = 0; k < k_count; ++k)
    s.tasks.push_back(make_task(rng.uniform(2e5, 8e5), rng.uniform(3e7, 9e7), deadline, cap));
  s.channel.bandwidth = 1e7;
  s.channel.alpha = Matrix(static_cast<std::size_t>(k_count), static_cast<std::size_t>(n_aps));
  for (int k = 0; k < k_count; ++k)
    for (int n = 0; n < n_aps; ++n) {
      const double h2 = rng.exponential(1.0);
      const double dist = rng.uniform(60.0, 220.0);
      s.channel.alpha(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) =
          channel_gain(std::sqrt(h2), 0.0, dist, 3.0, 1e-9);
    }
  s.topology.num_aps = n_aps;
  s.topology.num_mecs = n_mecs;
  s.topology.mec_capacity = capacities;
  s.topology.backhaul_latency = Matrix(static_cast<std::size_t>(n_aps),
                                       static_cast<std::size_t>(n_mecs));
  for (int n = 0; n < n_aps; ++n)
    for (int m = 0; m < n_mecs; ++m)
      s.topology.backhaul_latency(static_cast<std::size_t>(n), static_cast<std::size_t>(m)) =
          n == m ? 0.0 : 0.01;
  return s;
}

}  // namespace

TEST_CASE("spectral efficiency basics") {
  CHECK(spectral_efficiency(0.0, 2.0) == doctest::Approx(0.0));
  CHECK(spectral_efficiency(0.5, 2.0) == doctest::Approx(1.0));   // alpha p = 1
  CHECK(spectral_efficiency(1.5, 2.0) == doctest::Approx(2.0));   // alpha p = 3
  CHECK(spectral_efficiency(2.0, 1.0) > spectral_efficiency(1.0, 1.0));
  CHECK_THROWS_AS(spectral_efficiency(-0.1, 1.0), SchemaError);
}

TEST_CASE("channel gain definition") {
  const double h_re = 0.3, h_im = -0.4, d = 35.0, gamma = 3.5, noise = 1e-9;
  const double expected = (0.09 + 0.16) / (std::pow(d, gamma) * noise);
  CHECK(channel_gain(h_re, h_im, d, gamma, noise) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(channel_gain(1.0, 0.0, 0.0, 2.0, 1.0), SchemaError);
}

TEST_CASE("single server, one user: full capacity and binding power") {
  auto task = make_task(5e5, 1e8, 0.1, 0.5);
  auto ch = single_ap_channel({200.0}, 1e7);
  const double capacity = 1.5e9;
  auto sol = solve_single_mec({task}, ch, capacity);
  CHECK(sol.comp_rates[0] == doctest::Approx(capacity).epsilon(1e-9));
  const double c = task.bits / ch.bandwidth;
  const double expected_power =
      (std::exp2(c / (task.deadline - task.cycles / capacity)) - 1.0) / 200.0;
  CHECK(sol.powers[0] == doctest::Approx(expected_power).epsilon(1e-9));

  // bisection oracle on p: smallest power whose latency meets the deadline
  double lo = 0.0, hi = task.power_cap;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double latency = c / std::log2(1.0 + 200.0 * mid) + task.cycles / capacity;
    (latency > task.deadline ? lo : hi) = mid;
  }
  CHECK(sol.powers[0] == doctest::Approx(hi).epsilon(1e-8));
}

TEST_CASE("single server: identical users split the capacity") {
  auto task = make_task(4e5, 8e7, 0.08, 0.4);
  auto ch = single_ap_channel({150.0, 150.0}, 1e7);
  auto sol = solve_single_mec({task, task}, ch, 2.5e9);
  CHECK(sol.comp_rates[0] == doctest::Approx(1.25e9).epsilon(1e-7));
  CHECK(sol.comp_rates[1] == doctest::Approx(1.25e9).epsilon(1e-7));
  CHECK(sol.powers[0] == doctest::Approx(sol.powers[1]).epsilon(1e-9));
}

TEST_CASE("single server: latency binds and closed form matches Lagrange shape") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int k_count = 2 + static_cast<int>(rng.below(3));
    std::vector<OffloadTask> tasks;
    std::vector<double> alpha;
    for (int k = 0; k < k_count; ++k) {
      tasks.push_back(make_task(rng.uniform(2e5, 6e5), rng.uniform(4e7, 1.5e8), 0.12, 50.0));
      alpha.push_back(rng.uniform(100.0, 900.0));
    }
    auto ch = single_ap_channel(alpha, 1e7);
    const double capacity = 2.5e9;
    SingleMecSolution sol;
    try {
      sol = solve_single_mec(tasks, ch, capacity);
    } catch (const InfeasibleError&) {
      continue;
    }

    double rate_sum = 0.0;
    double sqrt_sum = 0.0;
    for (int k = 0; k < k_count; ++k)
      sqrt_sum += std::sqrt(tasks[static_cast<std::size_t>(k)].cycles *
                            sol.eta[static_cast<std::size_t>(k)]);
    for (int k = 0; k < k_count; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      rate_sum += sol.comp_rates[ku];
      const double latency =
          tasks[ku].bits / ch.bandwidth / std::log2(1.0 + alpha[ku] * sol.powers[ku]) +
          tasks[ku].cycles / sol.comp_rates[ku];
      CHECK(std::fabs(latency - tasks[ku].deadline) <= 1e-6 * tasks[ku].deadline);
      // f_k = sqrt(w_k eta_k) / sum_j sqrt(w_j eta_j) * F_S  (no caps active here)
      const double closed = std::sqrt(tasks[ku].cycles * sol.eta[ku]) / sqrt_sum * capacity;
      CHECK(sol.comp_rates[ku] == doctest::Approx(closed).epsilon(1e-6));
    }
    CHECK(rate_sum == doctest::Approx(capacity).epsilon(1e-9));
  }
}

TEST_CASE("single server matches the numeric oracle on random instances") {
  Rng rng(77);
  int tested = 0;
  for (int trial = 0; trial < 30 && tested < 12; ++trial) {
    const int k_count = 3;
    std::vector<OffloadTask> tasks;
    std::vector<double> c, w, leff, alpha, pcap;
    for (int k = 0; k < k_count; ++k) {
      tasks.push_back(make_task(rng.uniform(2e5, 7e5), rng.uniform(2e7, 8e7),
                                rng.uniform(0.08, 0.15), 0.8));
      c.push_back(tasks.back().bits / 1e7);
      w.push_back(tasks.back().cycles);
      leff.push_back(tasks.back().deadline);
      alpha.push_back(rng.uniform(80.0, 600.0));
      pcap.push_back(tasks.back().power_cap);
    }
    auto ch = single_ap_channel(alpha, 1e7);
    const double capacity = 4e9;
    SingleMecSolution sol;
    try {
      sol = solve_single_mec(tasks, ch, capacity);
    } catch (const InfeasibleError&) {
      continue;
    }
    ++tested;
    const double oracle =
        test_support::single_mec_numeric_total_power(c, w, leff, alpha, pcap, capacity);
    CHECK(std::fabs(sol.total_power - oracle) <= 1e-5 * oracle);
  }
  CHECK(tested >= 8);
}

TEST_CASE("single server: infeasibility reports the violating user and inflation") {
  auto ok = make_task(3e5, 5e7, 0.1, 0.5);
  auto bad = make_task(3e5, 5e9, 0.1, 0.5);  // workload alone needs 50x the capacity
  auto ch = single_ap_channel({200.0, 200.0}, 1e7);
  try {
    solve_single_mec({ok, bad}, ch, 1e9);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("user 1") != std::string::npos);
    CHECK(msg.find("inflation") != std::string::npos);
  }
}

TEST_CASE("proportional baseline") {
  auto ch_unused = make_task(1.0, 1.0, 1.0, 1.0);
  (void)ch_unused;
  std::vector<OffloadTask> equal{make_task(1, 1, 1, 1), make_task(1, 1, 1, 1)};
  Vector f = proportional_rate_baseline(equal, 10.0);
  CHECK(f[0] == doctest::Approx(5.0));
  CHECK(f[1] == doctest::Approx(5.0));

  std::vector<OffloadTask> skew{make_task(1, 1, 1, 1), make_task(1, 3, 1, 1)};
  f = proportional_rate_baseline(skew, 4.0);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(3.0));

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<OffloadTask> tasks;
    const int k_count = 1 + static_cast<int>(rng.below(6));
    for (int k = 0; k < k_count; ++k) tasks.push_back(make_task(1, rng.uniform(0.1, 9.0), 1, 1));
    Vector rates = proportional_rate_baseline(tasks, 3.7e9);
    double sum = 0.0;
    for (double r : rates) sum += r;
    CHECK(sum == doctest::Approx(3.7e9).epsilon(1e-12));
  }

  std::vector<OffloadTask> zero{make_task(1, 0, 1, 1)};
  CHECK_THROWS_AS(proportional_rate_baseline(zero, 1.0), SchemaError);
}

TEST_CASE("penalty: zero exactly at binary points") {
  for (int hot = 0; hot < 4; ++hot) {
    Vector a(4, 0.0);
    a[static_cast<std::size_t>(hot)] = 1.0;
    CHECK(std::fabs(penalty_value(a, 0.01, 0.025)) <= 1e-12);
    CHECK(std::fabs(penalty_value(a, 0.1, 0.5)) <= 1e-12);
  }
}

TEST_CASE("penalty: split assignment is penalized, binary is the minimum") {
  // N_b*N_c = 2, eps = 0.1, p = 0.5, a = (0.5, 0.5)
  const double value = penalty_value({0.5, 0.5}, 0.1, 0.5);
  const double expected = 2.0 * std::sqrt(0.6) - (std::sqrt(1.1) + std::sqrt(0.1));
  CHECK(value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(value > 0.0);

  // enumeration: binary vectors attain the minimum of sum (a+eps)^p on the slice
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    Vector a(6, 0.0);
    double sum = 0.0;
    for (auto& v : a) sum += (v = rng.uniform(0.0, 1.0));
    for (auto& v : a) v /= sum;  // random simplex point
    CHECK(penalty_value(a, 0.05, 0.3) >= -1e-12);
  }
  CHECK_THROWS_AS(penalty_value({1.0, 0.0}, 0.1, 1.5), SchemaError);
  CHECK_THROWS_AS(penalty_value({1.0, 0.0}, -0.1, 0.5), SchemaError);
}

TEST_CASE("penalty gradient matches central differences") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Vector a(5);
    double sum = 0.0;
    for (auto& v : a) sum += (v = rng.uniform(0.05, 1.0));
    for (auto& v : a) v /= sum;
    const double eps = 0.02, p = 0.4;
    Vector grad = penalty_gradient(a, eps, p);
    auto value = [&](const Vector& x) {
      double acc = 0.0;
      for (double v : x) acc += std::pow(v + eps, p);
      return acc;
    };
    Vector numeric = test_support::central_difference_gradient(value, a, 1e-6);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(std::fabs(grad[i] - numeric[i]) <= 1e-6);
  }
}

TEST_CASE("psca degenerates to the single-server solve for one user, one pair") {
  OffloadScenario s;
  s.tasks.push_back(make_task(5e5, 1e8, 0.1, 0.5));
  s.channel = single_ap_channel({300.0}, 1e7);
  s.topology.num_aps = 1;
  s.topology.num_mecs = 1;
  s.topology.mec_capacity = {1.5e9};
  s.topology.backhaul_latency = Matrix(1, 1);

  auto psca = solve_multi_mec_psca(s);
  auto single = solve_single_mec(s.tasks, s.channel, 1.5e9);
  CHECK(psca.at(0, 0, 0) == doctest::Approx(1.0));
  CHECK(psca.total_power() == doctest::Approx(single.total_power).epsilon(1e-9));
  CHECK(validate_assignment(s, psca).feasible);
}

TEST_CASE("psca: symmetric users and disjoint pairs reach the paired optimum") {
  OffloadScenario s;
  s.tasks.push_back(make_task(5e5, 6e7, 0.1, 0.5));
  s.tasks.push_back(make_task(5e5, 6e7, 0.1, 0.5));
  s.channel.bandwidth = 1e7;
  s.channel.alpha = Matrix(2, 2);
  s.channel.alpha(0, 0) = 300.0;
  s.channel.alpha(0, 1) = 300.0;
  s.channel.alpha(1, 0) = 300.0;
  s.channel.alpha(1, 1) = 300.0;
  s.topology.num_aps = 2;
  s.topology.num_mecs = 2;
  s.topology.mec_capacity = {1.2e9, 1.2e9};
  s.topology.backhaul_latency = Matrix(2, 2);
  s.topology.backhaul_latency(0, 1) = 0.09;
  s.topology.backhaul_latency(1, 0) = 0.09;

  auto psca = solve_multi_mec_psca(s);
  auto best = exhaustive_baseline(s);
  CHECK(validate_assignment(s, psca).feasible);
  CHECK(psca.total_power() == doctest::Approx(best.total_power()).epsilon(1e-6));
  // the two users must not share a server
  auto [n0, m0] = psca.pair_of(0);
  auto [n1, m1] = psca.pair_of(1);
  CHECK(m0 != m1);
}

TEST_CASE("psca stays within 10% of exhaustive search on random instances") {
  Rng rng(2717);
  int tested = 0, close = 0;
  for (int trial = 0; trial < 30 && tested < 10; ++trial) {
    OffloadScenario s = random_scenario(rng, 3, 2, 2, {2.7e9, 6e8}, 0.12, 0.2);
    Assignment best;
    try {
      best = exhaustive_baseline(s);
    } catch (const InfeasibleError&) {
      continue;
    }
    ++tested;
    PscaTrace trace;
    auto psca = solve_multi_mec_psca(s, {}, &trace);
    CHECK(validate_assignment(s, psca).feasible);
    CHECK(psca.total_power() >= best.total_power() * (1.0 - 1e-9));
    if (psca.total_power() <= best.total_power() * 1.10) ++close;

    // surrogate objective f + sigma * P_eps is monotone within a sigma stage
    for (std::size_t i = 1; i < trace.entries.size(); ++i) {
      if (trace.entries[i].stage != trace.entries[i - 1].stage) continue;
      CHECK(trace.entries[i].objective_plus_penalty <=
            trace.entries[i - 1].objective_plus_penalty + 1e-9);
    }
  }
  CHECK(tested >= 5);
  CHECK(close >= tested - 1);
}

TEST_CASE("exhaustive baseline handles degenerate and budget cases") {
  Rng rng(99);
  OffloadScenario s = random_scenario(rng, 1, 2, 2, {2e9, 2e9}, 0.1, 0.4);
  auto best = exhaustive_baseline(s);
  // K=1 must equal the best single-server solve over the four pairs
  double manual = kInf;
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m) {
      OffloadTask t = s.tasks[0];
      t.deadline -= s.topology.backhaul_latency(static_cast<std::size_t>(n),
                                                static_cast<std::size_t>(m));
      auto ch = single_ap_channel({s.channel.alpha(0, static_cast<std::size_t>(n))},
                                  s.channel.bandwidth);
      try {
        manual = std::min(
            manual,
            solve_single_mec({t}, ch, s.topology.mec_capacity[static_cast<std::size_t>(m)])
                .total_power);
      } catch (const InfeasibleError&) {
      }
    }
  CHECK(best.total_power() == doctest::Approx(manual).epsilon(1e-9));

  OffloadScenario big = random_scenario(rng, 12, 4, 4, Vector(4, 1e9), 0.1, 0.4);
  CHECK_THROWS_AS(exhaustive_baseline(big), SchemaError);  // 16^12 combinations
}

TEST_CASE("snr association picks the strongest channel with deterministic ties") {
  Rng rng(123);
  OffloadScenario s = random_scenario(rng, 3, 2, 2, {2e9, 2e9}, 0.15, 0.5);
  for (int k = 0; k < 3; ++k) {
    s.channel.alpha(static_cast<std::size_t>(k), 0) = 500.0;
    s.channel.alpha(static_cast<std::size_t>(k), 1) = 10.0;
  }
  auto joint = snr_association_baseline(s, true);
  for (int k = 0; k < 3; ++k) CHECK(joint.pair_of(k).first == 0);

  // exact tie: lowest AP index wins
  for (int k = 0; k < 3; ++k) s.channel.alpha(static_cast<std::size_t>(k), 1) = 500.0;
  auto tied = snr_association_baseline(s, true);
  for (int k = 0; k < 3; ++k) CHECK(tied.pair_of(k).first == 0);
}

TEST_CASE("joint snr dominates disjoint snr when both are feasible") {
  Rng rng(421);
  int compared = 0;
  for (int trial = 0; trial < 40 && compared < 6; ++trial) {
    OffloadScenario s = random_scenario(rng, 4, 2, 2, {2.7e9, 6e8}, 0.2, 0.3);
    try {
      auto joint = snr_association_baseline(s, true);
      auto disjoint = snr_association_baseline(s, false);
      CHECK(joint.total_power() <= disjoint.total_power() * (1.0 + 1e-9));
      CHECK(validate_assignment(s, joint).feasible);
      CHECK(validate_assignment(s, disjoint).feasible);
      ++compared;
    } catch (const InfeasibleError&) {
    }
  }
  CHECK(compared >= 3);
}

TEST_CASE("scenario json parsing and validation") {
  const char* text = R"({
    "users": [{"b": 5e5, "w": 1e8, "L": 0.1, "Pcap": 0.5}],
    "B": 1e7,
    "alpha": [[300.0, 120.0]],
    "F": [1.5e9, 6e8],
    "T_B": [[0.0, 0.01], [0.01, 0.0]]
  })";
  auto s = OffloadScenario::from_json(text);
  CHECK(s.num_users() == 1);
  CHECK(s.topology.num_aps == 2);
  CHECK(s.topology.num_mecs == 2);
  CHECK(s.channel.alpha(0, 1) == doctest::Approx(120.0));

  CHECK_THROWS_AS(OffloadScenario::from_json("{}"), SchemaError);
  CHECK_THROWS_AS(OffloadScenario::from_json("not json"), SchemaError);
  const char* negative = R"({
    "users": [{"b": -1, "w": 1e8, "L": 0.1, "Pcap": 0.5}],
    "B": 1e7, "alpha": [[300.0]], "F": [1e9], "T_B": [[0.0]]
  })";
  CHECK_THROWS_AS(OffloadScenario::from_json(negative), SchemaError);
}
