#ifndef EDGECLOUD_OFFLOADING_HPP
#define EDGECLOUD_OFFLOADING_HPP

#include <string>
#include <vector>

#include "edgecloud/matrix.hpp"

namespace edgecloud {

struct OffloadTask {
  double bits = 0.0;              // payload to upload
  double cycles = 0.0;            // server CPU cycles to run the job
  double deadline = 0.0;          // end-to-end budget, seconds
  double power_cap = 0.0;         // watts
  double rx_latency_fixed = 0.0;  // downlink result time, folded into the deadline
};

struct ChannelModel {
  double bandwidth = 0.0;  // Hz
  Matrix alpha;            // K x N_b equivalent gains, 1/watt
};

// alpha = |h|^2 / (d^gamma * noise_var)
double channel_gain(double h_re, double h_im, double distance, double pathloss_exp,
                    double noise_var);

struct EdgeCloudTopology {
  int num_aps = 1;
  int num_mecs = 1;
  Vector mec_capacity;      // cycles/s per server
  Matrix backhaul_latency;  // seconds, num_aps x num_mecs
};

struct OffloadScenario {
  std::vector<OffloadTask> tasks;
  ChannelModel channel;
  EdgeCloudTopology topology;

  int num_users() const { return static_cast<int>(tasks.size()); }
  void validate() const;
  static OffloadScenario from_json(const std::string& text);
};

// log2(1 + alpha * p), bits/s/Hz
double spectral_efficiency(double power, double alpha);

struct SingleMecSolution {
  Vector powers;
  Vector comp_rates;
  Vector eta;  // KKT coefficients: comp_rates[k] = sqrt(w_k eta_k) / sum_j sqrt(w_j eta_j) * F_S
  double total_power = 0.0;
};

// Minimum total transmit power for users sharing one AP and one server, every
// latency constraint binding at the optimum.
SingleMecSolution solve_single_mec(const std::vector<OffloadTask>& tasks, const ChannelModel& ch,
                                   double server_capacity);

// f_k = w_k F_S / sum_j w_j
Vector proportional_rate_baseline(const std::vector<OffloadTask>& tasks, double server_capacity);

// sum_nm (a_nm + eps)^p - c_eps; zero exactly at binary assignments.
double penalty_value(const Vector& assignment_slice, double eps, double p_exp);
Vector penalty_gradient(const Vector& assignment_slice, double eps, double p_exp);

struct Assignment {
  int num_users = 0, num_aps = 0, num_mecs = 0;
  Vector a;            // user-major, then AP, then server
  Vector powers;       // watts per user
  Matrix comp_rates;   // num_mecs x num_users
  bool binary = false;

  double& at(int k, int n, int m) { return a[index(k, n, m)]; }
  double at(int k, int n, int m) const { return a[index(k, n, m)]; }
  std::size_t index(int k, int n, int m) const {
    return static_cast<std::size_t>((k * num_aps + n) * num_mecs + m);
  }
  // For binary assignments: chosen (ap, server) of user k.
  std::pair<int, int> pair_of(int k) const;
  double total_power() const;
};

struct PscaOptions {
  double sigma0 = 1e-2;
  double sigma_growth = 8.0;
  double eps = 1e-2;
  double p_exp = 0.025;
  double binarity_gap = 1e-3;
  double outer_tol = 5e-4;
  int max_outer = 5;
  int max_stages = 7;
};

struct PscaTrace {
  struct Entry {
    int stage = 0;
    double sigma = 0.0;
    double objective_plus_penalty = 0.0;  // f + sigma * P_eps at the iterate
    double total_power = 0.0;
    double binarity_gap = 0.0;
    double violation = 0.0;
  };
  std::vector<Entry> entries;
};

// Penalty successive convex approximation for the joint assignment problem;
// returns a rounded binary assignment with powers and rates re-optimized.
Assignment solve_multi_mec_psca(const OffloadScenario& scenario, const PscaOptions& options = {},
                                PscaTrace* trace = nullptr);

// Global optimum by enumerating all (N_b*N_c)^K binary assignments.
Assignment exhaustive_baseline(const OffloadScenario& scenario);

// Strongest-channel association; joint=true co-optimizes powers and rates per
// server, joint=false uses proportional rates and per-user minimal powers.
Assignment snr_association_baseline(const OffloadScenario& scenario, bool joint);

struct AssignmentCheck {
  bool feasible = true;
  std::string violation;
};

// Independent validator for the original mixed-binary constraints i)-iv).
AssignmentCheck validate_assignment(const OffloadScenario& scenario, const Assignment& assignment,
                                    double tol = 1e-7);

// Smallest factor t >= 1 such that inflating every deadline by t makes the
// single-server instance feasible; infinity when no inflation helps.
double minimal_deadline_inflation(const std::vector<OffloadTask>& tasks, const ChannelModel& ch,
                                  double server_capacity);

}  // namespace edgecloud

#endif
