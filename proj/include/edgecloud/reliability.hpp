#ifndef EDGECLOUD_RELIABILITY_HPP
#define EDGECLOUD_RELIABILITY_HPP

#include <string>
#include <vector>

#include "edgecloud/graph.hpp"
#include "edgecloud/matrix.hpp"

namespace edgecloud {

// Rank-one Laplacian perturbation of a single edge.
struct EdgePerturbation {
  int endpoint_a = 0;
  int endpoint_b = 0;
  double weight = 1.0;
  bool addition = false;  // default: deletion
};

// First-order eigenvalue shift: -w [u_i(b) - u_i(a)]^2 for a deletion, the
// opposite sign for an addition. Valid only for eigenvalues separated by
// more than the certified gap floor.
double eigenvalue_perturbation(const LaplacianSpectrum& spectrum, const EdgePerturbation& edge,
                               int eigen_index);

// First-order eigenvector shift, orthogonal to u_i; requires all eigenvalues
// pairwise distinct.
Vector eigenvector_perturbation(const LaplacianSpectrum& spectrum, const EdgePerturbation& edge,
                                int eigen_index);

double multi_edge_perturbation(const LaplacianSpectrum& spectrum,
                               const std::vector<EdgePerturbation>& edges, int eigen_index);

// p_K(m) = sum_{i=2..K} |Delta lambda_i(m)| in the paper's 1-based indexing.
// A tie across the cut extends the sum over the whole tied block, which keeps
// the value basis-independent (complete graphs score every edge equally).
double perturbation_centrality(const LaplacianSpectrum& spectrum, const EdgePerturbation& edge,
                               int cluster_count);

struct FadingLinkModel {
  double distance = 1.0;      // r_m, meters
  double rate = 1.0;          // R, bits/s/Hz
  double noise_var = 1.0;     // sigma_n^2, watts
  double fading = 1.0;        // lambda, 1/power
  int diversity = 1;          // n = n_T * n_R independent channels
  double power_budget = 1.0;  // P_Tmax, watts

  void validate() const;
};

// Gamma CDF of integer order n: F_n(x; lambda).
double gamma_cdf(double x, int order, double lambda);
double gamma_cdf_inverse(double probability, int order, double lambda);

// P(capacity < R) for the link at the given transmit power.
double outage_probability(double transmit_power, const FadingLinkModel& link);

// Transmit power achieving the target outage probability.
double power_from_outage(double pout, const FadingLinkModel& link);

// sum_m pout_m |Delta lambda_2(m)|: first-order expected connectivity drop
// under independent single-link failures.
double expected_connectivity_perturbation(const LaplacianSpectrum& spectrum, const Graph& graph,
                                          const Vector& pouts);

struct RobustAllocation {
  Vector t;       // per edge, 1 / F_n^{-1}(pout)
  Vector pout;    // per edge
  Vector power;   // watts per edge
  double expected_perturbation = 0.0;   // objective value
  double normalized_perturbation = 0.0; // divided by lambda_2
  double total_power = 0.0;
};

// min sum_m F_n(1/t_m) |Delta lambda_2(m)| over the budgeted region
// { sum r_m^2 t_m <= C_max, t_m >= lambda/(n+1) } by projected gradient.
// per_edge_distance may be empty (all distances 1).
RobustAllocation solve_robust_allocation(const Graph& graph, const FadingLinkModel& link,
                                         double c_max, const Vector& per_edge_distance = {});

// Equal transmit power on every link at the same total budget.
RobustAllocation uniform_power_baseline(const Graph& graph, const FadingLinkModel& link,
                                        double c_max, const Vector& per_edge_distance = {});

}  // namespace edgecloud

#endif
