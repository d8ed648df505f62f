#include "edgecloud/reliability.hpp"

#include <algorithm>
#include <cmath>

#include "edgecloud/errors.hpp"
#include "edgecloud/projected_gradient.hpp"

namespace edgecloud {

namespace {

void check_index(const LaplacianSpectrum& spectrum, int i) {
  if (i < 0 || i >= spectrum.size())
    throw SchemaError("perturbation: eigen index out of range");
}

double vector_gap(const LaplacianSpectrum& spectrum, const EdgePerturbation& edge, int i) {
  const auto a = static_cast<std::size_t>(edge.endpoint_a);
  const auto b = static_cast<std::size_t>(edge.endpoint_b);
  return spectrum.eigenvectors(b, static_cast<std::size_t>(i)) -
         spectrum.eigenvectors(a, static_cast<std::size_t>(i));
}

}  // namespace

double eigenvalue_perturbation(const LaplacianSpectrum& spectrum, const EdgePerturbation& edge,
                               int eigen_index) {
  check_index(spectrum, eigen_index);
  if (edge.weight < 0.0) throw SchemaError("perturbation: negative edge weight");
  if (!spectrum.is_isolated(eigen_index))
    throw DegeneracyError("perturbation: eigenvalue " + std::to_string(eigen_index) +
                          " is not separated beyond the certified gap floor");
  const double gap = vector_gap(spectrum, edge, eigen_index);
  const double sign = edge.addition ? 1.0 : -1.0;
  return sign * edge.weight * gap * gap;
}

Vector eigenvector_perturbation(const LaplacianSpectrum& spectrum, const EdgePerturbation& edge,
                                int eigen_index) {
  check_index(spectrum, eigen_index);
  const int n = spectrum.size();
  for (int j = 1; j < n; ++j)
    if (spectrum.eigenvalues[static_cast<std::size_t>(j)] -
            spectrum.eigenvalues[static_cast<std::size_t>(j - 1)] <=
        spectrum.eigengap_floor)
      throw DegeneracyError("perturbation: eigenvector formula requires distinct eigenvalues");

  const double sign = edge.addition ? 1.0 : -1.0;
  const double gap_i = vector_gap(spectrum, edge, eigen_index);
  Vector delta(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    if (j == eigen_index) continue;
    const double gap_j = vector_gap(spectrum, edge, j);
    const double coeff = sign * edge.weight * gap_j * gap_i /
                         (spectrum.eigenvalues[static_cast<std::size_t>(eigen_index)] -
                          spectrum.eigenvalues[static_cast<std::size_t>(j)]);
    if (coeff == 0.0) continue;
    for (int r = 0; r < n; ++r)
      delta[static_cast<std::size_t>(r)] +=
          coeff * spectrum.eigenvectors(static_cast<std::size_t>(r), static_cast<std::size_t>(j));
  }
  return delta;
}

double multi_edge_perturbation(const LaplacianSpectrum& spectrum,
                               const std::vector<EdgePerturbation>& edges, int eigen_index) {
  double acc = 0.0;
  for (const EdgePerturbation& edge : edges) acc += eigenvalue_perturbation(spectrum, edge, eigen_index);
  return acc;
}

double perturbation_centrality(const LaplacianSpectrum& spectrum, const EdgePerturbation& edge,
                               int cluster_count) {
  if (cluster_count < 2) throw SchemaError("perturbation centrality: cluster count must be >= 2");
  const int n = spectrum.size();
  if (cluster_count > n) throw SchemaError("perturbation centrality: cluster count exceeds order");

  // paper indices 2..K are 1..K-1 here; extend across a tied block at the cut
  int cut = cluster_count - 1;
  while (cut + 1 < n &&
         spectrum.eigenvalues[static_cast<std::size_t>(cut + 1)] -
                 spectrum.eigenvalues[static_cast<std::size_t>(cut)] <=
             spectrum.eigengap_floor)
    ++cut;

  double acc = 0.0;
  for (int i = 1; i <= cut; ++i) {
    const double gap = vector_gap(spectrum, edge, i);
    acc += edge.weight * gap * gap;  // |Delta lambda_i| for a deletion
  }
  return acc;
}

void FadingLinkModel::validate() const {
  if (distance <= 0.0 || rate < 0.0 || noise_var <= 0.0 || fading <= 0.0 || power_budget <= 0.0)
    throw SchemaError("fading link: parameters must be positive");
  if (diversity < 1) throw SchemaError("fading link: diversity order must be >= 1");
}

double gamma_cdf(double x, int order, double lambda) {
  if (order < 1) throw SchemaError("gamma cdf: order must be >= 1");
  if (lambda <= 0.0) throw SchemaError("gamma cdf: rate must be positive");
  if (x <= 0.0) return 0.0;
  // F_n(x) = 1 - exp(-lambda x) sum_{j<n} (lambda x)^j / j!
  const double lx = lambda * x;
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < order; ++j) {
    term *= lx / static_cast<double>(j);
    sum += term;
  }
  const double tail = std::exp(-lx) * sum;
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

double gamma_cdf_inverse(double probability, int order, double lambda) {
  if (!(probability > 0.0 && probability < 1.0))
    throw SchemaError("gamma cdf inverse: probability must lie strictly inside (0,1)");
  if (order == 1) return -std::log1p(-probability) / lambda;
  double lo = 0.0, hi = 1.0 / lambda;
  while (gamma_cdf(hi, order, lambda) < probability) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("gamma cdf inverse: bracketing failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_cdf(mid, order, lambda) < probability)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double outage_probability(double transmit_power, const FadingLinkModel& link) {
  link.validate();
  if (transmit_power <= 0.0) throw SchemaError("outage: transmit power must be positive");
  const double snr = transmit_power / (link.noise_var * link.distance * link.distance);
  const double threshold = (std::exp2(link.rate) - 1.0) / snr;
  return gamma_cdf(threshold, link.diversity, link.fading);
}

double power_from_outage(double pout, const FadingLinkModel& link) {
  link.validate();
  const double x = gamma_cdf_inverse(pout, link.diversity, link.fading);
  return link.noise_var * link.distance * link.distance * (std::exp2(link.rate) - 1.0) / x;
}

double expected_connectivity_perturbation(const LaplacianSpectrum& spectrum, const Graph& graph,
                                          const Vector& pouts) {
  if (pouts.size() != graph.edges().size())
    throw SchemaError("expected perturbation: one probability per edge required");
  for (double p : pouts)
    if (p < 0.0 || p > 1.0) throw SchemaError("expected perturbation: probability outside [0,1]");
  double acc = 0.0;
  for (std::size_t m = 0; m < graph.edges().size(); ++m) {
    const Edge& e = graph.edges()[m];
    EdgePerturbation del{e.i, e.j, e.w, false};
    acc += pouts[m] * std::fabs(eigenvalue_perturbation(spectrum, del, 1));
  }
  return acc;
}

namespace {

struct RobustSetup {
  Vector kappa;      // |Delta lambda_2(m)| per edge
  Vector r2;         // squared distances
  double floor = 0.0;
  double lambda2 = 0.0;
  LaplacianSpectrum spectrum;
};

RobustSetup robust_setup(const Graph& graph, const FadingLinkModel& link, double c_max,
                         const Vector& per_edge_distance) {
  link.validate();
  const std::size_t m_count = graph.edges().size();
  if (m_count == 0) throw SchemaError("robust allocation: graph has no edges");
  if (!per_edge_distance.empty() && per_edge_distance.size() != m_count)
    throw SchemaError("robust allocation: distance override size mismatch");

  RobustSetup setup;
  setup.spectrum = eigendecompose(build_laplacian(graph));
  if (setup.spectrum.eigenvalues[1] <= setup.spectrum.eigengap_floor)
    throw InfeasibleError("robust allocation: graph is disconnected (lambda_2 = 0)");
  if (!setup.spectrum.is_isolated(1))
    throw DegeneracyError("robust allocation: lambda_2 and lambda_3 are nearly tied; the "
                          "first-order perturbation is not valid");
  setup.lambda2 = setup.spectrum.eigenvalues[1];

  setup.kappa.resize(m_count);
  setup.r2.resize(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const Edge& e = graph.edges()[m];
    EdgePerturbation del{e.i, e.j, e.w, false};
    setup.kappa[m] = std::fabs(eigenvalue_perturbation(setup.spectrum, del, 1));
    const double r = per_edge_distance.empty() ? link.distance : per_edge_distance[m];
    if (r <= 0.0) throw SchemaError("robust allocation: distances must be positive");
    setup.r2[m] = r * r;
  }
  setup.floor = link.fading / static_cast<double>(link.diversity + 1);

  double floor_budget = 0.0;
  for (double r2 : setup.r2) floor_budget += r2 * setup.floor;
  if (floor_budget > c_max * (1.0 + 1e-12))
    throw InfeasibleError("robust allocation: budget below the convexity floor");
  return setup;
}

RobustAllocation package(const RobustSetup& setup, const FadingLinkModel& link, const Vector& t) {
  RobustAllocation out;
  out.t = t;
  const std::size_t m_count = t.size();
  out.pout.resize(m_count);
  out.power.resize(m_count);
  out.expected_perturbation = 0.0;
  out.total_power = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    out.pout[m] = gamma_cdf(1.0 / t[m], link.diversity, link.fading);
    FadingLinkModel per_link = link;
    per_link.distance = std::sqrt(setup.r2[m]);
    out.power[m] = power_from_outage(std::clamp(out.pout[m], 1e-300, 1.0 - 1e-16), per_link);
    out.expected_perturbation += out.pout[m] * setup.kappa[m];
    out.total_power += out.power[m];
  }
  out.normalized_perturbation = out.expected_perturbation / setup.lambda2;
  return out;
}

}  // namespace

RobustAllocation solve_robust_allocation(const Graph& graph, const FadingLinkModel& link,
                                         double c_max, const Vector& per_edge_distance) {
  RobustSetup setup = robust_setup(graph, link, c_max, per_edge_distance);
  const std::size_t m_count = setup.kappa.size();
  const double lambda = link.fading;
  const int order = link.diversity;

  // pdf of the Gamma(order, lambda) law
  auto gamma_pdf = [&](double x) {
    double dens = lambda;
    for (int j = 1; j < order; ++j) dens *= lambda * x / static_cast<double>(j);
    return dens * std::exp(-lambda * x);
  };

  ProjectedProblem problem;
  problem.dimension = static_cast<int>(m_count);
  problem.objective = [&, m_count](const Vector& t) {
    double acc = 0.0;
    for (std::size_t m = 0; m < m_count; ++m)
      acc += setup.kappa[m] * gamma_cdf(1.0 / t[m], order, lambda);
    return acc;
  };
  problem.gradient = [&, m_count](const Vector& t) {
    Vector grad(m_count);
    for (std::size_t m = 0; m < m_count; ++m)
      grad[m] = -setup.kappa[m] * gamma_pdf(1.0 / t[m]) / (t[m] * t[m]);
    return grad;
  };
  Vector lo(m_count, setup.floor);
  problem.projector = [&, lo](const Vector& t) {
    return project_weighted_budget_with_floor(t, lo, setup.r2, c_max);
  };

  double r2_sum = 0.0;
  for (double r2 : setup.r2) r2_sum += r2;
  Vector t0(m_count);
  const double slack = c_max - setup.floor * r2_sum;
  for (std::size_t m = 0; m < m_count; ++m) t0[m] = setup.floor + slack / r2_sum;

  PgOptions opt;
  opt.tol = 1e-12;
  opt.max_iters = 200'000;
  auto res = solve_projected_gradient(problem, t0, opt);
  if (res.stationarity > 1e-6)
    throw NumericError("robust allocation: projected gradient did not reach stationarity");
  return package(setup, link, res.x);
}

RobustAllocation uniform_power_baseline(const Graph& graph, const FadingLinkModel& link,
                                        double c_max, const Vector& per_edge_distance) {
  RobustSetup setup = robust_setup(graph, link, c_max, per_edge_distance);
  const std::size_t m_count = setup.kappa.size();
  // equal power per link at the full budget: t_m = C_max / (M r_m^2)
  Vector t(m_count);
  for (std::size_t m = 0; m < m_count; ++m)
    t[m] = c_max / (static_cast<double>(m_count) * setup.r2[m]);
  for (double v : t)
    if (v < setup.floor * (1.0 - 1e-12))
      throw InfeasibleError("uniform baseline: equal-power split falls below the convexity floor");
  return package(setup, link, t);
}

}  // namespace edgecloud
