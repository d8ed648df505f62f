#include "edgecloud/rem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "edgecloud/errors.hpp"
#include "edgecloud/lp.hpp"
#include "edgecloud/rng.hpp"

namespace edgecloud {

void FieldGrid::validate() const {
  if (positions.size() != field.size())
    throw SchemaError("field grid: positions and field sizes differ");
  for (double v : field)
    if (!std::isfinite(v)) throw SchemaError("field grid: non-finite field value");
  std::set<std::pair<double, double>> seen;
  for (const auto& p : positions)
    if (!seen.insert({p[0], p[1]}).second)
      throw SchemaError("field grid: duplicate position");
}

Matrix build_similarity_adjacency(const FieldGrid& grid, double sigma, double r0,
                                  bool squared_distance_threshold) {
  if (sigma <= 0.0 || r0 <= 0.0) throw SchemaError("similarity adjacency: sigma and R0 must be positive");
  grid.validate();
  const int n = grid.size();
  Matrix adj(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = grid.positions[static_cast<std::size_t>(i)][0] -
                        grid.positions[static_cast<std::size_t>(j)][0];
      const double dy = grid.positions[static_cast<std::size_t>(i)][1] -
                        grid.positions[static_cast<std::size_t>(j)][1];
      const double dist2 = dx * dx + dy * dy;
      const bool in_range = squared_distance_threshold ? dist2 <= r0 : std::sqrt(dist2) <= r0;
      if (!in_range) continue;
      const double diff = grid.field[static_cast<std::size_t>(i)] -
                          grid.field[static_cast<std::size_t>(j)];
      const double w = std::exp(-diff * diff / (2.0 * sigma * sigma));
      adj(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = w;
      adj(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = w;
    }
  return adj;
}

REMDictionary build_dictionary(const std::vector<FieldGrid>& per_ap_grids, double sigma, double r0,
                               int bandwidth, bool squared_distance_threshold) {
  if (per_ap_grids.empty()) throw SchemaError("dictionary: need at least one AP grid");
  const int n = per_ap_grids.front().size();
  for (const FieldGrid& g : per_ap_grids)
    if (g.size() != n) throw SchemaError("dictionary: AP grids must share the vertex set");
  if (bandwidth < 1 || bandwidth >= n)
    throw SchemaError("dictionary: bandwidth must satisfy 1 <= K < N");

  REMDictionary dict;
  dict.num_vertices = n;
  dict.num_aps = static_cast<int>(per_ap_grids.size());
  dict.requested_bandwidth = bandwidth;

  int total = 0;
  std::vector<LaplacianSpectrum> spectra;
  for (const FieldGrid& g : per_ap_grids) {
    Matrix adjacency = build_similarity_adjacency(g, sigma, r0, squared_distance_threshold);
    // adjacency graph -> Laplacian: reuse graph-core via the dense route
    Matrix lap(adjacency.rows(), adjacency.cols());
    for (std::size_t i = 0; i < adjacency.rows(); ++i) {
      double degree = 0.0;
      for (std::size_t j = 0; j < adjacency.cols(); ++j) {
        degree += adjacency(i, j);
        lap(i, j) = -adjacency(i, j);
      }
      lap(i, i) = degree;
    }
    spectra.push_back(eigendecompose(lap));

    const LaplacianSpectrum& spec = spectra.back();
    int k_eff = bandwidth;
    bool extended = false;
    while (k_eff < n &&
           spec.eigenvalues[static_cast<std::size_t>(k_eff)] -
                   spec.eigenvalues[static_cast<std::size_t>(k_eff - 1)] <=
               spec.eigengap_floor) {
      ++k_eff;
      extended = true;
    }
    dict.effective_bandwidth.push_back(k_eff);
    dict.tie_extended.push_back(extended);
    total += k_eff;
  }

  // Every connected AP graph contributes the same constant eigenvector; keep
  // it once so the stacked dictionary can reach full column rank.
  const double constant_entry = 1.0 / std::sqrt(static_cast<double>(n));
  auto is_constant_column = [&](const LaplacianSpectrum& spec, int c) {
    for (int i = 0; i < n; ++i)
      if (std::fabs(spec.eigenvectors(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) -
                    constant_entry) > 1e-9)
        return false;
    return true;
  };

  std::vector<std::pair<int, int>> kept;
  bool constant_seen = false;
  for (std::size_t m = 0; m < spectra.size(); ++m) {
    const int k_eff = dict.effective_bandwidth[m];
    Matrix basis(static_cast<std::size_t>(n), static_cast<std::size_t>(k_eff));
    for (int c = 0; c < k_eff; ++c) {
      for (int i = 0; i < n; ++i)
        basis(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) =
            spectra[m].eigenvectors(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
      const bool constant = is_constant_column(spectra[m], c);
      if (constant && constant_seen) continue;
      if (constant) constant_seen = true;
      kept.push_back({static_cast<int>(m), c});
    }
    dict.per_ap.push_back(std::move(basis));
  }
  (void)total;

  dict.stacked = Matrix(static_cast<std::size_t>(n), kept.size());
  for (std::size_t col = 0; col < kept.size(); ++col) {
    const auto [m, c] = kept[col];
    for (int i = 0; i < n; ++i)
      dict.stacked(static_cast<std::size_t>(i), col) =
          spectra[static_cast<std::size_t>(m)].eigenvectors(static_cast<std::size_t>(i),
                                                            static_cast<std::size_t>(c));
  }
  dict.column_origin = std::move(kept);
  return dict;
}

SamplingMask SamplingMask::from_indices(std::vector<int> indices, int num_vertices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (int idx : indices)
    if (idx < 0 || idx >= num_vertices) throw SchemaError("sampling mask: index out of range");
  SamplingMask mask;
  mask.observed = std::move(indices);
  return mask;
}

Vector sample_field(const Vector& x, const SamplingMask& mask, double noise_std,
                    std::uint64_t seed) {
  if (mask.observed.empty()) throw SchemaError("sample_field: empty mask");
  for (int idx : mask.observed)
    if (idx < 0 || idx >= static_cast<int>(x.size()))
      throw SchemaError("sample_field: mask outside the signal");
  Vector y(x.size(), 0.0);
  Rng rng(seed);
  for (int idx : mask.observed)
    y[static_cast<std::size_t>(idx)] =
        x[static_cast<std::size_t>(idx)] + (noise_std > 0.0 ? noise_std * rng.normal() : 0.0);
  return y;
}

BpResult recover_bp(const Vector& y, const SamplingMask& mask, const REMDictionary& dictionary,
                    double noise_std) {
  if (mask.observed.empty()) throw SchemaError("recover_bp: empty mask");
  if (static_cast<int>(y.size()) != dictionary.num_vertices)
    throw SchemaError("recover_bp: observation length mismatch");

  const int cols = dictionary.total_columns();
  LinearProgram lp(2 * cols);  // s = s+ - s-, both halves nonnegative
  for (int c = 0; c < 2 * cols; ++c) {
    lp.set_bounds(c, 0.0, kInf);
    lp.set_objective(c, 1.0);
  }
  for (int row_idx : mask.observed) {
    std::vector<std::pair<int, double>> row;
    for (int c = 0; c < cols; ++c) {
      const double u = dictionary.stacked(static_cast<std::size_t>(row_idx),
                                          static_cast<std::size_t>(c));
      if (u == 0.0) continue;
      row.push_back({c, u});
      row.push_back({cols + c, -u});
    }
    const double target = y[static_cast<std::size_t>(row_idx)];
    if (noise_std > 0.0) {
      const double band = 3.0 * noise_std;
      std::vector<std::pair<int, double>> lower = row;
      lp.add_le_row(std::move(row), target + band);
      for (auto& [var, coeff] : lower) coeff = -coeff;
      lp.add_le_row(std::move(lower), band - target);
    } else {
      lp.add_eq_row(std::move(row), target);
    }
  }

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw InfeasibleError("recover_bp: observations are inconsistent with the dictionary");

  BpResult out;
  out.coefficients.assign(static_cast<std::size_t>(cols), 0.0);
  for (int c = 0; c < cols; ++c)
    out.coefficients[static_cast<std::size_t>(c)] =
        sol.x[static_cast<std::size_t>(c)] - sol.x[static_cast<std::size_t>(cols + c)];
  out.reconstruction = multiply(dictionary.stacked, out.coefficients);
  return out;
}

SamplingCheck check_sampling(const SamplingMask& mask, const REMDictionary& dictionary) {
  SamplingCheck check;
  const int cols = dictionary.total_columns();
  if (cols == 0 || mask.observed.empty()) return check;

  // rank of the observed-row submatrix via the Gram spectrum
  Matrix gram(static_cast<std::size_t>(cols), static_cast<std::size_t>(cols));
  for (int i : mask.observed)
    for (int a = 0; a < cols; ++a) {
      const double ua = dictionary.stacked(static_cast<std::size_t>(i), static_cast<std::size_t>(a));
      if (ua == 0.0) continue;
      for (int b = a; b < cols; ++b)
        gram(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) +=
            ua * dictionary.stacked(static_cast<std::size_t>(i), static_cast<std::size_t>(b));
    }
  for (int a = 0; a < cols; ++a)
    for (int b = 0; b < a; ++b)
      gram(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) =
          gram(static_cast<std::size_t>(b), static_cast<std::size_t>(a));

  LaplacianSpectrum spec = eigendecompose(gram);
  const double lambda_max = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.back();
  const double tol = std::max(1e-10 * std::max(lambda_max, 1.0),
                              static_cast<double>(cols) * 1e-14 * lambda_max);
  int rank = 0;
  for (double lambda : spec.eigenvalues) rank += lambda > tol ? 1 : 0;
  check.rank = rank;
  check.recoverable = rank == cols;
  return check;
}

double nmse(const Vector& x_hat, const Vector& x_true) {
  if (x_hat.size() != x_true.size()) throw SchemaError("nmse: length mismatch");
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < x_true.size(); ++i) {
    err += (x_hat[i] - x_true[i]) * (x_hat[i] - x_true[i]);
    ref += x_true[i] * x_true[i];
  }
  if (ref == 0.0) throw SchemaError("nmse: true signal has zero norm");
  return err / ref;
}

SyntheticRem generate_synthetic_rem(int num_vertices, int num_aps, double extent,
                                    std::uint64_t seed) {
  if (num_vertices < 4) throw SchemaError("synthetic rem: need at least 4 vertices");
  if (num_aps < 1) throw SchemaError("synthetic rem: need at least one AP");
  Rng rng(seed);

  // jittered lattice covering the extent
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_vertices))));
  const double cell = extent / static_cast<double>(side);
  std::vector<std::array<double, 2>> positions;
  for (int r = 0; r < side && static_cast<int>(positions.size()) < num_vertices; ++r)
    for (int c = 0; c < side && static_cast<int>(positions.size()) < num_vertices; ++c)
      positions.push_back({(c + 0.5) * cell + rng.uniform(-0.25, 0.25) * cell,
                           (r + 0.5) * cell + rng.uniform(-0.25, 0.25) * cell});

  SyntheticRem out;
  for (int m = 0; m < num_aps; ++m) {
    const double angle = 2.0 * 3.14159265358979323846 *
                         (static_cast<double>(m) + 0.5) / static_cast<double>(num_aps);
    out.ap_positions.push_back({extent * 0.5 + 0.45 * extent * std::cos(angle),
                                extent * 0.5 + 0.45 * extent * std::sin(angle)});
  }

  for (int m = 0; m < num_aps; ++m) {
    FieldGrid grid;
    grid.positions = positions;
    grid.field.resize(positions.size());
    const double ripple_phase = rng.uniform(0.0, 6.28);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const double dx = positions[i][0] - out.ap_positions[static_cast<std::size_t>(m)][0];
      const double dy = positions[i][1] - out.ap_positions[static_cast<std::size_t>(m)][1];
      const double dist = std::sqrt(dx * dx + dy * dy) + 0.05 * extent;
      // pathloss in dB plus a smooth terrain ripple
      grid.field[i] = -20.0 * std::log10(dist) +
                      1.5 * std::sin(6.0 * positions[i][0] / extent + ripple_phase) *
                          std::cos(4.0 * positions[i][1] / extent);
    }
    out.per_ap_grids.push_back(std::move(grid));
  }
  return out;
}

}  // namespace edgecloud
