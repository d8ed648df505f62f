#ifndef EDGECLOUD_REM_HPP
#define EDGECLOUD_REM_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "edgecloud/graph.hpp"
#include "edgecloud/matrix.hpp"

namespace edgecloud {

struct FieldGrid {
  std::vector<std::array<double, 2>> positions;  // meters
  Vector field;                                  // one value per vertex

  int size() const { return static_cast<int>(positions.size()); }
  void validate() const;
};

// Per-access-point bases of Laplacian eigenvectors (the K smallest), stacked
// side by side. Ties at the bandwidth cut are absorbed whole, so per-AP
// widths can exceed the requested bandwidth.
struct REMDictionary {
  int num_vertices = 0;
  int num_aps = 0;
  int requested_bandwidth = 0;
  std::vector<Matrix> per_ap;       // N x K_m, orthonormal columns
  std::vector<int> effective_bandwidth;
  std::vector<bool> tie_extended;   // basis not unique at the requested cut
  Matrix stacked;                   // deduplicated: the shared constant
                                    // eigenvector appears once
  std::vector<std::pair<int, int>> column_origin;  // (ap, local column)

  int total_columns() const { return static_cast<int>(stacked.cols()); }
};

struct SamplingMask {
  std::vector<int> observed;  // sorted unique vertex ids

  static SamplingMask from_indices(std::vector<int> indices, int num_vertices);
  int size() const { return static_cast<int>(observed.size()); }
};

// a_ij = exp(-|E_i - E_j|^2 / (2 sigma^2)) for vertices within range, zero
// diagonal. The range test compares the squared distance against R0; the
// flag switches to comparing the plain distance instead.
Matrix build_similarity_adjacency(const FieldGrid& grid, double sigma, double r0,
                                  bool squared_distance_threshold = true);

REMDictionary build_dictionary(const std::vector<FieldGrid>& per_ap_grids, double sigma, double r0,
                               int bandwidth, bool squared_distance_threshold = true);

// y_i = x_i + noise on observed vertices, zero elsewhere.
Vector sample_field(const Vector& x, const SamplingMask& mask, double noise_std,
                    std::uint64_t seed);

struct BpResult {
  Vector coefficients;    // one per dictionary column
  Vector reconstruction;  // stacked * coefficients
};

// Basis pursuit via the split s = s+ - s- as a linear program. Noiseless
// observations use equality constraints; noise_std > 0 switches to the
// band |y - (Sigma U s)_i| <= 3 noise_std.
BpResult recover_bp(const Vector& y, const SamplingMask& mask, const REMDictionary& dictionary,
                    double noise_std = 0.0);

struct SamplingCheck {
  bool recoverable = false;
  int rank = 0;
};

SamplingCheck check_sampling(const SamplingMask& mask, const REMDictionary& dictionary);

double nmse(const Vector& x_hat, const Vector& x_true);

// Synthetic substitute for the ray-tracing ground truth: jittered grid
// positions plus per-AP pathloss surfaces with a smooth ripple.
struct SyntheticRem {
  std::vector<FieldGrid> per_ap_grids;
  std::vector<std::array<double, 2>> ap_positions;
};
SyntheticRem generate_synthetic_rem(int num_vertices, int num_aps, double extent,
                                    std::uint64_t seed);

}  // namespace edgecloud

#endif
