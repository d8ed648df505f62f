#ifndef EDGECLOUD_GRAPH_HPP
#define EDGECLOUD_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "edgecloud/matrix.hpp"

namespace edgecloud {

struct Edge {
  int i = 0;
  int j = 0;
  double w = 1.0;
};

// Undirected weighted graph, 0-based vertex ids, no self loops, at most one
// edge per unordered pair. Immutable after construction.
class Graph {
 public:
  Graph(int num_vertices, std::vector<Edge> edges);

  int num_vertices() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_edge(int i, int j) const;
  double weight(int i, int j) const;  // 0 when absent

  const std::vector<std::vector<int>>& adjacency() const { return adj_; }

  std::string to_json() const;
  static Graph from_json(const std::string& text);

 private:
  int n_;
  std::vector<Edge> edges_;            // canonical i < j
  std::vector<std::vector<int>> adj_;  // neighbor lists
};

struct LaplacianSpectrum {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column k pairs with eigenvalues[k], orthonormal
  double eigengap_floor = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  // True when |lambda_i - lambda_j| exceeds the certified floor for all j != i.
  bool is_isolated(int i) const;
};

Matrix build_laplacian(const Graph& g);

// Cyclic Jacobi on the dense symmetric input; converges when the off-diagonal
// Frobenius norm drops below 1e-12 * |L|_F. Sign convention: first entry of
// each eigenvector with magnitude > 1e-9 is positive.
LaplacianSpectrum eigendecompose(const Matrix& laplacian);

double algebraic_connectivity(const LaplacianSpectrum& spectrum);

// Component label per vertex (BFS order, labels 0..c-1).
std::vector<int> connected_components(const Graph& g);

// Two dense clusters joined by exactly `bridges` inter-cluster edges.
// Intra-cluster pairs are sampled i.i.d. with probability p_in and redrawn
// until each cluster is internally connected. Deterministic for a fixed seed.
Graph generate_two_cluster_graph(int size_a, int size_b, double p_in, int bridges,
                                 std::uint64_t seed);

}  // namespace edgecloud

#endif
