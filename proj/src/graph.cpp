#include "edgecloud/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <utility>

#include "edgecloud/errors.hpp"
#include "edgecloud/rng.hpp"

#include <nlohmann/json.hpp>

namespace edgecloud {

Graph::Graph(int num_vertices, std::vector<Edge> edges) : n_(num_vertices) {
  if (n_ < 0) throw SchemaError("graph: negative vertex count");
  std::set<std::pair<int, int>> seen;
  edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.i == e.j) throw SchemaError("graph: self loop at vertex " + std::to_string(e.i));
    if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_)
      throw SchemaError("graph: edge endpoint out of range");
    if (e.w < 0.0) throw SchemaError("graph: negative edge weight");
    if (e.i > e.j) std::swap(e.i, e.j);
    if (!seen.insert({e.i, e.j}).second)
      throw SchemaError("graph: duplicate edge (" + std::to_string(e.i) + "," +
                        std::to_string(e.j) + ")");
    if (e.w == 0.0) continue;  // weight 0 means absent
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
  });
  adj_.assign(static_cast<std::size_t>(n_), {});
  for (const Edge& e : edges_) {
    adj_[static_cast<std::size_t>(e.i)].push_back(e.j);
    adj_[static_cast<std::size_t>(e.j)].push_back(e.i);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

bool Graph::has_edge(int i, int j) const { return weight(i, j) > 0.0; }

double Graph::weight(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(i, j),
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return std::make_pair(e.i, e.j) < key;
                             });
  if (it != edges_.end() && it->i == i && it->j == j) return it->w;
  return 0.0;
}

std::string Graph::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  auto arr = nlohmann::json::array();
  for (const Edge& e : edges_) arr.push_back({e.i, e.j, e.w});
  j["edges"] = std::move(arr);
  return j.dump();
}

Graph Graph::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("graph json: ") + e.what());
  }
  if (!j.contains("n") || !j.contains("edges")) throw SchemaError("graph json: need n and edges");
  std::vector<Edge> edges;
  for (const auto& item : j["edges"]) {
    if (!item.is_array() || item.size() != 3) throw SchemaError("graph json: edge must be [i,j,w]");
    edges.push_back({item[0].get<int>(), item[1].get<int>(), item[2].get<double>()});
  }
  return Graph(j["n"].get<int>(), std::move(edges));
}

bool LaplacianSpectrum::is_isolated(int i) const {
  const int n = size();
  if (i < 0 || i >= n) return false;
  if (i > 0 && eigenvalues[i] - eigenvalues[i - 1] <= eigengap_floor) return false;
  if (i + 1 < n && eigenvalues[i + 1] - eigenvalues[i] <= eigengap_floor) return false;
  return true;
}

Matrix build_laplacian(const Graph& g) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  Matrix lap(n, n);
  for (const Edge& e : g.edges()) {
    const auto i = static_cast<std::size_t>(e.i);
    const auto j = static_cast<std::size_t>(e.j);
    lap(i, i) += e.w;
    lap(j, j) += e.w;
    lap(i, j) -= e.w;
    lap(j, i) -= e.w;
  }
  return lap;
}

namespace {

double off_diagonal_frobenius(const Matrix& a) {
  const std::size_t n = a.rows();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) acc += a(i, j) * a(i, j);
  return std::sqrt(2.0 * acc);
}

double frobenius(const Matrix& a) {
  double acc = 0.0;
  for (double x : a.data()) acc += x * x;
  return std::sqrt(acc);
}

void apply_sign_convention(Matrix& vectors) {
  const std::size_t n = vectors.rows();
  for (std::size_t k = 0; k < vectors.cols(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = vectors(i, k);
      if (std::fabs(v) > 1e-9) {
        if (v < 0.0)
          for (std::size_t r = 0; r < n; ++r) vectors(r, k) = -vectors(r, k);
        break;
      }
    }
  }
}

}  // namespace

LaplacianSpectrum eigendecompose(const Matrix& laplacian) {
  const std::size_t n = laplacian.rows();
  if (laplacian.cols() != n) throw NumericError("eigendecompose: matrix not square");
  const double scale = max_abs(laplacian);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(laplacian(i, j) - laplacian(j, i)) > 1e-12 * std::max(1.0, scale))
        throw NumericError("eigendecompose: input not symmetric");

  Matrix a = laplacian;
  // Work on the symmetrized copy so rotation invariants hold exactly.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  Matrix v = Matrix::identity(n);

  if (n > 0) {
    const double target = 1e-12 * std::max(frobenius(a), 1e-300);
    const int max_sweeps = 100;
    int sweep = 0;
    while (off_diagonal_frobenius(a) > target) {
      if (++sweep > max_sweeps) throw NumericError("eigendecompose: Jacobi did not converge");
      // Rotations below this threshold cannot matter for the current sweep.
      const double skip = target / (static_cast<double>(n) * static_cast<double>(n) + 1.0);
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (std::fabs(apq) <= skip) continue;
          const double app = a(p, p);
          const double aqq = a(q, q);
          const double theta = (aqq - app) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          const double tau = s / (1.0 + c);

          a(p, p) = app - t * apq;
          a(q, q) = aqq + t * apq;
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          double* rowp = a.row(p);
          double* rowq = a.row(q);
          for (std::size_t k = 0; k < n; ++k) {
            if (k == p || k == q) continue;
            const double akp = rowp[k];
            const double akq = rowq[k];
            rowp[k] = akp - s * (akq + tau * akp);
            rowq[k] = akq + s * (akp - tau * akq);
          }
          for (std::size_t k = 0; k < n; ++k) {
            if (k == p || k == q) continue;
            a(k, p) = a(p, k);
            a(k, q) = a(q, k);
          }
          double* vp = v.row(0);
          for (std::size_t k = 0; k < n; ++k) {
            double* vrow = vp + k * n;
            const double vkp = vrow[p];
            const double vkq = vrow[q];
            vrow[p] = vkp - s * (vkq + tau * vkp);
            vrow[q] = vkq + s * (vkp - tau * vkq);
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (a(x, x) != a(y, y)) return a(x, x) < a(y, y);
    return x < y;
  });

  LaplacianSpectrum spec;
  spec.eigenvalues.resize(n);
  spec.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    spec.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) spec.eigenvectors(i, k) = v(i, order[k]);
  }
  apply_sign_convention(spec.eigenvectors);
  const double lambda_max = n > 0 ? std::max(std::fabs(spec.eigenvalues.front()),
                                             std::fabs(spec.eigenvalues.back()))
                                  : 0.0;
  spec.eigengap_floor = std::max(1e-12, 1e-9 * lambda_max);
  return spec;
}

double algebraic_connectivity(const LaplacianSpectrum& spectrum) {
  if (spectrum.size() < 2)
    throw NumericError("algebraic_connectivity: spectrum has fewer than 2 eigenvalues");
  return spectrum.eigenvalues[1];
}

std::vector<int> connected_components(const Graph& g) {
  const int n = g.num_vertices();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int start = 0; start < n; ++start) {
    if (label[static_cast<std::size_t>(start)] != -1) continue;
    std::queue<int> frontier;
    frontier.push(start);
    label[static_cast<std::size_t>(start)] = next;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : g.adjacency()[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(v)] == -1) {
          label[static_cast<std::size_t>(v)] = next;
          frontier.push(v);
        }
      }
    }
    ++next;
  }
  return label;
}

namespace {

bool cluster_connected(const std::vector<std::pair<int, int>>& edges, int offset, int size) {
  if (size <= 1) return true;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(size));
  for (const auto& [i, j] : edges) {
    adj[static_cast<std::size_t>(i - offset)].push_back(j - offset);
    adj[static_cast<std::size_t>(j - offset)].push_back(i - offset);
  }
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == size;
}

}  // namespace

Graph generate_two_cluster_graph(int size_a, int size_b, double p_in, int bridges,
                                 std::uint64_t seed) {
  if (size_a < 1 || size_b < 1) throw SchemaError("two_cluster: cluster sizes must be positive");
  if (!(p_in > 0.0 && p_in <= 1.0)) throw SchemaError("two_cluster: p_in must be in (0,1]");
  if (bridges < 1) throw SchemaError("two_cluster: bridges must be >= 1");
  if (static_cast<long long>(bridges) > static_cast<long long>(size_a) * size_b)
    throw SchemaError("two_cluster: more bridges than cross pairs");
  if ((size_a > 1 && p_in * (size_a - 1) <= 0.0) || (size_b > 1 && p_in * (size_b - 1) <= 0.0))
    throw SchemaError("two_cluster: parameters cannot connect a cluster");

  Rng rng(seed);
  const int max_attempts = 5000;

  auto sample_cluster = [&](int offset, int size) {
    std::vector<std::pair<int, int>> edges;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      edges.clear();
      for (int i = 0; i < size; ++i)
        for (int j = i + 1; j < size; ++j)
          if (rng.bernoulli(p_in)) edges.emplace_back(offset + i, offset + j);
      if (cluster_connected(edges, offset, size)) return edges;
    }
    throw InfeasibleError("two_cluster: could not sample a connected cluster; raise p_in");
  };

  const auto cluster_a = sample_cluster(0, size_a);
  const auto cluster_b = sample_cluster(size_a, size_b);

  std::vector<Edge> edges;
  edges.reserve(cluster_a.size() + cluster_b.size() + static_cast<std::size_t>(bridges));
  for (const auto& [i, j] : cluster_a) edges.push_back({i, j, 1.0});
  for (const auto& [i, j] : cluster_b) edges.push_back({i, j, 1.0});

  std::set<std::pair<int, int>> used;
  while (static_cast<int>(used.size()) < bridges) {
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(size_a)));
    const int j = size_a + static_cast<int>(rng.below(static_cast<std::uint64_t>(size_b)));
    if (used.insert({i, j}).second) edges.push_back({i, j, 1.0});
  }

  return Graph(size_a + size_b, std::move(edges));
}

}  // namespace edgecloud
