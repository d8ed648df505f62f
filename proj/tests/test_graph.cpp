#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "edgecloud/errors.hpp"
#include "edgecloud/graph.hpp"
#include "edgecloud/rng.hpp"
#include "support/oracles.hpp"

using namespace edgecloud;

namespace {

Graph path3() { return Graph(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

Graph complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return Graph(n, edges);
}

}  // namespace

TEST_CASE("laplacian of a single unit edge") {
  Graph g(2, {{0, 1, 1.0}});
  Matrix lap = build_laplacian(g);
  CHECK(lap(0, 0) == doctest::Approx(1.0));
  CHECK(lap(0, 1) == doctest::Approx(-1.0));
  CHECK(lap(1, 0) == doctest::Approx(-1.0));
  CHECK(lap(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("laplacian of the path 0-1-2") {
  Matrix lap = build_laplacian(path3());
  const double expected[3][3] = {{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(lap(i, j) == doctest::Approx(expected[i][j]));
}

TEST_CASE("laplacian of two disconnected unit edges is block diagonal") {
  Graph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  Matrix lap = build_laplacian(g);
  for (int i = 0; i < 2; ++i)
    for (int j = 2; j < 4; ++j) {
      CHECK(lap(i, j) == 0.0);
      CHECK(lap(j, i) == 0.0);
    }
  CHECK(lap(2, 2) == doctest::Approx(1.0));
  CHECK(lap(2, 3) == doctest::Approx(-1.0));
}

TEST_CASE("empty graph gives a 0x0 laplacian") {
  Graph g(0, {});
  CHECK(build_laplacian(g).rows() == 0);
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Graph(3, {{0, 0, 1.0}}), SchemaError);
  CHECK_THROWS_AS(Graph(3, {{0, 3, 1.0}}), SchemaError);
  CHECK_THROWS_AS(Graph(3, {{0, 1, -0.5}}), SchemaError);
  CHECK_THROWS_AS(Graph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), SchemaError);
  Graph g(3, {{0, 1, 0.0}, {1, 2, 1.0}});  // zero weight means absent
  CHECK(g.edges().size() == 1);
  CHECK_FALSE(g.has_edge(0, 1));
}

TEST_CASE("graph json round trip") {
  Graph g(4, {{0, 1, 1.5}, {2, 3, 0.25}});
  Graph back = Graph::from_json(g.to_json());
  CHECK(back.num_vertices() == 4);
  REQUIRE(back.edges().size() == 2);
  CHECK(back.weight(0, 1) == doctest::Approx(1.5));
  CHECK(back.weight(2, 3) == doctest::Approx(0.25));
  CHECK_THROWS_AS(Graph::from_json("{\"edges\":[]}"), SchemaError);
  CHECK_THROWS_AS(Graph::from_json("not json"), SchemaError);
}

TEST_CASE("K3 spectrum is {0,3,3}") {
  auto spec = eigendecompose(build_laplacian(complete(3)));
  CHECK(spec.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(spec.eigenvalues[1] == doctest::Approx(3.0));
  CHECK(spec.eigenvalues[2] == doctest::Approx(3.0));
}

TEST_CASE("path 0-1-2 spectrum is {0,1,3}") {
  auto spec = eigendecompose(build_laplacian(path3()));
  CHECK(spec.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(spec.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(spec.eigenvalues[2] == doctest::Approx(3.0));
}

TEST_CASE("disconnected graph has two zero eigenvalues") {
  Graph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  auto spec = eigendecompose(build_laplacian(g));
  CHECK(std::fabs(spec.eigenvalues[0]) <= 1e-9);
  CHECK(std::fabs(spec.eigenvalues[1]) <= 1e-9);
  CHECK(spec.eigenvalues[2] > 0.5);
}

TEST_CASE("non-symmetric input is rejected") {
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 0.5;
  m(1, 0) = -0.5;
  m(1, 1) = 1.0;
  CHECK_THROWS_AS(eigendecompose(m), NumericError);
}

TEST_CASE("eigendecomposition is deterministic and sign-fixed") {
  Graph g = test_support::random_graph(12, 0.4, 7);
  auto a = eigendecompose(build_laplacian(g));
  auto b = eigendecompose(build_laplacian(g));
  for (int k = 0; k < a.size(); ++k) {
    CHECK(a.eigenvalues[k] == b.eigenvalues[k]);
    for (int i = 0; i < a.size(); ++i)
      CHECK(a.eigenvectors(i, k) == b.eigenvectors(i, k));
    // first entry of magnitude > 1e-9 is positive
    for (int i = 0; i < a.size(); ++i) {
      const double v = a.eigenvectors(i, k);
      if (std::fabs(v) > 1e-9) {
        CHECK(v > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("algebraic connectivity") {
  CHECK(algebraic_connectivity(eigendecompose(build_laplacian(path3()))) == doctest::Approx(1.0));
  Graph disconnected(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK(algebraic_connectivity(eigendecompose(build_laplacian(disconnected))) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(algebraic_connectivity(eigendecompose(build_laplacian(complete(4)))) ==
        doctest::Approx(4.0));
  Graph single(1, {});
  CHECK_THROWS_AS(algebraic_connectivity(eigendecompose(build_laplacian(single))), NumericError);
}

TEST_CASE("two-cluster generator: forced dense case") {
  Graph g = generate_two_cluster_graph(3, 3, 1.0, 1, 42);
  CHECK(g.num_vertices() == 6);
  CHECK(g.edges().size() == 7);  // two triangles plus one bridge
  int cross = 0;
  for (const Edge& e : g.edges()) cross += (e.i < 3) != (e.j < 3) ? 1 : 0;
  CHECK(cross == 1);
}

TEST_CASE("two-cluster generator: determinism") {
  Graph a = generate_two_cluster_graph(20, 20, 0.5, 4, 123);
  Graph b = generate_two_cluster_graph(20, 20, 0.5, 4, 123);
  REQUIRE(a.edges().size() == b.edges().size());
  for (std::size_t e = 0; e < a.edges().size(); ++e) {
    CHECK(a.edges()[e].i == b.edges()[e].i);
    CHECK(a.edges()[e].j == b.edges()[e].j);
  }
}

TEST_CASE("two-cluster generator: connectivity and bridge count") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int size_a = 8, size_b = 11;
    const int bridges = 3;
    Graph g = generate_two_cluster_graph(size_a, size_b, 0.45, bridges, seed);
    auto labels = connected_components(g);
    for (int v = 0; v < g.num_vertices(); ++v) CHECK(labels[v] == 0);
    int cross = 0;
    for (const Edge& e : g.edges()) cross += (e.i < size_a) != (e.j < size_a) ? 1 : 0;
    CHECK(cross == bridges);
  }
  CHECK_THROWS_AS(generate_two_cluster_graph(3, 3, 0.0, 1, 1), SchemaError);
  CHECK_THROWS_AS(generate_two_cluster_graph(0, 3, 0.5, 1, 1), SchemaError);
  CHECK_THROWS_AS(generate_two_cluster_graph(3, 3, 0.5, 0, 1), SchemaError);
  CHECK_THROWS_AS(generate_two_cluster_graph(2, 2, 0.5, 5, 1), SchemaError);
}

TEST_CASE("laplacian invariants on random graphs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Graph g = test_support::random_graph(3 + seed % 14, 0.15 + 0.05 * (seed % 10), seed);
    Matrix lap = build_laplacian(g);
    const int n = g.num_vertices();
    for (int i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < n; ++j) row_sum += lap(i, j);
      CHECK(std::fabs(row_sum) <= 1e-9);
    }
    auto spec = eigendecompose(lap);
    for (double lambda : spec.eigenvalues) CHECK(lambda >= -1e-9);

    // zero-eigenvalue multiplicity == BFS component count
    auto labels = connected_components(g);
    int components = labels.empty() ? 0 : 1 + *std::max_element(labels.begin(), labels.end());
    int zeros = 0;
    for (double lambda : spec.eigenvalues) zeros += std::fabs(lambda) <= 1e-7 ? 1 : 0;
    CHECK(zeros == components);
  }
}

TEST_CASE("eigendecomposition round trip and residuals") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = test_support::random_graph(20, 0.3, 1000 + seed);
    Matrix lap = build_laplacian(g);
    auto spec = eigendecompose(lap);
    const int n = g.num_vertices();

    // |U' U - I|_inf <= 1e-9
    Matrix gram = multiply(spec.eigenvectors.transposed(), spec.eigenvectors);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::fabs(gram(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-9);

    // |U diag(lambda) U' - L|_inf <= 1e-8 |L|_inf
    Matrix recon(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
          acc += spec.eigenvectors(i, k) * spec.eigenvalues[k] * spec.eigenvectors(j, k);
        recon(i, j) = acc;
      }
    const double scale = max_abs(lap);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(std::fabs(recon(i, j) - lap(i, j)) <= 1e-8 * scale);

    // L u_k = lambda_k u_k within 1e-8 relative residual
    for (int k = 0; k < n; ++k) {
      Vector u = spec.eigenvectors.column(k);
      Vector lu = multiply(lap, u);
      double resid = 0.0;
      for (int i = 0; i < n; ++i) resid += std::pow(lu[i] - spec.eigenvalues[k] * u[i], 2);
      CHECK(std::sqrt(resid) <= 1e-8 * std::max(1.0, scale));
    }
  }
}
