#ifndef EDGECLOUD_PROJECTED_GRADIENT_HPP
#define EDGECLOUD_PROJECTED_GRADIENT_HPP

#include <functional>
#include <vector>

#include "edgecloud/matrix.hpp"

namespace edgecloud {

// Smooth convex objective over a simple convex set given by its projector.
struct ProjectedProblem {
  int dimension = 0;
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(const Vector&)> projector;
};

enum class StepRule { armijo, fixed };

struct PgOptions {
  StepRule step_rule = StepRule::armijo;
  double tol = 1e-10;         // terminate when |x_{k+1} - x_k|_2 <= tol
  long max_iters = 50'000;
  double initial_step = 1.0;
  double armijo_constant = 1e-4;
  double backtrack_factor = 0.5;
};

struct PgResult {
  Vector x;
  double objective = 0.0;
  std::vector<double> objective_trace;
  long iterations = 0;
  bool converged = false;
  // |x - proj(x - grad)|_inf at the solution; a KKT residual proxy.
  double stationarity = 0.0;
};

PgResult solve_projected_gradient(const ProjectedProblem& problem, Vector x0,
                                  const PgOptions& options = {});

// Projection onto { x : lo <= x, sum_i weight_i * x_i <= budget } assuming
// sum_i weight_i * lo_i <= budget and weight_i > 0. Shared by the robust
// allocation solver and the offloading oracle set.
Vector project_weighted_budget_with_floor(const Vector& point, const Vector& lo,
                                          const Vector& weight, double budget);

// Euclidean projection onto the probability simplex { x >= 0, sum x = 1 }.
Vector project_simplex(const Vector& point);

}  // namespace edgecloud

#endif
