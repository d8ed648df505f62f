#include "edgecloud/projected_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "edgecloud/errors.hpp"

namespace edgecloud {

namespace {

void check_finite(const Vector& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError(std::string("projected gradient: non-finite ") + what);
}

}  // namespace

PgResult solve_projected_gradient(const ProjectedProblem& problem, Vector x0,
                                  const PgOptions& options) {
  if (static_cast<int>(x0.size()) != problem.dimension)
    throw SchemaError("projected gradient: x0 dimension mismatch");

  Vector x = problem.projector(x0);
  double fx = problem.objective(x);
  if (!std::isfinite(fx)) throw NumericError("projected gradient: non-finite objective at start");

  PgResult result;
  result.objective_trace.push_back(fx);

  double step = options.initial_step;
  long iter = 0;
  for (; iter < options.max_iters; ++iter) {
    Vector grad = problem.gradient(x);
    check_finite(grad, "gradient");

    Vector x_next;
    double f_next = 0.0;
    if (options.step_rule == StepRule::fixed) {
      Vector trial(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - options.initial_step * grad[i];
      x_next = problem.projector(trial);
      f_next = problem.objective(x_next);
      if (!std::isfinite(f_next)) throw NumericError("projected gradient: non-finite objective");
    } else {
      // Armijo backtracking on the projected step.
      bool accepted = false;
      bool backtracked = false;
      for (int bt = 0; bt < 60; ++bt) {
        Vector trial(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * grad[i];
        Vector candidate = problem.projector(trial);
        double f_cand = problem.objective(candidate);
        if (!std::isfinite(f_cand)) {
          step *= options.backtrack_factor;
          backtracked = true;
          continue;
        }
        double inner = 0.0;
        double move2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double d = candidate[i] - x[i];
          inner += grad[i] * d;
          move2 += d * d;
        }
        if (f_cand <= fx + options.armijo_constant * inner + 1e-15 * std::fabs(fx) ||
            move2 == 0.0) {
          x_next = std::move(candidate);
          f_next = f_cand;
          accepted = true;
          break;
        }
        step *= options.backtrack_factor;
        backtracked = true;
      }
      if (!accepted) {
        // Step collapsed to numerical zero; treat the point as stationary.
        x_next = x;
        f_next = fx;
      }
      if (!backtracked) step = std::min(step * 2.0, 1e12);
    }

    double move = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) move += (x_next[i] - x[i]) * (x_next[i] - x[i]);
    move = std::sqrt(move);

    // Keep the trace monotone under Armijo: never accept an increase.
    if (options.step_rule == StepRule::armijo && f_next > fx) {
      x_next = x;
      f_next = fx;
      move = 0.0;
    }

    if (std::getenv("EC_PG_DEBUG") && iter % 500 == 0) {
      double gnorm = 0.0;
      for (double g : grad) gnorm = std::max(gnorm, std::fabs(g));
      std::fprintf(stderr, "      pg it=%ld f=%.9g step=%.3g |grad|=%.3g move=%.3g\n", iter, fx,
                   step, gnorm, move);
    }
    x = std::move(x_next);
    fx = f_next;
    result.objective_trace.push_back(fx);

    if (move <= options.tol) {
      result.converged = true;
      ++iter;
      break;
    }
  }

  result.x = x;
  result.objective = fx;
  result.iterations = iter;

  Vector grad = problem.gradient(x);
  Vector trial(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - grad[i];
  Vector proj = problem.projector(trial);
  double stat = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) stat = std::max(stat, std::fabs(proj[i] - x[i]));
  result.stationarity = stat;
  return result;
}

Vector project_weighted_budget_with_floor(const Vector& point, const Vector& lo,
                                          const Vector& weight, double budget) {
  const std::size_t n = point.size();
  Vector clipped(n);
  double used = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    clipped[i] = std::max(point[i], lo[i]);
    used += weight[i] * clipped[i];
  }
  if (used <= budget + 1e-15 * std::max(1.0, std::fabs(budget))) return clipped;

  // Solve for nu >= 0 with x_i = max(lo_i, point_i - nu * w_i) and
  // sum w_i x_i = budget; the left side is decreasing in nu.
  double nu_lo = 0.0, nu_hi = 1.0;
  auto spend = [&](double nu) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += weight[i] * std::max(lo[i], point[i] - nu * weight[i]);
    return acc;
  };
  while (spend(nu_hi) > budget) {
    nu_hi *= 2.0;
    if (nu_hi > 1e18) throw NumericError("budget projection: floor spend exceeds budget");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (nu_lo + nu_hi);
    if (spend(mid) > budget)
      nu_lo = mid;
    else
      nu_hi = mid;
  }
  const double nu = nu_hi;
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(lo[i], point[i] - nu * weight[i]);
  return out;
}

Vector project_simplex(const Vector& point) {
  const std::size_t n = point.size();
  Vector sorted = point;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  int support = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) {
      tau = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, point[i] - tau);
  return out;
}

}  // namespace edgecloud
