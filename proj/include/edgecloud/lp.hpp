#ifndef EDGECLOUD_LP_HPP
#define EDGECLOUD_LP_HPP

#include <limits>
#include <utility>
#include <vector>

#include "edgecloud/matrix.hpp"

namespace edgecloud {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpRow {
  std::vector<std::pair<int, double>> entries;  // (var, coeff), var indices unique
  double rhs = 0.0;
  bool is_eq = false;
};

// min c'x  s.t.  eq rows hold, le rows hold, lo <= x <= hi (+-inf allowed).
// Rows are stored sparse; the caching programs have ~10^3..10^4 rows with a
// handful of nonzeros each.
class LinearProgram {
 public:
  explicit LinearProgram(int num_vars);

  void set_objective(int var, double coeff);
  void set_bounds(int var, double lo, double hi);
  int add_eq_row(std::vector<std::pair<int, double>> entries, double rhs);
  int add_le_row(std::vector<std::pair<int, double>> entries, double rhs);

  int num_vars() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<LpRow>& rows() const { return rows_; }
  const Vector& objective() const { return objective_; }
  const Vector& lower() const { return lo_; }
  const Vector& upper() const { return hi_; }

 private:
  int add_row(std::vector<std::pair<int, double>> entries, double rhs, bool is_eq);

  Vector objective_;
  Vector lo_, hi_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
  // Lagrange multipliers per row in insertion order; >= 0 for le rows, free
  // for eq rows. reduced_costs = c + A'dual.
  Vector dual;
  Vector reduced_costs;
  double dual_objective = 0.0;
  long iterations = 0;
};

struct LpOptions {
  double feas_tol = 1e-9;
  double dual_tol = 1e-9;
  // Reject a final basis whose relative row/bound violation exceeds this.
  double final_feas_tol = 1e-6;
  long max_iterations = 2'000'000;
  // Optional crash hint: nonbasic variables start at the bound nearest to
  // this point, which keeps phase 1 short when the hint is near-feasible.
  Vector warm_hint;
};

// Two-phase bounded-variable revised simplex. Pricing is largest-violation
// with a Bland fallback after a degenerate-pivot streak, which keeps the
// flow-style caching programs tractable without risking cycling.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace edgecloud

#endif
