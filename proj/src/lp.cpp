#include "edgecloud/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "edgecloud/errors.hpp"

namespace edgecloud {

LinearProgram::LinearProgram(int num_vars) {
  if (num_vars < 0) throw SchemaError("lp: negative variable count");
  objective_.assign(static_cast<std::size_t>(num_vars), 0.0);
  lo_.assign(static_cast<std::size_t>(num_vars), -kInf);
  hi_.assign(static_cast<std::size_t>(num_vars), kInf);
}

void LinearProgram::set_objective(int var, double coeff) {
  if (var < 0 || var >= num_vars()) throw SchemaError("lp: objective index out of range");
  objective_[static_cast<std::size_t>(var)] = coeff;
}

void LinearProgram::set_bounds(int var, double lo, double hi) {
  if (var < 0 || var >= num_vars()) throw SchemaError("lp: bound index out of range");
  if (lo > hi) throw SchemaError("lp: lower bound exceeds upper bound");
  lo_[static_cast<std::size_t>(var)] = lo;
  hi_[static_cast<std::size_t>(var)] = hi;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> entries, double rhs, bool is_eq) {
  for (const auto& [var, coeff] : entries) {
    if (var < 0 || var >= num_vars()) throw SchemaError("lp: row index out of range");
    if (!std::isfinite(coeff) || !std::isfinite(rhs)) throw SchemaError("lp: non-finite row data");
  }
  rows_.push_back({std::move(entries), rhs, is_eq});
  return static_cast<int>(rows_.size()) - 1;
}

int LinearProgram::add_eq_row(std::vector<std::pair<int, double>> entries, double rhs) {
  return add_row(std::move(entries), rhs, true);
}

int LinearProgram::add_le_row(std::vector<std::pair<int, double>> entries, double rhs) {
  return add_row(std::move(entries), rhs, false);
}

namespace {

enum class VarState : unsigned char { at_lower, at_upper, free_zero, basic };

struct Column {
  std::vector<std::pair<int, double>> entries;  // (row, value)
};

// Simplex working set: structural vars, then one slack per le row, then
// artificials appended for phase 1.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.num_rows();
    n_struct_ = lp.num_vars();
    build_columns();
  }

  LpSolution run() {
    LpSolution out;
    for (int attempt = 0; attempt < 4; ++attempt) {
      // attempts 1-2 warm-restart from the current point; the last one goes
      // back to a cold start with conservative pricing
      force_bland_ = attempt == 3;
      initialize_basis(attempt > 0 && attempt < 3);

      phase_ = 1;
      setup_phase_costs();
      if (!iterate()) throw NumericError("lp: iteration limit exceeded in phase 1");
      if (phase1_objective() > 1e-7 * std::max(1.0, rhs_scale_)) {
        out.status = LpStatus::infeasible;
        out.iterations = iterations_;
        return out;
      }
      lock_artificials();

      phase_ = 2;
      setup_phase_costs();
      if (!iterate()) throw NumericError("lp: iteration limit exceeded in phase 2");
      if (unbounded_) {
        out.status = LpStatus::unbounded;
        out.iterations = iterations_;
        return out;
      }

      // Verify against a freshly rebuilt inverse before trusting the basis;
      // update error inside the last refresh window is invisible otherwise.
      if (m_ <= 2000) refactorize();
      refresh_duals();
      refresh_basic_values();
      if (primal_violation() <= 1e-7) break;
    }
    return extract_solution();
  }

 private:
  static double pow2_scale(double magnitude) {
    if (!(magnitude > 0.0) || !std::isfinite(magnitude)) return 1.0;
    return std::exp2(-std::round(std::log2(magnitude)));
  }

  void build_columns() {
    // Power-of-two equilibration: badly mixed coefficient magnitudes (the
    // tangent-cut programs span ~ten decades) otherwise wreck the basis
    // updates. Power-of-two factors keep the scaling exact.
    row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
    col_scale_.assign(static_cast<std::size_t>(n_struct_), 1.0);
    for (int r = 0; r < m_; ++r) {
      double mag = 0.0;
      for (const auto& [var, coeff] : lp_.rows()[static_cast<std::size_t>(r)].entries)
        mag = std::max(mag, std::fabs(coeff));
      row_scale_[static_cast<std::size_t>(r)] = pow2_scale(mag);
    }
    for (int j = 0; j < n_struct_; ++j) col_scale_[static_cast<std::size_t>(j)] = 0.0;
    for (int r = 0; r < m_; ++r)
      for (const auto& [var, coeff] : lp_.rows()[static_cast<std::size_t>(r)].entries)
        col_scale_[static_cast<std::size_t>(var)] =
            std::max(col_scale_[static_cast<std::size_t>(var)],
                     std::fabs(coeff) * row_scale_[static_cast<std::size_t>(r)]);
    for (int j = 0; j < n_struct_; ++j)
      col_scale_[static_cast<std::size_t>(j)] = pow2_scale(col_scale_[static_cast<std::size_t>(j)]);

    cols_.resize(static_cast<std::size_t>(n_struct_));
    lo_.resize(static_cast<std::size_t>(n_struct_));
    hi_.resize(static_cast<std::size_t>(n_struct_));
    for (int j = 0; j < n_struct_; ++j) {
      const double cs = col_scale_[static_cast<std::size_t>(j)];
      lo_[static_cast<std::size_t>(j)] = lp_.lower()[static_cast<std::size_t>(j)] / cs;
      hi_[static_cast<std::size_t>(j)] = lp_.upper()[static_cast<std::size_t>(j)] / cs;
    }
    rhs_.resize(static_cast<std::size_t>(m_));
    rhs_scale_ = 1.0;
    for (int r = 0; r < m_; ++r) {
      const LpRow& row = lp_.rows()[static_cast<std::size_t>(r)];
      const double rs = row_scale_[static_cast<std::size_t>(r)];
      rhs_[static_cast<std::size_t>(r)] = row.rhs * rs;
      rhs_scale_ = std::max(rhs_scale_, std::fabs(row.rhs * rs));
      for (const auto& [var, coeff] : row.entries)
        if (coeff != 0.0)
          cols_[static_cast<std::size_t>(var)].entries.push_back(
              {r, coeff * rs * col_scale_[static_cast<std::size_t>(var)]});
    }
    // slack per le row
    slack_of_row_.assign(static_cast<std::size_t>(m_), -1);
    for (int r = 0; r < m_; ++r) {
      if (lp_.rows()[static_cast<std::size_t>(r)].is_eq) continue;
      Column c;
      c.entries.push_back({r, 1.0});
      cols_.push_back(std::move(c));
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      slack_of_row_[static_cast<std::size_t>(r)] = static_cast<int>(cols_.size()) - 1;
    }
    base_cols_ = static_cast<int>(cols_.size());
  }

  void initialize_basis(bool warm) {
    // Drop any artificials from a previous attempt.
    cols_.resize(static_cast<std::size_t>(base_cols_));
    lo_.resize(static_cast<std::size_t>(base_cols_));
    hi_.resize(static_cast<std::size_t>(base_cols_));
    artificials_.clear();
    const int total = static_cast<int>(cols_.size());
    if (!warm) {
      state_.assign(static_cast<std::size_t>(total), VarState::at_lower);
      value_.assign(static_cast<std::size_t>(total), 0.0);
    } else {
      state_.resize(static_cast<std::size_t>(total));
      value_.resize(static_cast<std::size_t>(total));
    }
    for (int j = 0; j < total; ++j) {
      const double lo = lo_[static_cast<std::size_t>(j)];
      const double hi = hi_[static_cast<std::size_t>(j)];
      if (warm) {
        // Remember the nonbasic assignment; park previously basic variables
        // at their nearest bound.
        if (state_[static_cast<std::size_t>(j)] != VarState::basic) continue;
        if (std::isfinite(lo) &&
            (!std::isfinite(hi) ||
             value_[static_cast<std::size_t>(j)] - lo <= hi - value_[static_cast<std::size_t>(j)])) {
          state_[static_cast<std::size_t>(j)] = VarState::at_lower;
          value_[static_cast<std::size_t>(j)] = lo;
        } else if (std::isfinite(hi)) {
          state_[static_cast<std::size_t>(j)] = VarState::at_upper;
          value_[static_cast<std::size_t>(j)] = hi;
        } else {
          state_[static_cast<std::size_t>(j)] = VarState::free_zero;
          value_[static_cast<std::size_t>(j)] = 0.0;
        }
        continue;
      }
      double hint = kInf;  // prefer the lower bound by default
      if (j < n_struct_ && static_cast<int>(opt_.warm_hint.size()) == n_struct_)
        hint = opt_.warm_hint[static_cast<std::size_t>(j)] / col_scale_[static_cast<std::size_t>(j)];
      if (std::isfinite(lo) && std::isfinite(hi)) {
        const bool upper = std::isfinite(hint) && std::fabs(hint - hi) < std::fabs(hint - lo);
        state_[static_cast<std::size_t>(j)] = upper ? VarState::at_upper : VarState::at_lower;
        value_[static_cast<std::size_t>(j)] = upper ? hi : lo;
      } else if (std::isfinite(lo)) {
        state_[static_cast<std::size_t>(j)] = VarState::at_lower;
        value_[static_cast<std::size_t>(j)] = lo;
      } else if (std::isfinite(hi)) {
        state_[static_cast<std::size_t>(j)] = VarState::at_upper;
        value_[static_cast<std::size_t>(j)] = hi;
      } else {
        state_[static_cast<std::size_t>(j)] = VarState::free_zero;
        value_[static_cast<std::size_t>(j)] = 0.0;
      }
    }

    // Row residuals with every variable at its initial value.
    Vector resid = rhs_;
    for (int j = 0; j < total; ++j) {
      const double v = value_[static_cast<std::size_t>(j)];
      if (v == 0.0) continue;
      for (const auto& [r, coeff] : cols_[static_cast<std::size_t>(j)].entries)
        resid[static_cast<std::size_t>(r)] -= coeff * v;
    }

    basis_.assign(static_cast<std::size_t>(m_), -1);
    num_artificials_ = 0;
    for (int r = 0; r < m_; ++r) {
      const double res = resid[static_cast<std::size_t>(r)];
      const int slack = slack_of_row_[static_cast<std::size_t>(r)];
      if (slack >= 0 && res >= 0.0) {
        basis_[static_cast<std::size_t>(r)] = slack;
        state_[static_cast<std::size_t>(slack)] = VarState::basic;
        value_[static_cast<std::size_t>(slack)] = res;
      } else {
        Column c;
        c.entries.push_back({r, res >= 0.0 ? 1.0 : -1.0});
        cols_.push_back(std::move(c));
        lo_.push_back(0.0);
        hi_.push_back(kInf);
        state_.push_back(VarState::basic);
        value_.push_back(std::fabs(res));
        const int art = static_cast<int>(cols_.size()) - 1;
        basis_[static_cast<std::size_t>(r)] = art;
        artificials_.push_back(art);
        ++num_artificials_;
      }
    }

    // B is diagonal +-1 at this point.
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      const int bv = basis_[static_cast<std::size_t>(r)];
      const double diag = cols_[static_cast<std::size_t>(bv)].entries.front().second;
      binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) +
            static_cast<std::size_t>(r)] = 1.0 / diag;
    }
  }

  void setup_phase_costs() {
    const int total = static_cast<int>(cols_.size());
    cost_.assign(static_cast<std::size_t>(total), 0.0);
    if (phase_ == 1) {
      for (int a : artificials_) cost_[static_cast<std::size_t>(a)] = 1.0;
    } else {
      for (int j = 0; j < n_struct_; ++j)
        cost_[static_cast<std::size_t>(j)] = lp_.objective()[static_cast<std::size_t>(j)] *
                                             col_scale_[static_cast<std::size_t>(j)];
    }
    refresh_duals();
    cost_scale_ = 1.0;
    for (double c : cost_) cost_scale_ = std::max(cost_scale_, std::fabs(c));
  }

  double phase1_objective() const {
    double acc = 0.0;
    for (int a : artificials_) acc += value_[static_cast<std::size_t>(a)];
    return acc;
  }

  void lock_artificials() {
    for (int a : artificials_) {
      lo_[static_cast<std::size_t>(a)] = 0.0;
      hi_[static_cast<std::size_t>(a)] = 0.0;
      if (state_[static_cast<std::size_t>(a)] != VarState::basic) {
        state_[static_cast<std::size_t>(a)] = VarState::at_lower;
        value_[static_cast<std::size_t>(a)] = 0.0;
      }
    }
  }

  const double* binv_row(int r) const {
    return binv_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(m_);
  }
  double* binv_row(int r) {
    return binv_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(m_);
  }

  void refresh_duals() {
    y_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
      if (cb == 0.0) continue;
      const double* row = binv_row(r);
      for (int k = 0; k < m_; ++k) y_[static_cast<std::size_t>(k)] += cb * row[k];
    }
  }

  void refresh_basic_values() {
    Vector resid = rhs_;
    const int total = static_cast<int>(cols_.size());
    for (int j = 0; j < total; ++j) {
      if (state_[static_cast<std::size_t>(j)] == VarState::basic) continue;
      const double v = value_[static_cast<std::size_t>(j)];
      if (v == 0.0) continue;
      for (const auto& [r, coeff] : cols_[static_cast<std::size_t>(j)].entries)
        resid[static_cast<std::size_t>(r)] -= coeff * v;
    }
    for (int r = 0; r < m_; ++r) {
      const double* row = binv_row(r);
      double acc = 0.0;
      for (int k = 0; k < m_; ++k) acc += row[k] * resid[static_cast<std::size_t>(k)];
      value_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = acc;
    }
  }

  // Gauss-Jordan rebuild of the basis inverse; kills accumulated update error.
  void refactorize() {
    std::vector<double> b(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i)
      for (const auto& [r, coeff] : cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])].entries)
        b[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i)] = coeff;
    std::vector<double> inv(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i)
      inv[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i)] = 1.0;
    auto row_of = [&](std::vector<double>& mat, int r) {
      return mat.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(m_);
    };
    for (int col = 0; col < m_; ++col) {
      int pivot = col;
      for (int r = col + 1; r < m_; ++r)
        if (std::fabs(row_of(b, r)[col]) > std::fabs(row_of(b, pivot)[col])) pivot = r;
      if (std::fabs(row_of(b, pivot)[col]) < 1e-13)
        throw NumericError("lp: basis became singular");
      if (pivot != col) {
        for (int c = 0; c < m_; ++c) {
          std::swap(row_of(b, pivot)[c], row_of(b, col)[c]);
          std::swap(row_of(inv, pivot)[c], row_of(inv, col)[c]);
        }
      }
      const double scale = 1.0 / row_of(b, col)[col];
      for (int c = 0; c < m_; ++c) {
        row_of(b, col)[c] *= scale;
        row_of(inv, col)[c] *= scale;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double factor = row_of(b, r)[col];
        if (factor == 0.0) continue;
        for (int c = 0; c < m_; ++c) {
          row_of(b, r)[c] -= factor * row_of(b, col)[c];
          row_of(inv, r)[c] -= factor * row_of(inv, col)[c];
        }
      }
    }
    binv_ = std::move(inv);
    pivots_since_refactor_ = 0;
  }

  // Worst violation of the current iterate, relative to each row's activity
  // magnitude so badly scaled programs are judged fairly.
  double primal_violation() const {
    Vector activity(static_cast<std::size_t>(m_), 0.0);
    Vector activity_abs(static_cast<std::size_t>(m_), 0.0);
    const int total = static_cast<int>(cols_.size());
    for (int j = 0; j < total; ++j) {
      const double v = value_[static_cast<std::size_t>(j)];
      if (v == 0.0) continue;
      for (const auto& [r, coeff] : cols_[static_cast<std::size_t>(j)].entries) {
        activity[static_cast<std::size_t>(r)] += coeff * v;
        activity_abs[static_cast<std::size_t>(r)] += std::fabs(coeff * v);
      }
    }
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double scale =
          1.0 + std::fabs(rhs_[static_cast<std::size_t>(r)]) + activity_abs[static_cast<std::size_t>(r)];
      worst = std::max(worst, std::fabs(activity[static_cast<std::size_t>(r)] -
                                        rhs_[static_cast<std::size_t>(r)]) /
                                  scale);
    }
    for (int j = 0; j < total; ++j) {
      const double scale = 1.0 + std::fabs(value_[static_cast<std::size_t>(j)]);
      worst = std::max(worst, (lo_[static_cast<std::size_t>(j)] -
                               value_[static_cast<std::size_t>(j)]) / scale);
      worst = std::max(worst, (value_[static_cast<std::size_t>(j)] -
                               hi_[static_cast<std::size_t>(j)]) / scale);
    }
    return worst;
  }

  double reduced_cost(int j) const {
    double d = cost_[static_cast<std::size_t>(j)];
    for (const auto& [r, coeff] : cols_[static_cast<std::size_t>(j)].entries)
      d -= y_[static_cast<std::size_t>(r)] * coeff;
    return d;
  }

  // Entering candidate: returns (var, direction) or var=-1 when dual feasible.
  std::pair<int, int> price(bool bland) const {
    const int total = static_cast<int>(cols_.size());
    int best = -1, best_dir = 0;
    double best_score = 0.0;
    for (int j = 0; j < total; ++j) {
      const VarState st = state_[static_cast<std::size_t>(j)];
      if (st == VarState::basic) continue;
      const double lo = lo_[static_cast<std::size_t>(j)];
      const double hi = hi_[static_cast<std::size_t>(j)];
      if (lo == hi) continue;  // fixed
      const double tol =
          opt_.dual_tol * (1.0 + std::fabs(cost_[static_cast<std::size_t>(j)]));
      const double d = reduced_cost(j);
      double score = 0.0;
      int dir = 0;
      if (st == VarState::at_lower && d < -tol) {
        score = -d;
        dir = +1;
      } else if (st == VarState::at_upper && d > tol) {
        score = d;
        dir = -1;
      } else if (st == VarState::free_zero && std::fabs(d) > tol) {
        score = std::fabs(d);
        dir = d < 0.0 ? +1 : -1;
      } else {
        continue;
      }
      if (bland) return {j, dir};
      if (score > best_score) {
        best_score = score;
        best = j;
        best_dir = dir;
      }
    }
    return {best, best_dir};
  }

  // One simplex pass; returns true unless the iteration budget is exhausted.
  bool iterate() {
    unbounded_ = false;
    int degenerate_streak = 0;
    bool unbounded_rechecked = false;
    bool bland = force_bland_ || std::getenv("EC_LP_BLAND") != nullptr;
    long since_refresh = 0;

    for (;;) {
      if (iterations_ >= opt_.max_iterations) return false;

      auto [q, dir] = price(bland);
      if (q < 0) {
        if (since_refresh > 0) {
          refresh_duals();
          refresh_basic_values();
          since_refresh = 0;
          auto [q2, dir2] = price(bland);
          if (q2 < 0) return true;
          q = q2;
          dir = dir2;
        } else {
          return true;
        }
      }
      ++iterations_;
      ++pivots_since_refactor_;
      if (++since_refresh >= 512) {
        if (m_ <= 800 && pivots_since_refactor_ >= 256) refactorize();
        refresh_duals();
        refresh_basic_values();
        since_refresh = 0;
      }
      if (std::getenv("EC_LP_TRACE")) {
        const double v = primal_violation();
        if (v > trace_worst_ * 4.0 + 1e-12) {
          std::fprintf(stderr,
                       "    trace: phase=%d iter=%ld viol=%.3g entering=%d dir=%d\n",
                       phase_, iterations_, v, q, dir);
          trace_worst_ = v;
        }
      }

      const double d_q = reduced_cost(q);

      // FTRAN: w = B^-1 a_q (sparse accumulation over B^-1 columns).
      w_.assign(static_cast<std::size_t>(m_), 0.0);
      for (const auto& [r, coeff] : cols_[static_cast<std::size_t>(q)].entries) {
        const double* col_base = binv_.data() + static_cast<std::size_t>(r);
        for (int i = 0; i < m_; ++i)
          w_[static_cast<std::size_t>(i)] +=
              coeff * col_base[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
      }

      // Ratio test: exact tightest ratio; among (near-)ties prefer the
      // largest pivot magnitude. Entries below a relative threshold are
      // treated as noise, not as blocking rows.
      const double own_room = hi_[static_cast<std::size_t>(q)] - lo_[static_cast<std::size_t>(q)];
      double best_delta = std::isfinite(own_room) ? own_room : kInf;
      int leave = -1;          // basis position; -1 means bound flip
      double leave_pivot = 0;  // w at leaving row
      bool leave_to_upper = false;
      double w_max = 0.0;
      for (int i = 0; i < m_; ++i) w_max = std::max(w_max, std::fabs(w_[static_cast<std::size_t>(i)]));
      double piv_tol = 1e-10 * (1.0 + w_max);

      for (int attempt_pass = 0; attempt_pass < 2; ++attempt_pass) {
        for (int i = 0; i < m_; ++i) {
          const double wi = w_[static_cast<std::size_t>(i)];
          if (std::fabs(wi) <= piv_tol) continue;
          const int bv = basis_[static_cast<std::size_t>(i)];
          const double xv = value_[static_cast<std::size_t>(bv)];
          const double move = dir * wi;  // basic value changes by -move * delta
          double room;
          bool to_upper;
          if (move > 0.0) {
            const double lo = lo_[static_cast<std::size_t>(bv)];
            if (!std::isfinite(lo)) continue;
            room = (xv - lo) / move;
            to_upper = false;
          } else {
            const double hi = hi_[static_cast<std::size_t>(bv)];
            if (!std::isfinite(hi)) continue;
            room = (xv - hi) / move;
            to_upper = true;
          }
          if (room < 0.0) room = 0.0;
          bool better;
          if (!std::isfinite(best_delta)) {
            better = true;
          } else {
            const double tie = 1e-12 * (1.0 + best_delta);
            if (room < best_delta - tie)
              better = true;
            else if (room <= best_delta + tie && leave >= 0)
              better = bland ? bv < basis_[static_cast<std::size_t>(leave)]
                             : std::fabs(wi) > std::fabs(leave_pivot);
            else
              better = false;
          }
          if (better) {
            best_delta = std::min(best_delta, room);
            leave = i;
            leave_pivot = wi;
            leave_to_upper = to_upper;
          }
        }
        if (std::isfinite(best_delta) || leave >= 0) break;
        // nothing blocked above the noise threshold: retry with an absolute
        // floor before declaring the direction unbounded
        piv_tol = 1e-12 * (1.0 + w_max);
      }

      if (std::getenv("EC_LP_TRACE")) {
        const long at = std::atol(std::getenv("EC_LP_TRACE"));
        if (at > 0 && iterations_ >= at - 6 && iterations_ <= at + 6)
          std::fprintf(stderr,
                       "    pivot iter=%ld q=%d dir=%d d_q=%.6g delta=%.6g leave=%d "
                       "leave_var=%d pivot=%.6g to_upper=%d own_room=%.6g\n",
                       iterations_, q, dir, d_q, best_delta, leave,
                       leave >= 0 ? basis_[static_cast<std::size_t>(leave)] : -1, leave_pivot,
                       leave_to_upper ? 1 : 0, own_room);
      }
      if (!std::isfinite(best_delta)) {
        // Verify against clean duals before concluding: a sub-tolerance
        // reduced cost over a noise-level column masquerades as a ray.
        if (!unbounded_rechecked) {
          unbounded_rechecked = true;
          if (m_ <= 2000) refactorize();
          refresh_duals();
          refresh_basic_values();
          since_refresh = 0;
          continue;
        }
        if (phase_ == 1) throw NumericError("lp: unbounded phase-1 direction");
        unbounded_ = true;
        return true;
      }
      unbounded_rechecked = false;

      if (best_delta <= 1e-11) {
        if (++degenerate_streak > 40) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }

      // Apply the step to the basic values and the entering variable.
      if (best_delta > 0.0) {
        for (int i = 0; i < m_; ++i) {
          const double wi = w_[static_cast<std::size_t>(i)];
          if (wi == 0.0) continue;
          const int bv = basis_[static_cast<std::size_t>(i)];
          value_[static_cast<std::size_t>(bv)] -= dir * wi * best_delta;
        }
        value_[static_cast<std::size_t>(q)] += dir * best_delta;
      }

      if (leave < 0) {
        // Bound flip: the entering variable traverses to its other bound.
        state_[static_cast<std::size_t>(q)] =
            dir > 0 ? VarState::at_upper : VarState::at_lower;
        value_[static_cast<std::size_t>(q)] =
            dir > 0 ? hi_[static_cast<std::size_t>(q)] : lo_[static_cast<std::size_t>(q)];
        continue;
      }

      const int leaving_var = basis_[static_cast<std::size_t>(leave)];
      state_[static_cast<std::size_t>(leaving_var)] =
          leave_to_upper ? VarState::at_upper : VarState::at_lower;
      value_[static_cast<std::size_t>(leaving_var)] =
          leave_to_upper ? hi_[static_cast<std::size_t>(leaving_var)]
                         : lo_[static_cast<std::size_t>(leaving_var)];
      state_[static_cast<std::size_t>(q)] = VarState::basic;
      basis_[static_cast<std::size_t>(leave)] = q;

      // Dual update with the outgoing row of B^-1, then the rank-1 B^-1 update.
      {
        double* row_r = binv_row(leave);
        const double theta = d_q / leave_pivot;
        if (theta != 0.0)
          for (int k = 0; k < m_; ++k) y_[static_cast<std::size_t>(k)] += theta * row_r[k];
        const double inv_piv = 1.0 / leave_pivot;
        for (int k = 0; k < m_; ++k) row_r[k] *= inv_piv;
        for (int i = 0; i < m_; ++i) {
          if (i == leave) continue;
          const double wi = w_[static_cast<std::size_t>(i)];
          if (wi == 0.0) continue;
          double* row_i = binv_row(i);
          for (int k = 0; k < m_; ++k) row_i[k] -= wi * row_r[k];
        }
      }
    }
  }

  LpSolution extract_solution() {
    LpSolution out;
    out.status = LpStatus::optimal;
    out.iterations = iterations_;
    out.x.assign(static_cast<std::size_t>(n_struct_), 0.0);
    for (int j = 0; j < n_struct_; ++j)
      out.x[static_cast<std::size_t>(j)] =
          value_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)];
    out.objective = dot(out.x, lp_.objective());

    // Multipliers lambda = -y; reduced costs d = c + A'lambda (unscaled).
    out.dual.assign(static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r)
      out.dual[static_cast<std::size_t>(r)] =
          -y_[static_cast<std::size_t>(r)] * row_scale_[static_cast<std::size_t>(r)];
    out.reduced_costs.assign(static_cast<std::size_t>(n_struct_), 0.0);
    for (int j = 0; j < n_struct_; ++j)
      out.reduced_costs[static_cast<std::size_t>(j)] =
          reduced_cost(j) / col_scale_[static_cast<std::size_t>(j)];

    double dual_obj = 0.0;
    const double d_tol = opt_.dual_tol * cost_scale_;
    for (int r = 0; r < m_; ++r)
      dual_obj -= out.dual[static_cast<std::size_t>(r)] *
                  lp_.rows()[static_cast<std::size_t>(r)].rhs;
    for (int j = 0; j < n_struct_; ++j) {
      const double d = out.reduced_costs[static_cast<std::size_t>(j)];
      if (std::fabs(d) <= d_tol) continue;
      const double lo = lp_.lower()[static_cast<std::size_t>(j)];
      const double hi = lp_.upper()[static_cast<std::size_t>(j)];
      if (d > 0.0) {
        dual_obj += std::isfinite(lo) ? d * lo : -kInf;
      } else {
        dual_obj += std::isfinite(hi) ? d * hi : -kInf;
      }
    }
    out.dual_objective = dual_obj;

    // Never report a drifted basis as optimal.
    double max_violation = 0.0;
    for (int r = 0; r < m_; ++r) {
      const LpRow& row = lp_.rows()[static_cast<std::size_t>(r)];
      double activity = 0.0;
      double activity_abs = std::fabs(row.rhs);
      for (const auto& [var, coeff] : row.entries) {
        activity += coeff * out.x[static_cast<std::size_t>(var)];
        activity_abs += std::fabs(coeff * out.x[static_cast<std::size_t>(var)]);
      }
      const double gap = row.is_eq ? std::fabs(activity - row.rhs)
                                   : std::max(0.0, activity - row.rhs);
      max_violation = std::max(max_violation, gap / (1.0 + activity_abs));
    }
    for (int j = 0; j < n_struct_; ++j) {
      const double scale = 1.0 + std::fabs(out.x[static_cast<std::size_t>(j)]);
      max_violation = std::max(max_violation,
                               (lp_.lower()[static_cast<std::size_t>(j)] -
                                out.x[static_cast<std::size_t>(j)]) / scale);
      max_violation = std::max(max_violation,
                               (out.x[static_cast<std::size_t>(j)] -
                                lp_.upper()[static_cast<std::size_t>(j)]) / scale);
    }
    if (max_violation > opt_.final_feas_tol) {
      if (std::getenv("EC_LP_DEBUG")) {
        for (int r = 0; r < m_; ++r) {
          const LpRow& row = lp_.rows()[static_cast<std::size_t>(r)];
          double activity = 0.0, activity_abs = std::fabs(row.rhs);
          for (const auto& [var, coeff] : row.entries) {
            activity += coeff * out.x[static_cast<std::size_t>(var)];
            activity_abs += std::fabs(coeff * out.x[static_cast<std::size_t>(var)]);
          }
          const double gap = row.is_eq ? std::fabs(activity - row.rhs)
                                       : std::max(0.0, activity - row.rhs);
          if (gap / (1.0 + activity_abs) > 1e-8)
            std::fprintf(stderr, "  bad row %d (%s, %zu entries): act=%.12g rhs=%.12g rel=%.3g\n",
                         r, row.is_eq ? "eq" : "le", row.entries.size(), activity, row.rhs,
                         gap / (1.0 + activity_abs));
        }
        for (int j = 0; j < n_struct_; ++j) {
          const double scale = 1.0 + std::fabs(out.x[static_cast<std::size_t>(j)]);
          const double lov = (lp_.lower()[static_cast<std::size_t>(j)] -
                              out.x[static_cast<std::size_t>(j)]) / scale;
          const double hiv = (out.x[static_cast<std::size_t>(j)] -
                              lp_.upper()[static_cast<std::size_t>(j)]) / scale;
          if (lov > 1e-8 || hiv > 1e-8)
            std::fprintf(stderr, "  bad bound x%d=%.12g in [%.6g, %.6g]\n", j,
                         out.x[static_cast<std::size_t>(j)],
                         lp_.lower()[static_cast<std::size_t>(j)],
                         lp_.upper()[static_cast<std::size_t>(j)]);
        }
      }
      if (const char* dump = std::getenv("EC_LP_DUMP")) {
        if (FILE* f = std::fopen(dump, "wx")) {
          std::fprintf(f, "%d\n", n_struct_);
          for (int j = 0; j < n_struct_; ++j)
            std::fprintf(f, "%.17g %.17g %.17g\n", lp_.objective()[static_cast<std::size_t>(j)],
                         lp_.lower()[static_cast<std::size_t>(j)],
                         lp_.upper()[static_cast<std::size_t>(j)]);
          std::fprintf(f, "%d\n", lp_.num_rows());
          for (const auto& row : lp_.rows()) {
            std::fprintf(f, "%d %.17g %zu", row.is_eq ? 1 : 0, row.rhs, row.entries.size());
            for (const auto& [var, coeff] : row.entries)
              std::fprintf(f, " %d %.17g", var, coeff);
            std::fprintf(f, "\n");
          }
          std::fclose(f);
        }
      }
      throw NumericError("lp: solution failed the final feasibility check (violation " +
                         std::to_string(max_violation) + ")");
    }
    return out;
  }

  const LinearProgram& lp_;
  LpOptions opt_;
  int m_ = 0;
  int n_struct_ = 0;
  std::vector<Column> cols_;
  Vector lo_, hi_;
  Vector rhs_;
  double rhs_scale_ = 1.0;
  double cost_scale_ = 1.0;
  std::vector<int> slack_of_row_;
  Vector row_scale_, col_scale_;
  int base_cols_ = 0;
  bool force_bland_ = false;
  std::vector<int> artificials_;
  int num_artificials_ = 0;
  std::vector<int> basis_;
  std::vector<VarState> state_;
  Vector value_;
  Vector cost_;
  Vector y_;
  Vector w_;
  std::vector<double> binv_;
  int phase_ = 1;
  long iterations_ = 0;
  long pivots_since_refactor_ = 0;
  mutable double trace_worst_ = 0.0;
  bool unbounded_ = false;
};

}  // namespace

namespace {
struct LpStats {
  long solves = 0;
  long iterations = 0;
  ~LpStats() {
    if (solves > 0 && std::getenv("EC_LP_STATS"))
      std::fprintf(stderr, "lp stats: %ld solves, %ld iterations (%.1f per solve)\n", solves,
                   iterations, static_cast<double>(iterations) / static_cast<double>(solves));
  }
};
LpStats g_lp_stats;
}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  Simplex simplex(lp, options);
  LpSolution sol = simplex.run();
  if (std::getenv("EC_LP_STATS")) {
    ++g_lp_stats.solves;
    g_lp_stats.iterations += sol.iterations;
  }
  return sol;
}

}  // namespace edgecloud
