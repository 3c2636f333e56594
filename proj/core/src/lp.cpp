#include "infomech/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace infomech {

int LinearProgram::variable_index(const std::string& name) const {
  for (int j = 0; j < num_variables(); ++j) {
    if (variable_names[j] == name) return j;
  }
  throw InputError("unknown variable: " + name);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal equality-form problem: minimize c.z subject to T z = rhs, z >= 0.
// Columns: original (possibly split) variables, then slacks/surpluses, then
// artificials. The tableau rows are kept as B^{-1} A throughout.
struct Standardized {
  int rows = 0;
  int cols = 0;
  std::vector<double> tab;   // rows x cols, kept as B^{-1} A
  std::vector<double> rhs;   // rows
  std::vector<double> cost;  // phase-2 cost per column
  std::vector<int> basis;    // basic column per row
  std::vector<bool> artificial;

  // Frozen copies of the equality form, the ground truth the tableau is
  // periodically refactorized against.
  std::vector<double> orig_tab;
  std::vector<double> orig_rhs;

  // Bookkeeping to map back to the caller's formulation.
  std::vector<int> pos_col;        // per original var: column of x+
  std::vector<int> neg_col;        // per original var: column of x- or -1
  std::vector<double> col_scale;   // per original var: column equilibration
  std::vector<int> identity_col;   // per row: slack or artificial column
  std::vector<double> row_sign;    // +1, or -1 when the row was negated
  std::vector<double> row_scale;   // row equilibration divisor
  std::vector<int> row_origin;     // original constraint index
  double obj_sign = 1.0;           // -1 when the caller maximizes

  double& at(int i, int j) { return tab[static_cast<size_t>(i) * cols + j]; }
  double get(int i, int j) const {
    return tab[static_cast<size_t>(i) * cols + j];
  }
};

Standardized standardize(const LinearProgram& lp) {
  Standardized s;
  const int n = lp.num_variables();
  const int m = lp.num_constraints();
  s.rows = m;
  s.obj_sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;

  s.pos_col.resize(n);
  s.neg_col.assign(n, -1);
  int col = 0;
  for (int j = 0; j < n; ++j) {
    s.pos_col[j] = col++;
    if (lp.lower_bounds[j] == -kInf) s.neg_col[j] = col++;
  }
  const int var_cols = col;

  // Equilibration. Rows are divided by their largest coefficient first (a
  // vanishing type mass must not let its IR row hide inside the feasibility
  // tolerance), then each variable column by its largest scaled coefficient
  // so tiny-but-legitimate columns survive the pivot threshold. The
  // internal variable is z_j = col_scale_j * x_j.
  s.row_scale.assign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    double biggest = 0.0;
    for (double v : lp.constraints[i].coeffs) {
      biggest = std::max(biggest, std::abs(v));
    }
    if (biggest > 0.0) s.row_scale[i] = biggest;
  }
  s.col_scale.assign(n, 1.0);
  for (int j = 0; j < n; ++j) {
    double biggest = 0.0;
    for (int i = 0; i < m; ++i) {
      biggest =
          std::max(biggest, std::abs(lp.constraints[i].coeffs[j]) / s.row_scale[i]);
    }
    if (biggest > 0.0) s.col_scale[j] = biggest;
  }

  // Count slack/surplus and artificial columns.
  int slack_cols = 0, art_cols = 0;
  for (const auto& c : lp.constraints) {
    if (c.rel != Relation::Equal) ++slack_cols;
  }
  for (const auto& c : lp.constraints) {
    const bool flip = c.rhs < 0.0;
    Relation rel = c.rel;
    if (flip) {
      rel = rel == Relation::LessEq ? Relation::GreaterEq
            : rel == Relation::GreaterEq ? Relation::LessEq
                                         : Relation::Equal;
    }
    if (rel != Relation::LessEq) ++art_cols;
  }
  s.cols = var_cols + slack_cols + art_cols;
  s.tab.assign(static_cast<size_t>(m) * s.cols, 0.0);
  s.rhs.assign(m, 0.0);
  s.cost.assign(s.cols, 0.0);
  s.artificial.assign(s.cols, false);
  s.identity_col.assign(m, -1);
  s.row_sign.assign(m, 1.0);
  s.row_origin.resize(m);
  s.basis.assign(m, -1);

  for (int j = 0; j < n; ++j) {
    const double cj = s.obj_sign * lp.objective[j] / s.col_scale[j];
    s.cost[s.pos_col[j]] = cj;
    if (s.neg_col[j] >= 0) s.cost[s.neg_col[j]] = -cj;
  }

  int next_slack = var_cols;
  int next_art = var_cols + slack_cols;
  for (int i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    if (static_cast<int>(c.coeffs.size()) != n) {
      throw InputError("constraint '" + c.name + "' has wrong row length");
    }
    s.row_origin[i] = i;
    const bool flip = c.rhs < 0.0;
    const double sign = flip ? -1.0 : 1.0;
    s.row_sign[i] = sign;
    Relation rel = c.rel;
    if (flip) {
      rel = rel == Relation::LessEq ? Relation::GreaterEq
            : rel == Relation::GreaterEq ? Relation::LessEq
                                         : Relation::Equal;
    }
    for (int j = 0; j < n; ++j) {
      const double a = sign * c.coeffs[j] / (s.col_scale[j] * s.row_scale[i]);
      s.at(i, s.pos_col[j]) = a;
      if (s.neg_col[j] >= 0) s.at(i, s.neg_col[j]) = -a;
    }
    s.rhs[i] = sign * c.rhs / s.row_scale[i];
    switch (rel) {
      case Relation::LessEq: {
        const int sc = next_slack++;
        s.at(i, sc) = 1.0;
        s.identity_col[i] = sc;
        s.basis[i] = sc;
        break;
      }
      case Relation::GreaterEq: {
        const int sc = next_slack++;
        s.at(i, sc) = -1.0;
        const int ac = next_art++;
        s.at(i, ac) = 1.0;
        s.artificial[ac] = true;
        s.identity_col[i] = ac;
        s.basis[i] = ac;
        break;
      }
      case Relation::Equal: {
        const int ac = next_art++;
        s.at(i, ac) = 1.0;
        s.artificial[ac] = true;
        s.identity_col[i] = ac;
        s.basis[i] = ac;
        break;
      }
    }
  }
  s.orig_tab = s.tab;
  s.orig_rhs = s.rhs;
  return s;
}

// Internal signal: the current basis matrix lost invertibility at working
// precision. run_simplex reverts the offending exchange when it can.
struct SingularBasis {};

// Rebuilds tab = B^{-1} orig_tab and rhs = B^{-1} orig_rhs from the frozen
// equality form, curing the drift that tableau pivoting accumulates.
void refactorize(Standardized& s) {
  const int m = s.rows;
  if (m == 0) return;
  const int cols = s.cols;
  // LU of the basis matrix with partial pivoting.
  std::vector<double> lu(static_cast<size_t>(m) * m);
  double basis_scale = 0.0;
  for (int r = 0; r < m; ++r) {
    for (int i = 0; i < m; ++i) {
      const double v = s.orig_tab[static_cast<size_t>(r) * cols + s.basis[i]];
      lu[static_cast<size_t>(r) * m + i] = v;
      basis_scale = std::max(basis_scale, std::abs(v));
    }
  }
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  for (int col = 0; col < m; ++col) {
    int best = col;
    for (int r = col + 1; r < m; ++r) {
      if (std::abs(lu[static_cast<size_t>(r) * m + col]) >
          std::abs(lu[static_cast<size_t>(best) * m + col])) {
        best = r;
      }
    }
    if (std::abs(lu[static_cast<size_t>(best) * m + col]) <
        1e-13 * (1.0 + basis_scale)) {
      throw SingularBasis{};
    }
    if (best != col) {
      for (int j = 0; j < m; ++j) {
        std::swap(lu[static_cast<size_t>(best) * m + j],
                  lu[static_cast<size_t>(col) * m + j]);
      }
      std::swap(perm[best], perm[col]);
    }
    const double piv = lu[static_cast<size_t>(col) * m + col];
    for (int r = col + 1; r < m; ++r) {
      const double f = lu[static_cast<size_t>(r) * m + col] / piv;
      lu[static_cast<size_t>(r) * m + col] = f;
      if (f == 0.0) continue;
      for (int j = col + 1; j < m; ++j) {
        lu[static_cast<size_t>(r) * m + j] -=
            f * lu[static_cast<size_t>(col) * m + j];
      }
    }
  }
  auto solve_inplace = [&](std::vector<double>& x) {
    // x <- U^{-1} L^{-1} P x
    std::vector<double> y(m);
    for (int i = 0; i < m; ++i) y[i] = x[perm[i]];
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < i; ++j) y[i] -= lu[static_cast<size_t>(i) * m + j] * y[j];
    }
    for (int i = m - 1; i >= 0; --i) {
      for (int j = i + 1; j < m; ++j) {
        y[i] -= lu[static_cast<size_t>(i) * m + j] * y[j];
      }
      y[i] /= lu[static_cast<size_t>(i) * m + i];
    }
    x = std::move(y);
  };
  std::vector<double> colv(m);
  for (int j = 0; j < cols; ++j) {
    for (int r = 0; r < m; ++r) {
      colv[r] = s.orig_tab[static_cast<size_t>(r) * cols + j];
    }
    solve_inplace(colv);
    for (int r = 0; r < m; ++r) s.at(r, j) = colv[r];
  }
  std::vector<double> rhs = s.orig_rhs;
  solve_inplace(rhs);
  for (int r = 0; r < m; ++r) {
    // Basic values must stay nonnegative; clip rounding-level negatives.
    s.rhs[r] = rhs[r] < 0.0 && rhs[r] > -1e-11 ? 0.0 : rhs[r];
  }
  // Identity structure on basic columns, exact.
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < m; ++r) s.at(r, s.basis[i]) = r == i ? 1.0 : 0.0;
  }
}

void pivot(Standardized& s, int row, int col) {
  const double piv = s.get(row, col);
  const double inv = 1.0 / piv;
  for (int j = 0; j < s.cols; ++j) s.at(row, j) *= inv;
  s.rhs[row] *= inv;
  s.at(row, col) = 1.0;  // kill roundoff on the pivot itself
  for (int i = 0; i < s.rows; ++i) {
    if (i == row) continue;
    const double f = s.get(i, col);
    if (f == 0.0) continue;
    for (int j = 0; j < s.cols; ++j) s.at(i, j) -= f * s.get(row, j);
    s.rhs[i] -= f * s.rhs[row];
    s.at(i, col) = 0.0;
  }
}

// Runs the simplex loop on the given cost vector. Columns flagged in
// `banned` may not enter the basis. Returns false on unboundedness.
bool run_simplex(Standardized& s, const std::vector<double>& cost,
                 const std::vector<bool>& banned, const SolverOptions& opts,
                 int& iterations) {
  const int rows = s.rows;
  const int cols = s.cols;
  // Refresh the tableau after every pivot when the instance is small enough
  // for that to be free; large column counts fall back to a fixed cadence.
  const int refactor_every =
      static_cast<long long>(rows) * rows * cols <= 2'000'000 ? 1 : 25;
  std::vector<double> reduced(cols);
  // Columns whose reduced cost sits at rounding level while their tableau
  // column is numerically zero: already optimal in that direction.
  std::vector<bool> exhausted(cols, false);
  // Columns whose entry made the basis numerically singular.
  std::vector<bool> degenerate_entry(cols, false);
  std::vector<bool> is_basic(cols, false);
  for (int i = 0; i < rows; ++i) is_basic[s.basis[i]] = true;
  int pivots_since_refactor = 0;
  for (;;) {
    if (++iterations > opts.max_iterations) {
      throw NumericFailure("simplex iteration cap exceeded");
    }
    // Reduced costs c_j - c_B^t (B^{-1} A)_j recomputed from the tableau.
    std::vector<double> cb(rows);
    for (int i = 0; i < rows; ++i) cb[i] = cost[s.basis[i]];
    for (int j = 0; j < cols; ++j) {
      double z = 0.0;
      for (int i = 0; i < rows; ++i) {
        const double t = s.get(i, j);
        if (t != 0.0) z += cb[i] * t;
      }
      reduced[j] = cost[j] - z;
    }
    const bool bland = iterations > opts.dantzig_iterations;
    int enter = -1;
    double best = -opts.optimality_tol;
    for (int j = 0; j < cols; ++j) {
      if (banned[j] || exhausted[j] || degenerate_entry[j] || is_basic[j]) {
        continue;
      }
      if (reduced[j] < best) {
        enter = j;
        if (bland) break;
        best = reduced[j];
      }
    }
    // Never conclude from a stale tableau: refresh and rescan first.
    if (enter < 0) {
      if (pivots_since_refactor > 0) {
        refactorize(s);
        pivots_since_refactor = 0;
        std::fill(exhausted.begin(), exhausted.end(), false);
        continue;
      }
      return true;  // optimal
    }

    int leave = -1;
    double best_ratio = kInf;
    for (int i = 0; i < rows; ++i) {
      const double a = s.get(i, enter);
      if (a > 1e-10) {
        const double ratio = std::max(s.rhs[i], 0.0) / a;
        if (ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio < best_ratio + 1e-12 && leave >= 0) {
          // Tie-break: Bland mode goes by lowest basic index for
          // termination; otherwise prefer the fattest pivot, which keeps
          // the basis away from singularity.
          if (bland ? s.basis[i] < s.basis[leave]
                    : a > s.get(leave, enter)) {
            leave = i;
          }
        }
      }
    }
    if (leave < 0) {
      if (pivots_since_refactor > 0) {
        refactorize(s);
        pivots_since_refactor = 0;
        std::fill(exhausted.begin(), exhausted.end(), false);
        continue;
      }
      double obj_now = 0.0;
      for (int i = 0; i < rows; ++i) obj_now += cb[i] * s.rhs[i];
      if (reduced[enter] >= -1e-7 * (1.0 + std::abs(obj_now))) {
        exhausted[enter] = true;
        continue;
      }
      return false;  // unbounded direction
    }
    const int old_col = s.basis[leave];
    s.basis[leave] = enter;
    if (++pivots_since_refactor >= refactor_every) {
      try {
        refactorize(s);
      } catch (const SingularBasis&) {
        if (refactor_every != 1) throw;
        // The exchange destroyed invertibility at working precision: undo
        // it and keep that column out of the basis for now.
        s.basis[leave] = old_col;
        refactorize(s);
        pivots_since_refactor = 0;
        degenerate_entry[enter] = true;
        continue;
      }
      pivots_since_refactor = 0;
      std::fill(exhausted.begin(), exhausted.end(), false);
      std::fill(degenerate_entry.begin(), degenerate_entry.end(), false);
    } else {
      pivot(s, leave, enter);
    }
    is_basic[old_col] = false;
    is_basic[enter] = true;
  }
}

// Removes rows whose artificial stayed basic after phase 1 and whose
// coefficients over the real columns are all zero: redundant equations.
void drop_redundant_rows(Standardized& s) {
  std::vector<int> keep;
  for (int i = 0; i < s.rows; ++i) {
    if (!s.artificial[s.basis[i]]) {
      keep.push_back(i);
      continue;
    }
    // Try to pivot the artificial out on any usable real column.
    int col = -1;
    for (int j = 0; j < s.cols && col < 0; ++j) {
      if (s.artificial[j]) continue;
      bool is_basic = false;
      for (int r = 0; r < s.rows; ++r) {
        if (s.basis[r] == j) {
          is_basic = true;
          break;
        }
      }
      if (!is_basic && std::abs(s.get(i, j)) > 1e-9) col = j;
    }
    if (col >= 0) {
      s.basis[i] = col;
      pivot(s, i, col);
      keep.push_back(i);
    }
    // else: dependent row, dropped below
  }
  if (static_cast<int>(keep.size()) == s.rows) return;
  Standardized t = s;
  s.tab.clear();
  s.rhs.clear();
  s.basis.clear();
  s.identity_col.clear();
  s.row_sign.clear();
  s.row_scale.clear();
  s.row_origin.clear();
  s.orig_tab.clear();
  s.orig_rhs.clear();
  s.rows = static_cast<int>(keep.size());
  s.tab.resize(static_cast<size_t>(s.rows) * s.cols);
  s.orig_tab.resize(static_cast<size_t>(s.rows) * s.cols);
  for (int k = 0; k < s.rows; ++k) {
    const int i = keep[k];
    for (int j = 0; j < s.cols; ++j) {
      s.at(k, j) = t.get(i, j);
      s.orig_tab[static_cast<size_t>(k) * s.cols + j] =
          t.orig_tab[static_cast<size_t>(i) * s.cols + j];
    }
    s.rhs.push_back(t.rhs[i]);
    s.orig_rhs.push_back(t.orig_rhs[i]);
    s.basis.push_back(t.basis[i]);
    s.identity_col.push_back(t.identity_col[i]);
    s.row_sign.push_back(t.row_sign[i]);
    s.row_scale.push_back(t.row_scale[i]);
    s.row_origin.push_back(t.row_origin[i]);
  }
  // The filtered tableau is stale with respect to the filtered equality
  // form; rebuild it before phase 2 touches it.
  refactorize(s);
}

// A basic solution satisfies sum(y) rhs = objective identically, so the
// genuine optimality certificate is dual feasibility: no admissible column
// may keep a substantially negative reduced cost.
void verify_dual_feasibility(Standardized& s, const std::vector<bool>& banned) {
  refactorize(s);
  const int rows = s.rows;
  std::vector<double> cb(rows);
  double obj = 0.0, cost_scale = 0.0;
  for (int i = 0; i < rows; ++i) {
    cb[i] = s.cost[s.basis[i]];
    obj += cb[i] * s.rhs[i];
  }
  for (double c : s.cost) cost_scale = std::max(cost_scale, std::abs(c));
  const double budget = 1e-6 * (1.0 + std::abs(obj) + cost_scale);
  for (int j = 0; j < s.cols; ++j) {
    if (banned[j]) continue;
    double z = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double t = s.get(i, j);
      if (t != 0.0) z += cb[i] * t;
    }
    if (s.cost[j] - z < -budget) {
      throw NumericFailure("phase 2 stopped short of optimality at column " +
                           std::to_string(j));
    }
  }
}

LpSolution extract(const LinearProgram& lp, Standardized& s) {
  // Primal values and duals both read off the tableau; compute them from a
  // fresh B^{-1}A, not from whatever pivoting history left behind.
  refactorize(s);
  LpSolution sol;
  sol.status = LpSolution::Status::Optimal;
  const int n = lp.num_variables();

  std::vector<double> z(s.cols, 0.0);
  for (int i = 0; i < s.rows; ++i) z[s.basis[i]] = s.rhs[i];
  sol.primal.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    sol.primal[j] = z[s.pos_col[j]];
    if (s.neg_col[j] >= 0) sol.primal[j] -= z[s.neg_col[j]];
    sol.primal[j] /= s.col_scale[j];
  }
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.primal[j];

  // Duals from the identity columns: y_i = c_B^t (B^{-1})_{:,i}.
  std::vector<double> cb(s.rows);
  for (int i = 0; i < s.rows; ++i) cb[i] = s.cost[s.basis[i]];
  sol.dual.assign(lp.num_constraints(), 0.0);
  for (int i = 0; i < s.rows; ++i) {
    double y = 0.0;
    for (int r = 0; r < s.rows; ++r) y += cb[r] * s.get(r, s.identity_col[i]);
    y *= s.row_sign[i] * s.obj_sign / s.row_scale[i];
    sol.dual[s.row_origin[i]] = y;
  }
  sol.basis = s.basis;
  return sol;
}

void check_solution(const LinearProgram& lp, const LpSolution& sol,
                    const SolverOptions& opts) {
  // Primal feasibility, complementary slackness and strong duality are
  // verified on every optimal exit; violations are reported, never silent.
  double dual_obj = 0.0;
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const auto& c = lp.constraints[i];
    double lhs = 0.0, scale = std::abs(c.rhs);
    for (int j = 0; j < lp.num_variables(); ++j) {
      lhs += c.coeffs[j] * sol.primal[j];
      scale += std::abs(c.coeffs[j] * sol.primal[j]);
    }
    const double slack = c.rhs - lhs;
    const double tol = opts.feasibility_tol * (1.0 + scale);
    const bool ok = c.rel == Relation::LessEq   ? slack >= -tol
                    : c.rel == Relation::GreaterEq ? slack <= tol
                                                   : std::abs(slack) <= tol;
    if (!ok) {
      throw NumericFailure("primal infeasibility at constraint '" + c.name +
                           "': residual " + std::to_string(slack));
    }
    dual_obj += sol.dual[i] * c.rhs;
    const double cs = sol.dual[i] * slack;
    // Degenerate vertices pair large duals with rounding-level slack, so the
    // budget grows with both the row scale and the dual magnitude.
    if (std::abs(cs) > 1e-7 * (1.0 + std::abs(sol.objective) + scale) *
                           (1.0 + std::abs(sol.dual[i]))) {
      throw NumericFailure("complementary slackness violated at '" + c.name +
                           "'");
    }
  }
  if (std::abs(dual_obj - sol.objective) >
      1e-7 * (1.0 + std::abs(sol.objective))) {
    throw NumericFailure("strong duality gap: primal " +
                         std::to_string(sol.objective) + " vs dual " +
                         std::to_string(dual_obj));
  }
}

LpSolution solve_impl(const LinearProgram& lp, const SolverOptions& opts) {
  Standardized s = standardize(lp);
  int iterations = 0;

  bool have_artificials = false;
  for (bool a : s.artificial) have_artificials |= a;
  if (have_artificials) {
    // Dropping a redundant row can leave a basis whose columns no longer
    // span the remaining rows; in that case fall back to the slack and
    // artificial basis of the filtered system and run phase 1 once more.
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::vector<double> phase1(s.cols, 0.0);
      for (int j = 0; j < s.cols; ++j) {
        if (s.artificial[j]) phase1[j] = 1.0;
      }
      std::vector<bool> banned(s.cols, false);
      if (!run_simplex(s, phase1, banned, opts, iterations)) {
        throw NumericFailure("phase 1 reported unbounded");
      }
      double infeas = 0.0;
      for (int i = 0; i < s.rows; ++i) {
        if (s.artificial[s.basis[i]]) infeas += s.rhs[i];
      }
      if (infeas > opts.feasibility_tol * (1.0 + s.rows)) {
        LpSolution sol;
        sol.status = LpSolution::Status::Infeasible;
        sol.primal.assign(lp.num_variables(), 0.0);
        sol.dual.assign(lp.num_constraints(), 0.0);
        return sol;
      }
      try {
        drop_redundant_rows(s);
        break;
      } catch (const SingularBasis&) {
        if (attempt == 1) throw;
        for (int i = 0; i < s.rows; ++i) s.basis[i] = s.identity_col[i];
        refactorize(s);
      }
    }
  }

  std::vector<bool> banned = s.artificial;
  if (!run_simplex(s, s.cost, banned, opts, iterations)) {
    LpSolution sol;
    sol.status = LpSolution::Status::Unbounded;
    sol.primal.assign(lp.num_variables(), 0.0);
    sol.dual.assign(lp.num_constraints(), 0.0);
    return sol;
  }
  verify_dual_feasibility(s, banned);
  LpSolution sol = extract(lp, s);
  check_solution(lp, sol, opts);
  return sol;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverOptions& opts) {
  try {
    return solve_impl(lp, opts);
  } catch (const SingularBasis&) {
    throw NumericFailure("singular basis during refactorization");
  }
}

LpSolution restrict_and_vertex(const LinearProgram& lp,
                               const std::vector<std::pair<int, double>>& fixed,
                               const SolverOptions& opts) {
  std::vector<bool> is_fixed(lp.num_variables(), false);
  std::vector<double> fixed_value(lp.num_variables(), 0.0);
  for (const auto& [j, v] : fixed) {
    is_fixed[j] = true;
    fixed_value[j] = v;
  }
  LinearProgram reduced;
  reduced.sense = lp.sense;
  std::vector<int> keep;
  double obj_offset = 0.0;
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (is_fixed[j]) {
      obj_offset += lp.objective[j] * fixed_value[j];
      continue;
    }
    keep.push_back(j);
    reduced.add_variable(lp.variable_names[j], lp.lower_bounds[j]);
    reduced.objective.back() = lp.objective[j];
  }
  for (const auto& c : lp.constraints) {
    std::vector<double> row;
    row.reserve(keep.size());
    double rhs = c.rhs;
    for (int j = 0; j < lp.num_variables(); ++j) {
      if (is_fixed[j]) {
        rhs -= c.coeffs[j] * fixed_value[j];
      } else {
        row.push_back(c.coeffs[j]);
      }
    }
    reduced.add_constraint(std::move(row), c.rel, rhs, c.name);
  }
  LpSolution inner = solve(reduced, opts);
  LpSolution sol;
  sol.status = inner.status;
  sol.dual = inner.dual;
  sol.basis = inner.basis;
  sol.primal.assign(lp.num_variables(), 0.0);
  if (inner.status == LpSolution::Status::Optimal) {
    for (size_t k = 0; k < keep.size(); ++k) {
      sol.primal[keep[k]] = inner.primal[k];
    }
    for (int j = 0; j < lp.num_variables(); ++j) {
      if (is_fixed[j]) sol.primal[j] = fixed_value[j];
    }
    sol.objective = inner.objective + obj_offset;
  }
  return sol;
}

LinearProgram build_dual(const LinearProgram& lp) {
  LinearProgram dual;
  const bool primal_max = lp.sense == Sense::Maximize;
  dual.sense = primal_max ? Sense::Minimize : Sense::Maximize;

  // One dual variable per primal row. Sign-constrained duals that would be
  // nonpositive are represented negated so every variable keeps a 0 or -inf
  // lower bound.
  std::vector<double> var_sign(lp.num_constraints(), 1.0);
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const auto& c = lp.constraints[i];
    double lb = 0.0;
    double sign = 1.0;
    if (c.rel == Relation::Equal) {
      lb = -kInf;
    } else if ((primal_max && c.rel == Relation::GreaterEq) ||
               (!primal_max && c.rel == Relation::LessEq)) {
      sign = -1.0;  // y_i <= 0 encoded as -y_i >= 0
    }
    var_sign[i] = sign;
    dual.add_variable((sign < 0 ? "neg_y_" : "y_") + c.name, lb);
    dual.objective.back() = sign * c.rhs;
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    std::vector<double> row(lp.num_constraints());
    for (int i = 0; i < lp.num_constraints(); ++i) {
      row[i] = var_sign[i] * lp.constraints[i].coeffs[j];
    }
    Relation rel = lp.lower_bounds[j] == -kInf ? Relation::Equal
                   : primal_max                ? Relation::GreaterEq
                                               : Relation::LessEq;
    dual.add_constraint(std::move(row), rel, lp.objective[j],
                        "x_" + lp.variable_names[j]);
  }
  return dual;
}

std::string format_lp(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(12);
  os << (lp.sense == Sense::Maximize ? "max" : "min");
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.objective[j] == 0.0) continue;
    os << (lp.objective[j] >= 0 ? " + " : " - ")
       << std::abs(lp.objective[j]) << " " << lp.variable_names[j];
  }
  os << "\n";
  for (const auto& c : lp.constraints) {
    os << "  " << c.name << ":";
    bool any = false;
    for (int j = 0; j < lp.num_variables(); ++j) {
      if (c.coeffs[j] == 0.0) continue;
      os << (c.coeffs[j] >= 0 ? " + " : " - ") << std::abs(c.coeffs[j]) << " "
         << lp.variable_names[j];
      any = true;
    }
    if (!any) os << " 0";
    os << (c.rel == Relation::LessEq     ? " <= "
           : c.rel == Relation::GreaterEq ? " >= "
                                          : " = ")
       << c.rhs << "\n";
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.lower_bounds[j] == -kInf) os << "  " << lp.variable_names[j] << " free\n";
  }
  return os.str();
}

}  // namespace infomech
