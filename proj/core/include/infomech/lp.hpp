#ifndef INFOMECH_LP_HPP
#define INFOMECH_LP_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "infomech/errors.hpp"

namespace infomech {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEq, Equal, GreaterEq };

// Dense LP with named variables. Variables are nonnegative unless their
// lower bound is -inf (free); free variables are handled by splitting
// inside the solver.
struct LinearProgram {
  Sense sense = Sense::Maximize;
  std::vector<std::string> variable_names;
  std::vector<double> lower_bounds;  // 0 or -inf per variable
  std::vector<double> objective;

  struct Constraint {
    std::vector<double> coeffs;
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
    std::string name;
  };
  std::vector<Constraint> constraints;

  int add_variable(std::string name, double lower_bound = 0.0) {
    variable_names.push_back(std::move(name));
    lower_bounds.push_back(lower_bound);
    objective.push_back(0.0);
    return static_cast<int>(variable_names.size()) - 1;
  }
  void add_constraint(std::vector<double> coeffs, Relation rel, double rhs,
                      std::string name) {
    constraints.push_back({std::move(coeffs), rel, rhs, std::move(name)});
  }
  int num_variables() const { return static_cast<int>(variable_names.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int variable_index(const std::string& name) const;
};

struct LpSolution {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Optimal;
  std::vector<double> primal;  // per variable
  std::vector<double> dual;    // per constraint, max-problem convention:
                               // <= rows nonnegative, >= rows nonpositive
  double objective = 0.0;
  std::vector<int> basis;      // basic column indices of the internal
                               // equality form, for vertex certification

  double value(const LinearProgram& lp, const std::string& name) const {
    return primal[static_cast<size_t>(lp.variable_index(name))];
  }
};

struct SolverOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  int max_iterations = 200000;
  // Dantzig pricing for this many iterations, then Bland's rule.
  int dantzig_iterations = 20000;
};

// Two-phase dense primal simplex. Deterministic: identical inputs produce
// identical solutions. The returned primal is a basic feasible point of the
// feasible polyhedron; duals satisfy strong duality within 1e-7 relative.
// Throws NumericFailure if pivoting stalls beyond the iteration cap.
LpSolution solve(const LinearProgram& lp, const SolverOptions& opts = {});

// Re-solves with the given variables frozen, returning a vertex of the
// restricted polyhedron. Status Infeasible when the assignment kills
// feasibility. Used by the support-reduction procedure.
LpSolution restrict_and_vertex(const LinearProgram& lp,
                               const std::vector<std::pair<int, double>>& fixed,
                               const SolverOptions& opts = {});

// Mechanical dualization: max <-> min, row relations become variable signs,
// variable signs become row relations. Nonpositive dual variables are
// represented by negated nonnegative ones (named "neg_..."), so the double
// dual equals the original up to row/column permutation and sign bookkeeping;
// optimal objectives always match.
LinearProgram build_dual(const LinearProgram& lp);

// Plain-text tableau rendering for the --lp-dump flag and external checks.
std::string format_lp(const LinearProgram& lp);

}  // namespace infomech

#endif  // INFOMECH_LP_HPP
