#include <cmath>
#include <random>

#include "doctest.h"
#include "infomech/fixtures.hpp"
#include "infomech/geometry.hpp"
#include "infomech/lp.hpp"
#include "infomech/mechanisms.hpp"

using namespace infomech;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent feasibility check straight off the raw data.
bool feasible(const LinearProgram& lp, const std::vector<double>& x,
              double tol = 1e-8) {
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.lower_bounds[j] == 0.0 && x[j] < -tol) return false;
  }
  for (const auto& c : lp.constraints) {
    double lhs = 0.0, scale = std::abs(c.rhs);
    for (int j = 0; j < lp.num_variables(); ++j) {
      lhs += c.coeffs[j] * x[j];
      scale += std::abs(c.coeffs[j] * x[j]);
    }
    const double t = tol * (1.0 + scale);
    switch (c.rel) {
      case Relation::LessEq:
        if (lhs > c.rhs + t) return false;
        break;
      case Relation::GreaterEq:
        if (lhs < c.rhs - t) return false;
        break;
      case Relation::Equal:
        if (std::abs(lhs - c.rhs) > t) return false;
        break;
    }
  }
  return true;
}

// Random feasible bounded LP: pick a reference point, derive right-hand
// sides around it, box everything.
LinearProgram random_lp(std::mt19937& rng, int nvars, int nrows,
                        bool allow_free = true) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  LinearProgram lp;
  lp.sense = unif(rng) < 0.5 ? Sense::Maximize : Sense::Minimize;
  std::vector<double> ref(nvars);
  for (int j = 0; j < nvars; ++j) {
    const bool free_var = allow_free && unif(rng) < 0.25;
    lp.add_variable("x" + std::to_string(j), free_var ? -kInf : 0.0);
    lp.objective[j] = -1.0 + 2.0 * unif(rng);
    ref[j] = free_var ? -1.0 + 2.0 * unif(rng) : unif(rng);
  }
  for (int i = 0; i < nrows; ++i) {
    std::vector<double> row(nvars);
    double at_ref = 0.0;
    for (int j = 0; j < nvars; ++j) {
      row[j] = -1.0 + 2.0 * unif(rng);
      at_ref += row[j] * ref[j];
    }
    const double roll = unif(rng);
    if (roll < 0.4) {
      lp.add_constraint(row, Relation::LessEq, at_ref + unif(rng),
                        "le" + std::to_string(i));
    } else if (roll < 0.8) {
      lp.add_constraint(row, Relation::GreaterEq, at_ref - unif(rng),
                        "ge" + std::to_string(i));
    } else {
      lp.add_constraint(row, Relation::Equal, at_ref,
                        "eq" + std::to_string(i));
    }
  }
  // bounding box so the instance cannot be unbounded
  for (int j = 0; j < nvars; ++j) {
    std::vector<double> row(nvars, 0.0);
    row[j] = 1.0;
    lp.add_constraint(row, Relation::LessEq, 10.0, "ub" + std::to_string(j));
    row[j] = -1.0;
    lp.add_constraint(row, Relation::LessEq, 10.0, "lb" + std::to_string(j));
  }
  return lp;
}

// Rank of the active rows (tight constraints plus tight variable bounds) at
// the returned point; full column rank certifies a vertex.
int active_rank(const LinearProgram& lp, const std::vector<double>& x) {
  std::vector<std::vector<double>> rows;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0, scale = std::abs(c.rhs);
    for (int j = 0; j < lp.num_variables(); ++j) {
      lhs += c.coeffs[j] * x[j];
      scale += std::abs(c.coeffs[j] * x[j]);
    }
    if (c.rel == Relation::Equal ||
        std::abs(lhs - c.rhs) <= 1e-7 * (1.0 + scale)) {
      rows.push_back(c.coeffs);
    }
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.lower_bounds[j] == 0.0 && std::abs(x[j]) <= 1e-9) {
      std::vector<double> e(lp.num_variables(), 0.0);
      e[j] = 1.0;
      rows.push_back(std::move(e));
    }
  }
  // Gaussian elimination rank
  const int n = lp.num_variables();
  int rank = 0;
  for (int col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    double best = 1e-9;
    for (size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][col]) > best) {
        best = std::abs(rows[r][col]);
        piv = static_cast<int>(r);
      }
    }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    for (size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(r) == rank) continue;
      const double f = rows[r][col] / rows[rank][col];
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) rows[r][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("one-dimensional program and its dual price") {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x");
  lp.objective[0] = 1.0;
  lp.add_constraint({1.0}, Relation::LessEq, 3.0, "cap");
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.dual[0] == doctest::Approx(1.0));
}

TEST_CASE("build_dual of the one-dimensional program") {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x");
  lp.objective[0] = 1.0;
  lp.add_constraint({1.0}, Relation::LessEq, 3.0, "cap");
  const LinearProgram dual = build_dual(lp);
  CHECK(dual.sense == Sense::Minimize);
  REQUIRE(dual.num_variables() == 1);
  CHECK(dual.objective[0] == doctest::Approx(3.0));
  REQUIRE(dual.num_constraints() == 1);
  CHECK(dual.constraints[0].rel == Relation::GreaterEq);
  CHECK(dual.constraints[0].rhs == doctest::Approx(1.0));
  const LpSolution dsol = solve(dual);
  REQUIRE(dsol.status == LpSolution::Status::Optimal);
  CHECK(dsol.objective == doctest::Approx(3.0));
}

TEST_CASE("random programs: duality, feasibility, vertex certificates") {
  std::mt19937 rng(2024);
  int solved = 0;
  for (int trial = 0; trial < 60 && solved < 50; ++trial) {
    const int nvars = 2 + trial % 5;
    const int nrows = 1 + trial % 6;
    const LinearProgram lp = random_lp(rng, nvars, nrows);
    const LpSolution sol = solve(lp);
    if (sol.status != LpSolution::Status::Optimal) continue;
    ++solved;
    CHECK(feasible(lp, sol.primal));
    double dual_obj = 0.0;
    for (int i = 0; i < lp.num_constraints(); ++i) {
      dual_obj += sol.dual[i] * lp.constraints[i].rhs;
    }
    CHECK(std::abs(dual_obj - sol.objective) <=
          1e-7 * (1.0 + std::abs(sol.objective)));

    // double dual: same optimum
    const LinearProgram dd = build_dual(build_dual(lp));
    const LpSolution ddsol = solve(dd);
    REQUIRE(ddsol.status == LpSolution::Status::Optimal);
    CHECK(std::abs(ddsol.objective - sol.objective) <=
          1e-9 * (1.0 + std::abs(sol.objective)));
  }
  CHECK(solved >= 50);
}

TEST_CASE("solver is deterministic") {
  std::mt19937 rng(9);
  const LinearProgram lp = random_lp(rng, 5, 4);
  const LpSolution a = solve(lp);
  const LpSolution b = solve(lp);
  REQUIRE(a.status == b.status);
  CHECK(a.primal == b.primal);
  CHECK(a.dual == b.dual);
  CHECK(a.basis == b.basis);
}

TEST_CASE("infeasible and unbounded statuses") {
  LinearProgram bad;
  bad.sense = Sense::Maximize;
  bad.add_variable("x");
  bad.objective[0] = 1.0;
  bad.add_constraint({1.0}, Relation::LessEq, -1.0, "neg");
  CHECK(solve(bad).status == LpSolution::Status::Infeasible);

  LinearProgram loose;
  loose.sense = Sense::Maximize;
  loose.add_variable("x");
  loose.objective[0] = 1.0;
  loose.add_constraint({-1.0}, Relation::LessEq, 0.0, "onlylower");
  CHECK(solve(loose).status == LpSolution::Status::Unbounded);
}

TEST_CASE("iteration cap raises NumericFailure") {
  std::mt19937 rng(77);
  const LinearProgram lp = random_lp(rng, 6, 5);
  SolverOptions opts;
  opts.max_iterations = 1;
  CHECK_THROWS_AS(solve(lp, opts), NumericFailure);
}

TEST_CASE("restrict_and_vertex freezes variables") {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x");
  lp.add_variable("y");
  lp.objective = {1.0, 1.0};
  lp.add_constraint({1.0, 1.0}, Relation::LessEq, 4.0, "sum");
  lp.add_constraint({1.0, 0.0}, Relation::LessEq, 3.0, "xcap");
  const LpSolution sol = restrict_and_vertex(lp, {{1, 0.5}});
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.primal[1] == doctest::Approx(0.5));
  CHECK(sol.primal[0] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(3.5));

  const LpSolution bad = restrict_and_vertex(lp, {{1, 5.0}});
  CHECK(bad.status == LpSolution::Status::Infeasible);
}

TEST_CASE("solutions of sign-constrained programs are vertices") {
  std::mt19937 rng(123);
  int solved = 0;
  for (int trial = 0; trial < 60 && solved < 50; ++trial) {
    const int nvars = 3 + trial % 4;
    const int nrows = 2 + trial % 4;
    const LinearProgram lp = random_lp(rng, nvars, nrows, false);
    const LpSolution sol = solve(lp);
    if (sol.status != LpSolution::Status::Optimal) continue;
    ++solved;
    CHECK(active_rank(lp, sol.primal) == lp.num_variables());
  }
  CHECK(solved >= 50);
}

TEST_CASE("freezing all but one type in the screening program") {
  // The triangular screening context: freeze every variable of the two
  // higher-priced types at the solved optimum and re-solve for the last
  // type alone. The restricted vertex obeys the m+n-1 support bound.
  using namespace infomech;  // NOLINT
  const Context ctx = make_quadratic_support_context(3, 0.05, 1e-4);
  const PosteriorSet q = interesting_posteriors(ctx);
  const MechanismLp mech = build_mappings_lp(ctx, q);
  const LpSolution base = solve(mech.lp);
  REQUIRE(base.status == LpSolution::Status::Optimal);
  std::vector<std::pair<int, double>> frozen;
  for (int t = 0; t < 2; ++t) {
    for (int col : mech.x_index[t]) frozen.emplace_back(col, base.primal[col]);
    frozen.emplace_back(mech.t_index[t], base.primal[mech.t_index[t]]);
  }
  const LpSolution sol = restrict_and_vertex(mech.lp, frozen);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.objective >= base.objective - 1e-9);
  int nz = 0;
  for (int col : mech.x_index[2]) nz += sol.primal[col] > 1e-9;
  CHECK(nz <= ctx.num_signals() + ctx.num_types() - 1);
}

TEST_CASE("free variables pass through the split correctly") {
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.add_variable("x", -kInf);
  lp.objective[0] = 1.0;
  lp.add_constraint({1.0}, Relation::GreaterEq, -5.0, "lower");
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(-5.0));
  CHECK(sol.objective == doctest::Approx(-5.0));
}

TEST_CASE("format_lp renders a readable tableau") {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x");
  lp.add_variable("y", -kInf);
  lp.objective = {2.0, -1.0};
  lp.add_constraint({1.0, 1.0}, Relation::LessEq, 1.0, "budget");
  const std::string text = format_lp(lp);
  CHECK(text.find("max") != std::string::npos);
  CHECK(text.find("budget") != std::string::npos);
  CHECK(text.find("y free") != std::string::npos);
}
