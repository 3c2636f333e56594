#include "infomech/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace infomech {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double observer_value(const Context& ctx, int theta, const Posterior& q) {
  return value_function(ctx, theta, q, Frame::Observer).value;
}

// 1^t D_theta q: the observer-frame mass a type-theta buyer assigns to q.
double observer_mass(const Context& ctx, int theta, const Posterior& q) {
  const BeliefTransform bt = ctx.belief_transform(theta);
  double m = 0.0;
  for (size_t w = 0; w < q.size(); ++w) m += bt.diag[w] * q[w];
  return m;
}

bool posterior_close(const Posterior& a, const Posterior& b, double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

bool set_contains(const PosteriorSet& Q, const Posterior& q, double tol) {
  for (const auto& p : Q.points) {
    if (posterior_close(p, q, tol)) return true;
  }
  return false;
}

void require_prior_and_corners(const Context& ctx, const PosteriorSet& Q) {
  if (!set_contains(Q, ctx.prior(), 1e-9)) {
    throw InputError("posterior set must contain the prior");
  }
  for (int w : ctx.support()) {
    Posterior corner(ctx.num_signals(), 0.0);
    corner[w] = 1.0;
    if (!set_contains(Q, corner, 1e-9)) {
      throw InputError("posterior set must contain the simplex corners");
    }
  }
}

struct ValueTables {
  // w[t][i] = value of posterior i for type t, price_mass[t][i] the price
  // weight: observer mass for LP2, mu(theta) for the mappings variant.
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> mass;
  std::vector<double> baseline;  // IR right-hand side per type
};

enum class MappingsForm { ObserverFrame, PaperLp1 };

ValueTables make_tables(const Context& ctx, const PosteriorSet& Q,
                        MappingsForm form) {
  const int n = ctx.num_types();
  const int k = static_cast<int>(Q.points.size());
  ValueTables tab;
  tab.w.assign(n, std::vector<double>(k, 0.0));
  tab.mass.assign(n, std::vector<double>(k, 0.0));
  tab.baseline.assign(n, 0.0);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < k; ++i) {
      if (form == MappingsForm::ObserverFrame) {
        tab.w[t][i] = observer_value(ctx, t, Q.points[i]);
        tab.mass[t][i] = observer_mass(ctx, t, Q.points[i]);
      } else {
        tab.w[t][i] = value_function(ctx, t, Q.points[i]).value;
        tab.mass[t][i] = 1.0;
      }
    }
    tab.baseline[t] = form == MappingsForm::ObserverFrame
                          ? observer_value(ctx, t, ctx.prior())
                          : value_function(ctx, t, ctx.prior()).value;
  }
  return tab;
}

MechanismLp build_mappings_like(const Context& ctx, const PosteriorSet& Q,
                                MappingsForm form) {
  require_prior_and_corners(ctx, Q);
  const int n = ctx.num_types();
  const int m = ctx.num_signals();
  const int k = static_cast<int>(Q.points.size());
  const ValueTables tab = make_tables(ctx, Q, form);

  MechanismLp mech;
  mech.kind = Menu::Kind::Mappings;
  mech.posteriors = Q.points;
  mech.lp.sense = Sense::Maximize;
  mech.x_index.assign(n, std::vector<int>(k, -1));
  mech.t_index.assign(n, -1);

  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < k; ++i) {
      mech.x_index[t][i] = mech.lp.add_variable(
          "x_t" + std::to_string(t) + "_q" + std::to_string(i));
    }
  }
  for (int t = 0; t < n; ++t) {
    mech.t_index[t] = mech.lp.add_variable("t_" + std::to_string(t));
    mech.lp.objective[mech.t_index[t]] = ctx.type_mass(t);
  }
  const int nv = mech.lp.num_variables();
  // Price coefficient on t_theta inside type theta's rows.
  auto price_coeff = [&](int t) {
    return form == MappingsForm::ObserverFrame ? ctx.type_mass(t) : 1.0;
  };

  for (int t = 0; t < n; ++t) {
    std::vector<double> row(nv, 0.0);
    for (int i = 0; i < k; ++i) row[mech.x_index[t][i]] = tab.w[t][i];
    row[mech.t_index[t]] = -price_coeff(t);
    mech.lp.add_constraint(std::move(row), Relation::GreaterEq,
                           tab.baseline[t], "IR_" + std::to_string(t));
  }
  for (int t = 0; t < n; ++t) {
    for (int o = 0; o < n; ++o) {
      if (o == t) continue;
      std::vector<double> row(nv, 0.0);
      for (int i = 0; i < k; ++i) {
        row[mech.x_index[t][i]] += tab.w[t][i];
        row[mech.x_index[o][i]] -= tab.w[t][i];
      }
      row[mech.t_index[t]] -= price_coeff(t);
      row[mech.t_index[o]] += price_coeff(t);
      mech.lp.add_constraint(std::move(row), Relation::GreaterEq, 0.0,
                             "IC_" + std::to_string(t) + "_" +
                                 std::to_string(o));
    }
  }
  for (int t = 0; t < n; ++t) {
    for (int w = 0; w < m; ++w) {
      std::vector<double> row(nv, 0.0);
      for (int i = 0; i < k; ++i) {
        row[mech.x_index[t][i]] = Q.points[i][w];
      }
      mech.lp.add_constraint(std::move(row), Relation::Equal, ctx.prior()[w],
                             "F_" + std::to_string(t) + "_" +
                                 std::to_string(w));
    }
  }
  return mech;
}

}  // namespace

bool contracts_identical(const MenuContract& a, const MenuContract& b,
                         double tol) {
  if (std::abs(a.price - b.price) > tol) return false;
  if (a.support.size() != b.support.size()) return false;
  // Supports are kept in the solver's posterior order, so compare pointwise.
  for (size_t i = 0; i < a.support.size(); ++i) {
    if (!posterior_close(a.support[i], b.support[i], tol)) return false;
    if (std::abs(a.weights[i] - b.weights[i]) > tol) return false;
    const double sa = i < a.scaled_prices.size() ? a.scaled_prices[i] : 0.0;
    const double sb = i < b.scaled_prices.size() ? b.scaled_prices[i] : 0.0;
    if (std::abs(sa - sb) > tol) return false;
  }
  return true;
}

double contract_value(const Context& ctx, int theta, const MenuContract& c) {
  double v = 0.0;
  for (size_t i = 0; i < c.support.size(); ++i) {
    v += observer_value(ctx, theta, c.support[i]) * c.weights[i];
  }
  return v / ctx.type_mass(theta);
}

double contract_payment(const Context& ctx, int theta, const MenuContract& c,
                        Menu::Kind kind) {
  if (kind == Menu::Kind::Mappings) return c.price;
  double pay = 0.0;
  for (size_t i = 0; i < c.support.size(); ++i) {
    pay += observer_mass(ctx, theta, c.support[i]) * c.scaled_prices[i];
  }
  return pay / ctx.type_mass(theta);
}

double menu_revenue(const Context& ctx, const Menu& menu) {
  double rev = 0.0;
  for (int t = 0; t < ctx.num_types(); ++t) {
    rev += ctx.type_mass(t) *
           contract_payment(ctx, t, menu.contracts[t], menu.kind);
  }
  return rev;
}

EnvelopeResult solve_sealed_envelope(const Context& ctx) {
  std::vector<double> zeta(ctx.num_types());
  for (int t = 0; t < ctx.num_types(); ++t) zeta[t] = surplus(ctx, t);
  EnvelopeResult best;  // price 0, revenue 0
  std::vector<double> candidates = zeta;
  std::sort(candidates.begin(), candidates.end());
  for (double price : candidates) {
    if (price <= 0.0) continue;
    double prob = 0.0;
    for (int t = 0; t < ctx.num_types(); ++t) {
      if (zeta[t] >= price - 1e-12) prob += ctx.type_mass(t);
    }
    const double rev = price * prob;
    if (rev > best.revenue + 1e-15) {
      best.revenue = rev;
      best.price = price;
    }
  }
  return best;
}

MechanismLp build_mappings_lp(const Context& ctx, const PosteriorSet& Q) {
  return build_mappings_like(ctx, Q, MappingsForm::ObserverFrame);
}

MechanismLp build_independent_mappings_lp(const Context& ctx,
                                          const PosteriorSet& Q) {
  return build_mappings_like(ctx, Q, MappingsForm::PaperLp1);
}

MechanismLp build_outcomes_lp(const Context& ctx, const PosteriorSet& Q,
                              bool nonnegative_transfers) {
  require_prior_and_corners(ctx, Q);
  const int n = ctx.num_types();
  const int m = ctx.num_signals();
  const int k = static_cast<int>(Q.points.size());
  const ValueTables tab = make_tables(ctx, Q, MappingsForm::ObserverFrame);

  MechanismLp mech;
  mech.kind = Menu::Kind::Outcomes;
  mech.posteriors = Q.points;
  mech.lp.sense = Sense::Maximize;
  mech.x_index.assign(n, std::vector<int>(k, -1));
  mech.tt_index.assign(n, std::vector<int>(k, -1));

  const double tt_lb =
      nonnegative_transfers ? 0.0 : -std::numeric_limits<double>::infinity();
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < k; ++i) {
      mech.x_index[t][i] = mech.lp.add_variable(
          "x_t" + std::to_string(t) + "_q" + std::to_string(i));
    }
  }
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < k; ++i) {
      mech.tt_index[t][i] = mech.lp.add_variable(
          "tt_t" + std::to_string(t) + "_q" + std::to_string(i), tt_lb);
      mech.lp.objective[mech.tt_index[t][i]] = tab.mass[t][i];
    }
  }
  const int nv = mech.lp.num_variables();

  for (int t = 0; t < n; ++t) {
    std::vector<double> row(nv, 0.0);
    for (int i = 0; i < k; ++i) {
      row[mech.x_index[t][i]] = tab.w[t][i];
      row[mech.tt_index[t][i]] = -tab.mass[t][i];
    }
    mech.lp.add_constraint(std::move(row), Relation::GreaterEq,
                           tab.baseline[t], "IR_" + std::to_string(t));
  }
  for (int t = 0; t < n; ++t) {
    for (int o = 0; o < n; ++o) {
      if (o == t) continue;
      std::vector<double> row(nv, 0.0);
      for (int i = 0; i < k; ++i) {
        row[mech.x_index[t][i]] += tab.w[t][i];
        row[mech.tt_index[t][i]] -= tab.mass[t][i];
        row[mech.x_index[o][i]] -= tab.w[t][i];
        row[mech.tt_index[o][i]] += tab.mass[t][i];
      }
      mech.lp.add_constraint(std::move(row), Relation::GreaterEq, 0.0,
                             "IC_" + std::to_string(t) + "_" +
                                 std::to_string(o));
    }
  }
  for (int t = 0; t < n; ++t) {
    for (int w = 0; w < m; ++w) {
      std::vector<double> row(nv, 0.0);
      for (int i = 0; i < k; ++i) {
        row[mech.x_index[t][i]] = Q.points[i][w];
      }
      mech.lp.add_constraint(std::move(row), Relation::Equal, ctx.prior()[w],
                             "F_" + std::to_string(t) + "_" +
                                 std::to_string(w));
    }
  }
  return mech;
}

Menu menu_from_solution(const Context& ctx, const MechanismLp& mech,
                        const LpSolution& sol, double support_tol) {
  Menu menu;
  menu.kind = mech.kind;
  const int n = ctx.num_types();
  const int k = static_cast<int>(mech.posteriors.size());
  menu.contracts.resize(n);
  for (int t = 0; t < n; ++t) {
    MenuContract& c = menu.contracts[t];
    for (int i = 0; i < k; ++i) {
      const double x = sol.primal[mech.x_index[t][i]];
      const double tt = mech.kind == Menu::Kind::Outcomes
                            ? sol.primal[mech.tt_index[t][i]]
                            : 0.0;
      if (x <= support_tol && std::abs(tt) <= support_tol) continue;
      c.support.push_back(mech.posteriors[i]);
      c.weights.push_back(std::max(x, 0.0));
      if (mech.kind == Menu::Kind::Outcomes) {
        c.scaled_prices.push_back(tt);
        c.signal_prices.push_back(x > support_tol ? tt / x : kNaN);
      }
    }
    if (mech.kind == Menu::Kind::Mappings) {
      c.price = sol.primal[mech.t_index[t]];
    }
  }
  return menu;
}

SolveResult solve_pricing_mappings(const Context& ctx, const PosteriorSet& Q,
                                   const MechanismOptions& opts) {
  MechanismLp mech = build_mappings_lp(ctx, Q);
  LpSolution sol = solve(mech.lp, opts.solver);
  if (sol.status != LpSolution::Status::Optimal) {
    throw NumericFailure("pricing-mappings LP did not solve to optimality");
  }
  if (opts.cross_check_independent && ctx.is_independent()) {
    MechanismLp buyer_frame = build_independent_mappings_lp(ctx, Q);
    LpSolution check = solve(buyer_frame.lp, opts.solver);
    if (check.status != LpSolution::Status::Optimal ||
        std::abs(check.objective - sol.objective) >
            1e-7 * (1.0 + std::abs(sol.objective))) {
      throw NumericFailure(
          "observer- and buyer-frame mappings programs disagree on an "
          "independent context");
    }
  }
  SolveResult res;
  res.menu = menu_from_solution(ctx, mech, sol, opts.support_tol);
  res.revenue = sol.objective;
  res.solution = std::move(sol);
  return res;
}

SolveResult solve_pricing_outcomes(const Context& ctx, const PosteriorSet& Q,
                                   bool nonnegative_transfers,
                                   const MechanismOptions& opts) {
  MechanismLp mech = build_outcomes_lp(ctx, Q, nonnegative_transfers);
  LpSolution sol = solve(mech.lp, opts.solver);
  if (sol.status != LpSolution::Status::Optimal) {
    throw NumericFailure("pricing-outcomes LP did not solve to optimality");
  }
  SolveResult res;
  res.menu = menu_from_solution(ctx, mech, sol, opts.support_tol);
  res.revenue = sol.objective;
  res.solution = std::move(sol);
  MenuReport rep = verify_menu(ctx, res.menu);
  if (!rep.valid) {
    throw NumericFailure("pricing-outcomes menu failed verification");
  }
  return res;
}

FullSurplusResult full_surplus_contract(const Context& ctx,
                                        const MechanismOptions& opts) {
  const int n = ctx.num_types();
  const int m = ctx.num_signals();
  if (n > m) {
    throw RankDeficient("more types than signals: rank(mu) < |Theta|");
  }
  // Solve sum_omega t(omega) mu(omega,theta) = mu(theta) zeta(theta) by
  // Gauss elimination with full pivoting; free columns stay at zero.
  std::vector<double> a(static_cast<size_t>(n) * m);
  std::vector<double> d(n);
  double mu_max = 0.0;
  for (int t = 0; t < n; ++t) {
    for (int w = 0; w < m; ++w) {
      a[static_cast<size_t>(t) * m + w] = ctx.mu(w, t);
      mu_max = std::max(mu_max, std::abs(ctx.mu(w, t)));
    }
    d[t] = ctx.type_mass(t) * surplus(ctx, t);
  }
  const double rank_tol = 1e-10 * mu_max;

  std::vector<int> col_of_pivot;
  std::vector<int> row_perm(n);
  std::iota(row_perm.begin(), row_perm.end(), 0);
  std::vector<bool> col_used(m, false);
  for (int step = 0; step < n; ++step) {
    int pr = -1, pc = -1;
    double best = rank_tol;
    for (int r = step; r < n; ++r) {
      for (int c = 0; c < m; ++c) {
        if (col_used[c]) continue;
        const double v =
            std::abs(a[static_cast<size_t>(row_perm[r]) * m + c]);
        if (v > best) {
          best = v;
          pr = r;
          pc = c;
        }
      }
    }
    if (pr < 0) {
      throw RankDeficient("rank(mu) = " + std::to_string(step) + " < " +
                          std::to_string(n) + " types");
    }
    std::swap(row_perm[step], row_perm[pr]);
    col_used[pc] = true;
    col_of_pivot.push_back(pc);
    const int prow = row_perm[step];
    const double piv = a[static_cast<size_t>(prow) * m + pc];
    for (int r = step + 1; r < n; ++r) {
      const int rr = row_perm[r];
      const double f = a[static_cast<size_t>(rr) * m + pc] / piv;
      if (f == 0.0) continue;
      for (int c = 0; c < m; ++c) {
        a[static_cast<size_t>(rr) * m + c] -=
            f * a[static_cast<size_t>(prow) * m + c];
      }
      d[rr] -= f * d[prow];
    }
  }
  FullSurplusResult out;
  out.payments.assign(m, 0.0);
  for (int step = n - 1; step >= 0; --step) {
    const int rr = row_perm[step];
    const int pc = col_of_pivot[step];
    double v = d[rr];
    for (int c = 0; c < m; ++c) {
      if (c != pc && col_used[c]) {
        v -= a[static_cast<size_t>(rr) * m + c] * out.payments[c];
      }
    }
    out.payments[pc] = v / a[static_cast<size_t>(rr) * m + pc];
  }
  out.revenue = full_surplus(ctx);

  // Condition of the pivot submatrix, 1-norm estimate via explicit inverse.
  {
    std::vector<double> sq(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        sq[static_cast<size_t>(r) * n + c] = ctx.mu(col_of_pivot[c], r);
      }
    }
    std::vector<double> inv(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> work = sq;
    for (int r = 0; r < n; ++r) inv[static_cast<size_t>(r) * n + r] = 1.0;
    bool singular = false;
    for (int col = 0; col < n && !singular; ++col) {
      int best = col;
      for (int r = col + 1; r < n; ++r) {
        if (std::abs(work[static_cast<size_t>(r) * n + col]) >
            std::abs(work[static_cast<size_t>(best) * n + col])) {
          best = r;
        }
      }
      if (std::abs(work[static_cast<size_t>(best) * n + col]) < 1e-300) {
        singular = true;
        break;
      }
      for (int c = 0; c < n; ++c) {
        std::swap(work[static_cast<size_t>(best) * n + c],
                  work[static_cast<size_t>(col) * n + c]);
        std::swap(inv[static_cast<size_t>(best) * n + c],
                  inv[static_cast<size_t>(col) * n + c]);
      }
      const double piv = work[static_cast<size_t>(col) * n + col];
      for (int c = 0; c < n; ++c) {
        work[static_cast<size_t>(col) * n + c] /= piv;
        inv[static_cast<size_t>(col) * n + c] /= piv;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = work[static_cast<size_t>(r) * n + col];
        if (f == 0.0) continue;
        for (int c = 0; c < n; ++c) {
          work[static_cast<size_t>(r) * n + c] -=
              f * work[static_cast<size_t>(col) * n + c];
          inv[static_cast<size_t>(r) * n + c] -=
              f * inv[static_cast<size_t>(col) * n + c];
        }
      }
    }
    auto one_norm = [n](const std::vector<double>& mat) {
      double best = 0.0;
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) {
          s += std::abs(mat[static_cast<size_t>(r) * n + c]);
        }
        best = std::max(best, s);
      }
      return best;
    };
    out.condition = singular ? std::numeric_limits<double>::infinity()
                             : one_norm(sq) * one_norm(inv);
  }
  double surplus_scale = 0.0, pay_scale = 0.0;
  for (int t = 0; t < n; ++t) {
    surplus_scale = std::max(surplus_scale, std::abs(surplus(ctx, t)));
  }
  for (double v : out.payments) pay_scale = std::max(pay_scale, std::abs(v));
  out.ill_conditioned =
      out.condition >= opts.condition_warning ||
      pay_scale >= opts.condition_warning * (1.0 + surplus_scale);

  // The menu: one full-information contract offered to every type.
  MenuContract c;
  for (int w : ctx.support()) {
    Posterior corner(m, 0.0);
    corner[w] = 1.0;
    c.support.push_back(std::move(corner));
    c.weights.push_back(ctx.prior()[w]);
    c.signal_prices.push_back(out.payments[w]);
    c.scaled_prices.push_back(ctx.prior()[w] * out.payments[w]);
  }
  out.menu.kind = Menu::Kind::Outcomes;
  out.menu.contracts.assign(n, c);
  return out;
}

MenuReport verify_menu(const Context& ctx, const Menu& menu, double slack) {
  const int n = ctx.num_types();
  MenuReport rep;
  if (static_cast<int>(menu.contracts.size()) != n) {
    throw InputError("menu must have one contract per type");
  }
  rep.values.resize(n);
  rep.buyer_payments.resize(n);
  rep.observer_payments.resize(n);
  rep.utilities.resize(n);

  std::vector<std::vector<double>> util(n, std::vector<double>(n, 0.0));
  for (int t = 0; t < n; ++t) {
    for (int o = 0; o < n; ++o) {
      util[t][o] = contract_value(ctx, t, menu.contracts[o]) -
                   contract_payment(ctx, t, menu.contracts[o], menu.kind);
    }
    rep.values[t] = contract_value(ctx, t, menu.contracts[t]);
    rep.buyer_payments[t] =
        contract_payment(ctx, t, menu.contracts[t], menu.kind);
    rep.observer_payments[t] = ctx.type_mass(t) * rep.buyer_payments[t];
    rep.utilities[t] = util[t][t];
  }

  rep.valid = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  auto add = [&](const std::string& name, double margin, int theta,
                 bool equality_row) {
    ConstraintReport cr;
    cr.name = name;
    cr.margin = margin;
    const double mu_t = ctx.type_mass(theta);
    // Judged at the LP's observer scale so tiny-mass types do not inflate
    // rounding noise.
    if (equality_row) {
      cr.violated = margin > 1e-8;
      cr.binding = false;
    } else {
      const double obs = margin * mu_t;
      cr.binding = std::abs(obs) <= 1e-9 * (1.0 + std::abs(rep.values[theta]));
      cr.violated = obs < slack * mu_t - 1e-9 * (1.0 + std::abs(obs));
      rep.worst_margin = std::min(rep.worst_margin, margin);
    }
    rep.valid = rep.valid && !cr.violated;
    rep.constraints.push_back(std::move(cr));
  };

  for (int t = 0; t < n; ++t) {
    const double baseline =
        observer_value(ctx, t, ctx.prior()) / ctx.type_mass(t);
    add("IR_" + std::to_string(t), util[t][t] - baseline, t, false);
  }
  for (int t = 0; t < n; ++t) {
    for (int o = 0; o < n; ++o) {
      if (o == t) continue;
      add("IC_" + std::to_string(t) + "_" + std::to_string(o),
          util[t][t] - util[t][o], t, false);
    }
  }
  for (int t = 0; t < n; ++t) {
    const MenuContract& c = menu.contracts[t];
    double resid = 0.0;
    for (int w = 0; w < ctx.num_signals(); ++w) {
      double s = 0.0;
      for (size_t i = 0; i < c.support.size(); ++i) {
        s += c.weights[i] * c.support[i][w];
      }
      resid = std::max(resid, std::abs(s - ctx.prior()[w]));
    }
    add("F_" + std::to_string(t), resid, t, true);
    for (double w : c.weights) {
      if (w < -1e-12) {
        add("x_nonneg_" + std::to_string(t), w, t, true);
      }
    }
  }
  rep.revenue = menu_revenue(ctx, menu);
  return rep;
}

Menu reduce_support(const Context& ctx, const Menu& menu,
                    const MechanismOptions& opts) {
  if (menu.kind != Menu::Kind::Mappings) {
    throw InputError("reduce_support applies to mappings menus");
  }
  const int n = ctx.num_types();
  const int m = ctx.num_signals();
  const double before = menu_revenue(ctx, menu);

  // Pool of posteriors: the union of all supports plus the interesting
  // posteriors, deduplicated. The support-size bound holds for any pool (a
  // vertex has at most as many positive weights as the subproblem has
  // rows); widening the pool keeps the rebuild exact when an almost-zero
  // revenue weight left a contract degenerate in the input menu.
  std::vector<Posterior> pool;
  auto add_point = [&](const Posterior& q) {
    for (const auto& kept : pool) {
      if (posterior_close(kept, q, 1e-9)) return;
    }
    pool.push_back(q);
  };
  for (const auto& c : menu.contracts) {
    for (const auto& q : c.support) add_point(q);
  }
  for (const auto& q : interesting_posteriors(ctx).points) add_point(q);
  const int k = static_cast<int>(pool.size());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return menu.contracts[a].price > menu.contracts[b].price;
  });

  Menu out = menu;
  for (int pos = 0; pos < n; ++pos) {
    const int t = order[pos];
    // Outside option: IR baseline or the best of the other current contracts.
    double outside = observer_value(ctx, t, ctx.prior()) / ctx.type_mass(t);
    for (int o = 0; o < n; ++o) {
      if (o == t) continue;
      outside = std::max(outside,
                         contract_value(ctx, t, out.contracts[o]) -
                             out.contracts[o].price);
    }

    LinearProgram lp;
    lp.sense = Sense::Maximize;
    std::vector<int> xcol(k);
    for (int i = 0; i < k; ++i) {
      xcol[i] = lp.add_variable("x_q" + std::to_string(i));
    }
    const int tcol = lp.add_variable("t");
    lp.objective[tcol] = 1.0;

    {
      std::vector<double> row(lp.num_variables(), 0.0);
      for (int i = 0; i < k; ++i) {
        row[xcol[i]] = observer_value(ctx, t, pool[i]);
      }
      row[tcol] = -ctx.type_mass(t);
      lp.add_constraint(std::move(row), Relation::GreaterEq,
                        ctx.type_mass(t) * outside, "IR_IC_combined");
    }
    for (int prev = 0; prev < pos; ++prev) {
      const int o = order[prev];
      const double own = (contract_value(ctx, o, out.contracts[o]) -
                          out.contracts[o].price) *
                         ctx.type_mass(o);
      std::vector<double> row(lp.num_variables(), 0.0);
      for (int i = 0; i < k; ++i) {
        row[xcol[i]] = observer_value(ctx, o, pool[i]);
      }
      row[tcol] = -ctx.type_mass(o);
      lp.add_constraint(std::move(row), Relation::LessEq, own,
                        "IC_" + std::to_string(o) + "_new");
    }
    for (int w = 0; w < m; ++w) {
      std::vector<double> row(lp.num_variables(), 0.0);
      for (int i = 0; i < k; ++i) row[xcol[i]] = pool[i][w];
      lp.add_constraint(std::move(row), Relation::Equal, ctx.prior()[w],
                        "F_" + std::to_string(w));
    }
    LpSolution sol = solve(lp, opts.solver);
    if (sol.status != LpSolution::Status::Optimal) {
      throw NumericFailure("support-reduction subproblem not optimal");
    }
    MenuContract fresh;
    for (int i = 0; i < k; ++i) {
      if (sol.primal[xcol[i]] > opts.support_tol) {
        fresh.support.push_back(pool[i]);
        fresh.weights.push_back(sol.primal[xcol[i]]);
      }
    }
    fresh.price = sol.primal[tcol];
    out.contracts[t] = std::move(fresh);

    // Types with cheaper contracts may now envy the rebuilt one; hand them a
    // copy when they do.
    for (int later = pos + 1; later < n; ++later) {
      const int o = order[later];
      const double own = contract_value(ctx, o, out.contracts[o]) -
                         out.contracts[o].price;
      const double other = contract_value(ctx, o, out.contracts[t]) -
                           out.contracts[t].price;
      if (other > own + 1e-10) {
        out.contracts[o] = out.contracts[t];
      }
    }
  }

  const double after = menu_revenue(ctx, out);
  if (std::abs(after - before) > 1e-8 * (1.0 + std::abs(before))) {
    throw NumericFailure("support reduction changed revenue: " +
                         std::to_string(before) + " -> " +
                         std::to_string(after));
  }
  MenuReport rep = verify_menu(ctx, out);
  if (!rep.valid) {
    throw NumericFailure("support reduction produced an invalid menu");
  }
  return out;
}

Menu make_strict(const Context& ctx, const Menu& menu, double epsilon) {
  if (epsilon < 0.0 || epsilon >= 1.0) {
    throw InputError("epsilon must lie in [0, 1)");
  }
  if (epsilon == 0.0) return menu;
  const int n = ctx.num_types();
  Menu out = menu;

  // Merge tied contracts first: a tight IC whose two contracts carry the
  // same perceived payment stays tight under scaling unless the contracts
  // become identical.
  bool changed = true;
  int rounds = 0;
  while (changed && rounds++ < n * n + 1) {
    changed = false;
    for (int t = 0; t < n && !changed; ++t) {
      for (int o = 0; o < n && !changed; ++o) {
        if (o == t) continue;
        if (contracts_identical(out.contracts[t], out.contracts[o])) continue;
        const double own = contract_value(ctx, t, out.contracts[t]) -
                           contract_payment(ctx, t, out.contracts[t], out.kind);
        const double other =
            contract_value(ctx, t, out.contracts[o]) -
            contract_payment(ctx, t, out.contracts[o], out.kind);
        if (std::abs(own - other) > 1e-9) continue;
        const double pay_own =
            contract_payment(ctx, t, out.contracts[t], out.kind);
        const double pay_other =
            contract_payment(ctx, t, out.contracts[o], out.kind);
        if (pay_own <= pay_other + 1e-9) {
          out.contracts[t] = out.contracts[o];
          changed = true;
        }
      }
    }
  }

  const double f = 1.0 - epsilon;
  for (auto& c : out.contracts) {
    c.price *= f;
    for (double& v : c.scaled_prices) v *= f;
    for (double& v : c.signal_prices) v *= f;
  }
  return out;
}

Menu recover_transfers(const Context& ctx, const Menu& menu, double delta) {
  if (menu.kind != Menu::Kind::Outcomes) {
    throw InputError("recover_transfers applies to outcomes menus");
  }
  Menu out = menu;
  // Zero-mass, zero-payment signals simply leave the support.
  for (auto& c : out.contracts) {
    MenuContract kept;
    for (size_t i = 0; i < c.support.size(); ++i) {
      if (c.weights[i] <= 1e-12 && std::abs(c.scaled_prices[i]) <= 1e-12) {
        continue;
      }
      kept.support.push_back(c.support[i]);
      kept.weights.push_back(c.weights[i]);
      kept.scaled_prices.push_back(c.scaled_prices[i]);
      kept.signal_prices.push_back(c.signal_prices[i]);
    }
    kept.price = c.price;
    c = std::move(kept);
  }

  bool needs_blend = false;
  for (const auto& c : out.contracts) {
    for (double w : c.weights) needs_blend |= w <= 1e-12;
  }
  if (needs_blend) {
    // Blending shifts values by O(delta); it is only safe when every
    // non-identical constraint has room.
    auto ic_indices = [](const std::string& name, int& t, int& o) {
      const size_t sep = name.find('_', 3);
      t = std::stoi(name.substr(3, sep - 3));
      o = std::stoi(name.substr(sep + 1));
    };
    const MenuReport before = verify_menu(ctx, out);
    std::vector<std::pair<std::string, double>> floor;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const ConstraintReport& cr : before.constraints) {
      bool counted = false;
      if (cr.name.rfind("IR_", 0) == 0) {
        counted = true;
      } else if (cr.name.rfind("IC_", 0) == 0) {
        int t = 0, o = 0;
        ic_indices(cr.name, t, o);
        counted = !contracts_identical(out.contracts[t], out.contracts[o]);
      }
      if (counted) {
        min_margin = std::min(min_margin, cr.margin);
        floor.emplace_back(cr.name, cr.margin);
      }
    }
    if (!(min_margin > 1e-12)) {
      throw SlackRequired(
          "recover_transfers needs strictly slack IR/IC constraints");
    }

    const Menu base = out;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 60) {
        throw SlackRequired("blending keeps violating the margin budget");
      }
      out = base;
      for (auto& c : out.contracts) {
        const size_t kh = c.support.size();
        std::vector<Posterior> add_q;
        std::vector<double> add_w;
        for (double& w : c.weights) w *= (1.0 - delta);
        for (size_t i = 0; i < kh; ++i) {
          const PriorDecomposition dec =
              decompose_through_prior(ctx.prior(), c.support[i]);
          const double share = delta / static_cast<double>(kh);
          c.weights[i] += dec.gamma * share;
          add_q.push_back(dec.r);
          add_w.push_back((1.0 - dec.gamma) * share);
        }
        for (size_t j = 0; j < add_q.size(); ++j) {
          bool merged = false;
          for (size_t i = 0; i < c.support.size(); ++i) {
            if (posterior_close(c.support[i], add_q[j], 1e-9)) {
              c.weights[i] += add_w[j];
              merged = true;
              break;
            }
          }
          if (!merged && add_w[j] > 0.0) {
            c.support.push_back(add_q[j]);
            c.weights.push_back(add_w[j]);
            c.scaled_prices.push_back(0.0);
            c.signal_prices.push_back(0.0);
          }
        }
      }
      const MenuReport after = verify_menu(ctx, out);
      bool ok = true;
      for (const ConstraintReport& cr : after.constraints) {
        if (cr.name.rfind("F_", 0) == 0 && cr.violated) ok = false;
      }
      for (const auto& [name, old_margin] : floor) {
        for (const ConstraintReport& cr : after.constraints) {
          if (cr.name != name) continue;
          if (cr.margin < old_margin / 2.0 - 1e-15) ok = false;
          break;
        }
      }
      if (ok) break;
      delta /= 2.0;
    }
  }

  for (auto& c : out.contracts) {
    for (size_t i = 0; i < c.support.size(); ++i) {
      if (c.weights[i] <= 0.0) {
        throw NumericFailure("support weight failed to become positive");
      }
      c.signal_prices[i] = c.scaled_prices[i] / c.weights[i];
    }
  }
  return out;
}

RevenueReport revenue_report(const Context& ctx,
                             const MechanismOptions& opts) {
  const PosteriorSet Q = interesting_posteriors(ctx);
  RevenueReport rep;
  const EnvelopeResult env = solve_sealed_envelope(ctx);
  rep.envelope = env.revenue;
  rep.envelope_price = env.price;

  SolveResult rc = solve_pricing_mappings(ctx, Q, opts);
  rep.mappings = rc.revenue;
  rep.mappings_menu = std::move(rc.menu);

  SolveResult rp = solve_pricing_outcomes(ctx, Q, true, opts);
  rep.outcomes_npt = rp.revenue;
  rep.outcomes_npt_menu = std::move(rp.menu);

  SolveResult r = solve_pricing_outcomes(ctx, Q, false, opts);
  rep.outcomes = r.revenue;
  rep.outcomes_menu = std::move(r.menu);

  rep.full_surplus_value = full_surplus(ctx);

  const double scale = 1.0 + std::abs(rep.full_surplus_value);
  const double tol = 1e-7 * scale;
  if (rep.envelope > rep.mappings + tol ||
      rep.mappings > rep.outcomes_npt + tol ||
      rep.outcomes_npt > rep.outcomes + tol ||
      rep.outcomes > rep.full_surplus_value + tol) {
    throw NumericFailure("revenue ordering chain violated");
  }
  const double floor = rep.outcomes / ctx.num_types() - tol;
  if (rep.mappings < floor || rep.envelope < floor) {
    throw NumericFailure("1/|Theta| revenue floor violated");
  }

  const std::pair<const char*, const Menu*> audited[] = {
      {"Rc", &rep.mappings_menu},
      {"Rp", &rep.outcomes_npt_menu},
      {"R", &rep.outcomes_menu}};
  for (const auto& [label, m] : audited) {
    const MenuReport mr = verify_menu(ctx, *m);
    for (const auto& cr : mr.constraints) {
      if (cr.binding) {
        rep.diagnostics.push_back(std::string(label) + ": " + cr.name +
                                  " binding");
      }
    }
  }
  if (ctx.is_independent()) {
    rep.diagnostics.push_back("independent context: Rc = R expected");
  } else if (ctx.num_types() <= ctx.num_signals()) {
    try {
      const FullSurplusResult fs = full_surplus_contract(ctx, opts);
      if (fs.ill_conditioned) {
        std::ostringstream os;
        os.precision(12);
        os << "full-surplus system ill-conditioned: condition "
           << fs.condition;
        rep.diagnostics.push_back(os.str());
      }
    } catch (const RankDeficient&) {
      rep.diagnostics.push_back("rank(mu) < |Theta|: full surplus out of reach");
    }
  }
  return rep;
}

}  // namespace infomech
