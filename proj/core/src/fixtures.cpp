#include "infomech/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "infomech/protocol.hpp"

namespace infomech {

namespace {

std::vector<std::string> index_labels(const std::string& prefix, int count,
                                      int first = 0) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(prefix + std::to_string(first + i));
  }
  return out;
}

}  // namespace

Context make_key_box_context(const std::vector<double>& z,
                             const std::vector<std::vector<double>>& mu_rows) {
  const int n = static_cast<int>(z.size());
  std::vector<double> mu;
  for (const auto& row : mu_rows) {
    for (double v : row) mu.push_back(v);
  }
  // u(theta, omega, a) = z_theta * 1{omega = a}
  std::vector<double> u;
  for (int t = 0; t < n; ++t) {
    for (int w = 0; w < 2; ++w) {
      for (int a = 0; a < 2; ++a) {
        u.push_back(w == a ? z[t] : 0.0);
      }
    }
  }
  return Context(index_labels("theta", n, 1), index_labels("omega", 2),
                 index_labels("key", 2), std::move(mu), std::move(u));
}

Context make_example_42() {
  return make_key_box_context({3.0, 5.0}, {{0.2, 0.3}, {0.3, 0.2}});
}

Context make_example_43() {
  return make_key_box_context({3.0, 5.0}, {{0.25, 0.25}, {0.25, 0.25}});
}

Context make_example_43_perturbed() {
  return make_key_box_context({3.0, 5.0},
                              {{0.25001, 0.24999}, {0.24999, 0.25001}});
}

Context make_example_52() {
  // u(theta,omega,0) = omega, u(theta,omega,1) = 1 - 9 omega, identical
  // across types; mu couples the types to omega.
  std::vector<double> mu = {0.3, 0.2, 0.2, 0.3};
  std::vector<double> u;
  for (int t = 0; t < 2; ++t) {
    for (int w = 0; w < 2; ++w) {
      u.push_back(static_cast<double>(w));  // action 0
      u.push_back(1.0 - 9.0 * w);           // action 1
    }
  }
  return Context(index_labels("theta", 2), index_labels("omega", 2),
                 index_labels("a", 2), std::move(mu), std::move(u));
}

ProtocolTree make_example_52_tree(const Context& ctx) {
  (void)ctx;
  auto leaf = [] { return ProtocolNode{}; };
  auto full_info_seller = [&] {
    ProtocolNode s;
    s.kind = ProtocolNode::Kind::Seller;
    s.children.push_back(leaf());
    s.children.push_back(leaf());
    s.psi = {{1.0, 0.0}, {0.0, 1.0}};  // reveal omega
    return s;
  };

  ProtocolNode t1;
  t1.kind = ProtocolNode::Kind::Transfer;
  t1.amount = 0.533;
  t1.children.push_back(full_info_seller());

  ProtocolNode t2;
  t2.kind = ProtocolNode::Kind::Transfer;
  t2.amount = 0.8;
  t2.children.push_back(full_info_seller());

  ProtocolNode s2;
  s2.kind = ProtocolNode::Kind::Seller;
  s2.children.push_back(std::move(t2));
  s2.children.push_back(leaf());  // ell_5
  s2.psi = {{1.0, 0.0}, {1.0 / 6.0, 5.0 / 6.0}};

  ProtocolNode root;
  root.kind = ProtocolNode::Kind::Buyer;
  root.labels = {"left", "right"};
  root.children.push_back(std::move(t1));
  root.children.push_back(std::move(s2));
  return ProtocolTree(std::move(root));
}

std::vector<BuyerStrategy> example_52_strategies(const ProtocolTree& tree) {
  const ProtocolNode* root = tree.node(0);
  const int t1_id = root->children[0].id;
  const int s2_id = root->children[1].id;
  const int t2_id = tree.node(s2_id)->children[0].id;

  BuyerStrategy theta0;
  theta0.mode = BuyerStrategy::Mode::Uncommitted;
  theta0.choice = {{root->id, 0}, {t1_id, 0}, {t2_id, 0}};
  BuyerStrategy theta1;
  theta1.mode = BuyerStrategy::Mode::Uncommitted;
  theta1.choice = {{root->id, 1}, {t1_id, 0}, {t2_id, 0}};
  return {theta0, theta1};
}

Context make_context_from_value_breakpoints(
    const std::vector<std::vector<std::pair<double, double>>>& breakpoints,
    const std::vector<std::vector<double>>& mu_rows) {
  const int n = static_cast<int>(breakpoints.size());
  int max_segments = 1;
  for (const auto& pts : breakpoints) {
    max_segments = std::max(max_segments, static_cast<int>(pts.size()) - 1);
  }
  // Each segment of v_theta becomes an action; shorter lists repeat their
  // last segment so every type shares the action set.
  std::vector<double> u(static_cast<size_t>(n) * 2 * max_segments, 0.0);
  for (int t = 0; t < n; ++t) {
    const auto& pts = breakpoints[t];
    const int segs = static_cast<int>(pts.size()) - 1;
    for (int a = 0; a < max_segments; ++a) {
      const int s = std::min(a, segs - 1);
      const auto& [q1, v1] = pts[s];
      const auto& [q2, v2] = pts[s + 1];
      const double slope = (v2 - v1) / (q2 - q1);
      const double at0 = v1 - slope * q1;
      u[(static_cast<size_t>(t) * 2 + 0) * max_segments + a] = at0;
      u[(static_cast<size_t>(t) * 2 + 1) * max_segments + a] = at0 + slope;
    }
  }
  std::vector<double> mu;
  for (const auto& row : mu_rows) {
    for (double v : row) mu.push_back(v);
  }
  return Context(index_labels("theta", n, 1), index_labels("omega", 2),
                 index_labels("a", max_segments), std::move(mu), std::move(u));
}

Context make_quadratic_support_context(int n, double delta, double eps) {
  std::vector<std::vector<std::pair<double, double>>> bp(n);
  for (int t = 1; t <= n; ++t) {
    auto& pts = bp[t - 1];
    pts.emplace_back(0.0, 0.0);
    pts.emplace_back(1.0 - delta * t, 0.0);
    for (int k = 1; k <= t; ++k) {
      pts.emplace_back(1.0 - delta * (t - k),
                       std::pow(delta, 2 * t - 1 - k));
    }
  }
  double norm = 0.0;
  for (int t = 1; t <= n; ++t) norm += std::pow(eps, t);
  std::vector<std::vector<double>> mu_rows(2, std::vector<double>(n));
  for (int t = 1; t <= n; ++t) {
    mu_rows[0][t - 1] = 0.5 * std::pow(eps, t) / norm;
    mu_rows[1][t - 1] = 0.5 * std::pow(eps, t) / norm;
  }
  return make_context_from_value_breakpoints(bp, mu_rows);
}

Context make_envelope_gap_context(int n, double T) {
  std::vector<std::vector<std::pair<double, double>>> bp(n);
  for (int t = 1; t <= n; ++t) {
    auto& pts = bp[t - 1];
    pts.emplace_back(0.0, 0.0);
    pts.emplace_back(1.0 - std::pow(T, -t), 0.0);
    pts.emplace_back(1.0, std::pow(2.0, t));
  }
  const double norm = 1.0 - std::pow(2.0, -n);
  std::vector<std::vector<double>> mu_rows(2, std::vector<double>(n));
  for (int t = 1; t <= n; ++t) {
    mu_rows[0][t - 1] = 0.5 * std::pow(2.0, -t) / norm;
    mu_rows[1][t - 1] = 0.5 * std::pow(2.0, -t) / norm;
  }
  return make_context_from_value_breakpoints(bp, mu_rows);
}

Context make_side_channel_context(int n, double noise) {
  // omega = (payoff bit b, report j); index 2j + b. The buyer bets on the
  // bit: u = z_theta on a match, -z_theta otherwise, z_theta = 2^theta.
  const int m = 2 * n;
  const double norm = 1.0 - std::pow(2.0, -n);
  std::vector<double> mu(static_cast<size_t>(m) * n, 0.0);
  for (int t = 0; t < n; ++t) {
    const double mass_t = std::pow(2.0, -(t + 1)) / norm;
    for (int j = 0; j < n; ++j) {
      const double pj =
          n == 1 ? 1.0
                 : (j == t ? 1.0 - noise : noise / static_cast<double>(n - 1));
      for (int b = 0; b < 2; ++b) {
        mu[static_cast<size_t>(2 * j + b) * n + t] = mass_t * 0.5 * pj;
      }
    }
  }
  std::vector<double> u(static_cast<size_t>(n) * m * 2, 0.0);
  for (int t = 0; t < n; ++t) {
    const double z = std::pow(2.0, t + 1);
    for (int j = 0; j < n; ++j) {
      for (int b = 0; b < 2; ++b) {
        const int w = 2 * j + b;
        for (int a = 0; a < 2; ++a) {
          u[(static_cast<size_t>(t) * m + w) * 2 + a] = a == b ? z : -z;
        }
      }
    }
  }
  std::vector<std::string> omega_labels;
  for (int j = 0; j < n; ++j) {
    for (int b = 0; b < 2; ++b) {
      omega_labels.push_back("r" + std::to_string(j + 1) + "b" +
                             std::to_string(b));
    }
  }
  return Context(index_labels("theta", n, 1), omega_labels,
                 index_labels("bet", 2), std::move(mu), std::move(u));
}

Context make_outcomes_gap_context() {
  const double s = 1.0 / 128.0;
  // Rows omega, columns theta. Type 3 is the common low-surplus type; the
  // two rare types hold sharply different beliefs, which outcome-contingent
  // prices can exploit but a fixed up-front price cannot.
  std::vector<double> mu = {
      3 * s, 4 * s, 3 * s,   //
      8 * s, 1 * s, 54 * s,  //
      3 * s, 1 * s, 1 * s,   //
      11 * s, 1 * s, 38 * s,
  };
  std::vector<double> u = {
      // theta1
      0.5, 0.5, 0.75, 0.0, 0.25, 0.5, 0.75, 0.5,
      // theta2
      0.5, 0.5, 1.0, 0.0, 0.0, 1.0, 0.5, 0.0,
      // theta3
      1.0, 1.0, 0.75, 0.5, 0.25, 1.0, 1.0, 0.75};
  return Context(index_labels("theta", 3, 1), index_labels("omega", 4),
                 index_labels("a", 2), std::move(mu), std::move(u));
}

Context make_iid_gap_context(int n) {
  const double norm = 1.0 - std::pow(2.0, -n);
  std::vector<double> mu(static_cast<size_t>(n) * n, 0.0);
  for (int w = 0; w < n; ++w) {
    for (int t = 0; t < n; ++t) {
      mu[static_cast<size_t>(w) * n + t] =
          (1.0 / n) * std::pow(2.0, -(t + 1)) / norm;
    }
  }
  std::vector<double> u(static_cast<size_t>(n) * n * n, 0.0);
  for (int t = 0; t < n; ++t) {
    const double z = std::pow(2.0, t + 1);
    for (int w = 0; w < n; ++w) {
      for (int a = 0; a < n; ++a) {
        u[(static_cast<size_t>(t) * n + w) * n + a] = a == w ? z : 0.0;
      }
    }
  }
  return Context(index_labels("theta", n, 1), index_labels("omega", n),
                 index_labels("guess", n), std::move(mu), std::move(u));
}

std::vector<double> make_iid_gap_eta(int n) {
  // diag(1, .., 1, -(n-1)): full rank, zero total mass.
  std::vector<double> eta(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    eta[static_cast<size_t>(i) * n + i] =
        i == n - 1 ? -static_cast<double>(n - 1) : 1.0;
  }
  return eta;
}

Context perturb_context(const Context& base, const std::vector<double>& eta,
                        double t) {
  const int n = base.num_types();
  const int m = base.num_signals();
  if (eta.size() != static_cast<size_t>(n) * m) {
    throw InputError("perturbation has wrong shape");
  }
  double total = 0.0;
  std::vector<double> mu(static_cast<size_t>(n) * m);
  for (size_t i = 0; i < mu.size(); ++i) {
    mu[i] = base.mu_flat()[i] + t * eta[i];
    if (mu[i] < 0.0) {
      if (mu[i] < -1e-15) {
        throw InvalidPerturbation("perturbed mu leaves the simplex");
      }
      mu[i] = 0.0;
    }
    total += mu[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidPerturbation("perturbation has nonzero total mass");
  }
  return Context(base.theta_labels(), base.omega_labels(),
                 base.action_labels(), std::move(mu),
                 std::vector<double>(base.payoff_flat()));
}

GapTable gap_experiment(const Context& base, const std::vector<double>& eta,
                        std::vector<double> t_values,
                        const MechanismOptions& opts) {
  bool has_zero = false;
  for (double t : t_values) has_zero |= t == 0.0;
  if (!has_zero) t_values.push_back(0.0);
  std::sort(t_values.begin(), t_values.end());
  t_values.erase(std::unique(t_values.begin(), t_values.end()),
                 t_values.end());
  GapTable table;
  for (double t : t_values) {
    const Context ctx = perturb_context(base, eta, t);
    const RevenueReport rep = revenue_report(ctx, opts);
    GapRow row;
    row.t = t;
    row.outcomes = rep.outcomes;
    row.mappings = rep.mappings;
    row.outcomes_npt = rep.outcomes_npt;
    row.envelope = rep.envelope;
    row.full_surplus_value = rep.full_surplus_value;
    table.rows.push_back(row);
  }
  return table;
}

bool glob_match(const std::string& pattern, const std::string& text) {
  if (pattern.empty()) return true;
  std::function<bool(size_t, size_t)> rec = [&](size_t p, size_t t) {
    while (p < pattern.size()) {
      if (pattern[p] == '*') {
        for (size_t skip = 0; skip + t <= text.size(); ++skip) {
          if (rec(p + 1, t + skip)) return true;
        }
        return false;
      }
      if (t >= text.size()) return false;
      if (pattern[p] != '?' && pattern[p] != text[t]) return false;
      ++p;
      ++t;
    }
    return t == text.size();
  };
  return rec(0, 0);
}

namespace {

using Checks = std::vector<FixtureCheck>;

void eq(Checks& out, const std::string& name, double expected, double actual,
        double tol, const char* provenance) {
  FixtureCheck c;
  c.name = name;
  c.expected = expected;
  c.actual = actual;
  c.tolerance = tol;
  c.kind = FixtureCheck::Kind::Equal;
  c.provenance = provenance;
  c.pass = std::abs(actual - expected) <= tol;
  out.push_back(std::move(c));
}

void ge(Checks& out, const std::string& name, double threshold, double actual,
        double tol, const char* provenance) {
  FixtureCheck c;
  c.name = name;
  c.expected = threshold;
  c.actual = actual;
  c.tolerance = tol;
  c.kind = FixtureCheck::Kind::AtLeast;
  c.provenance = provenance;
  c.pass = actual >= threshold - tol;
  out.push_back(std::move(c));
}

int distinct_contracts(const Menu& menu) {
  std::vector<const MenuContract*> distinct;
  for (const auto& c : menu.contracts) {
    bool seen = false;
    for (const auto* d : distinct) seen |= contracts_identical(*d, c);
    if (!seen) distinct.push_back(&c);
  }
  return static_cast<int>(distinct.size());
}

Checks fixture_example_42() {
  Checks out;
  const Context ctx = make_example_42();
  eq(out, "zeta(theta1)", 1.2, surplus(ctx, 0), 1e-9, "paper");
  eq(out, "zeta(theta2)", 2.0, surplus(ctx, 1), 1e-9, "paper");
  const TypePosterior interim = posterior_for_type(ctx, 0, ctx.prior());
  eq(out, "interim(theta1, omega0)", 0.4, interim.q[0], 1e-9, "paper");

  const FullSurplusResult fs = full_surplus_contract(ctx);
  eq(out, "payment(omega0)", 3.6, fs.payments[0], 1e-9, "paper");
  eq(out, "payment(omega1)", -0.4, fs.payments[1], 1e-9, "paper");
  eq(out, "full-surplus revenue", 1.6, fs.revenue, 1e-9, "paper");
  const MenuReport rep = verify_menu(ctx, fs.menu);
  eq(out, "menu revenue", 1.6, rep.revenue, 1e-9, "derived");
  for (int t = 0; t < 2; ++t) {
    eq(out, "IR margin theta" + std::to_string(t + 1), 0.0,
       rep.constraints[t].margin, 1e-9, "derived");
  }
  const EnvelopeResult env = solve_sealed_envelope(ctx);
  eq(out, "envelope price", 1.2, env.price, 1e-9, "derived");
  eq(out, "Re", 1.2, env.revenue, 1e-9, "derived");

  const PosteriorSet q = interesting_posteriors(ctx);
  const SolveResult r = solve_pricing_outcomes(ctx, q, false);
  eq(out, "R equals full surplus", 1.6, r.revenue, 1e-8, "derived");

  // Scaling payments down makes every constraint strictly slack, except
  // between identical contracts (here every type holds the same one).
  const Menu strict = make_strict(ctx, fs.menu, 0.01);
  const MenuReport srep = verify_menu(ctx, strict);
  double min_margin = 1.0;
  for (const auto& cr : srep.constraints) {
    if (cr.name.rfind("IR_", 0) == 0) {
      min_margin = std::min(min_margin, cr.margin);
    }
  }
  ge(out, "strict menu slack", 1e-6, min_margin, 0.0, "paper");

  // In tree form the positive payment drives uncommitted buyers away.
  const ProtocolTree tree = menu_to_protocol(ctx, fs.menu);
  const ProtocolNode* charge = tree.find([](const ProtocolNode& n) {
    return n.kind == ProtocolNode::Kind::Transfer && n.amount > 1.0;
  });
  bool defects = charge != nullptr;
  for (int t = 0; t < 2 && defects; ++t) {
    const BestResponseResult br =
        best_response(ctx, tree, t, BuyerStrategy::Mode::Uncommitted);
    defects = br.strategy.choice.at(charge->id) == kDefect;
  }
  eq(out, "uncommitted buyers defect at the charge", 1.0, defects ? 1.0 : 0.0,
     0.0, "paper");
  return out;
}

Checks fixture_example_43() {
  Checks out;
  const Context ctx = make_example_43();
  eq(out, "zeta(theta1)", 1.5, surplus(ctx, 0), 1e-9, "paper");
  eq(out, "zeta(theta2)", 2.5, surplus(ctx, 1), 1e-9, "paper");
  eq(out, "full surplus", 2.0, full_surplus(ctx), 1e-9, "paper");

  const PosteriorSet q = interesting_posteriors(ctx);
  const SolveResult rc = solve_pricing_mappings(ctx, q);
  eq(out, "Rc", 1.5, rc.revenue, 1e-8, "paper");
  eq(out, "single contract", 1.0, distinct_contracts(rc.menu), 0.0, "paper");
  eq(out, "contract price", 1.5, rc.menu.contracts[0].price, 1e-8, "paper");
  eq(out, "full information support", 2.0,
     static_cast<double>(rc.menu.contracts[0].support.size()), 0.0, "paper");

  const EnvelopeResult env = solve_sealed_envelope(ctx);
  eq(out, "Re", 1.5, env.revenue, 1e-9, "derived");
  const SolveResult r = solve_pricing_outcomes(ctx, q, false);
  eq(out, "R collapses to Rc", 1.5, r.revenue, 1e-8, "paper");

  // The envelope in protocol form: buyer root, one transfer, one seller.
  {
    MenuContract envelope;
    envelope.support = {{1.0, 0.0}, {0.0, 1.0}};
    envelope.weights = {0.5, 0.5};
    envelope.price = env.price;
    Menu menu;
    menu.kind = Menu::Kind::Mappings;
    menu.contracts = {envelope, envelope};
    const ProtocolTree tree = menu_to_protocol(ctx, menu);
    int interior = 0;
    tree.visit([&](const ProtocolNode& n) {
      interior += n.kind != ProtocolNode::Kind::Leaf;
    });
    eq(out, "envelope tree interior nodes", 3.0, interior, 0.0, "paper");
  }
  return out;
}

Checks fixture_example_43_perturbed() {
  Checks out;
  const Context ctx = make_example_43_perturbed();
  // Independent 2x2 oracle: interim beliefs mu(omega|theta) and surpluses
  // recomputed from raw numbers, solved by Cramer's rule.
  const double b00 = 0.25001 / 0.5, b01 = 0.24999 / 0.5;
  const double zeta1 = 3.0 - 3.0 * std::max(b00, b01);
  const double zeta2 = 5.0 - 5.0 * std::max(b00, b01);
  const double det = b00 * b00 - b01 * b01;
  const double t0 = (zeta1 * b00 - zeta2 * b01) / det;
  const double t1 = (b00 * zeta2 - b01 * zeta1) / det;
  const double fs_expected = 0.5 * zeta1 + 0.5 * zeta2;

  const FullSurplusResult fs = full_surplus_contract(ctx);
  eq(out, "revenue matches perturbed surplus", fs_expected, fs.revenue,
     1e-6 * (1.0 + std::abs(fs_expected)), "derived");
  eq(out, "revenue near 1.99992", 1.99992, fs.revenue, 1e-6, "paper");
  eq(out, "payment(omega0) vs oracle", t0, fs.payments[0],
     1e-6 * std::abs(t0), "derived");
  eq(out, "payment(omega1) vs oracle", t1, fs.payments[1],
     1e-6 * std::abs(t1), "derived");
  eq(out, "condition warning", 1.0, fs.ill_conditioned ? 1.0 : 0.0, 0.0,
     "derived");
  const MenuReport rep = verify_menu(ctx, fs.menu);
  for (int t = 0; t < 2; ++t) {
    eq(out, "IR binding theta" + std::to_string(t + 1), 0.0,
       rep.constraints[t].margin, 1e-8, "derived");
  }
  return out;
}

Checks fixture_example_52() {
  Checks out;
  const Context ctx = make_example_52();
  eq(out, "zeta(theta0)", 0.6, surplus(ctx, 0), 1e-9, "paper");
  eq(out, "zeta(theta1)", 0.4, surplus(ctx, 1), 1e-9, "paper");
  eq(out, "full surplus", 0.5, full_surplus(ctx), 1e-9, "paper");
  eq(out, "v at interim 0.4", 0.4,
     value_function(ctx, 0, std::vector<double>{0.6, 0.4}).value, 1e-9,
     "paper");

  const ProtocolTree tree = make_example_52_tree(ctx);
  validate_tree(ctx, tree);
  const std::vector<BuyerStrategy> strategies = example_52_strategies(tree);
  const EvaluationResult ev = evaluate(ctx, tree, strategies);
  eq(out, "revenue", 0.4665, ev.revenue, 1e-9, "paper");

  const ProtocolNode* root = tree.node(0);
  const int t1_id = root->children[0].id;
  const int s2_id = root->children[1].id;
  const int t2_id = tree.node(s2_id)->children[0].id;

  const BestResponseResult br0 =
      best_response(ctx, tree, 0, BuyerStrategy::Mode::Uncommitted);
  eq(out, "theta0 plays left", 0.0, br0.strategy.choice.at(0), 0.0, "paper");
  eq(out, "theta0 pays t1", 0.0, br0.strategy.choice.at(t1_id), 0.0, "paper");
  eq(out, "theta0 utility", 0.467, br0.utility, 1e-9, "paper");
  const BestResponseResult br1 =
      best_response(ctx, tree, 1, BuyerStrategy::Mode::Uncommitted);
  eq(out, "theta1 plays right", 1.0, br1.strategy.choice.at(0), 0.0, "paper");
  eq(out, "theta1 pays t2", 0.0, br1.strategy.choice.at(t2_id), 0.0, "paper");
  eq(out, "theta1 utility", 0.6, br1.utility, 1e-9, "derived");

  // Reach probability of t2 and the interim posteriors there.
  const auto reach1 = reach_likelihoods(ctx, tree, 1, strategies[1]);
  double p_t2 = 0.0;
  for (int w = 0; w < 2; ++w) {
    p_t2 += ctx.interim_belief(1)[w] * reach1[t2_id][w];
  }
  eq(out, "P(t2 | theta1)", 0.5, p_t2, 1e-9, "derived");
  Posterior obs_t2(2);
  for (int w = 0; w < 2; ++w) obs_t2[w] = ctx.prior()[w] * reach1[t2_id][w];
  const double mass = obs_t2[0] + obs_t2[1];
  for (double& v : obs_t2) v /= mass;
  eq(out, "posterior(omega1 | theta0, t2)", 0.1,
     posterior_for_type(ctx, 0, obs_t2).q[1], 1e-9, "paper");
  eq(out, "posterior(omega1 | theta1, t2)", 0.2,
     posterior_for_type(ctx, 1, obs_t2).q[1], 1e-9, "paper");

  const PosteriorSet q = interesting_posteriors(ctx);
  const SolveResult rc = solve_pricing_mappings(ctx, q);
  eq(out, "Rc", 0.4, rc.revenue, 1e-9, "paper");
  const SolveResult rp = solve_pricing_outcomes(ctx, q, true);
  eq(out, "Rp", 0.5, rp.revenue, 1e-9, "paper");
  for (int t = 0; t < 2; ++t) {
    eq(out, "Rp payment equals surplus theta" + std::to_string(t),
       surplus(ctx, t),
       contract_payment(ctx, t, rp.menu.contracts[t], Menu::Kind::Outcomes),
       1e-9, "derived");
  }
  // The reference full-revelation contract at t = (1, 0) attains Rp.
  {
    MenuContract c;
    c.support = {{1.0, 0.0}, {0.0, 1.0}};
    c.weights = {0.5, 0.5};
    c.signal_prices = {1.0, 0.0};
    c.scaled_prices = {0.5, 0.0};
    Menu reference;
    reference.kind = Menu::Kind::Outcomes;
    reference.contracts = {c, c};
    const MenuReport rep = verify_menu(ctx, reference);
    eq(out, "reference t=(1,0) menu valid", 1.0, rep.valid ? 1.0 : 0.0, 0.0,
       "paper");
    eq(out, "reference t=(1,0) revenue", 0.5, rep.revenue, 1e-9, "paper");
  }
  const SolveResult r = solve_pricing_outcomes(ctx, q, false);
  eq(out, "R", 0.5, r.revenue, 1e-9, "derived");
  const EnvelopeResult env = solve_sealed_envelope(ctx);
  eq(out, "Re", 0.4, env.revenue, 1e-9, "derived");
  return out;
}

Checks fixture_example_b2() {
  Checks out;
  const Context ctx = make_quadratic_support_context(3, 0.05, 1e-4);
  const PosteriorSet q = interesting_posteriors(ctx);
  for (double point : {0.0, 0.85, 0.9, 0.95, 1.0}) {
    bool found = false;
    for (const auto& p : q.points) {
      found |= std::abs(p[1] - point) <= 1e-9;
    }
    std::ostringstream os;
    os << "Q* contains q1=" << point;
    eq(out, os.str(), 1.0, found ? 1.0 : 0.0, 0.0, "paper");
  }
  const SolveResult rc = solve_pricing_mappings(ctx, q);
  const Menu reduced = reduce_support(ctx, rc.menu);
  eq(out, "revenue preserved", rc.revenue, menu_revenue(ctx, reduced), 1e-8,
     "derived");
  for (int t = 0; t < 3; ++t) {
    int nz = 0;
    for (double w : reduced.contracts[t].weights) nz += w > 1e-9;
    eq(out, "support size theta" + std::to_string(t + 1),
       static_cast<double>(t + 2), nz, 0.0, "paper");
  }
  return out;
}

Checks fixture_envelope_gap() {
  Checks out;
  const Context ctx = make_envelope_gap_context(5, 10.0);
  const EnvelopeResult env = solve_sealed_envelope(ctx);
  eq(out, "Re", 1.0, env.revenue, 1e-9, "derived");
  const PosteriorSet q = interesting_posteriors(ctx);
  const SolveResult rc = solve_pricing_mappings(ctx, q);
  ge(out, "Rc/Re >= 2", 2.0, rc.revenue / env.revenue, 1e-9, "derived");
  return out;
}

Checks fixture_rcrp() {
  Checks out;
  // The exact side channel ("the seller learns exactly the type") does not
  // separate the classes: a mappings menu that reveals the payoff bit only
  // when the report matches the buyer's claim also extracts the full
  // surplus. Pinned here so the collapse stays visible.
  {
    const Context ctx = make_side_channel_context(3, 0.0);
    const PosteriorSet q = interesting_posteriors(ctx);
    const SolveResult rc = solve_pricing_mappings(ctx, q);
    eq(out, "exact side channel: Rc = full surplus", full_surplus(ctx),
       rc.revenue, 1e-7, "derived");
  }
  // The separation itself, on a three-type context built for it.
  const Context ctx = make_outcomes_gap_context();
  const PosteriorSet q = interesting_posteriors(ctx);
  const SolveResult rc = solve_pricing_mappings(ctx, q);
  const SolveResult rp = solve_pricing_outcomes(ctx, q, true);
  eq(out, "Rc", 1.0 / 128.0, rc.revenue, 1e-9, "derived");
  eq(out, "Rp = full surplus", full_surplus(ctx), rp.revenue, 1e-9,
     "derived");
  ge(out, "Rp/Rc >= 2", 2.0, rp.revenue / rc.revenue, 1e-9, "derived");
  return out;
}

Checks fixture_iid_gap() {
  Checks out;
  const Context base = make_iid_gap_context(3);
  const GapTable table =
      gap_experiment(base, make_iid_gap_eta(3), {0.0, 1e-5});
  const GapRow& at0 = table.rows[0];
  const GapRow& at1 = table.rows[1];
  eq(out, "R(1e-5) = full surplus", at1.full_surplus_value, at1.outcomes,
     1e-6, "derived");
  eq(out, "Rc continuous", at0.mappings, at1.mappings, 1e-3, "derived");
  ge(out, "R jump factor", 1.5, at1.outcomes / at0.outcomes, 1e-9, "derived");
  return out;
}

struct FixtureDef {
  std::string name;
  Checks (*run)();
  Context (*context)();
};

Context context_b2() { return make_quadratic_support_context(3, 0.05, 1e-4); }
Context context_envelope_gap() { return make_envelope_gap_context(5, 10.0); }
Context context_iid_gap() { return make_iid_gap_context(3); }

const std::vector<FixtureDef>& fixture_defs() {
  static const std::vector<FixtureDef> defs = {
      {"example-4.2", fixture_example_42, make_example_42},
      {"example-4.3", fixture_example_43, make_example_43},
      {"example-4.3-perturbed", fixture_example_43_perturbed,
       make_example_43_perturbed},
      {"example-5.2", fixture_example_52, make_example_52},
      {"example-b2", fixture_example_b2, context_b2},
      {"envelope-gap", fixture_envelope_gap, context_envelope_gap},
      {"rcrp", fixture_rcrp, make_outcomes_gap_context},
      {"iid-gap", fixture_iid_gap, context_iid_gap},
  };
  return defs;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& def : fixture_defs()) out.push_back(def.name);
    return out;
  }();
  return names;
}

Context fixture_context(const std::string& name) {
  for (const auto& def : fixture_defs()) {
    if (def.name == name) return def.context();
  }
  throw InputError("unknown fixture: " + name);
}

std::vector<FixtureResult> run_fixtures(const std::string& filter) {
  std::vector<FixtureResult> out;
  for (const auto& def : fixture_defs()) {
    if (!filter.empty() && !glob_match(filter, def.name)) continue;
    FixtureResult res;
    res.name = def.name;
    try {
      res.checks = def.run();
      res.pass = true;
      for (const auto& c : res.checks) res.pass &= c.pass;
    } catch (const std::exception& e) {
      res.pass = false;
      res.error = e.what();
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace infomech
