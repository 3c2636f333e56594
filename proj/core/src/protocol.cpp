#include "infomech/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace infomech {

namespace {

int assign_ids(ProtocolNode& n, int next) {
  n.id = next++;
  for (auto& c : n.children) next = assign_ids(c, next);
  return next;
}

const ProtocolNode* find_by_id(const ProtocolNode& n, int id) {
  if (n.id == id) return &n;
  for (const auto& c : n.children) {
    if (const ProtocolNode* hit = find_by_id(c, id)) return hit;
  }
  return nullptr;
}

double vec_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

ProtocolTree::ProtocolTree(ProtocolNode root) : root_(std::move(root)) {
  num_nodes_ = assign_ids(root_, 0);
}

const ProtocolNode* ProtocolTree::node(int id) const {
  if (id < 0 || id >= num_nodes_) return nullptr;
  return find_by_id(root_, id);
}

void validate_tree(const Context& ctx, const ProtocolTree& tree) {
  const int m = ctx.num_signals();
  tree.visit([&](const ProtocolNode& n) {
    switch (n.kind) {
      case ProtocolNode::Kind::Leaf:
        if (!n.children.empty()) {
          throw InputError("leaf node " + std::to_string(n.id) +
                           " has children");
        }
        break;
      case ProtocolNode::Kind::Transfer:
        if (n.children.size() != 1) {
          throw InputError("transfer node " + std::to_string(n.id) +
                           " must have exactly one child");
        }
        break;
      case ProtocolNode::Kind::Buyer:
        if (n.children.empty()) {
          throw InputError("buyer node " + std::to_string(n.id) +
                           " has no children");
        }
        if (!n.labels.empty() && n.labels.size() != n.children.size()) {
          throw InputError("buyer node " + std::to_string(n.id) +
                           " label/child mismatch");
        }
        break;
      case ProtocolNode::Kind::Seller: {
        if (n.children.empty()) {
          throw InputError("seller node " + std::to_string(n.id) +
                           " has no children");
        }
        if (static_cast<int>(n.psi.size()) != m) {
          throw InputError("seller node " + std::to_string(n.id) +
                           " needs one distribution per omega");
        }
        for (int w = 0; w < m; ++w) {
          if (n.psi[w].size() != n.children.size()) {
            throw InputError("seller node " + std::to_string(n.id) +
                             " distribution length mismatch");
          }
          double s = 0.0;
          for (double v : n.psi[w]) {
            if (v < -1e-15) {
              throw InputError("seller node " + std::to_string(n.id) +
                               " has a negative probability");
            }
            s += v;
          }
          if (std::abs(s - 1.0) > 1e-12) {
            throw InputError("seller node " + std::to_string(n.id) +
                             " distribution for omega " +
                             ctx.omega_labels()[w] + " sums to " +
                             std::to_string(s));
          }
        }
        break;
      }
    }
  });
}

namespace {

struct Payoff {
  double value = 0.0;     // E[v at stop - future transfers]
  double transfer = 0.0;  // E[future transfers]
};

// better(a, b): utility first, then seller revenue, then `a` (the earlier
// option). An indifferent buyer buys.
bool prefer_b(const Payoff& a, const Payoff& b) {
  const double eps = 1e-12 * (1.0 + std::max(std::abs(a.value), std::abs(b.value)));
  if (b.value > a.value + eps) return true;
  if (a.value > b.value + eps) return false;
  return b.transfer > a.transfer + eps;
}

Payoff best_response_rec(const Context& ctx, const ProtocolNode& n,
                         int theta, const std::vector<double>& b,
                         BuyerStrategy::Mode mode, BuyerStrategy& out) {
  switch (n.kind) {
    case ProtocolNode::Kind::Leaf:
      return {value_function(ctx, theta, b).value, 0.0};
    case ProtocolNode::Kind::Seller: {
      Payoff total;
      const int m = static_cast<int>(b.size());
      for (size_t c = 0; c < n.children.size(); ++c) {
        std::vector<double> bc(b.size());
        for (int w = 0; w < m; ++w) bc[w] = b[w] * n.psi[w][c];
        const Payoff p =
            best_response_rec(ctx, n.children[c], theta, bc, mode, out);
        total.value += p.value;
        total.transfer += p.transfer;
      }
      return total;
    }
    case ProtocolNode::Kind::Transfer: {
      const double mass = vec_sum(b);
      Payoff proceed =
          best_response_rec(ctx, n.children[0], theta, b, mode, out);
      proceed.value -= n.amount * mass;
      proceed.transfer += n.amount * mass;
      if (mode == BuyerStrategy::Mode::Committed) {
        out.choice[n.id] = 0;
        return proceed;
      }
      const Payoff defect{value_function(ctx, theta, b).value, 0.0};
      if (prefer_b(proceed, defect)) {
        out.choice[n.id] = kDefect;
        return defect;
      }
      out.choice[n.id] = 0;
      return proceed;
    }
    case ProtocolNode::Kind::Buyer: {
      Payoff best;
      int pick = -2;
      for (size_t c = 0; c < n.children.size(); ++c) {
        const Payoff p =
            best_response_rec(ctx, n.children[c], theta, b, mode, out);
        if (pick == -2 || prefer_b(best, p)) {
          best = p;
          pick = static_cast<int>(c);
        }
      }
      if (mode == BuyerStrategy::Mode::Uncommitted) {
        const Payoff defect{value_function(ctx, theta, b).value, 0.0};
        if (prefer_b(best, defect)) {
          best = defect;
          pick = kDefect;
        }
      }
      out.choice[n.id] = pick;
      return best;
    }
  }
  throw Error("unreachable");
}

}  // namespace

BestResponseResult best_response(const Context& ctx, const ProtocolTree& tree,
                                 int theta, BuyerStrategy::Mode mode) {
  BestResponseResult res;
  res.strategy.mode = mode;
  const Payoff p = best_response_rec(ctx, tree.root(), theta,
                                     ctx.interim_belief(theta), mode,
                                     res.strategy);
  res.utility = p.value;
  res.expected_transfer = p.transfer;
  return res;
}

namespace {

// Shared walk for evaluate / reach_likelihoods. `lambda` carries
// P(reach | omega); the buyer-frame mass of a node for type theta is
// sum_omega mu(omega|theta) lambda(omega).
void walk(const Context& ctx, const ProtocolNode& n, int theta,
          const BuyerStrategy& strategy, std::vector<double> lambda,
          double transfers, TypeOutcome& out,
          std::vector<std::vector<double>>* reach) {
  const std::vector<double>& belief = ctx.interim_belief(theta);
  const int m = ctx.num_signals();
  double mass = 0.0;
  std::vector<double> b(m);
  for (int w = 0; w < m; ++w) {
    b[w] = belief[w] * lambda[w];
    mass += b[w];
  }
  if (reach) (*reach)[n.id] = lambda;
  if (mass <= 0.0) return;

  auto stop_here = [&]() {
    out.stops.push_back({n.id, lambda, transfers});
    out.utility += value_function(ctx, theta, b).value - transfers * mass;
    out.expected_transfer += transfers * mass;
  };

  switch (n.kind) {
    case ProtocolNode::Kind::Leaf:
      stop_here();
      return;
    case ProtocolNode::Kind::Seller: {
      for (size_t c = 0; c < n.children.size(); ++c) {
        std::vector<double> lc(m);
        for (int w = 0; w < m; ++w) lc[w] = lambda[w] * n.psi[w][c];
        walk(ctx, n.children[c], theta, strategy, std::move(lc), transfers,
             out, reach);
      }
      return;
    }
    case ProtocolNode::Kind::Transfer: {
      const auto it = strategy.choice.find(n.id);
      const int pick = it == strategy.choice.end() ? 0 : it->second;
      if (pick == kDefect) {
        stop_here();
        return;
      }
      walk(ctx, n.children[0], theta, strategy, std::move(lambda),
           transfers + n.amount, out, reach);
      return;
    }
    case ProtocolNode::Kind::Buyer: {
      const auto it = strategy.choice.find(n.id);
      if (it == strategy.choice.end()) {
        throw MissingDecision("no choice for reachable buyer node " +
                              std::to_string(n.id));
      }
      if (it->second == kDefect) {
        stop_here();
        return;
      }
      if (it->second < 0 ||
          it->second >= static_cast<int>(n.children.size())) {
        throw InputError("strategy references a missing child at node " +
                         std::to_string(n.id));
      }
      walk(ctx, n.children[it->second], theta, strategy, std::move(lambda),
           transfers, out, reach);
      return;
    }
  }
}

}  // namespace

EvaluationResult evaluate(const Context& ctx, const ProtocolTree& tree,
                          const std::vector<BuyerStrategy>& strategies) {
  if (static_cast<int>(strategies.size()) != ctx.num_types()) {
    throw InputError("need one strategy per type");
  }
  for (const auto& s : strategies) {
    if (s.mode != BuyerStrategy::Mode::Committed) continue;
    for (const auto& [id, pick] : s.choice) {
      if (pick == kDefect) {
        throw InputError("committed strategy defects at node " +
                         std::to_string(id));
      }
    }
  }
  EvaluationResult res;
  res.per_type.resize(ctx.num_types());
  for (int t = 0; t < ctx.num_types(); ++t) {
    std::vector<double> ones(ctx.num_signals(), 1.0);
    walk(ctx, tree.root(), t, strategies[t], std::move(ones), 0.0,
         res.per_type[t], nullptr);
    res.revenue += ctx.type_mass(t) * res.per_type[t].expected_transfer;
  }
  return res;
}

std::vector<std::vector<double>> reach_likelihoods(
    const Context& ctx, const ProtocolTree& tree, int theta,
    const BuyerStrategy& strategy) {
  std::vector<std::vector<double>> reach(
      tree.num_nodes(), std::vector<double>(ctx.num_signals(), 0.0));
  TypeOutcome scratch;
  std::vector<double> ones(ctx.num_signals(), 1.0);
  walk(ctx, tree.root(), theta, strategy, std::move(ones), 0.0, scratch,
       &reach);
  return reach;
}

namespace {

void collect_decisions(const ProtocolNode& n, BuyerStrategy::Mode mode,
                       std::vector<std::pair<int, int>>& slots) {
  if (n.kind == ProtocolNode::Kind::Buyer) {
    const int extra = mode == BuyerStrategy::Mode::Uncommitted ? 1 : 0;
    slots.emplace_back(n.id, static_cast<int>(n.children.size()) + extra);
  } else if (n.kind == ProtocolNode::Kind::Transfer &&
             mode == BuyerStrategy::Mode::Uncommitted) {
    slots.emplace_back(n.id, 2);
  }
  for (const auto& c : n.children) collect_decisions(c, mode, slots);
}

// Utility of one fully specified assignment, minimal bookkeeping.
double assignment_utility(const Context& ctx, const ProtocolNode& n,
                          int theta, const std::vector<double>& b,
                          const std::map<int, int>& choice) {
  double mass = 0.0;
  for (double v : b) mass += v;
  if (mass <= 0.0) return 0.0;
  switch (n.kind) {
    case ProtocolNode::Kind::Leaf:
      return value_function(ctx, theta, b).value;
    case ProtocolNode::Kind::Seller: {
      double total = 0.0;
      const int m = static_cast<int>(b.size());
      for (size_t c = 0; c < n.children.size(); ++c) {
        std::vector<double> bc(b.size());
        for (int w = 0; w < m; ++w) bc[w] = b[w] * n.psi[w][c];
        total += assignment_utility(ctx, n.children[c], theta, bc, choice);
      }
      return total;
    }
    case ProtocolNode::Kind::Transfer: {
      const auto it = choice.find(n.id);
      if (it != choice.end() && it->second == kDefect) {
        return value_function(ctx, theta, b).value;
      }
      return assignment_utility(ctx, n.children[0], theta, b, choice) -
             n.amount * mass;
    }
    case ProtocolNode::Kind::Buyer: {
      const int pick = choice.at(n.id);
      if (pick == kDefect) return value_function(ctx, theta, b).value;
      return assignment_utility(ctx, n.children[pick], theta, b, choice);
    }
  }
  throw Error("unreachable");
}

}  // namespace

double enumerate_strategies_oracle(const Context& ctx,
                                   const ProtocolTree& tree, int theta,
                                   BuyerStrategy::Mode mode,
                                   int max_decisions) {
  std::vector<std::pair<int, int>> slots;
  collect_decisions(tree.root(), mode, slots);
  if (static_cast<int>(slots.size()) > max_decisions) {
    throw ComplexityLimit("strategy enumeration over " +
                          std::to_string(slots.size()) + " decision nodes");
  }
  long long combos = 1;
  for (const auto& [id, k] : slots) {
    combos *= k;
    if (combos > 50'000'000) {
      throw ComplexityLimit("too many pure strategies to enumerate");
    }
  }
  std::vector<int> real_children(slots.size());
  for (size_t i = 0; i < slots.size(); ++i) {
    real_children[i] =
        static_cast<int>(tree.node(slots[i].first)->children.size());
  }
  double best = -std::numeric_limits<double>::infinity();
  std::map<int, int> choice;
  std::function<void(size_t)> rec = [&](size_t slot) {
    if (slot == slots.size()) {
      best = std::max(best,
                      assignment_utility(ctx, tree.root(), theta,
                                         ctx.interim_belief(theta), choice));
      return;
    }
    const auto [id, k] = slots[slot];
    for (int c = 0; c < k; ++c) {
      choice[id] = c < real_children[slot] ? c : kDefect;
      rec(slot + 1);
    }
  };
  rec(0);
  return best;
}

namespace {

void require_committed(const std::vector<BuyerStrategy>& strategies) {
  for (const auto& s : strategies) {
    if (s.mode != BuyerStrategy::Mode::Committed) {
      throw InputError("transform requires committed strategies");
    }
    for (const auto& [id, pick] : s.choice) {
      if (pick == kDefect) {
        throw InputError("committed strategies cannot defect");
      }
    }
  }
}

ProtocolNode hardwire(const ProtocolNode& n, const Context& ctx,
                      const BuyerStrategy& strategy) {
  ProtocolNode out;
  out.amount = n.amount;
  if (n.kind == ProtocolNode::Kind::Buyer) {
    out.kind = ProtocolNode::Kind::Seller;
    const auto it = strategy.choice.find(n.id);
    const int pick = it == strategy.choice.end() ? 0 : it->second;
    out.psi.assign(ctx.num_signals(),
                   std::vector<double>(n.children.size(), 0.0));
    for (int w = 0; w < ctx.num_signals(); ++w) out.psi[w][pick] = 1.0;
  } else {
    out.kind = n.kind;
    out.psi = n.psi;
  }
  for (const auto& c : n.children) {
    out.children.push_back(hardwire(c, ctx, strategy));
  }
  return out;
}

// P(leaf | omega) per leaf id under one type's committed strategy, plus the
// path transfer of each leaf.
struct LeafLaw {
  std::vector<int> leaves;
  std::vector<std::vector<double>> likelihood;  // per leaf, per omega
  std::vector<double> tau;
};

void leaf_law_rec(const Context& ctx, const ProtocolNode& n,
                  const BuyerStrategy& strategy, std::vector<double> lambda,
                  double tau, LeafLaw& out) {
  switch (n.kind) {
    case ProtocolNode::Kind::Leaf:
      out.leaves.push_back(n.id);
      out.likelihood.push_back(std::move(lambda));
      out.tau.push_back(tau);
      return;
    case ProtocolNode::Kind::Seller:
      for (size_t c = 0; c < n.children.size(); ++c) {
        std::vector<double> lc(lambda.size());
        for (size_t w = 0; w < lambda.size(); ++w) {
          lc[w] = lambda[w] * n.psi[w][c];
        }
        leaf_law_rec(ctx, n.children[c], strategy, std::move(lc), tau, out);
      }
      return;
    case ProtocolNode::Kind::Transfer:
      leaf_law_rec(ctx, n.children[0], strategy, std::move(lambda),
                   tau + n.amount, out);
      return;
    case ProtocolNode::Kind::Buyer: {
      const auto it = strategy.choice.find(n.id);
      const int pick = it == strategy.choice.end() ? 0 : it->second;
      leaf_law_rec(ctx, n.children[pick], strategy, std::move(lambda), tau,
                   out);
      return;
    }
  }
}

LeafLaw leaf_law(const Context& ctx, const ProtocolTree& tree,
                 const BuyerStrategy& strategy) {
  LeafLaw out;
  std::vector<double> ones(ctx.num_signals(), 1.0);
  leaf_law_rec(ctx, tree.root(), strategy, std::move(ones), 0.0, out);
  return out;
}

bool posterior_close(const Posterior& a, const Posterior& b, double tol) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

// Builds one contract from a leaf law: observer-frame lottery over leaf
// posteriors, with per-leaf payments when `outcomes` is set.
MenuContract contract_from_law(const Context& ctx, const LeafLaw& law,
                               bool outcomes) {
  MenuContract c;
  const int m = ctx.num_signals();
  for (size_t l = 0; l < law.leaves.size(); ++l) {
    double prob = 0.0;
    Posterior q(m, 0.0);
    for (int w = 0; w < m; ++w) {
      q[w] = ctx.prior()[w] * law.likelihood[l][w];
      prob += q[w];
    }
    if (prob <= 1e-15) continue;
    for (double& v : q) v /= prob;
    bool merged = false;
    for (size_t i = 0; i < c.support.size(); ++i) {
      if (posterior_close(c.support[i], q, 1e-9)) {
        c.weights[i] += prob;
        if (outcomes) c.scaled_prices[i] += prob * law.tau[l];
        merged = true;
        break;
      }
    }
    if (!merged) {
      c.support.push_back(std::move(q));
      c.weights.push_back(prob);
      if (outcomes) c.scaled_prices.push_back(prob * law.tau[l]);
    }
  }
  if (outcomes) {
    for (size_t i = 0; i < c.support.size(); ++i) {
      c.signal_prices.push_back(c.scaled_prices[i] / c.weights[i]);
    }
  }
  return c;
}

}  // namespace

ProtocolTree to_revelation(const Context& ctx, const ProtocolTree& tree,
                           const std::vector<BuyerStrategy>& strategies) {
  require_committed(strategies);
  ProtocolNode root;
  root.kind = ProtocolNode::Kind::Buyer;
  for (int t = 0; t < ctx.num_types(); ++t) {
    root.labels.push_back(ctx.theta_labels()[t]);
    root.children.push_back(hardwire(tree.root(), ctx, strategies[t]));
  }
  return ProtocolTree(std::move(root));
}

Menu to_pricing_mappings(const Context& ctx, const ProtocolTree& tree,
                         const std::vector<BuyerStrategy>& strategies) {
  if (!ctx.is_independent()) {
    throw RequiresIndependence(
        "the mappings collapse needs omega independent of theta");
  }
  require_committed(strategies);
  Menu menu;
  menu.kind = Menu::Kind::Mappings;
  for (int t = 0; t < ctx.num_types(); ++t) {
    const LeafLaw law = leaf_law(ctx, tree, strategies[t]);
    MenuContract c = contract_from_law(ctx, law, false);
    double price = 0.0;
    for (size_t l = 0; l < law.leaves.size(); ++l) {
      double prob = 0.0;
      for (int w = 0; w < ctx.num_signals(); ++w) {
        prob += ctx.prior()[w] * law.likelihood[l][w];
      }
      price += prob * law.tau[l];
    }
    c.price = price;
    menu.contracts.push_back(std::move(c));
  }
  return menu;
}

Menu to_pricing_outcomes(const Context& ctx, const ProtocolTree& tree,
                         const std::vector<BuyerStrategy>& strategies) {
  require_committed(strategies);
  Menu menu;
  menu.kind = Menu::Kind::Outcomes;
  for (int t = 0; t < ctx.num_types(); ++t) {
    const LeafLaw law = leaf_law(ctx, tree, strategies[t]);
    menu.contracts.push_back(contract_from_law(ctx, law, true));
  }
  return menu;
}

ProtocolTree menu_to_protocol(const Context& ctx, const Menu& menu) {
  const int m = ctx.num_signals();

  auto trivial = [&](const MenuContract& c) {
    if (std::abs(c.price) > 1e-12) return false;
    for (double tp : c.signal_prices) {
      if (!(std::abs(tp) <= 1e-12)) return false;
    }
    for (const auto& q : c.support) {
      if (!posterior_close(q, ctx.prior(), 1e-9)) return false;
    }
    return true;
  };

  ProtocolNode root;
  root.kind = ProtocolNode::Kind::Buyer;
  root.labels.push_back("decline");
  root.children.emplace_back();  // leaf

  std::vector<const MenuContract*> distinct;
  for (const auto& c : menu.contracts) {
    bool seen = false;
    for (const MenuContract* d : distinct) {
      if (contracts_identical(*d, c)) {
        seen = true;
        break;
      }
    }
    if (!seen) distinct.push_back(&c);
  }

  int index = 0;
  for (const MenuContract* cp : distinct) {
    const MenuContract& c = *cp;
    root.labels.push_back("offer_" + std::to_string(index++));
    if (trivial(c)) {
      root.children.emplace_back();  // nothing to buy: a bare leaf
      continue;
    }
    ProtocolNode seller;
    seller.kind = ProtocolNode::Kind::Seller;
    seller.psi.assign(m, std::vector<double>(c.support.size(), 0.0));
    for (size_t i = 0; i < c.support.size(); ++i) {
      ProtocolNode child;
      if (menu.kind == Menu::Kind::Outcomes) {
        if (std::isnan(c.signal_prices[i])) {
          throw InputError(
              "menu carries undefined signal prices; run recover_transfers");
        }
        child.kind = ProtocolNode::Kind::Transfer;
        child.amount = c.signal_prices[i];
        child.children.emplace_back();  // leaf
      }  // mappings: the signal child is a bare leaf
      seller.children.push_back(std::move(child));
      for (int w = 0; w < m; ++w) {
        if (ctx.prior()[w] > 0.0) {
          seller.psi[w][i] = c.weights[i] * c.support[i][w] / ctx.prior()[w];
        }
      }
    }
    for (int w = 0; w < m; ++w) {
      if (ctx.prior()[w] <= 0.0) {
        seller.psi[w][0] = 1.0;
        continue;
      }
      double s = 0.0;
      for (double v : seller.psi[w]) s += v;
      if (std::abs(s - 1.0) > 1e-6) {
        throw InputError("menu violates feasibility: signal mass " +
                         std::to_string(s) + " for omega " +
                         ctx.omega_labels()[w]);
      }
      for (double& v : seller.psi[w]) v /= s;
    }
    if (menu.kind == Menu::Kind::Mappings) {
      ProtocolNode pay;
      pay.kind = ProtocolNode::Kind::Transfer;
      pay.amount = c.price;
      pay.children.push_back(std::move(seller));
      root.children.push_back(std::move(pay));
    } else {
      root.children.push_back(std::move(seller));
    }
  }
  return ProtocolTree(std::move(root));
}

double suggest_deposit(const ProtocolTree& tree) {
  std::function<double(const ProtocolNode&)> rec =
      [&](const ProtocolNode& n) -> double {
    double here = 0.0;
    if (n.kind == ProtocolNode::Kind::Transfer) {
      here = std::max(n.amount, 0.0);
    }
    double best = 0.0;
    for (const auto& c : n.children) best = std::max(best, rec(c));
    return here + best;
  };
  return rec(tree.root());
}

ProtocolTree wrap_with_deposit(const ProtocolTree& tree, double deposit) {
  std::function<ProtocolNode(const ProtocolNode&)> clone =
      [&](const ProtocolNode& n) -> ProtocolNode {
    if (n.kind == ProtocolNode::Kind::Leaf) {
      ProtocolNode rebate;
      rebate.kind = ProtocolNode::Kind::Transfer;
      rebate.amount = -deposit;
      rebate.children.emplace_back();
      return rebate;
    }
    ProtocolNode out;
    out.kind = n.kind;
    out.amount = n.amount;
    out.labels = n.labels;
    out.psi = n.psi;
    for (const auto& c : n.children) out.children.push_back(clone(c));
    return out;
  };
  ProtocolNode charge;
  charge.kind = ProtocolNode::Kind::Transfer;
  charge.amount = deposit;
  charge.children.push_back(clone(tree.root()));
  return ProtocolTree(std::move(charge));
}

}  // namespace infomech
