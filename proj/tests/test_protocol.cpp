#include <cmath>
#include <random>

#include "doctest.h"
#include "infomech/fixtures.hpp"
#include "infomech/geometry.hpp"
#include "infomech/protocol.hpp"
#include "test_support.hpp"

using namespace infomech;
using infomech::testing::random_context;
using infomech::testing::random_tree;
using infomech::testing::RandomContextSpec;

namespace {

std::vector<BuyerStrategy> committed_best_responses(const Context& ctx,
                                                    const ProtocolTree& tree) {
  std::vector<BuyerStrategy> out;
  for (int t = 0; t < ctx.num_types(); ++t) {
    out.push_back(
        best_response(ctx, tree, t, BuyerStrategy::Mode::Committed).strategy);
  }
  return out;
}

}  // namespace

TEST_CASE("tree validation catches malformed prescriptions") {
  const Context ctx = make_example_52();
  ProtocolNode seller;
  seller.kind = ProtocolNode::Kind::Seller;
  seller.children.emplace_back();
  seller.children.emplace_back();
  seller.psi = {{0.7, 0.7}, {0.5, 0.5}};  // first row sums to 1.4
  CHECK_THROWS_AS(validate_tree(ctx, ProtocolTree(std::move(seller))),
                  InputError);

  ProtocolNode transfer;
  transfer.kind = ProtocolNode::Kind::Transfer;
  transfer.amount = 1.0;  // no child
  CHECK_THROWS_AS(validate_tree(ctx, ProtocolTree(std::move(transfer))),
                  InputError);
}

TEST_CASE("single-leaf protocol yields the prior value and no transfers") {
  const Context ctx = make_example_52();
  ProtocolTree tree((ProtocolNode()));
  for (int t = 0; t < 2; ++t) {
    for (auto mode : {BuyerStrategy::Mode::Committed,
                      BuyerStrategy::Mode::Uncommitted}) {
      const BestResponseResult br = best_response(ctx, tree, t, mode);
      CHECK(br.utility ==
            doctest::Approx(
                value_function(ctx, t, ctx.interim_belief(t)).value));
      CHECK(br.expected_transfer == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("example 5.2 best responses and evaluation") {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  validate_tree(ctx, tree);

  const BestResponseResult br0 =
      best_response(ctx, tree, 0, BuyerStrategy::Mode::Uncommitted);
  CHECK(br0.strategy.choice.at(0) == 0);  // left
  CHECK(br0.utility == doctest::Approx(0.467).epsilon(1e-12));
  CHECK(br0.expected_transfer == doctest::Approx(0.533).epsilon(1e-12));

  const BestResponseResult br1 =
      best_response(ctx, tree, 1, BuyerStrategy::Mode::Uncommitted);
  CHECK(br1.strategy.choice.at(0) == 1);  // right
  CHECK(br1.utility == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(br1.expected_transfer == doctest::Approx(0.4).epsilon(1e-12));

  const EvaluationResult ev =
      evaluate(ctx, tree, example_52_strategies(tree));
  CHECK(ev.revenue == doctest::Approx(0.4665).epsilon(1e-12));
  // committed and uncommitted coincide on this tree
  const BestResponseResult c1 =
      best_response(ctx, tree, 1, BuyerStrategy::Mode::Committed);
  CHECK(c1.utility == doctest::Approx(br1.utility));
}

TEST_CASE("evaluate reports missing decisions for reachable buyer nodes") {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  std::vector<BuyerStrategy> strategies(2);
  strategies[0].mode = BuyerStrategy::Mode::Committed;
  strategies[1].mode = BuyerStrategy::Mode::Committed;
  CHECK_THROWS_AS(evaluate(ctx, tree, strategies), MissingDecision);
}

TEST_CASE("likelihood mass is conserved across stops") {
  std::mt19937 rng(404);
  RandomContextSpec spec;
  spec.n = 2;
  spec.m = 3;
  spec.actions = 2;
  for (int trial = 0; trial < 10; ++trial) {
    const Context ctx = random_context(rng, spec);
    const ProtocolTree tree = random_tree(rng, spec.m);
    const auto strategies = committed_best_responses(ctx, tree);
    const EvaluationResult ev = evaluate(ctx, tree, strategies);
    for (int t = 0; t < spec.n; ++t) {
      std::vector<double> mass(spec.m, 0.0);
      for (const auto& stop : ev.per_type[t].stops) {
        for (int w = 0; w < spec.m; ++w) mass[w] += stop.likelihood[w];
      }
      for (int w = 0; w < spec.m; ++w) {
        CHECK(mass[w] == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("best response matches the exhaustive oracle") {
  std::mt19937 rng(1234);
  int done = 0;
  while (done < 30) {
    RandomContextSpec spec;
    spec.n = 2 + done % 2;
    spec.m = 2 + done % 2;
    spec.actions = 2;
    const Context ctx = random_context(rng, spec);
    const ProtocolTree tree = random_tree(rng, spec.m, 6);
    for (auto mode : {BuyerStrategy::Mode::Committed,
                      BuyerStrategy::Mode::Uncommitted}) {
      for (int t = 0; t < spec.n; ++t) {
        const double fast = best_response(ctx, tree, t, mode).utility;
        const double slow = enumerate_strategies_oracle(ctx, tree, t, mode);
        CHECK(std::abs(fast - slow) <= 1e-10 * (1.0 + std::abs(slow)));
      }
    }
    ++done;
  }
}

TEST_CASE("oracle agrees on the four-level reference tree") {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  for (auto mode : {BuyerStrategy::Mode::Committed,
                    BuyerStrategy::Mode::Uncommitted}) {
    for (int t = 0; t < 2; ++t) {
      CHECK(best_response(ctx, tree, t, mode).utility ==
            doctest::Approx(enumerate_strategies_oracle(ctx, tree, t, mode))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("oracle refuses oversized trees") {
  std::mt19937 rng(31337);
  const Context ctx = random_context(rng, {});
  const ProtocolTree tree = random_tree(rng, 2, 8);
  CHECK_THROWS_AS(enumerate_strategies_oracle(
                      ctx, tree, 0, BuyerStrategy::Mode::Uncommitted, 0),
                  ComplexityLimit);
}

TEST_CASE("defection can only help, participation beats the prior") {
  std::mt19937 rng(555);
  RandomContextSpec spec;
  spec.n = 2;
  spec.m = 2;
  for (int trial = 0; trial < 20; ++trial) {
    const Context ctx = random_context(rng, spec);
    const ProtocolTree tree = random_tree(rng, spec.m);
    for (int t = 0; t < spec.n; ++t) {
      const double committed =
          best_response(ctx, tree, t, BuyerStrategy::Mode::Committed).utility;
      const double uncommitted =
          best_response(ctx, tree, t, BuyerStrategy::Mode::Uncommitted)
              .utility;
      const double outside =
          value_function(ctx, t, ctx.interim_belief(t)).value;
      CHECK(uncommitted >= committed - 1e-12);
      CHECK(uncommitted >= outside - 1e-10);
    }
  }
}

TEST_CASE("revelation transform preserves utilities and transfers") {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  const auto strategies = committed_best_responses(ctx, tree);
  const ProtocolTree revelation = to_revelation(ctx, tree, strategies);
  validate_tree(ctx, revelation);

  // truthful play: type t picks branch t at the root, then has no decisions
  std::vector<BuyerStrategy> truthful(2);
  for (int t = 0; t < 2; ++t) {
    truthful[t].mode = BuyerStrategy::Mode::Committed;
    truthful[t].choice[0] = t;
  }
  const EvaluationResult before = evaluate(ctx, tree, strategies);
  const EvaluationResult after = evaluate(ctx, revelation, truthful);
  CHECK(after.revenue == doctest::Approx(before.revenue).epsilon(1e-12));
  for (int t = 0; t < 2; ++t) {
    CHECK(after.per_type[t].utility ==
          doctest::Approx(before.per_type[t].utility).epsilon(1e-10));
    CHECK(after.per_type[t].expected_transfer ==
          doctest::Approx(before.per_type[t].expected_transfer)
              .epsilon(1e-10));
  }
}

TEST_CASE("revelation transform on random trees") {
  std::mt19937 rng(808);
  RandomContextSpec spec;
  spec.n = 3;
  spec.m = 2;
  for (int trial = 0; trial < 10; ++trial) {
    const Context ctx = random_context(rng, spec);
    const ProtocolTree tree = random_tree(rng, spec.m);
    const auto strategies = committed_best_responses(ctx, tree);
    const ProtocolTree revelation = to_revelation(ctx, tree, strategies);
    std::vector<BuyerStrategy> truthful(spec.n);
    for (int t = 0; t < spec.n; ++t) {
      truthful[t].mode = BuyerStrategy::Mode::Committed;
      truthful[t].choice[0] = t;
    }
    const EvaluationResult before = evaluate(ctx, tree, strategies);
    const EvaluationResult after = evaluate(ctx, revelation, truthful);
    for (int t = 0; t < spec.n; ++t) {
      CHECK(after.per_type[t].utility ==
            doctest::Approx(before.per_type[t].utility).epsilon(1e-10));
      CHECK(after.per_type[t].expected_transfer ==
            doctest::Approx(before.per_type[t].expected_transfer)
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("the revelation transform is a fixed point") {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  const auto strategies = committed_best_responses(ctx, tree);
  const ProtocolTree once = to_revelation(ctx, tree, strategies);
  std::vector<BuyerStrategy> truthful(2);
  for (int t = 0; t < 2; ++t) {
    truthful[t].mode = BuyerStrategy::Mode::Committed;
    truthful[t].choice[0] = t;
  }
  const ProtocolTree twice = to_revelation(ctx, once, truthful);
  const EvaluationResult a = evaluate(ctx, once, truthful);
  const EvaluationResult b = evaluate(ctx, twice, truthful);
  CHECK(a.revenue == doctest::Approx(b.revenue).epsilon(1e-12));
  for (int t = 0; t < 2; ++t) {
    CHECK(a.per_type[t].utility ==
          doctest::Approx(b.per_type[t].utility).epsilon(1e-12));
  }
}

TEST_CASE("the optimal uniform menu is a fixed point of the round trip") {
  const Context ctx = make_example_43();
  const SolveResult rc =
      solve_pricing_mappings(ctx, interesting_posteriors(ctx));
  const ProtocolTree tree = menu_to_protocol(ctx, rc.menu);
  const auto strategies = committed_best_responses(ctx, tree);
  const Menu rebuilt = to_pricing_mappings(ctx, tree, strategies);
  for (int t = 0; t < 2; ++t) {
    CHECK(rebuilt.contracts[t].price ==
          doctest::Approx(rc.menu.contracts[t].price).epsilon(1e-10));
    CHECK(contract_value(ctx, t, rebuilt.contracts[t]) ==
          doctest::Approx(contract_value(ctx, t, rc.menu.contracts[t]))
              .epsilon(1e-10));
  }
  CHECK(menu_revenue(ctx, rebuilt) ==
        doctest::Approx(rc.revenue).epsilon(1e-10));
}

TEST_CASE("mappings collapse requires independence") {
  const Context ctx = make_example_42();
  const ProtocolTree tree = make_example_52_tree(ctx);
  const auto strategies = committed_best_responses(ctx, tree);
  CHECK_THROWS_AS(to_pricing_mappings(ctx, tree, strategies),
                  RequiresIndependence);
}

TEST_CASE("mappings collapse preserves utility and payments") {
  std::mt19937 rng(909);
  RandomContextSpec spec;
  spec.n = 2;
  spec.m = 3;
  spec.independent = true;
  for (int trial = 0; trial < 10; ++trial) {
    const Context ctx = random_context(rng, spec);
    const ProtocolTree tree = random_tree(rng, spec.m);
    const auto strategies = committed_best_responses(ctx, tree);
    const Menu menu = to_pricing_mappings(ctx, tree, strategies);
    const EvaluationResult ev = evaluate(ctx, tree, strategies);
    for (int t = 0; t < spec.n; ++t) {
      CHECK(menu.contracts[t].price ==
            doctest::Approx(ev.per_type[t].expected_transfer)
                .epsilon(1e-10));
      const double menu_utility =
          contract_value(ctx, t, menu.contracts[t]) - menu.contracts[t].price;
      CHECK(menu_utility ==
            doctest::Approx(ev.per_type[t].utility).epsilon(1e-10));
    }
  }
}

TEST_CASE("outcomes collapse works for correlated contexts") {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  const auto strategies = committed_best_responses(ctx, tree);
  const Menu menu = to_pricing_outcomes(ctx, tree, strategies);
  const EvaluationResult ev = evaluate(ctx, tree, strategies);
  CHECK(menu_revenue(ctx, menu) ==
        doctest::Approx(ev.revenue).epsilon(1e-12));
  for (int t = 0; t < 2; ++t) {
    CHECK(contract_payment(ctx, t, menu.contracts[t], Menu::Kind::Outcomes) ==
          doctest::Approx(ev.per_type[t].expected_transfer).epsilon(1e-10));
    CHECK(contract_value(ctx, t, menu.contracts[t]) -
              contract_payment(ctx, t, menu.contracts[t],
                               Menu::Kind::Outcomes) ==
          doctest::Approx(ev.per_type[t].utility).epsilon(1e-10));
  }
}

TEST_CASE("both collapses agree on expected payments when independent") {
  std::mt19937 rng(111);
  RandomContextSpec spec;
  spec.n = 2;
  spec.m = 2;
  spec.independent = true;
  const Context ctx = random_context(rng, spec);
  const ProtocolTree tree = random_tree(rng, spec.m);
  const auto strategies = committed_best_responses(ctx, tree);
  const Menu a = to_pricing_mappings(ctx, tree, strategies);
  const Menu b = to_pricing_outcomes(ctx, tree, strategies);
  for (int t = 0; t < spec.n; ++t) {
    CHECK(contract_payment(ctx, t, a.contracts[t], Menu::Kind::Mappings) ==
          doctest::Approx(contract_payment(ctx, t, b.contracts[t],
                                           Menu::Kind::Outcomes))
              .epsilon(1e-10));
  }
}

TEST_CASE("leaf-only trees collapse to an informationless free contract") {
  const Context ctx = make_example_52();
  ProtocolTree tree((ProtocolNode()));
  const auto strategies = committed_best_responses(ctx, tree);
  const Menu menu = to_pricing_outcomes(ctx, tree, strategies);
  for (int t = 0; t < 2; ++t) {
    REQUIRE(menu.contracts[t].support.size() == 1);
    CHECK(menu.contracts[t].scaled_prices[0] == doctest::Approx(0.0));
    for (int w = 0; w < 2; ++w) {
      CHECK(menu.contracts[t].support[0][w] ==
            doctest::Approx(ctx.prior()[w]));
    }
  }
}

TEST_CASE("the envelope menu maps to the three-interior-node tree") {
  const Context ctx = make_example_43();
  MenuContract envelope;
  envelope.support = {{1.0, 0.0}, {0.0, 1.0}};
  envelope.weights = {0.5, 0.5};
  envelope.price = 1.5;
  Menu menu;
  menu.kind = Menu::Kind::Mappings;
  menu.contracts = {envelope, envelope};
  const ProtocolTree tree = menu_to_protocol(ctx, menu);
  validate_tree(ctx, tree);
  int buyers = 0, transfers = 0, sellers = 0, leaves = 0;
  tree.visit([&](const ProtocolNode& n) {
    switch (n.kind) {
      case ProtocolNode::Kind::Buyer: ++buyers; break;
      case ProtocolNode::Kind::Transfer: ++transfers; break;
      case ProtocolNode::Kind::Seller: ++sellers; break;
      case ProtocolNode::Kind::Leaf: ++leaves; break;
    }
  });
  CHECK(buyers == 1);
  CHECK(transfers == 1);
  CHECK(sellers == 1);
  CHECK(leaves == 3);  // decline plus one per revealed signal

  // round trip: committed best responses reproduce the menu utilities, and
  // nonnegative prices make defection pointless
  for (int t = 0; t < 2; ++t) {
    const double menu_utility =
        contract_value(ctx, t, menu.contracts[t]) - menu.contracts[t].price;
    const double expected =
        std::max(menu_utility,
                 value_function(ctx, t, ctx.interim_belief(t)).value);
    const BestResponseResult committed =
        best_response(ctx, tree, t, BuyerStrategy::Mode::Committed);
    const BestResponseResult uncommitted =
        best_response(ctx, tree, t, BuyerStrategy::Mode::Uncommitted);
    CHECK(committed.utility == doctest::Approx(expected).epsilon(1e-10));
    CHECK(uncommitted.utility == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("uncommitted buyers defect at the full-surplus payment") {
  const Context ctx = make_example_42();
  const FullSurplusResult fs = full_surplus_contract(ctx);
  const ProtocolTree tree = menu_to_protocol(ctx, fs.menu);
  validate_tree(ctx, tree);
  const ProtocolNode* charge = tree.find([](const ProtocolNode& n) {
    return n.kind == ProtocolNode::Kind::Transfer && n.amount > 3.0;
  });
  REQUIRE(charge != nullptr);
  for (int t = 0; t < 2; ++t) {
    const BestResponseResult br =
        best_response(ctx, tree, t, BuyerStrategy::Mode::Uncommitted);
    CHECK(br.strategy.choice.at(charge->id) == kDefect);
  }
}

TEST_CASE("an empty menu becomes a buyer node over leaves") {
  const Context ctx = make_example_42();
  MenuContract null_contract;
  null_contract.support = {ctx.prior()};
  null_contract.weights = {1.0};
  Menu menu;
  menu.kind = Menu::Kind::Mappings;
  menu.contracts = {null_contract, null_contract};
  const ProtocolTree tree = menu_to_protocol(ctx, menu);
  CHECK(tree.root().kind == ProtocolNode::Kind::Buyer);
  for (const auto& child : tree.root().children) {
    CHECK(child.kind == ProtocolNode::Kind::Leaf);
  }
}

TEST_CASE("deposits restore commitment on outcome-priced trees") {
  const Context ctx = make_example_42();
  const FullSurplusResult fs = full_surplus_contract(ctx);
  const Menu strict = recover_transfers(ctx, make_strict(ctx, fs.menu, 0.05));
  const ProtocolTree bare = menu_to_protocol(ctx, strict);
  const ProtocolTree wrapped =
      wrap_with_deposit(bare, suggest_deposit(bare));
  validate_tree(ctx, wrapped);
  for (int t = 0; t < 2; ++t) {
    const double committed =
        best_response(ctx, bare, t, BuyerStrategy::Mode::Committed).utility;
    const double uncommitted_wrapped =
        best_response(ctx, wrapped, t, BuyerStrategy::Mode::Uncommitted)
            .utility;
    CHECK(uncommitted_wrapped == doctest::Approx(committed).epsilon(1e-9));
  }
  // revenue under committed play is unchanged by the wrap
  std::vector<BuyerStrategy> bare_strategies, wrapped_strategies;
  for (int t = 0; t < 2; ++t) {
    bare_strategies.push_back(
        best_response(ctx, bare, t, BuyerStrategy::Mode::Committed).strategy);
    wrapped_strategies.push_back(
        best_response(ctx, wrapped, t, BuyerStrategy::Mode::Uncommitted)
            .strategy);
  }
  CHECK(evaluate(ctx, wrapped, wrapped_strategies).revenue ==
        doctest::Approx(evaluate(ctx, bare, bare_strategies).revenue)
            .epsilon(1e-9));
}
