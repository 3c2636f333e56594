#include <random>

#include "doctest.h"
#include "infomech/context.hpp"
#include "infomech/fixtures.hpp"
#include "test_support.hpp"

using namespace infomech;
using infomech::testing::random_context;
using infomech::testing::RandomContextSpec;

TEST_CASE("validate_context accepts the locked-box context") {
  const Context ctx = make_example_42();
  CHECK(validate_context(ctx).empty());
}

TEST_CASE("validate_context flags a scaled joint distribution") {
  Context ctx({"t0", "t1"}, {"w0", "w1"}, {"a0", "a1"},
              {0.4, 0.6, 0.6, 0.4},  // mass 2
              std::vector<double>(8, 0.0));
  const auto report = validate_context(ctx);
  REQUIRE(report.size() == 1);
  CHECK(report[0].invariant == "mass != 1");
}

TEST_CASE("validate_context flags zero-mass types") {
  Context ctx({"t0", "t1"}, {"w0", "w1"}, {"a0", "a1"},
              {0.5, 0.0, 0.5, 0.0}, std::vector<double>(8, 0.0));
  const auto report = validate_context(ctx);
  REQUIRE(report.size() == 1);
  CHECK(report[0].invariant == "zero-mass type");
  CHECK(report[0].index == 1);
}

TEST_CASE("value function at the interim belief of example 5.2") {
  const Context ctx = make_example_52();
  const ValueResult v = value_function(ctx, 0, std::vector<double>{0.6, 0.4});
  CHECK(v.value == doctest::Approx(0.4).epsilon(1e-12));
  REQUIRE(v.best_actions.size() == 1);
  CHECK(v.best_actions[0] == 0);
}

TEST_CASE("value function on point masses picks the best action payoff") {
  const Context ctx = make_example_42();
  for (int w = 0; w < 2; ++w) {
    Posterior q(2, 0.0);
    q[w] = 1.0;
    for (int t = 0; t < 2; ++t) {
      double best = ctx.payoff(t, w, 0);
      for (int a = 1; a < ctx.num_actions(); ++a) {
        best = std::max(best, ctx.payoff(t, w, a));
      }
      CHECK(value_function(ctx, t, q).value == doctest::Approx(best));
    }
  }
}

TEST_CASE("value function is homogeneous and convex") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    RandomContextSpec spec;
    spec.n = 2 + trial % 3;
    spec.m = 2 + trial % 2;
    spec.actions = 2 + trial % 3;
    const Context ctx = random_context(rng, spec);
    std::vector<double> q1(spec.m), q2(spec.m);
    double s1 = 0.0, s2 = 0.0;
    for (int w = 0; w < spec.m; ++w) {
      q1[w] = unif(rng);
      q2[w] = unif(rng);
      s1 += q1[w];
      s2 += q2[w];
    }
    for (int w = 0; w < spec.m; ++w) {
      q1[w] /= s1;
      q2[w] /= s2;
    }
    const double lambda = unif(rng);
    for (int t = 0; t < spec.n; ++t) {
      std::vector<double> scaled = q1;
      for (double& v : scaled) v *= 2.0;
      CHECK(value_function(ctx, t, scaled).value ==
            doctest::Approx(2.0 * value_function(ctx, t, q1).value)
                .epsilon(1e-12));
      std::vector<double> mix(spec.m);
      for (int w = 0; w < spec.m; ++w) {
        mix[w] = lambda * q1[w] + (1.0 - lambda) * q2[w];
      }
      const double lhs = value_function(ctx, t, mix).value;
      const double rhs = lambda * value_function(ctx, t, q1).value +
                         (1.0 - lambda) * value_function(ctx, t, q2).value;
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("argmax set is invariant under positive scaling of payoffs") {
  std::mt19937 rng(7);
  RandomContextSpec spec;
  spec.n = 2;
  spec.m = 3;
  spec.actions = 4;
  const Context ctx = random_context(rng, spec);
  std::vector<double> scaled_u = ctx.payoff_flat();
  for (size_t i = 0; i < scaled_u.size() / 2; ++i) scaled_u[i] *= 3.5;
  Context scaled(ctx.theta_labels(), ctx.omega_labels(), ctx.action_labels(),
                 std::vector<double>(ctx.mu_flat()), std::move(scaled_u));
  const Posterior q = ctx.prior();
  CHECK(value_function(ctx, 0, q).best_actions ==
        value_function(scaled, 0, q).best_actions);
}

TEST_CASE("surpluses of the reference examples") {
  CHECK(surplus(make_example_42(), 0) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(surplus(make_example_42(), 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(surplus(make_example_43(), 0) == doctest::Approx(1.5));
  CHECK(surplus(make_example_43(), 1) == doctest::Approx(2.5));
  CHECK(full_surplus(make_example_43()) == doctest::Approx(2.0));
  CHECK(surplus(make_example_52(), 0) == doctest::Approx(0.6));
  CHECK(surplus(make_example_52(), 1) == doctest::Approx(0.4));
  CHECK(full_surplus(make_example_52()) == doctest::Approx(0.5));
}

TEST_CASE("surplus is nonnegative, zero iff one action covers the support") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    RandomContextSpec spec;
    spec.n = 1 + trial % 3;
    spec.m = 2 + trial % 5;  // up to 6
    spec.actions = 1 + trial % 6;
    const Context ctx = random_context(rng, spec);
    for (int t = 0; t < spec.n; ++t) {
      const double zeta = surplus(ctx, t);
      CHECK(zeta >= -1e-12);
      // enumeration: does one action stay optimal under every omega in the
      // support of mu(.|theta)?
      bool some_action_covers = false;
      for (int a = 0; a < spec.actions && !some_action_covers; ++a) {
        bool covers = true;
        for (int w = 0; w < spec.m && covers; ++w) {
          if (ctx.interim_belief(t)[w] <= 0.0) continue;
          for (int b = 0; b < spec.actions; ++b) {
            if (ctx.payoff(t, w, b) > ctx.payoff(t, w, a) + 1e-12) {
              covers = false;
              break;
            }
          }
        }
        some_action_covers = covers;
      }
      if (some_action_covers) {
        CHECK(zeta <= 1e-9);
      } else {
        CHECK(zeta > 1e-9);
      }
    }
  }
}

TEST_CASE("posterior_for_type reproduces the printed interim beliefs") {
  const Context ctx = make_example_42();
  const TypePosterior tp = posterior_for_type(ctx, 0, ctx.prior());
  CHECK(tp.q[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(tp.q[1] == doctest::Approx(0.6).epsilon(1e-12));
  // reconstruction: q' * mass = D_theta q componentwise
  const BeliefTransform bt = ctx.belief_transform(0);
  for (int w = 0; w < 2; ++w) {
    CHECK(tp.q[w] * tp.mass ==
          doctest::Approx(bt.diag[w] * ctx.prior()[w]).epsilon(1e-12));
  }
}

TEST_CASE("posterior_for_type is the identity for independent contexts") {
  std::mt19937 rng(5);
  RandomContextSpec spec;
  spec.n = 3;
  spec.m = 4;
  spec.independent = true;
  const Context ctx = random_context(rng, spec);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> q(4);
  double s = 0.0;
  for (double& v : q) {
    v = unif(rng);
    s += v;
  }
  for (double& v : q) v /= s;
  for (int t = 0; t < 3; ++t) {
    const TypePosterior tp = posterior_for_type(ctx, t, q);
    CHECK(tp.mass == doctest::Approx(ctx.type_mass(t)).epsilon(1e-9));
    for (int w = 0; w < 4; ++w) {
      CHECK(tp.q[w] == doctest::Approx(q[w]).epsilon(1e-9));
    }
  }
}

TEST_CASE("posterior_for_type throws ZeroMass on impossible signals") {
  Context ctx({"t0", "t1"}, {"w0", "w1"}, {"a0"},
              {0.5, 0.0, 0.0, 0.5},  // type 0 never sees w1
              std::vector<double>(4, 1.0));
  CHECK_THROWS_AS(posterior_for_type(ctx, 0, std::vector<double>{0.0, 1.0}),
                  ZeroMass);
}

TEST_CASE("belief transforms sum to the identity diagonal") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    RandomContextSpec spec;
    spec.n = 2 + trial % 3;
    spec.m = 2 + trial % 3;
    const Context ctx = random_context(rng, spec);
    for (int w = 0; w < spec.m; ++w) {
      double total = 0.0;
      for (int t = 0; t < spec.n; ++t) {
        total += ctx.belief_transform(t).diag[w];
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero-mass signals are flagged but tolerated") {
  Context ctx({"t0"}, {"w0", "w1"}, {"a0"}, {1.0, 0.0},
              std::vector<double>{1.0, 2.0});
  CHECK(validate_context(ctx).empty());
  const auto flagged = zero_mass_signals(ctx);
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0] == 1);
}
