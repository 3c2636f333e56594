#include "doctest.h"
#include "infomech/fixtures.hpp"
#include "infomech/json_io.hpp"
#include "infomech/report.hpp"

using namespace infomech;

TEST_CASE("context JSON round trip") {
  const Context ctx = make_example_42();
  const Context back = parse_context_json(context_to_json(ctx));
  CHECK(back.theta_labels() == ctx.theta_labels());
  CHECK(back.omega_labels() == ctx.omega_labels());
  CHECK(back.mu_flat() == ctx.mu_flat());
  CHECK(back.payoff_flat() == ctx.payoff_flat());
}

TEST_CASE("context parsing rejects malformed inputs") {
  CHECK_THROWS_AS(parse_context_json("not json"), InputError);
  CHECK_THROWS_AS(parse_context_json("{}"), InputError);
  // mass 2
  CHECK_THROWS_AS(parse_context_json(R"({
    "theta": ["a","b"], "omega": ["x","y"], "actions": ["l"],
    "mu": [[0.4,0.6],[0.6,0.4]],
    "u": [[[1],[1]],[[1],[1]]]})"),
                  InputError);
  // zero-mass type
  CHECK_THROWS_AS(parse_context_json(R"({
    "theta": ["a","b"], "omega": ["x","y"], "actions": ["l"],
    "mu": [[0.5,0.0],[0.5,0.0]],
    "u": [[[1],[1]],[[1],[1]]]})"),
                  InputError);
  // ragged payoff tensor
  CHECK_THROWS_AS(parse_context_json(R"({
    "theta": ["a"], "omega": ["x","y"], "actions": ["l","r"],
    "mu": [[0.5],[0.5]],
    "u": [[[1,2]]]})"),
                  InputError);
}

TEST_CASE("protocol JSON round trip preserves the evaluation") {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  const std::string text = protocol_to_json(ctx, tree);
  const ProtocolTree back = parse_protocol_json(text, ctx);
  const EvaluationResult a = evaluate(ctx, tree, example_52_strategies(tree));
  const EvaluationResult b = evaluate(ctx, back, example_52_strategies(back));
  CHECK(a.revenue == doctest::Approx(b.revenue).epsilon(1e-15));
}

TEST_CASE("protocol parsing validates psi against the context labels") {
  const Context ctx = make_example_52();
  CHECK_THROWS_AS(parse_protocol_json(R"({
    "kind": "seller",
    "psi": {"omega0": [1.0], "wrong": [1.0]},
    "children": [{"kind": "leaf"}]})",
                                      ctx),
                  InputError);
  CHECK_THROWS_AS(parse_protocol_json(R"({
    "kind": "seller",
    "psi": {"omega0": [0.7], "omega1": [1.0]},
    "children": [{"kind": "leaf"}]})",
                                      ctx),
                  InputError);
}

TEST_CASE("reports are deterministic and carry twelve digits in text") {
  const Context ctx = make_example_52();
  const RevenueReport rep = revenue_report(ctx);
  const std::string a = render_revenue_report(ctx, rep, ReportFormat::Json);
  const std::string b = render_revenue_report(ctx, rep, ReportFormat::Json);
  CHECK(a == b);
  const std::string text =
      render_revenue_report(ctx, rep, ReportFormat::Text);
  CHECK(text.find("Re=0.4 Rc=0.4 Rp=0.5 R=0.5") != std::string::npos);

  GapTable table;
  table.rows.push_back({0.123456789012345, 1, 1, 1, 1, 1});
  const std::string gap = render_gap_table(table, ReportFormat::Text);
  CHECK(gap.find("0.123456789012") != std::string::npos);
}

TEST_CASE("menus serialize with null for unrecovered prices") {
  const Context ctx = make_example_42();
  Menu menu;
  menu.kind = Menu::Kind::Outcomes;
  MenuContract c;
  c.support = {ctx.prior()};
  c.weights = {0.0};
  c.scaled_prices = {0.25};
  c.signal_prices = {std::numeric_limits<double>::quiet_NaN()};
  menu.contracts = {c, c};
  const std::string text = menu_to_json(ctx, menu);
  CHECK(text.find("null") != std::string::npos);
}

TEST_CASE("the fixture manifest is complete") {
  const std::vector<std::string> expected = {
      "example-4.2",  "example-4.3", "example-4.3-perturbed", "example-5.2",
      "example-b2",   "envelope-gap", "rcrp",                 "iid-gap"};
  CHECK(fixture_names() == expected);
  for (const auto& name : expected) {
    CHECK_NOTHROW(fixture_context(name));
  }
}

TEST_CASE("fixture filtering by glob") {
  CHECK(glob_match("example-*", "example-4.2"));
  CHECK(glob_match("*4.3*", "example-4.3-perturbed"));
  CHECK_FALSE(glob_match("example-?", "example-4.2"));
  CHECK(glob_match("", "anything"));
  const auto results = run_fixtures("example-4.2");
  REQUIRE(results.size() == 1);
  CHECK(results[0].name == "example-4.2");
  CHECK(results[0].pass);
}

TEST_CASE("posterior sets serialize with provenance") {
  const Context ctx = make_example_52();
  const PosteriorSet q = interesting_posteriors(ctx);
  const std::string text = posterior_set_to_json(ctx, q);
  CHECK(text.find("qstar") != std::string::npos);
}

TEST_CASE("an empty evaluation renders as valid JSON") {
  const Context ctx = make_example_42();
  ProtocolReport rep;
  rep.mode = "committed";
  rep.best_responses.resize(2);
  rep.evaluation.per_type.resize(2);
  const std::string text =
      render_protocol_report(ctx, rep, ReportFormat::Json);
  CHECK(text.find("\"revenue\": 0.0") != std::string::npos);
}

TEST_CASE("perturbing the uniform joint reaches the near-full surplus") {
  // mu + t*eta with eta = [[1,-1],[-1,1]] lands exactly on the perturbed
  // distribution at t = 1e-5; the unrestricted optimum follows the jump.
  const Context base = make_example_43();
  const std::vector<double> eta = {1.0, -1.0, -1.0, 1.0};
  const GapTable table = gap_experiment(base, eta, {0.0, 1e-5});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].outcomes == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(table.rows[1].outcomes == doctest::Approx(1.99992).epsilon(1e-6));
  CHECK(table.rows[1].mappings == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("perturbation guards") {
  const Context base = make_iid_gap_context(3);
  const auto eta = make_iid_gap_eta(3);
  CHECK_NOTHROW(perturb_context(base, eta, 1e-5));
  CHECK_THROWS_AS(perturb_context(base, eta, 1.0), InvalidPerturbation);
  // eta = 0 keeps everything in place
  const GapTable table =
      gap_experiment(base, std::vector<double>(9, 0.0), {0.0, 1e-5});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].outcomes ==
        doctest::Approx(table.rows[1].outcomes).epsilon(1e-12));
  CHECK(table.rows[0].mappings ==
        doctest::Approx(table.rows[1].mappings).epsilon(1e-12));
}
