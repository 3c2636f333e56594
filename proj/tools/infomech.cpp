// Command-line front end: loads contexts and protocol trees, dispatches the
// solvers, runs the embedded fixture suite and gap experiments, and emits
// JSON or plain-text reports.
//
// Exit codes: 0 success, 1 check failure, 2 input error, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "infomech/fixtures.hpp"
#include "infomech/json_io.hpp"
#include "infomech/report.hpp"

namespace {

using namespace infomech;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Context load_context(const std::string& path) {
  return parse_context_json(slurp(path));
}

PosteriorSet posterior_set_for(const Context& ctx, int grid) {
  PosteriorSet q = interesting_posteriors(ctx);
  if (grid > 0) q = grid_refinement(ctx, q, grid);
  return q;
}

std::vector<double> parse_eta(const std::string& path, const Context& ctx) {
  const auto j = nlohmann::ordered_json::parse(slurp(path));
  const auto& rows = j.is_object() && j.contains("eta") ? j["eta"] : j;
  if (!rows.is_array() ||
      rows.size() != static_cast<size_t>(ctx.num_signals())) {
    throw InputError("eta needs one row per omega");
  }
  std::vector<double> eta;
  for (const auto& row : rows) {
    if (!row.is_array() ||
        row.size() != static_cast<size_t>(ctx.num_types())) {
      throw InputError("each eta row needs one entry per theta");
    }
    for (const auto& v : row) eta.push_back(v.get<double>());
  }
  return eta;
}

Menu envelope_menu(const Context& ctx, const EnvelopeResult& env) {
  MenuContract buy;
  for (int w : ctx.support()) {
    Posterior corner(ctx.num_signals(), 0.0);
    corner[w] = 1.0;
    buy.support.push_back(std::move(corner));
    buy.weights.push_back(ctx.prior()[w]);
  }
  buy.price = env.price;
  MenuContract decline;
  decline.support.push_back(ctx.prior());
  decline.weights.push_back(1.0);
  Menu menu;
  menu.kind = Menu::Kind::Mappings;
  for (int t = 0; t < ctx.num_types(); ++t) {
    menu.contracts.push_back(surplus(ctx, t) >= env.price - 1e-12 ? buy
                                                                  : decline);
  }
  return menu;
}

struct GlobalFlags {
  std::string format = "text";
  double tolerance = 0.0;  // 0: keep solver defaults
  int grid = 0;
  bool qstar_dump = false;
  bool lp_dump = false;

  ReportFormat report_format() const {
    return format == "json" ? ReportFormat::Json : ReportFormat::Text;
  }
  MechanismOptions mechanism_options() const {
    MechanismOptions opts;
    if (tolerance > 0.0) {
      opts.solver.feasibility_tol = tolerance;
      opts.solver.optimality_tol = std::min(tolerance, 1e-11);
    }
    return opts;
  }
};

int run_solve(const GlobalFlags& flags, const std::string& mechanism,
              const std::string& context_path, double epsilon,
              bool do_reduce) {
  const Context ctx = load_context(context_path);
  const MechanismOptions opts = flags.mechanism_options();
  std::vector<std::string> diagnostics;
  Menu menu;
  double revenue = 0.0;

  if (mechanism == "envelope") {
    const EnvelopeResult env = solve_sealed_envelope(ctx);
    revenue = env.revenue;
    menu = envelope_menu(ctx, env);
    diagnostics.push_back("envelope price " + std::to_string(env.price));
  } else if (mechanism == "full-surplus") {
    const FullSurplusResult fs = full_surplus_contract(ctx, opts);
    revenue = fs.revenue;
    menu = fs.menu;
    if (fs.ill_conditioned) {
      std::ostringstream os;
      os.precision(12);
      os << "ill-conditioned payment system: condition " << fs.condition;
      diagnostics.push_back(os.str());
    }
  } else {
    const PosteriorSet q = posterior_set_for(ctx, flags.grid);
    if (flags.qstar_dump) std::cout << posterior_set_to_json(ctx, q) << "\n";
    if (mechanism == "mappings") {
      MechanismLp mech = build_mappings_lp(ctx, q);
      if (flags.lp_dump) std::cout << format_lp(mech.lp);
      SolveResult res = solve_pricing_mappings(ctx, q, opts);
      revenue = res.revenue;
      menu = std::move(res.menu);
      if (do_reduce) menu = reduce_support(ctx, menu, opts);
    } else if (mechanism == "outcomes" || mechanism == "outcomes-npt") {
      const bool npt = mechanism == "outcomes-npt";
      MechanismLp mech = build_outcomes_lp(ctx, q, npt);
      if (flags.lp_dump) std::cout << format_lp(mech.lp);
      SolveResult res = solve_pricing_outcomes(ctx, q, npt, opts);
      revenue = res.revenue;
      menu = std::move(res.menu);
    } else {
      throw InputError("unknown mechanism: " + mechanism);
    }
  }
  if (epsilon > 0.0) {
    menu = make_strict(ctx, menu, epsilon);
    if (menu.kind == Menu::Kind::Outcomes) {
      menu = recover_transfers(ctx, menu);
    }
    revenue *= 1.0 - epsilon;
    diagnostics.push_back("payments scaled by 1-epsilon");
  }
  std::cout << render_solve_report(ctx, mechanism, revenue, menu, diagnostics,
                                   flags.report_format());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "infomech: revenue-optimal mechanisms for selling information"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_option("--tolerance", flags.tolerance,
                 "Solver feasibility tolerance override");
  app.add_option("--grid", flags.grid,
                 "Refine Q* with a lattice of this resolution");
  app.add_flag("--qstar-dump", flags.qstar_dump,
               "Print the posterior set in use as JSON");
  app.add_flag("--lp-dump", flags.lp_dump,
               "Print the LP in plain-text tableau form");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one mechanism class");
  std::string mechanism, context_path, tree_path, mode = "committed", to;
  double epsilon = 0.0;
  bool do_reduce = false;
  solve_cmd->add_option("--mechanism", mechanism, "Mechanism class")
      ->required()
      ->check(CLI::IsMember(
          {"envelope", "mappings", "outcomes", "outcomes-npt",
           "full-surplus"}));
  solve_cmd->add_option("--context", context_path, "Context JSON file")
      ->required();
  solve_cmd->add_option("--epsilon", epsilon,
                        "Scale payments by 1-epsilon (strict preferences)");
  solve_cmd->add_flag("--reduce-support", do_reduce,
                      "Apply the support-reduction pass (mappings only)");

  // report
  auto* report_cmd =
      app.add_subcommand("report", "All mechanism classes side by side");
  report_cmd->add_option("--context", context_path, "Context JSON file")
      ->required();

  // eval-protocol
  auto* eval_cmd = app.add_subcommand(
      "eval-protocol", "Best responses and revenue of a protocol tree");
  eval_cmd->add_option("--context", context_path, "Context JSON file")
      ->required();
  eval_cmd->add_option("--tree", tree_path, "Protocol JSON file")->required();
  eval_cmd->add_option("--mode", mode, "Buyer commitment")
      ->check(CLI::IsMember({"committed", "uncommitted"}))
      ->capture_default_str();

  // transform
  auto* transform_cmd = app.add_subcommand(
      "transform", "Rewrite a tree as a revelation tree or a menu");
  transform_cmd->add_option("--to", to, "Target form")
      ->required()
      ->check(CLI::IsMember({"revelation", "mappings", "outcomes"}));
  transform_cmd->add_option("--context", context_path, "Context JSON file")
      ->required();
  transform_cmd->add_option("--tree", tree_path, "Protocol JSON file")
      ->required();

  // fixtures
  auto* fixtures_cmd =
      app.add_subcommand("fixtures", "Run the embedded fixture suite");
  std::string filter;
  fixtures_cmd->add_option("--filter", filter, "Glob over fixture names");

  // gap
  auto* gap_cmd = app.add_subcommand(
      "gap", "Revenue table along a perturbation of the joint distribution");
  std::string eta_path;
  std::vector<double> t_values;
  gap_cmd->add_option("--context", context_path, "Context JSON file")
      ->required();
  gap_cmd->add_option("--eta", eta_path, "Perturbation direction JSON file")
      ->required();
  gap_cmd->add_option("--t", t_values, "Perturbation magnitudes")
      ->required()
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      return run_solve(flags, mechanism, context_path, epsilon, do_reduce);
    }
    if (report_cmd->parsed()) {
      const Context ctx = load_context(context_path);
      if (flags.qstar_dump) {
        std::cout << posterior_set_to_json(ctx, interesting_posteriors(ctx))
                  << "\n";
      }
      const RevenueReport rep = revenue_report(ctx, flags.mechanism_options());
      std::cout << render_revenue_report(ctx, rep, flags.report_format());
      return 0;
    }
    if (eval_cmd->parsed()) {
      const Context ctx = load_context(context_path);
      const ProtocolTree tree = parse_protocol_json(slurp(tree_path), ctx);
      const auto br_mode = mode == "committed"
                               ? BuyerStrategy::Mode::Committed
                               : BuyerStrategy::Mode::Uncommitted;
      ProtocolReport rep;
      rep.mode = mode;
      std::vector<BuyerStrategy> strategies;
      for (int t = 0; t < ctx.num_types(); ++t) {
        rep.best_responses.push_back(best_response(ctx, tree, t, br_mode));
        strategies.push_back(rep.best_responses.back().strategy);
      }
      rep.evaluation = evaluate(ctx, tree, strategies);
      std::cout << render_protocol_report(ctx, rep, flags.report_format());
      return 0;
    }
    if (transform_cmd->parsed()) {
      const Context ctx = load_context(context_path);
      const ProtocolTree tree = parse_protocol_json(slurp(tree_path), ctx);
      std::vector<BuyerStrategy> strategies;
      for (int t = 0; t < ctx.num_types(); ++t) {
        strategies.push_back(
            best_response(ctx, tree, t, BuyerStrategy::Mode::Committed)
                .strategy);
      }
      if (to == "revelation") {
        const ProtocolTree out = to_revelation(ctx, tree, strategies);
        std::cout << protocol_to_json(ctx, out) << "\n";
      } else if (to == "mappings") {
        const Menu menu = to_pricing_mappings(ctx, tree, strategies);
        std::cout << menu_to_json(ctx, menu) << "\n";
      } else {
        const Menu menu = to_pricing_outcomes(ctx, tree, strategies);
        std::cout << menu_to_json(ctx, menu) << "\n";
      }
      return 0;
    }
    if (fixtures_cmd->parsed()) {
      const auto results = run_fixtures(filter);
      std::cout << render_fixture_report(results, flags.report_format());
      for (const auto& r : results) {
        if (!r.pass) return 1;
      }
      return 0;
    }
    if (gap_cmd->parsed()) {
      const Context ctx = load_context(context_path);
      const auto eta = parse_eta(eta_path, ctx);
      const GapTable table =
          gap_experiment(ctx, eta, t_values, flags.mechanism_options());
      std::cout << render_gap_table(table, flags.report_format());
      return 0;
    }
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
