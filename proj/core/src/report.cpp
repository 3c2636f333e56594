#include "infomech/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "infomech/json_io.hpp"

namespace infomech {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ordered_json menu_json(const Context& ctx, const Menu& menu) {
  return ordered_json::parse(menu_to_json(ctx, menu));
}

ordered_json payments_json(const Context& ctx, const Menu& menu) {
  ordered_json j = ordered_json::object();
  for (int t = 0; t < ctx.num_types(); ++t) {
    const double buyer =
        contract_payment(ctx, t, menu.contracts[t], menu.kind);
    ordered_json entry;
    entry["buyer_frame"] = buyer;
    entry["observer_frame"] = ctx.type_mass(t) * buyer;
    j[ctx.theta_labels()[t]] = std::move(entry);
  }
  return j;
}

}  // namespace

std::string render_solve_report(const Context& ctx,
                                const std::string& mechanism, double revenue,
                                const Menu& menu,
                                const std::vector<std::string>& diagnostics,
                                ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["mechanism"] = mechanism;
    j["revenue"] = revenue;
    j["menu"] = menu_json(ctx, menu);
    j["expected_payments"] = payments_json(ctx, menu);
    j["diagnostics"] = diagnostics;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "mechanism: " << mechanism << "\n";
  os << "revenue: " << num(revenue) << "\n";
  for (int t = 0; t < ctx.num_types(); ++t) {
    const double buyer =
        contract_payment(ctx, t, menu.contracts[t], menu.kind);
    os << "  E[t | " << ctx.theta_labels()[t] << "] = " << num(buyer)
       << " (observer frame " << num(ctx.type_mass(t) * buyer) << ")\n";
  }
  for (const auto& d : diagnostics) os << "  note: " << d << "\n";
  return os.str();
}

std::string render_revenue_report(const Context& ctx, const RevenueReport& rep,
                                  ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["Re"] = rep.envelope;
    j["Rc"] = rep.mappings;
    j["Rp"] = rep.outcomes_npt;
    j["R"] = rep.outcomes;
    j["fullSurplus"] = rep.full_surplus_value;
    j["envelopePrice"] = rep.envelope_price;
    j["menus"]["mappings"] = menu_json(ctx, rep.mappings_menu);
    j["menus"]["outcomes_npt"] = menu_json(ctx, rep.outcomes_npt_menu);
    j["menus"]["outcomes"] = menu_json(ctx, rep.outcomes_menu);
    j["expected_payments"]["mappings"] = payments_json(ctx, rep.mappings_menu);
    j["expected_payments"]["outcomes_npt"] =
        payments_json(ctx, rep.outcomes_npt_menu);
    j["expected_payments"]["outcomes"] = payments_json(ctx, rep.outcomes_menu);
    j["diagnostics"] = rep.diagnostics;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "Re=" << num(rep.envelope) << " Rc=" << num(rep.mappings)
     << " Rp=" << num(rep.outcomes_npt) << " R=" << num(rep.outcomes)
     << " fullSurplus=" << num(rep.full_surplus_value) << "\n";
  os << "envelope price: " << num(rep.envelope_price) << "\n";
  for (const auto& d : rep.diagnostics) os << "  note: " << d << "\n";
  return os.str();
}

std::string render_protocol_report(const Context& ctx,
                                   const ProtocolReport& rep,
                                   ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["mode"] = rep.mode;
    ordered_json types = ordered_json::array();
    for (int t = 0; t < ctx.num_types(); ++t) {
      ordered_json e;
      e["type"] = ctx.theta_labels()[t];
      e["utility"] = rep.best_responses[t].utility;
      e["expected_transfer"] = rep.best_responses[t].expected_transfer;
      ordered_json choice = ordered_json::object();
      for (const auto& [node, pick] : rep.best_responses[t].strategy.choice) {
        choice[std::to_string(node)] =
            pick == kDefect ? ordered_json("defect") : ordered_json(pick);
      }
      e["choices"] = std::move(choice);
      ordered_json stops = ordered_json::array();
      for (const auto& s : rep.evaluation.per_type[t].stops) {
        ordered_json stop;
        stop["node"] = s.node;
        stop["likelihood"] = s.likelihood;
        stop["transfers"] = s.transfers;
        stops.push_back(std::move(stop));
      }
      e["stops"] = std::move(stops);
      types.push_back(std::move(e));
    }
    j["types"] = std::move(types);
    j["revenue"] = rep.evaluation.revenue;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "mode: " << rep.mode << "\n";
  for (int t = 0; t < ctx.num_types(); ++t) {
    os << "  " << ctx.theta_labels()[t]
       << ": utility=" << num(rep.best_responses[t].utility)
       << " E[transfer]=" << num(rep.best_responses[t].expected_transfer)
       << "\n";
  }
  os << "revenue: " << num(rep.evaluation.revenue) << "\n";
  return os.str();
}

std::string render_fixture_report(const std::vector<FixtureResult>& results,
                                  ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j = ordered_json::array();
    for (const auto& r : results) {
      ordered_json e;
      e["fixture"] = r.name;
      e["pass"] = r.pass;
      if (!r.error.empty()) e["error"] = r.error;
      ordered_json checks = ordered_json::array();
      for (const auto& c : r.checks) {
        ordered_json cc;
        cc["name"] = c.name;
        cc["kind"] = c.kind == FixtureCheck::Kind::Equal ? "eq" : "ge";
        cc["expected"] = c.expected;
        cc["actual"] = c.actual;
        cc["tolerance"] = c.tolerance;
        cc["delta"] = c.actual - c.expected;
        cc["provenance"] = c.provenance;
        cc["pass"] = c.pass;
        checks.push_back(std::move(cc));
      }
      e["checks"] = std::move(checks);
      j.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << " " << r.name;
    if (!r.error.empty()) os << " (error: " << r.error << ")";
    os << "\n";
    for (const auto& c : r.checks) {
      os << "  " << (c.pass ? "ok  " : "FAIL") << " " << c.name << ": "
         << (c.kind == FixtureCheck::Kind::Equal ? "expected " : "at least ")
         << num(c.expected) << ", got " << num(c.actual) << " (tol "
         << num(c.tolerance) << ", " << c.provenance << ")\n";
    }
  }
  return os.str();
}

std::string render_gap_table(const GapTable& table, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j = ordered_json::array();
    for (const auto& row : table.rows) {
      ordered_json e;
      e["t"] = row.t;
      e["R"] = row.outcomes;
      e["Rc"] = row.mappings;
      e["Rp"] = row.outcomes_npt;
      e["Re"] = row.envelope;
      e["fullSurplus"] = row.full_surplus_value;
      j.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "t R Rc Rp Re fullSurplus\n";
  for (const auto& row : table.rows) {
    os << num(row.t) << " " << num(row.outcomes) << " " << num(row.mappings)
       << " " << num(row.outcomes_npt) << " " << num(row.envelope) << " "
       << num(row.full_surplus_value) << "\n";
  }
  return os.str();
}

}  // namespace infomech
