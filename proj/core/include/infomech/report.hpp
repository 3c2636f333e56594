#ifndef INFOMECH_REPORT_HPP
#define INFOMECH_REPORT_HPP

#include <string>
#include <vector>

#include "infomech/context.hpp"
#include "infomech/fixtures.hpp"
#include "infomech/mechanisms.hpp"
#include "infomech/protocol.hpp"

namespace infomech {

enum class ReportFormat { Json, Text };

// All renderers are deterministic: identical inputs give byte-identical
// output. Text mode prints numbers at 12 significant digits.

std::string render_solve_report(const Context& ctx, const std::string& mechanism,
                                double revenue, const Menu& menu,
                                const std::vector<std::string>& diagnostics,
                                ReportFormat format);

std::string render_revenue_report(const Context& ctx, const RevenueReport& rep,
                                  ReportFormat format);

struct ProtocolReport {
  std::string mode;
  std::vector<BestResponseResult> best_responses;
  EvaluationResult evaluation;
};

std::string render_protocol_report(const Context& ctx,
                                   const ProtocolReport& rep,
                                   ReportFormat format);

std::string render_fixture_report(const std::vector<FixtureResult>& results,
                                  ReportFormat format);

std::string render_gap_table(const GapTable& table, ReportFormat format);

}  // namespace infomech

#endif  // INFOMECH_REPORT_HPP
