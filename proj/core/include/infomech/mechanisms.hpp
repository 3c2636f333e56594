#ifndef INFOMECH_MECHANISMS_HPP
#define INFOMECH_MECHANISMS_HPP

#include <optional>
#include <string>
#include <vector>

#include "infomech/context.hpp"
#include "infomech/geometry.hpp"
#include "infomech/lp.hpp"

namespace infomech {

// A menu of contracts, one per type, in the outside-observer frame.
//
// Mappings contracts charge the scalar `price` up front. Outcomes contracts
// charge per realized signal; the LP works with scaled prices
// tt(q) = x(q) * t(q), which stay meaningful even where x(q) = 0, so both
// are stored. signal_prices entries are NaN where x(q) = 0 with tt(q) != 0
// until recover_transfers has run.
struct MenuContract {
  std::vector<Posterior> support;
  std::vector<double> weights;        // x_theta(q)
  double price = 0.0;                 // mappings only
  std::vector<double> signal_prices;  // outcomes: t_theta(q)
  std::vector<double> scaled_prices;  // outcomes: tt_theta(q)
};

struct Menu {
  enum class Kind { Mappings, Outcomes };
  Kind kind = Menu::Kind::Mappings;
  std::vector<MenuContract> contracts;  // indexed by type
};

bool contracts_identical(const MenuContract& a, const MenuContract& b,
                         double tol = 1e-9);

// Expected revenue of a (not necessarily valid) menu.
double menu_revenue(const Context& ctx, const Menu& menu);

// Buyer-frame gross value of contract `c` for a buyer of type `theta`.
double contract_value(const Context& ctx, int theta, const MenuContract& c);
// Buyer-frame expected payment of contract `c` for type `theta`.
double contract_payment(const Context& ctx, int theta, const MenuContract& c,
                        Menu::Kind kind);

struct MechanismOptions {
  SolverOptions solver;
  // Solve the buyer-frame mappings LP alongside the observer-frame one
  // when mu factorizes, and require agreement.
  bool cross_check_independent = true;
  double support_tol = 1e-12;
  // Payment vectors this many times larger than the surplus scale, or a
  // system condition number beyond it, trigger the ill-conditioning warning.
  double condition_warning = 1e3;
};

struct EnvelopeResult {
  double price = 0.0;
  double revenue = 0.0;  // R_e
};

// Best fixed price for the value of omega sealed in an envelope. The
// objective is a step function of the price, so only surplus values matter.
EnvelopeResult solve_sealed_envelope(const Context& ctx);

// LP carriers. x_index[theta][qi] / t_index[theta] / tt_index[theta][qi]
// give variable positions inside `lp`.
struct MechanismLp {
  LinearProgram lp;
  std::vector<Posterior> posteriors;
  std::vector<std::vector<int>> x_index;
  std::vector<int> t_index;
  std::vector<std::vector<int>> tt_index;
  Menu::Kind kind = Menu::Kind::Mappings;
};

// Observer-frame pricing-mappings program (the correlated variant: price
// terms mu(theta) * t_theta'). For independent mu it coincides with LP1.
MechanismLp build_mappings_lp(const Context& ctx, const PosteriorSet& Q);
// The same program written over raw (buyer-frame) value functions with
// unit price weights; only valid as the revenue program when mu is
// independent. Kept for cross-checks and duality tests.
MechanismLp build_independent_mappings_lp(const Context& ctx,
                                          const PosteriorSet& Q);
// LP2: pricing outcomes with scaled prices; optionally constrained tt >= 0.
MechanismLp build_outcomes_lp(const Context& ctx, const PosteriorSet& Q,
                              bool nonnegative_transfers);

Menu menu_from_solution(const Context& ctx, const MechanismLp& mech,
                        const LpSolution& sol, double support_tol = 1e-12);

struct SolveResult {
  Menu menu;
  double revenue = 0.0;
  LpSolution solution;
};

// Optimal pricing-mappings menu over posteriors Q (R_c when Q = Q*).
// Q must contain the prior and the support corners.
SolveResult solve_pricing_mappings(const Context& ctx, const PosteriorSet& Q,
                                   const MechanismOptions& opts = {});

// Optimal pricing-outcomes menu over Q; with nonnegative_transfers this is
// R_p, without it R (committed-buyer optimum).
SolveResult solve_pricing_outcomes(const Context& ctx, const PosteriorSet& Q,
                                   bool nonnegative_transfers,
                                   const MechanismOptions& opts = {});

struct FullSurplusResult {
  std::vector<double> payments;  // t(omega)
  double revenue = 0.0;          // = full surplus
  double condition = 0.0;        // condition estimate of the solved system
  bool ill_conditioned = false;
  Menu menu;  // the single full-information contract offered to every type
};

// Cremer-McLean style contract: reveal omega, charge t(omega) with
// sum_omega t(omega) mu(omega,theta) = mu(theta) zeta(theta). Requires
// rank(mu) = |Theta| (numeric rank, threshold 1e-10 * max|mu|).
FullSurplusResult full_surplus_contract(const Context& ctx,
                                        const MechanismOptions& opts = {});

struct ConstraintReport {
  std::string name;
  double margin = 0.0;  // buyer-frame slack; for F rows the L-inf residual
  bool binding = false;
  bool violated = false;
};

struct MenuReport {
  std::vector<ConstraintReport> constraints;
  std::vector<double> values;             // buyer-frame gross values
  std::vector<double> buyer_payments;     // E[t | theta]
  std::vector<double> observer_payments;  // mu(theta) E[t | theta]
  std::vector<double> utilities;
  double revenue = 0.0;
  double worst_margin = 0.0;
  bool valid = false;
};

// Checks F, IR and IC with margin >= slack - 1e-9 and reports every
// binding or violated constraint. Purely diagnostic.
MenuReport verify_menu(const Context& ctx, const Menu& menu,
                       double slack = 0.0);

// Support reduction for valid mappings menus: rebuilds each contract as a
// vertex of a per-type subproblem in decreasing price order. Same revenue,
// per-type support at most m+n-1, total at most mn + n(n-1)/2.
Menu reduce_support(const Context& ctx, const Menu& menu,
                    const MechanismOptions& opts = {});

// Scales all payments by (1-epsilon) after merging tied duplicate-payment
// contracts, making every IR and IC constraint strictly slack except between
// identical contracts.
Menu make_strict(const Context& ctx, const Menu& menu, double epsilon);

// Makes every support weight strictly positive by blending each contract
// with a prior decomposition (weight delta, halved as needed), then fills in
// the explicit prices t = tt / x. Requires slack constraints.
Menu recover_transfers(const Context& ctx, const Menu& menu,
                       double delta = 1e-4);

struct RevenueReport {
  double envelope = 0.0;        // R_e
  double mappings = 0.0;        // R_c
  double outcomes_npt = 0.0;    // R_p
  double outcomes = 0.0;        // R
  double full_surplus_value = 0.0;
  double envelope_price = 0.0;
  Menu mappings_menu, outcomes_npt_menu, outcomes_menu;
  std::vector<std::string> diagnostics;
};

// Runs all four solvers over Q* and checks the ordering chain
// R_e <= R_c <= R_p <= R <= full surplus along with the 1/n bounds.
RevenueReport revenue_report(const Context& ctx,
                             const MechanismOptions& opts = {});

}  // namespace infomech

#endif  // INFOMECH_MECHANISMS_HPP
