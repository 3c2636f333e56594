#ifndef INFOMECH_FIXTURES_HPP
#define INFOMECH_FIXTURES_HPP

#include <string>
#include <vector>

#include "infomech/context.hpp"
#include "infomech/mechanisms.hpp"
#include "infomech/protocol.hpp"

namespace infomech {

// Reference contexts, embedded so the acceptance run needs no external data.

// Locked-box context: u(theta,omega,a) = z_theta * 1{omega = a} over two
// signals and two actions, with the given joint distribution (rows omega).
Context make_key_box_context(const std::vector<double>& z,
                             const std::vector<std::vector<double>>& mu_rows);

Context make_example_42();            // mu = [[.2,.3],[.3,.2]], z = (3,5)
Context make_example_43();            // uniform mu, same payoffs
Context make_example_43_perturbed();  // mu = [[.25001,.24999],[.24999,.25001]]

// Two-action context with v(q) = max(q, 1-9q) and mu = [[.3,.2],[.2,.3]].
Context make_example_52();
// The four-level protocol for it: left = pay 0.533 then full revelation,
// right = partial disclosure, then pay 0.8 for full revelation.
ProtocolTree make_example_52_tree(const Context& ctx);
// The strategies it is evaluated under: left for type 0, right-and-pay for
// type 1.
std::vector<BuyerStrategy> example_52_strategies(const ProtocolTree& tree);

// Builds a context over two signals from per-type piecewise-linear value
// functions given as breakpoint lists (q, value) with q ascending; every
// segment becomes an action.
Context make_context_from_value_breakpoints(
    const std::vector<std::vector<std::pair<double, double>>>& breakpoints,
    const std::vector<std::vector<double>>& mu_rows);

// Triangular-support screening context: v_theta interpolates
// (0,0), (1-delta*theta,0) and (1-delta(theta-k), delta^(2theta-1-k)) for
// k = 1..theta; mu(omega) uniform, mu(theta) proportional to eps^theta.
Context make_quadratic_support_context(int n, double delta, double eps);

// Envelope-vs-menu gap: v_theta through (0,0), (1-T^-theta,0), (1,2^theta),
// mu independent with mu(theta) ~ 2^-theta.
Context make_envelope_gap_context(int n, double T);

// Side-channel context: omega = (payoff bit, type report); the report equals
// theta with probability 1-noise and spreads uniformly otherwise. noise = 0
// is the exact side channel. With an exact channel, pricing mappings already
// extracts the full surplus by revealing the payoff bit only when the report
// matches the buyer's claim, so no outcomes-vs-mappings gap survives here.
Context make_side_channel_context(int n, double noise);

// Three-type, four-signal context separating the outcome-priced classes from
// pricing mappings at desk scale: R_e = R_c = 1/128 while
// R_p = R = full surplus = 5/256, a factor 2.5. All entries are exact
// binary rationals (mu in 128ths, payoffs in quarters).
Context make_outcomes_gap_context();

// Independent near-rank-deficient family: Omega = Theta = A = [n],
// u = 2^theta 1{a = omega}, uniform prior, mu(theta) ~ 2^-theta.
Context make_iid_gap_context(int n);
// A full-rank zero-total-mass perturbation direction for it (m*n, row-major
// over (omega, theta)).
std::vector<double> make_iid_gap_eta(int n);

// mu' = mu + t * eta; throws InvalidPerturbation when mu' leaves the simplex.
Context perturb_context(const Context& base, const std::vector<double>& eta,
                        double t);

struct GapRow {
  double t = 0.0;
  double outcomes = 0.0;      // R
  double mappings = 0.0;      // R_c
  double outcomes_npt = 0.0;  // R_p
  double envelope = 0.0;      // R_e
  double full_surplus_value = 0.0;
};

struct GapTable {
  std::vector<GapRow> rows;  // sorted by t, always includes t = 0
};

GapTable gap_experiment(const Context& base, const std::vector<double>& eta,
                        std::vector<double> t_values,
                        const MechanismOptions& opts = {});

// Embedded fixture suite.

struct FixtureCheck {
  enum class Kind { Equal, AtLeast };
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  Kind kind = Kind::Equal;
  std::string provenance;  // paper | derived | trivial
  bool pass = false;
};

struct FixtureResult {
  std::string name;
  std::vector<FixtureCheck> checks;
  bool pass = false;
  std::string error;  // nonempty when the fixture itself threw
};

const std::vector<std::string>& fixture_names();
Context fixture_context(const std::string& name);

// Runs every fixture whose name matches the glob ('*' and '?'); empty
// matches all.
std::vector<FixtureResult> run_fixtures(const std::string& filter = "");

bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace infomech

#endif  // INFOMECH_FIXTURES_HPP
