#ifndef INFOMECH_CONTEXT_HPP
#define INFOMECH_CONTEXT_HPP

#include <span>
#include <string>
#include <vector>

#include "infomech/errors.hpp"

namespace infomech {

// A point (or unnormalized nonnegative vector) over the signal space Omega.
using Posterior = std::vector<double>;

// Diagonal reference-frame transform for one type: diag(omega) = mu(theta|omega).
// Maps outside-observer posteriors to unnormalized buyer-frame posteriors.
struct BeliefTransform {
  int theta = 0;
  std::vector<double> diag;
};

// The pair (u, mu) plus its label sets. Immutable after construction; every
// operation in the library takes a Context by const reference and is pure.
//
// mu is stored row-major with rows indexed by omega and columns by theta.
// u is stored as u[theta][omega][action], flattened.
class Context {
 public:
  Context(std::vector<std::string> theta_labels,
          std::vector<std::string> omega_labels,
          std::vector<std::string> action_labels,
          std::vector<double> mu_joint,   // m*n, row-major over (omega, theta)
          std::vector<double> payoffs);   // n*m*|A|, over (theta, omega, action)

  int num_types() const { return static_cast<int>(theta_labels_.size()); }
  int num_signals() const { return static_cast<int>(omega_labels_.size()); }
  int num_actions() const { return static_cast<int>(action_labels_.size()); }

  const std::vector<std::string>& theta_labels() const { return theta_labels_; }
  const std::vector<std::string>& omega_labels() const { return omega_labels_; }
  const std::vector<std::string>& action_labels() const { return action_labels_; }

  double mu(int omega, int theta) const {
    return mu_[static_cast<size_t>(omega) * theta_labels_.size() + theta];
  }
  double payoff(int theta, int omega, int action) const {
    return u_[(static_cast<size_t>(theta) * omega_labels_.size() + omega) *
                  action_labels_.size() +
              action];
  }

  // Marginals. type_mass = mu(theta), prior = mu(omega) = p.
  double type_mass(int theta) const { return type_mass_[theta]; }
  const std::vector<double>& prior() const { return prior_; }

  // mu(omega | theta) as a length-m vector (the type's interim belief).
  const std::vector<double>& interim_belief(int theta) const {
    return interim_[theta];
  }

  // mu(theta | omega); zero on zero-mass signals.
  BeliefTransform belief_transform(int theta) const;

  // True when mu factorizes as p(omega) * mu(theta) entrywise within tol.
  bool is_independent(double tol = 1e-12) const;

  // Signals with prior mass zero are permitted but flagged; Q* construction
  // and the ray decomposition restrict themselves to this support.
  const std::vector<int>& support() const { return support_; }

  const std::vector<double>& mu_flat() const { return mu_; }
  const std::vector<double>& payoff_flat() const { return u_; }

 private:
  std::vector<std::string> theta_labels_, omega_labels_, action_labels_;
  std::vector<double> mu_;
  std::vector<double> u_;
  std::vector<double> type_mass_;
  std::vector<double> prior_;
  std::vector<std::vector<double>> interim_;
  std::vector<int> support_;
};

struct Violation {
  std::string invariant;  // e.g. "mass != 1", "zero-mass type"
  int index = -1;         // offending theta/omega index, -1 when global
  std::string detail;
};

// Diagnostic check of every Context invariant; empty result means valid.
// Loaders reject contexts with a non-empty report.
std::vector<Violation> validate_context(const Context& ctx);

// Zero-mass signals are legal but worth surfacing; returns their indices.
std::vector<int> zero_mass_signals(const Context& ctx);

enum class Frame { Buyer, Observer };

struct ValueResult {
  double value = 0.0;
  std::vector<int> best_actions;  // all ties kept, ascending action index
};

// v_theta(q) = max_a sum_omega q(omega) u(theta, omega, a). Homogeneous of
// degree one, so q need not be normalized. Frame::Observer evaluates
// v_theta(D_theta q) instead, translating an outside-observer posterior.
ValueResult value_function(const Context& ctx, int theta,
                           std::span<const double> q,
                           Frame frame = Frame::Buyer);

// zeta(theta) = E[max_a u | theta] - max_a E[u | theta] >= 0.
double surplus(const Context& ctx, int theta);

// sum_theta mu(theta) zeta(theta).
double full_surplus(const Context& ctx);

struct TypePosterior {
  Posterior q;        // normalized buyer-frame posterior
  double mass = 0.0;  // 1^t D_theta q
};

// Bayesian update (BU): buyer-frame posterior D_theta q / (1^t D_theta q)
// plus the scalar mass. Throws ZeroMass when the signal is impossible for
// this type.
TypePosterior posterior_for_type(const Context& ctx, int theta,
                                 std::span<const double> q);

}  // namespace infomech

#endif  // INFOMECH_CONTEXT_HPP
