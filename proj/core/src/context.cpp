#include "infomech/context.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace infomech {

namespace {
constexpr double kLoadTol = 1e-12;
}

Context::Context(std::vector<std::string> theta_labels,
                 std::vector<std::string> omega_labels,
                 std::vector<std::string> action_labels,
                 std::vector<double> mu_joint, std::vector<double> payoffs)
    : theta_labels_(std::move(theta_labels)),
      omega_labels_(std::move(omega_labels)),
      action_labels_(std::move(action_labels)),
      mu_(std::move(mu_joint)),
      u_(std::move(payoffs)) {
  const size_t n = theta_labels_.size();
  const size_t m = omega_labels_.size();
  const size_t a = action_labels_.size();
  if (n == 0 || m == 0 || a == 0) {
    throw InputError("context needs at least one type, signal and action");
  }
  if (mu_.size() != m * n) {
    throw InputError("mu has wrong shape: expected " + std::to_string(m * n) +
                     " entries, got " + std::to_string(mu_.size()));
  }
  if (u_.size() != n * m * a) {
    throw InputError("u has wrong shape: expected " +
                     std::to_string(n * m * a) + " entries, got " +
                     std::to_string(u_.size()));
  }

  type_mass_.assign(n, 0.0);
  prior_.assign(m, 0.0);
  for (size_t w = 0; w < m; ++w) {
    for (size_t t = 0; t < n; ++t) {
      const double v = mu_[w * n + t];
      type_mass_[t] += v;
      prior_[w] += v;
    }
  }
  interim_.resize(n);
  for (size_t t = 0; t < n; ++t) {
    interim_[t].assign(m, 0.0);
    if (type_mass_[t] > 0.0) {
      for (size_t w = 0; w < m; ++w) {
        interim_[t][w] = mu_[w * n + t] / type_mass_[t];
      }
    }
  }
  for (size_t w = 0; w < m; ++w) {
    if (prior_[w] > 0.0) support_.push_back(static_cast<int>(w));
  }
}

BeliefTransform Context::belief_transform(int theta) const {
  BeliefTransform bt;
  bt.theta = theta;
  bt.diag.assign(omega_labels_.size(), 0.0);
  for (size_t w = 0; w < omega_labels_.size(); ++w) {
    if (prior_[w] > 0.0) {
      bt.diag[w] = mu(static_cast<int>(w), theta) / prior_[w];
    }
  }
  return bt;
}

bool Context::is_independent(double tol) const {
  for (int w = 0; w < num_signals(); ++w) {
    for (int t = 0; t < num_types(); ++t) {
      if (std::abs(mu(w, t) - prior_[w] * type_mass_[t]) > tol) return false;
    }
  }
  return true;
}

std::vector<Violation> validate_context(const Context& ctx) {
  std::vector<Violation> out;
  double total = 0.0;
  for (int w = 0; w < ctx.num_signals(); ++w) {
    for (int t = 0; t < ctx.num_types(); ++t) {
      const double v = ctx.mu(w, t);
      total += v;
      if (v < 0.0) {
        out.push_back({"negative mass", w,
                       "mu(" + ctx.omega_labels()[w] + "," +
                           ctx.theta_labels()[t] + ") = " + std::to_string(v)});
      }
    }
  }
  if (std::abs(total - 1.0) > kLoadTol) {
    std::ostringstream os;
    os << "sum of mu = " << total;
    out.push_back({"mass != 1", -1, os.str()});
  }
  for (int t = 0; t < ctx.num_types(); ++t) {
    if (ctx.type_mass(t) <= 0.0) {
      out.push_back({"zero-mass type", t, ctx.theta_labels()[t]});
    }
  }
  return out;
}

std::vector<int> zero_mass_signals(const Context& ctx) {
  std::vector<int> out;
  for (int w = 0; w < ctx.num_signals(); ++w) {
    if (ctx.prior()[w] <= 0.0) out.push_back(w);
  }
  return out;
}

ValueResult value_function(const Context& ctx, int theta,
                           std::span<const double> q, Frame frame) {
  const int m = ctx.num_signals();
  const int na = ctx.num_actions();
  std::vector<double> b(q.begin(), q.end());
  if (static_cast<int>(b.size()) != m) {
    throw InputError("posterior has wrong length");
  }
  if (frame == Frame::Observer) {
    const BeliefTransform bt = ctx.belief_transform(theta);
    for (int w = 0; w < m; ++w) b[w] *= bt.diag[w];
  }
  ValueResult res;
  res.value = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(na);
  for (int a = 0; a < na; ++a) {
    double v = 0.0;
    for (int w = 0; w < m; ++w) v += b[w] * ctx.payoff(theta, w, a);
    vals[a] = v;
    res.value = std::max(res.value, v);
  }
  const double tie = 1e-9 * (1.0 + std::abs(res.value));
  for (int a = 0; a < na; ++a) {
    if (vals[a] >= res.value - tie) res.best_actions.push_back(a);
  }
  return res;
}

double surplus(const Context& ctx, int theta) {
  const std::vector<double>& belief = ctx.interim_belief(theta);
  double informed = 0.0;
  for (int w = 0; w < ctx.num_signals(); ++w) {
    if (belief[w] == 0.0) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < ctx.num_actions(); ++a) {
      best = std::max(best, ctx.payoff(theta, w, a));
    }
    informed += belief[w] * best;
  }
  const double uninformed = value_function(ctx, theta, belief).value;
  return informed - uninformed;
}

double full_surplus(const Context& ctx) {
  double total = 0.0;
  for (int t = 0; t < ctx.num_types(); ++t) {
    total += ctx.type_mass(t) * surplus(ctx, t);
  }
  return total;
}

TypePosterior posterior_for_type(const Context& ctx, int theta,
                                 std::span<const double> q) {
  const int m = ctx.num_signals();
  if (static_cast<int>(q.size()) != m) {
    throw InputError("posterior has wrong length");
  }
  const BeliefTransform bt = ctx.belief_transform(theta);
  TypePosterior out;
  out.q.assign(m, 0.0);
  for (int w = 0; w < m; ++w) {
    out.q[w] = bt.diag[w] * q[w];
    out.mass += out.q[w];
  }
  if (out.mass <= 0.0) {
    throw ZeroMass("signal impossible for type " + ctx.theta_labels()[theta]);
  }
  for (double& v : out.q) v /= out.mass;
  return out;
}

}  // namespace infomech
