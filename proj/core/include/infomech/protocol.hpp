#ifndef INFOMECH_PROTOCOL_HPP
#define INFOMECH_PROTOCOL_HPP

#include <map>
#include <string>
#include <vector>

#include "infomech/context.hpp"
#include "infomech/mechanisms.hpp"

namespace infomech {

// Extensive-form protocol tree. Seller nodes carry one distribution over
// children per omega (the prescription psi); transfer nodes carry an amount
// t (negative = payment to the buyer) and exactly one child; buyer nodes
// carry labeled children.
struct ProtocolNode {
  enum class Kind { Buyer, Seller, Transfer, Leaf };
  Kind kind = Kind::Leaf;
  int id = -1;  // preorder id, assigned when the tree is finalized
  std::vector<ProtocolNode> children;
  std::vector<std::string> labels;       // buyer nodes: one per child
  std::vector<std::vector<double>> psi;  // seller nodes: [omega][child]
  double amount = 0.0;                   // transfer nodes
};

class ProtocolTree {
 public:
  explicit ProtocolTree(ProtocolNode root);
  const ProtocolNode& root() const { return root_; }
  int num_nodes() const { return num_nodes_; }
  const ProtocolNode* node(int id) const;  // nullptr when out of range

  // First node satisfying a predicate in preorder, or nullptr.
  template <typename Pred>
  const ProtocolNode* find(Pred pred) const {
    const ProtocolNode* out = nullptr;
    visit([&](const ProtocolNode& n) {
      if (!out && pred(n)) out = &n;
    });
    return out;
  }
  template <typename Fn>
  void visit(Fn fn) const {
    visit_impl(root_, fn);
  }

 private:
  template <typename Fn>
  static void visit_impl(const ProtocolNode& n, Fn& fn) {
    fn(n);
    for (const auto& c : n.children) visit_impl(c, fn);
  }
  ProtocolNode root_;
  int num_nodes_ = 0;
};

// Structural checks: psi rows are distributions over the children within
// 1e-12, transfer nodes have exactly one child, label/children sizes agree.
void validate_tree(const Context& ctx, const ProtocolTree& tree);

constexpr int kDefect = -1;

struct BuyerStrategy {
  enum class Mode { Committed, Uncommitted };
  Mode mode = Mode::Committed;
  // Chosen child per buyer/transfer node id; kDefect only in uncommitted
  // strategies (transfer entries may be omitted for committed play).
  std::map<int, int> choice;
};

struct BestResponseResult {
  BuyerStrategy strategy;
  double utility = 0.0;
  double expected_transfer = 0.0;
};

// Exact optimal pure strategy for one type by depth-first recursion over
// unnormalized beliefs b(omega) = mu(omega|theta) * likelihood(omega).
// Ties at indifference break toward higher seller revenue, then the lowest
// child index; DEFECT is considered last.
BestResponseResult best_response(const Context& ctx, const ProtocolTree& tree,
                                 int theta, BuyerStrategy::Mode mode);

struct StopInfo {
  int node = -1;                  // stop node: a leaf, or where play defected
  std::vector<double> likelihood; // P(reach | omega) per omega
  double transfers = 0.0;         // tau: path sum above the stop node
};

struct TypeOutcome {
  double utility = 0.0;
  double expected_transfer = 0.0;
  std::vector<StopInfo> stops;
};

struct EvaluationResult {
  std::vector<TypeOutcome> per_type;
  double revenue = 0.0;  // sum_theta mu(theta) E[tau | theta]
};

// Exact evaluation of given per-type strategies. Throws MissingDecision if a
// reachable decision node is uncovered.
EvaluationResult evaluate(const Context& ctx, const ProtocolTree& tree,
                          const std::vector<BuyerStrategy>& strategies);

// P(reach node | omega) per node id for one type's strategy.
std::vector<std::vector<double>> reach_likelihoods(
    const Context& ctx, const ProtocolTree& tree, int theta,
    const BuyerStrategy& strategy);

// Exhaustive maximum utility over all pure strategies; independent oracle
// for best_response. Guarded at 12 decision nodes.
double enumerate_strategies_oracle(const Context& ctx,
                                   const ProtocolTree& tree, int theta,
                                   BuyerStrategy::Mode mode,
                                   int max_decisions = 12);

// Revelation transform: a new root buyer node with one branch per type, each
// a copy of the tree with buyer moves hard-wired to that type's strategy.
ProtocolTree to_revelation(const Context& ctx, const ProtocolTree& tree,
                           const std::vector<BuyerStrategy>& strategies);

// Collapses a tree plus committed strategies into a mappings menu: per type,
// one up-front expected payment and the leaf-lottery signal. Only valid for
// independent mu.
Menu to_pricing_mappings(const Context& ctx, const ProtocolTree& tree,
                         const std::vector<BuyerStrategy>& strategies);

// Same collapse with per-leaf payments; works for any mu.
Menu to_pricing_outcomes(const Context& ctx, const ProtocolTree& tree,
                         const std::vector<BuyerStrategy>& strategies);

// Emits the one-round tree of a menu: mappings branches are
// transfer -> seller -> leaves, outcomes branches seller -> transfer -> leaf.
// Identical contracts share a branch and a decline leaf is always present;
// contracts that carry no information at zero price collapse to a bare leaf.
ProtocolTree menu_to_protocol(const Context& ctx, const Menu& menu);

// Deposit wrapper: charge `deposit` up front and rebate it at every leaf,
// which makes uncommitted best responses coincide with committed ones
// whenever the deposit covers every positive payment still ahead.
ProtocolTree wrap_with_deposit(const ProtocolTree& tree, double deposit);
double suggest_deposit(const ProtocolTree& tree);

}  // namespace infomech

#endif  // INFOMECH_PROTOCOL_HPP
