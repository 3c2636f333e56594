#include "infomech/json_io.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace infomech {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> string_list(const ordered_json& j,
                                     const std::string& key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw InputError("context JSON needs an array field '" + key + "'");
  }
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else {
      out.push_back(v.dump());
    }
  }
  return out;
}

}  // namespace

Context parse_context_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("bad context JSON: ") + e.what());
  }
  const auto theta = string_list(j, "theta");
  const auto omega = string_list(j, "omega");
  const auto actions = string_list(j, "actions");
  const size_t n = theta.size(), m = omega.size(), na = actions.size();

  if (!j.contains("mu") || !j["mu"].is_array() || j["mu"].size() != m) {
    throw InputError("mu must be an array with one row per omega");
  }
  std::vector<double> mu;
  for (const auto& row : j["mu"]) {
    if (!row.is_array() || row.size() != n) {
      throw InputError("each mu row needs one entry per theta");
    }
    for (const auto& v : row) mu.push_back(v.get<double>());
  }
  if (!j.contains("u") || !j["u"].is_array() || j["u"].size() != n) {
    throw InputError("u must be an array with one block per theta");
  }
  std::vector<double> payoff;
  for (const auto& block : j["u"]) {
    if (!block.is_array() || block.size() != m) {
      throw InputError("each u block needs one row per omega");
    }
    for (const auto& row : block) {
      if (!row.is_array() || row.size() != na) {
        throw InputError("each u row needs one entry per action");
      }
      for (const auto& v : row) payoff.push_back(v.get<double>());
    }
  }
  Context ctx(theta, omega, actions, std::move(mu), std::move(payoff));
  const auto violations = validate_context(ctx);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "invalid context:";
    for (const auto& v : violations) {
      os << " [" << v.invariant;
      if (v.index >= 0) os << " @" << v.index;
      if (!v.detail.empty()) os << ": " << v.detail;
      os << "]";
    }
    throw InputError(os.str());
  }
  return ctx;
}

std::string context_to_json(const Context& ctx) {
  ordered_json j;
  j["theta"] = ctx.theta_labels();
  j["omega"] = ctx.omega_labels();
  j["actions"] = ctx.action_labels();
  ordered_json mu = ordered_json::array();
  for (int w = 0; w < ctx.num_signals(); ++w) {
    ordered_json row = ordered_json::array();
    for (int t = 0; t < ctx.num_types(); ++t) row.push_back(ctx.mu(w, t));
    mu.push_back(std::move(row));
  }
  j["mu"] = std::move(mu);
  ordered_json u = ordered_json::array();
  for (int t = 0; t < ctx.num_types(); ++t) {
    ordered_json block = ordered_json::array();
    for (int w = 0; w < ctx.num_signals(); ++w) {
      ordered_json row = ordered_json::array();
      for (int a = 0; a < ctx.num_actions(); ++a) {
        row.push_back(ctx.payoff(t, w, a));
      }
      block.push_back(std::move(row));
    }
    u.push_back(std::move(block));
  }
  j["u"] = std::move(u);
  return j.dump(2);
}

namespace {

ProtocolNode parse_node(const ordered_json& j, const Context& ctx) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("protocol node needs a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  ProtocolNode n;
  if (kind == "leaf") {
    n.kind = ProtocolNode::Kind::Leaf;
  } else if (kind == "transfer") {
    n.kind = ProtocolNode::Kind::Transfer;
    if (!j.contains("amount")) {
      throw InputError("transfer node needs an 'amount'");
    }
    n.amount = j["amount"].get<double>();
    if (!j.contains("child")) throw InputError("transfer node needs 'child'");
    n.children.push_back(parse_node(j["child"], ctx));
  } else if (kind == "buyer") {
    n.kind = ProtocolNode::Kind::Buyer;
    if (!j.contains("children") || !j["children"].is_object()) {
      throw InputError("buyer node needs labeled 'children'");
    }
    for (const auto& [label, child] : j["children"].items()) {
      n.labels.push_back(label);
      n.children.push_back(parse_node(child, ctx));
    }
    if (n.children.empty()) throw InputError("buyer node has no children");
  } else if (kind == "seller") {
    n.kind = ProtocolNode::Kind::Seller;
    if (!j.contains("children") || !j["children"].is_array()) {
      throw InputError("seller node needs an array of 'children'");
    }
    for (const auto& child : j["children"]) {
      n.children.push_back(parse_node(child, ctx));
    }
    if (!j.contains("psi") || !j["psi"].is_object()) {
      throw InputError("seller node needs a 'psi' object");
    }
    n.psi.assign(ctx.num_signals(),
                 std::vector<double>(n.children.size(), 0.0));
    for (int w = 0; w < ctx.num_signals(); ++w) {
      const std::string& label = ctx.omega_labels()[w];
      if (!j["psi"].contains(label)) {
        throw InputError("seller node psi is missing omega '" + label + "'");
      }
      const auto& row = j["psi"][label];
      if (!row.is_array() || row.size() != n.children.size()) {
        throw InputError("psi row for omega '" + label +
                         "' needs one entry per child");
      }
      for (size_t c = 0; c < n.children.size(); ++c) {
        n.psi[w][c] = row[c].get<double>();
      }
    }
  } else {
    throw InputError("unknown node kind '" + kind + "'");
  }
  return n;
}

ordered_json node_to_json(const Context& ctx, const ProtocolNode& n) {
  ordered_json j;
  switch (n.kind) {
    case ProtocolNode::Kind::Leaf:
      j["kind"] = "leaf";
      break;
    case ProtocolNode::Kind::Transfer:
      j["kind"] = "transfer";
      j["amount"] = n.amount;
      j["child"] = node_to_json(ctx, n.children[0]);
      break;
    case ProtocolNode::Kind::Buyer: {
      j["kind"] = "buyer";
      ordered_json kids;
      for (size_t c = 0; c < n.children.size(); ++c) {
        const std::string label = c < n.labels.size()
                                      ? n.labels[c]
                                      : "m" + std::to_string(c);
        kids[label] = node_to_json(ctx, n.children[c]);
      }
      j["children"] = std::move(kids);
      break;
    }
    case ProtocolNode::Kind::Seller: {
      j["kind"] = "seller";
      ordered_json psi;
      for (int w = 0; w < ctx.num_signals(); ++w) {
        psi[ctx.omega_labels()[w]] = n.psi[w];
      }
      j["psi"] = std::move(psi);
      ordered_json kids = ordered_json::array();
      for (const auto& c : n.children) kids.push_back(node_to_json(ctx, c));
      j["children"] = std::move(kids);
      break;
    }
  }
  return j;
}

}  // namespace

ProtocolTree parse_protocol_json(const std::string& text, const Context& ctx) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("bad protocol JSON: ") + e.what());
  }
  ProtocolTree tree(parse_node(j, ctx));
  validate_tree(ctx, tree);
  return tree;
}

std::string protocol_to_json(const Context& ctx, const ProtocolTree& tree) {
  return node_to_json(ctx, tree.root()).dump(2);
}

std::string posterior_set_to_json(const Context& ctx, const PosteriorSet& q) {
  ordered_json j;
  j["provenance"] = q.provenance == PosteriorSet::Provenance::QStar ? "qstar"
                    : q.provenance == PosteriorSet::Provenance::Grid
                        ? "grid"
                        : "union";
  j["omega"] = ctx.omega_labels();
  ordered_json pts = ordered_json::array();
  for (const auto& p : q.points) pts.push_back(p);
  j["points"] = std::move(pts);
  return j.dump(2);
}

std::string menu_to_json(const Context& ctx, const Menu& menu) {
  ordered_json j;
  j["kind"] = menu.kind == Menu::Kind::Mappings ? "mappings" : "outcomes";
  ordered_json contracts = ordered_json::array();
  for (int t = 0; t < static_cast<int>(menu.contracts.size()); ++t) {
    const MenuContract& c = menu.contracts[t];
    ordered_json jc;
    jc["type"] = ctx.theta_labels()[t];
    if (menu.kind == Menu::Kind::Mappings) jc["price"] = c.price;
    ordered_json support = ordered_json::array();
    for (size_t i = 0; i < c.support.size(); ++i) {
      ordered_json e;
      e["q"] = c.support[i];
      e["weight"] = c.weights[i];
      if (menu.kind == Menu::Kind::Outcomes) {
        if (std::isnan(c.signal_prices[i])) {
          e["price"] = nullptr;
        } else {
          e["price"] = c.signal_prices[i];
        }
        e["scaled_price"] = c.scaled_prices[i];
      }
      support.push_back(std::move(e));
    }
    jc["support"] = std::move(support);
    contracts.push_back(std::move(jc));
  }
  j["contracts"] = std::move(contracts);
  return j.dump(2);
}

}  // namespace infomech
