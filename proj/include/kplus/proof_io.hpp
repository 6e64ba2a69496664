// Versioned proof file format. Output is canonical: fixed key order, nodes
// sorted by id, multisets in canonical formula order.

#ifndef KPLUS_PROOF_IO_HPP
#define KPLUS_PROOF_IO_HPP

#include <json.hpp>

#include "proof.hpp"

namespace kplus {

namespace detail {

inline void expect_fields(const nlohmann::json& obj,
                          const std::vector<std::string>& allowed,
                          const std::vector<std::string>& required) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ParseError(0, {"known field (got \"" + it.key() + "\")"});
  for (const auto& r : required)
    if (!obj.contains(r)) throw ParseError(0, {"field \"" + r + "\""});
}

inline std::vector<Formula> parse_formula_array(const nlohmann::json& arr) {
  if (!arr.is_array()) throw ParseError(0, {"array of formula strings"});
  std::vector<Formula> out;
  for (const auto& x : arr) out.push_back(parse_formula(x.get<std::string>()));
  return out;
}

inline nlohmann::ordered_json formula_array(const Multiset& m) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : m.expanded()) arr.push_back(print_formula(f));
  return arr;
}

inline nlohmann::ordered_json formula_array(const FormulaSet& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : s.items()) arr.push_back(print_formula(f));
  return arr;
}

}  // namespace detail

inline nlohmann::ordered_json proof_to_json(const CyclicProof& p) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["sigma"] = detail::formula_array(p.sigma);
  j["root"] = p.root;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& [id, n] : p.nodes) {
    nlohmann::ordered_json jn;
    jn["id"] = id;
    jn["rule"] = rule_name(n.rule.kind);
    jn["goal"] = print_goal(n.goal);
    switch (n.rule.kind) {
      case RuleKind::ImpL:
      case RuleKind::ImpR:
        jn["principal"] = print_formula(n.rule.principal);
        break;
      case RuleKind::Box:
      case RuleKind::BoxPlus:
        jn["principal"] = print_formula(n.rule.principal);
        jn["sigma0"] = detail::formula_array(n.rule.sigma0);
        jn["lambda"] = detail::formula_array(n.rule.lambda);
        jn["pi"] = detail::formula_array(n.rule.pi);
        break;
      case RuleKind::Cut:
        jn["cut_formula"] = print_formula(n.rule.cut_formula);
        break;
      default:
        break;
    }
    if (!n.premises.empty()) jn["premises"] = n.premises;
    if (n.rule.kind == RuleKind::BackLink) jn["target"] = n.target;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

inline std::string write_proof(const CyclicProof& p) { return proof_to_json(p).dump(2) + "\n"; }

inline CyclicProof proof_from_json(const nlohmann::json& j) {
  detail::expect_fields(j, {"version", "sigma", "root", "nodes"},
                        {"version", "sigma", "root", "nodes"});
  if (j["version"] != 1) throw ParseError(0, {"version 1"});
  CyclicProof p;
  p.sigma = FormulaSet::of(detail::parse_formula_array(j["sigma"]));
  p.root = j["root"].get<int>();
  for (const auto& jn : j["nodes"]) {
    detail::expect_fields(jn,
                          {"id", "rule", "goal", "principal", "sigma0", "lambda",
                           "pi", "cut_formula", "premises", "target"},
                          {"id", "rule", "goal"});
    int id = jn["id"].get<int>();
    if (p.nodes.count(id)) throw ParseError(0, {"unique node id"});
    ProofNode n;
    std::string rule = jn["rule"].get<std::string>();
    auto [gamma, delta] = parse_goal(jn["goal"].get<std::string>());
    n.goal = Sequent{p.sigma, std::move(gamma), std::move(delta)};
    auto need = [&](const char* field) {
      if (!jn.contains(field))
        throw ParseError(0, {std::string("field \"") + field + "\" for rule " + rule});
    };
    auto forbid = [&](const char* field) {
      if (jn.contains(field))
        throw ParseError(0, {std::string("no field \"") + field + "\" for rule " + rule});
    };
    if (rule == "axp" || rule == "axbot") {
      n.rule.kind = rule == "axp" ? RuleKind::AxP : RuleKind::AxBot;
      forbid("principal");
      forbid("premises");
      forbid("target");
      forbid("cut_formula");
    } else if (rule == "impl" || rule == "impr") {
      n.rule.kind = rule == "impl" ? RuleKind::ImpL : RuleKind::ImpR;
      need("principal");
      need("premises");
      n.rule.principal = parse_formula(jn["principal"].get<std::string>());
    } else if (rule == "box" || rule == "boxplus") {
      n.rule.kind = rule == "box" ? RuleKind::Box : RuleKind::BoxPlus;
      need("principal");
      need("sigma0");
      need("lambda");
      need("pi");
      need("premises");
      n.rule.principal = parse_formula(jn["principal"].get<std::string>());
      n.rule.sigma0 = FormulaSet::of(detail::parse_formula_array(jn["sigma0"]));
      n.rule.lambda = Multiset::of(detail::parse_formula_array(jn["lambda"]));
      n.rule.pi = Multiset::of(detail::parse_formula_array(jn["pi"]));
    } else if (rule == "cut") {
      n.rule.kind = RuleKind::Cut;
      need("cut_formula");
      need("premises");
      n.rule.cut_formula = parse_formula(jn["cut_formula"].get<std::string>());
    } else if (rule == "backlink") {
      n.rule.kind = RuleKind::BackLink;
      need("target");
      forbid("premises");
      n.target = jn["target"].get<int>();
    } else {
      throw ParseError(0, {"known rule name (got \"" + rule + "\")"});
    }
    if (jn.contains("premises")) n.premises = jn["premises"].get<std::vector<int>>();
    p.nodes[id] = std::move(n);
  }
  if (!p.nodes.count(p.root)) throw ParseError(0, {"root id present among nodes"});
  return p;
}

inline CyclicProof parse_proof(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, {std::string("well-formed JSON: ") + e.what()});
  }
  try {
    return proof_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, {std::string("well-typed proof document: ") + e.what()});
  }
}

}  // namespace kplus

#endif
