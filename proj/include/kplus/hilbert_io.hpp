// Derivation file format, mirroring the proof format. Shared subderivations
// are written once and referenced by id.

#ifndef KPLUS_HILBERT_IO_HPP
#define KPLUS_HILBERT_IO_HPP

#include "hilbert.hpp"
#include "proof_io.hpp"

namespace kplus {

struct HilbertDocument {
  FormulaSet sigma;
  HDeriv root;
};

inline nlohmann::ordered_json hilbert_to_json(const HilbertDocument& doc) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["sigma"] = detail::formula_array(doc.sigma);
  auto nodes = nlohmann::ordered_json::array();
  std::unordered_map<const HilbertDerivation*, int> ids;
  std::function<int(const HDeriv&)> emit = [&](const HDeriv& d) -> int {
    if (auto it = ids.find(d.get()); it != ids.end()) return it->second;
    std::vector<int> prem;
    for (const auto& p : d->premises) prem.push_back(emit(p));
    int id = static_cast<int>(ids.size());
    ids[d.get()] = id;
    nlohmann::ordered_json jn;
    jn["id"] = id;
    jn["rule"] = hkind_name(d->kind);
    if (d->kind == HKind::MP || d->kind == HKind::Nec)
      jn["premises"] = prem;
    else
      jn["formula"] = print_formula(d->formula);
    nodes.push_back(std::move(jn));
    return id;
  };
  int root = emit(doc.root);
  j["root"] = root;
  j["nodes"] = std::move(nodes);
  return j;
}

inline std::string write_hilbert(const HilbertDocument& doc) {
  return hilbert_to_json(doc).dump(2) + "\n";
}

inline HilbertDocument hilbert_from_json(const nlohmann::json& j) {
  detail::expect_fields(j, {"version", "sigma", "root", "nodes"},
                        {"version", "sigma", "root", "nodes"});
  if (j["version"] != 1) throw ParseError(0, {"version 1"});
  HilbertDocument doc;
  doc.sigma = FormulaSet::of(detail::parse_formula_array(j["sigma"]));
  std::map<int, nlohmann::json> raw;
  for (const auto& jn : j["nodes"]) {
    detail::expect_fields(jn, {"id", "rule", "formula", "premises"}, {"id", "rule"});
    int id = jn["id"].get<int>();
    if (raw.count(id)) throw ParseError(0, {"unique node id"});
    raw[id] = jn;
  }
  std::map<int, HDeriv> built;
  std::set<int> building;
  std::function<HDeriv(int)> build = [&](int id) -> HDeriv {
    if (auto it = built.find(id); it != built.end()) return it->second;
    if (!building.insert(id).second) throw ParseError(0, {"acyclic premise references"});
    auto it = raw.find(id);
    if (it == raw.end()) throw ParseError(0, {"premise id " + std::to_string(id)});
    const auto& jn = it->second;
    std::string rule = jn["rule"].get<std::string>();
    HDeriv d;
    if (rule == "mp" || rule == "nec") {
      if (!jn.contains("premises")) throw ParseError(0, {"field \"premises\""});
      auto prem_ids = jn["premises"].get<std::vector<int>>();
      if (rule == "mp") {
        if (prem_ids.size() != 2) throw ParseError(0, {"two premises for mp"});
        d = hd_mp(build(prem_ids[0]), build(prem_ids[1]));
      } else {
        if (prem_ids.size() != 1) throw ParseError(0, {"one premise for nec"});
        d = hd_nec(build(prem_ids[0]));
      }
    } else {
      if (!jn.contains("formula")) throw ParseError(0, {"field \"formula\""});
      Formula f = parse_formula(jn["formula"].get<std::string>());
      HKind k;
      if (rule == "taut") k = HKind::Taut;
      else if (rule == "ax2") k = HKind::Ax2;
      else if (rule == "ax3") k = HKind::Ax3;
      else if (rule == "ax4") k = HKind::Ax4;
      else if (rule == "ax5") k = HKind::Ax5;
      else if (rule == "assume") k = HKind::Assume;
      else throw ParseError(0, {"known rule name (got \"" + rule + "\")"});
      d = hd_leaf(k, std::move(f));
    }
    building.erase(id);
    built[id] = d;
    return d;
  };
  doc.root = build(j["root"].get<int>());
  return doc;
}

inline HilbertDocument parse_hilbert(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, {std::string("well-formed JSON: ") + e.what()});
  }
  try {
    return hilbert_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, {std::string("well-typed derivation document: ") + e.what()});
  }
}

}  // namespace kplus

#endif
