// Cyclic proof graphs: rule instances with explicit decompositions, the
// validity checker, annotation propagation, structural metrics and
// bisimulation equality of the represented infinite proofs.

#ifndef KPLUS_PROOF_HPP
#define KPLUS_PROOF_HPP

#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "sequent.hpp"

namespace kplus {

enum class RuleKind : std::uint8_t {
  AxP,
  AxBot,
  ImpL,
  ImpR,
  Box,
  BoxPlus,
  Cut,
  BackLink,
};

inline const char* rule_name(RuleKind k) {
  switch (k) {
    case RuleKind::AxP: return "axp";
    case RuleKind::AxBot: return "axbot";
    case RuleKind::ImpL: return "impl";
    case RuleKind::ImpR: return "impr";
    case RuleKind::Box: return "box";
    case RuleKind::BoxPlus: return "boxplus";
    case RuleKind::Cut: return "cut";
    case RuleKind::BackLink: return "backlink";
  }
  return "?";
}

inline bool is_modal(RuleKind k) { return k == RuleKind::Box || k == RuleKind::BoxPlus; }

// The rule-specific fields of an instance. For modal rules the split of the
// antecedent into residual, []Lambda and [+]Pi is ambiguous, so it is stored
// explicitly and never re-inferred.
struct RuleData {
  RuleKind kind = RuleKind::AxP;
  Formula principal;     // impl/impr/box/boxplus
  FormulaSet sigma0;     // box/boxplus
  Multiset lambda, pi;   // box/boxplus
  Formula cut_formula;   // cut

  bool slim() const { return lambda.duplicate_free() && pi.duplicate_free(); }

  bool operator==(const RuleData& o) const {
    return kind == o.kind && principal == o.principal && sigma0 == o.sigma0 &&
           lambda == o.lambda && pi == o.pi && cut_formula == o.cut_formula;
  }
};

struct ProofNode {
  RuleData rule;
  Sequent goal;
  std::vector<int> premises;  // order: left, right
  int target = -1;            // backlink
};

struct CyclicProof {
  FormulaSet sigma;
  int root = 0;
  std::map<int, ProofNode> nodes;

  const ProofNode& at(int id) const { return nodes.at(id); }
};

class RuleShapeError : public std::runtime_error {
 public:
  explicit RuleShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Premise sequents and annotations determined by a rule instance applied to
// its conclusion. Throws RuleShapeError if the conclusion does not decompose.
inline std::vector<AnnotatedSequent> premises_of(const Sequent& concl,
                                                 const Annotation& ann,
                                                 const RuleData& rd) {
  auto fail = [&](const std::string& msg) -> std::vector<AnnotatedSequent> {
    throw RuleShapeError(msg + " in " + rule_name(rd.kind) + " at " + print_goal(concl));
  };
  switch (rd.kind) {
    case RuleKind::AxP: {
      for (const auto& [f, n] : concl.gamma.entries())
        if (f.is(FormulaKind::Var) && concl.delta.contains(f)) return {};
      return fail("no variable shared between antecedent and succedent");
    }
    case RuleKind::AxBot: {
      if (!concl.gamma.contains(Formula::bot())) return fail("no false in antecedent");
      return {};
    }
    case RuleKind::ImpL: {
      if (!rd.principal.is(FormulaKind::Imp)) return fail("principal not an implication");
      auto g0 = concl.gamma.minus(rd.principal);
      if (!g0) return fail("principal missing from antecedent");
      Sequent left{concl.sigma, g0->plus(rd.principal.right()), concl.delta};
      Sequent right{concl.sigma, *g0, concl.delta.plus(rd.principal.left())};
      return {AnnotatedSequent(left, ann), AnnotatedSequent(right, ann)};
    }
    case RuleKind::ImpR: {
      if (!rd.principal.is(FormulaKind::Imp)) return fail("principal not an implication");
      auto d0 = concl.delta.minus(rd.principal);
      if (!d0) return fail("principal missing from succedent");
      Sequent prem{concl.sigma, concl.gamma.plus(rd.principal.left()),
                   d0->plus(rd.principal.right())};
      return {AnnotatedSequent(prem, ann)};
    }
    case RuleKind::Box:
    case RuleKind::BoxPlus: {
      bool plus = rd.kind == RuleKind::BoxPlus;
      if (!rd.principal.is(plus ? FormulaKind::BoxPlus : FormulaKind::Box))
        return fail("principal has wrong shape");
      if (!rd.sigma0.subset_of(concl.sigma)) return fail("sigma0 not a subset of sigma");
      if (!concl.delta.contains(rd.principal)) return fail("principal missing from succedent");
      auto side = boxed(rd.lambda).plus(box_plussed(rd.pi));
      if (!concl.gamma.minus(side)) return fail("side formulas missing from antecedent");
      Multiset theta = rd.sigma0.as_multiset().plus(rd.lambda).plus(rd.pi).plus(
          box_plussed(rd.pi));
      Formula a = rd.principal.body();
      Sequent first{concl.sigma, theta, Multiset{a}};
      if (!plus) return {AnnotatedSequent(first, Annotation::circle())};
      Sequent second{concl.sigma, theta, Multiset{rd.principal}};
      return {AnnotatedSequent(first, Annotation::circle()),
              AnnotatedSequent(second, Annotation::of(a))};
    }
    case RuleKind::Cut: {
      if (rd.cut_formula.is_null()) return fail("missing cut formula");
      Sequent left{concl.sigma, concl.gamma, concl.delta.plus(rd.cut_formula)};
      Sequent right{concl.sigma, concl.gamma.plus(rd.cut_formula), concl.delta};
      return {AnnotatedSequent(left, ann), AnnotatedSequent(right, ann)};
    }
    case RuleKind::BackLink:
      return {};
  }
  return {};
}

inline std::optional<RuleKind> initial_kind(const Sequent& s) {
  if (s.gamma.contains(Formula::bot())) return RuleKind::AxBot;
  for (const auto& [f, n] : s.gamma.entries())
    if (f.is(FormulaKind::Var) && s.delta.contains(f)) return RuleKind::AxP;
  return std::nullopt;
}

enum class CheckFault {
  BadRuleShape,
  BadAxiom,
  DanglingBackLink,
  AnnotationMismatchOnPath,
  NoBoxPlusRightOnPath,
  AnnotationError,
};

inline const char* fault_name(CheckFault f) {
  switch (f) {
    case CheckFault::BadRuleShape: return "BadRuleShape";
    case CheckFault::BadAxiom: return "BadAxiom";
    case CheckFault::DanglingBackLink: return "DanglingBackLink";
    case CheckFault::AnnotationMismatchOnPath: return "AnnotationMismatchOnPath";
    case CheckFault::NoBoxPlusRightOnPath: return "NoBoxPlusRightOnPath";
    case CheckFault::AnnotationError: return "AnnotationError";
  }
  return "?";
}

struct CheckResult {
  bool valid = false;
  Annotation annotation;                 // the root annotation that certified
  std::map<int, Annotation> annotations; // per-node, when valid
  CheckFault fault = CheckFault::BadRuleShape;
  int node = -1;

  explicit operator bool() const { return valid; }
};

class AnnotationError : public std::runtime_error {
 public:
  explicit AnnotationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic top-down propagation of annotations: non-modal premises
// inherit, box premises and left [+]-premises get circle, right [+]-premises
// get the principal's body.
inline std::map<int, Annotation> infer_annotations(const CyclicProof& p,
                                                   const Annotation& root_ann) {
  const Sequent& root_goal = p.at(p.root).goal;
  auto cands = annotation_candidates(root_goal);
  if (std::find(cands.begin(), cands.end(), root_ann) == cands.end())
    throw AnnotationError("annotation " + print_annotation(root_ann) +
                          " is not a candidate for the root sequent");
  std::map<int, Annotation> out;
  std::vector<std::pair<int, Annotation>> todo{{p.root, root_ann}};
  while (!todo.empty()) {
    auto [id, ann] = todo.back();
    todo.pop_back();
    out.emplace(id, ann);
    const ProofNode& n = p.at(id);
    if (n.rule.kind == RuleKind::BackLink) continue;
    auto prem = premises_of(n.goal, ann, n.rule);
    for (std::size_t i = 0; i < n.premises.size(); ++i)
      todo.push_back({n.premises[i], prem[i].ann});
  }
  return out;
}

namespace detail {

struct ProofIndex {
  std::map<int, int> parent;          // child id -> parent id
  std::vector<int> order;             // preorder
  bool build(const CyclicProof& p, int& bad_node) {
    parent.clear();
    order.clear();
    std::unordered_set<int> seen;
    std::vector<int> stack{p.root};
    if (!p.nodes.count(p.root)) {
      bad_node = p.root;
      return false;
    }
    seen.insert(p.root);
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      order.push_back(id);
      const ProofNode& n = p.at(id);
      for (int c : n.premises) {
        if (!p.nodes.count(c) || seen.count(c)) {
          bad_node = c;
          return false;  // missing child or shared/cyclic premise edge
        }
        seen.insert(c);
        parent[c] = id;
        stack.push_back(c);
      }
    }
    if (seen.size() != p.nodes.size()) {
      for (const auto& [id, n] : p.nodes)
        if (!seen.count(id)) {
          bad_node = id;
          return false;  // unreachable node
        }
    }
    return true;
  }

  bool is_proper_ancestor(int anc, int node) const {
    int cur = node;
    while (true) {
      auto it = parent.find(cur);
      if (it == parent.end()) return false;
      cur = it->second;
      if (cur == anc) return true;
    }
  }

  // Path from anc down to node, inclusive.
  std::vector<int> path(int anc, int node) const {
    std::vector<int> rev{node};
    int cur = node;
    while (cur != anc) {
      cur = parent.at(cur);
      rev.push_back(cur);
    }
    return {rev.rbegin(), rev.rend()};
  }
};

// Which premise of its parent a node is, and the edge class it induces on the
// annotation: inherit, reset to circle, or the body of a [+] principal.
enum class EdgeKind { Inherit, ToCircle, BoxPlusRight };

inline EdgeKind edge_kind(const ProofNode& parent, int child_id) {
  switch (parent.rule.kind) {
    case RuleKind::ImpL:
    case RuleKind::ImpR:
    case RuleKind::Cut:
      return EdgeKind::Inherit;
    case RuleKind::Box:
      return EdgeKind::ToCircle;
    case RuleKind::BoxPlus:
      return parent.premises.size() == 2 && parent.premises[1] == child_id
                 ? EdgeKind::BoxPlusRight
                 : EdgeKind::ToCircle;
    default:
      return EdgeKind::Inherit;
  }
}

}  // namespace detail

// Local checks plus back-link conditions. The back-link conditions do not
// depend on the chosen root annotation: for each back-link the loop from the
// target to the leaf must cross at least one right [+]-premise, all such
// crossings must introduce the same formula s, and no edge on the loop may
// reset the annotation. The loop then certifies the trace condition for every
// admissible root annotation.
inline CheckResult check_proof(const CyclicProof& p, const Annotation& root_ann) {
  CheckResult res;
  auto invalid = [&](CheckFault f, int node) {
    res.valid = false;
    res.fault = f;
    res.node = node;
    return res;
  };

  detail::ProofIndex index;
  int bad = -1;
  if (!index.build(p, bad)) return invalid(CheckFault::BadRuleShape, bad);

  // Local rule shapes.
  for (int id : index.order) {
    const ProofNode& n = p.at(id);
    if (n.goal.sigma != p.sigma) return invalid(CheckFault::BadRuleShape, id);
    if (n.rule.kind == RuleKind::BackLink) {
      if (!n.premises.empty()) return invalid(CheckFault::BadRuleShape, id);
      continue;
    }
    std::vector<AnnotatedSequent> prem;
    try {
      prem = premises_of(n.goal, Annotation::circle(), n.rule);
    } catch (const RuleShapeError&) {
      return invalid(n.rule.kind == RuleKind::AxP || n.rule.kind == RuleKind::AxBot
                         ? CheckFault::BadAxiom
                         : CheckFault::BadRuleShape,
                     id);
    } catch (const std::invalid_argument&) {
      return invalid(CheckFault::BadRuleShape, id);
    }
    if (prem.size() != n.premises.size()) return invalid(CheckFault::BadRuleShape, id);
    for (std::size_t i = 0; i < prem.size(); ++i)
      if (p.at(n.premises[i]).goal != prem[i].seq)
        return invalid(CheckFault::BadRuleShape, n.premises[i]);
  }

  // Back-link conditions.
  for (int id : index.order) {
    const ProofNode& n = p.at(id);
    if (n.rule.kind != RuleKind::BackLink) continue;
    if (!p.nodes.count(n.target) || !index.is_proper_ancestor(n.target, id))
      return invalid(CheckFault::DanglingBackLink, id);
    if (p.at(n.target).goal != n.goal) return invalid(CheckFault::DanglingBackLink, id);
    auto path = index.path(n.target, id);
    // Collect the annotation trajectory along the loop.
    std::optional<Formula> trace;
    bool crossed_plus_right = false;
    bool reset_seen = false;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto ek = detail::edge_kind(p.at(path[i]), path[i + 1]);
      if (ek == detail::EdgeKind::ToCircle) reset_seen = true;
      if (ek == detail::EdgeKind::BoxPlusRight) {
        crossed_plus_right = true;
        Formula body = p.at(path[i]).rule.principal.body();
        if (trace && !(*trace == body))
          return invalid(CheckFault::AnnotationMismatchOnPath, id);
        trace = body;
      }
    }
    if (!crossed_plus_right) return invalid(CheckFault::NoBoxPlusRightOnPath, id);
    if (reset_seen) return invalid(CheckFault::AnnotationMismatchOnPath, id);
  }

  // Annotation propagation for the requested root annotation.
  try {
    res.annotations = infer_annotations(p, root_ann);
  } catch (const AnnotationError&) {
    return invalid(CheckFault::AnnotationError, p.root);
  } catch (const std::invalid_argument&) {
    return invalid(CheckFault::AnnotationError, p.root);
  }
  res.valid = true;
  res.annotation = root_ann;
  return res;
}

// "auto": try formula candidates in canonical order, then circle, accepting
// the first success; the certified annotation is reported.
inline CheckResult check_proof_auto(const CyclicProof& p) {
  auto cands = annotation_candidates(p.at(p.root).goal);
  CheckResult last;
  bool first = true;
  for (std::size_t i = 1; i <= cands.size(); ++i) {
    const Annotation& a = cands[i % cands.size()];  // formulas first, circle last
    CheckResult r = check_proof(p, a);
    if (r.valid) return r;
    if (first) {
      last = r;
      first = false;
    }
  }
  return last;
}

// Longest branch of the tree truncated at the first premises of modal rules.
inline std::size_t local_height(const CyclicProof& p) {
  std::vector<std::pair<int, std::size_t>> stack{{p.root, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    const ProofNode& n = p.at(id);
    if (is_modal(n.rule.kind) || n.rule.kind == RuleKind::BackLink) continue;
    for (int c : n.premises) stack.push_back({c, depth + 1});
  }
  return best;
}

// Partition of the graph nodes by the equivalence generated by premise edges
// of impl/impr/cut and right [+]-premise edges whose conclusion annotation
// equals the principal's body. Class ids are the smallest member ids.
struct ClassPartition {
  std::map<int, int> cls;
  std::size_t count() const {
    std::unordered_set<int> s;
    for (const auto& [n, c] : cls) s.insert(c);
    return s.size();
  }
};

inline ClassPartition class_partition(const CyclicProof& p, const Annotation& root_ann) {
  auto anns = infer_annotations(p, root_ann);
  std::map<int, int> rep;
  for (const auto& [id, n] : p.nodes) rep[id] = id;
  std::function<int(int)> find = [&](int x) {
    while (rep[x] != x) x = rep[x] = rep[rep[x]];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    rep[b] = a;
  };
  for (const auto& [id, n] : p.nodes) {
    for (int c : n.premises) {
      auto ek = detail::edge_kind(n, c);
      if (ek == detail::EdgeKind::Inherit)
        unite(id, c);
      else if (ek == detail::EdgeKind::BoxPlusRight &&
               anns.at(id) == Annotation::of(n.rule.principal.body()))
        unite(id, c);
    }
  }
  ClassPartition out;
  for (const auto& [id, n] : p.nodes) out.cls[id] = find(id);
  return out;
}

namespace detail {

// Back-links resolved away: the node that actually carries the rule.
inline int resolve(const CyclicProof& p, int id) {
  std::size_t steps = 0;
  while (p.at(id).rule.kind == RuleKind::BackLink) {
    id = p.at(id).target;
    if (++steps > p.nodes.size()) throw RuleShapeError("back-link cycle");
  }
  return id;
}

}  // namespace detail

// Equality of the represented infinite unfoldings, decided by memoized
// bisimulation on resolved node pairs.
inline bool proof_equal(const CyclicProof& p, const CyclicProof& q) {
  if (p.sigma != q.sigma) return false;
  std::unordered_set<std::uint64_t> visited;
  std::vector<std::pair<int, int>> stack{
      {detail::resolve(p, p.root), detail::resolve(q, q.root)}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    if (!visited.insert(key).second) continue;
    const ProofNode& na = p.at(a);
    const ProofNode& nb = q.at(b);
    if (!(na.rule == nb.rule) || na.goal != nb.goal) return false;
    if (na.premises.size() != nb.premises.size()) return false;
    for (std::size_t i = 0; i < na.premises.size(); ++i)
      stack.push_back({detail::resolve(p, na.premises[i]),
                       detail::resolve(q, nb.premises[i])});
  }
  return true;
}

// n-fragment comparison of the annotated unfoldings: a right [+]-premise is a
// cut point when the path from the root has stayed inside the root class and
// has crossed exactly n [+]-applications. Fragments of regular proofs are
// compared by bisimulation over the finite state space
// (node pair, annotation, in-root-class flag, crossing count).
inline bool fragment_equal(const CyclicProof& p, const CyclicProof& q,
                           const Annotation& ann, std::size_t n) {
  if (n == 0) return true;
  if (p.sigma != q.sigma) return false;
  // Validate that ann is admissible for both roots.
  (void)AnnotatedSequent(p.at(p.root).goal, ann);
  (void)AnnotatedSequent(q.at(q.root).goal, ann);

  struct State {
    int a, b;
    Annotation ann;
    bool in_root_class;
    std::size_t crossings;
  };
  auto key = [](const State& s) {
    std::size_t h = hash_combine(static_cast<std::size_t>(s.a),
                                 static_cast<std::size_t>(s.b));
    h = hash_combine(h, s.ann.hash());
    h = hash_combine(h, s.in_root_class ? 1u : 0u);
    return hash_combine(h, s.crossings);
  };
  std::unordered_set<std::size_t> visited;
  std::vector<State> stack{{detail::resolve(p, p.root), detail::resolve(q, q.root),
                            ann, true, 0}};
  while (!stack.empty()) {
    State s = stack.back();
    stack.pop_back();
    if (!visited.insert(key(s)).second) continue;
    const ProofNode& na = p.at(s.a);
    const ProofNode& nb = q.at(s.b);
    if (!(na.rule == nb.rule) || na.goal != nb.goal) return false;
    if (na.premises.size() != nb.premises.size()) return false;
    for (std::size_t i = 0; i < na.premises.size(); ++i) {
      Annotation child_ann = s.ann;
      bool in_class = s.in_root_class;
      std::size_t crossings = s.crossings;
      switch (na.rule.kind) {
        case RuleKind::Box:
          child_ann = Annotation::circle();
          in_class = false;
          break;
        case RuleKind::BoxPlus: {
          Formula body = na.rule.principal.body();
          if (i == 1) {
            child_ann = Annotation::of(body);
            if (in_class && child_ann == s.ann) {
              ++crossings;
              if (crossings == n) continue;  // cut point: premise removed
            } else {
              in_class = false;
            }
          } else {
            child_ann = Annotation::circle();
            in_class = false;
          }
          break;
        }
        default:
          break;
      }
      stack.push_back({detail::resolve(p, na.premises[i]),
                       detail::resolve(q, nb.premises[i]), child_ann, in_class,
                       crossings});
    }
  }
  return true;
}

inline bool cut_free(const CyclicProof& p) {
  return std::all_of(p.nodes.begin(), p.nodes.end(), [](const auto& kv) {
    return kv.second.rule.kind != RuleKind::Cut;
  });
}

inline bool slim(const CyclicProof& p) {
  return std::all_of(p.nodes.begin(), p.nodes.end(), [](const auto& kv) {
    return !is_modal(kv.second.rule.kind) || kv.second.rule.slim();
  });
}

inline std::size_t rule_node_count(const CyclicProof& p) {
  std::size_t c = 0;
  for (const auto& [id, n] : p.nodes)
    if (n.rule.kind != RuleKind::BackLink) ++c;
  return c;
}

inline std::size_t backlink_count(const CyclicProof& p) {
  return p.nodes.size() - rule_node_count(p);
}

// Small builder used by fixtures, translations and tests.
class ProofBuilder {
 public:
  explicit ProofBuilder(FormulaSet sigma) { proof_.sigma = std::move(sigma); }

  int add(RuleData rd, Sequent goal, std::vector<int> premises = {}) {
    int id = next_++;
    goal.sigma = proof_.sigma;
    proof_.nodes[id] = ProofNode{std::move(rd), std::move(goal), std::move(premises), -1};
    return id;
  }
  int add_backlink(Sequent goal, int target) {
    int id = next_++;
    goal.sigma = proof_.sigma;
    ProofNode n;
    n.rule.kind = RuleKind::BackLink;
    n.goal = std::move(goal);
    n.target = target;
    proof_.nodes[id] = std::move(n);
    return id;
  }
  void set_target(int backlink_id, int target) { proof_.nodes[backlink_id].target = target; }
  int reserve_id() { return next_++; }
  void place(int id, RuleData rd, Sequent goal, std::vector<int> premises = {}) {
    goal.sigma = proof_.sigma;
    proof_.nodes[id] = ProofNode{std::move(rd), std::move(goal), std::move(premises), -1};
  }

  CyclicProof finish(int root) {
    proof_.root = root;
    return std::move(proof_);
  }

 private:
  CyclicProof proof_;
  int next_ = 0;
};

}  // namespace kplus

#endif
