// Lazy view of (annotated) infinite proofs. A stream node always knows its
// annotated sequent; the rule head behind it is produced on demand by a thunk
// and memoized per handle. Transformations are corecursive: forcing one node
// yields a head whose premises are new unforced nodes.

#ifndef KPLUS_ENGINE_HPP
#define KPLUS_ENGINE_HPP

#include <cassert>
#include <cstdint>
#include <memory>

#include "proof.hpp"

namespace kplus {

struct Fuel {
  std::int64_t budget = 1'000'000;
};

class FuelExhausted : public std::runtime_error {
 public:
  FuelExhausted(std::string op, std::string at)
      : std::runtime_error("fuel exhausted while forcing " + op + " at " + at),
        op(std::move(op)),
        at(std::move(at)) {}
  std::string op;
  std::string at;
};

struct StreamCtx {
  FormulaSet sigma;
  std::int64_t remaining = 1'000'000;
};

class StreamNode;
using StreamPtr = std::shared_ptr<StreamNode>;

struct StreamHead {
  RuleData rule;
  std::vector<StreamPtr> premises;
};

// Identity of a node in a source cyclic proof. Carried through
// shape-preserving transformations so that the regularizer can identify
// revisits exactly instead of merely by sequent.
struct StreamOrigin {
  int node = -1;
  Annotation ann;
  bool operator==(const StreamOrigin& o) const { return node == o.node && ann == o.ann; }
};

class StreamNode {
 public:
  using Thunk = std::function<StreamHead(StreamCtx&)>;

  static StreamPtr lazy(Sequent goal, Annotation ann, std::string tag, Thunk fn,
                        int cost = 1) {
    auto n = std::make_shared<StreamNode>();
    n->goal_ = std::move(goal);
    n->ann_ = std::move(ann);
    n->tag_ = std::move(tag);
    n->thunk_ = std::move(fn);
    n->cost_ = cost;
    return n;
  }

  static StreamPtr ready(Sequent goal, Annotation ann, StreamHead head) {
    auto n = std::make_shared<StreamNode>();
    n->goal_ = std::move(goal);
    n->ann_ = std::move(ann);
    n->head_ = std::move(head);
    return n;
  }

  // A node whose head may mention the node itself (a one-node loop). The
  // self-reference is weak, so the memoized head never keeps itself alive.
  static StreamPtr fixpoint(Sequent goal, Annotation ann, std::string tag,
                            std::function<StreamHead(StreamCtx&, const StreamPtr&)> fn) {
    auto n = std::make_shared<StreamNode>();
    n->goal_ = std::move(goal);
    n->ann_ = std::move(ann);
    n->tag_ = std::move(tag);
    n->cost_ = 1;
    std::weak_ptr<StreamNode> weak = n;
    n->thunk_ = [fn = std::move(fn), weak](StreamCtx& ctx) { return fn(ctx, weak.lock()); };
    return n;
  }

  const Sequent& goal() const { return goal_; }
  const Annotation& ann() const { return ann_; }
  AnnotatedSequent annotated_sequent() const { return AnnotatedSequent(goal_, ann_); }
  const std::optional<StreamOrigin>& origin() const { return origin_; }
  void set_origin(std::optional<StreamOrigin> o) { origin_ = std::move(o); }
  bool forced() const { return head_.has_value(); }
  const std::string& tag() const { return tag_; }

  const StreamHead& force(StreamCtx& ctx) {
    if (head_) return *head_;
    if (ctx.remaining < cost_) throw FuelExhausted(tag_, print_goal(goal_));
    ctx.remaining -= cost_;
    StreamHead h = thunk_(ctx);
    // Heads must satisfy the same local shape discipline as rule instances.
    auto prem = premises_of(goal_, ann_, h.rule);
    assert(prem.size() == h.premises.size());
    for (std::size_t i = 0; i < prem.size(); ++i) {
      assert(h.premises[i]->goal() == prem[i].seq);
      assert(h.premises[i]->ann() == prem[i].ann);
    }
    head_ = std::move(h);
    thunk_ = nullptr;
    return *head_;
  }

 private:
  Sequent goal_;
  Annotation ann_;
  std::optional<StreamOrigin> origin_;
  std::optional<StreamHead> head_;
  Thunk thunk_;
  std::string tag_;
  int cost_ = 0;
};

// Child factory: receives the premise sequent and annotation dictated by the
// rule schema and returns the stream that must prove it.
using ChildMaker = std::function<StreamPtr(const Sequent&, const Annotation&)>;

inline StreamHead make_head(const Sequent& concl, const Annotation& ann, RuleData rd,
                            const std::vector<ChildMaker>& makers) {
  StreamHead h;
  auto prem = premises_of(concl, ann, rd);
  assert(prem.size() == makers.size());
  h.rule = std::move(rd);
  for (std::size_t i = 0; i < prem.size(); ++i)
    h.premises.push_back(makers[i](prem[i].seq, prem[i].ann));
  return h;
}

inline ChildMaker reuse(StreamPtr node) {
  return [node = std::move(node)](const Sequent& goal, const Annotation& ann) {
    assert(node->goal() == goal);
    assert(node->ann() == ann);
    (void)goal;
    (void)ann;
    return node;
  };
}

// The annotated unfolding of a cyclic proof: back-links are chased with the
// annotation they were reached with, which re-annotates the target subtree
// with the loop annotation. Unfolding consumes no fuel.
namespace detail {

inline StreamPtr stream_of_node(std::shared_ptr<const CyclicProof> p, int id,
                                Annotation ann) {
  while (p->at(id).rule.kind == RuleKind::BackLink) id = p->at(id).target;
  const ProofNode& n = p->at(id);
  StreamPtr out = StreamNode::lazy(
      n.goal, ann, "unfold",
      [p, id, ann](StreamCtx&) -> StreamHead {
        const ProofNode& node = p->at(id);
        StreamHead h;
        h.rule = node.rule;
        auto prem = premises_of(node.goal, ann, node.rule);
        for (std::size_t i = 0; i < prem.size(); ++i)
          h.premises.push_back(stream_of_node(p, node.premises[i], prem[i].ann));
        return h;
      },
      0);
  out->set_origin(StreamOrigin{id, ann});
  return out;
}

}  // namespace detail

inline StreamPtr stream_of(const CyclicProof& p, const Annotation& root_ann) {
  auto shared = std::make_shared<const CyclicProof>(p);
  return detail::stream_of_node(shared, shared->root, root_ann);
}

// Folds a slim cut-free stream back into a cyclic proof. A depth-first walk
// keeps, per class run, the right [+]-premises already emitted on the current
// path; revisiting one (same annotated sequent, compatible origin) becomes a
// back-link to the nearest such ancestor. The run resets whenever an edge
// resets or changes the annotation.
inline CyclicProof regularize(const StreamPtr& stream, StreamCtx& ctx) {
  struct RunEntry {
    Sequent goal;
    Annotation ann;
    std::optional<StreamOrigin> origin;
    int emitted;
  };
  ProofBuilder builder(ctx.sigma);

  // preassigned < 0 means: allocate an id for this node.
  std::function<int(const StreamPtr&, std::vector<RunEntry>, int)> walk =
      [&](const StreamPtr& node, std::vector<RunEntry> run, int preassigned) -> int {
    const StreamHead& head = node->force(ctx);
    int id = preassigned >= 0 ? preassigned : builder.reserve_id();
    std::vector<int> child_ids;
    for (std::size_t i = 0; i < head.premises.size(); ++i) {
      const StreamPtr& child = head.premises[i];
      auto ek = detail::EdgeKind::Inherit;
      if (head.rule.kind == RuleKind::Box)
        ek = detail::EdgeKind::ToCircle;
      else if (head.rule.kind == RuleKind::BoxPlus)
        ek = i == 1 ? detail::EdgeKind::BoxPlusRight : detail::EdgeKind::ToCircle;

      if (ek == detail::EdgeKind::Inherit) {
        child_ids.push_back(walk(child, run, -1));
        continue;
      }
      if (ek == detail::EdgeKind::ToCircle) {
        child_ids.push_back(walk(child, {}, -1));
        continue;
      }
      // Right [+]-premise: either continue the run or start a new class.
      std::vector<RunEntry> next_run;
      if (child->ann() == node->ann()) {
        const RunEntry* hit = nullptr;
        for (auto it = run.rbegin(); it != run.rend(); ++it) {
          if (it->goal == child->goal() && it->ann == child->ann() &&
              it->origin == child->origin()) {
            hit = &*it;
            break;
          }
        }
        if (hit) {
          child_ids.push_back(builder.add_backlink(child->goal(), hit->emitted));
          continue;
        }
        next_run = run;
      }
      int cid = builder.reserve_id();
      next_run.push_back({child->goal(), child->ann(), child->origin(), cid});
      walk(child, std::move(next_run), cid);
      child_ids.push_back(cid);
    }
    builder.place(id, head.rule, node->goal(), std::move(child_ids));
    return id;
  };

  int root = walk(stream, {}, -1);
  return builder.finish(root);
}

}  // namespace kplus

#endif
