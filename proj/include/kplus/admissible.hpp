// Strongly admissible structural operations: weakening, the four inversions,
// atomic contraction, and identity-proof construction. The stream versions
// rewrite only the finite region below the first modal premises; modal
// premises are passed through untouched, so local height never grows and
// cut-freeness and slimness are preserved.

#ifndef KPLUS_ADMISSIBLE_HPP
#define KPLUS_ADMISSIBLE_HPP

#include "engine.hpp"

namespace kplus {

class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Identity proofs: slim cut-free cyclic proofs of  Sigma ; Gamma, A => A, Delta,
// by structural recursion on A. The [+] case closes its loop with a back-link.

namespace detail {

inline int build_identity(ProofBuilder& b, const Multiset& gamma, const Formula& a,
                          const Multiset& delta) {
  Sequent goal{{}, gamma.plus(a), delta.plus(a)};
  switch (a.kind()) {
    case FormulaKind::Var: {
      RuleData rd;
      rd.kind = RuleKind::AxP;
      return b.add(rd, goal);
    }
    case FormulaKind::Bot: {
      RuleData rd;
      rd.kind = RuleKind::AxBot;
      return b.add(rd, goal);
    }
    case FormulaKind::Imp: {
      const Formula& l = a.left();
      const Formula& r = a.right();
      int right_prem = build_identity(b, gamma, l, delta.plus(r));
      int left_prem = build_identity(b, gamma.plus(l), r, delta);
      RuleData impl;
      impl.kind = RuleKind::ImpL;
      impl.principal = a;
      Sequent mid{{}, gamma.plus(a).plus(l), delta.plus(r)};
      int impl_id = b.add(impl, mid, {left_prem, right_prem});
      RuleData impr;
      impr.kind = RuleKind::ImpR;
      impr.principal = a;
      return b.add(impr, goal, {impl_id});
    }
    case FormulaKind::Box: {
      int prem = build_identity(b, {}, a.body(), {});
      RuleData rd;
      rd.kind = RuleKind::Box;
      rd.principal = a;
      rd.lambda = Multiset{a.body()};
      return b.add(rd, goal, {prem});
    }
    case FormulaKind::BoxPlus: {
      const Formula body = a.body();
      RuleData rd;
      rd.kind = RuleKind::BoxPlus;
      rd.principal = a;
      rd.pi = Multiset{body};
      Sequent loop_goal{{}, Multiset{body, a}, Multiset{a}};
      int loop = b.reserve_id();
      int left_inner = build_identity(b, Multiset{a}, body, {});
      int back = b.add_backlink(loop_goal, loop);
      b.place(loop, rd, loop_goal, {left_inner, back});
      int left_outer = build_identity(b, Multiset{a}, body, {});
      return b.add(rd, goal, {left_outer, loop});
    }
  }
  throw ShapeError("null formula");
}

}  // namespace detail

inline CyclicProof identity_proof(const FormulaSet& sigma, const Multiset& gamma,
                                  const Formula& a, const Multiset& delta) {
  ProofBuilder b(sigma);
  int root = detail::build_identity(b, gamma, a, delta);
  return b.finish(root);
}

// ---------------------------------------------------------------------------
// Weakening on streams: wk adds Phi to the antecedent and Psi to the succedent
// up to the first modal premises, which absorb the extra context into the
// conclusion's residual zones.

inline StreamPtr wk_stream(const Multiset& phi, const Multiset& psi, StreamPtr in,
                           const Annotation& want) {
  if (phi.empty() && psi.empty() && in->ann() == want) return in;
  Sequent goal{in->goal().sigma, in->goal().gamma.plus(phi), in->goal().delta.plus(psi)};
  return StreamNode::lazy(goal, want, "wk", [=](StreamCtx& ctx) -> StreamHead {
    const StreamHead& h = in->force(ctx);
    switch (h.rule.kind) {
      case RuleKind::AxP:
      case RuleKind::AxBot:
        return StreamHead{h.rule, {}};
      case RuleKind::Box:
      case RuleKind::BoxPlus: {
        std::vector<ChildMaker> makers;
        for (const auto& c : h.premises) makers.push_back(reuse(c));
        return make_head(goal, want, h.rule, makers);
      }
      default: {
        std::vector<ChildMaker> makers;
        for (const auto& c : h.premises)
          makers.push_back([=](const Sequent&, const Annotation& ann) {
            return wk_stream(phi, psi, c, ann);
          });
        return make_head(goal, want, h.rule, makers);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Inversions.

enum class InversionKind { LeftImp, RightImp, UnImp, UnBot };

struct Inversion {
  InversionKind kind;
  Formula pivot;  // an implication for LeftImp/RightImp/UnImp; unused for UnBot

  static Inversion left_imp(Formula f) { return {InversionKind::LeftImp, std::move(f)}; }
  static Inversion right_imp(Formula f) { return {InversionKind::RightImp, std::move(f)}; }
  static Inversion un_imp(Formula f) { return {InversionKind::UnImp, std::move(f)}; }
  static Inversion un_bot() { return {InversionKind::UnBot, {}}; }
};

namespace detail {

inline Sequent inverted_goal(const Inversion& inv, const Sequent& s) {
  switch (inv.kind) {
    case InversionKind::LeftImp: {
      auto g = s.gamma.minus(inv.pivot);
      if (!g) throw ShapeError("pivot " + print_formula(inv.pivot) + " not in antecedent");
      return {s.sigma, g->plus(inv.pivot.right()), s.delta};
    }
    case InversionKind::RightImp: {
      auto g = s.gamma.minus(inv.pivot);
      if (!g) throw ShapeError("pivot " + print_formula(inv.pivot) + " not in antecedent");
      return {s.sigma, *g, s.delta.plus(inv.pivot.left())};
    }
    case InversionKind::UnImp: {
      auto d = s.delta.minus(inv.pivot);
      if (!d) throw ShapeError("pivot " + print_formula(inv.pivot) + " not in succedent");
      return {s.sigma, s.gamma.plus(inv.pivot.left()), d->plus(inv.pivot.right())};
    }
    case InversionKind::UnBot: {
      auto d = s.delta.minus(Formula::bot());
      if (!d) throw ShapeError("no false in succedent");
      return {s.sigma, s.gamma, *d};
    }
  }
  throw ShapeError("bad inversion");
}

}  // namespace detail

inline StreamPtr invert_stream(const Inversion& inv, StreamPtr in, const Annotation& want) {
  if ((inv.kind == InversionKind::LeftImp || inv.kind == InversionKind::RightImp ||
       inv.kind == InversionKind::UnImp) &&
      !inv.pivot.is(FormulaKind::Imp))
    throw ShapeError("inversion pivot must be an implication");
  // The projection cases hand back a premise head verbatim, so the input must
  // already sit at the requested annotation.
  if (in->ann() != want) in = wk_stream({}, {}, std::move(in), want);
  Sequent goal = detail::inverted_goal(inv, in->goal());
  return StreamNode::lazy(goal, want, "invert", [=](StreamCtx& ctx) -> StreamHead {
    const StreamHead& h = in->force(ctx);
    // Pivot principal: the inversion is a projection to one premise.
    if (h.rule.kind == RuleKind::ImpL && h.rule.principal == inv.pivot &&
        inv.kind == InversionKind::LeftImp)
      return h.premises[0]->force(ctx);
    if (h.rule.kind == RuleKind::ImpL && h.rule.principal == inv.pivot &&
        inv.kind == InversionKind::RightImp)
      return h.premises[1]->force(ctx);
    if (h.rule.kind == RuleKind::ImpR && h.rule.principal == inv.pivot &&
        inv.kind == InversionKind::UnImp)
      return h.premises[0]->force(ctx);
    switch (h.rule.kind) {
      case RuleKind::AxP:
      case RuleKind::AxBot:
        return StreamHead{h.rule, {}};
      case RuleKind::Box:
      case RuleKind::BoxPlus: {
        // The pivot lives in a residual zone; premises are untouched.
        std::vector<ChildMaker> makers;
        for (const auto& c : h.premises) makers.push_back(reuse(c));
        return make_head(goal, want, h.rule, makers);
      }
      default: {
        std::vector<ChildMaker> makers;
        for (const auto& c : h.premises)
          makers.push_back([=](const Sequent&, const Annotation& ann) {
            return invert_stream(inv, c, ann);
          });
        return make_head(goal, want, h.rule, makers);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Atomic contraction.

enum class Side { Left, Right };

inline StreamPtr ac_stream(Side side, const Formula& v, StreamPtr in,
                           const Annotation& want) {
  if (!v.is(FormulaKind::Var)) throw ShapeError("atomic contraction needs a variable");
  const Sequent& s = in->goal();
  Sequent goal = s;
  auto& zone = side == Side::Left ? goal.gamma : goal.delta;
  if (zone.count(v) < 2)
    throw ShapeError("variable " + print_formula(v) + " not duplicated");
  zone.remove_one(v);
  return StreamNode::lazy(goal, want, "ac", [=](StreamCtx& ctx) -> StreamHead {
    const StreamHead& h = in->force(ctx);
    switch (h.rule.kind) {
      case RuleKind::AxP:
      case RuleKind::AxBot:
        return StreamHead{h.rule, {}};
      case RuleKind::Box:
      case RuleKind::BoxPlus: {
        std::vector<ChildMaker> makers;
        for (const auto& c : h.premises) makers.push_back(reuse(c));
        return make_head(goal, want, h.rule, makers);
      }
      default: {
        std::vector<ChildMaker> makers;
        for (const auto& c : h.premises)
          makers.push_back([=](const Sequent&, const Annotation& ann) {
            return ac_stream(side, v, c, ann);
          });
        return make_head(goal, want, h.rule, makers);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Cyclic-proof wrappers: back-link targets may lie inside the rewritten
// region, so the graph versions go through the stream view and re-regularize.

namespace detail {

inline Annotation checked_annotation(const CyclicProof& p) {
  CheckResult r = check_proof_auto(p);
  if (!r.valid)
    throw ShapeError(std::string("input proof is invalid: ") + fault_name(r.fault));
  return r.annotation;
}

inline CyclicProof rewrap(const CyclicProof& p,
                          const std::function<StreamPtr(StreamPtr, const Annotation&)>& op,
                          Fuel fuel) {
  Annotation ann = checked_annotation(p);
  StreamCtx ctx{p.sigma, fuel.budget};
  return regularize(op(stream_of(p, ann), ann), ctx);
}

}  // namespace detail

inline CyclicProof weaken(const Multiset& phi, const Multiset& psi, const CyclicProof& p,
                          Fuel fuel = {}) {
  return detail::rewrap(
      p,
      [&](StreamPtr s, const Annotation& ann) { return wk_stream(phi, psi, s, ann); },
      fuel);
}

inline CyclicProof invert(const Inversion& inv, const CyclicProof& p, Fuel fuel = {}) {
  return detail::rewrap(
      p,
      [&](StreamPtr s, const Annotation& ann) { return invert_stream(inv, s, ann); },
      fuel);
}

inline CyclicProof atomic_contract(Side side, const Formula& v, const CyclicProof& p,
                                   Fuel fuel = {}) {
  return detail::rewrap(
      p,
      [&](StreamPtr s, const Annotation& ann) { return ac_stream(side, v, s, ann); },
      fuel);
}

}  // namespace kplus

#endif
