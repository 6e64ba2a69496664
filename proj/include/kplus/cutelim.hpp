// Single-cut removal and full cut elimination with slimming. remove_cut
// dispatches on the shape of the cut formula; the variable, box and
// box-plus removers are corecursive stream transformers, the implication
// remover is a composition of the smaller removers, and false is an
// inversion. eliminate_cuts maps a proof rule-by-rule, replacing cut nodes
// by remove_cut and slimming modal rules with contractions.

#ifndef KPLUS_CUTELIM_HPP
#define KPLUS_CUTELIM_HPP

#include "admissible.hpp"

namespace kplus {

// The cut result of a pair proving Gamma => A, Delta and Gamma, A => Delta.
inline std::optional<Sequent> cut_result(const Formula& a, const Sequent& left,
                                         const Sequent& right) {
  auto d = left.delta.minus(a);
  if (!d) return std::nullopt;
  auto g = right.gamma.minus(a);
  if (!g) return std::nullopt;
  if (left.gamma != *g || right.delta != *d) return std::nullopt;
  if (left.sigma != right.sigma) return std::nullopt;
  return Sequent{left.sigma, *g, *d};
}

StreamPtr remove_cut(const Formula& a, StreamPtr left, StreamPtr right,
                     const Annotation& want);

namespace detail {

// Fig. 3: the cut formula is a side formula of the last rule of the left
// component; the cut commutes into the left premises, with the matching
// inversion or weakening applied to the right component.
inline StreamHead commute_left(const Formula& a, const StreamHead& hl,
                               const StreamPtr& right, const Sequent& goal,
                               const Annotation& want) {
  switch (hl.rule.kind) {
    case RuleKind::Box:
    case RuleKind::BoxPlus: {
      std::vector<ChildMaker> makers;
      for (const auto& c : hl.premises) makers.push_back(reuse(c));
      return make_head(goal, want, hl.rule, makers);
    }
    case RuleKind::ImpR: {
      Formula p = hl.rule.principal;
      StreamPtr l0 = hl.premises[0];
      return make_head(goal, want, hl.rule,
                       {[=](const Sequent&, const Annotation& ann) {
                         return remove_cut(a, l0, invert_stream(Inversion::un_imp(p), right, ann),
                                           ann);
                       }});
    }
    case RuleKind::ImpL: {
      Formula p = hl.rule.principal;
      StreamPtr l0 = hl.premises[0], l1 = hl.premises[1];
      return make_head(
          goal, want, hl.rule,
          {[=](const Sequent&, const Annotation& ann) {
             return remove_cut(a, l0, invert_stream(Inversion::left_imp(p), right, ann), ann);
           },
           [=](const Sequent&, const Annotation& ann) {
             return remove_cut(a, l1, invert_stream(Inversion::right_imp(p), right, ann), ann);
           }});
    }
    case RuleKind::Cut: {
      Formula c = hl.rule.cut_formula;
      StreamPtr l0 = hl.premises[0], l1 = hl.premises[1];
      return make_head(goal, want, hl.rule,
                       {[=](const Sequent&, const Annotation& ann) {
                          return remove_cut(a, l0, wk_stream({}, Multiset{c}, right, ann), ann);
                        },
                        [=](const Sequent&, const Annotation& ann) {
                          return remove_cut(a, l1, wk_stream(Multiset{c}, {}, right, ann), ann);
                        }});
    }
    default:
      throw RuleShapeError("commute_left on an axiom");
  }
}

// Fig. 4: the cut formula is principal on the left but not a side formula of
// the last rule of the right component; the cut commutes into the right
// premises.
inline StreamHead commute_right(const Formula& a, const StreamHead& hr,
                                const StreamPtr& left, const Sequent& goal,
                                const Annotation& want) {
  switch (hr.rule.kind) {
    case RuleKind::Box:
    case RuleKind::BoxPlus: {
      std::vector<ChildMaker> makers;
      for (const auto& c : hr.premises) makers.push_back(reuse(c));
      return make_head(goal, want, hr.rule, makers);
    }
    case RuleKind::ImpR: {
      Formula p = hr.rule.principal;
      StreamPtr r0 = hr.premises[0];
      return make_head(goal, want, hr.rule,
                       {[=](const Sequent&, const Annotation& ann) {
                         return remove_cut(a, invert_stream(Inversion::un_imp(p), left, ann), r0,
                                           ann);
                       }});
    }
    case RuleKind::ImpL: {
      Formula p = hr.rule.principal;
      StreamPtr r0 = hr.premises[0], r1 = hr.premises[1];
      return make_head(
          goal, want, hr.rule,
          {[=](const Sequent&, const Annotation& ann) {
             return remove_cut(a, invert_stream(Inversion::left_imp(p), left, ann), r0, ann);
           },
           [=](const Sequent&, const Annotation& ann) {
             return remove_cut(a, invert_stream(Inversion::right_imp(p), left, ann), r1, ann);
           }});
    }
    case RuleKind::Cut: {
      Formula c = hr.rule.cut_formula;
      StreamPtr r0 = hr.premises[0], r1 = hr.premises[1];
      return make_head(goal, want, hr.rule,
                       {[=](const Sequent&, const Annotation& ann) {
                          return remove_cut(a, wk_stream({}, Multiset{c}, left, ann), r0, ann);
                        },
                        [=](const Sequent&, const Annotation& ann) {
                          return remove_cut(a, wk_stream(Multiset{c}, {}, left, ann), r1, ann);
                        }});
    }
    default:
      throw RuleShapeError("commute_right on an axiom");
  }
}

inline StreamHead initial_head(const Sequent& goal) {
  auto k = initial_kind(goal);
  if (!k) throw RuleShapeError("cut result is not an initial sequent");
  RuleData rd;
  rd.kind = *k;
  return StreamHead{rd, {}};
}

// The weakening prefixes that align the premise contexts of two modal
// instances for a cross-cut: everything the other side has and we lack.
struct CrossCtx {
  FormulaSet sigma0;   // joined
  Multiset lambda, pi; // joined (pointwise maximum)
  Multiset left_pad, right_pad;
  Multiset theta;      // joined premise context
};

inline CrossCtx cross_context(const RuleData& l, const FormulaSet& sigma0_r,
                              const Multiset& lambda_r, const Multiset& pi_r) {
  CrossCtx c;
  c.sigma0 = l.sigma0.set_union(sigma0_r);
  c.lambda = l.lambda.max_union(lambda_r);
  c.pi = l.pi.max_union(pi_r);
  auto pad = [](const FormulaSet& s0a, const Multiset& la, const Multiset& pa,
                const FormulaSet& s0b, const Multiset& lb, const Multiset& pb) {
    Multiset w = s0b.set_minus(s0a).as_multiset();
    w = w.plus(lb.minus_sat(la));
    Multiset pd = pb.minus_sat(pa);
    w = w.plus(pd).plus(box_plussed(pd));
    return w;
  };
  c.left_pad = pad(l.sigma0, l.lambda, l.pi, sigma0_r, lambda_r, pi_r);
  c.right_pad = pad(sigma0_r, lambda_r, pi_r, l.sigma0, l.lambda, l.pi);
  c.theta = c.sigma0.as_multiset().plus(c.lambda).plus(c.pi).plus(box_plussed(c.pi));
  return c;
}

// remove_cut for a propositional variable.
inline StreamPtr re_var(const Formula& a, StreamPtr left, StreamPtr right,
                        const Sequent& goal, const Annotation& want) {
  return StreamNode::lazy(goal, want, "re_var", [=](StreamCtx& ctx) -> StreamHead {
    const StreamHead& hl = left->force(ctx);
    if (hl.rule.kind == RuleKind::AxP || hl.rule.kind == RuleKind::AxBot) {
      if (initial_kind(goal)) return initial_head(goal);
      // The axiom went through the cut formula itself, so the antecedent
      // holds another copy of it: contract the right component.
      return ac_stream(Side::Left, a, right, want)->force(ctx);
    }
    return commute_left(a, hl, right, goal, want);
  });
}

// remove_cut for []B and [+]B; re_body removes cuts on the body.
inline StreamPtr re_modal(const Formula& a, StreamPtr left, StreamPtr right,
                          const Sequent& goal, const Annotation& want) {
  bool plus = a.is(FormulaKind::BoxPlus);
  const Formula body = a.body();
  return StreamNode::lazy(goal, want, plus ? "re_boxplus" : "re_box",
                          [=](StreamCtx& ctx) -> StreamHead {
    const StreamHead& hl = left->force(ctx);
    if (hl.rule.kind == RuleKind::AxP || hl.rule.kind == RuleKind::AxBot)
      return initial_head(goal);
    const StreamHead& hr = right->force(ctx);
    if (hr.rule.kind == RuleKind::AxP || hr.rule.kind == RuleKind::AxBot)
      return initial_head(goal);

    bool principal_left = hl.rule.kind == (plus ? RuleKind::BoxPlus : RuleKind::Box) &&
                          hl.rule.principal == a;
    if (!principal_left) return commute_left(a, hl, right, goal, want);

    bool side_right = is_modal(hr.rule.kind) &&
                      (plus ? hr.rule.pi.contains(body) : hr.rule.lambda.contains(body));
    if (!side_right) return commute_right(a, hr, left, goal, want);

    // Cross-cut: the cut formula is principal on the left and a side formula
    // of the modal rule on the right.
    if (plus && goal.delta.contains(a)) {
      // Another copy of [+]B sits in the succedent; reassemble the left rule
      // with one copy fewer.
      std::vector<ChildMaker> makers;
      for (const auto& c : hl.premises) makers.push_back(reuse(c));
      return make_head(goal, want, hl.rule, makers);
    }

    FormulaSet sigma0_r = hr.rule.sigma0;
    Multiset lambda_r = hr.rule.lambda;
    Multiset pi_r = hr.rule.pi;
    if (plus)
      pi_r.remove_one(body);
    else
      lambda_r.remove_one(body);
    CrossCtx cc = cross_context(hl.rule, sigma0_r, lambda_r, pi_r);

    RuleData out;
    out.kind = hr.rule.kind;
    out.principal = hr.rule.principal;
    out.sigma0 = cc.sigma0;
    out.lambda = cc.lambda;
    out.pi = cc.pi;

    StreamPtr l0 = hl.premises[0];
    StreamPtr l1 = plus ? hl.premises[1] : nullptr;
    std::vector<StreamPtr> rprem = hr.premises;

    // For each premise of the emitted modal rule, pad both components to the
    // joined context and cut out B (through a nested cut on [+]B first when
    // the left rule was a [+]).
    auto cross_premise = [=](const StreamPtr& rp) {
      return [=](const Sequent& prem_goal, const Annotation& ann) -> StreamPtr {
        Multiset succ = prem_goal.delta;
        StreamPtr lp0 = wk_stream(cc.left_pad, succ, l0, ann);
        StreamPtr rp_pad = wk_stream(cc.right_pad, {}, rp, ann);
        if (!plus) return remove_cut(body, lp0, rp_pad, ann);
        StreamPtr lp1 = wk_stream(cc.left_pad.plus(body), succ, l1, ann);
        StreamPtr inner = remove_cut(a, lp1, rp_pad, ann);
        return remove_cut(body, lp0, inner, ann);
      };
    };
    std::vector<ChildMaker> makers;
    for (const auto& rp : rprem) makers.push_back(cross_premise(rp));
    return make_head(goal, want, out, makers);
  });
}

}  // namespace detail

// Removes one cut between a proof of Gamma => A, Delta and a proof of
// Gamma, A => Delta, yielding a proof of Gamma => Delta. On inputs that do
// not form a cut pair with formula `a`, returns the left component.
inline StreamPtr remove_cut(const Formula& a, StreamPtr left, StreamPtr right,
                            const Annotation& want) {
  auto goal = cut_result(a, left->goal(), right->goal());
  if (!goal) return left;
  // Both components are consumed at the result annotation.
  left = wk_stream({}, {}, std::move(left), want);
  right = wk_stream({}, {}, std::move(right), want);
  switch (a.kind()) {
    case FormulaKind::Bot:
      return invert_stream(Inversion::un_bot(), left, want);
    case FormulaKind::Var:
      return detail::re_var(a, std::move(left), std::move(right), *goal, want);
    case FormulaKind::Imp: {
      const Formula b = a.left();
      const Formula c = a.right();
      StreamPtr s1 = wk_stream({}, Multiset{c}, invert_stream(Inversion::right_imp(a), right, want), want);
      StreamPtr s2 = invert_stream(Inversion::un_imp(a), left, want);
      StreamPtr s3 = remove_cut(b, s1, s2, want);
      StreamPtr s4 = invert_stream(Inversion::left_imp(a), right, want);
      return remove_cut(c, s3, s4, want);
    }
    case FormulaKind::Box:
    case FormulaKind::BoxPlus:
      return detail::re_modal(a, std::move(left), std::move(right), *goal, want);
  }
  return left;
}

// ---------------------------------------------------------------------------
// Contraction: removes all repetitions inside the designated zones, using
// atomic contraction on variables and single cuts against identity proofs on
// compound formulas.

namespace detail {

inline StreamPtr contract_one_left(const Formula& f, StreamPtr in, const Annotation& want) {
  if (f.is(FormulaKind::Var)) return ac_stream(Side::Left, f, in, want);
  auto g1 = in->goal().gamma.minus(f);
  auto g0 = g1 ? g1->minus(f) : std::nullopt;
  if (!g0) throw ShapeError("formula not duplicated in antecedent");
  CyclicProof id = identity_proof(in->goal().sigma, *g0, f, in->goal().delta);
  return remove_cut(f, stream_of(id, want), in, want);
}

inline StreamPtr contract_one_right(const Formula& f, StreamPtr in, const Annotation& want) {
  if (f.is(FormulaKind::Var)) return ac_stream(Side::Right, f, in, want);
  auto d1 = in->goal().delta.minus(f);
  auto d0 = d1 ? d1->minus(f) : std::nullopt;
  if (!d0) throw ShapeError("formula not duplicated in succedent");
  CyclicProof id = identity_proof(in->goal().sigma, in->goal().gamma, f, *d0);
  return remove_cut(f, in, stream_of(id, want), want);
}

}  // namespace detail

// Deduplicates the zone Phi within the antecedent and Psi within the
// succedent, canonical order, left zone first.
inline StreamPtr ctr_stream(const Multiset& phi, const Multiset& psi, StreamPtr in,
                            const Annotation& want) {
  StreamPtr cur = std::move(in);
  for (const auto& [f, n] : phi.entries())
    for (int i = 1; i < n; ++i) cur = detail::contract_one_left(f, cur, want);
  for (const auto& [f, n] : psi.entries())
    for (int i = 1; i < n; ++i) cur = detail::contract_one_right(f, cur, want);
  return cur;
}

inline CyclicProof contract(const Multiset& phi, const Multiset& psi, const CyclicProof& p,
                            Fuel fuel = {}) {
  if (!phi.subset_of(p.at(p.root).goal.gamma) || !psi.subset_of(p.at(p.root).goal.delta))
    throw ShapeError("contraction zones not contained in the endsequent");
  return detail::rewrap(
      p,
      [&](StreamPtr s, const Annotation& ann) { return ctr_stream(phi, psi, s, ann); },
      fuel);
}

// ---------------------------------------------------------------------------
// Full cut elimination with slimming.

inline StreamPtr ce_stream(StreamPtr in) {
  StreamPtr out = StreamNode::lazy(
      in->goal(), in->ann(), "ce", [in](StreamCtx& ctx) -> StreamHead {
        const StreamHead& h = in->force(ctx);
        switch (h.rule.kind) {
          case RuleKind::AxP:
          case RuleKind::AxBot:
            return StreamHead{h.rule, {}};
          case RuleKind::ImpL:
          case RuleKind::ImpR: {
            std::vector<ChildMaker> makers;
            for (const auto& c : h.premises)
              makers.push_back([c](const Sequent&, const Annotation&) { return ce_stream(c); });
            return make_head(in->goal(), in->ann(), h.rule, makers);
          }
          case RuleKind::Box:
          case RuleKind::BoxPlus: {
            RuleData slim_rule = h.rule;
            slim_rule.lambda = h.rule.lambda.deduped();
            slim_rule.pi = h.rule.pi.deduped();
            Multiset lam = h.rule.lambda, pi = h.rule.pi, bpi = box_plussed(h.rule.pi);
            std::vector<ChildMaker> makers;
            for (const auto& c : h.premises)
              makers.push_back([=](const Sequent&, const Annotation& ann) {
                StreamPtr s = ce_stream(c);
                s = ctr_stream(bpi, {}, s, ann);
                s = ctr_stream(pi, {}, s, ann);
                s = ctr_stream(lam, {}, s, ann);
                return s;
              });
            return make_head(in->goal(), in->ann(), slim_rule, makers);
          }
          case RuleKind::Cut: {
            StreamPtr r = remove_cut(h.rule.cut_formula, ce_stream(h.premises[0]),
                                     ce_stream(h.premises[1]), in->ann());
            return r->force(ctx);
          }
          default:
            throw RuleShapeError("unexpected back-link in a stream");
        }
      });
  out->set_origin(in->origin());
  return out;
}

inline CyclicProof eliminate_cuts(const CyclicProof& p, const Annotation& ann,
                                  Fuel fuel = {}) {
  CheckResult r = check_proof(p, ann);
  if (!r.valid)
    throw ShapeError(std::string("input proof is invalid: ") + fault_name(r.fault));
  StreamCtx ctx{p.sigma, fuel.budget};
  return regularize(ce_stream(stream_of(p, ann)), ctx);
}

inline CyclicProof eliminate_cuts(const CyclicProof& p, Fuel fuel = {}) {
  return eliminate_cuts(p, detail::checked_annotation(p), fuel);
}

}  // namespace kplus

#endif
