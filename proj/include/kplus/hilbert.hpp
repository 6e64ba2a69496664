// Hilbert-style derivations for the logic of transitive closure: axiom
// recognition, derivation checking with boxed-leaf tracking, and the two
// translations between derivations and cyclic sequent proofs.

#ifndef KPLUS_HILBERT_HPP
#define KPLUS_HILBERT_HPP

#include "cutelim.hpp"

namespace kplus {

// ---------------------------------------------------------------------------
// Derivations.

enum class HKind : std::uint8_t { Taut, Ax2, Ax3, Ax4, Ax5, Assume, MP, Nec };

inline const char* hkind_name(HKind k) {
  switch (k) {
    case HKind::Taut: return "taut";
    case HKind::Ax2: return "ax2";
    case HKind::Ax3: return "ax3";
    case HKind::Ax4: return "ax4";
    case HKind::Ax5: return "ax5";
    case HKind::Assume: return "assume";
    case HKind::MP: return "mp";
    case HKind::Nec: return "nec";
  }
  return "?";
}

struct HilbertDerivation;
using HDeriv = std::shared_ptr<const HilbertDerivation>;

struct HilbertDerivation {
  HKind kind;
  Formula formula;              // leaves: the stated formula / axiom instance
  std::vector<HDeriv> premises; // mp: [proof of B, proof of B -> A]; nec: [proof of A]
};

inline HDeriv hd_leaf(HKind k, Formula f) {
  return std::make_shared<HilbertDerivation>(HilbertDerivation{k, std::move(f), {}});
}
inline HDeriv hd_mp(HDeriv b, HDeriv b_imp_a) {
  return std::make_shared<HilbertDerivation>(
      HilbertDerivation{HKind::MP, {}, {std::move(b), std::move(b_imp_a)}});
}
inline HDeriv hd_nec(HDeriv a) {
  return std::make_shared<HilbertDerivation>(
      HilbertDerivation{HKind::Nec, {}, {std::move(a)}});
}

// Conclusion determined by the tree shape; null on malformed mp.
inline Formula conclusion_of(const HDeriv& d) {
  switch (d->kind) {
    case HKind::MP: {
      Formula f = conclusion_of(d->premises[1]);
      return f.is(FormulaKind::Imp) ? f.right() : Formula();
    }
    case HKind::Nec:
      return Formula::box_plus(conclusion_of(d->premises[0]));
    default:
      return d->formula;
  }
}

// ---------------------------------------------------------------------------
// Propositional tautologies over variables and opaque modal atoms.

class TooManyAtoms : public std::runtime_error {
 public:
  explicit TooManyAtoms(std::size_t n)
      : std::runtime_error("tautology check over " + std::to_string(n) +
                           " atoms exceeds the cap of 20") {}
};

namespace detail {

inline void collect_atoms(const Formula& f, std::set<Formula, FormulaLess>& atoms) {
  switch (f.kind()) {
    case FormulaKind::Bot:
      return;
    case FormulaKind::Imp:
      collect_atoms(f.left(), atoms);
      collect_atoms(f.right(), atoms);
      return;
    default:
      atoms.insert(f);  // variables and []-/[+]-rooted subformulas are opaque
  }
}

inline bool eval_bool(const Formula& f, const std::vector<Formula>& atoms,
                      std::uint32_t bits) {
  switch (f.kind()) {
    case FormulaKind::Bot:
      return false;
    case FormulaKind::Imp:
      return !eval_bool(f.left(), atoms, bits) || eval_bool(f.right(), atoms, bits);
    default: {
      auto it = std::lower_bound(atoms.begin(), atoms.end(), f, FormulaLess{});
      return (bits >> (it - atoms.begin())) & 1u;
    }
  }
}

}  // namespace detail

inline bool is_tautology(const Formula& f) {
  std::set<Formula, FormulaLess> atom_set;
  detail::collect_atoms(f, atom_set);
  if (atom_set.size() > 20) throw TooManyAtoms(atom_set.size());
  std::vector<Formula> atoms(atom_set.begin(), atom_set.end());
  std::uint32_t limit = 1u << atoms.size();
  for (std::uint32_t bits = 0; bits < limit; ++bits)
    if (!detail::eval_bool(f, atoms, bits)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Axiom instances.

inline Formula ax2_instance(const Formula& a, const Formula& b) {
  return Formula::imp(Formula::box(Formula::imp(a, b)),
                      Formula::imp(Formula::box(a), Formula::box(b)));
}
inline Formula ax3_instance(const Formula& a, const Formula& b) {
  return Formula::imp(Formula::box_plus(Formula::imp(a, b)),
                      Formula::imp(Formula::box_plus(a), Formula::box_plus(b)));
}
inline Formula ax4_instance(const Formula& a) {
  return Formula::imp(Formula::box_plus(a),
                      Formula::land(Formula::box(a), Formula::box(Formula::box_plus(a))));
}
inline Formula ax5_instance(const Formula& a) {
  return Formula::imp(
      Formula::land(Formula::box(a), Formula::box_plus(Formula::imp(a, Formula::box(a)))),
      Formula::box_plus(a));
}

namespace detail {

inline bool match_axiom(HKind k, const Formula& f) {
  if (!f.is(FormulaKind::Imp)) return false;
  switch (k) {
    case HKind::Ax2: {
      const Formula& l = f.left();
      if (!l.is(FormulaKind::Box) || !l.body().is(FormulaKind::Imp)) return false;
      return f == ax2_instance(l.body().left(), l.body().right());
    }
    case HKind::Ax3: {
      const Formula& l = f.left();
      if (!l.is(FormulaKind::BoxPlus) || !l.body().is(FormulaKind::Imp)) return false;
      return f == ax3_instance(l.body().left(), l.body().right());
    }
    case HKind::Ax4: {
      const Formula& l = f.left();
      if (!l.is(FormulaKind::BoxPlus)) return false;
      return f == ax4_instance(l.body());
    }
    case HKind::Ax5: {
      const Formula& r = f.right();
      if (!r.is(FormulaKind::BoxPlus)) return false;
      return f == ax5_instance(r.body());
    }
    default:
      return false;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Derivation checking. An assumption leaf is boxed when the path from the
// root to it crosses a nec node; boxed leaves draw from Sigma, the rest from
// Gamma.

enum class DerivFault { NotTautology, SchemaMismatch, BadMP, BadAssumption };

inline const char* deriv_fault_name(DerivFault f) {
  switch (f) {
    case DerivFault::NotTautology: return "NotTautology";
    case DerivFault::SchemaMismatch: return "SchemaMismatch";
    case DerivFault::BadMP: return "BadMP";
    case DerivFault::BadAssumption: return "BadAssumption";
  }
  return "?";
}

struct DerivResult {
  bool valid = false;
  Formula conclusion;
  DerivFault fault = DerivFault::SchemaMismatch;
  int node = -1;  // preorder index of the offending node

  explicit operator bool() const { return valid; }
};

namespace detail {

struct DerivChecker {
  const FormulaSet& sigma;
  const FormulaSet& gamma;
  DerivResult result;
  int counter = 0;

  std::optional<Formula> run(const HDeriv& d, bool boxed) {
    int idx = counter++;
    auto fail = [&](DerivFault f) -> std::optional<Formula> {
      if (result.node < 0) {
        result.fault = f;
        result.node = idx;
      }
      return std::nullopt;
    };
    switch (d->kind) {
      case HKind::Taut:
        if (!is_tautology(d->formula)) return fail(DerivFault::NotTautology);
        return d->formula;
      case HKind::Ax2:
      case HKind::Ax3:
      case HKind::Ax4:
      case HKind::Ax5:
        if (!match_axiom(d->kind, d->formula)) return fail(DerivFault::SchemaMismatch);
        return d->formula;
      case HKind::Assume:
        if (boxed ? !sigma.contains(d->formula) : !gamma.contains(d->formula))
          return fail(DerivFault::BadAssumption);
        return d->formula;
      case HKind::MP: {
        if (d->premises.size() != 2) return fail(DerivFault::BadMP);
        auto c0 = run(d->premises[0], boxed);
        auto c1 = run(d->premises[1], boxed);
        if (!c0 || !c1) return std::nullopt;
        if (!c1->is(FormulaKind::Imp) || !(c1->left() == *c0))
          return fail(DerivFault::BadMP);
        return c1->right();
      }
      case HKind::Nec: {
        if (d->premises.size() != 1) return fail(DerivFault::BadMP);
        auto c0 = run(d->premises[0], true);
        if (!c0) return std::nullopt;
        return Formula::box_plus(*c0);
      }
    }
    return std::nullopt;
  }
};

}  // namespace detail

inline DerivResult check_derivation(const HDeriv& d, const FormulaSet& sigma,
                                    const FormulaSet& gamma) {
  detail::DerivChecker checker{sigma, gamma, {}};
  auto c = checker.run(d, false);
  DerivResult r = checker.result;
  if (c) {
    r.valid = true;
    r.conclusion = *c;
    r.node = -1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Conjunction/disjunction folds: left-associative over canonical order,
// empty conjunction is true, empty disjunction is false.

inline Formula conj_fold(const Multiset& m) {
  auto fs = m.expanded();
  if (fs.empty()) return Formula::top();
  Formula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::land(out, fs[i]);
  return out;
}

inline Formula disj_fold(const Multiset& m) {
  auto fs = m.expanded();
  if (fs.empty()) return Formula::bot();
  Formula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::lor(out, fs[i]);
  return out;
}

inline Formula disj_fold(const std::vector<Formula>& sorted) {
  if (sorted.empty()) return Formula::bot();
  Formula out = sorted[0];
  for (std::size_t i = 1; i < sorted.size(); ++i) out = Formula::lor(out, sorted[i]);
  return out;
}

namespace detail {

// Recognizers for the /\ and \/ abbreviations.
inline std::optional<std::pair<Formula, Formula>> as_land(const Formula& f) {
  // a /\ b  ==  ((a -> (b -> false)) -> false)
  if (!f.is(FormulaKind::Imp) || !f.right().is(FormulaKind::Bot)) return std::nullopt;
  const Formula& l = f.left();
  if (!l.is(FormulaKind::Imp) || !l.right().is(FormulaKind::Imp)) return std::nullopt;
  if (!l.right().right().is(FormulaKind::Bot)) return std::nullopt;
  return std::make_pair(l.left(), l.right().left());
}

inline std::optional<std::pair<Formula, Formula>> as_lor(const Formula& f) {
  // a \/ b  ==  ((a -> false) -> b)
  if (!f.is(FormulaKind::Imp)) return std::nullopt;
  const Formula& l = f.left();
  if (!l.is(FormulaKind::Imp) || !l.right().is(FormulaKind::Bot)) return std::nullopt;
  return std::make_pair(l.left(), f.right());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Derived-rule builders. Every purely propositional step is a single
// tautology leaf discharged by modus ponens against the given premises.

namespace hd {

inline HDeriv taut(Formula f) { return hd_leaf(HKind::Taut, std::move(f)); }
inline HDeriv assume(Formula f) { return hd_leaf(HKind::Assume, std::move(f)); }
inline HDeriv ax2(const Formula& a, const Formula& b) {
  return hd_leaf(HKind::Ax2, ax2_instance(a, b));
}
inline HDeriv ax3(const Formula& a, const Formula& b) {
  return hd_leaf(HKind::Ax3, ax3_instance(a, b));
}
inline HDeriv ax4(const Formula& a) { return hd_leaf(HKind::Ax4, ax4_instance(a)); }
inline HDeriv ax5(const Formula& a) { return hd_leaf(HKind::Ax5, ax5_instance(a)); }

// From premises P1 ... Pk conclude `target` via the tautology
// P1 -> (P2 -> ... -> (Pk -> target)).
inline HDeriv by_taut(const std::vector<HDeriv>& prems, Formula target) {
  Formula leaf = target;
  for (auto it = prems.rbegin(); it != prems.rend(); ++it)
    leaf = Formula::imp(conclusion_of(*it), leaf);
  HDeriv d = taut(std::move(leaf));
  for (const auto& p : prems) d = hd_mp(p, d);
  return d;
}

inline HDeriv chain(const HDeriv& xy, const HDeriv& yz) {
  Formula x = conclusion_of(xy).left();
  Formula z = conclusion_of(yz).right();
  return by_taut({xy, yz}, Formula::imp(x, z));
}

// |- X -> Y  gives  |- [+]X -> [+]Y.
inline HDeriv boxplus_mono(const HDeriv& xy) {
  Formula f = conclusion_of(xy);
  HDeriv boxed = hd_nec(xy);
  HDeriv k = ax3(f.left(), f.right());
  return hd_mp(boxed, k);
}

// |- X  gives  |- []X  (through nec and the unfolding axiom).
inline HDeriv box_of(const HDeriv& x) {
  Formula f = conclusion_of(x);
  HDeriv plus = hd_nec(x);
  return by_taut({plus, ax4(f)}, Formula::box(f));
}

// |- X -> Y  gives  |- []X -> []Y.
inline HDeriv box_mono(const HDeriv& xy) {
  Formula f = conclusion_of(xy);
  HDeriv boxed = box_of(xy);
  HDeriv k = ax2(f.left(), f.right());
  return hd_mp(boxed, k);
}

// |- []u /\ []v -> [](u /\ v).
inline HDeriv box_pair(const Formula& u, const Formula& v) {
  Formula uv = Formula::land(u, v);
  HDeriv d1 = box_mono(taut(Formula::imp(u, Formula::imp(v, uv))));
  // d1: [](u) -> [](v -> u /\ v)
  HDeriv k = ax2(v, uv);
  return by_taut({d1, k},
                 Formula::imp(Formula::land(Formula::box(u), Formula::box(v)),
                              Formula::box(uv)));
}

// Given |- X -> []u for every leaf u of the fold structure of c, derive
// |- X -> []c. `leaf` resolves a leaf formula to its derivation.
inline HDeriv x_to_box(const Formula& x, const Formula& c,
                       const std::function<HDeriv(const Formula&)>& leaf) {
  if (HDeriv d = leaf(c)) return d;
  auto ab = detail::as_land(c);
  if (!ab) throw std::logic_error("no derivation for conjunct " + print_formula(c));
  HDeriv da = x_to_box(x, ab->first, leaf);
  HDeriv db = x_to_box(x, ab->second, leaf);
  HDeriv pair = box_pair(ab->first, ab->second);
  return by_taut({da, db, pair}, Formula::imp(x, Formula::box(c)));
}

// |- [](b /\ [+]b) -> [+]b, the coinduction step behind the unfolding axioms.
inline HDeriv box_nu(const Formula& b) {
  Formula w = Formula::land(b, Formula::box_plus(b));
  // w -> []w
  HDeriv unfold = ax4(b);
  HDeriv pair = box_pair(b, Formula::box_plus(b));
  HDeriv w_boxw = by_taut({unfold, pair}, Formula::imp(w, Formula::box(w)));
  HDeriv necd = hd_nec(w_boxw);
  HDeriv five = ax5(w);
  HDeriv boxw_plusw =
      by_taut({necd, five}, Formula::imp(Formula::box(w), Formula::box_plus(w)));
  HDeriv mono = boxplus_mono(taut(Formula::imp(w, b)));
  return by_taut({boxw_plusw, mono},
                 Formula::imp(Formula::box(w), Formula::box_plus(b)));
}

}  // namespace hd

// ---------------------------------------------------------------------------
// Hilbert derivations to cyclic sequent proofs.

namespace detail {

// Propositional expansion: decompose implications descending from the stated
// tautology, leaving the hypotheses untouched; close each branch with an
// axiom or an identity plug on a shared opaque atom.
inline int expand_taut(ProofBuilder& b, const Multiset& inert, const Multiset& s,
                       const Multiset& t) {
  Sequent goal{{}, inert.plus(s), t};
  for (const auto& [f, n] : t.entries())
    if (f.is(FormulaKind::Imp)) {
      RuleData rd;
      rd.kind = RuleKind::ImpR;
      rd.principal = f;
      int prem = expand_taut(b, inert, s.plus(f.left()), t.minus(f)->plus(f.right()));
      return b.add(rd, goal, {prem});
    }
  for (const auto& [f, n] : s.entries())
    if (f.is(FormulaKind::Imp)) {
      RuleData rd;
      rd.kind = RuleKind::ImpL;
      rd.principal = f;
      Multiset s0 = *s.minus(f);
      int lp = expand_taut(b, inert, s0.plus(f.right()), t);
      int rp = expand_taut(b, inert, s0, t.plus(f.left()));
      return b.add(rd, goal, {lp, rp});
    }
  Multiset total = inert.plus(s);
  if (total.contains(Formula::bot())) {
    RuleData rd;
    rd.kind = RuleKind::AxBot;
    return b.add(rd, goal);
  }
  for (const auto& [f, n] : total.entries())
    if (f.is(FormulaKind::Var) && t.contains(f)) {
      RuleData rd;
      rd.kind = RuleKind::AxP;
      return b.add(rd, goal);
    }
  for (const auto& [f, n] : total.entries())
    if (t.contains(f))
      return build_identity(b, *total.minus(f), f, *t.minus(f));
  throw ShapeError("stated formula is not a tautology: open branch at " +
                   print_goal(goal));
}

}  // namespace detail

// Cyclic proof of Sigma ; Gamma => F for a propositional tautology F over
// opaque modal atoms.
inline CyclicProof taut_proof(const FormulaSet& sigma, const Multiset& gamma,
                              const Formula& f) {
  ProofBuilder b(sigma);
  int root = detail::expand_taut(b, gamma, {}, Multiset{f});
  return b.finish(root);
}

// Proofs of the modal axiom schemata under an arbitrary hypothesis context.
inline CyclicProof ax2_proof(const FormulaSet& sigma, const Multiset& gamma,
                             const Formula& a, const Formula& bb) {
  ProofBuilder b(sigma);
  Formula ab = Formula::imp(a, bb);
  int lp = detail::build_identity(b, Multiset{a}, bb, {});
  int rp = detail::build_identity(b, {}, a, Multiset{bb});
  RuleData impl;
  impl.kind = RuleKind::ImpL;
  impl.principal = ab;
  int core = b.add(impl, Sequent{{}, Multiset{ab, a}, Multiset{bb}}, {lp, rp});
  RuleData box;
  box.kind = RuleKind::Box;
  box.principal = Formula::box(bb);
  box.lambda = Multiset{ab, a};
  int boxed = b.add(
      box,
      Sequent{{}, gamma.plus(Formula::box(ab)).plus(Formula::box(a)), Multiset{Formula::box(bb)}},
      {core});
  RuleData impr1;
  impr1.kind = RuleKind::ImpR;
  impr1.principal = Formula::imp(Formula::box(a), Formula::box(bb));
  int n1 = b.add(impr1, Sequent{{}, gamma.plus(Formula::box(ab)), Multiset{impr1.principal}},
                 {boxed});
  RuleData impr0;
  impr0.kind = RuleKind::ImpR;
  impr0.principal = ax2_instance(a, bb);
  int root = b.add(impr0, Sequent{{}, gamma, Multiset{impr0.principal}}, {n1});
  return b.finish(root);
}

inline CyclicProof ax3_proof(const FormulaSet& sigma, const Multiset& gamma,
                             const Formula& a, const Formula& bb) {
  ProofBuilder b(sigma);
  Formula ab = Formula::imp(a, bb);
  Formula pab = Formula::box_plus(ab);
  Formula pa = Formula::box_plus(a);
  Formula pb = Formula::box_plus(bb);
  Multiset ctx{ab, a, pab, pa};
  auto imp_left = [&]() {
    RuleData impl;
    impl.kind = RuleKind::ImpL;
    impl.principal = ab;
    int lp = detail::build_identity(b, Multiset{a, pab, pa}, bb, {});
    int rp = detail::build_identity(b, Multiset{pab, pa}, a, Multiset{bb});
    return b.add(impl, Sequent{{}, ctx, Multiset{bb}}, {lp, rp});
  };
  RuleData bp;
  bp.kind = RuleKind::BoxPlus;
  bp.principal = pb;
  bp.pi = Multiset{ab, a};
  Sequent loop_goal{{}, ctx, Multiset{pb}};
  int loop = b.reserve_id();
  int inner_left = imp_left();
  int back = b.add_backlink(loop_goal, loop);
  b.place(loop, bp, loop_goal, {inner_left, back});
  int outer_left = imp_left();
  int core = b.add(bp, Sequent{{}, gamma.plus(pab).plus(pa), Multiset{pb}},
                   {outer_left, loop});
  RuleData impr1;
  impr1.kind = RuleKind::ImpR;
  impr1.principal = Formula::imp(pa, pb);
  int n1 = b.add(impr1, Sequent{{}, gamma.plus(pab), Multiset{impr1.principal}}, {core});
  RuleData impr0;
  impr0.kind = RuleKind::ImpR;
  impr0.principal = ax3_instance(a, bb);
  int root = b.add(impr0, Sequent{{}, gamma, Multiset{impr0.principal}}, {n1});
  return b.finish(root);
}

inline CyclicProof ax4_proof(const FormulaSet& sigma, const Multiset& gamma,
                             const Formula& a) {
  ProofBuilder b(sigma);
  Formula pa = Formula::box_plus(a);
  Formula ba = Formula::box(a);
  Formula bpa = Formula::box(pa);
  Formula w = Formula::land(ba, bpa);             // (ba -> (bpa -> false)) -> false
  Formula x = w.left();                           // ba -> (bpa -> false)
  // right branch: Gamma, [+]a => []a, false
  RuleData boxr;
  boxr.kind = RuleKind::Box;
  boxr.principal = ba;
  boxr.pi = Multiset{a};
  int id_a = detail::build_identity(b, Multiset{pa}, a, {});
  int n6 = b.add(boxr, Sequent{{}, gamma.plus(pa), Multiset{ba, Formula::bot()}}, {id_a});
  // left branch: Gamma, [+]a, [][+]a -> false => false
  RuleData boxr2;
  boxr2.kind = RuleKind::Box;
  boxr2.principal = bpa;
  boxr2.pi = Multiset{a};
  int id_pa = detail::build_identity(b, Multiset{a}, pa, {});
  int n4 = b.add(boxr2, Sequent{{}, gamma.plus(pa), Multiset{bpa, Formula::bot()}}, {id_pa});
  RuleData axbot;
  axbot.kind = RuleKind::AxBot;
  int n3l = b.add(axbot, Sequent{{}, gamma.plus(pa).plus(Formula::bot()), Multiset{Formula::bot()}});
  RuleData impl3;
  impl3.kind = RuleKind::ImpL;
  impl3.principal = Formula::imp(bpa, Formula::bot());
  int n3 = b.add(impl3,
                 Sequent{{}, gamma.plus(pa).plus(impl3.principal), Multiset{Formula::bot()}},
                 {n3l, n4});
  RuleData impl2;
  impl2.kind = RuleKind::ImpL;
  impl2.principal = x;
  int n2 = b.add(impl2, Sequent{{}, gamma.plus(pa).plus(x), Multiset{Formula::bot()}},
                 {n3, n6});
  RuleData impr1;
  impr1.kind = RuleKind::ImpR;
  impr1.principal = w;
  int n1 = b.add(impr1, Sequent{{}, gamma.plus(pa), Multiset{w}}, {n2});
  RuleData impr0;
  impr0.kind = RuleKind::ImpR;
  impr0.principal = ax4_instance(a);
  int root = b.add(impr0, Sequent{{}, gamma, Multiset{impr0.principal}}, {n1});
  return b.finish(root);
}

inline CyclicProof ax5_proof(const FormulaSet& sigma, const Multiset& gamma,
                             const Formula& a) {
  ProofBuilder b(sigma);
  Formula ba = Formula::box(a);
  Formula g = Formula::imp(a, ba);
  Formula pg = Formula::box_plus(g);
  Formula pa = Formula::box_plus(a);
  Formula w = Formula::land(ba, pg);
  Formula x = w.left();  // ba -> (pg -> false)
  RuleData bp;
  bp.kind = RuleKind::BoxPlus;
  bp.principal = pa;
  bp.lambda = Multiset{a};
  bp.pi = Multiset{g};
  // inner loop: a, []a, [+]g => [+]a
  Sequent r_goal{{}, Multiset{a, ba, pg}, Multiset{pa}};
  Sequent t_goal{{}, Multiset{a, g, pg}, Multiset{pa}};
  int r = b.reserve_id();
  int back = b.add_backlink(r_goal, r);
  int sig1 = detail::build_identity(b, Multiset{pg}, a, Multiset{pa});
  RuleData impl_g;
  impl_g.kind = RuleKind::ImpL;
  impl_g.principal = g;
  int t_r = b.add(impl_g, t_goal, {back, sig1});
  int sig0 = detail::build_identity(b, Multiset{g, pg}, a, {});
  b.place(r, bp, r_goal, {sig0, t_r});
  // outer spine
  int sig0_outer = detail::build_identity(b, Multiset{g, pg}, a, {});
  int sig1_outer = detail::build_identity(b, Multiset{pg}, a, Multiset{pa});
  int t = b.add(impl_g, t_goal, {r, sig1_outer});
  int core = b.add(bp, Sequent{{}, gamma.plus(ba).plus(pg), Multiset{Formula::bot(), pa}},
                   {sig0_outer, t});
  RuleData impr3;
  impr3.kind = RuleKind::ImpR;
  impr3.principal = Formula::imp(pg, Formula::bot());
  int n3 = b.add(impr3, Sequent{{}, gamma.plus(ba), Multiset{impr3.principal, pa}}, {core});
  RuleData impr2;
  impr2.kind = RuleKind::ImpR;
  impr2.principal = x;
  int n2 = b.add(impr2, Sequent{{}, gamma, Multiset{x, pa}}, {n3});
  RuleData axbot;
  axbot.kind = RuleKind::AxBot;
  int nbot = b.add(axbot, Sequent{{}, gamma.plus(Formula::bot()), Multiset{pa}});
  RuleData impl_w;
  impl_w.kind = RuleKind::ImpL;
  impl_w.principal = w;
  int n1 = b.add(impl_w, Sequent{{}, gamma.plus(w), Multiset{pa}}, {nbot, n2});
  RuleData impr0;
  impr0.kind = RuleKind::ImpR;
  impr0.principal = ax5_instance(a);
  int root = b.add(impr0, Sequent{{}, gamma, Multiset{impr0.principal}}, {n1});
  return b.finish(root);
}

namespace detail {

inline void collect_assumptions(const HDeriv& d, FormulaSet& out) {
  if (d->kind == HKind::Assume) out.insert(d->formula);
  for (const auto& p : d->premises) collect_assumptions(p, out);
}

struct HilbertToSequent {
  const FormulaSet& sigma;

  StreamPtr translate(const HDeriv& d, const Multiset& gamma) {
    const Annotation circ = Annotation::circle();
    switch (d->kind) {
      case HKind::Assume: {
        auto g0 = gamma.minus(d->formula);
        if (!g0) throw ShapeError("assumption not among the hypotheses");
        return stream_of(identity_proof(sigma, *g0, d->formula, {}), circ);
      }
      case HKind::Taut:
        return stream_of(taut_proof(sigma, gamma, d->formula), circ);
      case HKind::Ax2: {
        const Formula& body = d->formula.left().body();
        return stream_of(ax2_proof(sigma, gamma, body.left(), body.right()), circ);
      }
      case HKind::Ax3: {
        const Formula& body = d->formula.left().body();
        return stream_of(ax3_proof(sigma, gamma, body.left(), body.right()), circ);
      }
      case HKind::Ax4:
        return stream_of(ax4_proof(sigma, gamma, d->formula.left().body()), circ);
      case HKind::Ax5:
        return stream_of(ax5_proof(sigma, gamma, d->formula.right().body()), circ);
      case HKind::MP: {
        Formula ba = conclusion_of(d->premises[1]);
        Formula a = ba.right();
        StreamPtr p0 = translate(d->premises[0], gamma);
        StreamPtr p1 = translate(d->premises[1], gamma);
        StreamPtr left = wk_stream({}, Multiset{a}, p1, circ);
        StreamPtr ax_a = stream_of(identity_proof(sigma, gamma, a, {}), circ);
        StreamPtr right_r = wk_stream({}, Multiset{a}, p0, circ);
        RuleData impl;
        impl.kind = RuleKind::ImpL;
        impl.principal = ba;
        Sequent impl_goal{sigma, gamma.plus(ba), Multiset{a}};
        StreamPtr impl_node =
            StreamNode::ready(impl_goal, circ, StreamHead{impl, {ax_a, right_r}});
        RuleData cut;
        cut.kind = RuleKind::Cut;
        cut.cut_formula = ba;
        Sequent goal{sigma, gamma, Multiset{a}};
        return StreamNode::ready(goal, circ, StreamHead{cut, {left, impl_node}});
      }
      case HKind::Nec: {
        FormulaSet s0;
        collect_assumptions(d->premises[0], s0);
        Multiset s0m = s0.as_multiset();
        Formula a0 = conclusion_of(d->premises[0]);
        Formula pa = Formula::box_plus(a0);
        StreamPtr p0 = translate(d->premises[0], s0m);
        RuleData rd;
        rd.kind = RuleKind::BoxPlus;
        rd.principal = pa;
        rd.sigma0 = s0;
        Sequent loop_goal{sigma, s0m, Multiset{pa}};
        StreamPtr loop = StreamNode::fixpoint(
            loop_goal, Annotation::of(a0), "nu",
            [rd, p0](StreamCtx&, const StreamPtr& self) {
              return StreamHead{rd, {p0, self}};
            });
        Sequent goal{sigma, gamma, Multiset{pa}};
        return StreamNode::ready(goal, circ, StreamHead{rd, {p0, loop}});
      }
    }
    throw ShapeError("malformed derivation");
  }
};

}  // namespace detail

// Cyclic proof (with cuts) of  Sigma ; Gamma => A  from a derivation of A.
inline CyclicProof hilbert_to_sequent(const HDeriv& d, const FormulaSet& sigma,
                                      const Multiset& gamma, Fuel fuel = {}) {
  FormulaSet gamma_set = FormulaSet::of(gamma.expanded());
  DerivResult dr = check_derivation(d, sigma, gamma_set);
  if (!dr.valid)
    throw ShapeError(std::string("derivation is invalid: ") + deriv_fault_name(dr.fault));
  detail::HilbertToSequent tr{sigma};
  StreamCtx ctx{sigma, fuel.budget};
  return regularize(tr.translate(d, gamma), ctx);
}

// ---------------------------------------------------------------------------
// Cyclic sequent proofs to Hilbert derivations.

namespace detail {

struct SequentToHilbert {
  const CyclicProof& p;
  std::map<std::pair<int, Annotation>, HDeriv> memo;
  std::set<std::pair<int, Annotation>> in_progress;

  static Formula seq_target(const Sequent& s) {
    return Formula::imp(conj_fold(s.gamma), disj_fold(s.delta));
  }

  // |- conj(Gamma) -> disj(Delta) for the unfolding rooted at this node.
  HDeriv go(int id, const Annotation& ann) {
    id = resolve(p, id);
    auto key = std::make_pair(id, ann);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (!in_progress.insert(key).second)
      throw std::logic_error("cyclic dependency in derivation extraction");
    const ProofNode& n = p.at(id);
    HDeriv out;
    if (n.rule.kind == RuleKind::AxP || n.rule.kind == RuleKind::AxBot)
      out = hd::taut(seq_target(n.goal));
    else if (ann.is_circle())
      out = circle_case(id);
    else
      out = formula_case(id, ann.formula());
    in_progress.erase(key);
    memo[key] = out;
    return out;
  }

  // From |- conj(Theta) -> z, where Theta is the premise context of a modal
  // rule, derive |- conj([]Lambda + [+]Pi) -> []z: discharge Sigma0 with
  // assumption leaves (boxed by the nec inside box_mono), box the residual
  // implication, and fold the boxed context back together.
  HDeriv box_route(const RuleData& rd, const HDeriv& theta_imp_z, const Formula& z) {
    Multiset theta_res = rd.lambda.plus(rd.pi).plus(box_plussed(rd.pi));
    Formula conj_res = conj_fold(theta_res);
    HDeriv d2;
    if (rd.sigma0.empty()) {
      d2 = theta_imp_z;
    } else {
      std::vector<HDeriv> prems{theta_imp_z};
      for (const auto& s : rd.sigma0.items()) prems.push_back(hd::assume(s));
      d2 = hd::by_taut(prems, Formula::imp(conj_res, z));
    }
    HDeriv d3 = hd::box_mono(d2);  // [](conj_res) -> []z
    Multiset xs = boxed(rd.lambda).plus(box_plussed(rd.pi));
    Formula x = conj_fold(xs);
    HDeriv d4;
    if (theta_res.empty()) {
      HDeriv box_top = hd::by_taut({hd_nec(hd::taut(Formula::top())), hd::ax4(Formula::top())},
                                   Formula::box(Formula::top()));
      d4 = hd::by_taut({box_top}, Formula::imp(x, Formula::box(conj_res)));
    } else {
      auto leaf = [&](const Formula& c) -> HDeriv {
        if (rd.lambda.contains(c)) return hd::taut(Formula::imp(x, Formula::box(c)));
        if (rd.pi.contains(c))
          return hd::by_taut({hd::ax4(c)}, Formula::imp(x, Formula::box(c)));
        if (c.is(FormulaKind::BoxPlus) && rd.pi.contains(c.body()))
          return hd::by_taut({hd::ax4(c.body())}, Formula::imp(x, Formula::box(c)));
        return nullptr;
      };
      d4 = hd::x_to_box(x, conj_res, leaf);
    }
    return hd::by_taut({d4, d3}, Formula::imp(x, Formula::box(z)));
  }

  HDeriv circle_case(int id) {
    const ProofNode& n = p.at(id);
    const Annotation circ = Annotation::circle();
    Formula target = seq_target(n.goal);
    switch (n.rule.kind) {
      case RuleKind::ImpL:
      case RuleKind::Cut: {
        HDeriv d0 = go(n.premises[0], circ);
        HDeriv d1 = go(n.premises[1], circ);
        return hd::by_taut({d0, d1}, target);
      }
      case RuleKind::ImpR:
        return hd::by_taut({go(n.premises[0], circ)}, target);
      case RuleKind::Box: {
        Formula body = n.rule.principal.body();
        HDeriv d = go(n.premises[0], circ);
        HDeriv route = box_route(n.rule, d, body);
        return hd::by_taut({route}, target);
      }
      case RuleKind::BoxPlus: {
        Formula body = n.rule.principal.body();
        HDeriv d0 = go(n.premises[0], circ);
        HDeriv d1 = go(n.premises[1], Annotation::of(body));
        Formula theta = conj_fold(p.at(resolve(p, n.premises[0])).goal.gamma);
        Formula w = Formula::land(body, Formula::box_plus(body));
        HDeriv dw = hd::by_taut({d0, d1}, Formula::imp(theta, w));
        HDeriv route = box_route(n.rule, dw, w);
        HDeriv nu = hd::box_nu(body);
        return hd::by_taut({route, nu}, target);
      }
      default:
        throw std::logic_error("unexpected rule in derivation extraction");
    }
  }

  HDeriv formula_case(int id, const Formula& c) {
    const ProofNode& root = p.at(id);
    const Formula box_plus_c = Formula::box_plus(c);

    // The class of this node: nodes reachable through premise edges of
    // impl/impr/cut and right [+]-premises whose body is the trace formula.
    std::vector<int> members;
    std::set<int> seen;
    std::vector<int> queue{id};
    while (!queue.empty()) {
      int a = queue.back();
      queue.pop_back();
      if (!seen.insert(a).second) continue;
      members.push_back(a);
      const ProofNode& n = p.at(a);
      for (std::size_t i = 0; i < n.premises.size(); ++i) {
        auto ek = edge_kind(n, n.premises[i]);
        if (ek == EdgeKind::ToCircle) continue;
        if (ek == EdgeKind::BoxPlusRight && !(n.rule.principal.body() == c)) continue;
        queue.push_back(resolve(p, n.premises[i]));
      }
    }
    std::sort(members.begin(), members.end());

    std::map<int, Formula> g_of;
    for (int a : members) {
      const Sequent& s = p.at(a).goal;
      auto rest = s.delta.minus(box_plus_c);
      if (!rest) throw std::logic_error("trace formula missing from succedent");
      g_of.emplace(a, Formula::land(conj_fold(s.gamma), Formula::neg(disj_fold(*rest))));
    }
    std::vector<Formula> gs;
    for (int a : members) gs.push_back(g_of.at(a));
    std::sort(gs.begin(), gs.end(), FormulaLess{});
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    Formula h = disj_fold(gs);
    Formula target_box = Formula::box(Formula::land(c, h));

    // |- G_a -> [](c /\ h) for every member, by recursion that bottoms out at
    // axioms and modal rules.
    std::map<int, HDeriv> derive_memo;
    std::function<HDeriv(int)> derive = [&](int a) -> HDeriv {
      if (auto it = derive_memo.find(a); it != derive_memo.end()) return it->second;
      const ProofNode& n = p.at(a);
      Formula ga = g_of.at(a);
      Formula goal_f = Formula::imp(ga, target_box);
      HDeriv out;
      switch (n.rule.kind) {
        case RuleKind::AxP:
        case RuleKind::AxBot:
          out = hd::taut(goal_f);
          break;
        case RuleKind::ImpR:
          out = hd::by_taut({derive(resolve(p, n.premises[0]))}, goal_f);
          break;
        case RuleKind::ImpL:
        case RuleKind::Cut:
          out = hd::by_taut({derive(resolve(p, n.premises[0])),
                             derive(resolve(p, n.premises[1]))},
                            goal_f);
          break;
        case RuleKind::Box: {
          Formula body = n.rule.principal.body();
          HDeriv d = go(n.premises[0], Annotation::circle());
          HDeriv route = box_route(n.rule, d, body);
          out = hd::by_taut({route}, goal_f);
          break;
        }
        case RuleKind::BoxPlus: {
          Formula body = n.rule.principal.body();
          if (body == c) {
            // The right premise stays in the class; its G is a disjunct of h,
            // so conj(Theta) -> h is purely propositional.
            HDeriv d0 = go(n.premises[0], Annotation::circle());
            Formula theta = conj_fold(p.at(resolve(p, n.premises[0])).goal.gamma);
            HDeriv d_ch = hd::by_taut({d0}, Formula::imp(theta, Formula::land(c, h)));
            HDeriv route = box_route(n.rule, d_ch, Formula::land(c, h));
            out = hd::by_taut({route}, goal_f);
          } else {
            HDeriv d0 = go(n.premises[0], Annotation::circle());
            HDeriv d1 = go(n.premises[1], Annotation::of(body));
            Formula theta = conj_fold(p.at(resolve(p, n.premises[0])).goal.gamma);
            Formula w = Formula::land(body, Formula::box_plus(body));
            HDeriv dw = hd::by_taut({d0, d1}, Formula::imp(theta, w));
            HDeriv route = box_route(n.rule, dw, w);
            HDeriv nu = hd::box_nu(body);
            out = hd::by_taut({route, nu}, goal_f);
          }
          break;
        }
        default:
          throw std::logic_error("unexpected rule in class derivation");
      }
      derive_memo[a] = out;
      return out;
    };

    std::map<Formula, HDeriv, FormulaLess> per_g;
    for (int a : members)
      if (!per_g.count(g_of.at(a))) per_g.emplace(g_of.at(a), derive(a));

    // h -> [](c /\ h), folded over the disjuncts.
    HDeriv dh = per_g.at(gs[0]);
    Formula folded = gs[0];
    for (std::size_t i = 1; i < gs.size(); ++i) {
      folded = Formula::lor(folded, gs[i]);
      dh = hd::by_taut({dh, per_g.at(gs[i])}, Formula::imp(folded, target_box));
    }

    // h -> [+]c via the unfolding axiom.
    Formula w = Formula::land(c, h);
    HDeriv s1 = hd::by_taut({dh}, Formula::imp(w, Formula::box(w)));
    HDeriv s2 = hd_nec(s1);
    HDeriv s3 = hd::ax5(w);
    HDeriv s4 = hd::by_taut({s2, s3}, Formula::imp(Formula::box(w), Formula::box_plus(w)));
    HDeriv mono = hd::boxplus_mono(hd::taut(Formula::imp(w, c)));
    HDeriv dc = hd::by_taut({dh, s4, mono}, Formula::imp(h, box_plus_c));

    return hd::by_taut({dc}, seq_target(root.goal));
  }
};

}  // namespace detail

// Derivation of  Sigma ; 0 |- conj(Gamma) -> disj(Delta)  from a valid cyclic
// proof of Sigma ; Gamma => Delta.
inline HDeriv sequent_to_hilbert(const CyclicProof& p, const Annotation& root_ann) {
  CheckResult r = check_proof(p, root_ann);
  if (!r.valid)
    throw ShapeError(std::string("input proof is invalid: ") + fault_name(r.fault));
  detail::SequentToHilbert tr{p, {}, {}};
  return tr.go(p.root, root_ann);
}

}  // namespace kplus

#endif

