// Shared fixtures and generators for the test suites.

#ifndef KPLUS_TESTS_HELPERS_HPP
#define KPLUS_TESTS_HELPERS_HPP

#include <random>

#include "kplus/kplus.hpp"

namespace kt {

using namespace kplus;

inline Formula V(const std::string& n) { return Formula::var(n); }

// The running example: cyclic proof of  ; p, []p, [+](p -> []p) => [+]p
// with a back-link from the left premise of the inner impl to the root.
inline CyclicProof make_ex1() {
  Formula p = V("p");
  Formula f = Formula::imp(p, Formula::box(p));
  Formula bp = Formula::box(p);
  Formula pf = Formula::box_plus(f);
  Formula pp = Formula::box_plus(p);
  ProofBuilder b({});
  int root = b.reserve_id();  // 0
  RuleData axp;
  axp.kind = RuleKind::AxP;
  int left = b.add(axp, Sequent{{}, Multiset{p, f, pf}, Multiset{p}});  // 1
  int impl_id = b.reserve_id();                                         // 2
  Sequent root_goal{{}, Multiset{p, bp, pf}, Multiset{pp}};
  int back = b.add_backlink(root_goal, root);                              // 3
  int axr = b.add(axp, Sequent{{}, Multiset{p, pf}, Multiset{p, pp}});    // 4
  RuleData impl;
  impl.kind = RuleKind::ImpL;
  impl.principal = f;
  b.place(impl_id, impl, Sequent{{}, Multiset{p, f, pf}, Multiset{pp}}, {back, axr});
  RuleData bprd;
  bprd.kind = RuleKind::BoxPlus;
  bprd.principal = pp;
  bprd.lambda = Multiset{p};
  bprd.pi = Multiset{f};
  b.place(root, bprd, root_goal, {left, impl_id});
  return b.finish(root);
}

// EX1 unrolled one period, with the back-link retargeted one period deeper.
inline CyclicProof make_ex1_unrolled() {
  Formula p = V("p");
  Formula f = Formula::imp(p, Formula::box(p));
  Formula bp = Formula::box(p);
  Formula pf = Formula::box_plus(f);
  Formula pp = Formula::box_plus(p);
  Sequent root_goal{{}, Multiset{p, bp, pf}, Multiset{pp}};
  Sequent impl_goal{{}, Multiset{p, f, pf}, Multiset{pp}};
  Sequent axl_goal{{}, Multiset{p, f, pf}, Multiset{p}};
  Sequent axr_goal{{}, Multiset{p, pf}, Multiset{p, pp}};
  RuleData axp;
  axp.kind = RuleKind::AxP;
  RuleData impl;
  impl.kind = RuleKind::ImpL;
  impl.principal = f;
  RuleData bprd;
  bprd.kind = RuleKind::BoxPlus;
  bprd.principal = pp;
  bprd.lambda = Multiset{p};
  bprd.pi = Multiset{f};
  ProofBuilder b({});
  int root = b.reserve_id();
  int axl1 = b.add(axp, axl_goal);
  int impl1 = b.reserve_id();
  int inner = b.reserve_id();
  int axr1 = b.add(axp, axr_goal);
  b.place(impl1, impl, impl_goal, {inner, axr1});
  int axl2 = b.add(axp, axl_goal);
  int impl2 = b.reserve_id();
  int back = b.add_backlink(root_goal, inner);
  int axr2 = b.add(axp, axr_goal);
  b.place(impl2, impl, impl_goal, {back, axr2});
  b.place(inner, bprd, root_goal, {axl2, impl2});
  b.place(root, bprd, root_goal, {axl1, impl1});
  return b.finish(root);
}

// The non-proof from the running text: a box rule whose only cycle never
// crosses a right [+]-premise. The back-link is node 2.
inline CyclicProof make_exbad() {
  Formula p = V("p");
  Formula g = Formula::imp(Formula::box(p), p);
  Formula pg = Formula::box_plus(g);
  Formula bp = Formula::box(p);
  ProofBuilder b({});
  int root = b.reserve_id();     // 0
  int impl_id = b.reserve_id();  // 1
  Sequent root_goal{{}, Multiset{pg}, Multiset{bp, p}};
  int back = b.add_backlink(root_goal, root);  // 2
  RuleData axp;
  axp.kind = RuleKind::AxP;
  int axl = b.add(axp, Sequent{{}, Multiset{p, pg}, Multiset{p}});  // 3
  RuleData impl;
  impl.kind = RuleKind::ImpL;
  impl.principal = g;
  b.place(impl_id, impl, Sequent{{}, Multiset{g, pg}, Multiset{p}}, {axl, back});
  RuleData box;
  box.kind = RuleKind::Box;
  box.principal = bp;
  box.pi = Multiset{g};
  b.place(root, box, root_goal, {impl_id});
  return b.finish(root);
}

inline CyclicProof single_axiom(RuleKind k, Sequent goal) {
  ProofBuilder b(goal.sigma);
  RuleData rd;
  rd.kind = k;
  int root = b.add(rd, std::move(goal));
  return b.finish(root);
}

inline Formula random_formula(std::mt19937_64& rng, int depth) {
  static const std::vector<std::string> vars{"p", "q", "r"};
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
  switch (pick(rng)) {
    case 0:
      return Formula::var(vars[rng() % vars.size()]);
    case 1:
      return Formula::bot();
    case 2:
      return Formula::imp(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 3:
      return Formula::box(random_formula(rng, depth - 1));
    default:
      return Formula::box_plus(random_formula(rng, depth - 1));
  }
}

inline Multiset random_multiset(std::mt19937_64& rng, std::size_t max_size, int depth) {
  Multiset m;
  std::uniform_int_distribution<std::size_t> size(0, max_size);
  std::size_t n = size(rng);
  for (std::size_t i = 0; i < n; ++i) m.add(random_formula(rng, depth));
  return m;
}

inline Sequent random_sequent(std::mt19937_64& rng, int depth = 3) {
  return Sequent{{}, random_multiset(rng, 3, depth), random_multiset(rng, 3, depth)};
}

}  // namespace kt

#endif
