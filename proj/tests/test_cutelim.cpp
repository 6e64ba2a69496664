#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace kt;

namespace {

// Regularizes a stream and checks it proves the expected goal, cut-free when
// the inputs were.
CyclicProof settle(StreamPtr s, const FormulaSet& sigma, std::int64_t fuel = 1000000) {
  StreamCtx ctx{sigma, fuel};
  return regularize(std::move(s), ctx);
}

}  // namespace

TEST_CASE("remove_cut on an atomic axiom pair") {
  Formula p = V("p");
  // left: ; p => p, p   right: ; p, p => p   cut result: ; p => p
  auto left = stream_of(single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p}, Multiset{p, p}}),
                        Annotation::circle());
  auto right = stream_of(single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p, p}, Multiset{p}}),
                         Annotation::circle());
  StreamPtr out = remove_cut(p, left, right, Annotation::circle());
  CyclicProof q = settle(out, {});
  CHECK(q.nodes.size() == 1);
  CHECK(q.at(q.root).rule.kind == RuleKind::AxP);
  CHECK(q.at(q.root).goal.gamma == Multiset{p});
  CHECK(q.at(q.root).goal.delta == Multiset{p});
}

TEST_CASE("remove_cut on a box-plus identity pair") {
  Formula pp = Formula::box_plus(V("p"));
  auto left = stream_of(identity_proof({}, {}, pp, Multiset{pp}), Annotation::circle());
  auto right = stream_of(identity_proof({}, Multiset{pp}, pp, {}), Annotation::circle());
  StreamPtr out = remove_cut(pp, left, right, Annotation::circle());
  CyclicProof q = settle(out, {});
  CheckResult r = check_proof_auto(q);
  REQUIRE(r.valid);
  CHECK(q.at(q.root).goal.gamma == Multiset{pp});
  CHECK(q.at(q.root).goal.delta == Multiset{pp});
  CHECK(cut_free(q));
  CHECK(slim(q));
}

TEST_CASE("remove_cut on an implication against an impl-rooted component") {
  Formula p = V("p"), q = V("q");
  Formula pq = Formula::imp(p, q);
  // left: ; p, (p->q) => (p->q), q  (identity, weakened)
  CyclicProof left_p = weaken(Multiset{p}, Multiset{q}, identity_proof({}, {}, pq, {}));
  // right: impl-rooted proof of ; p, (p->q), (p->q) => q
  ProofBuilder b({});
  int lp = kplus::detail::build_identity(b, Multiset{p, pq}, q, {});
  int rp = kplus::detail::build_identity(b, Multiset{pq}, p, Multiset{q});
  RuleData impl;
  impl.kind = RuleKind::ImpL;
  impl.principal = pq;
  int root = b.add(impl, Sequent{{}, Multiset{p, pq, pq}, Multiset{q}}, {lp, rp});
  CyclicProof right_p = b.finish(root);
  REQUIRE(check_proof_auto(right_p).valid);

  StreamPtr out = remove_cut(pq, stream_of(left_p, Annotation::circle()),
                             stream_of(right_p, Annotation::circle()), Annotation::circle());
  CyclicProof out_p = settle(out, {});
  CheckResult r = check_proof_auto(out_p);
  REQUIRE(r.valid);
  CHECK(out_p.at(out_p.root).goal.gamma == Multiset{p, pq});
  CHECK(out_p.at(out_p.root).goal.delta == Multiset{q});
  CHECK(cut_free(out_p));
}

TEST_CASE("remove_cut returns the left component on non-cut-pairs") {
  Formula p = V("p");
  auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p}, Multiset{p}});
  StreamPtr left = stream_of(ax, Annotation::circle());
  StreamPtr out = remove_cut(V("q"), left, left, Annotation::circle());
  CHECK(out == left);
}

namespace {

// Cut pairs over identity proofs and weakenings, with cut formulas covering
// every shape to nesting depth three.
struct GeneratedPair {
  Formula a;
  CyclicProof left, right;
  Sequent result;
};

std::vector<GeneratedPair> cut_pair_corpus() {
  std::vector<Formula> cut_formulas;
  Formula p = V("p"), q = V("q");
  cut_formulas.push_back(Formula::bot());
  cut_formulas.push_back(p);
  cut_formulas.push_back(Formula::imp(p, q));
  cut_formulas.push_back(Formula::box(p));
  cut_formulas.push_back(Formula::box_plus(p));
  cut_formulas.push_back(Formula::imp(Formula::box(p), Formula::box_plus(q)));
  cut_formulas.push_back(Formula::box(Formula::imp(p, q)));
  cut_formulas.push_back(Formula::box_plus(Formula::imp(p, Formula::box(p))));
  cut_formulas.push_back(Formula::box(Formula::box(p)));
  cut_formulas.push_back(Formula::box_plus(Formula::box_plus(p)));
  cut_formulas.push_back(Formula::imp(Formula::imp(p, q), Formula::bot()));
  cut_formulas.push_back(Formula::box_plus(Formula::box(p)));

  std::vector<std::pair<Multiset, Multiset>> contexts{
      {{}, {}},
      {Multiset{q}, {}},
      {{}, Multiset{q}},
      {Multiset{Formula::box(q)}, Multiset{p}},
      {Multiset{p, Formula::box_plus(q)}, Multiset{Formula::bot()}},
  };

  std::vector<GeneratedPair> out;
  for (const auto& a : cut_formulas) {
    for (const auto& [g, d] : contexts) {
      // Cut result: g, a => d, a. The left component proves g, a => a, (d, a),
      // the right one proves (g, a), a => d, a; both are weakened identities.
      GeneratedPair gp;
      gp.a = a;
      gp.left = weaken(g, d.plus(a), identity_proof({}, {}, a, {}));
      gp.right = weaken(g.plus(a), d, identity_proof({}, {}, a, {}));
      gp.result = Sequent{{}, g.plus(a), d.plus(a)};
      out.push_back(std::move(gp));

      // Variant where the extra succedent copy of a sits inside the identity
      // instead of the weakening, so the cut formula occurs both as principal
      // and as a side occurrence of the root rule.
      GeneratedPair gp2;
      gp2.a = a;
      gp2.left = weaken(g, d, identity_proof({}, {}, a, Multiset{a}));
      gp2.right = weaken(g.plus(a), d, identity_proof({}, {}, a, {}));
      gp2.result = Sequent{{}, g.plus(a), d.plus(a)};
      out.push_back(std::move(gp2));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("single-cut suite over a generated corpus") {
  auto corpus = cut_pair_corpus();
  REQUIRE(corpus.size() >= 100);
  for (const auto& gp : corpus) {
    INFO("cut formula " << print_formula(gp.a) << " over "
                        << print_goal(gp.result));
    REQUIRE(cut_result(gp.a, gp.left.at(gp.left.root).goal,
                       gp.right.at(gp.right.root).goal)
                .has_value());
    bool inputs_cutfree = cut_free(gp.left) && cut_free(gp.right);
    bool inputs_slim = slim(gp.left) && slim(gp.right);
    StreamPtr out = remove_cut(gp.a, stream_of(gp.left, Annotation::circle()),
                               stream_of(gp.right, Annotation::circle()),
                               Annotation::circle());
    CyclicProof q = settle(out, {});
    CheckResult r = check_proof_auto(q);
    REQUIRE(r.valid);
    CHECK(q.at(q.root).goal.gamma == gp.result.gamma);
    CHECK(q.at(q.root).goal.delta == gp.result.delta);
    if (inputs_cutfree) CHECK(cut_free(q));
    if (inputs_slim) CHECK(slim(q));
  }
}

TEST_CASE("eliminate_cuts is vacuous up to bisimulation on cut-free slim proofs") {
  CyclicProof ex1 = make_ex1();
  CyclicProof out = eliminate_cuts(ex1);
  CHECK(proof_equal(out, ex1));
}

TEST_CASE("eliminate_cuts on the canonical cut fixture") {
  Formula q = V("q");
  Formula a = Formula::box_plus(V("p"));
  CyclicProof id_q = identity_proof({}, {}, q, {});
  CyclicProof left = weaken({}, Multiset{a}, id_q);   // q => q, a
  CyclicProof right = weaken(Multiset{a}, {}, id_q);  // a, q => q
  ProofBuilder b({});
  // paste the two graphs under a cut
  std::map<int, int> remap_l, remap_r;
  for (const auto& [id, n] : left.nodes) remap_l[id] = b.reserve_id();
  for (const auto& [id, n] : left.nodes) {
    ProofNode m = n;
    std::vector<int> prem;
    for (int c : n.premises) prem.push_back(remap_l[c]);
    if (m.rule.kind == RuleKind::BackLink) {
      b.place(remap_l[id], m.rule, m.goal, {});
      b.set_target(remap_l[id], remap_l[m.target]);
    } else {
      b.place(remap_l[id], m.rule, m.goal, prem);
    }
  }
  for (const auto& [id, n] : right.nodes) remap_r[id] = b.reserve_id();
  for (const auto& [id, n] : right.nodes) {
    ProofNode m = n;
    std::vector<int> prem;
    for (int c : n.premises) prem.push_back(remap_r[c]);
    if (m.rule.kind == RuleKind::BackLink) {
      b.place(remap_r[id], m.rule, m.goal, {});
      b.set_target(remap_r[id], remap_r[m.target]);
    } else {
      b.place(remap_r[id], m.rule, m.goal, prem);
    }
  }
  RuleData cutrd;
  cutrd.kind = RuleKind::Cut;
  cutrd.cut_formula = a;
  int root = b.add(cutrd, Sequent{{}, Multiset{q}, Multiset{q}},
                   {remap_l[left.root], remap_r[right.root]});
  CyclicProof with_cut = b.finish(root);
  REQUIRE(check_proof_auto(with_cut).valid);
  REQUIRE_FALSE(cut_free(with_cut));

  CyclicProof out = eliminate_cuts(with_cut);
  CheckResult r = check_proof_auto(out);
  REQUIRE(r.valid);
  CHECK(cut_free(out));
  CHECK(slim(out));
  CHECK(out.at(out.root).goal.gamma == Multiset{q});
  CHECK(out.at(out.root).goal.delta == Multiset{q});
}

TEST_CASE("idempotence on a slim cut-free corpus") {
  std::mt19937_64 rng(31);
  std::vector<CyclicProof> corpus{make_ex1(), make_ex1_unrolled()};
  for (int i = 0; i < 18; ++i) {
    Formula a = random_formula(rng, 4);
    corpus.push_back(identity_proof({}, random_multiset(rng, 2, 2), a,
                                    random_multiset(rng, 2, 2)));
  }
  for (const auto& p : corpus) {
    REQUIRE(cut_free(p));
    REQUIRE(slim(p));
    CyclicProof out = eliminate_cuts(p);
    CHECK(proof_equal(out, p));
  }
}

TEST_CASE("cross-cuts where the cut formula is consumed as a side formula") {
  Formula p = V("p");
  Formula pp = Formula::box_plus(p);
  // pi: a proof of [+]p, [+]p => ... whose root modal rule carries the second
  // [+]p as a side formula, so contracting the duplicate must cross-cut.
  SECTION("into a box rule") {
    ProofBuilder b({});
    RuleData box;
    box.kind = RuleKind::Box;
    box.principal = Formula::box(p);
    box.pi = Multiset{p};
    int prem = kplus::detail::build_identity(b, Multiset{pp}, p, {});
    int root = b.add(box, Sequent{{}, Multiset{pp, pp}, Multiset{Formula::box(p)}}, {prem});
    CyclicProof pi = b.finish(root);
    REQUIRE(check_proof_auto(pi).valid);
    CyclicProof out = contract(Multiset{pp, pp}, {}, pi);
    CheckResult r = check_proof_auto(out);
    REQUIRE(r.valid);
    CHECK(out.at(out.root).goal.gamma == Multiset{pp});
    CHECK(out.at(out.root).goal.delta == Multiset{Formula::box(p)});
    CHECK(cut_free(out));
    CHECK(slim(out));
  }
  SECTION("into a box-plus rule") {
    Formula ppp = Formula::box_plus(pp);
    ProofBuilder b({});
    RuleData bp;
    bp.kind = RuleKind::BoxPlus;
    bp.principal = ppp;
    bp.pi = Multiset{p};
    // inner loop: p, [+]p => [+][+]p
    Sequent inner_goal{{}, Multiset{p, pp}, Multiset{ppp}};
    int inner = b.reserve_id();
    int l1 = kplus::detail::build_identity(b, Multiset{p}, pp, {});
    int back = b.add_backlink(inner_goal, inner);
    b.place(inner, bp, inner_goal, {l1, back});
    int l0 = kplus::detail::build_identity(b, Multiset{p}, pp, {});
    int root = b.add(bp, Sequent{{}, Multiset{pp, pp}, Multiset{ppp}}, {l0, inner});
    CyclicProof pi = b.finish(root);
    REQUIRE(check_proof_auto(pi).valid);
    CyclicProof out = contract(Multiset{pp, pp}, {}, pi);
    CheckResult r = check_proof_auto(out);
    REQUIRE(r.valid);
    CHECK(out.at(out.root).goal.gamma == Multiset{pp});
    CHECK(out.at(out.root).goal.delta == Multiset{ppp});
    CHECK(cut_free(out));
    CHECK(slim(out));
    // The contracted proof still proves the transitivity unfolding; its
    // extracted derivation must check.
    HDeriv d = sequent_to_hilbert(out, check_proof_auto(out).annotation);
    CHECK(check_derivation(d, {}, {}).valid);
  }
}
