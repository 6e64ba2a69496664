#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace kt;

namespace {

void check_out(const CyclicProof& out, const Multiset& gamma, const Multiset& delta) {
  CheckResult r = check_proof_auto(out);
  REQUIRE(r.valid);
  CHECK(out.at(out.root).goal.gamma == gamma);
  CHECK(out.at(out.root).goal.delta == delta);
}

}  // namespace

TEST_CASE("identity proofs") {
  Formula p = V("p");
  SECTION("variable") {
    CyclicProof id = identity_proof({}, {}, p, {});
    CHECK(id.nodes.size() == 1);
    CHECK(id.at(id.root).rule.kind == RuleKind::AxP);
    CHECK(check_proof_auto(id).valid);
  }
  SECTION("false keeps falsum on the left") {
    CyclicProof id = identity_proof({}, Multiset{V("q")}, Formula::bot(), Multiset{V("r")});
    CHECK(id.at(id.root).rule.kind == RuleKind::AxBot);
    CHECK(id.at(id.root).goal.gamma == Multiset{V("q"), Formula::bot()});
    CHECK(id.at(id.root).goal.delta == Multiset{Formula::bot(), V("r")});
    CHECK(check_proof_auto(id).valid);
  }
  SECTION("box-plus closes with a back-link") {
    CyclicProof id = identity_proof({}, {}, Formula::box_plus(p), {});
    CheckResult r = check_proof_auto(id);
    REQUIRE(r.valid);
    CHECK(slim(id));
    CHECK(cut_free(id));
    CHECK(id.at(id.root).rule.kind == RuleKind::BoxPlus);
    CHECK(backlink_count(id) == 1);
  }
  SECTION("random formulas and contexts are valid, slim and cut-free") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 60; ++i) {
      Formula a = random_formula(rng, 5);
      Multiset g = random_multiset(rng, 2, 2);
      Multiset d = random_multiset(rng, 2, 2);
      CyclicProof id = identity_proof({}, g, a, d);
      INFO(print_formula(a));
      CHECK(check_proof_auto(id).valid);
      CHECK(slim(id));
      CHECK(cut_free(id));
      CHECK(id.at(id.root).goal.gamma == g.plus(a));
      CHECK(id.at(id.root).goal.delta == d.plus(a));
    }
  }
}

TEST_CASE("weakening") {
  Formula p = V("p");
  SECTION("running example gains a hypothesis") {
    CyclicProof ex1 = make_ex1();
    CyclicProof out = weaken(Multiset{V("q")}, {}, ex1);
    check_out(out, ex1.at(0).goal.gamma.plus(V("q")), ex1.at(0).goal.delta);
    CHECK(local_height(out) <= local_height(ex1));
    CHECK(slim(out));
    CHECK(cut_free(out));
  }
  SECTION("empty weakening is the same proof") {
    CyclicProof ex1 = make_ex1();
    CHECK(proof_equal(weaken({}, {}, ex1), ex1));
  }
  SECTION("axiom absorbs the extra succedent") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p}, Multiset{p}});
    CyclicProof out = weaken({}, Multiset{V("r")}, ax);
    CHECK(out.nodes.size() == 1);
    CHECK(out.at(out.root).rule.kind == RuleKind::AxP);
    check_out(out, Multiset{p}, Multiset{p, V("r")});
  }
}

TEST_CASE("inversions") {
  Formula p = V("p");
  SECTION("un-imp on the implication identity") {
    Formula f = Formula::imp(p, Formula::box(p));
    CyclicProof id = identity_proof({}, {}, f, {});
    CyclicProof out = invert(Inversion::un_imp(f), id);
    // Gamma, A => B, Delta with Gamma = {f}: the pivot's own left copy stays.
    check_out(out, Multiset{f, p}, Multiset{Formula::box(p)});
    CHECK(cut_free(out));
    CHECK(slim(out));
  }
  SECTION("un-bot removes a weakened falsum") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p}, Multiset{p}});
    CyclicProof weakened = weaken({}, Multiset{Formula::bot()}, ax);
    CyclicProof out = invert(Inversion::un_bot(), weakened);
    CHECK(proof_equal(out, ax));
  }
  SECTION("left-imp on an axiom replaces context") {
    Formula qr = Formula::imp(V("q"), V("r"));
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p, qr}, Multiset{p}});
    CyclicProof out = invert(Inversion::left_imp(qr), ax);
    CHECK(out.at(out.root).rule.kind == RuleKind::AxP);
    check_out(out, Multiset{p, V("r")}, Multiset{p});
  }
  SECTION("missing pivot is a shape error") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p}, Multiset{p}});
    CHECK_THROWS_AS(invert(Inversion::left_imp(Formula::imp(p, p)), ax), ShapeError);
  }
}

TEST_CASE("atomic contraction") {
  Formula p = V("p");
  SECTION("left") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p, p}, Multiset{p}});
    CyclicProof out = atomic_contract(Side::Left, p, ax);
    check_out(out, Multiset{p}, Multiset{p});
  }
  SECTION("right") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p}, Multiset{p, p}});
    CyclicProof out = atomic_contract(Side::Right, p, ax);
    check_out(out, Multiset{p}, Multiset{p});
  }
  SECTION("through an impl") {
    Formula qq = Formula::imp(V("q"), V("q"));
    ProofBuilder b({});
    RuleData axp;
    axp.kind = RuleKind::AxP;
    int lp = b.add(axp, Sequent{{}, Multiset{p, p, V("q")}, Multiset{p}});
    int rp = b.add(axp, Sequent{{}, Multiset{p, p}, Multiset{V("q"), p}});
    RuleData impl;
    impl.kind = RuleKind::ImpL;
    impl.principal = qq;
    int root = b.add(impl, Sequent{{}, Multiset{p, p, qq}, Multiset{p}}, {lp, rp});
    CyclicProof proof = b.finish(root);
    REQUIRE(check_proof_auto(proof).valid);
    CyclicProof out = atomic_contract(Side::Left, p, proof);
    check_out(out, Multiset{p, qq}, Multiset{p});
  }
  SECTION("insufficient multiplicity is a shape error") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p}, Multiset{p}});
    CHECK_THROWS_AS(atomic_contract(Side::Left, p, ax), ShapeError);
  }
}

TEST_CASE("contraction") {
  Formula p = V("p");
  SECTION("atomic duplicate") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{p, p}, Multiset{p}});
    CyclicProof out = contract(Multiset{p, p}, {}, ax);
    check_out(out, Multiset{p}, Multiset{p});
  }
  SECTION("vacuous contraction preserves the proof") {
    CyclicProof ex1 = make_ex1();
    CHECK(proof_equal(contract({}, {}, ex1), ex1));
  }
  SECTION("compound duplicate goes through a single cut") {
    Formula pp = Formula::box_plus(p);
    CyclicProof id = identity_proof({}, {}, pp, {});
    CyclicProof weakened = weaken(Multiset{pp}, {}, id);
    REQUIRE(weakened.at(weakened.root).goal.gamma == Multiset{pp, pp});
    CyclicProof out = contract(Multiset{pp, pp}, {}, weakened);
    check_out(out, Multiset{pp}, Multiset{pp});
    CHECK(cut_free(out));
    CHECK(slim(out));
  }
}

TEST_CASE("admissible operations preserve validity on a random corpus") {
  std::mt19937_64 rng(29);
  int cases = 0;
  while (cases < 200) {
    // Base proofs: identities under random contexts, optionally weakened.
    Formula a = random_formula(rng, 3);
    Multiset g = random_multiset(rng, 2, 2);
    Multiset d = random_multiset(rng, 2, 2);
    CyclicProof base = identity_proof({}, g, a, d);
    std::size_t h_before = local_height(base);
    bool was_cutfree = cut_free(base);
    bool was_slim = slim(base);
    const Sequent& root = base.at(base.root).goal;

    CyclicProof out;
    Multiset expect_gamma = root.gamma, expect_delta = root.delta;
    bool strongly_admissible = true;
    switch (rng() % 4) {
      case 0: {
        Multiset phi = random_multiset(rng, 2, 2);
        Multiset psi = random_multiset(rng, 2, 2);
        out = weaken(phi, psi, base);
        expect_gamma = root.gamma.plus(phi);
        expect_delta = root.delta.plus(psi);
        break;
      }
      case 1: {
        // Invert on the identity pivot when it is an implication.
        if (!a.is(FormulaKind::Imp)) continue;
        out = invert(Inversion::un_imp(a), base);
        expect_gamma = root.gamma.plus(a.left());
        expect_delta = root.delta.minus(a)->plus(a.right());
        break;
      }
      case 2: {
        Formula v = V("p");
        CyclicProof padded = weaken(Multiset{v, v}, {}, base);
        out = atomic_contract(Side::Left, v, padded);
        expect_gamma = root.gamma.plus(v);
        break;
      }
      default: {
        CyclicProof padded = weaken(Multiset{a}, {}, base);
        out = contract(Multiset{a, a}, {}, padded);
        strongly_admissible = false;
        break;
      }
    }
    INFO(print_formula(a));
    CheckResult r = check_proof_auto(out);
    REQUIRE(r.valid);
    CHECK(out.at(out.root).goal.gamma == expect_gamma);
    CHECK(out.at(out.root).goal.delta == expect_delta);
    CHECK(cut_free(out) == was_cutfree);
    CHECK(slim(out) == was_slim);
    if (strongly_admissible) CHECK(local_height(out) <= h_before);
    ++cases;
  }
}
