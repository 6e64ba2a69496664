#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace kt;

TEST_CASE("stream_of unfolds the annotated graph") {
  CyclicProof ex1 = make_ex1();
  StreamCtx ctx{{}, 1000};
  SECTION("root head and a three-period unrolling") {
    StreamPtr s = stream_of(ex1, Annotation::of(V("p")));
    const StreamHead& h = s->force(ctx);
    CHECK(h.rule.kind == RuleKind::BoxPlus);
    REQUIRE(h.premises.size() == 2);
    CHECK(h.premises[0]->ann() == Annotation::circle());
    CHECK(h.premises[1]->ann() == Annotation::of(V("p")));
    // Follow the loop: impl left premise jumps back to the root.
    StreamPtr cur = s;
    for (int period = 0; period < 3; ++period) {
      const StreamHead& bp = cur->force(ctx);
      REQUIRE(bp.rule.kind == RuleKind::BoxPlus);
      CHECK(bp.premises[0]->goal() == ex1.at(1).goal);
      StreamPtr impl = bp.premises[1];
      const StreamHead& hi = impl->force(ctx);
      REQUIRE(hi.rule.kind == RuleKind::ImpL);
      CHECK(hi.premises[1]->goal() == ex1.at(4).goal);
      cur = hi.premises[0];
      CHECK(cur->goal() == ex1.at(0).goal);
    }
  }
  SECTION("unfolding consumes no fuel") {
    StreamCtx tight{{}, 0};
    StreamPtr s = stream_of(ex1, Annotation::of(V("p")));
    CHECK_NOTHROW(s->force(tight));
  }
  SECTION("single axiom stream") {
    auto ax = single_axiom(RuleKind::AxP, Sequent{{}, Multiset{V("p")}, Multiset{V("p")}});
    StreamPtr s = stream_of(ax, Annotation::circle());
    const StreamHead& h = s->force(ctx);
    CHECK(h.rule.kind == RuleKind::AxP);
    CHECK(h.premises.empty());
  }
  SECTION("circle at the root still annotates the loop body") {
    StreamPtr s = stream_of(ex1, Annotation::circle());
    const StreamHead& h = s->force(ctx);
    CHECK(s->ann() == Annotation::circle());
    CHECK(h.premises[1]->ann() == Annotation::of(V("p")));
  }
}

TEST_CASE("forcing is memoized") {
  CyclicProof ex1 = make_ex1();
  StreamCtx ctx{{}, 1000};
  Multiset phi{V("z")};
  StreamPtr s = wk_stream(phi, {}, stream_of(ex1, Annotation::of(V("p"))),
                          Annotation::of(V("p")));
  auto before = ctx.remaining;
  s->force(ctx);
  auto after_first = ctx.remaining;
  CHECK(after_first < before);
  const StreamHead* h1 = &s->force(ctx);
  CHECK(ctx.remaining == after_first);
  const StreamHead* h2 = &s->force(ctx);
  CHECK(h1 == h2);  // the produced head never changes
}

TEST_CASE("fuel exhaustion is reported with the pending operation") {
  CyclicProof ex1 = make_ex1();
  StreamCtx ctx{{}, 0};
  StreamPtr s = wk_stream(Multiset{V("z")}, {}, stream_of(ex1, Annotation::of(V("p"))),
                          Annotation::of(V("p")));
  try {
    s->force(ctx);
    FAIL("expected fuel exhaustion");
  } catch (const FuelExhausted& e) {
    CHECK(e.op == "wk");
  }
}

TEST_CASE("regularize round-trips stream_of") {
  for (const auto& [proof, name] :
       std::initializer_list<std::pair<CyclicProof, const char*>>{
           {make_ex1(), "ex1"},
           {make_ex1_unrolled(), "unrolled"},
           {identity_proof({}, {}, Formula::box_plus(V("p")), {}), "id"},
           {identity_proof({}, Multiset{V("q")},
                           Formula::box_plus(Formula::box_plus(V("p"))), Multiset{V("r")}),
            "id-nested"}}) {
    INFO(name);
    CheckResult r = check_proof_auto(proof);
    REQUIRE(r.valid);
    StreamCtx ctx{proof.sigma, 100000};
    CyclicProof back = regularize(stream_of(proof, r.annotation), ctx);
    CHECK(check_proof(back, r.annotation).valid);
    CHECK(proof_equal(back, proof));
  }
}

TEST_CASE("regularize emits back-links within one class only") {
  // Nested distinct [+]-principals: the identity proof of [+][+]p repeats
  // right premises only after the annotation changes.
  CyclicProof p = identity_proof({}, {}, Formula::box_plus(Formula::box_plus(V("p"))), {});
  CheckResult r = check_proof_auto(p);
  REQUIRE(r.valid);
  StreamCtx ctx{{}, 100000};
  CyclicProof q = regularize(stream_of(p, r.annotation), ctx);
  CheckResult rq = check_proof(q, r.annotation);
  REQUIRE(rq.valid);
  auto classes = class_partition(q, rq.annotation);
  for (const auto& [id, n] : q.nodes) {
    if (n.rule.kind != RuleKind::BackLink) continue;
    CHECK(classes.cls.at(id) == classes.cls.at(n.target));
  }
}

TEST_CASE("regularize of a single-node stream") {
  auto ax = single_axiom(RuleKind::AxBot, Sequent{{}, Multiset{Formula::bot()}, {}});
  StreamCtx ctx{{}, 100};
  CyclicProof q = regularize(stream_of(ax, Annotation::circle()), ctx);
  CHECK(q.nodes.size() == 1);
  CHECK(proof_equal(q, ax));
}
