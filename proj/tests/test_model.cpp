#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include "doctest.h"
#include "gsmpdist/model.hpp"
#include "test_models.hpp"

using namespace gsmpdist;
using namespace gsmpdist::testing;

namespace {

bool mentions(const std::vector<Issue>& issues, const std::string& needle) {
  for (const auto& is : issues)
    if (is.message.find(needle) != std::string::npos ||
        is.path.find(needle) != std::string::npos)
      return true;
  return false;
}

}  // namespace

TEST_CASE("reset samplers hit their analytic means") {
  Rng rng(101);
  const int n = 40000;
  auto mc_mean = [&](const ResetDistribution& d) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += d.sample(rng);
    return s / n;
  };
  CHECK(std::abs(mc_mean(expdist(2.0)) - 0.5) < 0.02);
  CHECK(std::abs(mc_mean(unif(1.0, 3.0)) - 2.0) < 0.02);
  const double wmean = 2.0 * std::tgamma(1.0 + 1.0 / 1.7);
  CHECK(std::abs(mc_mean(weib(1.7, 2.0)) - wmean) < 0.02);
  CHECK(mc_mean(point(0.7)) == doctest::Approx(0.7));

  CHECK(expdist(2.0).mean() == doctest::Approx(0.5));
  CHECK(unif(1.0, 3.0).mean() == doctest::Approx(2.0));
  CHECK(weib(1.0, 2.0).mean() == doctest::Approx(2.0));  // shape 1 = exponential
  CHECK(weib(1.7, 2.0).mean() == doctest::Approx(wmean));
}

TEST_CASE("samplers are reproducible from the seed") {
  Rng a(5), b(5);
  const auto d = weib(1.3, 0.8);
  for (int i = 0; i < 100; ++i) CHECK(d.sample(a) == d.sample(b));
}

TEST_CASE("finalize assigns prop classes by prop-set equality") {
  Builder b;
  b.state("A", {"p"}, {{"e", 1.0}});
  b.state("B", {"p"}, {{"e", 1.0}});
  b.state("C", {"q"}, {{"e", 1.0}});
  b.state("D", {"p", "q"}, {{"e", 1.0}});
  b.allocate();
  const GsmpModel m = b.done();
  CHECK(m.states[0].prop_class == m.states[1].prop_class);
  CHECK(m.states[0].prop_class != m.states[2].prop_class);
  CHECK(m.states[0].prop_class != m.states[3].prop_class);
  CHECK(m.states[2].prop_class != m.states[3].prop_class);

  GeneralizedState x{0, {1.0}}, y{1, {0.3}}, z{2, {0.9}};
  CHECK(prop_metric(m, x, y) == 0.0);
  CHECK(prop_metric(m, x, z) == 1.0);

  CHECK(has_prop(m, 3, "p"));
  CHECK(has_prop(m, 3, "q"));
  CHECK(!has_prop(m, 3, "r"));
}

TEST_CASE("finalize splits transition plans into carried and fresh slots") {
  const GsmpModel m = carry_model();
  const int A = m.state_index("A"), B = m.state_index("B");
  const int go = m.slot_index(A, m.event_index("go"));
  const int keepA = m.slot_index(A, m.event_index("keep"));
  const int keepB = m.slot_index(B, m.event_index("keep"));

  // Firing go in A: keep is active in both states and did not fire -> carried.
  const TransitionPlan& pa = m.plans[A][go][B];
  REQUIRE(pa.carried.size() == 1);
  CHECK(pa.carried[0] == std::pair{keepB, keepA});
  CHECK(pa.fresh.empty());

  // Firing keep in B: back in A both clocks are fresh (keep fired, go absent).
  const TransitionPlan& pb = m.plans[B][keepB][A];
  CHECK(pb.carried.empty());
  CHECK(pb.fresh.size() == 2);

  CHECK(m.max_rate == doctest::Approx(1.0));
}

TEST_CASE("validation accepts the alternator, warning about point masses") {
  const GsmpModel m = pingpong();
  const ValidationReport rep = validate_model(m);
  CHECK(rep.ok());
  CHECK(rep.warnings.size() == 2);
  CHECK(mentions(rep.warnings, "point-mass"));
}

TEST_CASE("validation rejects structural defects") {
  SUBCASE("duplicate and empty ids") {
    Builder b;
    b.state("A", {}, {});
    b.state("A", {}, {});
    b.state("", {}, {});
    b.allocate();
    const auto rep = validate_model(b.done());
    CHECK(mentions(rep.errors, "duplicate state id"));
    CHECK(mentions(rep.errors, "empty state id"));
  }

  SUBCASE("nonpositive rate") {
    Builder b;
    b.state("A", {}, {{"e", 0.0}});
    b.allocate();
    b.arc("A", "e", "A", 1.0);
    b.reset("A", "e", "A", "e", expdist(1.0));
    CHECK(mentions(validate_model(b.done()).errors, "strictly positive"));
  }

  SUBCASE("missing transition row") {
    Builder b;
    b.state("A", {}, {{"e", 1.0}});
    b.allocate();
    GsmpModel m = b.m;
    m.next[0][0].clear();
    m.finalize();
    CHECK(mentions(validate_model(m).errors, "missing transition row"));
  }

  SUBCASE("row must be stochastic") {
    Builder b;
    b.state("A", {}, {{"e", 1.0}});
    b.state("B", {}, {});
    b.allocate();
    b.arc("A", "e", "B", 0.9);
    CHECK(mentions(validate_model(b.done()).errors, "row sums to"));
  }

  SUBCASE("negative probability") {
    Builder b;
    b.state("A", {}, {{"e", 1.0}});
    b.state("B", {}, {});
    b.allocate();
    b.arc("A", "e", "A", -0.2);
    b.arc("A", "e", "B", 1.2);
    b.reset("A", "e", "A", "e", expdist(1.0));
    CHECK(mentions(validate_model(b.done()).errors, "negative transition probability"));
  }

  SUBCASE("missing reset for a reachable fresh clock") {
    Builder b;
    b.state("A", {}, {{"e", 1.0}});
    b.allocate();
    b.arc("A", "e", "A", 1.0);
    CHECK(mentions(validate_model(b.done()).errors, "missing reset distribution"));
  }

  SUBCASE("distribution parameter checks") {
    Builder b;
    b.state("A", {}, {{"e", 1.0}});
    b.allocate();
    b.arc("A", "e", "A", 1.0);
    b.reset("A", "e", "A", "e", unif(2.0, 1.0));
    CHECK(mentions(validate_model(b.done()).errors, "uniform needs a < b"));

    b.reset("A", "e", "A", "e", expdist(0.0));
    CHECK(mentions(validate_model(b.done()).errors, "exponential rate"));

    b.reset("A", "e", "A", "e", weib(1.0, 0.0));
    CHECK(mentions(validate_model(b.done()).errors, "weibull needs"));
  }

  SUBCASE("carried clock changing rate draws a warning") {
    const GsmpModel m = carry_model(2.0, 1.0);
    const auto rep = validate_model(m);
    CHECK(rep.ok());
    CHECK(mentions(rep.warnings, "changes rate"));
  }
}

TEST_CASE("make_state enforces clock keys and expiry uniqueness") {
  const GsmpModel m = carry_model();
  const int A = m.state_index("A");
  const int go = m.event_index("go"), keep = m.event_index("keep");

  const GeneralizedState gs = make_state(m, A, {{keep, 1.0}, {go, 0.4}});
  CHECK(gs.clocks[m.slot_index(A, go)] == 0.4);
  CHECK(gs.clocks[m.slot_index(A, keep)] == 1.0);

  CHECK_THROWS_AS(make_state(m, A, {{go, 0.4}}), UniquenessViolation);
  CHECK_THROWS_AS(make_state(m, A, {{go, 0.4}, {go, 1.0}}), UniquenessViolation);
  CHECK_THROWS_AS(make_state(m, A, {{go, 0.4}, {99, 1.0}}), UniquenessViolation);
  CHECK_THROWS_AS(make_state(m, A, {{go, -0.1}, {keep, 1.0}}), Error);
  CHECK_THROWS_AS(make_state(m, 99, {}), Error);
  // go and keep tied at 0.4 -> no unique first expiry.
  CHECK_THROWS_AS(make_state(m, A, {{go, 0.4}, {keep, 0.4}}), UniquenessViolation);
}

TEST_CASE("first expiry scales clocks by their rates") {
  Builder b;
  b.state("A", {}, {{"fast", 4.0}, {"slow", 1.0}});
  b.allocate();
  const GsmpModel m = b.done();
  const int fast = m.slot_index(0, m.event_index("fast"));

  GeneralizedState gs{0, {}};
  gs.clocks.assign(2, 0.0);
  gs.clocks[fast] = 1.0;
  gs.clocks[1 - fast] = 0.9;
  const ExpiryInfo e = time_to_first_expiry(m, gs);
  CHECK(e.slot == fast);  // 1.0/4 = 0.25 beats 0.9/1
  CHECK(e.time == doctest::Approx(0.25));

  // A state with no events never expires.
  Builder b2;
  b2.state("Z", {}, {});
  b2.allocate();
  const ExpiryInfo inf = time_to_first_expiry(b2.done(), {0, {}});
  CHECK(inf.slot == -1);
  CHECK(std::isinf(inf.time));
}

TEST_CASE("advance runs clocks down by rate * t and stops at the expiry") {
  Builder b;
  b.state("A", {}, {{"fast", 2.0}, {"slow", 1.0}});
  b.allocate();
  const GsmpModel m = b.done();
  const int fast = m.slot_index(0, m.event_index("fast"));

  GeneralizedState gs{0, {}};
  gs.clocks.assign(2, 0.0);
  gs.clocks[fast] = 1.0;
  gs.clocks[1 - fast] = 0.9;

  const GeneralizedState mid = advance(m, gs, 0.25);
  CHECK(mid.clocks[fast] == doctest::Approx(0.5));
  CHECK(mid.clocks[1 - fast] == doctest::Approx(0.65));

  // Advancing exactly to the expiry clamps the expiring clock at zero.
  const GeneralizedState at = advance(m, gs, 0.5);
  CHECK(at.clocks[fast] == 0.0);

  CHECK_THROWS_AS(advance(m, gs, 0.6), AdvanceBeyondExpiry);
  CHECK_THROWS_AS(advance(m, gs, -0.1), Error);
}

TEST_CASE("step fires the first expiry and carries surviving clocks exactly") {
  const GsmpModel m = carry_model();
  const int A = m.state_index("A"), B = m.state_index("B");
  const int go = m.event_index("go"), keep = m.event_index("keep");

  Rng rng(1);
  const GeneralizedState gs = make_state(m, A, {{go, 0.4}, {keep, 1.0}});
  const StepResult r = step(m, gs, rng);
  CHECK(r.fired_slot == m.slot_index(A, go));
  CHECK(r.dwell == doctest::Approx(0.4));
  CHECK(r.next.state == B);
  // keep ran for 0.4 at rate 1 and then crossed unchanged.
  CHECK(r.next.clocks[m.slot_index(B, keep)] == doctest::Approx(0.6));
}

TEST_CASE("carried clocks run at their source-state rate before the jump") {
  const GsmpModel m = carry_model(2.0, 2.0);
  const int A = m.state_index("A"), B = m.state_index("B");
  const int go = m.event_index("go"), keep = m.event_index("keep");

  Rng rng(1);
  const GeneralizedState gs = make_state(m, A, {{go, 0.4}, {keep, 1.0}});
  const StepResult r = step(m, gs, rng);
  CHECK(r.next.state == B);
  CHECK(r.next.clocks[m.slot_index(B, keep)] == doctest::Approx(1.0 - 2.0 * 0.4));
}

TEST_CASE("step draws successors with the transition probabilities") {
  Builder b;
  b.state("R", {}, {{"go", 1.0}});
  b.state("X", {}, {});
  b.state("Y", {}, {});
  b.allocate();
  b.arc("R", "go", "X", 0.3);
  b.arc("R", "go", "Y", 0.7);
  const GsmpModel m = b.done();
  const int R = m.state_index("R"), X = m.state_index("X");
  const int go = m.event_index("go");

  Rng rng(77);
  int hits = 0;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    const GeneralizedState gs = make_state(m, R, {{go, 1.0}});
    if (step(m, gs, rng).next.state == X) ++hits;
  }
  CHECK(std::abs(hits / static_cast<double>(trials) - 0.3) < 0.025);
}

TEST_CASE("deterministic alternator steps are exact") {
  const GsmpModel m = pingpong();
  const int up = m.state_index("up"), down = m.state_index("down");
  const int tick = m.event_index("tick");

  Rng rng(3);
  GeneralizedState gs = make_state(m, up, {{tick, 1.0}});
  for (int i = 0; i < 6; ++i) {
    const StepResult r = step(m, gs, rng);
    CHECK(r.dwell == doctest::Approx(1.0));
    CHECK(r.next.state == (i % 2 == 0 ? down : up));
    CHECK(r.next.clocks[0] == doctest::Approx(1.0));
    gs = r.next;
  }
}

TEST_CASE("fresh-clock ties exhaust the retry budget") {
  Builder b;
  b.state("S", {}, {{"go", 1.0}});
  b.state("T", {}, {{"e1", 1.0}, {"e2", 1.0}});
  b.allocate();
  b.arc("S", "go", "T", 1.0);
  b.arc("T", "e1", "S", 0.5);
  b.arc("T", "e2", "S", 0.5);
  b.reset("S", "go", "T", "e1", point(0.7));
  b.reset("S", "go", "T", "e2", point(0.7));  // always tied with e1
  b.reset("T", "e1", "S", "go", expdist(1.0));
  b.reset("T", "e2", "S", "go", expdist(1.0));
  const GsmpModel m = b.done();

  Rng rng(9);
  const GeneralizedState gs =
      make_state(m, m.state_index("S"), {{m.event_index("go"), 1.0}});
  CHECK_THROWS_AS(step(m, gs, rng, 5), DegenerateModel);
}

TEST_CASE("retries resample only fresh clocks and keep the successor") {
  // e1/e2 in T are uniform on overlapping ranges: ties are measure-zero, so
  // stepping many times must always succeed and both orders must occur.
  Builder b;
  b.state("S", {}, {{"go", 1.0}});
  b.state("T", {}, {{"e1", 1.0}, {"e2", 1.0}});
  b.allocate();
  b.arc("S", "go", "T", 1.0);
  b.arc("T", "e1", "S", 0.5);
  b.arc("T", "e2", "S", 0.5);
  b.reset("S", "go", "T", "e1", unif(0.5, 1.5));
  b.reset("S", "go", "T", "e2", unif(0.5, 1.5));
  b.reset("T", "e1", "S", "go", expdist(1.0));
  b.reset("T", "e2", "S", "go", expdist(1.0));
  const GsmpModel m = b.done();
  const int T = m.state_index("T");

  Rng rng(13);
  bool e1_first = false, e2_first = false;
  for (int i = 0; i < 200; ++i) {
    const GeneralizedState gs =
        make_state(m, m.state_index("S"), {{m.event_index("go"), 1.0}});
    const StepResult r = step(m, gs, rng);
    REQUIRE(r.next.state == T);
    const ExpiryInfo e = time_to_first_expiry(m, r.next);
    (e.slot == 0 ? e1_first : e2_first) = true;
  }
  CHECK(e1_first);
  CHECK(e2_first);
}
