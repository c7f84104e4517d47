#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "gsmpdist/trace.hpp"
#include "test_models.hpp"

using namespace gsmpdist;
using namespace gsmpdist::testing;

namespace {

GeneralizedState start_up(const GsmpModel& m) {
  return make_state(m, m.state_index("up"), {{m.event_index("tick"), 1.0}});
}

}  // namespace

TEST_CASE("alternator trace: unit dwells, truncated tail, interior jumps") {
  const GsmpModel m = pingpong();
  Rng rng(1);
  const TimedTrace tr = sample_trace(m, start_up(m), 2.5, rng);

  REQUIRE(tr.segments.size() == 3);
  CHECK(tr.segments[0].dwell == doctest::Approx(1.0));
  CHECK(tr.segments[1].dwell == doctest::Approx(1.0));
  CHECK(tr.segments[2].dwell == doctest::Approx(0.5));
  CHECK(tr.horizon == 2.5);
  CHECK(tr.segments[0].start.state == m.state_index("up"));
  CHECK(tr.segments[1].start.state == m.state_index("down"));
  CHECK(tr.segments[2].start.state == m.state_index("up"));

  const auto jumps = jump_times(tr);
  REQUIRE(jumps.size() == 2);
  CHECK(jumps[0] == doctest::Approx(1.0));
  CHECK(jumps[1] == doctest::Approx(2.0));
}

TEST_CASE("a horizon inside the first dwell yields a single segment") {
  const GsmpModel m = pingpong();
  Rng rng(1);
  const TimedTrace tr = sample_trace(m, start_up(m), 0.25, rng);
  REQUIRE(tr.segments.size() == 1);
  CHECK(tr.segments[0].dwell == doctest::Approx(0.25));
  CHECK(jump_times(tr).empty());
}

TEST_CASE("trace_at is right-continuous and clocks run inside segments") {
  const GsmpModel m = pingpong();
  Rng rng(1);
  const TimedTrace tr = sample_trace(m, start_up(m), 2.5, rng);

  CHECK(trace_at(m, tr, 0.0).clocks[0] == doctest::Approx(1.0));
  CHECK(trace_at(m, tr, 0.75).clocks[0] == doctest::Approx(0.25));
  // Just before the jump the old clock is nearly spent; at the jump the new
  // state appears with a full fresh clock.
  CHECK(trace_at(m, tr, 1.0 - 1e-9).state == m.state_index("up"));
  CHECK(trace_at(m, tr, 1.0 - 1e-9).clocks[0] == doctest::Approx(1e-9));
  CHECK(trace_at(m, tr, 1.0).state == m.state_index("down"));
  CHECK(trace_at(m, tr, 1.0).clocks[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(trace_at(m, tr, 2.5), OutOfHorizon);
  CHECK_THROWS_AS(trace_at(m, tr, -0.01), OutOfHorizon);
}

TEST_CASE("absorbing states ride out the rest of the horizon") {
  Builder b;
  b.state("A", {"a"}, {{"go", 1.0}});
  b.state("Z", {"z"}, {});
  b.allocate();
  b.arc("A", "go", "Z", 1.0);
  const GsmpModel m = b.done();

  Rng rng(2);
  const GeneralizedState gs =
      make_state(m, m.state_index("A"), {{m.event_index("go"), 0.5}});
  const TimedTrace tr = sample_trace(m, gs, 5.0, rng);
  REQUIRE(tr.segments.size() == 2);
  CHECK(tr.segments[1].dwell == doctest::Approx(4.5));
  CHECK(trace_at(m, tr, 4.9).state == m.state_index("Z"));
}

TEST_CASE("self-loop dwells follow the reset distribution") {
  Builder b;
  b.state("S", {}, {{"e", 1.0}});
  b.allocate();
  b.arc("S", "e", "S", 1.0);
  b.reset("S", "e", "S", "e", expdist(2.0));
  const GsmpModel m = b.done();

  Rng rng(3);
  const GeneralizedState gs =
      make_state(m, m.state_index("S"), {{m.event_index("e"), 0.1}});
  const TimedTrace tr = sample_trace(m, gs, 3000.0, rng);
  double sum = 0.0;
  // Skip the fixed first dwell and the truncated last one.
  for (size_t i = 1; i + 1 < tr.segments.size(); ++i) sum += tr.segments[i].dwell;
  const double mean = sum / static_cast<double>(tr.segments.size() - 2);
  CHECK(std::abs(mean - 0.5) < 0.02);
}

TEST_CASE("sampling is reproducible from the seed") {
  const GsmpModel m = carry_model();
  const GeneralizedState gs = make_state(
      m, m.state_index("A"),
      {{m.event_index("go"), 0.8}, {m.event_index("keep"), 1.1}});
  Rng r1(42), r2(42);
  const TimedTrace a = sample_trace(m, gs, 50.0, r1);
  const TimedTrace b = sample_trace(m, gs, 50.0, r2);
  REQUIRE(a.segments.size() == b.segments.size());
  for (size_t i = 0; i < a.segments.size(); ++i) {
    CHECK(a.segments[i].start == b.segments[i].start);
    CHECK(a.segments[i].dwell == b.segments[i].dwell);
  }
}

TEST_CASE("the Zeno guard trips on event-dense traces") {
  const GsmpModel m = pingpong();
  Rng rng(1);
  CHECK_THROWS_AS(sample_trace(m, start_up(m), 10.0, rng, /*zeno_guard=*/3),
                  ZenoGuardExceeded);
  CHECK_THROWS_AS(sample_trace(m, start_up(m), 0.0, rng), Error);
}

TEST_CASE("constant delay freezes the start state in a leading segment") {
  const GsmpModel m = pingpong();
  Rng rng(1);
  const TimedTrace tr = sample_trace(m, start_up(m), 2.5, rng);
  const TimedTrace d = delay(m, tr, {DelayPrefix::Kind::constant}, 0.5);

  CHECK(d.horizon == doctest::Approx(3.0));
  REQUIRE(d.segments.size() == 4);
  CHECK(!d.segments[0].evolve);
  CHECK(d.segments[0].dwell == doctest::Approx(0.5));

  // Frozen prefix: u(t) = f(0) exactly, clocks not running.
  CHECK(trace_at(m, d, 0.0) == tr.segments[0].start);
  CHECK(trace_at(m, d, 0.49) == tr.segments[0].start);
  // From r on, the original evolution shifted by r.
  CHECK(trace_at(m, d, 0.5) == trace_at(m, tr, 0.0));
  CHECK(trace_at(m, d, 0.75).clocks[0] == doctest::Approx(0.75));
  CHECK(trace_at(m, d, 1.5).state == m.state_index("down"));

  const auto jumps = jump_times(d);
  REQUIRE(jumps.size() == 3);
  CHECK(jumps[0] == doctest::Approx(0.5));
  CHECK(jumps[1] == doctest::Approx(1.5));
  CHECK(jumps[2] == doctest::Approx(2.5));
}

TEST_CASE("clock-linear delay extends the first segment backwards") {
  Builder b;
  b.state("E", {}, {{"e", 2.0}});
  b.state("F", {}, {{"e", 2.0}});
  b.allocate();
  b.arc("E", "e", "F", 1.0);
  b.arc("F", "e", "E", 1.0);
  b.reset("E", "e", "F", "e", point(1.0));
  b.reset("F", "e", "E", "e", point(1.0));
  const GsmpModel m = b.done();

  Rng rng(1);
  const GeneralizedState gs =
      make_state(m, m.state_index("E"), {{m.event_index("e"), 1.0}});
  const TimedTrace tr = sample_trace(m, gs, 2.0, rng);
  const TimedTrace d = delay(m, tr, {DelayPrefix::Kind::clock_linear}, 0.5);

  CHECK(d.horizon == doctest::Approx(2.5));
  CHECK(d.segments.size() == tr.segments.size());  // merged, not prepended
  // Clock rate is 2, so extending by 0.5 raises the clock by 1.0.
  CHECK(trace_at(m, d, 0.0).clocks[0] == doctest::Approx(2.0));
  CHECK(trace_at(m, d, 0.5) == trace_at(m, tr, 0.0));
  CHECK(trace_at(m, d, 0.7).clocks[0] ==
        doctest::Approx(trace_at(m, tr, 0.2).clocks[0]));

  // Jumps shift right by exactly r.
  const auto j0 = jump_times(tr), j1 = jump_times(d);
  REQUIRE(j0.size() == j1.size());
  for (size_t i = 0; i < j0.size(); ++i)
    CHECK(j1[i] == doctest::Approx(j0[i] + 0.5));
}

TEST_CASE("zero delay is the identity; negative delay is rejected") {
  const GsmpModel m = pingpong();
  Rng rng(1);
  const TimedTrace tr = sample_trace(m, start_up(m), 2.5, rng);
  const TimedTrace d = delay(m, tr, {DelayPrefix::Kind::constant}, 0.0);
  CHECK(d.segments.size() == tr.segments.size());
  CHECK(d.horizon == tr.horizon);
  CHECK_THROWS_AS(delay(m, tr, {DelayPrefix::Kind::constant}, -0.1), Error);
}

TEST_CASE("scalar traces evaluate piecewise-linearly and right-continuously") {
  ScalarTrace s;
  s.horizon = 2.0;
  s.pieces = {{0.0, 1.0, 0.0}, {1.0, 0.0, 2.0}};
  CHECK(scalar_at(s, 0.0) == doctest::Approx(1.0));
  CHECK(scalar_at(s, 0.999999) == doctest::Approx(1.0));
  CHECK(scalar_at(s, 1.0) == doctest::Approx(0.0));  // jump down, right-continuous
  CHECK(scalar_at(s, 1.25) == doctest::Approx(0.5));
  CHECK_THROWS_AS(scalar_at(s, 2.0), OutOfHorizon);
  CHECK_THROWS_AS(scalar_at(s, -0.5), OutOfHorizon);
}
