#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "fpa/dynamics.hpp"

using namespace fpa;

namespace {

LearnerSpec scripted(std::vector<Bid> bids) {
  LearnerSpec s;
  s.kind = LearnerKind::Scripted;
  s.script = std::move(bids);
  return s;
}

LearnerSpec ftl_with_script(std::vector<Bid> ties) {
  LearnerSpec s;
  s.kind = LearnerKind::FTL;
  s.tiebreak = TieBreak::Scripted;
  s.script = std::move(ties);
  return s;
}

RunConfig example1_config(std::int64_t rounds) {
  RunConfig cfg;
  cfg.values = ValueProfile({10, 7, 7});
  cfg.specs = {ftl_with_script({7}), ftl_with_script({6, 1, 1}),
               ftl_with_script({1, 6, 1})};
  cfg.rounds = rounds;
  cfg.seed = 12345;
  return cfg;
}

}  // namespace

TEST_CASE("period-3 cycle from scripted ftl tie-breaking") {
  RunRecord rec = run(example1_config(9));
  const std::vector<std::vector<Bid>> cycle = {
      {7, 6, 1}, {7, 1, 6}, {7, 1, 1}};
  REQUIRE(rec.trace.size() == 9);
  for (int t = 0; t < 9; ++t) CHECK(rec.trace[t].bids == cycle[t % 3]);
}

TEST_CASE("cycle time-average equilibrium fraction tends to 2/3") {
  RunConfig cfg = example1_config(300);
  RunRecord rec = run(cfg);
  EquilibriumSet ne = enumerate_pure_nash(cfg.values);
  auto series = time_average_ne_fraction(rec, ne);
  REQUIRE_FALSE(series.empty());
  CHECK(series.back().first == 300);
  CHECK(series.back().second == Rational(2, 3));
}

TEST_CASE("scripted constant equilibrium play") {
  RunConfig cfg;
  cfg.values = ValueProfile({4, 4});
  cfg.specs = {scripted({3}), scripted({3})};
  cfg.rounds = 100;
  RunRecord rec = run(cfg);
  auto series = time_average_ne_fraction(rec, enumerate_pure_nash(cfg.values));
  for (const auto& [t, frac] : series) CHECK(frac == Rational(1));
  CHECK(classify_convergence(rec, 0).verdict == Verdict::ToHighMinusOne);
  CHECK(classify_convergence(rec, 1).verdict == Verdict::ToHighMinusOne);
}

TEST_CASE("never-equilibrium play has fraction zero") {
  RunConfig cfg;
  cfg.values = ValueProfile({4, 4});
  cfg.specs = {scripted({3}), scripted({0})};
  cfg.rounds = 50;
  RunRecord rec = run(cfg);
  auto series = time_average_ne_fraction(rec, enumerate_pure_nash(cfg.values));
  for (const auto& [t, frac] : series) CHECK(frac == Rational(0));
}

TEST_CASE("determinism: equal configs give equal records") {
  RunConfig cfg;
  cfg.values = ValueProfile({4, 4});
  LearnerSpec eg;
  eg.kind = LearnerKind::EpsGreedy;
  cfg.specs = {eg, eg};
  cfg.rounds = 500;
  cfg.seed = 99;
  RunRecord a = run(cfg);
  RunRecord b = run(cfg);
  CHECK(a.trace == b.trace);
  CHECK(a.final_stats == b.final_stats);
  REQUIRE(a.checkpoints.size() == b.checkpoints.size());
  for (std::size_t k = 0; k < a.checkpoints.size(); ++k) {
    CHECK(a.checkpoints[k].t == b.checkpoints[k].t);
    CHECK(a.checkpoints[k].x == b.checkpoints[k].x);
    CHECK(a.checkpoints[k].f == b.checkpoints[k].f);
  }

  // A different seed changes the trace.
  cfg.seed = 100;
  RunRecord c = run(cfg);
  CHECK_FALSE(a.trace == c.trace);
}

TEST_CASE("all bids stay inside bid sets and frequencies match the trace") {
  RunConfig cfg;
  cfg.values = ValueProfile({5, 3});
  LearnerSpec eg;
  eg.kind = LearnerKind::EpsGreedy;
  LearnerSpec mwu;
  mwu.kind = LearnerKind::MWU;
  cfg.specs = {eg, mwu};
  cfg.rounds = 400;
  cfg.seed = 4;
  RunRecord rec = run(cfg);
  std::vector<std::vector<int>> counts = {{0, 0, 0, 0, 0}, {0, 0, 0}};
  for (const BidProfile& p : rec.trace) {
    p.validate(cfg.values);
    for (int i = 0; i < 2; ++i) ++counts[i][p.bids[i]];
  }
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < cfg.values.value(i); ++b)
      CHECK(rec.final_stats.f(i, b) == Rational(counts[i][b], cfg.rounds));
}

TEST_CASE("checkpoint stride default and extras") {
  RunConfig cfg;
  cfg.values = ValueProfile({3, 3});
  LearnerSpec eg;
  eg.kind = LearnerKind::EpsGreedy;
  cfg.specs = {eg, eg};
  cfg.rounds = 6000;
  cfg.extra_checkpoints = {4321};
  RunRecord rec = run(cfg);
  CHECK(cfg.effective_stride() == 10);
  bool saw_extra = false, saw_last = false;
  std::int64_t prev = 0;
  for (const Checkpoint& cp : rec.checkpoints) {
    CHECK(cp.t > prev);
    prev = cp.t;
    if (cp.t == 4321) saw_extra = true;
    if (cp.t == 6000) saw_last = true;
    CHECK((cp.t % 10 == 0 || cp.t == 4321));
  }
  CHECK(saw_extra);
  CHECK(saw_last);

  cfg.rounds = 100;
  cfg.extra_checkpoints.clear();
  CHECK(cfg.effective_stride() == 1);
  CHECK(run(cfg).checkpoints.size() == 100);
}

TEST_CASE("last iterate distance") {
  MixedStrategy point = MixedStrategy::point_mass(2, 4);
  CHECK(last_iterate_distance(point, 2) == doctest::Approx(0.0));
  CHECK(last_iterate_distance(MixedStrategy::uniform(4), 1) ==
        doctest::Approx(0.75));
  MixedStrategy x(std::vector<double>{0.05, 0.95});
  CHECK(last_iterate_distance(x, 1) == doctest::Approx(0.05));
  CHECK_THROWS_AS(last_iterate_distance(x, 2), std::domain_error);
}

TEST_CASE("convergence classification rules") {
  RunConfig cfg;
  cfg.values = ValueProfile({4, 4});
  cfg.rounds = 20;
  cfg.specs = {scripted({2}), scripted({2})};
  CHECK(classify_convergence(run(cfg), 0).verdict == Verdict::ToHighMinusTwo);

  cfg.specs = {scripted({3}), scripted({2})};
  CHECK(classify_convergence(run(cfg), 0).verdict == Verdict::ToHighMinusOne);

  cfg.specs = {scripted({2, 3}), scripted({0})};
  ConvergenceVerdict v = classify_convergence(run(cfg), 0);
  CHECK(v.verdict == Verdict::NotConverged);
  CHECK(v.freq_high_minus_one == doctest::Approx(0.5));
  CHECK(v.freq_high_minus_two == doctest::Approx(0.5));

  // Only highest-value bidders are classified.
  RunConfig mixed;
  mixed.values = ValueProfile({4, 3});
  mixed.rounds = 10;
  mixed.specs = {scripted({3}), scripted({2})};
  RunRecord rec = run(mixed);
  CHECK_THROWS_AS(classify_convergence(rec, 1), std::domain_error);
  CHECK_THROWS_AS(classify_convergence(rec, 0, 0.5), std::domain_error);
}

TEST_CASE("oscillation indicator counts argmax switches") {
  RunConfig cfg;
  cfg.values = ValueProfile({6, 6});
  cfg.rounds = 4;
  cfg.specs = {scripted({5, 3}), scripted({0})};
  RunRecord rec = run(cfg);
  CHECK(oscillation_indicator(rec, 0, 1, 4) == 3);
  CHECK(oscillation_indicator(rec, 1, 1, 4) == 0);
  CHECK(oscillation_indicator(rec, 0, 2, 3) == 1);
  CHECK_THROWS_AS(oscillation_indicator(rec, 0, 3, 2), std::domain_error);
  CHECK_THROWS_AS(oscillation_indicator(rec, 0, 5, 9), std::domain_error);
}

TEST_CASE("online audits are clean for ftl and eps-greedy runs") {
  RunConfig cfg;
  cfg.values = ValueProfile({4, 4});
  LearnerSpec ftl;
  ftl.kind = LearnerKind::FTL;
  LearnerSpec eg;
  eg.kind = LearnerKind::EpsGreedy;
  cfg.specs = {ftl, eg};
  cfg.rounds = 1000;
  cfg.seed = 2718;
  RunRecord rec = run(cfg);
  for (const auto& v : rec.audit_violations) CHECK(v.empty());
}

TEST_CASE("config validation") {
  RunConfig cfg;
  cfg.values = ValueProfile({3, 3});
  cfg.rounds = 0;
  LearnerSpec eg;
  eg.kind = LearnerKind::EpsGreedy;
  cfg.specs = {eg, eg};
  CHECK_THROWS_AS(run(cfg), std::domain_error);
  cfg.rounds = 5;
  cfg.specs = {eg};
  CHECK_THROWS_AS(run(cfg), std::domain_error);
}
