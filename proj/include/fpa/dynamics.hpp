#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fpa/auction.hpp"
#include "fpa/learners.hpp"
#include "fpa/rng.hpp"
#include "fpa/stats.hpp"
#include "fpa/types.hpp"

namespace fpa {

struct RunConfig {
  ValueProfile values;
  std::vector<LearnerSpec> specs;  // one per bidder
  std::int64_t rounds = 1;
  std::uint64_t seed = 0;
  // 0 means the default: every round up to T=5000, every 10th beyond.
  std::int64_t checkpoint_stride = 0;
  // Rounds to snapshot in addition to the stride (epoch boundaries etc).
  std::vector<std::int64_t> extra_checkpoints;
  bool audit = true;

  std::int64_t effective_stride() const {
    if (checkpoint_stride > 0) return checkpoint_stride;
    return rounds <= 5000 ? 1 : 10;
  }

  void validate() const {
    if (rounds < 1) throw std::domain_error("RunConfig: rounds must be >= 1");
    if (static_cast<int>(specs.size()) != values.num_bidders())
      throw std::domain_error("RunConfig: need one learner spec per bidder");
  }
};

// Strategy and frequency snapshot taken at round t: x is the mixed strategy
// each bidder committed for round t (from stats through t-1), f the bid
// frequencies through round t.
struct Checkpoint {
  std::int64_t t;
  std::vector<MixedStrategy> x;
  std::vector<std::vector<double>> f;
};

enum class Verdict { ToHighMinusOne, ToHighMinusTwo, NotConverged };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ToHighMinusOne: return "to-high-minus-one";
    case Verdict::ToHighMinusTwo: return "to-high-minus-two";
    case Verdict::NotConverged: return "not-converged";
  }
  return "?";
}

struct ConvergenceVerdict {
  Verdict verdict = Verdict::NotConverged;
  double freq_high_minus_one = 0.0;
  double freq_high_minus_two = 0.0;
};

struct RunRecord {
  RunConfig config;
  std::vector<BidProfile> trace;
  std::vector<Checkpoint> checkpoints;
  HistoryStats final_stats;
  // Mean-based violations per bidder under the kind-matched schedule
  // (FTL: 0, eps-greedy: eps_t, counterexample: its own schedule, MWU: a
  // heuristic 5*eps_t; scripted bidders are not audited).
  std::vector<std::vector<AuditViolation>> audit_violations;

  explicit RunRecord(const RunConfig& cfg)
      : config(cfg), final_stats(cfg.values) {}
};

namespace detail {

inline Bid sample_strategy(const MixedStrategy& x, SplitMix64& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t b = 0; b < x.probs.size(); ++b) {
    acc += x.probs[b];
    if (u < acc) return static_cast<Bid>(b);
  }
  return static_cast<Bid>(x.probs.size() - 1);
}

inline GammaSchedule audit_schedule(const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::FTL: return GammaSchedule::zero();
    case LearnerKind::EpsGreedy: return GammaSchedule::from_eps(spec.eps);
    case LearnerKind::Counterexample:
      return GammaSchedule::counterexample(spec.t0);
    case LearnerKind::MWU: return GammaSchedule::from_eps(spec.eps, 5.0);
    case LearnerKind::Scripted: return GammaSchedule::zero();
  }
  return GammaSchedule::zero();
}

}  // namespace detail

// Per-bidder mutable learner state across a run.
struct LearnerState {
  CounterexampleState counterexample;
};

inline MixedStrategy strategy_for(const LearnerSpec& spec, LearnerState& state,
                                  const HistoryStats& stats, int bidder,
                                  std::int64_t t) {
  switch (spec.kind) {
    case LearnerKind::FTL:
      return ftl_policy(stats, bidder, t, spec.tiebreak, spec.script);
    case LearnerKind::EpsGreedy:
      return eps_greedy_policy(stats, bidder, t, spec.eps.at(t), spec.tiebreak,
                               spec.script);
    case LearnerKind::MWU:
      return mwu_policy(stats, bidder, t, spec.eps);
    case LearnerKind::Counterexample:
      return counterexample_policy(state.counterexample, stats, bidder, t,
                                   spec.t0);
    case LearnerKind::Scripted:
      return MixedStrategy::point_mass(
          spec.script[(t - 1) % spec.script.size()],
          stats.values().value(bidder));
  }
  throw std::logic_error("strategy_for: unknown learner kind");
}

// The round loop.  All bidders commit strategies from stats through t-1,
// then bids are sampled in bidder order, then stats update once; the winner
// draw (ties only) shares the same stream after the bid samples.
inline RunRecord run(RunConfig config) {
  config.validate();
  for (LearnerSpec& s : config.specs) s.validate();
  const int n = config.values.num_bidders();
  const std::int64_t stride = config.effective_stride();
  std::set<std::int64_t> extra(config.extra_checkpoints.begin(),
                               config.extra_checkpoints.end());

  RunRecord rec(config);
  rec.trace.reserve(config.rounds);
  rec.audit_violations.resize(n);

  SplitMix64 rng(config.seed);
  HistoryStats stats(config.values);
  std::vector<LearnerState> states(n);
  std::vector<MeanBasedAuditor> auditors;
  if (config.audit)
    for (int i = 0; i < n; ++i)
      auditors.emplace_back(detail::audit_schedule(config.specs[i]),
                            config.values.cap());

  std::vector<MixedStrategy> x(n);
  for (std::int64_t t = 1; t <= config.rounds; ++t) {
    for (int i = 0; i < n; ++i)
      x[i] = strategy_for(config.specs[i], states[i], stats, i, t);
    if (config.audit)
      for (int i = 0; i < n; ++i)
        if (config.specs[i].kind != LearnerKind::Scripted)
          auditors[i].check_round(t, stats.alpha_view(i), x[i]);
    BidProfile profile;
    profile.bids.resize(n);
    for (int i = 0; i < n; ++i)
      profile.bids[i] = detail::sample_strategy(x[i], rng);
    realized_winner(profile, rng);  // consumes the tie draw, keeps the stream
                                    // aligned with auction semantics
    stats.update(profile);
    rec.trace.push_back(profile);

    if (t % stride == 0 || t == config.rounds || extra.count(t)) {
      Checkpoint cp;
      cp.t = t;
      cp.x = x;
      cp.f.resize(n);
      for (int i = 0; i < n; ++i) {
        cp.f[i].resize(config.values.value(i));
        for (int b = 0; b < config.values.value(i); ++b)
          cp.f[i][b] = stats.f(i, b).to_double();
      }
      rec.checkpoints.push_back(std::move(cp));
    }
  }
  rec.final_stats = std::move(stats);
  if (config.audit)
    for (int i = 0; i < n; ++i)
      rec.audit_violations[i] = auditors[i].violations();
  return rec;
}

// Fraction of rounds 1..t whose realized profile is in `ne`, reported at
// each checkpoint time.
inline std::vector<std::pair<std::int64_t, Rational>> time_average_ne_fraction(
    const RunRecord& record, const EquilibriumSet& ne) {
  std::vector<std::pair<std::int64_t, Rational>> out;
  out.reserve(record.checkpoints.size());
  std::int64_t hits = 0;
  std::size_t cp = 0;
  for (std::size_t idx = 0; idx < record.trace.size(); ++idx) {
    if (ne.contains(record.trace[idx])) ++hits;
    const std::int64_t t = static_cast<std::int64_t>(idx) + 1;
    while (cp < record.checkpoints.size() && record.checkpoints[cp].t == t) {
      out.emplace_back(t, Rational(hits, t));
      ++cp;
    }
  }
  return out;
}

// Total-variation distance from a mixed strategy to the point mass on b.
inline double last_iterate_distance(const MixedStrategy& x, Bid b) {
  if (b < 0 || b >= static_cast<Bid>(x.probs.size()))
    throw std::domain_error("last_iterate_distance: bid out of range");
  return 1.0 - x.probs[b];
}

// Terminal-frequency rule: a highest-value bidder converged to v1-2 or v1-1
// if that bid's frequency at T clears the threshold.
inline ConvergenceVerdict classify_convergence(const RunRecord& record,
                                               int bidder,
                                               double threshold = 0.9) {
  const ValueProfile& values = record.config.values;
  const int v1 = values.highest_value();
  if (values.value(bidder) != v1)
    throw std::domain_error(
        "classify_convergence: bidder is not in the highest-value group");
  if (!(threshold > 0.5 && threshold <= 1.0))
    throw std::domain_error("classify_convergence: threshold out of (0.5, 1]");
  ConvergenceVerdict out;
  out.freq_high_minus_one = record.final_stats.f(bidder, v1 - 1).to_double();
  out.freq_high_minus_two =
      v1 >= 2 ? record.final_stats.f(bidder, v1 - 2).to_double() : 0.0;
  if (out.freq_high_minus_two > threshold)
    out.verdict = Verdict::ToHighMinusTwo;
  else if (out.freq_high_minus_one > threshold)
    out.verdict = Verdict::ToHighMinusOne;
  else
    out.verdict = Verdict::NotConverged;
  return out;
}

// Number of argmax changes of the bidder's checkpointed strategy across
// consecutive checkpoints inside [t_lo, t_hi].
inline int oscillation_indicator(const RunRecord& record, int bidder,
                                 std::int64_t t_lo, std::int64_t t_hi) {
  if (t_lo > t_hi || t_lo < 1)
    throw std::domain_error("oscillation_indicator: bad window");
  int count = 0;
  int prev = -1;
  bool seen = false;
  for (const Checkpoint& cp : record.checkpoints) {
    if (cp.t < t_lo || cp.t > t_hi) continue;
    const int a = cp.x[bidder].argmax();
    if (seen && a != prev) ++count;
    prev = a;
    seen = true;
  }
  if (!seen)
    throw std::domain_error("oscillation_indicator: window has no checkpoints");
  return count;
}

}  // namespace fpa
