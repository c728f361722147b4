#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fpa/dynamics.hpp"
#include "fpa/rng.hpp"

namespace fpa {

// A frequency series to track across runs for quantile bands: bidder i's
// empirical frequency of one bid, sampled at every checkpoint.
struct TrackSpec {
  int bidder;
  Bid bid;
};

struct BatchConfig {
  RunConfig base;  // base.seed is ignored; per-run seeds are derived
  int runs = 1;
  std::uint64_t master_seed = 0;
  double threshold = 0.9;
  std::vector<TrackSpec> tracks;
  // Oscillation window for the optional per-run switch count (-1 disables).
  int osc_bidder = -1;
  std::int64_t osc_lo = 1, osc_hi = 1;
  int classify_bidder = 0;  // whose terminal frequencies decide the verdict
  int threads = 0;          // 0 = hardware concurrency

  void validate() const {
    base.validate();
    if (runs < 1) throw std::domain_error("BatchConfig: runs must be >= 1");
    if (!(threshold > 0.5 && threshold <= 1.0))
      throw std::domain_error("BatchConfig: threshold out of (0.5, 1]");
  }
};

struct RunStat {
  int index = 0;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::NotConverged;
  std::vector<std::vector<double>> terminal_f;  // per bidder, per bid
  std::vector<std::vector<double>> terminal_x;
  double ne_fraction_at_end = 0.0;
  int oscillations = -1;
  std::int64_t audit_violations = 0;
};

struct BandSeries {
  TrackSpec track;
  std::vector<double> q_lo, q_med, q_hi;
};

struct BatchSummary {
  int runs = 0;
  std::uint64_t master_seed = 0;
  std::int64_t count_high_minus_one = 0;
  std::int64_t count_high_minus_two = 0;
  std::int64_t count_not_converged = 0;
  std::vector<RunStat> run_stats;          // sorted by index
  std::vector<std::int64_t> checkpoint_t;  // shared checkpoint times
  std::vector<BandSeries> bands;           // one per configured track
};

// Pointwise empirical quantile with linear interpolation between order
// statistics at position q*(n-1).
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::domain_error("quantile: empty sample");
  if (q < 0.0 || q > 1.0) throw std::domain_error("quantile: q out of [0,1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi) return xs[lo];
  const double w = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - w) + xs[hi] * w;
}

// Columnwise quantile bands over equally long per-run series.
inline std::pair<std::vector<double>, std::vector<double>> quantile_bands(
    const std::vector<std::vector<double>>& series, double q_lo, double q_hi) {
  if (series.empty()) throw std::domain_error("quantile_bands: no series");
  if (!(q_lo < q_hi))
    throw std::domain_error("quantile_bands: need q_lo < q_hi");
  const std::size_t len = series.front().size();
  for (const auto& s : series)
    if (s.size() != len)
      throw std::domain_error("quantile_bands: ragged series");
  std::vector<double> lo(len), hi(len);
  std::vector<double> col(series.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t r = 0; r < series.size(); ++r) col[r] = series[r][t];
    lo[t] = quantile(col, q_lo);
    hi[t] = quantile(col, q_hi);
  }
  return {std::move(lo), std::move(hi)};
}

namespace detail {

struct WorkerOut {
  RunStat stat;
  std::vector<std::vector<double>> track_series;  // per track, per checkpoint
};

inline WorkerOut summarize_run(const BatchConfig& cfg, int index,
                               const EquilibriumSet& ne) {
  RunConfig rc = cfg.base;
  rc.seed = derive_run_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
  RunRecord rec = run(rc);

  WorkerOut out;
  out.stat.index = index;
  out.stat.seed = rc.seed;
  out.stat.verdict =
      classify_convergence(rec, cfg.classify_bidder, cfg.threshold).verdict;
  const int n = rc.values.num_bidders();
  out.stat.terminal_f.resize(n);
  out.stat.terminal_x.resize(n);
  const Checkpoint& last = rec.checkpoints.back();
  for (int i = 0; i < n; ++i) {
    out.stat.terminal_f[i] = last.f[i];
    out.stat.terminal_x[i] = last.x[i].probs;
  }
  auto fractions = time_average_ne_fraction(rec, ne);
  out.stat.ne_fraction_at_end = fractions.back().second.to_double();
  if (cfg.osc_bidder >= 0)
    out.stat.oscillations =
        oscillation_indicator(rec, cfg.osc_bidder, cfg.osc_lo, cfg.osc_hi);
  for (const auto& v : rec.audit_violations)
    out.stat.audit_violations += static_cast<std::int64_t>(v.size());

  out.track_series.resize(cfg.tracks.size());
  for (std::size_t k = 0; k < cfg.tracks.size(); ++k) {
    auto& series = out.track_series[k];
    series.reserve(rec.checkpoints.size());
    for (const Checkpoint& cp : rec.checkpoints)
      series.push_back(cp.f[cfg.tracks[k].bidder][cfg.tracks[k].bid]);
  }
  return out;
}

}  // namespace detail

// R independent runs with derived seeds on a worker pool; aggregation is a
// deterministic fold over index-sorted results, so the summary does not
// depend on worker count or scheduling.
inline BatchSummary run_batch(const BatchConfig& cfg) {
  cfg.validate();
  const EquilibriumSet ne = enumerate_pure_nash(cfg.base.values);

  std::vector<detail::WorkerOut> outs(cfg.runs);
  std::atomic<int> next{0};
  int nthreads = cfg.threads > 0
                     ? cfg.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, cfg.runs));
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.runs) return;
      outs[i] = detail::summarize_run(cfg, i, ne);
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BatchSummary summary;
  summary.runs = cfg.runs;
  summary.master_seed = cfg.master_seed;
  for (auto& o : outs) {
    switch (o.stat.verdict) {
      case Verdict::ToHighMinusOne: ++summary.count_high_minus_one; break;
      case Verdict::ToHighMinusTwo: ++summary.count_high_minus_two; break;
      case Verdict::NotConverged: ++summary.count_not_converged; break;
    }
    summary.run_stats.push_back(std::move(o.stat));
  }

  // Shared checkpoint grid (configs are identical across runs).
  {
    RunConfig rc = cfg.base;
    const std::int64_t stride = rc.effective_stride();
    std::set<std::int64_t> extra(rc.extra_checkpoints.begin(),
                                 rc.extra_checkpoints.end());
    for (std::int64_t t = 1; t <= rc.rounds; ++t)
      if (t % stride == 0 || t == rc.rounds || extra.count(t))
        summary.checkpoint_t.push_back(t);
  }

  for (std::size_t k = 0; k < cfg.tracks.size(); ++k) {
    std::vector<std::vector<double>> series;
    series.reserve(outs.size());
    for (const auto& o : outs) series.push_back(o.track_series[k]);
    BandSeries band;
    band.track = cfg.tracks[k];
    auto [lo, hi] = quantile_bands(series, 0.10, 0.90);
    band.q_lo = std::move(lo);
    band.q_hi = std::move(hi);
    std::vector<double> col(series.size());
    band.q_med.resize(series.front().size());
    for (std::size_t t = 0; t < band.q_med.size(); ++t) {
      for (std::size_t r = 0; r < series.size(); ++r) col[r] = series[r][t];
      band.q_med[t] = quantile(col, 0.5);
    }
    summary.bands.push_back(std::move(band));
  }
  return summary;
}

// Canonical experiment parameterizations addressable by name.
struct ReproSpec {
  std::string id;
  bool is_batch = true;
  BatchConfig batch;   // when is_batch
  RunConfig single;    // otherwise
};

inline ReproSpec reproduce_spec(const std::string& id,
                                std::uint64_t master_seed = 20240901ULL) {
  ReproSpec spec;
  spec.id = id;
  auto learner = [](LearnerKind kind) {
    LearnerSpec s;
    s.kind = kind;
    return s;
  };
  if (id == "m2-epsgreedy" || id == "m2-mwu") {
    RunConfig base{ValueProfile({4, 4}),
                   std::vector<LearnerSpec>(
                       2, learner(id == "m2-mwu" ? LearnerKind::MWU
                                                 : LearnerKind::EpsGreedy)),
                   2000};
    spec.batch.base = base;
    spec.batch.runs = 1000;
    spec.batch.master_seed = master_seed;
    spec.batch.tracks = {{0, 3}, {0, 2}};
  } else if (id == "m1-epsgreedy" || id == "m1-mwu") {
    RunConfig base{ValueProfile({8, 6}),
                   std::vector<LearnerSpec>(
                       2, learner(id == "m1-mwu" ? LearnerKind::MWU
                                                 : LearnerKind::EpsGreedy)),
                   20000};
    spec.batch.base = base;
    spec.batch.runs = 100;
    spec.batch.master_seed = master_seed;
    spec.batch.tracks = {{1, 5}, {1, 3}};
    spec.batch.osc_bidder = 1;
    spec.batch.osc_lo = 10000;
    spec.batch.osc_hi = 20000;
  } else if (id == "example1") {
    spec.is_batch = false;
    LearnerSpec p1 = learner(LearnerKind::FTL);
    p1.tiebreak = TieBreak::Scripted;
    p1.script = {7};
    LearnerSpec p2 = p1;
    p2.script = {6, 1, 1};
    LearnerSpec p3 = p1;
    p3.script = {1, 6, 1};
    spec.single = RunConfig{ValueProfile({10, 7, 7}), {p1, p2, p3}, 300};
    spec.single.seed = master_seed;
  } else if (id == "counterexample") {
    spec.is_batch = false;
    LearnerSpec s = learner(LearnerKind::Counterexample);
    s.t0 = 1000;
    spec.single = RunConfig{ValueProfile({3, 3}), {s, s}, 32LL * 32 * 1000};
    spec.single.seed = master_seed;
    spec.single.checkpoint_stride = 100;
    spec.single.extra_checkpoints = {1001, 32001};
  } else {
    throw std::domain_error("reproduce_spec: unknown experiment id: " + id);
  }
  return spec;
}

}  // namespace fpa
