#pragma once

#include <cstdint>
#include <vector>

#include "fpa/auction.hpp"
#include "fpa/rational.hpp"
#include "fpa/types.hpp"

namespace fpa {

// Cumulative per-bidder history statistics, maintained exactly:
//   alpha_sum[b]  running sum of counterfactual rewards of bid b
//                 (alpha_t(b) = alpha_sum[b] / t),
//   p_count[k]    rounds where the opponents' max bid equals k,
//   q_sum[k]      running sum of 1/(#opponents at k + 1) over those rounds,
//   f_count[b]    rounds where the bidder itself bid b.
struct BidderStats {
  std::vector<Rational> alpha_sum;
  std::vector<std::int64_t> p_count;
  std::vector<Rational> q_sum;
  std::vector<std::int64_t> f_count;

  Rational alpha(int bid, std::int64_t t) const {
    return t == 0 ? Rational(0) : alpha_sum[bid] / Rational(t);
  }
  Rational p(int level, std::int64_t t) const {
    return t == 0 ? Rational(0) : Rational(p_count[level], t);
  }
  Rational q(int level, std::int64_t t) const {
    return t == 0 ? Rational(0) : q_sum[level] / Rational(t);
  }
  Rational f(int bid, std::int64_t t) const {
    return t == 0 ? Rational(0) : Rational(f_count[bid], t);
  }
};

class HistoryStats {
 public:
  explicit HistoryStats(const ValueProfile& values)
      : values_(values), t_(0), bidders_(values.num_bidders()) {
    const int cap = values.cap();
    for (int i = 0; i < values.num_bidders(); ++i) {
      BidderStats& s = bidders_[i];
      s.alpha_sum.assign(values.value(i), Rational(0));
      // Opponent-max levels range over the full cap so the P/Q histograms
      // are well-defined even against higher-value opponents.
      s.p_count.assign(cap, 0);
      s.q_sum.assign(cap, Rational(0));
      s.f_count.assign(values.value(i), 0);
    }
  }

  const ValueProfile& values() const { return values_; }
  std::int64_t round_count() const { return t_; }
  const BidderStats& bidder(int i) const { return bidders_.at(i); }

  // Average counterfactual reward alpha_t^i(b).
  Rational alpha(int i, int bid) const { return bidders_[i].alpha(bid, t_); }
  Rational p(int i, int level) const { return bidders_[i].p(level, t_); }
  Rational q(int i, int level) const { return bidders_[i].q(level, t_); }
  Rational f(int i, int bid) const { return bidders_[i].f(bid, t_); }

  // Sum of P over levels [0, level).
  Rational p_below(int i, int level) const {
    if (t_ == 0) return Rational(0);
    std::int64_t c = 0;
    for (int k = 0; k < level; ++k) c += bidders_[i].p_count[k];
    return Rational(c, t_);
  }

  std::vector<double> alpha_view(int i) const {
    std::vector<double> out(bidders_[i].alpha_sum.size());
    for (std::size_t b = 0; b < out.size(); ++b)
      out[b] = alpha(i, static_cast<int>(b)).to_double();
    return out;
  }

  void update(const BidProfile& profile) {
    profile.validate(values_);
    const int n = values_.num_bidders();
    ++t_;
    for (int i = 0; i < n; ++i) {
      BidderStats& s = bidders_[i];
      Bid opp_max = -1;
      int opp_at_max = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (profile.bids[j] > opp_max) {
          opp_max = profile.bids[j];
          opp_at_max = 1;
        } else if (profile.bids[j] == opp_max) {
          ++opp_at_max;
        }
      }
      const int v = values_.value(i);
      for (Bid b = 0; b < v; ++b) {
        if (b > opp_max) s.alpha_sum[b] += Rational(v - b);
        else if (b == opp_max) s.alpha_sum[b] += Rational(v - b, opp_at_max + 1);
      }
      s.p_count[opp_max] += 1;
      s.q_sum[opp_max] += Rational(1, opp_at_max + 1);
      s.f_count[profile.bids[i]] += 1;
    }
  }

  friend bool operator==(const HistoryStats& a, const HistoryStats& b) {
    if (a.t_ != b.t_ || !(a.values_ == b.values_)) return false;
    for (std::size_t i = 0; i < a.bidders_.size(); ++i) {
      const BidderStats& x = a.bidders_[i];
      const BidderStats& y = b.bidders_[i];
      if (x.alpha_sum != y.alpha_sum || x.p_count != y.p_count ||
          x.q_sum != y.q_sum || x.f_count != y.f_count)
        return false;
    }
    return true;
  }

 private:
  ValueProfile values_;
  std::int64_t t_;
  std::vector<BidderStats> bidders_;
};

// Functional form of the incremental update.
inline HistoryStats update_stats(HistoryStats stats, const BidProfile& profile) {
  stats.update(profile);
  return stats;
}

// Batch recomputation from a full trace.
inline HistoryStats stats_from_trace(const ValueProfile& values,
                                     const std::vector<BidProfile>& trace) {
  HistoryStats stats(values);
  for (const BidProfile& p : trace) stats.update(p);
  return stats;
}

}  // namespace fpa
