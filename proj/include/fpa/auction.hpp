#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fpa/rational.hpp"
#include "fpa/rng.hpp"
#include "fpa/types.hpp"

namespace fpa {

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kEnumerationGuard = 10'000'000;

// Expected utility of bidder i bidding b against the others' bids: the
// winner pays her bid, ties split uniformly among the highest bidders.
inline Rational expected_utility(int bidder, Bid b,
                                 const std::vector<Bid>& others,
                                 const ValueProfile& values) {
  const int v = values.value(bidder);
  if (b < 0 || b >= v)
    throw std::domain_error("expected_utility: bid outside bid set");
  Bid top = b;
  for (Bid ob : others) top = std::max(top, ob);
  if (b < top) return Rational(0);
  int winners = 1;
  for (Bid ob : others)
    if (ob == top) ++winners;
  return Rational(v - b, winners);
}

// Winner of a realized profile: uniformly random member of the argmax.
inline int realized_winner(const BidProfile& profile, SplitMix64& rng) {
  Bid top = *std::max_element(profile.bids.begin(), profile.bids.end());
  std::vector<int> winners;
  for (int i = 0; i < static_cast<int>(profile.bids.size()); ++i)
    if (profile.bids[i] == top) winners.push_back(i);
  if (winners.size() == 1) return winners[0];
  return winners[rng.next_below(winners.size())];
}

// True iff no bidder has a strictly improving unilateral deviation.
inline bool is_nash(const BidProfile& profile, const ValueProfile& values) {
  profile.validate(values);
  const int n = values.num_bidders();
  for (int i = 0; i < n; ++i) {
    std::vector<Bid> others;
    others.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(profile.bids[j]);
    Rational current = expected_utility(i, profile.bids[i], others, values);
    for (Bid alt = 0; alt < values.value(i); ++alt) {
      if (alt == profile.bids[i]) continue;
      if (expected_utility(i, alt, others, values) > current) return false;
    }
  }
  return true;
}

namespace detail {

// Cartesian product over per-bidder bid ranges [lo_i, hi_i]; calls `fn` for
// each assembled profile.
inline void for_each_profile(const std::vector<Bid>& lo,
                             const std::vector<Bid>& hi,
                             const std::function<void(const BidProfile&)>& fn) {
  const int n = static_cast<int>(lo.size());
  BidProfile p(lo);
  for (;;) {
    fn(p);
    int i = n - 1;
    while (i >= 0 && p.bids[i] == hi[i]) {
      p.bids[i] = lo[i];
      --i;
    }
    if (i < 0) return;
    ++p.bids[i];
  }
}

inline std::int64_t product_size(const std::vector<Bid>& lo,
                                 const std::vector<Bid>& hi) {
  std::int64_t total = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    total *= (hi[i] - lo[i] + 1);
    if (total > kEnumerationGuard) return total;
  }
  return total;
}

inline void check_guard(const std::vector<Bid>& lo, const std::vector<Bid>& hi,
                        const char* what) {
  if (product_size(lo, hi) > kEnumerationGuard)
    throw CapacityError(std::string(what) + ": profile space exceeds guard");
}

}  // namespace detail

// Exhaustive deviation-check oracle over the full product of bid sets.
inline EquilibriumSet brute_force_nash(const ValueProfile& values) {
  const int n = values.num_bidders();
  std::vector<Bid> lo(n, 0), hi(n);
  for (int i = 0; i < n; ++i) hi[i] = values.value(i) - 1;
  detail::check_guard(lo, hi, "brute_force_nash");
  std::vector<BidProfile> found;
  detail::for_each_profile(lo, hi, [&](const BidProfile& p) {
    if (is_nash(p, values)) found.push_back(p);
  });
  return EquilibriumSet(std::move(found));
}

// Closed-form enumeration of the pure equilibria by case analysis on the
// size of the highest-value group.
inline EquilibriumSet enumerate_pure_nash(const ValueProfile& values) {
  const int n = values.num_bidders();
  const int v1 = values.highest_value();
  const std::vector<int> m1 = values.highest_group();
  const int v2 = values.second_value();
  const std::vector<int> m2 = values.second_group();

  std::vector<BidProfile> out;

  auto emit_product = [&](const std::vector<Bid>& lo, const std::vector<Bid>& hi,
                          const std::function<bool(const BidProfile&)>& keep) {
    detail::check_guard(lo, hi, "enumerate_pure_nash");
    detail::for_each_profile(lo, hi, [&](const BidProfile& p) {
      if (!keep || keep(p)) out.push_back(p);
    });
  };

  auto in_m1 = [&](int i) { return values.value(i) == v1; };

  if (static_cast<int>(m1.size()) >= 3) {
    // Everyone in the top group bids v1-1; the rest bid freely (their bid
    // sets already cap them below v1-1).
    std::vector<Bid> lo(n, 0), hi(n, 0);
    for (int i = 0; i < n; ++i) {
      if (in_m1(i)) lo[i] = hi[i] = v1 - 1;
      else hi[i] = values.value(i) - 1;
    }
    emit_product(lo, hi, nullptr);
  } else if (m1.size() == 2) {
    const bool tight_third = (n > 2 && v2 == v1 - 1);
    // Both top bidders at v1-1; outsiders constrained to <= v1-2 when the
    // third value is tight, <= v1-3 otherwise (both limits are implied by
    // the outsiders' own bid sets).
    {
      std::vector<Bid> lo(n, 0), hi(n, 0);
      for (int i = 0; i < n; ++i) {
        if (in_m1(i)) lo[i] = hi[i] = v1 - 1;
        else hi[i] = values.value(i) - 1;
      }
      emit_product(lo, hi, nullptr);
    }
    // Both at v1-2: only when no outsider can match v1-2.
    if (!tight_third && v1 >= 2) {
      std::vector<Bid> lo(n, 0), hi(n, 0);
      for (int i = 0; i < n; ++i) {
        if (in_m1(i)) lo[i] = hi[i] = v1 - 2;
        else hi[i] = values.value(i) - 1;
      }
      emit_product(lo, hi, nullptr);
    }
  } else {
    // Unique highest bidder: she bids v2, at least one second-group bidder
    // bids v2-1, everyone else stays below v2.
    const int leader = m1[0];
    {
      std::vector<Bid> lo(n, 0), hi(n, 0);
      lo[leader] = hi[leader] = v2;
      for (int i = 0; i < n; ++i)
        if (i != leader) hi[i] = values.value(i) - 1;
      emit_product(lo, hi, [&](const BidProfile& p) {
        for (int j : m2)
          if (p.bids[j] == v2 - 1) return true;
        return false;
      });
    }
    // With a one-step gap and a unique runner-up, the pair can also settle
    // one notch lower.
    if (v1 == v2 + 1 && m2.size() == 1) {
      const int runner = m2[0];
      std::vector<Bid> lo(n, 0), hi(n, 0);
      lo[leader] = hi[leader] = v2 - 1;
      lo[runner] = hi[runner] = v2 - 1;
      for (int i = 0; i < n; ++i)
        if (i != leader && i != runner) hi[i] = values.value(i) - 1;
      emit_product(lo, hi, [&](const BidProfile& p) {
        for (int j = 0; j < n; ++j)
          if (j != leader && j != runner && p.bids[j] > v2 - 2) return false;
        return true;
      });
    }
  }
  return EquilibriumSet(std::move(out));
}

// Expected utility of bid b against the product of per-opponent empirical
// bid distributions.
inline Rational empirical_product_utility(
    int bidder, Bid b, const std::vector<std::vector<Rational>>& opponents,
    const ValueProfile& values) {
  const int n = values.num_bidders();
  if (static_cast<int>(opponents.size()) != n - 1)
    throw std::domain_error("empirical_product_utility: need N-1 opponents");
  for (const auto& dist : opponents) {
    Rational sum(0);
    for (const Rational& p : dist) sum += p;
    if (sum != Rational(1))
      throw std::domain_error(
          "empirical_product_utility: distribution does not sum to 1");
  }
  if (b < 0 || b >= values.value(bidder))
    throw std::domain_error("empirical_product_utility: bid outside bid set");

  // Recurse over opponents, tracking the probability of each (max opponent
  // bid strictly below b) / (tie count at b) outcome.
  Rational total(0);
  std::function<void(std::size_t, Rational, int, bool)> walk =
      [&](std::size_t idx, Rational prob, int ties_at_b, bool beaten) {
        if (prob == Rational(0)) return;
        if (idx == opponents.size()) {
          if (beaten) return;
          total += prob * Rational(values.value(bidder) - b, ties_at_b + 1);
          return;
        }
        const auto& dist = opponents[idx];
        for (std::size_t ob = 0; ob < dist.size(); ++ob) {
          Bid bid = static_cast<Bid>(ob);
          walk(idx + 1, prob * dist[ob], ties_at_b + (bid == b ? 1 : 0),
               beaten || bid > b);
        }
      };
  walk(0, Rational(1), 0, false);
  return total;
}

}  // namespace fpa
