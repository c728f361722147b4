#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fpa {

using Bid = int;

// Fixed integer values of the bidders plus the global cap V.  Input order is
// preserved; derived quantities (highest-value group, second-highest value)
// are computed, never assumed from order.
class ValueProfile {
 public:
  ValueProfile(std::vector<int> values, int cap)
      : values_(std::move(values)), cap_(cap) {
    if (values_.size() < 2)
      throw std::domain_error("ValueProfile: need at least 2 bidders");
    if (cap_ < 1) throw std::domain_error("ValueProfile: cap must be >= 1");
    for (int v : values_)
      if (v < 1 || v > cap_)
        throw std::domain_error("ValueProfile: value out of [1, cap]");
  }

  // Placeholder two-bidder profile so config structs are default-buildable;
  // real profiles come from the explicit constructors.
  ValueProfile() : ValueProfile(std::vector<int>{1, 1}) {}

  explicit ValueProfile(const std::vector<int>& values)
      : ValueProfile(values,
                     values.empty() ? 1
                                    : *std::max_element(values.begin(),
                                                        values.end())) {}

  int num_bidders() const { return static_cast<int>(values_.size()); }
  int value(int i) const { return values_.at(i); }
  const std::vector<int>& values() const { return values_; }
  int cap() const { return cap_; }

  int bid_set_size(int i) const { return value(i); }  // bids {0,...,v-1}

  int highest_value() const {
    return *std::max_element(values_.begin(), values_.end());
  }

  // Bidders sharing the highest value (the M^1 group).
  std::vector<int> highest_group() const {
    int v1 = highest_value();
    std::vector<int> g;
    for (int i = 0; i < num_bidders(); ++i)
      if (values_[i] == v1) g.push_back(i);
    return g;
  }

  // Second-highest distinct value, or 0 if all values are equal.
  int second_value() const {
    int v1 = highest_value();
    int v2 = 0;
    for (int v : values_)
      if (v < v1) v2 = std::max(v2, v);
    return v2;
  }

  // Bidders sharing the second-highest distinct value (the M^2 group).
  std::vector<int> second_group() const {
    int v2 = second_value();
    std::vector<int> g;
    if (v2 == 0) return g;
    for (int i = 0; i < num_bidders(); ++i)
      if (values_[i] == v2) g.push_back(i);
    return g;
  }

  friend bool operator==(const ValueProfile& a, const ValueProfile& b) {
    return a.values_ == b.values_ && a.cap_ == b.cap_;
  }

 private:
  std::vector<int> values_;
  int cap_;
};

// One bid per bidder; each bid must lie in that bidder's set {0,...,v^i-1}.
struct BidProfile {
  std::vector<Bid> bids;

  BidProfile() = default;
  explicit BidProfile(std::vector<Bid> b) : bids(std::move(b)) {}

  void validate(const ValueProfile& values) const {
    if (static_cast<int>(bids.size()) != values.num_bidders())
      throw std::domain_error("BidProfile: size mismatch");
    for (int i = 0; i < values.num_bidders(); ++i)
      if (bids[i] < 0 || bids[i] >= values.value(i))
        throw std::domain_error("BidProfile: bid outside bidder's bid set");
  }

  friend bool operator==(const BidProfile& a, const BidProfile& b) {
    return a.bids == b.bids;
  }
  friend bool operator<(const BidProfile& a, const BidProfile& b) {
    return a.bids < b.bids;
  }
};

// Probability vector over a bidder's bid set.
struct MixedStrategy {
  std::vector<double> probs;

  MixedStrategy() = default;
  explicit MixedStrategy(std::vector<double> p) : probs(std::move(p)) {}

  static MixedStrategy point_mass(int bid, int num_bids) {
    std::vector<double> p(num_bids, 0.0);
    p.at(bid) = 1.0;
    return MixedStrategy(std::move(p));
  }

  static MixedStrategy uniform(int num_bids) {
    return MixedStrategy(
        std::vector<double>(num_bids, 1.0 / static_cast<double>(num_bids)));
  }

  bool valid(double tol = 1e-12) const {
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) return false;
      sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
  }

  int argmax() const {
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                            probs.begin());
  }

  friend bool operator==(const MixedStrategy& a, const MixedStrategy& b) {
    return a.probs == b.probs;
  }
};

// Deduplicated, lexicographically sorted set of pure Nash equilibria.
class EquilibriumSet {
 public:
  EquilibriumSet() = default;
  explicit EquilibriumSet(std::vector<BidProfile> profiles)
      : profiles_(std::move(profiles)) {
    std::sort(profiles_.begin(), profiles_.end());
    profiles_.erase(std::unique(profiles_.begin(), profiles_.end()),
                    profiles_.end());
  }

  const std::vector<BidProfile>& profiles() const { return profiles_; }
  std::size_t size() const { return profiles_.size(); }

  bool contains(const BidProfile& p) const {
    return std::binary_search(profiles_.begin(), profiles_.end(), p);
  }

  friend bool operator==(const EquilibriumSet& a, const EquilibriumSet& b) {
    return a.profiles_ == b.profiles_;
  }

 private:
  std::vector<BidProfile> profiles_;
};

}  // namespace fpa
