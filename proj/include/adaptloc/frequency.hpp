#pragma once
// Per-region query counters with O(1) increments and O(k) top-k reports.
//
// Regions sharing a count live in one bucket; buckets form a list sorted by
// count, so an increment only ever moves a region to the adjacent bucket.
// Inside a bucket, members are kept in a 64-ary bitset trie over region
// slots, which yields ascending-index iteration for the tie-break rule at a
// constant number of word operations per step (at most 4 levels for fewer
// than 2^24 regions).

#include <bit>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adaptloc/errors.hpp"
#include "adaptloc/subdivision.hpp"

namespace adaptloc {

class IndexSet {
 public:
  explicit IndexSet(std::uint32_t universe = 1) {
    levels_ = 1;
    std::uint64_t span = 64;
    while (span < universe) {
      span *= 64;
      ++levels_;
    }
    words_.resize(levels_);
  }

  bool empty() const { return words_.back().empty(); }

  void insert(std::uint32_t x) {
    for (int l = 0; l < levels_; ++l) {
      std::uint64_t& w = words_[l][key(x, l)];
      const bool had = w != 0;
      w |= bit(x, l);
      if (had) return;
    }
  }

  void erase(std::uint32_t x) {
    for (int l = 0; l < levels_; ++l) {
      auto it = words_[l].find(key(x, l));
      if (it == words_[l].end()) return;
      it->second &= ~bit(x, l);
      if (it->second != 0) return;
      words_[l].erase(it);
    }
  }

  std::optional<std::uint32_t> min() const {
    if (empty()) return std::nullopt;
    return descend(levels_ - 1, 0);
  }

  // Smallest member strictly greater than x.
  std::optional<std::uint32_t> next(std::uint32_t x) const {
    for (int l = 0; l < levels_; ++l) {
      const std::uint64_t k = key(x, l);
      auto it = words_[l].find(k);
      if (it == words_[l].end()) continue;
      const unsigned pos = static_cast<unsigned>((x >> (6 * l)) & 63);
      const std::uint64_t above = pos == 63 ? 0 : it->second & (~std::uint64_t{0} << (pos + 1));
      if (above == 0) continue;
      const std::uint64_t child = k * 64 + static_cast<std::uint64_t>(std::countr_zero(above));
      if (l == 0) return static_cast<std::uint32_t>(child);
      return descend(l - 1, child);
    }
    return std::nullopt;
  }

 private:
  static std::uint64_t key(std::uint32_t x, int l) { return std::uint64_t{x} >> (6 * (l + 1)); }
  static std::uint64_t bit(std::uint32_t x, int l) {
    return std::uint64_t{1} << ((x >> (6 * l)) & 63);
  }

  std::uint32_t descend(int l, std::uint64_t prefix) const {
    for (; l >= 0; --l) {
      const std::uint64_t w = words_[l].at(prefix);
      prefix = prefix * 64 + static_cast<std::uint64_t>(std::countr_zero(w));
    }
    return static_cast<std::uint32_t>(prefix);
  }

  int levels_ = 1;
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> words_;
};

class FrequencyTable {
 public:
  // Tracks Triangle(0..n-1) and Outside.
  explicit FrequencyTable(std::uint32_t n) : n_(n), counts_(n + 1, 0), bucket_of_(n + 1, -1) {}

  std::uint32_t regions() const { return n_; }

  std::uint64_t increment(RegionId s) {
    const std::uint32_t slot = slot_of(s);
    const std::uint64_t c = counts_[slot];
    const std::int32_t from = bucket_of_[slot];
    const std::int32_t after = from >= 0 ? buckets_[from].next : head_;
    std::int32_t to;
    if (after >= 0 && buckets_[after].count == c + 1) {
      to = after;
    } else if (from >= 0 && single(from)) {
      // Sole member: relabel the bucket in place.
      buckets_[from].count = c + 1;
      counts_[slot] = c + 1;
      ++ops_;
      ++total_;
      return c + 1;
    } else {
      to = make_bucket(c + 1, from, after);
    }
    if (from >= 0) {
      buckets_[from].members.erase(slot);
      --buckets_[from].size;
      if (buckets_[from].size == 0) drop_bucket(from);
    }
    buckets_[to].members.insert(slot);
    ++buckets_[to].size;
    bucket_of_[slot] = to;
    counts_[slot] = c + 1;
    ++ops_;
    ++total_;
    return c + 1;
  }

  std::uint64_t count(RegionId s) const { return counts_[slot_of(s)]; }
  std::uint64_t total() const { return total_; }

  // The k highest counts, descending; ties by ascending triangle index.
  // `work`, when given, receives the number of buckets and members visited.
  std::vector<std::pair<RegionId, std::uint64_t>> top_k(std::size_t k, bool exclude_outside = true,
                                                        std::uint64_t* work = nullptr) const {
    std::vector<std::pair<RegionId, std::uint64_t>> out;
    std::uint64_t steps = 0;
    if (work) *work = 0;
    if (k == 0) return out;
    out.reserve(k);
    for (std::int32_t b = tail_; b >= 0 && out.size() < k; b = buckets_[b].prev) {
      ++steps;
      const Bucket& bucket = buckets_[b];
      for (auto m = bucket.members.min(); m && out.size() < k; m = bucket.members.next(*m)) {
        ++steps;
        if (*m == n_) {
          if (exclude_outside) continue;
          out.emplace_back(RegionId::outside(), bucket.count);
        } else {
          out.emplace_back(RegionId::triangle(*m), bucket.count);
        }
      }
    }
    if (work) *work = steps;
    return out;
  }

  // Structural bucket operations (moves, creations, removals) since construction.
  std::uint64_t bucket_ops() const { return ops_; }

  // Distinct count values currently present, ascending.
  std::vector<std::uint64_t> bucket_counts() const {
    std::vector<std::uint64_t> out;
    for (std::int32_t b = head_; b >= 0; b = buckets_[b].next) out.push_back(buckets_[b].count);
    return out;
  }

 private:
  struct Bucket {
    std::uint64_t count = 0;
    std::size_t size = 0;
    IndexSet members;
    std::int32_t prev = -1, next = -1;
  };

  std::uint32_t slot_of(RegionId s) const {
    if (s.is_outside()) return n_;
    if (s.index() >= n_) throw UnknownRegion("region " + s.str() + " is not tracked");
    return s.index();
  }

  bool single(std::int32_t b) const { return buckets_[b].size == 1; }

  std::int32_t make_bucket(std::uint64_t count, std::int32_t prev, std::int32_t next) {
    std::int32_t id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
    } else {
      id = static_cast<std::int32_t>(buckets_.size());
      buckets_.push_back(Bucket{0, 0, IndexSet(n_ + 1), -1, -1});
    }
    Bucket& b = buckets_[id];
    b.count = count;
    b.size = 0;
    b.prev = prev;
    b.next = next;
    if (prev >= 0) buckets_[prev].next = id; else head_ = id;
    if (next >= 0) buckets_[next].prev = id; else tail_ = id;
    ++ops_;
    return id;
  }

  void drop_bucket(std::int32_t id) {
    Bucket& b = buckets_[id];
    if (b.prev >= 0) buckets_[b.prev].next = b.next; else head_ = b.next;
    if (b.next >= 0) buckets_[b.next].prev = b.prev; else tail_ = b.prev;
    free_.push_back(id);
    ++ops_;
  }

  std::uint32_t n_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::int32_t> bucket_of_;
  std::vector<Bucket> buckets_;
  std::vector<std::int32_t> free_;
  std::int32_t head_ = -1, tail_ = -1;
  std::uint64_t ops_ = 0;
  std::uint64_t total_ = 0;
};

}  // namespace adaptloc
