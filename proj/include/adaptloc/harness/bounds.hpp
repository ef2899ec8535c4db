#pragma once
// Entropy, the static-optimality bound, and ledger checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "adaptloc/optimal.hpp"

namespace adaptloc::harness {

// max(1, log2 x)
inline double clamped_log2(double x) { return std::max(1.0, std::log2(x)); }

inline double empirical_entropy(std::span<const std::uint64_t> counts, std::uint64_t m) {
  double h = 0.0;
  for (std::uint64_t f : counts) {
    if (f == 0) continue;
    const double p = static_cast<double>(f) / static_cast<double>(m);
    h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

// Sum of f(s) * max(1, log2(m / f(s))) plus n + m.
inline double theorem6_bound(std::span<const std::uint64_t> counts, std::uint64_t m,
                             std::uint64_t n) {
  double total = static_cast<double>(n) + static_cast<double>(m);
  for (std::uint64_t f : counts) {
    if (f == 0) continue;
    total += static_cast<double>(f) * clamped_log2(static_cast<double>(m) / static_cast<double>(f));
  }
  return total;
}

struct Lemma4Region {
  RegionId region = RegionId::outside();
  std::uint64_t f = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool vacuous = true;
  bool consistent = true;  // recorded counts equal 1, 2, ...
  bool pass = true;
};

// One region. t[j-1] is the index of its j-th occurrence and freq[j-1] the
// recorded count at that index (which equals j in a consistent ledger).
inline Lemma4Region lemma4_region(std::span<const std::uint64_t> t,
                                  std::span<const std::uint64_t> freq, std::uint64_t r,
                                  std::uint64_t m) {
  Lemma4Region out;
  out.f = t.size();
  for (std::uint64_t j = 1; j <= out.f; ++j) {
    if (freq[j - 1] != j || (j > 1 && t[j - 1] <= t[j - 2])) out.consistent = false;
  }
  if (!out.consistent) {
    out.vacuous = false;
    out.pass = false;
    return out;
  }
  if (out.f < 2 * r) return out;
  out.vacuous = false;
  const double fs = static_cast<double>(out.f);
  out.rhs = fs * (3.0 + clamped_log2(static_cast<double>(m) / fs));
  for (std::uint64_t j = 2 * r; j <= out.f; ++j) {
    const double denom = static_cast<double>(freq[j - 1]) - static_cast<double>(r);
    out.lhs += clamped_log2(static_cast<double>(t[j - 1]) / denom);
  }
  out.pass = out.lhs <= out.rhs;
  return out;
}

struct Lemma4Report {
  std::vector<Lemma4Region> regions;  // checked or inconsistent regions
  std::uint64_t vacuous = 0;
  bool pass() const {
    return std::all_of(regions.begin(), regions.end(), [](const auto& r) { return r.pass; });
  }
};

// Every region with f(s) >= 2r must satisfy the inequality; m defaults to the
// ledger length.
inline Lemma4Report check_lemma4(const CostLedger& ledger, std::size_t n, double alpha,
                                 std::uint64_t m = 0) {
  if (m == 0) m = ledger.size();
  const std::uint64_t r = RebuildPolicy{alpha, 0.0}.period(n);
  Lemma4Report rep;
  const auto& occ = ledger.all_occurrences();
  std::vector<std::uint64_t> freq;
  for (std::size_t slot = 0; slot < occ.size(); ++slot) {
    const auto& t = occ[slot];
    if (t.empty()) continue;
    freq.clear();
    for (std::uint64_t i : t) freq.push_back(ledger.records()[i - 1].frequency);
    Lemma4Region reg = lemma4_region(t, freq, r, m);
    if (reg.vacuous) {
      ++rep.vacuous;
      continue;
    }
    reg.region = slot == ledger.regions() ? RegionId::outside()
                                          : RegionId::triangle(static_cast<std::uint32_t>(slot));
    rep.regions.push_back(reg);
  }
  return rep;
}

struct Lemma2Bucket {
  long long value = 0;  // round(log2(i / (f_i - r)))
  std::uint64_t queries = 0;
  double mean_visits = 0.0;
};

// Per-index visits averaged over seeds against log2(i / (f_i - r)), for
// queries with f_i >= 2r. `mean_visits[i-1]` and `freq[i-1]` describe query i.
inline std::vector<Lemma2Bucket> lemma2_buckets(std::span<const double> mean_visits,
                                                std::span<const std::uint64_t> freq,
                                                std::uint64_t r) {
  std::map<long long, std::pair<std::uint64_t, double>> acc;
  for (std::size_t k = 0; k < mean_visits.size(); ++k) {
    const std::uint64_t i = k + 1, f = freq[k];
    if (f < 2 * r) continue;
    const double x = static_cast<double>(i) / static_cast<double>(f - r);
    auto& slot = acc[std::llround(std::log2(x))];
    ++slot.first;
    slot.second += mean_visits[k];
  }
  std::vector<Lemma2Bucket> out;
  for (const auto& [v, a] : acc) out.push_back({v, a.first, a.second / static_cast<double>(a.first)});
  return out;
}

// Smallest C with mean <= C * value + C for every bucket.
inline double lemma2_constant(std::span<const Lemma2Bucket> buckets) {
  double c = 0.0;
  for (const auto& b : buckets) {
    c = std::max(c, b.mean_visits / (static_cast<double>(std::max<long long>(b.value, 0)) + 1.0));
  }
  return c;
}

// Smallest C with visits <= C * log2 n.
inline double worst_case_constant(std::uint64_t max_visits, std::size_t n) {
  return static_cast<double>(max_visits) / clamped_log2(static_cast<double>(n));
}

}  // namespace adaptloc::harness
