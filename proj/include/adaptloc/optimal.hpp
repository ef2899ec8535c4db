#pragma once
// Self-adjusting point location without prior knowledge of the query
// distribution.
//
// Every query first tries the hot subset structure and falls back to the
// static structure on Fail. Counts are never reset; after every r-th query
// (r = ceil(n^alpha)) the hot structure is rebuilt over the k = ceil(n^beta)
// most queried triangles, weighted by their counts at that moment. The query
// that triggers a rebuild is answered before the rebuild happens.

#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptloc/biased.hpp"
#include "adaptloc/errors.hpp"
#include "adaptloc/frequency.hpp"
#include "adaptloc/random.hpp"
#include "adaptloc/subdivision.hpp"
#include "adaptloc/trapmap.hpp"

namespace adaptloc {

namespace detail {
// ceil of a real that may carry rounding noise just above an integer.
inline std::uint64_t robust_ceil(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(v));
}
}  // namespace detail

struct RebuildPolicy {
  double alpha = 0.5;
  double beta = 0.25;

  // Throws InvalidPolicy naming the first violated inequality of
  // 0 < beta < alpha < 1 - beta < 1.
  void validate() const {
    if (!(beta > 0.0)) throw InvalidPolicy("0 < beta violated");
    if (!(beta < alpha)) throw InvalidPolicy("beta < alpha violated");
    if (!(alpha < 1.0 - beta)) throw InvalidPolicy("alpha < 1 - beta violated");
    if (!(1.0 - beta < 1.0)) throw InvalidPolicy("1 - beta < 1 violated");
  }

  std::uint64_t period(std::size_t n) const {
    return std::max<std::uint64_t>(1, detail::robust_ceil(std::pow(static_cast<double>(n), alpha)));
  }
  std::uint64_t subset_cap(std::size_t n) const {
    return std::max<std::uint64_t>(1, detail::robust_ceil(std::pow(static_cast<double>(n), beta)));
  }
};

enum class Route { HotHit, HotFailThenStatic, StaticOnly };

inline const char* route_name(Route r) {
  switch (r) {
    case Route::HotHit: return "hot_hit";
    case Route::HotFailThenStatic: return "hot_fail_static";
    default: return "static_only";
  }
}

inline Route parse_route(const std::string& s) {
  if (s == "hot_hit") return Route::HotHit;
  if (s == "hot_fail_static") return Route::HotFailThenStatic;
  if (s == "static_only") return Route::StaticOnly;
  throw ParseError("unknown route '" + s + "'");
}

struct LedgerRecord {
  std::uint64_t index = 0;  // 1-based query number i
  RegionId region = RegionId::outside();
  Route route = Route::StaticOnly;
  std::uint32_t visits_hot = 0;
  std::uint32_t visits_static = 0;
  std::uint64_t frequency = 0;  // f_i(q_i), including this query
  bool rebuild = false;

  std::uint32_t visits_total() const { return visits_hot + visits_static; }
};

class CostLedger {
 public:
  explicit CostLedger(std::uint32_t n = 0) : n_(n), occurrences_(n + 1) {}

  void append(const LedgerRecord& r) {
    records_.push_back(r);
    occurrences_[slot(r.region)].push_back(r.index);
  }

  const std::vector<LedgerRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::uint32_t regions() const { return n_; }
  void mark_rebuild() { records_.back().rebuild = true; }

  // t_1(s), t_2(s), ...: indices at which s was returned.
  const std::vector<std::uint64_t>& occurrences(RegionId s) const { return occurrences_[slot(s)]; }
  // Occurrence lists for Triangle(0..n-1) then Outside.
  const std::vector<std::vector<std::uint64_t>>& all_occurrences() const { return occurrences_; }

  void write_csv(std::ostream& os) const {
    os << "i,region,route,visits_hot,visits_static,f_i,rebuild\n";
    for (const auto& r : records_) {
      os << r.index << ',' << r.region.code() << ',' << route_name(r.route) << ',' << r.visits_hot
         << ',' << r.visits_static << ',' << r.frequency << ',' << (r.rebuild ? 1 : 0) << '\n';
    }
  }

  // Inverse of write_csv for a triangulation with n triangles.
  static CostLedger read_csv(std::istream& is, std::uint32_t n) {
    CostLedger ledger(n);
    std::string line;
    if (!std::getline(is, line)) throw ParseError("ledger is empty");
    std::size_t row = 1;
    while (std::getline(is, line)) {
      ++row;
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != 7) throw ParseError("ledger row " + std::to_string(row) + ": expected 7 columns");
      try {
        LedgerRecord r;
        r.index = std::stoull(cells[0]);
        const long long code = std::stoll(cells[1]);
        if (code < -1 || code >= static_cast<long long>(n)) {
          throw ParseError("ledger row " + std::to_string(row) + ": region out of range");
        }
        r.region = RegionId::from_code(code);
        r.route = parse_route(cells[2]);
        r.visits_hot = static_cast<std::uint32_t>(std::stoul(cells[3]));
        r.visits_static = static_cast<std::uint32_t>(std::stoul(cells[4]));
        r.frequency = std::stoull(cells[5]);
        r.rebuild = cells[6] == "1";
        if (r.index != ledger.size() + 1) {
          throw ParseError("ledger row " + std::to_string(row) + ": indices must be 1, 2, ...");
        }
        ledger.append(r);
      } catch (const std::logic_error&) {
        throw ParseError("ledger row " + std::to_string(row) + ": malformed number");
      }
    }
    return ledger;
  }

 private:
  std::uint32_t slot(RegionId s) const {
    if (s.is_outside()) return n_;
    if (s.index() >= n_) throw UnknownRegion("region " + s.str() + " is not tracked");
    return s.index();
  }

  std::uint32_t n_;
  std::vector<LedgerRecord> records_;
  std::vector<std::vector<std::uint64_t>> occurrences_;
};

struct QueryOutcome {
  RegionId region = RegionId::outside();
  Route route = Route::StaticOnly;
  std::uint32_t visits_hot = 0;
  std::uint32_t visits_static = 0;
  std::uint32_t visits_total = 0;
  bool rebuild_triggered = false;
};

struct RebuildStats {
  std::vector<RegionId> subset;
  std::vector<std::uint64_t> weights;
  std::uint64_t top_k_work = 0;
  std::uint64_t build_work = 0;  // subset construction only
};

class SelfAdjustingLocator {
 public:
  SelfAdjustingLocator(std::shared_ptr<const Triangulation> tri, RebuildPolicy policy,
                       std::uint64_t seed)
      : tri_(std::move(tri)),
        policy_(policy),
        seed_(seed),
        freq_(static_cast<std::uint32_t>(tri_->size())),
        ledger_(static_cast<std::uint32_t>(tri_->size())) {
    if (tri_->size() == 0) throw ValidationError({"Empty"});
    policy_.validate();
    period_ = policy_.period(tri_->size());
    cap_ = policy_.subset_cap(tri_->size());
    static_ = build_static(*tri_, derive_seed(seed_, "static", 0));
  }

  SelfAdjustingLocator(const Triangulation& tri, RebuildPolicy policy, std::uint64_t seed)
      : SelfAdjustingLocator(std::make_shared<const Triangulation>(tri), policy, seed) {}

  QueryOutcome query(const Point& p) {
    QueryOutcome out;
    if (hot_) {
      const SubsetAnswer a = hot_->locate(p);
      out.visits_hot = a.visits;
      if (a.hit) {
        out.region = a.region;
        out.route = Route::HotHit;
      } else {
        out.route = Route::HotFailThenStatic;
      }
    }
    if (out.route != Route::HotHit) {
      const LocateResult r = static_.locate(p);
      out.visits_static = r.visits;
      out.region = r.region.value_or(RegionId::outside());
    }
    out.visits_total = out.visits_hot + out.visits_static;

    const std::uint64_t f = freq_.increment(out.region);
    ++answered_;
    visits_ += out.visits_total;
    ledger_.append({answered_, out.region, out.route, out.visits_hot, out.visits_static, f, false});
    if (answered_ % period_ == 0) {
      rebuild_now();
      ledger_.mark_rebuild();
      out.rebuild_triggered = true;
    }
    return out;
  }

  RebuildStats rebuild_now() {
    if (answered_ == 0) throw Error("rebuild requires at least one answered query");
    RebuildStats stats;
    const auto top = freq_.top_k(cap_, true, &stats.top_k_work);
    ++rebuilds_;
    rebuild_work_ += stats.top_k_work;
    if (top.empty()) {
      hot_.reset();
      return stats;
    }
    for (const auto& [r, c] : top) {
      stats.subset.push_back(r);
      stats.weights.push_back(c);
    }
    hot_ = build_subset_biased(*tri_, SubsetWeights(top), derive_seed(seed_, "rebuild", rebuilds_));
    stats.build_work = hot_->build_work();
    rebuild_work_ += stats.build_work;
    last_subset_size_ = stats.subset.size();
    return stats;
  }

  const Triangulation& triangulation() const { return *tri_; }
  const RebuildPolicy& policy() const { return policy_; }
  std::uint64_t period() const { return period_; }
  std::uint64_t subset_cap() const { return cap_; }
  std::uint64_t queries_answered() const { return answered_; }
  std::uint64_t rebuilds() const { return rebuilds_; }
  // top-k reports plus subset construction, summed over all rebuilds.
  std::uint64_t rebuild_work() const { return rebuild_work_; }
  std::uint64_t query_visits() const { return visits_; }
  std::size_t last_subset_size() const { return last_subset_size_; }
  const TrapezoidDag& static_structure() const { return static_; }
  const SubsetLocator* hot() const { return hot_ ? &*hot_ : nullptr; }
  const FrequencyTable& frequencies() const { return freq_; }
  const CostLedger& ledger() const { return ledger_; }

 private:
  std::shared_ptr<const Triangulation> tri_;
  RebuildPolicy policy_;
  std::uint64_t seed_;
  std::uint64_t period_ = 1, cap_ = 1;
  TrapezoidDag static_;
  std::optional<SubsetLocator> hot_;
  FrequencyTable freq_;
  CostLedger ledger_;
  std::uint64_t answered_ = 0;
  std::uint64_t rebuilds_ = 0;
  std::uint64_t rebuild_work_ = 0;
  std::uint64_t visits_ = 0;
  std::size_t last_subset_size_ = 0;
};

}  // namespace adaptloc
