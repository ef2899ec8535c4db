#pragma once
// Subset-biased point location: a weighted trapezoidal map over the edges of
// a hot subset of triangles. Queries in a member triangle report it; all
// other queries report Fail.
//
// Gaps between members are not triangulated explicitly. The trapezoids of the
// subset's own decomposition that fall outside every member already cover
// them; they are labeled Fail and their sides are weighted W'/n' each.

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "adaptloc/errors.hpp"
#include "adaptloc/subdivision.hpp"
#include "adaptloc/trapmap.hpp"

namespace adaptloc {

class SubsetWeights {
 public:
  SubsetWeights() = default;
  explicit SubsetWeights(std::vector<std::pair<RegionId, std::uint64_t>> entries)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw EmptySubset("subset has no regions");
    std::vector<RegionId> seen;
    for (const auto& [r, w] : entries_) {
      if (!r.is_triangle()) throw RegionNotInTriangulation("Outside cannot join a subset");
      if (w < 1) throw NonPositiveWeight("weight of " + r.str() + " is below 1");
      seen.push_back(r);
      total_ += w;
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw Error("subset lists a region twice");
    }
  }

  const std::vector<std::pair<RegionId, std::uint64_t>>& entries() const { return entries_; }
  std::uint64_t total() const { return total_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<RegionId, std::uint64_t>> entries_;
  std::uint64_t total_ = 0;
};

// Exact W'/n'.
struct FillerWeight {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const FillerWeight& a, const FillerWeight& b) {
    return a.numerator * b.denominator == b.numerator * a.denominator;
  }
};

struct SubsetAnswer {
  bool hit = false;
  RegionId region = RegionId::outside();  // meaningful only when hit
  std::uint32_t visits = 0;
};

class SubsetLocator {
 public:
  SubsetAnswer locate(const Point& p) const {
    const LocateResult r = dag_.locate(p);
    if (!r.region) return {false, RegionId::outside(), r.visits};
    return {true, *r.region, r.visits};
  }

  const TrapezoidDag& dag() const { return dag_; }
  const std::vector<RegionId>& members() const { return members_; }
  FillerWeight filler_weight() const { return filler_; }
  // Edge collection plus trapezoidal-map construction work.
  std::uint64_t build_work() const { return build_work_; }

 private:
  friend SubsetLocator build_subset_biased(const Triangulation&, const SubsetWeights&,
                                           std::uint64_t);
  TrapezoidDag dag_;
  std::vector<RegionId> members_;
  FillerWeight filler_;
  std::uint64_t build_work_ = 0;
};

inline SubsetLocator build_subset_biased(const Triangulation& tri, const SubsetWeights& weights,
                                         std::uint64_t seed) {
  if (weights.size() == 0) throw EmptySubset("subset has no regions");
  std::unordered_map<std::uint32_t, std::uint64_t> weight_of;
  weight_of.reserve(weights.size() * 2);
  for (const auto& [r, w] : weights.entries()) {
    if (r.index() >= tri.size()) {
      throw RegionNotInTriangulation(r.str() + " is not a triangle of the triangulation");
    }
    weight_of.emplace(r.index(), w);
  }

  SubsetLocator loc;
  loc.filler_ = {weights.total(), weights.size()};
  const double filler = loc.filler_.value();
  std::uint64_t work = 0;

  struct FaceSide {
    Label label;
    double weight;
  };
  auto side = [&](const std::optional<std::uint32_t>& t) -> FaceSide {
    if (t) {
      if (auto it = weight_of.find(*t); it != weight_of.end()) {
        return {RegionId::triangle(*t), static_cast<double>(it->second)};
      }
    }
    return {std::nullopt, filler};
  };

  // An edge shared by two members is emitted once, carrying both labels.
  std::unordered_set<std::uint32_t> emitted;
  emitted.reserve(weights.size() * 4);
  std::vector<LabeledSegment> segments;
  std::vector<double> edge_weights;
  segments.reserve(weights.size() * 3);
  edge_weights.reserve(weights.size() * 3);
  const auto& verts = tri.vertices();
  for (const auto& entry : weights.entries()) {
    const RegionId r = entry.first;
    loc.members_.push_back(r);
    for (auto e : tri.triangle_edges(r.index())) {
      ++work;
      if (!emitted.insert(e).second) continue;
      const Edge& edge = tri.edges()[e];
      const FaceSide l = side(edge.left), rt = side(edge.right);
      segments.push_back(
          LabeledSegment::from_directed(verts[edge.u], verts[edge.v], l.label, rt.label));
      edge_weights.push_back(l.weight + rt.weight);
    }
  }

  const InsertionOrder order = weighted_permutation(edge_weights, seed);
  loc.dag_ = TrapezoidDag::build(std::move(segments), order, tri.bbox().padded(1), std::nullopt);
  loc.build_work_ = work + loc.dag_.build_work();
  return loc;
}

}  // namespace adaptloc
