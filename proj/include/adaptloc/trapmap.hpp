#pragma once
// Randomized incremental trapezoidal decomposition with a history DAG.
//
// All x-comparisons are lex_less (a symbolic shear), so no two endpoints share
// an x-coordinate and every trapezoid has at most two neighbours per side.
// Neighbour links are defined structurally: the upper-left neighbour of Z is
// the trapezoid whose right wall vertex is Z's left wall vertex and that
// shares Z's top segment; the lower-left one shares the bottom segment.
// The same holds on the right side. A link is absent (-1) when no such
// trapezoid exists, e.g. when the top segment ends at the wall vertex.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "adaptloc/errors.hpp"
#include "adaptloc/geometry.hpp"
#include "adaptloc/random.hpp"
#include "adaptloc/subdivision.hpp"

namespace adaptloc {

// Leaf answer: a region, or nullopt for a failed query on a subset structure.
using Label = std::optional<RegionId>;

inline std::string label_str(const Label& l) { return l ? l->str() : std::string("Fail"); }

struct LabeledSegment {
  Point left, right;  // lex_less(left, right)
  Label above, below;

  // Orders the endpoints and keeps `on_left` fixed as the face to the left of a -> b.
  static LabeledSegment from_directed(const Point& a, const Point& b, Label on_left,
                                      Label on_right) {
    if (a == b) throw Error("degenerate segment at " + a.str());
    if (lex_less(a, b)) return {a, b, on_left, on_right};
    return {b, a, on_right, on_left};
  }
};

struct InsertionOrder {
  std::vector<std::uint32_t> permutation;
  std::uint64_t seed = 0;
};

// Successive weighted draws without replacement, realised in one pass by
// sorting on exponential keys -ln(u)/w.
inline InsertionOrder weighted_permutation(std::span<const double> weights, std::uint64_t seed) {
  if (weights.empty()) throw NonPositiveWeight("weight list is empty");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<double, std::uint32_t>> keys;
  keys.reserve(weights.size());
  for (std::uint32_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw NonPositiveWeight("weight " + std::to_string(i) + " is not positive");
    }
    keys.emplace_back(-std::log(unit_open_closed(rng)) / w, i);
  }
  std::sort(keys.begin(), keys.end());
  InsertionOrder out;
  out.seed = seed;
  out.permutation.reserve(keys.size());
  for (const auto& k : keys) out.permutation.push_back(k.second);
  return out;
}

struct LocateResult {
  Label region;
  std::uint32_t visits = 0;
};

class TrapezoidDag {
 public:
  enum class Kind : std::uint8_t { XNode, YNode, Leaf };

  struct Node {
    Kind kind = Kind::Leaf;
    std::int32_t ref = 0;    // point, segment, or (after build) label code
    std::int32_t first = -1;   // left / above
    std::int32_t second = -1;  // right / below
    friend bool operator==(const Node&, const Node&) = default;
  };

  static constexpr std::int32_t kFailCode = -2;

  static TrapezoidDag build(std::vector<LabeledSegment> segments, const InsertionOrder& order,
                            const BBox& box, Label bottom_label = RegionId::outside()) {
    TrapezoidDag dag;
    dag.box_ = box;
    dag.segments_ = std::move(segments);
    dag.bottom_label_ = bottom_label;
    if (order.permutation.size() != dag.segments_.size()) {
      throw Error("insertion order is not a permutation of the segments");
    }
    std::vector<bool> used(dag.segments_.size(), false);
    for (auto i : order.permutation) {
      if (i >= used.size() || used[i]) throw Error("insertion order is not a permutation");
      used[i] = true;
    }
    for (const auto& s : dag.segments_) {
      if (!lex_less(s.left, s.right)) throw Error("segment endpoints not lex-ordered");
      if (!box.contains(s.left) || !box.contains(s.right)) {
        throw SegmentOutOfBox("segment " + s.left.str() + "-" + s.right.str() +
                              " leaves the bounding box");
      }
    }
    Builder b(dag);
    for (auto i : order.permutation) b.insert(static_cast<std::int32_t>(i));
    b.finish();
    return dag;
  }

  LocateResult locate(const Point& p) const {
    if (!box_.contains(p)) throw OutOfBox("query " + p.str() + " lies outside the structure's box");
    std::int32_t n = 0;
    std::uint32_t visits = 0;
    for (;;) {
      ++visits;
      const Node& node = nodes_[n];
      switch (node.kind) {
        case Kind::XNode:
          n = lex_less(p, points_[node.ref]) ? node.first : node.second;
          break;
        case Kind::YNode: {
          const auto& s = segments_[node.ref];
          n = perturbed_orientation(s.left, s.right, p) == Orientation::CounterClockwise
                  ? node.first
                  : node.second;
          break;
        }
        case Kind::Leaf:
          return {decode(node.ref), visits};
      }
    }
  }

  std::size_t leaf_count() const { return leaves_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t segment_count() const { return segments_.size(); }
  // Predicate evaluations plus node writes spent during construction.
  std::uint64_t build_work() const { return build_work_; }
  const BBox& box() const { return box_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<LabeledSegment>& segments() const { return segments_; }

  // Longest root-to-leaf path, counted in nodes.
  std::uint32_t max_depth() const {
    std::vector<std::uint32_t> depth(nodes_.size(), 0);
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
      const auto n = stack.back();
      const Node& node = nodes_[n];
      if (depth[n] != 0) {
        stack.pop_back();
      } else if (node.kind == Kind::Leaf) {
        depth[n] = 1;
        stack.pop_back();
      } else if (depth[node.first] != 0 && depth[node.second] != 0) {
        depth[n] = 1 + std::max(depth[node.first], depth[node.second]);
        stack.pop_back();
      } else {
        if (depth[node.first] == 0) stack.push_back(node.first);
        if (depth[node.second] == 0) stack.push_back(node.second);
      }
    }
    return depth[0];
  }

  friend bool operator==(const TrapezoidDag& a, const TrapezoidDag& b) {
    if (a.nodes_ != b.nodes_ || a.points_ != b.points_ || !(a.box_ == b.box_)) return false;
    if (a.segments_.size() != b.segments_.size()) return false;
    for (std::size_t i = 0; i < a.segments_.size(); ++i) {
      const auto &s = a.segments_[i], &t = b.segments_[i];
      if (!(s.left == t.left && s.right == t.right && s.above == t.above && s.below == t.below)) {
        return false;
      }
    }
    return true;
  }

 private:
  static constexpr std::int32_t kNegInf = -1;  // wall vertex sentinels
  static constexpr std::int32_t kPosInf = -2;
  static constexpr std::int32_t kTopFrame = -1;  // frame segment sentinels
  static constexpr std::int32_t kBottomFrame = -2;

  struct Trapezoid {
    std::int32_t top = kTopFrame, bottom = kBottomFrame;
    std::int32_t leftp = kNegInf, rightp = kPosInf;
    std::int32_t ul = -1, ll = -1, ur = -1, lr = -1;
    std::int32_t leaf = -1;
    bool alive = true;
  };

  static std::int32_t encode(const Label& l) { return l ? l->code() : kFailCode; }
  static Label decode(std::int32_t c) {
    if (c == kFailCode) return std::nullopt;
    return RegionId::from_code(c);
  }

  class Builder {
   public:
    explicit Builder(TrapezoidDag& dag) : dag_(dag) {
      traps_.push_back(Trapezoid{});
      traps_[0].leaf = 0;
      dag_.nodes_.push_back(Node{Kind::Leaf, 0, -1, -1});
      alive_ = 1;
    }

    void insert(std::int32_t s) {
      const auto& seg = dag_.segments_[s];
      const std::int32_t P = intern(seg.left);
      const std::int32_t Q = intern(seg.right);

      chain_.clear();
      chain_.push_back(locate_start(s));
      check(s, chain_.back());
      walls_.clear();
      for (;;) {
        const Trapezoid& cur = traps_[chain_.back()];
        if (cur.rightp == kPosInf || !lex_less(pt(cur.rightp), seg.right)) break;
        ++work_;
        const Orientation o = orientation(seg.left, seg.right, pt(cur.rightp));
        if (o == Orientation::Collinear) crossing(s, "passes through vertex " + pt(cur.rightp).str());
        const bool above = o == Orientation::CounterClockwise;
        walls_.push_back(above);
        const std::int32_t next = above ? cur.lr : cur.ur;
        if (next < 0) throw Error("trapezoidal map neighbour structure corrupted");
        chain_.push_back(next);
        check(s, next);
      }
      split(s, P, Q);
    }

    void finish() {
      std::size_t leaves = 0;
      for (const auto& t : traps_) {
        if (!t.alive) continue;
        ++leaves;
        const Label l = t.bottom == kBottomFrame ? dag_.bottom_label_ : dag_.segments_[t.bottom].above;
        dag_.nodes_[t.leaf].ref = encode(l);
      }
      dag_.leaves_ = leaves;
      dag_.build_work_ = work_;
    }

   private:
    const Point& pt(std::int32_t v) const { return dag_.points_[v]; }

    std::int32_t intern(const Point& p) {
      auto [it, fresh] = ids_.try_emplace(p, static_cast<std::int32_t>(dag_.points_.size()));
      if (fresh) dag_.points_.push_back(p);
      return it->second;
    }

    [[noreturn]] void crossing(std::int32_t s, const std::string& why) const {
      const auto& seg = dag_.segments_[s];
      throw CrossingSegments("segment " + seg.left.str() + "-" + seg.right.str() + " " + why);
    }

    // Reject any contact with the bounding segments other than a shared endpoint.
    void check(std::int32_t s, std::int32_t t) {
      const auto& a = dag_.segments_[s];
      for (std::int32_t e : {traps_[t].top, traps_[t].bottom}) {
        if (e < 0) continue;
        ++work_;
        const auto& b = dag_.segments_[e];
        if (segments_interact_improperly(a.left, a.right, b.left, b.right)) {
          crossing(s, "meets segment " + b.left.str() + "-" + b.right.str());
        }
      }
    }

    // Trapezoid containing the point just right of seg.left along seg.
    std::int32_t locate_start(std::int32_t s) {
      const auto& seg = dag_.segments_[s];
      std::int32_t n = 0;
      for (;;) {
        ++work_;
        const Node& node = dag_.nodes_[n];
        if (node.kind == Kind::Leaf) return node.ref;
        if (node.kind == Kind::XNode) {
          n = lex_less(seg.left, pt(node.ref)) ? node.first : node.second;
          continue;
        }
        const auto& e = dag_.segments_[node.ref];
        Orientation o;
        if (seg.left == e.left) {
          o = orientation(e.left, e.right, seg.right);
          if (o == Orientation::Collinear) crossing(s, "overlaps a collinear segment");
        } else {
          o = orientation(e.left, e.right, seg.left);
          if (o == Orientation::Collinear) crossing(s, "starts on another segment");
        }
        n = o == Orientation::CounterClockwise ? node.first : node.second;
      }
    }

    std::int32_t new_trap(std::int32_t top, std::int32_t bottom, std::int32_t leftp,
                          std::int32_t rightp) {
      Trapezoid t;
      t.top = top;
      t.bottom = bottom;
      t.leftp = leftp;
      t.rightp = rightp;
      t.leaf = new_node(Node{Kind::Leaf, static_cast<std::int32_t>(traps_.size()), -1, -1});
      traps_.push_back(t);
      ++alive_;
      return static_cast<std::int32_t>(traps_.size() - 1);
    }

    std::int32_t new_node(Node n) {
      ++work_;
      dag_.nodes_.push_back(n);
      return static_cast<std::int32_t>(dag_.nodes_.size() - 1);
    }

    void split(std::int32_t s, std::int32_t P, std::int32_t Q) {
      const std::size_t k = chain_.size();
      const Trapezoid first = traps_[chain_.front()];
      const Trapezoid last = traps_[chain_.back()];
      const bool has_left = first.leftp != P;
      const bool has_right = last.rightp != Q;

      std::int32_t A = -1, B = -1;
      if (has_left) A = new_trap(first.top, first.bottom, first.leftp, P);
      if (has_right) B = new_trap(last.top, last.bottom, Q, last.rightp);

      upper_.assign(k, -1);
      lower_.assign(k, -1);
      for (std::size_t j = 0; j < k; ++j) {
        const auto [top, bottom, leftp] = std::array{traps_[chain_[j]].top, traps_[chain_[j]].bottom,
                                                     traps_[chain_[j]].leftp};
        // walls_[j-1]: the wall between chain_[j-1] and chain_[j] lies above s.
        if (j == 0 || walls_[j - 1]) {
          upper_[j] = new_trap(top, s, j == 0 ? P : leftp, kPosInf);
        } else {
          upper_[j] = upper_[j - 1];
        }
        if (j == 0 || !walls_[j - 1]) {
          lower_[j] = new_trap(s, bottom, j == 0 ? P : leftp, kPosInf);
        } else {
          lower_[j] = lower_[j - 1];
        }
      }
      for (std::size_t j = 0; j < k; ++j) {
        const std::int32_t r = j + 1 == k ? Q : traps_[chain_[j]].rightp;
        if (j + 1 == k || walls_[j]) traps_[upper_[j]].rightp = r;
        if (j + 1 == k || !walls_[j]) traps_[lower_[j]].rightp = r;
      }

      for (auto c : chain_) traps_[c].alive = false;
      alive_ -= k;
      relink(A, B);

      for (std::size_t j = 0; j < k; ++j) {
        Node top{Kind::YNode, s, traps_[upper_[j]].leaf, traps_[lower_[j]].leaf};
        if (j + 1 == k && has_right) top = Node{Kind::XNode, Q, new_node(top), traps_[B].leaf};
        if (j == 0 && has_left) top = Node{Kind::XNode, P, traps_[A].leaf, new_node(top)};
        // The old leaf slot becomes the root of the replacement subtree.
        ++work_;
        dag_.nodes_[traps_[chain_[j]].leaf] = top;
      }
    }

    struct Key {
      std::int32_t vertex, segment, trap;
      bool operator<(const Key& o) const {
        return vertex != o.vertex ? vertex < o.vertex : segment < o.segment;
      }
    };

    static std::int32_t find(const std::vector<Key>& keys, std::int32_t vertex,
                             std::int32_t segment) {
      const Key probe{vertex, segment, -1};
      auto it = std::lower_bound(keys.begin(), keys.end(), probe);
      if (it != keys.end() && it->vertex == vertex && it->segment == segment) return it->trap;
      return -1;
    }

    // Recompute neighbour links around the replaced chain.
    void relink(std::int32_t A, std::int32_t B) {
      fresh_.clear();
      if (A >= 0) fresh_.push_back(A);
      if (B >= 0) fresh_.push_back(B);
      for (std::size_t j = 0; j < chain_.size(); ++j) {
        if (j == 0 || upper_[j] != upper_[j - 1]) fresh_.push_back(upper_[j]);
        if (j == 0 || lower_[j] != lower_[j - 1]) fresh_.push_back(lower_[j]);
      }
      old_.clear();
      for (auto c : chain_) {
        const Trapezoid& t = traps_[c];
        for (auto nb : {t.ul, t.ll, t.ur, t.lr}) {
          if (nb >= 0 && traps_[nb].alive) old_.push_back(nb);
        }
      }
      std::sort(old_.begin(), old_.end());
      old_.erase(std::unique(old_.begin(), old_.end()), old_.end());

      right_top_.clear();
      right_bottom_.clear();
      left_top_.clear();
      left_bottom_.clear();
      auto index = [&](std::int32_t id) {
        const Trapezoid& t = traps_[id];
        right_top_.push_back({t.rightp, t.top, id});
        right_bottom_.push_back({t.rightp, t.bottom, id});
        left_top_.push_back({t.leftp, t.top, id});
        left_bottom_.push_back({t.leftp, t.bottom, id});
      };
      for (auto id : fresh_) index(id);
      for (auto id : old_) index(id);
      for (auto* v : {&right_top_, &right_bottom_, &left_top_, &left_bottom_}) {
        std::sort(v->begin(), v->end());
      }
      work_ += fresh_.size() + old_.size();

      for (auto id : fresh_) {
        Trapezoid& t = traps_[id];
        t.ul = find(right_top_, t.leftp, t.top);
        t.ll = find(right_bottom_, t.leftp, t.bottom);
        t.ur = find(left_top_, t.rightp, t.top);
        t.lr = find(left_bottom_, t.rightp, t.bottom);
      }
      auto replaced = [&](std::int32_t id) { return id >= 0 && !traps_[id].alive; };
      for (auto id : old_) {
        Trapezoid& t = traps_[id];
        if (replaced(t.ul)) t.ul = find(right_top_, t.leftp, t.top);
        if (replaced(t.ll)) t.ll = find(right_bottom_, t.leftp, t.bottom);
        if (replaced(t.ur)) t.ur = find(left_top_, t.rightp, t.top);
        if (replaced(t.lr)) t.lr = find(left_bottom_, t.rightp, t.bottom);
      }
    }

    TrapezoidDag& dag_;
    std::vector<Trapezoid> traps_;
    std::unordered_map<Point, std::int32_t> ids_;
    std::size_t alive_ = 0;
    std::uint64_t work_ = 0;
    std::vector<std::int32_t> chain_, upper_, lower_, fresh_, old_;
    std::vector<bool> walls_;
    std::vector<Key> right_top_, right_bottom_, left_top_, left_bottom_;
  };

  BBox box_;
  Label bottom_label_ = RegionId::outside();
  std::vector<LabeledSegment> segments_;
  std::vector<Point> points_;
  std::vector<Node> nodes_;
  std::size_t leaves_ = 1;
  std::uint64_t build_work_ = 0;
};

// Labeled edges of a triangulation: each edge carries the triangle on each side,
// Outside on the unbounded side.
inline std::vector<LabeledSegment> triangulation_segments(const Triangulation& tri) {
  std::vector<LabeledSegment> out;
  out.reserve(tri.edges().size());
  for (const auto& e : tri.edges()) {
    const Label l = e.left ? RegionId::triangle(*e.left) : RegionId::outside();
    const Label r = e.right ? RegionId::triangle(*e.right) : RegionId::outside();
    out.push_back(LabeledSegment::from_directed(tri.vertices()[e.u], tri.vertices()[e.v], l, r));
  }
  return out;
}

// Static O(log n) structure: all edges, uniform random insertion order.
inline TrapezoidDag build_static(const Triangulation& tri, std::uint64_t seed) {
  if (tri.size() == 0) throw ValidationError({"Empty"});
  auto segments = triangulation_segments(tri);
  const std::vector<double> ones(segments.size(), 1.0);
  const auto order = weighted_permutation(ones, seed);
  return TrapezoidDag::build(std::move(segments), order, tri.bbox().padded(1));
}

}  // namespace adaptloc
