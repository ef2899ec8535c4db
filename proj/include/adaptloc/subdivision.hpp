#pragma once
// Triangulation data model, validation, JSON serialization and the
// brute-force location oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "adaptloc/errors.hpp"
#include "adaptloc/geometry.hpp"

namespace adaptloc {

// A triangle of the partition, or the single unbounded pseudo-region.
class RegionId {
 public:
  static constexpr RegionId outside() { return RegionId(-1); }
  static constexpr RegionId triangle(std::uint32_t i) {
    return RegionId(static_cast<std::int32_t>(i));
  }
  // -1 decodes to outside; non-negative values to triangles.
  static constexpr RegionId from_code(std::int64_t code) {
    return code < 0 ? outside() : triangle(static_cast<std::uint32_t>(code));
  }

  constexpr bool is_outside() const { return value_ < 0; }
  constexpr bool is_triangle() const { return value_ >= 0; }
  constexpr std::uint32_t index() const { return static_cast<std::uint32_t>(value_); }
  constexpr std::int32_t code() const { return value_; }

  std::string str() const {
    return is_outside() ? std::string("Outside") : "Triangle(" + std::to_string(value_) + ")";
  }

  friend constexpr bool operator==(const RegionId&, const RegionId&) = default;
  friend constexpr auto operator<=>(const RegionId&, const RegionId&) = default;

 private:
  constexpr explicit RegionId(std::int32_t v) : value_(v) {}
  std::int32_t value_;
};

using TriangleIndices = std::array<std::uint32_t, 3>;

// Undirected edge with its incident triangles. left/right are relative to u -> v.
struct Edge {
  std::uint32_t u = 0, v = 0;
  std::optional<std::uint32_t> left, right;
};

struct Violation {
  enum class Kind {
    Empty,
    IndexOutOfRange,
    DuplicateVertex,
    Degenerate,
    Orientation,
    NonManifoldEdge,
    InconsistentEdge,
    VertexOnEdge,
    Overlap,
    Disconnected,
  };
  Kind kind;
  std::vector<std::uint32_t> indices;

  std::string str() const {
    static constexpr const char* names[] = {
        "Empty",           "IndexOutOfRange",  "DuplicateVertex", "Degenerate",
        "Orientation",     "NonManifoldEdge",  "InconsistentEdge", "VertexOnEdge",
        "Overlap",         "Disconnected"};
    std::string out = names[static_cast<int>(kind)];
    if (!indices.empty()) {
      out += '(';
      for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(indices[i]);
      }
      out += ')';
    }
    return out;
  }
  friend bool operator==(const Violation&, const Violation&) = default;
};

class Triangulation {
 public:
  Triangulation() = default;

  // No validation; use create() or load_triangulation() for checked input.
  Triangulation(std::vector<Point> vertices, std::vector<TriangleIndices> triangles,
                std::string name = {})
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)), name_(std::move(name)) {
    index();
  }

  static Triangulation create(std::vector<Point> vertices,
                              std::vector<TriangleIndices> triangles, std::string name = {});

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<TriangleIndices>& triangles() const { return triangles_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return triangles_.size(); }

  Triangle triangle(std::uint32_t t) const {
    const auto& ix = triangles_[t];
    return {vertices_[ix[0]], vertices_[ix[1]], vertices_[ix[2]]};
  }

  // Edges in order of first appearance; populated only for in-range indices.
  const std::vector<Edge>& edges() const { return edges_; }
  // Triangles incident to each edge, in order of appearance.
  const std::vector<std::vector<std::uint32_t>>& edge_incidence() const { return incidence_; }
  bool indices_in_range() const { return indices_ok_; }

  // Bounding box of all vertices; cached at construction.
  const BBox& bbox() const { return bbox_; }

  const BBox& triangle_bbox(std::uint32_t t) const { return tri_boxes_[t]; }
  // Indices into edges() of triangle t's sides, in vertex order.
  const std::array<std::uint32_t, 3>& triangle_edges(std::uint32_t t) const { return tri_edges_[t]; }

 private:
  void index() {
    indices_ok_ = true;
    for (const auto& t : triangles_) {
      for (auto v : t) indices_ok_ = indices_ok_ && v < vertices_.size();
    }
    edges_.clear();
    incidence_.clear();
    tri_boxes_.clear();
    tri_edges_.clear();
    bbox_ = {};
    if (!vertices_.empty()) {
      bbox_ = {vertices_[0].x(), vertices_[0].y(), vertices_[0].x(), vertices_[0].y()};
      for (const auto& p : vertices_) {
        bbox_.xmin = std::min(bbox_.xmin, p.x());
        bbox_.ymin = std::min(bbox_.ymin, p.y());
        bbox_.xmax = std::max(bbox_.xmax, p.x());
        bbox_.ymax = std::max(bbox_.ymax, p.y());
      }
    }
    if (!indices_ok_) return;
    std::unordered_map<std::uint64_t, std::uint32_t> lookup;
    lookup.reserve(triangles_.size() * 2);
    for (std::uint32_t t = 0; t < triangles_.size(); ++t) {
      const auto& ix = triangles_[t];
      BBox b{vertices_[ix[0]].x(), vertices_[ix[0]].y(), vertices_[ix[0]].x(),
             vertices_[ix[0]].y()};
      std::array<std::uint32_t, 3> sides{};
      for (int c = 0; c < 3; ++c) {
        const Point& p = vertices_[ix[c]];
        b.xmin = std::min(b.xmin, p.x());
        b.ymin = std::min(b.ymin, p.y());
        b.xmax = std::max(b.xmax, p.x());
        b.ymax = std::max(b.ymax, p.y());
        const std::uint32_t a = ix[c], z = ix[(c + 1) % 3];
        const std::uint64_t key = (std::uint64_t{std::min(a, z)} << 32) | std::max(a, z);
        auto [it, fresh] = lookup.try_emplace(key, static_cast<std::uint32_t>(edges_.size()));
        sides[c] = it->second;
        if (fresh) {
          edges_.push_back(Edge{a, z, t, std::nullopt});
          incidence_.push_back({t});
        } else {
          Edge& e = edges_[it->second];
          incidence_[it->second].push_back(t);
          const bool same_dir = e.u == a;
          auto& slot = same_dir ? e.left : e.right;
          if (!slot) slot = t;
        }
      }
      tri_boxes_.push_back(b);
      tri_edges_.push_back(sides);
    }
  }

  std::vector<Point> vertices_;
  std::vector<TriangleIndices> triangles_;
  std::string name_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> incidence_;
  std::vector<BBox> tri_boxes_;
  std::vector<std::array<std::uint32_t, 3>> tri_edges_;
  BBox bbox_;
  bool indices_ok_ = true;
};

namespace detail {

inline bool boxes_overlap(const BBox& a, const BBox& b) {
  return a.xmin <= b.xmax && b.xmin <= a.xmax && a.ymin <= b.ymax && b.ymin <= a.ymax;
}

// Interiors of two CCW triangles intersect iff no edge of either separates them.
inline bool triangle_interiors_overlap(const Triangle& a, const Triangle& b) {
  auto separated_by = [](const Triangle& s, const Triangle& o) {
    for (int e = 0; e < 3; ++e) {
      bool all_out = true;
      for (const auto& q : o) {
        if (orientation(s[e], s[(e + 1) % 3], q) == Orientation::CounterClockwise) {
          all_out = false;
          break;
        }
      }
      if (all_out) return true;
    }
    return false;
  };
  return !separated_by(a, b) && !separated_by(b, a);
}

// Uniform bucket grid over the vertex bounding box for pairwise tests.
class Grid {
 public:
  Grid(const BBox& box, std::size_t items) : box_(box) {
    const double side = std::max<double>(1.0, std::sqrt(static_cast<double>(items)));
    cells_ = static_cast<std::int64_t>(std::min(side, 2048.0));
    cw_ = std::max<std::int64_t>(1, (box.xmax - box.xmin) / cells_ + 1);
    ch_ = std::max<std::int64_t>(1, (box.ymax - box.ymin) / cells_ + 1);
    buckets_.resize(static_cast<std::size_t>(cells_ * cells_));
  }

  std::array<std::int64_t, 4> range(const BBox& b) const {
    return {cx(b.xmin), cy(b.ymin), cx(b.xmax), cy(b.ymax)};
  }

  void insert(std::uint32_t id, const BBox& b) {
    const auto r = range(b);
    for (std::int64_t y = r[1]; y <= r[3]; ++y) {
      for (std::int64_t x = r[0]; x <= r[2]; ++x) buckets_[at(x, y)].push_back(id);
    }
  }

  const std::vector<std::uint32_t>& bucket(std::int64_t x, std::int64_t y) const {
    return buckets_[at(x, y)];
  }
  std::int64_t cells() const { return cells_; }

 private:
  std::int64_t cx(std::int64_t x) const { return std::clamp((x - box_.xmin) / cw_, std::int64_t{0}, cells_ - 1); }
  std::int64_t cy(std::int64_t y) const { return std::clamp((y - box_.ymin) / ch_, std::int64_t{0}, cells_ - 1); }
  std::size_t at(std::int64_t x, std::int64_t y) const { return static_cast<std::size_t>(y * cells_ + x); }

  BBox box_;
  std::int64_t cells_ = 1, cw_ = 1, ch_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

}  // namespace detail

// Every violated invariant, grouped by kind then by index.
inline std::vector<Violation> validate(const Triangulation& tri) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  const auto& verts = tri.vertices();
  const auto& tris = tri.triangles();
  if (tris.empty()) {
    out.push_back({K::Empty, {}});
    return out;
  }
  if (!tri.indices_in_range()) {
    for (std::uint32_t t = 0; t < tris.size(); ++t) {
      for (auto v : tris[t]) {
        if (v >= verts.size()) {
          out.push_back({K::IndexOutOfRange, {t}});
          break;
        }
      }
    }
    return out;
  }

  {
    std::unordered_map<Point, std::uint32_t> seen;
    for (std::uint32_t i = 0; i < verts.size(); ++i) {
      auto [it, fresh] = seen.try_emplace(verts[i], i);
      if (!fresh) out.push_back({K::DuplicateVertex, {it->second, i}});
    }
  }

  std::vector<bool> usable(tris.size(), true);
  for (std::uint32_t t = 0; t < tris.size(); ++t) {
    const auto& ix = tris[t];
    if (ix[0] == ix[1] || ix[1] == ix[2] || ix[0] == ix[2]) {
      out.push_back({K::Degenerate, {t}});
      usable[t] = false;
      continue;
    }
    const Triangle p = tri.triangle(t);
    const Orientation o = orientation(p[0], p[1], p[2]);
    if (o == Orientation::Collinear) {
      out.push_back({K::Degenerate, {t}});
      usable[t] = false;
    }
  }
  for (std::uint32_t t = 0; t < tris.size(); ++t) {
    if (!usable[t]) continue;
    const Triangle p = tri.triangle(t);
    if (orientation(p[0], p[1], p[2]) == Orientation::Clockwise) {
      out.push_back({K::Orientation, {t}});
      usable[t] = false;
    }
  }

  const auto& edges = tri.edges();
  const auto& inc = tri.edge_incidence();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (inc[e].size() > 2) {
      out.push_back({K::NonManifoldEdge, {edges[e].u, edges[e].v}});
    } else if (inc[e].size() == 2 && (!edges[e].left || !edges[e].right)) {
      out.push_back({K::InconsistentEdge, {edges[e].u, edges[e].v}});
    }
  }

  const BBox box = tri.bbox();
  {
    detail::Grid grid(box, std::max(verts.size(), edges.size()));
    for (std::uint32_t i = 0; i < verts.size(); ++i) {
      grid.insert(i, BBox{verts[i].x(), verts[i].y(), verts[i].x(), verts[i].y()});
    }
    std::vector<std::array<std::uint32_t, 3>> hits;
    for (const auto& e : edges) {
      const Point& a = verts[e.u];
      const Point& b = verts[e.v];
      if (a == b) continue;
      const BBox eb{std::min(a.x(), b.x()), std::min(a.y(), b.y()), std::max(a.x(), b.x()),
                    std::max(a.y(), b.y())};
      const auto r = grid.range(eb);
      for (std::int64_t y = r[1]; y <= r[3]; ++y) {
        for (std::int64_t x = r[0]; x <= r[2]; ++x) {
          for (auto v : grid.bucket(x, y)) {
            if (v == e.u || v == e.v || verts[v] == a || verts[v] == b) continue;
            if (on_segment(a, b, verts[v])) {
              hits.push_back({v, std::min(e.u, e.v), std::max(e.u, e.v)});
            }
          }
        }
      }
    }
    std::sort(hits.begin(), hits.end());
    for (const auto& h : hits) out.push_back({K::VertexOnEdge, {h[0], h[1], h[2]}});
  }

  {
    detail::Grid grid(box, tris.size());
    for (std::uint32_t t = 0; t < tris.size(); ++t) {
      if (usable[t]) grid.insert(t, tri.triangle_bbox(t));
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::int64_t y = 0; y < grid.cells(); ++y) {
      for (std::int64_t x = 0; x < grid.cells(); ++x) {
        const auto& b = grid.bucket(x, y);
        for (std::size_t i = 0; i < b.size(); ++i) {
          for (std::size_t j = i + 1; j < b.size(); ++j) {
            const BBox& bi = tri.triangle_bbox(b[i]);
            const BBox& bj = tri.triangle_bbox(b[j]);
            if (!detail::boxes_overlap(bi, bj)) continue;
            const auto ri = grid.range(bi), rj = grid.range(bj);
            // Test each pair only in the first cell of their shared range.
            if (x != std::max(ri[0], rj[0]) || y != std::max(ri[1], rj[1])) continue;
            if (detail::triangle_interiors_overlap(tri.triangle(b[i]), tri.triangle(b[j]))) {
              pairs.emplace_back(std::min(b[i], b[j]), std::max(b[i], b[j]));
            }
          }
        }
      }
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [a, b] : pairs) out.push_back({K::Overlap, {a, b}});
  }

  {
    std::vector<std::vector<std::uint32_t>> adj(tris.size());
    for (const auto& list : inc) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t j = i + 1; j < list.size(); ++j) {
          adj[list[i]].push_back(list[j]);
          adj[list[j]].push_back(list[i]);
        }
      }
    }
    std::vector<bool> seen(tris.size(), false);
    std::deque<std::uint32_t> queue{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const auto t = queue.front();
      queue.pop_front();
      for (auto u : adj[t]) {
        if (!seen[u]) {
          seen[u] = true;
          ++reached;
          queue.push_back(u);
        }
      }
    }
    if (reached != tris.size()) out.push_back({K::Disconnected, {}});
  }
  return out;
}

inline Triangulation Triangulation::create(std::vector<Point> vertices,
                                           std::vector<TriangleIndices> triangles,
                                           std::string name) {
  Triangulation t(std::move(vertices), std::move(triangles), std::move(name));
  auto v = validate(t);
  if (!v.empty()) {
    std::vector<std::string> msgs;
    for (const auto& x : v) msgs.push_back(x.str());
    throw ValidationError(std::move(msgs));
  }
  return t;
}

// q(p): the unique triangle containing p + (eps, eps^2), else Outside. O(n).
inline RegionId brute_force_locate(const Triangulation& tri, const Point& p) {
  for (std::uint32_t t = 0; t < tri.size(); ++t) {
    const BBox& b = tri.triangle_bbox(t);
    if (p.x() < b.xmin || p.x() > b.xmax || p.y() < b.ymin || p.y() > b.ymax) continue;
    if (point_in_triangle_perturbed(p, tri.triangle(t))) return RegionId::triangle(t);
  }
  return RegionId::outside();
}

inline Triangulation load_triangulation(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("triangulation must be a JSON object");
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw ParseError("missing array field \"vertices\"");
  }
  if (!doc.contains("triangles") || !doc["triangles"].is_array()) {
    throw ParseError("missing array field \"triangles\"");
  }
  std::vector<Point> verts;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
      throw ParseError("vertex must be [x, y] integers: " + v.dump());
    }
    verts.emplace_back(v[0].get<std::int64_t>(), v[1].get<std::int64_t>());
  }
  std::vector<TriangleIndices> tris;
  for (const auto& t : doc["triangles"]) {
    if (!t.is_array() || t.size() != 3) throw ParseError("triangle must be [i, j, k]: " + t.dump());
    TriangleIndices ix{};
    for (int c = 0; c < 3; ++c) {
      if (!t[c].is_number_integer() || t[c].get<std::int64_t>() < 0 ||
          t[c].get<std::uint64_t>() >= verts.size()) {
        throw ParseError("triangle index out of range: " + t.dump());
      }
      ix[c] = t[c].get<std::uint32_t>();
    }
    tris.push_back(ix);
  }
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError("\"name\" must be a string");
    name = doc["name"].get<std::string>();
  }
  return Triangulation::create(std::move(verts), std::move(tris), std::move(name));
}

// Canonical form: one vertex / triangle per line, input order preserved.
inline std::string save_triangulation(const Triangulation& tri) {
  std::ostringstream os;
  os << "{\n";
  if (!tri.name().empty()) os << "  \"name\": " << nlohmann::json(tri.name()).dump() << ",\n";
  os << "  \"vertices\": [";
  for (std::size_t i = 0; i < tri.vertices().size(); ++i) {
    const auto& p = tri.vertices()[i];
    os << (i ? ",\n    " : "\n    ") << '[' << p.x() << ", " << p.y() << ']';
  }
  os << "\n  ],\n  \"triangles\": [";
  for (std::size_t i = 0; i < tri.triangles().size(); ++i) {
    const auto& t = tri.triangles()[i];
    os << (i ? ",\n    " : "\n    ") << '[' << t[0] << ", " << t[1] << ", " << t[2] << ']';
  }
  os << "\n  ]\n}\n";
  return os.str();
}

}  // namespace adaptloc
