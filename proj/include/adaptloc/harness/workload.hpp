#pragma once
// Triangulation and query workload generators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adaptloc/errors.hpp"
#include "adaptloc/geometry.hpp"
#include "adaptloc/random.hpp"
#include "adaptloc/subdivision.hpp"

namespace adaptloc::harness {

// Square [-bound, bound]^2 split into two triangles, refined by 1 -> 3 splits
// at interior lattice points of uniformly chosen triangles. An odd target
// first splits the bottom boundary edge at its midpoint (1 -> 2).
inline Triangulation gen_triangulation(std::size_t target_n, std::uint64_t seed,
                                       std::int64_t coord_bound = std::int64_t{1} << 20) {
  if (target_n < 2) throw ConfigError("target_n must be at least 2");
  if (coord_bound < 1 || coord_bound > kCoordBound) {
    throw ConfigError("coord_bound must lie in [1, 2^25]");
  }
  const std::int64_t b = coord_bound;
  std::vector<Point> verts{{-b, -b}, {b, -b}, {b, b}, {-b, b}};
  std::vector<TriangleIndices> tris{{0, 1, 2}, {0, 2, 3}};
  if (target_n % 2 == 1) {
    verts.emplace_back(0, -b);
    tris[0] = {0, 4, 2};
    tris.push_back({4, 1, 2});
  }

  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> open(tris.size());
  std::iota(open.begin(), open.end(), 0u);
  auto interior_point = [&](const TriangleIndices& t) -> std::optional<Point> {
    const Triangle tri{verts[t[0]], verts[t[1]], verts[t[2]]};
    const double cx = (tri[0].x() + tri[1].x() + tri[2].x()) / 3.0;
    const double cy = (tri[0].y() + tri[1].y() + tri[2].y()) / 3.0;
    const std::int64_t rx = std::llround(cx), ry = std::llround(cy);
    for (std::int64_t dy : {0, -1, 1}) {
      for (std::int64_t dx : {0, -1, 1}) {
        const Point p(rx + dx, ry + dy);
        if (strictly_inside(p, tri)) return p;
      }
    }
    return std::nullopt;
  };

  while (tris.size() < target_n) {
    if (open.empty()) {
      throw InsufficientRoom("no triangle admits an interior lattice point at " +
                             std::to_string(tris.size()) + " triangles");
    }
    const std::size_t pick = uniform_index(rng, open.size());
    const std::uint32_t t = open[pick];
    const auto p = interior_point(tris[t]);
    if (!p) {
      open[pick] = open.back();
      open.pop_back();
      continue;
    }
    const auto v = static_cast<std::uint32_t>(verts.size());
    verts.push_back(*p);
    const TriangleIndices old = tris[t];
    tris[t] = {old[0], old[1], v};
    tris.push_back({old[1], old[2], v});
    tris.push_back({old[2], old[0], v});
    open.push_back(static_cast<std::uint32_t>(tris.size() - 2));
    open.push_back(static_cast<std::uint32_t>(tris.size() - 1));
  }
  return Triangulation(std::move(verts), std::move(tris),
                       "gen-" + std::to_string(target_n) + "-" + std::to_string(seed));
}

struct Phase;

struct DistributionSpec {
  enum class Kind { Uniform, Zipf, Explicit, PhaseShift };

  Kind kind = Kind::Uniform;
  double exponent = 1.0;               // Zipf
  std::vector<double> probabilities;   // Explicit, one per triangle
  std::vector<Phase> phases;           // PhaseShift
  std::uint64_t region_shuffle_seed = 0;

  static DistributionSpec uniform() { return {}; }
  static DistributionSpec zipf(double s, std::uint64_t shuffle_seed = 0) {
    DistributionSpec d;
    d.kind = Kind::Zipf;
    d.exponent = s;
    d.region_shuffle_seed = shuffle_seed;
    return d;
  }
  static DistributionSpec explicit_probabilities(std::vector<double> p) {
    DistributionSpec d;
    d.kind = Kind::Explicit;
    d.probabilities = std::move(p);
    return d;
  }
  static DistributionSpec phase_shift(std::vector<Phase> phases);

  std::string describe() const;
};

struct Phase {
  DistributionSpec spec;
  std::size_t count = 0;
};

inline DistributionSpec DistributionSpec::phase_shift(std::vector<Phase> phases) {
  DistributionSpec d;
  d.kind = Kind::PhaseShift;
  d.phases = std::move(phases);
  return d;
}

inline std::string DistributionSpec::describe() const {
  switch (kind) {
    case Kind::Uniform: return "uniform";
    case Kind::Zipf: {
      std::ostringstream os;
      os << "zipf:" << exponent;
      return os.str();
    }
    case Kind::Explicit: return "explicit";
    default: {
      std::string out = "phase";
      for (const auto& p : phases) out += ":" + p.spec.describe() + "@" + std::to_string(p.count);
      return out;
    }
  }
}

// Per-triangle probabilities of a stationary spec.
inline std::vector<double> region_probabilities(const DistributionSpec& spec, std::size_t n) {
  std::vector<double> p(n, 0.0);
  switch (spec.kind) {
    case DistributionSpec::Kind::Uniform:
      std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(n));
      return p;
    case DistributionSpec::Kind::Zipf: {
      if (!(spec.exponent > 0.0)) throw ConfigError("zipf exponent must be positive");
      // Rank r (1-based) goes to region rank_to_region[r - 1].
      std::vector<std::uint32_t> rank_to_region(n);
      std::iota(rank_to_region.begin(), rank_to_region.end(), 0u);
      std::mt19937_64 rng(spec.region_shuffle_seed);
      for (std::size_t i = n; i > 1; --i) {
        std::swap(rank_to_region[i - 1], rank_to_region[uniform_index(rng, i)]);
      }
      double h = 0.0;
      for (std::size_t r = 1; r <= n; ++r) h += std::pow(static_cast<double>(r), -spec.exponent);
      for (std::size_t r = 1; r <= n; ++r) {
        p[rank_to_region[r - 1]] = std::pow(static_cast<double>(r), -spec.exponent) / h;
      }
      return p;
    }
    case DistributionSpec::Kind::Explicit: {
      if (spec.probabilities.size() != n) {
        throw ConfigError("explicit distribution needs " + std::to_string(n) + " probabilities");
      }
      double sum = 0.0;
      for (double v : spec.probabilities) {
        if (!(v >= 0.0)) throw ConfigError("explicit probabilities must be non-negative");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("explicit probabilities must sum to 1");
      return spec.probabilities;
    }
    default:
      throw ConfigError("phase-shift distributions have no single probability vector");
  }
}

// Draws from a fixed discrete distribution by inverse CDF.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& p) : cdf_(p.size()) {
    std::partial_sum(p.begin(), p.end(), cdf_.begin());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) last_ = static_cast<std::uint32_t>(i);
    }
  }
  std::uint32_t operator()(std::mt19937_64& rng) const {
    const double u = unit_closed_open(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return last_;
    return static_cast<std::uint32_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
  std::uint32_t last_ = 0;
};

struct Query {
  Point point;
  RegionId region = RegionId::outside();  // oracle answer for point
};

// Random lattice point of triangle t by rounded barycentric coordinates.
inline Point sample_in_triangle(const Triangle& t, std::mt19937_64& rng) {
  double u = unit_closed_open(rng), v = unit_closed_open(rng);
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  const double x = t[0].x() + u * (t[1].x() - t[0].x()) + v * (t[2].x() - t[0].x());
  const double y = t[0].y() + u * (t[1].y() - t[0].y()) + v * (t[2].y() - t[0].y());
  return {std::llround(x), std::llround(y)};
}

namespace detail {

inline void append_queries(const Triangulation& tri, const std::vector<double>& p, std::size_t m,
                           std::mt19937_64& rng, std::vector<Query>& out) {
  const DiscreteSampler sampler(p);
  for (std::size_t q = 0; q < m; ++q) {
    const std::uint32_t s = sampler(rng);
    const Triangle t = tri.triangle(s);
    Point pt = sample_in_triangle(t, rng);
    bool inside = point_in_triangle_perturbed(pt, t);
    for (int retry = 0; retry < 8 && !inside; ++retry) {
      pt = sample_in_triangle(t, rng);
      inside = point_in_triangle_perturbed(pt, t);
    }
    // Inside t means t is the oracle's answer: triangles have disjoint perturbed interiors.
    out.push_back({pt, inside ? RegionId::triangle(s) : brute_force_locate(tri, pt)});
  }
}

}  // namespace detail

inline std::vector<Query> gen_queries(const Triangulation& tri, const DistributionSpec& spec,
                                      std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("m must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<Query> out;
  out.reserve(m);
  if (spec.kind == DistributionSpec::Kind::PhaseShift) {
    std::size_t total = 0;
    for (const auto& ph : spec.phases) total += ph.count;
    if (total != m) throw ConfigError("phase counts must sum to m");
    for (const auto& ph : spec.phases) {
      if (ph.count == 0) continue;
      detail::append_queries(tri, region_probabilities(ph.spec, tri.size()), ph.count, rng, out);
    }
    return out;
  }
  detail::append_queries(tri, region_probabilities(spec, tri.size()), m, rng, out);
  return out;
}

// Every lattice point of the triangulation's box padded by `pad`, row-major.
inline std::vector<Point> lattice_sweep(const Triangulation& tri, std::int64_t pad = 1) {
  const BBox b = tri.bbox().padded(pad);
  std::vector<Point> out;
  for (std::int64_t y = b.ymin; y <= b.ymax; ++y) {
    for (std::int64_t x = b.xmin; x <= b.xmax; ++x) out.emplace_back(x, y);
  }
  return out;
}

}  // namespace adaptloc::harness
