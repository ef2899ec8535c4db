// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance and
// recorded constant is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "adaptloc/biased.hpp"
#include "adaptloc/frequency.hpp"
#include "adaptloc/harness/bounds.hpp"
#include "adaptloc/harness/experiment.hpp"
#include "adaptloc/harness/workload.hpp"
#include "adaptloc/optimal.hpp"
#include "adaptloc/trapmap.hpp"

using namespace adaptloc;
using namespace adaptloc::harness;

namespace {

// Criterion 1
constexpr int kCorrectnessInstances = 50;
constexpr std::size_t kCorrectnessQueries = 10000;
constexpr double kCorrectnessSeconds = 300.0;
// Criterion 2: budget 4; recorded values below are first measurements rounded
// up to the next 0.05.
constexpr double kStaticSlopeBudget = 4.0;
constexpr double kStaticSlopeRecorded = 2.15;
// Criterion 3
constexpr double kBiasedA = 8.0;
constexpr double kBiasedB = 20.0;
// Criterion 4
constexpr double kTheorem6C = 4.75;  // recorded
constexpr double kTheorem6Expected = 10.0;
constexpr double kRatioGrowth = 1.20;
constexpr double kOptimalitySeconds = 600.0;
constexpr std::size_t kSeeds = 16;
// Criterion 6
constexpr double kLemma2C = 4.25;  // recorded
// Criterion 7
constexpr double kWorstCaseC = 6.95;  // recorded
// Criterion 8
constexpr double kBucketOpsPerIncrement = 4.0;
constexpr double kTopKWorkPerK = 4.0;
constexpr int kFrequencySequences = 100000;
// Criterion 9: chi-square critical values at p = 0.001.
constexpr double kChi2Dof1 = 10.828;
constexpr double kChi2Dof2 = 13.816;
constexpr int kChiTrials = 10000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Shared run statistics for criteria 5 and 7.
struct Corpus {
  bool lemma4 = true;
  std::uint64_t lemma4_regions = 0;
  std::uint64_t runs = 0;
  std::uint64_t rebuild_mismatches = 0;
  std::uint64_t subset_violations = 0;
  double worst_case = 0.0;  // max visits / log2 n
  void add(const ExperimentSummary& s) {
    ++runs;
    lemma4 = lemma4 && s.lemma4_pass;
    lemma4_regions += s.lemma4_regions;
    if (!s.rebuilds_pass()) ++rebuild_mismatches;
    subset_violations += s.subset_size_violations;
    worst_case = std::max(worst_case, worst_case_constant(s.max_visits, s.n));
  }
};

// Vertices, lattice points on edges, and their lattice neighbours.
std::vector<Query> boundary_queries(const Triangulation& tri, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const BBox box = tri.bbox();
  std::vector<Query> out;
  while (out.size() < count) {
    const Edge& e = tri.edges()[uniform_index(rng, tri.edges().size())];
    const Point a = tri.vertices()[e.u], b = tri.vertices()[e.v];
    const std::int64_t dx = b.x() - a.x(), dy = b.y() - a.y();
    const std::int64_t g = std::gcd(std::abs(dx), std::abs(dy));
    const auto t = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(g) + 1));
    std::int64_t x = a.x() + t * (dx / g), y = a.y() + t * (dy / g);
    if (rng() % 2) {
      x += static_cast<std::int64_t>(rng() % 3) - 1;
      y += static_cast<std::int64_t>(rng() % 3) - 1;
    }
    x = std::clamp(x, box.xmin - 1, box.xmax + 1);
    y = std::clamp(y, box.ymin - 1, box.ymax + 1);
    const Point p(x, y);
    out.push_back({p, brute_force_locate(tri, p)});
  }
  return out;
}

ExperimentConfig base_config(std::shared_ptr<const Triangulation> tri, std::size_t m,
                             std::uint64_t seed, std::size_t seeds) {
  ExperimentConfig c;
  c.triangulation = std::move(tri);
  c.m = m;
  c.seed = seed;
  c.seeds = seeds;
  c.worst_case_constant = 0.0;  // measured corpus-wide instead
  return c;
}

void criterion1(Corpus& corpus) {
  const auto t0 = Clock::now();
  const std::size_t sizes[] = {10, 100, 1000, 10000};
  std::uint64_t mismatches = 0, answered = 0;
  for (int i = 0; i < kCorrectnessInstances; ++i) {
    const std::size_t n = sizes[i % 4];
    const std::int64_t bound = n == 10 ? 24 : n == 100 ? 64 : std::int64_t{1} << 20;
    const auto tri = std::make_shared<const Triangulation>(
        gen_triangulation(n, derive_seed(1, "c1-tri", i), bound));

    std::vector<Query> qs = gen_queries(*tri, DistributionSpec::zipf(1.2, derive_seed(1, "c1-rank", i)),
                                        4000, derive_seed(1, "c1-zipf", i));
    const auto uni = gen_queries(*tri, DistributionSpec::uniform(), 3000, derive_seed(1, "c1-uni", i));
    const auto edge = boundary_queries(*tri, kCorrectnessQueries - qs.size() - uni.size(),
                                       derive_seed(1, "c1-edge", i));
    qs.insert(qs.end(), uni.begin(), uni.end());
    qs.insert(qs.end(), edge.begin(), edge.end());
    std::mt19937_64 rng(derive_seed(1, "c1-mix", i));
    std::shuffle(qs.begin(), qs.end(), rng);

    ExperimentConfig c = base_config(tri, qs.size(), derive_seed(1, "c1-run", i), 1);
    c.verify = true;
    const Report rep = run_experiment(c, &qs);
    mismatches += rep.summary.mismatches;
    answered += qs.size();
    corpus.add(rep.summary);

    if (n <= 100) {
      std::vector<Query> sweep;
      for (const Point& p : lattice_sweep(*tri, 1)) sweep.push_back({p, RegionId::outside()});
      ExperimentConfig cs = base_config(tri, sweep.size(), derive_seed(1, "c1-sweep", i), 1);
      cs.verify = true;
      const Report srep = run_experiment(cs, &sweep);
      mismatches += srep.summary.mismatches;
      answered += sweep.size();
      corpus.add(srep.summary);
    }
  }
  const double secs = seconds_since(t0);
  report(1, "correctness", mismatches == 0 && secs <= kCorrectnessSeconds,
         std::to_string(answered) + " answers over " + std::to_string(kCorrectnessInstances) +
             " triangulations, " + std::to_string(mismatches) + " mismatches, " +
             fmt("%.1f", secs) + " s (limit " + fmt("%.0f", kCorrectnessSeconds) + " s)");
}

// Least squares y = a x + b.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double a = sxy / sxx;
  return {a, my - a * mx};
}

void criterion2() {
  std::vector<double> xs, ys;
  std::string detail;
  for (int e = 6; e <= 13; ++e) {
    const std::size_t n = std::size_t{1} << e;
    const Triangulation tri = gen_triangulation(n, derive_seed(2, "c2-tri", n));
    const auto qs = gen_queries(tri, DistributionSpec::uniform(), 10000, derive_seed(2, "c2-q", n));
    double total = 0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
      const TrapezoidDag dag = build_static(tri, derive_seed(2, "c2-dag", n * 100 + s));
      for (const auto& q : qs) total += dag.locate(q.point).visits;
    }
    const double mean = total / static_cast<double>(kSeeds * qs.size());
    xs.push_back(e);
    ys.push_back(mean);
    detail += " " + std::to_string(n) + ":" + fmt("%.2f", mean);
  }
  const auto [a, b] = fit_line(xs, ys);
  const double limit = std::min(kStaticSlopeBudget, kStaticSlopeRecorded);
  report(2, "static logarithmic", a <= limit,
         "slope a=" + fmt("%.3f", a) + " b=" + fmt("%.3f", b) + " (limit " + fmt("%.3f", limit) +
             "; mean visits" + detail + ")");
}

void criterion3() {
  const std::size_t n = 1024;
  const Triangulation tri = gen_triangulation(n, derive_seed(3, "c3-tri", 0));
  bool ok = true;
  std::vector<double> hs, ms;
  std::string detail;
  for (double s : {0.8, 1.2, 2.0}) {
    const DistributionSpec spec = DistributionSpec::zipf(s, derive_seed(3, "c3-rank", 0));
    const auto p = region_probabilities(spec, n);
    double h = 0;
    std::vector<std::pair<RegionId, std::uint64_t>> w;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (p[i] > 0) h -= p[i] * std::log2(p[i]);
      w.emplace_back(RegionId::triangle(i), std::max<std::uint64_t>(1, std::llround(p[i] * 1e9)));
    }
    const SubsetWeights weights(w);
    const auto qs = gen_queries(tri, spec, 10000, derive_seed(3, "c3-q", static_cast<std::uint64_t>(s * 10)));
    double total = 0;
    for (std::size_t seed = 0; seed < kSeeds; ++seed) {
      const SubsetLocator loc = build_subset_biased(tri, weights, derive_seed(3, "c3-dag", seed));
      for (const auto& q : qs) total += loc.locate(q.point).visits;
    }
    const double mean = total / static_cast<double>(kSeeds * qs.size());
    hs.push_back(h);
    ms.push_back(mean);
    ok = ok && mean <= kBiasedA * h + kBiasedB;
    detail += " s=" + fmt("%.1f", s) + ":H=" + fmt("%.3f", h) + ",mean=" + fmt("%.2f", mean);
  }
  const auto [a, b] = fit_line(hs, ms);
  report(3, "biased entropy-sensitive", ok,
         "every mean <= " + fmt("%.0f", kBiasedA) + "H+" + fmt("%.0f", kBiasedB) + "; fitted a=" +
             fmt("%.3f", a) + " b=" + fmt("%.3f", b) + ";" + detail);
}

struct OptimalityRuns {
  std::vector<double> ratios;
  double lemma2 = 0.0;
  std::string lemma2_detail;
};

OptimalityRuns criterion4(Corpus& corpus) {
  const auto t0 = Clock::now();
  OptimalityRuns out;
  std::string detail;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const auto tri = std::make_shared<const Triangulation>(gen_triangulation(n, derive_seed(4, "c4-tri", n)));
    const auto m = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 1.5)));
    ExperimentConfig c = base_config(tri, m, derive_seed(4, "c4-run", n), kSeeds);
    c.dist = DistributionSpec::zipf(1.2, derive_seed(4, "c4-rank", n));
    const Report rep = run_experiment(c);
    corpus.add(rep.summary);
    out.ratios.push_back(rep.summary.cost_ratio);
    out.lemma2 = std::max(out.lemma2, rep.summary.lemma2_constant);
    out.lemma2_detail += " n=" + std::to_string(n) + ":" + fmt("%.3f", rep.summary.lemma2_constant) +
                         "(" + std::to_string(rep.summary.lemma2.size()) + " buckets)";
    detail += " n=" + std::to_string(n) + ":m=" + std::to_string(m) + ",cost=" +
              fmt("%.0f", rep.summary.mean_total_cost) + ",bound=" + fmt("%.0f", rep.summary.bound) +
              ",ratio=" + fmt("%.3f", rep.summary.cost_ratio);
  }
  const double secs = seconds_since(t0);
  const double c = *std::max_element(out.ratios.begin(), out.ratios.end());
  bool growth = true;
  for (std::size_t i = 1; i < out.ratios.size(); ++i) {
    growth = growth && out.ratios[i] <= kRatioGrowth * out.ratios[i - 1];
  }
  const double limit = std::min(kTheorem6Expected, kTheorem6C);
  report(4, "static optimality", c <= limit && growth && secs <= kOptimalitySeconds,
         "C=" + fmt("%.3f", c) + " (limit " + fmt("%.3f", limit) + "), growth per quadrupling " +
             (growth ? "<= " : "> ") + fmt("%.2f", kRatioGrowth) + ", " + fmt("%.1f", secs) +
             " s;" + detail);
  return out;
}

// Ledgers written directly, with occurrence patterns chosen to push t_j late.
bool synthetic_lemma4(std::uint64_t& checked) {
  std::mt19937_64 rng(derive_seed(5, "c5", 0));
  for (int trial = 0; trial < 10000; ++trial) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 64);
    const std::uint64_t m = 1 + rng() % 3000;
    const int pattern = trial % 4;
    std::vector<RegionId> seq(m, RegionId::outside());
    for (std::uint64_t i = 0; i < m; ++i) {
      const bool late = i >= m / 2;
      std::uint32_t s;
      switch (pattern) {
        case 0: s = static_cast<std::uint32_t>(rng() % n); break;
        case 1: s = late ? 0 : static_cast<std::uint32_t>(rng() % n); break;  // hot only at the end
        case 2: s = static_cast<std::uint32_t>(std::min<std::uint64_t>(n - 1, (i / (1 + rng() % 50)) % n)); break;
        default: s = (rng() % 7 == 0) ? 0 : static_cast<std::uint32_t>(rng() % n);
      }
      seq[i] = (rng() % 29 == 0) ? RegionId::outside() : RegionId::triangle(s);
    }
    CostLedger led(n);
    std::vector<std::uint64_t> cnt(n + 1, 0);
    for (std::uint64_t i = 0; i < m; ++i) {
      const std::uint64_t f = ++cnt[seq[i].is_outside() ? n : seq[i].index()];
      led.append({i + 1, seq[i], Route::StaticOnly, 0, 1, f, false});
    }
    const double alpha = 0.3 + 0.05 * static_cast<double>(trial % 8);
    const Lemma4Report rep = check_lemma4(led, n, alpha);
    checked += rep.regions.size();
    if (!rep.pass()) return false;
  }
  return true;
}

void criterion5(const Corpus& corpus) {
  std::uint64_t synthetic = 0;
  const bool syn = synthetic_lemma4(synthetic);
  report(5, "lemma 4 ledger inequality", corpus.lemma4 && syn,
         std::to_string(corpus.lemma4_regions) + " region checks over " + std::to_string(corpus.runs) +
             " runs " + (corpus.lemma4 ? "hold" : "VIOLATED") + "; 10000 synthetic ledgers (" +
             std::to_string(synthetic) + " region checks) " + (syn ? "hold" : "VIOLATED"));
}

void criterion6(const OptimalityRuns& runs) {
  report(6, "lemma 2 per-query bound", runs.lemma2 <= kLemma2C,
         "C'=" + fmt("%.3f", runs.lemma2) + " (recorded " + fmt("%.3f", kLemma2C) + ";" +
             runs.lemma2_detail + ")");
}

void criterion7(const Corpus& corpus) {
  const bool ok = corpus.rebuild_mismatches == 0 && corpus.subset_violations == 0 &&
                  corpus.worst_case <= kWorstCaseC;
  report(7, "structural counts", ok,
         std::to_string(corpus.runs) + " runs, " + std::to_string(corpus.rebuild_mismatches) +
             " rebuild-count mismatches, " + std::to_string(corpus.subset_violations) +
             " subset-size mismatches, worst case C''=" + fmt("%.3f", corpus.worst_case) +
             " (recorded " + fmt("%.3f", kWorstCaseC) + ")");
}

void criterion8() {
  std::mt19937_64 rng(derive_seed(8, "c8", 0));
  std::uint64_t mismatches = 0, increments = 0, ops = 0;
  double worst_topk = 0.0;
  using Entry = std::pair<RegionId, std::uint64_t>;
  for (int seq = 0; seq < kFrequencySequences; ++seq) {
    const auto n = static_cast<std::uint32_t>(1 + rng() % 200);
    const std::uint64_t len = 1 + rng() % 300;
    FrequencyTable ft(n);
    std::vector<std::uint64_t> ref(n + 1, 0);
    const bool skew = rng() % 2;
    for (std::uint64_t i = 0; i < len; ++i) {
      std::uint32_t s = static_cast<std::uint32_t>(rng() % (n + 1));
      if (skew) s = static_cast<std::uint32_t>(static_cast<std::uint64_t>(s) * s / (n + 1));
      const RegionId r = s == n ? RegionId::outside() : RegionId::triangle(s);
      ++ref[s];
      ft.increment(r);
    }
    increments += len;
    ops += ft.bucket_ops();
    std::vector<Entry> oracle;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (ref[i]) oracle.emplace_back(RegionId::triangle(i), ref[i]);
    }
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const Entry& a, const Entry& b) { return a.second > b.second; });
    for (std::size_t k : {std::size_t{1}, std::size_t{10}, static_cast<std::size_t>(n)}) {
      std::uint64_t work = 0;
      const auto got = ft.top_k(k, true, &work);
      const std::vector<Entry> want(oracle.begin(), oracle.begin() + static_cast<std::ptrdiff_t>(std::min(k, oracle.size())));
      if (got != want) ++mismatches;
      worst_topk = std::max(worst_topk, static_cast<double>(work) / static_cast<double>(k));
    }
  }
  const double per_inc = static_cast<double>(ops) / static_cast<double>(increments);
  report(8, "frequency tracker",
         mismatches == 0 && per_inc <= kBucketOpsPerIncrement && worst_topk <= kTopKWorkPerK,
         std::to_string(kFrequencySequences) + " sequences, " + std::to_string(mismatches) +
             " top-k mismatches, bucket ops/increment " + fmt("%.3f", per_inc) + " (limit " +
             fmt("%.0f", kBucketOpsPerIncrement) + "), max top-k work/k " + fmt("%.3f", worst_topk) +
             " (limit " + fmt("%.0f", kTopKWorkPerK) + ")");
}

double first_draw_chi2(const std::vector<double>& w, std::uint64_t stream) {
  std::vector<double> counts(w.size(), 0.0);
  for (int t = 0; t < kChiTrials; ++t) {
    counts[weighted_permutation(w, derive_seed(9, "c9", stream * kChiTrials + t)).permutation[0]] += 1;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double chi = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = kChiTrials * w[i] / total;
    chi += (counts[i] - e) * (counts[i] - e) / e;
  }
  return chi;
}

void criterion9() {
  const double a = first_draw_chi2({3, 1}, 0), b = first_draw_chi2({1, 1, 1}, 1);
  report(9, "weighted permutation law", a < kChi2Dof1 && b < kChi2Dof2,
         "{3,1}: chi2=" + fmt("%.3f", a) + " (1 dof, limit " + fmt("%.3f", kChi2Dof1) +
             "); {1,1,1}: chi2=" + fmt("%.3f", b) + " (2 dof, limit " + fmt("%.3f", kChi2Dof2) +
             "); " + std::to_string(kChiTrials) + " trials each");
}

}  // namespace

int main() {
  Corpus corpus;
  criterion1(corpus);
  criterion2();
  criterion3();
  const OptimalityRuns runs = criterion4(corpus);
  criterion5(corpus);
  criterion6(runs);
  criterion7(corpus);
  criterion8();
  criterion9();
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
