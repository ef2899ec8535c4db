#pragma once
// End-to-end runs: build locators, stream a workload, record checkpoints and
// check the ledger bounds.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "adaptloc/errors.hpp"
#include "adaptloc/harness/bounds.hpp"
#include "adaptloc/harness/workload.hpp"
#include "adaptloc/optimal.hpp"
#include "adaptloc/random.hpp"
#include "adaptloc/subdivision.hpp"

namespace adaptloc::harness {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "uniform", "zipf:<s>", or "explicit:<file.json>" where the file holds an
// array of probabilities or {"probabilities": [...]}.
inline DistributionSpec parse_distribution(const std::string& text, std::uint64_t shuffle_seed = 0) {
  if (text == "uniform") return DistributionSpec::uniform();
  if (text.rfind("zipf:", 0) == 0) {
    double s = 0.0;
    try {
      std::size_t used = 0;
      s = std::stod(text.substr(5), &used);
      if (used != text.size() - 5) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ConfigError("dist: bad zipf exponent in '" + text + "'");
    }
    if (!(s > 0.0)) throw ConfigError("dist: zipf exponent must be positive");
    return DistributionSpec::zipf(s, shuffle_seed);
  }
  if (text.rfind("explicit:", 0) == 0) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(text.substr(9)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("dist: malformed JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("probabilities")) doc = doc["probabilities"];
    if (!doc.is_array()) throw ConfigError("dist: expected an array of probabilities");
    std::vector<double> p;
    for (const auto& v : doc) {
      if (!v.is_number()) throw ConfigError("dist: probabilities must be numbers");
      p.push_back(v.get<double>());
    }
    return DistributionSpec::explicit_probabilities(std::move(p));
  }
  throw ConfigError("dist: unknown distribution '" + text + "'");
}

struct ExperimentConfig {
  // Triangulation source: an in-memory instance, a file, or the generator.
  std::shared_ptr<const Triangulation> triangulation;
  std::string tri_path;
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 1;
  std::int64_t coord_bound = std::int64_t{1} << 20;

  DistributionSpec dist = DistributionSpec::zipf(1.2);
  std::size_t m = 10000;
  RebuildPolicy policy;
  std::size_t seeds = 1;
  std::uint64_t seed = 1;
  bool verify = false;
  std::size_t checkpoint_every = 0;  // 0: max(1, m / 100)
  // Guard visits <= C * log2 n + C on every query; 0 disables it.
  double worst_case_constant = 12.0;

  void validate() const {
    int sources = (triangulation ? 1 : 0) + (tri_path.empty() ? 0 : 1) + (gen_n > 0 ? 1 : 0);
    if (sources != 1) throw ConfigError("tri: give exactly one of triangulation, tri_path, gen_n");
    if (gen_n == 1) throw ConfigError("gen_n: must be at least 2");
    if (m < 1) throw ConfigError("m: must be at least 1");
    if (seeds < 1) throw ConfigError("seeds: must be at least 1");
    if (!(worst_case_constant >= 0.0)) throw ConfigError("worst_case_constant: must be non-negative");
    try {
      policy.validate();
    } catch (const InvalidPolicy& e) {
      throw ConfigError(std::string("policy: ") + e.what());
    }
  }

  std::shared_ptr<const Triangulation> resolve_triangulation() const {
    if (triangulation) return triangulation;
    if (!tri_path.empty()) {
      return std::make_shared<const Triangulation>(load_triangulation(read_file(tri_path)));
    }
    return std::make_shared<const Triangulation>(gen_triangulation(gen_n, gen_seed, coord_bound));
  }
};

struct Checkpoint {
  std::uint64_t j = 0;
  double cum_visits = 0.0;  // seed mean, query visits only
  double entropy_bits = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  std::uint64_t rebuilds = 0;
  double hot_hit_rate = 0.0;  // HotHit share of queries r+1..j, seed mean
};

struct ExperimentSummary {
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t period = 0;
  std::uint64_t subset_cap = 0;
  std::size_t seeds = 0;

  std::uint64_t expected_rebuilds = 0;
  std::vector<std::uint64_t> rebuilds;  // per seed
  std::uint64_t subset_size_violations = 0;

  double mean_query_visits = 0.0;
  double mean_rebuild_work = 0.0;
  double mean_total_cost = 0.0;
  double bound = 0.0;
  double cost_ratio = 0.0;  // mean_total_cost / bound

  bool verified = false;
  std::uint64_t mismatches = 0;

  bool lemma4_pass = true;
  std::uint64_t lemma4_regions = 0;  // non-vacuous checks over all seeds
  double lemma4_max_slack_ratio = 0.0;  // max lhs / rhs

  std::uint32_t max_visits = 0;
  double worst_case_limit = 0.0;  // 0 when the guard is off
  bool worst_case_pass = true;

  std::vector<Lemma2Bucket> lemma2;
  double lemma2_constant = 0.0;

  bool rebuilds_pass() const {
    for (auto r : rebuilds) {
      if (r != expected_rebuilds) return false;
    }
    return true;
  }
  bool all_pass() const {
    return rebuilds_pass() && subset_size_violations == 0 && mismatches == 0 && lemma4_pass &&
           worst_case_pass;
  }
};

struct Report {
  ExperimentConfig config;
  std::string dist_name;
  std::vector<Checkpoint> rows;
  ExperimentSummary summary;
  CostLedger ledger;  // first seed
  std::vector<std::uint64_t> final_counts;

  void write_csv(std::ostream& os) const {
    os << "j,cum_visits,entropy_bits,bound,ratio,rebuilds,hot_hit_rate\n";
    char buf[256];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%llu,%.4f,%.6f,%.4f,%.6f,%llu,%.6f\n",
                    static_cast<unsigned long long>(r.j), r.cum_visits, r.entropy_bits, r.bound,
                    r.ratio, static_cast<unsigned long long>(r.rebuilds), r.hot_hit_rate);
      os << buf;
    }
  }

  nlohmann::ordered_json summary_json() const {
    const auto& s = summary;
    nlohmann::ordered_json j;
    j["config"] = {{"tri", config.tri_path.empty() ? (config.gen_n ? "generated" : "in-memory")
                                                     : config.tri_path},
                   {"gen_n", config.gen_n},
                   {"gen_seed", config.gen_seed},
                   {"dist", dist_name},
                   {"m", config.m},
                   {"alpha", config.policy.alpha},
                   {"beta", config.policy.beta},
                   {"seeds", config.seeds},
                   {"seed", config.seed},
                   {"verify", config.verify}};
    j["n"] = s.n;
    j["period"] = s.period;
    j["subset_cap"] = s.subset_cap;
    j["rebuilds"] = {{"expected", s.expected_rebuilds}, {"per_seed", s.rebuilds},
                     {"pass", s.rebuilds_pass()}};
    j["subset_size_violations"] = s.subset_size_violations;
    j["mean_query_visits"] = s.mean_query_visits;
    j["mean_rebuild_work"] = s.mean_rebuild_work;
    j["mean_total_cost"] = s.mean_total_cost;
    j["bound"] = s.bound;
    j["cost_ratio"] = s.cost_ratio;
    if (s.verified) j["mismatches"] = s.mismatches;
    j["lemma4"] = {{"pass", s.lemma4_pass}, {"regions", s.lemma4_regions},
                   {"max_lhs_over_rhs", s.lemma4_max_slack_ratio}};
    j["worst_case"] = {{"max_visits", s.max_visits}, {"limit", s.worst_case_limit},
                       {"pass", s.worst_case_pass}};
    auto buckets = nlohmann::ordered_json::array();
    for (const auto& b : s.lemma2) {
      buckets.push_back({{"value", b.value}, {"queries", b.queries}, {"mean_visits", b.mean_visits}});
    }
    j["lemma2"] = {{"buckets", buckets}, {"constant", s.lemma2_constant}};
    j["pass"] = s.all_pass();
    return j;
  }
};

// Seed of the s-th locator in a run with master seed `master`.
inline std::uint64_t locator_seed(std::uint64_t master, std::size_t s) {
  return derive_seed(master, "locator", s);
}

inline std::uint64_t query_seed(std::uint64_t master) { return derive_seed(master, "queries", 0); }

// All seeds share one query sequence, so per-index visits can be averaged.
inline Report run_experiment(const ExperimentConfig& config, const std::vector<Query>* queries = nullptr) {
  config.validate();
  Report rep;
  rep.config = config;
  rep.dist_name = config.dist.describe();
  const auto tri = config.resolve_triangulation();
  const std::size_t n = tri->size();
  const std::size_t m = config.m;

  std::vector<Query> generated;
  if (!queries) {
    generated = gen_queries(*tri, config.dist, m, query_seed(config.seed));
    queries = &generated;
  } else if (queries->size() != m) {
    throw ConfigError("m: does not match the supplied query list");
  }

  auto& s = rep.summary;
  s.n = n;
  s.m = m;
  s.period = config.policy.period(n);
  s.subset_cap = config.policy.subset_cap(n);
  s.seeds = config.seeds;
  s.expected_rebuilds = m / s.period;
  s.verified = config.verify;
  if (config.worst_case_constant > 0.0) {
    s.worst_case_limit = config.worst_case_constant * clamped_log2(static_cast<double>(n)) +
                         config.worst_case_constant;
  }

  const std::size_t every = config.checkpoint_every ? config.checkpoint_every
                                                    : std::max<std::size_t>(1, m / 100);
  std::vector<std::uint64_t> checkpoints;
  for (std::size_t j = every; j <= m; j += every) checkpoints.push_back(j);
  if (checkpoints.empty() || checkpoints.back() != m) checkpoints.push_back(m);

  std::vector<double> visits_sum(m, 0.0);
  std::vector<std::uint64_t> freq(m, 0);
  std::vector<double> cum_sum(checkpoints.size(), 0.0), hit_sum(checkpoints.size(), 0.0);

  for (std::size_t seed_i = 0; seed_i < config.seeds; ++seed_i) {
    SelfAdjustingLocator loc(tri, config.policy, locator_seed(config.seed, seed_i));
    std::vector<bool> seen(n, false);
    std::uint64_t distinct = 0, cum = 0, hits = 0;
    std::size_t cp = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Query& q = (*queries)[i];
      const QueryOutcome out = loc.query(q.point);
      if (config.verify && out.region != brute_force_locate(*tri, q.point)) ++s.mismatches;
      if (out.region.is_triangle() && !seen[out.region.index()]) {
        seen[out.region.index()] = true;
        ++distinct;
      }
      if (out.rebuild_triggered) {
        const std::size_t expect = std::min<std::uint64_t>(s.subset_cap, distinct);
        const std::size_t got = loc.hot() ? loc.hot()->members().size() : 0;
        if (got != expect) ++s.subset_size_violations;
      }
      cum += out.visits_total;
      if (out.route == Route::HotHit) ++hits;
      visits_sum[i] += out.visits_total;
      s.max_visits = std::max(s.max_visits, out.visits_total);
      if (seed_i == 0) freq[i] = loc.ledger().records().back().frequency;
      if (cp < checkpoints.size() && i + 1 == checkpoints[cp]) {
        cum_sum[cp] += static_cast<double>(cum);
        const std::uint64_t j = i + 1;
        if (j > s.period) hit_sum[cp] += static_cast<double>(hits) / static_cast<double>(j - s.period);
        ++cp;
      }
    }
    s.rebuilds.push_back(loc.rebuilds());
    s.mean_query_visits += static_cast<double>(loc.query_visits());
    s.mean_rebuild_work += static_cast<double>(loc.rebuild_work());

    const Lemma4Report l4 = check_lemma4(loc.ledger(), n, config.policy.alpha, m);
    s.lemma4_pass = s.lemma4_pass && l4.pass();
    s.lemma4_regions += l4.regions.size();
    for (const auto& r : l4.regions) {
      s.lemma4_max_slack_ratio = std::max(s.lemma4_max_slack_ratio, r.lhs / r.rhs);
    }
    if (seed_i == 0) rep.ledger = loc.ledger();
  }

  const double seeds = static_cast<double>(config.seeds);
  s.mean_query_visits /= seeds;
  s.mean_rebuild_work /= seeds;
  s.mean_total_cost = s.mean_query_visits + s.mean_rebuild_work;
  if (s.worst_case_limit > 0.0) s.worst_case_pass = s.max_visits <= s.worst_case_limit;

  for (auto& v : visits_sum) v /= seeds;
  s.lemma2 = lemma2_buckets(visits_sum, freq, s.period);
  s.lemma2_constant = lemma2_constant(s.lemma2);

  // Checkpoint rows from the answered regions, which every seed shares.
  std::vector<std::uint64_t> counts(n + 1, 0);
  const auto& records = rep.ledger.records();
  std::size_t cp = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const RegionId r = records[i].region;
    ++counts[r.is_outside() ? n : r.index()];
    if (cp < checkpoints.size() && i + 1 == checkpoints[cp]) {
      Checkpoint row;
      row.j = i + 1;
      row.cum_visits = cum_sum[cp] / seeds;
      row.entropy_bits = empirical_entropy(counts, row.j);
      row.bound = theorem6_bound(counts, row.j, n);
      row.ratio = row.cum_visits / row.bound;
      row.rebuilds = row.j / s.period;
      row.hot_hit_rate = hit_sum[cp] / seeds;
      rep.rows.push_back(row);
      ++cp;
    }
  }
  rep.final_counts = counts;
  s.bound = theorem6_bound(counts, m, n);
  s.cost_ratio = s.mean_total_cost / s.bound;
  return rep;
}

}  // namespace adaptloc::harness
