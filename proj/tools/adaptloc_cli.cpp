// adaptloc command line: generate triangulations, run experiments, check
// ledgers and answer fixture queries by brute force.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "adaptloc/harness/experiment.hpp"

using namespace adaptloc;
using namespace adaptloc::harness;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

int cmd_gen(std::size_t n, std::uint64_t seed, std::int64_t bound, const std::string& out) {
  const Triangulation tri = gen_triangulation(n, seed, bound);
  if (out.empty() || out == "-") {
    std::cout << save_triangulation(tri);
  } else {
    auto os = open_out(out);
    os << save_triangulation(tri);
  }
  return 0;
}

int cmd_run(ExperimentConfig cfg, const std::string& dist, std::uint64_t shuffle_seed,
            const std::string& out, const std::string& ledger, const std::string& summary) {
  cfg.dist = parse_distribution(dist, shuffle_seed);
  const Report rep = run_experiment(cfg);
  if (!out.empty()) {
    auto os = open_out(out);
    rep.write_csv(os);
  }
  if (!ledger.empty()) {
    auto os = open_out(ledger);
    rep.ledger.write_csv(os);
  }
  const std::string text = rep.summary_json().dump(2) + "\n";
  if (!summary.empty()) {
    auto os = open_out(summary);
    os << text;
  }
  std::cout << text;
  return rep.summary.all_pass() ? 0 : 1;
}

int cmd_check(const std::string& path, std::uint32_t n, double alpha) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  const CostLedger ledger = CostLedger::read_csv(in, n);
  const Lemma4Report rep = check_lemma4(ledger, n, alpha);
  std::size_t failed = 0;
  for (const auto& r : rep.regions) {
    if (r.pass) continue;
    ++failed;
    std::cout << "FAIL " << r.region.str() << " f=" << r.f << " lhs=" << r.lhs << " rhs=" << r.rhs
              << "\n";
  }
  std::cout << "lemma4: " << rep.regions.size() << " regions checked, " << rep.vacuous
            << " vacuous, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_oracle(const std::string& tri_path, const std::string& queries) {
  const Triangulation tri = load_triangulation(read_file(tri_path));
  std::istringstream in(read_file(queries));
  std::string line;
  std::size_t row = 0;
  std::cout << "x,y,region\n";
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    long long x = 0, y = 0;
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      std::size_t ux = 0, uy = 0;
      const std::string xs = line.substr(0, comma), ys = line.substr(comma + 1);
      x = std::stoll(xs, &ux);
      y = std::stoll(ys, &uy);
      if (ux != xs.size() || uy != ys.size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      if (row == 1) continue;  // header
      throw ParseError("queries row " + std::to_string(row) + ": expected x,y integers");
    }
    const Point p(x, y);
    std::cout << x << ',' << y << ',' << brute_force_locate(tri, p).code() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive planar point location"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "emit a generated triangulation as JSON");
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 1;
  std::int64_t bound = std::int64_t{1} << 20;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of triangles")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--bound", bound, "coordinate box half-width");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  auto* run = app.add_subcommand("run", "run an experiment and write CSVs");
  ExperimentConfig cfg;
  std::string dist = "zipf:1.2", out, ledger, summary;
  std::uint64_t shuffle_seed = 0;
  auto* tri_opt = run->add_option("--tri", cfg.tri_path, "triangulation JSON");
  auto* gen_opt = run->add_option("--gen-n", cfg.gen_n, "generate a triangulation of this size");
  tri_opt->excludes(gen_opt);
  run->add_option("--gen-seed", cfg.gen_seed, "generator seed");
  run->add_option("--dist", dist, "uniform | zipf:<s> | explicit:<file.json>");
  run->add_option("--shuffle-seed", shuffle_seed, "zipf rank shuffle seed");
  run->add_option("--m", cfg.m, "number of queries");
  run->add_option("--alpha", cfg.policy.alpha, "rebuild period exponent");
  run->add_option("--beta", cfg.policy.beta, "hot set size exponent");
  run->add_option("--seeds", cfg.seeds, "locators per run");
  run->add_option("--seed", cfg.seed, "master seed");
  run->add_option("--worst-case-c", cfg.worst_case_constant, "worst-case guard constant, 0 to disable");
  run->add_flag("--verify", cfg.verify, "check every answer against brute force");
  run->add_option("--out", out, "report CSV");
  run->add_option("--ledger", ledger, "ledger CSV of the first seed");
  run->add_option("--summary", summary, "summary JSON");

  auto* check = app.add_subcommand("check", "check a ledger CSV");
  std::string check_ledger;
  std::uint32_t check_n = 0;
  double check_alpha = 0.5;
  check->add_option("--ledger", check_ledger, "ledger CSV")->required();
  check->add_option("--n", check_n, "number of triangles")->required();
  check->add_option("--alpha", check_alpha, "rebuild period exponent");

  auto* oracle = app.add_subcommand("oracle", "brute-force answers for x,y queries");
  std::string oracle_tri, oracle_queries;
  oracle->add_option("--tri", oracle_tri, "triangulation JSON")->required();
  oracle->add_option("--queries", oracle_queries, "CSV of x,y")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gen_n, gen_seed, bound, gen_out);
    if (*run) return cmd_run(cfg, dist, shuffle_seed, out, ledger, summary);
    if (*check) return cmd_check(check_ledger, check_n, check_alpha);
    if (*oracle) return cmd_oracle(oracle_tri, oracle_queries);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
