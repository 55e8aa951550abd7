// Command-line front end: single solves, benchmark matrices, profiles.

#include "cpsopt/bench.hpp"
#include "cpsopt/direct_search.hpp"
#include "cpsopt/problems.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cpsopt;

namespace {

struct SolveArgs {
  std::string problem;
  int n = 0;
  std::string variant = "ps";
  SolverConfig cfg;
  std::string degree = "quad";
  std::string fit = "minnorm";
  std::optional<double> k_ill;
  std::string out;
};

struct BenchArgs {
  std::string set = "small";
  std::string variants = "unstructured,models,ps,ps-models";
  int seeds = -1;
  std::string out;
  int threads = 1;
  SolverConfig cfg;
};

struct ProfileArgs {
  std::string in;
  double tau = 1e-4;
  std::string kind = "perf";
  std::string out = "-";
};

void add_budget_flags(CLI::App* app, SolverConfig& cfg) {
  app->add_option("--max-evals", cfg.max_full_evals,
                  "Budget in full-equivalent evaluations")
      ->check(CLI::PositiveNumber);
  app->add_option("--time-limit", cfg.time_limit_seconds,
                  "Wall-clock limit per run in seconds")
      ->check(CLI::PositiveNumber);
}

void print_summary(const RunRecord& r) {
  std::printf("%-9s n=%-6d %-12s seed=%-3llu %-9s f=%-14s evals=%lld  %.2fs\n",
              r.problem.c_str(), r.n, r.variant.c_str(),
              static_cast<unsigned long long>(r.seed),
              r.status ? to_string(*r.status).c_str() : "failed",
              format_double(r.final_f).c_str(),
              static_cast<long long>(r.full_equivalent), r.wall_seconds);
  if (r.failed()) std::fprintf(stderr, "  error: %s\n", r.error.c_str());
  std::fflush(stdout);
}

int run_solve(SolveArgs& a) {
  a.cfg.search.degree = parse_degree_class(a.degree);
  a.cfg.search.fit = parse_fit_mode(a.fit);
  a.cfg.search.k_ill = a.k_ill;
  const Variant v = parse_variant(a.variant);
  // Surface bad problem names and configs as errors instead of failed runs.
  const CpsProblem p = instantiate(a.problem, a.n);
  a.cfg.validate(p.n());
  const RunRecord r = run_variant(a.problem, a.n, v, a.cfg.seed, a.cfg);
  print_summary(r);
  if (!a.out.empty()) save_record(a.out, r);
  return r.failed() ? 1 : 0;
}

int run_bench(BenchArgs& a) {
  const SizeClass c = parse_size_class(a.set);
  const auto variants = parse_variant_list(a.variants);
  const int count = a.seeds >= 0 ? a.seeds : default_seed_count(c);
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < count; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  if (seeds.empty()) {
    std::cerr << "no seeds requested for set '" << a.set
              << "'; pass --seeds to run it\n";
    return 0;
  }
  fs::create_directories(a.out);
  MatrixOptions opts;
  opts.base = a.cfg;
  opts.threads = a.threads;
  opts.on_record = [&](const RunRecord& r) {
    print_summary(r);
    save_record(fs::path(a.out) / record_filename(r), r);
  };
  const auto records = run_matrix(problem_set(c), variants, seeds, opts);
  int failed = 0;
  for (const auto& r : records) failed += r.failed();
  std::printf("%zu runs written to %s (%d failed)\n", records.size(),
              a.out.c_str(), failed);
  return 0;
}

int run_profile(const ProfileArgs& a) {
  const auto records = load_records(a.in);
  if (records.empty()) {
    std::cerr << "no .run files in " << a.in << "\n";
    return 1;
  }
  std::vector<ProfileCurve> curves;
  if (a.kind == "perf") curves = performance_profile(records, a.tau);
  else curves = data_profile(records, a.tau);
  if (a.out == "-") {
    write_profiles(std::cout, curves);
  } else {
    std::ofstream os(a.out);
    if (!os) throw std::runtime_error("cannot write " + a.out);
    write_profiles(os, curves);
  }
  return 0;
}

std::string join_dims(const std::vector<int>& dims) {
  std::string s;
  for (int d : dims) {
    if (!s.empty()) s += ",";
    s += std::to_string(d);
  }
  return s.empty() ? "-" : s;
}

int run_list() {
  std::printf("%-9s %-22s %-8s %-14s %-14s %-12s\n", "name", "admissible n",
              "small", "smallish", "medium", "large");
  for (const auto& e : problem_registry()) {
    std::printf("%-9s %-22s %-8s %-14s %-14s %-12s\n", e.name.c_str(),
                e.admissible_rule.c_str(), join_dims(e.dims[0]).c_str(),
                join_dims(e.dims[1]).c_str(), join_dims(e.dims[2]).c_str(),
                join_dims(e.dims[3]).c_str());
  }
  std::printf("\n%-9s %8s %8s %7s %8s %7s %7s\n", "name", "n", "q",
              "max|E|", "max|X|", "t", "max|I|");
  for (const auto& e : problem_registry()) {
    for (int n : e.all_dims()) {
      const StructureStats s = e.documented_stats(n);
      std::printf("%-9s %8d %8d %7d %8d %7d %7d\n", e.name.c_str(), n, s.q,
                  s.max_element_set, s.max_element_size, s.t, s.max_group);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-exploiting pattern search for partially separable problems"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Run one solver variant on one problem");
  solve->add_option("--problem", sa.problem, "Problem name")->required();
  solve->add_option("--n", sa.n, "Dimension")->required();
  solve->add_option("--variant", sa.variant, "Solver variant")
      ->check(CLI::IsMember({"unstructured", "models", "ps", "ps-models"}));
  solve->add_option("--epsilon", sa.cfg.epsilon, "Stepsize convergence threshold");
  solve->add_option("--seed", sa.cfg.seed, "RNG seed");
  solve->add_option("--alpha0", sa.cfg.alpha0, "Initial stepsize");
  solve->add_option("--gamma", sa.cfg.gamma, "Expansion factor");
  solve->add_option("--beta", sa.cfg.beta, "Shrink factor");
  solve->add_option("--eta", sa.cfg.eta, "Sufficient-decrease constant");
  solve->add_option("--iota", sa.cfg.iota, "Structured shrink exponent");
  solve->add_option("--n2", sa.cfg.n2, "Second-pass directions (0: min(n,10))");
  solve->add_option("--degree", sa.degree, "Model degree class")
      ->check(CLI::IsMember({"linear", "diag", "quad"}));
  solve->add_option("--fit", sa.fit, "Model fitting mode")
      ->check(CLI::IsMember({"minnorm", "subbasis"}));
  solve->add_option("--kill", sa.k_ill, "Conditioning cap for model fits");
  solve->add_option("--out", sa.out, "Write the run record here");
  add_budget_flags(solve, sa.cfg);

  BenchArgs ba;
  ba.cfg.time_limit_seconds = kDefaultTimeLimitSeconds;
  auto* bench = app.add_subcommand("bench", "Run a variant x problem x seed matrix");
  bench->add_option("--set", ba.set, "Problem set")
      ->check(CLI::IsMember({"small", "smallish", "medium", "large"}));
  bench->add_option("--variants", ba.variants, "Comma separated variant list");
  bench->add_option("--seeds", ba.seeds, "Seeds per run (default depends on set)")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--out", ba.out, "Output directory for run records")->required();
  bench->add_option("--threads", ba.threads, "Concurrent runs")
      ->check(CLI::PositiveNumber);
  add_budget_flags(bench, ba.cfg);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Performance or data profiles from run records");
  profile->add_option("--in", pa.in, "Directory of run records")
      ->required()
      ->check(CLI::ExistingDirectory);
  profile->add_option("--tau", pa.tau, "Convergence tolerance")
      ->check(CLI::Range(0.0, 1.0));
  profile->add_option("--kind", pa.kind, "perf or data")
      ->check(CLI::IsMember({"perf", "data"}));
  profile->add_option("--out", pa.out, "Output file ('-' for stdout)");

  auto* list = app.add_subcommand("list-problems", "List registered problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(sa);
    if (*bench) return run_bench(ba);
    if (*profile) return run_profile(pa);
    if (*list) return run_list();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
