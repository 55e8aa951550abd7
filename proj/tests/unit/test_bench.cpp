#include "cpsopt/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace cpsopt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RunRecord rec(const std::string& problem, int n, const std::string& solver,
              std::vector<HistorySample> h, double f0 = 10.0) {
  RunRecord r;
  r.problem = problem;
  r.n = n;
  r.variant = solver;
  r.status = RunStatus::kConverged;
  r.f0 = f0;
  r.history = std::move(h);
  r.final_f = r.history.back().best_f;
  r.full_equivalent = r.history.back().evals;
  return r;
}

const ProfileCurve& curve(const std::vector<ProfileCurve>& cs, const std::string& s) {
  for (const auto& c : cs)
    if (c.solver == s) return c;
  throw std::runtime_error("missing curve " + s);
}

// Fraction of problems at abscissa x for a right-continuous step curve.
double at(const ProfileCurve& c, double x) {
  double y = 0.0;
  for (const auto& [px, py] : c.points)
    if (px <= x) y = py;
  return y;
}

}  // namespace

TEST(Convergence, HandComputedCases) {
  EXPECT_TRUE(converged(0.0009, 10.0, 0.0, 1e-4));
  EXPECT_FALSE(converged(0.002, 10.0, 0.0, 1e-4));
  EXPECT_TRUE(converged(0.0, 10.0, 0.0, 0.0));
  EXPECT_FALSE(converged(1e-12, 10.0, 0.0, 0.0));
  // no decrease possible: anything not worse than the start passes
  EXPECT_TRUE(converged(3.0, 3.0, 3.0, 1e-4));
  EXPECT_FALSE(converged(3.5, 3.0, 3.0, 1e-4));
}

TEST(Convergence, CostIsFirstPassingSample) {
  const RunRecord r = rec("P", 2, "a", {{1, 10.0}, {7, 1.0}, {30, 0.0005}, {50, 0.0}});
  EXPECT_EQ(convergence_cost(r, 10.0, 0.0, 1e-4), 30.0);
  EXPECT_EQ(convergence_cost(r, 10.0, -1.0, 1e-4), kInf);
}

TEST(BestKnown, TruncatesAtBudget) {
  const RunRecord a = rec("P", 2, "a", {{1, 10.0}, {5, 3.0}});
  const RunRecord b = rec("P", 2, "b", {{1, 10.0}, {5, 5.0}});
  EXPECT_EQ(best_known({&a}), 3.0);
  EXPECT_EQ(best_known({&a, &b}), 3.0);
  const RunRecord late = rec("P", 2, "c", {{1, 10.0}, {90, 4.0}, {150, 1.0}});
  EXPECT_EQ(best_known({&late}, 100), 4.0);
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median_cost({5, 1, 3}), 3.0);
  EXPECT_EQ(median_cost({1, 3, 5, kInf}), 4.0);
  EXPECT_EQ(median_cost({1, kInf, kInf}), kInf);
}

TEST(Profiles, PerformanceRatios) {
  const std::vector<RunRecord> rs = {
      rec("P", 4, "A", {{1, 10.0}, {10, 0.0}}),
      rec("P", 4, "B", {{1, 10.0}, {20, 0.0}})};
  const auto cs = performance_profile(rs, 1e-4);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(at(curve(cs, "A"), 1.0), 1.0);
  EXPECT_EQ(at(curve(cs, "B"), 1.0), 0.0);
  EXPECT_EQ(at(curve(cs, "B"), 1.999), 0.0);
  EXPECT_EQ(at(curve(cs, "B"), 2.0), 1.0);
}

TEST(Profiles, SelfComparisonAndTotalFailure) {
  const std::vector<RunRecord> rs = {
      rec("P", 4, "A", {{1, 10.0}, {10, 0.0}}),
      rec("Q", 4, "A", {{1, 10.0}, {15, 1.0}}),
      rec("P", 4, "Z", {{1, 10.0}}),
      rec("Q", 4, "Z", {{1, 10.0}})};
  const auto cs = performance_profile(rs, 1e-4);
  EXPECT_EQ(curve(cs, "A").points.front(), std::make_pair(1.0, 1.0));
  for (const auto& [x, y] : curve(cs, "Z").points) EXPECT_EQ(y, 0.0);
}

TEST(Profiles, DataProfileNormalizesByDimension) {
  const std::vector<RunRecord> rs = {rec("P", 9, "A", {{1, 10.0}, {100, 0.0}})};
  const auto cs = data_profile(rs, 1e-4);
  EXPECT_EQ(at(cs[0], 9.99), 0.0);
  EXPECT_EQ(at(cs[0], 10.0), 1.0);
}

TEST(Profiles, DataProfileFlatWhenNothingConverges) {
  const std::vector<RunRecord> rs = {
      rec("P", 9, "A", {{1, 10.0}, {100, 5.0}}),
      rec("P", 9, "B", {{1, 10.0}, {100, 0.0}})};
  const auto cs = data_profile(rs, 1e-4);
  for (const auto& [x, y] : curve(cs, "A").points) EXPECT_EQ(y, 0.0);
}

TEST(Profiles, CostsPastBudgetCountAsFailures) {
  const std::vector<RunRecord> rs = {
      rec("P", 4, "A", {{1, 10.0}, {200, 0.0}}),
      rec("P", 4, "B", {{1, 10.0}, {20, 0.0}})};
  const auto cs = performance_profile(rs, 1e-4, 100);
  for (const auto& [x, y] : curve(cs, "A").points) EXPECT_EQ(y, 0.0);
}

TEST(Profiles, RandomizedMonotonicity) {
  std::mt19937_64 gen(123);
  std::uniform_int_distribution<int> cost(1, 500);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RunRecord> rs;
    const int problems = 1 + trial % 6, solvers = 1 + trial % 4;
    for (int p = 0; p < problems; ++p) {
      for (int s = 0; s < solvers; ++s) {
        for (int seed = 0; seed < 3; ++seed) {
          std::vector<HistorySample> h = {{1, 10.0}};
          double f = 10.0;
          std::int64_t e = 1;
          for (int k = 0; k < 5; ++k) {
            e += cost(gen);
            f *= val(gen);
            h.push_back({e, f});
          }
          RunRecord r = rec("P" + std::to_string(p), 3 + p, "S" + std::to_string(s), h);
          r.seed = seed;
          rs.push_back(r);
        }
      }
    }
    for (const auto& cs : {performance_profile(rs, 1e-3), data_profile(rs, 1e-3)}) {
      ASSERT_EQ(cs.size(), static_cast<std::size_t>(solvers));
      const double right = cs[0].points.back().first;
      for (const auto& c : cs) {
        EXPECT_EQ(c.points.back().first, right);
        for (std::size_t i = 1; i < c.points.size(); ++i) {
          EXPECT_GE(c.points[i].first, c.points[i - 1].first);
          EXPECT_GE(c.points[i].second, c.points[i - 1].second);
        }
        for (const auto& [x, y] : c.points) {
          EXPECT_GE(y, 0.0);
          EXPECT_LE(y, 1.0);
        }
      }
    }
    // every problem solved by someone has a solver at ratio 1
    const auto perf = performance_profile(rs, 1e-3);
    double at_one = 0.0, solved = 0.0;
    for (const auto& c : perf) {
      at_one += at(c, 1.0);
      solved = std::max(solved, c.points.back().second);
    }
    EXPECT_GE(at_one + 1e-12, solved);
  }
}

TEST(Records, RoundTrip) {
  RunRecord r = rec("BROYDN3D", 10, "ps", {{1, 3.5}, {17, 0.1 + 0.2}, {40, 1e-300}});
  r.seed = 4;
  r.status = RunStatus::kBudget;
  r.full_evals = 12;
  r.restricted_element_evals = 251;
  r.wall_seconds = 0.125;
  std::stringstream ss;
  write_record(ss, r);
  const RunRecord back = read_record(ss);
  EXPECT_EQ(back.problem, r.problem);
  EXPECT_EQ(back.n, r.n);
  EXPECT_EQ(back.variant, r.variant);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.status, r.status);
  EXPECT_EQ(back.f0, r.f0);
  EXPECT_EQ(back.final_f, r.final_f);
  EXPECT_EQ(back.full_evals, 12);
  EXPECT_EQ(back.restricted_element_evals, 251);
  ASSERT_EQ(back.history.size(), 3u);
  EXPECT_EQ(back.history[1].best_f, 0.1 + 0.2);
  EXPECT_EQ(back.history[2].best_f, 1e-300);
}

TEST(Records, FailedRunRoundTrip) {
  RunRecord r = rec("X", 2, "ps", {{0, kInf}});
  r.status.reset();
  r.error = "boom";
  std::stringstream ss;
  write_record(ss, r);
  const RunRecord back = read_record(ss);
  EXPECT_TRUE(back.failed());
  EXPECT_EQ(back.error, "boom");
}

TEST(Records, MissingKeyIsAnError) {
  std::stringstream ss("# cpsopt run record\nproblem=X\n---\n");
  EXPECT_THROW(read_record(ss), std::runtime_error);
}

TEST(Records, DirectoryLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "cpsopt_records_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  RunRecord a = rec("P", 2, "ps", {{1, 1.0}});
  RunRecord b = rec("P", 2, "unstructured", {{1, 1.0}});
  save_record(dir / record_filename(a), a);
  save_record(dir / record_filename(b), b);
  EXPECT_EQ(load_records(dir).size(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(Matrix, RecordsPerSeedAndFailureCapture) {
  MatrixOptions opts;
  opts.base.max_full_evals = 2000;
  int seen = 0;
  opts.on_record = [&](const RunRecord&) { ++seen; };
  const auto rs = run_matrix({{"BROYDN3D", 10}, {"NOPE", 3}}, {Variant::kPs},
                             {0, 1}, opts);
  ASSERT_EQ(rs.size(), 4u);
  EXPECT_EQ(seen, 4);
  int failed = 0;
  for (const auto& r : rs) failed += r.failed();
  EXPECT_EQ(failed, 2);
  // same seed, same run
  const auto again = run_matrix({{"BROYDN3D", 10}}, {Variant::kPs}, {0}, opts);
  for (const auto& r : rs) {
    if (r.problem == "BROYDN3D" && r.seed == 0) {
      EXPECT_EQ(r.full_equivalent, again[0].full_equivalent);
      EXPECT_EQ(r.final_f, again[0].final_f);
    }
  }
}

TEST(Variants, ParseAndConfigure) {
  EXPECT_EQ(parse_variant_list("ps, ps-models").size(), 2u);
  EXPECT_THROW(parse_variant("fast"), std::invalid_argument);
  EXPECT_TRUE(variant_config(Variant::kModels, SolverConfig{}).use_search_step);
  EXPECT_FALSE(variant_config(Variant::kPs, SolverConfig{}).use_search_step);
}
