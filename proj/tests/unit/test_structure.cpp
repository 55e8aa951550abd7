#include "cpsopt/problems.hpp"
#include "cpsopt/structure.hpp"

#include <gtest/gtest.h>

using namespace cpsopt;
using Sets = std::vector<IndexSet>;

// Expected sets below are written 1-based and
// shifted before comparing.
namespace {

Sets shift(Sets s) {
  for (auto& v : s)
    for (int& i : v) --i;
  return s;
}

CpsProblem from_domains(int n, std::vector<std::vector<int>> domains) {
  std::vector<Element> els;
  for (auto& d : domains) els.push_back({d, [](std::span<const double>) { return 0.0; }});
  return CpsProblem("synthetic", n, std::move(els), Vector::Constant(n, -1.0),
                    Vector::Ones(n), Vector::Zero(n));
}

}  // namespace

TEST(Structure, Example5ElementSets) {
  const auto e = invert_structure(instantiate("EXAMPLE5", 5));
  EXPECT_EQ(e, shift({{1, 3}, {1, 2, 3}, {2}, {3, 4, 5}, {3, 4, 5}}));
}

TEST(Structure, Example5Groups) {
  const auto g = group_identical(invert_structure(instantiate("EXAMPLE5", 5)));
  EXPECT_EQ(g.groups, shift({{1}, {2}, {3}, {4, 5}}));
  EXPECT_EQ(g.group_elements, shift({{1, 3}, {1, 2, 3}, {2}, {3, 4, 5}}));
}

TEST(Structure, Example5Collections) {
  const StructureAnalysis sa = analyze(instantiate("EXAMPLE5", 5));
  EXPECT_EQ(sa.collections, shift({{1, 3}, {2}, {4}}));
  EXPECT_EQ(sa.collection_elements, shift({{1, 2, 3}, {1, 2, 3}, {3, 4, 5}}));
  EXPECT_EQ(sa.r(), 4);
  EXPECT_EQ(sa.t(), 3);
}

TEST(Structure, TotallySeparable) {
  const auto p = from_domains(4, {{0}, {1}, {2}, {3}});
  const auto sa = analyze(p);
  for (const auto& e : sa.element_sets) EXPECT_EQ(e.size(), 1u);
  EXPECT_EQ(sa.r(), 4);
  EXPECT_EQ(sa.t(), 1);
}

TEST(Structure, IdenticalListsMergeIntoOneGroup) {
  const auto sa = analyze(from_domains(3, {{0, 1, 2}, {0, 1, 2}}));
  EXPECT_EQ(sa.groups, (Sets{{0, 1, 2}}));
  EXPECT_EQ(sa.t(), 1);
}

TEST(Structure, PairwiseIntersectingGivesSingletonCollections) {
  // every variable touches element 0, so every Y_k contains it
  const auto sa = analyze(from_domains(3, {{0, 1, 2}, {0}, {1}, {2}}));
  EXPECT_EQ(sa.r(), 3);
  EXPECT_EQ(sa.t(), 3);
  for (const auto& c : sa.collections) EXPECT_EQ(c.size(), 1u);
}

TEST(Structure, StatsForDocumentedRows) {
  struct Row { const char* name; int n, q, max_e, t, max_i; };
  const Row rows[] = {{"BROYDN3D", 100, 99, 3, 3, 1},
                      {"POWSING", 20, 5, 4, 1, 4},
                      {"BEALES", 10, 5, 2, 1, 2}};
  for (const auto& r : rows) {
    const CpsProblem p = instantiate(r.name, r.n);
    const StructureStats s = structure_stats(p, analyze(p));
    EXPECT_EQ(s.q, r.q) << r.name;
    EXPECT_EQ(s.max_element_size, r.max_e) << r.name;
    EXPECT_EQ(s.t, r.t) << r.name;
    EXPECT_EQ(s.max_group, r.max_i) << r.name;
  }
}

TEST(Structure, Nzf1SmallInstance) {
  const CpsProblem p = instantiate("NZF1", 13);
  const StructureStats s = structure_stats(p, analyze(p));
  EXPECT_EQ(s.q, 5);
  EXPECT_EQ(s.t, 4);
  EXPECT_EQ(s.max_group, 2);
}

TEST(Structure, CollectionsArePairwiseDisjointAndCoverAllGroups) {
  for (const auto& [name, n] : problem_set(SizeClass::kSmall)) {
    const StructureAnalysis sa = analyze(instantiate(name, n));
    std::vector<int> seen(sa.r(), 0);
    for (const auto& c : sa.collections) {
      std::vector<int> used(instantiate(name, n).q(), 0);
      for (int k : c) {
        ++seen[k];
        for (int i : sa.group_elements[k]) EXPECT_EQ(used[i]++, 0) << name;
      }
    }
    for (int s : seen) EXPECT_EQ(s, 1) << name;
  }
}
