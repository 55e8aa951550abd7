#include "cpsopt/structure.hpp"

#include <algorithm>
#include <numeric>

namespace cpsopt {

std::vector<IndexSet> invert_structure(const CpsProblem& p) {
  std::vector<IndexSet> sets(p.n());
  for (int i = 0; i < p.q(); ++i) {
    for (int j : p.element(i).vars) sets[j].push_back(i);
  }
  // Elements are scanned in ascending order, so each list is already sorted.
  return sets;
}

Grouping group_identical(const std::vector<IndexSet>& element_sets) {
  const int n = static_cast<int>(element_sets.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return element_sets[a] < element_sets[b];
  });

  // group id per variable, assigned over lexicographically equal runs
  std::vector<int> run_of(n, -1);
  std::vector<std::vector<int>> runs;
  for (int pos = 0; pos < n; ++pos) {
    const int j = order[pos];
    if (pos == 0 || element_sets[j] != element_sets[order[pos - 1]]) {
      runs.emplace_back();
    }
    runs.back().push_back(j);
    run_of[j] = static_cast<int>(runs.size()) - 1;
  }

  Grouping out;
  std::vector<int> emitted(runs.size(), -1);
  for (int j = 0; j < n; ++j) {
    const int run = run_of[j];
    if (emitted[run] >= 0) continue;
    emitted[run] = static_cast<int>(out.groups.size());
    IndexSet members = runs[run];
    std::sort(members.begin(), members.end());
    out.groups.push_back(std::move(members));
    out.group_elements.push_back(element_sets[j]);
  }
  return out;
}

Collections greedy_collections(const std::vector<IndexSet>& group_elements,
                               int q) {
  const int r = static_cast<int>(group_elements.size());
  std::vector<char> assigned(r, 0);
  std::vector<char> used(q, 0);
  Collections out;
  int remaining = r;
  int seed = 0;
  while (remaining > 0) {
    while (assigned[seed]) ++seed;
    std::fill(used.begin(), used.end(), 0);
    IndexSet members;
    for (int k = seed; k < r; ++k) {
      if (assigned[k]) continue;
      const auto& ys = group_elements[k];
      const bool disjoint =
          std::none_of(ys.begin(), ys.end(), [&](int i) { return used[i]; });
      if (!disjoint) continue;
      for (int i : ys) used[i] = 1;
      assigned[k] = 1;
      --remaining;
      members.push_back(k);
    }
    IndexSet elements;
    for (int i = 0; i < q; ++i) {
      if (used[i]) elements.push_back(i);
    }
    out.collections.push_back(std::move(members));
    out.collection_elements.push_back(std::move(elements));
  }
  return out;
}

StructureAnalysis analyze(const CpsProblem& p) {
  StructureAnalysis sa;
  sa.element_sets = invert_structure(p);
  auto grouping = group_identical(sa.element_sets);
  sa.groups = std::move(grouping.groups);
  sa.group_elements = std::move(grouping.group_elements);
  auto cols = greedy_collections(sa.group_elements, p.q());
  sa.collections = std::move(cols.collections);
  sa.collection_elements = std::move(cols.collection_elements);
  return sa;
}

StructureStats structure_stats(const CpsProblem& p,
                               const StructureAnalysis& sa) {
  StructureStats s;
  s.n = p.n();
  s.q = p.q();
  for (const auto& e : sa.element_sets) {
    s.max_element_set = std::max(s.max_element_set, static_cast<int>(e.size()));
  }
  for (const auto& el : p.elements()) {
    s.max_element_size =
        std::max(s.max_element_size, static_cast<int>(el.vars.size()));
  }
  s.t = sa.t();
  for (const auto& g : sa.groups) {
    s.max_group = std::max(s.max_group, static_cast<int>(g.size()));
  }
  return s;
}

}  // namespace cpsopt
