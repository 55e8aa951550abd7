#ifndef CPSOPT_STRUCTURE_HPP_
#define CPSOPT_STRUCTURE_HPP_

#include "cpsopt/problem.hpp"

#include <vector>

namespace cpsopt {

using IndexSet = std::vector<int>;

// Subspace structure of a CPS problem.  All indices are 0-based.
//
//   element_sets[j]        elements touching variable j
//   groups[k]              variables sharing an identical element list
//   group_elements[k]      that shared list
//   collections[h]         group indices whose element lists are pairwise
//                          disjoint, so their subspace polls are independent
//   collection_elements[h] union of group_elements over collections[h]
struct StructureAnalysis {
  std::vector<IndexSet> element_sets;
  std::vector<IndexSet> groups;
  std::vector<IndexSet> group_elements;
  std::vector<IndexSet> collections;
  std::vector<IndexSet> collection_elements;

  int r() const { return static_cast<int>(groups.size()); }
  int t() const { return static_cast<int>(collections.size()); }
};

// Per-instance summary statistics.
// `max_element_size` (largest |X_i|) is what the table lists under the
// element-list column; the largest |E_j| is reported separately.
struct StructureStats {
  int n = 0;
  int q = 0;
  int max_element_set = 0;   // max_j |E_j|
  int max_element_size = 0;  // max_i |X_i|
  int t = 0;
  int max_group = 0;  // max_k |I_k|
};

std::vector<IndexSet> invert_structure(const CpsProblem& p);

struct Grouping {
  std::vector<IndexSet> groups;
  std::vector<IndexSet> group_elements;
};

// Merges variables with identical element lists.  Groups are ordered by the
// smallest variable index they contain.
Grouping group_identical(const std::vector<IndexSet>& element_sets);

struct Collections {
  std::vector<IndexSet> collections;
  std::vector<IndexSet> collection_elements;
};

// First-fit greedy: seed a collection with the smallest unassigned group,
// then scan the remaining unassigned groups in ascending order, adding each
// whose element list is disjoint from the collection's union so far.
Collections greedy_collections(const std::vector<IndexSet>& group_elements,
                               int q);

StructureAnalysis analyze(const CpsProblem& p);

StructureStats structure_stats(const CpsProblem& p,
                               const StructureAnalysis& sa);

}  // namespace cpsopt

#endif  // CPSOPT_STRUCTURE_HPP_
