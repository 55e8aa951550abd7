#ifndef CPSOPT_PROBLEMS_HPP_
#define CPSOPT_PROBLEMS_HPP_

#include "cpsopt/problem.hpp"
#include "cpsopt/structure.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace cpsopt {

enum class SizeClass { kSmall, kSmallish, kMedium, kLarge };

SizeClass parse_size_class(const std::string& s);
std::string to_string(SizeClass c);

// Registry entry for one variable-dimension test problem family.
struct ProblemSpecEntry {
  std::string name;
  // Instance dimensions per size class (small, smallish, medium, large).
  std::array<std::vector<int>, 4> dims;
  // Human-readable rule describing every admissible n.
  std::string admissible_rule;
  std::function<bool(int)> admissible;
  std::function<CpsProblem(int)> generator;
  // Straightforward whole-objective implementation, independent of the
  // element decomposition.
  std::function<double(int, const Vector&)> reference;
  // Documented structural statistics as a function of n.
  std::function<StructureStats(int)> documented_stats;

  std::vector<int> all_dims() const;
};

const std::vector<ProblemSpecEntry>& problem_registry();

// Throws std::invalid_argument listing admissible values when the name is
// unknown or n is not admissible for that family.
const ProblemSpecEntry& find_problem(const std::string& name);
CpsProblem instantiate(const std::string& name, int n);
double reference_value(const std::string& name, int n, const Vector& x);

// (name, n) pairs of every registered family for the given size class.
std::vector<std::pair<std::string, int>> problem_set(SizeClass c);

}  // namespace cpsopt

#endif  // CPSOPT_PROBLEMS_HPP_
