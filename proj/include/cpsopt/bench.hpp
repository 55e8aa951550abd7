#ifndef CPSOPT_BENCH_HPP_
#define CPSOPT_BENCH_HPP_

#include "cpsopt/direct_search.hpp"
#include "cpsopt/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cpsopt {

enum class Variant { kUnstructured, kModels, kPs, kPsModels };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);
// Comma separated list, e.g. "ps,ps-models".
std::vector<Variant> parse_variant_list(const std::string& s);
const std::vector<Variant>& all_variants();

// Solver settings for a variant: structured or not, search step on or off.
SolverConfig variant_config(Variant v, const SolverConfig& base);

struct RunRecord {
  std::string problem;
  int n = 0;
  std::string variant;
  std::uint64_t seed = 0;
  // Empty when the run threw; `error` then holds the message.
  std::optional<RunStatus> status;
  double f0 = 0.0;
  double final_f = 0.0;
  std::int64_t full_equivalent = 0;
  std::int64_t full_evals = 0;
  std::int64_t restricted_element_evals = 0;
  double wall_seconds = 0.0;
  std::vector<HistorySample> history;
  std::string error;

  bool failed() const { return !status.has_value(); }
};

RunRecord run_variant(const std::string& problem, int n, Variant v,
                      std::uint64_t seed, const SolverConfig& base);

// Relative-decrease test: f0 - f >= (1 - tau)(f0 - f_star).
bool converged(double f, double f0, double f_star, double tau);
bool converged(const RunRecord& r, double f0, double f_star, double tau);

// First history point passing the test, +inf when none does.
double convergence_cost(const RunRecord& r, double f0, double f_star,
                        double tau);

inline constexpr std::int64_t kDefaultMuF = 100000;

// Smallest best_f over all histories, ignoring samples past mu_f
// full-equivalent evaluations.
double best_known(const std::vector<const RunRecord*>& records,
                  std::int64_t mu_f = kDefaultMuF);

struct ProfileCurve {
  std::string solver;
  std::vector<std::pair<double, double>> points;  // (abscissa, fraction)
};

// Median of the per-seed costs; +inf when the median run did not converge.
double median_cost(std::vector<double> costs);

std::vector<ProfileCurve> performance_profile(
    const std::vector<RunRecord>& records, double tau,
    std::int64_t mu_f = kDefaultMuF);
std::vector<ProfileCurve> data_profile(const std::vector<RunRecord>& records,
                                       double tau,
                                       std::int64_t mu_f = kDefaultMuF);

struct MatrixOptions {
  SolverConfig base;
  int threads = 1;
  // Called after each run, from the worker that finished it.
  std::function<void(const RunRecord&)> on_record;
};

// Default seed counts per size class at desk scale.
int default_seed_count(SizeClass c);
inline constexpr double kDefaultTimeLimitSeconds = 600.0;

std::vector<RunRecord> run_matrix(
    const std::vector<std::pair<std::string, int>>& problems,
    const std::vector<Variant>& variants, const std::vector<std::uint64_t>& seeds,
    const MatrixOptions& opts);

// Text form: key=value lines, a "---" separator, then a two-column history
// table.  Doubles are written in shortest round-trip form.
void write_record(std::ostream& os, const RunRecord& r);
RunRecord read_record(std::istream& is);
void save_record(const std::filesystem::path& file, const RunRecord& r);
RunRecord load_record(const std::filesystem::path& file);
std::string record_filename(const RunRecord& r);
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

void write_profiles(std::ostream& os, const std::vector<ProfileCurve>& curves);

std::string format_double(double v);

}  // namespace cpsopt

#endif  // CPSOPT_BENCH_HPP_
