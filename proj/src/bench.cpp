#include "cpsopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

namespace cpsopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  // from_chars does not take a leading '+'.
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("not a number: '" + t + "'");
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& s) {
  const std::string t = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("not an integer: '" + t + "'");
  }
  return v;
}

std::string problem_key(const RunRecord& r) {
  return r.problem + "/" + std::to_string(r.n);
}

// Per (solver, problem) median costs plus the problem dimensions, using the
// best value over all solvers as f_star.
struct CostTable {
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  std::vector<int> dims;
  std::vector<std::vector<double>> cost;  // [solver][problem]
};

CostTable cost_table(const std::vector<RunRecord>& records, double tau,
                     std::int64_t mu_f) {
  std::map<std::string, std::vector<const RunRecord*>> by_problem;
  std::set<std::string> solver_set;
  for (const auto& r : records) {
    by_problem[problem_key(r)].push_back(&r);
    solver_set.insert(r.variant);
  }
  CostTable t;
  t.solvers.assign(solver_set.begin(), solver_set.end());
  t.cost.assign(t.solvers.size(), {});
  for (const auto& [key, recs] : by_problem) {
    t.problems.push_back(key);
    t.dims.push_back(recs.front()->n);
    const double f_star = best_known(recs, mu_f);
    double f0 = recs.front()->f0;
    for (const RunRecord* r : recs) {
      if (!r->failed()) {
        f0 = r->f0;
        break;
      }
    }
    for (std::size_t s = 0; s < t.solvers.size(); ++s) {
      std::vector<double> costs;
      for (const RunRecord* r : recs) {
        if (r->variant != t.solvers[s]) continue;
        double c = convergence_cost(*r, f0, f_star, tau);
        if (c > static_cast<double>(mu_f)) c = kInf;
        costs.push_back(c);
      }
      t.cost[s].push_back(costs.empty() ? kInf : median_cost(std::move(costs)));
    }
  }
  return t;
}

// Empirical distribution of `values` over `total` problems as breakpoints,
// starting at (start, fraction <= start).  Non-finite values never count.
std::vector<std::pair<double, double>> step_curve(std::vector<double> values,
                                                  std::size_t total,
                                                  double start) {
  std::vector<std::pair<double, double>> pts;
  std::sort(values.begin(), values.end());
  const double denom = total == 0 ? 1.0 : static_cast<double>(total);
  std::size_t i = 0;
  while (i < values.size() && values[i] <= start) ++i;
  pts.emplace_back(start, static_cast<double>(i) / denom);
  while (i < values.size() && std::isfinite(values[i])) {
    const double v = values[i];
    while (i < values.size() && values[i] == v) ++i;
    pts.emplace_back(v, static_cast<double>(i) / denom);
  }
  return pts;
}

// Extends every curve flat to the common right end of the abscissa.
void close_curves(std::vector<ProfileCurve>& curves) {
  double right = 0.0;
  for (const auto& c : curves) right = std::max(right, c.points.back().first);
  for (auto& c : curves) {
    if (c.points.back().first < right) {
      c.points.emplace_back(right, c.points.back().second);
    }
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kUnstructured: return "unstructured";
    case Variant::kModels: return "models";
    case Variant::kPs: return "ps";
    case Variant::kPsModels: return "ps-models";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  for (Variant v : all_variants()) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument(
      "unknown variant '" + s + "' (expected unstructured, models, ps or ps-models)");
}

std::vector<Variant> parse_variant_list(const std::string& s) {
  std::vector<Variant> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_variant(item));
  }
  if (out.empty()) throw std::invalid_argument("empty variant list");
  return out;
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v = {Variant::kUnstructured,
                                         Variant::kModels, Variant::kPs,
                                         Variant::kPsModels};
  return v;
}

SolverConfig variant_config(Variant v, const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.use_search_step = v == Variant::kModels || v == Variant::kPsModels;
  return cfg;
}

RunRecord run_variant(const std::string& problem, int n, Variant v,
                      std::uint64_t seed, const SolverConfig& base) {
  RunRecord rec;
  rec.problem = problem;
  rec.n = n;
  rec.variant = to_string(v);
  rec.seed = seed;
  try {
    const CpsProblem p = instantiate(problem, n);
    SolverConfig cfg = variant_config(v, base);
    cfg.seed = seed;
    double f0 = 0.0;
    for (int i = 0; i < p.q(); ++i) f0 += p.element_value(i, p.x0());
    rec.f0 = f0;
    const bool structured = v == Variant::kPs || v == Variant::kPsModels;
    const SolveResult res =
        structured ? solve_structured(p, cfg) : solve_unstructured(p, cfg);
    rec.status = res.status;
    rec.final_f = res.f;
    rec.full_equivalent = res.full_equivalent;
    rec.full_evals = res.full_evals;
    rec.restricted_element_evals = res.restricted_element_evals;
    rec.wall_seconds = res.wall_seconds;
    rec.history = res.history;
  } catch (const std::exception& e) {
    rec.status.reset();
    rec.error = e.what();
    rec.final_f = kInf;
  }
  return rec;
}

bool converged(double f, double f0, double f_star, double tau) {
  if (f0 == f_star) return f <= f0;
  return f0 - f >= (1.0 - tau) * (f0 - f_star);
}

bool converged(const RunRecord& r, double f0, double f_star, double tau) {
  double best = r.final_f;
  for (const auto& h : r.history) best = std::min(best, h.best_f);
  return converged(best, f0, f_star, tau);
}

double convergence_cost(const RunRecord& r, double f0, double f_star,
                        double tau) {
  for (const auto& h : r.history) {
    if (converged(h.best_f, f0, f_star, tau)) {
      return static_cast<double>(h.evals);
    }
  }
  return kInf;
}

double best_known(const std::vector<const RunRecord*>& records,
                  std::int64_t mu_f) {
  if (records.empty()) throw std::invalid_argument("best_known: no records");
  double best = kInf;
  for (const RunRecord* r : records) {
    for (const auto& h : r->history) {
      if (h.evals > mu_f) break;
      best = std::min(best, h.best_f);
    }
  }
  return best;
}

double median_cost(std::vector<double> costs) {
  if (costs.empty()) return kInf;
  std::sort(costs.begin(), costs.end());
  const std::size_t m = costs.size() / 2;
  if (costs.size() % 2 == 1) return costs[m];
  return 0.5 * (costs[m - 1] + costs[m]);
}

std::vector<ProfileCurve> performance_profile(
    const std::vector<RunRecord>& records, double tau, std::int64_t mu_f) {
  const CostTable t = cost_table(records, tau, mu_f);
  std::vector<ProfileCurve> curves;
  for (std::size_t s = 0; s < t.solvers.size(); ++s) {
    std::vector<double> ratios;
    for (std::size_t p = 0; p < t.problems.size(); ++p) {
      double best = kInf;
      for (std::size_t o = 0; o < t.solvers.size(); ++o) {
        best = std::min(best, t.cost[o][p]);
      }
      const double c = t.cost[s][p];
      // A zero best cost cannot arise from real histories (the start costs
      // one evaluation); guard anyway.
      if (!std::isfinite(c)) ratios.push_back(kInf);
      else ratios.push_back(best > 0.0 ? c / best : 1.0);
    }
    curves.push_back({t.solvers[s], step_curve(ratios, t.problems.size(), 1.0)});
  }
  if (!curves.empty()) close_curves(curves);
  return curves;
}

std::vector<ProfileCurve> data_profile(const std::vector<RunRecord>& records,
                                       double tau, std::int64_t mu_f) {
  const CostTable t = cost_table(records, tau, mu_f);
  std::vector<ProfileCurve> curves;
  for (std::size_t s = 0; s < t.solvers.size(); ++s) {
    std::vector<double> nu;
    for (std::size_t p = 0; p < t.problems.size(); ++p) {
      nu.push_back(t.cost[s][p] / (t.dims[p] + 1.0));
    }
    curves.push_back({t.solvers[s], step_curve(nu, t.problems.size(), 0.0)});
  }
  if (!curves.empty()) close_curves(curves);
  return curves;
}

int default_seed_count(SizeClass c) {
  switch (c) {
    case SizeClass::kSmall: return 5;
    case SizeClass::kSmallish: return 3;
    case SizeClass::kMedium: return 1;
    case SizeClass::kLarge: return 0;
  }
  return 1;
}

std::vector<RunRecord> run_matrix(
    const std::vector<std::pair<std::string, int>>& problems,
    const std::vector<Variant>& variants, const std::vector<std::uint64_t>& seeds,
    const MatrixOptions& opts) {
  struct Job {
    std::string problem;
    int n;
    Variant v;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& [name, n] : problems) {
    for (Variant v : variants) {
      for (std::uint64_t s : seeds) jobs.push_back({name, n, v, s});
    }
  }
  std::vector<RunRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex cb_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      out[i] = run_variant(j.problem, j.n, j.v, j.seed, opts.base);
      if (opts.on_record) {
        std::lock_guard<std::mutex> lock(cb_mutex);
        opts.on_record(out[i]);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads,
                                                static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

void write_record(std::ostream& os, const RunRecord& r) {
  os << "# cpsopt run record\n";
  os << "problem=" << r.problem << '\n';
  os << "n=" << r.n << '\n';
  os << "variant=" << r.variant << '\n';
  os << "seed=" << r.seed << '\n';
  os << "status=" << (r.status ? to_string(*r.status) : "failed") << '\n';
  os << "f0=" << format_double(r.f0) << '\n';
  os << "final_f=" << format_double(r.final_f) << '\n';
  os << "full_equivalent=" << r.full_equivalent << '\n';
  os << "full_evals=" << r.full_evals << '\n';
  os << "restricted_element_evals=" << r.restricted_element_evals << '\n';
  os << "wall_seconds=" << format_double(r.wall_seconds) << '\n';
  if (!r.error.empty()) {
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    os << "error=" << msg << '\n';
  }
  os << "---\n";
  os << "full_equiv_evals best_f\n";
  for (const auto& h : r.history) {
    os << h.evals << ' ' << format_double(h.best_f) << '\n';
  }
}

RunRecord read_record(std::istream& is) {
  RunRecord r;
  std::string line;
  bool in_table = false;
  bool header_seen = false;
  std::set<std::string> keys;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!in_table) {
      if (line == "---") {
        in_table = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("malformed record line: '" + line + "'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      keys.insert(key);
      if (key == "problem") r.problem = val;
      else if (key == "n") r.n = parse_int<int>(val);
      else if (key == "variant") r.variant = val;
      else if (key == "seed") r.seed = parse_int<std::uint64_t>(val);
      else if (key == "status") {
        if (val == "failed") r.status.reset();
        else r.status = parse_run_status(val);
      } else if (key == "f0") r.f0 = parse_double(val);
      else if (key == "final_f") r.final_f = parse_double(val);
      else if (key == "full_equivalent") r.full_equivalent = parse_int<std::int64_t>(val);
      else if (key == "full_evals") r.full_evals = parse_int<std::int64_t>(val);
      else if (key == "restricted_element_evals")
        r.restricted_element_evals = parse_int<std::int64_t>(val);
      else if (key == "wall_seconds") r.wall_seconds = parse_double(val);
      else if (key == "error") r.error = val;
      // Unknown keys are tolerated so newer files stay readable.
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("full_equiv_evals", 0) == 0) continue;
    }
    std::istringstream row(line);
    std::string a, b;
    if (!(row >> a >> b)) {
      throw std::runtime_error("malformed history row: '" + line + "'");
    }
    r.history.push_back({parse_int<std::int64_t>(a), parse_double(b)});
  }
  for (const char* k : {"problem", "n", "variant", "seed", "status"}) {
    if (!keys.count(k)) {
      throw std::runtime_error(std::string("record is missing key '") + k + "'");
    }
  }
  return r;
}

void save_record(const std::filesystem::path& file, const RunRecord& r) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  write_record(os, r);
}

RunRecord load_record(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  try {
    return read_record(is);
  } catch (const std::exception& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
}

std::string record_filename(const RunRecord& r) {
  return r.problem + "_" + std::to_string(r.n) + "_" + r.variant + "_s" +
         std::to_string(r.seed) + ".run";
}

std::vector<RunRecord> load_records(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".run") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_record(f));
  return out;
}

void write_profiles(std::ostream& os, const std::vector<ProfileCurve>& curves) {
  bool first = true;
  for (const auto& c : curves) {
    if (!first) os << '\n';
    first = false;
    os << "# solver=" << c.solver << '\n';
    for (const auto& [x, y] : c.points) {
      os << format_double(x) << ' ' << format_double(y) << '\n';
    }
  }
}

}  // namespace cpsopt
