#include "cpsopt/bench.hpp"
#include "cpsopt/direct_search.hpp"
#include "cpsopt/poly_model.hpp"
#include "cpsopt/problems.hpp"
#include "cpsopt/structure.hpp"
#include "cpsopt/trust_region.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace cpsopt;

namespace {

py::dict stats_dict(const StructureStats& s) {
  py::dict d;
  d["n"] = s.n;
  d["q"] = s.q;
  d["max_element_set"] = s.max_element_set;
  d["max_element_size"] = s.max_element_size;
  d["t"] = s.t;
  d["max_group"] = s.max_group;
  return d;
}

std::vector<std::pair<std::int64_t, double>> history_pairs(
    const std::vector<HistorySample>& h) {
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(h.size());
  for (const auto& s : h) out.emplace_back(s.evals, s.best_f);
  return out;
}

SolverConfig make_config(double epsilon, double alpha0, double gamma,
                         double beta, double eta, double iota, int n2,
                         std::int64_t max_evals, std::uint64_t seed,
                         const std::string& degree, const std::string& fit,
                         std::optional<double> k_ill, double time_limit) {
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  cfg.alpha0 = alpha0;
  cfg.gamma = gamma;
  cfg.beta = beta;
  cfg.eta = eta;
  cfg.iota = iota;
  cfg.n2 = n2;
  cfg.max_full_evals = max_evals;
  cfg.seed = seed;
  cfg.time_limit_seconds = time_limit;
  cfg.search.degree = parse_degree_class(degree);
  cfg.search.fit = parse_fit_mode(fit);
  cfg.search.k_ill = k_ill;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pattern search for coordinate partially separable problems";

  m.def("list_problems", [] {
    std::vector<std::string> names;
    for (const auto& e : problem_registry()) names.push_back(e.name);
    return names;
  });

  m.def("problem_dims", [](const std::string& name) {
    const auto& e = find_problem(name);
    py::dict d;
    const char* keys[] = {"small", "smallish", "medium", "large"};
    for (int i = 0; i < 4; ++i) d[keys[i]] = e.dims[i];
    return d;
  }, py::arg("name"));

  m.def("problem_set", [](const std::string& set) {
    return problem_set(parse_size_class(set));
  }, py::arg("set"));

  m.def("problem_info", [](const std::string& name, int n) {
    const CpsProblem p = instantiate(name, n);
    py::dict d;
    d["name"] = p.name();
    d["n"] = p.n();
    d["q"] = p.q();
    d["x0"] = Vector(p.x0());
    d["lower"] = Vector(p.lower());
    d["upper"] = Vector(p.upper());
    std::vector<std::vector<int>> vars;
    for (const auto& el : p.elements()) vars.push_back(el.vars);
    d["element_vars"] = vars;
    return d;
  }, py::arg("name"), py::arg("n"));

  m.def("evaluate", [](const std::string& name, int n, const Vector& x) {
    const CpsProblem p = instantiate(name, n);
    if (x.size() != p.n()) throw py::value_error("x has the wrong length");
    double f = 0.0;
    for (int i = 0; i < p.q(); ++i) f += p.element_value(i, x);
    return f;
  }, py::arg("name"), py::arg("n"), py::arg("x"),
     "Objective as the sum of its element functions");

  m.def("reference_value", &reference_value, py::arg("name"), py::arg("n"),
        py::arg("x"), "Objective from the whole-function implementation");

  m.def("structure_stats", [](const std::string& name, int n) {
    const CpsProblem p = instantiate(name, n);
    return stats_dict(structure_stats(p, analyze(p)));
  }, py::arg("name"), py::arg("n"));

  m.def("documented_stats", [](const std::string& name, int n) {
    return stats_dict(find_problem(name).documented_stats(n));
  }, py::arg("name"), py::arg("n"));

  m.def("analyze", [](const std::string& name, int n) {
    const CpsProblem p = instantiate(name, n);
    const StructureAnalysis sa = analyze(p);
    py::dict d;
    d["element_sets"] = sa.element_sets;
    d["groups"] = sa.groups;
    d["group_elements"] = sa.group_elements;
    d["collections"] = sa.collections;
    d["collection_elements"] = sa.collection_elements;
    return d;
  }, py::arg("name"), py::arg("n"), "Structure analysis with 0-based indices");

  m.def("solve", [](const std::string& problem, int n, const std::string& variant,
                    std::uint64_t seed, double epsilon, double alpha0,
                    double gamma, double beta, double eta, double iota, int n2,
                    std::int64_t max_evals, const std::string& degree,
                    const std::string& fit, std::optional<double> k_ill,
                    double time_limit) {
    const Variant v = parse_variant(variant);
    SolverConfig cfg = make_config(epsilon, alpha0, gamma, beta, eta, iota, n2,
                                   max_evals, seed, degree, fit, k_ill,
                                   time_limit);
    const CpsProblem p = instantiate(problem, n);
    cfg = variant_config(v, cfg);
    SolveResult r;
    {
      py::gil_scoped_release release;
      r = (v == Variant::kPs || v == Variant::kPsModels)
              ? solve_structured(p, cfg)
              : solve_unstructured(p, cfg);
    }
    py::dict d;
    d["x"] = r.x;
    d["f"] = r.f;
    d["status"] = to_string(r.status);
    d["full_equivalent"] = r.full_equivalent;
    d["full_evals"] = r.full_evals;
    d["restricted_element_evals"] = r.restricted_element_evals;
    d["history"] = history_pairs(r.history);
    d["iterations"] = r.iterations;
    d["second_passes"] = r.second_passes;
    d["search_steps"] = r.search_steps;
    d["search_successes"] = r.search_successes;
    d["regularization_warning"] = r.regularization_warning;
    d["final_stepsize"] = r.final_stepsize;
    d["wall_seconds"] = r.wall_seconds;
    return d;
  },
  py::arg("problem"), py::arg("n"), py::arg("variant") = "ps",
  py::arg("seed") = 0, py::arg("epsilon") = 1e-4, py::arg("alpha0") = 1.0,
  py::arg("gamma") = 2.0, py::arg("beta") = 0.5, py::arg("eta") = 1e-4,
  py::arg("iota") = 1.2550, py::arg("n2") = 0, py::arg("max_evals") = 100000,
  py::arg("degree") = "quad", py::arg("fit") = "minnorm",
  py::arg("k_ill") = py::none(),
  py::arg("time_limit") = std::numeric_limits<double>::infinity());

  m.def("converged", py::overload_cast<double, double, double, double>(&converged),
        py::arg("f"), py::arg("f0"), py::arg("f_star"), py::arg("tau"));

  py::class_<RunRecord>(m, "RunRecord")
      .def(py::init<>())
      .def_readwrite("problem", &RunRecord::problem)
      .def_readwrite("n", &RunRecord::n)
      .def_readwrite("variant", &RunRecord::variant)
      .def_readwrite("seed", &RunRecord::seed)
      .def_property("status",
          [](const RunRecord& r) -> std::string {
            return r.status ? to_string(*r.status) : "failed";
          },
          [](RunRecord& r, const std::string& s) {
            if (s == "failed") r.status.reset();
            else r.status = parse_run_status(s);
          })
      .def_readwrite("f0", &RunRecord::f0)
      .def_readwrite("final_f", &RunRecord::final_f)
      .def_readwrite("full_equivalent", &RunRecord::full_equivalent)
      .def_readwrite("wall_seconds", &RunRecord::wall_seconds)
      .def_readwrite("error", &RunRecord::error)
      .def_property("history",
          [](const RunRecord& r) { return history_pairs(r.history); },
          [](RunRecord& r, const std::vector<std::pair<std::int64_t, double>>& h) {
            r.history.clear();
            for (const auto& [e, f] : h) r.history.push_back({e, f});
          })
      .def("__repr__", [](const RunRecord& r) {
        return "<RunRecord " + r.problem + " n=" + std::to_string(r.n) + " " +
               r.variant + " seed=" + std::to_string(r.seed) + ">";
      });

  m.def("run_variant", [](const std::string& problem, int n,
                          const std::string& variant, std::uint64_t seed,
                          std::int64_t max_evals) {
    SolverConfig cfg;
    cfg.max_full_evals = max_evals;
    py::gil_scoped_release release;
    return run_variant(problem, n, parse_variant(variant), seed, cfg);
  }, py::arg("problem"), py::arg("n"), py::arg("variant"), py::arg("seed") = 0,
     py::arg("max_evals") = 100000);

  m.def("load_records", [](const std::string& dir) { return load_records(dir); },
        py::arg("dir"));
  m.def("save_record", [](const std::string& file, const RunRecord& r) {
    save_record(file, r);
  }, py::arg("file"), py::arg("record"));

  auto curves = [](const std::vector<ProfileCurve>& cs) {
    py::dict d;
    for (const auto& c : cs) d[py::str(c.solver)] = c.points;
    return d;
  };
  m.def("performance_profile",
        [curves](const std::vector<RunRecord>& recs, double tau) {
          return curves(performance_profile(recs, tau));
        },
        py::arg("records"), py::arg("tau") = 1e-4);
  m.def("data_profile",
        [curves](const std::vector<RunRecord>& recs, double tau) {
          return curves(data_profile(recs, tau));
        },
        py::arg("records"), py::arg("tau") = 1e-4);

  m.def("fit_quadratic", [](const Matrix& points, const Vector& values,
                            const std::string& degree, const std::string& fit,
                            std::optional<double> k_ill) {
    const auto r = fit_model(points, values, parse_degree_class(degree),
                             parse_fit_mode(fit), k_ill.value_or(kNoConditioningCap));
    py::dict d;
    d["c"] = r.model.c;
    d["g"] = r.model.g;
    d["h"] = r.model.h;
    d["rank"] = r.rank;
    d["residual"] = r.residual;
    return d;
  }, py::arg("points"), py::arg("values"), py::arg("degree") = "quad",
     py::arg("fit") = "minnorm", py::arg("k_ill") = py::none(),
     "Interpolation model around the origin; points are rows");

  m.def("update_radius", [](double delta, double rho, double step_norm) {
    TrustRegion tr;
    tr.delta = delta;
    return update_radius(tr, rho, step_norm).delta;
  }, py::arg("delta"), py::arg("rho"), py::arg("step_norm"));
}
