#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hou/engine.hpp"
#include "hou/errors.hpp"
#include "hou/fingerprint.hpp"
#include "hou/index_check.hpp"
#include "hou/normalize.hpp"
#include "hou/oracles.hpp"
#include "hou/problem_io.hpp"

namespace py = pybind11;

namespace {

using ProblemPtr = std::shared_ptr<hou::ProblemFile>;

struct SolveResult {
  std::vector<std::map<std::string, std::string>> unifiers;
  std::string status;
  std::uint64_t steps = 0;
  std::uint64_t pulls = 0;
};

hou::Limits limits_from(const std::vector<std::uint32_t>& v) {
  if (v.size() != 5) throw py::value_error("limits must have five entries: total, func_proj, elim, imit, ident");
  return hou::Limits{v[0], v[1], v[2], v[3], v[4]};
}

hou::Variant variant_from(const std::string& name) {
  if (name == "complete") return hou::Variant::Complete;
  if (name == "pragmatic") return hou::Variant::Pragmatic;
  throw py::value_error("variant must be 'complete' or 'pragmatic'");
}

// Sorted "name -> image" pairs of one printed unifier.
std::map<std::string, std::string> unifier_map(const hou::Substitution& sigma, const hou::ProblemFile& pf) {
  std::map<std::string, std::string> out;
  hou::AuxNames aux;
  for (std::size_t k = 0; k < pf.sig.vars.size(); ++k) {
    const hou::Term* img = sigma.lookup(pf.sig.vars[k].var_id());
    if (img) out[pf.sig.var_names[k]] = hou::print_term(*img, pf.sig, aux);
  }
  return out;
}

SolveResult run_solve(const ProblemPtr& pf, const std::string& variant, std::optional<std::vector<std::string>> oracles,
                      const std::vector<std::uint32_t>& limits, std::uint64_t max_steps, std::size_t max_unifiers,
                      bool check) {
  hou::EngineConfig cfg;
  cfg.variant = variant_from(variant);
  if (oracles) cfg.oracles = *oracles;
  for (const std::string& n : cfg.oracles) hou::make_oracle(n);
  cfg.limits = limits_from(limits);
  cfg.max_steps = max_steps;
  cfg.first_fresh = static_cast<hou::VarId>(pf->sig.vars.size());
  SolveResult r;
  {
    py::gil_scoped_release nogil;
    hou::UnifierStream stream = hou::solve(pf->goals, cfg);
    while (r.unifiers.size() < max_unifiers) {
      std::optional<hou::Substitution> u = stream.next_unifier();
      if (!u) break;
      if (check && !hou::verify_unifier(pf->goals, *u)) throw hou::InvalidState("engine emitted a non-unifier");
      r.unifiers.push_back(unifier_map(*u, *pf));
    }
    // "running" when max_unifiers stopped the search early.
    r.status = hou::status_name(stream.status());
    r.steps = stream.stats().steps;
    r.pulls = stream.pulls();
  }
  return r;
}

std::string join_unifier(const std::map<std::string, std::string>& u) {
  if (u.empty()) return "identity\n";
  std::string text;
  for (const auto& [name, img] : u) text += name + " -> " + img + "\n";
  return text;
}

std::string const_namer(const hou::ProblemFile& pf, hou::SymbolId id) {
  return id < pf.sig.const_names.size() ? pf.sig.const_names[id] : "c" + std::to_string(id);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Higher-order unification with oracles and fingerprint indexing";

  static py::exception<hou::Error> error(m, "HouError");
  static py::exception<hou::ParseError> parse_error(m, "ParseError", error.ptr());
  static py::exception<hou::DeclError> decl_error(m, "DeclError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const hou::ParseError& e) {
      py::object exc = py::reinterpret_borrow<py::object>(parse_error.ptr())(e.what());
      exc.attr("line") = e.line();
      exc.attr("column") = e.column();
      PyErr_SetObject(parse_error.ptr(), exc.ptr());
    } catch (const hou::DeclError& e) {
      py::object exc = py::reinterpret_borrow<py::object>(decl_error.ptr())(e.what());
      exc.attr("line") = e.line();
      exc.attr("column") = e.column();
      PyErr_SetObject(decl_error.ptr(), exc.ptr());
    } catch (const hou::IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const hou::Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::class_<hou::ProblemFile, std::shared_ptr<hou::ProblemFile>>(m, "Problem")
      .def_static(
          "parse", [](const std::string& text) { return std::make_shared<hou::ProblemFile>(hou::parse_problem(text)); },
          py::arg("text"))
      .def_static(
          "read", [](const std::string& path) { return std::make_shared<hou::ProblemFile>(hou::read_problem_file(path)); },
          py::arg("path"))
      .def_property_readonly("variables", [](const hou::ProblemFile& pf) { return pf.sig.var_names; })
      .def_property_readonly("constants", [](const hou::ProblemFile& pf) { return pf.sig.const_names; })
      .def_property_readonly("goals",
                             [](const hou::ProblemFile& pf) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const hou::Constraint& c : pf.goals)
                                 out.emplace_back(hou::print_term(c.lhs, pf.sig), hou::print_term(c.rhs, pf.sig));
                               return out;
                             })
      .def_property_readonly("terms",
                             [](const hou::ProblemFile& pf) {
                               std::vector<std::string> out;
                               for (const hou::Term& t : pf.terms) out.push_back(hou::print_term(t, pf.sig));
                               return out;
                             })
      .def("type_of",
           [](const hou::ProblemFile& pf, const std::string& term) {
             return hou::print_type(hou::parse_term(term, pf.sig).type(), pf.sig);
           })
      .def("normalize",
           [](const hou::ProblemFile& pf, const std::string& term) {
             return hou::print_term(hou::eta_long_beta_normal(hou::parse_term(term, pf.sig)), pf.sig);
           })
      .def("verify",
           [](const hou::ProblemFile& pf, const std::map<std::string, std::string>& unifier) {
             return hou::verify_unifier(pf.goals, hou::parse_unifier(join_unifier(unifier), pf));
           })
      .def("__str__", [](const hou::ProblemFile& pf) { return hou::print_problem(pf); });

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("unifiers", &SolveResult::unifiers)
      .def_readonly("status", &SolveResult::status)
      .def_readonly("steps", &SolveResult::steps)
      .def_readonly("pulls", &SolveResult::pulls)
      .def("__repr__", [](const SolveResult& r) {
        return "SolveResult(status='" + r.status + "', unifiers=" + std::to_string(r.unifiers.size()) +
               ", steps=" + std::to_string(r.steps) + ")";
      });

  m.def("solve", &run_solve, py::arg("problem"), py::arg("variant") = "pragmatic", py::arg("oracles") = py::none(),
        py::arg("limits") = std::vector<std::uint32_t>{4, 2, 2, 2, 2}, py::arg("max_steps") = 100000,
        py::arg("max_unifiers") = 1, py::arg("verify") = true);

  m.def("oracle_names", &hou::oracle_names);

  m.def(
      "fingerprint",
      [](const ProblemPtr& pf, const std::string& term, const std::string& positions) {
        hou::Fingerprint fp = hou::fp_ho(hou::parse_term(term, pf->sig), hou::parse_positions(positions));
        return hou::format_fingerprint(fp, [&](hou::SymbolId id) { return const_namer(*pf, id); });
      },
      py::arg("problem"), py::arg("term"), py::arg("positions") = "e,1,2,1.1,1.2,2.1");

  // Candidates per query of an index file, in query order.
  m.def(
      "index_candidates",
      [](const ProblemPtr& pf, const std::string& positions) {
        hou::FingerprintIndex index(hou::parse_positions(positions));
        for (std::size_t i = 0; i < pf->terms.size(); ++i) index.insert(i, pf->terms[i]);
        std::vector<std::vector<std::size_t>> out;
        for (const hou::IndexQuery& q : pf->queries)
          out.push_back(q.matching ? index.retrieve_matching(q.term) : index.retrieve_unifiable(q.term));
        return out;
      },
      py::arg("problem"), py::arg("positions") = "e,1,2,1.1,1.2,2.1");

  m.def(
      "confirm",
      [](const ProblemPtr& pf, std::size_t query, std::size_t term, std::uint64_t max_steps) {
        if (query >= pf->queries.size() || term >= pf->terms.size()) throw py::index_error("no such query or term");
        hou::EngineConfig cfg;
        cfg.max_steps = max_steps;
        const hou::IndexQuery& q = pf->queries[query];
        hou::Confirmation c;
        {
          py::gil_scoped_release nogil;
          c = q.matching ? hou::confirm_matching(q.term, pf->terms[term], cfg)
                         : hou::confirm_unifiable(q.term, pf->terms[term], cfg);
        }
        return std::string(hou::confirmation_name(c));
      },
      py::arg("problem"), py::arg("query"), py::arg("term"), py::arg("max_steps") = 20000);
}
