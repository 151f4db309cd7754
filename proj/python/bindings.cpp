// Python bindings. Structured results cross as the same JSON the CLI writes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdist/analyzer.hpp"
#include "mdist/dimension.hpp"
#include "mdist/errors.hpp"
#include "mdist/io.hpp"
#include "mdist/oracle.hpp"

namespace py = pybind11;
using namespace mdist;

namespace {

GAdditiveFamily family(const ShiftSpec& s, std::int64_t mod, std::int64_t summod, const std::vector<std::string>& fns) {
  if (fns.empty()) return pair_family(s.base, mod, summod);
  std::vector<GAdditiveFunction> fs;
  if (mod >= 1) fs.push_back(GAdditiveFunction::identity(s.base, mod));
  if (summod >= 1) fs.push_back(GAdditiveFunction::sum_digits(s.base, summod));
  for (const auto& f : fns) fs.push_back(io::parse_function(f));
  return GAdditiveFamily(std::move(fs));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Residue-class distribution of digit-restricted integer sets";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NotTransitiveError>(m, "NotTransitiveError", PyExc_RuntimeError);

  m.def("normalize_shift", [](const std::string& spec) { return io::shift_json(io::parse_shift(spec)); });

  m.def("cover", [](const std::string& spec) { return io::render_cover(fischer_cover(build_cover(io::parse_shift(spec)))); });

  m.def(
      "analyze",
      [](const std::string& spec, std::int64_t mod, std::int64_t summod, const std::vector<std::string>& fns, bool msb) {
        const auto s = io::parse_shift(spec);
        return io::report_json(analyze(s, family(s, mod, summod, fns)), {msb});
      },
      py::arg("spec"), py::arg("mod") = 0, py::arg("summod") = 0, py::arg("functions") = std::vector<std::string>{},
      py::arg("msb") = false);

  m.def(
      "census",
      [](const std::string& spec, std::int64_t mod, std::int64_t summod, int m, unsigned threads) {
        const auto s = io::parse_shift(spec);
        py::gil_scoped_release release;
        return io::census_json(census_horizon(s, pair_family(s.base, mod, summod), m, threads));
      },
      py::arg("spec"), py::arg("mod"), py::arg("summod") = 0, py::arg("m"), py::arg("threads") = 0);

  m.def(
      "verify",
      [](const std::string& spec, std::int64_t mod, std::int64_t summod, int m, double tol, unsigned threads) {
        const auto s = io::parse_shift(spec);
        const auto fam = pair_family(s.base, mod, summod);
        const auto rep = analyze(s, fam);
        py::gil_scoped_release release;
        const auto table = census_horizon(s, fam, m, threads);
        const auto cmp = compare(rep, table, tol);
        return io::comparison_json(rep, table, cmp, convergence_table(s, fam, rep, m, threads));
      },
      py::arg("spec"), py::arg("mod"), py::arg("summod") = 0, py::arg("m"), py::arg("tol") = 0.02,
      py::arg("threads") = 0);

  m.def("entropy", [](const std::string& spec) { return entropy(build_cover(io::parse_shift(spec))); });

  m.def(
      "dimension",
      [](const std::string& spec, std::optional<std::pair<std::int64_t, std::int64_t>> progression, int m_max) {
        const auto s = io::parse_shift(spec);
        if (!progression) return io::dimension_json(mass_dimension(s, m_max), std::nullopt);
        const Progression p{progression->first, progression->second};
        const auto exact = mass_dimension(s, 1);
        auto est = empirical_dimension(s, p, m_max > 0 ? m_max : mass_dimension(s).points.back().m);
        est.eigenvalue = exact.eigenvalue;
        est.exact = exact.exact;
        return io::dimension_json(est, transversality_check(s, p));
      },
      py::arg("spec"), py::arg("progression") = std::nullopt, py::arg("m_max") = 0);

  m.def(
      "enumerate",
      [](const std::string& spec, std::uint64_t limit) { return enumerate_set(io::parse_shift(spec), limit); },
      py::arg("spec"), py::arg("limit"));
}
