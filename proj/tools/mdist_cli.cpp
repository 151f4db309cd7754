// mdist: residue-class distribution of digit-restricted integer sets.
//
// Exit codes: 0 success or pass, 1 verification failed, 2 unsupported input,
// 3 malformed input.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mdist/analyzer.hpp"
#include "mdist/dimension.hpp"
#include "mdist/errors.hpp"
#include "mdist/io.hpp"
#include "mdist/oracle.hpp"

namespace {

using namespace mdist;

enum Exit { ok = 0, failed = 1, unsupported_input = 2, malformed = 3 };

struct Options {
  std::string shift;
  std::int64_t mod = 0;
  std::int64_t summod = 0;
  std::vector<std::string> fns;
  int mmax = 0;
  double tol = 0.02;
  unsigned threads = 0;
  std::string out;
  std::string csv;
  bool msb = false;
  std::vector<std::int64_t> progression;
};

GAdditiveFamily family_of(const ShiftSpec& spec, const Options& o) {
  if (o.fns.empty()) {
    if (o.mod < 1) throw SpecError("--mod or --fn is required");
    return pair_family(spec.base, o.mod, o.summod);
  }
  std::vector<GAdditiveFunction> fs;
  if (o.mod >= 1) fs.push_back(GAdditiveFunction::identity(spec.base, o.mod));
  if (o.summod >= 1) fs.push_back(GAdditiveFunction::sum_digits(spec.base, o.summod));
  for (const auto& path : o.fns) {
    auto f = io::load_function(path);
    if (f.base() != spec.base) throw SpecError(path + ": base differs from the shift's");
    fs.push_back(std::move(f));
  }
  return GAdditiveFamily(std::move(fs));
}

void emit(const Options& o, const std::string& json) {
  if (o.out.empty()) return;
  if (o.out == "-")
    std::cout << json;
  else
    io::write_file(o.out, json);
}

// Smallest m with at least 1e5 words of length m, within 64-bit horizons.
int default_horizon(const ShiftSpec& spec) {
  const auto cover = build_cover(spec);
  const int cap = static_cast<int>(std::floor(63 * std::log(2.0) / std::log(static_cast<double>(spec.base))));
  for (int m = 1; m < cap; ++m)
    if (language_count(cover, static_cast<std::size_t>(m)) >= 100000) return m;
  return cap;
}

void print_components(const ShiftSpec& spec, const NotTransitiveError& e) {
  const auto cover = build_cover(spec).trimmed();
  std::cout << "not transitive: " << e.components().size() << " strongly connected components\n";
  for (std::size_t c = 0; c < e.components().size(); ++c) {
    std::cout << "  component " << c << ":";
    for (int v : e.components()[c]) std::cout << " " << cover.names()[static_cast<std::size_t>(v)];
    std::cout << "\n";
  }
}

int cmd_cover(const Options& o) {
  const auto spec = io::load_shift(o.shift);
  try {
    std::cout << io::render_cover(fischer_cover(build_cover(spec)));
  } catch (const NotTransitiveError& e) {
    print_components(spec, e);
    return unsupported_input;
  }
  return ok;
}

int cmd_analyze(const Options& o) {
  const auto spec = io::load_shift(o.shift);
  const auto rep = analyze(spec, family_of(spec, o));
  std::cout << io::render_table(rep);
  emit(o, io::report_json(rep, {o.msb}));
  return rep.verdict == Verdict::unsupported ? unsupported_input : ok;
}

int cmd_verify(const Options& o) {
  const auto spec = io::load_shift(o.shift);
  const auto family = family_of(spec, o);
  const auto rep = analyze(spec, family);
  std::cout << io::render_table(rep);
  if (rep.verdict == Verdict::unsupported) {
    std::cout << "no prediction to verify\n";
    return unsupported_input;
  }
  const int m = o.mmax > 0 ? o.mmax : default_horizon(spec);
  const auto table = census_horizon(spec, family, m, o.threads);
  const auto cmp = compare(rep, table, o.tol);
  const auto rows = convergence_table(spec, family, rep, m, o.threads);
  std::cout << "horizon " << spec.base << "^" << m << ", " << table.total << " elements, tv " << cmp.tv << ", tolerance "
            << o.tol << ": " << (cmp.pass ? "PASS" : "FAIL") << "\n";
  if (!cmp.oscillating.empty()) std::cout << cmp.oscillating.size() << " cells without a limit, not scored\n";
  emit(o, io::comparison_json(rep, table, cmp, rows, {o.msb}));
  if (!o.csv.empty()) io::write_file(o.csv, io::convergence_csv(rows));
  return cmp.pass ? ok : failed;
}

int cmd_dimension(const Options& o) {
  const auto spec = io::load_shift(o.shift);
  auto exact = mass_dimension(spec, 1);
  DimensionEstimate est;
  std::optional<TransversalityResult> check;
  if (o.progression.empty()) {
    est = o.mmax > 0 ? mass_dimension(spec, o.mmax) : mass_dimension(spec);
  } else {
    const Progression p{o.progression[0], o.progression[1]};
    int m = o.mmax;
    if (m <= 0) m = mass_dimension(spec).points.back().m;
    est = empirical_dimension(spec, p, m, o.threads);
    est.eigenvalue = exact.eigenvalue;
    est.exact = exact.exact;
    check = transversality_check(spec, p);
  }
  std::cout << "exact " << *est.exact << " (eigenvalue " << *est.eigenvalue << ", base " << est.base << ")\n";
  std::cout << "empirical fit " << est.fit << " over m <= " << (est.points.empty() ? 0 : est.points.back().m) << " [" << est.lower
            << ", " << est.upper << "]\n";
  if (check) {
    std::cout << "progression " << check->progression.a << "N+" << check->progression.b << ": "
              << transversality_name(check->verdict);
    if (check->witness) std::cout << ", witness " << check->witness->str(o.msb);
    if (check->verdict == Transversality::finite_intersection) std::cout << ", " << check->finite_set.size() << " elements";
    if (!check->note.empty()) std::cout << " (" << check->note << ")";
    std::cout << "\n";
  }
  emit(o, io::dimension_json(est, check, {o.msb}));
  if (!o.csv.empty()) {
    std::string csv = "m,count,ratio\n";
    for (const auto& p : est.points) csv += std::to_string(p.m) + "," + std::to_string(p.count) + "," + std::to_string(p.ratio) + "\n";
    io::write_file(o.csv, csv);
  }
  return ok;
}

int cmd_census(const Options& o) {
  const auto spec = io::load_shift(o.shift);
  const int m = o.mmax > 0 ? o.mmax : default_horizon(spec);
  const auto table = census_horizon(spec, family_of(spec, o), m, o.threads);
  const auto csv = io::census_csv(table);
  std::cout << csv;
  emit(o, io::census_json(table));
  if (!o.csv.empty()) io::write_file(o.csv, csv);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residue-class distribution of digit-restricted integer sets"};
  app.require_subcommand(1);
  Options o;

  auto add_shift = [&](CLI::App* c) { c->add_option("--shift", o.shift, "shift spec JSON")->required()->check(CLI::ExistingFile); };
  auto add_moduli = [&](CLI::App* c) {
    c->add_option("--mod", o.mod, "modulus a of n")->check(CLI::PositiveNumber);
    c->add_option("--summod", o.summod, "modulus a' of the digit sum")->check(CLI::PositiveNumber);
    c->add_option("--fn", o.fns, "g-additive function file (repeatable)")->check(CLI::ExistingFile);
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out", o.out, "JSON output path, - for stdout");
    c->add_flag("--msb", o.msb, "print words most significant digit first");
  };
  auto add_threads = [&](CLI::App* c) { c->add_option("--threads", o.threads, "enumeration threads (0: all cores)"); };

  auto* cover = app.add_subcommand("cover", "print the Fischer cover");
  add_shift(cover);

  auto* analyze_cmd = app.add_subcommand("analyze", "limit frequencies per residue class");
  add_shift(analyze_cmd);
  add_moduli(analyze_cmd);
  add_out(analyze_cmd);

  auto* verify = app.add_subcommand("verify", "compare the prediction with the enumeration oracle");
  add_shift(verify);
  add_moduli(verify);
  add_out(verify);
  add_threads(verify);
  verify->add_option("--mmax", o.mmax, "horizon exponent (default: 1e5 words)")->check(CLI::Range(1, 63));
  verify->add_option("--tol", o.tol, "total variation tolerance")->check(CLI::Range(0.0, 1.0));
  verify->add_option("--csv", o.csv, "convergence table CSV");

  auto* dimension = app.add_subcommand("dimension", "mass dimension and transversality");
  add_shift(dimension);
  add_out(dimension);
  add_threads(dimension);
  dimension->add_option("--mmax", o.mmax, "largest exponent m")->check(CLI::Range(1, 63));
  dimension->add_option("--progression", o.progression, "a b")->expected(2);
  dimension->add_option("--csv", o.csv, "counts per m");

  auto* census_cmd = app.add_subcommand("oracle-census", "exact residue census below g^m");
  add_shift(census_cmd);
  add_moduli(census_cmd);
  add_out(census_cmd);
  add_threads(census_cmd);
  census_cmd->add_option("--mmax", o.mmax, "horizon exponent")->check(CLI::Range(1, 63));
  census_cmd->add_option("--csv", o.csv, "census CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : malformed;
  }

  if (o.tol <= 0 || o.tol >= 1) {
    std::cerr << "error: --tol must lie in (0, 1)\n";
    return malformed;
  }

  try {
    if (cover->parsed()) return cmd_cover(o);
    if (analyze_cmd->parsed()) return cmd_analyze(o);
    if (verify->parsed()) return cmd_verify(o);
    if (dimension->parsed()) return cmd_dimension(o);
    return cmd_census(o);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return malformed;
  } catch (const NotTransitiveError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return unsupported_input;
  } catch (const DomainError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return unsupported_input;
  } catch (const PreconditionError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return unsupported_input;
  }
}
