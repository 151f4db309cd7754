#include "mdist/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mdist/errors.hpp"

namespace mdist::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SpecError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SpecError(std::string("bad field \"") + key + "\": " + e.what());
  }
}

ShiftSpec shift_from(const json& j) {
  const int base = field<int>(j, "base");
  const auto kind = field<std::string>(j, "kind");
  if (kind == "full") return ShiftSpec::full(base, field<std::vector<int>>(j, "digits"));
  if (kind == "sft1") {
    std::vector<std::pair<int, int>> allowed;
    for (const auto& p : field<std::vector<std::vector<int>>>(j, "allowed")) {
      if (p.size() != 2) throw SpecError("allowed pairs need two digits");
      allowed.push_back({p[0], p[1]});
    }
    return ShiftSpec::sft1(base, field<std::vector<int>>(j, "digits"), allowed);
  }
  if (kind == "sofic") {
    std::vector<ShiftSpec::SpecEdge> edges;
    for (const auto& e : field<json>(j, "edges"))
      edges.push_back({field<std::string>(e, "from"), field<std::string>(e, "to"), field<int>(e, "label")});
    return ShiftSpec::sofic(base, field<std::vector<std::string>>(j, "nodes"), edges);
  }
  if (kind == "sgap") return ShiftSpec::sgap(base, field<std::vector<int>>(j, "gaps"));
  if (kind == "union") {
    std::vector<ShiftSpec> parts;
    for (const auto& p : field<json>(j, "parts")) {
      json q = p;
      if (!q.contains("base")) q["base"] = base;
      parts.push_back(shift_from(q));
    }
    return ShiftSpec::union_of(base, parts);
  }
  throw SpecError("unknown shift kind \"" + kind + "\"");
}

json shift_to(const ShiftSpec& s) {
  json j;
  j["base"] = s.base;
  switch (s.kind) {
    case ShiftSpec::Kind::full:
      j["kind"] = "full";
      j["digits"] = s.digits;
      break;
    case ShiftSpec::Kind::sft1: {
      j["kind"] = "sft1";
      j["digits"] = s.digits;
      json pairs = json::array();
      for (auto [a, b] : s.allowed) pairs.push_back({a, b});
      j["allowed"] = pairs;
      break;
    }
    case ShiftSpec::Kind::sofic: {
      j["kind"] = "sofic";
      j["nodes"] = s.nodes;
      json edges = json::array();
      for (const auto& e : s.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"label", e.label}});
      j["edges"] = edges;
      break;
    }
    case ShiftSpec::Kind::sgap:
      j["kind"] = "sgap";
      j["gaps"] = s.gaps;
      break;
    case ShiftSpec::Kind::union_of: {
      j["kind"] = "union";
      json parts = json::array();
      for (const auto& p : s.parts) parts.push_back(shift_to(p));
      j["parts"] = parts;
      break;
    }
  }
  return j;
}

std::string q(const Rational& r) { return to_string(r); }

json residues(const ResidueVector& r) { return json(r); }

std::string word_str(const Word& w, const JsonOptions& o) { return w.str(o.msb_first); }

json table_json(const AnalysisReport& rep) {
  json rows = json::array();
  const auto mv = rep.modulus_vector();
  for (std::size_t i = 0; i < rep.table.size(); ++i) {
    json row;
    row["residue"] = residues(mv.residue(i));
    if (rep.table[i]) {
      row["value"] = q(*rep.table[i]);
      row["float"] = rep.table[i]->get_d();
    } else {
      row["value"] = "DNE";
      row["float"] = nullptr;
    }
    rows.push_back(row);
  }
  return rows;
}

json report_to(const AnalysisReport& rep, const JsonOptions& o) {
  json j;
  j["schema"] = schema_version;
  j["shift"] = rep.shift;
  j["base"] = rep.base;
  j["moduli"] = rep.moduli;
  j["functions"] = rep.functions;
  j["verdict"] = verdict_name(rep.verdict);
  j["method"] = method_name(rep.method);
  j["table"] = table_json(rep);
  j["delta"] = rep.delta ? json(*rep.delta) : json(nullptr);
  j["subgroup"] = rep.subgroup ? json(*rep.subgroup) : json(nullptr);
  json words = json::array();
  for (const auto& w : rep.witness_words) words.push_back(word_str(w, o));
  j["witness_words"] = words;
  json ints = json::array();
  for (const auto& n : rep.witness_integers) ints.push_back(to_string(n));
  j["witness_integers"] = ints;
  j["witness_residues"] = rep.witness_residues;
  if (rep.certificate_states) {
    j["certificate"] = {{"states", *rep.certificate_states}, {"reachable", rep.certificate_reachable}};
  } else {
    j["certificate"] = nullptr;
  }
  json cosets = json::array();
  for (const auto& [len, shift] : rep.cosets) cosets.push_back({{"length", len}, {"shift", shift}});
  j["cosets"] = cosets;
  j["coset_period"] = rep.coset_period;
  json phases = json::array();
  for (const auto& p : rep.phases) {
    std::vector<std::string> vals;
    for (const auto& v : p.values) vals.push_back(q(v));
    phases.push_back({{"phase", p.phase}, {"modulus", p.modulus}, {"values", vals}});
  }
  j["phases"] = phases;
  j["markov_condition"] = rep.markov_condition ? json(*rep.markov_condition) : json(nullptr);
  j["sft_shortcut"] = rep.sft_shortcut;
  j["notes"] = rep.notes;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

ShiftSpec parse_shift(const std::string& text) {
  auto spec = shift_from(parse_json(text));
  spec.validate();
  return spec;
}

ShiftSpec load_shift(const std::filesystem::path& path) { return parse_shift(read_file(path)); }

std::string shift_json(const ShiftSpec& spec) { return shift_to(spec).dump(2) + "\n"; }

GAdditiveFunction parse_function(const std::string& text) {
  const json j = parse_json(text);
  const int base = field<int>(j, "base");
  const auto modulus = field<std::int64_t>(j, "modulus");
  if (base < 2) throw SpecError("base must be at least 2");
  if (modulus < 1) throw SpecError("modulus must be positive");
  if (j.contains("name")) {
    const auto name = field<std::string>(j, "name");
    if (name == "id") return GAdditiveFunction::identity(base, modulus);
    if (name == "sum_digits") return GAdditiveFunction::sum_digits(base, modulus);
    throw SpecError("unknown function name \"" + name + "\"");
  }
  std::vector<GAdditiveFunction::TableEntry> entries;
  for (const auto& row : field<std::vector<std::vector<std::int64_t>>>(j, "table")) {
    if (row.size() != 3) throw SpecError("table rows are [digit, position, value]");
    entries.push_back({static_cast<int>(row[0]), row[1], row[2]});
  }
  try {
    return GAdditiveFunction::from_table(base, modulus, field<std::int64_t>(j, "ell"), field<std::int64_t>(j, "p"), entries);
  } catch (const DomainError& e) {
    throw SpecError(e.what());
  } catch (const PreconditionError& e) {
    throw SpecError(e.what());
  }
}

GAdditiveFunction load_function(const std::filesystem::path& path) { return parse_function(read_file(path)); }

std::string function_json(const GAdditiveFunction& f) {
  json j;
  j["base"] = f.base();
  j["modulus"] = f.modulus();
  if (f.kind() != GAdditiveFunction::Kind::table) {
    j["name"] = f.name();
  } else {
    j["ell"] = f.table_ell();
    j["p"] = f.table_period();
    json rows = json::array();
    for (std::int64_t i = 0; i < f.table_ell() + f.table_period(); ++i)
      for (int d = 1; d < f.base(); ++d) rows.push_back({d, i, f.at(d, static_cast<std::uint64_t>(i))});
    j["table"] = rows;
  }
  return j.dump(2) + "\n";
}

std::string report_json(const AnalysisReport& report, JsonOptions opts) { return report_to(report, opts).dump(2) + "\n"; }

std::string comparison_json(const AnalysisReport& report, const CensusTable& table, const Comparison& cmp,
                            const std::vector<ConvergenceRow>& rows, JsonOptions opts) {
  json j;
  j["schema"] = schema_version;
  j["report"] = report_to(report, opts);
  j["horizon"] = std::to_string(table.limit);
  j["total"] = table.total;
  j["tv"] = cmp.tv;
  j["max_cell_error"] = cmp.max_cell_error;
  j["tolerance"] = cmp.tolerance;
  j["pass"] = cmp.pass;
  j["oscillating"] = cmp.oscillating;
  json conv = json::array();
  for (const auto& r : rows) conv.push_back({{"m", r.m}, {"tv", r.tv}});
  j["convergence"] = conv;
  return j.dump(2) + "\n";
}

std::string dimension_json(const DimensionEstimate& est, const std::optional<TransversalityResult>& check,
                           JsonOptions opts) {
  json j;
  j["schema"] = schema_version;
  if (est.eigenvalue) {
    j["exact"] = {{"eigenvalue", *est.eigenvalue}, {"base", est.base}, {"dimension", *est.exact}};
  } else {
    j["exact"] = nullptr;
  }
  json pts = json::array();
  for (const auto& p : est.points) pts.push_back({{"m", p.m}, {"count", p.count}, {"ratio", p.ratio}});
  j["empirical"] = {{"points", pts}, {"fit", est.fit}, {"lower", est.lower}, {"upper", est.upper}, {"empty", est.empty}};
  if (check) {
    json c;
    c["a"] = check->progression.a;
    c["b"] = check->progression.b;
    c["states"] = check->states;
    c["witness"] = check->witness ? json(word_str(*check->witness, opts)) : json(nullptr);
    if (check->verdict == Transversality::finite_intersection) c["finite_set"] = check->finite_set;
    j["transversality"] = c;
    j["verdict"] = transversality_name(check->verdict);
  } else {
    j["verdict"] = nullptr;
  }
  if (!est.note.empty()) j["note"] = est.note;
  return j.dump(2) + "\n";
}

std::string census_json(const CensusTable& table) {
  json j;
  j["schema"] = schema_version;
  j["horizon"] = std::to_string(table.limit);
  j["base"] = table.base;
  j["moduli"] = table.moduli.moduli();
  j["total"] = table.total;
  json rows = json::array();
  const auto freqs = table.frequencies();
  for (std::size_t i = 0; i < table.counts.size(); ++i)
    rows.push_back({{"residue", table.moduli.residue(i)}, {"count", table.counts[i]}, {"frequency", q(freqs[i])}});
  j["cells"] = rows;
  return j.dump(2) + "\n";
}

std::string census_csv(const CensusTable& table) {
  std::ostringstream out;
  for (std::size_t j = 0; j < table.moduli.rank(); ++j) out << "b" << (j + 1) << ",";
  out << "count,frequency_num,frequency_den\n";
  const auto freqs = table.frequencies();
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    for (auto b : table.moduli.residue(i)) out << b << ",";
    out << table.counts[i] << "," << freqs[i].get_num().get_str() << "," << freqs[i].get_den().get_str() << "\n";
  }
  return out.str();
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "m,tv\n";
  char buf[32];
  for (const auto& r : rows) {
    // Shortest representation that reads back to the same double.
    const auto end = std::to_chars(buf, buf + sizeof buf, r.tv).ptr;
    out += std::to_string(r.m) + "," + std::string(buf, end) + "\n";
  }
  return out;
}

std::string matrix_csv(const ChainSystem& sys, std::int64_t i) {
  const auto m = sys.transition_matrix(i);
  std::ostringstream out;
  const auto n = sys.states().size();
  for (std::size_t s = 0; s < n; ++s) out << (s ? "," : "") << csv_field(sys.states().label(s));
  out << "\n";
  for (const auto& row : m) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << q(row[c]);
    out << "\n";
  }
  return out.str();
}

std::string render_table(const AnalysisReport& report) {
  std::ostringstream out;
  out << report.shift << "  moduli";
  for (auto a : report.moduli) out << " " << a;
  out << "\nverdict: " << verdict_name(report.verdict) << " (" << method_name(report.method) << ")\n";
  const auto mv = report.modulus_vector();
  for (std::size_t i = 0; i < report.table.size(); ++i) {
    std::string res = "(";
    for (auto b : mv.residue(i)) res += (res.size() > 1 ? "," : "") + std::to_string(b);
    res += ")";
    out << "  " << std::left << std::setw(12) << res;
    if (report.table[i])
      out << std::setw(14) << q(*report.table[i]) << std::fixed << std::setprecision(6) << report.table[i]->get_d();
    else
      out << "DNE";
    out << std::defaultfloat << "\n";
  }
  for (const auto& n : report.notes) out << "  note: " << n << "\n";
  return out.str();
}

std::string render_cover(const FischerCover& fc) {
  std::ostringstream out;
  const auto& g = fc.graph;
  out << g.size() << (g.size() == 1 ? " node" : " nodes") << ", ";
  out << (fc.k ? "k=" + std::to_string(*fc.k) : std::string("not regular")) << ", ";
  out << (is_mixing(g) ? "mixing" : (is_transitive(g) ? "transitive" : "not transitive")) << "\n";
  for (const auto& e : g.edges())
    out << "  " << g.names()[static_cast<std::size_t>(e.from)] << " -" << e.label << "-> "
        << g.names()[static_cast<std::size_t>(e.to)] << "\n";
  return out.str();
}

}  // namespace mdist::io
