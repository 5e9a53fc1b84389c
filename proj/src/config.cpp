#include "thermo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "thermo/errors.hpp"

namespace thermo {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ParseError("ParseError: " + source_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void invalid(int line, const std::string& field, const std::string& msg) const {
    throw ValidationError(source_ + ":" + std::to_string(line) + ": " + field + ": " + msg);
  }

  double number(const Entry& e, const std::string& field) const {
    const std::string s = trim(e.value);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) fail(e.line, field + ": expected a number, got '" + s + "'");
    return v;
  }

  long long integer(const Entry& e, const std::string& field) const {
    const std::string s = trim(e.value);
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) fail(e.line, field + ": expected an integer, got '" + s + "'");
    return v;
  }

  std::vector<double> list(const Entry& e, const std::string& field) const {
    std::string s = e.value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(number(Entry{tok, e.line}, field));
    if (out.empty()) fail(e.line, field + ": empty list");
    return out;
  }

  std::vector<double> sorted_list(const Entry& e, const std::string& field) const {
    auto v = list(e, field);
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) invalid(e.line, field, "grids sorted: values must be strictly increasing");
    return v;
  }

  bool boolean(const Entry& e, const std::string& field) const {
    const std::string s = trim(e.value);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(e.line, field + ": expected true or false, got '" + s + "'");
  }

private:
  std::string source_;
};

using Section = std::map<std::string, Entry>;

struct TableEntry {
  Word word;
  Entry entry;
};

struct PotentialSource {
  std::optional<Entry> constant;
  std::vector<TableEntry> table;
  int first_line = 0;
};

Potential build_potential(const Reader& rd, const Subshift& shift, const std::string& name, const PotentialSource& src,
                          PotentialKind kind) {
  if (src.constant) {
    const double c = rd.number(*src.constant, name);
    try {
      return Potential::constant(shift, c, kind);
    } catch (const ValidationError& e) {
      rd.invalid(src.constant->line, "[potentials] " + name, e.what());
    }
  }
  const auto depth = src.table.front().word.size();
  WordTable table(shift, static_cast<int>(depth));
  std::vector<cplx> values(table.size());
  std::vector<bool> seen(table.size(), false);
  for (const auto& te : src.table) {
    const std::string field = "[potentials] " + name;
    if (te.word.size() != depth) rd.invalid(te.entry.line, field, "all words of one table must have the same length");
    for (int s : te.word)
      if (s < 0 || s >= shift.k()) rd.invalid(te.entry.line, field, "symbol " + std::to_string(s) + " out of alphabet");
    const auto idx = table.index_of(te.word);
    if (idx < 0) rd.invalid(te.entry.line, field, "word is not admissible");
    if (seen[static_cast<std::size_t>(idx)]) rd.invalid(te.entry.line, field, "word listed twice");
    seen[static_cast<std::size_t>(idx)] = true;
    values[static_cast<std::size_t>(idx)] = rd.number(te.entry, field);
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) {
      std::string w;
      for (int s : table.word(i)) w += (w.empty() ? "" : " ") + std::to_string(s);
      rd.invalid(src.first_line, "[potentials] " + name, "missing entry for admissible word [" + w + "]");
    }
  try {
    return Potential(shift, static_cast<int>(depth), std::move(values), kind);
  } catch (const ValidationError& e) {
    rd.invalid(src.first_line, "[potentials] " + name, e.what());
  }
}

const std::set<std::string> kSections = {"system", "potentials", "tolerances", "rates", "ldp", "scan", "lattice"};

void reject_unknown(const Reader& rd, const Section& sec, const std::string& name, const std::set<std::string>& known) {
  for (const auto& [key, e] : sec)
    if (!known.count(key)) rd.fail(e.line, "unknown key '" + key + "' in [" + name + "]");
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text, const std::string& source_name) {
  Reader rd(source_name);
  ExperimentConfig cfg;
  cfg.source_path = source_name;
  cfg.hash = fnv1a(text);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cfg.hash));
  cfg.hash_hex = buf;

  std::map<std::string, Section> sections;
  std::vector<Entry> rows;
  std::map<std::string, PotentialSource> pots;
  std::string current;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash_pos = raw.find('#');
    const std::string line = trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail(line_no, "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSections.count(current)) rd.fail(line_no, "unknown section [" + current + "]");
      if (sections.count(current)) rd.fail(line_no, "section [" + current + "] appears twice");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail(line_no, "expected 'key = value'");
    if (current.empty()) rd.fail(line_no, "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const Entry entry{trim(std::string_view(line).substr(eq + 1)), line_no};
    if (key.empty()) rd.fail(line_no, "empty key");
    if (entry.value.empty()) rd.fail(line_no, "empty value for '" + key + "'");

    if (current == "system" && key == "row") {
      rows.push_back(entry);
      continue;
    }
    if (current == "potentials") {
      const auto br = key.find('[');
      const std::string name = trim(std::string_view(key).substr(0, br));
      if (name != "f" && name != "tau" && name != "g") rd.fail(line_no, "unknown potential '" + name + "'");
      auto& src = pots[name];
      if (src.first_line == 0) src.first_line = line_no;
      if (br == std::string::npos) {
        if (src.constant || !src.table.empty()) rd.fail(line_no, "potential '" + name + "' defined twice");
        src.constant = entry;
      } else {
        if (src.constant) rd.fail(line_no, "potential '" + name + "' mixes constant and table forms");
        if (key.back() != ']') rd.fail(line_no, "expected NAME[s0 s1 ...]");
        std::istringstream ws(key.substr(br + 1, key.size() - br - 2));
        Word w;
        std::string tok;
        while (ws >> tok) w.push_back(static_cast<int>(rd.integer(Entry{tok, line_no}, name + " word")));
        if (w.empty()) rd.fail(line_no, "empty word in '" + key + "'");
        src.table.push_back({std::move(w), entry});
      }
      continue;
    }
    auto& sec = sections[current];
    if (sec.count(key)) rd.fail(line_no, "duplicate key '" + key + "' in [" + current + "]");
    sec[key] = entry;
  }

  // [system]
  if (!sections.count("system")) rd.fail(line_no, "missing [system] section");
  const auto& sys = sections["system"];
  reject_unknown(rd, sys, "system", {"k", "theta"});
  if (!sys.count("k")) rd.fail(line_no, "[system] needs k");
  const auto k = rd.integer(sys.at("k"), "k");
  if (k < 2 || k > 64) rd.invalid(sys.at("k").line, "[system] k", "alphabet size must lie in [2, 64]");
  TransitionMatrix A;
  if (rows.empty()) {
    A.assign(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 1));
  } else {
    if (static_cast<long long>(rows.size()) != k)
      rd.invalid(rows.front().line, "[system] row", "expected " + std::to_string(k) + " rows");
    for (const auto& r : rows) {
      const auto vals = rd.list(r, "row");
      std::vector<int> row;
      for (double v : vals) {
        if (v != 0.0 && v != 1.0) rd.invalid(r.line, "[system] row", "entries must be 0 or 1");
        row.push_back(static_cast<int>(v));
      }
      if (static_cast<long long>(row.size()) != k)
        rd.invalid(r.line, "[system] row", "expected " + std::to_string(k) + " entries");
      A.push_back(std::move(row));
    }
  }
  try {
    cfg.shift.emplace(A);
  } catch (const ValidationError& e) {
    rd.invalid(rows.empty() ? sys.at("k").line : rows.front().line, "[system] transition matrix", e.what());
  }
  if (sys.count("theta")) {
    cfg.theta = rd.number(sys.at("theta"), "theta");
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) rd.invalid(sys.at("theta").line, "[system] theta", "must lie in (0,1)");
  }

  // [potentials]
  if (!pots.count("tau")) rd.fail(line_no, "[potentials] needs tau");
  if (!pots.count("g")) rd.fail(line_no, "[potentials] needs g");
  cfg.f = pots.count("f") ? build_potential(rd, *cfg.shift, "f", pots["f"], PotentialKind::generic)
                          : Potential::constant(*cfg.shift, 0.0);
  cfg.tau = build_potential(rd, *cfg.shift, "tau", pots["tau"], PotentialKind::roof);
  cfg.g = build_potential(rd, *cfg.shift, "g", pots["g"], PotentialKind::observable);

  // [tolerances]
  if (sections.count("tolerances")) {
    const auto& t = sections["tolerances"];
    reject_unknown(rd, t, "tolerances", {"eigen_tol", "eigen_max_iters", "fd_first", "fd_second", "t_max", "lattice_threshold"});
    auto positive = [&](const char* key, double& dst) {
      if (!t.count(key)) return;
      dst = rd.number(t.at(key), key);
      if (!(dst > 0.0)) rd.invalid(t.at(key).line, std::string("[tolerances] ") + key, "must be positive");
    };
    positive("eigen_tol", cfg.pressure.eigen.tol);
    positive("fd_first", cfg.pressure.fd_first);
    positive("fd_second", cfg.pressure.fd_second);
    positive("t_max", cfg.pressure.t_max);
    positive("lattice_threshold", cfg.pressure.lattice_threshold);
    if (t.count("eigen_max_iters")) cfg.pressure.eigen.max_iters = static_cast<int>(rd.integer(t.at("eigen_max_iters"), "eigen_max_iters"));
  }

  // [rates]
  if (sections.count("rates")) {
    const auto& r = sections["rates"];
    reject_unknown(rd, r, "rates", {"a_grid", "a_star_offsets"});
    RatesBlock blk;
    if (r.count("a_grid")) blk.a_grid = rd.sorted_list(r.at("a_grid"), "a_grid");
    if (r.count("a_star_offsets")) blk.a_star_offsets = rd.sorted_list(r.at("a_star_offsets"), "a_star_offsets");
    if (blk.a_grid.empty() == blk.a_star_offsets.empty())
      rd.fail(line_no, "[rates] needs exactly one of a_grid, a_star_offsets");
    cfg.rates = std::move(blk);
  }

  // [ldp]
  if (sections.count("ldp")) {
    const auto& l = sections["ldp"];
    reject_unknown(rd, l, "ldp",
                   {"a", "a_offset", "target_J", "delta", "n_min", "n_max", "n_step", "chi", "spectral", "u_max",
                    "step", "quad_tol", "guard", "snap"});
    LdpBlock blk;
    int choices = 0;
    if (l.count("a")) blk.a = rd.number(l.at("a"), "a"), ++choices;
    if (l.count("a_offset")) blk.a_offset = rd.number(l.at("a_offset"), "a_offset"), ++choices;
    if (l.count("target_J")) {
      blk.target_J = rd.number(l.at("target_J"), "target_J"), ++choices;
      if (!(*blk.target_J < 0.0)) rd.invalid(l.at("target_J").line, "[ldp] target_J", "must be negative");
    }
    if (choices != 1) rd.fail(line_no, "[ldp] needs exactly one of a, a_offset, target_J");
    auto& run = blk.run;
    if (l.count("delta")) run.delta = rd.number(l.at("delta"), "delta");
    if (!(run.delta >= 0.0)) rd.invalid(l.at("delta").line, "[ldp] delta", "must be >= 0");
    if (!l.count("n_min") || !l.count("n_max")) rd.fail(line_no, "[ldp] needs n_min and n_max");
    run.n_min = static_cast<int>(rd.integer(l.at("n_min"), "n_min"));
    run.n_max = static_cast<int>(rd.integer(l.at("n_max"), "n_max"));
    if (run.n_min < 1) rd.invalid(l.at("n_min").line, "[ldp] n_min", "must be >= 1");
    if (l.count("n_step")) run.n_step = static_cast<int>(rd.integer(l.at("n_step"), "n_step"));
    if (run.n_step < 1) rd.invalid(l.at("n_step").line, "[ldp] n_step", "must be >= 1");
    if (l.count("chi")) {
      const auto kind = l.at("chi").value;
      if (kind == "triangle") run.chi = CutoffKind::triangle;
      else if (kind == "smooth_bump") run.chi = CutoffKind::smooth_bump;
      else rd.fail(l.at("chi").line, "chi: expected triangle or smooth_bump");
    }
    if (l.count("spectral")) run.spectral = rd.boolean(l.at("spectral"), "spectral");
    if (l.count("u_max")) run.quad.u_max = rd.number(l.at("u_max"), "u_max");
    if (l.count("step")) run.quad.step = rd.number(l.at("step"), "step");
    if (l.count("quad_tol")) run.quad.tol = rd.number(l.at("quad_tol"), "quad_tol");
    if (!(run.quad.u_max > 0.0 && run.quad.step > 0.0 && run.quad.tol > 0.0))
      rd.invalid(line_no, "[ldp] quadrature", "u_max, step and quad_tol must be positive");
    if (l.count("guard")) {
      const auto g = rd.integer(l.at("guard"), "guard");
      if (g < 1) rd.invalid(l.at("guard").line, "[ldp] guard", "must be >= 1");
      run.enumeration.guard = static_cast<std::uint64_t>(g);
    }
    if (l.count("snap")) run.enumeration.snap = rd.number(l.at("snap"), "snap");
    cfg.ldp = std::move(blk);
  }

  // [scan]
  if (sections.count("scan")) {
    const auto& s = sections["scan"];
    reject_unknown(rd, s, "scan", {"a", "c", "b_grid", "kappa_grid", "B", "m_max", "epsilon", "h_seed", "rng_seed"});
    ScanConfig sc;
    sc.theta = cfg.theta;
    if (s.count("a")) sc.a = rd.number(s.at("a"), "a");
    if (s.count("c")) sc.c = rd.number(s.at("c"), "c");
    if (!s.count("b_grid") || !s.count("kappa_grid")) rd.fail(line_no, "[scan] needs b_grid and kappa_grid");
    sc.b_grid = rd.sorted_list(s.at("b_grid"), "b_grid");
    sc.kappa_grid = rd.sorted_list(s.at("kappa_grid"), "kappa_grid");
    if (s.count("B")) sc.B = rd.number(s.at("B"), "B");
    if (s.count("m_max")) sc.m_max = static_cast<int>(rd.integer(s.at("m_max"), "m_max"));
    if (s.count("epsilon")) sc.epsilon = rd.number(s.at("epsilon"), "epsilon");
    if (s.count("rng_seed")) sc.seed = static_cast<std::uint64_t>(rd.integer(s.at("rng_seed"), "rng_seed"));
    if (s.count("h_seed")) {
      const auto kind = s.at("h_seed").value;
      if (kind == "constant_one") sc.h_seed = SeedKind::constant_one;
      else if (kind == "random_unit") sc.h_seed = SeedKind::random_unit;
      else if (kind == "cylinder_indicator") sc.h_seed = SeedKind::cylinder_indicator;
      else rd.fail(s.at("h_seed").line, "h_seed: expected constant_one, random_unit or cylinder_indicator");
    }
    try {
      validate_scan_config(sc);
    } catch (const ValidationError& e) {
      rd.invalid(s.at("b_grid").line, "[scan]", e.what());
    }
    cfg.scan = std::move(sc);
  }

  // [lattice]
  if (sections.count("lattice")) {
    const auto& l = sections["lattice"];
    reject_unknown(rd, l, "lattice", {"u_grid", "iterations", "tol"});
    if (l.count("u_grid")) cfg.lattice.u_grid = rd.sorted_list(l.at("u_grid"), "u_grid");
    if (l.count("iterations")) cfg.lattice.iterations = static_cast<int>(rd.integer(l.at("iterations"), "iterations"));
    if (cfg.lattice.iterations < 4) rd.invalid(l.at("iterations").line, "[lattice] iterations", "must be >= 4");
    if (l.count("tol")) cfg.lattice.tol = rd.number(l.at("tol"), "tol");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("ParseError: cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

}  // namespace thermo
