#pragma once

// Text formats for the command-line tool: built-in chart names, chart spec
// files, form expressions and field-experiment configs.
//
// Spec and config files are "key = value" lines grouped under [section]
// headers, '#' comments.  Values keep their file position so errors inside a
// polynomial or form point at the right line and column.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msym/chart.hpp"
#include "msym/field_lab.hpp"

namespace msym::io {

struct Entry {
  std::string value;
  std::size_t line = 0, column = 0;  // of the first value character
};

struct KeyValueFile {
  // "section.key" (or "key" before any section) -> entry
  std::map<std::string, Entry> entries;
  std::vector<std::string> sections;  // in file order

  const Entry* find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }
  const Entry& require(const std::string& key) const {
    if (auto* e = find(key)) return *e;
    throw InputError("missing key '" + key + "'");
  }
};

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline KeyValueFile parse_key_values(std::string_view text) {
  KeyValueFile f;
  std::string section;
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++lineno;
    std::size_t hash = raw.find('#');
    std::string_view line = raw.substr(0, hash);
    std::string t = trim(line);
    if (!t.empty()) {
      std::size_t lead = line.find_first_not_of(" \t\r");
      if (t.front() == '[') {
        if (t.back() != ']') throw ParseError("unterminated section header", lineno, lead + 1);
        section = trim(std::string_view(t).substr(1, t.size() - 2));
        if (section.empty()) throw ParseError("empty section name", lineno, lead + 1);
        f.sections.push_back(section);
      } else {
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno, lead + 1);
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", lineno, lead + 1);
        std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
        Entry e;
        e.value = vstart == std::string_view::npos ? "" : trim(line.substr(vstart));
        e.line = lineno;
        e.column = (vstart == std::string_view::npos ? eq + 1 : vstart) + 1;
        std::string full = section.empty() ? key : section + "." + key;
        if (f.entries.count(full)) throw ParseError("duplicate key '" + full + "'", lineno, lead + 1);
        f.entries.emplace(full, e);
      }
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return f;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Shift a parse error reported relative to a value back to file coordinates.
[[noreturn]] inline void rethrow_at(const ParseError& e, std::size_t line, std::size_t column) {
  std::string what = e.what();
  auto cut = what.rfind(" at line ");
  std::string msg = cut == std::string::npos ? what : what.substr(0, cut);
  std::size_t l = line + e.line - 1;
  std::size_t c = e.line == 1 ? column + e.column - 1 : e.column;
  throw ParseError(msg, l, c);
}

inline Polynomial parse_polynomial_at(const FramePtr& frame, const std::string& text, std::size_t line = 1, std::size_t column = 1) {
  try {
    return frame->parse(text);
  } catch (const ParseError& e) {
    rethrow_at(e, line, column);
  }
}

// ---------------------------------------------------------------------------
// Forms:  sum of terms  [coefficient *] dA^dB^...  with coefficient any
// product of polynomial factors, e.g.  "y1*dy2 - (x1 + 1/2)*dx1^dx2 + 3".

namespace detail {

struct Piece {
  std::string text;
  std::size_t offset;  // in the source string
};

inline std::vector<Piece> split_top(const std::string& s, const std::string& seps, bool keep_sign) {
  std::vector<Piece> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth != 0 || seps.find(ch) == std::string::npos) continue;
    if (keep_sign) {
      // a sign right after an operator or at the start is unary
      std::size_t j = i;
      while (j > 0 && std::isspace(static_cast<unsigned char>(s[j - 1]))) --j;
      if (j == 0 || std::string("*^(+-").find(s[j - 1]) != std::string::npos) continue;
    }
    out.push_back({s.substr(start, i - start), start});
    start = keep_sign ? i : i + 1;
  }
  out.push_back({s.substr(start), start});
  return out;
}

// "dA^dB" -> coordinate indices, or nothing when it is not a wedge of differentials
inline std::optional<std::vector<int>> differentials(const FramePtr& frame, const std::string& factor) {
  std::vector<int> idx;
  std::size_t start = 0;
  while (true) {
    std::size_t caret = factor.find('^', start);
    std::string tok = trim(factor.substr(start, caret == std::string::npos ? std::string::npos : caret - start));
    if (tok.size() < 2 || tok[0] != 'd' || frame->has(tok) || !frame->has(tok.substr(1))) return std::nullopt;
    idx.push_back(frame->index(tok.substr(1)));
    if (caret == std::string::npos) break;
    start = caret + 1;
  }
  return idx;
}

}  // namespace detail

inline PolyForm parse_form(const FramePtr& frame, const std::string& text, std::size_t line = 1, std::size_t column = 1) {
  if (trim(text).empty()) throw ParseError("empty form", line, column);
  std::optional<PolyForm> total;
  for (const auto& term : detail::split_top(text, "+-", true)) {
    std::string body = term.text;
    std::size_t off = term.offset;
    Rational sign = 1;
    std::size_t k = body.find_first_not_of(" \t");
    if (k == std::string::npos) throw ParseError("empty term", line, column + off);
    if (body[k] == '+' || body[k] == '-') {
      if (body[k] == '-') sign = -1;
      body = body.substr(k + 1);
      off += k + 1;
    }
    Polynomial coeff = frame->constant(sign);
    std::optional<std::vector<int>> wedge_idx;
    for (const auto& f : detail::split_top(body, "*", false)) {
      if (auto d = detail::differentials(frame, f.text)) {
        if (wedge_idx) throw ParseError("two wedge factors in one term", line, column + off + f.offset);
        wedge_idx = d;
      } else {
        if (trim(f.text).empty()) throw ParseError("empty factor", line, column + off + f.offset);
        coeff *= parse_polynomial_at(frame, f.text, line, column + off + f.offset);
      }
    }
    PolyForm t = wedge_idx ? PolyForm::basis(frame, *wedge_idx, coeff) : PolyForm::scalar(frame, coeff);
    if (total && total->degree() != t.degree())
      throw ParseError("terms of different degree in one form", line, column + term.offset);
    total = total ? *total + t : t;
  }
  return *total;
}

inline std::string form_text(const PolyForm& F) {
  if (F.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [I, c] : F.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")";
    for (std::size_t j = 0; j < I.size(); ++j) os << (j ? "^" : "*") << "d" << F.frame()->coord(static_cast<std::size_t>(I[j])).name;
  }
  return os.str();
}

inline std::string vector_text(const VectorField& v) {
  if (v.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [I, c] : v.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")*d/d" << v.frame()->coord(static_cast<std::size_t>(I[0])).name;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Charts

inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InputError("bad integer '" + tok + "' in " + what);
    out.push_back(v);
  }
  return out;
}

inline bool is_builtin_name(const std::string& s) {
  for (const char* p : {"lepage-dedecker:", "lepage-dedecker-split:", "dDW:", "scalar:", "field:"})
    if (s.rfind(p, 0) == 0) return true;
  return s == "maxwell";
}

// Built-ins: lepage-dedecker:n,k  lepage-dedecker-split:n,k  dDW:n,k  maxwell
// scalar:n[,gauged][,V=<poly in s>]  field:m,lambda (the field lab chart)
inline Chart builtin_chart(const std::string& s) {
  auto colon = s.find(':');
  std::string family = s.substr(0, colon), args = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (family == "maxwell") {
    if (colon != std::string::npos) throw InputError("maxwell takes no parameters");
    return maxwell_chart();
  }
  auto nk = [&] {
    auto v = parse_int_list(args, family);
    if (v.size() != 2) throw InputError(family + " needs parameters n,k");
    return v;
  };
  if (family == "lepage-dedecker") {
    auto v = nk();
    return lepage_dedecker_chart(v[0], v[1]);
  }
  if (family == "lepage-dedecker-split") {
    auto v = nk();
    return lepage_dedecker_split_chart(v[0], v[1]);
  }
  if (family == "dDW") {
    auto v = nk();
    return dDW_chart(v[0], v[1]);
  }
  if (family == "scalar") {
    std::stringstream ss(args);
    std::string tok;
    int n = 0;
    bool gauged = false, have_n = false;
    Polynomial V = potential_in_s("s");
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok == "gauged") {
        gauged = true;
      } else if (tok.rfind("V=", 0) == 0) {
        V = potential_in_s(tok.substr(2));
      } else {
        auto v = parse_int_list(tok, "scalar");
        if (v.size() != 1 || have_n) throw InputError("scalar:n[,gauged][,V=poly]");
        n = v[0];
        have_n = true;
      }
    }
    if (!have_n) throw InputError("scalar chart needs n");
    return scalar_chart(n, V, gauged);
  }
  if (family == "field") {
    std::stringstream ss(args);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    try {
      return field::field_chart(std::stod(a), std::stod(b));
    } catch (const std::invalid_argument&) {
      throw InputError("field:m,lambda needs two numbers");
    }
  }
  throw InputError("unknown built-in chart '" + s + "'");
}

// [chart] name, n, coordinates = name:kind ..., horizontal, omega, theta,
// hamiltonian, metric (diagonal rationals)
inline Chart chart_from_spec(std::string_view text) {
  auto f = parse_key_values(text);
  Chart c;
  c.family = "custom";
  c.name = f.find("chart.name") ? f.require("chart.name").value : "custom";
  const Entry& ne = f.require("chart.n");
  try {
    c.n = std::stoi(ne.value);
  } catch (const std::exception&) {
    throw ParseError("n must be an integer", ne.line, ne.column);
  }
  const Entry& ce = f.require("chart.coordinates");
  std::vector<Coordinate> coords;
  {
    std::size_t i = 0;
    const std::string& v = ce.value;
    while (i < v.size()) {
      while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
      if (i >= v.size()) break;
      std::size_t j = i;
      while (j < v.size() && !std::isspace(static_cast<unsigned char>(v[j]))) ++j;
      std::string tok = v.substr(i, j - i);
      auto colon = tok.find(':');
      Coordinate co{tok.substr(0, colon), CoordKind::Other};
      if (co.name.empty() || !(std::isalpha(static_cast<unsigned char>(co.name[0])) || co.name[0] == '_'))
        throw ParseError("bad coordinate name '" + co.name + "'", ce.line, ce.column + i);
      if (colon != std::string::npos) {
        try {
          co.kind = parse_kind(tok.substr(colon + 1));
        } catch (const Error& e) {
          throw ParseError(e.what(), ce.line, ce.column + i + colon + 1);
        }
      }
      for (const auto& o : coords)
        if (o.name == co.name) throw ParseError("coordinate '" + co.name + "' repeats", ce.line, ce.column + i);
      coords.push_back(co);
      i = j;
    }
  }
  if (coords.empty()) throw ParseError("no coordinates", ce.line, ce.column);
  c.frame = make_frame(coords);
  if (auto* h = f.find("chart.horizontal")) {
    std::stringstream ss(h->value);
    std::string tok;
    while (ss >> tok) {
      if (!c.frame->has(tok)) throw ParseError("unknown horizontal coordinate '" + tok + "'", h->line, h->column);
      c.horizontal.push_back(c.frame->index(tok));
    }
  }
  const Entry& oe = f.require("chart.omega");
  c.omega = parse_form(c.frame, oe.value, oe.line, oe.column);
  if (auto* t = f.find("chart.theta")) c.theta = parse_form(c.frame, t->value, t->line, t->column);
  if (auto* h = f.find("chart.hamiltonian")) c.hamiltonian = parse_polynomial_at(c.frame, h->value, h->line, h->column);
  if (auto* m = f.find("chart.metric")) {
    std::stringstream ss(m->value);
    std::string tok;
    while (ss >> tok) c.metric.push_back(parse_rational(tok));
  }
  c.validate();
  return c;
}

// built-in name, or path to a spec file
inline Chart load_chart(const std::string& arg) {
  if (is_builtin_name(arg)) return builtin_chart(arg);
  return chart_from_spec(read_file(arg));
}

// inline form text, or a file whose non-comment lines are concatenated
inline PolyForm load_form(const Chart& chart, const std::string& arg) {
  std::ifstream in(arg);
  if (!in) return parse_form(chart.frame, arg);
  std::string text, line;
  std::size_t first_line = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto h = line.find('#');
    std::string t = trim(line.substr(0, h));
    if (t.empty()) continue;
    if (!first_line) first_line = lineno;
    text += (text.empty() ? "" : " ") + t;
  }
  return parse_form(chart.frame, text, first_line ? first_line : 1, 1);
}

// FNV-1a 64 over a canonical rendering of the chart.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string canonical_text(const Chart& c) {
  std::ostringstream os;
  os << "n=" << c.n << "\ncoords=";
  for (const auto& co : c.frame->coords()) os << co.name << ":" << kind_name(co.kind) << " ";
  os << "\nhorizontal=";
  for (int h : c.horizontal) os << h << " ";
  os << "\nomega=" << form_text(c.omega);
  os << "\ntheta=" << (c.theta ? form_text(*c.theta) : "-");
  os << "\nH=" << (c.hamiltonian ? c.hamiltonian->to_string() : "-");
  os << "\nmetric=";
  for (const auto& m : c.metric) os << m.get_str() << " ";
  return os.str();
}

inline std::string chart_hash(const Chart& c) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical_text(c));
  return os.str();
}

// ---------------------------------------------------------------------------
// Field experiment configs
//
// [grid] M, length, cfl, crossing_times, sample_every
// [physics] mass, lambda
// [initial] waves = k:amp[:sign[:phase]], ...   pulses = center:width:amp, ...
//           noise, seed
// [run] tolerance
// [observable:<name>] kind = charge|smeared|energy|form, expect =
//           conserved|drifts|report, waves (smeared U), form (kind form)

namespace detail {

inline double number(const Entry& e) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(e.value.substr(used)) != "") throw ParseError("expected a number", e.line, e.column);
  return v;
}

inline std::vector<std::vector<double>> tuples(const Entry& e) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::vector<double> t;
    std::stringstream is(item);
    std::string part;
    while (std::getline(is, part, ':')) {
      Entry pe{trim(part), e.line, e.column};
      t.push_back(number(pe));
    }
    out.push_back(t);
  }
  return out;
}

inline std::vector<field::Wave> waves(const Entry& e) {
  std::vector<field::Wave> out;
  for (const auto& t : tuples(e)) {
    if (t.size() < 2 || t.size() > 4) throw ParseError("wave is k:amplitude[:sign[:phase]]", e.line, e.column);
    field::Wave w;
    w.k = static_cast<int>(t[0]);
    if (w.k != t[0]) throw ParseError("wave number must be an integer", e.line, e.column);
    w.amplitude = t[1];
    if (t.size() > 2) w.sign = t[2] < 0 ? -1 : 1;
    if (t.size() > 3) w.phase = t[3];
    out.push_back(w);
  }
  return out;
}

}  // namespace detail

inline field::ExperimentConfig experiment_from_config(std::string_view text) {
  auto f = parse_key_values(text);
  static const std::set<std::string> known = {"grid.M", "grid.length", "grid.cfl", "grid.crossing_times", "grid.sample_every",
                                              "physics.mass", "physics.lambda", "initial.waves", "initial.pulses",
                                              "initial.noise", "initial.seed", "run.tolerance"};
  for (const auto& [k, e] : f.entries)
    if (!known.count(k) && k.rfind("observable:", 0) != 0) throw ParseError("unknown key '" + k + "'", e.line, e.column);

  field::ExperimentConfig cfg;
  auto num = [&](const char* k, double& dst) {
    if (auto* e = f.find(k)) dst = detail::number(*e);
  };
  double M = cfg.M, every = cfg.sample_every;
  num("grid.M", M);
  num("grid.length", cfg.length);
  num("grid.cfl", cfg.cfl);
  num("grid.crossing_times", cfg.crossing_times);
  num("grid.sample_every", every);
  num("physics.mass", cfg.mass);
  num("physics.lambda", cfg.lambda);
  num("initial.noise", cfg.initial.noise);
  num("run.tolerance", cfg.tolerance);
  cfg.M = static_cast<int>(M);
  cfg.sample_every = static_cast<int>(every);
  if (cfg.M != M || cfg.M < 5) throw ParseError("M must be an integer >= 5", f.require("grid.M").line, f.require("grid.M").column);
  if (auto* e = f.find("initial.seed")) cfg.initial.seed = static_cast<std::uint64_t>(detail::number(*e));
  if (auto* e = f.find("initial.waves")) cfg.initial.waves = detail::waves(*e);
  if (auto* e = f.find("initial.pulses"))
    for (const auto& t : detail::tuples(*e)) {
      if (t.size() != 3) throw ParseError("pulse is center:width:amplitude", e->line, e->column);
      cfg.initial.pulses.push_back({t[0], t[1], t[2]});
    }

  Chart chart = field::field_chart(cfg.mass, cfg.lambda);
  for (const auto& sec : f.sections) {
    if (sec.rfind("observable:", 0) != 0) continue;
    field::ObservableSpec o;
    o.name = sec.substr(11);
    if (o.name.empty()) throw InputError("observable section needs a name");
    for (const auto& [k, e] : f.entries) {
      if (k.rfind(sec + ".", 0) != 0) continue;
      std::string key = k.substr(sec.size() + 1);
      if (key != "kind" && key != "expect" && key != "waves" && key != "form") throw ParseError("unknown key '" + key + "'", e.line, e.column);
    }
    const Entry& ke = f.require(sec + ".kind");
    if (ke.value == "charge") o.kind = field::FunctionalKind::Charge;
    else if (ke.value == "smeared") o.kind = field::FunctionalKind::Smeared;
    else if (ke.value == "energy") o.kind = field::FunctionalKind::Energy;
    else if (ke.value == "form") o.kind = field::FunctionalKind::Form;
    else throw ParseError("kind must be charge, smeared, energy or form", ke.line, ke.column);
    if (auto* e = f.find(sec + ".expect")) {
      if (e->value == "conserved") o.expect_conserved = true;
      else if (e->value == "drifts") o.expect_conserved = false;
      else if (e->value != "report") throw ParseError("expect must be conserved, drifts or report", e->line, e->column);
    }
    if (o.kind == field::FunctionalKind::Smeared) o.profile.waves = detail::waves(f.require(sec + ".waves"));
    if (o.kind == field::FunctionalKind::Form) {
      const Entry& fe = f.require(sec + ".form");
      o.form = parse_form(chart.frame, fe.value, fe.line, fe.column);
      if (o.form->degree() != 1) throw ParseError("observable form must be a 1-form", fe.line, fe.column);
    }
    cfg.observables.push_back(o);
  }
  if (cfg.observables.empty()) throw InputError("config lists no observables");
  return cfg;
}

}  // namespace msym::io
