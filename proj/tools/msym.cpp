// msym: verification reports for multisymplectic charts, observable forms,
// brackets and the lattice field experiments.
//
// Exit codes: 0 all records pass (or are not defined), 1 some record fails,
// 2 bad input.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "msym/brackets.hpp"
#include "msym/field_lab.hpp"
#include "msym/io.hpp"
#include "msym/observables.hpp"
#include "msym/random.hpp"

using json = nlohmann::json;
using namespace msym;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string chart, kind, config, output, csv, recheck;
  std::vector<std::string> forms, points;
  int samples = 20, npoints = 3;
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
};

// ---------------------------------------------------------------------------
// json helpers

json record(const std::string& id, const std::string& anchor, const std::string& status, json witness) {
  return {{"check_id", id}, {"anchor", anchor}, {"status", status}, {"witness", std::move(witness)}};
}

const char* pass_fail(bool ok) { return ok ? "pass" : "fail"; }

json rationals(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(r.get_str());
  return a;
}

std::vector<Rational> rationals_from(const json& a) {
  std::vector<Rational> v;
  for (const auto& s : a) v.push_back(parse_rational(s.get<std::string>()));
  return v;
}

json vector_json(const VectorField& v) {
  json o = json::object();
  for (const auto& [I, c] : v.terms()) o[v.frame()->coord(static_cast<std::size_t>(I[0])).name] = c.to_string();
  return o;
}

VectorField vector_from(const Chart& chart, const json& o) {
  VectorField v(chart.frame, 1);
  for (const auto& [name, poly] : o.items())
    v.add_term(MultiIndex{chart.frame->index(name)}, chart.parse(poly.get<std::string>()));
  return v;
}

json decomposable_json(const DecomposableNVector& x) {
  json a = json::array();
  for (const auto& f : x.factors) a.push_back(vector_json(f));
  return a;
}

DecomposableNVector decomposable_from(const Chart& chart, const json& a) {
  DecomposableNVector x;
  for (const auto& f : a) x.factors.push_back(vector_from(chart, f));
  return x;
}

// form text as printed in a report; "0" carries no degree, so it is supplied
PolyForm form_of_degree(const FramePtr& frame, const std::string& text, int degree) {
  PolyForm f = io::parse_form(frame, text);
  return f.is_zero() ? PolyForm(frame, degree) : f;
}

// ---------------------------------------------------------------------------
// inputs

struct LoadedChart {
  Chart chart;
  std::string source;
  std::optional<std::string> spec;  // file contents when not built in
};

LoadedChart load_chart(const std::string& arg) {
  if (arg.empty()) throw InputError("--chart is required");
  LoadedChart lc;
  lc.source = arg;
  if (io::is_builtin_name(arg)) {
    lc.chart = io::builtin_chart(arg);
  } else {
    lc.spec = io::read_file(arg);
    lc.chart = io::chart_from_spec(*lc.spec);
  }
  return lc;
}

LoadedChart chart_from_report(const json& r) {
  LoadedChart lc;
  lc.source = r.at("chart").at("source").get<std::string>();
  const auto& spec = r.at("chart").at("spec");
  if (spec.is_null()) {
    lc.chart = io::builtin_chart(lc.source);
  } else {
    lc.spec = spec.get<std::string>();
    lc.chart = io::chart_from_spec(*lc.spec);
  }
  if (io::chart_hash(lc.chart) != r.at("chart").at("hash").get<std::string>()) throw InputError("chart hash does not match the report");
  return lc;
}

std::vector<Rational> parse_point(const Chart& chart, const std::string& s) {
  std::vector<Rational> p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) p.push_back(parse_rational(io::trim(tok)));
  if (p.size() != chart.dim())
    throw InputError("point has " + std::to_string(p.size()) + " coordinates, chart has " + std::to_string(chart.dim()));
  return p;
}

std::vector<std::vector<Rational>> resolve_points(const Chart& chart, const Options& o) {
  std::vector<std::vector<Rational>> pts;
  for (const auto& s : o.points) pts.push_back(parse_point(chart, s));
  if (pts.empty()) {
    RationalSampler rng(o.seed);
    for (int i = 0; i < o.npoints; ++i) pts.push_back(rng.point(chart.dim()));
  }
  return pts;
}

json header(const std::string& command, const LoadedChart& lc, const Options& o) {
  json r;
  r["tool"] = "msym";
  r["version"] = kVersion;
  r["command"] = command;
  r["seed"] = o.seed;
  r["chart"] = {{"name", lc.chart.name}, {"hash", io::chart_hash(lc.chart)}, {"source", lc.source}, {"spec", lc.spec ? json(*lc.spec) : json(nullptr)}};
  r["records"] = json::array();
  return r;
}

int finish(json& r) {
  bool any_fail = false;
  for (const auto& rec : r["records"]) any_fail = any_fail || rec["status"] == "fail";
  r["verdict"] = any_fail ? "fail" : "pass";
  return any_fail ? 1 : 0;
}

std::optional<Copolarization> copolarization_for(const Chart& c) {
  if (is_lepage_family(c)) return standard_copolarization(c);
  if (c.family == "maxwell") return maxwell_copolarization(c);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// check-chart

json closed_record(const Chart& c) {
  PolyForm d = ext_d(c.omega);
  return record("closed", "multisymplectic form: closedness", pass_fail(d.is_zero()), {{"d_omega", io::form_text(d)}});
}

json potential_record(const Chart& c) {
  if (!c.theta) return record("potential", "multisymplectic form: potential", "not-defined", {{"reason", "chart has no potential form"}});
  PolyForm defect = ext_d(*c.theta) - c.omega;
  return record("potential", "multisymplectic form: potential", pass_fail(defect.is_zero()), {{"defect", io::form_text(defect)}});
}

json nondegenerate_record(const Chart& c, const std::vector<std::vector<Rational>>& pts) {
  json ps = json::array();
  for (const auto& p : pts) {
    auto v = nondegeneracy_check(c, p);
    if (!v.nondegenerate)
      return record("nondegenerate", "multisymplectic form: nondegeneracy", "fail", {{"point", rationals(p)}, {"kernel", rationals(v.kernel_witness)}});
    ps.push_back(rationals(p));
  }
  return record("nondegenerate", "multisymplectic form: nondegeneracy", "pass", {{"points", ps}});
}

int cmd_check_chart(const Options& o, json& r) {
  auto lc = load_chart(o.chart);
  r = header("check-chart", lc, o);
  r["records"].push_back(closed_record(lc.chart));
  r["records"].push_back(potential_record(lc.chart));
  r["records"].push_back(nondegenerate_record(lc.chart, resolve_points(lc.chart, o)));
  return finish(r);
}

// ---------------------------------------------------------------------------
// observable

json aof_record(const Chart& c, const PolyForm& F) {
  auto s = aof_solve(c, F);
  if (s.ok()) return record("aof", "algebraic observable form: dF + xi hook Omega = 0", "pass", {{"xi", vector_json(*s.xi)}});
  return record("aof", "algebraic observable form: dF + xi hook Omega = 0", "fail", {{"residual", io::form_text(s.residual)}});
}

json of_record(const Chart& c, const PolyForm& F, const std::vector<std::vector<Rational>>& pts, int samples, std::uint64_t seed) {
  PolyForm dF = ext_d(F);
  json ps = json::array();
  int used = 0;
  bool exact = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto v = of_sampling_test(c, dF, pts[i], samples, seed + i);
    used += v.samples_used;
    exact = exact && v.exact;
    if (!v.passed) {
      json w = {{"point", rationals(pts[i])}, {"family", v.family}};
      if (v.counterexample) {
        w["x"] = decomposable_json(v.counterexample->first);
        w["y"] = decomposable_json(v.counterexample->second);
      }
      return record("of", "observable form: copolarity of dF", "fail", w);
    }
    ps.push_back(rationals(pts[i]));
  }
  return record("of", "observable form: copolarity of dF", "pass",
                {{"points", ps}, {"samples", samples}, {"seed", seed}, {"samples_used", used}, {"exact", exact}});
}

json classify_record(const Chart& c, const PolyForm& F) {
  const char* anchor = "Lepage-Dedecker classification of algebraic observable forms";
  auto k = classify_aof_lepage(c, F);
  switch (k.status) {
    case ClassifyStatus::NotAOF: return record("classify", anchor, "not-defined", {{"reason", "form is not algebraic observable"}});
    case ClassifyStatus::NotInClassifiedForm: return record("classify", anchor, "fail", {{"reason", k.reason}});
    case ClassifyStatus::Classified: break;
  }
  return record("classify", anchor, "pass",
                {{"q_part", io::form_text(k.q_part)}, {"p_part", io::form_text(k.p_part)}, {"remainder", io::form_text(k.remainder)}});
}

int cmd_observable(const Options& o, json& r) {
  auto lc = load_chart(o.chart);
  if (o.forms.size() != 1) throw InputError("observable takes exactly one --form");
  PolyForm F = io::load_form(lc.chart, o.forms[0]);
  r = header("observable", lc, o);
  r["form"] = io::form_text(F);
  auto pts = resolve_points(lc.chart, o);
  json a = aof_record(lc.chart, F), of = of_record(lc.chart, F, pts, o.samples, o.seed);
  r["summary"] = {{"OF", of["status"] == "pass" ? "yes" : "no"}, {"AOF", a["status"] == "pass" ? "yes" : "no"}};
  r["records"].push_back(a);
  r["records"].push_back(of);
  if (lc.chart.family == "lepage-dedecker") r["records"].push_back(classify_record(lc.chart, F));
  return finish(r);
}

// ---------------------------------------------------------------------------
// bracket

json not_aof(const std::string& id, const char* anchor, const char* which) {
  return record(id, anchor, "not-defined", {{"reason", std::string(which) + " is not algebraic observable"}});
}

void poisson_records(const Chart& c, const PolyForm& F, const PolyForm& G, json& recs) {
  const char* anchor = "Poisson bracket of algebraic observable forms";
  if (!is_aof(c, F)) return recs.push_back(not_aof("poisson", anchor, "F"));
  if (!is_aof(c, G)) return recs.push_back(not_aof("poisson", anchor, "G"));
  auto b = poisson_bracket_aof(c, F, G);
  recs.push_back(record("poisson", anchor, "pass",
                        {{"value", io::form_text(b.value)}, {"xi_F", vector_json(b.xi_F)}, {"xi_G", vector_json(b.xi_G)}}));
  PolyForm defect = bracket_lie_defect(c, b);
  recs.push_back(record("lie_defect", "d{F,G} + [xi_F, xi_G] hook Omega = 0", pass_fail(defect.is_zero()), {{"defect", io::form_text(defect)}}));
}

json theta_record(const Chart& c, const PolyForm& F, const PolyForm& G) {
  const char* anchor = "theta-corrected bracket";
  if (!c.theta) return record("theta", anchor, "not-defined", {{"reason", "chart has no potential form"}});
  if (!is_aof(c, F)) return not_aof("theta", anchor, "F");
  if (!is_aof(c, G)) return not_aof("theta", anchor, "G");
  return record("theta", anchor, "pass", {{"value", io::form_text(theta_bracket(c, F, G))}});
}

json external_record(const Chart& c, const PolyForm& F, const PolyForm& G) {
  const char* anchor = "external bracket {F,G} = -xi_G hook dF";
  auto s = aof_solve(c, G);
  if (!s.ok()) return not_aof("external", anchor, "G");
  return record("external", anchor, "pass", {{"value", io::form_text(external_bracket(c, F, G))}, {"xi_G", vector_json(*s.xi)}});
}

json complementary_record(const Chart& c, const PolyForm& F, const PolyForm& G) {
  const char* anchor = "bracket of forms of complementary degree";
  auto cp = copolarization_for(c);
  auto b = complementary_bracket(c, F, G, cp ? &*cp : nullptr);
  json choices = json::array();
  for (const auto& ch : b.choices)
    choices.push_back({{"label", ch.label}, {"admissible", ch.admissible}, {"note", ch.note}, {"value", ch.admissible ? ch.value.to_string() : ""}});
  switch (b.status) {
    case BracketStatus::Ok: return record("complementary", anchor, "pass", {{"value", b.value.to_string()}, {"choices", choices}});
    case BracketStatus::NotWellDefined: return record("complementary", anchor, "fail", {{"reason", b.reason}, {"choices", choices}});
    case BracketStatus::NotDefined: break;
  }
  std::string reason = b.reason;
  if (F.degree() + G.degree() + 2 != c.n + 1)
    reason += "; other degree pairs are a partially open problem and are not constructed";
  return record("complementary", anchor, "not-defined", {{"reason", reason}, {"p", F.degree() + 1}, {"q", G.degree() + 1}});
}

json pseudo_record(const Chart& c, const PolyForm& F, const Options& o) {
  const char* anchor = "pseudobracket {H,F}";
  const Polynomial& H = c.require_hamiltonian();
  std::vector<std::vector<Rational>> pts;
  for (const auto& s : o.points) pts.push_back(parse_point(c, s));
  if (pts.empty()) {
    RationalSampler rng(o.seed);
    for (int i = 0; i < 20; ++i) pts.push_back(rng.point(c.dim()));
  }
  std::optional<HamiltonianSolution> sol;
  std::string why;
  for (const auto& p : pts) {
    auto res = hamiltonian_nvector_solve(c, H, p);
    if (res.solution) {
      sol = res.solution;
      break;
    }
    why = res.reason;
  }
  if (!sol) return record("pseudo", anchor, "not-defined", {{"reason", "no Hamiltonian n-vector at the given points: " + why}});
  int p = F.degree() + 1;
  std::vector<PolyForm> gens;
  if (p == c.n) {
    gens = pseudobracket_generators(c, Copolarization{}, p);
  } else {
    auto cp = copolarization_for(c);
    if (!cp) return record("pseudo", anchor, "not-defined", {{"reason", "no copolarization known for this chart"}});
    gens = pseudobracket_generators(c, *cp, p);
  }
  auto v = pseudobracket(c, H, F, gens, *sol);
  json g = json::array();
  for (const auto& x : gens) g.push_back(io::form_text(x));
  json w = {{"point", rationals(sol->point)}, {"pairings", rationals(v.pairings)}, {"generators", g}};
  if (v.value) w["value"] = v.value->to_string();
  if (v.status == BracketStatus::NotWellDefined) {
    w["reason"] = v.reason;
    return record("pseudo", anchor, "fail", w);
  }
  return record("pseudo", anchor, "pass", w);
}

int cmd_bracket(const Options& o, json& r) {
  auto lc = load_chart(o.chart);
  const Chart& c = lc.chart;
  r = header("bracket", lc, o);
  r["kind"] = o.kind;
  json forms = json::array();
  std::vector<PolyForm> fs;
  for (const auto& f : o.forms) {
    fs.push_back(io::load_form(c, f));
    forms.push_back(io::form_text(fs.back()));
  }
  r["forms"] = forms;
  std::size_t need = o.kind == "pseudo" ? 1 : 2;
  if (fs.size() != need) throw InputError("--kind " + o.kind + " takes " + std::to_string(need) + " --form arguments");
  auto& recs = r["records"];
  if (o.kind == "poisson") poisson_records(c, fs[0], fs[1], recs);
  else if (o.kind == "theta") recs.push_back(theta_record(c, fs[0], fs[1]));
  else if (o.kind == "external") recs.push_back(external_record(c, fs[0], fs[1]));
  else if (o.kind == "complementary") recs.push_back(complementary_record(c, fs[0], fs[1]));
  else if (o.kind == "pseudo") recs.push_back(pseudo_record(c, fs[0], o));
  else throw InputError("unknown bracket kind '" + o.kind + "'");
  return finish(r);
}

// ---------------------------------------------------------------------------
// simulate

void simulation_records(const field::ExperimentConfig& cfg, const field::ExperimentReport& rep, json& r) {
  json summary = json::array();
  for (const auto& f : rep.functionals) {
    json w = {{"functional", f.name},
              {"kind", std::string(field::kind_name(f.kind))},
              {"max_drift", f.max_drift},
              {"relative", f.relative},
              {"conserved", f.conserved},
              {"tolerance", cfg.tolerance},
              {"initial", f.values.front()},
              {"final", f.values.back()},
              {"identically_zero", std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0; })}};
    w["expected"] = f.expected ? json(*f.expected ? "conserved" : "drifts") : json("report");
    std::string status = f.expected ? pass_fail(f.matches()) : "not-defined";
    r["records"].push_back(record("conservation:" + f.name, "dynamical observable forms and conserved slice functionals", status, w));
    summary.push_back({{"functional", f.name}, {"max_drift", f.max_drift}, {"conserved", f.conserved}});
  }
  r["records"].push_back(record("lift", "Legendre lift: H = 0 on the lifted curve", pass_fail(rep.max_h_residual <= 1e-12),
                                {{"max_abs_h", rep.max_h_residual}, {"tolerance", 1e-12}}));
  r["summary"] = summary;
  r["steps"] = rep.steps;
  r["dt"] = rep.dt;
}

field::ExperimentConfig config_with_overrides(const std::string& text, const std::optional<double>& tol) {
  auto cfg = io::experiment_from_config(text);
  if (tol) cfg.tolerance = *tol;
  return cfg;
}

int cmd_simulate(const Options& o, json& r) {
  if (o.config.empty()) throw InputError("simulate needs a config file");
  std::string text = io::read_file(o.config);
  auto cfg = config_with_overrides(text, o.tolerance);
  auto rep = field::conservation_experiment(cfg);
  r = json::object();
  r["tool"] = "msym";
  r["version"] = kVersion;
  r["command"] = "simulate";
  r["seed"] = cfg.initial.seed;
  r["chart"] = {{"name", "scalar:2"}, {"hash", io::chart_hash(field::field_chart(cfg.mass, cfg.lambda))}, {"source", "field:" + std::to_string(cfg.mass) + "," + std::to_string(cfg.lambda)}, {"spec", nullptr}};
  r["config"] = text;
  r["tolerance_override"] = o.tolerance ? json(*o.tolerance) : json(nullptr);
  r["records"] = json::array();
  simulation_records(cfg, rep, r);
  std::string csv_path = o.csv;
  if (csv_path.empty() && !o.output.empty()) {
    csv_path = o.output;
    if (csv_path.size() > 5 && csv_path.substr(csv_path.size() - 5) == ".json") csv_path.resize(csv_path.size() - 5);
    csv_path += ".csv";
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + csv_path + "'");
    out << rep.csv();
    r["csv"] = csv_path;
  }
  return finish(r);
}

// ---------------------------------------------------------------------------
// recheck: replay each record's witness through the core modules

struct Replay {
  bool confirmed = false;
  std::string note;
};

Replay same(bool ok, const std::string& note = "") { return {ok, ok ? "" : note}; }

Replay recheck_chart_record(const Chart& c, const json& rec) {
  std::string id = rec["check_id"], status = rec["status"];
  const json& w = rec["witness"];
  if (id == "closed") {
    PolyForm d = ext_d(c.omega);
    return same(io::form_text(d) == w["d_omega"] && (status == "pass") == d.is_zero(), "d Omega differs");
  }
  if (id == "potential") {
    if (!c.theta) return same(status == "not-defined", "chart has no potential form");
    PolyForm d = ext_d(*c.theta) - c.omega;
    return same(io::form_text(d) == w["defect"] && (status == "pass") == d.is_zero(), "d theta - Omega differs");
  }
  if (id == "nondegenerate") {
    if (status == "fail") {
      auto p = rationals_from(w["point"]);
      auto k = rationals_from(w["kernel"]);
      bool nonzero = std::any_of(k.begin(), k.end(), [](const Rational& x) { return x != 0; });
      std::vector<Polynomial> comps;
      for (const auto& x : k) comps.push_back(Polynomial(x));
      bool kills = hook(vector_field(c.frame, comps), c.omega.evaluate(p)).is_zero();
      return same(nonzero && kills, "kernel witness does not annihilate Omega");
    }
    for (const auto& p : w["points"])
      if (!nondegeneracy_check(c, rationals_from(p)).nondegenerate) return {false, "degenerate at a recorded point"};
    return {true, ""};
  }
  return {false, "unknown check " + id};
}

Replay recheck_observable_record(const Chart& c, const PolyForm& F, const json& rec) {
  std::string id = rec["check_id"], status = rec["status"];
  const json& w = rec["witness"];
  if (id == "aof") {
    if (status == "pass") return same((ext_d(F) + hook(vector_from(c, w["xi"]), c.omega)).is_zero(), "xi does not solve dF + xi hook Omega = 0");
    auto s = aof_solve(c, F);
    return same(!s.ok() && io::form_text(s.residual) == w["residual"], "form is algebraic after all");
  }
  if (id == "of") {
    PolyForm dF = ext_d(F);
    if (status == "fail") {
      if (!w.contains("x")) return {false, "no counterexample recorded"};
      return same(confirms_counterexample(c, dF, rationals_from(w["point"]), decomposable_from(c, w["x"]), decomposable_from(c, w["y"])),
                  "counterexample does not separate");
    }
    std::vector<std::vector<Rational>> pts;
    for (const auto& p : w["points"]) pts.push_back(rationals_from(p));
    auto v = is_of(c, F, pts, w["samples"].get<int>(), w["seed"].get<std::uint64_t>());
    return same(v.passed, "sampling test fails on replay");
  }
  if (id == "classify") {
    if (status != "pass") {
      auto k = classify_aof_lepage(c, F);
      bool ok = (status == "not-defined") == (k.status == ClassifyStatus::NotAOF);
      return same(ok && k.status != ClassifyStatus::Classified, "classification status differs");
    }
    auto part = [&](const char* k) { return form_of_degree(c.frame, w[k], F.degree()); };
    PolyForm q = part("q_part"), p = part("p_part"), rem = part("remainder");
    return same((q + p + rem - F).is_zero() && ext_d(rem).is_zero(), "parts do not recombine to F with a closed remainder");
  }
  return {false, "unknown check " + id};
}

Replay recheck_bracket_record(const Chart& c, const std::vector<PolyForm>& fs, const json& rec, const json& report) {
  std::string id = rec["check_id"], status = rec["status"];
  const json& w = rec["witness"];
  auto solves = [&](const PolyForm& G, const VectorField& xi) { return (ext_d(G) + hook(xi, c.omega)).is_zero(); };
  if (status == "not-defined" && id != "complementary" && id != "pseudo") {
    std::string reason = w["reason"];
    if (reason == "F is not algebraic observable") return same(!is_aof(c, fs[0]), "F is algebraic");
    if (reason == "G is not algebraic observable") return same(!is_aof(c, fs[1]), "G is algebraic");
    if (reason == "chart has no potential form") return same(!c.theta, "chart has a potential form");
    return {false, "unknown reason"};
  }
  if (id == "poisson") {
    VectorField a = vector_from(c, w["xi_F"]), b = vector_from(c, w["xi_G"]);
    PolyForm v = form_of_degree(c.frame, w["value"], c.n - 1);
    return same(solves(fs[0], a) && solves(fs[1], b) && hook(wedge(a, b), c.omega) == v, "bracket value does not replay");
  }
  if (id == "lie_defect") {
    PolyForm d = bracket_lie_defect(c, poisson_bracket_aof(c, fs[0], fs[1]));
    return same(io::form_text(d) == w["defect"] && (status == "pass") == d.is_zero(), "defect differs");
  }
  if (id == "theta") return same(io::form_text(theta_bracket(c, fs[0], fs[1])) == w["value"], "value differs");
  if (id == "external") {
    VectorField xi = vector_from(c, w["xi_G"]);
    PolyForm recomputed = -hook(xi, ext_d(fs[0]));
    if (fs[0].degree() == 0) recomputed = PolyForm::scalar(c.frame, -directional_derivative(xi, fs[0].coefficient(MultiIndex{})));
    PolyForm v = form_of_degree(c.frame, w["value"], recomputed.degree());
    return same(solves(fs[1], xi) && recomputed == v, "value does not replay");
  }
  if (id == "complementary") {
    auto cp = copolarization_for(c);
    auto b = complementary_bracket(c, fs[0], fs[1], cp ? &*cp : nullptr);
    bool ok = status == "pass" ? b.status == BracketStatus::Ok && b.value.to_string() == w["value"]
              : status == "fail" ? b.status == BracketStatus::NotWellDefined
                                 : b.status == BracketStatus::NotDefined;
    return same(ok, "status or value differs");
  }
  if (id == "pseudo") {
    if (status == "not-defined") return {true, ""};
    Options o;
    o.seed = report["seed"].get<std::uint64_t>();
    std::string pt;
    for (const auto& x : w["point"]) pt += (pt.empty() ? "" : ",") + x.get<std::string>();
    o.points = {pt};
    json again = pseudo_record(c, fs[0], o);
    return same(again["status"] == status && again["witness"]["pairings"] == w["pairings"], "pairings differ");
  }
  return {false, "unknown check " + id};
}

int cmd_recheck(const Options& o, json& out) {
  json r;
  try {
    r = json::parse(io::read_file(o.recheck));
  } catch (const json::exception& e) {
    throw InputError(std::string("report is not valid JSON: ") + e.what());
  }
  std::string command = r.at("command");
  out = {{"tool", "msym"}, {"version", kVersion}, {"command", "recheck"}, {"rechecked", command}, {"records", json::array()}};
  std::vector<Replay> replays;
  const auto& recs = r.at("records");
  if (command == "simulate") {
    std::optional<double> tol;
    if (!r["tolerance_override"].is_null()) tol = r["tolerance_override"].get<double>();
    auto cfg = config_with_overrides(r.at("config").get<std::string>(), tol);
    json again = json::object();
    again["records"] = json::array();
    simulation_records(cfg, field::conservation_experiment(cfg), again);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      bool ok = i < again["records"].size() && again["records"][i]["status"] == recs[i]["status"];
      if (ok && recs[i]["witness"].contains("max_drift")) {
        double a = recs[i]["witness"]["max_drift"], b = again["records"][i]["witness"]["max_drift"];
        ok = std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
      }
      replays.push_back(same(ok, "replayed run differs"));
    }
  } else {
    auto lc = chart_from_report(r);
    std::vector<PolyForm> fs;
    if (r.contains("form")) fs.push_back(io::parse_form(lc.chart.frame, r["form"]));
    if (r.contains("forms"))
      for (const auto& f : r["forms"]) fs.push_back(io::parse_form(lc.chart.frame, f));
    for (const auto& rec : recs) {
      if (command == "check-chart") replays.push_back(recheck_chart_record(lc.chart, rec));
      else if (command == "observable") replays.push_back(recheck_observable_record(lc.chart, fs.at(0), rec));
      else if (command == "bracket") replays.push_back(recheck_bracket_record(lc.chart, fs, rec, r));
      else throw InputError("cannot recheck command '" + command + "'");
    }
  }
  bool all = true;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    json e = {{"check_id", recs[i]["check_id"]}, {"status", recs[i]["status"]}, {"confirmed", replays[i].confirmed}};
    if (!replays[i].note.empty()) e["note"] = replays[i].note;
    out["records"].push_back(e);
    all = all && replays[i].confirmed;
  }
  out["verdict"] = all ? "confirmed" : "mismatch";
  return all ? 0 : 1;
}

void emit(const json& r, const std::string& path) {
  std::string text = r.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msym: exact checks for multisymplectic charts, observable forms and brackets"};
  app.set_version_flag("--version", kVersion);
  Options o;
  app.add_option("--recheck", o.recheck, "replay the witnesses of a report");
  app.add_option("-o,--output", o.output, "write the report here instead of stdout");

  auto common = [&](CLI::App* s, bool forms) {
    s->add_option("--chart", o.chart, "built-in name (e.g. lepage-dedecker:2,2) or chart spec file")->required();
    if (forms) s->add_option("--form", o.forms, "form text or file (repeat for two forms)");
    s->add_option("--point", o.points, "comma-separated rational coordinates (repeatable)");
    s->add_option("--points", o.npoints, "number of seeded random points when --point is absent")->check(CLI::PositiveNumber);
    s->add_option("--samples", o.samples, "decomposable samples per point")->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "seed for points and sampling");
    s->add_option("-o,--output", o.output, "write the report here instead of stdout");
  };
  auto* check = app.add_subcommand("check-chart", "closedness, potential and nondegeneracy of Omega");
  common(check, false);
  auto* obs = app.add_subcommand("observable", "OF / AOF verdicts for an (n-1)-form");
  common(obs, true);
  auto* br = app.add_subcommand("bracket", "brackets of observable forms");
  common(br, true);
  br->add_option("--kind", o.kind, "poisson, theta, external, complementary or pseudo")
      ->required()
      ->check(CLI::IsMember({"poisson", "theta", "external", "complementary", "pseudo"}));
  auto* sim = app.add_subcommand("simulate", "lattice conservation experiment");
  sim->add_option("config", o.config, "experiment config file")->required();
  sim->add_option("--csv", o.csv, "time-series output (default: next to --output)");
  sim->add_option("--tolerance", o.tolerance, "override the config's drift tolerance");
  sim->add_option("-o,--output", o.output, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json report;
    int code = 0;
    if (!o.recheck.empty()) {
      if (!app.get_subcommands().empty()) throw InputError("--recheck takes no subcommand");
      code = cmd_recheck(o, report);
    } else if (check->parsed()) {
      code = cmd_check_chart(o, report);
    } else if (obs->parsed()) {
      code = cmd_observable(o, report);
    } else if (br->parsed()) {
      code = cmd_bracket(o, report);
    } else if (sim->parsed()) {
      code = cmd_simulate(o, report);
    } else {
      std::cerr << app.help();
      return 2;
    }
    emit(report, o.output);
    return code;
  } catch (const ParseError& e) {
    std::cerr << "msym: parse error: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "msym: " << e.what() << "\n";
  } catch (const json::exception& e) {
    std::cerr << "msym: malformed report: " << e.what() << "\n";
  }
  return 2;
}
