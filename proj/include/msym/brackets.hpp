#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msym/observables.hpp"

namespace msym {

enum class BracketStatus { Ok, NotWellDefined, NotDefined };

inline std::string_view status_name(BracketStatus s) {
  switch (s) {
    case BracketStatus::Ok: return "ok";
    case BracketStatus::NotWellDefined: return "not-well-defined";
    case BracketStatus::NotDefined: return "not-defined";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Pseudobracket {H, F} = (-1)^{(n-p)p} X cohook dF, F of degree p-1.

namespace detail {

inline Rational pseudo_sign(int n, int p) { return ((n - p) * p) % 2 ? Rational(-1) : Rational(1); }

inline PolyMultivector pseudo_multivector(const Chart& chart, const DecomposableNVector& x, const PolyForm& dF_m) {
  int p = dF_m.degree();
  return cohook(x.expand(chart.frame), dF_m) * pseudo_sign(chart.n, p);
}

inline std::vector<Rational> pairings_against(const PolyMultivector& v, const std::vector<PolyForm>& gens,
                                              const std::vector<Rational>& m) {
  std::vector<Rational> out;
  for (const auto& g : gens) out.push_back(pair(v, g.evaluate(m)).constant_term());
  return out;
}

inline void require_solution_for(const Chart& chart, const Polynomial& H, const HamiltonianSolution& sol) {
  if (!same_frame(sol.frame, chart.frame)) throw DomainError("solution and chart live on different frames");
  if (!is_hamiltonian_nvector(chart, H, sol.point, sol.base)) throw DomainError("solution is not Hamiltonian for this H");
}

}  // namespace detail

struct PseudobracketValue {
  BracketStatus status = BracketStatus::Ok;
  int p = 0;
  // class representative computed from sol.base, degree n-p; empty on the AOF route for p < n
  std::optional<PolyMultivector> value;
  std::vector<PolyForm> generators;  // scalar 1 when p = n
  std::vector<Rational> pairings;
  std::string reason;

  Rational scalar() const {
    if (pairings.size() != 1 || generators.empty() || generators[0].degree() != 0)
      throw DomainError("pseudobracket is not a scalar here");
    return pairings[0];
  }
};

inline std::vector<PolyForm> pseudobracket_generators(const Chart& chart, const Copolarization& cp, int p) {
  if (p == chart.n) return {PolyForm::scalar(chart.frame, Polynomial(1))};
  return cp.of_degree(chart.n - p);
}

inline PseudobracketValue pseudobracket(const Chart& chart, const Polynomial& H, const PolyForm& F,
                                        const std::vector<PolyForm>& gens, const HamiltonianSolution& sol) {
  detail::require_solution_for(chart, H, sol);
  int p = F.degree() + 1;
  if (p < 1 || p > chart.n) throw DomainError("pseudobracket needs 0 <= deg F <= n-1");
  for (const auto& g : gens)
    if (g.degree() != chart.n - p) throw DomainError("generator degree must be n-p");
  PolyForm dF = ext_d(F).evaluate(sol.point);
  PseudobracketValue out;
  out.p = p;
  out.generators = gens;
  out.value = detail::pseudo_multivector(chart, sol.base, dF);
  out.pairings = detail::pairings_against(*out.value, gens, sol.point);

  // every representative of [X]^H has to give the same pairings
  for (int scale : {1, 3}) {
    for (const auto& rep : detail::representative_schedule(sol, scale)) {
      auto v = detail::pairings_against(detail::pseudo_multivector(chart, rep, dF), gens, sol.point);
      for (std::size_t g = 0; g < v.size(); ++g) {
        if (v[g] == out.pairings[g]) continue;
        out.status = BracketStatus::NotWellDefined;
        out.reason = "pairing " + std::to_string(g) + " changes along the kernel: " + to_string(out.pairings[g]) + " vs " +
                     to_string(v[g]);
        return out;
      }
    }
  }
  return out;
}

inline PseudobracketValue pseudobracket(const Chart& chart, const Polynomial& H, const PolyForm& F, const Copolarization& cp,
                                        const HamiltonianSolution& sol) {
  return pseudobracket(chart, H, F, pseudobracket_generators(chart, cp, F.degree() + 1), sol);
}

// <xi_F hook dH, phi> = xi_F(phi) hook dH, with the overall minus sign.
inline PseudobracketValue pseudobracket_aof(const Chart& chart, const Polynomial& H, const AOFTensor& t,
                                            const std::vector<Rational>& m) {
  PseudobracketValue out;
  out.p = t.F.degree() + 1;
  out.generators = t.phi;
  for (const auto& xi : t.xi) out.pairings.push_back(-directional_derivative(xi, H).evaluate(m));
  if (out.p == chart.n) out.value = PolyMultivector::scalar(chart.frame, Polynomial(out.pairings.at(0)));
  return out;
}

// ---------------------------------------------------------------------------
// Dynamics relation {H,F} hook dG (Y) = (-1)^{(n-p)(n-q)} {H,G} hook dF (Y)

struct YTerm {
  Rational coeff;
  std::vector<int> factors;  // indices into sol.base.factors
};

inline PolyMultivector build_y(const FramePtr& frame, const DecomposableNVector& x, const std::vector<YTerm>& y, int degree) {
  PolyMultivector out(frame, degree);
  for (const auto& t : y) {
    if (static_cast<int>(t.factors.size()) != degree) throw InputError("Y term has the wrong number of factors");
    std::vector<VectorField> fs;
    for (int i : t.factors) fs.push_back(x.factors.at(static_cast<std::size_t>(i)));
    out += wedge_all(fs, frame) * t.coeff;
  }
  return out;
}

// every k-subset of the factors with coefficient one
inline std::vector<std::vector<YTerm>> y_basis(int n, int k) {
  std::vector<std::vector<YTerm>> out;
  for (const auto& S : all_multi_indices(n, k)) out.push_back({YTerm{Rational(1), S.values()}});
  return out;
}

struct RelationVerdict {
  bool holds = false;
  int p = 0, q = 0;
  Rational sign;
  Rational lhs, rhs;
};

inline RelationVerdict dynamics_relation_check(const Chart& chart, const Polynomial& H, const PolyForm& F, const PolyForm& G,
                                               const HamiltonianSolution& sol, const std::vector<YTerm>& y) {
  detail::require_solution_for(chart, H, sol);
  const int n = chart.n;
  RelationVerdict v;
  v.p = F.degree() + 1;
  v.q = G.degree() + 1;
  if (v.p < 1 || v.q < 1 || v.p > n || v.q > n) throw DomainError("form degrees must lie in 0..n-1");
  if (v.p + v.q < n) throw DomainError("relation needs p + q >= n");
  v.sign = ((n - v.p) * (n - v.q)) % 2 ? Rational(-1) : Rational(1);
  PolyForm dF = ext_d(F).evaluate(sol.point);
  PolyForm dG = ext_d(G).evaluate(sol.point);
  PolyMultivector hf = detail::pseudo_multivector(chart, sol.base, dF);
  PolyMultivector hg = detail::pseudo_multivector(chart, sol.base, dG);
  PolyMultivector Y = build_y(chart.frame, sol.base, y, v.p + v.q - n);
  v.lhs = pair(Y, hook(hf, dG)).constant_term();
  v.rhs = v.sign * pair(Y, hook(hg, dF)).constant_term();
  v.holds = v.lhs == v.rhs;
  return v;
}

// ---------------------------------------------------------------------------
// Poisson bracket of algebraic observable (n-1)-forms.

struct AOFBracket {
  PolyForm value;
  VectorField xi_F, xi_G;
};

inline VectorField require_aof(const Chart& chart, const PolyForm& F, const char* which) {
  auto s = aof_solve(chart, F);
  if (!s.ok()) throw DomainError(std::string(which) + " is not algebraic observable: residual " + s.residual.to_string());
  return *s.xi;
}

inline AOFBracket poisson_bracket_aof(const Chart& chart, const PolyForm& F, const PolyForm& G) {
  AOFBracket b;
  b.xi_F = require_aof(chart, F, "F");
  b.xi_G = require_aof(chart, G, "G");
  b.value = hook(wedge(b.xi_F, b.xi_G), chart.omega);
  return b;
}

// d{F,G} + [xi_F, xi_G] hook Omega
inline PolyForm bracket_lie_defect(const Chart& chart, const AOFBracket& b) {
  return ext_d(b.value) + hook(lie_bracket(b.xi_F, b.xi_G), chart.omega);
}

struct JacobiDefect {
  PolyForm cyclic;  // {{F,G},H} + {{G,H},F} + {{H,F},G}
  PolyForm exact;   // d(xi_F ^ xi_G ^ xi_H hook Omega)
  PolyForm defect() const { return cyclic - exact; }
};

inline JacobiDefect jacobi_defect(const Chart& chart, const PolyForm& F, const PolyForm& G, const PolyForm& K) {
  auto br = [&](const PolyForm& a, const PolyForm& b) { return poisson_bracket_aof(chart, a, b).value; };
  JacobiDefect j;
  j.cyclic = br(br(F, G), K) + br(br(G, K), F) + br(br(K, F), G);
  if (chart.n >= 2) {
    auto xf = require_aof(chart, F, "F");
    auto xg = require_aof(chart, G, "G");
    auto xk = require_aof(chart, K, "H");
    j.exact = ext_d(hook(wedge(wedge(xf, xg), xk), chart.omega));
  } else {
    j.exact = PolyForm(chart.frame, chart.n - 1);
  }
  return j;
}

// {F,G}_theta = {F,G} + d(xi_F hook G - xi_G hook F + xi_F ^ xi_G hook theta).
// The signs of the first two terms are the opposite of the footnote's
// printed formula; only this choice gives a zero Jacobi sum with the hook
// conventions used here (with the printed one it fails on random triples,
// see theta_bracket_as_printed).
namespace detail {
inline PolyForm theta_bracket_signed(const Chart& chart, const PolyForm& F, const PolyForm& G, const Rational& s) {
  const PolyForm& theta = chart.require_theta();
  if (ext_d(theta) != chart.omega) throw DomainError("theta bracket needs Omega = d theta");
  auto b = poisson_bracket_aof(chart, F, G);
  if (chart.n < 2) return b.value;
  PolyForm corr = (hook(b.xi_F, G) - hook(b.xi_G, F)) * s + hook(wedge(b.xi_F, b.xi_G), theta);
  return b.value + ext_d(corr);
}
}  // namespace detail

inline PolyForm theta_bracket(const Chart& chart, const PolyForm& F, const PolyForm& G) {
  return detail::theta_bracket_signed(chart, F, G, Rational(1));
}

inline PolyForm theta_bracket_as_printed(const Chart& chart, const PolyForm& F, const PolyForm& G) {
  return detail::theta_bracket_signed(chart, F, G, Rational(-1));
}

inline PolyForm theta_jacobi_sum(const Chart& chart, const PolyForm& F, const PolyForm& G, const PolyForm& K,
                                 bool as_printed = false) {
  auto br = [&](const PolyForm& a, const PolyForm& b) {
    return as_printed ? theta_bracket_as_printed(chart, a, b) : theta_bracket(chart, a, b);
  };
  return br(br(F, G), K) + br(br(G, K), F) + br(br(K, F), G);
}

// ---------------------------------------------------------------------------
// External bracket between an observable (p-1)-form and an AOF (n-1)-form.
// Ordered as {F, G} = -xi_G hook dF with G algebraic; the reversed pair is
// {G, F} = xi_G hook dF, the value printed for the sigma model.

inline PolyForm external_bracket(const Chart& chart, const PolyForm& F, const PolyForm& G) {
  if (G.degree() != chart.n - 1) throw DomainError("external bracket: second argument must be an (n-1)-form");
  VectorField xi = require_aof(chart, G, "G");
  return -hook(xi, ext_d(F));
}

inline PolyForm external_bracket_reversed(const Chart& chart, const PolyForm& G, const PolyForm& F) {
  return -external_bracket(chart, F, G);
}

// ---------------------------------------------------------------------------
// phi = a^1 ^ ... ^ a^{n-p} ^ b^1 ^ ... ^ b^{n-q} ^ chi, constant divisors.

struct FormDivision {
  bool ok = false;
  bool unique = false;  // otherwise chi is one solution modulo the ideal of the divisors
  PolyForm chi;
  PolyForm residual;
};

inline FormDivision form_division(const PolyForm& phi, const std::vector<PolyForm>& a, const std::vector<PolyForm>& b) {
  const FramePtr& frame = phi.frame();
  PolyForm A = PolyForm::scalar(frame, Polynomial(1));
  for (const auto* list : {&a, &b})
    for (const auto& f : *list) {
      if (f.degree() != 1) throw DomainError("divisors must be 1-forms");
      if (!f.has_constant_coefficients()) throw DomainError("divisors must have constant coefficients");
      A = wedge(A, f);
    }
  if (A.is_zero()) throw DomainError("divisors are linearly dependent");
  int k = phi.degree() - A.degree();
  if (k < 0) throw DomainError("form degree is below the number of divisors");
  auto unknowns = all_multi_indices(static_cast<int>(frame->dim()), k);
  std::map<MultiIndex, std::size_t> rows;
  std::vector<PolyForm> images;
  for (const auto& J : unknowns) {
    images.push_back(wedge(A, PolyForm::basis(frame, J.values())));
    for (const auto& [I, c] : images.back().terms()) rows.try_emplace(I, rows.size());
  }
  for (const auto& [I, c] : phi.terms()) rows.try_emplace(I, rows.size());
  Matrix m(rows.size(), unknowns.size());
  for (std::size_t j = 0; j < unknowns.size(); ++j)
    for (const auto& [I, c] : images[j].terms()) m(rows[I], j) = c.constant_term();
  std::vector<Polynomial> rhs(rows.size(), Polynomial(0));
  for (const auto& [I, c] : phi.terms()) rhs[rows[I]] = c;
  auto s = solve_linear(m, rhs);
  FormDivision out;
  out.chi = PolyForm(frame, k);
  for (std::size_t j = 0; j < unknowns.size(); ++j) out.chi.add_term(unknowns[j], s.x[j]);
  out.residual = phi - wedge(A, out.chi);
  out.ok = s.consistent && out.residual.is_zero();
  out.unique = rank(m) == unknowns.size();
  return out;
}

// ---------------------------------------------------------------------------
// Scalar bracket for p + q = n + 1 by smearing with linear functions of
// the horizontal coordinates:
//   {dF~, dG~} = df^1 ^ ... ^ df^{n-p} ^ dg^1 ^ ... ^ dg^{n-q} ^ {F, G}.

struct SmearingChoice {
  std::vector<PolyForm> df, dg;
  std::string label;
  bool admissible = false;
  std::string note;
  Polynomial value;
};

struct ComplementaryBracket {
  BracketStatus status = BracketStatus::NotDefined;
  Polynomial value;
  std::vector<SmearingChoice> choices;
  std::string reason;
};

// Coordinate assignments first, then two shears by the one unused
// horizontal coordinate so the differentials are not all coordinate ones.
inline std::vector<SmearingChoice> smearing_choices(const Chart& chart, int nf, int ng, std::size_t max_coordinate) {
  std::vector<SmearingChoice> out;
  const int n = chart.n;
  auto dx = [&](int mu) { return PolyForm::basis(chart.frame, std::vector<int>{chart.horizontal[static_cast<std::size_t>(mu)]}); };
  auto hname = [&](int mu) { return chart.frame->coord(static_cast<std::size_t>(chart.horizontal[static_cast<std::size_t>(mu)])).name; };
  std::vector<std::pair<std::vector<int>, std::vector<int>>> picks;
  for (const auto& S : all_multi_indices(n, nf)) {
    std::vector<int> rest;
    for (int mu = 0; mu < n; ++mu)
      if (!S.contains(mu)) rest.push_back(mu);
    for (const auto& T : all_multi_indices(static_cast<int>(rest.size()), ng)) {
      std::vector<int> g;
      for (int t : T) g.push_back(rest[static_cast<std::size_t>(t)]);
      picks.emplace_back(S.values(), g);
    }
  }
  for (const auto& [f, g] : picks) {
    if (out.size() >= max_coordinate) break;
    SmearingChoice c;
    for (int mu : f) {
      c.df.push_back(dx(mu));
      c.label += "f=" + hname(mu) + " ";
    }
    for (int mu : g) {
      c.dg.push_back(dx(mu));
      c.label += "g=" + hname(mu) + " ";
    }
    out.push_back(std::move(c));
  }
  if (picks.empty() || nf + ng != n - 1) return out;
  const auto& [f0, g0] = picks.front();
  int unused = -1;
  for (int mu = 0; mu < n; ++mu)
    if (std::find(f0.begin(), f0.end(), mu) == f0.end() && std::find(g0.begin(), g0.end(), mu) == g0.end()) unused = mu;
  for (int shear = 1; shear <= 2; ++shear) {
    SmearingChoice c;
    int k = 0;
    auto sheared = [&](int mu) {
      Rational s = shear == 1 ? Rational(1) : Rational(k % 2 ? -1 : 2);
      ++k;
      return dx(mu) + dx(unused) * s;
    };
    for (int mu : f0) c.df.push_back(sheared(mu));
    for (int mu : g0) c.dg.push_back(sheared(mu));
    c.label = "shear " + std::to_string(shear) + " by " + hname(unused);
    out.push_back(std::move(c));
  }
  return out;
}

inline ComplementaryBracket complementary_bracket(const Chart& chart, const PolyForm& F, const PolyForm& G,
                                                  const Copolarization* cp = nullptr, std::size_t max_coordinate = 12) {
  const int n = chart.n;
  const int p = F.degree() + 1, q = G.degree() + 1;
  ComplementaryBracket out;
  if (p < 1 || q < 1 || p > n || q > n || p + q != n + 1) {
    out.reason = "defined only for p + q = n + 1";
    return out;
  }
  if (static_cast<int>(chart.horizontal.size()) != n) throw DomainError("chart has no horizontal frame");
  out.choices = smearing_choices(chart, n - p, n - q, max_coordinate);
  std::optional<Polynomial> first;
  for (auto& c : out.choices) {
    PolyForm sf = wedge_all(c.df, chart.frame);
    PolyForm sg = wedge_all(c.dg, chart.frame);
    if (cp && n - p > 0 && !copolar_membership(*cp, sf).member) {
      c.note = "df not copolar";
      continue;
    }
    if (cp && n - q > 0 && !copolar_membership(*cp, sg).member) {
      c.note = "dg not copolar";
      continue;
    }
    PolyForm Ft = wedge(sf, F), Gt = wedge(sg, G);
    if (!is_aof(chart, Ft) || !is_aof(chart, Gt)) {
      c.note = "smeared form not algebraic observable";
      continue;
    }
    auto b = poisson_bracket_aof(chart, Ft, Gt);
    auto div = form_division(b.value, c.df, c.dg);
    if (!div.ok) {
      out.status = BracketStatus::NotDefined;
      out.reason = c.label + ": bracket of smeared forms not divisible, residual " + div.residual.to_string();
      return out;
    }
    c.admissible = true;
    c.value = div.chi.coefficient(MultiIndex{});
    if (!first) {
      first = c.value;
    } else if (*first != c.value) {
      out.status = BracketStatus::NotWellDefined;
      out.reason = "value depends on the smearing: " + first->to_string() + " vs " + c.value.to_string() + " (" + c.label + ")";
      return out;
    }
  }
  if (!first) {
    out.reason = "no admissible smearing";
    return out;
  }
  out.status = BracketStatus::Ok;
  out.value = *first;
  return out;
}

// Kanatchikov's xi_F hook dG for a multivector xi_F with xi_F hook Omega = dF.
inline std::optional<PolyForm> kanatchikov_bracket(const Chart& chart, const PolyMultivector& xi, const PolyForm& F,
                                                   const PolyForm& G) {
  if (xi.degree() > chart.omega.degree() || hook(xi, chart.omega) != ext_d(F)) return std::nullopt;
  PolyForm dG = ext_d(G);
  if (xi.degree() > dG.degree()) throw DomainError("multivector degree exceeds dG");
  return hook(xi, dG);
}

}  // namespace msym
