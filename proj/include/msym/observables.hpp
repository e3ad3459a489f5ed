#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msym/dynamics.hpp"

namespace msym {

// ---------------------------------------------------------------------------
// xi hook Omega = beta, Omega with constant coefficients, beta polynomial.

struct HookSolve {
  std::optional<VectorField> xi;
  PolyForm residual;  // beta - xi hook Omega for the best pivot solution; zero on success
  bool ok() const { return xi.has_value(); }
};

inline const PolyForm& require_constant_omega(const Chart& chart) {
  if (!chart.omega.has_constant_coefficients())
    throw DomainError("chart '" + chart.name + "': only constant-coefficient multisymplectic forms are supported");
  return chart.omega;
}

inline HookSolve solve_hook(const Chart& chart, const PolyForm& beta) {
  const PolyForm& omega = require_constant_omega(chart);
  if (beta.degree() != chart.n) throw DomainError("right-hand side must be an n-form");
  std::vector<MultiIndex> extra;
  for (const auto& [I, c] : beta.terms()) extra.push_back(I);
  auto cm = contraction_matrix(omega, extra);
  if (!kernel_basis(cm.k).empty()) throw DomainError("multisymplectic form is degenerate; xi would not be unique");
  std::vector<Polynomial> rhs(cm.rows.size(), Polynomial::constant(0, chart.frame->vars()));
  for (const auto& [I, c] : beta.terms()) rhs[*cm.row(I)] = c;
  auto sol = solve_linear(cm.k, rhs);
  VectorField xi = vector_field(chart.frame, sol.x);
  HookSolve out;
  out.residual = beta - hook(xi, omega);
  if (sol.consistent) out.xi = xi;
  return out;
}

// dF + xi_F hook Omega = 0
inline HookSolve aof_solve(const Chart& chart, const PolyForm& F) {
  if (F.degree() != chart.n - 1) throw DomainError("algebraic observable forms have degree n-1");
  return solve_hook(chart, -ext_d(F));
}

inline bool is_aof(const Chart& chart, const PolyForm& F) { return aof_solve(chart, F).ok(); }

// Copolarity of dF at each point, merged.
inline OFVerdict is_of(const Chart& chart, const PolyForm& F, const std::vector<std::vector<Rational>>& points, int samples,
                       std::uint64_t seed) {
  if (F.degree() != chart.n - 1) throw DomainError("observable forms have degree n-1 here");
  PolyForm dF = ext_d(F);
  OFVerdict all;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto v = of_sampling_test(chart, dF, points[i], samples, seed + i);
    all.samples_used += v.samples_used;
    all.exact = all.exact && v.exact;
    if (!v.passed) {
      v.samples_used = all.samples_used;
      v.exact = all.exact;
      return v;
    }
  }
  return all;
}

inline bool symplectomorphism_check(const Chart& chart, const VectorField& xi) {
  return ext_d(hook(xi, chart.omega)).is_zero();
}

// ---------------------------------------------------------------------------
// Copolarizations as finite lists of constant generators per degree.

struct Copolarization {
  FramePtr frame;
  int n = 0;
  std::map<int, std::vector<PolyForm>> generators;  // degree -> generators
  std::map<int, std::vector<std::string>> labels;

  const std::vector<PolyForm>& of_degree(int p) const {
    static const std::vector<PolyForm> none;
    auto it = generators.find(p);
    return it == generators.end() ? none : it->second;
  }
  void add(int p, PolyForm g, std::string label) {
    generators[p].push_back(std::move(g));
    labels[p].push_back(std::move(label));
  }
};

struct Membership {
  bool member = false;
  std::vector<Polynomial> coefficients;  // one per generator, when member
};

// mu in the span of the generators with polynomial coefficients; generators constant.
inline Membership span_membership(const std::vector<PolyForm>& gens, const PolyForm& mu) {
  Membership m;
  if (mu.is_zero()) {
    m.member = true;
    m.coefficients.assign(gens.size(), Polynomial(0));
    return m;
  }
  std::map<MultiIndex, std::size_t> rows;
  for (const auto& g : gens) {
    if (!g.has_constant_coefficients()) throw DomainError("copolar generators must have constant coefficients");
    if (g.degree() != mu.degree()) throw DomainError("generator degree mismatch");
    for (const auto& [I, c] : g.terms()) rows.try_emplace(I, rows.size());
  }
  for (const auto& [I, c] : mu.terms()) rows.try_emplace(I, rows.size());
  Matrix a(rows.size(), gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (const auto& [I, c] : gens[j].terms()) a(rows[I], j) = c.constant_term();
  std::vector<Polynomial> rhs(rows.size(), Polynomial(0));
  for (const auto& [I, c] : mu.terms()) rhs[rows[I]] = c;
  auto s = solve_linear(a, rhs);
  m.member = s.consistent;
  if (m.member) m.coefficients = s.x;
  return m;
}

inline Membership copolar_membership(const Copolarization& cp, const PolyForm& mu) {
  if (mu.degree() > cp.n || mu.degree() < 1) throw DomainError("copolar degree out of range");
  const auto& g = cp.of_degree(mu.degree());
  if (g.empty()) {
    Membership m;
    m.member = mu.is_zero();
    return m;
  }
  return span_membership(g, mu);
}

struct ClosureDefect {
  int p, q;
  std::size_t i, j;  // generator indices in degree p and q
  PolyForm product;
};

// Products of generators that leave the span of the target degree.
inline std::vector<ClosureDefect> wedge_closure_defects(const Copolarization& cp) {
  std::vector<ClosureDefect> out;
  for (int p = 1; p <= cp.n; ++p)
    for (int q = p; p + q <= cp.n; ++q) {
      const auto& a = cp.of_degree(p);
      const auto& b = cp.of_degree(q);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = (p == q ? i : 0); j < b.size(); ++j) {
          PolyForm w = wedge(a[i], b[j]);
          if (!copolar_membership(cp, w).member) out.push_back({p, q, i, j, w});
        }
    }
  return out;
}

inline bool is_lepage_family(const Chart& c) {
  return c.family == "lepage-dedecker" || c.family == "lepage-dedecker-split" || c.family == "dDW";
}

inline Copolarization standard_copolarization(const Chart& chart) {
  if (!is_lepage_family(chart)) throw DomainError("standard copolarization needs a Lepage-Dedecker or dDW chart");
  Copolarization cp;
  cp.frame = chart.frame;
  cp.n = chart.n;
  auto base = chart.base_coordinates();
  for (int p = 1; p <= chart.n; ++p)
    for (const auto& A : all_multi_indices(static_cast<int>(base.size()), p)) {
      std::vector<int> idx;
      std::string label;
      for (int a : A) {
        idx.push_back(base[static_cast<std::size_t>(a)]);
        label += "d" + chart.frame->coord(static_cast<std::size_t>(idx.back())).name;
      }
      cp.add(p, PolyForm::basis(chart.frame, idx), label);
    }
  const PolyForm& omega = require_constant_omega(chart);
  for (std::size_t c = 0; c < chart.dim(); ++c) {
    PolyForm g = hook(PolyMultivector::basis(chart.frame, std::vector<int>{static_cast<int>(c)}), omega);
    if (!g.is_zero()) cp.add(chart.n, g, "d_" + chart.frame->coord(c).name + " hook Omega");
  }
  return cp;
}

// The list of the Maxwell example.  The degree-4 items d/dx^mu hook theta are
// 3-forms as written; their differentials -d/dx^mu hook Omega are used instead.
inline Copolarization maxwell_copolarization(const Chart& chart) {
  if (chart.family != "maxwell") throw DomainError("maxwell copolarization needs the Maxwell chart");
  Copolarization cp;
  cp.frame = chart.frame;
  cp.n = 4;
  auto dx = [&](std::vector<int> mus) {
    std::vector<int> idx;
    for (int m : mus) idx.push_back(chart.horizontal[static_cast<std::size_t>(m)]);
    return PolyForm::basis(chart.frame, idx);
  };
  auto xs = [](const MultiIndex& M) {
    std::string s;
    for (int m : M) s += "dx" + std::to_string(m);
    return s;
  };
  PolyForm da = ext_d(maxwell_a(chart));
  PolyForm dpi = ext_d(maxwell_pi(chart));
  for (const auto& M : all_multi_indices(4, 1)) cp.add(1, dx(M.values()), xs(M));
  for (const auto& M : all_multi_indices(4, 2)) cp.add(2, dx(M.values()), xs(M));
  cp.add(2, da, "da");
  for (const auto& M : all_multi_indices(4, 3)) cp.add(3, dx(M.values()), xs(M));
  for (int m = 0; m < 4; ++m) cp.add(3, wedge(dx({m}), da), "dx" + std::to_string(m) + "^da");
  cp.add(3, dpi, "dpi");
  cp.add(4, chart.volume(), "omega");
  for (const auto& M : all_multi_indices(4, 2)) cp.add(4, wedge(dx(M.values()), da), xs(M) + "^da");
  for (int m = 0; m < 4; ++m) cp.add(4, wedge(dx({m}), dpi), "dx" + std::to_string(m) + "^dpi");
  for (int m = 0; m < 4; ++m)
    cp.add(4, -hook(chart.partial("x" + std::to_string(m)), chart.omega), "d(d_x" + std::to_string(m) + " hook theta)");
  return cp;
}

// ---------------------------------------------------------------------------
// xi_F(phi) for (p-1)-forms: phi ^ dF + xi_F(phi) hook Omega = 0.

struct AOFTensor {
  PolyForm F;
  std::vector<PolyForm> phi;
  std::vector<VectorField> xi;
};

struct AOFTensorResult {
  std::optional<AOFTensor> tensor;
  std::size_t failed_generator = 0;
  PolyForm residual;
};

inline AOFTensorResult aof_tensor(const Chart& chart, const std::vector<PolyForm>& phis, const PolyForm& F) {
  int p = F.degree() + 1;
  if (p < 1 || p > chart.n) throw DomainError("aof tensor needs 0 <= deg F <= n-1");
  PolyForm dF = ext_d(F);
  AOFTensor t;
  t.F = F;
  AOFTensorResult r;
  for (std::size_t g = 0; g < phis.size(); ++g) {
    if (phis[g].degree() != chart.n - p) throw DomainError("generator has the wrong degree");
    auto s = solve_hook(chart, -wedge(phis[g], dF));
    if (!s.ok()) {
      r.failed_generator = g;
      r.residual = s.residual;
      return r;
    }
    t.phi.push_back(phis[g]);
    t.xi.push_back(*s.xi);
  }
  r.tensor = std::move(t);
  return r;
}

inline AOFTensorResult aof_tensor(const Chart& chart, const Copolarization& cp, const PolyForm& F) {
  int p = F.degree() + 1;
  if (p == chart.n) return aof_tensor(chart, {PolyForm::scalar(chart.frame, Polynomial(1))}, F);
  return aof_tensor(chart, cp.of_degree(chart.n - p), F);
}

// ---------------------------------------------------------------------------
// Polynomial homotopy operator with base point 0: for closed beta of degree
// k >= 1, d(H beta) = beta.

inline PolyForm homotopy_primitive(const PolyForm& beta) {
  if (beta.degree() < 1) throw DomainError("homotopy primitive needs a form of degree >= 1");
  const auto& frame = beta.frame();
  VarsPtr vars = frame->vars();
  PolyMultivector euler(frame, 1);
  for (std::size_t a = 0; a < frame->dim(); ++a) euler.add_term(MultiIndex{static_cast<int>(a)}, Polynomial::variable(vars, a));
  PolyForm out(frame, beta.degree() - 1);
  for (const auto& [I, c] : beta.terms()) {
    Polynomial scaled = Polynomial::constant(0, vars);
    Polynomial cv = c.rebased(vars);
    for (const auto& [e, v] : cv.terms()) {
      unsigned deg = 0;
      for (auto x : e) deg += x;
      scaled += Polynomial::monomial(vars, e, v / Rational(deg + static_cast<unsigned>(beta.degree())));
    }
    out += hook(euler, PolyForm::basis(frame, I.values(), scaled));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Infinitesimal symplectomorphisms of the canonical Lepage-Dedecker chart.

namespace detail {

// multi-index over base coordinates -> coordinate index of its momentum, read off theta
inline std::map<MultiIndex, int> momentum_table(const Chart& chart) {
  const PolyForm& th = chart.require_theta();
  std::map<MultiIndex, int> out;
  for (const auto& [I, c] : th.terms()) {
    std::optional<int> which;
    for (std::size_t v = 0; v < chart.dim(); ++v)
      if (c == Polynomial::variable(chart.frame->vars(), v)) which = static_cast<int>(v);
    if (!which) throw DomainError("potential form is not of the form sum p_I dq^I");
    out[I] = *which;
  }
  return out;
}

inline void require_canonical(const Chart& chart) {
  if (chart.family != "lepage-dedecker") throw DomainError("needs the canonical Lepage-Dedecker chart");
}

}  // namespace detail

// Pi^beta_alpha = sum_B sum_mu delta^beta_{B_mu} p_{B with B_mu -> alpha} d/dp_B
inline VectorField pi_field(const Chart& chart, int beta, int alpha) {
  detail::require_canonical(chart);
  auto table = detail::momentum_table(chart);
  VectorField v(chart.frame, 1);
  for (const auto& [B, pb] : table) {
    auto b = B.values();
    for (std::size_t mu = 0; mu < b.size(); ++mu) {
      if (b[mu] != beta) continue;
      auto r = b;
      r[mu] = alpha;
      auto s = sort_with_sign(r);
      std::set<int> uniq(s.index.begin(), s.index.end());
      if (uniq.size() != s.index.size()) continue;
      auto it = table.find(MultiIndex(s.index));
      Polynomial p = Polynomial::variable(chart.frame->vars(), static_cast<std::size_t>(it->second)) * Rational(s.sign);
      v.add_term(MultiIndex{pb}, p);
    }
  }
  return v;
}

struct SymplectomorphismGenerator {
  enum class Kind { Q, P };
  Kind kind = Kind::Q;
  std::map<MultiIndex, Polynomial> chi;  // Q-type: momentum multi-index -> chi_I(q)
  std::vector<Polynomial> xi;            // P-type: xi^alpha(q), one per base coordinate

  VectorField field(const Chart& chart) const {
    detail::require_canonical(chart);
    auto base = chart.base_coordinates();
    VectorField v(chart.frame, 1);
    if (kind == Kind::Q) {
      auto table = detail::momentum_table(chart);
      for (const auto& [I, c] : chi) v.add_term(MultiIndex{table.at(I)}, c);
      return v;
    }
    if (xi.size() != base.size()) throw InputError("P-type generator needs one component per base coordinate");
    for (std::size_t a = 0; a < base.size(); ++a) {
      v.add_term(MultiIndex{base[a]}, xi[a]);
      for (std::size_t b = 0; b < base.size(); ++b) {
        Polynomial dxi = xi[a].derivative(static_cast<std::size_t>(base[b]));
        if (!dxi.is_zero()) v -= pi_field(chart, base[b], base[a]) * dxi;
      }
    }
    return v;
  }

  // the underlying vector field on the base, sum xi^alpha d_alpha
  VectorField base_field(const Chart& chart) const {
    auto base = chart.base_coordinates();
    VectorField v(chart.frame, 1);
    for (std::size_t a = 0; a < xi.size(); ++a) v.add_term(MultiIndex{base[a]}, xi[a]);
    return v;
  }
};

inline bool depends_only_on(const Polynomial& f, const std::vector<int>& allowed, std::size_t dim) {
  std::set<int> ok(allowed.begin(), allowed.end());
  for (std::size_t v = 0; v < dim; ++v)
    if (!ok.count(static_cast<int>(v)) && f.depends_on(v)) return false;
  return true;
}

enum class ClassifyStatus { Classified, NotAOF, NotInClassifiedForm };

struct AOFClassification {
  ClassifyStatus status = ClassifyStatus::NotAOF;
  std::string reason;
  SymplectomorphismGenerator chi, xibar;
  VectorField xi_F;
  PolyForm q_part, p_part, remainder;
};

// F = Q^zeta + P_xi + closed remainder on the canonical chart.
inline AOFClassification classify_aof_lepage(const Chart& chart, const PolyForm& F) {
  detail::require_canonical(chart);
  AOFClassification out;
  auto s = aof_solve(chart, F);
  if (!s.ok()) {
    out.reason = "not algebraic observable; residual " + s.residual.to_string();
    return out;
  }
  out.xi_F = *s.xi;
  auto base = chart.base_coordinates();
  out.xibar.kind = SymplectomorphismGenerator::Kind::P;
  for (int a : base) {
    Polynomial c = component(out.xi_F, static_cast<std::size_t>(a));
    if (!depends_only_on(c, base, chart.dim())) {
      out.status = ClassifyStatus::NotInClassifiedForm;
      out.reason = "base component along " + chart.frame->coord(static_cast<std::size_t>(a)).name + " depends on momenta";
      return out;
    }
    out.xibar.xi.push_back(c.rebased(chart.frame->vars()));
  }
  VectorField chi = out.xi_F - out.xibar.field(chart);
  out.chi.kind = SymplectomorphismGenerator::Kind::Q;
  auto table = detail::momentum_table(chart);
  for (const auto& [I, pc] : table) {
    Polynomial c = component(chi, static_cast<std::size_t>(pc));
    if (!depends_only_on(c, base, chart.dim())) {
      out.status = ClassifyStatus::NotInClassifiedForm;
      out.reason = "momentum component depends on momenta";
      return out;
    }
    if (!c.is_zero()) out.chi.chi[I] = c;
  }
  for (int a : base)
    if (!component(chi, static_cast<std::size_t>(a)).is_zero()) throw DomainError("internal: base part left in chi");
  PolyForm chi_omega = hook(chi, chart.omega);
  if (!is_closed(chi_omega)) {
    out.status = ClassifyStatus::NotInClassifiedForm;
    out.reason = "chi hook Omega is not closed";
    return out;
  }
  out.p_part = hook(out.xibar.base_field(chart), chart.require_theta());
  out.q_part = chi_omega.is_zero() ? PolyForm(chart.frame, chart.n - 1) : homotopy_primitive(-chi_omega);
  out.remainder = F - out.q_part - out.p_part;
  if (!is_closed(out.remainder)) {
    out.status = ClassifyStatus::NotInClassifiedForm;
    out.reason = "remainder is not closed";
    return out;
  }
  out.status = ClassifyStatus::Classified;
  return out;
}

// dF(zeta, X_2, ..., X_n) = 0 for F algebraic observable and zeta a pseudofiber direction.
inline bool pseudofiber_integrand_check(const Chart& chart, const PolyForm& F, const VectorField& zeta,
                                        const HamiltonianSolution& sol) {
  if (!is_aof(chart, F)) throw DomainError("integrand identity needs an algebraic observable form");
  return pseudofiber_integrand(chart, F, zeta, sol) == 0;
}

}  // namespace msym
