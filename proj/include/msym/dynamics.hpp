#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msym/chart.hpp"
#include "msym/random.hpp"

namespace msym {

// ---------------------------------------------------------------------------
// Polynomial systems in a parameter ring, solved by repeated elimination of
// linear equations and of unknowns that appear linearly with a constant
// coefficient.  This covers the triangular systems produced by contracting
// decomposable n-vectors into the catalog forms.

struct TriangularSolve {
  bool consistent = false;
  std::vector<Polynomial> value;  // each unknown as a polynomial in the free ring
  std::vector<std::size_t> free;  // unknowns left free, in order
  VarsPtr free_ring;
  std::optional<Polynomial> obstruction;  // a nonzero constant equation
};

inline TriangularSolve solve_triangular(const VarsPtr& ring, std::vector<Polynomial> eqs) {
  const std::size_t N = ring->size();
  std::vector<std::optional<Polynomial>> solved(N);
  auto images = [&] {
    std::vector<Polynomial> im(N);
    for (std::size_t i = 0; i < N; ++i) im[i] = solved[i] ? *solved[i] : Polynomial::variable(ring, i);
    return im;
  };
  auto substitute_all = [&](std::size_t u, const Polynomial& expr) {
    std::vector<Polynomial> im(N);
    for (std::size_t i = 0; i < N; ++i) im[i] = Polynomial::variable(ring, i);
    im[u] = expr;
    for (auto& s : solved)
      if (s && s->depends_on(u)) *s = s->compose(im).rebased(ring);
    solved[u] = expr;
  };
  TriangularSolve out;
  while (true) {
    auto im = images();
    std::vector<Polynomial> live;
    for (auto& e : eqs) {
      Polynomial r = e.compose(im).rebased(ring);
      if (r.is_zero()) continue;
      if (r.is_constant()) {
        out.obstruction = r;
        return out;
      }
      live.push_back(std::move(r));
    }
    eqs = live;
    if (eqs.empty()) break;
    std::vector<const Polynomial*> linear;
    for (const auto& e : eqs)
      if (e.total_degree() <= 1) linear.push_back(&e);
    if (!linear.empty()) {
      std::set<std::size_t> used;
      for (auto* e : linear)
        for (const auto& [ex, c] : e->terms())
          for (std::size_t i = 0; i < N; ++i)
            if (ex[i]) used.insert(i);
      std::vector<std::size_t> cols(used.begin(), used.end());
      Matrix m(linear.size(), cols.size());
      std::vector<Rational> rhs(linear.size());
      for (std::size_t r = 0; r < linear.size(); ++r) {
        rhs[r] = -linear[r]->constant_term();
        for (std::size_t j = 0; j < cols.size(); ++j) {
          Exponents ex(N, 0);
          ex[cols[j]] = 1;
          auto it = linear[r]->terms().find(ex);
          if (it != linear[r]->terms().end()) m(r, j) = it->second;
        }
      }
      auto el = eliminate(m, rhs);
      for (std::size_t r = el.pivot_cols.size(); r < linear.size(); ++r)
        if (el.rhs[r] != 0) {
          out.obstruction = Polynomial(el.rhs[r]);
          return out;
        }
      for (std::size_t r = 0; r < el.pivot_cols.size(); ++r) {
        Polynomial expr = Polynomial::constant(el.rhs[r], ring);
        for (std::size_t j = el.pivot_cols[r] + 1; j < cols.size(); ++j)
          if (el.m(r, j) != 0) expr -= Polynomial::variable(ring, cols[j]) * el.m(r, j);
        // pivot columns of later rows are eliminated from this row already
        substitute_all(cols[el.pivot_cols[r]], expr);
      }
      continue;
    }
    bool progressed = false;
    for (const auto& e : eqs) {
      for (std::size_t u = 0; u < N && !progressed; ++u) {
        if (e.degree_in(u) != 1) continue;
        auto parts = e.split_by({u});
        const Polynomial& coeff = parts[Exponents{1}];
        if (!coeff.is_constant()) continue;
        Polynomial rest = parts.count(Exponents{0}) ? parts[Exponents{0}] : Polynomial::constant(0, ring);
        substitute_all(u, rest * Rational(-1 / coeff.constant_term()));
        progressed = true;
      }
      if (progressed) break;
    }
    if (!progressed) throw DomainError("polynomial system is outside the triangular class handled here");
  }
  out.consistent = true;
  std::vector<std::string> free_names;
  for (std::size_t i = 0; i < N; ++i)
    if (!solved[i]) {
      out.free.push_back(i);
      free_names.push_back("t" + std::to_string(out.free.size()));
    }
  out.free_ring = make_variables(free_names);
  std::vector<Polynomial> to_free(N);
  for (std::size_t i = 0; i < N; ++i) to_free[i] = Polynomial::constant(0, out.free_ring);
  for (std::size_t j = 0; j < out.free.size(); ++j) to_free[out.free[j]] = Polynomial::variable(out.free_ring, j);
  for (std::size_t i = 0; i < N; ++i)
    out.value.push_back((solved[i] ? *solved[i] : Polynomial::variable(ring, i)).compose(to_free).rebased(out.free_ring));
  return out;
}

// ---------------------------------------------------------------------------
// Hamiltonian n-vectors X with X hook Omega = (-1)^n dH at a point, in the
// family X_mu = d_{h_mu} + sum_v X_mu^v d_v (h horizontal, v the rest).

struct HamiltonianSolution {
  FramePtr frame;
  int n = 0;
  std::vector<Rational> point;
  std::vector<int> horizontal;
  std::vector<int> vertical;
  VarsPtr free_ring;                 // kernel coordinates t_1..t_r
  std::vector<Polynomial> params;    // X_mu^v, index mu * |vertical| + j, as polynomials in t
  std::vector<std::vector<Rational>> kernel;  // representative(e_j) - base, in parameter space
  bool affine = true;                // false if some components depend nonlinearly on t
  DecomposableNVector base;

  std::size_t kernel_dim() const { return free_ring->size(); }

  std::vector<Rational> parameters(const std::vector<Rational>& t) const {
    std::vector<Rational> out;
    for (const auto& p : params) out.push_back(p.evaluate(t));
    return out;
  }

  DecomposableNVector from_parameters(const std::vector<Rational>& u) const {
    DecomposableNVector x;
    for (int mu = 0; mu < n; ++mu) {
      VectorField v = PolyMultivector::basis(frame, std::vector<int>{horizontal[static_cast<std::size_t>(mu)]});
      for (std::size_t j = 0; j < vertical.size(); ++j)
        v.add_term(MultiIndex{vertical[j]}, Polynomial(u[static_cast<std::size_t>(mu) * vertical.size() + j]));
      x.factors.push_back(v);
    }
    return x;
  }

  DecomposableNVector representative(const std::vector<Rational>& t) const { return from_parameters(parameters(t)); }
};

struct HamiltonianSolveResult {
  std::optional<HamiltonianSolution> solution;  // empty: no solution in the family
  std::string reason;
};

inline Rational orientation_sign(int n) { return n % 2 ? Rational(-1) : Rational(1); }

inline bool is_hamiltonian_nvector(const Chart& chart, const Polynomial& H, const std::vector<Rational>& m,
                                   const DecomposableNVector& x) {
  PolyForm lhs = hook(x.expand(), chart.omega.evaluate(m));
  PolyForm rhs = ext_d(chart.frame, H).evaluate(m) * orientation_sign(chart.n);
  return lhs == rhs;
}

inline HamiltonianSolveResult hamiltonian_nvector_solve(const Chart& chart, const Polynomial& H, const std::vector<Rational>& m) {
  if (static_cast<int>(chart.horizontal.size()) != chart.n) throw DomainError("chart has no horizontal frame");
  if (m.size() != chart.dim()) throw InputError("point has wrong dimension");
  const auto vertical = chart.vertical_coordinates();
  std::vector<std::string> names;
  for (int mu = 0; mu < chart.n; ++mu)
    for (int v : vertical) names.push_back("X" + std::to_string(mu + 1) + "_" + chart.frame->coord(static_cast<std::size_t>(v)).name);
  VarsPtr ring = make_variables(names);
  std::vector<VectorField> xs;
  for (int mu = 0; mu < chart.n; ++mu) {
    VectorField v = PolyMultivector::basis(chart.frame, std::vector<int>{chart.horizontal[static_cast<std::size_t>(mu)]},
                                           Polynomial::constant(1, ring));
    for (std::size_t j = 0; j < vertical.size(); ++j)
      v.add_term(MultiIndex{vertical[j]}, Polynomial::variable(ring, static_cast<std::size_t>(mu) * vertical.size() + j));
    xs.push_back(v);
  }
  PolyForm contracted = hook(wedge_all(xs, chart.frame), chart.omega.evaluate(m));
  PolyForm dh = ext_d(chart.frame, H).evaluate(m) * orientation_sign(chart.n);
  std::vector<Polynomial> eqs;
  for (std::size_t c = 0; c < chart.dim(); ++c) {
    MultiIndex I{static_cast<int>(c)};
    eqs.push_back(contracted.coefficient(I).rebased(ring) - dh.coefficient(I).rebased(ring));
  }
  auto ts = solve_triangular(ring, eqs);
  HamiltonianSolveResult res;
  if (!ts.consistent) {
    res.reason = "no solution in family; obstruction " + ts.obstruction->to_string();
    return res;
  }
  HamiltonianSolution s;
  s.frame = chart.frame;
  s.n = chart.n;
  s.point = m;
  s.horizontal = chart.horizontal;
  s.vertical = vertical;
  s.free_ring = ts.free_ring;
  s.params = ts.value;
  for (const auto& p : s.params)
    if (p.total_degree() > 1) s.affine = false;
  std::vector<Rational> zero(s.kernel_dim());
  auto u0 = s.parameters(zero);
  for (std::size_t j = 0; j < s.kernel_dim(); ++j) {
    auto e = zero;
    e[j] = 1;
    auto u = s.parameters(e);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= u0[i];
    s.kernel.push_back(u);
  }
  s.base = s.from_parameters(u0);
  res.solution = std::move(s);
  return res;
}

// ---------------------------------------------------------------------------
// Sampled copolarity test.  Over each vertical-lift family
//   X_mu = d_{q^{alpha_mu}} + sum_{fiber c} X_mu^c d_c
// the map X -> X hook Omega is affine in the parameters; a(X) must not change
// along the kernel of its linear part.

struct OFVerdict {
  bool passed = true;
  bool exact = true;       // directional derivatives of a along the kernels vanish identically
  int samples_used = 0;
  std::string family;      // offending family when failing
  std::optional<std::pair<DecomposableNVector, DecomposableNVector>> counterexample;
};

class CopolarityProbe {
 public:
  CopolarityProbe(const Chart& chart, std::vector<Rational> m) : chart_(chart), m_(std::move(m)) {
    if (m_.size() != chart.dim()) throw InputError("point has wrong dimension");
    PolyForm omega_m = chart.omega.evaluate(m_);
    auto base = chart.base_coordinates();
    auto fiber = chart.fiber_coordinates();
    for (const auto& alpha : all_multi_indices(static_cast<int>(base.size()), chart.n)) {
      Family f;
      for (int a : alpha) f.alpha.push_back(base[static_cast<std::size_t>(a)]);
      f.fiber = fiber;
      std::vector<std::string> names;
      for (int mu = 0; mu < chart.n; ++mu)
        for (int c : fiber) names.push_back("u" + std::to_string(mu) + "_" + std::to_string(c));
      f.ring = make_variables(names);
      std::vector<VectorField> xs;
      for (int mu = 0; mu < chart.n; ++mu) {
        VectorField v = PolyMultivector::basis(chart.frame, std::vector<int>{f.alpha[static_cast<std::size_t>(mu)]},
                                               Polynomial::constant(1, f.ring));
        for (std::size_t j = 0; j < fiber.size(); ++j)
          v.add_term(MultiIndex{fiber[j]}, Polynomial::variable(f.ring, static_cast<std::size_t>(mu) * fiber.size() + j));
        xs.push_back(v);
      }
      f.x = wedge_all(xs, chart.frame);
      PolyForm contracted = hook(f.x, omega_m);
      Matrix lin(chart.dim(), names.size());
      for (std::size_t c = 0; c < chart.dim(); ++c) {
        Polynomial comp = contracted.coefficient(MultiIndex{static_cast<int>(c)}).rebased(f.ring);
        if (comp.total_degree() > 1) throw DomainError("contraction is not affine on the vertical-lift family");
        for (std::size_t j = 0; j < names.size(); ++j) {
          Exponents ex(names.size(), 0);
          ex[j] = 1;
          auto it = comp.terms().find(ex);
          if (it != comp.terms().end()) lin(c, j) = it->second;
        }
      }
      f.kernel = kernel_basis(lin);
      families_.push_back(std::move(f));
    }
  }

  const std::vector<Rational>& point() const { return m_; }

  OFVerdict test(const PolyForm& a, int samples, std::uint64_t seed) const {
    if (a.degree() != chart_.n) throw DomainError("copolarity test needs an n-form");
    PolyForm a_m = a.evaluate(m_);
    RationalSampler rng(seed);
    OFVerdict v;
    for (const auto& f : families_) {
      if (f.kernel.empty()) continue;
      Polynomial val = pair(f.x, a_m).rebased(f.ring);
      bool exact_ok = true;
      for (const auto& k : f.kernel) {
        Polynomial dd = Polynomial::constant(0, f.ring);
        for (std::size_t i = 0; i < k.size(); ++i)
          if (k[i] != 0) dd += val.derivative(i) * k[i];
        if (!dd.is_zero()) exact_ok = false;
      }
      if (!exact_ok) v.exact = false;
      // keep sampling past the budget when an explicit pair is known to exist
      int budget = exact_ok ? samples : samples + 1000;
      for (int s = 0; s < budget; ++s) {
        ++v.samples_used;
        auto x = rng.point(f.ring->size());
        auto y = x;
        for (const auto& k : f.kernel) {
          Rational r = rng.small();
          for (std::size_t i = 0; i < y.size(); ++i) y[i] += r * k[i];
        }
        if (val.evaluate(x) != val.evaluate(y)) {
          v.passed = false;
          v.family = family_name(f);
          v.counterexample = std::make_pair(realize(f, x), realize(f, y));
          return v;
        }
      }
    }
    return v;
  }

 private:
  struct Family {
    std::vector<int> alpha, fiber;
    VarsPtr ring;
    PolyMultivector x;
    std::vector<std::vector<Rational>> kernel;
  };

  std::string family_name(const Family& f) const {
    std::string s = "D^{";
    for (std::size_t i = 0; i < f.alpha.size(); ++i)
      s += (i ? "," : "") + chart_.frame->coord(static_cast<std::size_t>(f.alpha[i])).name;
    return s + "}";
  }

  DecomposableNVector realize(const Family& f, const std::vector<Rational>& u) const {
    DecomposableNVector x;
    for (int mu = 0; mu < chart_.n; ++mu) {
      VectorField v = PolyMultivector::basis(chart_.frame, std::vector<int>{f.alpha[static_cast<std::size_t>(mu)]});
      for (std::size_t j = 0; j < f.fiber.size(); ++j)
        v.add_term(MultiIndex{f.fiber[j]}, Polynomial(u[static_cast<std::size_t>(mu) * f.fiber.size() + j]));
      x.factors.push_back(v);
    }
    return x;
  }

  const Chart& chart_;
  std::vector<Rational> m_;
  std::vector<Family> families_;
};

inline OFVerdict of_sampling_test(const Chart& chart, const PolyForm& a, const std::vector<Rational>& m, int samples,
                                  std::uint64_t seed) {
  return CopolarityProbe(chart, m).test(a, samples, seed);
}

// Replays a counterexample: equal contractions, different values of a.
inline bool confirms_counterexample(const Chart& chart, const PolyForm& a, const std::vector<Rational>& m,
                                    const DecomposableNVector& x, const DecomposableNVector& y) {
  PolyForm om = chart.omega.evaluate(m);
  auto X = x.expand(), Y = y.expand();
  if (hook(X, om) != hook(Y, om)) return false;
  PolyForm am = a.evaluate(m);
  return pair(X, am) != pair(Y, am);
}

// ---------------------------------------------------------------------------
// Pluecker relation for decomposable n-vectors on a dDW chart:
//   omega(X)^{p-1} omega^{I}_{M}(X) = det(omega^{i_b}_{mu_a}(X)).

enum class PluckerStatus { Holds, Fails, SkippedDegenerate };

struct PluckerVerdict {
  PluckerStatus status = PluckerStatus::Holds;
  std::vector<int> failing_mu, failing_i;
  int checked = 0;
};

// Also accepts a general n-vector, for which the relations usually fail.
inline PluckerVerdict plucker_check(const Chart& chart, const PolyMultivector& X, int p) {
  if (p < 1 || p > chart.n) throw DomainError("Pluecker degree out of range");
  std::set<int> h(chart.horizontal.begin(), chart.horizontal.end());
  std::vector<int> ys;
  for (int b : chart.base_coordinates())
    if (!h.count(b)) ys.push_back(b);
  PluckerVerdict v;
  Rational w = pair(X, chart.volume()).constant_term();
  if (w == 0) {
    v.status = PluckerStatus::SkippedDegenerate;
    return v;
  }
  auto omega_im = [&](const std::vector<int>& I, const std::vector<int>& M) {
    PolyForm dy = PolyForm::scalar(chart.frame, Polynomial(1));
    for (int i : I) dy = wedge(dy, PolyForm::basis(chart.frame, std::vector<int>{ys[static_cast<std::size_t>(i)]}));
    return pair(X, wedge(dy, chart.volume_hook(M))).constant_term();
  };
  for (const auto& M : all_multi_indices(chart.n, p)) {
    for (const auto& I : all_multi_indices(static_cast<int>(ys.size()), p)) {
      Rational lhs = omega_im(I.values(), M.values());
      for (int k = 1; k < p; ++k) lhs *= w;
      Matrix mat(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) mat(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = omega_im({I[static_cast<std::size_t>(b)]}, {M[static_cast<std::size_t>(a)]});
      ++v.checked;
      if (lhs != determinant(mat)) {
        v.status = PluckerStatus::Fails;
        v.failing_mu = M.values();
        v.failing_i = I.values();
        return v;
      }
    }
  }
  return v;
}

inline PluckerVerdict plucker_check(const Chart& chart, const DecomposableNVector& x, int p) {
  return plucker_check(chart, x.expand(), p);
}

// ---------------------------------------------------------------------------
// Pseudofiber directions: vectors xi with (xi hook Omega)(T_X D^n) = 0 for
// every sampled representative X of the Hamiltonian class.

struct PseudofiberReport {
  std::vector<VectorField> basis;
  bool doubling_agrees = false;
  int representatives = 0;
};

namespace detail {

inline Matrix pseudofiber_rows(const Chart& chart, const PolyForm& omega_m, const std::vector<DecomposableNVector>& reps) {
  Matrix rows(0, chart.dim());
  for (const auto& x : reps) {
    for (int mu = 0; mu < chart.n; ++mu) {
      for (std::size_t c = 0; c < chart.dim(); ++c) {
        auto f = x.factors;
        f[static_cast<std::size_t>(mu)] = PolyMultivector::basis(chart.frame, std::vector<int>{static_cast<int>(c)});
        PolyForm beta = hook(wedge_all(f, chart.frame), omega_m);
        std::vector<Rational> row(chart.dim());
        bool any = false;
        for (const auto& [I, v] : beta.terms()) {
          row[static_cast<std::size_t>(I[0])] = v.constant_term();
          any = true;
        }
        if (any) rows.append_row(row);
      }
    }
  }
  return rows;
}

inline std::vector<DecomposableNVector> representative_schedule(const HamiltonianSolution& s, int scale) {
  std::vector<DecomposableNVector> reps;
  std::size_t r = s.kernel_dim();
  std::vector<Rational> t(r);
  reps.push_back(s.representative(t));
  for (std::size_t j = 0; j < r; ++j) {
    for (int sg : {1, -1}) {
      auto u = t;
      u[j] = sg * scale;
      reps.push_back(s.representative(u));
    }
    for (std::size_t i = 0; i < j; ++i) {
      auto u = t;
      u[i] = scale;
      u[j] = scale;
      reps.push_back(s.representative(u));
    }
  }
  return reps;
}

}  // namespace detail

inline PseudofiberReport pseudofiber_directions(const Chart& chart, const HamiltonianSolution& sol) {
  PolyForm om = chart.omega.evaluate(sol.point);
  auto reps = detail::representative_schedule(sol, 1);
  auto doubled = detail::representative_schedule(sol, 2);
  Matrix a = detail::pseudofiber_rows(chart, om, reps);
  Matrix b = detail::pseudofiber_rows(chart, om, doubled);
  PseudofiberReport rep;
  rep.representatives = static_cast<int>(reps.size());
  auto ker = kernel_basis(a);
  for (const auto& k : ker) {
    std::vector<Polynomial> comps;
    for (const auto& x : k) comps.push_back(Polynomial(x));
    rep.basis.push_back(vector_field(chart.frame, comps));
  }
  // same annihilator iff same row space
  rep.doubling_agrees = same_row_space(a, b);
  return rep;
}

inline bool is_vertical(const Chart& chart, const VectorField& v) {
  for (int b : chart.base_coordinates())
    if (!component(v, static_cast<std::size_t>(b)).is_zero()) return false;
  return true;
}

// dF(zeta, X_2, ..., X_n) at the solution point.
inline Rational pseudofiber_integrand(const Chart& chart, const PolyForm& F, const VectorField& zeta, const HamiltonianSolution& sol) {
  auto f = sol.base.factors;
  f[0] = zeta;
  return pair(wedge_all(f, chart.frame), ext_d(F).evaluate(sol.point)).constant_term();
}

}  // namespace msym
