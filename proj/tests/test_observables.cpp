#include <gtest/gtest.h>

#include "generators.hpp"
#include "msym/observables.hpp"

using namespace msym;
using namespace msym::testing;

TEST(Aof, ResubstitutionOnSuccess) {
  RationalSampler rng(101);
  int ok = 0;
  for (const auto& c : {lepage_dedecker_chart(2, 2), dDW_chart(2, 2), lepage_dedecker_chart(3, 1)}) {
    for (int i = 0; i < 20; ++i) {
      auto F = mixed_form(rng, c);
      auto s = aof_solve(c, F);
      if (s.ok()) {
        ++ok;
        EXPECT_TRUE((ext_d(F) + hook(*s.xi, c.omega)).is_zero());
      } else {
        EXPECT_FALSE(s.residual.is_zero());
      }
    }
  }
  EXPECT_GT(ok, 0);
  auto c = lepage_dedecker_chart(2, 1);
  EXPECT_THROW(aof_solve(c, c.d("q1") * Polynomial(1) + PolyForm::basis(c.frame, std::vector<int>{0, 1})), Error);
}

TEST(Aof, ClosedFormsHaveZeroField) {
  RationalSampler rng(102);
  auto c = dDW_chart(2, 2);
  for (int i = 0; i < 5; ++i) {
    auto F = ext_d(PolyForm::scalar(c.frame, random_polynomial(rng, c.frame->vars(), 3, 3)));
    auto s = aof_solve(c, F);
    ASSERT_TRUE(s.ok());
    EXPECT_TRUE(s.xi->is_zero());
  }
}

TEST(Aof, SigmaModelMomentum) {
  // xi for psi(x) d/dy^j hook theta is psi d_{y^j} - p^mu_j d_mu psi d_e
  RationalSampler rng(103);
  for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 1}}) {
    auto c = dDW_chart(n, k);
    for (int j = 1; j <= k; ++j) {
      Polynomial psi = random_in(rng, c, horizontal_names(c), 3, 2);
      std::string y = "y" + std::to_string(j);
      PolyForm F = hook(c.partial(y), c.require_theta()) * psi;
      VectorField expected = c.partial(y) * psi;
      for (int mu = 1; mu <= n; ++mu)
        expected -= c.partial("e") * (c.coordinate("p" + std::to_string(mu) + "_" + std::to_string(j)) * psi.derivative("x" + std::to_string(mu)));
      auto s = aof_solve(c, F);
      ASSERT_TRUE(s.ok());
      EXPECT_EQ(*s.xi, expected);
    }
  }
}

TEST(Aof, ComplexScalarCharge) {
  RationalSampler rng(104);
  auto c0 = scalar_chart(2, potential_in_s("s + s^2"), false);
  Polynomial psi = random_in(rng, c0, {"x0", "x1"}, 3, 2);
  auto P = [&](const Chart& c, const std::string& s) { return c.parse(s); };
  auto current = [&](const Chart& c, int mu) {
    std::string m = std::to_string(mu);
    return P(c, "p" + m + "_1*phi2 - p" + m + "_2*phi1");
  };
  auto j0 = [&](const Chart& c) {
    VectorField j = c.partial("phi1") * P(c, "phi2") - c.partial("phi2") * P(c, "phi1");
    for (int mu = 0; mu < 2; ++mu) {
      std::string m = std::to_string(mu);
      j += c.partial("p" + m + "_1") * P(c, "p" + m + "_2") - c.partial("p" + m + "_2") * P(c, "p" + m + "_1");
    }
    return j;
  };
  // ungauged: psi-weighted charge is algebraic but not dynamical
  PolyForm F0(c0.frame, 1);
  VectorField xi0 = j0(c0) * psi;
  Polynomial dh_expected = Polynomial::constant(0, c0.frame->vars());
  for (int mu = 0; mu < 2; ++mu) {
    Polynomial dpsi = psi.derivative("x" + std::to_string(mu));
    F0 += c0.volume_hook({mu}) * (psi * current(c0, mu));
    xi0 -= c0.partial("e") * (current(c0, mu) * dpsi);
    dh_expected -= current(c0, mu) * dpsi;
  }
  auto s0 = aof_solve(c0, F0);
  ASSERT_TRUE(s0.ok());
  EXPECT_EQ(*s0.xi, xi0);
  EXPECT_EQ(directional_derivative(*s0.xi, *c0.hamiltonian), dh_expected);

  // gauged: F_1 = psi j^mu omega_mu - 1/2 p^{mu nu} dpsi ^ omega_{mu nu}
  auto c1 = scalar_chart(2, potential_in_s("s + s^2"), true);
  Polynomial psi1 = psi.rebased(c1.frame->vars());
  PolyForm F1(c1.frame, 1);
  VectorField xi1 = j0(c1) * psi1;
  PolyForm dpsi = ext_d(c1.frame, psi1);
  for (int mu = 0; mu < 2; ++mu) {
    Polynomial d = psi1.derivative("x" + std::to_string(mu));
    F1 += c1.volume_hook({mu}) * (psi1 * current(c1, mu));
    xi1 -= c1.partial("e") * (current(c1, mu) * d);
    xi1 += c1.partial("a" + std::to_string(mu)) * d;
  }
  // the antisymmetric double sum gives p01 (omega_{01} - omega_{10}) / 2 = p01 omega_{01}
  F1 -= wedge(dpsi, c1.volume_hook({0, 1})) * c1.coordinate("p01");
  auto s1 = aof_solve(c1, F1);
  ASSERT_TRUE(s1.ok()) << s1.residual.to_string();
  EXPECT_EQ(*s1.xi, xi1);
}

TEST(Observable, DeDonderWeylWitness) {
  // d(y1 dy2) = dy1 ^ dy2 is copolar but lies outside the image of xi hook Omega
  auto c = dDW_chart(2, 2);
  RationalSampler rng(105);
  PolyForm F = c.d("y2") * c.coordinate("y1");
  EXPECT_TRUE(is_of(c, F, points(rng, c, 3), 10, 7).passed);
  EXPECT_FALSE(aof_solve(c, F).ok());
  // restriction basis: (a^mu d_mu + b^i d_{y^i}) hook Omega plus omega^{I}_{M} with |I| = |M| = 2
  std::vector<PolyForm> basis;
  for (const auto& nm : {"x1", "x2", "y1", "y2"}) basis.push_back(hook(c.partial(nm), c.omega));
  basis.push_back(wedge(wedge(c.d("y1"), c.d("y2")), c.volume_hook({0, 1})));
  auto m = span_membership(basis, ext_d(F));
  ASSERT_TRUE(m.member);
  EXPECT_EQ(m.coefficients[4], Polynomial(1));
  for (int i = 0; i < 4; ++i) EXPECT_TRUE(m.coefficients[static_cast<std::size_t>(i)].is_zero());
}

TEST(Observable, MomentumFormsAreObservableAndAlgebraic) {
  auto c = lepage_dedecker_chart(2, 2);
  RationalSampler rng(106);
  for (int i = 0; i < 5; ++i) {
    VectorField xi(c.frame, 1);
    for (const auto& q : base_names(c)) xi += c.partial(q) * random_in(rng, c, base_names(c), 2, 1);
    PolyForm F = hook(xi, c.require_theta());
    EXPECT_TRUE(is_of(c, F, points(rng, c, 2), 10, static_cast<std::uint64_t>(i)).passed);
    EXPECT_TRUE(aof_solve(c, F).ok());
  }
  PolyForm bad = c.d("p24") * c.coordinate("p13");
  auto v = is_of(c, bad, points(rng, c, 2), 10, 3);
  EXPECT_FALSE(v.passed);
  ASSERT_TRUE(v.counterexample);
}

TEST(Observable, AlgebraicImpliesObservable) {
  RationalSampler rng(107);
  auto c = dDW_chart(2, 2);
  int tried = 0;
  for (int i = 0; i < 40 && tried < 10; ++i) {
    auto F = mixed_form(rng, c);
    if (!is_aof(c, F)) continue;
    ++tried;
    EXPECT_TRUE(is_of(c, F, points(rng, c, 2), 10, static_cast<std::uint64_t>(i)).passed);
  }
  EXPECT_GT(tried, 0);
}

TEST(Observable, PataplecticOnLepageDedecker) {
  auto c = lepage_dedecker_chart(2, 2);
  RationalSampler rng(108);
  auto pts = points(rng, c, 2);
  int aof = 0;
  for (int i = 0; i < 60; ++i) {
    auto F = mixed_form(rng, c);
    bool a = is_aof(c, F);
    aof += a;
    EXPECT_EQ(is_of(c, F, pts, 8, static_cast<std::uint64_t>(i)).passed, a) << F.to_string();
  }
  EXPECT_GT(aof, 0);
  EXPECT_LT(aof, 60);
}

TEST(Copolar, StandardGenerators) {
  auto c = dDW_chart(2, 1);
  auto cp = standard_copolarization(c);
  ASSERT_EQ(cp.of_degree(1).size(), 3u);
  EXPECT_EQ(cp.of_degree(1)[0], c.d("x1"));
  EXPECT_EQ(cp.of_degree(1)[1], c.d("x2"));
  EXPECT_EQ(cp.of_degree(1)[2], c.d("y1"));
  EXPECT_THROW(standard_copolarization(maxwell_chart()), DomainError);
  RationalSampler rng(109);
  for (const auto& ch : {lepage_dedecker_chart(2, 2), dDW_chart(2, 2)}) {
    auto s = standard_copolarization(ch);
    EXPECT_TRUE(wedge_closure_defects(s).empty());
    for (const auto& m : points(rng, ch, 5)) {
      CopolarityProbe probe(ch, m);
      for (const auto& g : s.of_degree(ch.n)) EXPECT_TRUE(probe.test(g, 5, 1).passed);
    }
  }
  // polynomial coefficients allowed
  auto l = lepage_dedecker_chart(2, 2);
  auto std2 = standard_copolarization(l);
  PolyForm mu = wedge(l.d("q1"), l.d("q3")) * l.parse("q2*p13 + 1");
  auto mem = copolar_membership(std2, mu);
  EXPECT_TRUE(mem.member);
  EXPECT_FALSE(copolar_membership(std2, l.d("p13")).member);
}

TEST(Copolar, MaxwellList) {
  auto c = maxwell_chart();
  auto cp = maxwell_copolarization(c);
  PolyForm da = ext_d(maxwell_a(c)), dpi = ext_d(maxwell_pi(c));
  EXPECT_TRUE(copolar_membership(cp, da).member);
  EXPECT_TRUE(copolar_membership(cp, dpi).member);
  EXPECT_FALSE(copolar_membership(cp, c.d("a0")).member);
  EXPECT_TRUE(copolar_membership(cp, wedge(c.d("x1"), da)).member);
  auto w = copolar_membership(cp, c.volume());
  ASSERT_TRUE(w.member);
  EXPECT_EQ(w.coefficients[0], Polynomial(1));
  for (std::size_t i = 1; i < w.coefficients.size(); ++i) EXPECT_TRUE(w.coefficients[i].is_zero());

  RationalSampler rng(110);
  auto m = rng.point(c.dim());
  CopolarityProbe probe(c, m);
  for (const auto& g : cp.of_degree(4)) EXPECT_TRUE(probe.test(g, 5, 2).passed);
  for (int mu = 0; mu < 4; ++mu) {
    auto v = probe.test(wedge(c.d("a" + std::to_string(mu)), dpi), 5, 3);
    EXPECT_FALSE(v.passed) << mu;
    ASSERT_TRUE(v.counterexample);
    EXPECT_TRUE(confirms_counterexample(c, wedge(c.d("a" + std::to_string(mu)), dpi), m, v.counterexample->first, v.counterexample->second));
  }
  // the list is not closed under wedge: da ^ da is the only missing product, and it is copolar itself
  auto defects = wedge_closure_defects(cp);
  ASSERT_EQ(defects.size(), 1u);
  EXPECT_EQ(defects[0].product, wedge(da, da));
  EXPECT_TRUE(probe.test(wedge(da, da), 5, 4).passed);
}

TEST(Tensor, ZeroFormsAndMaxwell) {
  auto c = dDW_chart(2, 2);
  // y^i against the horizontal omega_mu: solvable
  std::vector<PolyForm> horiz = {c.volume_hook({0}), c.volume_hook({1})};
  for (const auto& y : {"y1", "y2"}) {
    auto r = aof_tensor(c, horiz, PolyForm::scalar(c.frame, c.coordinate(y)));
    ASSERT_TRUE(r.tensor) << y;
    for (std::size_t g = 0; g < 2; ++g)
      EXPECT_TRUE((wedge(r.tensor->phi[g], ext_d(r.tensor->F)) + hook(r.tensor->xi[g], c.omega)).is_zero());
  }
  // against the full standard degree-1 list the dy generator has no solution
  auto cp = standard_copolarization(c);
  auto full = aof_tensor(c, cp, PolyForm::scalar(c.frame, c.coordinate("y1")));
  EXPECT_FALSE(full.tensor);
  EXPECT_FALSE(full.residual.is_zero());
  // a form whose differential is not copolar at all
  auto bad = aof_tensor(c, horiz, PolyForm::scalar(c.frame, c.coordinate("p1_1")));
  EXPECT_FALSE(bad.tensor);

  auto mx = maxwell_chart();
  auto pi = maxwell_pi(mx);
  for (int nu = 0; nu < 4; ++nu) {
    auto r = aof_tensor(mx, {mx.d("x" + std::to_string(nu))}, pi);
    ASSERT_TRUE(r.tensor);
    EXPECT_TRUE((wedge(mx.d("x" + std::to_string(nu)), ext_d(pi)) + hook(r.tensor->xi[0], mx.omega)).is_zero());
  }
}

TEST(Homotopy, PrimitiveOfExactForms) {
  RationalSampler rng(111);
  auto f = make_frame({{"u", CoordKind::Position}, {"v", CoordKind::Position}, {"w", CoordKind::Position}, {"z", CoordKind::Momentum}});
  for (int i = 0; i < 30; ++i) {
    int k = static_cast<int>(rng.integer(0, 2));
    auto a = random_form(rng, f, k, 3, 3);
    auto beta = ext_d(a);
    if (beta.is_zero()) continue;
    EXPECT_EQ(ext_d(homotopy_primitive(beta)), beta);
  }
  EXPECT_THROW(homotopy_primitive(PolyForm::scalar(f, Polynomial(1))), DomainError);
}

TEST(Symplecto, LiftsAndConstants) {
  RationalSampler rng(112);
  for (const auto& c : {lepage_dedecker_chart(2, 1), lepage_dedecker_chart(2, 2), lepage_dedecker_chart(1, 1)}) {
    SCOPED_TRACE(c.name);
    for (int i = 0; i < 5; ++i) {
      SymplectomorphismGenerator g;
      g.kind = SymplectomorphismGenerator::Kind::P;
      for (std::size_t a = 0; a < c.base_coordinates().size(); ++a) g.xi.push_back(random_in(rng, c, base_names(c), 2, 2));
      auto xibar = g.field(c);
      EXPECT_TRUE(symplectomorphism_check(c, xibar));
      EXPECT_EQ(hook(xibar, c.omega), -ext_d(hook(g.base_field(c), c.require_theta())));
    }
    SymplectomorphismGenerator chi;
    for (const auto& A : all_multi_indices(static_cast<int>(c.base_coordinates().size()), c.n)) chi.chi[A] = Polynomial(rng.small());
    EXPECT_TRUE(symplectomorphism_check(c, chi.field(c)));
  }
  auto c = lepage_dedecker_chart(2, 1);
  EXPECT_FALSE(symplectomorphism_check(c, c.partial("q1") * c.coordinate("q1")));
  SymplectomorphismGenerator t;
  t.kind = SymplectomorphismGenerator::Kind::P;
  t.xi = {Polynomial(1), Polynomial(0), Polynomial(0)};
  EXPECT_EQ(t.field(c), c.partial("q1"));
}

TEST(Symplecto, LieDerivativeKeepsObservables) {
  RationalSampler rng(113);
  auto c = lepage_dedecker_chart(2, 1);
  for (int i = 0; i < 10; ++i) {
    SymplectomorphismGenerator g;
    g.kind = SymplectomorphismGenerator::Kind::P;
    for (std::size_t a = 0; a < 3; ++a) g.xi.push_back(random_in(rng, c, base_names(c), 2, 2));
    // chi with chi hook Omega = -dQ for a q-dependent (n-1)-form Q
    PolyForm Q = c.d("q2") * random_in(rng, c, base_names(c), 2, 2);
    auto chi = solve_hook(c, -ext_d(Q));
    ASSERT_TRUE(chi.ok());
    ASSERT_TRUE(symplectomorphism_check(c, *chi.xi));
    PolyForm F = mixed_form(rng, c);
    if (!is_aof(c, F)) continue;
    EXPECT_TRUE(is_aof(c, lie_derivative(g.field(c), F)));
    EXPECT_TRUE(is_aof(c, lie_derivative(*chi.xi, F)));
  }
}

TEST(Classify, Examples) {
  auto c = lepage_dedecker_chart(2, 2);
  // momentum forms: pure xi-part
  for (const auto& q : {"q1", "q3"}) {
    PolyForm F = hook(c.partial(q), c.require_theta());
    auto r = classify_aof_lepage(c, F);
    ASSERT_EQ(r.status, ClassifyStatus::Classified) << r.reason;
    EXPECT_TRUE(r.q_part.is_zero());
    EXPECT_EQ(r.p_part, F);
    EXPECT_TRUE(r.remainder.is_zero());
  }
  // q1 dq2: zeta-part with constant chi
  PolyForm F = c.d("q2") * c.coordinate("q1");
  auto r = classify_aof_lepage(c, F);
  ASSERT_EQ(r.status, ClassifyStatus::Classified);
  EXPECT_TRUE(r.p_part.is_zero());
  for (const auto& [I, v] : r.chi.chi) EXPECT_TRUE(v.is_constant());
  EXPECT_EQ(r.q_part + r.p_part + r.remainder, F);
  EXPECT_TRUE(is_closed(r.remainder));
  // closed forms pass through untouched
  PolyForm closed = ext_d(PolyForm::scalar(c.frame, c.parse("p13*q2 + q4^2")));
  auto z = classify_aof_lepage(c, closed);
  ASSERT_EQ(z.status, ClassifyStatus::Classified);
  EXPECT_TRUE(z.q_part.is_zero());
  EXPECT_TRUE(z.p_part.is_zero());
  EXPECT_EQ(z.remainder, closed);
  EXPECT_EQ(classify_aof_lepage(c, c.d("p24") * c.coordinate("p13")).status, ClassifyStatus::NotAOF);
}

TEST(Classify, RoundTripOnRandomAlgebraicForms) {
  RationalSampler rng(114);
  for (const auto& c : {lepage_dedecker_chart(2, 2), lepage_dedecker_chart(3, 1)}) {
    int done = 0;
    for (int i = 0; i < 40 && done < 10; ++i) {
      PolyForm F = mixed_form(rng, c);
      F += ext_d(random_form(rng, c.frame, c.n - 2, 2, 2));
      auto r = classify_aof_lepage(c, F);
      if (r.status == ClassifyStatus::NotAOF) continue;
      ++done;
      ASSERT_EQ(r.status, ClassifyStatus::Classified) << r.reason;
      EXPECT_EQ(r.q_part + r.p_part + r.remainder, F);
      EXPECT_TRUE(is_closed(r.remainder));
      EXPECT_EQ(hook(r.chi.field(c), c.omega), -ext_d(r.q_part));
      EXPECT_EQ(hook(r.xibar.field(c), c.omega), -ext_d(r.p_part));
    }
    EXPECT_GT(done, 0);
  }
}

TEST(Polarization, ContractionRespectsEquivalence) {
  // X ~ X~ on degree-n generators implies <X cohook a, b> = <X~ cohook a, b> for a, b in degree 1
  auto c = dDW_chart(2, 2);
  auto cp = standard_copolarization(c);
  auto fiber = c.fiber_coordinates();
  std::vector<std::string> names;
  for (int mu = 0; mu < 2; ++mu)
    for (int f : fiber) names.push_back("u" + std::to_string(mu) + "_" + std::to_string(f));
  auto ring = make_variables(names);
  std::vector<VectorField> xs;
  for (int mu = 0; mu < 2; ++mu) {
    VectorField v = PolyMultivector::basis(c.frame, std::vector<int>{c.horizontal[static_cast<std::size_t>(mu)]}, Polynomial::constant(1, ring));
    for (std::size_t j = 0; j < fiber.size(); ++j)
      v.add_term(MultiIndex{fiber[j]}, Polynomial::variable(ring, static_cast<std::size_t>(mu) * fiber.size() + j));
    xs.push_back(v);
  }
  auto X = wedge_all(xs, c.frame);
  const auto& top = cp.of_degree(2);
  Matrix lin(top.size(), names.size());
  for (std::size_t g = 0; g < top.size(); ++g) {
    Polynomial val = pair(X, top[g]).rebased(ring);
    ASSERT_LE(val.total_degree(), 1u);
    for (std::size_t j = 0; j < names.size(); ++j) {
      Exponents e(names.size(), 0);
      e[j] = 1;
      auto it = val.terms().find(e);
      if (it != val.terms().end()) lin(g, j) = it->second;
    }
  }
  auto ker = kernel_basis(lin);
  ASSERT_FALSE(ker.empty());
  RationalSampler rng(115);
  for (int s = 0; s < 20; ++s) {
    auto u = rng.point(names.size());
    auto v = u;
    for (const auto& k : ker) {
      Rational r = rng.small();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += r * k[i];
    }
    auto realize = [&](const std::vector<Rational>& p) {
      return X.map_coefficients([&](const Polynomial& q) { return Polynomial(q.rebased(ring).evaluate(p)); });
    };
    auto A = realize(u), B = realize(v);
    for (const auto& g : top) ASSERT_EQ(pair(A, g), pair(B, g));
    for (const auto& a : cp.of_degree(1))
      for (const auto& b : cp.of_degree(1)) EXPECT_EQ(pair(cohook(A, a), b), pair(cohook(B, a), b));
  }
}

TEST(Pseudofiber, IntegrandVanishes) {
  RationalSampler rng(116);
  {
    auto c = lepage_dedecker_chart(2, 2);
    auto m = rng.point(c.dim());
    auto r = hamiltonian_nvector_solve(c, c.parse("p12 + 1/2*p13^2 - 1/2*p14^2"), m);
    ASSERT_TRUE(r.solution);
    auto pf = pseudofiber_directions(c, *r.solution);
    ASSERT_FALSE(pf.basis.empty());
    for (const auto& q : base_names(c)) {
      PolyForm F = hook(c.partial(q), c.require_theta()) * c.parse("q1 + 2");
      if (!is_aof(c, F)) F = hook(c.partial(q), c.require_theta());
      for (const auto& z : pf.basis) {
        EXPECT_TRUE(hook(z, c.require_theta()).evaluate(m).is_zero());
        EXPECT_TRUE(pseudofiber_integrand_check(c, F, z, *r.solution));
      }
      EXPECT_TRUE(pseudofiber_integrand_check(c, F, VectorField(c.frame, 1), *r.solution));
    }
    EXPECT_THROW(pseudofiber_integrand_check(c, c.d("p24") * c.coordinate("p13"), pf.basis[0], *r.solution), DomainError);
  }
  {
    auto c = scalar_chart(2, potential_in_s("3*s"), false);
    for (int i = 0; i < 10; ++i) {
      auto m = rng.point(c.dim());
      auto r = hamiltonian_nvector_solve(c, *c.hamiltonian, m);
      ASSERT_TRUE(r.solution);
      auto pf = pseudofiber_directions(c, *r.solution);
      PolyForm F(c.frame, 1);
      for (const auto& a : {"phi1", "phi2"}) F += hook(c.partial(a), c.require_theta()) * random_in(rng, c, {"x0", "x1"}, 2, 2);
      for (const auto& x : {"x0", "x1"}) F += hook(c.partial(x), c.require_theta()) * Polynomial(rng.small());
      F += ext_d(c.frame, random_polynomial(rng, c.frame->vars(), 2, 2));
      ASSERT_TRUE(is_aof(c, F));
      // the pseudofiber is trivial on this chart, so only zeta = 0 is available
      EXPECT_TRUE(pf.basis.empty());
      EXPECT_TRUE(pseudofiber_integrand_check(c, F, VectorField(c.frame, 1), *r.solution));
    }
  }
  {
    auto c = lepage_dedecker_chart(2, 2);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
      PolyForm F = mixed_form(rng, c);
      if (!is_aof(c, F)) continue;
      auto m = rng.point(c.dim());
      Polynomial h = c.parse("p12") + random_in(rng, c, {"p13", "p14"}, 3, 2) + random_in(rng, c, base_names(c), 2, 2);
      auto r = hamiltonian_nvector_solve(c, h, m);
      ASSERT_TRUE(r.solution) << r.reason;
      for (const auto& z : pseudofiber_directions(c, *r.solution).basis) {
        ++checked;
        EXPECT_TRUE(pseudofiber_integrand_check(c, F, z, *r.solution));
      }
    }
    EXPECT_GT(checked, 0);
  }
}
