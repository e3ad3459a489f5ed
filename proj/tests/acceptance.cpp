// Acceptance run: one PASS/FAIL line per criterion, with the measured
// quantities underneath.  Tolerances and budgets are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "generators.hpp"
#include "msym/brackets.hpp"
#include "msym/field_lab.hpp"

using namespace msym;
using namespace msym::testing;

namespace {

// budgets in seconds
constexpr double kExactItemBudget = 10;
constexpr double kStructuralBudget = 300;
constexpr double kDichotomyBudget = 120;
constexpr double kFieldRunBudget = 60;

// field-lab tolerances
constexpr double kChargeDrift = 1e-5;
constexpr double kMinOrder = 1.9;
constexpr double kLiftRounding = 1e-12;
constexpr double kLinearSmearedDrift = 1e-4;
constexpr double kNonlinearSmearedDrift = 1e-2;
constexpr double kReversibility = 1e-10;

constexpr int kStructuralInstances = 100;
constexpr int kDichotomyCandidates = 200;
constexpr int kPluckerSamples = 100;
constexpr int kIntegrandPairs = 50;
constexpr int kCrossMethodForms = 50;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Item {
  std::string name;
  bool ok;
  std::string detail;
};

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)), t0_(Clock::now()) {}

  // runs one item; an exception counts as failure
  void item(const std::string& name, const std::function<bool(std::string&)>& body, double budget = 0) {
    auto t = Clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("threw: ") + e.what();
    }
    double s = since(t);
    if (budget > 0 && s > budget) {
      ok = false;
      detail += " [over budget]";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.2f s)", s);
    items_.push_back({name, ok, detail + buf});
  }

  bool finish(double budget = 0) {
    double s = since(t0_);
    bool ok = budget <= 0 || s <= budget;
    for (const auto& i : items_) ok = ok && i.ok;
    std::printf("%s  criterion %d: %s  [%.1f s%s]\n", ok ? "PASS" : "FAIL", id_, title_.c_str(), s,
                budget > 0 ? (s <= budget ? "" : ", over budget") : "");
    for (const auto& i : items_) std::printf("      %s %s: %s\n", i.ok ? "ok " : "BAD", i.name.c_str(), i.detail.c_str());
    std::fflush(stdout);
    return ok;
  }

 private:
  int id_;
  std::string title_;
  Clock::time_point t0_;
  std::vector<Item> items_;
};

std::string count(int good, int total) { return std::to_string(good) + "/" + std::to_string(total); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

PolyForm base_volume_coordinate(const Chart& c) {
  std::vector<int> rest(c.horizontal.begin() + 1, c.horizontal.end());
  return PolyForm::basis(c.frame, rest, Polynomial::variable(c.frame->vars(), static_cast<std::size_t>(c.horizontal[0])));
}

std::vector<VectorField> constant_vectors(RationalSampler& rng, const FramePtr& f, std::size_t k) {
  std::vector<VectorField> v;
  for (std::size_t i = 0; i < k; ++i) v.push_back(random_constant_vector(rng, f));
  return v;
}

std::vector<std::string> momentum_names(const Chart& c) {
  std::vector<std::string> out;
  for (const auto& n : hamiltonian_variables(c))
    if (c.frame->coord(static_cast<std::size_t>(c.index(n))).kind == CoordKind::Momentum) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------

bool criterion_exact() {
  Criterion cr(1, "printed values, exact rational arithmetic");

  cr.item("{H, x1 dx2^...^dxn} = 1", [](std::string& d) {
    RationalSampler rng(1001);
    int good = 0, total = 0;
    for (const auto& c : {lepage_dedecker_split_chart(2, 1), lepage_dedecker_split_chart(2, 2), dDW_chart(3, 1), dDW_chart(2, 2)}) {
      auto cp = standard_copolarization(c);
      for (int it = 0; it < 5; ++it) {
        Polynomial H = random_hamiltonian(rng, c);
        auto sol = solve_at_random_point(rng, c, H);
        auto v = pseudobracket(c, H, base_volume_coordinate(c), cp, sol);
        good += v.status == BracketStatus::Ok && v.scalar() == 1;
        ++total;
      }
    }
    d = count(good, total) + " random (H, X) on 4 charts";
    return good == total;
  }, kExactItemBudget);

  cr.item("dy^i|Gamma = sum dH/dp^mu_i dx^mu|Gamma", [](std::string& d) {
    RationalSampler rng(1002);
    int good = 0, total = 0;
    for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{2, 3}}) {
      auto c = dDW_chart(n, k);
      for (int it = 0; it < 5; ++it) {
        Polynomial H = random_hamiltonian(rng, c);
        auto sol = solve_at_random_point(rng, c, H);
        for (const auto& X : sol.base.factors)
          for (int i = 1; i <= k; ++i) {
            std::string si = std::to_string(i);
            Rational rhs = 0;
            for (int mu = 1; mu <= n; ++mu)
              rhs += H.derivative("p" + std::to_string(mu) + "_" + si).evaluate(sol.point) *
                     directional_derivative(X, c.coordinate("x" + std::to_string(mu))).evaluate(sol.point);
            good += directional_derivative(X, c.coordinate("y" + si)).evaluate(sol.point) == rhs;
            ++total;
          }
      }
    }
    d = count(good, total) + " (point, factor, field) triples";
    return good == total;
  }, kExactItemBudget);

  cr.item("xi of P_{j,psi} and {P_{j,psi}, y^i} = delta psi", [](std::string& d) {
    RationalSampler rng(1003);
    int good = 0, total = 0;
    for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 2}}) {
      auto c = dDW_chart(n, k);
      for (int rep = 0; rep < 3; ++rep) {
        Polynomial psi = random_in(rng, c, horizontal_names(c), 3, 2);
        for (int j = 1; j <= k; ++j) {
          std::string y = "y" + std::to_string(j);
          PolyForm P = hook(c.partial(y), c.require_theta()) * psi;
          VectorField expected = c.partial(y) * psi;
          for (int mu = 1; mu <= n; ++mu)
            expected -= c.partial("e") * (c.coordinate("p" + std::to_string(mu) + "_" + std::to_string(j)) * psi.derivative("x" + std::to_string(mu)));
          auto s = aof_solve(c, P);
          good += s.ok() && *s.xi == expected;
          ++total;
          for (int i = 1; i <= k; ++i) {
            PolyForm yi = PolyForm::scalar(c.frame, c.coordinate("y" + std::to_string(i)));
            good += external_bracket_reversed(c, P, yi) == PolyForm::scalar(c.frame, i == j ? psi : Polynomial());
            ++total;
          }
        }
      }
    }
    d = count(good, total) + " fields and brackets";
    return good == total;
  }, kExactItemBudget);

  cr.item("Maxwell {pi, a} = 1, Kanatchikov pairing n/2 = 2", [](std::string& d) {
    auto c = maxwell_chart();
    auto cp = maxwell_copolarization(c);
    auto b = complementary_bracket(c, maxwell_pi(c), maxwell_a(c), &cp);
    PolyMultivector xi(c.frame, 2);
    for (int mu = 0; mu < 4; ++mu) xi += wedge(c.partial("a" + std::to_string(mu)), c.partial("x" + std::to_string(mu))) * Rational(1, 2);
    auto k = kanatchikov_bracket(c, xi, maxwell_pi(c), maxwell_a(c));
    d = "{pi,a} = " + (b.status == BracketStatus::Ok ? b.value.to_string() : std::string(status_name(b.status))) +
        ", Kanatchikov = " + (k ? k->to_string() : "undefined");
    return b.status == BracketStatus::Ok && b.value == Polynomial(1) && k && *k == PolyForm::scalar(c.frame, Polynomial(2));
  }, kExactItemBudget);

  cr.item("gauged charge: xi_1 solves dF_1 + xi_1 hook Omega_1 = 0, dH_1(xi_1) = 0", [](std::string& d) {
    RationalSampler rng(1005);
    auto c = scalar_chart(2, potential_in_s("s + s^2"), true);
    int good = 0, total = 0;
    for (int it = 0; it < 5; ++it) {
      Polynomial psi = random_in(rng, c, {"x0", "x1"}, 3, 2);
      PolyForm F(c.frame, 1);
      VectorField xi = c.partial("phi1") * c.coordinate("phi2") - c.partial("phi2") * c.coordinate("phi1");
      for (int mu = 0; mu < 2; ++mu) {
        std::string m = std::to_string(mu);
        xi += c.partial("p" + m + "_1") * c.coordinate("p" + m + "_2") - c.partial("p" + m + "_2") * c.coordinate("p" + m + "_1");
      }
      xi = xi * psi;
      for (int mu = 0; mu < 2; ++mu) {
        std::string m = std::to_string(mu);
        Polynomial j = c.parse("p" + m + "_1*phi2 - p" + m + "_2*phi1");
        Polynomial dpsi = psi.derivative("x" + m);
        F += c.volume_hook({mu}) * (psi * j);
        xi -= c.partial("e") * (j * dpsi);
        xi += c.partial("a" + m) * dpsi;
      }
      F -= wedge(ext_d(c.frame, psi), c.volume_hook({0, 1})) * c.coordinate("p01");
      good += (ext_d(F) + hook(xi, c.omega)).is_zero();
      good += directional_derivative(xi, *c.hamiltonian).is_zero();
      auto s = aof_solve(c, F);
      good += s.ok() && *s.xi == xi;
      total += 3;
    }
    d = count(good, total) + " identities over random psi";
    return good == total;
  }, kExactItemBudget);

  cr.item("dp^1 = (-1)^n (d_phi ^ d_2 ^ ... ^ d_n) hook Omega at n = 2", [](std::string& d) {
    auto c = dDW_chart(2, 1);
    PolyForm lhs = hook(wedge(c.partial("y1"), c.partial("x2")), c.omega);
    auto s = scalar_chart(2, potential_in_s("s"), false);
    PolyForm lhs2 = hook(wedge(s.partial("phi1"), s.partial("x1")), s.omega);
    d = "dDW: " + lhs.to_string() + ", scalar chart: " + lhs2.to_string();
    // the scalar chart counts from x0, so the momentum conjugate to the omitted direction is p0_1
    return lhs == c.d("p1_1") && lhs2 == s.d("p0_1");
  }, kExactItemBudget);

  cr.item("chi hook Omega = -dQ^zeta, xibar hook Omega = -dP_xi", [](std::string& d) {
    RationalSampler rng(1007);
    int good = 0, total = 0;
    for (const auto& c : {lepage_dedecker_chart(2, 1), lepage_dedecker_chart(2, 2), lepage_dedecker_chart(3, 1)}) {
      auto base = c.base_coordinates();
      std::vector<std::size_t> qs(base.begin(), base.end());
      for (int it = 0; it < 10; ++it) {
        SymplectomorphismGenerator g;
        g.kind = SymplectomorphismGenerator::Kind::P;
        for (std::size_t a = 0; a < base.size(); ++a) g.xi.push_back(random_polynomial(rng, c.frame->vars(), 2, 2, qs));
        good += hook(g.field(c), c.omega) == -ext_d(hook(g.base_field(c), c.require_theta()));
        // Q^zeta from a random base (n-1)-form; chi read off from -dQ^zeta
        PolyForm Q(c.frame, c.n - 1);
        for (const auto& I : all_multi_indices(static_cast<int>(base.size()), c.n - 1)) {
          std::vector<int> idx;
          for (int a : I) idx.push_back(base[static_cast<std::size_t>(a)]);
          Q += PolyForm::basis(c.frame, idx, random_polynomial(rng, c.frame->vars(), 1, 2, qs));
        }
        SymplectomorphismGenerator chi;
        PolyForm dQ = ext_d(Q);
        for (const auto& [I, v] : dQ.terms()) chi.chi[I] = -v;
        good += hook(chi.field(c), c.omega) == -ext_d(Q);
        total += 2;
      }
    }
    d = count(good, total) + " generators on 3 charts";
    return good == total;
  }, kExactItemBudget);

  return cr.finish();
}

// ---------------------------------------------------------------------------

bool criterion_structural() {
  Criterion cr(2, "structural identities on random instances");

  cr.item("d o d = 0", [](std::string& d) {
    RationalSampler rng(2001);
    auto c = lepage_dedecker_chart(2, 2);
    int good = 0;
    for (int i = 0; i < kStructuralInstances; ++i) good += ext_d(ext_d(random_form(rng, c.frame, static_cast<int>(rng.integer(0, 3)), 4, 3))).is_zero();
    d = count(good, kStructuralInstances) + " forms on a 10-dimensional chart";
    return good == kStructuralInstances;
  });

  cr.item("hook adjunction vs determinant oracle", [](std::string& d) {
    RationalSampler rng(2002);
    auto f = dDW_chart(2, 2).frame;
    int good = 0;
    for (int i = 0; i < kStructuralInstances; ++i) {
      int l = static_cast<int>(rng.integer(1, 4)), k = static_cast<int>(rng.integer(0, l));
      auto mu = random_form(rng, f, l, 5, 0);
      auto xs = constant_vectors(rng, f, static_cast<std::size_t>(k)), ys = constant_vectors(rng, f, static_cast<std::size_t>(l - k));
      auto all = xs;
      all.insert(all.end(), ys.begin(), ys.end());
      good += pair(wedge_all(ys, f), hook(wedge_all(xs, f), mu)).evaluate({}) == determinant_pairing(mu, all, {});
    }
    d = count(good, kStructuralInstances);
    return good == kStructuralInstances;
  });

  cr.item("cohook adjunction vs shuffle oracle", [](std::string& d) {
    RationalSampler rng(2003);
    auto f = dDW_chart(2, 2).frame;
    int good = 0;
    for (int i = 0; i < kStructuralInstances; ++i) {
      int k = static_cast<int>(rng.integer(1, 4)), l = static_cast<int>(rng.integer(0, k));
      auto mu = random_form(rng, f, l, 3, 0), nu = random_form(rng, f, k - l, 3, 0);
      auto xs = constant_vectors(rng, f, static_cast<std::size_t>(k));
      good += pair(cohook(wedge_all(xs, f), mu), nu).evaluate({}) == shuffle_wedge_pairing(mu, nu, xs, {});
    }
    d = count(good, kStructuralInstances);
    return good == kStructuralInstances;
  });

  cr.item("d{F,G} + [xi_F, xi_G] hook Omega = 0", [](std::string& d) {
    RationalSampler rng(2004);
    int good = 0, total = 0;
    for (const auto& c : {lepage_dedecker_chart(2, 2), dDW_chart(2, 2), lepage_dedecker_chart(3, 1), dDW_chart(3, 1)})
      for (int it = 0; it < kStructuralInstances / 4; ++it) {
        good += bracket_lie_defect(c, poisson_bracket_aof(c, random_aof(rng, c), random_aof(rng, c))).is_zero();
        ++total;
      }
    d = count(good, total) + " pairs on 4 charts";
    return good == total && total >= kStructuralInstances;
  });

  cr.item("Jacobi cyclic sum = d(xi_F ^ xi_G ^ xi_H hook Omega)", [](std::string& d) {
    RationalSampler rng(2005);
    int good = 0, total = 0;
    for (const auto& c : {lepage_dedecker_chart(2, 1), dDW_chart(2, 2)})
      for (int it = 0; it < kStructuralInstances / 2; ++it) {
        good += jacobi_defect(c, random_aof(rng, c), random_aof(rng, c), random_aof(rng, c)).defect().is_zero();
        ++total;
      }
    d = count(good, total) + " triples";
    return good == total && total >= kStructuralInstances;
  });

  cr.item("theta-bracket Jacobi sum = 0", [](std::string& d) {
    RationalSampler rng(2006);
    int good = 0, total = 0;
    for (const auto& c : {lepage_dedecker_chart(2, 1), dDW_chart(2, 2)})
      for (int it = 0; it < kStructuralInstances / 2; ++it) {
        good += theta_jacobi_sum(c, random_aof(rng, c), random_aof(rng, c), random_aof(rng, c)).is_zero();
        ++total;
      }
    d = count(good, total) + " triples";
    return good == total && total >= kStructuralInstances;
  });

  cr.item("{H,F} hook dG (Y) = sign {H,G} hook dF (Y)", [](std::string& d) {
    RationalSampler rng(2007);
    int good = 0, total = 0;
    auto c = dDW_chart(2, 2);
    for (int it = 0; it < 8; ++it) {
      Polynomial H = random_hamiltonian(rng, c);
      auto sol = solve_at_random_point(rng, c, H);
      for (int p = 1; p <= 2; ++p)
        for (int q = 1; q <= 2; ++q) {
          PolyForm F = random_form(rng, c.frame, p - 1, 3, 2), G = random_form(rng, c.frame, q - 1, 3, 2);
          auto schedule = y_basis(2, p + q - 2);
          std::vector<YTerm> mix;
          for (const auto& y : schedule) mix.push_back({rng.small(), y[0].factors});
          schedule.push_back(mix);
          for (const auto& y : schedule) {
            good += dynamics_relation_check(c, H, F, G, sol, y).holds;
            ++total;
          }
        }
    }
    auto l = lepage_dedecker_chart(2, 2);
    for (int it = 0; it < 6; ++it) {
      Polynomial H = l.parse("p12") + random_in(rng, l, {"p13", "p14", "q1", "q3"}, 4, 2);
      auto sol = solve_at_random_point(rng, l, H);
      for (int p = 1; p <= 2; ++p)
        for (int q = 1; q <= 2; ++q) {
          PolyForm F = random_form(rng, l.frame, p - 1, 3, 2), G = random_form(rng, l.frame, q - 1, 3, 2);
          for (const auto& y : y_basis(2, p + q - 2)) {
            good += dynamics_relation_check(l, H, F, G, sol, y).holds;
            ++total;
          }
        }
    }
    d = count(good, total) + " (H, F, G, Y) samples";
    return good == total && total >= kStructuralInstances;
  });

  cr.item("pseudobracket independent of the representative", [](std::string& d) {
    RationalSampler rng(2008);
    int good = 0, total = 0, moved = 0;
    for (const auto& c : {lepage_dedecker_split_chart(2, 2), dDW_chart(2, 2), dDW_chart(3, 1), dDW_chart(2, 3)}) {
      auto cp = standard_copolarization(c);
      for (int it = 0; it < kStructuralInstances / 4; ++it) {
        Polynomial H = random_hamiltonian(rng, c);
        auto sol = solve_at_random_point(rng, c, H);
        PolyForm F = random_aof(rng, c);
        auto v = pseudobracket(c, H, F, cp, sol);
        // a representative the internal schedule never visits
        std::vector<Rational> t;
        for (std::size_t j = 0; j < sol.kernel_dim(); ++j) t.push_back(rng.small() * Rational(7, 5));
        auto rep = sol.representative(t);
        moved += sol.kernel_dim() > 0;
        PolyForm dF = ext_d(F).evaluate(sol.point);
        bool same = is_hamiltonian_nvector(c, H, sol.point, rep) &&
                    detail::pairings_against(detail::pseudo_multivector(c, rep, dF), v.generators, sol.point) == v.pairings;
        good += v.status == BracketStatus::Ok && same;
        ++total;
      }
    }
    d = count(good, total) + " (H, F, representative), " + std::to_string(moved) + " with a nontrivial kernel";
    return good == total && moved > 0;
  });

  return cr.finish(kStructuralBudget);
}

// ---------------------------------------------------------------------------

bool criterion_dichotomy() {
  Criterion cr(3, "OF <=> AOF on Lambda^2 T*R^4, dDW witness, Pluecker");

  cr.item("OF verdict agrees with AOF solvability", [](std::string& d) {
    auto c = lepage_dedecker_chart(2, 2);
    RationalSampler rng(3001);
    auto pts = points(rng, c, 2);
    int agree = 0, aof = 0;
    for (int i = 0; i < kDichotomyCandidates; ++i) {
      PolyForm F = mixed_form(rng, c);
      bool a = is_aof(c, F);
      aof += a;
      agree += is_of(c, F, pts, 8, static_cast<std::uint64_t>(i)).passed == a;
    }
    d = count(agree, kDichotomyCandidates) + " agree, " + std::to_string(aof) + " algebraic";
    return agree == kDichotomyCandidates && aof > 0 && aof < kDichotomyCandidates;
  });

  cr.item("witness family on dDW(2,2): OF yes, AOF no", [](std::string& d) {
    auto c = dDW_chart(2, 2);
    RationalSampler rng(3002);
    int good = 0, total = 0;
    for (const auto& [a, b] : {std::pair{"y1", "y2"}, std::pair{"y2", "y1"}})
      for (int it = 0; it < 5; ++it) {
        // y^a dy^b plus an algebraic form
        Rational k = rng.small();
        PolyForm F = c.d(b) * (c.coordinate(a) * Polynomial(k == 0 ? Rational(1) : k));
        if (it > 0) F += random_aof(rng, c);
        good += is_of(c, F, points(rng, c, 2), 10, static_cast<std::uint64_t>(it)).passed && !aof_solve(c, F).ok();
        ++total;
      }
    d = count(good, total) + " members";
    return good == total;
  });

  cr.item("Pluecker relations on random decomposables", [](std::string& d) {
    RationalSampler rng(3003);
    int holds = 0, checked = 0, skipped = 0;
    const std::vector<std::pair<int, int>> shapes = {{2, 2}, {3, 2}, {3, 3}};
    for (int s = 0; checked < kPluckerSamples && s < 4 * kPluckerSamples; ++s) {
      auto [n, k] = shapes[static_cast<std::size_t>(s) % shapes.size()];
      auto c = dDW_chart(n, k);
      DecomposableNVector x;
      for (int mu = 0; mu < n; ++mu) {
        auto v = random_constant_vector(rng, c.frame);
        v.add_term(MultiIndex{c.horizontal[static_cast<std::size_t>(mu)]}, Polynomial(1));
        x.factors.push_back(v);
      }
      auto v = plucker_check(c, x, std::min(n, k));
      if (v.status == PluckerStatus::SkippedDegenerate) {
        ++skipped;
        continue;
      }
      holds += v.status == PluckerStatus::Holds;
      ++checked;
    }
    d = count(holds, checked) + " hold (" + std::to_string(skipped) + " degenerate draws skipped)";
    return holds == checked && checked >= kPluckerSamples;
  });

  return cr.finish(kDichotomyBudget);
}

// ---------------------------------------------------------------------------

bool criterion_pseudofiber() {
  Criterion cr(4, "pseudofiber on Lepage-Dedecker charts");
  struct Case {
    Chart c;
    HamiltonianSolution sol;
    PseudofiberReport pf;
  };
  std::vector<Case> cases;
  RationalSampler rng(4001);
  for (const auto& c : {lepage_dedecker_chart(2, 1), lepage_dedecker_chart(2, 2), lepage_dedecker_chart(3, 1)}) {
    Polynomial e = Polynomial::variable(c.frame->vars(), static_cast<std::size_t>(energy_index(c)));
    for (int it = 0; it < 6; ++it) {
      Polynomial H = it == 0 ? e : e + random_in(rng, c, momentum_names(c), 3, 2);
      auto sol = solve_at_random_point(rng, c, H);
      cases.push_back({c, sol, pseudofiber_directions(c, sol)});
    }
  }

  cr.item("L^H is vertical, H = e + poly(momenta)", [&](std::string& d) {
    int good = 0, dirs = 0;
    for (const auto& k : cases) {
      bool all = true;
      for (const auto& v : k.pf.basis) all = all && is_vertical(k.c, v);
      good += all;
      dirs += static_cast<int>(k.pf.basis.size());
    }
    d = count(good, static_cast<int>(cases.size())) + " solutions, " + std::to_string(dirs) + " directions";
    return good == static_cast<int>(cases.size()) && dirs > 0;
  });

  cr.item("doubling the representatives leaves L^H unchanged", [&](std::string& d) {
    int good = 0;
    for (const auto& k : cases) good += k.pf.doubling_agrees;
    d = count(good, static_cast<int>(cases.size()));
    return good == static_cast<int>(cases.size());
  });

  cr.item("integrand dF(zeta, X_2..X_n) = 0", [](std::string& d) {
    RationalSampler r(4002);
    auto c = lepage_dedecker_chart(2, 2);
    int good = 0, total = 0;
    for (int it = 0; total < kIntegrandPairs && it < 40 * kIntegrandPairs; ++it) {
      PolyForm F = r.integer(0, 1) ? random_aof(r, c) : mixed_form(r, c);
      if (!is_aof(c, F)) continue;
      Polynomial h = c.parse("p12") + random_in(r, c, {"p13", "p14"}, 3, 2) + random_in(r, c, base_names(c), 2, 2);
      auto sol = solve_at_random_point(r, c, h);
      auto pf = pseudofiber_directions(c, sol);
      if (pf.basis.empty()) continue;
      VectorField zeta(c.frame, 1);
      for (const auto& v : pf.basis) zeta += v * r.small();
      good += pseudofiber_integrand(c, F, zeta, sol) == 0;
      ++total;
    }
    d = count(good, total) + " (F, zeta) pairs";
    return good == total && total == kIntegrandPairs;
  });

  return cr.finish();
}

// ---------------------------------------------------------------------------

bool criterion_field() {
  using namespace msym::field;
  Criterion cr(5, "lattice Klein-Gordon experiments (M = 256, 10 crossings)");
  auto config = [](double lambda) {
    ExperimentConfig cfg;
    cfg.M = 256;
    cfg.crossing_times = 10;
    cfg.mass = 1;
    cfg.lambda = lambda;
    cfg.initial.waves = {{1, 0.6, 1, 0}, {-2, 0.3, 1, 0}, {3, 0.2, -1, 0}};
    cfg.initial.noise = 0.3;
    cfg.initial.seed = 7;
    ObservableSpec q{"charge", FunctionalKind::Charge, {}, std::nullopt, true};
    ObservableSpec s{"smeared", FunctionalKind::Smeared, {}, std::nullopt, lambda == 0};
    s.profile.waves = {{1, 1.0, 1, std::numbers::pi / 2}, {2, 0.5, -1, 0}};
    cfg.observables = {q, s};
    return cfg;
  };
  ExperimentReport lin, non;

  cr.item("charge drift, lambda = 0 and lambda = 1", [&](std::string& d) {
    lin = conservation_experiment(config(0));
    non = conservation_experiment(config(1));
    double a = lin.functionals[0].max_drift, b = non.functionals[0].max_drift;
    d = sci(a) + ", " + sci(b) + " (limit " + sci(kChargeDrift) + ")";
    return a <= kChargeDrift && b <= kChargeDrift;
  }, 2 * kFieldRunBudget);

  cr.item("linear smeared functional conserved, nonlinear drifts", [&](std::string& d) {
    double a = lin.functionals[1].max_drift, b = non.functionals[1].max_drift;
    d = "lambda = 0: " + sci(a) + " (<= " + sci(kLinearSmearedDrift) + "), lambda = 1: " + sci(b) + " (>= " + sci(kNonlinearSmearedDrift) + ")";
    return a <= kLinearSmearedDrift && b >= kNonlinearSmearedDrift;
  });

  cr.item("H_0 on the lift and Hamilton-equation residual order", [](std::string& d) {
    // H_0 vanishes on the lift to rounding by construction, so its order is
    // undefined; the O(h^2) statement is checked on the Hamilton residual
    double hmax = 0, worst = 1e9;
    std::string orders;
    for (double lam : {0.0, 1.0}) {
      Chart c = field_chart(1, lam);
      std::vector<double> r;
      for (int M : {128, 256, 512, 1024}) {
        InitialData init;
        init.waves = {{1, 0.6, 1, 0}, {-2, 0.3, 1, 0}, {3, 0.2, -1, 0}};
        FieldState s = make_state(M, 2 * std::numbers::pi, 0.5, 1, lam, init);
        std::vector<FieldState> run{s};
        long steps = std::lround(0.5 / s.dt);
        for (long n = 0; n < steps; ++n) {
          kg_advance(s, 1);
          run.push_back(s);
        }
        auto curve = legendre_lift(run, c);
        hmax = std::max(hmax, curve.max_h_residual);
        r.push_back(hamilton_residual(curve, c).max_residual);
      }
      orders += " lambda=" + sci(lam) + ":";
      for (std::size_t j = 1; j < r.size(); ++j) {
        double o = std::log2(r[j - 1] / r[j]);
        worst = std::min(worst, o);
        orders += " " + sci(o);
      }
    }
    d = "max |H_0| = " + sci(hmax) + " (<= " + sci(kLiftRounding) + "), orders" + orders + " (>= " + sci(kMinOrder) + ")";
    return hmax <= kLiftRounding && worst >= kMinOrder;
  }, kFieldRunBudget);

  cr.item("leapfrog reversibility", [](std::string& d) {
    InitialData init;
    init.waves = {{1, 0.6, 1, 0}, {-2, 0.3, 1, 0}, {3, 0.2, -1, 0}};
    init.noise = 0.3;
    init.seed = 7;
    FieldState s0 = make_state(256, 2 * std::numbers::pi, 0.5, 1, 1, init);
    long steps = std::lround(10 * 2 * std::numbers::pi / s0.dt);
    FieldState s = s0;
    kg_advance(s, steps);
    s = reversed(s);
    kg_advance(s, steps);
    double e = 0;
    for (std::size_t i = 0; i < s.phi1.size(); ++i)
      e = std::max({e, std::abs(s.phi1[i] - s0.phi1[i]), std::abs(s.phi2[i] - s0.phi2[i]), std::abs(s.v1[i] - s0.v1[i]),
                    std::abs(s.v2[i] - s0.v2[i])});
    d = std::to_string(steps) + " steps out and back, max error " + sci(e) + " (<= " + sci(kReversibility) + ")";
    return e <= kReversibility;
  }, kFieldRunBudget);

  return cr.finish();
}

// ---------------------------------------------------------------------------

bool criterion_cross_method() {
  Criterion cr(6, "pseudobracket: representative route = algebraic route");
  for (const auto& c : {lepage_dedecker_split_chart(2, 2), dDW_chart(2, 2), dDW_chart(3, 1)}) {
    cr.item(c.name, [&](std::string& d) {
      RationalSampler rng(6000 + c.dim());
      auto cp = standard_copolarization(c);
      int good = 0;
      for (int it = 0; it < kCrossMethodForms; ++it) {
        Polynomial H = random_hamiltonian(rng, c);
        auto sol = solve_at_random_point(rng, c, H);
        PolyForm F = random_aof(rng, c);
        auto t = aof_tensor(c, cp, F);
        if (!t.tensor) continue;
        auto a = pseudobracket(c, H, F, cp, sol);
        auto b = pseudobracket_aof(c, H, *t.tensor, sol.point);
        good += a.status == BracketStatus::Ok && a.pairings == b.pairings;
      }
      d = count(good, kCrossMethodForms) + " random AOFs";
      return good == kCrossMethodForms;
    });
  }
  return cr.finish();
}

}  // namespace

int main() {
  bool ok = true;
  ok = criterion_exact() && ok;
  ok = criterion_structural() && ok;
  ok = criterion_dichotomy() && ok;
  ok = criterion_pseudofiber() && ok;
  ok = criterion_field() && ok;
  ok = criterion_cross_method() && ok;
  std::printf("%s\n", ok ? "all criteria pass" : "some criteria FAIL");
  return ok ? 0 : 1;
}
