#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msym/exterior.hpp"
#include "msym/linalg.hpp"

namespace msym {

// A coordinate patch of a multisymplectic manifold together with the data
// the rest of the library needs: the (n+1)-form, an optional potential,
// Hamiltonian and metric, and the n coordinates whose differentials wedge
// to the volume form.
struct Chart {
  std::string name;
  std::string family;  // builder that produced it, or "custom"
  int n = 0;
  FramePtr frame;
  PolyForm omega;
  std::optional<PolyForm> theta;
  std::optional<Polynomial> hamiltonian;
  std::vector<Rational> metric;  // diagonal entries, empty if none
  std::vector<int> horizontal;

  std::size_t dim() const { return frame->dim(); }
  int index(std::string_view coord) const { return frame->index(coord); }
  Polynomial coordinate(std::string_view c) const { return frame->coordinate(c); }
  PolyForm d(std::string_view c) const { return differential(frame, c); }
  PolyMultivector partial(std::string_view c) const { return msym::partial(frame, c); }
  Polynomial parse(std::string_view text) const { return frame->parse(text); }

  PolyForm volume() const {
    PolyForm w = PolyForm::scalar(frame, Polynomial(1));
    for (int h : horizontal) w = wedge(w, PolyForm::basis(frame, std::vector<int>{h}));
    return w;
  }

  // (d_{mu_1} ^ ... ^ d_{mu_p}) hook volume, mu indexing the horizontal list
  PolyForm volume_hook(const std::vector<int>& mus) const {
    PolyMultivector x = PolyMultivector::scalar(frame, Polynomial(1));
    for (int m : mus) x = wedge(x, PolyMultivector::basis(frame, std::vector<int>{horizontal.at(static_cast<std::size_t>(m))}));
    return hook(x, volume());
  }

  std::vector<int> base_coordinates() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < dim(); ++i)
      if (!is_fiber(frame->coord(i).kind)) out.push_back(static_cast<int>(i));
    return out;
  }
  std::vector<int> fiber_coordinates() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < dim(); ++i)
      if (is_fiber(frame->coord(i).kind)) out.push_back(static_cast<int>(i));
    return out;
  }
  std::vector<int> vertical_coordinates() const {
    std::vector<int> out;
    std::set<int> h(horizontal.begin(), horizontal.end());
    for (std::size_t i = 0; i < dim(); ++i)
      if (!h.count(static_cast<int>(i))) out.push_back(static_cast<int>(i));
    return out;
  }

  const Polynomial& require_hamiltonian() const {
    if (!hamiltonian) throw InputError("chart '" + name + "' has no Hamiltonian");
    return *hamiltonian;
  }
  const PolyForm& require_theta() const {
    if (!theta) throw InputError("chart '" + name + "' has no potential form");
    return *theta;
  }

  // Validates degrees and the horizontal list; throws on inconsistency.
  void validate() const {
    if (!frame) throw InputError("chart without coordinates");
    if (n < 1) throw InputError("chart degree n must be at least 1");
    if (omega.degree() != n + 1) throw InputError("multisymplectic form must have degree n+1");
    if (theta && theta->degree() != n) throw InputError("potential form must have degree n");
    if (!horizontal.empty()) {
      if (static_cast<int>(horizontal.size()) != n) throw InputError("horizontal coordinate list must have n entries");
      std::set<int> s(horizontal.begin(), horizontal.end());
      if (s.size() != horizontal.size()) throw InputError("horizontal coordinates repeat");
    }
    if (!metric.empty() && static_cast<int>(metric.size()) != n) throw InputError("metric needs n diagonal entries");
  }
};

// ---------------------------------------------------------------------------
// The linear map K: xi -> xi hook Omega at one point, as an exact matrix.

struct ContractionMatrix {
  Matrix k;                    // rows: n-form components, cols: coordinates
  std::vector<MultiIndex> rows;
  std::map<MultiIndex, std::size_t> row_of;

  std::optional<std::size_t> row(const MultiIndex& I) const {
    auto it = row_of.find(I);
    if (it == row_of.end()) return std::nullopt;
    return it->second;
  }
};

// Omega must have constant coefficients (evaluate first if needed).
inline ContractionMatrix contraction_matrix(const PolyForm& omega_const, const std::vector<MultiIndex>& extra_rows = {}) {
  const auto& frame = omega_const.frame();
  std::vector<PolyForm> cols;
  std::set<MultiIndex> rows(extra_rows.begin(), extra_rows.end());
  for (std::size_t c = 0; c < frame->dim(); ++c) {
    cols.push_back(hook(PolyMultivector::basis(frame, std::vector<int>{static_cast<int>(c)}), omega_const));
    for (const auto& [I, v] : cols.back().terms()) rows.insert(I);
  }
  ContractionMatrix cm;
  cm.rows.assign(rows.begin(), rows.end());
  for (std::size_t r = 0; r < cm.rows.size(); ++r) cm.row_of[cm.rows[r]] = r;
  cm.k = Matrix(cm.rows.size(), frame->dim());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (const auto& [I, v] : cols[c].terms()) {
      if (!v.is_constant()) throw DomainError("contraction matrix needs constant coefficients");
      cm.k(cm.row_of[I], c) = v.constant_term();
    }
  return cm;
}

struct NondegeneracyVerdict {
  bool nondegenerate = false;
  std::vector<Rational> kernel_witness;  // xi with xi hook Omega = 0, when degenerate
};

inline NondegeneracyVerdict nondegeneracy_check(const Chart& chart, const std::vector<Rational>& point) {
  auto cm = contraction_matrix(chart.omega.evaluate(point));
  NondegeneracyVerdict v;
  auto ker = kernel_basis(cm.k);
  v.nondegenerate = ker.empty();
  if (!ker.empty()) v.kernel_witness = ker.front();
  return v;
}

inline bool is_closed(const PolyForm& a) { return ext_d(a).is_zero(); }

// ---------------------------------------------------------------------------
// Builders.

namespace detail {

inline std::string index_label(const std::vector<int>& one_based, bool wide) {
  std::string s;
  for (std::size_t i = 0; i < one_based.size(); ++i) {
    if (wide && i) s += "_";
    s += std::to_string(one_based[i]);
  }
  return s;
}

struct SplitNames {
  std::vector<std::string> x, y;
  std::string e = "e";
  // name of p^{M}_{I}; M and I hold positions into x and y
  std::function<std::string(const std::vector<int>&, const std::vector<int>&)> momentum;
  CoordKind y_kind = CoordKind::Position;
};

inline SplitNames default_split_names(int n, int k) {
  SplitNames s;
  for (int m = 1; m <= n; ++m) s.x.push_back("x" + std::to_string(m));
  for (int i = 1; i <= k; ++i) s.y.push_back("y" + std::to_string(i));
  bool wide = n > 9 || k > 9;
  s.momentum = [wide](const std::vector<int>& M, const std::vector<int>& I) {
    std::vector<int> m1, i1;
    for (int m : M) m1.push_back(m + 1);
    for (int i : I) i1.push_back(i + 1);
    return "p" + index_label(m1, wide) + "_" + index_label(i1, wide);
  };
  return s;
}

// Field-theoretic chart with momenta p^{M}_{I}, |M| = |I| = j <= max_j:
//   Omega = de ^ omega + sum dp^M_I ^ omega^I_M
//   theta = e omega + sum p^M_I omega^I_M
// with omega^I_M = dy^{i_1} ^ ... ^ dy^{i_j} ^ ((d_{mu_1} ^ ... ^ d_{mu_j}) hook omega).
inline Chart split_chart(const std::string& name, const std::string& family, const SplitNames& names, int max_j) {
  int n = static_cast<int>(names.x.size()), k = static_cast<int>(names.y.size());
  std::vector<Coordinate> coords;
  for (const auto& x : names.x) coords.push_back({x, CoordKind::Position});
  for (const auto& y : names.y) coords.push_back({y, names.y_kind});
  coords.push_back({names.e, CoordKind::Energy});
  struct Mom {
    std::vector<int> M, I;
  };
  std::vector<Mom> moms;
  for (int j = 1; j <= std::min({max_j, n, k}); ++j)
    for (const auto& M : all_multi_indices(n, j))
      for (const auto& I : all_multi_indices(k, j)) {
        moms.push_back({M.values(), I.values()});
        coords.push_back({names.momentum(M.values(), I.values()), CoordKind::Momentum});
      }
  Chart c;
  c.name = name;
  c.family = family;
  c.n = n;
  c.frame = make_frame(std::move(coords));
  for (int m = 0; m < n; ++m) c.horizontal.push_back(m);
  PolyForm w = c.volume();
  c.omega = wedge(c.d(names.e), w);
  PolyForm th = w * c.coordinate(names.e);
  for (const auto& mo : moms) {
    PolyForm dy = PolyForm::scalar(c.frame, Polynomial(1));
    for (int i : mo.I) dy = wedge(dy, c.d(names.y[static_cast<std::size_t>(i)]));
    PolyForm wIM = wedge(dy, c.volume_hook(mo.M));
    std::string p = names.momentum(mo.M, mo.I);
    c.omega += wedge(c.d(p), wIM);
    th += wIM * c.coordinate(p);
  }
  c.theta = th;
  return c;
}

inline void guard_dimension(int n, int k) {
  if (n < 1 || k < 0) throw InputError("need n >= 1 and k >= 0");
  if (binomial(static_cast<unsigned long>(n + k), static_cast<unsigned long>(n)) > 10000)
    throw DomainError("chart too large: C(n+k, n) exceeds 10^4");
}

}  // namespace detail

// Lambda^n T^*(R^{n+k}) in canonical coordinates (q^alpha, p_{alpha_1..alpha_n}):
//   theta = sum p_A dq^A,  Omega = sum dp_A ^ dq^A.
inline Chart lepage_dedecker_chart(int n, int k) {
  detail::guard_dimension(n, k);
  int N = n + k;
  bool wide = N > 9;
  std::vector<Coordinate> coords;
  for (int a = 1; a <= N; ++a) coords.push_back({"q" + std::to_string(a), CoordKind::Position});
  auto multis = all_multi_indices(N, n);
  for (const auto& A : multis) {
    std::vector<int> one;
    for (int a : A) one.push_back(a + 1);
    bool is_e = A == multis.front();
    coords.push_back({"p" + detail::index_label(one, wide), is_e ? CoordKind::Energy : CoordKind::Momentum});
  }
  Chart c;
  c.name = "lepage-dedecker:" + std::to_string(n) + "," + std::to_string(k);
  c.family = "lepage-dedecker";
  c.n = n;
  c.frame = make_frame(std::move(coords));
  for (int m = 0; m < n; ++m) c.horizontal.push_back(m);
  c.omega = PolyForm(c.frame, n + 1);
  PolyForm th(c.frame, n);
  for (std::size_t i = 0; i < multis.size(); ++i) {
    int p = N + static_cast<int>(i);
    PolyForm dq = PolyForm::basis(c.frame, multis[i].values());
    c.omega += wedge(PolyForm::basis(c.frame, std::vector<int>{p}), dq);
    th += dq * Polynomial::variable(c.frame->vars(), static_cast<std::size_t>(p));
  }
  c.theta = th;
  return c;
}

// The same manifold in split notation x^mu, y^i, e, p^{mu_1..mu_j}_{i_1..i_j}.
inline Chart lepage_dedecker_split_chart(int n, int k) {
  detail::guard_dimension(n, k);
  return detail::split_chart("lepage-dedecker-split:" + std::to_string(n) + "," + std::to_string(k), "lepage-dedecker-split",
                             detail::default_split_names(n, k), n);
}

// De Donder-Weyl chart: the split chart truncated at one upper index.
inline Chart dDW_chart(int n, int k) {
  detail::guard_dimension(n, k);
  return detail::split_chart("dDW:" + std::to_string(n) + "," + std::to_string(k), "dDW", detail::default_split_names(n, k), 1);
}

// Restriction to the submanifold where some momenta vanish and others are
// identified with +-(kept coordinate).  `rename` relabels kept coordinates.
struct Identification {
  std::string coordinate;  // dropped
  std::string target;      // kept
  int sign = 1;
};

inline Chart restrict_chart(const Chart& chart, const std::vector<std::string>& zeroed,
                            const std::vector<Identification>& identified = {},
                            const std::map<std::string, std::string>& rename = {}, std::string new_name = {}) {
  std::set<std::string> dropped;
  for (const auto& z : zeroed) {
    int i = chart.index(z);
    if (chart.frame->coord(static_cast<std::size_t>(i)).kind != CoordKind::Momentum)
      throw DomainError("only momentum coordinates can be zeroed: '" + z + "'");
    dropped.insert(z);
  }
  for (const auto& id : identified) {
    int i = chart.index(id.coordinate);
    chart.index(id.target);
    if (chart.frame->coord(static_cast<std::size_t>(i)).kind != CoordKind::Momentum)
      throw DomainError("only momentum coordinates can be identified: '" + id.coordinate + "'");
    if (id.sign != 1 && id.sign != -1) throw InputError("identification sign must be +-1");
    dropped.insert(id.coordinate);
  }
  std::vector<Coordinate> coords;
  std::map<int, int> old_to_new;
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    const auto& co = chart.frame->coord(i);
    if (dropped.count(co.name)) continue;
    old_to_new[static_cast<int>(i)] = static_cast<int>(coords.size());
    auto r = rename.find(co.name);
    coords.push_back({r == rename.end() ? co.name : r->second, co.kind});
  }
  FramePtr nf = make_frame(coords);
  // pullback: coordinate images and differential images
  std::vector<Polynomial> images(chart.dim());
  std::vector<PolyForm> dimages(chart.dim());
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    auto it = old_to_new.find(static_cast<int>(i));
    if (it != old_to_new.end()) {
      images[i] = Polynomial::variable(nf->vars(), static_cast<std::size_t>(it->second));
      dimages[i] = PolyForm::basis(nf, std::vector<int>{it->second});
    } else {
      images[i] = Polynomial::constant(0, nf->vars());
      dimages[i] = PolyForm(nf, 1);
    }
  }
  for (const auto& id : identified) {
    int from = chart.index(id.coordinate), to = old_to_new.at(chart.index(id.target));
    images[static_cast<std::size_t>(from)] = Polynomial::variable(nf->vars(), static_cast<std::size_t>(to)) * Rational(id.sign);
    dimages[static_cast<std::size_t>(from)] = PolyForm::basis(nf, std::vector<int>{to}) * Rational(id.sign);
  }
  auto pull = [&](const PolyForm& a) {
    PolyForm r(nf, a.degree());
    for (const auto& [I, c] : a.terms()) {
      PolyForm t = PolyForm::scalar(nf, c.compose(images));
      for (int i : I) t = wedge(t, dimages[static_cast<std::size_t>(i)]);
      r += t;
    }
    return r;
  };
  Chart out;
  out.name = new_name.empty() ? chart.name + "|restricted" : new_name;
  out.family = "custom";
  out.n = chart.n;
  out.frame = nf;
  out.omega = pull(chart.omega);
  if (chart.theta) out.theta = pull(*chart.theta);
  if (chart.hamiltonian) out.hamiltonian = chart.hamiltonian->compose(images).rebased(nf->vars());
  out.metric = chart.metric;
  for (int h : chart.horizontal) {
    auto it = old_to_new.find(h);
    if (it == old_to_new.end()) throw DomainError("restriction removed a horizontal coordinate");
    out.horizontal.push_back(it->second);
  }
  return out;
}

// Re-express a form on another frame that names the same coordinates.
inline PolyForm transport(const PolyForm& a, const FramePtr& target) {
  PolyForm r(target, a.degree());
  for (const auto& [I, c] : a.terms()) {
    std::vector<int> idx;
    for (int i : I) idx.push_back(target->index(a.frame()->coord(static_cast<std::size_t>(i)).name));
    r += PolyForm::basis(target, idx, c.rebased(target->vars()));
  }
  return r;
}

// Same forms after matching coordinates by name.
inline bool equivalent_charts(const Chart& a, const Chart& b) {
  if (a.n != b.n || a.dim() != b.dim()) return false;
  for (const auto& co : a.frame->coords())
    if (!b.frame->has(co.name)) return false;
  if (transport(a.omega, b.frame) != b.omega) return false;
  if (a.theta.has_value() != b.theta.has_value()) return false;
  if (a.theta && transport(*a.theta, b.frame) != *b.theta) return false;
  if (a.hamiltonian.has_value() != b.hamiltonian.has_value()) return false;
  if (a.hamiltonian && a.hamiltonian->rebased(b.frame->vars()) != *b.hamiltonian) return false;
  return true;
}

namespace detail {

inline std::vector<Rational> minkowski(int n) {
  std::vector<Rational> eta(static_cast<std::size_t>(n), Rational(-1));
  eta[0] = 1;
  return eta;
}

// pi = -1/2 sum_{mu,nu} p^{mu nu} omega_{mu nu} over antisymmetric momenta
// stored for mu < nu under `pname(mu, nu)`.
inline PolyForm antisymmetric_momentum_form(const Chart& c, const std::function<std::string(int, int)>& pname) {
  PolyForm pi(c.frame, c.n - 2);
  for (int mu = 0; mu < c.n; ++mu)
    for (int nu = mu + 1; nu < c.n; ++nu) {
      // the (mu,nu) and (nu,mu) terms coincide, so the 1/2 cancels
      pi -= c.volume_hook({mu, nu}) * c.coordinate(pname(mu, nu));
    }
  return pi;
}

inline PolyForm connection_form(const Chart& c, const std::vector<std::string>& a) {
  PolyForm r(c.frame, 1);
  for (int mu = 0; mu < c.n; ++mu)
    r += PolyForm::basis(c.frame, std::vector<int>{c.horizontal[static_cast<std::size_t>(mu)]}, c.coordinate(a[static_cast<std::size_t>(mu)]));
  return r;
}

}  // namespace detail

// Electromagnetism on R^4 with eta = (+,-,-,-), coordinates x^mu, a_mu, e,
// p^{mu nu} (mu < nu).  Omega = de ^ omega + d pi ^ da.
inline Chart maxwell_chart(const std::vector<Polynomial>& current = {}) {
  const int n = 4;
  std::vector<Coordinate> coords;
  for (int m = 0; m < n; ++m) coords.push_back({"x" + std::to_string(m), CoordKind::Position});
  for (int m = 0; m < n; ++m) coords.push_back({"a" + std::to_string(m), CoordKind::Gauge});
  coords.push_back({"e", CoordKind::Energy});
  auto pname = [](int mu, int nu) { return "p" + std::to_string(mu) + std::to_string(nu); };
  for (int m = 0; m < n; ++m)
    for (int v = m + 1; v < n; ++v) coords.push_back({pname(m, v), CoordKind::Momentum});
  Chart c;
  c.name = "maxwell";
  c.family = "maxwell";
  c.n = n;
  c.frame = make_frame(std::move(coords));
  c.horizontal = {0, 1, 2, 3};
  c.metric = detail::minkowski(n);
  std::vector<std::string> a;
  for (int m = 0; m < n; ++m) a.push_back("a" + std::to_string(m));
  PolyForm pi = detail::antisymmetric_momentum_form(c, pname);
  PolyForm da = ext_d(detail::connection_form(c, a));
  c.omega = wedge(c.d("e"), c.volume()) + wedge(ext_d(pi), da);
  c.theta = c.volume() * c.coordinate("e") + wedge(pi, da);
  Polynomial h = c.coordinate("e");
  for (int m = 0; m < n; ++m)
    for (int v = m + 1; v < n; ++v) {
      Polynomial p = c.coordinate(pname(m, v));
      h -= p * p * (c.metric[static_cast<std::size_t>(m)] * c.metric[static_cast<std::size_t>(v)] / 2);
    }
  if (!current.empty()) {
    if (current.size() != static_cast<std::size_t>(n)) throw InputError("current needs four components");
    for (int m = 0; m < n; ++m) h += current[static_cast<std::size_t>(m)].rebased(c.frame->vars()) * c.coordinate(a[static_cast<std::size_t>(m)]);
  }
  c.hamiltonian = h;
  return c;
}

inline PolyForm maxwell_pi(const Chart& c) {
  return detail::antisymmetric_momentum_form(c, [](int mu, int nu) { return "p" + std::to_string(mu) + std::to_string(nu); });
}
inline PolyForm maxwell_a(const Chart& c) {
  return detail::connection_form(c, {"a0", "a1", "a2", "a3"});
}

// Complex scalar field phi = phi^1 + i phi^2 on n-dimensional Minkowski space
// with potential V(s), s = |phi|^2 / 2, optionally coupled to a U(1) gauge field.
inline Chart scalar_chart(int n, const Polynomial& potential, bool gauged) {
  if (n < 2) throw InputError("scalar chart needs n >= 2");
  if (potential.vars()) {
    for (std::size_t i = 0; i < potential.vars()->size(); ++i)
      if (potential.vars()->name(i) != "s" && potential.depends_on(i))
        throw InputError("potential must be a polynomial in the single variable s");
  }
  detail::SplitNames names;
  for (int m = 0; m < n; ++m) names.x.push_back("x" + std::to_string(m));
  names.y = {"phi1", "phi2"};
  names.momentum = [](const std::vector<int>& M, const std::vector<int>& I) {
    return "p" + std::to_string(M[0]) + "_" + std::to_string(I[0] + 1);
  };
  Chart base = detail::split_chart("", "", names, 1);
  std::vector<Coordinate> coords = base.frame->coords();
  auto pname = [](int mu, int nu) { return "p" + std::to_string(mu) + std::to_string(nu); };
  std::vector<std::string> a;
  if (gauged) {
    for (int m = 0; m < n; ++m) {
      a.push_back("a" + std::to_string(m));
      coords.push_back({a.back(), CoordKind::Gauge});
    }
    for (int m = 0; m < n; ++m)
      for (int v = m + 1; v < n; ++v) coords.push_back({pname(m, v), CoordKind::Momentum});
  }
  Chart c;
  c.name = "scalar:" + std::to_string(n) + (gauged ? ",gauged" : "");
  c.family = gauged ? "scalar-gauged" : "scalar";
  c.n = n;
  c.frame = make_frame(std::move(coords));
  c.horizontal = base.horizontal;
  c.metric = detail::minkowski(n);
  c.omega = transport(base.omega, c.frame);
  c.theta = transport(*base.theta, c.frame);

  auto phi1 = c.coordinate("phi1"), phi2 = c.coordinate("phi2");
  Polynomial s = (phi1 * phi1 + phi2 * phi2) * Rational(1, 2);
  Polynomial V;
  if (potential.vars() && potential.vars()->index("s")) {
    std::vector<Polynomial> img(potential.vars()->size(), Polynomial::constant(0, c.frame->vars()));
    img[*potential.vars()->index("s")] = s;
    V = potential.compose(img);
  } else {
    V = Polynomial::constant(potential.constant_term(), c.frame->vars());
  }
  Polynomial h = c.coordinate("e") - V;
  for (int m = 0; m < n; ++m) {
    for (int comp = 1; comp <= 2; ++comp) {
      Polynomial p = c.coordinate("p" + std::to_string(m) + "_" + std::to_string(comp));
      h += p * p * (c.metric[static_cast<std::size_t>(m)] / 2);
    }
  }
  if (gauged) {
    PolyForm pi = detail::antisymmetric_momentum_form(c, pname);
    PolyForm da = ext_d(detail::connection_form(c, a));
    c.omega += wedge(ext_d(pi), da);
    *c.theta += wedge(pi, da);
    for (int m = 0; m < n; ++m) {
      Polynomial j = c.coordinate("p" + std::to_string(m) + "_1") * phi2 - c.coordinate("p" + std::to_string(m) + "_2") * phi1;
      h += j * c.coordinate(a[static_cast<std::size_t>(m)]);
    }
    for (int m = 0; m < n; ++m)
      for (int v = m + 1; v < n; ++v) {
        Polynomial p = c.coordinate(pname(m, v));
        h -= p * p * (c.metric[static_cast<std::size_t>(m)] * c.metric[static_cast<std::size_t>(v)] / 2);
      }
  }
  c.hamiltonian = h;
  return c;
}

inline Polynomial potential_in_s(std::string_view text) { return Polynomial::parse(text, make_variables({"s"})); }

}  // namespace msym
