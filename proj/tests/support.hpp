#pragma once

// Shared generators and brute-force oracles for the test suites.

#include <algorithm>
#include <numeric>
#include <vector>

#include "msym/algebra.hpp"
#include "msym/exterior.hpp"
#include "msym/linalg.hpp"
#include "msym/random.hpp"

namespace msym::testing {

// A few monomials of total degree <= max_deg in the given variables.
inline Polynomial random_polynomial(RationalSampler& rng, const VarsPtr& vars, int terms, int max_deg,
                                    const std::vector<std::size_t>& allowed = {}) {
  Polynomial p = Polynomial::constant(0, vars);
  std::vector<std::size_t> pool = allowed;
  if (pool.empty()) {
    pool.resize(vars->size());
    std::iota(pool.begin(), pool.end(), 0);
  }
  for (int t = 0; t < terms; ++t) {
    Exponents e(vars->size(), 0);
    int deg = static_cast<int>(rng.integer(0, max_deg));
    for (int k = 0; k < deg; ++k) e[pool[static_cast<std::size_t>(rng.integer(0, static_cast<long>(pool.size()) - 1))]] += 1;
    p += Polynomial::monomial(vars, e, rng.small());
  }
  return p;
}

template <Kind K>
Graded<K> random_graded(RationalSampler& rng, const FramePtr& frame, int degree, int terms, int max_deg,
                        const std::vector<std::size_t>& coeff_vars = {}) {
  Graded<K> g(frame, degree);
  auto all = all_multi_indices(static_cast<int>(frame->dim()), degree);
  for (int t = 0; t < terms; ++t) {
    const auto& I = all[static_cast<std::size_t>(rng.integer(0, static_cast<long>(all.size()) - 1))];
    g.add_term(I, random_polynomial(rng, frame->vars(), 2, max_deg, coeff_vars));
  }
  return g;
}

inline PolyForm random_form(RationalSampler& rng, const FramePtr& f, int degree, int terms = 3, int max_deg = 2) {
  return random_graded<Kind::Form>(rng, f, degree, terms, max_deg);
}

inline VectorField random_vector(RationalSampler& rng, const FramePtr& f, int terms = 3, int max_deg = 2) {
  return random_graded<Kind::Vector>(rng, f, 1, terms, max_deg);
}

inline VectorField random_constant_vector(RationalSampler& rng, const FramePtr& f) {
  VectorField v(f, 1);
  for (std::size_t a = 0; a < f->dim(); ++a) v.add_term(MultiIndex{static_cast<int>(a)}, Polynomial(rng.small()));
  return v;
}

// Leibniz expansion, independent of the elimination code.
inline Rational leibniz_det(const std::vector<std::vector<Rational>>& m) {
  std::size_t n = m.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rational total = 0;
  do {
    int inv = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inv;
    Rational t = inv % 2 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) t *= m[i][static_cast<std::size_t>(perm[i])];
    total += t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// mu(X_1..X_k) = sum_J mu_J det[dx^{J_a}(X_b)] with constant mu and X.
inline Rational determinant_pairing(const PolyForm& mu, const std::vector<VectorField>& xs, const std::vector<Rational>& at) {
  Rational total = 0;
  for (const auto& [J, c] : mu.terms()) {
    std::vector<std::vector<Rational>> m(J.size(), std::vector<Rational>(xs.size()));
    for (std::size_t a = 0; a < J.size(); ++a)
      for (std::size_t b = 0; b < xs.size(); ++b)
        m[a][b] = component(xs[b], static_cast<std::size_t>(J[a])).evaluate(at);
    total += c.evaluate(at) * leibniz_det(m);
  }
  return total;
}

}  // namespace msym::testing

namespace msym::testing {

// (mu ^ nu)(X_1..X_{k+l}) by the shuffle formula, using only determinants.
inline Rational shuffle_wedge_pairing(const PolyForm& mu, const PolyForm& nu, const std::vector<VectorField>& xs,
                                      const std::vector<Rational>& at) {
  std::size_t k = static_cast<std::size_t>(mu.degree()), n = xs.size();
  Rational total = 0;
  for (const auto& sel : all_multi_indices(static_cast<int>(n), static_cast<int>(k))) {
    std::vector<VectorField> a, b;
    std::vector<int> order;
    for (std::size_t i = 0; i < n; ++i) {
      if (sel.contains(static_cast<int>(i))) {
        a.push_back(xs[i]);
        order.push_back(static_cast<int>(i));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!sel.contains(static_cast<int>(i))) {
        b.push_back(xs[i]);
        order.push_back(static_cast<int>(i));
      }
    }
    int sign = sort_with_sign(order).sign;
    total += Rational(sign) * determinant_pairing(mu, a, at) * determinant_pairing(nu, b, at);
  }
  return total;
}

}  // namespace msym::testing
