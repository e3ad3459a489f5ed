#pragma once

#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "msym/algebra.hpp"

namespace msym {

enum class CoordKind { Position, Momentum, Energy, Gauge, Other };

inline std::string_view kind_name(CoordKind k) {
  switch (k) {
    case CoordKind::Position: return "position";
    case CoordKind::Momentum: return "momentum";
    case CoordKind::Energy: return "energy";
    case CoordKind::Gauge: return "gauge";
    case CoordKind::Other: return "other";
  }
  return "other";
}

inline CoordKind parse_kind(std::string_view s) {
  if (s == "position") return CoordKind::Position;
  if (s == "momentum") return CoordKind::Momentum;
  if (s == "energy") return CoordKind::Energy;
  if (s == "gauge") return CoordKind::Gauge;
  if (s == "other") return CoordKind::Other;
  throw InputError("unknown coordinate kind '" + std::string(s) + "'");
}

// Momenta and the energy variable span the fiber; everything else is base.
inline bool is_fiber(CoordKind k) { return k == CoordKind::Momentum || k == CoordKind::Energy; }

struct Coordinate {
  std::string name;
  CoordKind kind = CoordKind::Other;
  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

class Frame {
 public:
  explicit Frame(std::vector<Coordinate> coords) : coords_(std::move(coords)) {
    std::vector<std::string> names;
    for (const auto& c : coords_) names.push_back(c.name);
    vars_ = make_variables(std::move(names));
  }
  std::size_t dim() const { return coords_.size(); }
  const Coordinate& coord(std::size_t i) const { return coords_.at(i); }
  const std::vector<Coordinate>& coords() const { return coords_; }
  const VarsPtr& vars() const { return vars_; }
  int index(std::string_view name) const {
    auto i = vars_->index(name);
    if (!i) throw InputError("unknown coordinate '" + std::string(name) + "'");
    return static_cast<int>(*i);
  }
  bool has(std::string_view name) const { return vars_->index(name).has_value(); }
  Polynomial coordinate(std::string_view name) const { return Polynomial::variable(vars_, name); }
  Polynomial constant(const Rational& c) const { return Polynomial::constant(c, vars_); }
  Polynomial parse(std::string_view text) const { return Polynomial::parse(text, vars_); }
  bool operator==(const Frame& o) const { return coords_ == o.coords_; }

 private:
  std::vector<Coordinate> coords_;
  VarsPtr vars_;
};

using FramePtr = std::shared_ptr<const Frame>;

inline FramePtr make_frame(std::vector<Coordinate> coords) {
  return std::make_shared<const Frame>(std::move(coords));
}

inline bool same_frame(const FramePtr& a, const FramePtr& b) { return a == b || (a && b && *a == *b); }

enum class Kind { Form, Vector };

// Sparse graded object over a frame: sum of coeff * dx^I (forms) or
// coeff * d_I (multivectors) with I strictly increasing.  The coefficient
// ring is free; derivatives require it to be the frame's own ring.
template <Kind K>
class Graded {
 public:
  Graded() = default;
  Graded(FramePtr frame, int degree) : frame_(std::move(frame)), degree_(degree) {
    if (!frame_) throw DomainError("graded object without a frame");
    if (degree_ < 0 || degree_ > static_cast<int>(frame_->dim())) throw DomainError("degree out of range");
  }

  static Graded scalar(FramePtr frame, Polynomial c) {
    Graded g(std::move(frame), 0);
    g.add_term(MultiIndex{}, std::move(c));
    return g;
  }

  // coeff * e_{i1} ^ ... ^ e_{ik} for an unsorted index list.
  static Graded basis(FramePtr frame, const std::vector<int>& idx, Polynomial coeff = Polynomial(1)) {
    Graded g(std::move(frame), static_cast<int>(idx.size()));
    auto s = sort_with_sign(idx);
    if (s.sign != 0) g.add_term(s.index, coeff * Rational(s.sign));
    return g;
  }

  static Graded basis(FramePtr frame, const std::vector<std::string>& names, Polynomial coeff = Polynomial(1)) {
    std::vector<int> idx;
    for (const auto& n : names) idx.push_back(frame->index(n));
    return basis(std::move(frame), idx, std::move(coeff));
  }

  const FramePtr& frame() const { return frame_; }
  int degree() const { return degree_; }
  const std::map<MultiIndex, Polynomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Polynomial coefficient(const MultiIndex& I) const {
    auto it = terms_.find(I);
    return it == terms_.end() ? Polynomial() : it->second;
  }

  void add_term(const MultiIndex& I, const Polynomial& c) {
    if (static_cast<int>(I.size()) != degree_) throw DomainError("term degree mismatch");
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(I, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Graded& operator+=(const Graded& o) {
    check_compatible(o);
    for (const auto& [I, c] : o.terms_) add_term(I, c);
    return *this;
  }
  Graded& operator-=(const Graded& o) {
    check_compatible(o);
    for (const auto& [I, c] : o.terms_) add_term(I, -c);
    return *this;
  }
  Graded& operator*=(const Polynomial& f) {
    if (f.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second = it->second * f;
      if (it->second.is_zero())
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }
  Graded& operator*=(const Rational& f) {
    if (f == 0) terms_.clear();
    for (auto& [I, c] : terms_) c *= f;
    return *this;
  }

  friend Graded operator+(Graded a, const Graded& b) { return a += b; }
  friend Graded operator-(Graded a, const Graded& b) { return a -= b; }
  friend Graded operator-(Graded a) { return a *= Rational(-1); }
  friend Graded operator*(Graded a, const Polynomial& f) { return a *= f; }
  friend Graded operator*(const Polynomial& f, Graded a) { return a *= f; }
  friend Graded operator*(Graded a, const Rational& f) { return a *= f; }
  friend Graded operator*(const Rational& f, Graded a) { return a *= f; }

  friend bool operator==(const Graded& a, const Graded& b) {
    if (a.degree_ != b.degree_ || !same_frame(a.frame_, b.frame_)) return false;
    if (a.terms_.size() != b.terms_.size()) return false;
    for (const auto& [I, c] : a.terms_) {
      auto it = b.terms_.find(I);
      if (it == b.terms_.end() || it->second != c) return false;
    }
    return true;
  }

  // Coefficients evaluated at a point of the frame; result is constant.
  Graded evaluate(const std::vector<Rational>& point) const {
    Graded g(frame_, degree_);
    for (const auto& [I, c] : terms_) g.add_term(I, Polynomial(c.evaluate(point)));
    return g;
  }

  template <class F>
  Graded map_coefficients(F&& f) const {
    Graded g(frame_, degree_);
    for (const auto& [I, c] : terms_) g.add_term(I, f(c));
    return g;
  }

  bool has_constant_coefficients() const {
    for (const auto& [I, c] : terms_)
      if (!c.is_constant()) return false;
    return true;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [I, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << c.to_string() << ")";
      for (std::size_t k = 0; k < I.size(); ++k) {
        os << (k == 0 ? " " : "^") << (K == Kind::Form ? "d" : "D") << frame_->coord(static_cast<std::size_t>(I[k])).name;
      }
    }
    return os.str();
  }

  void check_compatible(const Graded& o) const {
    if (o.degree_ != degree_) throw DomainError("adding objects of different degree");
    if (!same_frame(frame_, o.frame_)) throw DomainError("objects live on different frames");
  }

 private:
  FramePtr frame_;
  int degree_ = 0;
  std::map<MultiIndex, Polynomial> terms_;
};

using PolyForm = Graded<Kind::Form>;
using PolyMultivector = Graded<Kind::Vector>;
using VectorField = PolyMultivector;  // degree 1

inline PolyForm differential(const FramePtr& f, std::string_view name) {
  return PolyForm::basis(f, std::vector<int>{f->index(name)});
}
inline PolyMultivector partial(const FramePtr& f, std::string_view name) {
  return PolyMultivector::basis(f, std::vector<int>{f->index(name)});
}

namespace detail {

// Sign of the shuffle sorting the concatenation (a, b); 0 if they overlap.
inline int shuffle_sign(const MultiIndex& a, const MultiIndex& b) {
  int inversions = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    while (j < b.size() && b[j] < a[i]) ++j;
    if (j < b.size() && b[j] == a[i]) return 0;
    inversions += static_cast<int>(j);
  }
  return inversions % 2 ? -1 : 1;
}

inline MultiIndex merge(const MultiIndex& a, const MultiIndex& b) {
  std::vector<int> v;
  v.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(v));
  return MultiIndex(std::move(v));
}

inline bool includes(const MultiIndex& big, const MultiIndex& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline MultiIndex difference(const MultiIndex& big, const MultiIndex& small) {
  std::vector<int> v;
  std::set_difference(big.begin(), big.end(), small.begin(), small.end(), std::back_inserter(v));
  return MultiIndex(std::move(v));
}

}  // namespace detail

template <Kind K>
Graded<K> wedge(const Graded<K>& a, const Graded<K>& b) {
  if (!same_frame(a.frame(), b.frame())) throw DomainError("wedge across different frames");
  int deg = a.degree() + b.degree();
  if (deg > static_cast<int>(a.frame()->dim())) return Graded<K>(a.frame(), static_cast<int>(a.frame()->dim()));
  Graded<K> r(a.frame(), deg);
  for (const auto& [I, ca] : a.terms()) {
    for (const auto& [J, cb] : b.terms()) {
      int s = detail::shuffle_sign(I, J);
      if (s == 0) continue;
      r.add_term(detail::merge(I, J), ca * cb * Rational(s));
    }
  }
  return r;
}

template <Kind K>
Graded<K> wedge_all(const std::vector<Graded<K>>& parts, const FramePtr& frame) {
  Graded<K> r = Graded<K>::scalar(frame, Polynomial(1));
  for (const auto& p : parts) r = wedge(r, p);
  return r;
}

// <d_I, dx^J> = delta_IJ for sorted I, J; zero across degrees.
inline Polynomial pair(const PolyMultivector& x, const PolyForm& mu) {
  if (!same_frame(x.frame(), mu.frame())) throw DomainError("pairing across different frames");
  Polynomial s;
  if (x.degree() != mu.degree()) return s;
  const auto& small = x.terms().size() <= mu.terms().size() ? x.terms() : mu.terms();
  for (const auto& [I, c] : small) {
    auto a = x.coefficient(I);
    if (a.is_zero()) continue;
    auto b = mu.coefficient(I);
    if (b.is_zero()) continue;
    s += a * b;
  }
  return s;
}

// Interior product characterised by <Y, X hook mu> = <X ^ Y, mu>.
inline PolyForm hook(const PolyMultivector& x, const PolyForm& mu) {
  if (!same_frame(x.frame(), mu.frame())) throw DomainError("hook across different frames");
  if (x.degree() > mu.degree()) throw DomainError("hook: multivector degree exceeds form degree");
  PolyForm r(mu.frame(), mu.degree() - x.degree());
  for (const auto& [I, a] : x.terms()) {
    for (const auto& [J, b] : mu.terms()) {
      if (!detail::includes(J, I)) continue;
      MultiIndex rest = detail::difference(J, I);
      r.add_term(rest, a * b * Rational(detail::shuffle_sign(I, rest)));
    }
  }
  return r;
}

// Dual interior product characterised by <X cohook mu, nu> = <X, mu ^ nu>.
inline PolyMultivector cohook(const PolyMultivector& x, const PolyForm& mu) {
  if (!same_frame(x.frame(), mu.frame())) throw DomainError("cohook across different frames");
  if (x.degree() < mu.degree()) throw DomainError("cohook: form degree exceeds multivector degree");
  PolyMultivector r(x.frame(), x.degree() - mu.degree());
  for (const auto& [I, a] : x.terms()) {
    for (const auto& [J, b] : mu.terms()) {
      if (!detail::includes(I, J)) continue;
      MultiIndex rest = detail::difference(I, J);
      r.add_term(rest, a * b * Rational(detail::shuffle_sign(J, rest)));
    }
  }
  return r;
}

namespace detail {
inline Polynomial coordinate_derivative(const Polynomial& c, const FramePtr& frame, std::size_t a) {
  if (c.is_constant()) return Polynomial();
  if (!same_ring(c.vars(), frame->vars())) throw DomainError("coefficients are not functions of the frame coordinates");
  return c.derivative(a);
}
}  // namespace detail

inline Polynomial directional_derivative(const VectorField& xi, const Polynomial& f) {
  if (xi.degree() != 1) throw DomainError("directional derivative needs a vector field");
  Polynomial s;
  for (const auto& [I, c] : xi.terms())
    s += c * detail::coordinate_derivative(f, xi.frame(), static_cast<std::size_t>(I[0]));
  return s;
}

// d(f dx^I) = sum_a d_a f dx^a ^ dx^I
inline PolyForm ext_d(const PolyForm& mu) {
  const auto& frame = mu.frame();
  if (mu.degree() == static_cast<int>(frame->dim())) return PolyForm(frame, mu.degree());
  PolyForm r(frame, mu.degree() + 1);
  for (const auto& [I, c] : mu.terms()) {
    if (c.is_constant()) continue;
    for (std::size_t a = 0; a < frame->dim(); ++a) {
      if (I.contains(static_cast<int>(a))) continue;
      Polynomial da = detail::coordinate_derivative(c, frame, a);
      if (da.is_zero()) continue;
      MultiIndex A{static_cast<int>(a)};
      r.add_term(detail::merge(A, I), da * Rational(detail::shuffle_sign(A, I)));
    }
  }
  return r;
}

inline PolyForm ext_d(const FramePtr& frame, const Polynomial& f) { return ext_d(PolyForm::scalar(frame, f)); }

inline Polynomial component(const VectorField& xi, std::size_t a) { return xi.coefficient(MultiIndex{static_cast<int>(a)}); }

inline VectorField vector_field(const FramePtr& frame, const std::vector<Polynomial>& comps) {
  VectorField v(frame, 1);
  for (std::size_t a = 0; a < comps.size(); ++a) v.add_term(MultiIndex{static_cast<int>(a)}, comps[a]);
  return v;
}

// [xi, eta]^c = xi^a d_a eta^c - eta^a d_a xi^c
inline VectorField lie_bracket(const VectorField& xi, const VectorField& eta) {
  if (xi.degree() != 1 || eta.degree() != 1) throw DomainError("lie bracket needs vector fields");
  VectorField r(xi.frame(), 1);
  for (std::size_t c = 0; c < xi.frame()->dim(); ++c) {
    Polynomial v = directional_derivative(xi, component(eta, c)) - directional_derivative(eta, component(xi, c));
    r.add_term(MultiIndex{static_cast<int>(c)}, v);
  }
  return r;
}

// Cartan: L_xi mu = xi hook d mu + d(xi hook mu)
inline PolyForm lie_derivative(const VectorField& xi, const PolyForm& mu) {
  PolyForm r = hook(xi, ext_d(mu));
  if (mu.degree() > 0) r += ext_d(hook(xi, mu));
  return r;
}

// X_1 ^ ... ^ X_k kept as its factors.
struct DecomposableNVector {
  std::vector<VectorField> factors;

  PolyMultivector expand(const FramePtr& frame) const { return wedge_all(factors, frame); }
  PolyMultivector expand() const {
    if (factors.empty()) throw DomainError("empty decomposable multivector needs an explicit frame");
    return wedge_all(factors, factors.front().frame());
  }
};

// mu(X_1, ..., X_k)
inline Polynomial evaluate_on(const PolyForm& mu, const std::vector<VectorField>& xs) {
  return pair(wedge_all(xs, mu.frame()), mu);
}

}  // namespace msym
