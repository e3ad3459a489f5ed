#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace msym {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown names, malformed text, shape mismatches.
struct InputError : Error {
  using Error::Error;
};

// A mathematical precondition was violated (degrees, frames, dimensions).
struct DomainError : Error {
  using Error::Error;
};

struct ParseError : InputError {
  std::size_t line;
  std::size_t column;
  ParseError(const std::string& what, std::size_t line_, std::size_t column_)
      : InputError(what + " at line " + std::to_string(line_) + ", column " + std::to_string(column_)),
        line(line_),
        column(column_) {}
};

// mpq_class keeps the denominator positive and the fraction reduced after
// every arithmetic operation; only string construction needs canonicalize().
using Rational = mpq_class;

inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return InputError("malformed rational '" + s + "'"); };
  if (s.empty()) throw bad();
  std::size_t slash = s.find('/');
  auto digits = [](std::string_view d, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !d.empty() && (d[0] == '-' || d[0] == '+')) i = 1;
    if (i >= d.size()) return false;
    for (; i < d.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
    return true;
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!digits(num, true) || !digits(den, false)) throw bad();
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  mpz_class d(den);
  if (d == 0) throw InputError("zero denominator in '" + s + "'");
  Rational r(mpz_class(num), d);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// Variables: an ordered list of names shared by every polynomial of a ring.

class Variables {
 public:
  explicit Variables(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second) throw InputError("duplicate variable '" + names_[i] + "'");
    }
  }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index(std::string_view n) const {
    auto it = index_.find(std::string(n));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool operator==(const Variables& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using VarsPtr = std::shared_ptr<const Variables>;

inline VarsPtr make_variables(std::vector<std::string> names) {
  return std::make_shared<const Variables>(std::move(names));
}

inline bool same_ring(const VarsPtr& a, const VarsPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// ---------------------------------------------------------------------------
// Polynomial: sparse map from dense exponent vectors to nonzero rationals.
// A null ring denotes a constant usable together with any ring.

using Exponents = std::vector<std::uint32_t>;

class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_.emplace(Exponents{}, c);
  }
  Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Polynomial(int c) : Polynomial(Rational(c)) {}   // NOLINT(google-explicit-constructor)

  static Polynomial constant(const Rational& c, VarsPtr vars) {
    Polynomial p;
    p.vars_ = std::move(vars);
    if (c != 0) p.terms_.emplace(p.zero_exponents(), c);
    return p;
  }

  static Polynomial variable(const VarsPtr& vars, std::size_t i, std::uint32_t power = 1) {
    if (!vars || i >= vars->size()) throw InputError("variable index out of range");
    Polynomial p;
    p.vars_ = vars;
    Exponents e(vars->size(), 0);
    e[i] = power;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
  }

  static Polynomial variable(const VarsPtr& vars, std::string_view name, std::uint32_t power = 1) {
    auto i = vars ? vars->index(name) : std::nullopt;
    if (!i) throw InputError("unknown variable '" + std::string(name) + "'");
    return variable(vars, *i, power);
  }

  static Polynomial monomial(const VarsPtr& vars, Exponents e, const Rational& c) {
    Polynomial p;
    p.vars_ = vars;
    if ((vars ? vars->size() : 0) != e.size()) throw DomainError("exponent vector length mismatch");
    if (c != 0) p.terms_.emplace(std::move(e), c);
    return p;
  }

  static Polynomial parse(std::string_view text, const VarsPtr& vars);

  const VarsPtr& vars() const { return vars_; }
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](auto x) { return x == 0; });
  }

  Rational constant_term() const {
    auto it = terms_.find(zero_exponents());
    return it == terms_.end() ? Rational(0) : it->second;
  }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (const auto& [e, c] : terms_) {
      std::uint32_t s = 0;
      for (auto x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  std::uint32_t degree_in(std::size_t var) const {
    std::uint32_t d = 0;
    for (const auto& [e, c] : terms_)
      if (!e.empty()) d = std::max(d, e[var]);
    return d;
  }

  bool depends_on(std::size_t var) const { return degree_in(var) > 0; }

  // Same polynomial expressed in `target`, moving variables by name.
  Polynomial rebased(const VarsPtr& target) const {
    if (same_ring(vars_, target)) {
      Polynomial p = *this;
      p.vars_ = target;
      return p;
    }
    Polynomial p;
    p.vars_ = target;
    std::size_t n = target ? target->size() : 0;
    std::vector<std::size_t> map;
    if (vars_) {
      for (std::size_t i = 0; i < vars_->size(); ++i) {
        auto j = target ? target->index(vars_->name(i)) : std::nullopt;
        map.push_back(j ? *j : n);
      }
    }
    for (const auto& [e, c] : terms_) {
      Exponents f(n, 0);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (map[i] == n) throw DomainError("variable '" + vars_->name(i) + "' missing in target ring");
        f[map[i]] = e[i];
      }
      p.terms_.emplace(std::move(f), c);
    }
    return p;
  }

  Polynomial& operator+=(const Polynomial& o) { return add_scaled(o, Rational(1)); }
  Polynomial& operator-=(const Polynomial& o) { return add_scaled(o, Rational(-1)); }

  // this += s * o
  Polynomial& add_scaled(const Polynomial& o, const Rational& s) {
    if (s == 0 || o.is_zero()) return *this;
    unify_with(o);
    const Polynomial* src = &o;
    Polynomial tmp;
    if (!same_ring(o.vars_, vars_) || o.arity() != arity()) {
      tmp = o.rebased(vars_);
      src = &tmp;
    }
    for (const auto& [e, c] : src->terms_) {
      auto [it, fresh] = terms_.try_emplace(e, 0);
      it->second += c * s;
      if (it->second == 0) terms_.erase(it);
    }
    return *this;
  }

  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    r.vars_ = a.vars_ ? a.vars_ : b.vars_;
    if (a.vars_ && b.vars_ && !same_ring(a.vars_, b.vars_))
      throw DomainError("multiplying polynomials over different rings");
    if (a.is_zero() || b.is_zero()) return r;
    std::size_t n = r.arity();
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(n, 0);
        for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
        for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
        auto [it, fresh] = r.terms_.try_emplace(std::move(e), 0);
        it->second += ca * cb;
        if (it->second == 0) r.terms_.erase(it);
      }
    }
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    if (a.is_zero()) return true;
    if (same_ring(a.vars_, b.vars_) && a.arity() == b.arity()) return a.terms_ == b.terms_;
    if (a.is_constant() && b.is_constant()) return a.constant_term() == b.constant_term();
    return (a - b).is_zero();
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(unsigned k) const {
    Polynomial r = Polynomial::constant(1, vars_);
    for (unsigned i = 0; i < k; ++i) r *= *this;
    return r;
  }

  Polynomial derivative(std::size_t var) const {
    Polynomial r;
    r.vars_ = vars_;
    for (const auto& [e, c] : terms_) {
      if (e.empty() || e[var] == 0) continue;
      Exponents f = e;
      f[var] -= 1;
      r.terms_.emplace(std::move(f), c * e[var]);
    }
    return r;
  }

  Polynomial derivative(std::string_view name) const {
    auto i = vars_ ? vars_->index(name) : std::nullopt;
    if (!i) return Polynomial::constant(0, vars_);
    return derivative(*i);
  }

  Rational evaluate(const std::vector<Rational>& point) const {
    Rational s = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] && i >= point.size()) throw DomainError("evaluation point has too few coordinates");
        for (std::uint32_t k = 0; k < e[i]; ++k) t *= point[i];
      }
      s += t;
    }
    return s;
  }

  double evaluate_double(const std::vector<double>& point) const {
    double s = 0;
    for (const auto& [e, c] : terms_) {
      double t = c.get_d();
      for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::uint32_t k = 0; k < e[i]; ++k) t *= point[i];
      }
      s += t;
    }
    return s;
  }

  // Replace each variable i by images[i]; images share one ring (or are constants).
  Polynomial compose(const std::vector<Polynomial>& images) const {
    if (images.size() < arity()) throw DomainError("compose: too few images");
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      Polynomial t = Polynomial(c);
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) t *= images[i].pow(e[i]);
      r += t;
    }
    // keep a usable ring even if the result is constant
    if (!r.vars_)
      for (const auto& im : images)
        if (im.vars_) {
          r = r.rebased(im.vars_);
          break;
        }
    return r;
  }

  // Coefficient polynomials with respect to a subset of variables: splits
  // this = sum_m m(vars in `subset`) * coeff_m(others).
  std::map<Exponents, Polynomial> split_by(const std::vector<std::size_t>& subset) const {
    std::map<Exponents, Polynomial> out;
    for (const auto& [e, c] : terms_) {
      Exponents key(subset.size(), 0);
      Exponents rest = e;
      for (std::size_t j = 0; j < subset.size(); ++j) {
        key[j] = e[subset[j]];
        rest[subset[j]] = 0;
      }
      auto [it, fresh] = out.try_emplace(key);
      if (fresh) it->second.vars_ = vars_;
      it->second.add_scaled(Polynomial::monomial(vars_, rest, c), Rational(1));
      if (it->second.is_zero()) out.erase(it);
    }
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      Rational a = abs(c);
      bool neg = c < 0;
      if (first)
        os << (neg ? "-" : "");
      else
        os << (neg ? " - " : " + ");
      first = false;
      bool unit = true;
      for (auto x : e) unit = unit && x == 0;
      bool wrote = false;
      if (a != 1 || unit) {
        os << a.get_str();
        wrote = true;
      }
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (wrote) os << "*";
        os << vars_->name(i);
        if (e[i] > 1) os << "^" << e[i];
        wrote = true;
      }
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

 private:
  std::size_t arity() const { return vars_ ? vars_->size() : 0; }
  Exponents zero_exponents() const { return Exponents(arity(), 0); }

  void unify_with(const Polynomial& o) {
    if (!vars_ && o.vars_) {
      *this = rebased(o.vars_);
    } else if (vars_ && o.vars_ && !same_ring(vars_, o.vars_)) {
      throw DomainError("adding polynomials over different rings");
    }
  }

  VarsPtr vars_;
  std::map<Exponents, Rational> terms_;
};

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view s, const VarsPtr& vars) : s_(s), vars_(vars) {}

  Polynomial run() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p.rebased(vars_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = Polynomial::constant(0, vars_);
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    while (true) {
      Polynomial t = term();
      acc.add_scaled(t, Rational(neg ? -1 : 1));
      if (eat('+'))
        neg = false;
      else if (eat('-'))
        neg = true;
      else
        break;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial t = factor();
    while (eat('*')) t *= factor();
    return t;
  }

  std::uint32_t exponent() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected exponent");
    return static_cast<std::uint32_t>(std::stoul(std::string(s_.substr(start, pos_ - start))));
  }

  Polynomial factor() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    Polynomial base;
    if (c == '(') {
      ++pos_;
      base = expr();
      if (!eat(')')) fail("expected ')'");
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string num(s_.substr(start, pos_ - start));
      std::string den = "1";
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        std::size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (ds == pos_) fail("expected denominator");
        den = std::string(s_.substr(ds, pos_ - ds));
        if (mpz_class(den) == 0) fail("zero denominator");
      }
      return Polynomial::constant(parse_rational(num + "/" + den), vars_);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      auto idx = vars_ ? vars_->index(name) : std::nullopt;
      if (!idx) {
        pos_ = start;
        fail("unknown variable '" + name + "'");
      }
      base = Polynomial::variable(vars_, *idx);
    } else {
      fail("unexpected '" + std::string(1, c) + "'");
    }
    if (eat('^')) return base.pow(exponent());
    return base;
  }

  std::string_view s_;
  VarsPtr vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Polynomial Polynomial::parse(std::string_view text, const VarsPtr& vars) {
  return detail::PolyParser(text, vars).run();
}

// ---------------------------------------------------------------------------
// Multi-indices and permutation signs.

class MultiIndex {
 public:
  MultiIndex() = default;
  // Entries must already be strictly increasing.
  explicit MultiIndex(std::vector<int> idx) : idx_(std::move(idx)) {
    for (std::size_t i = 1; i < idx_.size(); ++i)
      if (idx_[i - 1] >= idx_[i]) throw DomainError("multi-index is not strictly increasing");
  }
  MultiIndex(std::initializer_list<int> idx) : MultiIndex(std::vector<int>(idx)) {}

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  int operator[](std::size_t i) const { return idx_[i]; }
  const std::vector<int>& values() const { return idx_; }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }
  bool contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
    // shorter first, then lexicographic: matches the graded basis order
    if (a.idx_.size() != b.idx_.size()) return a.idx_.size() <=> b.idx_.size();
    return a.idx_ <=> b.idx_;
  }

 private:
  std::vector<int> idx_;
};

struct SortedWithSign {
  MultiIndex index;  // meaningless when sign == 0
  int sign;
};

// Sort by adjacent transpositions, tracking parity; sign 0 on repeated entries.
inline SortedWithSign sort_with_sign(std::vector<int> v) {
  int sign = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j - 1] >= v[j]; --j) {
      if (v[j - 1] == v[j]) return {MultiIndex{}, 0};
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  }
  return {MultiIndex(std::move(v)), sign};
}

// det(delta^{upper_a}_{lower_b}).
inline int gen_kronecker(const std::vector<int>& upper, const std::vector<int>& lower) {
  if (upper.size() != lower.size()) throw DomainError("gen_kronecker: length mismatch");
  auto u = sort_with_sign(upper);
  auto l = sort_with_sign(lower);
  if (u.sign == 0 || l.sign == 0) return 0;
  if (u.index != l.index) return 0;
  return u.sign * l.sign;
}

// All strictly increasing k-subsets of {0..n-1} in lexicographic order.
inline std::vector<MultiIndex> all_multi_indices(int n, int k) {
  std::vector<MultiIndex> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.emplace_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace msym
