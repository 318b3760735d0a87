#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "copos/common.hpp"
#include "copos/monomial.hpp"
#include "copos/sym_matrix.hpp"

namespace copos {

/// Sparse homogeneous polynomial.  Every stored monomial has exactly the
/// stated degree and zero coefficients are dropped on insertion, so the zero
/// polynomial is the one with an empty term map.
class HomPoly {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  HomPoly() : nvars_(0), degree_(0) {}
  HomPoly(int nvars, int degree) : nvars_(nvars), degree_(degree) {
    if (nvars < 0 || degree < 0) throw std::invalid_argument("HomPoly: negative shape");
  }

  static HomPoly constant(int nvars, double c) {
    HomPoly p(nvars, 0);
    p.add_term(Monomial(nvars, 0), c);
    return p;
  }

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int term_count() const { return static_cast<int>(terms_.size()); }

  double coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void add_term(const Monomial& m, double c) {
    if (static_cast<int>(m.size()) != nvars_) throw std::invalid_argument("add_term: wrong nvars");
    if (degree_of(m) != degree_) throw std::invalid_argument("add_term: wrong degree");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  /// Drops terms with |coeff| <= eps; used after float arithmetic that should
  /// have cancelled exactly.
  void prune(double eps) {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = std::abs(it->second) <= eps ? terms_.erase(it) : std::next(it);
  }

  double one_norm() const {
    double s = 0;
    for (const auto& [m, c] : terms_) s += std::abs(c);
    return s;
  }
  double max_abs_coeff() const {
    double s = 0;
    for (const auto& [m, c] : terms_) s = std::max(s, std::abs(c));
    return s;
  }
  double min_coeff() const {
    double s = 0;
    for (const auto& [m, c] : terms_) s = std::min(s, c);
    return s;
  }

  double evaluate(const std::vector<double>& x) const {
    double total = 0;
    for (const auto& [m, c] : terms_) {
      double v = c;
      for (int i = 0; i < nvars_; ++i)
        for (int e = 0; e < m[i]; ++e) v *= x[i];
      total += v;
    }
    return total;
  }

  HomPoly operator+(const HomPoly& o) const {
    require_same_shape(o);
    HomPoly out = *this;
    for (const auto& [m, c] : o.terms_) out.add_term(m, c);
    return out;
  }
  HomPoly operator-(const HomPoly& o) const {
    require_same_shape(o);
    HomPoly out = *this;
    for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
    return out;
  }
  HomPoly operator*(double s) const {
    HomPoly out(nvars_, degree_);
    if (s == 0.0) return out;
    for (const auto& [m, c] : terms_) out.terms_[m] = c * s;
    return out;
  }

  /// Multiplication by a bare monomial (degree shifts up by deg(shift)).
  HomPoly shifted_by(const Monomial& shift) const {
    HomPoly out(nvars_, degree_ + degree_of(shift));
    for (const auto& [m, c] : terms_) {
      Monomial t = m;
      for (int i = 0; i < nvars_; ++i) t[i] += shift[i];
      out.terms_[t] = c;
    }
    return out;
  }

 private:
  void require_same_shape(const HomPoly& o) const {
    if (nvars_ != o.nvars_ || degree_ != o.degree_)
      throw std::invalid_argument("HomPoly: shape mismatch");
  }
  int nvars_, degree_;
  TermMap terms_;
};

/// x^T M x as a degree-2 polynomial: m_ii on x_i^2 and 2 m_ij on x_i x_j.
inline HomPoly quad_form(const SymMatrix& m) {
  HomPoly p(m.n(), 2);
  for (int i = 0; i < m.n(); ++i) {
    for (int j = i; j < m.n(); ++j) {
      const double c = (i == j) ? m(i, i) : 2.0 * m(i, j);
      if (c != 0.0) {
        Monomial mono(m.n(), 0);
        mono[i] += 1;
        mono[j] += 1;
        p.add_term(mono, c);
      }
    }
  }
  return p;
}

/// Exact convolution product; degrees add.
inline HomPoly multiply(const HomPoly& p, const HomPoly& q) {
  if (p.nvars() != q.nvars()) throw std::invalid_argument("multiply: nvars mismatch");
  HomPoly out(p.nvars(), p.degree() + q.degree());
  for (const auto& [mp, cp] : p.terms()) {
    for (const auto& [mq, cq] : q.terms()) {
      Monomial m = mp;
      for (int i = 0; i < p.nvars(); ++i) m[i] += mq[i];
      out.add_term(m, cp * cq);
    }
  }
  return out;
}

/// (x_1 + ... + x_n)^r via repeated multiplication; r = 0 gives the constant 1.
inline HomPoly simplex_power(int nvars, int r) {
  if (r < 0) throw std::invalid_argument("simplex_power: negative exponent");
  HomPoly acc = HomPoly::constant(nvars, 1.0);
  if (r == 0) return acc;
  HomPoly lin(nvars, 1);
  for (int i = 0; i < nvars; ++i) lin.add_term(unit_monomial(nvars, i), 1.0);
  for (int k = 0; k < r; ++k) acc = multiply(acc, lin);
  return acc;
}

/// Substitution x_i -> factor_i * x_{target_i} with positive factors.  When the
/// target map is the identity this is diagonal scaling; when it collapses
/// variables coefficients merge additively.  Degree is preserved.
inline HomPoly substitute_positive(const HomPoly& p, const std::vector<int>& target,
                                   const std::vector<double>& factor) {
  if (static_cast<int>(target.size()) != p.nvars() ||
      static_cast<int>(factor.size()) != p.nvars())
    throw std::invalid_argument("substitute_positive: map size mismatch");
  for (double f : factor)
    if (!(f > 0)) throw std::invalid_argument("substitute_positive: non-positive factor");
  for (int t : target)
    if (t < 0 || t >= p.nvars()) throw std::invalid_argument("substitute_positive: bad target");
  HomPoly out(p.nvars(), p.degree());
  for (const auto& [m, c] : p.terms()) {
    Monomial t(p.nvars(), 0);
    double scale = 1.0;
    for (int i = 0; i < p.nvars(); ++i) {
      t[target[i]] += m[i];
      for (int e = 0; e < m[i]; ++e) scale *= factor[i];
    }
    out.add_term(t, c * scale);
  }
  return out;
}

inline HomPoly scale_variables(const HomPoly& p, const std::vector<double>& d) {
  std::vector<int> id(p.nvars());
  for (int i = 0; i < p.nvars(); ++i) id[i] = i;
  return substitute_positive(p, id, d);
}

/// p / ||p||_1.
inline HomPoly normalize_one(const HomPoly& p) {
  const double nrm = p.one_norm();
  if (nrm == 0.0) throw std::invalid_argument("normalize_one: zero polynomial");
  return p * (1.0 / nrm);
}

inline bool is_nonneg_coeffs(const HomPoly& p, double tol) {
  return p.min_coeff() >= -tol;
}

using Permutation = std::vector<int>;

inline bool is_permutation(const Permutation& s, int n) {
  if (static_cast<int>(s.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int v : s) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

inline Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[b[i]];
  return out;
}

/// Closure of the group generated by `generators`, up to `cap` elements.
inline std::vector<Permutation> group_closure(int n, const std::vector<Permutation>& generators,
                                              size_t cap = 100000) {
  Permutation id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  std::set<Permutation> group{id};
  std::vector<Permutation> frontier{id};
  while (!frontier.empty()) {
    std::vector<Permutation> next;
    for (const auto& g : frontier) {
      for (const auto& s : generators) {
        Permutation h = compose(s, g);
        if (group.insert(h).second) {
          if (group.size() > cap) throw ResourceLimitError("group_closure: cap exceeded");
          next.push_back(std::move(h));
        }
      }
    }
    frontier = std::move(next);
  }
  return {group.begin(), group.end()};
}

/// p^sigma: variable i takes the role of variable sigma(i), per the action
/// p^s(x_1,...,x_n) = p(x_{s(1)},...,x_{s(n)}).
inline HomPoly apply_permutation(const HomPoly& p, const Permutation& sigma) {
  HomPoly out(p.nvars(), p.degree());
  for (const auto& [m, c] : p.terms()) {
    Monomial t(p.nvars(), 0);
    for (int i = 0; i < p.nvars(); ++i) t[i] = m[sigma[i]];
    out.add_term(t, c);
  }
  return out;
}

/// Group average over the closure of `generators`, then normalize to unit
/// 1-norm.  The closure is computed explicitly and capped.
inline HomPoly symmetrize(const HomPoly& p, const std::vector<Permutation>& generators,
                          size_t cap = 100000) {
  for (const auto& g : generators)
    if (!is_permutation(g, p.nvars()))
      throw std::invalid_argument("symmetrize: generator is not a permutation of [n]");
  const auto group = group_closure(p.nvars(), generators, cap);
  HomPoly acc(p.nvars(), p.degree());
  for (const auto& sigma : group) acc = acc + apply_permutation(p, sigma);
  return normalize_one(acc * (1.0 / static_cast<double>(group.size())));
}

}  // namespace copos
