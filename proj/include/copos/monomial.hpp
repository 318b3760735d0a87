#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

namespace copos {

/// A monomial is its exponent vector; length is the number of variables.
using Monomial = std::vector<int>;

inline int degree_of(const Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0);
}

/// Graded lexicographic order: lower total degree first, then lex on exponents.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = degree_of(a), db = degree_of(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

inline Monomial unit_monomial(int nvars, int var, int power = 1) {
  Monomial m(nvars, 0);
  m[var] = power;
  return m;
}

inline bool is_squarefree(const Monomial& m) {
  return std::all_of(m.begin(), m.end(), [](int e) { return e <= 1; });
}

/// m - e_i - e_j, or empty when the subtraction leaves a negative exponent.
inline bool try_subtract_pair(const Monomial& m, int i, int j, Monomial& out) {
  out = m;
  if (--out[i] < 0) return false;
  if (--out[j] < 0) return false;
  return true;
}

namespace detail {
inline void enumerate_rec(int nvars, int pos, int remaining, Monomial& cur,
                          std::vector<Monomial>& out) {
  if (pos == nvars - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    enumerate_rec(nvars, pos + 1, remaining - e, cur, out);
  }
}
}  // namespace detail

/// All exponent vectors of a fixed total degree, in graded-lex order, with an
/// index map for O(log) lookup.  Tables are cached per (nvars, degree).
class MonomialTable {
 public:
  MonomialTable(int nvars, int degree) : nvars_(nvars), degree_(degree) {
    if (nvars <= 0) {
      if (degree == 0) monos_.push_back({});
    } else {
      Monomial cur(nvars, 0);
      detail::enumerate_rec(nvars, 0, degree, cur, monos_);
      std::sort(monos_.begin(), monos_.end(), GradedLexLess{});
    }
    for (int i = 0; i < static_cast<int>(monos_.size()); ++i) index_[monos_[i]] = i;
  }

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(monos_.size()); }
  const Monomial& operator[](int i) const { return monos_[i]; }
  const std::vector<Monomial>& all() const { return monos_; }

  int index_of(const Monomial& m) const {
    auto it = index_.find(m);
    return it == index_.end() ? -1 : it->second;
  }

  static const MonomialTable& get(int nvars, int degree) {
    static std::map<std::pair<int, int>, std::unique_ptr<MonomialTable>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(nvars, degree);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, std::make_unique<MonomialTable>(nvars, degree)).first;
    return *it->second;
  }

 private:
  int nvars_, degree_;
  std::vector<Monomial> monos_;
  std::map<Monomial, int> index_;
};

}  // namespace copos
