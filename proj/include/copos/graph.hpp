#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "copos/common.hpp"
#include "copos/sym_matrix.hpp"

namespace copos {

using VertexSet = std::vector<int>;  // sorted, distinct vertex labels

namespace detail {
inline int popcount64(uint64_t x) { return __builtin_popcountll(x); }
inline int lowest_bit(uint64_t x) { return __builtin_ctzll(x); }
}  // namespace detail

/// Simple undirected graph on vertices 0..n-1.  Immutable after construction:
/// derived quantities (alpha) are cached and never go stale.  Exact
/// enumeration requires n <= 64 (bitset representation).
class Graph {
 public:
  static constexpr int kExactCap = 64;

  Graph() : n_(0) {}
  explicit Graph(int n, std::vector<std::pair<int, int>> edges = {}, std::string name = "")
      : n_(n), name_(std::move(name)) {
    if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
    std::set<std::pair<int, int>> canon;
    for (auto [a, b] : edges) {
      if (a == b) throw std::invalid_argument("Graph: self-loop");
      if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("Graph: endpoint out of range");
      canon.emplace(std::min(a, b), std::max(a, b));
    }
    edges_.assign(canon.begin(), canon.end());
    if (n_ <= kExactCap) {
      adj_.assign(n_, 0);
      for (auto [a, b] : edges_) {
        adj_[a] |= (uint64_t{1} << b);
        adj_[b] |= (uint64_t{1} << a);
      }
    }
  }

  int n() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::string& name() const { return name_; }

  bool has_edge(int a, int b) const {
    if (a == b) return false;
    return (adj_[a] >> b) & 1;
  }
  int degree(int v) const { return detail::popcount64(adj_[v]); }

  bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

  SymMatrix adjacency_matrix() const {
    SymMatrix a(n_);
    for (auto [i, j] : edges_) a.set(i, j, 1.0);
    return a;
  }

  Graph complement(std::string name = "") const {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (!has_edge(i, j)) e.emplace_back(i, j);
    return Graph(n_, std::move(e), std::move(name));
  }

  /// Induced subgraph on `keep` (sorted ascending); vertices are relabeled
  /// 0..k-1 in the order of `keep`.
  Graph induced(const VertexSet& keep) const {
    std::vector<int> pos(n_, -1);
    for (size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> e;
    for (auto [a, b] : edges_)
      if (pos[a] >= 0 && pos[b] >= 0) e.emplace_back(pos[a], pos[b]);
    return Graph(static_cast<int>(keep.size()), std::move(e));
  }

  /// Induced subgraph on the complement of `remove`.
  Graph minus(const VertexSet& remove) const {
    std::vector<bool> drop(n_, false);
    for (int v : remove) drop[v] = true;
    VertexSet keep;
    for (int v = 0; v < n_; ++v)
      if (!drop[v]) keep.push_back(v);
    return induced(keep);
  }

  Graph minus_edge(int a, int b) const {
    std::vector<std::pair<int, int>> e;
    auto key = std::make_pair(std::min(a, b), std::max(a, b));
    for (auto& ed : edges_)
      if (ed != key) e.push_back(ed);
    return Graph(n_, std::move(e));
  }

  int alpha() const;  // cached alpha_exact

  mutable std::optional<int> alpha_cache_;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<uint64_t> adj_;
  std::string name_;

  friend int alpha_exact(const Graph&);
  friend class StableSetEnumerator;
};

namespace detail {

/// Greedy clique cover of the candidate set: upper bound on the stable set
/// number of the induced subgraph (each clique meets a stable set at most once).
inline int clique_cover_bound(uint64_t cand, const std::vector<uint64_t>& adj) {
  int cliques = 0;
  while (cand) {
    int v = lowest_bit(cand);
    uint64_t clique = uint64_t{1} << v;
    uint64_t common = adj[v] & cand;
    cand &= ~clique;
    while (common) {
      int u = lowest_bit(common);
      clique |= (uint64_t{1} << u);
      common &= adj[u];
      cand &= ~(uint64_t{1} << u);
      common &= cand;
    }
    ++cliques;
  }
  return cliques;
}

inline void mis_recurse(const Graph& g, const std::vector<uint64_t>& adj, uint64_t cand,
                        int current, int& best) {
  if (!cand) {
    best = std::max(best, current);
    return;
  }
  if (current + clique_cover_bound(cand, adj) <= best) return;
  // branch on a vertex of maximum degree within cand
  int pick = -1, maxdeg = -1;
  for (uint64_t rest = cand; rest;) {
    int v = lowest_bit(rest);
    rest &= rest - 1;
    int d = popcount64(adj[v] & cand);
    if (d > maxdeg) {
      maxdeg = d;
      pick = v;
    }
  }
  // include pick
  mis_recurse(g, adj, cand & ~(adj[pick] | (uint64_t{1} << pick)), current + 1, best);
  // exclude pick
  mis_recurse(g, adj, cand & ~(uint64_t{1} << pick), current, best);
}

}  // namespace detail

/// Exact maximum stable-set size by branch-and-bound with greedy clique-cover
/// pruning.  n = 0 returns 0.
inline int alpha_exact(const Graph& g) {
  if (g.n() == 0) return 0;
  if (g.n() > Graph::kExactCap)
    throw ResourceLimitError("alpha_exact: n exceeds exact enumeration cap");
  if (g.alpha_cache_) return *g.alpha_cache_;
  uint64_t all = (g.n() == 64) ? ~uint64_t{0} : ((uint64_t{1} << g.n()) - 1);
  int best = 0;
  detail::mis_recurse(g, g.adj_, all, 0, best);
  g.alpha_cache_ = best;
  return best;
}

inline int Graph::alpha() const { return alpha_exact(*this); }

enum class StableSetMode { AllUpToAlpha, StrictlyBelowAlpha, MaximumOnly };

/// Enumerated family of stable sets.  The empty set is included whenever the
/// requested mode covers size 0.
struct StableSetFamily {
  std::vector<VertexSet> all;
  int alpha = 0;
  StableSetMode mode = StableSetMode::AllUpToAlpha;
};

class StableSetEnumerator {
 public:
  static StableSetFamily run(const Graph& g, StableSetMode mode) {
    if (g.n() > Graph::kExactCap)
      throw ResourceLimitError("stable_sets: n exceeds exact enumeration cap");
    StableSetFamily fam;
    fam.alpha = alpha_exact(g);
    fam.mode = mode;
    const int lo = (mode == StableSetMode::MaximumOnly) ? fam.alpha : 0;
    const int hi = (mode == StableSetMode::StrictlyBelowAlpha) ? fam.alpha - 1 : fam.alpha;
    VertexSet cur;
    recurse(g, 0, cur, lo, hi, fam.all);
    return fam;
  }

 private:
  static void recurse(const Graph& g, int next, VertexSet& cur, int lo, int hi,
                      std::vector<VertexSet>& out) {
    if (static_cast<int>(cur.size()) >= lo) out.push_back(cur);
    if (static_cast<int>(cur.size()) == hi) return;
    for (int v = next; v < g.n(); ++v) {
      bool ok = true;
      for (int u : cur)
        if (g.has_edge(u, v)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      cur.push_back(v);
      recurse(g, v + 1, cur, lo, hi, out);
      cur.pop_back();
    }
  }
};

inline StableSetFamily stable_sets(const Graph& g, StableSetMode mode) {
  return StableSetEnumerator::run(g, mode);
}

inline bool is_stable_set(const Graph& g, const VertexSet& s) {
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = i + 1; j < s.size(); ++j)
      if (g.has_edge(s[i], s[j])) return false;
  return true;
}

/// S togther with all neighbors of S (the set written S^perp).
inline VertexSet extended_neighborhood(const Graph& g, const VertexSet& s) {
  std::vector<bool> in(g.n(), false);
  for (int v : s) {
    if (v < 0 || v >= g.n()) throw std::invalid_argument("extended_neighborhood: vertex out of range");
    in[v] = true;
    for (int u = 0; u < g.n(); ++u)
      if (g.has_edge(v, u)) in[u] = true;
  }
  VertexSet out;
  for (int v = 0; v < g.n(); ++v)
    if (in[v]) out.push_back(v);
  return out;
}

/// G with S^perp deleted.
inline Graph minus_perp(const Graph& g, const VertexSet& s) {
  return g.minus(extended_neighborhood(g, s));
}

/// The local graph (G \ i^perp) + K_{i^perp}: disjoint union on the original
/// vertex set, keeping labels.
inline Graph local_graph(const Graph& g, int i) {
  if (i < 0 || i >= g.n()) throw std::invalid_argument("local_graph: vertex out of range");
  VertexSet perp = extended_neighborhood(g, {i});
  std::vector<bool> in_perp(g.n(), false);
  for (int v : perp) in_perp[v] = true;
  std::vector<std::pair<int, int>> e;
  for (auto [a, b] : g.edges())
    if (!in_perp[a] && !in_perp[b]) e.emplace_back(a, b);
  for (size_t a = 0; a < perp.size(); ++a)
    for (size_t b = a + 1; b < perp.size(); ++b) e.emplace_back(perp[a], perp[b]);
  return Graph(g.n(), std::move(e));
}

/// Edges whose removal increases alpha, found by re-evaluation per edge.
inline std::vector<std::pair<int, int>> critical_edges(const Graph& g) {
  std::vector<std::pair<int, int>> out;
  const int a = alpha_exact(g);
  for (auto [i, j] : g.edges())
    if (alpha_exact(g.minus_edge(i, j)) == a + 1) out.emplace_back(i, j);
  return out;
}

/// Connectivity of (V, critical edges); n <= 1 counts as connected.
inline bool critical_subgraph_connected(const Graph& g) {
  if (g.n() <= 1) return true;
  auto crit = critical_edges(g);
  std::vector<int> parent(g.n());
  for (int v = 0; v < g.n(); ++v) parent[v] = v;
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int comps = g.n();
  for (auto [i, j] : crit) {
    int a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps == 1;
}

/// t(A_G + I) - J.  Defaults to t = alpha(G), giving the graph matrix M_G.
inline SymMatrix m_matrix(const Graph& g, double t) {
  if (g.n() < 1) throw std::invalid_argument("m_matrix: empty graph");
  SymMatrix m = SymMatrix::constant(g.n(), -1.0);
  for (int i = 0; i < g.n(); ++i) m.set(i, i, t - 1.0);
  for (auto [i, j] : g.edges()) m.set(i, j, t - 1.0);
  return m;
}
inline SymMatrix m_matrix(const Graph& g) { return m_matrix(g, alpha_exact(g)); }

namespace detail {
inline bool k_colorable(const std::vector<uint64_t>& adj, int n, int k, std::vector<int>& color,
                        int v) {
  if (v == n) return true;
  // symmetry breaking: vertex v may open at most one new color class
  int max_new = 0;
  for (int u = 0; u < v; ++u) max_new = std::max(max_new, color[u] + 1);
  for (int c = 0; c < std::min(k, max_new + 1); ++c) {
    bool ok = true;
    for (int u = 0; u < v; ++u)
      if (((adj[v] >> u) & 1) && color[u] == c) {
        ok = false;
        break;
      }
    if (!ok) continue;
    color[v] = c;
    if (k_colorable(adj, n, k, color, v + 1)) return true;
    color[v] = -1;
  }
  return false;
}
}  // namespace detail

/// Minimum number of cliques covering V, via exact coloring of the complement.
inline int clique_cover_number(const Graph& g) {
  if (g.n() == 0) return 0;
  if (g.n() > 28) throw ResourceLimitError("clique_cover_number: exact search cap exceeded");
  Graph comp = g.complement();
  std::vector<uint64_t> adj(comp.n(), 0);
  for (auto [a, b] : comp.edges()) {
    adj[a] |= uint64_t{1} << b;
    adj[b] |= uint64_t{1} << a;
  }
  // chromatic number of the complement; alpha(G) is a lower bound
  for (int k = std::max(1, alpha_exact(g));; ++k) {
    std::vector<int> color(comp.n(), -1);
    if (detail::k_colorable(adj, comp.n(), k, color, 0)) return k;
  }
}

inline Graph disjoint_union(const Graph& a, const Graph& b, std::string name = "") {
  std::vector<std::pair<int, int>> e = a.edges();
  for (auto [i, j] : b.edges()) e.emplace_back(i + a.n(), j + a.n());
  return Graph(a.n() + b.n(), std::move(e), std::move(name));
}

// ---------------------------------------------------------------------------
// Named graph families
// ---------------------------------------------------------------------------

inline Graph make_cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle: need n >= 3");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e), "C" + std::to_string(n));
}

inline Graph make_complete(int n) {
  if (n < 1) throw std::invalid_argument("complete: need n >= 1");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e), "K" + std::to_string(n));
}

inline Graph make_empty(int n) { return Graph(n, {}, "E" + std::to_string(n)); }

inline Graph make_complete_bipartite(int a, int b) {
  if (a < 1 || b < 1) throw std::invalid_argument("complete_bipartite: need positive parts");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
  return Graph(a + b, std::move(e), "K" + std::to_string(a) + "," + std::to_string(b));
}

/// Star T_n: center 0, leaves 1..n.
inline Graph make_star(int n) {
  if (n < 1) throw std::invalid_argument("star: need n >= 1");
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= n; ++i) e.emplace_back(0, i);
  return Graph(n + 1, std::move(e), "T" + std::to_string(n));
}

/// 8-cycle 0..7 plus chords {1,3} and {2,6} (figure-derived constant).
inline Graph make_graph_B() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 8; ++i) e.emplace_back(i, (i + 1) % 8);
  e.emplace_back(1, 3);
  e.emplace_back(2, 6);
  return Graph(8, std::move(e), "B");
}
/// Vertices drawn with a diamond in the figure for graph B.
inline VertexSet graph_B_marked() { return {1, 2, 3, 5, 6, 7}; }

/// 8-cycle 0..7 plus chords {1,5} and {2,6} (figure-derived constant).
inline Graph make_graph_C() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 8; ++i) e.emplace_back(i, (i + 1) % 8);
  e.emplace_back(1, 5);
  e.emplace_back(2, 6);
  return Graph(8, std::move(e), "C");
}
/// Vertices drawn with a diamond in the figure for graph C.
inline VertexSet graph_C_marked() { return {1, 2, 5, 6}; }

/// G_k: K_{k+1,k+1} with each edge {u_i, v_i} (i >= 1) subdivided by w_i.
/// Labels: u_0..u_k are 0..k, v_0..v_k are k+1..2k+1, w_1..w_k are 2k+2..3k+1.
inline Graph make_G_k(int k) {
  if (k < 1) throw std::invalid_argument("G_k: need k >= 1");
  const int n = 3 * k + 2;
  auto u = [&](int i) { return i; };
  auto v = [&](int i) { return k + 1 + i; };
  auto w = [&](int i) { return 2 * k + 1 + i; };  // i in 1..k
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j)
      if (!(i == j && i >= 1)) e.emplace_back(u(i), v(j));
  for (int i = 1; i <= k; ++i) {
    e.emplace_back(u(i), w(i));
    e.emplace_back(v(i), w(i));
  }
  return Graph(n, std::move(e), "G_" + std::to_string(k));
}
inline VertexSet G_k_w_vertices(int k) {
  VertexSet s;
  for (int i = 1; i <= k; ++i) s.push_back(2 * k + 1 + i);
  return s;
}
inline VertexSet G_k_uv_vertices(int k) {
  VertexSet s;
  for (int i = 0; i <= 2 * k + 1; ++i) s.push_back(i);
  return s;
}

namespace detail {
/// L_k labeling: s_1..s_k are 0..k-1, then for each pair (i<j) in lex order a
/// block a_ij, b_ij, c_ij.
struct LkLabels {
  int k;
  int s(int i) const { return i - 1; }  // i in 1..k
  int pair_base(int i, int j) const {
    // index of (i,j), i<j, in lex order over 1..k
    int idx = 0;
    for (int a = 1; a <= k; ++a)
      for (int b = a + 1; b <= k; ++b) {
        if (a == i && b == j) return k + 3 * idx;
        ++idx;
      }
    throw std::invalid_argument("LkLabels: bad pair");
  }
  int a(int i, int j) const { return pair_base(i, j); }
  int b(int i, int j) const { return pair_base(i, j) + 1; }
  int c(int i, int j) const { return pair_base(i, j) + 2; }
};
}  // namespace detail

/// L_k: for each pair s_i, s_j a 5-cycle s_i - a_ij - b_ij - s_j - c_ij - s_i,
/// plus a K_{3,3} between the triples of distinct pairs.
inline Graph make_L_k(int k, bool prime = false) {
  if (k < 2) throw std::invalid_argument("L_k: need k >= 2");
  detail::LkLabels L{k};
  const int n = k + 3 * (k * (k - 1) / 2);
  std::vector<std::pair<int, int>> e;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j) pairs.emplace_back(i, j);
  for (auto [i, j] : pairs) {
    e.emplace_back(L.s(i), L.a(i, j));
    e.emplace_back(L.a(i, j), L.b(i, j));
    e.emplace_back(L.b(i, j), L.s(j));
    e.emplace_back(L.s(j), L.c(i, j));
    e.emplace_back(L.c(i, j), L.s(i));
  }
  for (size_t p = 0; p < pairs.size(); ++p) {
    for (size_t q = p + 1; q < pairs.size(); ++q) {
      auto [i, j] = pairs[p];
      auto [l, m] = pairs[q];
      int A1[3] = {L.a(i, j), L.b(i, j), L.c(i, j)};
      int A2[3] = {L.a(l, m), L.b(l, m), L.c(l, m)};
      for (int x : A1)
        for (int y : A2) {
          if (prime) {
            // L_k': drop every cross edge that touches a c-node on one side only
            bool xc = (x == L.c(i, j)), yc = (y == L.c(l, m));
            if (xc != yc) continue;
          }
          e.emplace_back(x, y);
        }
    }
  }
  return Graph(n, std::move(e), std::string(prime ? "L'" : "L") + "_" + std::to_string(k));
}
inline VertexSet L_k_s_vertices(int k) {
  VertexSet s;
  for (int i = 0; i < k; ++i) s.push_back(i);
  return s;
}

/// Icosahedron: 12 vertices, 30 edges, 5-regular (figure edge list, 0-indexed).
inline Graph make_icosahedron() {
  static const int E[30][2] = {{1, 2},   {2, 3},   {3, 1},  {4, 5},  {5, 6},   {6, 7},
                               {7, 8},   {8, 9},   {9, 4},  {5, 2},  {4, 2},   {6, 2},
                               {4, 1},   {1, 9},   {1, 8},  {8, 3},  {7, 3},   {6, 3},
                               {10, 11}, {11, 12}, {12, 10}, {10, 5}, {5, 11},  {10, 4},
                               {10, 9},  {12, 9},  {12, 8}, {7, 12}, {7, 11},  {11, 6}};
  std::vector<std::pair<int, int>> e;
  for (auto& ed : E) e.emplace_back(ed[0] - 1, ed[1] - 1);
  return Graph(12, std::move(e), "icosahedron");
}

}  // namespace copos
