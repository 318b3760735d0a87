#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "copos/cones.hpp"
#include "copos/graph.hpp"

namespace copos {

struct SearchProbe {
  double t;
  Membership verdict;
};

struct BoundResult {
  double value = std::numeric_limits<double>::infinity();
  int level = 0;
  std::string hierarchy;
  double t_tol = 0.0;
  std::optional<SosCertificate> certificate;
  std::vector<SearchProbe> trace;
  /// false when an Unknown solver verdict steered the search (the value is
  /// then a conservative upper endpoint, not a proven bracket)
  bool verified = true;
};

struct BoundOptions {
  double t_tol = 1e-4;
  SolveOptions solver = SolveOptions::defaults();
};

namespace detail {

/// Direct SDP minimization of t with t(A+I) - J constrained into the level-r
/// Gram structure.  Substitutes t = 1 + s with s >= 0 (every bound is >= 1).
inline BoundResult minimize_t(const Graph& g, int r, bool k_cone, const char* tag,
                              const BoundOptions& opts) {
  if (g.n() < 1) throw std::invalid_argument("bound: empty graph");
  const int n = g.n();
  FeasibilityProblem prob;
  GramStructure gs(prob, n, r, k_cone);
  const int svar = prob.add_nonneg();
  const HomPoly sp = simplex_power(n, r);
  const HomPoly k1 = multiply(sp, quad_form(SymMatrix::from_eigen(
                                      g.adjacency_matrix().eigen() +
                                      Eigen::MatrixXd::Identity(n, n))));
  const HomPoly kj = multiply(sp, quad_form(SymMatrix::constant(n, 1.0)));
  const auto& gammas = MonomialTable::get(n, r + 2);
  for (int gi = 0; gi < gammas.size(); ++gi) {
    const Monomial& gamma = gammas[gi];
    std::vector<FeasibilityProblem::Term> terms;
    gs.append_terms(gamma, terms);
    terms.push_back(FeasibilityProblem::nonneg(svar, -k1.coeff(gamma)));
    prob.add_equality(std::move(terms), k1.coeff(gamma) - kj.coeff(gamma));
  }
  prob.set_objective({FeasibilityProblem::nonneg(svar, 1.0)});
  SolveResult sol = solve(prob, opts.solver);
  if (sol.status != SolveStatus::Feasible)
    throw SolverError(std::string(tag) + ": solver returned " +
                      (sol.status == SolveStatus::Infeasible ? "infeasible" : "unknown") + " (" +
                      sol.message + ")");
  BoundResult res;
  res.hierarchy = tag;
  res.level = r;
  res.t_tol = opts.t_tol;
  res.value = 1.0 + *sol.objective_value;
  res.trace.push_back({res.value, Membership::Member});
  const double scale = 1.0 / std::pow(static_cast<double>(n), r);
  SosCertificate cert;
  cert.nvars = n;
  cert.level = r;
  cert.multiplier = sp * scale;
  gs.fill_certificate(sol, scale, cert);
  res.certificate = std::move(cert);
  return res;
}

/// Binary search on t in [1, n] against a membership predicate.  The
/// predicate set {t : member} is an up-closed interval for every hierarchy
/// here (adding (t'-t)(A+I) keeps all representations valid).
inline BoundResult binary_search_t(const Graph& g, int r, const char* tag, double t_tol,
                                   const std::function<MembershipVerdict(double)>& probe,
                                   bool hi_must_be_member) {
  if (g.n() < 1) throw std::invalid_argument("bound: empty graph");
  BoundResult res;
  res.hierarchy = tag;
  res.level = r;
  res.t_tol = t_tol;
  double lo = 1.0, hi = static_cast<double>(g.n());

  MembershipVerdict v_lo = probe(lo);
  res.trace.push_back({lo, v_lo.status});
  if (v_lo.status == Membership::Member) {
    res.value = lo;
    res.certificate = std::move(v_lo.certificate);
    return res;
  }
  if (v_lo.status == Membership::Unknown) res.verified = false;

  if (hi > lo) {
    MembershipVerdict v_hi = probe(hi);
    res.trace.push_back({hi, v_hi.status});
    if (v_hi.status != Membership::Member) {
      // genuinely infeasible on the whole interval (or solver failure)
      res.value = std::numeric_limits<double>::infinity();
      if (v_hi.status == Membership::Unknown || hi_must_be_member) res.verified = false;
      return res;
    }
    res.certificate = std::move(v_hi.certificate);
  } else {
    res.value = std::numeric_limits<double>::infinity();
    res.verified = false;
    return res;
  }

  while (hi - lo > t_tol) {
    const double mid = 0.5 * (lo + hi);
    MembershipVerdict v = probe(mid);
    res.trace.push_back({mid, v.status});
    if (v.status == Membership::Member) {
      hi = mid;
      res.certificate = std::move(v.certificate);
    } else {
      // Unknown is treated as infeasible for the lower endpoint; the final
      // value stays a valid upper bound but loses its bracket guarantee.
      if (v.status == Membership::Unknown) res.verified = false;
      lo = mid;
    }
  }
  res.value = hi;
  return res;
}

}  // namespace detail

/// nu^{(r)}(G) = min { t : t(A+I) - J in Q^{(r)} } by direct SDP minimization.
inline BoundResult nu_bound(const Graph& g, int r, const BoundOptions& opts = {}) {
  return detail::minimize_t(g, r, /*k_cone=*/false, "nu", opts);
}

/// theta^{(r)}(G): same with the K^{(r)} cone; level capped (default 3).
inline BoundResult theta_bound(const Graph& g, int r, const BoundOptions& opts = {},
                               int level_cap = 3) {
  if (r > level_cap) throw ResourceLimitError("theta_bound: level exceeds cap");
  return detail::minimize_t(g, r, /*k_cone=*/true, "theta", opts);
}

/// nutilde^{(r)}(G) by binary search over Qtilde^{(r)} membership queries.
inline BoundResult nu_tilde_bound(const Graph& g, int r, const BoundOptions& opts = {}) {
  MembershipOptions mo;
  mo.solver = opts.solver;
  return detail::binary_search_t(
      g, r, "nutilde", opts.t_tol,
      [&](double t) { return qtilde_membership(m_matrix(g, t), r, mo); },
      /*hi_must_be_member=*/true);
}

/// zeta^{(r)} (fixed simplex multiplier) or zetatilde^{(r)} (free multiplier)
/// by binary search over the LP/arithmetic membership tests.  Infinity means
/// not attained anywhere on [1, n].
inline BoundResult zeta_bounds(const Graph& g, int r, bool fixed_multiplier,
                               const BoundOptions& opts = {}) {
  MembershipOptions mo;
  mo.solver = opts.solver;
  auto probe = [&](double t) {
    return fixed_multiplier ? c_membership(m_matrix(g, t), r, mo)
                            : ctilde_membership(m_matrix(g, t), r, mo);
  };
  return detail::binary_search_t(g, r, fixed_multiplier ? "zeta" : "zetatilde", opts.t_tol, probe,
                                 /*hi_must_be_member=*/false);
}

// ---------------------------------------------------------------------------
// d-vectors (Eq. d_j + d_k >= d_i over induced paths j - i - k)
// ---------------------------------------------------------------------------

struct DVector {
  std::vector<double> d;
};

struct IneqDCheck {
  bool valid = true;
  std::vector<std::array<int, 3>> violations;  // (i, j, k): d_j + d_k < d_i
};

inline IneqDCheck check_ineq_d(const Graph& g, const DVector& dv, double tol = 1e-9) {
  IneqDCheck out;
  const auto& d = dv.d;
  if (static_cast<int>(d.size()) != g.n()) throw std::invalid_argument("check_ineq_d: size");
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      for (int k = j + 1; k < g.n(); ++k) {
        if (j == i || k == i) continue;
        if (g.has_edge(i, j) && g.has_edge(i, k) && !g.has_edge(j, k)) {
          if (d[j] + d[k] < d[i] - tol) {
            out.valid = false;
            out.violations.push_back({i, j, k});
          }
        }
      }
  return out;
}

/// LP search for a valid d-vector.  With a target support the vector is
/// forced to >= 1 on the target and 0 elsewhere; without one the all-ones
/// vector is always valid, and the LP maximizes the surrogate sum min(d_i, 1).
inline std::optional<DVector> find_d(const Graph& g,
                                     const std::optional<VertexSet>& target_support,
                                     const SolveOptions& solver = SolveOptions::defaults()) {
  const int n = g.n();
  FeasibilityProblem prob;
  std::vector<int> dvar(n, -1);
  std::vector<bool> in_target(n, target_support ? false : true);
  if (target_support)
    for (int v : *target_support) in_target[v] = true;
  // target mode: d_i = 1 + u_i on the support, 0 off it; surrogate mode: free d_i >= 0
  for (int i = 0; i < n; ++i)
    if (in_target[i]) dvar[i] = prob.add_nonneg();
  auto d_terms = [&](int i, double c) -> std::optional<FeasibilityProblem::Term> {
    if (dvar[i] < 0) return std::nullopt;  // fixed to zero
    return FeasibilityProblem::nonneg(dvar[i], c);
  };
  const double base = target_support ? 1.0 : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (j == i || k == i) continue;
        if (!(g.has_edge(i, j) && g.has_edge(i, k) && !g.has_edge(j, k))) continue;
        // (base_j + u_j) + (base_k + u_k) - (base_i + u_i) >= 0
        std::vector<FeasibilityProblem::Term> terms;
        double rhs = 0.0;
        if (auto t = d_terms(j, 1.0)) terms.push_back(*t);
        if (auto t = d_terms(k, 1.0)) terms.push_back(*t);
        if (auto t = d_terms(i, -1.0)) terms.push_back(*t);
        rhs -= base * ((in_target[j] ? 1 : 0) + (in_target[k] ? 1 : 0) - (in_target[i] ? 1 : 0));
        const int slack = prob.add_nonneg();
        terms.push_back(FeasibilityProblem::nonneg(slack, -1.0));
        prob.add_equality(std::move(terms), rhs);
      }
  if (!target_support) {
    // maximize sum of min(d_i, 1):  u_i <= d_i, u_i <= 1, maximize sum u_i
    std::vector<FeasibilityProblem::Term> obj;
    for (int i = 0; i < n; ++i) {
      const int u = prob.add_nonneg();
      const int cap = prob.add_nonneg();
      prob.add_equality({FeasibilityProblem::nonneg(u, 1.0), FeasibilityProblem::nonneg(cap, 1.0)},
                        1.0);
      const int gap = prob.add_nonneg();
      prob.add_equality({FeasibilityProblem::nonneg(dvar[i], 1.0),
                         FeasibilityProblem::nonneg(u, -1.0),
                         FeasibilityProblem::nonneg(gap, -1.0)},
                        0.0);
      obj.push_back(FeasibilityProblem::nonneg(u, -1.0));
    }
    prob.set_objective(std::move(obj));
  }
  SolveResult sol = solve(prob, solver);
  if (sol.status != SolveStatus::Feasible) return std::nullopt;
  DVector dv;
  dv.d.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (dvar[i] >= 0) dv.d[i] = base + std::max(0.0, sol.nonneg_values[dvar[i]]);
  if (!check_ineq_d(g, dv, 1e-7).valid) return std::nullopt;
  return dv;
}

// ---------------------------------------------------------------------------
// Rank machinery
// ---------------------------------------------------------------------------

struct RankReport {
  enum class Kind { Lower, Upper };
  Kind kind = Kind::Upper;
  int bound = 0;
  std::string method;
  std::optional<VertexSet> witness_set;
  std::optional<DVector> witness_d;
  std::string detail;
  bool verified = true;
};

/// nutilde-rank(G) == 0, i.e. M_G = P + N.  Fast path: clique cover number
/// equal to alpha (always the case for perfect graphs).  An Unknown solver
/// verdict is reported as false: conservative for every upper-bound use.
inline bool rank0_test(const Graph& g, const SolveOptions& solver = SolveOptions::defaults()) {
  if (g.n() == 0) return true;
  const int a = alpha_exact(g);
  if (g.n() <= 24 && clique_cover_number(g) == a) return true;
  MembershipOptions mo;
  mo.solver = solver;
  Q0Split split = q0_split(m_matrix(g, a), mo);
  return split.status == Membership::Member;
}

namespace detail {

inline bool rank1_condition_ii(const Graph& g, const std::vector<bool>& in_s,
                               std::array<int, 3>* violation = nullptr) {
  for (int i = 0; i < g.n(); ++i)
    for (int j = i + 1; j < g.n(); ++j) {
      if (in_s[i] || in_s[j] || g.has_edge(i, j)) continue;
      for (int k = 0; k < g.n(); ++k)
        if (in_s[k] && g.has_edge(i, k) && g.has_edge(j, k)) {
          if (violation) *violation = {i, j, k};
          return false;
        }
    }
  return true;
}

}  // namespace detail

/// Sufficient condition for nutilde-rank <= 1 with witness S: (i) every
/// G \ i^perp for i in S has rank 0, and (ii) no two nonadjacent vertices
/// outside S share a neighbor in S.  Search mode starts from all vertices
/// passing (i) and greedily removes (ii)-violators.
inline std::optional<RankReport> rank1_sufficient(const Graph& g,
                                                  const std::optional<VertexSet>& s_opt,
                                                  const SolveOptions& solver = SolveOptions::defaults()) {
  const int n = g.n();
  std::vector<bool> in_s(n, false);
  if (s_opt) {
    for (int v : *s_opt) in_s[v] = true;
    for (int v : *s_opt)
      if (!rank0_test(minus_perp(g, {v}), solver)) return std::nullopt;
    if (!detail::rank1_condition_ii(g, in_s)) return std::nullopt;
  } else {
    for (int v = 0; v < n; ++v) in_s[v] = rank0_test(minus_perp(g, {v}), solver);
    // greedily drop the S-vertex implicated in a violation until none remain
    std::array<int, 3> viol;
    while (!detail::rank1_condition_ii(g, in_s, &viol)) in_s[viol[2]] = false;
    if (std::none_of(in_s.begin(), in_s.end(), [](bool b) { return b; })) return std::nullopt;
  }
  RankReport rep;
  rep.kind = RankReport::Kind::Upper;
  rep.bound = 1;
  rep.method = "rank1_sufficient";
  VertexSet s;
  for (int v = 0; v < n; ++v)
    if (in_s[v]) s.push_back(v);
  rep.witness_set = std::move(s);
  return rep;
}

namespace detail {

struct RankMemo {
  std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> map;
  int lookup(const Graph& g) const {
    auto it = map.find({g.n(), g.edges()});
    return it == map.end() ? -1 : it->second;
  }
  void store(const Graph& g, int v) { map[{g.n(), g.edges()}] = v; }
};

struct TreeNode {
  std::string label;
  int bound;
  std::vector<TreeNode> children;
};

inline void render_tree(const TreeNode& t, std::ostringstream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
  os << t.label << " -> " << t.bound << "\n";
  for (const auto& c : t.children) render_tree(c, os, depth + 1);
}

/// Memoized nutilde-rank upper bound: 0 via rank0_test, 1 via
/// rank1_sufficient, else 1 + sum over all i of the bound for G \ i^perp
/// (the all-ones d-vector, always valid).
inline int rank_upper_rec(const Graph& g, RankMemo& memo, const SolveOptions& solver,
                          TreeNode& tree) {
  tree.label = g.name().empty() ? ("graph(n=" + std::to_string(g.n()) + ")") : g.name();
  if (g.n() == 0) {
    tree.bound = 0;
    return 0;
  }
  if (int hit = memo.lookup(g); hit >= 0) {
    tree.bound = hit;
    tree.label += " [memo]";
    return hit;
  }
  int bound;
  if (rank0_test(g, solver)) {
    bound = 0;
  } else if (rank1_sufficient(g, std::nullopt, solver)) {
    bound = 1;
  } else {
    bound = 1;
    for (int i = 0; i < g.n(); ++i) {
      TreeNode child;
      child.label = "minus " + std::to_string(i) + "^perp";
      Graph h = minus_perp(g, {i});
      TreeNode sub;
      const int c = rank_upper_rec(h, memo, solver, sub);
      child.bound = c;
      child.children.push_back(std::move(sub));
      tree.children.push_back(std::move(child));
      bound += c;
    }
  }
  memo.store(g, bound);
  tree.bound = bound;
  return bound;
}

}  // namespace detail

/// Recursive nutilde-rank bound 1 + sum_{i : d_i > 0} rank(G \ i^perp) for a
/// valid nonzero d-vector; subgraph ranks are bounded by the memoized
/// rank0 / rank1 / all-ones recursion.
inline RankReport rank_recursive_upper(const Graph& g, const DVector& d,
                                       const SolveOptions& solver = SolveOptions::defaults()) {
  if (static_cast<int>(d.d.size()) != g.n())
    throw std::invalid_argument("rank_recursive_upper: d size mismatch");
  bool nonzero = false;
  for (double v : d.d) {
    if (v < 0) throw std::invalid_argument("rank_recursive_upper: negative d");
    nonzero |= v > 0;
  }
  if (!nonzero) throw std::invalid_argument("rank_recursive_upper: d == 0");
  if (!check_ineq_d(g, d).valid) throw std::invalid_argument("rank_recursive_upper: d invalid");
  RankReport rep;
  rep.kind = RankReport::Kind::Upper;
  rep.method = "recursive_d";
  rep.witness_d = d;
  if (rank0_test(g, solver)) {
    rep.bound = 0;
    rep.detail = "rank0 short-circuit";
    return rep;
  }
  detail::RankMemo memo;
  detail::TreeNode root;
  root.label = "root";
  int bound = 1;
  for (int i = 0; i < g.n(); ++i) {
    if (d.d[i] <= 0) continue;
    detail::TreeNode sub;
    bound += detail::rank_upper_rec(minus_perp(g, {i}), memo, solver, sub);
    root.children.push_back(std::move(sub));
  }
  root.bound = bound;
  rep.bound = bound;
  std::ostringstream os;
  detail::render_tree(root, os, 0);
  rep.detail = os.str();
  return rep;
}

/// The closed-form rank bounds: (n/alpha + 1)^alpha, alpha^2 + 2^alpha |Imax|,
/// and for disconnected graphs the sum over components of the cheapest
/// component-wise upper bound.
inline std::vector<RankReport> rank_formula_bounds(const Graph& g,
                                                   const SolveOptions& solver = SolveOptions::defaults()) {
  std::vector<RankReport> out;
  const int n = g.n();
  const int a = alpha_exact(g);
  if (a == 0) return out;
  {
    RankReport r;
    r.kind = RankReport::Kind::Upper;
    r.method = "formula_general";
    r.bound = static_cast<int>(std::floor(std::pow(static_cast<double>(n) / a + 1.0, a)));
    r.detail = "(n/alpha + 1)^alpha";
    out.push_back(std::move(r));
  }
  {
    const auto imax = stable_sets(g, StableSetMode::MaximumOnly);
    RankReport r;
    r.kind = RankReport::Kind::Upper;
    r.method = "formula_imax";
    r.bound = a * a + static_cast<int>((1LL << a) * imax.all.size());
    r.detail = "alpha^2 + 2^alpha * |Imax|, |Imax| = " + std::to_string(imax.all.size());
    out.push_back(std::move(r));
  }
  // connected components
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < n; ++u)
        if (g.has_edge(v, u) && comp[u] < 0) {
          comp[u] = ncomp;
          stack.push_back(u);
        }
    }
    ++ncomp;
  }
  if (ncomp > 1) {
    int total = 0;
    for (int c = 0; c < ncomp; ++c) {
      VertexSet keep;
      for (int v = 0; v < n; ++v)
        if (comp[v] == c) keep.push_back(v);
      Graph h = g.induced(keep);
      int best;
      if (rank0_test(h, solver)) {
        best = 0;
      } else if (rank1_sufficient(h, std::nullopt, solver)) {
        best = 1;
      } else {
        DVector ones;
        ones.d.assign(h.n(), 1.0);
        best = rank_recursive_upper(h, ones, solver).bound;
      }
      total += best;
    }
    RankReport r;
    r.kind = RankReport::Kind::Upper;
    r.method = "component_sum";
    r.bound = total;
    r.detail = std::to_string(ncomp) + " components";
    out.push_back(std::move(r));
  }
  return out;
}

/// Lower-bound certificate from a stable set S: (i) alpha(G \ S^perp) =
/// alpha(G) - |S| and (ii) (G \ S'^perp)_c connected for every S' of size
/// |S| - 2 give nu-rank >= |S| - 1.  Returns nullopt when the conditions
/// fail; |S| <= 1 yields the trivial bound 0.
inline std::optional<RankReport> rank_lower_cert(const Graph& g, const VertexSet& s) {
  if (!is_stable_set(g, s)) throw std::invalid_argument("rank_lower_cert: set is not stable");
  RankReport rep;
  rep.kind = RankReport::Kind::Lower;
  rep.method = "critical_cert";
  rep.witness_set = s;
  if (s.size() <= 1) {
    rep.bound = 0;
    rep.detail = "trivial (|S| <= 1)";
    return rep;
  }
  const int a = alpha_exact(g);
  if (alpha_exact(minus_perp(g, s)) != a - static_cast<int>(s.size())) return std::nullopt;
  const int k = static_cast<int>(s.size());
  // all subsets S' of size |S| - 2: drop two elements
  for (int drop1 = 0; drop1 < k; ++drop1)
    for (int drop2 = drop1 + 1; drop2 < k; ++drop2) {
      VertexSet sprime;
      for (int i = 0; i < k; ++i)
        if (i != drop1 && i != drop2) sprime.push_back(s[i]);
      if (!critical_subgraph_connected(minus_perp(g, sprime))) return std::nullopt;
    }
  rep.bound = k - 1;
  rep.detail = "nu-rank >= |S| - 1";
  return rep;
}

/// Best lower bound over enumerated stable sets of size at most size_cap.
inline RankReport rank_lower_search(const Graph& g, int size_cap = 6) {
  auto fam = stable_sets(g, StableSetMode::AllUpToAlpha);
  std::sort(fam.all.begin(), fam.all.end(),
            [](const VertexSet& a, const VertexSet& b) { return a.size() > b.size(); });
  for (const auto& s : fam.all) {
    if (static_cast<int>(s.size()) > size_cap || s.size() <= 1) continue;
    if (auto rep = rank_lower_cert(g, s)) return *rep;
  }
  RankReport rep;
  rep.kind = RankReport::Kind::Lower;
  rep.method = "critical_cert";
  rep.bound = 0;
  rep.detail = "no qualifying stable set";
  return rep;
}

// ---------------------------------------------------------------------------
// Multiplier constructions
// ---------------------------------------------------------------------------

/// m_{S,d} = sum_{i in V \ S^perp} d_i x_i, the constant 1 exactly when
/// S^perp = V.  (A zero result is possible when d vanishes off S^perp.)
inline HomPoly m_poly(const Graph& g, const VertexSet& s, const std::vector<double>& d) {
  VertexSet perp = extended_neighborhood(g, s);
  if (static_cast<int>(perp.size()) == g.n()) return HomPoly::constant(g.n(), 1.0);
  std::vector<bool> in_perp(g.n(), false);
  for (int v : perp) in_perp[v] = true;
  HomPoly out(g.n(), 1);
  for (int i = 0; i < g.n(); ++i)
    if (!in_perp[i] && d[i] != 0.0) out.add_term(unit_monomial(g.n(), i), d[i]);
  return out;
}

/// The finite-convergence multiplier prod_{S in I^-(G[supp d])} m_{S,d}.
/// Preconditions (checked): d satisfies the induced-path inequalities, and
/// M_{G \ S^perp} has rank 0 for every stable S whose extended neighborhood
/// covers supp(d).
inline HomPoly multiplier_theorem(const Graph& g, const DVector& dv,
                                  const SolveOptions& solver = SolveOptions::defaults()) {
  const int n = g.n();
  const auto& d = dv.d;
  if (static_cast<int>(d.size()) != n) throw std::invalid_argument("multiplier_theorem: d size");
  if (!check_ineq_d(g, dv).valid)
    throw PreconditionError("multiplier_theorem: d violates the induced-path inequalities");
  VertexSet supp;
  for (int i = 0; i < n; ++i)
    if (d[i] > 0) supp.push_back(i);
  if (supp.empty()) throw std::invalid_argument("multiplier_theorem: d == 0");
  // precondition: every stable S with supp(d) inside S^perp has rank-0 remainder
  for (const auto& s : stable_sets(g, StableSetMode::AllUpToAlpha).all) {
    VertexSet perp = extended_neighborhood(g, s);
    std::vector<bool> in_perp(n, false);
    for (int v : perp) in_perp[v] = true;
    bool covers = true;
    for (int v : supp)
      if (!in_perp[v]) {
        covers = false;
        break;
      }
    if (!covers) continue;
    if (!rank0_test(minus_perp(g, s), solver)) {
      std::ostringstream os;
      os << "multiplier_theorem: M_{G \\ S^perp} lacks rank 0 for S = {";
      for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
      os << "}";
      throw PreconditionError(os.str());
    }
  }
  Graph induced_supp = g.induced(supp);
  auto fam = stable_sets(induced_supp, StableSetMode::StrictlyBelowAlpha);
  HomPoly prod = HomPoly::constant(n, 1.0);
  for (const auto& s_local : fam.all) {
    VertexSet s;
    for (int v : s_local) s.push_back(supp[v]);
    HomPoly factor = m_poly(g, s, d);
    if (factor.is_zero())
      throw PreconditionError("multiplier_theorem: factor m_{S,d} is zero (d vanishes off S^perp)");
    prod = multiply(prod, factor);
  }
  return prod;
}

/// The Imax-bound multiplier m_empty^{alpha^2} * prod_{U in Imax} prod_{S
/// subseteq U} m_S with unit weights.  Factors with S^perp = V degenerate to
/// 1, so the degree can fall short of the closed-form rank bound.
inline HomPoly multiplier_imax(const Graph& g) {
  const int n = g.n();
  const int a = alpha_exact(g);
  std::vector<double> ones(n, 1.0);
  HomPoly prod = HomPoly::constant(n, 1.0);
  HomPoly m_empty = m_poly(g, {}, ones);
  for (int i = 0; i < a * a; ++i) prod = multiply(prod, m_empty);
  for (const auto& u : stable_sets(g, StableSetMode::MaximumOnly).all) {
    const int k = static_cast<int>(u.size());
    for (int mask = 0; mask < (1 << k); ++mask) {
      VertexSet s;
      for (int i = 0; i < k; ++i)
        if (mask & (1 << i)) s.push_back(u[i]);
      prod = multiply(prod, m_poly(g, s, ones));
    }
  }
  return prod;
}

}  // namespace copos
