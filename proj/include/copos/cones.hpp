#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "copos/certificate.hpp"
#include "copos/common.hpp"
#include "copos/conic.hpp"
#include "copos/monomial.hpp"
#include "copos/poly.hpp"
#include "copos/sym_matrix.hpp"

namespace copos {

enum class Membership { Member, NotMember, Unknown };

struct MembershipVerdict {
  Membership status = Membership::Unknown;
  std::optional<SosCertificate> certificate;  // present on Member
  double margin = 0.0;
  std::string message;
};

struct MembershipOptions {
  /// Tests M + margin*I instead of M.  Cone boundaries are numerically
  /// ill-posed; callers probing strict non-membership pass an explicit margin.
  double margin = 0.0;
  int k_level_cap = 3;
  SolveOptions solver = SolveOptions::defaults();
};

namespace detail {

/// The Gram-block side of the coefficient-matching systems: one n x n block
/// per |beta| = r, one nonnegative scalar per square-free |A| = r + 2, and for
/// the K-cone additionally one SOS Gram block per |beta| < r of matching
/// parity over the monomial basis of degree (r + 2 - |beta|) / 2.
class GramStructure {
 public:
  GramStructure(FeasibilityProblem& prob, int n, int r, bool k_cone) : n_(n), r_(r) {
    const auto& betas = MonomialTable::get(n, r);
    for (int i = 0; i < betas.size(); ++i) quad_blocks_.push_back(prob.add_psd_block(n));
    const auto& gammas = MonomialTable::get(n, r + 2);
    for (int gi = 0; gi < gammas.size(); ++gi)
      if (is_squarefree(gammas[gi])) sqfree_ids_[gammas[gi]] = prob.add_nonneg();
    if (k_cone) {
      for (int lvl = r - 2; lvl >= 0; lvl -= 2) {
        SosLevel level;
        level.beta_degree = lvl;
        level.basis_degree = (r + 2 - lvl) / 2;
        const auto& lbetas = MonomialTable::get(n, lvl);
        const int basis_dim = MonomialTable::get(n, level.basis_degree).size();
        for (int i = 0; i < lbetas.size(); ++i)
          level.block_ids.push_back(prob.add_psd_block(basis_dim));
        sos_levels_.push_back(std::move(level));
      }
    }
  }

  void append_terms(const Monomial& gamma, std::vector<FeasibilityProblem::Term>& terms) const {
    const auto& betas = MonomialTable::get(n_, r_);
    Monomial beta;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        if (try_subtract_pair(gamma, i, j, beta))
          terms.push_back(FeasibilityProblem::psd(quad_blocks_[betas.index_of(beta)], i, j,
                                                  i == j ? 1.0 : 2.0));
    auto it = sqfree_ids_.find(gamma);
    if (it != sqfree_ids_.end()) terms.push_back(FeasibilityProblem::nonneg(it->second, 1.0));
    for (const auto& lvl : sos_levels_) {
      const auto& lbetas = MonomialTable::get(n_, lvl.beta_degree);
      const auto& basis = MonomialTable::get(n_, lvl.basis_degree);
      for (int bi = 0; bi < basis.size(); ++bi) {
        for (int bj = bi; bj < basis.size(); ++bj) {
          Monomial rest = gamma;
          bool ok = true;
          for (int v = 0; v < n_; ++v) {
            rest[v] -= basis[bi][v] + basis[bj][v];
            if (rest[v] < 0) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          terms.push_back(FeasibilityProblem::psd(lvl.block_ids[lbetas.index_of(rest)], bi, bj,
                                                  bi == bj ? 1.0 : 2.0));
        }
      }
    }
  }

  /// Extracts the solved blocks into a certificate, scaling by `scale`.
  void fill_certificate(const SolveResult& sol, double scale, SosCertificate& cert) const {
    const auto& betas = MonomialTable::get(n_, r_);
    for (int i = 0; i < betas.size(); ++i) {
      const SymMatrix& P = sol.psd_values[quad_blocks_[i]];
      if (P.max_abs() * scale > 1e-14) cert.gram_blocks.emplace(betas[i], P * scale);
    }
    for (const auto& [a, id] : sqfree_ids_) {
      const double v = sol.nonneg_values[id] * scale;
      if (v > 1e-14) cert.squarefree_coeffs.emplace(a, v);
    }
    for (const auto& lvl : sos_levels_) {
      const auto& lbetas = MonomialTable::get(n_, lvl.beta_degree);
      for (int i = 0; i < lbetas.size(); ++i) {
        const SymMatrix& G = sol.psd_values[lvl.block_ids[i]];
        if (G.max_abs() * scale > 1e-14)
          cert.sos_blocks.emplace(lbetas[i],
                                  SosCertificate::SosBlock{lvl.basis_degree, G * scale});
      }
    }
  }

 private:
  struct SosLevel {
    int beta_degree;
    int basis_degree;
    std::vector<int> block_ids;
  };
  int n_, r_;
  std::vector<int> quad_blocks_;
  std::map<Monomial, int> sqfree_ids_;
  std::vector<SosLevel> sos_levels_;
};

inline Membership from_status(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return Membership::Member;
    case SolveStatus::Infeasible: return Membership::NotMember;
    default: return Membership::Unknown;
  }
}

}  // namespace detail

/// Decides f in H_{n,r} for homogeneous f of degree r + 2: existence of
/// P_beta psd (|beta| = r) and c_A >= 0 (A square-free, |A| = r + 2) matching
/// every coefficient of f.  The returned certificate carries no multiplier
/// (callers wrapping a matrix query supply it).
inline MembershipVerdict h_membership(const HomPoly& f, int r,
                                      const MembershipOptions& opts = {}) {
  if (f.degree() != r + 2) throw std::invalid_argument("h_membership: degree mismatch");
  const int n = f.nvars();
  FeasibilityProblem prob;
  detail::GramStructure gs(prob, n, r, /*k_cone=*/false);
  const auto& gammas = MonomialTable::get(n, r + 2);
  for (int gi = 0; gi < gammas.size(); ++gi) {
    std::vector<FeasibilityProblem::Term> terms;
    gs.append_terms(gammas[gi], terms);
    prob.add_equality(std::move(terms), f.coeff(gammas[gi]));
  }
  SolveResult sol = solve(prob, opts.solver);
  MembershipVerdict v;
  v.status = detail::from_status(sol.status);
  v.message = sol.message;
  if (v.status == Membership::Member) {
    SosCertificate cert;
    cert.nvars = n;
    cert.level = r;
    cert.multiplier = HomPoly(n, r);
    gs.fill_certificate(sol, 1.0, cert);
    v.certificate = std::move(cert);
  }
  return v;
}

/// f == rhs of the certificate identity, for decompositions produced by
/// h_membership (no multiplier/matrix involved).
inline VerifyReport verify_decomposition(const HomPoly& f, const SosCertificate& cert,
                                         double tol = 1e-6) {
  VerifyReport rep;
  rep.residual_inf = (f - cert.rhs_poly()).max_abs_coeff();
  rep.min_gram_eig = cert.min_gram_eigenvalue();
  rep.min_c = cert.min_c();
  rep.pass = rep.residual_inf <= tol && rep.min_gram_eig >= -tol && rep.min_c >= -tol;
  return rep;
}

/// M in Q^{(r)}: (sum x)^r x^T M x in H_{n,r}.  The certificate's multiplier
/// is the normalized simplex power (all blocks rescaled accordingly).
inline MembershipVerdict q_membership(const SymMatrix& m, int r,
                                      const MembershipOptions& opts = {}) {
  const int n = m.n();
  const SymMatrix mm = m.shifted(opts.margin);
  HomPoly f = multiply(simplex_power(n, r), quad_form(mm));
  MembershipVerdict v = h_membership(f, r, opts);
  v.margin = opts.margin;
  if (v.status == Membership::Member) {
    const double scale = 1.0 / std::pow(static_cast<double>(n), r);
    SosCertificate& cert = *v.certificate;
    cert.multiplier = simplex_power(n, r) * scale;
    for (auto& [b, P] : cert.gram_blocks) P = P * scale;
    for (auto& [a, c] : cert.squarefree_coeffs) c *= scale;
  }
  return v;
}

/// M in K^{(r)}: like Q^{(r)} but with SOS multiplier blocks at every level
/// |beta| <= r + 2 with |beta| = r (mod 2).  Levels r and r + 2 coincide with
/// the Q-structure; K^{(0)} = Q^{(0)} and K^{(1)} = Q^{(1)}.
inline MembershipVerdict k_membership(const SymMatrix& m, int r,
                                      const MembershipOptions& opts = {}) {
  if (r > opts.k_level_cap)
    throw ResourceLimitError("k_membership: level exceeds configured cap");
  const int n = m.n();
  const SymMatrix mm = m.shifted(opts.margin);
  HomPoly f = multiply(simplex_power(n, r), quad_form(mm));
  FeasibilityProblem prob;
  detail::GramStructure gs(prob, n, r, /*k_cone=*/true);
  const auto& gammas = MonomialTable::get(n, r + 2);
  for (int gi = 0; gi < gammas.size(); ++gi) {
    std::vector<FeasibilityProblem::Term> terms;
    gs.append_terms(gammas[gi], terms);
    prob.add_equality(std::move(terms), f.coeff(gammas[gi]));
  }
  SolveResult sol = solve(prob, opts.solver);
  MembershipVerdict v;
  v.status = detail::from_status(sol.status);
  v.message = sol.message;
  v.margin = opts.margin;
  if (v.status == Membership::Member) {
    const double scale = 1.0 / std::pow(static_cast<double>(n), r);
    SosCertificate cert;
    cert.nvars = n;
    cert.level = r;
    cert.multiplier = simplex_power(n, r) * scale;
    gs.fill_certificate(sol, scale, cert);
    v.certificate = std::move(cert);
  }
  return v;
}

/// M in Qtilde^{(r)}: joint feasibility over a multiplier p in N_{n,r} with
/// ||p||_1 = 1 and the Gram decomposition of p * x^T M x.  Linear because M
/// is fixed.
inline MembershipVerdict qtilde_membership(const SymMatrix& m, int r,
                                           const MembershipOptions& opts = {}) {
  const int n = m.n();
  const SymMatrix mm = m.shifted(opts.margin);
  const HomPoly q = quad_form(mm);
  FeasibilityProblem prob;
  const auto& alphas = MonomialTable::get(n, r);
  std::vector<int> pvars;
  for (int i = 0; i < alphas.size(); ++i) pvars.push_back(prob.add_nonneg());
  detail::GramStructure gs(prob, n, r, /*k_cone=*/false);
  const auto& gammas = MonomialTable::get(n, r + 2);
  for (int gi = 0; gi < gammas.size(); ++gi) {
    const Monomial& gamma = gammas[gi];
    std::vector<FeasibilityProblem::Term> terms;
    gs.append_terms(gamma, terms);
    // subtract sum_alpha p_alpha * coeff_{x^T M x}(gamma - alpha)
    Monomial alpha;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (try_subtract_pair(gamma, i, j, alpha)) {
          Monomial delta(n, 0);
          delta[i] += 1;
          delta[j] += 1;
          const double qc = q.coeff(delta);
          if (qc != 0.0)
            terms.push_back(FeasibilityProblem::nonneg(pvars[alphas.index_of(alpha)], -qc));
        }
    prob.add_equality(std::move(terms), 0.0);
  }
  std::vector<FeasibilityProblem::Term> norm;
  for (int pv : pvars) norm.push_back(FeasibilityProblem::nonneg(pv, 1.0));
  prob.add_equality(std::move(norm), 1.0);

  SolveResult sol = solve(prob, opts.solver);
  MembershipVerdict v;
  v.status = detail::from_status(sol.status);
  v.message = sol.message;
  v.margin = opts.margin;
  if (v.status == Membership::Member) {
    double psum = 0.0;
    for (int pv : pvars) psum += std::max(0.0, sol.nonneg_values[pv]);
    SosCertificate cert;
    cert.nvars = n;
    cert.level = r;
    cert.multiplier = HomPoly(n, r);
    for (int i = 0; i < alphas.size(); ++i) {
      const double c = std::max(0.0, sol.nonneg_values[pvars[i]]) / psum;
      if (c > 1e-15) cert.multiplier.add_term(alphas[i], c);
    }
    gs.fill_certificate(sol, 1.0 / psum, cert);
    v.certificate = std::move(cert);
  }
  return v;
}

struct Q0Split {
  Membership status = Membership::Unknown;
  SymMatrix psd_part, nonneg_part;  // valid when status == Member
  std::string message;
};

/// M = P + N with P psd and N entrywise nonnegative (the 0-rank cone).
/// A psd input returns (M, 0) directly.
inline Q0Split q0_split(const SymMatrix& m, const MembershipOptions& opts = {}) {
  const SymMatrix mm = m.shifted(opts.margin);
  const int n = mm.n();
  Q0Split out;
  if (mm.min_eigenvalue() >= 0.0) {
    out.status = Membership::Member;
    out.psd_part = mm;
    out.nonneg_part = SymMatrix(n);
    out.message = "psd fast path";
    return out;
  }
  FeasibilityProblem prob;
  const int pb = prob.add_psd_block(n);
  std::vector<std::vector<int>> nid(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) nid[i][j] = prob.add_nonneg();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      prob.add_equality(
          {FeasibilityProblem::psd(pb, i, j, 1.0), FeasibilityProblem::nonneg(nid[i][j], 1.0)},
          mm(i, j));
  SolveResult sol = solve(prob, opts.solver);
  out.status = detail::from_status(sol.status);
  out.message = sol.message;
  if (out.status == Membership::Member) {
    out.psd_part = sol.psd_values[pb];
    out.nonneg_part = SymMatrix(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.nonneg_part.set(i, j, sol.nonneg_values[nid[i][j]]);
  }
  return out;
}

namespace detail {
/// Certificate for a polynomial that already has nonnegative coefficients:
/// square-free monomials go to c-terms, the rest to diagonal Gram entries.
inline SosCertificate nonneg_poly_certificate(const HomPoly& f, const HomPoly& multiplier,
                                              int level) {
  SosCertificate cert;
  cert.nvars = f.nvars();
  cert.level = level;
  cert.multiplier = multiplier;
  for (const auto& [gamma, c] : f.terms()) absorb_monomial(cert, gamma, c);
  return cert;
}
}  // namespace detail

/// M in C^{(r)}: all coefficients of (sum x)^r x^T M x nonnegative.  Pure
/// arithmetic, so the verdict is never Unknown.
inline MembershipVerdict c_membership(const SymMatrix& m, int r,
                                      const MembershipOptions& opts = {}) {
  const int n = m.n();
  const SymMatrix mm = m.shifted(opts.margin);
  HomPoly f = multiply(simplex_power(n, r), quad_form(mm));
  const double tol = 1e-9 * std::max(1.0, f.max_abs_coeff());
  MembershipVerdict v;
  v.margin = opts.margin;
  if (is_nonneg_coeffs(f, tol)) {
    v.status = Membership::Member;
    const double scale = 1.0 / std::pow(static_cast<double>(n), r);
    v.certificate = detail::nonneg_poly_certificate(f * scale, simplex_power(n, r) * scale, r);
  } else {
    v.status = Membership::NotMember;
  }
  return v;
}

/// M in Ctilde^{(r)}: p * x^T M x has nonnegative coefficients for some
/// p in N_{n,r} with ||p||_1 = 1.  An LP feasibility system.
inline MembershipVerdict ctilde_membership(const SymMatrix& m, int r,
                                           const MembershipOptions& opts = {}) {
  const int n = m.n();
  const SymMatrix mm = m.shifted(opts.margin);
  const HomPoly q = quad_form(mm);
  FeasibilityProblem prob;
  const auto& alphas = MonomialTable::get(n, r);
  std::vector<int> pvars;
  for (int i = 0; i < alphas.size(); ++i) pvars.push_back(prob.add_nonneg());
  const auto& gammas = MonomialTable::get(n, r + 2);
  for (int gi = 0; gi < gammas.size(); ++gi) {
    const Monomial& gamma = gammas[gi];
    std::vector<FeasibilityProblem::Term> terms;
    Monomial alpha;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (try_subtract_pair(gamma, i, j, alpha)) {
          Monomial delta(n, 0);
          delta[i] += 1;
          delta[j] += 1;
          const double qc = q.coeff(delta);
          if (qc != 0.0)
            terms.push_back(FeasibilityProblem::nonneg(pvars[alphas.index_of(alpha)], qc));
        }
    // coefficient of gamma in p * q must be nonnegative: introduce a slack
    const int slack = prob.add_nonneg();
    terms.push_back(FeasibilityProblem::nonneg(slack, -1.0));
    prob.add_equality(std::move(terms), 0.0);
  }
  std::vector<FeasibilityProblem::Term> norm;
  for (int pv : pvars) norm.push_back(FeasibilityProblem::nonneg(pv, 1.0));
  prob.add_equality(std::move(norm), 1.0);

  SolveResult sol = solve(prob, opts.solver);
  MembershipVerdict v;
  v.status = detail::from_status(sol.status);
  v.message = sol.message;
  v.margin = opts.margin;
  if (v.status == Membership::Member) {
    double psum = 0.0;
    for (int pv : pvars) psum += std::max(0.0, sol.nonneg_values[pv]);
    HomPoly p(n, r);
    for (int i = 0; i < alphas.size(); ++i) {
      const double c = std::max(0.0, sol.nonneg_values[pvars[i]]) / psum;
      if (c > 1e-15) p.add_term(alphas[i], c);
    }
    v.certificate = detail::nonneg_poly_certificate(multiply(p, q), p, r);
  }
  return v;
}

}  // namespace copos
