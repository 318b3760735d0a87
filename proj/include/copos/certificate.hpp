#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copos/graph.hpp"
#include "copos/monomial.hpp"
#include "copos/poly.hpp"
#include "copos/sym_matrix.hpp"

namespace copos {

/// Data witnessing p * x^T M x = sum_beta x^beta x^T P_beta x
///                              + sum_beta x^beta sigma_beta   (K-cone levels)
///                              + sum_A c_A x^A.
/// gram_blocks carry |beta| = level; sos_blocks (present only for K-cone
/// certificates) carry |beta| < level of matching parity, with Gram matrices
/// over the monomial basis of degree (level + 2 - |beta|) / 2.
struct SosCertificate {
  int nvars = 0;
  int level = 0;
  HomPoly multiplier;
  std::map<Monomial, SymMatrix, GradedLexLess> gram_blocks;
  std::map<Monomial, double, GradedLexLess> squarefree_coeffs;

  struct SosBlock {
    int basis_degree = 0;  // basis is MonomialTable(nvars, basis_degree)
    SymMatrix gram;
  };
  std::map<Monomial, SosBlock, GradedLexLess> sos_blocks;

  /// The polynomial represented by the right-hand side of the identity.
  HomPoly rhs_poly() const {
    HomPoly acc(nvars, level + 2);
    for (const auto& [beta, P] : gram_blocks) acc = acc + quad_form(P).shifted_by(beta);
    for (const auto& [beta, blk] : sos_blocks) {
      const auto& basis = MonomialTable::get(nvars, blk.basis_degree);
      HomPoly s(nvars, 2 * blk.basis_degree);
      for (int i = 0; i < basis.size(); ++i)
        for (int j = i; j < basis.size(); ++j) {
          const double c = (i == j ? 1.0 : 2.0) * blk.gram(i, j);
          if (c == 0.0) continue;
          Monomial m = basis[i];
          for (int v = 0; v < nvars; ++v) m[v] += basis[j][v];
          s.add_term(m, c);
        }
      acc = acc + s.shifted_by(beta);
    }
    for (const auto& [a, c] : squarefree_coeffs) {
      if (c != 0.0) acc.add_term(a, c);
    }
    return acc;
  }

  double min_gram_eigenvalue() const {
    double e = 0.0;
    bool any = false;
    for (const auto& [b, P] : gram_blocks) {
      e = any ? std::min(e, P.min_eigenvalue()) : P.min_eigenvalue();
      any = true;
    }
    for (const auto& [b, blk] : sos_blocks) {
      e = any ? std::min(e, blk.gram.min_eigenvalue()) : blk.gram.min_eigenvalue();
      any = true;
    }
    return any ? e : 0.0;
  }

  double min_c() const {
    double e = 0.0;
    bool any = false;
    for (const auto& [a, c] : squarefree_coeffs) {
      e = any ? std::min(e, c) : c;
      any = true;
    }
    return any ? e : 0.0;
  }
};

struct VerifyReport {
  double residual_inf = 0.0;
  double min_gram_eig = 0.0;
  double min_c = 0.0;
  bool pass = false;
};

/// Recomputes multiplier * x^T M x minus the certificate's right-hand side
/// coefficient-wise.  Eigenvalues come from an eigensolver on the stored
/// blocks, independent of whatever solver produced them.
inline VerifyReport verify(const SymMatrix& m, const SosCertificate& cert, double tol = 1e-6) {
  if (m.n() != cert.nvars || cert.multiplier.nvars() != cert.nvars)
    throw std::invalid_argument("verify: dimension mismatch");
  if (cert.multiplier.degree() != cert.level)
    throw std::invalid_argument("verify: multiplier degree != level");
  VerifyReport rep;
  HomPoly lhs = multiply(cert.multiplier, quad_form(m));
  HomPoly diff = lhs - cert.rhs_poly();
  rep.residual_inf = diff.max_abs_coeff();
  rep.min_gram_eig = cert.min_gram_eigenvalue();
  rep.min_c = cert.min_c();
  rep.pass = rep.residual_inf <= tol && rep.min_gram_eig >= -tol && rep.min_c >= -tol;
  return rep;
}

namespace detail {

/// Adds val * x^gamma to a certificate body, preferring a square-free c-term
/// and falling back to a diagonal Gram entry (gamma - 2 e_i, i, i); val >= 0
/// keeps psd-ness, since a nonnegative diagonal update cannot hurt.
inline void absorb_monomial(SosCertificate& cert, const Monomial& gamma, double val) {
  if (val == 0.0) return;
  if (is_squarefree(gamma)) {
    cert.squarefree_coeffs[gamma] += val;
    return;
  }
  for (int i = 0; i < cert.nvars; ++i) {
    if (gamma[i] >= 2) {
      Monomial beta = gamma;
      beta[i] -= 2;
      auto it = cert.gram_blocks.find(beta);
      if (it == cert.gram_blocks.end())
        it = cert.gram_blocks.emplace(beta, SymMatrix(cert.nvars)).first;
      it->second.add(i, i, val);
      return;
    }
  }
}

inline Monomial concat(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline void require_quadratic_only(const SosCertificate& c, const char* who) {
  if (!c.sos_blocks.empty())
    throw std::invalid_argument(std::string(who) + ": K-cone certificates are not supported");
}

}  // namespace detail

/// Certificate for DMD from a certificate for M, D = diag(d) positive:
/// substitute x_i -> d_i x_i and renormalize the multiplier to unit 1-norm.
inline SosCertificate transform_scale(const SosCertificate& cert, const std::vector<double>& d) {
  if (static_cast<int>(d.size()) != cert.nvars)
    throw std::invalid_argument("transform_scale: size mismatch");
  for (double v : d)
    if (!(v > 0)) throw std::invalid_argument("transform_scale: non-positive entry");
  SosCertificate out;
  out.nvars = cert.nvars;
  out.level = cert.level;
  HomPoly scaled = scale_variables(cert.multiplier, d);
  const double rho = scaled.one_norm();
  out.multiplier = scaled * (1.0 / rho);
  auto dpow = [&](const Monomial& m) {
    double v = 1.0;
    for (int i = 0; i < cert.nvars; ++i)
      for (int e = 0; e < m[i]; ++e) v *= d[i];
    return v;
  };
  for (const auto& [beta, P] : cert.gram_blocks)
    out.gram_blocks.emplace(beta, P.scaled(d) * (dpow(beta) / rho));
  for (const auto& [beta, blk] : cert.sos_blocks) {
    const auto& basis = MonomialTable::get(cert.nvars, blk.basis_degree);
    std::vector<double> dm(basis.size());
    for (int i = 0; i < basis.size(); ++i) dm[i] = dpow(basis[i]);
    out.sos_blocks.emplace(beta,
                           SosCertificate::SosBlock{blk.basis_degree,
                                                    blk.gram.scaled(dm) * (dpow(beta) / rho)});
  }
  for (const auto& [a, c] : cert.squarefree_coeffs)
    out.squarefree_coeffs.emplace(a, c * dpow(a) / rho);
  return out;
}

/// Certificate for diag(M1, M2) at level r1 + r2 with multiplier p1(x) p2(y).
/// Gram blocks are cross-products of each side's blocks with the other side's
/// multiplier monomials; c-terms that pick up non-square-free monomials are
/// folded into diagonal Gram entries.
inline SosCertificate transform_border(const SymMatrix& m1, const SosCertificate& cert1,
                                       const SymMatrix& m2, const SosCertificate& cert2,
                                       double input_tol = 1e-6) {
  detail::require_quadratic_only(cert1, "transform_border");
  detail::require_quadratic_only(cert2, "transform_border");
  if (!verify(m1, cert1, input_tol).pass || !verify(m2, cert2, input_tol).pass)
    throw std::invalid_argument("transform_border: input certificate does not verify");
  const int n = cert1.nvars, m = cert2.nvars;
  SosCertificate out;
  out.nvars = n + m;
  out.level = cert1.level + cert2.level;
  out.multiplier = HomPoly(n + m, out.level);
  for (const auto& [a, ca] : cert1.multiplier.terms())
    for (const auto& [b, cb] : cert2.multiplier.terms())
      out.multiplier.add_term(detail::concat(a, b), ca * cb);

  auto block_at = [&](const Monomial& key) -> SymMatrix& {
    auto it = out.gram_blocks.find(key);
    if (it == out.gram_blocks.end()) it = out.gram_blocks.emplace(key, SymMatrix(n + m)).first;
    return it->second;
  };
  for (const auto& [delta2, c2] : cert2.multiplier.terms()) {
    for (const auto& [beta1, P1] : cert1.gram_blocks) {
      SymMatrix& blk = block_at(detail::concat(beta1, delta2));
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          if (P1(i, j) != 0.0) blk.add(i, j, c2 * P1(i, j));
    }
    for (const auto& [a1, ca] : cert1.squarefree_coeffs)
      detail::absorb_monomial(out, detail::concat(a1, delta2), ca * c2);
  }
  for (const auto& [delta1, c1] : cert1.multiplier.terms()) {
    for (const auto& [beta2, P2] : cert2.gram_blocks) {
      SymMatrix& blk = block_at(detail::concat(delta1, beta2));
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
          if (P2(i, j) != 0.0) blk.add(n + i, n + j, c1 * P2(i, j));
    }
    for (const auto& [a2, ca] : cert2.squarefree_coeffs)
      detail::absorb_monomial(out, detail::concat(delta1, a2), ca * c1);
  }
  return out;
}

/// Certificate for M0 + M1 at level r0 + r1 (same variable count), multiplier
/// p0 p1, from the bilinear expansion p1 (p0 x^T M0 x) + p0 (p1 x^T M1 x).
inline SosCertificate transform_sum(const SymMatrix& m0, const SosCertificate& cert0,
                                    const SymMatrix& m1, const SosCertificate& cert1,
                                    double input_tol = 1e-6) {
  detail::require_quadratic_only(cert0, "transform_sum");
  detail::require_quadratic_only(cert1, "transform_sum");
  if (cert0.nvars != cert1.nvars) throw std::invalid_argument("transform_sum: nvars mismatch");
  if (!verify(m0, cert0, input_tol).pass || !verify(m1, cert1, input_tol).pass)
    throw std::invalid_argument("transform_sum: input certificate does not verify");
  const int n = cert0.nvars;
  SosCertificate out;
  out.nvars = n;
  out.level = cert0.level + cert1.level;
  out.multiplier = multiply(cert0.multiplier, cert1.multiplier);

  auto accumulate = [&](const SosCertificate& cert, const HomPoly& other_mult) {
    for (const auto& [delta, cd] : other_mult.terms()) {
      for (const auto& [beta, P] : cert.gram_blocks) {
        Monomial key = beta;
        for (int i = 0; i < n; ++i) key[i] += delta[i];
        auto it = out.gram_blocks.find(key);
        if (it == out.gram_blocks.end()) it = out.gram_blocks.emplace(key, SymMatrix(n)).first;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j)
            if (P(i, j) != 0.0) it->second.add(i, j, cd * P(i, j));
      }
      for (const auto& [a, ca] : cert.squarefree_coeffs) {
        Monomial g = a;
        for (int i = 0; i < n; ++i) g[i] += delta[i];
        detail::absorb_monomial(out, g, ca * cd);
      }
    }
  };
  accumulate(cert0, cert1.multiplier);
  accumulate(cert1, cert0.multiplier);
  return out;
}

/// The indicator-type zeros of x^T M_G x on the simplex: (1/alpha) chi^S for
/// every maximum stable set S.  Each returned vector is checked to annihilate
/// the form.  Weighted zeros from non-singleton clique components exist too
/// but are not enumerated; the rank machinery only needs these.
inline std::vector<Eigen::VectorXd> form_zeros(const Graph& g) {
  const int a = alpha_exact(g);
  SymMatrix m = m_matrix(g, a);
  std::vector<Eigen::VectorXd> out;
  for (const auto& s : stable_sets(g, StableSetMode::MaximumOnly).all) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(g.n());
    for (int v : s) x(v) = 1.0 / a;
    if (std::abs(m.quad(x)) > 1e-9)
      throw std::logic_error("form_zeros: candidate does not annihilate the form");
    out.push_back(std::move(x));
  }
  return out;
}

struct KernelReport {
  struct Entry {
    Monomial beta;
    int zero_index;
    double norm_inf;  // ||P_beta a||_inf
  };
  std::vector<Entry> entries;
  double max_violation = 0.0;
  bool pass = true;
};

/// For every Gram block with supp(beta) inside supp(a), reports ||P_beta a||.
/// A diagnostic, not a proof: interior-point Gram blocks satisfy the kernel
/// condition only approximately.
inline KernelReport kernel_check(const SymMatrix& m, const SosCertificate& cert,
                                 const std::vector<Eigen::VectorXd>& zeros, double tol = 1e-5) {
  KernelReport rep;
  for (size_t zi = 0; zi < zeros.size(); ++zi) {
    const Eigen::VectorXd& a = zeros[zi];
    if (a.size() != m.n()) throw std::invalid_argument("kernel_check: zero has wrong dimension");
    if (a.minCoeff() < -1e-12 || std::abs(m.quad(a)) > tol)
      throw std::invalid_argument("kernel_check: invalid zero (not a nonneg annihilator)");
    for (const auto& [beta, P] : cert.gram_blocks) {
      bool supported = true;
      for (int i = 0; i < cert.nvars; ++i)
        if (beta[i] > 0 && a(i) <= 1e-12) {
          supported = false;
          break;
        }
      if (!supported) continue;
      const double v = (P.eigen() * a).cwiseAbs().maxCoeff();
      rep.entries.push_back({beta, static_cast<int>(zi), v});
      rep.max_violation = std::max(rep.max_violation, v);
    }
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

}  // namespace copos
