#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "copos/cones.hpp"
#include "copos/sym_matrix.hpp"

namespace copos {

enum class CopVerdict { Copositive, NotCopositive, Unknown };

struct OracleResult {
  CopVerdict verdict = CopVerdict::Unknown;
  std::optional<Eigen::VectorXd> witness;  // x >= 0 with x^T M x < 0
  double witness_value = 0.0;
  long nodes = 0;
};

/// Recursive simplex subdivision over the standard simplex.  A sub-simplex
/// with vertices {v_i} is certified once v_i^T M v_j >= 0 for all i, j; a
/// vertex with negative form value is a witness; otherwise the longest edge
/// is bisected up to max_depth (exhaustion yields Unknown, never an error).
inline OracleResult brute_oracle(const SymMatrix& m, int max_depth = 50,
                                 long max_nodes = 2000000) {
  const int n = m.n();
  OracleResult res;
  if (n == 0) {
    res.verdict = CopVerdict::Copositive;
    return res;
  }
  struct Node {
    Eigen::MatrixXd V;  // columns are simplex vertices
    int depth;
  };
  std::vector<Node> stack;
  stack.push_back({Eigen::MatrixXd::Identity(n, n), 0});
  bool exhausted = false;
  while (!stack.empty()) {
    if (++res.nodes > max_nodes) {
      exhausted = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    Eigen::MatrixXd Q = node.V.transpose() * m.eigen() * node.V;
    // witness?
    for (int i = 0; i < n; ++i) {
      if (Q(i, i) < 0) {
        res.verdict = CopVerdict::NotCopositive;
        res.witness = node.V.col(i);
        res.witness_value = Q(i, i);
        return res;
      }
    }
    if (Q.minCoeff() >= 0) continue;  // certified nonneg on this sub-simplex
    if (node.depth >= max_depth) {
      exhausted = true;
      continue;
    }
    // bisect the longest edge
    int bi = 0, bj = 1;
    double best = -1;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = (node.V.col(i) - node.V.col(j)).squaredNorm();
        if (d > best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    Eigen::VectorXd mid = 0.5 * (node.V.col(bi) + node.V.col(bj));
    Node left = node, right = std::move(node);
    left.V.col(bi) = mid;
    left.depth++;
    right.V.col(bj) = mid;
    right.depth++;
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }
  res.verdict = exhausted ? CopVerdict::Unknown : CopVerdict::Copositive;
  return res;
}

struct Cop5Result {
  CopVerdict verdict = CopVerdict::Unknown;
  std::string message;
  std::optional<SosCertificate> certificate;  // Qtilde^{(1)} certificate of the scaled matrix
};

/// Exact 5x5 copositivity via COP_5 = Qtilde_5^{(1)}.  Preprocessing: negative
/// diagonal entries are witnesses; zero-diagonal rows must be entrywise
/// nonnegative and are removed (the remaining <= 4x4 matrix is decided by the
/// psd + nonnegative split); otherwise the matrix is scaled to unit diagonal
/// and membership in Qtilde^{(1)} is tested at the given margin.
inline Cop5Result cop5_test(const SymMatrix& m, double margin = 1e-6,
                            const SolveOptions& solver = SolveOptions::defaults()) {
  if (m.n() != 5) throw std::invalid_argument("cop5_test: dimension must be 5");
  Cop5Result out;
  std::vector<int> keep;
  for (int i = 0; i < 5; ++i) {
    if (m(i, i) < -margin) {
      out.verdict = CopVerdict::NotCopositive;
      out.message = "negative diagonal entry";
      return out;
    }
    if (m(i, i) <= margin) {
      for (int j = 0; j < 5; ++j)
        if (m(i, j) < -margin) {
          out.verdict = CopVerdict::NotCopositive;
          out.message = "zero-diagonal row with a negative entry";
          return out;
        }
      // row is nonnegative: removing it preserves copositivity status
    } else {
      keep.push_back(i);
    }
  }
  MembershipOptions mo;
  mo.margin = margin;
  mo.solver = solver;
  if (keep.size() < 5) {
    if (keep.empty()) {
      out.verdict = CopVerdict::Copositive;
      out.message = "all rows removed";
      return out;
    }
    Q0Split split = q0_split(m.principal_submatrix(keep), mo);
    out.verdict = split.status == Membership::Member      ? CopVerdict::Copositive
                  : split.status == Membership::NotMember ? CopVerdict::NotCopositive
                                                          : CopVerdict::Unknown;
    out.message = "reduced to psd + nonneg split on " + std::to_string(keep.size()) +
                  " rows: " + split.message;
    return out;
  }
  std::vector<double> dinv(5);
  for (int i = 0; i < 5; ++i) dinv[i] = 1.0 / std::sqrt(m(i, i));
  SymMatrix mhat = m.scaled(dinv);  // unit diagonal
  MembershipVerdict v = qtilde_membership(mhat, 1, mo);
  out.verdict = v.status == Membership::Member      ? CopVerdict::Copositive
                : v.status == Membership::NotMember ? CopVerdict::NotCopositive
                                                    : CopVerdict::Unknown;
  out.message = "unit-diagonal Qtilde^(1) test: " + v.message;
  out.certificate = std::move(v.certificate);
  return out;
}

struct CopInnerResult {
  CopVerdict verdict = CopVerdict::Unknown;  // Copositive or Unknown, never NotCopositive
  std::optional<SosCertificate> certificate;
  std::string message;
};

/// Sufficient test only: membership in Qtilde^{(r)} implies copositivity.
/// Failure proves nothing for n >= 7 (bordered-Horn matrices are copositive
/// yet outside every Q level), so the negative answer is Unknown.
inline CopInnerResult cop_inner_test(const SymMatrix& m, int r,
                                     const MembershipOptions& opts = {}) {
  MembershipVerdict v = qtilde_membership(m, r, opts);
  CopInnerResult out;
  out.message = v.message;
  if (v.status == Membership::Member) {
    out.verdict = CopVerdict::Copositive;
    out.certificate = std::move(v.certificate);
  }
  return out;
}

}  // namespace copos
