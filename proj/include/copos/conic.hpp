#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copos/common.hpp"
#include "copos/sym_matrix.hpp"

namespace copos {

/// Block-structured conic feasibility / minimization problem:
/// psd blocks + nonnegative scalars + free scalars, linear equalities over all
/// variables, optional linear objective (minimize).
class FeasibilityProblem {
 public:
  enum class VarKind { PsdEntry, Nonneg, Free };

  /// One coefficient of a linear functional.  For PsdEntry the coefficient
  /// multiplies the single matrix entry X_ij (== X_ji); i <= j is normalized
  /// internally.
  struct Term {
    VarKind kind;
    int id;         // block id for PsdEntry, scalar id otherwise
    int i = 0, j = 0;
    double coeff = 0.0;
  };
  struct Equality {
    std::vector<Term> terms;
    double rhs;
  };

  int add_psd_block(int dim) {
    if (dim < 1) throw std::invalid_argument("add_psd_block: dim >= 1 required");
    psd_dims_.push_back(dim);
    return static_cast<int>(psd_dims_.size()) - 1;
  }
  int add_nonneg() { return num_nonneg_++; }
  int add_free() { return num_free_++; }

  void add_equality(std::vector<Term> terms, double rhs) {
    validate(terms);
    equalities_.push_back({std::move(terms), rhs});
  }
  void set_objective(std::vector<Term> terms) {
    validate(terms);
    objective_ = std::move(terms);
  }

  const std::vector<int>& psd_dims() const { return psd_dims_; }
  int num_nonneg() const { return num_nonneg_; }
  int num_free() const { return num_free_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  const std::optional<std::vector<Term>>& objective() const { return objective_; }

  static Term psd(int block, int i, int j, double c) {
    return Term{VarKind::PsdEntry, block, std::min(i, j), std::max(i, j), c};
  }
  static Term nonneg(int id, double c) { return Term{VarKind::Nonneg, id, 0, 0, c}; }
  static Term free_var(int id, double c) { return Term{VarKind::Free, id, 0, 0, c}; }

 private:
  void validate(const std::vector<Term>& terms) const {
    for (const auto& t : terms) {
      switch (t.kind) {
        case VarKind::PsdEntry:
          if (t.id < 0 || t.id >= static_cast<int>(psd_dims_.size()) || t.i < 0 ||
              t.j >= psd_dims_[t.id] || t.i > t.j)
            throw std::invalid_argument("equality references undeclared psd entry");
          break;
        case VarKind::Nonneg:
          if (t.id < 0 || t.id >= num_nonneg_)
            throw std::invalid_argument("equality references undeclared nonneg scalar");
          break;
        case VarKind::Free:
          if (t.id < 0 || t.id >= num_free_)
            throw std::invalid_argument("equality references undeclared free scalar");
          break;
      }
    }
  }

  std::vector<int> psd_dims_;
  int num_nonneg_ = 0;
  int num_free_ = 0;
  std::vector<Equality> equalities_;
  std::optional<std::vector<Term>> objective_;
};

enum class SolveStatus { Feasible, Infeasible, Unknown };

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  std::vector<SymMatrix> psd_values;
  std::vector<double> nonneg_values;
  std::vector<double> free_values;
  std::optional<double> objective_value;
  double max_equality_residual = std::numeric_limits<double>::infinity();
  double min_block_eigenvalue = -std::numeric_limits<double>::infinity();
  double complementarity = std::numeric_limits<double>::infinity();  // mu / tau^2
  bool has_assignment = false;
  int iterations = 0;
  std::string message;
};

struct SolveOptions {
  double feas_tol = 1e-7;
  double psd_tol = 1e-7;
  double time_limit_sec = 300.0;
  int max_iters = 200;
  int stall_patience = 40;

  /// Reads COPOS_SOLVER_TOL (overrides feas_tol and psd_tol) if set.
  static SolveOptions defaults() {
    SolveOptions o;
    if (const char* env = std::getenv("COPOS_SOLVER_TOL")) {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end != env && v > 0) o.feas_tol = o.psd_tol = v;
    }
    return o;
  }
};

// ---------------------------------------------------------------------------
// Homogeneous self-dual interior-point solver (NT scaling, predictor-corrector)
// ---------------------------------------------------------------------------

namespace ipm {

struct SparseSym {  // sparse symmetric matrix, entries with i <= j
  struct Entry {
    int i, j;
    double a;  // value of the (i,j) and (j,i) matrix entries
  };
  std::vector<Entry> entries;
};

/// Compiled constraint data for one equality row.
struct Row {
  std::vector<std::pair<int, SparseSym>> blocks;  // (block index, coefficients)
  std::vector<std::pair<int, double>> lin;        // (lin index, functional coeff)
  double b = 0.0;
};

struct BlockVec {
  std::vector<Eigen::MatrixXd> psd;
  Eigen::VectorXd lin;

  void set_zero() {
    for (auto& m : psd) m.setZero();
    lin.setZero();
  }
  static BlockVec shaped(const std::vector<int>& dims, int nlin) {
    BlockVec v;
    for (int d : dims) v.psd.emplace_back(Eigen::MatrixXd::Zero(d, d));
    v.lin = Eigen::VectorXd::Zero(nlin);
    return v;
  }
  BlockVec& axpy(double a, const BlockVec& o) {
    for (size_t b = 0; b < psd.size(); ++b) psd[b] += a * o.psd[b];
    lin += a * o.lin;
    return *this;
  }
  double dot(const BlockVec& o) const {
    double s = lin.dot(o.lin);
    for (size_t b = 0; b < psd.size(); ++b) s += (psd[b].array() * o.psd[b].array()).sum();
    return s;
  }
  double max_abs() const {
    double s = lin.size() ? lin.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& m : psd) s = std::max(s, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
    return s;
  }
};

struct Compiled {
  std::vector<int> dims;
  int nlin = 0;  // nonneg scalars + split free variables
  std::vector<Row> rows;
  Row objective;  // b field unused
  bool has_objective = false;
  // free variable f -> (plus index, minus index) in lin space
  std::vector<std::pair<int, int>> free_split;
  int num_nonneg = 0;
  std::vector<double> row_scale;
  double obj_scale = 1.0;
  // incidence: rows touching each block / lin var
  std::vector<std::vector<int>> rows_of_block;
  std::vector<std::vector<int>> rows_of_lin;
};

inline SparseSym to_sparse_sym(const std::vector<FeasibilityProblem::Term>& terms, int block) {
  // aggregate duplicate references
  std::map<std::pair<int, int>, double> acc;
  for (const auto& t : terms)
    if (t.kind == FeasibilityProblem::VarKind::PsdEntry && t.id == block)
      acc[{t.i, t.j}] += t.coeff;
  SparseSym s;
  for (auto& [ij, c] : acc) {
    if (c == 0.0) continue;
    // functional coeff c on entry X_ij corresponds to matrix entry a with
    // <A, X> convention: a_ii = c, a_ij = a_ji = c/2 (i < j)
    s.entries.push_back({ij.first, ij.second, ij.first == ij.second ? c : 0.5 * c});
  }
  return s;
}

inline Compiled compile(const FeasibilityProblem& p) {
  Compiled c;
  c.dims = p.psd_dims();
  c.num_nonneg = p.num_nonneg();
  c.nlin = p.num_nonneg() + 2 * p.num_free();
  for (int f = 0; f < p.num_free(); ++f)
    c.free_split.emplace_back(p.num_nonneg() + 2 * f, p.num_nonneg() + 2 * f + 1);

  auto compile_row = [&](const std::vector<FeasibilityProblem::Term>& terms, double rhs) {
    Row r;
    r.b = rhs;
    for (int b = 0; b < static_cast<int>(c.dims.size()); ++b) {
      SparseSym s = to_sparse_sym(terms, b);
      if (!s.entries.empty()) r.blocks.emplace_back(b, std::move(s));
    }
    std::map<int, double> lin;
    for (const auto& t : terms) {
      if (t.kind == FeasibilityProblem::VarKind::Nonneg) lin[t.id] += t.coeff;
      if (t.kind == FeasibilityProblem::VarKind::Free) {
        lin[c.free_split[t.id].first] += t.coeff;
        lin[c.free_split[t.id].second] -= t.coeff;
      }
    }
    for (auto& [id, v] : lin)
      if (v != 0.0) r.lin.emplace_back(id, v);
    return r;
  };

  for (const auto& eq : p.equalities()) c.rows.push_back(compile_row(eq.terms, eq.rhs));
  if (p.objective()) {
    c.objective = compile_row(*p.objective(), 0.0);
    c.has_objective = true;
  }

  // row equilibration
  c.row_scale.assign(c.rows.size(), 1.0);
  for (size_t k = 0; k < c.rows.size(); ++k) {
    double s = std::abs(c.rows[k].b);
    for (auto& [b, sp] : c.rows[k].blocks)
      for (auto& e : sp.entries) s = std::max(s, std::abs(e.i == e.j ? e.a : 2 * e.a));
    for (auto& [id, v] : c.rows[k].lin) s = std::max(s, std::abs(v));
    if (s < 1e-12) s = 1.0;
    c.row_scale[k] = s;
    c.rows[k].b /= s;
    for (auto& [b, sp] : c.rows[k].blocks)
      for (auto& e : sp.entries) e.a /= s;
    for (auto& [id, v] : c.rows[k].lin) v /= s;
  }
  if (c.has_objective) {
    double s = 0;
    for (auto& [b, sp] : c.objective.blocks)
      for (auto& e : sp.entries) s = std::max(s, std::abs(e.i == e.j ? e.a : 2 * e.a));
    for (auto& [id, v] : c.objective.lin) s = std::max(s, std::abs(v));
    if (s > 1e-12) {
      c.obj_scale = s;
      for (auto& [b, sp] : c.objective.blocks)
        for (auto& e : sp.entries) e.a /= s;
      for (auto& [id, v] : c.objective.lin) v /= s;
    }
  }

  c.rows_of_block.assign(c.dims.size(), {});
  c.rows_of_lin.assign(c.nlin, {});
  for (size_t k = 0; k < c.rows.size(); ++k) {
    for (auto& [b, sp] : c.rows[k].blocks) c.rows_of_block[b].push_back(static_cast<int>(k));
    for (auto& [id, v] : c.rows[k].lin) c.rows_of_lin[id].push_back(static_cast<int>(k));
  }
  return c;
}

inline double row_dot(const Row& r, const BlockVec& v) {
  double s = 0;
  for (const auto& [b, sp] : r.blocks) {
    const auto& m = v.psd[b];
    for (const auto& e : sp.entries) s += (e.i == e.j) ? e.a * m(e.i, e.i) : 2 * e.a * m(e.i, e.j);
  }
  for (const auto& [id, c] : r.lin) s += c * v.lin(id);
  return s;
}

inline void row_axpy(const Row& r, double a, BlockVec& v) {
  for (const auto& [b, sp] : r.blocks) {
    auto& m = v.psd[b];
    for (const auto& e : sp.entries) {
      m(e.i, e.j) += a * e.a;
      if (e.i != e.j) m(e.j, e.i) += a * e.a;
    }
  }
  for (const auto& [id, c] : r.lin) v.lin(id) += a * c;
}

inline Eigen::MatrixXd row_block_dense(const SparseSym& sp, int dim) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : sp.entries) {
    m(e.i, e.j) = e.a;
    if (e.i != e.j) m(e.j, e.i) = e.a;
  }
  return m;
}

/// Per-block NT scaling data.
struct Scaling {
  std::vector<Eigen::MatrixXd> W, Whalf, Wmhalf;   // psd blocks
  std::vector<Eigen::MatrixXd> lamQ;               // eigenvectors of scaled point
  std::vector<Eigen::VectorXd> lamE;               // eigenvalues of scaled point
  Eigen::VectorXd w_lin, lam_lin;                  // lin cone
};

inline Eigen::MatrixXd sym_power(const Eigen::MatrixXd& m, double p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) d(i) = std::pow(std::max(d(i), 1e-300), p);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

inline Scaling compute_scaling(const BlockVec& X, const BlockVec& S) {
  Scaling sc;
  for (size_t b = 0; b < X.psd.size(); ++b) {
    Eigen::MatrixXd Smh = sym_power(S.psd[b], -0.5);
    Eigen::MatrixXd Sh = sym_power(S.psd[b], 0.5);
    Eigen::MatrixXd T = Sh * X.psd[b] * Sh;
    Eigen::MatrixXd Th = sym_power(0.5 * (T + T.transpose()), 0.5);
    Eigen::MatrixXd W = Smh * Th * Smh;
    W = 0.5 * (W + W.transpose());
    sc.W.push_back(W);
    Eigen::MatrixXd Wh = sym_power(W, 0.5);
    Eigen::MatrixXd Wmh = sym_power(W, -0.5);
    sc.Whalf.push_back(Wh);
    sc.Wmhalf.push_back(Wmh);
    Eigen::MatrixXd lam = Wh * S.psd[b] * Wh;
    lam = 0.5 * (lam + lam.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lam);
    sc.lamQ.push_back(es.eigenvectors());
    sc.lamE.push_back(es.eigenvalues());
  }
  sc.w_lin = (X.lin.array() / S.lin.array()).sqrt();
  sc.lam_lin = (X.lin.array() * S.lin.array()).sqrt();
  return sc;
}

/// W V W on psd blocks, w^2 .* v on the lin cone.
inline BlockVec scale_conj(const Scaling& sc, const BlockVec& v) {
  BlockVec out = v;
  for (size_t b = 0; b < v.psd.size(); ++b) out.psd[b] = sc.W[b] * v.psd[b] * sc.W[b];
  out.lin = (sc.w_lin.array().square() * v.lin.array()).matrix();
  return out;
}

/// Max step alpha such that X + alpha dX stays in the cone (psd / nonneg).
inline double max_step(const BlockVec& X, const BlockVec& dX) {
  double amax = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < X.psd.size(); ++b) {
    Eigen::MatrixXd M;
    Eigen::LLT<Eigen::MatrixXd> llt(X.psd[b]);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd L = llt.matrixL();
      M = L.triangularView<Eigen::Lower>().solve(dX.psd[b]);
      M = L.triangularView<Eigen::Lower>().solve(M.transpose()).transpose();
    } else {
      Eigen::MatrixXd Xmh = sym_power(X.psd[b], -0.5);
      M = Xmh * dX.psd[b] * Xmh;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0) amax = std::min(amax, -1.0 / lmin);
  }
  for (int i = 0; i < X.lin.size(); ++i)
    if (dX.lin(i) < 0) amax = std::min(amax, -X.lin(i) / dX.lin(i));
  return amax;
}

struct Iterate {
  BlockVec X, S;
  Eigen::VectorXd y;
  double tau = 1.0, kappa = 1.0;
};

class Solver {
 public:
  Solver(Compiled c, SolveOptions opts) : c_(std::move(c)), opts_(opts) {}

  // Applies A to a block vector.
  Eigen::VectorXd A_apply(const BlockVec& v) const {
    Eigen::VectorXd out(c_.rows.size());
    for (size_t k = 0; k < c_.rows.size(); ++k) out(k) = row_dot(c_.rows[k], v);
    return out;
  }
  BlockVec A_adjoint(const Eigen::VectorXd& y) const {
    BlockVec out = BlockVec::shaped(c_.dims, c_.nlin);
    for (size_t k = 0; k < c_.rows.size(); ++k) row_axpy(c_.rows[k], y(k), out);
    return out;
  }
  BlockVec C_mat() const {
    BlockVec out = BlockVec::shaped(c_.dims, c_.nlin);
    if (c_.has_objective) row_axpy(c_.objective, 1.0, out);
    return out;
  }
  Eigen::VectorXd b_vec() const {
    Eigen::VectorXd b(c_.rows.size());
    for (size_t k = 0; k < c_.rows.size(); ++k) b(k) = c_.rows[k].b;
    return b;
  }

  /// Schur complement M = A W-conj A^T for the current scaling.
  Eigen::MatrixXd build_schur(const Scaling& sc) const {
    const int m = static_cast<int>(c_.rows.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (size_t b = 0; b < c_.dims.size(); ++b) {
      const auto& rows_here = c_.rows_of_block[b];
      if (rows_here.empty()) continue;
      const int dim = c_.dims[b];
      std::vector<Eigen::MatrixXd> D;
      D.reserve(rows_here.size());
      for (int k : rows_here) {
        const SparseSym* sp = nullptr;
        for (const auto& [bb, s] : c_.rows[k].blocks)
          if (bb == static_cast<int>(b)) sp = &s;
        Eigen::MatrixXd Ak = row_block_dense(*sp, dim);
        D.push_back(sc.W[b] * Ak * sc.W[b]);
      }
      for (size_t p = 0; p < rows_here.size(); ++p) {
        const SparseSym* sp = nullptr;
        for (const auto& [bb, s] : c_.rows[rows_here[p]].blocks)
          if (bb == static_cast<int>(b)) sp = &s;
        for (size_t q = p; q < rows_here.size(); ++q) {
          double acc = 0;
          for (const auto& e : sp->entries)
            acc += (e.i == e.j) ? e.a * D[q](e.i, e.i) : 2 * e.a * D[q](e.i, e.j);
          M(rows_here[p], rows_here[q]) += acc;
          if (p != q) M(rows_here[q], rows_here[p]) += acc;
        }
      }
    }
    for (int i = 0; i < c_.nlin; ++i) {
      const auto& rows_here = c_.rows_of_lin[i];
      if (rows_here.empty()) continue;
      const double w2 = sc.w_lin(i) * sc.w_lin(i);
      std::vector<double> coef(rows_here.size());
      for (size_t p = 0; p < rows_here.size(); ++p) {
        for (const auto& [id, v] : c_.rows[rows_here[p]].lin)
          if (id == i) coef[p] = v;
      }
      for (size_t p = 0; p < rows_here.size(); ++p)
        for (size_t q = p; q < rows_here.size(); ++q) {
          const double add = coef[p] * coef[q] * w2;
          M(rows_here[p], rows_here[q]) += add;
          if (p != q) M(rows_here[q], rows_here[p]) += add;
        }
    }
    return M;
  }

  /// L_lambda^{-1} applied in the scaled space, returned in E4 form
  /// (Rc such that dX + W dS W = Rc).
  BlockVec comp_rhs(const Scaling& sc, const BlockVec& gamma_psd, const Eigen::VectorXd& gamma_lin) const {
    BlockVec out = BlockVec::shaped(c_.dims, c_.nlin);
    for (size_t b = 0; b < c_.dims.size(); ++b) {
      const auto& Q = sc.lamQ[b];
      const auto& ev = sc.lamE[b];
      Eigen::MatrixXd G = Q.transpose() * gamma_psd.psd[b] * Q;
      for (int i = 0; i < G.rows(); ++i)
        for (int j = 0; j < G.cols(); ++j) G(i, j) *= 2.0 / (ev(i) + ev(j));
      Eigen::MatrixXd U = Q * G * Q.transpose();
      out.psd[b] = sc.Whalf[b] * 0.5 * (U + U.transpose()) * sc.Whalf[b];
    }
    out.lin = (sc.w_lin.array() * gamma_lin.array() / sc.lam_lin.array()).matrix();
    return out;
  }

  struct Direction {
    BlockVec dX, dS;
    Eigen::VectorXd dy;
    double dtau = 0, dkappa = 0;
  };

  /// Solves the Newton system for given residual targets.
  Direction solve_direction(const Iterate& it, const Scaling& sc, const Eigen::MatrixXd& M,
                            const Eigen::LDLT<Eigen::MatrixXd>& Mfact,
                            const Eigen::VectorXd& AWCW, double CWCW,
                            const Eigen::VectorXd& z2, const Eigen::VectorXd& r1,
                            const BlockVec& R2, double r3, const BlockVec& Rc,
                            double rc_tk) const {
    const Eigen::VectorXd b = b_vec();
    BlockVec T1 = Rc;
    BlockVec WR2W = scale_conj(sc, R2);
    T1.axpy(1.0, WR2W);
    Eigen::VectorXd v1 = r1 - A_apply(T1);
    Eigen::VectorXd z1 = Mfact.solve(v1);
    if (v1.size()) z1 += Mfact.solve(v1 - M * z1);
    const BlockVec C = C_mat();
    const double CT1 = C.dot(T1);
    Eigen::VectorXd g = b - AWCW;
    const double h = it.kappa + it.tau * CWCW;
    const double v2 = rc_tk + it.tau * (CT1 + r3);
    const double denom = it.tau * g.dot(z2) + h;
    const double dtau = (v2 - it.tau * g.dot(z1)) / denom;
    Direction d;
    d.dy = z1 + dtau * z2;
    d.dtau = dtau;
    // dS = -A^*(dy) + C dtau - R2
    d.dS = BlockVec::shaped(c_.dims, c_.nlin);
    d.dS.axpy(-1.0, A_adjoint(d.dy));
    d.dS.axpy(dtau, C);
    d.dS.axpy(-1.0, R2);
    // dX = Rc - W dS W
    d.dX = Rc;
    d.dX.axpy(-1.0, scale_conj(sc, d.dS));
    d.dkappa = (rc_tk - it.kappa * dtau) / it.tau;
    return d;
  }

  SolveResult run() {
    const auto t_start = std::chrono::steady_clock::now();
    const int m = static_cast<int>(c_.rows.size());
    const Eigen::VectorXd b = b_vec();
    const BlockVec C = C_mat();

    Iterate it;
    it.X = BlockVec::shaped(c_.dims, c_.nlin);
    it.S = BlockVec::shaped(c_.dims, c_.nlin);
    for (size_t bb = 0; bb < c_.dims.size(); ++bb) {
      it.X.psd[bb].setIdentity();
      it.S.psd[bb].setIdentity();
    }
    it.X.lin.setOnes();
    it.S.lin.setOnes();
    it.y = Eigen::VectorXd::Zero(m);

    double nu = 1;  // barrier degree + 1 for (tau,kappa)
    for (int d : c_.dims) nu += d;
    nu += c_.nlin;

    const double bnorm = m ? b.cwiseAbs().maxCoeff() : 0.0;
    const double cnorm = C.max_abs();

    SolveResult res;
    double best_gap = std::numeric_limits<double>::infinity();
    int stall = 0;
    Iterate best_it = it;
    double best_quality = std::numeric_limits<double>::infinity();
    double best_mu = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opts_.max_iters; ++iter) {
      res.iterations = iter;
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      if (elapsed > opts_.time_limit_sec) {
        res.status = SolveStatus::Unknown;
        res.message = "time limit reached";
        return res;
      }

      // residuals
      Eigen::VectorXd res_p = A_apply(it.X) - b * it.tau;
      BlockVec res_d = BlockVec::shaped(c_.dims, c_.nlin);  // -A^*(y) + C tau - S
      res_d.axpy(-1.0, A_adjoint(it.y));
      res_d.axpy(it.tau, C);
      res_d.axpy(-1.0, it.S);
      const double cx = C.dot(it.X), by = m ? b.dot(it.y) : 0.0;
      const double res_g = by - cx - it.kappa;
      const double mu = (it.X.dot(it.S) + it.tau * it.kappa) / nu;

      // convergence checks (on the scaled data; final values recomputed later)
      const double pres = (m ? res_p.cwiseAbs().maxCoeff() : 0.0) / (it.tau * (1 + bnorm));
      const double dres = res_d.max_abs() / (it.tau * (1 + cnorm));
      const double gap = std::abs(cx / it.tau - by / it.tau) /
                         (1 + std::abs(cx / it.tau) + std::abs(by / it.tau));
      const double target = 0.2 * std::min(opts_.feas_tol, 1e-8);
      const double comp = mu / (it.tau * it.tau);
      const bool gap_ok = !c_.has_objective || gap <= 1e-8 || comp <= 1e-8;
      res.complementarity = comp;
      if (pres <= target && dres <= target && gap_ok) {
        res.status = SolveStatus::Feasible;
        res.message = "converged";
        recover(it, res);
        return res;
      }
      // remember the best near-feasible iterate in case progress later decays
      {
        const double q = std::max({pres, dres, c_.has_objective ? comp : 0.0});
        if (q < best_quality) {
          best_quality = q;
          best_mu = comp;
          best_it = it;
        }
      }

      // infeasibility detection
      if (it.tau < 1e-9 * std::max(1.0, it.kappa) ||
          (it.tau < 1e-7 && it.kappa > 1e4 * it.tau)) {
        if (by > 0) {
          // Farkas check: -A^*(y) approx S >= 0, b^T y = 1 after normalization
          double viol = res_d.max_abs() + it.tau * cnorm;
          if (viol / by <= 1e-6) {
            res.status = SolveStatus::Infeasible;
            res.message = "primal infeasibility certificate";
            return res;
          }
        }
        if (cx < 0 && std::abs(cx) > 1e-6) {
          res.status = SolveStatus::Unknown;
          res.message = "dual infeasibility (unbounded objective)";
          return res;
        }
        res.status = SolveStatus::Unknown;
        res.message = "tau collapsed without certificate";
        return res;
      }

      // scaling and factorization
      Scaling sc = compute_scaling(it.X, it.S);
      Eigen::MatrixXd M = build_schur(sc);
      // tiny regularization guards rank deficiency near convergence
      for (int i = 0; i < m; ++i) M(i, i) += 1e-13 * (1 + M(i, i));
      Eigen::LDLT<Eigen::MatrixXd> Mfact(M);
      if (Mfact.info() != Eigen::Success) {
        res.status = SolveStatus::Unknown;
        res.message = "KKT factorization failed";
        return res;
      }
      const BlockVec WCW = scale_conj(sc, C);
      const Eigen::VectorXd AWCW = A_apply(WCW);
      const double CWCW = C.dot(WCW);
      const Eigen::VectorXd u = AWCW + b;
      Eigen::VectorXd z2 = Mfact.solve(u);
      if (m) z2 += Mfact.solve(u - M * z2);  // one refinement step

      // affine (predictor) direction
      BlockVec gamma_aff = BlockVec::shaped(c_.dims, c_.nlin);
      Eigen::VectorXd gamma_aff_lin(c_.nlin);
      for (size_t bb = 0; bb < c_.dims.size(); ++bb) {
        gamma_aff.psd[bb] = -(sc.lamQ[bb] * sc.lamE[bb].array().square().matrix().asDiagonal() *
                              sc.lamQ[bb].transpose());
      }
      gamma_aff_lin = -sc.lam_lin.array().square();
      BlockVec Rc_aff = comp_rhs(sc, gamma_aff, gamma_aff_lin);
      // Newton targets the full residuals: -A^*(dy) + C dtau - dS = -res_d
      BlockVec R2_aff = BlockVec::shaped(c_.dims, c_.nlin);
      R2_aff.axpy(-1.0, res_d);
      Direction aff = solve_direction(it, sc, M, Mfact, AWCW, CWCW, z2, -res_p, R2_aff,
                                      -res_g, Rc_aff, -it.tau * it.kappa);

      double amax = steplen(it, aff);
      double alpha_aff = std::min(1.0, amax);
      // mu after hypothetical affine step
      BlockVec Xa = it.X, Sa = it.S;
      Xa.axpy(alpha_aff, aff.dX);
      Sa.axpy(alpha_aff, aff.dS);
      const double mu_aff = (Xa.dot(Sa) + (it.tau + alpha_aff * aff.dtau) *
                                              (it.kappa + alpha_aff * aff.dkappa)) /
                            nu;
      double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);
      sigma = std::min(0.99, std::max(1e-8, sigma));

      // combined (corrector) direction
      BlockVec gamma = BlockVec::shaped(c_.dims, c_.nlin);
      Eigen::VectorXd gamma_lin(c_.nlin);
      for (size_t bb = 0; bb < c_.dims.size(); ++bb) {
        Eigen::MatrixXd dXt = sc.Wmhalf[bb] * aff.dX.psd[bb] * sc.Wmhalf[bb];
        Eigen::MatrixXd dSt = sc.Whalf[bb] * aff.dS.psd[bb] * sc.Whalf[bb];
        Eigen::MatrixXd corr = 0.5 * (dXt * dSt + dSt * dXt);
        Eigen::MatrixXd lam2 = sc.lamQ[bb] * sc.lamE[bb].array().square().matrix().asDiagonal() *
                               sc.lamQ[bb].transpose();
        gamma.psd[bb] = sigma * mu * Eigen::MatrixXd::Identity(c_.dims[bb], c_.dims[bb]) - lam2 -
                        corr;
      }
      gamma_lin = (sigma * mu - sc.lam_lin.array().square() -
                   aff.dX.lin.array() * aff.dS.lin.array())
                      .matrix();
      BlockVec Rc = comp_rhs(sc, gamma, gamma_lin);
      const double rc_tk = sigma * mu - it.tau * it.kappa - aff.dtau * aff.dkappa;
      Direction dir = solve_direction(it, sc, M, Mfact, AWCW, CWCW, z2, -res_p, R2_aff,
                                      -res_g, Rc, rc_tk);

      double amax2 = steplen(it, dir);
      double alpha = std::min(1.0, 0.99 * amax2);
      if (!(alpha > 0) || !std::isfinite(alpha)) {
        res.status = SolveStatus::Unknown;
        res.message = "step length collapsed";
        return res;
      }

      it.X.axpy(alpha, dir.dX);
      it.S.axpy(alpha, dir.dS);
      it.y += alpha * dir.dy;
      it.tau += alpha * dir.dtau;
      it.kappa += alpha * dir.dkappa;

      // stall detection
      const double quality = std::max({pres, dres, mu / (it.tau * it.tau)});
      if (quality < best_gap * 0.95) {
        best_gap = quality;
        stall = 0;
      } else if (++stall > opts_.stall_patience) {
        res.status = SolveStatus::Unknown;
        res.message = "progress stalled";
        res.complementarity = best_mu;
        recover(best_it, res);
        return res;
      }
    }
    res.status = SolveStatus::Unknown;
    res.message = "iteration limit reached";
    res.complementarity = best_mu;
    recover(best_it, res);
    return res;
  }

 private:
  double steplen(const Iterate& it, const Solver::Direction& d) const {
    double a = max_step(it.X, d.dX);
    a = std::min(a, max_step(it.S, d.dS));
    if (d.dtau < 0) a = std::min(a, -it.tau / d.dtau);
    if (d.dkappa < 0) a = std::min(a, -it.kappa / d.dkappa);
    return a;
  }

  void recover(const Iterate& it, SolveResult& res) const {
    res.has_assignment = true;
    res.psd_values.clear();
    for (size_t b = 0; b < c_.dims.size(); ++b)
      res.psd_values.push_back(SymMatrix::from_eigen(it.X.psd[b] / it.tau));
    res.nonneg_values.assign(c_.num_nonneg, 0.0);
    for (int i = 0; i < c_.num_nonneg; ++i) res.nonneg_values[i] = it.X.lin(i) / it.tau;
    res.free_values.clear();
    for (auto [p, q] : c_.free_split) res.free_values.push_back((it.X.lin(p) - it.X.lin(q)) / it.tau);
  }

  Compiled c_;
  SolveOptions opts_;
};

}  // namespace ipm

/// Solves the block conic feasibility/minimization problem.  Residuals in the
/// returned result are recomputed from the original (unscaled) data rather
/// than trusted from solver internals.
inline SolveResult solve(const FeasibilityProblem& p, const SolveOptions& opts = SolveOptions::defaults()) {
  ipm::Compiled c = ipm::compile(p);
  ipm::Solver solver(c, opts);
  SolveResult res = solver.run();

  if (res.has_assignment) {
    // independent residual recomputation on original data
    double maxres = 0.0;
    for (const auto& eq : p.equalities()) {
      double v = -eq.rhs;
      for (const auto& t : eq.terms) {
        switch (t.kind) {
          case FeasibilityProblem::VarKind::PsdEntry:
            v += t.coeff * res.psd_values[t.id](t.i, t.j);
            break;
          case FeasibilityProblem::VarKind::Nonneg:
            v += t.coeff * res.nonneg_values[t.id];
            break;
          case FeasibilityProblem::VarKind::Free:
            v += t.coeff * res.free_values[t.id];
            break;
        }
      }
      maxres = std::max(maxres, std::abs(v));
    }
    res.max_equality_residual = maxres;
    double mineig = 0.0;
    for (const auto& m : res.psd_values) mineig = std::min(mineig, m.min_eigenvalue());
    for (double v : res.nonneg_values) mineig = std::min(mineig, v);
    res.min_block_eigenvalue = mineig;
    if (p.objective()) {
      double obj = 0;
      for (const auto& t : *p.objective()) {
        switch (t.kind) {
          case FeasibilityProblem::VarKind::PsdEntry:
            obj += t.coeff * res.psd_values[t.id](t.i, t.j);
            break;
          case FeasibilityProblem::VarKind::Nonneg:
            obj += t.coeff * res.nonneg_values[t.id];
            break;
          case FeasibilityProblem::VarKind::Free:
            obj += t.coeff * res.free_values[t.id];
            break;
        }
      }
      res.objective_value = obj;
    }
    if (res.status == SolveStatus::Feasible &&
        (res.max_equality_residual > opts.feas_tol || res.min_block_eigenvalue < -opts.psd_tol)) {
      res.status = SolveStatus::Unknown;
      res.message = "converged iterate failed the independent tolerance check";
    } else if (res.status == SolveStatus::Unknown && res.max_equality_residual <= opts.feas_tol &&
               res.min_block_eigenvalue >= -opts.psd_tol &&
               (!p.objective() ||
                res.complementarity <= 1e-6 * (1 + std::abs(res.objective_value.value_or(0))))) {
      // a stalled iterate that already meets the requested tolerances is a
      // valid feasible point
      res.status = SolveStatus::Feasible;
      res.message += " (accepted at requested tolerance)";
    }
  }
  return res;
}

}  // namespace copos
