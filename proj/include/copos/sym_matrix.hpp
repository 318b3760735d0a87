#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <vector>

namespace copos {

/// Dense symmetric real matrix.  Writes go through set() which mirrors the
/// entry, so symmetry is exact by construction.
class SymMatrix {
 public:
  SymMatrix() : n_(0) {}
  explicit SymMatrix(int n) : n_(n), m_(Eigen::MatrixXd::Zero(n, n)) {}

  static SymMatrix identity(int n) {
    SymMatrix s(n);
    s.m_ = Eigen::MatrixXd::Identity(n, n);
    return s;
  }
  static SymMatrix constant(int n, double v) {
    SymMatrix s(n);
    s.m_ = Eigen::MatrixXd::Constant(n, n, v);
    return s;
  }
  static SymMatrix from_eigen(const Eigen::MatrixXd& a) {
    SymMatrix s(static_cast<int>(a.rows()));
    s.m_ = 0.5 * (a + a.transpose());
    return s;
  }

  int n() const { return n_; }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) { m_(i, j) = m_(j, i) = v; }
  void add(int i, int j, double v) {
    m_(i, j) += v;
    if (i != j) m_(j, i) += v;
  }

  const Eigen::MatrixXd& eigen() const { return m_; }

  double min_eigenvalue() const {
    if (n_ == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  double min_entry() const { return n_ == 0 ? 0.0 : m_.minCoeff(); }
  double max_abs() const { return n_ == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

  bool is_psd(double tol) const { return min_eigenvalue() >= -tol; }
  bool is_entrywise_nonneg(double tol) const { return min_entry() >= -tol; }

  /// D * M * D for a positive diagonal D = diag(d).
  SymMatrix scaled(const std::vector<double>& d) const {
    if (static_cast<int>(d.size()) != n_) throw std::invalid_argument("scaled: size mismatch");
    SymMatrix out(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out.m_(i, j) = d[i] * m_(i, j) * d[j];
    return out;
  }

  SymMatrix principal_submatrix(const std::vector<int>& keep) const {
    SymMatrix out(static_cast<int>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i)
      for (size_t j = 0; j < keep.size(); ++j)
        out.m_(static_cast<int>(i), static_cast<int>(j)) = m_(keep[i], keep[j]);
    return out;
  }

  static SymMatrix block_diag(const SymMatrix& a, const SymMatrix& b) {
    SymMatrix out(a.n() + b.n());
    out.m_.topLeftCorner(a.n(), a.n()) = a.m_;
    out.m_.bottomRightCorner(b.n(), b.n()) = b.m_;
    return out;
  }

  SymMatrix operator+(const SymMatrix& o) const {
    SymMatrix out(n_);
    out.m_ = m_ + o.m_;
    return out;
  }
  SymMatrix operator-(const SymMatrix& o) const {
    SymMatrix out(n_);
    out.m_ = m_ - o.m_;
    return out;
  }
  SymMatrix operator*(double c) const {
    SymMatrix out(n_);
    out.m_ = c * m_;
    return out;
  }

  /// M + c*I, the margin shift used by boundary-aware membership tests.
  SymMatrix shifted(double c) const {
    SymMatrix out(n_);
    out.m_ = m_ + c * Eigen::MatrixXd::Identity(n_, n_);
    return out;
  }

  double quad(const Eigen::VectorXd& x) const { return x.dot(m_ * x); }

 private:
  int n_;
  Eigen::MatrixXd m_;
};

}  // namespace copos
