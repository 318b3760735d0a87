#include <catch_amalgamated.hpp>
#include <random>

#include "copos/cones.hpp"
#include "copos/graph.hpp"

using namespace copos;

namespace {
SymMatrix random_sym(std::mt19937& rng, int n, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, u(rng));
  return m;
}

SymMatrix horn() { return m_matrix(make_cycle(5), 2.0); }
}  // namespace

TEST_CASE("h_membership basics") {
  SECTION("(x0+x1)^2 at r=0") {
    HomPoly f = simplex_power(2, 2);
    auto v = h_membership(f, 0);
    REQUIRE(v.status == Membership::Member);
    REQUIRE(verify_decomposition(f, *v.certificate).pass);
  }
  SECTION("simplex * Horn form at r=1 is a member") {
    HomPoly f = multiply(simplex_power(5, 1), quad_form(horn()));
    auto v = h_membership(f, 1);
    REQUIRE(v.status == Membership::Member);
    REQUIRE(verify_decomposition(f, *v.certificate, 1e-6).pass);
  }
  SECTION("Horn form alone at r=0 is not a member") {
    auto v = h_membership(quad_form(horn()), 0);
    REQUIRE(v.status == Membership::NotMember);
  }
  REQUIRE_THROWS_AS(h_membership(simplex_power(2, 3), 0), std::invalid_argument);
}

TEST_CASE("q_membership on the Horn matrix") {
  auto v1 = q_membership(horn(), 1);
  REQUIRE(v1.status == Membership::Member);
  REQUIRE(v1.certificate.has_value());
  auto rep = verify(horn(), *v1.certificate);
  REQUIRE(rep.pass);
  REQUIRE(rep.residual_inf <= 1e-6);
  REQUIRE(v1.certificate->multiplier.one_norm() == Catch::Approx(1.0).margin(1e-12));

  REQUIRE(q_membership(horn(), 0).status == Membership::NotMember);
}

TEST_CASE("q_membership trivia") {
  std::mt19937 rng(5);
  SECTION("psd matrices live in Q0 with N = 0") {
    Eigen::MatrixXd b = Eigen::MatrixXd::Random(4, 4);
    SymMatrix psd = SymMatrix::from_eigen(b * b.transpose());
    auto v = q_membership(psd, 0);
    REQUIRE(v.status == Membership::Member);
    REQUIRE(verify(psd, *v.certificate).pass);
  }
  SECTION("perfect graph matrix at alpha is in Q0") {
    auto v = q_membership(m_matrix(make_cycle(4), 2.0), 0);
    REQUIRE(v.status == Membership::Member);
  }
  (void)rng;
}

TEST_CASE("k_membership coincides with q_membership at r in {0,1}") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    SymMatrix m = random_sym(rng, 5);
    // push away from the boundary so both queries are numerically decisive
    m = m.shifted(0.3);
    for (int r : {0, 1}) {
      auto q = q_membership(m, r);
      auto k = k_membership(m, r);
      if (q.status != Membership::Unknown && k.status != Membership::Unknown)
        REQUIRE(q.status == k.status);
    }
  }
}

TEST_CASE("k_membership on Horn and psd inputs") {
  REQUIRE(k_membership(horn(), 1).status == Membership::Member);
  Eigen::MatrixXd b = Eigen::MatrixXd::Random(4, 4);
  SymMatrix psd = SymMatrix::from_eigen(b * b.transpose());
  auto v = k_membership(psd, 2);
  REQUIRE(v.status == Membership::Member);
  REQUIRE(verify(psd, *v.certificate).pass);  // includes the sos blocks
  MembershipOptions opts;
  opts.k_level_cap = 3;
  REQUIRE_THROWS_AS(k_membership(psd, 4, opts), ResourceLimitError);
}

TEST_CASE("qtilde_membership structural examples") {
  SECTION("bordered Horn (one zero row/column) at r=1") {
    SymMatrix h6 = SymMatrix::block_diag(horn(), SymMatrix(1));
    auto v = qtilde_membership(h6, 1);
    REQUIRE(v.status == Membership::Member);
    REQUIRE(verify(h6, *v.certificate).pass);
  }
  SECTION("diagonal scaling of Horn at r=1") {
    SymMatrix dhd = horn().scaled({1, 2, 1, 1, 1});
    auto v = qtilde_membership(dhd, 1);
    REQUIRE(v.status == Membership::Member);
    REQUIRE(verify(dhd, *v.certificate).pass);
  }
  SECTION("Horn plus Horn at r=1 is not a member") {
    SymMatrix hh = SymMatrix::block_diag(horn(), horn());
    REQUIRE(qtilde_membership(hh, 1).status == Membership::NotMember);
  }
  SECTION("agrees with q_membership at r=0") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      SymMatrix m = random_sym(rng, 4).shifted(0.3);
      auto q = q_membership(m, 0);
      auto qt = qtilde_membership(m, 0);
      if (q.status != Membership::Unknown && qt.status != Membership::Unknown)
        REQUIRE(q.status == qt.status);
    }
  }
}

TEST_CASE("q0_split") {
  SECTION("psd fast path returns (m, 0)") {
    SymMatrix id = SymMatrix::identity(3);
    auto s = q0_split(id);
    REQUIRE(s.status == Membership::Member);
    REQUIRE((s.psd_part.eigen() - id.eigen()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(s.nonneg_part.max_abs() == 0.0);
  }
  SECTION("C4 matrix splits; split is re-verified") {
    SymMatrix m = m_matrix(make_cycle(4), 2.0);
    auto s = q0_split(m);
    REQUIRE(s.status == Membership::Member);
    REQUIRE(s.psd_part.min_eigenvalue() >= -1e-7);
    REQUIRE(s.nonneg_part.min_entry() >= -1e-7);
    REQUIRE((s.psd_part.eigen() + s.nonneg_part.eigen() - m.eigen()).cwiseAbs().maxCoeff() <=
            1e-6);
  }
  SECTION("Horn does not split") { REQUIRE(q0_split(horn()).status == Membership::NotMember); }
}

TEST_CASE("c_membership") {
  SECTION("entrywise nonnegative matrices at r=0") {
    SymMatrix m(3);
    m.set(0, 0, 1.0);
    m.set(0, 1, 0.5);
    m.set(2, 2, 2.0);
    REQUIRE(c_membership(m, 0).status == Membership::Member);
  }
  SECTION("zero matrix is a member at any level (zero polynomial)") {
    SymMatrix z = m_matrix(make_complete(2), 1.0);
    REQUIRE(z.max_abs() == 0.0);
    for (int r : {0, 1, 2}) REQUIRE(c_membership(z, r).status == Membership::Member);
  }
  SECTION("star matrices are never members (any level tested)") {
    SymMatrix m = m_matrix(make_star(3), 3.0);
    for (int r = 0; r <= 4; ++r) REQUIRE(c_membership(m, r).status == Membership::NotMember);
  }
  SECTION("member certificates verify") {
    SymMatrix m(3);
    m.set(0, 0, 1.0);
    m.set(1, 2, 0.25);
    m.set(1, 1, 0.1);
    auto v = c_membership(m, 2);
    REQUIRE(v.status == Membership::Member);
    REQUIRE(verify(m, *v.certificate).pass);
  }
}

TEST_CASE("ctilde_membership") {
  SECTION("entrywise nonnegative matrices at r=2 (any multiplier works)") {
    SymMatrix m(3);
    m.set(0, 1, 1.0);
    m.set(2, 2, 1.0);
    auto v = ctilde_membership(m, 2);
    REQUIRE(v.status == Membership::Member);
    REQUIRE(verify(m, *v.certificate).pass);
  }
  SECTION("star matrices are not members for r <= 4") {
    SymMatrix m = m_matrix(make_star(3), 3.0);
    for (int r = 0; r <= 4; ++r) REQUIRE(ctilde_membership(m, r).status == Membership::NotMember);
  }
  SECTION("at r=0 the cone equals C^(0)") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      SymMatrix m = random_sym(rng, 4);
      REQUIRE(c_membership(m, 0).status == ctilde_membership(m, 0).status);
    }
  }
}

TEST_CASE("cone nesting on random matrices") {
  std::mt19937 rng(47);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    SymMatrix m = random_sym(rng, 4);
    for (int r : {0, 1}) {
      auto c = c_membership(m, r);
      if (c.status == Membership::Member) {
        REQUIRE(ctilde_membership(m, r).status == Membership::Member);
        ++checked;
      }
      auto q = q_membership(m, r);
      if (q.status == Membership::Member) {
        REQUIRE(qtilde_membership(m, r).status == Membership::Member);
        ++checked;
      }
    }
  }
  REQUIRE(checked > 0);
}

TEST_CASE("member verdicts always ship verifiable certificates") {
  std::mt19937 rng(53);
  int members = 0;
  for (int trial = 0; trial < 12; ++trial) {
    SymMatrix m = random_sym(rng, 4).shifted(0.5);
    for (int r : {0, 1}) {
      for (auto v : {q_membership(m, r), qtilde_membership(m, r), c_membership(m, r),
                     ctilde_membership(m, r)}) {
        if (v.status != Membership::Member) continue;
        REQUIRE(v.certificate.has_value());
        auto rep = verify(m, *v.certificate);
        REQUIRE(rep.pass);
        REQUIRE(rep.residual_inf <= 1e-6);
        ++members;
      }
    }
  }
  REQUIRE(members > 0);
}

TEST_CASE("margin shifts the tested matrix") {
  // Horn is on the boundary of COP5: with a +margin shift it stays a member
  // of Qtilde^(1), and the certificate certifies the shifted matrix.
  MembershipOptions opts;
  opts.margin = 1e-3;
  auto v = qtilde_membership(horn(), 1, opts);
  REQUIRE(v.status == Membership::Member);
  REQUIRE(verify(horn().shifted(1e-3), *v.certificate).pass);
}
