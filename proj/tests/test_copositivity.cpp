#include <catch_amalgamated.hpp>
#include <random>

#include "copos/copositivity.hpp"
#include "copos/graph.hpp"

using namespace copos;

namespace {
SymMatrix horn() { return m_matrix(make_cycle(5), 2.0); }

SymMatrix random_sym(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, u(rng));
  return m;
}

// definite oracle verdict with margin: copositive if M - margin I is, not
// copositive if M + margin I is not
std::optional<bool> oracle_with_margin(const SymMatrix& m, double margin) {
  auto lo = brute_oracle(m.shifted(-margin), 40, 300000);
  if (lo.verdict == CopVerdict::Copositive) return true;
  auto hi = brute_oracle(m.shifted(margin), 40, 300000);
  if (hi.verdict == CopVerdict::NotCopositive) return false;
  return std::nullopt;
}
}  // namespace

TEST_CASE("brute_oracle basics") {
  REQUIRE(brute_oracle(SymMatrix::identity(4)).verdict == CopVerdict::Copositive);
  REQUIRE(brute_oracle(horn()).verdict == CopVerdict::Copositive);
  SECTION("Horn minus 0.1 J has a witness near a Horn-form zero") {
    SymMatrix m = horn() - SymMatrix::constant(5, 0.1);
    auto r = brute_oracle(m);
    REQUIRE(r.verdict == CopVerdict::NotCopositive);
    REQUIRE(r.witness.has_value());
    REQUIRE(m.quad(*r.witness) < 0.0);
    // the half-indicator of {0, 2} evaluates to exactly -0.1
    Eigen::VectorXd z = Eigen::VectorXd::Zero(5);
    z(0) = z(2) = 0.5;
    REQUIRE(m.quad(z) == Catch::Approx(-0.1));
  }
  SECTION("negative diagonal is caught immediately") {
    SymMatrix m = SymMatrix::identity(3);
    m.set(1, 1, -0.5);
    auto r = brute_oracle(m);
    REQUIRE(r.verdict == CopVerdict::NotCopositive);
  }
}

TEST_CASE("cop5_test") {
  REQUIRE(cop5_test(horn()).verdict == CopVerdict::Copositive);
  SECTION("diagonal scalings stay copositive") {
    SymMatrix dhd = horn().scaled({1, 3, 1, 2, 1});
    REQUIRE(cop5_test(dhd).verdict == CopVerdict::Copositive);
  }
  SECTION("Horn minus 0.05 J is not copositive") {
    REQUIRE(cop5_test(horn() - SymMatrix::constant(5, 0.05)).verdict ==
            CopVerdict::NotCopositive);
  }
  SECTION("negative diagonal short-circuits") {
    SymMatrix m = SymMatrix::identity(5);
    m.set(2, 2, -1.0);
    REQUIRE(cop5_test(m).verdict == CopVerdict::NotCopositive);
  }
  SECTION("zero-diagonal reduction") {
    // M with row 0 zeroed out and nonnegative: decided by the 4x4 remainder
    SymMatrix m(5);
    for (int i = 1; i < 5; ++i)
      for (int j = i; j < 5; ++j) m.set(i, j, i == j ? 1.0 : -0.4);
    REQUIRE(cop5_test(m).verdict == CopVerdict::Copositive);
    m.set(0, 1, -0.2);  // zero diagonal with a negative row entry
    REQUIRE(cop5_test(m).verdict == CopVerdict::NotCopositive);
  }
  REQUIRE_THROWS_AS(cop5_test(SymMatrix::identity(4)), std::invalid_argument);
}

TEST_CASE("cop5_test verdict is scaling invariant") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  int definite = 0;
  for (int trial = 0; trial < 12 && definite < 6; ++trial) {
    SymMatrix m = random_sym(rng, 5);
    auto truth = oracle_with_margin(m, 0.05);
    if (!truth) continue;
    ++definite;
    std::vector<double> d(5);
    for (auto& v : d) v = scale(rng);
    auto a = cop5_test(m);
    auto b = cop5_test(m.scaled(d));
    REQUIRE(a.verdict == b.verdict);
  }
  REQUIRE(definite >= 4);
}

TEST_CASE("agreement with the oracle under margin") {
  std::mt19937 rng(71);
  SECTION("4x4: q0_split decides copositivity (Diananda)") {
    int tested = 0;
    while (tested < 15) {
      SymMatrix m = random_sym(rng, 4);
      auto truth = oracle_with_margin(m, 0.05);
      if (!truth) continue;
      ++tested;
      auto split = q0_split(m);
      REQUIRE((split.status == Membership::Member) == *truth);
    }
  }
  SECTION("5x5: cop5_test agrees") {
    int tested = 0;
    while (tested < 15) {
      SymMatrix m = random_sym(rng, 5);
      auto truth = oracle_with_margin(m, 0.05);
      if (!truth) continue;
      ++tested;
      auto r = cop5_test(m);
      REQUIRE(r.verdict != CopVerdict::Unknown);
      REQUIRE((r.verdict == CopVerdict::Copositive) == *truth);
    }
  }
}

TEST_CASE("cop_inner_test") {
  SECTION("psd plus nonneg at r=0") {
    std::mt19937 rng(5);
    Eigen::MatrixXd b = Eigen::MatrixXd::Random(4, 4);
    SymMatrix m = SymMatrix::from_eigen(b * b.transpose() + Eigen::MatrixXd::Constant(4, 4, 0.3));
    auto r = cop_inner_test(m, 0);
    REQUIRE(r.verdict == CopVerdict::Copositive);
    REQUIRE(r.certificate.has_value());
    (void)rng;
  }
  SECTION("Horn at r=1") {
    REQUIRE(cop_inner_test(horn(), 1).verdict == CopVerdict::Copositive);
  }
  SECTION("bordered Horn with the hard 2x2 block: never claims non-copositivity") {
    // [H 0 0; 0 1 -1; 0 -1 1] is copositive but outside Q^{(r)} for every r;
    // whichever way the Qtilde query lands, the verdict is only
    // copositive-or-unknown.
    SymMatrix tail(2);
    tail.set(0, 0, 1.0);
    tail.set(1, 1, 1.0);
    tail.set(0, 1, -1.0);
    SymMatrix m = SymMatrix::block_diag(horn(), tail);
    for (int r = 0; r <= 2; ++r) {
      auto res = cop_inner_test(m, r);
      REQUIRE((res.verdict == CopVerdict::Copositive || res.verdict == CopVerdict::Unknown));
    }
  }
}
