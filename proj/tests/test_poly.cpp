#include <catch_amalgamated.hpp>
#include <random>

#include "copos/graph.hpp"
#include "copos/poly.hpp"

using namespace copos;

namespace {
Monomial mono(std::initializer_list<int> e) { return Monomial(e); }

HomPoly random_poly(std::mt19937& rng, int nvars, int degree, int nterms, bool nonneg) {
  const auto& table = MonomialTable::get(nvars, degree);
  std::uniform_int_distribution<int> pick(0, table.size() - 1);
  std::uniform_real_distribution<double> coeff(nonneg ? 0.1 : -1.0, 1.0);
  HomPoly p(nvars, degree);
  for (int i = 0; i < nterms; ++i) p.add_term(table[pick(rng)], coeff(rng));
  return p;
}
}  // namespace

TEST_CASE("monomial table enumerates graded-lex") {
  const auto& t = MonomialTable::get(3, 2);
  REQUIRE(t.size() == 6);
  REQUIRE(t.index_of(mono({2, 0, 0})) >= 0);
  for (int i = 0; i < t.size(); ++i) REQUIRE(t.index_of(t[i]) == i);
  // ordering is strict
  GradedLexLess less;
  for (int i = 0; i + 1 < t.size(); ++i) REQUIRE(less(t[i], t[i + 1]));
}

TEST_CASE("quad_form coefficients") {
  SECTION("identity 2x2") {
    HomPoly p = quad_form(SymMatrix::identity(2));
    REQUIRE(p.coeff(mono({2, 0})) == 1.0);
    REQUIRE(p.coeff(mono({0, 2})) == 1.0);
    REQUIRE(p.coeff(mono({1, 1})) == 0.0);
  }
  SECTION("all-ones 2x2") {
    HomPoly p = quad_form(SymMatrix::constant(2, 1.0));
    REQUIRE(p.coeff(mono({2, 0})) == 1.0);
    REQUIRE(p.coeff(mono({1, 1})) == 2.0);
  }
  SECTION("Horn matrix entries") {
    HomPoly p = quad_form(m_matrix(make_cycle(5), 2.0));
    REQUIRE(p.coeff(mono({2, 0, 0, 0, 0})) == 1.0);
    REQUIRE(p.coeff(mono({1, 1, 0, 0, 0})) == 2.0);   // edge
    REQUIRE(p.coeff(mono({1, 0, 1, 0, 0})) == -2.0);  // non-edge
    REQUIRE(p.coeff(mono({1, 0, 0, 1, 0})) == -2.0);
    REQUIRE(p.coeff(mono({1, 0, 0, 0, 1})) == 2.0);
  }
}

TEST_CASE("multiply basics") {
  HomPoly x0(2, 1), x0x1(2, 2);
  x0.add_term(mono({1, 0}), 1.0);
  x0x1.add_term(mono({1, 1}), 1.0);
  REQUIRE(multiply(x0, x0x1).coeff(mono({2, 1})) == 1.0);

  HomPoly one = HomPoly::constant(2, 1.0);
  std::mt19937 rng(7);
  HomPoly p = random_poly(rng, 2, 3, 4, false);
  HomPoly q = multiply(p, one);
  REQUIRE((q - p).max_abs_coeff() == 0.0);

  HomPoly s(2, 1);
  s.add_term(mono({1, 0}), 1.0);
  s.add_term(mono({0, 1}), 1.0);
  HomPoly sq = multiply(s, s);
  REQUIRE(sq.coeff(mono({2, 0})) == 1.0);
  REQUIRE(sq.coeff(mono({1, 1})) == 2.0);
  REQUIRE(sq.coeff(mono({0, 2})) == 1.0);
}

TEST_CASE("multiply is commutative and associative; 1-norm submultiplicative") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    HomPoly a = random_poly(rng, 3, 2, 4, false);
    HomPoly b = random_poly(rng, 3, 1, 3, false);
    HomPoly c = random_poly(rng, 3, 2, 4, false);
    REQUIRE((multiply(a, b) - multiply(b, a)).max_abs_coeff() < 1e-12);
    HomPoly lhs = multiply(multiply(a, b), c);
    HomPoly rhs = multiply(a, multiply(b, c));
    REQUIRE((lhs - rhs).max_abs_coeff() < 1e-12 * (1 + lhs.max_abs_coeff()));
    REQUIRE(multiply(a, b).one_norm() <= a.one_norm() * b.one_norm() + 1e-12);
    // equality when both sides have nonnegative coefficients
    HomPoly an = random_poly(rng, 3, 2, 4, true);
    HomPoly bn = random_poly(rng, 3, 1, 3, true);
    REQUIRE(multiply(an, bn).one_norm() ==
            Catch::Approx(an.one_norm() * bn.one_norm()).epsilon(1e-12));
  }
}

TEST_CASE("simplex_power") {
  HomPoly p = simplex_power(2, 2);
  REQUIRE(p.coeff(mono({2, 0})) == 1.0);
  REQUIRE(p.coeff(mono({1, 1})) == 2.0);
  REQUIRE(p.coeff(mono({0, 2})) == 1.0);
  REQUIRE(simplex_power(3, 0).coeff(mono({0, 0, 0})) == 1.0);
  REQUIRE(simplex_power(3, 3).coeff(mono({1, 1, 1})) == 6.0);
}

TEST_CASE("substitute_positive") {
  HomPoly p(2, 2);
  p.add_term(mono({1, 1}), 1.0);
  SECTION("diagonal scaling") {
    HomPoly q = substitute_positive(p, {0, 1}, {2.0, 3.0});
    REQUIRE(q.coeff(mono({1, 1})) == 6.0);
  }
  SECTION("collapse merges additively") {
    HomPoly lin(2, 1);
    lin.add_term(mono({1, 0}), 1.0);
    lin.add_term(mono({0, 1}), 1.0);
    HomPoly q = substitute_positive(lin, {0, 0}, {1.0, 1.0});
    REQUIRE(q.coeff(mono({1, 0})) == 2.0);
  }
  SECTION("half factor on a square") {
    HomPoly sq(1, 2);
    sq.add_term(mono({2}), 1.0);
    REQUIRE(substitute_positive(sq, {0}, {0.5}).coeff(mono({2})) == 0.25);
  }
  SECTION("identity map with unit factors is the identity") {
    std::mt19937 rng(3);
    HomPoly r = random_poly(rng, 3, 3, 5, false);
    REQUIRE((substitute_positive(r, {0, 1, 2}, {1, 1, 1}) - r).max_abs_coeff() == 0.0);
  }
  REQUIRE_THROWS_AS(substitute_positive(p, {0, 1}, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("normalize_one") {
  HomPoly p(2, 1);
  p.add_term(mono({1, 0}), 2.0);
  p.add_term(mono({0, 1}), 2.0);
  HomPoly q = normalize_one(p);
  REQUIRE(q.coeff(mono({1, 0})) == 0.5);
  HomPoly sq(1, 2);
  sq.add_term(mono({2}), 1.0);
  REQUIRE((normalize_one(sq) - sq).max_abs_coeff() == 0.0);
  HomPoly m(2, 2);
  m.add_term(mono({1, 1}), 3.0);
  REQUIRE(normalize_one(m).coeff(mono({1, 1})) == 1.0);
  REQUIRE_THROWS_AS(normalize_one(HomPoly(2, 1)), std::invalid_argument);
}

TEST_CASE("is_nonneg_coeffs") {
  HomPoly a(2, 2);
  a.add_term(mono({2, 0}), 1.0);
  a.add_term(mono({1, 1}), 2.0);
  REQUIRE(is_nonneg_coeffs(a, 0.0));
  HomPoly b(2, 2);
  b.add_term(mono({2, 0}), 1.0);
  b.add_term(mono({0, 2}), -1.0);
  REQUIRE(!is_nonneg_coeffs(b, 1e-9));
  REQUIRE(!is_nonneg_coeffs(quad_form(m_matrix(make_cycle(5), 2.0)), 1e-9));
}

TEST_CASE("symmetrize") {
  // cyclic shift on 5 variables
  Permutation shift{1, 2, 3, 4, 0};
  HomPoly x0(5, 1);
  x0.add_term(mono({1, 0, 0, 0, 0}), 1.0);
  HomPoly avg = symmetrize(x0, {shift});
  for (int i = 0; i < 5; ++i) REQUIRE(avg.coeff(unit_monomial(5, i)) == Catch::Approx(0.2));

  // already symmetric polynomial is a fixed point (after normalization)
  HomPoly s = normalize_one(simplex_power(5, 1));
  REQUIRE((symmetrize(s, {shift}) - s).max_abs_coeff() < 1e-15);

  HomPoly xy(2, 2);
  xy.add_term(mono({1, 1}), 1.0);
  REQUIRE((symmetrize(xy, {Permutation{1, 0}}) - xy).max_abs_coeff() < 1e-15);

  // invariance under every generator
  std::mt19937 rng(11);
  HomPoly p = random_poly(rng, 4, 2, 5, true);
  Permutation g1{1, 0, 2, 3}, g2{0, 2, 3, 1};
  HomPoly t = symmetrize(p, {g1, g2});
  REQUIRE((apply_permutation(t, g1) - t).max_abs_coeff() < 1e-14);
  REQUIRE((apply_permutation(t, g2) - t).max_abs_coeff() < 1e-14);
}

TEST_CASE("group closure cap") {
  // full symmetric group on 9 points exceeds a small cap
  Permutation cyc{1, 2, 3, 4, 5, 6, 7, 8, 0};
  Permutation swap{1, 0, 2, 3, 4, 5, 6, 7, 8};
  REQUIRE_THROWS_AS(group_closure(9, {cyc, swap}, 1000), ResourceLimitError);
}

TEST_CASE("form at normalized stable-set indicators") {
  // quad_form(M_G) at chi^S / |S| equals (alpha - |S|) * |S| / |S|^2 scaled:
  // zero exactly when |S| = alpha
  for (const Graph& g : {make_cycle(5), make_cycle(7), make_complete(4), make_graph_B()}) {
    const int a = alpha_exact(g);
    HomPoly f = quad_form(m_matrix(g, a));
    for (const auto& s : stable_sets(g, StableSetMode::AllUpToAlpha).all) {
      if (s.empty()) continue;
      std::vector<double> x(g.n(), 0.0);
      for (int v : s) x[v] = 1.0 / s.size();
      const double k = static_cast<double>(s.size());
      REQUIRE(f.evaluate(x) == Catch::Approx((a - k) / k).margin(1e-12));
    }
  }
}
