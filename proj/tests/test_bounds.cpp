#include <catch_amalgamated.hpp>
#include <cmath>

#include "copos/bounds.hpp"
#include "copos/graph.hpp"

using namespace copos;

TEST_CASE("nu_bound on C5") {
  Graph c5 = make_cycle(5);
  auto r0 = nu_bound(c5, 0);
  REQUIRE(r0.value == Catch::Approx(std::sqrt(5.0)).margin(1e-3));
  REQUIRE(r0.certificate.has_value());
  REQUIRE(verify(m_matrix(c5, r0.value), *r0.certificate, 1e-5).pass);
  auto r1 = nu_bound(c5, 1);
  REQUIRE(r1.value == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("nu_bound monotone in r") {
  for (const Graph& g : {make_cycle(5), make_cycle(7), make_graph_B()}) {
    auto r0 = nu_bound(g, 0);
    auto r1 = nu_bound(g, 1);
    REQUIRE(r1.value <= r0.value + 1e-4);
  }
}

TEST_CASE("theta_bound") {
  SECTION("equals nu_bound at r in {0,1} on assorted graphs") {
    for (const Graph& g : {make_cycle(5), make_cycle(7), make_graph_C(), make_star(3),
                           make_complete_bipartite(2, 3)}) {
      for (int r : {0, 1})
        REQUIRE(theta_bound(g, r).value == Catch::Approx(nu_bound(g, r).value).margin(2e-5));
    }
  }
  SECTION("C5 at r=1") {
    REQUIRE(theta_bound(make_cycle(5), 1).value == Catch::Approx(2.0).margin(1e-3));
  }
  SECTION("level cap") {
    REQUIRE_THROWS_AS(theta_bound(make_cycle(5), 4), ResourceLimitError);
  }
}

TEST_CASE("nu_tilde_bound") {
  SECTION("equals nu_bound at r=0") {
    BoundOptions bo;
    bo.t_tol = 1e-4;
    for (const Graph& g : {make_cycle(5), make_graph_B()}) {
      auto nt = nu_tilde_bound(g, 0, bo);
      auto nu = nu_bound(g, 0, bo);
      REQUIRE(std::abs(nt.value - nu.value) <= 2 * bo.t_tol);
    }
  }
  SECTION("graph B reaches alpha at r=1") {
    Graph b = make_graph_B();
    auto nt = nu_tilde_bound(b, 1);
    REQUIRE(nt.value == Catch::Approx(3.0).margin(1e-3));
    REQUIRE(nt.verified);
    REQUIRE(nt.certificate.has_value());
  }
  SECTION("search trace brackets the value") {
    auto nt = nu_tilde_bound(make_cycle(5), 0);
    double largest_infeasible = 0, smallest_feasible = 1e300;
    for (const auto& p : nt.trace) {
      if (p.verdict == Membership::Member) smallest_feasible = std::min(smallest_feasible, p.t);
      if (p.verdict == Membership::NotMember) largest_infeasible = std::max(largest_infeasible, p.t);
    }
    REQUIRE(largest_infeasible < nt.value);
    REQUIRE(nt.value <= smallest_feasible);
    REQUIRE(nt.value >= alpha_exact(make_cycle(5)) - nt.t_tol);
  }
}

TEST_CASE("zeta_bounds") {
  SECTION("complete graphs reach 1 immediately") {
    for (int r : {0, 1, 2}) {
      auto z = zeta_bounds(make_complete(4), r, true);
      REQUIRE(z.value == Catch::Approx(1.0).margin(1e-9));
      auto zt = zeta_bounds(make_complete(4), r, false);
      REQUIRE(zt.value == Catch::Approx(1.0).margin(1e-9));
    }
  }
  SECTION("star graph values exceed alpha at every tested level") {
    for (int r = 0; r <= 4; ++r) {
      auto zt = zeta_bounds(make_star(3), r, false);
      REQUIRE(zt.value > 3.0 + zt.t_tol);  // infinity counts
    }
  }
  SECTION("free multiplier never loses to the fixed one") {
    for (const Graph& g : {make_cycle(5), make_cycle(4), make_complete_bipartite(2, 2)}) {
      for (int r : {2, 3}) {
        auto z = zeta_bounds(g, r, true);
        auto zt = zeta_bounds(g, r, false);
        REQUIRE(zt.value <= z.value + 2e-4);
      }
    }
  }
}

TEST_CASE("check_ineq_d") {
  Graph b = make_graph_B();
  SECTION("all-ones is always valid") {
    DVector d{std::vector<double>(b.n(), 1.0)};
    REQUIRE(check_ineq_d(b, d).valid);
  }
  SECTION("a path center with weight above its endpoints is a violation") {
    Graph path(3, {{0, 1}, {1, 2}});
    DVector d{{0.0, 1.0, 0.0}};
    auto chk = check_ineq_d(path, d);
    REQUIRE(!chk.valid);
    REQUIRE(chk.violations.size() == 1);
    REQUIRE(chk.violations[0] == std::array<int, 3>{1, 0, 2});
  }
  SECTION("indicator of the marked vertices of B is valid") {
    DVector d{std::vector<double>(b.n(), 0.0)};
    for (int v : graph_B_marked()) d.d[v] = 1.0;
    REQUIRE(check_ineq_d(b, d).valid);
  }
}

TEST_CASE("find_d") {
  SECTION("full-vertex target is always feasible (all-ones)") {
    Graph g = make_graph_C();
    VertexSet all;
    for (int v = 0; v < g.n(); ++v) all.push_back(v);
    auto d = find_d(g, all);
    REQUIRE(d.has_value());
    REQUIRE(check_ineq_d(g, *d).valid);
  }
  SECTION("star center alone is infeasible") {
    REQUIRE(!find_d(make_star(3), VertexSet{0}).has_value());
  }
  SECTION("marked vertices of C are feasible") {
    auto d = find_d(make_graph_C(), graph_C_marked());
    REQUIRE(d.has_value());
    for (int v : graph_C_marked()) REQUIRE(d->d[v] >= 1.0 - 1e-7);
  }
  SECTION("surrogate mode returns a valid vector") {
    auto d = find_d(make_cycle(5), std::nullopt);
    REQUIRE(d.has_value());
    REQUIRE(check_ineq_d(make_cycle(5), *d).valid);
  }
}

TEST_CASE("rank0_test") {
  REQUIRE(rank0_test(make_cycle(4)));
  REQUIRE(rank0_test(make_complete(5)));
  REQUIRE(rank0_test(make_complete_bipartite(3, 3)));
  REQUIRE(!rank0_test(make_cycle(5)));
  REQUIRE(!rank0_test(make_graph_B()));
  REQUIRE(rank0_test(Graph(0)));
}

TEST_CASE("rank1_sufficient") {
  SECTION("graph B with the marked six vertices") {
    auto rep = rank1_sufficient(make_graph_B(), graph_B_marked());
    REQUIRE(rep.has_value());
    REQUIRE(rep->bound == 1);
  }
  SECTION("G_k with u and v vertices, k <= 3") {
    for (int k = 1; k <= 3; ++k)
      REQUIRE(rank1_sufficient(make_G_k(k), G_k_uv_vertices(k)).has_value());
  }
  SECTION("C5 with every vertex") {
    VertexSet all{0, 1, 2, 3, 4};
    REQUIRE(rank1_sufficient(make_cycle(5), all).has_value());
  }
  SECTION("search mode finds a witness for B") {
    auto rep = rank1_sufficient(make_graph_B(), std::nullopt);
    REQUIRE(rep.has_value());
  }
}

TEST_CASE("rank_recursive_upper") {
  SECTION("C5 with all-ones gives 1") {
    DVector d{std::vector<double>(5, 1.0)};
    auto rep = rank_recursive_upper(make_cycle(5), d);
    REQUIRE(rep.bound == 1);
  }
  SECTION("perfect graphs short-circuit at 0") {
    DVector d{std::vector<double>(4, 1.0)};
    REQUIRE(rank_recursive_upper(make_cycle(4), d).bound == 0);
  }
  SECTION("G_2 with the u/v indicator gives 1") {
    Graph g = make_G_k(2);
    DVector d{std::vector<double>(g.n(), 0.0)};
    for (int v : G_k_uv_vertices(2)) d.d[v] = 1.0;
    REQUIRE(check_ineq_d(g, d).valid);
    REQUIRE(rank_recursive_upper(g, d).bound == 1);
  }
  SECTION("invalid d rejected") {
    Graph path(3, {{0, 1}, {1, 2}});
    REQUIRE_THROWS_AS(rank_recursive_upper(path, DVector{{0.0, 1.0, 0.0}}),
                      std::invalid_argument);
  }
}

TEST_CASE("rank_formula_bounds") {
  SECTION("C5") {
    auto reps = rank_formula_bounds(make_cycle(5));
    REQUIRE(reps.size() == 2);
    REQUIRE(reps[0].bound == 12);  // floor((5/2 + 1)^2)
    REQUIRE(reps[1].bound == 24);  // 4 + 4 * 5
  }
  SECTION("K_n") {
    auto reps = rank_formula_bounds(make_complete(6));
    REQUIRE(reps[0].bound == 7);       // (n + 1)^1
    REQUIRE(reps[1].bound == 1 + 12);  // 1 + 2n
  }
  SECTION("disjoint union adds a component-sum bound") {
    Graph two_c5 = disjoint_union(make_cycle(5), make_cycle(5));
    auto reps = rank_formula_bounds(two_c5);
    bool found = false;
    for (const auto& r : reps)
      if (r.method == "component_sum") {
        found = true;
        REQUIRE(r.bound == 2);
      }
    REQUIRE(found);
  }
}

TEST_CASE("rank_lower_cert") {
  SECTION("G_3 with the w vertices certifies rank >= 2") {
    auto rep = rank_lower_cert(make_G_k(3), G_k_w_vertices(3));
    REQUIRE(rep.has_value());
    REQUIRE(rep->bound == 2);
  }
  SECTION("L_3 with the s vertices certifies rank >= 2") {
    auto rep = rank_lower_cert(make_L_k(3), L_k_s_vertices(3));
    REQUIRE(rep.has_value());
    REQUIRE(rep->bound == 2);
  }
  SECTION("C4 with two opposite vertices is invalid") {
    REQUIRE(!rank_lower_cert(make_cycle(4), {0, 2}).has_value());
  }
  SECTION("non-stable sets are rejected") {
    REQUIRE_THROWS_AS(rank_lower_cert(make_cycle(4), {0, 1}), std::invalid_argument);
  }
  SECTION("singletons give the trivial bound") {
    auto rep = rank_lower_cert(make_cycle(5), {0});
    REQUIRE(rep.has_value());
    REQUIRE(rep->bound == 0);
  }
}

TEST_CASE("rank_lower_search") {
  REQUIRE(rank_lower_search(make_G_k(3)).bound == 2);
  REQUIRE(rank_lower_search(make_cycle(4)).bound == 0);
  REQUIRE(rank_lower_search(make_complete_bipartite(3, 3)).bound == 0);
  // C5 with S = {0,2}: (i) holds (S dominates), and (ii) reduces to S' = {}
  // whose critical graph is C5 itself, connected.  Both conditions hold, so
  // the checker reports bound 1 (matching nu-rank(C5) = 1).
  auto rep = rank_lower_search(make_cycle(5));
  REQUIRE(rep.bound == 1);
}

TEST_CASE("rank cross-check: G_k rank_lower_cert valid for k = 2, 3, 4") {
  for (int k = 2; k <= 4; ++k) {
    auto rep = rank_lower_cert(make_G_k(k), G_k_w_vertices(k));
    REQUIRE(rep.has_value());
    REQUIRE(rep->bound == k - 1);
  }
}

TEST_CASE("multiplier_theorem") {
  SECTION("K_1 gives x_0") {
    Graph k1 = make_complete(1);
    auto p = multiplier_theorem(k1, DVector{{1.0}});
    REQUIRE(p.degree() == 1);
    REQUIRE(p.coeff(Monomial{1}) == 1.0);
  }
  SECTION("C5 with all-ones: degree-6 product (sum x) prod_i (x_{i+2} + x_{i+3})") {
    Graph c5 = make_cycle(5);
    auto p = multiplier_theorem(c5, DVector{std::vector<double>(5, 1.0)});
    REQUIRE(p.degree() == 6);
    HomPoly expect = simplex_power(5, 1);
    for (int i = 0; i < 5; ++i) {
      HomPoly lin(5, 1);
      lin.add_term(unit_monomial(5, (i + 2) % 5), 1.0);
      lin.add_term(unit_monomial(5, (i + 3) % 5), 1.0);
      expect = multiply(expect, lin);
    }
    REQUIRE((p - expect).max_abs_coeff() < 1e-12);
  }
  SECTION("G_1 matches the C5 construction up to the labeling") {
    Graph g1 = make_G_k(1);
    auto p = multiplier_theorem(g1, DVector{std::vector<double>(5, 1.0)});
    REQUIRE(p.degree() == 6);
    REQUIRE(p.one_norm() ==
            Catch::Approx(multiplier_theorem(make_cycle(5), DVector{std::vector<double>(5, 1.0)})
                              .one_norm()));
  }
  SECTION("precondition failure names the offending set") {
    // C4 at d = all-ones: S = {0} has S^perp = {0,1,3}, remainder K1 rank 0; fine.
    // Use a graph whose remainder has positive rank: C5 + C5 with d on one side
    // keeps a C5 remainder (rank 1), so the theorem preconditions fail.
    Graph g = disjoint_union(make_cycle(5), make_cycle(5));
    DVector d{std::vector<double>(10, 0.0)};
    for (int v = 0; v < 5; ++v) d.d[v] = 1.0;
    REQUIRE_THROWS_AS(multiplier_theorem(g, d), PreconditionError);
  }
}

TEST_CASE("multiplier_imax") {
  SECTION("K_2: (x0 + x1)^3") {
    auto p = multiplier_imax(make_complete(2));
    REQUIRE(p.degree() == 3);
    REQUIRE(p.coeff(Monomial{3, 0}) == 1.0);
    REQUIRE(p.coeff(Monomial{2, 1}) == 3.0);
    REQUIRE(p.coeff(Monomial{1, 2}) == 3.0);
    REQUIRE(p.coeff(Monomial{0, 3}) == 1.0);
  }
  SECTION("single vertex: x_0 squared") {
    auto p = multiplier_imax(make_empty(1));
    REQUIRE(p.degree() == 2);
    REQUIRE(p.coeff(Monomial{2}) == 1.0);
  }
  SECTION("C5: direct expansion of the double product") {
    // m_emptyset^4 times, per maximum stable set U, m_emptyset * m_{i} * m_{i+2}
    // (m_U = 1 since U^perp = V), so the degree is 4 + 5 * 3 = 19.
    auto p = multiplier_imax(make_cycle(5));
    REQUIRE(p.degree() == 19);
    REQUIRE(is_nonneg_coeffs(p, 0.0));
  }
}

TEST_CASE("bound sandwich on small families") {
  for (const Graph& g : {make_cycle(5), make_cycle(6), make_star(3), make_graph_B()}) {
    const int a = alpha_exact(g);
    auto nu = nu_bound(g, 0);
    REQUIRE(nu.value >= a - 1e-6);
    REQUIRE(nu.value <= clique_cover_number(g) + 1e-6);
  }
}
