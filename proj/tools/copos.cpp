// Command-line surface: graph generation, bounds, cone membership queries,
// copositivity tests, certificate verification, and scripted reproduction of
// the library's reference computations.
//
// Exit codes: 0 success, 1 usage error, 2 not-member/infeasible where the
// query expected membership, 3 solver unknown, 4 resource cap exceeded.

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <random>

#include "copos/bounds.hpp"
#include "copos/common.hpp"
#include "copos/cones.hpp"
#include "copos/copositivity.hpp"
#include "copos/io.hpp"

using namespace copos;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotMember = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitResource = 4;

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text_file(out_path, j.dump(2) + "\n");
  }
}

Graph make_family(const std::string& family, int k, int a, int b, const std::string& g1,
                  const std::string& g2) {
  if (family == "cycle") return make_cycle(k);
  if (family == "complete") return make_complete(k);
  if (family == "empty") return make_empty(k);
  if (family == "complete_bipartite") return make_complete_bipartite(a, b);
  if (family == "star") return make_star(k);
  if (family == "graph_B") return make_graph_B();
  if (family == "graph_C") return make_graph_C();
  if (family == "G_k") return make_G_k(k);
  if (family == "L_k") return make_L_k(k);
  if (family == "L_k_prime") return make_L_k(k, /*prime=*/true);
  if (family == "icosahedron") return make_icosahedron();
  if (family == "disjoint_union") {
    if (g1.empty() || g2.empty())
      throw CLI::ValidationError("disjoint_union needs --g1 and --g2");
    return disjoint_union(load_graph(g1), load_graph(g2));
  }
  throw CLI::ValidationError("unknown family: " + family);
}

json solver_settings_json(const SolveOptions& s) {
  return {{"feas_tol", json_num(s.feas_tol)},
          {"psd_tol", json_num(s.psd_tol)},
          {"time_limit_sec", json_num(s.time_limit_sec)}};
}

// ---------------------------------------------------------------------------
// reproduce experiments
// ---------------------------------------------------------------------------

struct ExperimentReport {
  json data = json::object();
  std::string markdown;
  bool pass = true;

  void check(const std::string& name, bool ok, const json& detail = {}) {
    pass &= ok;
    data["checks"].push_back({{"name", name}, {"pass", ok}, {"detail", detail}});
    markdown += "| " + name + " | " + (ok ? "pass" : "FAIL") + " |\n";
  }
};

ExperimentReport run_horn(const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## horn\n\n| check | result |\n|---|---|\n";
  SymMatrix horn = m_matrix(make_cycle(5), 2.0);
  MembershipOptions mo;
  mo.solver = solver;
  auto q1 = q_membership(horn, 1, mo);
  double resid = q1.certificate ? verify(horn, *q1.certificate).residual_inf : 1.0;
  rep.check("Q1 member", q1.status == Membership::Member, membership_name(q1.status));
  rep.check("Q1 verify residual <= 1e-6", resid <= 1e-6, json_num(resid));
  auto q0 = q_membership(horn, 0, mo);
  rep.check("Q0 not_member", q0.status == Membership::NotMember, membership_name(q0.status));
  auto split = q0_split(horn, mo);
  rep.check("q0_split not_member", split.status == Membership::NotMember,
            membership_name(split.status));
  return rep;
}

ExperimentReport run_icosahedron(const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## icosahedron\n\n| check | result |\n|---|---|\n";
  Graph g = make_icosahedron();
  BoundOptions bo;
  bo.solver = solver;
  auto n0 = nu_bound(g, 0, bo);
  auto n1 = nu_bound(g, 1, bo);
  auto n2 = nu_bound(g, 2, bo);
  auto nt1 = nu_tilde_bound(g, 1, bo);
  rep.data["nu0"] = bound_to_json(n0);
  rep.data["nu1"] = bound_to_json(n1);
  rep.data["nu2"] = bound_to_json(n2);
  rep.data["nutilde1"] = bound_to_json(nt1);
  rep.check("nu0 ~ 3.2361", std::abs(n0.value - 3.2360679775) <= 5e-3, json_num(n0.value));
  rep.check("nu1 ~ 3.2361", std::abs(n1.value - 3.2360679775) <= 5e-3, json_num(n1.value));
  rep.check("nu2 = 3", std::abs(n2.value - 3.0) <= 1e-3, json_num(n2.value));
  rep.check("nutilde1 = nu1 (vertex-transitive)", std::abs(nt1.value - n1.value) <= 2e-3,
            json_num(nt1.value));
  return rep;
}

ExperimentReport run_bc(const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## graphs B and C\n\n| check | result |\n|---|---|\n";
  BoundOptions bo;
  bo.solver = solver;
  MembershipOptions mo;
  mo.solver = solver;
  for (auto [g, marked] : {std::pair{make_graph_B(), graph_B_marked()},
                           std::pair{make_graph_C(), graph_C_marked()}}) {
    const std::string tag = g.name();
    const int a = alpha_exact(g);
    rep.data[tag]["alpha"] = a;
    rep.check(tag + " alpha = 3", a == 3, a);
    rep.check(tag + " rank0 false", !rank0_test(g, solver));
    auto q1 = q_membership(m_matrix(g, a), 1, mo);
    rep.check(tag + " M_alpha not in Q1", q1.status == Membership::NotMember,
              membership_name(q1.status));
    auto qt = qtilde_membership(m_matrix(g, a + 1e-3), 1, mo);
    rep.check(tag + " M_{alpha+1e-3} in Qtilde1", qt.status == Membership::Member,
              membership_name(qt.status));
    auto r1 = rank1_sufficient(g, marked, solver);
    rep.check(tag + " rank1_sufficient(marked)", r1.has_value());
  }
  return rep;
}

ExperimentReport run_gk(int k, const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## G_" + std::to_string(k) + "\n\n| check | result |\n|---|---|\n";
  Graph g = make_G_k(k);
  const int a = alpha_exact(g);
  rep.data["n"] = g.n();
  rep.data["alpha"] = a;
  rep.check("alpha = k+1", a == k + 1, a);
  auto low = rank_lower_cert(g, G_k_w_vertices(k));
  rep.check("lower cert on {w_i} gives k-1", low && low->bound == k - 1,
            low ? low->bound : -1);
  auto up = rank1_sufficient(g, G_k_uv_vertices(k), solver);
  rep.check("rank1_sufficient on {u_*, v_*}", up.has_value());
  BoundOptions bo;
  bo.solver = solver;
  auto nt = nu_tilde_bound(g, 1, bo);
  rep.data["nutilde1"] = bound_to_json(nt);
  rep.check("nutilde1 = alpha", std::abs(nt.value - a) <= 1e-3, json_num(nt.value));
  return rep;
}

ExperimentReport run_lk(int k, const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## L_" + std::to_string(k) + "\n\n| check | result |\n|---|---|\n";
  Graph g = make_L_k(k);
  const int a = alpha_exact(g);
  rep.data["n"] = g.n();
  rep.data["alpha"] = a;
  rep.check("alpha = k", a == k, a);
  auto low = rank_lower_cert(g, L_k_s_vertices(k));
  rep.check("lower cert on {s_i} gives k-1", low && low->bound == k - 1, low ? low->bound : -1);
  BoundOptions bo;
  bo.solver = solver;
  auto nt = nu_tilde_bound(g, 1, bo);
  rep.data["nutilde1"] = bound_to_json(nt);
  rep.check("nutilde1 = alpha", std::abs(nt.value - a) <= 1e-3, json_num(nt.value));
  return rep;
}

ExperimentReport run_star_zeta(const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## star-zeta\n\n| check | result |\n|---|---|\n";
  MembershipOptions mo;
  mo.solver = solver;
  for (int n : {2, 3, 4}) {
    Graph t = make_star(n);
    for (int r = 0; r <= 4; ++r) {
      auto v = ctilde_membership(m_matrix(t, n), r, mo);
      rep.check("T_" + std::to_string(n) + " at t=alpha not in Ctilde r=" + std::to_string(r),
                v.status == Membership::NotMember, membership_name(v.status));
    }
  }
  BoundOptions bo;
  bo.solver = solver;
  json vals = json::array();
  for (int r = 0; r <= 4; ++r) {
    auto zt = zeta_bounds(make_star(3), r, /*fixed_multiplier=*/false, bo);
    vals.push_back(bound_to_json(zt));
  }
  rep.data["zetatilde_T3"] = vals;
  return rep;
}

ExperimentReport run_cop4_agreement(const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## cop4-agreement\n\n| check | result |\n|---|---|\n";
  std::mt19937 rng(20240901);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  MembershipOptions mo;
  mo.solver = solver;
  const double margin = 0.05;
  auto definite = [&](const SymMatrix& m) -> std::optional<bool> {
    // copositive with margin: M - margin I copositive; the opposite with margin:
    // M + margin I not copositive
    auto lo = brute_oracle(m.shifted(-margin), 40, 400000);
    if (lo.verdict == CopVerdict::Copositive) return true;
    auto hi = brute_oracle(m.shifted(margin), 40, 400000);
    if (hi.verdict == CopVerdict::NotCopositive) return false;
    return std::nullopt;
  };
  int tested4 = 0, agreed4 = 0;
  while (tested4 < 50) {
    SymMatrix m(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) m.set(i, j, unif(rng));
    auto truth = definite(m);
    if (!truth) continue;
    ++tested4;
    auto split = q0_split(m, mo);
    bool says_cop = split.status == Membership::Member;
    if (says_cop == *truth) ++agreed4;
  }
  rep.check("4x4: q0_split agrees with oracle on 50 margin-definite samples", agreed4 == 50,
            agreed4);
  int tested5 = 0, agreed5 = 0;
  while (tested5 < 50) {
    SymMatrix m(5);
    for (int i = 0; i < 5; ++i)
      for (int j = i; j < 5; ++j) m.set(i, j, unif(rng));
    auto truth = definite(m);
    if (!truth) continue;
    ++tested5;
    auto c5 = cop5_test(m, 1e-6, solver);
    bool says_cop = c5.verdict == CopVerdict::Copositive;
    if (c5.verdict != CopVerdict::Unknown && says_cop == *truth) ++agreed5;
  }
  rep.check("5x5: cop5_test agrees with oracle on 50 margin-definite samples", agreed5 == 50,
            agreed5);
  return rep;
}

ExperimentReport run_nonconvexity(const SolveOptions& solver) {
  ExperimentReport rep;
  rep.markdown = "## nonconvexity\n\n| check | result |\n|---|---|\n";
  MembershipOptions mo;
  mo.solver = solver;
  SymMatrix horn = m_matrix(make_cycle(5), 2.0);
  SymMatrix z5(5);
  auto a = qtilde_membership(SymMatrix::block_diag(horn, z5), 1, mo);
  auto b = qtilde_membership(SymMatrix::block_diag(z5, horn), 1, mo);
  auto c = qtilde_membership(SymMatrix::block_diag(horn, horn), 1, mo);
  rep.check("H ++ 0 in Qtilde1", a.status == Membership::Member, membership_name(a.status));
  rep.check("0 ++ H in Qtilde1", b.status == Membership::Member, membership_name(b.status));
  rep.check("H ++ H not in Qtilde1", c.status == Membership::NotMember,
            membership_name(c.status));
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"copositive-programming bounds on graph stability numbers"};
  app.require_subcommand(1);

  SolveOptions solver = SolveOptions::defaults();
  app.add_option("--feas-tol", solver.feas_tol, "solver equality tolerance");
  app.add_option("--time-limit", solver.time_limit_sec, "per-solve time limit (s)");
  int jobs = 1;
  app.add_option("--jobs", jobs, "parallelism hint for searches (reserved)");

  std::string out_path;
  app.add_option("-o,--output", out_path, "output file (default stdout)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a named graph family");
  std::string family, g1_path, g2_path;
  int fk = 5, fa = 2, fb = 2;
  bool gen_dimacs = false;
  gen->add_option("--family", family, "family name")->required();
  gen->add_option("--k,--n", fk, "size parameter");
  gen->add_option("--a", fa, "first part size");
  gen->add_option("--b", fb, "second part size");
  gen->add_option("--g1", g1_path, "first graph file (disjoint_union)");
  gen->add_option("--g2", g2_path, "second graph file (disjoint_union)");
  gen->add_flag("--dimacs", gen_dimacs, "emit DIMACS instead of JSON");

  // alpha
  auto* alpha_cmd = app.add_subcommand("alpha", "exact stability number");
  std::string graph_path;
  alpha_cmd->add_option("-g,--graph", graph_path, "graph file")->required();

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "hierarchy bound on alpha(G)");
  std::string hierarchy = "nu";
  int level = 0;
  double t_tol = 1e-4;
  bound_cmd->add_option("--hierarchy", hierarchy, "nu|nutilde|zeta|zetatilde|theta")->required();
  bound_cmd->add_option("--r", level, "hierarchy level")->required();
  bound_cmd->add_option("-g,--graph", graph_path, "graph file")->required();
  bound_cmd->add_option("--t-tol", t_tol, "binary search tolerance");
  bool with_cert = false;
  bound_cmd->add_flag("--certificate", with_cert, "embed the certificate in the output");

  // membership
  auto* mem_cmd = app.add_subcommand("membership", "cone membership query");
  std::string cone = "Q", matrix_path;
  double margin = 0.0;
  mem_cmd->add_option("--cone", cone, "Q|Qtilde|K|C|Ctilde|Q0")->required();
  mem_cmd->add_option("--r", level, "level");
  mem_cmd->add_option("-m,--matrix", matrix_path, "matrix file")->required();
  mem_cmd->add_option("--margin", margin, "identity shift applied before the test");

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "nu-rank / nutilde-rank bounds");
  bool rank_lower = false, rank_upper = false;
  int size_cap = 6;
  rank_cmd->add_flag("--lower", rank_lower, "lower bound via critical-edge certificates");
  rank_cmd->add_flag("--upper", rank_upper, "upper bound via rank0/rank1/recursion");
  rank_cmd->add_option("-g,--graph", graph_path, "graph file")->required();
  rank_cmd->add_option("--size-cap", size_cap, "stable-set size cap for the lower search");

  // cop5
  auto* cop5_cmd = app.add_subcommand("cop5", "exact 5x5 copositivity test");
  cop5_cmd->add_option("-m,--matrix", matrix_path, "matrix file")->required();
  cop5_cmd->add_option("--margin", margin, "boundary margin");

  // copositive
  auto* cop_cmd = app.add_subcommand("copositive", "sufficient copositivity test (Qtilde level)");
  cop_cmd->add_option("-m,--matrix", matrix_path, "matrix file")->required();
  cop_cmd->add_option("--r", level, "level");
  cop_cmd->add_option("--margin", margin, "identity shift");

  // verify-cert
  auto* ver_cmd = app.add_subcommand("verify-cert", "verify a stored certificate");
  std::string cert_path;
  ver_cmd->add_option("-m,--matrix", matrix_path, "matrix file")->required();
  ver_cmd->add_option("-c,--cert", cert_path, "certificate file")->required();

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "scripted reference computations");
  std::string experiment;
  int exp_k = 2;
  rep_cmd->add_option("--experiment", experiment,
                      "horn|icosahedron|bc|gk|lk|star-zeta|cop4-agreement|nonconvexity")
      ->required();
  rep_cmd->add_option("--k", exp_k, "family parameter for gk / lk");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Graph g = make_family(family, fk, fa, fb, g1_path, g2_path);
      if (gen_dimacs) {
        if (out_path.empty())
          std::cout << graph_to_dimacs(g);
        else
          write_text_file(out_path, graph_to_dimacs(g));
      } else {
        emit(graph_to_json(g), out_path);
      }
      return kExitOk;
    }
    if (*alpha_cmd) {
      Graph g = load_graph(graph_path);
      emit({{"n", g.n()}, {"alpha", alpha_exact(g)}}, out_path);
      return kExitOk;
    }
    if (*bound_cmd) {
      Graph g = load_graph(graph_path);
      BoundOptions bo;
      bo.solver = solver;
      bo.t_tol = t_tol;
      BoundResult r;
      if (hierarchy == "nu")
        r = nu_bound(g, level, bo);
      else if (hierarchy == "theta")
        r = theta_bound(g, level, bo);
      else if (hierarchy == "nutilde")
        r = nu_tilde_bound(g, level, bo);
      else if (hierarchy == "zeta")
        r = zeta_bounds(g, level, /*fixed_multiplier=*/true, bo);
      else if (hierarchy == "zetatilde")
        r = zeta_bounds(g, level, /*fixed_multiplier=*/false, bo);
      else
        throw CLI::ValidationError("unknown hierarchy: " + hierarchy);
      json j = bound_to_json(r, with_cert);
      j["solver"] = solver_settings_json(solver);
      emit(j, out_path);
      return r.verified ? kExitOk : kExitUnknown;
    }
    if (*mem_cmd) {
      SymMatrix m = load_matrix(matrix_path);
      MembershipOptions mo;
      mo.margin = margin;
      mo.solver = solver;
      Membership status;
      json j;
      if (cone == "Q0") {
        auto split = q0_split(m, mo);
        status = split.status;
        j["status"] = membership_name(status);
        if (status == Membership::Member) {
          j["psd_part"] = matrix_to_json(split.psd_part);
          j["nonneg_part"] = matrix_to_json(split.nonneg_part);
        }
      } else {
        MembershipVerdict v;
        if (cone == "Q")
          v = q_membership(m, level, mo);
        else if (cone == "Qtilde")
          v = qtilde_membership(m, level, mo);
        else if (cone == "K")
          v = k_membership(m, level, mo);
        else if (cone == "C")
          v = c_membership(m, level, mo);
        else if (cone == "Ctilde")
          v = ctilde_membership(m, level, mo);
        else
          throw CLI::ValidationError("unknown cone: " + cone);
        status = v.status;
        j["status"] = membership_name(status);
        j["message"] = v.message;
        if (v.certificate) {
          j["certificate"] = certificate_to_json(*v.certificate);
          j["verify"] = verify_report_to_json(verify(m.shifted(margin), *v.certificate));
        }
      }
      j["margin"] = json_num(margin);
      emit(j, out_path);
      if (status == Membership::Member) return kExitOk;
      return status == Membership::NotMember ? kExitNotMember : kExitUnknown;
    }
    if (*rank_cmd) {
      if (rank_lower == rank_upper) throw CLI::ValidationError("pass exactly one of --lower/--upper");
      Graph g = load_graph(graph_path);
      json j;
      if (rank_lower) {
        j = rank_report_to_json(rank_lower_search(g, size_cap));
      } else {
        json reports = json::array();
        RankReport best;
        best.bound = -1;
        if (rank0_test(g, solver)) {
          best.kind = RankReport::Kind::Upper;
          best.bound = 0;
          best.method = "rank0";
        } else if (auto r1 = rank1_sufficient(g, std::nullopt, solver)) {
          best = *r1;
        } else {
          DVector ones;
          ones.d.assign(g.n(), 1.0);
          best = rank_recursive_upper(g, ones, solver);
        }
        for (const auto& rr : rank_formula_bounds(g, solver)) {
          reports.push_back(rank_report_to_json(rr));
          if (rr.bound < best.bound) best = rr;
        }
        j = rank_report_to_json(best);
        j["formula_bounds"] = reports;
      }
      emit(j, out_path);
      return kExitOk;
    }
    if (*cop5_cmd) {
      SymMatrix m = load_matrix(matrix_path);
      auto r = cop5_test(m, margin > 0 ? margin : 1e-6, solver);
      json j = {{"verdict", r.verdict == CopVerdict::Copositive      ? "copositive"
                            : r.verdict == CopVerdict::NotCopositive ? "not_copositive"
                                                                     : "unknown"},
                {"message", r.message}};
      emit(j, out_path);
      return r.verdict == CopVerdict::Copositive      ? kExitOk
             : r.verdict == CopVerdict::NotCopositive ? kExitNotMember
                                                      : kExitUnknown;
    }
    if (*cop_cmd) {
      SymMatrix m = load_matrix(matrix_path);
      MembershipOptions mo;
      mo.margin = margin;
      mo.solver = solver;
      auto r = cop_inner_test(m, level, mo);
      json j = {{"verdict", r.verdict == CopVerdict::Copositive ? "copositive" : "unknown"},
                {"message", r.message}};
      emit(j, out_path);
      return r.verdict == CopVerdict::Copositive ? kExitOk : kExitUnknown;
    }
    if (*ver_cmd) {
      SymMatrix m = load_matrix(matrix_path);
      std::ifstream in(cert_path);
      if (!in) throw std::runtime_error("cannot open certificate: " + cert_path);
      SosCertificate cert = certificate_from_json(json::parse(in));
      VerifyReport r = verify(m, cert);
      emit(verify_report_to_json(r), out_path);
      return r.pass ? kExitOk : kExitNotMember;
    }
    if (*rep_cmd) {
      ExperimentReport rep;
      if (experiment == "horn")
        rep = run_horn(solver);
      else if (experiment == "icosahedron")
        rep = run_icosahedron(solver);
      else if (experiment == "bc")
        rep = run_bc(solver);
      else if (experiment == "gk")
        rep = run_gk(exp_k, solver);
      else if (experiment == "lk")
        rep = run_lk(exp_k, solver);
      else if (experiment == "star-zeta")
        rep = run_star_zeta(solver);
      else if (experiment == "cop4-agreement")
        rep = run_cop4_agreement(solver);
      else if (experiment == "nonconvexity")
        rep = run_nonconvexity(solver);
      else
        throw CLI::ValidationError("unknown experiment: " + experiment);
      rep.data["experiment"] = experiment;
      rep.data["version"] = kVersion;
      rep.data["solver"] = solver_settings_json(solver);
      rep.data["pass"] = rep.pass;
      std::cout << rep.markdown << "\n";
      if (!out_path.empty()) write_text_file(out_path, rep.data.dump(2) + "\n");
      else std::cout << rep.data.dump(2) << "\n";
      return rep.pass ? kExitOk : kExitNotMember;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitResource;
  } catch (const SolverError& e) {
    std::cerr << "solver: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
