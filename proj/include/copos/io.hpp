#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "copos/bounds.hpp"
#include "copos/certificate.hpp"
#include "copos/cones.hpp"
#include "copos/graph.hpp"
#include "copos/poly.hpp"

namespace copos {

using nlohmann::json;

/// All serialized floats carry 12 significant digits.
inline json json_num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return json::parse(buf);
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  json out = {{"n", g.n()}, {"edges", edges}};
  if (!g.name().empty()) out["name"] = g.name();
  return out;
}

inline Graph graph_from_json(const json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Graph(j.at("n").get<int>(), std::move(edges), j.value("name", ""));
}

/// DIMACS edge format: "p edge n m" header, 1-indexed "e i j" lines.
inline Graph graph_from_dimacs(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    char kind;
    ls >> kind;
    if (kind == 'c') continue;
    if (kind == 'p') {
      std::string fmt;
      int m;
      ls >> fmt >> n >> m;
    } else if (kind == 'e') {
      int a, b;
      ls >> a >> b;
      edges.emplace_back(a - 1, b - 1);
    }
  }
  if (n < 0) throw std::invalid_argument("DIMACS: missing problem line");
  return Graph(n, std::move(edges));
}

inline std::string graph_to_dimacs(const Graph& g) {
  std::ostringstream os;
  os << "p edge " << g.n() << " " << g.edge_count() << "\n";
  for (auto [a, b] : g.edges()) os << "e " << a + 1 << " " << b + 1 << "\n";
  return os.str();
}

/// Auto-detects DIMACS vs JSON by the first non-space character.
inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  size_t pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && (text[pos] == '{')) return graph_from_json(json::parse(text));
  std::istringstream ss(text);
  return graph_from_dimacs(ss);
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

inline json matrix_to_json(const SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.n(); ++j) row.push_back(json_num(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline SymMatrix matrix_from_json(const json& j) {
  const int n = static_cast<int>(j.size());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double v = j.at(i).at(k).get<double>();
      if (k >= i) m.set(i, k, 0.5 * (v + j.at(k).at(i).get<double>()));
    }
  return m;
}

/// Plain text: first line n, then n whitespace-separated rows; or a JSON
/// array of arrays.
inline SymMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  size_t pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '[') return matrix_from_json(json::parse(text));
  std::istringstream ss(text);
  int n;
  ss >> n;
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v;
      if (!(ss >> v)) throw std::invalid_argument("matrix text: not enough entries");
      if (j >= i) m.set(i, j, v);
    }
  return m;
}

inline std::string matrix_to_text(const SymMatrix& m) {
  std::ostringstream os;
  os << m.n() << "\n";
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) os << (j ? " " : "") << json_num(m(i, j)).dump();
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Polynomials and certificates
// ---------------------------------------------------------------------------

inline json poly_to_json(const HomPoly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back({{"exp", m}, {"c", json_num(c)}});
  return {{"nvars", p.nvars()}, {"degree", p.degree()}, {"terms", terms}};
}

inline HomPoly poly_from_json(const json& j) {
  HomPoly p(j.at("nvars").get<int>(), j.at("degree").get<int>());
  for (const auto& t : j.at("terms"))
    p.add_term(t.at("exp").get<Monomial>(), t.at("c").get<double>());
  return p;
}

inline json certificate_to_json(const SosCertificate& c) {
  json gram = json::array();
  for (const auto& [beta, P] : c.gram_blocks) gram.push_back({{"beta", beta}, {"P", matrix_to_json(P)}});
  json cs = json::array();
  for (const auto& [a, v] : c.squarefree_coeffs) cs.push_back({{"A", a}, {"value", json_num(v)}});
  json out = {{"r", c.level},
              {"nvars", c.nvars},
              {"multiplier", poly_to_json(c.multiplier)},
              {"gram", gram},
              {"c", cs}};
  if (!c.sos_blocks.empty()) {
    json sos = json::array();
    for (const auto& [beta, blk] : c.sos_blocks)
      sos.push_back({{"beta", beta},
                     {"basis_degree", blk.basis_degree},
                     {"G", matrix_to_json(blk.gram)}});
    out["sos"] = sos;
  }
  return out;
}

inline SosCertificate certificate_from_json(const json& j) {
  SosCertificate c;
  c.level = j.at("r").get<int>();
  c.nvars = j.at("nvars").get<int>();
  c.multiplier = poly_from_json(j.at("multiplier"));
  for (const auto& g : j.at("gram"))
    c.gram_blocks.emplace(g.at("beta").get<Monomial>(), matrix_from_json(g.at("P")));
  for (const auto& e : j.at("c"))
    c.squarefree_coeffs.emplace(e.at("A").get<Monomial>(), e.at("value").get<double>());
  if (j.contains("sos"))
    for (const auto& s : j.at("sos"))
      c.sos_blocks.emplace(s.at("beta").get<Monomial>(),
                           SosCertificate::SosBlock{s.at("basis_degree").get<int>(),
                                                    matrix_from_json(s.at("G"))});
  return c;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

inline const char* membership_name(Membership m) {
  switch (m) {
    case Membership::Member: return "member";
    case Membership::NotMember: return "not_member";
    default: return "unknown";
  }
}

inline json bound_to_json(const BoundResult& b, bool include_certificate = false) {
  json trace = json::array();
  for (const auto& p : b.trace)
    trace.push_back({{"t", json_num(p.t)}, {"verdict", membership_name(p.verdict)}});
  json out = {{"hierarchy", b.hierarchy}, {"r", b.level},
              {"value", json_num(b.value)}, {"t_tol", json_num(b.t_tol)},
              {"verified", b.verified},    {"trace", trace}};
  if (include_certificate && b.certificate) out["certificate"] = certificate_to_json(*b.certificate);
  return out;
}

inline json rank_report_to_json(const RankReport& r) {
  json out = {{"kind", r.kind == RankReport::Kind::Lower ? "lower" : "upper"},
              {"bound", r.bound},
              {"method", r.method},
              {"verified", r.verified}};
  if (r.witness_set) out["witness_set"] = *r.witness_set;
  if (r.witness_d) {
    json d = json::array();
    for (double v : r.witness_d->d) d.push_back(json_num(v));
    out["witness_d"] = d;
  }
  if (!r.detail.empty()) out["detail"] = r.detail;
  return out;
}

inline json verify_report_to_json(const VerifyReport& r) {
  return {{"residual_inf", json_num(r.residual_inf)},
          {"min_gram_eig", json_num(r.min_gram_eig)},
          {"min_c", json_num(r.min_c)},
          {"pass", r.pass}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << content;
}

}  // namespace copos
