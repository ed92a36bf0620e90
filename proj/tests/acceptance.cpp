// Acceptance harness: one line per criterion, argv[1] = repository root.
#include "gkm/pipeline.hpp"
#include "gkm/runconfig.hpp"
#include "gkm/toml_lite.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace gkm;
using nlohmann::json;

namespace {

std::string g_root;

std::vector<long long> trimmed(std::vector<long long> v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
  return v;
}

std::vector<long long> poly_mul(const std::vector<long long>& a,
                                const std::vector<long long>& b) {
  std::vector<long long> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<long long> degree_counts(const std::vector<int>& degs) {
  std::vector<long long> out;
  for (int d : degs) {
    if ((int)out.size() <= d) out.resize(d + 1, 0);
    ++out[d];
  }
  return out;
}

/// Split the golden file into [[row]] blocks and keep those matching `keep`.
std::string filter_golden(const std::function<bool(const std::string&)>& keep) {
  std::ifstream in(g_root + "/data/golden_tables.toml");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  std::string out;
  std::size_t pos = text.find("[[row]]");
  while (pos != std::string::npos) {
    std::size_t next = text.find("[[row]]", pos + 1);
    std::string block = text.substr(pos, next == std::string::npos
                                             ? std::string::npos
                                             : next - pos);
    if (keep(block)) out += block;
    pos = next;
  }
  return out;
}

int verify_subset(const std::string& name, const std::string& toml_text) {
  std::string path =
      (std::filesystem::temp_directory_path() / ("accept_" + name + ".toml"))
          .string();
  std::ofstream(path) << toml_text;
  RunConfig cfg;
  cfg.command = "verify";
  cfg.path = path;
  std::ostringstream out, err;
  int rc = run_command(cfg, out, err);
  if (rc != 0) std::cerr << out.str() << err.str();
  return rc;
}

bool mandatory_regular_rows() {
  return verify_subset("regular", filter_golden([](const std::string& b) {
           return b.find("tier = \"mandatory\"") != std::string::npos &&
                  b.find("weyl = false") != std::string::npos;
         })) == 0;
}

bool mandatory_weyl_rows() {
  return verify_subset("weyl", filter_golden([](const std::string& b) {
           return b.find("tier = \"mandatory\"") != std::string::npos &&
                  b.find("weyl = true") != std::string::npos;
         })) == 0;
}

bool freeness_verdicts() {
  for (const std::string& key : {"A2", "B2", "G2"}) {
    PipelineRequest req;
    req.group = key;
    for (const OrbitRow& o : table_row(req).orbits)
      if (o.cert.verdict != FreenessCertificate::Verdict::Free) return false;
  }
  PipelineRequest req;
  req.group = "A3";
  int notfree = 0;
  for (const OrbitRow& o : table_row(req).orbits) {
    if (o.cert.verdict != FreenessCertificate::Verdict::NotFree) continue;
    ++notfree;
    // 2t^7 + 4t^8 + 2t^9 + t^10 + t^11 - t^12 - t^13
    if (trimmed(o.numerator) !=
        std::vector<long long>({0, 0, 0, 0, 0, 0, 0, 2, 4, 2, 1, 1, -1, -1}))
      return false;
  }
  return notfree == 1;
}

bool rank_one_closed_forms() {
  for (int g = 1; g <= 3; ++g) {
    for (const std::string& key : {"SO3", "U2"}) {
      PipelineRequest req;
      req.group = key;
      req.g = g;
      if (trimmed(table_row(req).total) != closed_form_rank_one(key, "regular", g))
        return false;
    }
  }
  // SO(3) non-regular rows (invariants relative to P_t(BK))
  for (int g = 1; g <= 2; ++g) {
    PipelineRequest req;
    req.group = "SO3";
    req.weyl = true;
    req.g = g;
    req.c = "identity";
    if (trimmed(table_row(req).total) != closed_form_rank_one("SO3", "identity", g))
      return false;
    req.c = "c180";
    if (trimmed(table_row(req).total) != closed_form_rank_one("SO3", "central", g))
      return false;
  }
  return true;
}

json run_sheaf(const std::string& rel) {
  RunConfig cfg;
  cfg.command = "sheaf";
  cfg.path = g_root + "/data/" + rel;
  std::ostringstream out, err;
  if (run_command(cfg, out, err) != 0) {
    std::cerr << err.str();
    return json();
  }
  return json::parse(out.str());
}

bool sheaf_fixtures() {
  json toric = run_sheaf("sheaf_toric_s2.json");
  if (toric.is_null() ||
      toric.at("numerator").get<std::vector<long long>>() !=
          std::vector<long long>({1, 0, 1}))
    return false;
  for (int r : {2, 4, 8}) {
    json fp = run_sheaf("sheaf_franz_puppe_r" + std::to_string(r) + ".json");
    if (fp.is_null()) return false;
    std::vector<long long> want(3 * r + 2, 0);
    want[0] = want[r - 1] = want[2 * r + 2] = want[3 * r + 1] = 1;
    if (fp.at("numerator").get<std::vector<long long>>() != want) return false;
  }
  json bm = run_sheaf("sheaf_bm_single_edge.json");
  if (bm.is_null() ||
      bm.at("generator_degrees").get<std::vector<int>>() !=
          std::vector<int>({0, 2}) ||
      bm.at("numerator").get<std::vector<long long>>() !=
          std::vector<long long>({1, 0, 1}))
    return false;
  return true;
}

bool prop_free_numerators_and_tensor_powers() {
  for (const std::string& key : {"A2", "B2", "G2"}) {
    RootDatum d = build_datum(key);
    for (const CharOrbit& o : char_table(d).orbits) {
      SectionData s1 = sections_f1_chi(d, o.rep, default_truncation(d, 1));
      if (s1.cert.verdict != FreenessCertificate::Verdict::Free) return false;
      std::vector<long long> n1 = trimmed(s1.numerator.coeffs);
      if (n1 != degree_counts(s1.cert.generator_degrees)) return false;
      std::vector<long long> sq = poly_mul(n1, n1);
      SectionData s2 = sections_fg_chi(d, o.rep, 2, (int)sq.size() + 4);
      if (s2.cert.verdict != FreenessCertificate::Verdict::Free) return false;
      if (trimmed(s2.numerator.coeffs) != trimmed(sq)) return false;
      if (trimmed(s2.numerator.coeffs) !=
          degree_counts(s2.cert.generator_degrees))
        return false;
    }
  }
  return true;
}

GradedElement roots_product(const RootDatum& d) {
  AmbientSpec poly(d.rank, 0, d.labels);
  GradedElement acc;
  for (int ri = 0; ri < d.num_pos_roots(); ++ri) {
    GradedElement a;
    a.spec = poly;
    a.degree = 2;
    for (int i = 0; i < d.rank; ++i) {
      if (!d.pos_roots[ri][i]) continue;
      Mono m;
      m.exp.assign(d.rank, 0);
      m.exp[i] = 1;
      a.add_term(m, Rat((long)d.pos_roots[ri][i]));
    }
    acc = ri == 0 ? a : multiply(acc, a);
  }
  return acc;
}

bool prop_duality(bool full, std::map<std::string, int> tops) {
  for (auto& [key, top] : tops) {
    RootDatum d = build_datum(key);
    GradedElement dpoly = roots_product(d);
    int D = default_truncation(d, 1);
    for (const CharOrbit& o : char_table(d).orbits) {
      SectionData s = sections_f1_chi(d, o.rep, D);
      DualityReport r = duality_pairing_check(s.module, dpoly, D);
      if (!r.containment) return false;
      if (full && o.rep == Char(d.t2_rank, 0)) {
        if (!r.unipotent || !r.nondegenerate) return false;
        if (r.top_degree != top) return false;
      }
    }
  }
  return true;
}

bool prop_weyl_equivariance() {
  for (const std::string& key : {"A2", "B2"}) {
    RootDatum d = build_datum(key);
    AmbientSpec spec = d.ambient(1);
    std::vector<WeylElement> gens;
    for (const WeylElement& w : weyl_elements(d))
      for (const Matrix& gm : d.weyl_gens)
        if (w.on_tstar == gm) gens.push_back(w);
    if (gens.size() != d.weyl_gens.size()) return false;
    int D = 8;
    std::map<Char, SectionData> sec;
    for (const CharOrbit& o : char_table(d).orbits)
      for (const Char& c : o.members) sec.emplace(c, sections_f1_chi(d, c, D));
    for (const WeylElement& w : gens)
      for (auto& [c, s] : sec) {
        const SectionData& tgt = sec.at(char_apply(w, c));
        for (int dd = 0; dd <= D; ++dd) {
          Matrix sm = substitution_matrix(spec, dd, {w.on_tstar, false});
          if (!(column_space_basis(sm.mul(s.slices[dd])) == tgt.slices[dd]))
            return false;
        }
      }
  }
  return true;
}

bool prop_slice_oracle() {
  std::mt19937 rng(616);
  int done = 0;
  while (done < 100) {
    int g = done % 2;
    AmbientSpec spec(2, g);
    BlockSpace space = BlockSpace::single(spec);
    Submodule m;
    m.space = space;
    std::uniform_int_distribution<int> ngen(1, 3), dg(0, 4), c(-2, 2);
    int n = ngen(rng);
    for (int i = 0; i < n; ++i) {
      int deg = dg(rng);
      SliceTable st = slice_table(space, deg);
      std::vector<Rat> coords(st.dim);
      for (auto& x : coords) x = Rat(c(rng));
      SpaceElement e = element_from_dense(space, st, coords);
      if (!e.is_zero()) m.gens.push_back(e);
    }
    if (m.gens.empty()) continue;
    for (int d = 0; d <= 8; d += 2) {
      // oracle: raw spanning columns, independently canonicalized
      SliceTable st = slice_table(space, d);
      std::vector<std::vector<Rat>> cols;
      for (const SpaceElement& gen : m.gens) {
        if (gen.degree > d || (d - gen.degree) % 2 != 0) continue;
        for (const auto& q : sym_monomials(2, (d - gen.degree) / 2)) {
          SpaceElement prod = gen;
          for (STerm& t : prod.terms)
            for (int i = 0; i < 2; ++i) t.m.exp[i] += q[i];
          prod.degree = d;
          prod.normalize();
          cols.push_back(element_dense(prod, st));
        }
      }
      Matrix raw(st.dim, cols.size());
      for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < st.dim; ++i) raw.at(i, j) = cols[j][i];
      if (!(column_space_basis(raw) == degree_slice(m, d))) return false;
    }
    ++done;
  }
  return true;
}

bool property_suites() {
  return prop_free_numerators_and_tensor_powers() &&
         prop_duality(true, {{"A2", 8}, {"B2", 10}, {"G2", 14}}) &&
         prop_weyl_equivariance() && prop_slice_oracle();
}

bool determinism() {
  for (const std::string& cmd : {"compute", "sheaf"}) {
    std::string first;
    for (int w : {1, 3}) {
      RunConfig cfg;
      cfg.command = cmd;
      cfg.group = "B2";
      cfg.path = g_root + "/data/sheaf_franz_puppe_r2.json";
      cfg.workers = w;
      std::ostringstream out, err;
      if (run_command(cfg, out, err) != 0) return false;
      if (first.empty())
        first = out.str();
      else if (first != out.str())
        return false;
    }
  }
  return true;
}

} // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <repo-root>\n";
    return 2;
  }
  g_root = argv[1];
  bool all = true;
  auto report = [&](int n, const std::string& what, bool ok) {
    std::cout << "criterion " << n << " (" << what << "): "
              << (ok ? "PASS" : "FAIL") << std::endl;
    if (!ok) all = false;
  };
  report(1, "regular-c mandatory rows", mandatory_regular_rows());
  report(2, "Weyl-invariants mandatory rows", mandatory_weyl_rows());
  report(3, "freeness verdicts", freeness_verdicts());
  report(4, "rank-one closed forms", rank_one_closed_forms());
  report(5, "generic-sheaf fixtures", sheaf_fixtures());
  report(6, "property suites", property_suites());
  std::cout << "criterion 7 (extended tier): SKIP (optional, not gating; "
               "see README for measured timings)\n";
  report(8, "worker-count determinism", determinism());
  std::cout << (all ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL") << "\n";
  return all ? 0 : 1;
}
