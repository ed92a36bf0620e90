#include "gkm/runconfig.hpp"

#include "gkm/toml_lite.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gkm {

namespace {

using json = nlohmann::ordered_json;

std::string verdict_str(FreenessCertificate::Verdict v) {
  switch (v) {
    case FreenessCertificate::Verdict::Free: return "free";
    case FreenessCertificate::Verdict::NotFree: return "not-free";
    default: return "inconclusive";
  }
}

std::string char_bits(const Char& c) {
  std::string s;
  for (int b : c) s += char('0' + b);
  return s;
}

std::vector<long long> trimmed(std::vector<long long> v) {
  while (v.size() > 1 && v.back() == 0) v.pop_back();
  return v;
}

bool window_stable(const std::vector<long long>& coeffs, int D, int window = 4) {
  int top = -1;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) top = (int)i;
  return top <= D - window;
}

// ---- JSON-pointer-aware descriptor access --------------------------------

[[noreturn]] void jfail(const std::string& ptr, const std::string& what) {
  throw std::runtime_error(ptr + ": " + what);
}

const json& jget(const json& j, const std::string& ptr, const std::string& key) {
  if (!j.is_object()) jfail(ptr, "expected object");
  auto it = j.find(key);
  if (it == j.end()) jfail(ptr + "/" + key, "missing field");
  return *it;
}

long long jint(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) jfail(ptr, "expected integer");
  return j.get<long long>();
}

std::string jstr(const json& j, const std::string& ptr) {
  if (!j.is_string()) jfail(ptr, "expected string");
  return j.get<std::string>();
}

std::vector<long long> jints(const json& j, const std::string& ptr) {
  if (!j.is_array()) jfail(ptr, "expected array of integers");
  std::vector<long long> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(jint(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

std::vector<int> jsmallints(const json& j, const std::string& ptr) {
  std::vector<int> out;
  for (long long x : jints(j, ptr)) out.push_back((int)x);
  return out;
}

Rat jrat(const json& j, const std::string& ptr) {
  try {
    if (j.is_number_integer()) return Rat((long)j.get<long long>());
    if (j.is_string()) return rat_from_string(j.get<std::string>());
  } catch (const std::exception&) {
  }
  jfail(ptr, "expected rational string \"p/q\" or integer");
}

Matrix jmatrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) jfail(ptr, "expected nonempty matrix rows");
  std::size_t cols = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rptr = ptr + "/" + std::to_string(i);
    if (!j[i].is_array()) jfail(rptr, "expected row array");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) jfail(rptr, "ragged matrix rows");
  }
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t k = 0; k < cols; ++k)
      m.at(i, k) = jrat(j[i][k], ptr + "/" + std::to_string(i) + "/" +
                                     std::to_string(k));
  return m;
}

GradedElement jelement(const json& j, const std::string& ptr,
                       const AmbientSpec& spec) {
  if (!j.is_array()) jfail(ptr, "expected term list");
  GradedElement e;
  e.spec = spec;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tptr = ptr + "/" + std::to_string(i);
    Mono m;
    m.exp.assign(spec.rank, 0);
    auto exps = jints(jget(j[i], tptr, "exp"), tptr + "/exp");
    if ((int)exps.size() != spec.rank) jfail(tptr + "/exp", "wrong length");
    for (int k = 0; k < spec.rank; ++k) m.exp[k] = (std::int32_t)exps[k];
    m.ext.assign(spec.g, 0);
    if (j[i].contains("ext")) {
      auto exts = jints(j[i]["ext"], tptr + "/ext");
      if ((int)exts.size() != spec.g) jfail(tptr + "/ext", "wrong length");
      for (int k = 0; k < spec.g; ++k) m.ext[k] = (std::uint32_t)exts[k];
    }
    if (i == 0)
      e.degree = m.degree();
    else if (m.degree() != e.degree)
      jfail(tptr, "mixed-degree terms in one element");
    e.add_term(m, jrat(jget(j[i], tptr, "c"), tptr + "/c"));
  }
  return e;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

// ---- output assembly ------------------------------------------------------

json orbit_json(const OrbitRow& o, int D) {
  json oj;
  oj["character"] = char_bits(o.rep);
  oj["orbit_size"] = o.orbit_size;
  oj["numerator"] = trimmed(o.numerator);
  oj["stable"] = window_stable(o.numerator, D);
  oj["verdict"] = verdict_str(o.cert.verdict);
  oj["generator_degrees"] = o.cert.generator_degrees;
  if (!o.note.empty()) oj["note"] = o.note;
  return oj;
}

json row_json(const TableRow& row) {
  json j;
  j["command"] = "compute";
  j["group"] = row.group;
  j["g"] = row.g;
  j["c"] = row.c_label;
  j["weyl"] = row.weyl;
  j["D"] = row.D;
  j["normalization"] = row.normalization;
  j["total"] = row.total;
  j["stable"] = window_stable(row.total, row.D);
  j["orbits"] = json::array();
  for (const OrbitRow& o : row.orbits) j["orbits"].push_back(orbit_json(o, row.D));
  return j;
}

std::string poly_str(const std::vector<long long>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "]";
  return os.str();
}

} // namespace

std::string table_row_to_json(const TableRow& row) {
  return row_json(row).dump(2) + "\n";
}

std::string table_row_to_text(const TableRow& row) {
  std::ostringstream os;
  os << "group " << row.group << "  g=" << row.g << "  c=" << row.c_label
     << (row.weyl ? "  (Weyl invariants)" : "") << "  D=" << row.D << "\n";
  os << "normalization: " << row.normalization << "\n";
  os << "total: " << poly_str(row.total)
     << (window_stable(row.total, row.D) ? "" : "  [unstable at D]") << "\n";
  for (const OrbitRow& o : row.orbits) {
    os << std::left << std::setw(12) << ("chi=" + char_bits(o.rep))
       << " size=" << o.orbit_size << "  " << std::setw(14)
       << verdict_str(o.cert.verdict) << poly_str(trimmed(o.numerator));
    if (!o.note.empty()) os << "  (" << o.note << ")";
    os << "\n";
  }
  return os.str();
}

namespace {

SheafModel load_monodromy(const json& j) {
  MonodromySpec spec;
  spec.amb = AmbientSpec((int)jint(jget(j, "", "rank"), "/rank"),
                         j.contains("g") ? (int)jint(j["g"], "/g") : 0);
  spec.fiber_degrees = jsmallints(jget(j, "", "fiber_degrees"), "/fiber_degrees");
  for (auto& v : jget(j, "", "vertices"))
    spec.vertices.push_back(jstr(v, "/vertices"));
  const json& edges = jget(j, "", "edges");
  if (!edges.is_array()) jfail("/edges", "expected array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ptr = "/edges/" + std::to_string(i);
    MonodromyEdge e;
    e.source = jstr(jget(edges[i], ptr, "source"), ptr + "/source");
    e.target = jstr(jget(edges[i], ptr, "target"), ptr + "/target");
    e.alpha = Weight(jints(jget(edges[i], ptr, "alpha"), ptr + "/alpha"));
    e.rho = jmatrix(jget(edges[i], ptr, "rho"), ptr + "/rho");
    spec.edges.push_back(std::move(e));
  }
  return from_monodromy(spec);
}

SheafModel load_bm(const json& j) {
  BMSheafSpec spec;
  AmbientSpec amb((int)jint(jget(j, "", "rank"), "/rank"),
                  j.contains("g") ? (int)jint(j["g"], "/g") : 0);
  const json& stalks = jget(j, "", "stalks");
  if (!stalks.is_object()) jfail("/stalks", "expected object");
  for (auto& [name, sj] : stalks.items()) {
    FreeModuleSpec fs{amb, jsmallints(jget(sj, "/stalks/" + name, "shifts"),
                                      "/stalks/" + name + "/shifts")};
    spec.stalks[name] = fs;
  }
  const json& edges = jget(j, "", "edges");
  if (!edges.is_array()) jfail("/edges", "expected array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ptr = "/edges/" + std::to_string(i);
    BMEdge e;
    e.source = jstr(jget(edges[i], ptr, "source"), ptr + "/source");
    e.target = jstr(jget(edges[i], ptr, "target"), ptr + "/target");
    e.alpha = Weight(jints(jget(edges[i], ptr, "alpha"), ptr + "/alpha"));
    const json& rho = jget(edges[i], ptr, "rho_t");
    if (!rho.is_array()) jfail(ptr + "/rho_t", "expected array");
    for (std::size_t a = 0; a < rho.size(); ++a) {
      const std::string rptr = ptr + "/rho_t/" + std::to_string(a);
      if (!rho[a].is_array()) jfail(rptr, "expected array");
      std::vector<GradedElement> col;
      for (std::size_t b = 0; b < rho[a].size(); ++b)
        col.push_back(jelement(rho[a][b], rptr + "/" + std::to_string(b), amb));
      e.rho_t.push_back(std::move(col));
    }
    spec.edges.push_back(std::move(e));
  }
  return from_bm(spec);
}

} // namespace

SheafModel load_sheaf_descriptor(const std::string& path, std::string* kind) {
  json j = load_json_file(path);
  std::string k = jstr(jget(j, "", "kind"), "/kind");
  if (kind) *kind = k;
  if (k == "monodromy") return load_monodromy(j);
  if (k == "bm") return load_bm(j);
  jfail("/kind", "unknown kind '" + k + "' (expected monodromy or bm)");
}

GkmHypergraph load_hypergraph_json(const std::string& path) {
  json j = load_json_file(path);
  GkmHypergraph h;
  h.rank = (int)jint(jget(j, "", "rank"), "/rank");
  for (auto& v : jget(j, "", "vertices"))
    h.vertices.push_back(jstr(v, "/vertices"));
  const json& parts = jget(j, "", "partitions");
  if (!parts.is_array()) jfail("/partitions", "expected array");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string ptr = "/partitions/" + std::to_string(i);
    Weight w(jints(jget(parts[i], ptr, "weight"), ptr + "/weight"));
    Partition p;
    const json& blocks = jget(parts[i], ptr, "blocks");
    if (!blocks.is_array()) jfail(ptr + "/blocks", "expected array");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Block blk;
      for (auto& v : blocks[b])
        blk.push_back(jstr(v, ptr + "/blocks/" + std::to_string(b)));
      p.push_back(std::move(blk));
    }
    h.partitions.emplace(std::move(w), std::move(p));
  }
  h.sort_canonical();
  if (auto bad = validate(h)) throw std::runtime_error(path + ": " + *bad);
  return h;
}

RootDatum load_root_datum_json(const std::string& path) {
  json j = load_json_file(path);
  RootDatum d;
  d.label = jstr(jget(j, "", "label"), "/label");
  d.rank = (int)jint(jget(j, "", "rank"), "/rank");
  if (j.contains("labels"))
    for (auto& v : j["labels"]) d.labels.push_back(jstr(v, "/labels"));
  for (auto& r : jget(j, "", "pos_roots"))
    d.pos_roots.push_back(jints(r, "/pos_roots"));
  for (auto& r : jget(j, "", "coroots"))
    d.coroots.push_back(jints(r, "/coroots"));
  const json& gens = jget(j, "", "weyl_gens");
  for (std::size_t i = 0; i < gens.size(); ++i)
    d.weyl_gens.push_back(jmatrix(gens[i], "/weyl_gens/" + std::to_string(i)));
  d.degrees = jsmallints(jget(j, "", "degrees"), "/degrees");
  d.weyl_order = jint(jget(j, "", "weyl_order"), "/weyl_order");
  d.t2_rank = (int)jint(jget(j, "", "t2_rank"), "/t2_rank");
  if (j.contains("phi_mod2")) d.phi_mod2 = j["phi_mod2"].get<bool>();
  d.lattice_basis = jmatrix(jget(j, "", "lattice_basis"), "/lattice_basis");
  for (auto& r : jget(j, "", "coroot_t2"))
    d.coroot_t2.push_back(jsmallints(r, "/coroot_t2"));
  validate_datum(d);
  return d;
}

// ---- commands -------------------------------------------------------------

namespace {

void apply_workers(const RunConfig& cfg) {
  if (cfg.workers >= 1)
    setenv("GKM_WORKERS", std::to_string(cfg.workers).c_str(), 1);
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw std::runtime_error("cannot write " + cfg.output);
  f << text;
}

} // namespace

int cmd_compute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  apply_workers(cfg);
  PipelineRequest req;
  req.group = cfg.group;
  req.g = cfg.g;
  req.c = cfg.c;
  req.D = cfg.D;
  req.weyl = cfg.weyl;
  req.character = cfg.character;
  TableRow row;
  try {
    if (cfg.group.size() > 5 &&
        cfg.group.substr(cfg.group.size() - 5) == ".json") {
      RootDatum datum = load_root_datum_json(cfg.group);
      req.group = datum.label;
      row = table_row(req, datum);
    } else {
      row = table_row(req);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    err << "known groups:";
    for (auto& k : registry_keys()) err << " " << k;
    err << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  emit(cfg, cfg.format == "text" ? table_row_to_text(row) : table_row_to_json(row),
       out);
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  apply_workers(cfg);
  TomlDoc doc;
  try {
    doc = toml_parse_file(cfg.path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  auto rows = doc.arrays.find("row");
  if (rows == doc.arrays.end()) {
    err << "error: golden file has no [[row]] entries\n";
    return 2;
  }
  int mismatches = 0, compared = 0, skipped = 0;
  for (std::size_t ri = 0; ri < rows->second.size(); ++ri) {
    const TomlTable& row = rows->second[ri];
    auto need = [&](const char* key, TomlValue::Kind kind) -> const TomlValue& {
      auto it = row.find(key);
      if (it == row.end() || it->second.kind != kind)
        throw std::runtime_error("row " + std::to_string(ri + 1) +
                                 ": missing or mistyped field '" + key + "'");
      return it->second;
    };
    std::string type, tier, free_claim;
    bool weyl = false;
    std::vector<long long> golden;
    try {
      type = need("type", TomlValue::Kind::String).s;
      tier = need("tier", TomlValue::Kind::String).s;
      free_claim = need("free", TomlValue::Kind::String).s;
      weyl = need("weyl", TomlValue::Kind::Bool).b;
      golden = need("numerator", TomlValue::Kind::IntList).ints;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
    std::string name = type + (weyl ? " (Weyl)" : " (regular)");
    if (tier == "extended" && cfg.tier != "extended") {
      out << "SKIP  " << name << "  [extended tier]\n";
      ++skipped;
      continue;
    }
    PipelineRequest req;
    req.group = type;
    req.g = 1;
    req.weyl = weyl;
    req.c = weyl ? "identity" : "regular";
    req.D = (int)golden.size() - 1 + 4;
    TableRow computed;
    try {
      computed = table_row(req);
    } catch (const std::exception& e) {
      err << "error: row " << name << ": " << e.what() << "\n";
      return 1;
    }
    ++compared;
    std::vector<long long> got = trimmed(computed.total);
    std::vector<long long> want = trimmed(golden);
    bool poly_ok = got == want;
    std::string verdict = "free";
    for (auto& o : computed.orbits) {
      if (o.cert.verdict == FreenessCertificate::Verdict::NotFree) {
        verdict = "not-free";
        break;
      }
      if (o.cert.verdict == FreenessCertificate::Verdict::Inconclusive)
        verdict = "inconclusive";
    }
    bool free_ok = (free_claim == "yes" && verdict == "free") ||
                   (free_claim == "no" && verdict == "not-free");
    if (poly_ok && free_ok) {
      out << "OK    " << name << "  " << poly_str(want) << "\n";
      continue;
    }
    ++mismatches;
    if (!poly_ok) {
      std::size_t d = 0;
      while (d < got.size() && d < want.size() && got[d] == want[d]) ++d;
      out << "FAIL  " << name << "  first difference at degree " << d
          << ": computed " << (d < got.size() ? got[d] : 0) << ", golden "
          << (d < want.size() ? want[d] : 0) << "\n";
      out << "      computed " << poly_str(got) << "\n";
      out << "      golden   " << poly_str(want) << "\n";
    } else {
      out << "FAIL  " << name << "  freeness: computed " << verdict
          << ", golden " << free_claim << "\n";
    }
  }
  out << compared << " compared, " << mismatches << " mismatched, " << skipped
      << " skipped\n";
  return mismatches ? 1 : 0;
}

int cmd_sheaf(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  apply_workers(cfg);
  SheafModel model;
  std::string kind;
  try {
    model = load_sheaf_descriptor(cfg.path, &kind);
  } catch (const std::exception& e) {
    err << "error: " << cfg.path << e.what() << "\n";
    return 2;
  }
  try {
    if (auto bad = validate_model(model)) {
      err << "error: invalid sheaf model: " << *bad << "\n";
      return 1;
    }
    int maxdeg = 0;
    for (auto& [w, eis] : model.images)
      for (auto& ei : eis)
        for (auto& g : ei.image.gens) maxdeg = std::max(maxdeg, g.degree);
    int D = cfg.D >= 0 ? cfg.D : maxdeg + 8;
    Submodule h0 = global_sections(model, D);
    json j;
    j["command"] = "sheaf";
    j["kind"] = kind;
    j["D"] = D;
    if (h0.provenance == "crt-monodromy") {
      // closed-form path: generators are a free basis by construction
      std::vector<int> degs;
      int top = 0;
      for (auto& g : h0.gens) {
        degs.push_back(g.degree);
        top = std::max(top, g.degree);
      }
      std::sort(degs.begin(), degs.end());
      std::vector<long long> numer(top + 1, 0);
      for (int d : degs) ++numer[d];
      j["numerator"] = numer;
      j["stable"] = true;
      j["generator_degrees"] = degs;
      j["verdict"] = "free";
      j["path"] = "closed-form";
    } else {
      HilbertData h = hilbert_numerator(h0, D);
      FreenessCertificate cert = certify_free(h0, D);
      std::vector<int> degs;
      for (auto& [d, e] : minimal_generators(h0, D)) degs.push_back(d);
      j["numerator"] = trimmed(h.coeffs);
      j["stable"] = h.stable;
      j["generator_degrees"] = degs;
      j["verdict"] = verdict_str(cert.verdict);
      j["path"] = "intersection";
    }
    emit(cfg, j.dump(2) + "\n", out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "compute") return cmd_compute(cfg, out, err);
  if (cfg.command == "verify") return cmd_verify(cfg, out, err);
  if (cfg.command == "sheaf") return cmd_sheaf(cfg, out, err);
  err << "error: unknown command '" << cfg.command << "'\n";
  return 2;
}

} // namespace gkm
