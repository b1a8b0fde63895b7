#pragma once

// Text artifacts: map descriptors, tower/partition dumps, certification
// reports, qs tables. Numbers are written in shortest round-trip form.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "json.hpp"

#include "renormlab/conjugacy.hpp"
#include "renormlab/core.hpp"
#include "renormlab/distortion.hpp"
#include "renormlab/map.hpp"
#include "renormlab/markov.hpp"
#include "renormlab/renorm.hpp"

namespace renormlab::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "renorm-lab/1";

inline std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

// ---- map descriptors ------------------------------------------------------

/// Accepts {"t", "h_coeffs", "label"} or the affine shorthand {"t", "c"}.
inline UnimodalMap map_from_json(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw ParameterError("map descriptor must be a JSON object");
  if (j.contains("schema") && j.at("schema") != kSchema)
    throw ParameterError("unsupported schema " + j.at("schema").dump());
  if (!j.contains("t") || !j.at("t").is_number())
    throw ParameterError("map descriptor needs a numeric \"t\"");
  const double t = j.at("t").get<double>();
  if (j.contains("h_coeffs")) {
    const auto& hc = j.at("h_coeffs");
    if (!hc.is_array()) throw ParameterError("\"h_coeffs\" must be an array of numbers");
    std::vector<double> coeffs;
    for (const auto& v : hc) {
      if (!v.is_number()) throw ParameterError("\"h_coeffs\" must be an array of numbers");
      coeffs.push_back(v.get<double>());
    }
    const std::string label = j.value("label", std::string{});
    return UnimodalMap(t, std::move(coeffs), label, tol);
  }
  if (j.contains("c")) {
    if (!j.at("c").is_number()) throw ParameterError("\"c\" must be a number");
    return make_affine_family(t, j.at("c").get<double>(), tol);
  }
  throw ParameterError("map descriptor needs \"h_coeffs\" or \"c\"");
}

inline json map_to_json(const UnimodalMap& f) {
  json j;
  j["schema"] = kSchema;
  j["t"] = f.exponent();
  j["h_coeffs"] = f.h_coeffs();
  j["label"] = f.label();
  if (auto c = f.affine_parameter()) j["c"] = *c;
  return j;
}

// ---- tower ----------------------------------------------------------------

inline json tower_to_json(const RenormTower& tower) {
  json j;
  j["schema"] = kSchema;
  j["map"] = map_to_json(tower.base());
  j["depth"] = tower.depth();
  j["truncated"] = tower.truncated();
  if (tower.truncated()) j["truncation_reason"] = tower.truncation_reason();
  json levels = json::array();
  for (const auto& lv : tower.levels()) {
    json l;
    l["k"] = lv.k;
    l["n_k"] = lv.n;
    l["m_k"] = lv.m;
    l["J_k"] = interval_json(lv.J);
    l["I_k"] = interval_json(tower.nested(lv.k));
    l["p_k"] = tower.periodic_endpoint(lv.k);
    l["alpha_slope"] = lv.alpha_slope;
    l["c1_fk"] = lv.c1;
    l["orientation"] = to_string(lv.orientation);
    l["shuffle"] = lv.shuffle;
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  return j;
}

inline std::string tower_csv(const RenormTower& tower) {
  std::ostringstream os;
  os << "k,n_k,m_k,J_lo,J_hi,I_lo,I_hi,p_k,alpha_slope,c1_fk\n";
  for (const auto& lv : tower.levels()) {
    const Interval& I = tower.nested(lv.k);
    os << lv.k << ',' << lv.n << ',' << lv.m << ',' << num(lv.J.lo) << ',' << num(lv.J.hi) << ','
       << num(I.lo) << ',' << num(I.hi) << ',' << num(tower.periodic_endpoint(lv.k)) << ','
       << num(lv.alpha_slope) << ',' << num(lv.c1) << '\n';
  }
  return os.str();
}

// ---- partition ------------------------------------------------------------

inline std::string partition_csv(const MarkovPartition& part) {
  std::ostringstream os;
  os << "level,index,left,right,kind,iterate\n";
  for (const auto& e : part.elements())
    os << e.level << ',' << e.index << ',' << num(e.interval.lo) << ',' << num(e.interval.hi)
       << ',' << to_string(e.kind) << ',' << e.iterate << '\n';
  return os.str();
}

/// One line per admissible word: label, cylinder left, cylinder right.
inline std::string words_dump(const MarkovPartition& part, int word_length) {
  std::ostringstream os;
  for (const auto& w : admissible_words(part, word_length))
    os << word_label(part, w.ids) << ' ' << num(w.cylinder.lo) << ' ' << num(w.cylinder.hi) << '\n';
  return os.str();
}

// ---- certification report ---------------------------------------------------

inline std::string optional_num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

inline std::string report_csv(const DistortionReport& rep) {
  std::ostringstream os;
  os << "LEMMA\n";
  os << "k,c1,nl_sup,scaling,critical_iterate,L_lo,L_hi,T_lo,T_hi,M_lo,M_hi,return_ratio\n";
  for (const auto& q : rep.lemma) {
    os << q.k << ',' << num(q.c1) << ',' << num(q.nl_sup) << ',' << optional_num(q.scaling) << ','
       << num(q.critical_iterate) << ',' << num(q.L.lo) << ',' << num(q.L.hi) << ',';
    if (q.T) os << num(q.T->lo) << ',' << num(q.T->hi) << ','; else os << ",,";
    if (q.M) os << num(q.M->lo) << ',' << num(q.M->hi) << ','; else os << ",,";
    os << optional_num(q.return_ratio) << '\n';
  }
  os << "DEF1A\nk,i,ratio\n";
  for (const auto& r : rep.adjacent) os << r.k << ',' << r.i << ',' << num(r.ratio) << '\n';
  os << "DEF1B\nk,i,ratio\n";
  for (const auto& r : rep.core) os << r.k << ',' << r.i << ',' << num(r.ratio) << '\n';
  os << "DEF1C\nword,domain_length,sup,samples\n";
  for (const auto& w : rep.words)
    os << w.word << ',' << num(w.domain_length) << ',' << num(w.sup) << ',' << w.samples << '\n';
  os << "GAPS\nk,cycle_cycle,gap_gap,gap_cycle\n";
  for (const auto& g : rep.gaps)
    os << g.k << ',' << num(g.cycle_cycle) << ',' << num(g.gap_gap) << ',' << num(g.gap_cycle)
       << '\n';
  return os.str();
}

inline json report_json(const DistortionReport& rep) {
  json j;
  j["schema"] = kSchema;
  j["depth"] = rep.depth;
  j["word_length"] = rep.word_length;
  j["grid"] = rep.grid;
  j["A"] = rep.A;
  j["B"] = rep.B;
  j["C"] = rep.C;
  j["C6"] = rep.C6;
  j["thresholds"] = {{"A", rep.thresholds.A}, {"B", rep.thresholds.B}, {"C", rep.thresholds.C}};
  j["pass"] = rep.pass;
  j["skipped_words"] = rep.skipped_words;
  return j;
}

// ---- conjugacy --------------------------------------------------------------

inline std::string qs_csv(const QsModulusTable& table) {
  std::ostringstream os;
  os << "j,tau,max_rho,mean_rho,samples,excluded\n";
  for (const auto& r : table.rows)
    os << r.j << ',' << num(r.tau) << ',' << num(r.max_rho) << ',' << num(r.mean_rho) << ','
       << r.samples << ',' << r.excluded << '\n';
  return os.str();
}

inline std::string mesh_csv(const ConjugacyMesh& mesh) {
  std::ostringstream os;
  os << "x_f,x_g\n";
  for (const auto& p : mesh.points()) os << num(p.x) << ',' << num(p.y) << '\n';
  return os.str();
}

inline json qs_json(const QsModulusTable& forward, const QsModulusTable& inverse,
                    const ConjugacyMesh& mesh) {
  auto rows = [](const QsModulusTable& t) {
    json a = json::array();
    for (const auto& r : t.rows)
      a.push_back({{"j", r.j}, {"tau", r.tau}, {"max_rho", r.max_rho}, {"mean_rho", r.mean_rho},
                   {"samples", r.samples}, {"excluded", r.excluded}, {"resolved", r.resolved}});
    return a;
  };
  json j;
  j["schema"] = kSchema;
  j["word_length"] = mesh.word_length();
  j["landmarks"] = mesh.points().size();
  j["mesh_width"] = forward.mesh_width;
  j["inverse_mesh_width"] = inverse.mesh_width;
  j["excluded_measure"] = forward.excluded_measure;
  j["forward"] = rows(forward);
  j["inverse"] = rows(inverse);
  j["warnings"] = forward.warnings;
  return j;
}

// ---- files ----------------------------------------------------------------------

/// Writes via a sibling temporary file and rename, so readers never see a
/// partial artifact.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("io-error", "cannot create " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io-error", "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw Error("io-error", "write to " + tmp.string() + " failed");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("io-error", "cannot rename onto " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace renormlab::io
