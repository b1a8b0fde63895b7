// renorm_lab: batch front end for towers, partitions, certificates and
// conjugacy experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "renormlab/renormlab.hpp"

namespace fs = std::filesystem;
using renormlab::io::json;

namespace {

constexpr int kMaxDepth = 8;
constexpr int kMaxWordLength = 8;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Command-line values; unset fields fall back to the config file.
struct Flags {
  std::string config;
  std::optional<double> t;
  std::optional<double> c;
  std::string type;
  std::optional<int> tune_depth;
  std::string map;
  std::string target;
  std::optional<int> depth;
  std::optional<int> max_n;
  std::optional<int> L;
  std::optional<int> grid;
  std::optional<int> j0;
  std::optional<int> j1;
  std::optional<int> qs_grid;
  std::optional<int> preimage_rounds;
  std::string out;
};

json parse_json_arg(const std::string& s) {
  try {
    if (!s.empty() && s.front() == '{') return json::parse(s);
    return json::parse(renormlab::io::read_file(s));
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("invalid JSON: ") + e.what());
  }
}

std::vector<int> parse_type(const json& type, int depth) {
  if (type.is_array()) return type.get<std::vector<int>>();
  if (!type.is_string()) throw UsageError("\"type\" must be a name or an array of return times");
  const std::string name = type.get<std::string>();
  if (depth < 1) throw UsageError("tuning needs a positive depth");
  if (name == "doubling") return std::vector<int>(static_cast<std::size_t>(depth), 2);
  if (name == "tripling") return std::vector<int>(static_cast<std::size_t>(depth), 3);
  std::vector<int> out;
  std::stringstream ss(name);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError("unknown combinatorial type \"" + name + "\"");
    }
  }
  return out;
}

renormlab::Tolerances tolerances_from(const json& cfg) {
  renormlab::Tolerances tol;
  if (!cfg.contains("tolerances")) return tol;
  const json& t = cfg.at("tolerances");
  auto read = [&](const char* key, double& v) {
    if (!t.contains(key)) return;
    v = t.at(key).get<double>();
    if (!(v > 0.0)) throw UsageError(std::string("tolerance ") + key + " must be positive");
  };
  read("domain", tol.domain);
  read("derivative", tol.derivative);
  read("renorm", tol.renorm);
  read("conditioning", tol.conditioning);
  read("markov", tol.markov);
  read("root", tol.root);
  read("critical", tol.critical);
  if (t.contains("bisection_budget")) tol.bisection_budget = t.at("bisection_budget").get<int>();
  if (tol.bisection_budget < 1) throw UsageError("bisection_budget must be positive");
  return tol;
}

/// A descriptor, or a tuning request {"t", "type", "depth"}; the tower depth
/// is the default tuning depth.
renormlab::UnimodalMap resolve_map(const json& spec, const renormlab::Tolerances& tol,
                                   int default_depth) {
  if (spec.is_object() && spec.contains("type")) {
    if (!spec.contains("t") || !spec.at("t").is_number())
      throw UsageError("tuning request needs a numeric \"t\"");
    const double t = spec.at("t").get<double>();
    const auto target = parse_type(spec.at("type"), spec.value("depth", default_depth));
    const auto res = renormlab::tune_parameter(t, target, tol);
    return renormlab::make_affine_family(t, res.c, tol);
  }
  return renormlab::io::map_from_json(spec, tol);
}

json load_config(const Flags& fl) {
  json cfg = json::object();
  if (!fl.config.empty()) cfg = parse_json_arg(fl.config);
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  auto set = [&](const char* key, const auto& v) {
    if (v) cfg[key] = *v;
  };
  set("depth", fl.depth);
  set("max_n", fl.max_n);
  set("L", fl.L);
  set("grid", fl.grid);
  set("j0", fl.j0);
  set("j1", fl.j1);
  set("qs_grid", fl.qs_grid);
  set("preimage_rounds", fl.preimage_rounds);
  if (!fl.out.empty()) cfg["out"] = fl.out;
  if (!fl.map.empty()) cfg["map"] = parse_json_arg(fl.map);
  if (!fl.target.empty()) cfg["target"] = parse_json_arg(fl.target);
  if (fl.t) {
    json m = cfg.contains("map") ? cfg["map"] : json::object();
    m["t"] = *fl.t;
    if (fl.c) {
      m.erase("type");
      m.erase("h_coeffs");
      m["c"] = *fl.c;
    }
    cfg["map"] = m;
  }
  if (!fl.type.empty()) cfg["map"]["type"] = fl.type;
  if (fl.tune_depth) cfg["map"]["depth"] = *fl.tune_depth;
  return cfg;
}

int capped(const json& cfg, const char* key, int fallback, int lo, int hi) {
  const int v = cfg.value(key, fallback);
  if (v < lo || v > hi)
    throw UsageError(std::string(key) + " must lie in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "], got " + std::to_string(v));
  return v;
}

fs::path out_dir(const json& cfg) { return fs::path(cfg.value("out", std::string("."))); }

const json& require(const json& cfg, const char* key) {
  if (!cfg.contains(key)) throw UsageError(std::string("missing \"") + key + "\"");
  return cfg.at(key);
}

int cmd_tune(const json& cfg) {
  const auto tol = tolerances_from(cfg);
  const json& spec = require(cfg, "map");
  if (!spec.contains("t") || !spec.at("t").is_number()) throw UsageError("tune needs --t");
  if (!spec.contains("type")) throw UsageError("tune needs --type");
  const double t = spec.at("t").get<double>();
  if (!(t > 1.0)) throw UsageError("critical exponent t must exceed 1");
  const int depth = spec.value("depth", 0);
  if (depth > kMaxDepth) throw UsageError("depth is capped at " + std::to_string(kMaxDepth));
  const auto target = parse_type(spec.at("type"), depth);
  const auto res = renormlab::tune_parameter(t, target, tol);
  std::printf("c = %.12f\n", res.c);
  if (cfg.contains("out")) {
    json d = renormlab::io::map_to_json(renormlab::make_affine_family(t, res.c, tol));
    d["superstable"] = res.superstable;
    d["extrapolated"] = res.extrapolated;
    renormlab::io::write_atomic(out_dir(cfg) / "map.json", d.dump(2) + "\n");
  }
  return 0;
}

int cmd_tower(const json& cfg) {
  const auto tol = tolerances_from(cfg);
  const int depth = capped(cfg, "depth", 5, 1, kMaxDepth);
  const int max_n = capped(cfg, "max_n", 4, 2, 64);
  const auto f = resolve_map(require(cfg, "map"), tol, depth);
  const auto tower = renormlab::build_tower(f, depth, max_n, tol);
  const fs::path dir = out_dir(cfg);
  renormlab::io::write_atomic(dir / "tower.json", renormlab::io::tower_to_json(tower).dump(2) + "\n");
  renormlab::io::write_atomic(dir / "tower.csv", renormlab::io::tower_csv(tower));
  std::printf("depth %d%s\n", tower.depth(), tower.truncated() ? " (truncated)" : "");
  return 0;
}

int cmd_partition(const json& cfg) {
  const auto tol = tolerances_from(cfg);
  const int depth = capped(cfg, "depth", 4, 1, kMaxDepth);
  const int max_n = capped(cfg, "max_n", 4, 2, 64);
  const int L = capped(cfg, "L", 3, 1, kMaxWordLength);
  const auto f = resolve_map(require(cfg, "map"), tol, depth);
  const auto part = renormlab::build_partition(renormlab::build_tower(f, depth, max_n, tol), depth, tol);
  const fs::path dir = out_dir(cfg);
  renormlab::io::write_atomic(dir / "partition.csv", renormlab::io::partition_csv(part));
  renormlab::io::write_atomic(dir / "words.txt", renormlab::io::words_dump(part, L));
  std::printf("%zu elements, alignment %.3e\n", part.elements().size(),
              renormlab::markov_alignment_error(part));
  return 0;
}

int cmd_certify(const json& cfg) {
  const auto tol = tolerances_from(cfg);
  const int depth = capped(cfg, "depth", 5, 1, kMaxDepth);
  const int max_n = capped(cfg, "max_n", 4, 2, 64);
  const int L = capped(cfg, "L", 3, 1, kMaxWordLength);
  const int grid = capped(cfg, "grid", 64, 1, 1 << 16);
  renormlab::Thresholds th;
  if (cfg.contains("thresholds")) {
    const json& j = cfg.at("thresholds");
    th.A = j.value("A", th.A);
    th.B = j.value("B", th.B);
    th.C = j.value("C", th.C);
  }
  const auto f = resolve_map(require(cfg, "map"), tol, depth);
  const auto part = renormlab::build_partition(renormlab::build_tower(f, depth, max_n, tol), depth, tol);
  const auto rep = renormlab::certify(part, L, grid, th);
  const fs::path dir = out_dir(cfg);
  renormlab::io::write_atomic(dir / "report.csv", renormlab::io::report_csv(rep));
  renormlab::io::write_atomic(dir / "report.json", renormlab::io::report_json(rep).dump(2) + "\n");
  std::printf("A = %.6g  B = %.6g  C = %.6g  %s\n", rep.A, rep.B, rep.C, rep.pass ? "pass" : "fail");
  return 0;
}

int cmd_conjugate(const json& cfg) {
  const auto tol = tolerances_from(cfg);
  const int depth = capped(cfg, "depth", 5, 1, kMaxDepth);
  const int max_n = capped(cfg, "max_n", 4, 2, 64);
  const int L = capped(cfg, "L", 3, 1, kMaxWordLength);
  const int j0 = capped(cfg, "j0", 3, 0, 40);
  const int j1 = capped(cfg, "j1", 8, j0, 40);
  const int qs_grid = capped(cfg, "qs_grid", 2001, 2, 1 << 20);
  const int rounds = capped(cfg, "preimage_rounds", 1, 0, 8);
  const auto f = resolve_map(require(cfg, "map"), tol, depth);
  const auto g = cfg.contains("target") ? resolve_map(cfg.at("target"), tol, depth) : f;
  const auto tf = renormlab::build_tower(f, depth, max_n, tol);
  const auto tg = renormlab::build_tower(g, depth, max_n, tol);
  const auto cert = renormlab::match_towers(tf, tg);
  const auto pf = renormlab::build_partition(tf, cert.depth, tol);
  const auto pg = renormlab::build_partition(tg, cert.depth, tol);
  const auto mesh = renormlab::build_mesh(pf, pg, L, rounds);
  const auto inv = mesh.inverse();
  const auto fwd_table = renormlab::qs_modulus(mesh, j0, j1, qs_grid);
  const auto inv_table = renormlab::qs_modulus(inv, j0, j1, qs_grid);
  const fs::path dir = out_dir(cfg);
  renormlab::io::write_atomic(dir / "mesh.csv", renormlab::io::mesh_csv(mesh));
  renormlab::io::write_atomic(dir / "qs.csv", renormlab::io::qs_csv(fwd_table));
  renormlab::io::write_atomic(dir / "qs_inverse.csv", renormlab::io::qs_csv(inv_table));
  renormlab::io::write_atomic(dir / "qs.json",
                              renormlab::io::qs_json(fwd_table, inv_table, mesh).dump(2) + "\n");
  for (const auto& w : fwd_table.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%zu landmarks, width %.4g, max rho %.6g (inverse %.6g)\n", mesh.points().size(),
              mesh.width(), fwd_table.max_rho(), inv_table.max_rho());
  return 0;
}

void report_error(const std::string& code, const std::string& message, std::optional<int> level) {
  json j;
  j["error"] = code;
  j["message"] = message;
  if (level) j["level"] = *level;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"renorm_lab: renormalization towers, Markov partitions, distortion and conjugacy"};
  app.require_subcommand(1);
  Flags fl;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", fl.config, "JSON config file");
    sub->add_option("--out", fl.out, "output directory");
  };
  auto map_flags = [&](CLI::App* sub) {
    sub->add_option("--map", fl.map, "map descriptor (file or inline JSON)");
    sub->add_option("--t", fl.t, "critical exponent");
    sub->add_option("--c", fl.c, "affine family parameter");
    sub->add_option("--type", fl.type, "combinatorial type to tune: doubling, tripling or n1,n2,...");
    sub->add_option("--tune-depth", fl.tune_depth, "number of tuned levels");
    sub->add_option("--depth", fl.depth, "tower depth K");
    sub->add_option("--max-n", fl.max_n, "largest return time searched");
  };

  auto* tune = app.add_subcommand("tune", "find a parameter with the given combinatorics");
  common(tune);
  tune->add_option("--t", fl.t, "critical exponent");
  tune->add_option("--type", fl.type, "doubling, tripling or n1,n2,...");
  tune->add_option("--depth", fl.tune_depth, "number of levels");

  auto* tower = app.add_subcommand("tower", "build the renormalization tower");
  common(tower);
  map_flags(tower);

  auto* partition = app.add_subcommand("partition", "build the induced Markov partition");
  common(partition);
  map_flags(partition);
  partition->add_option("--L", fl.L, "word length for the words dump");

  auto* certify = app.add_subcommand("certify", "bounded distortion certificate");
  common(certify);
  map_flags(certify);
  certify->add_option("--L", fl.L, "word length");
  certify->add_option("--grid", fl.grid, "samples per branch domain");

  auto* conjugate = app.add_subcommand("conjugate", "conjugacy mesh and qs table");
  common(conjugate);
  map_flags(conjugate);
  conjugate->add_option("--target", fl.target, "second map (file or inline JSON)");
  conjugate->add_option("--L", fl.L, "word length");
  conjugate->add_option("--j0", fl.j0, "coarsest dyadic scale");
  conjugate->add_option("--j1", fl.j1, "finest dyadic scale");
  conjugate->add_option("--qs-grid", fl.qs_grid, "sample points per scale");
  conjugate->add_option("--preimage-rounds", fl.preimage_rounds, "pullback rounds for landmarks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const json cfg = load_config(fl);
    if (*tune) return cmd_tune(cfg);
    if (*tower) return cmd_tower(cfg);
    if (*partition) return cmd_partition(cfg);
    if (*certify) return cmd_certify(cfg);
    if (*conjugate) return cmd_conjugate(cfg);
  } catch (const UsageError& e) {
    report_error("usage", e.what(), std::nullopt);
    return 1;
  } catch (const json::exception& e) {
    report_error("usage", e.what(), std::nullopt);
    return 1;
  } catch (const renormlab::ParameterError& e) {
    report_error(e.code(), e.what(), std::nullopt);
    return 1;
  } catch (const renormlab::NotRenormalizableError& e) {
    report_error(e.code(), e.what(), e.level);
    return 2;
  } catch (const renormlab::TuningError& e) {
    report_error(e.code(), e.what(), e.deepest_level);
    return 2;
  } catch (const renormlab::CombinatoricsMismatchError& e) {
    report_error(e.code(), e.what(), e.level);
    return 2;
  } catch (const renormlab::Error& e) {
    report_error(e.code(), e.what(), std::nullopt);
    return 2;
  }
  return 1;
}
