#pragma once

// Command-line front end. `run` parses arguments, executes one command and returns the exit
// status; all output goes to the given streams so the whole tool can be driven from tests.
//
// Exit status: 0 success, 1 usage error, 2 invalid input (missing file, malformed JSON, lattice
// or label validation, failed certificate check), 3 certificate verdict Incomplete.

#include "vlplus/certifier.hpp"
#include "vlplus/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace vlplus::cli {

enum Exit : int { kOk = 0, kUsage = 1, kInvalid = 2, kIncomplete = 3 };

struct Config {
  std::string gram_path;
  long order = 12;
  std::string format = "tsv";
  unsigned jobs = 1;
  std::string oracle_path;
};

/// Raised for problems detected by the commands themselves; maps to exit status 2.
struct CommandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string kind_name(ModuleKind k) {
  switch (k) {
    case ModuleKind::VacPlus: return "VacPlus";
    case ModuleKind::VacMinus: return "VacMinus";
    case ModuleKind::Untw: return "Untw";
    case ModuleKind::CosetPM: return "CosetPM";
    case ModuleKind::TwistedPM: return "TwistedPM";
  }
  return "?";
}

inline ModuleLabel parse_module(const SectorRegistry& reg, const std::string& text) {
  if (text == "VacPlus") return ModuleLabel::vac_plus(reg.lattice().rank());
  if (text == "VacMinus") return ModuleLabel::vac_minus(reg.lattice().rank());
  return reg.parse_label(text);
}

inline std::string matrix_text(const IntMatrix& m) { return vlplus::to_json(m).dump(); }

inline std::string basis_text(const std::vector<LatticeVector>& basis) { return vlplus::to_json(basis_matrix(basis)).dump(); }

inline std::string discriminant_text(const DiscriminantGroup& g) {
  if (g.invariant_factors.empty()) return "0";
  std::string s;
  for (const auto& d : g.invariant_factors) s += (s.empty() ? "Z/" : " x Z/") + d.str();
  return s;
}

inline void emit_rows(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  for (const auto& [k, v] : rows) out << k << '\t' << v << '\n';
}

// ---- commands ---------------------------------------------------------------------------------

inline int cmd_analyze(const Config& cfg, std::ostream& out) {
  const SectorRegistry reg(read_lattice(cfg.gram_path));
  const auto& g = reg.discriminant();
  const auto orth = orthogonal_sublattice(reg.lattice());
  const auto zhu = zhu_block_report(reg);
  if (cfg.format == "json") {
    nlohmann::json o;
    o["gram"] = vlplus::to_json(reg.lattice().gram());
    o["rank"] = reg.lattice().rank();
    o["det"] = to_string(reg.lattice().det());
    nlohmann::json inv = nlohmann::json::array();
    for (const auto& d : g.invariant_factors) inv.push_back(to_string(d));
    o["discriminant"] = {{"invariant_factors", inv}, {"order", to_string(g.order)}};
    o["l2_size"] = reg.l2_size();
    o["r2"] = reg.mod2().r2;
    o["dim_t"] = to_string(reg.dim_t());
    o["module_count"] = reg.labels().size();
    o["orthogonal_sublattice"] = {{"basis", vlplus::to_json(basis_matrix(orth.basis))},
                                  {"gram", vlplus::to_json(orth.gram)},
                                  {"index", to_string(orth.index)}};
    o["zhu_blocks"] = {{"untwisted", to_string(zhu.dim_au)},
                       {"twisted_minus", to_string(zhu.dim_at)},
                       {"twisted_plus", to_string(zhu.dim_ah)},
                       {"semisimple_total", to_string(zhu.total_semisimple_dim)}};
    out << o.dump(2) << '\n';
    return kOk;
  }
  emit_rows(out, {{"rank", std::to_string(reg.lattice().rank())},
                  {"det", to_string(reg.lattice().det())},
                  {"discriminant", discriminant_text(g)},
                  {"l2_size", std::to_string(reg.l2_size())},
                  {"r2", std::to_string(reg.mod2().r2)},
                  {"dim_t", to_string(reg.dim_t())},
                  {"module_count", std::to_string(reg.labels().size())},
                  {"sublattice_basis", basis_text(orth.basis)},
                  {"sublattice_gram", matrix_text(orth.gram)},
                  {"sublattice_index", to_string(orth.index)},
                  {"zhu_untwisted", to_string(zhu.dim_au)},
                  {"zhu_twisted_minus", to_string(zhu.dim_at)},
                  {"zhu_twisted_plus", to_string(zhu.dim_ah)},
                  {"zhu_semisimple_total", to_string(zhu.total_semisimple_dim)}});
  return kOk;
}

inline int cmd_modules(const Config& cfg, std::ostream& out) {
  const SectorRegistry reg(read_lattice(cfg.gram_path));
  if (cfg.format == "json") {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : reg.labels())
      a.push_back({{"label", to_string(m)},
                   {"kind", kind_name(m.kind)},
                   {"lowest_weight", to_string(reg.lowest_weight(m))},
                   {"top_dimension", to_string(reg.top_level_dimension(m))},
                   {"contragredient", to_string(reg.contragredient(m))}});
    out << a.dump(2) << '\n';
    return kOk;
  }
  out << "label\tkind\tlowest_weight\ttop_dimension\tcontragredient\n";
  for (const auto& m : reg.labels())
    out << to_string(m) << '\t' << kind_name(m.kind) << '\t' << to_string(reg.lowest_weight(m)) << '\t'
        << to_string(reg.top_level_dimension(m)) << '\t' << to_string(reg.contragredient(m)) << '\n';
  return kOk;
}

inline int cmd_char(const Config& cfg, const std::vector<std::string>& modules, std::ostream& out) {
  const SectorRegistry reg(read_lattice(cfg.gram_path));
  std::vector<ModuleLabel> ms;
  for (const auto& t : modules) ms.push_back(parse_module(reg, t));
  if (ms.empty()) ms = reg.labels();
  const CharacterTable table(reg, cfg.order);
  nlohmann::json a = nlohmann::json::array();
  for (const auto& m : ms) {
    const QSeries s = table.character(m);
    if (cfg.format == "json") {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& [e, c] : s.terms()) terms.push_back({to_string(e), to_string(c)});
      a.push_back({{"label", to_string(m)}, {"order", cfg.order}, {"terms", terms}});
    } else {
      if (ms.size() > 1) out << "# " << to_string(m) << '\n';
      out << s.to_tsv();
    }
  }
  if (cfg.format == "json") out << a.dump(2) << '\n';
  return kOk;
}

inline int cmd_fusion(const Config& cfg, const std::vector<std::string>& triple, const std::string& batch, std::ostream& out) {
  const SectorRegistry reg(read_lattice(cfg.gram_path));
  SignOracle oracle;
  if (!cfg.oracle_path.empty()) oracle = sign_oracle_from_json(read_json_file(cfg.oracle_path), reg.lattice().rank());
  std::vector<std::array<std::string, 3>> queries;
  if (!batch.empty()) {
    const auto doc = read_json_file(batch);
    if (!doc.is_array()) throw InputError(InputErrorKind::BadSchema, "batch: expected an array of label triples");
    for (const auto& q : doc) {
      if (!q.is_array() || q.size() != 3 || !q[0].is_string() || !q[1].is_string() || !q[2].is_string())
        throw InputError(InputErrorKind::BadSchema, "batch: each entry must be [M1, M2, M3] label strings");
      queries.push_back({q[0].get<std::string>(), q[1].get<std::string>(), q[2].get<std::string>()});
    }
  } else {
    if (triple.size() != 3) throw CommandError("fusion: expected three labels M1 M2 M3 or --batch FILE");
    queries.push_back({triple[0], triple[1], triple[2]});
  }
  nlohmann::json a = nlohmann::json::array();
  for (const auto& q : queries) {
    const auto m1 = parse_module(reg, q[0]), m2 = parse_module(reg, q[1]), m3 = parse_module(reg, q[2]);
    const FusionAnswer ans = fusion_dim(reg, m1, m2, m3, oracle);
    if (cfg.format == "json") {
      nlohmann::json o = {{"m1", to_string(m1)}, {"m2", to_string(m2)}, {"m3", to_string(m3)}, {"answer", to_string(ans)}};
      if (ans.is_unknown()) o["reason"] = ans.reason;
      a.push_back(o);
    } else {
      out << to_string(m1) << '\t' << to_string(m2) << '\t' << to_string(m3) << '\t' << to_string(ans);
      if (ans.is_unknown()) out << '\t' << ans.reason;
      out << '\n';
    }
  }
  if (cfg.format == "json") out << a.dump(2) << '\n';
  return kOk;
}

inline std::map<std::string, int> count(const std::vector<std::string>& xs) {
  std::map<std::string, int> m;
  for (const auto& x : xs) ++m[x];
  return m;
}

inline int cmd_decompose(const Config& cfg, const std::string& module, const std::string& sublattice, std::ostream& out) {
  auto reg = std::make_shared<const SectorRegistry>(read_lattice(cfg.gram_path));
  const ModuleLabel m = parse_module(*reg, module);
  const Rational order(cfg.order);
  std::vector<std::string> parts;
  std::string sub_gram, sub_basis;
  bool ok = false;
  if (sublattice == "orthogonal") {
    OrthogonalBrancher br(reg);
    const auto b = br.branch(m);
    for (const auto& tuple : b.parts) {
      std::string s;
      for (const auto& f : tuple) s += (s.empty() ? "" : " (x) ") + to_string(f);
      parts.push_back(s);
    }
    sub_basis = basis_text([&] {
      std::vector<LatticeVector> id;
      for (std::size_t i = 0; i < br.rank(); ++i) {
        LatticeVector e(br.rank(), Integer(0));
        e[i] = 1;
        id.push_back(e);
      }
      return id;
    }());
    sub_gram = matrix_text(reg->lattice().gram());
    ok = verify_branch(br, b, order);
  } else {
    std::vector<LatticeVector> basis =
        sublattice == "auto" ? orthogonal_sublattice(reg->lattice()).basis : basis_from_json(read_json_file(sublattice));
    for (const auto& v : basis)
      if (v.size() != reg->lattice().rank()) throw LatticeError(LatticeErrorKind::NotFullRank, "sublattice basis has the wrong dimension");
    SublatticeBrancher br(reg, basis);
    const auto b = br.branch(m);
    for (const auto& p : b.parts) parts.push_back(to_string(p));
    if (b.twisted)
      parts.push_back(std::string("twisted") + (b.twisted->sign > 0 ? "+" : "-") + "{dim " + to_string(b.twisted->total_dim) + "}");
    sub_basis = basis_text(br.basis());
    sub_gram = matrix_text(br.sub().lattice().gram());
    ok = verify_branch(br, b, order);
  }
  const auto counted = count(parts);
  if (cfg.format == "json") {
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : parts) ps.push_back({{"part", p}, {"multiplicity", counted.at(p)}});
    nlohmann::json o = {{"parent", to_string(m)},
                        {"sublattice", {{"basis", nlohmann::json::parse(sub_basis)}, {"gram", nlohmann::json::parse(sub_gram)}}},
                        {"parts", ps},
                        {"order", cfg.order},
                        {"verified", ok}};
    out << o.dump(2) << '\n';
  } else {
    emit_rows(out, {{"parent", to_string(m)}, {"sublattice_basis", sub_basis}, {"sublattice_gram", sub_gram}});
    std::vector<std::string> seen;
    for (const auto& p : parts) {
      if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
      seen.push_back(p);
      out << "part\t" << p << '\t' << counted.at(p) << '\n';
    }
    out << "verified\t" << (ok ? "true" : "false") << '\t' << "order " << cfg.order << '\n';
  }
  return kOk;
}

inline int cmd_verify(const std::string& path, std::ostream& out) {
  const auto doc = read_json_file(path);
  VerifyReport rep;
  try {
    rep = verify_certificate(doc);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(InputErrorKind::BadSchema, std::string("certificate: ") + e.what());
  }
  if (!rep.ok) {
    for (const auto& e : rep.errors) out << "error\t" << e << '\n';
    throw CommandError("certificate check failed");
  }
  const std::string verdict = doc.at("verdict").get<std::string>();
  out << "verified\t" << doc.at("pairs").size() << " pairs\n" << "verdict\t" << verdict << '\n';
  return verdict == "Rational" ? kOk : kIncomplete;
}

inline RuleKind rule_from_name(const std::string& s) {
  for (RuleKind k : {RuleKind::WeightGap, RuleKind::Vacuum, RuleKind::Duality, RuleKind::FusionObstruction})
    if (s == to_string(k)) return k;
  throw CommandError("unknown rule: " + s);
}

inline int cmd_certify(const Config& cfg, const std::string& out_path, const std::string& cocycle, const std::string& branch,
                       const std::vector<std::string>& without, std::ostream& out) {
  if (cfg.gram_path.empty()) throw CommandError("certify: a Gram matrix file is required unless --verify is given");
  CertifyOptions opt;
  opt.jobs = cfg.jobs;
  opt.conventions.cocycle = cocycle == "lower-unit" ? CocycleNormalization::LowerUnit : CocycleNormalization::UpperUnit;
  opt.conventions.branch = branch == "alternate" ? SqrtBranch::Alternate : SqrtBranch::Principal;
  for (const auto& w : without) opt.disabled.insert(rule_from_name(w));
  const ExtCertificate cert = certify(read_lattice(cfg.gram_path), opt);
  const std::string text = to_json(cert).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InputError(InputErrorKind::FileNotFound, "cannot write file: " + out_path);
    f << text;
    emit_rows(out, {{"verdict", cert.verdict()},
                    {"pairs", std::to_string(cert.pairs.size())},
                    {"unknown", std::to_string(cert.unknown().size())},
                    {"certificate", out_path}});
  }
  for (const auto& [a, b] : cert.unknown()) out << "uncovered\t" << to_string(a) << '\t' << to_string(b) << '\n';
  return cert.rational() ? kOk : kIncomplete;
}

inline void add_common(CLI::App* sub, Config& cfg, bool gram_required = true) {
  auto* g = sub->add_option("gram", cfg.gram_path, "JSON file with the Gram matrix, {\"gram\": [[...]]}");
  if (gram_required) g->required();
  sub->add_option("--order,-N", cfg.order, "truncation order of q-series")
      ->envname("VLPLUS_ORDER")
      ->check(CLI::Range(1L, 1000000L))
      ->capture_default_str();
  sub->add_option("--format", cfg.format, "output format")
      ->envname("VLPLUS_FORMAT")
      ->check(CLI::IsMember({"json", "tsv"}))
      ->capture_default_str();
  sub->add_option("--jobs,-j", cfg.jobs, "worker threads")->envname("VLPLUS_JOBS")->check(CLI::Range(1u, 1024u))->capture_default_str();
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Modules, characters, fusion rules, branchings and Ext-vanishing certificates for V_L^+"};
  app.name("vlplus");
  app.require_subcommand(1, 1);
  Config cfg;

  auto* analyze = app.add_subcommand("analyze", "lattice report: determinant, discriminant group, norm-2 vectors, sublattice");
  add_common(analyze, cfg);
  auto* modules = app.add_subcommand("modules", "table of irreducible modules");
  add_common(modules, cfg);

  std::vector<std::string> char_modules;
  auto* chr = app.add_subcommand("char", "q-series of characters");
  add_common(chr, cfg);
  chr->add_option("--module,-m", char_modules, "module label (repeatable; default all)");

  std::vector<std::string> triple;
  std::string batch;
  auto* fusion = app.add_subcommand("fusion", "fusion rule of type (M3; M1 M2)");
  add_common(fusion, cfg);
  fusion->add_option("labels", triple, "M1 M2 M3")->expected(0, 3);
  fusion->add_option("--batch", batch, "JSON file with a list of [M1, M2, M3] triples");
  fusion->add_option("--oracle", cfg.oracle_path, "JSON table of sign data")->envname("VLPLUS_ORACLE");

  std::string module, sublattice = "auto";
  auto* decompose = app.add_subcommand("decompose", "branching to a sublattice or an orthogonal basis");
  add_common(decompose, cfg);
  decompose->add_option("--module,-m", module, "module label")->required();
  decompose->add_option("--sublattice", sublattice, "auto | orthogonal | JSON file with a basis")->capture_default_str();

  std::string cert_out, verify_path, cocycle = "upper-unit", branch = "principal";
  std::vector<std::string> without;
  auto* cert = app.add_subcommand("certify", "Ext-vanishing certificate for every ordered pair of modules");
  add_common(cert, cfg, false);
  cert->add_option("--out,-o", cert_out, "write the certificate to this file");
  cert->add_option("--verify", verify_path, "re-check an existing certificate file");
  cert->add_option("--cocycle", cocycle, "cocycle normalization")->check(CLI::IsMember({"upper-unit", "lower-unit"}))->capture_default_str();
  cert->add_option("--sqrt-branch", branch, "square-root branch")->check(CLI::IsMember({"principal", "alternate"}))->capture_default_str();
  cert->add_option("--without", without, "disable a rule (negative control)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (modules->parsed()) return cmd_modules(cfg, out);
    if (chr->parsed()) return cmd_char(cfg, char_modules, out);
    if (fusion->parsed()) return cmd_fusion(cfg, triple, batch, out);
    if (decompose->parsed()) return cmd_decompose(cfg, module, sublattice, out);
    if (cert->parsed()) {
      if (!verify_path.empty()) return cmd_verify(verify_path, out);
      return cmd_certify(cfg, cert_out, cocycle, branch, without, out);
    }
  } catch (const LatticeError& e) {
    err << "error: invalid lattice: " << e.what() << '\n';
    return kInvalid;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const LabelError& e) {
    err << "error: invalid label: " << e.what() << '\n';
    return kInvalid;
  } catch (const FusionError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const BranchingError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kUsage;
}

}  // namespace vlplus::cli
