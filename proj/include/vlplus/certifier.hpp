#pragma once

// Ext^1 vanishing certificates. For every ordered pair (M1, M2) of irreducible modules the
// certifier looks for a rule forcing Ext^1(M2, M1) = 0:
//
//   WeightGap          lowest weights differ by a non-integer or by zero
//   Vacuum             (V-, V+): a vacuum-like vector inside a copy of V_L^+
//   Duality            some base rule applies to the contragredient pair (M2', M1')
//   FusionObstruction  all fusion rules I_U(N1; N N2) vanish for a rational subalgebra U with the
//                      same Virasoro element, N1, N, N2 running over irreducible U-submodules of
//                      M1, V_L^+ and M2
//
// Rules are tried in the fixed order WeightGap, Vacuum, Duality(WeightGap/Vacuum),
// FusionObstruction(sublattice), FusionObstruction(orthogonal), Duality(FusionObstruction) and the
// first success is recorded. Pairs no rule covers are reported, never assumed away.

#include "vlplus/branching.hpp"
#include "vlplus/fusion.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

namespace vlplus {

enum class RuleKind { WeightGap, Vacuum, Duality, FusionObstruction };
enum class Route { Sublattice, Orthogonal };

inline const char* to_string(RuleKind k) {
  switch (k) {
    case RuleKind::WeightGap: return "WeightGap";
    case RuleKind::Vacuum: return "Vacuum";
    case RuleKind::Duality: return "Duality";
    case RuleKind::FusionObstruction: return "FusionObstruction";
  }
  return "?";
}

inline const char* to_string(Route r) { return r == Route::Sublattice ? "sublattice" : "orthogonal"; }

inline const char* to_string(CocycleNormalization c) { return c == CocycleNormalization::UpperUnit ? "upper-unit" : "lower-unit"; }
inline const char* to_string(SqrtBranch b) { return b == SqrtBranch::Principal ? "principal" : "alternate"; }

struct Justification {
  RuleKind rule = RuleKind::WeightGap;
  Rational gap;                 // WeightGap: lowest_weight(M1) - lowest_weight(M2)
  Route route = Route::Sublattice;
  std::size_t triples = 0;      // FusionObstruction: number of vanishing triples checked
  ModuleLabel inner_m1, inner_m2;                // Duality: the contragredient pair
  std::shared_ptr<const Justification> inner;    // Duality: its justification (never Duality)

  /// Compact rule name, e.g. "Duality(FusionObstruction[orthogonal])".
  std::string name() const {
    switch (rule) {
      case RuleKind::Duality: return std::string("Duality(") + inner->name() + ")";
      case RuleKind::FusionObstruction: return std::string("FusionObstruction[") + to_string(route) + "]";
      default: return to_string(rule);
    }
  }

  std::string citation() const {
    switch (rule) {
      case RuleKind::WeightGap:
        return "lowest weights differ by a non-integer or by zero; the extension splits on top levels since the Zhu "
               "algebra is semisimple";
      case RuleKind::Vacuum:
        return "a copy of V_L^+ under a rational subalgebra with the same Virasoro element contains u with "
               "L(-1)u = L(0)u = 0, which generates a complement";
      case RuleKind::Duality: return "Ext^1(N, M) = 0 if and only if Ext^1(M', N') = 0";
      case RuleKind::FusionObstruction:
        return "every fusion rule I_U(N1; N N2) over irreducible U-submodules of M1, V_L^+, M2 is zero, so the "
               "extension is a V_L^+-module direct sum";
    }
    return {};
  }
};

struct PairRecord {
  ModuleLabel m1, m2;
  std::optional<Justification> justification;
};

struct ExtCertificate {
  IntMatrix gram;
  Conventions conventions;
  std::vector<LatticeVector> sub_basis;  // orthogonal sublattice used by the fusion obstruction
  Integer sub_index;
  std::vector<PairRecord> pairs;  // ordered as labels x labels

  std::vector<std::pair<ModuleLabel, ModuleLabel>> unknown() const {
    std::vector<std::pair<ModuleLabel, ModuleLabel>> out;
    for (const auto& p : pairs)
      if (!p.justification) out.emplace_back(p.m1, p.m2);
    return out;
  }
  bool rational() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const PairRecord& p) { return p.justification.has_value(); });
  }
  std::string verdict() const { return rational() ? "Rational" : "Incomplete"; }

  /// Pair -> rule name lines, the part of a certificate that must not depend on conventions.
  std::vector<std::string> rule_map() const {
    std::vector<std::string> out;
    for (const auto& p : pairs)
      out.push_back(to_string(p.m1) + " " + to_string(p.m2) + " " + (p.justification ? p.justification->name() : "none"));
    return out;
  }
};

struct CertifyOptions {
  Conventions conventions;
  unsigned jobs = 1;
  std::set<RuleKind> disabled;  // for negative controls
};

/// Shared data for evaluating rules on one lattice: the registry, the orthogonal sublattice and
/// the branchings of every label to both subalgebras.
class ExtCertifier {
 public:
  explicit ExtCertifier(const EvenLattice& L, Conventions conv = {})
      : reg_(std::make_shared<const SectorRegistry>(L)), conv_(conv) {
    const auto orth = orthogonal_sublattice(L);
    basis_ = orth.basis;
    index_ = orth.index;
    sub_ = std::make_unique<SublatticeBrancher>(reg_, basis_, conv_);
    // index one means U = V_L^+ itself, which cannot be assumed rational
    sub_route_ = index_ > 1;
    orth_ = std::make_unique<OrthogonalBrancher>(sub_->sub_ptr(), conv_);
    for (const auto& m : reg_->labels()) {
      sub_parts_.push_back(sublattice_parts(m));
      orth_parts_.push_back(orthogonal_parts(m, sub_parts_.back()));
    }
    for (std::size_t i = 0; i < orth_->rank(); ++i) factor_k_.push_back(to_i64(sub_->sub().lattice().gram()(i, i) / 2));
  }

  const SectorRegistry& registry() const { return *reg_; }
  const Conventions& conventions() const { return conv_; }
  const std::vector<LatticeVector>& sub_basis() const { return basis_; }
  const Integer& sub_index() const { return index_; }
  bool sublattice_route_enabled() const { return sub_route_; }

  std::optional<Justification> weight_gap(const ModuleLabel& m1, const ModuleLabel& m2) const {
    const Rational gap = reg_->lowest_weight(m1) - reg_->lowest_weight(m2);
    if (is_integer(gap) && gap != 0) return std::nullopt;
    Justification j;
    j.rule = RuleKind::WeightGap;
    j.gap = gap;
    return j;
  }

  std::optional<Justification> vacuum(const ModuleLabel& m1, const ModuleLabel& m2) const {
    if (m1.kind != ModuleKind::VacMinus || m2.kind != ModuleKind::VacPlus) return std::nullopt;
    Justification j;
    j.rule = RuleKind::Vacuum;
    return j;
  }

  /// Applies to pairs from distinct cosets of L (or exactly one twisted module); pairs inside one
  /// coset are left to the weight-gap and vacuum rules.
  bool fusion_scope(const ModuleLabel& m1, const ModuleLabel& m2) const {
    if (m1.is_twisted() || m2.is_twisted()) return m1.is_twisted() != m2.is_twisted();
    return coset_key(m1.coset.rep) != coset_key(m2.coset.rep);
  }

  std::optional<Justification> fusion_obstruction(const ModuleLabel& m1, const ModuleLabel& m2, Route route) const {
    if (!fusion_scope(m1, m2)) return std::nullopt;
    const std::size_t i = index_of(m1), j = index_of(m2), v = index_of(ModuleLabel::vac_plus(reg_->lattice().rank()));
    std::size_t count = 0;
    if (route == Route::Sublattice) {
      if (!sub_route_) return std::nullopt;
      for (const auto& n1 : sub_parts_[i])
        for (const auto& n : sub_parts_[v])
          for (const auto& n2 : sub_parts_[j]) {
            if (!sub_triple_vanishes(n1, n, n2)) return std::nullopt;
            ++count;
          }
    } else {
      for (const auto& n1 : orth_parts_[i])
        for (const auto& n : orth_parts_[v])
          for (const auto& n2 : orth_parts_[j]) {
            if (!orth_triple_vanishes(n1, n, n2)) return std::nullopt;
            ++count;
          }
    }
    Justification out;
    out.rule = RuleKind::FusionObstruction;
    out.route = route;
    out.triples = count;
    return out;
  }

  /// A base rule (never Duality) applied to the contragredient pair (M2', M1').
  template <class Base>
  std::optional<Justification> duality(const ModuleLabel& m1, const ModuleLabel& m2, Base&& base) const {
    const ModuleLabel d1 = reg_->contragredient(m2), d2 = reg_->contragredient(m1);
    auto inner = base(d1, d2);
    if (!inner) return std::nullopt;
    Justification j;
    j.rule = RuleKind::Duality;
    j.inner_m1 = d1;
    j.inner_m2 = d2;
    j.inner = std::make_shared<const Justification>(std::move(*inner));
    return j;
  }

  std::optional<Justification> justify(const ModuleLabel& m1, const ModuleLabel& m2, const std::set<RuleKind>& disabled = {}) const {
    auto on = [&](RuleKind k) { return disabled.count(k) == 0; };
    if (on(RuleKind::WeightGap))
      if (auto j = weight_gap(m1, m2)) return j;
    if (on(RuleKind::Vacuum))
      if (auto j = vacuum(m1, m2)) return j;
    if (on(RuleKind::Duality)) {
      auto cheap = [&](const ModuleLabel& a, const ModuleLabel& b) -> std::optional<Justification> {
        if (on(RuleKind::WeightGap))
          if (auto j = weight_gap(a, b)) return j;
        if (on(RuleKind::Vacuum)) return vacuum(a, b);
        return std::nullopt;
      };
      if (auto j = duality(m1, m2, cheap)) return j;
    }
    if (on(RuleKind::FusionObstruction)) {
      if (auto j = fusion_obstruction(m1, m2, Route::Sublattice)) return j;
      if (auto j = fusion_obstruction(m1, m2, Route::Orthogonal)) return j;
      if (on(RuleKind::Duality)) {
        auto fo = [&](const ModuleLabel& a, const ModuleLabel& b) -> std::optional<Justification> {
          if (auto j = fusion_obstruction(a, b, Route::Sublattice)) return j;
          return fusion_obstruction(a, b, Route::Orthogonal);
        };
        if (auto j = duality(m1, m2, fo)) return j;
      }
    }
    return std::nullopt;
  }

  /// Re-evaluates a recorded justification on its pair.
  bool check(const ModuleLabel& m1, const ModuleLabel& m2, const Justification& j) const {
    switch (j.rule) {
      case RuleKind::WeightGap: {
        auto again = weight_gap(m1, m2);
        return again && again->gap == j.gap;
      }
      case RuleKind::Vacuum: return vacuum(m1, m2).has_value();
      case RuleKind::FusionObstruction: {
        auto again = fusion_obstruction(m1, m2, j.route);
        return again && again->triples == j.triples;
      }
      case RuleKind::Duality:
        if (!j.inner || j.inner->rule == RuleKind::Duality) return false;
        if (!(j.inner_m1 == reg_->contragredient(m2)) || !(j.inner_m2 == reg_->contragredient(m1))) return false;
        return check(j.inner_m1, j.inner_m2, *j.inner);
    }
    return false;
  }

  ExtCertificate certify(unsigned jobs = 1, const std::set<RuleKind>& disabled = {}) const {
    ExtCertificate cert;
    cert.gram = reg_->lattice().gram();
    cert.conventions = conv_;
    cert.sub_basis = basis_;
    cert.sub_index = index_;
    const auto& labels = reg_->labels();
    const std::size_t n = labels.size();
    cert.pairs.resize(n * n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < n * n; k = next++) {
        const auto& m1 = labels[k / n];
        const auto& m2 = labels[k % n];
        cert.pairs[k] = PairRecord{m1, m2, justify(m1, m2, disabled)};
      }
    };
    jobs = std::max(1u, jobs);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return cert;
  }

 private:
  std::size_t index_of(const ModuleLabel& m) const {
    const auto& ls = reg_->labels();
    auto it = std::lower_bound(ls.begin(), ls.end(), m);
    if (it == ls.end() || !(*it == m)) throw LabelError("label not in the registry: " + to_string(m));
    return static_cast<std::size_t>(it - ls.begin());
  }

  /// Irreducible V_{L1}^+-submodules; a twisted placeholder is replaced by every twisted module
  /// of the same sign, a superset of its actual constituents.
  std::vector<ModuleLabel> sublattice_parts(const ModuleLabel& m) const {
    if (index_ == 1) return {m};  // same basis, same labels
    auto b = sub_->branch(m);
    std::vector<ModuleLabel> out = b.parts;
    if (b.twisted)
      for (const auto& t : sub_->placeholder_candidates(*b.twisted)) out.push_back(t);
    return out;
  }

  std::vector<std::vector<ModuleLabel>> orthogonal_parts(const ModuleLabel& m, const std::vector<ModuleLabel>& sub_parts) const {
    std::set<std::vector<ModuleLabel>> out;
    for (const auto& p : sub_parts)
      for (auto& tuple : orth_->branch(p).parts) out.insert(std::move(tuple));
    (void)m;
    return {out.begin(), out.end()};
  }

  bool sub_triple_vanishes(const ModuleLabel& n1, const ModuleLabel& n, const ModuleLabel& n2) const {
    try {
      return fusion_dim(sub_->sub(), n, n2, n1).is_zero();
    } catch (const FusionError&) {
      return false;
    }
  }

  bool orth_triple_vanishes(const std::vector<ModuleLabel>& n1, const std::vector<ModuleLabel>& n,
                            const std::vector<ModuleLabel>& n2) const {
    std::vector<FusionAnswer> factors;
    for (std::size_t f = 0; f < n.size(); ++f) {
      try {
        factors.push_back(rank1_fusion(factor_k_[f], n[f], n2[f], n1[f]));
      } catch (const FusionError& e) {
        factors.push_back(FusionAnswer::unknown(e.what()));
      }
      if (factors.back().is_zero()) return true;
    }
    return tensor_fusion(factors).is_zero();
  }

  std::shared_ptr<const SectorRegistry> reg_;
  Conventions conv_;
  std::vector<LatticeVector> basis_;
  Integer index_;
  bool sub_route_ = false;
  std::unique_ptr<SublatticeBrancher> sub_;
  std::unique_ptr<OrthogonalBrancher> orth_;
  std::vector<std::vector<ModuleLabel>> sub_parts_;
  std::vector<std::vector<std::vector<ModuleLabel>>> orth_parts_;
  std::vector<long> factor_k_;
};

inline ExtCertificate certify(const EvenLattice& L, const CertifyOptions& opt = {}) {
  return ExtCertifier(L, opt.conventions).certify(opt.jobs, opt.disabled);
}

// ---------------------------------------------------------------------------------------------
// JSON form

namespace detail {

inline nlohmann::json int_matrix_json(const IntMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_i64(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

inline nlohmann::json justification_json(const Justification& j) {
  nlohmann::json o;
  o["rule"] = to_string(j.rule);
  switch (j.rule) {
    case RuleKind::WeightGap: o["gap"] = to_string(j.gap); break;
    case RuleKind::Vacuum: o["subalgebra"] = "tensor product of rank-one fixed-point algebras"; break;
    case RuleKind::FusionObstruction:
      o["route"] = to_string(j.route);
      o["triples"] = j.triples;
      break;
    case RuleKind::Duality:
      o["dual_pair"] = {to_string(j.inner_m1), to_string(j.inner_m2)};
      o["inner"] = justification_json(*j.inner);
      break;
  }
  o["citation"] = j.citation();
  return o;
}

}  // namespace detail

inline nlohmann::json to_json(const ExtCertificate& c) {
  nlohmann::json o;
  o["lattice"] = {{"gram", detail::int_matrix_json(c.gram)}};
  o["conventions"] = {{"cocycle", to_string(c.conventions.cocycle)},
                      {"sqrt_branch", to_string(c.conventions.branch)},
                      {"sqrt_of_minus_one", c.conventions.branch == SqrtBranch::Principal ? "i" : "-i"}};
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& v : c.sub_basis) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& x : v) r.push_back(to_i64(x));
    basis.push_back(r);
  }
  o["sublattice"] = {{"basis", basis}, {"index", to_i64(c.sub_index)}};
  nlohmann::json pairs = nlohmann::json::array();
  nlohmann::json unknown = nlohmann::json::array();
  for (const auto& p : c.pairs) {
    nlohmann::json e;
    e["pair"] = {to_string(p.m1), to_string(p.m2)};
    if (p.justification) {
      e["justification"] = detail::justification_json(*p.justification);
    } else {
      unknown.push_back(e["pair"]);
    }
    pairs.push_back(e);
  }
  o["pairs"] = pairs;
  o["unknown"] = unknown;
  o["verdict"] = c.verdict();
  return o;
}

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> errors;
  void fail(std::string why) {
    ok = false;
    errors.push_back(std::move(why));
  }
};

inline Conventions conventions_from_json(const nlohmann::json& c) {
  Conventions conv;
  const std::string cocycle = c.at("cocycle").get<std::string>();
  const std::string branch = c.at("sqrt_branch").get<std::string>();
  if (cocycle == "upper-unit") conv.cocycle = CocycleNormalization::UpperUnit;
  else if (cocycle == "lower-unit") conv.cocycle = CocycleNormalization::LowerUnit;
  else throw std::invalid_argument("unknown cocycle normalization: " + cocycle);
  if (branch == "principal") conv.branch = SqrtBranch::Principal;
  else if (branch == "alternate") conv.branch = SqrtBranch::Alternate;
  else throw std::invalid_argument("unknown square-root branch: " + branch);
  return conv;
}

/// Rebuilds the lattice from the certificate and re-evaluates every recorded justification; the
/// rule chain itself is not consulted.
inline VerifyReport verify_certificate(const nlohmann::json& cert) {
  VerifyReport rep;
  const auto& g = cert.at("lattice").at("gram");
  IntMatrix gram(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].size() != g.size()) throw std::invalid_argument("gram matrix is not square");
    for (std::size_t j = 0; j < g.size(); ++j) gram(i, j) = Integer(g[i][j].get<std::int64_t>());
  }
  const ExtCertifier ctx(validate_even_lattice(gram), conventions_from_json(cert.at("conventions")));
  const auto& reg = ctx.registry();

  std::function<Justification(const nlohmann::json&)> parse = [&](const nlohmann::json& j) {
    Justification out;
    const std::string rule = j.at("rule").get<std::string>();
    if (rule == "WeightGap") {
      out.rule = RuleKind::WeightGap;
      out.gap = parse_rational(j.at("gap").get<std::string>());
    } else if (rule == "Vacuum") {
      out.rule = RuleKind::Vacuum;
    } else if (rule == "FusionObstruction") {
      out.rule = RuleKind::FusionObstruction;
      const std::string route = j.at("route").get<std::string>();
      if (route != "sublattice" && route != "orthogonal") throw std::invalid_argument("unknown route: " + route);
      out.route = route == "sublattice" ? Route::Sublattice : Route::Orthogonal;
      out.triples = j.at("triples").get<std::size_t>();
    } else if (rule == "Duality") {
      out.rule = RuleKind::Duality;
      out.inner_m1 = reg.parse_label(j.at("dual_pair").at(0).get<std::string>());
      out.inner_m2 = reg.parse_label(j.at("dual_pair").at(1).get<std::string>());
      out.inner = std::make_shared<const Justification>(parse(j.at("inner")));
    } else {
      throw std::invalid_argument("unknown rule: " + rule);
    }
    return out;
  };

  std::set<std::pair<ModuleLabel, ModuleLabel>> seen;
  std::size_t unknown = 0;
  for (const auto& e : cert.at("pairs")) {
    const auto m1 = reg.parse_label(e.at("pair").at(0).get<std::string>());
    const auto m2 = reg.parse_label(e.at("pair").at(1).get<std::string>());
    const std::string name = to_string(m1) + " " + to_string(m2);
    if (!seen.insert({m1, m2}).second) rep.fail("duplicate pair " + name);
    if (!e.contains("justification")) {
      ++unknown;
      continue;
    }
    if (!ctx.check(m1, m2, parse(e.at("justification")))) rep.fail("justification does not hold for " + name);
  }
  const std::size_t n = reg.labels().size();
  if (seen.size() != n * n) rep.fail("certificate covers " + std::to_string(seen.size()) + " of " + std::to_string(n * n) + " pairs");
  const std::string verdict = cert.at("verdict").get<std::string>();
  if (verdict != (unknown == 0 ? "Rational" : "Incomplete")) rep.fail("verdict " + verdict + " inconsistent with the pair list");
  if (cert.at("unknown").size() != unknown) rep.fail("unknown list inconsistent with the pair list");
  return rep;
}

}  // namespace vlplus
