#include "test_support.hpp"
#include "vlplus/certifier.hpp"

#include <catch_amalgamated.hpp>

using namespace vlplus;
using namespace vlplus::testing;

namespace {

std::vector<EvenLattice> certificate_lattices() {
  return {lattice({{2}}),           lattice({{4}}), lattice({{2, 0}, {0, 2}}), lattice({{2, 0}, {0, 4}}),
          lattice({{2, 1}, {1, 2}}), lattice({{2, 0, 0}, {0, 2, 0}, {0, 0, 4}})};
}

const Conventions kAlternate{CocycleNormalization::LowerUnit, SqrtBranch::Alternate};

}  // namespace

TEST_CASE("weight-gap rule", "[certifier]") {
  ExtCertifier ctx(lattice({{2}}));
  const auto& reg = ctx.registry();
  auto j = ctx.weight_gap(reg.parse_label("V+"), reg.parse_label("T[0]+"));
  REQUIRE(j);
  CHECK(j->gap == Rational(-1, 16));
  CHECK(ctx.weight_gap(reg.parse_label("C[1/2]+"), reg.parse_label("C[1/2]+")));
  CHECK_FALSE(ctx.weight_gap(reg.parse_label("V+"), reg.parse_label("V-")));
}

TEST_CASE("vacuum rule", "[certifier]") {
  ExtCertifier ctx(lattice({{2, 0}, {0, 4}}));
  const auto& reg = ctx.registry();
  CHECK(ctx.vacuum(reg.parse_label("V-"), reg.parse_label("V+")));
  CHECK_FALSE(ctx.vacuum(reg.parse_label("V+"), reg.parse_label("V-")));
  CHECK_FALSE(ctx.vacuum(reg.parse_label("V-"), reg.parse_label("U[0,1/4]")));
}

TEST_CASE("fusion obstruction on A2 through the sublattice", "[certifier]") {
  ExtCertifier ctx(lattice({{2, 1}, {1, 2}}));
  REQUIRE(ctx.sublattice_route_enabled());
  CHECK(ctx.sub_index() == 2);
  const auto& reg = ctx.registry();
  const auto u = reg.parse_label("U[1/3,1/3]");
  for (const char* t : {"T[0]+", "T[0]-"}) {
    auto j = ctx.fusion_obstruction(reg.parse_label(t), u, Route::Sublattice);
    REQUIRE(j);
    CHECK(j->triples > 0);
  }
  CHECK(ctx.fusion_obstruction(u, reg.parse_label("V+"), Route::Sublattice));
  CHECK(ctx.fusion_obstruction(u, reg.parse_label("V-"), Route::Sublattice));
  // same coset and twisted pairs are outside the rule
  CHECK_FALSE(ctx.fusion_obstruction(u, u, Route::Sublattice));
  CHECK_FALSE(ctx.fusion_obstruction(reg.parse_label("V-"), reg.parse_label("V+"), Route::Sublattice));
  CHECK_FALSE(ctx.fusion_obstruction(reg.parse_label("T[0]+"), reg.parse_label("T[0]-"), Route::Orthogonal));
}

TEST_CASE("the sublattice route is off when the sublattice is the lattice itself", "[certifier]") {
  ExtCertifier ctx(lattice({{2, 0}, {0, 4}}));
  CHECK_FALSE(ctx.sublattice_route_enabled());
  const auto& reg = ctx.registry();
  CHECK_FALSE(ctx.fusion_obstruction(reg.parse_label("C[1/2,0]+"), reg.parse_label("V+"), Route::Sublattice));
  CHECK(ctx.fusion_obstruction(reg.parse_label("C[1/2,0]+"), reg.parse_label("V+"), Route::Orthogonal));
}

TEST_CASE("duality rule", "[certifier]") {
  ExtCertifier ctx(lattice({{2}}));
  const auto& reg = ctx.registry();
  auto j = ctx.justify(reg.parse_label("V+"), reg.parse_label("V-"));
  REQUIRE(j);
  CHECK(j->name() == "Duality(Vacuum)");
  CHECK(to_string(j->inner_m1) == "V-");
  CHECK(to_string(j->inner_m2) == "V+");
  // 2(lambda, lambda) = 1 is odd: the dual pair carries the opposite sign
  auto any = [](const ModuleLabel&, const ModuleLabel&) -> std::optional<Justification> { return Justification{}; };
  auto d = ctx.duality(reg.parse_label("C[1/2]+"), reg.parse_label("V+"), any);
  REQUIRE(d);
  CHECK(to_string(d->inner_m1) == "V+");
  CHECK(to_string(d->inner_m2) == "C[-1/2]-");
}

TEST_CASE("certificates on the reference lattices", "[certifier]") {
  for (const auto& L : certificate_lattices()) {
    ExtCertifier ctx(L);
    auto cert = ctx.certify(2);
    INFO("det " << L.det());
    CHECK(cert.verdict() == "Rational");
    CHECK(cert.unknown().empty());
    const auto n = ctx.registry().labels().size();
    CHECK(cert.pairs.size() == n * n);
    auto report = verify_certificate(to_json(cert));
    CHECK(report.ok);

    for (const auto& p : cert.pairs) {
      REQUIRE(p.justification);
      const auto& j = *p.justification;
      // invariants: every Duality unwraps once to a rule holding on the dual pair
      if (j.rule == RuleKind::Duality) {
        CHECK(j.inner->rule != RuleKind::Duality);
        CHECK(ctx.check(j.inner_m1, j.inner_m2, *j.inner));
      }
      // the pairs listed as settled by weights alone
      const bool same = p.m1 == p.m2;
      const bool opposite = p.m1.kind == ModuleKind::CosetPM && p.m2.kind == ModuleKind::CosetPM && p.m1.coset == p.m2.coset;
      const bool twisted = p.m1.is_twisted() && p.m2.is_twisted();
      if (same || opposite || twisted) CHECK(ctx.weight_gap(p.m1, p.m2).has_value());
    }
  }
  CHECK(ExtCertifier(lattice({{2}})).certify().pairs.size() == 64);
  CHECK(ExtCertifier(lattice({{2, 1}, {1, 2}})).certify().pairs.size() == 25);
}

TEST_CASE("certificates on further lattices, including the sublattice route", "[certifier]") {
  std::vector<EvenLattice> extra = small_lattices();
  extra.push_back(lattice({{2, 1}, {1, 8}}));
  extra.push_back(lattice({{6, 3}, {3, 6}}));
  extra.push_back(lattice({{2, -1, 0, 0}, {-1, 2, -1, -1}, {0, -1, 2, 0}, {0, -1, 0, 2}}));
  std::size_t sublattice_uses = 0;
  for (const auto& L : extra) {
    auto cert = certify(L);
    INFO("det " << L.det() << " rank " << L.rank());
    CHECK(cert.rational());
    CHECK(verify_certificate(to_json(cert)).ok);
    for (const auto& p : cert.pairs)
      if (p.justification && p.justification->name() == "FusionObstruction[sublattice]") ++sublattice_uses;
  }
  CHECK(sublattice_uses > 0);
}

TEST_CASE("certificates are deterministic and independent of the job count", "[certifier]") {
  auto L = lattice({{2, 0, 0}, {0, 2, 0}, {0, 0, 4}});
  const std::string one = to_json(certify(L, {{}, 1, {}})).dump(2);
  const std::string four = to_json(certify(L, {{}, 4, {}})).dump(2);
  CHECK(one == four);
  CHECK(one == to_json(certify(L)).dump(2));
}

TEST_CASE("rule choices do not depend on the sign conventions", "[certifier]") {
  auto lattices = certificate_lattices();
  lattices.push_back(lattice({{2, 1}, {1, 8}}));
  lattices.push_back(lattice({{8, 2}, {2, 8}}));
  for (const auto& L : lattices) {
    for (const auto& conv : {kAlternate, Conventions{CocycleNormalization::LowerUnit, SqrtBranch::Principal},
                             Conventions{CocycleNormalization::UpperUnit, SqrtBranch::Alternate}}) {
      CHECK(certify(L).rule_map() == certify(L, {conv, 1, {}}).rule_map());
    }
  }
}

TEST_CASE("every rule kind is needed somewhere", "[certifier]") {
  for (RuleKind k : {RuleKind::WeightGap, RuleKind::Vacuum, RuleKind::Duality, RuleKind::FusionObstruction}) {
    INFO(to_string(k));
    bool uncovered = false;
    for (const auto& L : certificate_lattices()) {
      auto cert = certify(L, {{}, 1, {k}});
      if (!cert.rational()) {
        uncovered = true;
        CHECK(cert.verdict() == "Incomplete");
      }
    }
    CHECK(uncovered);
  }
}

TEST_CASE("the checker rejects tampered certificates", "[certifier]") {
  auto json = to_json(certify(lattice({{2, 0}, {0, 4}})));
  REQUIRE(verify_certificate(json).ok);

  auto wrong_rule = json;
  for (auto& e : wrong_rule["pairs"])
    if (e["pair"][0] == "V+" && e["pair"][1] == "V-") e["justification"] = {{"rule", "Vacuum"}};
  CHECK_FALSE(verify_certificate(wrong_rule).ok);

  auto wrong_gap = json;
  wrong_gap["pairs"][0]["justification"]["gap"] = "1/2";
  CHECK_FALSE(verify_certificate(wrong_gap).ok);

  auto missing = json;
  missing["pairs"].erase(missing["pairs"].begin() + 3);
  CHECK_FALSE(verify_certificate(missing).ok);

  auto verdict = json;
  verdict["pairs"][5].erase("justification");
  CHECK_FALSE(verify_certificate(verdict).ok);  // verdict still says Rational

  auto unknown_rule = json;
  unknown_rule["pairs"][0]["justification"]["rule"] = "Magic";
  CHECK_THROWS(verify_certificate(unknown_rule));
}
