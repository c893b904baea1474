#include "test_support.hpp"
#include "vlplus/characters.hpp"

#include <catch_amalgamated.hpp>

#include <array>
#include <map>

using namespace vlplus;
using namespace vlplus::testing;

namespace {

/// Number of oscillator monomials in d colours, split by parity of the number of oscillators.
/// Keys are 2*weight; parts are n (integral moding) or n - 1/2 (half-integral moding).
struct StateCount {
  std::map<long, std::array<long, 2>> by_weight;  // [even, odd]
};

void fill_states(long colours, bool half, long limit2, std::vector<long>& parts2, std::size_t slot, long weight2, long count,
                 StateCount& out) {
  if (slot == parts2.size()) {
    out.by_weight[weight2][count % 2] += 1;
    return;
  }
  const long p = parts2[slot];
  for (long mult = 0; weight2 + mult * p < limit2; ++mult) fill_states(colours, half, limit2, parts2, slot + 1, weight2 + mult * p, count + mult, out);
}

/// Explicit enumeration of multisets of oscillators h_c(-n), weight strictly below limit.
StateCount oscillator_states(long colours, bool half, long limit) {
  std::vector<long> parts2;
  for (long c = 0; c < colours; ++c)
    for (long n = 1;; ++n) {
      long p2 = half ? 2 * n - 1 : 2 * n;
      if (p2 >= 2 * limit) break;
      parts2.push_back(p2);
    }
  StateCount out;
  fill_states(colours, half, 2 * limit, parts2, 0, 0, 0, out);
  return out;
}

/// Independent graded-dimension count for a module label: oscillator monomials tensored with lattice
/// vectors, keeping theta-invariant (or anti-invariant) combinations.
QSeries brute_force_character(const SectorRegistry& reg, const ModuleLabel& m, long order) {
  const EvenLattice& L = reg.lattice();
  const long d = static_cast<long>(L.rank());
  QSeries out(series_denominator(L), order);
  if (m.kind == ModuleKind::TwistedPM) {
    auto states = oscillator_states(d, true, order);
    const int parity = m.sign > 0 ? 0 : 1;
    for (const auto& [w2, cnt] : states.by_weight)
      out.add_term(Rational(d, 16) + Rational(w2, 2), Rational(reg.dim_t()) * Rational(cnt[parity]));
    return out;
  }
  auto states = oscillator_states(d, false, order);
  const RatVector shift = m.is_vacuum() ? RatVector(d, Rational(0)) : m.coset.rep;
  for (const auto& v : box_enumerate(L, coset_key(shift), 2 * order)) {
    const Rational w = L.norm(v) / 2;
    const bool zero = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
    for (const auto& [w2, cnt] : states.by_weight) {
      Rational total = w + Rational(w2, 2);
      if (m.kind == ModuleKind::Untw) {
        out.add_term(total, cnt[0] + cnt[1]);
      } else if (zero) {
        out.add_term(total, cnt[m.sign > 0 ? 0 : 1]);
      } else {
        out.add_term(total, Rational(cnt[0] + cnt[1], 2));
      }
    }
  }
  return out;
}

std::vector<Rational> coeffs(const QSeries& s, long n) {
  std::vector<Rational> out;
  for (long i = 0; i < n; ++i) out.push_back(s.coeff(i));
  return out;
}

}  // namespace

TEST_CASE("series arithmetic", "[qseries]") {
  QSeries a(4, 3);
  a.add_term(0, 1);
  a.add_term(Rational(1, 4), 2);
  a.add_term(5, 7);  // beyond the order, dropped
  CHECK(a.size() == 2);
  QSeries b(2, 2);
  b.add_term(Rational(1, 2), -1);
  auto c = a * b;
  CHECK(c.order() == 2);
  CHECK(c.denom() == 4);
  CHECK(c.coeff(Rational(1, 2)) == -1);
  CHECK(c.coeff(Rational(3, 4)) == -2);
  auto s = a + b;
  CHECK(s.order() == 2);
  CHECK(s.size() == 3);
  CHECK((a - a).empty());
  CHECK((Rational(1, 2) * a).coeff(Rational(1, 4)) == 1);
  CHECK(a.rescaled(8) == a);
  CHECK_THROWS(a.rescaled(6));
  CHECK_THROWS(QSeries(3, 2).add_term(Rational(1, 2), 1));
}

TEST_CASE("inverse Euler products", "[qseries]") {
  auto p = euler_product_inv(1, 4);
  CHECK(coeffs(p, 4) == std::vector<Rational>{1, 1, 2, 3});
  CHECK(p.size() == 4);

  // prod (1+q^n)^{-1} = 1 - q + 0 q^2 + ...
  auto alt = euler_product_inv(1, 3, EulerVariant::Plus);
  CHECK(coeffs(alt, 3) == std::vector<Rational>{1, -1, 0});

  auto trivial = euler_product_inv(0, 5);
  CHECK(trivial == QSeries::one(2, 5));

  // explicit multipartition counts
  for (long d = 1; d <= 3; ++d) {
    for (bool half : {false, true}) {
      auto states = oscillator_states(d, half, 7);
      auto minus = euler_product_inv(d, 7, half ? EulerVariant::HalfMinus : EulerVariant::Minus);
      auto plus = euler_product_inv(d, 7, half ? EulerVariant::HalfPlus : EulerVariant::Plus);
      for (const auto& [w2, cnt] : states.by_weight) {
        CHECK(minus.coeff(Rational(w2, 2)) == cnt[0] + cnt[1]);
        CHECK(plus.coeff(Rational(w2, 2)) == cnt[0] - cnt[1]);
      }
    }
  }
}

TEST_CASE("coset theta series", "[qseries]") {
  auto a1 = lattice({{2}});
  auto t0 = theta_coset(a1, RatVector{0}, 3);
  CHECK(t0.terms() == std::vector<std::pair<Rational, Rational>>{{0, 1}, {1, 2}});
  auto t1 = theta_coset(a1, RatVector{Rational(1, 2)}, 2);
  CHECK(t1.terms() == std::vector<std::pair<Rational, Rational>>{{Rational(1, 4), 2}});

  for (const auto& L : small_lattices()) {
    QSeries sum(series_denominator(L), 5);
    for (const auto& c : minimal_coset_reps(L)) {
      auto t = theta_coset(L, c, 5);
      CHECK(t == theta_coset(L, negate(c.rep), 5));
      sum += t;
    }
    CHECK(sum == theta_dual(L, 5));
  }
}

TEST_CASE("theta series are multiplicative over orthogonal sums", "[qseries]") {
  auto a1 = lattice({{2}});
  auto a2 = lattice({{2, 1}, {1, 2}});
  auto sum = lattice({{2, 0, 0}, {0, 2, 1}, {0, 1, 2}});
  auto lhs = theta_coset(sum, RatVector(3, Rational(0)), 6);
  auto rhs = theta_coset(a1, RatVector{0}, 6) * theta_coset(a2, RatVector{0, 0}, 6);
  CHECK(lhs == rhs);
  auto lhs2 = theta_coset(sum, RatVector{Rational(1, 2), Rational(1, 3), Rational(1, 3)}, 6);
  auto rhs2 = theta_coset(a1, RatVector{Rational(1, 2)}, 6) * theta_coset(a2, RatVector{Rational(1, 3), Rational(1, 3)}, 6);
  CHECK(lhs2 == rhs2);
}

TEST_CASE("vacuum character examples", "[qseries]") {
  auto a1 = lattice({{2}});
  auto vp = character(a1, ModuleLabel::vac_plus(1), 3);
  CHECK(vp.terms() == std::vector<std::pair<Rational, Rational>>{{0, 1}, {1, 1}, {2, 2}});
  auto tm = character(a1, ModuleLabel::twisted(1, 0, -1), 2);
  CHECK(tm.leading_term()->first == Rational(9, 16));
}

TEST_CASE("characters agree with explicit state counts", "[qseries][oracle]") {
  for (const auto& L : small_lattices()) {
    SectorRegistry reg(L);
    const long order = L.rank() == 3 ? 4 : 6;
    CharacterTable table(reg, order);
    for (const auto& m : reg.labels()) {
      INFO("det " << L.det() << " label " << to_string(m));
      CHECK(table.character(m) == brute_force_character(reg, m, order));
    }
  }
}

TEST_CASE("vacuum pair adds up to the full lattice character", "[qseries]") {
  for (const auto& L : small_lattices()) {
    SectorRegistry reg(L);
    CharacterTable table(reg, 6);
    auto full = table.character(ModuleLabel::vac_plus(L.rank())) + table.character(ModuleLabel::vac_minus(L.rank()));
    CHECK(full == theta_coset(L, RatVector(L.rank(), Rational(0)), 6) * table.phi_inv());
  }
}

TEST_CASE("raising the order only extends a series", "[qseries]") {
  for (const auto& L : small_lattices()) {
    SectorRegistry reg(L);
    CharacterTable small(reg, 3), large(reg, 6);
    for (const auto& m : reg.labels()) CHECK(large.character(m).truncated(3) == small.character(m));
  }
}
