#pragma once

// Census of irreducible modules of the fixed-point subalgebra, with the data attached to each
// label: lowest weight, top-level dimension, contragredient, and the block sizes of the
// associative algebra whose simple modules are the top levels.

#include "vlplus/lattice.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vlplus {

enum class ModuleKind { VacPlus, VacMinus, Untw, CosetPM, TwistedPM };

/// Character of R/2L (R the radical of the form mod 2): bit k of `index` set means value -1 on
/// the k-th radical basis vector.
struct CentralCharacter {
  std::uint32_t index = 0;
  std::size_t r2 = 0;
  Integer dim_t = 1;

  int value(std::size_t k) const { return ((index >> k) & 1u) ? -1 : 1; }
  std::vector<int> values() const {
    std::vector<int> v(r2);
    for (std::size_t k = 0; k < r2; ++k) v[k] = value(k);
    return v;
  }
};

struct ModuleLabel {
  ModuleKind kind = ModuleKind::VacPlus;
  CosetElement coset;    // Untw / CosetPM only (zero coset for the vacuum labels)
  int sign = 1;          // +1 / -1; 0 for Untw
  std::uint32_t chi = 0;  // TwistedPM only

  static ModuleLabel vac_plus(std::size_t d) { return {ModuleKind::VacPlus, {RatVector(d, Rational(0)), 0}, 1, 0}; }
  static ModuleLabel vac_minus(std::size_t d) { return {ModuleKind::VacMinus, {RatVector(d, Rational(0)), 0}, -1, 0}; }
  static ModuleLabel untwisted(CosetElement c) { return {ModuleKind::Untw, std::move(c), 0, 0}; }
  static ModuleLabel coset_pm(CosetElement c, int s) { return {ModuleKind::CosetPM, std::move(c), s, 0}; }
  static ModuleLabel twisted(std::size_t d, std::uint32_t chi, int s) {
    return {ModuleKind::TwistedPM, {RatVector(d, Rational(0)), 0}, s, chi};
  }

  bool is_twisted() const { return kind == ModuleKind::TwistedPM; }
  bool is_vacuum() const { return kind == ModuleKind::VacPlus || kind == ModuleKind::VacMinus; }
  /// Labels carrying a +/- refinement (vacuum, coset and twisted pairs).
  bool is_signed() const { return kind != ModuleKind::Untw; }

  friend bool operator==(const ModuleLabel& a, const ModuleLabel& b) {
    return a.kind == b.kind && a.coset == b.coset && a.sign == b.sign && a.chi == b.chi;
  }
  /// Kind first; cosets by (min_norm, coordinates); characters by index; '+' before '-'.
  friend std::strong_ordering operator<=>(const ModuleLabel& a, const ModuleLabel& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (a.coset.min_norm != b.coset.min_norm)
      return a.coset.min_norm < b.coset.min_norm ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = lex_compare(a.coset.rep, b.coset.rep); c != 0) return c;
    if (auto c = a.chi <=> b.chi; c != 0) return c;
    return b.sign <=> a.sign;
  }
};

inline std::string sign_char(int s) { return s > 0 ? "+" : "-"; }

inline std::string to_string(const ModuleLabel& m) {
  switch (m.kind) {
    case ModuleKind::VacPlus: return "V+";
    case ModuleKind::VacMinus: return "V-";
    case ModuleKind::Untw: return "U[" + join(m.coset.rep) + "]";
    case ModuleKind::CosetPM: return "C[" + join(m.coset.rep) + "]" + sign_char(m.sign);
    case ModuleKind::TwistedPM: return "T[" + std::to_string(m.chi) + "]" + sign_char(m.sign);
  }
  return "?";
}

class LabelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool twice_in_lattice(const DualVector& v) {
  for (const auto& x : v)
    if (!is_integer(2 * x)) return false;
  return true;
}

/// All the per-lattice data the registry needs, computed once.
class SectorRegistry {
 public:
  explicit SectorRegistry(EvenLattice lattice)
      : lattice_(std::move(lattice)),
        discriminant_(discriminant_group(lattice_)),
        cosets_(minimal_coset_reps(lattice_)),
        mod2_(mod_two_data(lattice_)),
        l2_size_(norm2_vectors(lattice_).size()) {
    const std::size_t d = lattice_.rank();
    if ((d - mod2_.r2) % 2 != 0) throw std::logic_error("radical has the wrong parity");
    dim_t_ = Integer(1) << static_cast<unsigned>((d - mod2_.r2) / 2);
    build_labels();
  }

  const EvenLattice& lattice() const { return lattice_; }
  const DiscriminantGroup& discriminant() const { return discriminant_; }
  const std::vector<CosetElement>& cosets() const { return cosets_; }
  const ModTwoData& mod2() const { return mod2_; }
  std::size_t l2_size() const { return l2_size_; }
  const Integer& dim_t() const { return dim_t_; }
  std::uint32_t character_count() const { return 1u << mod2_.r2; }
  const std::vector<ModuleLabel>& labels() const { return labels_; }

  CentralCharacter central_character(std::uint32_t index) const { return {index, mod2_.r2, dim_t_}; }

  /// Canonical Untw representative of the orbit {lambda, -lambda}.
  CosetElement orbit_rep(const DualVector& lambda) const {
    CosetElement a = canonical_coset_element(lattice_, lambda);
    CosetElement b = canonical_coset_element(lattice_, negate(lambda));
    return lex_compare(a.rep, b.rep) <= 0 ? a : b;
  }

  /// Label of the untwisted module built on lambda + L carrying the given sign when it is signed.
  ModuleLabel untwisted_label(const DualVector& lambda, int sign) const {
    if (EvenLattice::in_lattice(lambda)) return sign > 0 ? ModuleLabel::vac_plus(rank()) : ModuleLabel::vac_minus(rank());
    if (twice_in_lattice(lambda)) return ModuleLabel::coset_pm(canonical_coset_element(lattice_, lambda), sign);
    return ModuleLabel::untwisted(orbit_rep(lambda));
  }

  Rational lowest_weight(const ModuleLabel& m) const {
    switch (m.kind) {
      case ModuleKind::VacPlus: return 0;
      case ModuleKind::VacMinus: return 1;
      case ModuleKind::Untw:
      case ModuleKind::CosetPM: return m.coset.min_norm / 2;
      case ModuleKind::TwistedPM:
        return m.sign > 0 ? Rational(rank(), 16) : Rational(rank() + 8, 16);
    }
    return 0;
  }

  Integer top_level_dimension(const ModuleLabel& m) const {
    const std::size_t d = rank();
    switch (m.kind) {
      case ModuleKind::VacPlus: return 1;
      case ModuleKind::VacMinus: return Integer(d + l2_size_ / 2);
      case ModuleKind::Untw: return Integer(delta_set(lattice_, m.coset).size());
      case ModuleKind::CosetPM: return Integer(delta_set(lattice_, m.coset).size() / 2);
      case ModuleKind::TwistedPM: return m.sign > 0 ? dim_t_ : Integer(d) * dim_t_;
    }
    return 0;
  }

  /// Characters of R/2L change by the quadratic form on dualisation; coset signs flip iff
  /// 2(lambda, lambda) is odd.
  ModuleLabel contragredient(const ModuleLabel& m) const {
    ModuleLabel out = m;
    if (m.kind == ModuleKind::CosetPM) {
      Rational twice = 2 * m.coset.min_norm;
      if (numerator(twice) % 2 != 0) out.sign = -m.sign;
    } else if (m.kind == ModuleKind::TwistedPM) {
      std::uint32_t shift = 0;
      for (std::size_t k = 0; k < mod2_.r2; ++k)
        if (quadratic_mod2(lattice_, lift(mod2_.radical_basis[k]))) shift |= 1u << k;
      out.chi = m.chi ^ shift;
    }
    return out;
  }

  /// chi^{(lambda)}(a) = (-1)^{(a, lambda)} chi(a) on the radical basis, as an index XOR mask.
  std::uint32_t character_shift(const DualVector& lambda) const {
    std::uint32_t shift = 0;
    for (std::size_t k = 0; k < mod2_.r2; ++k) {
      Rational p = lattice_.pair(to_rational(lift(mod2_.radical_basis[k])), lambda);
      if (!is_integer(p)) throw LatticeError(LatticeErrorKind::NotInDual, "shift vector is not in the dual lattice");
      if (numerator(p) % 2 != 0) shift |= 1u << k;
    }
    return shift;
  }

  /// Parses "V+", "V-", "U[a,b]", "C[a,b]+", "T[k]-" (coordinates may name any member of the coset).
  ModuleLabel parse_label(std::string_view text) const {
    auto fail = [&](const std::string& why) { return LabelError("invalid module label '" + std::string(text) + "': " + why); };
    if (text == "V+") return ModuleLabel::vac_plus(rank());
    if (text == "V-") return ModuleLabel::vac_minus(rank());
    if (text.size() < 3 || text[1] != '[') throw fail("unknown form");
    const char kind = text[0];
    const auto close = text.find(']');
    if (close == std::string_view::npos) throw fail("missing ']'");
    const std::string_view inner = text.substr(2, close - 2);
    const std::string_view tail = text.substr(close + 1);
    int sign = 0;
    if (tail == "+") sign = 1;
    else if (tail == "-") sign = -1;
    else if (!tail.empty()) throw fail("unexpected suffix");

    if (kind == 'T') {
      if (sign == 0) throw fail("twisted labels need a sign");
      std::uint32_t idx = 0;
      try {
        Rational r = parse_rational(inner);
        if (!is_integer(r) || r < 0 || r >= character_count()) throw fail("character index out of range");
        idx = static_cast<std::uint32_t>(to_i64(numerator(r)));
      } catch (const std::invalid_argument& e) {
        throw fail(e.what());
      }
      return ModuleLabel::twisted(rank(), idx, sign);
    }

    DualVector lambda;
    try {
      std::size_t start = 0;
      while (start <= inner.size()) {
        auto comma = inner.find(',', start);
        if (comma == std::string_view::npos) comma = inner.size();
        lambda.push_back(parse_rational(inner.substr(start, comma - start)));
        start = comma + 1;
      }
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
    if (lambda.size() != rank()) throw fail("expected " + std::to_string(rank()) + " coordinates");
    if (!lattice_.in_dual(lambda)) throw fail("vector is not in the dual lattice");
    if (kind == 'U') {
      if (sign != 0) throw fail("orbit labels carry no sign");
      if (twice_in_lattice(lambda)) throw fail("2*lambda lies in L; use V or C labels");
      return ModuleLabel::untwisted(orbit_rep(lambda));
    }
    if (kind == 'C') {
      if (sign == 0) throw fail("coset labels need a sign");
      if (EvenLattice::in_lattice(lambda)) throw fail("lambda lies in L; use V+ or V-");
      if (!twice_in_lattice(lambda)) throw fail("2*lambda is not in L; use a U label");
      return ModuleLabel::coset_pm(canonical_coset_element(lattice_, lambda), sign);
    }
    throw fail("unknown kind");
  }

 private:
  std::size_t rank() const { return lattice_.rank(); }

  void build_labels() {
    const std::size_t d = rank();
    labels_.push_back(ModuleLabel::vac_plus(d));
    labels_.push_back(ModuleLabel::vac_minus(d));
    std::vector<ModuleLabel> orbit, signed_cosets;
    for (std::size_t i = 1; i < cosets_.size(); ++i) {
      const auto& c = cosets_[i];
      if (twice_in_lattice(c.rep)) {
        signed_cosets.push_back(ModuleLabel::coset_pm(c, 1));
        signed_cosets.push_back(ModuleLabel::coset_pm(c, -1));
      } else {
        auto u = ModuleLabel::untwisted(orbit_rep(c.rep));
        if (std::find(orbit.begin(), orbit.end(), u) == orbit.end()) orbit.push_back(u);
      }
    }
    std::sort(orbit.begin(), orbit.end());
    labels_.insert(labels_.end(), orbit.begin(), orbit.end());
    labels_.insert(labels_.end(), signed_cosets.begin(), signed_cosets.end());
    for (std::uint32_t chi = 0; chi < character_count(); ++chi) {
      labels_.push_back(ModuleLabel::twisted(d, chi, 1));
      labels_.push_back(ModuleLabel::twisted(d, chi, -1));
    }
  }

  EvenLattice lattice_;
  DiscriminantGroup discriminant_;
  std::vector<CosetElement> cosets_;
  ModTwoData mod2_;
  std::size_t l2_size_;
  Integer dim_t_;
  std::vector<ModuleLabel> labels_;
};

inline std::vector<ModuleLabel> classify_modules(const EvenLattice& L) { return SectorRegistry(L).labels(); }

inline Rational lowest_weight(const EvenLattice& L, const ModuleLabel& m) { return SectorRegistry(L).lowest_weight(m); }

inline Integer top_level_dimension(const EvenLattice& L, const ModuleLabel& m) { return SectorRegistry(L).top_level_dimension(m); }

inline ModuleLabel contragredient(const EvenLattice& L, const ModuleLabel& m) { return SectorRegistry(L).contragredient(m); }

struct ZhuBlockReport {
  Integer dim_au;
  Integer dim_at;
  Integer dim_ah;
  Integer total_semisimple_dim;
};

inline ZhuBlockReport zhu_block_report(const SectorRegistry& reg) {
  const std::size_t d = reg.lattice().rank();
  ZhuBlockReport r;
  const Integer vm = Integer(d + reg.l2_size() / 2);
  const Integer two_d = Integer(1) << static_cast<unsigned>(d);
  r.dim_au = vm * vm;
  r.dim_at = Integer(d * d) * two_d;
  r.dim_ah = two_d;
  r.total_semisimple_dim = 0;
  for (const auto& m : reg.labels()) {
    Integer t = reg.top_level_dimension(m);
    r.total_semisimple_dim += t * t;
  }
  return r;
}

inline ZhuBlockReport zhu_block_report(const EvenLattice& L) { return zhu_block_report(SectorRegistry(L)); }

}  // namespace vlplus
