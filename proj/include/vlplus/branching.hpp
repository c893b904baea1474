#pragma once

// Restriction of irreducible modules to the subalgebras attached to a full-rank sublattice L1
// (fixed points of V_{L1}) and to an orthogonal basis (tensor product of rank-one fixed-point
// algebras). Every decomposition can be checked as an exact identity of characters.

#include "vlplus/characters.hpp"

#include <bit>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

namespace vlplus {

/// Square root c_{2 lambda} of eps(2 lambda, 2 lambda): Principal takes 1 or i, Alternate the
/// negatives. c_0 = 1 in both.
enum class SqrtBranch { Principal, Alternate };

struct Conventions {
  CocycleNormalization cocycle = CocycleNormalization::UpperUnit;
  SqrtBranch branch = SqrtBranch::Principal;
};

class BranchingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

/// Powers of i modulo 4.
inline int sign_exponent(int s) { return s > 0 ? 0 : 2; }

inline int sqrt_exponent(const TwoCocycle& eps, const LatticeVector& two_lambda, SqrtBranch branch) {
  if (std::all_of(two_lambda.begin(), two_lambda.end(), [](const Integer& x) { return x == 0; })) return 0;
  int e = eps.sign(two_lambda, two_lambda) > 0 ? 0 : 1;
  if (branch == SqrtBranch::Alternate) e += 2;
  return e % 4;
}

inline LatticeVector to_integral(const RatVector& v) {
  LatticeVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!is_integer(v[i])) throw std::logic_error("expected an integral vector");
    out[i] = numerator(v[i]);
  }
  return out;
}

inline RatVector twice(const RatVector& v) {
  RatVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 2 * v[i];
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Sublattice branching

struct TwistedPlaceholder {
  int sign = 1;
  Integer total_dim;  // sum of the dimensions of the twisted-sector spaces of the parts
};

struct SublatticeBranch {
  ModuleLabel parent;
  std::vector<ModuleLabel> parts;            // labels of the sublattice registry
  std::optional<TwistedPlaceholder> twisted;  // set for twisted parents
};

class SublatticeBrancher {
 public:
  SublatticeBrancher(std::shared_ptr<const SectorRegistry> parent, std::vector<LatticeVector> basis, Conventions conv = {})
      : parent_(std::move(parent)), basis_(std::move(basis)), conv_(conv) {
    const EvenLattice& L = parent_->lattice();
    gammas_ = coset_reps_mod_sublattice(L, basis_);  // also validates full rank
    const IntMatrix b = basis_matrix(basis_);
    bt_ = to_rational(b.transposed());
    bt_inv_ = inverse(bt_);
    sub_ = std::make_shared<const SectorRegistry>(validate_even_lattice(sublattice_gram(L, basis_)));
    eps_ = epsilon_cocycle(L, conv_.cocycle);
  }

  const SectorRegistry& parent() const { return *parent_; }
  const SectorRegistry& sub() const { return *sub_; }
  std::shared_ptr<const SectorRegistry> sub_ptr() const { return sub_; }
  const std::vector<LatticeVector>& basis() const { return basis_; }
  const std::vector<LatticeVector>& coset_reps() const { return gammas_; }
  Integer index() const { return Integer(gammas_.size()); }

  /// Coordinates with respect to the sublattice basis.
  RatVector to_sub(const RatVector& x) const { return bt_inv_ * x; }
  RatVector from_sub(const RatVector& y) const { return bt_ * y; }

  SublatticeBranch branch(const ModuleLabel& m) const {
    SublatticeBranch out{m, {}, std::nullopt};
    const std::size_t d = parent_->lattice().rank();
    if (m.is_twisted()) {
      out.twisted = TwistedPlaceholder{m.sign, parent_->dim_t()};
      return out;
    }
    const DualVector lambda = m.is_vacuum() ? DualVector(d, Rational(0)) : m.coset.rep;
    std::vector<RatVector> seen;  // L1-coset keys already emitted
    for (const auto& gamma : gammas_) {
      RatVector mu(d);
      for (std::size_t i = 0; i < d; ++i) mu[i] = lambda[i] + Rational(gamma[i]);
      const RatVector y = to_sub(mu);
      const RatVector key = coset_key(y);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      if (!twice_in_lattice(y)) {
        seen.push_back(coset_key(negate(y)));
        out.parts.push_back(ModuleLabel::untwisted(sub_->orbit_rep(y)));
        continue;
      }
      if (m.kind == ModuleKind::Untw) throw std::logic_error("self-paired part under an orbit parent");
      out.parts.push_back(sub_->untwisted_label(y, m.sign * part_sign_ratio(lambda, y)));
    }
    std::sort(out.parts.begin(), out.parts.end());
    return out;
  }

  /// theta of the parent restricted to V_{mu+L1} equals r times the sublattice theta; returns r.
  int part_sign_ratio(const DualVector& lambda, const RatVector& mu_sub) const {
    const CosetElement mu1 = canonical_coset_element(sub_->lattice(), mu_sub);
    const RatVector mu1_l = from_sub(mu1.rep);
    RatVector a0(mu1_l.size());
    for (std::size_t i = 0; i < a0.size(); ++i) a0[i] = mu1_l[i] - lambda[i];
    const LatticeVector alpha0 = detail::to_integral(a0);
    const LatticeVector two_lambda = detail::to_integral(detail::twice(lambda));
    const LatticeVector two_mu1 = detail::to_integral(detail::twice(mu1_l));
    int e = detail::sqrt_exponent(eps_, two_lambda, conv_.branch);
    e += detail::sign_exponent(eps_.sign(alpha0, two_lambda));
    e += detail::sign_exponent(eps_.sign(two_mu1, alpha0));
    e -= detail::sqrt_exponent(eps_, two_mu1, conv_.branch);
    e = ((e % 4) + 4) % 4;
    if (e % 2 != 0) throw std::logic_error("sign ratio is not real");
    return e == 0 ? 1 : -1;
  }

  QSeries parts_character(const SublatticeBranch& b, const Rational& order) const {
    CharacterTable table(*sub_, order);
    QSeries sum(series_denominator(sub_->lattice()), order);
    for (const auto& p : b.parts) sum += table.character(p);
    if (b.twisted) {
      const Integer per = sub_->dim_t();
      if (b.twisted->total_dim % per != 0) throw std::logic_error("twisted dimension not divisible");
      sum += Rational(b.twisted->total_dim / per) * table.character(ModuleLabel::twisted(sub_->lattice().rank(), 0, b.twisted->sign));
    }
    return sum;
  }

  /// All twisted labels of the sublattice a twisted placeholder may consist of.
  std::vector<ModuleLabel> placeholder_candidates(const TwistedPlaceholder& t) const {
    std::vector<ModuleLabel> out;
    for (std::uint32_t chi = 0; chi < sub_->character_count(); ++chi)
      out.push_back(ModuleLabel::twisted(sub_->lattice().rank(), chi, t.sign));
    return out;
  }

 private:
  std::shared_ptr<const SectorRegistry> parent_;
  std::vector<LatticeVector> basis_;
  Conventions conv_;
  std::vector<LatticeVector> gammas_;
  RatMatrix bt_;
  RatMatrix bt_inv_;
  std::shared_ptr<const SectorRegistry> sub_;
  TwoCocycle eps_;
};

inline SublatticeBranch branch_sublattice(const EvenLattice& L, const std::vector<LatticeVector>& basis, const ModuleLabel& m,
                                          Conventions conv = {}) {
  return SublatticeBrancher(std::make_shared<const SectorRegistry>(L), basis, conv).branch(m);
}

inline bool verify_branch(const SublatticeBrancher& br, const SublatticeBranch& b, const Rational& order) {
  return character(br.parent(), b.parent, order) == br.parts_character(b, order);
}

// ---------------------------------------------------------------------------------------------
// Orthogonal-basis branching

struct OrthogonalBranch {
  ModuleLabel parent;
  std::vector<std::vector<ModuleLabel>> parts;  // one rank-one label per basis vector
};

class OrthogonalBrancher {
 public:
  explicit OrthogonalBrancher(std::shared_ptr<const SectorRegistry> reg, Conventions conv = {})
      : reg_(std::move(reg)), conv_(conv) {
    const EvenLattice& L = reg_->lattice();
    if (!is_diagonal(L.gram())) throw BranchingError("NotOrthogonalBase: Gram matrix is not diagonal");
    for (std::size_t i = 0; i < L.rank(); ++i) {
      IntMatrix g(1, 1);
      g(0, 0) = L.gram()(i, i);
      factors_.push_back(std::make_shared<const SectorRegistry>(validate_even_lattice(g)));
    }
  }

  const SectorRegistry& registry() const { return *reg_; }
  const SectorRegistry& factor(std::size_t i) const { return *factors_[i]; }
  std::size_t rank() const { return factors_.size(); }

  OrthogonalBranch branch(const ModuleLabel& m) const {
    OrthogonalBranch out{m, {}};
    const std::size_t d = rank();
    switch (m.kind) {
      case ModuleKind::VacPlus:
      case ModuleKind::VacMinus:
      case ModuleKind::CosetPM: {
        const DualVector lambda = m.is_vacuum() ? DualVector(d, Rational(0)) : m.coset.rep;
        // parity of the number of '-' factors: the sign of the parent times the ratio of theta
        // normalisations c_{2 lambda} / prod c_{2 k_i}
        std::size_t half = 0;
        for (const auto& k : lambda)
          if (!is_integer(k)) ++half;
        int ratio = 1;
        if (conv_.branch == SqrtBranch::Alternate && half > 0) ratio = (half % 2 == 1) ? 1 : -1;
        const int target = m.sign * ratio;
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
          const int minus = std::popcount(mask);
          if ((minus % 2 == 0) != (target > 0)) continue;
          std::vector<ModuleLabel> tuple;
          for (std::size_t i = 0; i < d; ++i)
            tuple.push_back(factors_[i]->untwisted_label(DualVector{lambda[i]}, (mask >> i) & 1u ? -1 : 1));
          out.parts.push_back(std::move(tuple));
        }
        break;
      }
      case ModuleKind::Untw: {
        std::vector<std::vector<ModuleLabel>> options(d);
        for (std::size_t i = 0; i < d; ++i) {
          const DualVector k{m.coset.rep[i]};
          if (twice_in_lattice(k)) {
            options[i] = {factors_[i]->untwisted_label(k, 1), factors_[i]->untwisted_label(k, -1)};
          } else {
            options[i] = {factors_[i]->untwisted_label(k, 0)};
          }
        }
        std::vector<ModuleLabel> tuple;
        expand(options, 0, tuple, out.parts);
        break;
      }
      case ModuleKind::TwistedPM: {
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
          const int minus = std::popcount(mask);
          if ((minus % 2 == 0) != (m.sign > 0)) continue;
          std::vector<ModuleLabel> tuple;
          for (std::size_t i = 0; i < d; ++i)
            tuple.push_back(ModuleLabel::twisted(1, (m.chi >> i) & 1u, (mask >> i) & 1u ? -1 : 1));
          out.parts.push_back(std::move(tuple));
        }
        break;
      }
    }
    return out;
  }

  QSeries parts_character(const OrthogonalBranch& b, const Rational& order) const {
    std::vector<CharacterTable> tables;
    for (const auto& f : factors_) tables.emplace_back(*f, order);
    QSeries sum(series_denominator(reg_->lattice()), order);
    for (const auto& tuple : b.parts) {
      QSeries prod = QSeries::one(1, order);
      for (std::size_t i = 0; i < tuple.size(); ++i) prod *= tables[i].character(tuple[i]);
      sum += prod;
    }
    return sum;
  }

 private:
  static void expand(const std::vector<std::vector<ModuleLabel>>& options, std::size_t i, std::vector<ModuleLabel>& tuple,
                     std::vector<std::vector<ModuleLabel>>& out) {
    if (i == options.size()) {
      out.push_back(tuple);
      return;
    }
    for (const auto& o : options[i]) {
      tuple.push_back(o);
      expand(options, i + 1, tuple, out);
      tuple.pop_back();
    }
  }

  std::shared_ptr<const SectorRegistry> reg_;
  Conventions conv_;
  std::vector<std::shared_ptr<const SectorRegistry>> factors_;
};

inline OrthogonalBranch branch_orthogonal(const EvenLattice& L, const ModuleLabel& m, Conventions conv = {}) {
  return OrthogonalBrancher(std::make_shared<const SectorRegistry>(L), conv).branch(m);
}

inline bool verify_branch(const OrthogonalBrancher& br, const OrthogonalBranch& b, const Rational& order) {
  return character(br.registry(), b.parent, order) == br.parts_character(b, order);
}

// ---------------------------------------------------------------------------------------------
// Rank one: assembly from modules of the fixed points of the Heisenberg algebra

/// Character of a rank-one label (lattice [[2k]]) summed from its M(1)^+-module constituents.
inline QSeries rank1_m1_branch(long k, const ModuleLabel& m, const Rational& order) {
  const std::int64_t denom = std::lcm<std::int64_t>(16, 4 * k);
  const QSeries phi = euler_product_inv(1, order, EulerVariant::Minus, denom);
  const QSeries psi = euler_product_inv(1, order, EulerVariant::Plus, denom);
  const Rational half(1, 2);
  // sum over j >= lo of M(1, (c + j) alpha), whose lowest weight is k (c + j)^2
  const long reach = to_i64(isqrt(floor(order / k))) + 2;
  auto lattice_part = [&](const Rational& c, long lo) {
    QSeries s(denom, order);
    for (long j = lo; j <= reach; ++j) s.add_term(Rational(k) * (c + j) * (c + j), 1);
    return s * phi;
  };
  switch (m.kind) {
    case ModuleKind::VacPlus:
    case ModuleKind::VacMinus: {
      QSeries m1 = half * (m.kind == ModuleKind::VacPlus ? phi + psi : phi - psi);
      return m1 + lattice_part(0, 1);
    }
    case ModuleKind::Untw: return lattice_part(m.coset.rep[0], -reach);
    case ModuleKind::CosetPM: return lattice_part(Rational(1, 2), 0);
    case ModuleKind::TwistedPM: {
      QSeries a = euler_product_inv(1, order, EulerVariant::HalfMinus, denom);
      QSeries b = euler_product_inv(1, order, EulerVariant::HalfPlus, denom);
      QSeries osc = m.sign > 0 ? a + b : a - b;
      return half * (QSeries::monomial(Rational(1, 16), 1, denom, order) * osc);
    }
  }
  return QSeries(denom, order);
}

}  // namespace vlplus
