#pragma once

// Graded dimensions of the irreducible modules, in true L(0)-weights.

#include "vlplus/modules.hpp"
#include "vlplus/qseries.hpp"

namespace vlplus {

/// Caches the shared ingredients (phi^{-d}, psi^{-d}, twisted products) for one lattice and order.
class CharacterTable {
 public:
  CharacterTable(const SectorRegistry& reg, Rational order)
      : reg_(reg),
        order_(std::move(order)),
        denom_(series_denominator(reg.lattice())),
        d_(static_cast<std::int64_t>(reg.lattice().rank())),
        phi_inv_(euler_product_inv(d_, order_, EulerVariant::Minus, denom_)),
        psi_inv_(euler_product_inv(d_, order_, EulerVariant::Plus, denom_)),
        half_minus_(euler_product_inv(d_, order_, EulerVariant::HalfMinus, denom_)),
        half_plus_(euler_product_inv(d_, order_, EulerVariant::HalfPlus, denom_)) {}

  const Rational& order() const { return order_; }
  std::int64_t denom() const { return denom_; }
  const QSeries& phi_inv() const { return phi_inv_; }

  QSeries character(const ModuleLabel& m) const {
    const EvenLattice& L = reg_.lattice();
    const Rational half(1, 2);
    switch (m.kind) {
      case ModuleKind::VacPlus:
      case ModuleKind::VacMinus: {
        QSeries theta = theta_coset(L, RatVector(L.rank(), Rational(0)), order_);
        QSeries body = half * ((theta - QSeries::one(denom_, order_)) * phi_inv_);
        QSeries osc = m.kind == ModuleKind::VacPlus ? phi_inv_ + psi_inv_ : phi_inv_ - psi_inv_;
        return body + half * osc;
      }
      case ModuleKind::Untw: return theta_coset(L, m.coset, order_) * phi_inv_;
      case ModuleKind::CosetPM: return half * (theta_coset(L, m.coset, order_) * phi_inv_);
      case ModuleKind::TwistedPM: {
        QSeries osc = m.sign > 0 ? half_minus_ + half_plus_ : half_minus_ - half_plus_;
        Rational scale = Rational(reg_.dim_t()) * half;
        return scale * (QSeries::monomial(Rational(d_, 16), 1, denom_, order_) * osc);
      }
    }
    return QSeries(denom_, order_);
  }

 private:
  const SectorRegistry& reg_;
  Rational order_;
  std::int64_t denom_;
  std::int64_t d_;
  QSeries phi_inv_;
  QSeries psi_inv_;
  QSeries half_minus_;
  QSeries half_plus_;
};

inline QSeries character(const SectorRegistry& reg, const ModuleLabel& m, const Rational& order) {
  return CharacterTable(reg, order).character(m);
}

inline QSeries character(const EvenLattice& L, const ModuleLabel& m, const Rational& order) {
  SectorRegistry reg(L);
  return CharacterTable(reg, order).character(m);
}

}  // namespace vlplus
