#pragma once

// Fusion-rule queries: the complete rank-one rows, the general case analysis for an untwisted
// first argument, and the tensor-product factorisation.

#include "vlplus/modules.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vlplus {

struct FusionAnswer {
  enum class Value { Zero, One, Unknown };
  Value value = Value::Zero;
  std::string reason;

  static FusionAnswer zero() { return {Value::Zero, {}}; }
  static FusionAnswer one() { return {Value::One, {}}; }
  static FusionAnswer unknown(std::string why) { return {Value::Unknown, std::move(why)}; }
  static FusionAnswer from_bool(bool b) { return b ? one() : zero(); }

  bool is_zero() const { return value == Value::Zero; }
  bool is_one() const { return value == Value::One; }
  bool is_unknown() const { return value == Value::Unknown; }

  friend bool operator==(const FusionAnswer& a, const FusionAnswer& b) { return a.value == b.value; }
};

inline std::string to_string(const FusionAnswer& a) {
  switch (a.value) {
    case FusionAnswer::Value::Zero: return "0";
    case FusionAnswer::Value::One: return "1";
    case FusionAnswer::Value::Unknown: return "unknown";
  }
  return "?";
}

/// Sign data that only refines a fixed nonzero pattern into its +/- parts. Either function may be
/// empty; queries needing an absent one answer Unknown.
struct SignOracle {
  /// pi(lambda, 2 mu) in {+1, -1}; 0 means the value is not known
  std::function<int(const DualVector& lambda, const LatticeVector& two_mu)> pi;
  /// c_chi(lambda) in {+1, -1}; 0 means the value is not known
  std::function<int(std::uint32_t chi, const DualVector& lambda)> c_chi;
};

enum class FusionErrorKind { UnsupportedRow, UnsupportedFirstArgument, RankMismatch };

class FusionError : public std::invalid_argument {
 public:
  FusionError(FusionErrorKind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  FusionErrorKind kind() const { return kind_; }

 private:
  FusionErrorKind kind_;
};

/// p*lambda + q*mu + r*nu in L for some signs, decided on discriminant-group coordinates.
inline bool admissible_triple(const EvenLattice& L, const DiscriminantGroup& g, const DualVector& lambda,
                              const DualVector& mu, const DualVector& nu) {
  const IntVector a = g.coordinates(L, lambda);
  const IntVector b = g.coordinates(L, mu);
  const IntVector c = g.coordinates(L, nu);
  for (int q : {1, -1})
    for (int r : {1, -1}) {
      bool ok = true;
      for (std::size_t i = 0; i < a.size() && ok; ++i) ok = (a[i] + q * b[i] + r * c[i]) % g.invariant_factors[i] == 0;
      if (ok) return true;
    }
  return false;
}

inline bool admissible_triple(const EvenLattice& L, const CosetElement& lambda, const CosetElement& mu, const CosetElement& nu) {
  return admissible_triple(L, discriminant_group(L), lambda.rep, mu.rep, nu.rep);
}

inline FusionAnswer tensor_fusion(const std::vector<FusionAnswer>& factors) {
  bool unknown = false;
  std::string why;
  for (const auto& f : factors) {
    if (f.is_zero()) return FusionAnswer::zero();
    if (f.is_unknown()) {
      unknown = true;
      if (why.empty()) why = f.reason;
    }
  }
  return unknown ? FusionAnswer::unknown(why) : FusionAnswer::one();
}

/// Rows W1 = V+ and W1 = V- of the fusion table of a rank-one lattice Z alpha, (alpha, alpha) = 2k.
/// Labels are those of classify_modules on the Gram matrix [[2k]].
inline FusionAnswer rank1_fusion(long k, const ModuleLabel& w1, const ModuleLabel& w2, const ModuleLabel& w3) {
  if (k <= 0) throw std::invalid_argument("rank1_fusion: k must be positive");
  if (w1.coset.rep.size() != 1 || w2.coset.rep.size() != 1 || w3.coset.rep.size() != 1)
    throw FusionError(FusionErrorKind::RankMismatch, "rank1_fusion: labels must belong to a rank-one lattice");
  if (w1.kind == ModuleKind::VacPlus) return FusionAnswer::from_bool(w2 == w3);
  if (w1.kind != ModuleKind::VacMinus)
    throw FusionError(FusionErrorKind::UnsupportedRow, "rank1_fusion: only the V+ and V- rows are available");
  if (w2.kind != w3.kind) {
    const bool both_vacuum = w2.is_vacuum() && w3.is_vacuum();
    return FusionAnswer::from_bool(both_vacuum);  // (V+, V-) and (V-, V+)
  }
  switch (w2.kind) {
    case ModuleKind::Untw: return FusionAnswer::from_bool(w2.coset == w3.coset);
    case ModuleKind::CosetPM: return FusionAnswer::from_bool(w2.coset == w3.coset && w2.sign == -w3.sign);
    case ModuleKind::TwistedPM: return FusionAnswer::from_bool(w2.chi == w3.chi && w2.sign == -w3.sign);
    default: return FusionAnswer::zero();  // (V+, V+) and (V-, V-)
  }
}

/// Fusion rule of type (M3; M1 M2) for M1 untwisted (vacuum, orbit or signed coset).
///
/// The vacuum module V- is handled as the signed coset of lambda = 0. Sign data at lambda in L or
/// mu in L is fixed by the unit law and the rank-one rows; elsewhere it comes from the oracle.
inline FusionAnswer fusion_dim(const SectorRegistry& reg, const ModuleLabel& m1, const ModuleLabel& m2, const ModuleLabel& m3,
                               const SignOracle& oracle = {}) {
  if (m1.is_twisted())
    throw FusionError(FusionErrorKind::UnsupportedFirstArgument, "fusion_dim: the first argument must be untwisted");
  if (m1.kind == ModuleKind::VacPlus) return FusionAnswer::from_bool(m2 == m3);

  const int twisted = int(m2.is_twisted()) + int(m3.is_twisted());
  if (twisted == 1) return FusionAnswer::zero();

  const EvenLattice& L = reg.lattice();
  const DualVector& lambda = m1.coset.rep;  // zero for V-
  const bool lambda_in_l = EvenLattice::in_lattice(lambda);
  // 1: orbit module; 2: V^+_{lambda+L}; 3: V^-_{lambda+L} (including V- itself)
  const int kase = m1.kind == ModuleKind::Untw ? 1 : (m1.sign > 0 ? 2 : 3);
  const bool same_sign = m2.sign == m3.sign;

  if (twisted == 2) {
    if (m3.chi != (m2.chi ^ reg.character_shift(lambda))) return FusionAnswer::zero();
    if (kase == 1) return FusionAnswer::one();
    int c = 1;
    if (!lambda_in_l) {
      if (!oracle.c_chi) return FusionAnswer::unknown("c_chi undefined");
      c = oracle.c_chi(m2.chi, lambda);
      if (c == 0) return FusionAnswer::unknown("c_chi undefined");
    }
    return FusionAnswer::from_bool(kase == 2 ? same_sign == (c == 1) : same_sign == (c == -1));
  }

  const DualVector& mu = m2.coset.rep;
  const DualVector& nu = m3.coset.rep;
  if (!admissible_triple(L, reg.discriminant(), lambda, mu, nu)) return FusionAnswer::zero();
  const bool orbit2 = m2.kind == ModuleKind::Untw;
  const bool orbit3 = m3.kind == ModuleKind::Untw;
  if (orbit2 && orbit3) return FusionAnswer::one();
  if (orbit2 != orbit3) return FusionAnswer::from_bool(kase == 1);
  if (kase == 1) return FusionAnswer::zero();

  int pi = 1;
  if (!lambda_in_l && !EvenLattice::in_lattice(mu)) {
    if (!oracle.pi) return FusionAnswer::unknown("pi undefined");
    LatticeVector two_mu(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) two_mu[i] = numerator(2 * mu[i]);
    pi = oracle.pi(lambda, two_mu);
    if (pi == 0) return FusionAnswer::unknown("pi undefined");
  }
  return FusionAnswer::from_bool(kase == 2 ? same_sign == (pi == 1) : same_sign == (pi == -1));
}

inline FusionAnswer fusion_dim(const EvenLattice& L, const ModuleLabel& m1, const ModuleLabel& m2, const ModuleLabel& m3,
                               const SignOracle& oracle = {}) {
  return fusion_dim(SectorRegistry(L), m1, m2, m3, oracle);
}

}  // namespace vlplus
