#pragma once

#include "vlplus/lattice.hpp"

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vlplus {

/// Truncated formal series sum_{e < order} c_e q^e with exponents in (1/denom) Z and exact
/// rational coefficients. Zero coefficients are never stored.
class QSeries {
 public:
  QSeries() = default;
  QSeries(std::int64_t denom, Rational order) : denom_(denom), order_(std::move(order)) {
    if (denom_ <= 0) throw std::invalid_argument("QSeries: denominator must be positive");
  }

  static QSeries one(std::int64_t denom, const Rational& order) {
    QSeries s(denom, order);
    s.add_term(0, 1);
    return s;
  }
  static QSeries monomial(const Rational& exponent, const Rational& coeff, std::int64_t denom, const Rational& order) {
    QSeries s(denom, order);
    s.add_term(exponent, coeff);
    return s;
  }

  std::int64_t denom() const { return denom_; }
  const Rational& order() const { return order_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }

  /// Adds c q^e; terms at or beyond the truncation order are dropped.
  void add_term(const Rational& exponent, const Rational& c) {
    if (exponent >= order_ || c == 0) return;
    add_raw(key_of(exponent), c);
  }

  Rational coeff(const Rational& exponent) const {
    Rational scaled = exponent * Rational(denom_);
    if (!is_integer(scaled)) return 0;
    auto it = coeffs_.find(to_i64(numerator(scaled)));
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  std::vector<std::pair<Rational, Rational>> terms() const {
    std::vector<std::pair<Rational, Rational>> out;
    out.reserve(coeffs_.size());
    for (const auto& [k, c] : coeffs_) out.emplace_back(Rational(k, denom_), c);
    return out;
  }

  std::optional<std::pair<Rational, Rational>> leading_term() const {
    if (coeffs_.empty()) return std::nullopt;
    const auto& [k, c] = *coeffs_.begin();
    return std::make_pair(Rational(k, denom_), c);
  }

  QSeries rescaled(std::int64_t new_denom) const {
    if (new_denom % denom_ != 0) throw std::invalid_argument("QSeries: denominator must divide the new one");
    const std::int64_t f = new_denom / denom_;
    QSeries out(new_denom, order_);
    for (const auto& [k, c] : coeffs_) out.coeffs_.emplace(k * f, c);
    return out;
  }

  QSeries truncated(const Rational& order) const {
    QSeries out(denom_, std::min(order, order_));
    for (const auto& [k, c] : coeffs_)
      if (Rational(k, denom_) < out.order_) out.coeffs_.emplace(k, c);
    return out;
  }

  QSeries& operator+=(const QSeries& other) { return *this = *this + other; }
  QSeries& operator-=(const QSeries& other) { return *this = *this - other; }
  QSeries& operator*=(const QSeries& other) { return *this = *this * other; }

  friend QSeries operator+(const QSeries& a, const QSeries& b) { return combine(a, b, 1); }
  friend QSeries operator-(const QSeries& a, const QSeries& b) { return combine(a, b, -1); }

  friend QSeries operator*(const Rational& s, const QSeries& a) {
    QSeries out(a.denom_, a.order_);
    if (s == 0) return out;
    for (const auto& [k, c] : a.coeffs_) out.coeffs_.emplace(k, s * c);
    return out;
  }
  friend QSeries operator*(const QSeries& a, const Rational& s) { return s * a; }

  friend QSeries operator*(const QSeries& a, const QSeries& b) {
    const std::int64_t D = std::lcm(a.denom_, b.denom_);
    const QSeries x = a.rescaled(D), y = b.rescaled(D);
    QSeries out(D, std::min(a.order_, b.order_));
    const Rational limit = out.order_ * Rational(D);
    for (const auto& [ka, ca] : x.coeffs_)
      for (const auto& [kb, cb] : y.coeffs_) {
        if (Rational(ka + kb) >= limit) break;
        out.add_raw(ka + kb, ca * cb);
      }
    return out;
  }

  /// Equality of the represented truncated series (denominators may differ).
  friend bool operator==(const QSeries& a, const QSeries& b) {
    if (a.order_ != b.order_) return false;
    return a.terms() == b.terms();
  }

  /// "exponent<TAB>coefficient" per line, exact fractions.
  std::string to_tsv() const {
    std::string out;
    for (const auto& [e, c] : terms()) out += to_string(e) + "\t" + to_string(c) + "\n";
    return out;
  }

 private:
  std::int64_t key_of(const Rational& exponent) const {
    Rational scaled = exponent * Rational(denom_);
    if (!is_integer(scaled))
      throw std::invalid_argument("QSeries: exponent " + to_string(exponent) + " not a multiple of 1/" + std::to_string(denom_));
    return to_i64(numerator(scaled));
  }

  void add_raw(std::int64_t key, const Rational& c) {
    auto [it, inserted] = coeffs_.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    }
  }

  static QSeries combine(const QSeries& a, const QSeries& b, int sign) {
    const std::int64_t D = std::lcm(a.denom_, b.denom_);
    QSeries out(D, std::min(a.order_, b.order_));
    for (const auto& [k, c] : a.rescaled(D).coeffs_)
      if (Rational(k, D) < out.order_) out.add_raw(k, c);
    for (const auto& [k, c] : b.rescaled(D).coeffs_)
      if (Rational(k, D) < out.order_) out.add_raw(k, sign > 0 ? c : Rational(-c));
    return out;
  }

  std::int64_t denom_ = 1;
  Rational order_ = 0;
  std::map<std::int64_t, Rational> coeffs_;
};

/// Which infinite product prod_{n>=1} (1 + s q^{e_n})^{-d} to expand.
enum class EulerVariant {
  Minus,      // (1 - q^n)^{-d}
  Plus,       // (1 + q^n)^{-d}
  HalfMinus,  // (1 - q^{n-1/2})^{-d}
  HalfPlus,   // (1 + q^{n-1/2})^{-d}
};

inline Integer binomial(const Integer& n, std::int64_t k) {
  Integer r = 1;
  for (std::int64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

inline QSeries euler_product_inv(std::int64_t d, const Rational& order, EulerVariant variant = EulerVariant::Minus,
                                 std::int64_t denom = 2) {
  if (d < 0) throw std::invalid_argument("euler_product_inv: negative exponent");
  const bool half = variant == EulerVariant::HalfMinus || variant == EulerVariant::HalfPlus;
  const bool plus = variant == EulerVariant::Plus || variant == EulerVariant::HalfPlus;
  if (half && denom % 2 != 0) denom *= 2;
  QSeries result = QSeries::one(denom, order);
  if (d == 0) return result;
  for (std::int64_t n = 1;; ++n) {
    const Rational e = half ? Rational(2 * n - 1, 2) : Rational(n);
    if (e >= order) break;
    // (1 + s x)^{-d} = sum_k C(d+k-1, k) (-s)^k x^k
    QSeries factor(denom, order);
    for (std::int64_t k = 0; Rational(k) * e < order; ++k) {
      Rational c(binomial(Integer(d + k - 1), k));
      if (plus && k % 2 == 1) c = -c;
      factor.add_term(Rational(k) * e, c);
    }
    result *= factor;
  }
  return result;
}

/// Common exponent denominator used for every series attached to a lattice.
inline std::int64_t series_denominator(const EvenLattice& L) { return std::lcm<std::int64_t>(16, 2 * to_i64(L.det())); }

/// sum over v in lambda + L with (v,v)/2 < order of q^{(v,v)/2}.
inline QSeries theta_coset(const EvenLattice& L, const DualVector& lambda, const Rational& order) {
  QSeries s(series_denominator(L), order);
  if (order <= 0) return s;
  L.enumerator().for_each(coset_key(lambda), 2 * order, [&](const RatVector&, const Rational& nrm) {
    s.add_term(nrm / 2, 1);
  });
  return s;
}

inline QSeries theta_coset(const EvenLattice& L, const CosetElement& lambda, const Rational& order) {
  return theta_coset(L, lambda.rep, order);
}

/// Theta series of the dual lattice, enumerated directly on the integral form det(G) * G^{-1}.
inline QSeries theta_dual(const EvenLattice& L, const Rational& order) {
  const RatMatrix ginv = inverse(L.gram());
  RatMatrix scaled(L.rank(), L.rank());
  for (std::size_t i = 0; i < L.rank(); ++i)
    for (std::size_t j = 0; j < L.rank(); ++j) scaled(i, j) = ginv(i, j) * Rational(L.det());
  const ShortVectorEnumerator en(scaled);
  QSeries s(series_denominator(L), order);
  const Rational det(L.det());
  en.for_each(RatVector(L.rank(), Rational(0)), 2 * order * det, [&](const RatVector&, const Rational& nrm) {
    s.add_term(nrm / (2 * det), 1);
  });
  return s;
}

}  // namespace vlplus
