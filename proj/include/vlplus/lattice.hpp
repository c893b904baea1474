#pragma once

// Exact geometry of positive definite even lattices given by a Gram matrix.
//
// Vectors are always stored as coordinates in the lattice basis: lattice vectors have integer
// coordinates, dual vectors rational ones. Nothing here uses floating point.

#include "vlplus/matrix.hpp"
#include "vlplus/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vlplus {

using LatticeVector = IntVector;
using DualVector = RatVector;

enum class LatticeErrorKind { NotSquare, NotSymmetric, NotEven, NotPositiveDefinite, BoundNegative, NotFullRank, NotInDual };

inline const char* to_string(LatticeErrorKind k) {
  switch (k) {
    case LatticeErrorKind::NotSquare: return "NotSquare";
    case LatticeErrorKind::NotSymmetric: return "NotSymmetric";
    case LatticeErrorKind::NotEven: return "NotEven";
    case LatticeErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case LatticeErrorKind::BoundNegative: return "BoundNegative";
    case LatticeErrorKind::NotFullRank: return "NotFullRank";
    case LatticeErrorKind::NotInDual: return "NotInDual";
  }
  return "?";
}

class LatticeError : public std::runtime_error {
 public:
  LatticeError(LatticeErrorKind kind, std::string message, std::size_t index = 0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), index_(index) {}

  LatticeErrorKind kind() const { return kind_; }
  /// 1-based row/minor index for NotEven / NotPositiveDefinite, 0 otherwise.
  std::size_t index() const { return index_; }

 private:
  LatticeErrorKind kind_;
  std::size_t index_;
};

/// Enumerates s + Z^d points of bounded norm for a positive definite rational Gram matrix.
///
/// The quadratic form is kept in the completed-square shape
///   Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
/// and the search runs from the last coordinate down, with exact integer ranges at every level.
class ShortVectorEnumerator {
 public:
  ShortVectorEnumerator() = default;
  explicit ShortVectorEnumerator(const RatMatrix& gram) : gram_(gram), q_(gram) {
    const std::size_t n = gram.rows();
    for (std::size_t i = 0; i < n; ++i) {
      if (q_(i, i) <= 0) throw std::domain_error("ShortVectorEnumerator: form not positive definite");
      for (std::size_t j = i + 1; j < n; ++j) {
        q_(j, i) = q_(i, j);
        q_(i, j) /= q_(i, i);
      }
      for (std::size_t k = i + 1; k < n; ++k)
        for (std::size_t l = k; l < n; ++l) q_(k, l) -= q_(k, i) * q_(i, l);
    }
  }

  std::size_t dimension() const { return gram_.rows(); }

  Rational norm(const RatVector& x) const {
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < x.size(); ++j) s += x[i] * gram_(i, j) * x[j];
    }
    return s;
  }

  /// Calls visit(x, Q(x)) for every x in shift + Z^d with Q(x) <= bound, in no particular order.
  template <class Visit>
  void for_each(const RatVector& shift, const Rational& bound, Visit&& visit) const {
    const std::size_t n = dimension();
    if (shift.size() != n) throw std::invalid_argument("ShortVectorEnumerator: shift has wrong length");
    if (bound < 0) return;
    RatVector x(n);
    if (n == 0) {
      visit(x, Rational(0));
      return;
    }
    recurse(n - 1, shift, bound, Rational(0), x, visit);
  }

  /// All points of shift + Z^d with Q(x) <= bound, sorted by (norm, lexicographic coordinates).
  std::vector<std::pair<RatVector, Rational>> collect(const RatVector& shift, const Rational& bound) const {
    std::vector<std::pair<RatVector, Rational>> out;
    for_each(shift, bound, [&](const RatVector& x, const Rational& nrm) { out.emplace_back(x, nrm); });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second < b.second;
      return lex_compare(a.first, b.first) < 0;
    });
    return out;
  }

 private:
  template <class Visit>
  void recurse(std::size_t level, const RatVector& shift, const Rational& bound, const Rational& used, RatVector& x,
               Visit& visit) const {
    const std::size_t n = dimension();
    Rational center = 0;
    for (std::size_t j = level + 1; j < n; ++j) center += q_(level, j) * x[j];
    const Rational remaining = bound - used;
    const Rational width2 = remaining / q_(level, level);
    // x_level = shift + z and (x_level + center)^2 <= width2  <=>  (z - u)^2 <= width2
    const Rational u = -center - shift[level];
    const Integer r = isqrt(floor(width2)) + 1;
    const Integer lo = floor(u) - r;
    const Integer hi = ceil(u) + r;
    for (Integer z = lo; z <= hi; ++z) {
      Rational t = Rational(z) - u;
      Rational term = t * t;
      if (term > width2) continue;
      x[level] = shift[level] + Rational(z);
      Rational now = used + q_(level, level) * term;
      if (level == 0) {
        visit(static_cast<const RatVector&>(x), now);
      } else {
        recurse(level - 1, shift, bound, now, x, visit);
      }
    }
    x[level] = 0;
  }

  RatMatrix gram_;
  RatMatrix q_;
};

/// Validated positive definite even lattice.
class EvenLattice {
 public:
  const IntMatrix& gram() const { return gram_; }
  std::size_t rank() const { return gram_.rows(); }
  const Integer& det() const { return det_; }
  const ShortVectorEnumerator& enumerator() const { return *enumerator_; }

  Integer pair(const LatticeVector& a, const LatticeVector& b) const {
    Integer s = 0;
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j) s += a[i] * gram_(i, j) * b[j];
    return s;
  }
  Rational pair(const DualVector& a, const DualVector& b) const {
    Rational s = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < rank(); ++j) s += a[i] * gram_(i, j) * b[j];
    }
    return s;
  }
  Rational norm(const DualVector& a) const { return pair(a, a); }

  /// G * c; integral exactly when c lies in the dual lattice.
  RatVector gram_times(const DualVector& c) const { return to_rational(gram_) * c; }

  bool in_dual(const DualVector& c) const {
    for (const auto& y : gram_times(c))
      if (!is_integer(y)) return false;
    return true;
  }
  static bool in_lattice(const DualVector& c) {
    return std::all_of(c.begin(), c.end(), [](const Rational& r) { return is_integer(r); });
  }

  friend bool operator==(const EvenLattice& a, const EvenLattice& b) { return a.gram_ == b.gram_; }

 private:
  friend EvenLattice validate_even_lattice(const IntMatrix& gram);
  EvenLattice(IntMatrix gram, Integer det)
      : gram_(std::move(gram)), det_(std::move(det)), enumerator_(std::make_shared<ShortVectorEnumerator>(to_rational(gram_))) {}

  IntMatrix gram_;
  Integer det_;
  std::shared_ptr<const ShortVectorEnumerator> enumerator_;
};

inline EvenLattice validate_even_lattice(const IntMatrix& gram) {
  if (!gram.square() || gram.rows() == 0) throw LatticeError(LatticeErrorKind::NotSquare, "Gram matrix must be square and non-empty");
  const std::size_t n = gram.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (gram(i, j) != gram(j, i))
        throw LatticeError(LatticeErrorKind::NotSymmetric,
                           "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") differs from its transpose");
  for (std::size_t i = 0; i < n; ++i)
    if (gram(i, i) % 2 != 0)
      throw LatticeError(LatticeErrorKind::NotEven, "diagonal entry " + std::to_string(i + 1) + " is odd", i + 1);
  const IntVector minors = leading_principal_minors(gram);
  for (std::size_t k = 0; k < n; ++k)
    if (minors[k] <= 0)
      throw LatticeError(LatticeErrorKind::NotPositiveDefinite,
                         "leading principal minor " + std::to_string(k + 1) + " is not positive", k + 1);
  return EvenLattice(gram, minors[n - 1]);
}

// ---------------------------------------------------------------------------------------------
// Discriminant group

struct DiscriminantGroup {
  IntVector invariant_factors;        // d_1 | d_2 | ... | d_k, all > 1
  std::vector<DualVector> generators;  // d_i * g_i lies in L
  Integer order;
  IntMatrix smith_u;                  // U with U G V = diag(1,...,1,d_1,...,d_k)
  std::size_t unit_factors = 0;       // number of leading 1's in the Smith form

  /// Coordinates of the class of a dual vector in Z/d_1 x ... x Z/d_k.
  IntVector coordinates(const EvenLattice& lattice, const DualVector& c) const {
    const RatVector y = lattice.gram_times(c);
    IntVector yi(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!is_integer(y[i])) throw LatticeError(LatticeErrorKind::NotInDual, "vector is not in the dual lattice");
      yi[i] = numerator(y[i]);
    }
    const IntVector z = smith_u * yi;
    IntVector out(invariant_factors.size());
    for (std::size_t i = 0; i < invariant_factors.size(); ++i) {
      Integer m = z[unit_factors + i] % invariant_factors[i];
      if (m < 0) m += invariant_factors[i];
      out[i] = m;
    }
    return out;
  }
};

inline DiscriminantGroup discriminant_group(const EvenLattice& lattice) {
  SmithForm snf = smith_normal_form(lattice.gram());
  DiscriminantGroup g;
  g.order = 1;
  const std::size_t n = lattice.rank();
  for (std::size_t i = 0; i < n; ++i) {
    const Integer& d = snf.diagonal[i];
    g.order *= d;
    if (d == 1) {
      ++g.unit_factors;
      continue;
    }
    g.invariant_factors.push_back(d);
    DualVector gen(n);
    for (std::size_t r = 0; r < n; ++r) gen[r] = Rational(snf.v(r, i), d);
    g.generators.push_back(std::move(gen));
  }
  g.smith_u = std::move(snf.u);
  return g;
}

// ---------------------------------------------------------------------------------------------
// Cosets of L in the dual lattice

struct CosetElement {
  DualVector rep;
  Rational min_norm;

  friend bool operator==(const CosetElement&, const CosetElement&) = default;
};

/// Componentwise fractional part: equal exactly for vectors in the same coset of L.
inline RatVector coset_key(const DualVector& v) {
  RatVector k(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) k[i] = frac(v[i]);
  return k;
}

inline DualVector negate(const DualVector& v) {
  DualVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  return out;
}

/// Minimal-norm, then lexicographically smallest, representative of lambda + L.
inline CosetElement canonical_coset_element(const EvenLattice& lattice, const DualVector& lambda) {
  if (!lattice.in_dual(lambda)) throw LatticeError(LatticeErrorKind::NotInDual, "coset representative is not in the dual lattice");
  const RatVector f = coset_key(lambda);
  const Rational bound = lattice.norm(f);
  auto all = lattice.enumerator().collect(f, bound);
  return {all.front().first, all.front().second};
}

inline std::vector<DualVector> enumerate_coset_vectors(const EvenLattice& lattice, const DualVector& lambda, const Rational& bound) {
  if (bound < 0) throw LatticeError(LatticeErrorKind::BoundNegative, "enumeration bound must be non-negative");
  if (!lattice.in_dual(lambda)) throw LatticeError(LatticeErrorKind::NotInDual, "shift is not in the dual lattice");
  auto all = lattice.enumerator().collect(coset_key(lambda), bound);
  std::vector<DualVector> out;
  out.reserve(all.size());
  for (auto& [v, n] : all) out.push_back(std::move(v));
  return out;
}

/// One canonical element per class of L°/L: the zero coset first, then by (min_norm, rep).
inline std::vector<CosetElement> minimal_coset_reps(const EvenLattice& lattice) {
  const DiscriminantGroup g = discriminant_group(lattice);
  const std::size_t n = lattice.rank();
  std::vector<CosetElement> out;
  std::vector<Integer> digits(g.invariant_factors.size(), Integer(0));
  for (;;) {
    DualVector v(n, Rational(0));
    for (std::size_t i = 0; i < digits.size(); ++i)
      for (std::size_t r = 0; r < n; ++r) v[r] += Rational(digits[i]) * g.generators[i][r];
    out.push_back(canonical_coset_element(lattice, v));
    std::size_t i = 0;
    while (i < digits.size()) {
      if (++digits[i] < g.invariant_factors[i]) break;
      digits[i] = 0;
      ++i;
    }
    if (i == digits.size()) break;
  }
  std::sort(out.begin(), out.end(), [](const CosetElement& a, const CosetElement& b) {
    if (a.min_norm != b.min_norm) return a.min_norm < b.min_norm;
    return lex_compare(a.rep, b.rep) < 0;
  });
  return out;
}

inline std::vector<LatticeVector> norm2_vectors(const EvenLattice& lattice) {
  std::vector<LatticeVector> out;
  for (const auto& v : enumerate_coset_vectors(lattice, DualVector(lattice.rank(), Rational(0)), Rational(2))) {
    if (lattice.norm(v) != 2) continue;
    LatticeVector w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = numerator(v[i]);
    out.push_back(std::move(w));
  }
  return out;
}

/// Delta(lambda) = { alpha in L : (lambda + alpha, lambda + alpha) = min_norm }.
inline std::vector<LatticeVector> delta_set(const EvenLattice& lattice, const CosetElement& lambda) {
  std::vector<LatticeVector> out;
  for (const auto& v : enumerate_coset_vectors(lattice, lambda.rep, lambda.min_norm)) {
    LatticeVector a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      Rational d = v[i] - lambda.rep[i];
      a[i] = numerator(d);
    }
    out.push_back(std::move(a));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Orthogonal sublattices

struct OrthogonalSublattice {
  std::vector<LatticeVector> basis;  // pairwise orthogonal, coordinates in the basis of L
  IntMatrix gram;                    // diagonal Gram matrix of the basis
  Integer index;                     // [L : L_1]
};

inline bool is_diagonal(const IntMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0) return false;
  return true;
}

inline IntMatrix sublattice_gram(const EvenLattice& lattice, const std::vector<LatticeVector>& basis) {
  IntMatrix g(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) g(i, j) = lattice.pair(basis[i], basis[j]);
  return g;
}

inline IntMatrix basis_matrix(const std::vector<LatticeVector>& basis) {
  IntMatrix b(basis.size(), basis.empty() ? 0 : basis.front().size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) = basis[i][j];
  return b;
}

/// Rational Gram-Schmidt on the input basis, each vector scaled by the least positive integer
/// that clears its denominators.
inline OrthogonalSublattice orthogonal_sublattice(const EvenLattice& lattice) {
  const std::size_t n = lattice.rank();
  std::vector<RatVector> ortho;
  std::vector<Rational> ortho_norm;
  for (std::size_t i = 0; i < n; ++i) {
    RatVector b(n, Rational(0));
    b[i] = 1;
    RatVector star = b;
    for (std::size_t j = 0; j < ortho.size(); ++j) {
      Rational mu = lattice.pair(b, ortho[j]) / ortho_norm[j];
      for (std::size_t k = 0; k < n; ++k) star[k] -= mu * ortho[j][k];
    }
    ortho_norm.push_back(lattice.norm(star));
    ortho.push_back(std::move(star));
  }
  OrthogonalSublattice out;
  for (const auto& v : ortho) {
    Integer m = 1;
    for (const auto& c : v) m = lcm(m, denominator(c));
    LatticeVector w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = numerator(v[k] * Rational(m));
    out.basis.push_back(std::move(w));
  }
  out.gram = sublattice_gram(lattice, out.basis);
  out.index = abs(determinant(basis_matrix(out.basis)));
  return out;
}

/// Canonical representatives of L / L_1 (minimal norm, then lexicographic), zero first.
inline std::vector<LatticeVector> coset_reps_mod_sublattice(const EvenLattice& lattice, const std::vector<LatticeVector>& basis) {
  const std::size_t n = lattice.rank();
  if (basis.size() != n) throw LatticeError(LatticeErrorKind::NotFullRank, "sublattice basis must have rank(L) vectors");
  const IntMatrix b = basis_matrix(basis);
  if (determinant(b) == 0) throw LatticeError(LatticeErrorKind::NotFullRank, "sublattice basis is linearly dependent");

  // L/L_1 = Z^n / B^T Z^n
  const IntMatrix bt = b.transposed();
  const SmithForm snf = smith_normal_form(bt);
  const RatMatrix uinv = inverse(snf.u);
  const RatMatrix bt_inv = inverse(bt);
  const ShortVectorEnumerator sub_enum(to_rational(sublattice_gram(lattice, basis)));

  std::vector<std::size_t> factors;
  for (std::size_t i = 0; i < n; ++i)
    if (snf.diagonal[i] != 1) factors.push_back(i);

  std::vector<std::pair<LatticeVector, Rational>> reps;
  std::vector<Integer> digits(factors.size(), Integer(0));
  for (;;) {
    RatVector a(n, Rational(0));
    for (std::size_t k = 0; k < factors.size(); ++k) a[factors[k]] = Rational(digits[k]);
    const RatVector gamma = uinv * a;
    // coordinates in the L_1 basis, reduced mod L_1
    const RatVector f = coset_key(bt_inv * gamma);
    auto cands = sub_enum.collect(f, sub_enum.norm(f));
    const Rational best = cands.front().second;
    std::optional<LatticeVector> pick;
    for (const auto& [y, nrm] : cands) {
      if (nrm != best) break;
      RatVector x = to_rational(bt) * y;
      LatticeVector xi(n);
      for (std::size_t k = 0; k < n; ++k) xi[k] = numerator(x[k]);
      if (!pick || std::lexicographical_compare(xi.begin(), xi.end(), pick->begin(), pick->end())) pick = xi;
    }
    reps.emplace_back(*pick, best);
    std::size_t i = 0;
    while (i < digits.size()) {
      if (++digits[i] < snf.diagonal[factors[i]]) break;
      digits[i] = 0;
      ++i;
    }
    if (i == digits.size()) break;
  }
  std::sort(reps.begin(), reps.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return std::lexicographical_compare(x.first.begin(), x.first.end(), y.first.begin(), y.first.end());
  });
  std::vector<LatticeVector> out;
  for (auto& r : reps) out.push_back(std::move(r.first));
  return out;
}

// ---------------------------------------------------------------------------------------------
// 2-cocycle and mod-2 data

enum class CocycleNormalization {
  UpperUnit,  // eps(b_i, b_j) = +1 for i <= j, (-1)^{(b_i,b_j)} for i > j
  LowerUnit,  // eps(b_i, b_j) = +1 for i >= j, (-1)^{(b_i,b_j)} for i < j
};

/// Bimultiplicative eps(a, b) = (-1)^{a^T E b} with E over the two-element field.
struct TwoCocycle {
  Matrix<int> bits;

  int sign(const IntVector& a, const IntVector& b) const {
    Integer s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (bits(i, j)) s += a[i] * b[j];
    return (s % 2 == 0) ? 1 : -1;
  }
};

inline TwoCocycle epsilon_cocycle(const EvenLattice& lattice, CocycleNormalization norm = CocycleNormalization::UpperUnit) {
  const std::size_t n = lattice.rank();
  TwoCocycle e{Matrix<int>(n, n, 0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool active = (norm == CocycleNormalization::UpperUnit) ? (i > j) : (i < j);
      if (active && lattice.gram()(i, j) % 2 != 0) e.bits(i, j) = 1;
    }
  return e;
}

using Gf2Vector = std::vector<std::uint8_t>;

struct ModTwoData {
  Matrix<int> form;                   // B_ij = (b_i, b_j) mod 2
  std::vector<Gf2Vector> radical_basis;
  std::size_t r2 = 0;

  int bilinear(const Gf2Vector& a, const Gf2Vector& b) const {
    int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) s ^= (a[i] & b[j] & form(i, j));
    return s;
  }
};

/// q(alpha) = (alpha, alpha)/2 mod 2.
inline int quadratic_mod2(const EvenLattice& lattice, const IntVector& alpha) {
  Integer h = lattice.pair(alpha, alpha) / 2;
  return (h % 2 == 0) ? 0 : 1;
}

inline IntVector lift(const Gf2Vector& v) {
  IntVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

/// Null space of a square matrix over the two-element field, one unit-led vector per free column.
inline std::vector<Gf2Vector> gf2_null_space(Matrix<int> m) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < n; ++c) {
    std::size_t p = row;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) continue;
    m.swap_rows(row, p);
    for (std::size_t r = 0; r < n; ++r)
      if (r != row && m(r, c))
        for (std::size_t j = 0; j < n; ++j) m(r, j) ^= m(row, j);
    pivot_cols.push_back(c);
    ++row;
  }
  std::vector<Gf2Vector> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), f) != pivot_cols.end()) continue;
    Gf2Vector v(n, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) v[pivot_cols[r]] = static_cast<std::uint8_t>(m(r, f));
    basis.push_back(std::move(v));
  }
  return basis;
}

inline ModTwoData mod_two_data(const EvenLattice& lattice) {
  const std::size_t n = lattice.rank();
  ModTwoData d{Matrix<int>(n, n, 0), {}, 0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d.form(i, j) = (lattice.gram()(i, j) % 2 == 0) ? 0 : 1;
  d.radical_basis = gf2_null_space(d.form);
  d.r2 = d.radical_basis.size();
  return d;
}

}  // namespace vlplus
