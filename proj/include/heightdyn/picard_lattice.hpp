#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "heightdyn/scalars.hpp"

namespace heightdyn {

/// Coordinates of a class Σ aᵢ Eᵢ in Pic ⊗ R with respect to a lattice basis.
class DivisorClass {
 public:
  DivisorClass() = default;
  explicit DivisorClass(std::vector<QuadraticNumber> coeffs) : coeffs_(std::move(coeffs)) {}
  DivisorClass(std::initializer_list<QuadraticNumber> coeffs) : coeffs_(coeffs) {}

  static DivisorClass zero(std::size_t rank) { return DivisorClass(std::vector<QuadraticNumber>(rank)); }
  /// Eᵢ
  static DivisorClass basis(std::size_t rank, std::size_t index);

  std::size_t rank() const noexcept { return coeffs_.size(); }
  const QuadraticNumber& operator[](std::size_t i) const { return coeffs_[i]; }
  QuadraticNumber& operator[](std::size_t i) { return coeffs_[i]; }
  std::span<const QuadraticNumber> coeffs() const noexcept { return coeffs_; }

  /// Common radicand of all entries (0 when every entry is rational).
  Integer field() const;
  bool is_zero() const;
  std::vector<long double> to_long_doubles() const;
  std::vector<double> to_doubles() const;

  DivisorClass& operator+=(const DivisorClass& rhs);
  DivisorClass& operator-=(const DivisorClass& rhs);
  DivisorClass& operator*=(const QuadraticNumber& scalar);

  friend DivisorClass operator+(DivisorClass lhs, const DivisorClass& rhs) { return lhs += rhs; }
  friend DivisorClass operator-(DivisorClass lhs, const DivisorClass& rhs) { return lhs -= rhs; }
  friend DivisorClass operator*(const QuadraticNumber& scalar, DivisorClass d) { return d *= scalar; }
  friend DivisorClass operator*(DivisorClass d, const QuadraticNumber& scalar) { return d *= scalar; }
  DivisorClass operator-() const;

  friend bool operator==(const DivisorClass&, const DivisorClass&) = default;

 private:
  std::vector<QuadraticNumber> coeffs_;
};

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Ample cone = open positive orthant, nef cone = closed orthant.
struct OrthantCone {
  friend bool operator==(const OrthantCone&, const OrthantCone&) = default;
};

/// Ample cone = {v : vᵀ·gram·v > 0, linear·v > 0}, one nappe of the light
/// cone of a Lorentzian form; nef cone is its closure.
struct QuadraticCone {
  RationalMatrix gram;
  std::vector<Rational> linear;
  friend bool operator==(const QuadraticCone&, const QuadraticCone&) = default;
};

using ConeSpec = std::variant<OrthantCone, QuadraticCone>;

/// Pic(W) ⊗ R as a coefficient space together with its ample cone.
///
/// Instances are only obtained through create(), which rejects cones that
/// are not open convex cones with nonempty interior: a quadratic cone needs
/// a nondegenerate form of signature (1, rank-1) and a linear functional
/// G·u with u strictly inside the light cone, and the witness class must be
/// ample.
class PicardLattice {
 public:
  static PicardLattice create(std::vector<std::string> labels, ConeSpec cone, Integer field_d,
                              DivisorClass witness_ample);
  /// Orthant lattice of the given rank with labels E1..Er and witness Σ Eᵢ.
  static PicardLattice orthant(std::size_t rank, Integer field_d = 0);

  std::size_t rank() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const ConeSpec& cone() const noexcept { return cone_; }
  const Integer& field() const noexcept { return field_d_; }
  const DivisorClass& witness() const noexcept { return witness_; }
  bool is_orthant() const noexcept { return std::holds_alternative<OrthantCone>(cone_); }

  bool is_ample(const DivisorClass& d) const;
  bool is_nef(const DivisorClass& d) const;

  /// Floating-point membership tests used by the bisection fallback.
  bool is_ample_approx(std::span<const long double> v) const;
  bool is_nef_approx(std::span<const long double> v) const;

  /// For quadratic cones: vᵀGw and ℓ·v. Throws DomainError on orthant lattices.
  QuadraticNumber bilinear(const DivisorClass& v, const DivisorClass& w) const;
  QuadraticNumber linear_form(const DivisorClass& v) const;

  friend bool operator==(const PicardLattice&, const PicardLattice&) = default;

 private:
  PicardLattice() = default;
  void check_rank(std::size_t rank) const;

  std::vector<std::string> labels_;
  ConeSpec cone_;
  Integer field_d_;
  DivisorClass witness_;
};

/// {t : base + t·direction ∈ cone} as an interval with exact endpoints.
/// A missing endpoint is infinite. For ample (open) intervals the endpoints
/// themselves are excluded; for nef (closed) intervals they are included.
struct ConeInterval {
  bool empty = false;
  std::optional<QuadraticNumber> lower;
  std::optional<QuadraticNumber> upper;

  static ConeInterval make_empty() { return {true, std::nullopt, std::nullopt}; }
};

/// Same object in floating point; infinite endpoints are ±infinity.
struct ApproxInterval {
  bool empty = false;
  long double lower;
  long double upper;
};

/// Closed-form section of the ample cone; nullopt when an endpoint is not
/// representable in the field spanned by the inputs.
std::optional<ConeInterval> try_cone_interval(const PicardLattice& lattice, const DivisorClass& base,
                                              const DivisorClass& direction);
/// As above but throws NotRepresentableError instead of returning nullopt.
ConeInterval cone_interval(const PicardLattice& lattice, const DivisorClass& base,
                           const DivisorClass& direction);

/// Closed-form section of the nef cone (closed interval).
std::optional<ConeInterval> try_nef_interval(const PicardLattice& lattice, const DivisorClass& base,
                                             const DivisorClass& direction);

/// Floating-point closed form on long double inputs (fast path for searches).
ApproxInterval approx_cone_interval(const PicardLattice& lattice, std::span<const long double> base,
                                    std::span<const long double> direction);

/// Membership-oracle bisection. `hint` is a parameter believed to lie in the
/// interval; if it does not, a doubling search over ±2^k is used to find one.
ApproxInterval bisect_cone_interval(const PicardLattice& lattice, const DivisorClass& base,
                                    const DivisorClass& direction, long double tolerance = 1e-12L,
                                    std::optional<long double> hint = std::nullopt);

/// inf{α : α·d1 − d2 ample} for ample d1, d2. Always finite.
QuadraticNumber dominance_scale(const PicardLattice& lattice, const DivisorClass& d1, const DivisorClass& d2);
double dominance_scale_approx(const PicardLattice& lattice, const DivisorClass& d1, const DivisorClass& d2,
                              long double tolerance = 1e-12L);

}  // namespace heightdyn
