#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "heightdyn/coefficients.hpp"
#include "heightdyn/int_matrix.hpp"
#include "heightdyn/scalars.hpp"

namespace heightdyn {

/// Dimensions (n_1, ..., n_k) of a product of projective spaces.
using Signature = std::vector<int>;

/// Point of P^n(Q) stored as its canonical integer representative: coprime
/// coordinates with the first nonzero one positive.
class RationalProjectivePoint {
 public:
  /// Canonicalizes raw coordinates; throws DomainError when all are zero.
  static RationalProjectivePoint normalize(std::vector<Integer> raw);
  static RationalProjectivePoint normalize(std::initializer_list<long> raw);

  int dimension() const noexcept { return static_cast<int>(coords_.size()) - 1; }
  const std::vector<Integer>& coords() const noexcept { return coords_; }
  const Integer& operator[](std::size_t i) const { return coords_[i]; }

  std::string to_string() const;

  friend bool operator==(const RationalProjectivePoint&, const RationalProjectivePoint&) = default;
  /// Lexicographic on coordinates, shorter points first.
  friend bool operator<(const RationalProjectivePoint& lhs, const RationalProjectivePoint& rhs);

 private:
  RationalProjectivePoint() = default;
  std::vector<Integer> coords_;
};

RationalProjectivePoint normalize(std::vector<Integer> raw);

class MultiPoint {
 public:
  MultiPoint() = default;
  explicit MultiPoint(std::vector<RationalProjectivePoint> factors) : factors_(std::move(factors)) {}

  std::size_t size() const noexcept { return factors_.size(); }
  const RationalProjectivePoint& operator[](std::size_t i) const { return factors_[i]; }
  const std::vector<RationalProjectivePoint>& factors() const noexcept { return factors_; }
  Signature signature() const;
  bool matches(const Signature& signature) const;

  std::string to_string() const;

  friend bool operator==(const MultiPoint&, const MultiPoint&) = default;
  friend bool operator<(const MultiPoint& lhs, const MultiPoint& rhs);

 private:
  std::vector<RationalProjectivePoint> factors_;
};

struct MultiPointHash {
  std::size_t operator()(const MultiPoint& p) const noexcept;
};

/// c · x^e with e indexed by the flat list of source variables, block by block.
struct Term {
  Integer coefficient;
  std::vector<int> exponents;

  friend bool operator==(const Term&, const Term&) = default;
};
using Polynomial = std::vector<Term>;

/// Morphism-candidate ∏P^{n_i} → ∏P^{m_j} given by multihomogeneous
/// integer polynomials, one list of m_j + 1 coordinates per target factor.
class MultiHomogeneousMap {
 public:
  /// Validates shapes and multihomogeneity; zero terms are dropped.
  MultiHomogeneousMap(Signature source, std::vector<std::vector<Polynomial>> targets);

  /// (x_0^d : ... : x_n^d) on P^n.
  static MultiHomogeneousMap power_map(int n, int degree);
  static MultiHomogeneousMap identity(const Signature& signature);
  /// Factor-wise product of maps acting on disjoint blocks.
  static MultiHomogeneousMap product(const std::vector<MultiHomogeneousMap>& factors);
  /// Factor j of the result is factor permutation[j] of this map.
  MultiHomogeneousMap permute_targets(const std::vector<std::size_t>& permutation) const;

  const Signature& source_signature() const noexcept { return source_; }
  Signature target_signature() const;
  bool is_endomorphism() const { return source_ == target_signature(); }
  std::size_t variable_count() const noexcept { return offsets_.back(); }
  /// First flat variable index of each source block (plus a final total).
  const std::vector<std::size_t>& block_offsets() const noexcept { return offsets_; }
  const std::vector<std::vector<Polynomial>>& targets() const noexcept { return targets_; }

  /// Common degree of target factor j in the variables of block i.
  int degree(std::size_t block, std::size_t target) const { return degrees_[block][target]; }
  /// Source blocks target factor j actually depends on.
  std::vector<std::size_t> support(std::size_t target) const;

  /// Image of P in target factor j; P's other blocks are ignored.
  RationalProjectivePoint evaluate_factor(std::size_t target, const MultiPoint& point) const;
  MultiPoint operator()(const MultiPoint& point) const;

  friend bool operator==(const MultiHomogeneousMap& lhs, const MultiHomogeneousMap& rhs) {
    return lhs.source_ == rhs.source_ && lhs.targets_ == rhs.targets_;
  }

 private:
  Signature source_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<Polynomial>> targets_;
  std::vector<std::vector<int>> degrees_;
};

/// Throws BasePointError when some target block vanishes identically at P.
MultiPoint evaluate(const MultiHomogeneousMap& map, const MultiPoint& point);

/// log max |x_i| of the canonical representative.
double weil_height(const RationalProjectivePoint& point);
/// Σ a_i h(P_i).
double height_wrt(std::span<const double> coefficients, const MultiPoint& point);
double height_wrt(const DivisorClass& divisor, const MultiPoint& point);

/// Rows are source blocks, columns target factors: entry (i, j) = d_ij.
IntMatrix multidegree_matrix(const MultiHomogeneousMap& map);
/// φ*E_j = Σ_i d_ij E_i; endomorphisms only.
PullbackMap multidegree_pullback(const MultiHomogeneousMap& map);
PullbackMap to_pullback(const IntMatrix& matrix);

/// Points of P^n with max |x_i| ≤ bound, lexicographic.
std::vector<RationalProjectivePoint> enumerate_projective(int n, long bound);
/// Calls visit for every point of ∏P^{n_i} with every factor of
/// multiplicative height ≤ bound, in lexicographic order.
void for_each_point(const Signature& signature, long bound, const std::function<void(const MultiPoint&)>& visit);
std::vector<MultiPoint> enumerate_points(const Signature& signature, long bound);

}  // namespace heightdyn
